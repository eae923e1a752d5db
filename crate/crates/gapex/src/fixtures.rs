//! Bundled demonstration maps in the ASCII grid format, embedded so that the
//! selfcheck command works without any files on disk. The same maps ship in
//! the repository under `crates/gapex/fixtures/` for command-line use.

/// 50x50 m obstacle-free, 0.25 m cells.
pub const OPEN50: &str = include_str!("../fixtures/open50.grid");
/// 20x20 m obstacle-free, 0.1 m cells.
pub const EMPTY: &str = include_str!("../fixtures/empty.grid");
/// Open hall with a 1.6 m wide dead-end corridor jutting east.
pub const CORRIDOR: &str = include_str!("../fixtures/corridor.grid");
/// Square room with a single 1.2 m door on its east wall.
pub const ROOM_DOOR: &str = include_str!("../fixtures/room_door.grid");
/// Open space cluttered with rectangular blocks.
pub const PILLARS: &str = include_str!("../fixtures/pillars.grid");
/// Five rooms joined by 0.9 m doors.
pub const APARTMENT: &str = include_str!("../fixtures/apartment.grid");
/// Open space with a sealed, unreachable room.
pub const WALLED_OFF: &str = include_str!("../fixtures/walled_off.grid");

/// Every bundled map with its file name.
pub fn all() -> [(&'static str, &'static str); 7] {
    [
        ("open50.grid", OPEN50),
        ("empty.grid", EMPTY),
        ("corridor.grid", CORRIDOR),
        ("room_door.grid", ROOM_DOOR),
        ("pillars.grid", PILLARS),
        ("apartment.grid", APARTMENT),
        ("walled_off.grid", WALLED_OFF),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::OccupancyGrid;

    #[test]
    fn every_fixture_parses_and_round_trips() {
        for (name, text) in all() {
            let grid = OccupancyGrid::from_ascii(text).unwrap_or_else(|e| {
                panic!("fixture {name} failed to parse: {e}");
            });
            assert!(grid.free_count() > 0, "{name} has no free space");
            assert_eq!(grid.to_ascii(), text, "{name} does not round-trip");
        }
    }
}
