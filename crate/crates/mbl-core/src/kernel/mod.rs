//! Layout construction kernel.
//!
//! Executes a checked action program statement by statement, maintaining
//! the set of modules, units, rooms, doors and holes. Every operation
//! validates its geometric preconditions and fails with a categorized
//! [`ExecError`] instead of producing a broken layout.
//!
//! Wall conventions: walls are centered on module and unit boundaries
//! and are `wall_thickness` thick, so room faces sit half a wall inside
//! the boundary they follow. Doors fill the wall slab they pierce.

mod exec;

pub use exec::{execute_program, run_source, Executor, RunError};

use serde::{Deserialize, Serialize};

use crate::geom::{Contour, Direction, Rect};

/// Tunable construction constants. Defaults match the residential scale
/// the action language is used at (millimeters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Wall slab thickness; walls are centered on boundaries.
    pub wall_thickness: f64,
    /// Smallest admissible extent for split pieces.
    pub min_segment: f64,
    /// Geometric comparison slack.
    pub tolerance: f64,
    /// Display name of the level all entities live on.
    pub level: String,
}

impl Default for KernelConfig {
    fn default() -> KernelConfig {
        KernelConfig {
            wall_thickness: 100.0,
            min_segment: 200.0,
            tolerance: 0.5,
            level: "Level 1".to_string(),
        }
    }
}

/// Why an operation was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecErrorKind {
    /// Geometry extends beyond the region that must contain it.
    OutOfBounds,
    /// Two entities claim the same area.
    Overlap,
    /// A produced piece or region falls below the minimum size.
    TooSmall,
    /// A region that must be rectangular is not.
    NotRectangular,
    /// A region encloses a hole.
    HasHole,
    /// A region is not edge-connected.
    Disconnected,
    /// A referenced module was consumed by a split or merge.
    EntityRetired,
    /// An entity is used under a container it does not belong to.
    HostMismatch,
    /// The statement breaks the operation contract in some other way.
    Invalid,
}

impl ExecErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExecErrorKind::OutOfBounds => "out-of-bounds",
            ExecErrorKind::Overlap => "overlap",
            ExecErrorKind::TooSmall => "too-small",
            ExecErrorKind::NotRectangular => "not-rectangular",
            ExecErrorKind::HasHole => "has-hole",
            ExecErrorKind::Disconnected => "disconnected",
            ExecErrorKind::EntityRetired => "entity-retired",
            ExecErrorKind::HostMismatch => "host-mismatch",
            ExecErrorKind::Invalid => "invalid",
        }
    }
}

impl std::fmt::Display for ExecErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rejected statement: where, what category, and a concrete message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecError {
    /// Index of the offending statement, when known.
    pub statement: Option<usize>,
    pub kind: ExecErrorKind,
    pub message: String,
}

impl std::fmt::Display for ExecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.statement {
            Some(i) => write!(f, "statement {}: {}: {}", i + 1, self.kind, self.message),
            None => write!(f, "{}: {}", self.kind, self.message),
        }
    }
}

impl std::error::Error for ExecError {}

/// A prefabricated box. Retired modules keep their geometry so doors
/// and holes cut while they were alive stay meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleEnt {
    pub name: String,
    pub rect: Rect,
    /// False once consumed by a split or merge.
    pub alive: bool,
}

/// A dwelling or shared zone assembled from module areas.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitEnt {
    pub name: String,
    /// Indices of the modules the unit was built from.
    pub modules: Vec<usize>,
    /// Claimed area as disjoint cells.
    pub region: Vec<Rect>,
    pub outline: Contour,
    /// Region eroded by half a wall: where room faces may lie.
    pub usable: Vec<Rect>,
}

/// A room inside one unit, optionally pinned to one module's footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomEnt {
    pub name: String,
    pub unit: usize,
    pub module: Option<usize>,
    /// Bounding box of the region (equals the region when regular).
    pub rect: Rect,
    pub region: Vec<Rect>,
    pub outline: Contour,
    /// True when the region is a plain rectangle.
    pub regular: bool,
    /// Room declared open-plan (no door needed to reach it).
    pub open: bool,
}

/// What a door is cut through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoorHost {
    Room(usize),
    Module(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoorEnt {
    pub host: DoorHost,
    pub direction: Direction,
    /// Wall-filling slab the door occupies.
    pub rect: Rect,
    /// Clear opening width along the wall.
    pub dimension: f64,
}

/// A permanent opening between module walls.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleEnt {
    pub module: usize,
    pub direction: Direction,
    pub rect: Rect,
    pub dimension: f64,
}

/// Everything built so far. Entity vectors only grow; cross-references
/// are indices into them, so they stay valid for the whole run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    pub level: String,
    pub modules: Vec<ModuleEnt>,
    pub units: Vec<UnitEnt>,
    pub rooms: Vec<RoomEnt>,
    pub doors: Vec<DoorEnt>,
    pub holes: Vec<HoleEnt>,
}

impl Layout {
    pub fn new(level: impl Into<String>) -> Layout {
        Layout {
            level: level.into(),
            ..Layout::default()
        }
    }

    pub fn alive_modules(&self) -> impl Iterator<Item = (usize, &ModuleEnt)> {
        self.modules
            .iter()
            .enumerate()
            .filter(|(_, m)| m.alive)
    }

    /// First alive module with this display name.
    pub fn module_by_name(&self, name: &str) -> Option<(usize, &ModuleEnt)> {
        self.alive_modules().find(|(_, m)| m.name == name)
    }

    pub fn unit_by_name(&self, name: &str) -> Option<(usize, &UnitEnt)> {
        self.units
            .iter()
            .enumerate()
            .find(|(_, u)| u.name == name)
    }

    pub fn room_by_name(&self, name: &str) -> Option<(usize, &RoomEnt)> {
        self.rooms
            .iter()
            .enumerate()
            .find(|(_, r)| r.name == name)
    }
}
