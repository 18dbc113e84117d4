//! Canonical JSON document for executed layouts.
//!
//! This is the only serialization of a [`Layout`]: a versioned document
//! with a fixed field order, entity arrays keyed by stable string ids,
//! derived wall centerlines, and an optional topology block. Exporting
//! an imported export reproduces the original bytes, so documents can
//! be compared with plain string equality.

use serde::{Deserialize, Serialize};

use crate::geom::{Contour, Direction, Point, Rect};
use crate::kernel::{DoorHost, KernelConfig, Layout};
use crate::topology::{self, TopologyReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Construction constants the layout was built under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub wall_thickness: f64,
    pub tolerance: f64,
    pub min_segment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub id: String,
    pub name: String,
    pub rect: Rect,
    /// False once consumed by a split or merge.
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitJson {
    pub id: String,
    pub name: String,
    /// Ids of the modules the unit was assembled from.
    pub modules: Vec<String>,
    pub region: Vec<Rect>,
    pub outline: Contour,
    pub usable: Vec<Rect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomJson {
    pub id: String,
    pub name: String,
    pub unit: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    pub rect: Rect,
    pub region: Vec<Rect>,
    pub outline: Contour,
    pub regular: bool,
    pub open: bool,
}

/// A wall centerline segment. Module walls run along module boundaries;
/// room walls sit half a thickness outside the room face they back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallJson {
    pub host: String,
    pub a: Point,
    pub b: Point,
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoorJson {
    pub id: String,
    pub host: String,
    pub direction: Direction,
    pub rect: Rect,
    pub dimension: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleJson {
    pub id: String,
    pub module: String,
    pub direction: Direction,
    pub rect: Rect,
    pub dimension: f64,
}

/// One entity creation event, in per-kind creation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreationJson {
    pub kind: String,
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDoc {
    pub schema_version: u32,
    pub level: String,
    pub config: ConfigJson,
    pub modules: Vec<ModuleJson>,
    pub units: Vec<UnitJson>,
    pub rooms: Vec<RoomJson>,
    pub walls: Vec<WallJson>,
    pub doors: Vec<DoorJson>,
    pub holes: Vec<HoleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologyReport>,
    pub creation_log: Vec<CreationJson>,
}

fn module_id(i: usize) -> String {
    format!("module:{i}")
}

fn unit_id(i: usize) -> String {
    format!("unit:{i}")
}

fn room_id(i: usize) -> String {
    format!("room:{i}")
}

/// Clockwise ring of a rectangle, starting at its bottom-left corner.
fn rect_ring(r: &Rect) -> [Point; 4] {
    [
        r.min,
        Point::new(r.min.x, r.max_y()),
        r.max(),
        Point::new(r.max_x(), r.min.y),
    ]
}

/// Perimeter wall centerlines of one host. Contours are clockwise, so
/// the interior lies to the right of each directed edge and the outward
/// normal is the left-hand one.
fn outline_walls(host: &str, points: &[Point], offset: f64, thickness: f64) -> Vec<WallJson> {
    let n = points.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = dx.abs() + dy.abs();
        if len <= 0.0 {
            continue;
        }
        let (nx, ny) = (-dy / len, dx / len);
        out.push(WallJson {
            host: host.to_string(),
            a: Point::new(a.x + nx * offset, a.y + ny * offset),
            b: Point::new(b.x + nx * offset, b.y + ny * offset),
            thickness,
        });
    }
    out
}

fn derive_walls(layout: &Layout, cfg: &KernelConfig) -> Vec<WallJson> {
    let wt = cfg.wall_thickness;
    let mut walls = Vec::new();
    for (i, m) in layout.alive_modules() {
        walls.extend(outline_walls(&module_id(i), &rect_ring(&m.rect), 0.0, wt));
    }
    for (i, r) in layout.rooms.iter().enumerate() {
        walls.extend(outline_walls(
            &room_id(i),
            &r.outline.points,
            wt / 2.0,
            wt,
        ));
    }
    walls
}

fn creation_log(layout: &Layout) -> Vec<CreationJson> {
    let mut log = Vec::new();
    for (i, m) in layout.modules.iter().enumerate() {
        log.push(CreationJson {
            kind: "module".into(),
            id: module_id(i),
            name: Some(m.name.clone()),
        });
    }
    for (i, u) in layout.units.iter().enumerate() {
        log.push(CreationJson {
            kind: "unit".into(),
            id: unit_id(i),
            name: Some(u.name.clone()),
        });
    }
    for (i, r) in layout.rooms.iter().enumerate() {
        log.push(CreationJson {
            kind: "room".into(),
            id: room_id(i),
            name: Some(r.name.clone()),
        });
    }
    for i in 0..layout.doors.len() {
        log.push(CreationJson {
            kind: "door".into(),
            id: format!("door:{i}"),
            name: None,
        });
    }
    for i in 0..layout.holes.len() {
        log.push(CreationJson {
            kind: "hole".into(),
            id: format!("hole:{i}"),
            name: None,
        });
    }
    log
}

/// Builds the document for an executed layout. `with_topology` embeds
/// the relation matrices and containment verdicts.
pub fn export_layout(layout: &Layout, cfg: &KernelConfig, with_topology: bool) -> LayoutDoc {
    LayoutDoc {
        schema_version: SCHEMA_VERSION,
        level: layout.level.clone(),
        config: ConfigJson {
            wall_thickness: cfg.wall_thickness,
            tolerance: cfg.tolerance,
            min_segment: cfg.min_segment,
        },
        modules: layout
            .modules
            .iter()
            .enumerate()
            .map(|(i, m)| ModuleJson {
                id: module_id(i),
                name: m.name.clone(),
                rect: m.rect,
                alive: m.alive,
            })
            .collect(),
        units: layout
            .units
            .iter()
            .enumerate()
            .map(|(i, u)| UnitJson {
                id: unit_id(i),
                name: u.name.clone(),
                modules: u.modules.iter().map(|&m| module_id(m)).collect(),
                region: u.region.clone(),
                outline: u.outline.clone(),
                usable: u.usable.clone(),
            })
            .collect(),
        rooms: layout
            .rooms
            .iter()
            .enumerate()
            .map(|(i, r)| RoomJson {
                id: room_id(i),
                name: r.name.clone(),
                unit: unit_id(r.unit),
                module: r.module.map(module_id),
                rect: r.rect,
                region: r.region.clone(),
                outline: r.outline.clone(),
                regular: r.regular,
                open: r.open,
            })
            .collect(),
        walls: derive_walls(layout, cfg),
        doors: layout
            .doors
            .iter()
            .enumerate()
            .map(|(i, d)| DoorJson {
                id: format!("door:{i}"),
                host: match d.host {
                    DoorHost::Room(r) => room_id(r),
                    DoorHost::Module(m) => module_id(m),
                },
                direction: d.direction,
                rect: d.rect,
                dimension: d.dimension,
            })
            .collect(),
        holes: layout
            .holes
            .iter()
            .enumerate()
            .map(|(i, h)| HoleJson {
                id: format!("hole:{i}"),
                module: module_id(h.module),
                direction: h.direction,
                rect: h.rect,
                dimension: h.dimension,
            })
            .collect(),
        topology: with_topology.then(|| topology::analyze(layout, cfg)),
        creation_log: creation_log(layout),
    }
}

/// Canonical text form: pretty-printed, fixed field order, trailing
/// newline. Equal documents always produce identical bytes.
pub fn to_json(doc: &LayoutDoc) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serializes");
    text.push('\n');
    text
}

pub fn from_json(text: &str) -> Result<LayoutDoc, serde_json::Error> {
    serde_json::from_str(text)
}
