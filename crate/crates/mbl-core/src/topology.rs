//! Spatial relations over executed layouts: which entities touch, which
//! can reach each other through openings, and which rooms share a module.
//!
//! Adjacency is weighted: an entry holds the shared boundary length in
//! millimeters, so the same matrix answers both "are they adjacent"
//! (nonzero) and "how strongly" (the length). Connectivity and conjoint
//! are boolean matrices stored as 0/1.

use serde::{Deserialize, Serialize};

use crate::dsl::format_mm;
use crate::geom::{overlap_1d, region_overlap_area, subtract_rects, Rect};
use crate::kernel::{DoorHost, KernelConfig, Layout};

/// Named square relation matrix. Symmetric with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationMatrix {
    pub names: Vec<String>,
    /// Row-major values; booleans are stored as 0 and 1.
    pub values: Vec<f64>,
}

impl RelationMatrix {
    pub fn zeros(names: Vec<String>) -> RelationMatrix {
        let n = names.len();
        RelationMatrix {
            names,
            values: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn is_true(&self, i: usize, j: usize) -> bool {
        self.get(i, j) != 0.0
    }

    /// Sets both (i, j) and (j, i); the diagonal stays zero.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            return;
        }
        let n = self.n();
        self.values[i * n + j] = v;
        self.values[j * n + i] = v;
    }

    /// Nonzero mask of this matrix as a 0/1 matrix.
    pub fn boolean(&self) -> RelationMatrix {
        RelationMatrix {
            names: self.names.clone(),
            values: self
                .values
                .iter()
                .map(|v| if *v != 0.0 { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let quote = |s: &str| {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = String::new();
        for name in &self.names {
            out.push(',');
            out.push_str(&quote(name));
        }
        out.push('\n');
        for i in 0..self.n() {
            out.push_str(&quote(&self.names[i]));
            for j in 0..self.n() {
                out.push(',');
                out.push_str(&format_mm(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// One hierarchical-containment check result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentVerdict {
    pub scope: ContainScope,
    pub name: String,
    /// Area lying outside the required container, in mm².
    pub excess_area: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainScope {
    /// Unit region against the union of modules.
    Unit,
    /// Room region against its unit's region.
    Room,
}

/// Excess area above this is a containment failure.
const PASS_EXCESS_MM2: f64 = 1.0;

/// All relation matrices plus the containment verdicts for one layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub module_adjacency: RelationMatrix,
    pub room_adjacency: RelationMatrix,
    pub module_connectivity: RelationMatrix,
    pub room_connectivity: RelationMatrix,
    pub room_conjoint: RelationMatrix,
    pub containment: Vec<ContainmentVerdict>,
}

pub fn analyze(layout: &Layout, cfg: &KernelConfig) -> TopologyReport {
    TopologyReport {
        module_adjacency: module_adjacency(layout, cfg),
        room_adjacency: room_adjacency(layout, cfg),
        module_connectivity: module_connectivity(layout, cfg),
        room_connectivity: room_connectivity(layout, cfg),
        room_conjoint: conjoint(layout, cfg),
        containment: validate_containment(layout, cfg),
    }
}

/// Boundary contact of two rectangles whose facing sides are `gap`
/// apart (within `tol`): the lateral overlap, or 0 for corner contact.
fn rect_contact(a: &Rect, b: &Rect, gap: f64, tol: f64) -> f64 {
    let mut total = 0.0;
    if ((b.min.x - a.max_x()) - gap).abs() <= tol || ((a.min.x - b.max_x()) - gap).abs() <= tol {
        let o = overlap_1d(a.min.y, a.max_y(), b.min.y, b.max_y());
        if o > tol {
            total += o;
        }
    }
    if ((b.min.y - a.max_y()) - gap).abs() <= tol || ((a.min.y - b.max_y()) - gap).abs() <= tol {
        let o = overlap_1d(a.min.x, a.max_x(), b.min.x, b.max_x());
        if o > tol {
            total += o;
        }
    }
    total
}

fn region_contact(a: &[Rect], b: &[Rect], gap: f64, tol: f64) -> f64 {
    let mut total = 0.0;
    for ra in a {
        for rb in b {
            total += rect_contact(ra, rb, gap, tol);
        }
    }
    total
}

/// True when an opening slab reaches this region: they overlap in area
/// or meet along an edge.
fn touches_slab(region: &[Rect], slab: &Rect, tol: f64) -> bool {
    region_overlap_area(region, &[*slab]) > tol * tol
        || region_contact(region, &[*slab], 0.0, tol) > tol
}

/// Shared wall length between alive modules, in mm.
pub fn module_adjacency(layout: &Layout, cfg: &KernelConfig) -> RelationMatrix {
    let alive: Vec<(usize, &Rect)> = layout
        .alive_modules()
        .map(|(i, m)| (i, &m.rect))
        .collect();
    let names = alive
        .iter()
        .map(|(i, _)| layout.modules[*i].name.clone())
        .collect();
    let mut m = RelationMatrix::zeros(names);
    for i in 0..alive.len() {
        for j in i + 1..alive.len() {
            let c = rect_contact(alive[i].1, alive[j].1, 0.0, cfg.tolerance);
            if c > cfg.tolerance {
                m.set_sym(i, j, c);
            }
        }
    }
    m
}

/// Shared wall length between rooms: their regions sit one wall apart.
pub fn room_adjacency(layout: &Layout, cfg: &KernelConfig) -> RelationMatrix {
    let names = layout.rooms.iter().map(|r| r.name.clone()).collect();
    let mut m = RelationMatrix::zeros(names);
    for i in 0..layout.rooms.len() {
        for j in i + 1..layout.rooms.len() {
            let c = region_contact(
                &layout.rooms[i].region,
                &layout.rooms[j].region,
                cfg.wall_thickness,
                cfg.tolerance,
            );
            if c > cfg.tolerance {
                m.set_sym(i, j, c);
            }
        }
    }
    m
}

/// Modules reachable from each other through a hole or a module door
/// in their shared wall.
pub fn module_connectivity(layout: &Layout, cfg: &KernelConfig) -> RelationMatrix {
    let adj = module_adjacency(layout, cfg);
    let alive: Vec<usize> = layout.alive_modules().map(|(i, _)| i).collect();
    let slabs: Vec<Rect> = layout
        .holes
        .iter()
        .map(|h| h.rect)
        .chain(layout.doors.iter().filter_map(|d| match d.host {
            DoorHost::Module(_) => Some(d.rect),
            DoorHost::Room(_) => None,
        }))
        .collect();
    let mut m = RelationMatrix::zeros(adj.names.clone());
    for i in 0..alive.len() {
        for j in i + 1..alive.len() {
            if adj.get(i, j) == 0.0 {
                continue;
            }
            let a = [layout.modules[alive[i]].rect];
            let b = [layout.modules[alive[j]].rect];
            if slabs
                .iter()
                .any(|s| touches_slab(&a, s, cfg.tolerance) && touches_slab(&b, s, cfg.tolerance))
            {
                m.set_sym(i, j, 1.0);
            }
        }
    }
    m
}

/// Rooms reachable from each other: a door or hole bridges their shared
/// wall, or one of them is open-plan toward the other within a unit.
pub fn room_connectivity(layout: &Layout, cfg: &KernelConfig) -> RelationMatrix {
    let adj = room_adjacency(layout, cfg);
    let slabs: Vec<Rect> = layout
        .doors
        .iter()
        .map(|d| d.rect)
        .chain(layout.holes.iter().map(|h| h.rect))
        .collect();
    let mut m = RelationMatrix::zeros(adj.names.clone());
    for i in 0..layout.rooms.len() {
        for j in i + 1..layout.rooms.len() {
            if adj.get(i, j) == 0.0 {
                continue;
            }
            let (a, b) = (&layout.rooms[i], &layout.rooms[j]);
            let bridged = slabs.iter().any(|s| {
                touches_slab(&a.region, s, cfg.tolerance)
                    && touches_slab(&b.region, s, cfg.tolerance)
            });
            let open = a.unit == b.unit && (a.open || b.open);
            if bridged || open {
                m.set_sym(i, j, 1.0);
            }
        }
    }
    m
}

/// Rooms that overlap the same module by more than a tolerance square.
pub fn conjoint(layout: &Layout, cfg: &KernelConfig) -> RelationMatrix {
    let names = layout.rooms.iter().map(|r| r.name.clone()).collect();
    let mut m = RelationMatrix::zeros(names);
    let tau2 = cfg.tolerance * cfg.tolerance;
    for (_, module) in layout.alive_modules() {
        let inside: Vec<usize> = layout
            .rooms
            .iter()
            .enumerate()
            .filter(|(_, r)| region_overlap_area(&r.region, &[module.rect]) > tau2)
            .map(|(i, _)| i)
            .collect();
        for (k, &i) in inside.iter().enumerate() {
            for &j in &inside[k + 1..] {
                m.set_sym(i, j, 1.0);
            }
        }
    }
    m
}

/// Checks the containment hierarchy: units inside the module union and
/// rooms inside their unit. Layouts built by the kernel always pass.
pub fn validate_containment(layout: &Layout, _cfg: &KernelConfig) -> Vec<ContainmentVerdict> {
    let module_rects: Vec<Rect> = layout.alive_modules().map(|(_, m)| m.rect).collect();
    let mut verdicts = Vec::new();
    for u in &layout.units {
        let excess: f64 = subtract_rects(&u.region, &module_rects)
            .iter()
            .map(Rect::area)
            .sum();
        verdicts.push(ContainmentVerdict {
            scope: ContainScope::Unit,
            name: u.name.clone(),
            excess_area: excess,
            pass: excess <= PASS_EXCESS_MM2,
        });
    }
    for r in &layout.rooms {
        let excess: f64 = subtract_rects(&r.region, &layout.units[r.unit].region)
            .iter()
            .map(Rect::area)
            .sum();
        verdicts.push(ContainmentVerdict {
            scope: ContainScope::Room,
            name: r.name.clone(),
            excess_area: excess,
            pass: excess <= PASS_EXCESS_MM2,
        });
    }
    verdicts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rectilinear_union_outline;
    use crate::kernel::{run_source, ModuleEnt, RoomEnt, UnitEnt};
    use proptest::prelude::*;

    fn cfg() -> KernelConfig {
        KernelConfig::default()
    }

    fn run(src: &str) -> Layout {
        run_source(src, &cfg()).expect("program rejected")
    }

    fn modules_only(rects: &[Rect]) -> Layout {
        let mut l = Layout::new("Level 1");
        for (i, r) in rects.iter().enumerate() {
            l.modules.push(ModuleEnt {
                name: format!("M{}", i + 1),
                rect: *r,
                alive: true,
            });
        }
        l
    }

    // counts whole 1 mm ticks lying on the boundary of both rectangles
    fn shared_edge_ticks(a: &Rect, b: &Rect) -> usize {
        let mut count = 0;
        if (a.max_x() - b.min.x).abs() < 1e-9 || (b.max_x() - a.min.x).abs() < 1e-9 {
            let lo = a.min.y.max(b.min.y);
            let hi = a.max_y().min(b.max_y());
            let mut k = lo;
            while k + 1.0 <= hi + 1e-9 {
                count += 1;
                k += 1.0;
            }
        }
        count
    }

    #[test]
    fn full_shared_edge_counts_every_millimeter() {
        let a = Rect::new(0.0, 0.0, 1000.0, 4000.0);
        let b = Rect::new(1000.0, 0.0, 1000.0, 4000.0);
        let oracle = shared_edge_ticks(&a, &b);
        assert_eq!(oracle, 4000);
        let m = module_adjacency(&modules_only(&[a, b]), &cfg());
        assert!((m.get(0, 1) - oracle as f64).abs() < 1e-9);
        assert!((m.get(1, 0) - oracle as f64).abs() < 1e-9);
    }

    #[test]
    fn corner_contact_is_not_adjacency() {
        let a = Rect::new(0.0, 0.0, 1000.0, 1000.0);
        let b = Rect::new(1000.0, 1000.0, 1000.0, 1000.0);
        let m = module_adjacency(&modules_only(&[a, b]), &cfg());
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn single_module_yields_a_zero_matrix() {
        let m = module_adjacency(
            &modules_only(&[Rect::new(0.0, 0.0, 1000.0, 1000.0)]),
            &cfg(),
        );
        assert_eq!(m.n(), 1);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn hole_in_shared_wall_connects_modules() {
        let l = run(
            "Module a = new Module(name: \"M1\", point: initial_point, length: 3000, width: 3000);\n\
             Module b = new Module(name: \"M2\", point: new UV(3000, 0), length: 3000, width: 3000);\n\
             Utils.CreateHole(module: a, direction: \"east\", dimension: 1200);\n",
        );
        let adj = module_adjacency(&l, &cfg());
        assert!((adj.get(0, 1) - 3000.0).abs() < 1e-9);
        let conn = module_connectivity(&l, &cfg());
        assert!(conn.is_true(0, 1));
    }

    #[test]
    fn solid_walls_do_not_connect() {
        let l = run(
            "Module a = new Module(name: \"M1\", point: initial_point, length: 3000, width: 3000);\n\
             Module b = new Module(name: \"M2\", point: new UV(3000, 0), length: 3000, width: 3000);\n",
        );
        assert!(!module_connectivity(&l, &cfg()).is_true(0, 1));
    }

    const TWO_ROOMS: &str =
        "Module a = new Module(name: \"Module 1\", point: initial_point, length: 2800, width: 6880);\n\
         Unit u = new Unit(name: \"Unit 1\", modules: new List<Module> { a });\n\
         Room r = new Room(name: \"Room 1\", unit: u, direction: \"south\", dimension: 2000);\n";

    #[test]
    fn rooms_one_wall_apart_are_adjacent_but_not_connected() {
        let src = format!(
            "{TWO_ROOMS}Room s = new Room(name: \"Room 2\", unit: u, room: r, direction: \"north\", length: 1000, width: 800, alignment: \"west\");\n"
        );
        let l = run(&src);
        let adj = room_adjacency(&l, &cfg());
        assert!((adj.get(0, 1) - 1000.0).abs() < 1e-9);
        assert!(!room_connectivity(&l, &cfg()).is_true(0, 1));
    }

    #[test]
    fn a_door_bridges_the_shared_wall() {
        let src = format!(
            "{TWO_ROOMS}Room s = new Room(name: \"Room 2\", unit: u, room: r, direction: \"north\", length: 1000, width: 800, alignment: \"west\");\n\
             Utils.CreateDoorOnMidpointForRoom(room: r, direction: \"north\");\n"
        );
        let l = run(&src);
        assert!(room_connectivity(&l, &cfg()).is_true(0, 1));
    }

    #[test]
    fn an_open_room_connects_without_a_door() {
        let src = format!(
            "{TWO_ROOMS}Room s = new Room(name: \"Room 2\", unit: u, room: r, direction: \"north\", length: 1000, width: 800, alignment: \"west\", open: true);\n"
        );
        let l = run(&src);
        assert!(room_connectivity(&l, &cfg()).is_true(0, 1));
    }

    // 10 mm rasterization: how much of a room region lies inside `rect`
    fn raster_overlap(region: &[Rect], rect: &Rect) -> f64 {
        let min_x = region.iter().map(|r| r.min.x).fold(f64::INFINITY, f64::min);
        let min_y = region.iter().map(|r| r.min.y).fold(f64::INFINITY, f64::min);
        let max_x = region.iter().map(|r| r.max_x()).fold(f64::NEG_INFINITY, f64::max);
        let max_y = region.iter().map(|r| r.max_y()).fold(f64::NEG_INFINITY, f64::max);
        let mut area = 0.0;
        let mut y = min_y + 5.0;
        while y < max_y {
            let mut x = min_x + 5.0;
            while x < max_x {
                let p = crate::geom::Point::new(x, y);
                let in_region = region.iter().any(|r| {
                    p.x > r.min.x && p.x < r.max_x() && p.y > r.min.y && p.y < r.max_y()
                });
                let in_rect =
                    p.x > rect.min.x && p.x < rect.max_x() && p.y > rect.min.y && p.y < rect.max_y();
                if in_region && in_rect {
                    area += 100.0;
                }
                x += 10.0;
            }
            y += 10.0;
        }
        area
    }

    #[test]
    fn conjoint_follows_shared_host_modules() {
        let src = "Module a = new Module(name: \"M1\", point: initial_point, length: 3000, width: 3000);\n\
             Module b = new Module(name: \"M2\", point: new UV(3000, 0), length: 3000, width: 3000);\n\
             Unit u = new Unit(name: \"U\", modules: new List<Module> { a, b });\n\
             Room r1 = new Room(name: \"R1\", unit: u, point: new UV(50, 50), length: 5900, width: 1000);\n\
             Room r2 = new Room(name: \"R2\", unit: u, point: new UV(50, 1150), length: 1000, width: 1000);\n\
             Room r3 = new Room(name: \"R3\", unit: u, point: new UV(3050, 1150), length: 1000, width: 1000);\n";
        let l = run(src);
        let tau2 = cfg().tolerance * cfg().tolerance;
        // oracle: per-module membership from rasterized overlap
        let mods: Vec<Rect> = l.alive_modules().map(|(_, m)| m.rect).collect();
        let mut want = vec![vec![false; 3]; 3];
        for m in &mods {
            let inside: Vec<usize> = (0..3)
                .filter(|&i| raster_overlap(&l.rooms[i].region, m) > tau2)
                .collect();
            for (k, &i) in inside.iter().enumerate() {
                for &j in &inside[k + 1..] {
                    want[i][j] = true;
                    want[j][i] = true;
                }
            }
        }
        assert!(want[0][1] && want[0][2] && !want[1][2]);
        let c = conjoint(&l, &cfg());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.is_true(i, j), want[i][j], "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn kernel_layouts_pass_containment() {
        let src = format!(
            "{TWO_ROOMS}Utils.CreateDoorOnMidpointForRoom(room: r, direction: \"south\");\n"
        );
        let l = run(&src);
        let verdicts = validate_containment(&l, &cfg());
        assert_eq!(verdicts.len(), 2);
        assert!(verdicts.iter().all(|v| v.pass && v.excess_area == 0.0));
    }

    #[test]
    fn protruding_room_fails_with_measured_excess() {
        // hand-crafted document: the room pokes 50 mm north of the unit
        let module = Rect::new(0.0, 0.0, 1000.0, 1000.0);
        let room_region = vec![Rect::new(0.0, 0.0, 1000.0, 1050.0)];
        let mut l = modules_only(&[module]);
        l.units.push(UnitEnt {
            name: "U".into(),
            modules: vec![0],
            region: vec![module],
            outline: rectilinear_union_outline(&[module]).unwrap(),
            usable: vec![module.inflate(-50.0)],
        });
        l.rooms.push(RoomEnt {
            name: "R".into(),
            unit: 0,
            module: None,
            rect: room_region[0],
            outline: rectilinear_union_outline(&room_region).unwrap(),
            region: room_region.clone(),
            regular: true,
            open: false,
        });
        // oracle: 1 mm rasterized set difference
        let mut oracle = 0.0;
        for ky in 0..1050 {
            for kx in 0..1000 {
                let (x, y) = (kx as f64 + 0.5, ky as f64 + 0.5);
                let in_room = x < 1000.0 && y < 1050.0;
                let in_unit = x < 1000.0 && y < 1000.0;
                if in_room && !in_unit {
                    oracle += 1.0;
                }
            }
        }
        assert_eq!(oracle, 50.0 * 1000.0);
        let verdicts = validate_containment(&l, &cfg());
        let room = verdicts.iter().find(|v| v.scope == ContainScope::Room).unwrap();
        assert!(!room.pass);
        assert!((room.excess_area - oracle).abs() < 1e-6);
    }

    #[test]
    fn empty_layout_yields_empty_verdicts() {
        let l = Layout::new("Level 1");
        assert!(validate_containment(&l, &cfg()).is_empty());
        assert_eq!(analyze(&l, &cfg()).module_adjacency.n(), 0);
    }

    #[test]
    fn csv_export_is_stable() {
        let a = Rect::new(0.0, 0.0, 1000.0, 4000.0);
        let b = Rect::new(1000.0, 0.0, 1000.0, 4000.0);
        let m = module_adjacency(&modules_only(&[a, b]), &cfg());
        assert_eq!(m.to_csv(), ",M1,M2\nM1,0,4000\nM2,4000,0\n");
        assert_eq!(m.boolean().to_csv(), ",M1,M2\nM1,0,1\nM2,1,0\n");
    }

    fn translate_layout(l: &Layout, dx: f64, dy: f64) -> Layout {
        let mut t = l.clone();
        let shift = |r: &mut Rect| *r = r.translated(dx, dy);
        for m in &mut t.modules {
            shift(&mut m.rect);
        }
        for u in &mut t.units {
            u.region.iter_mut().for_each(&shift);
            u.usable.iter_mut().for_each(&shift);
            for p in &mut u.outline.points {
                p.x += dx;
                p.y += dy;
            }
        }
        for r in &mut t.rooms {
            shift(&mut r.rect);
            r.region.iter_mut().for_each(&shift);
            for p in &mut r.outline.points {
                p.x += dx;
                p.y += dy;
            }
        }
        for d in &mut t.doors {
            shift(&mut d.rect);
        }
        for h in &mut t.holes {
            shift(&mut h.rect);
        }
        t
    }

    proptest! {
        #[test]
        fn matrices_are_symmetric_with_zero_diagonal(
            cells in proptest::collection::btree_set((0u8..3, 0u8..3), 1..6),
            door_seed in 0usize..16,
        ) {
            let rects: Vec<Rect> = cells
                .iter()
                .map(|(i, j)| Rect::new(*i as f64 * 1000.0, *j as f64 * 1000.0, 1000.0, 1000.0))
                .collect();
            let mut l = modules_only(&rects);
            let host = door_seed % rects.len();
            let dir = [
                crate::geom::Direction::North,
                crate::geom::Direction::South,
                crate::geom::Direction::East,
                crate::geom::Direction::West,
            ][door_seed % 4];
            let seg = rects[host].side(dir);
            let mid = (seg.lo + seg.hi) / 2.0;
            let slab = if dir.is_vertical_axis() {
                Rect::new(mid - 450.0, seg.at - 50.0, 900.0, 100.0)
            } else {
                Rect::new(seg.at - 50.0, mid - 450.0, 100.0, 900.0)
            };
            l.holes.push(crate::kernel::HoleEnt {
                module: host,
                direction: dir,
                rect: slab,
                dimension: 900.0,
            });
            let report = analyze(&l, &cfg());
            for m in [
                &report.module_adjacency,
                &report.module_connectivity,
                &report.room_adjacency,
                &report.room_connectivity,
                &report.room_conjoint,
            ] {
                let n = m.n();
                for i in 0..n {
                    prop_assert_eq!(m.get(i, i), 0.0);
                    for j in 0..n {
                        prop_assert!((m.get(i, j) - m.get(j, i)).abs() < 1e-9);
                    }
                }
            }
        }

        #[test]
        fn relations_ignore_translation(
            cells in proptest::collection::btree_set((0u8..3, 0u8..3), 1..6),
            dx in -10_000i32..10_000,
            dy in -10_000i32..10_000,
        ) {
            let rects: Vec<Rect> = cells
                .iter()
                .map(|(i, j)| Rect::new(*i as f64 * 1000.0, *j as f64 * 1000.0, 1000.0, 1000.0))
                .collect();
            let l = modules_only(&rects);
            let moved = translate_layout(&l, dx as f64, dy as f64);
            let a = module_adjacency(&l, &cfg());
            let b = module_adjacency(&moved, &cfg());
            prop_assert_eq!(a.names, b.names);
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
