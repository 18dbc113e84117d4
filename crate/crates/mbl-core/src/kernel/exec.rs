//! Statement-by-statement program execution.

use std::collections::HashMap;

use crate::dsl::{
    parse_and_check, signature, ActionStatement, ArgValue, DefaultVal, Diagnostic, OpKind,
    PieceBinding, PointExpr, Program, RefExpr, Signature, Statement,
};
use crate::geom::{
    erode_rects, facing_segments, intersect_rects, overlap_1d, rectilinear_union_outline,
    region_contains, regions_conflict, subtract_rects, Contour, Corner, Direction, GeomError,
    Point, Rect, SideLine,
};

use super::{
    DoorEnt, DoorHost, ExecError, ExecErrorKind, HoleEnt, KernelConfig, Layout, ModuleEnt,
    RoomEnt, UnitEnt,
};

/// Failure of the full text-to-layout pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// The source does not parse; diagnostics carry the position.
    Syntax(Vec<Diagnostic>),
    /// The program parses but fails static checking.
    Check(Vec<Diagnostic>),
    /// A statement was rejected during construction.
    Exec(ExecError),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Syntax(d) => match d.first() {
                Some(first) => write!(f, "{first}"),
                None => write!(f, "unparseable program"),
            },
            RunError::Check(d) => {
                let first = d.first().map(|d| d.to_string()).unwrap_or_default();
                write!(f, "{} check finding(s); first: {first}", d.len())
            }
            RunError::Exec(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Parses, checks and executes `src` under `cfg`.
pub fn run_source(src: &str, cfg: &KernelConfig) -> Result<Layout, RunError> {
    let (prog, diags) = parse_and_check(src);
    let Some(prog) = prog else {
        return Err(RunError::Syntax(diags));
    };
    if !diags.is_empty() {
        return Err(RunError::Check(diags));
    }
    execute_program(&prog, cfg).map_err(RunError::Exec)
}

/// Executes an already-checked program.
pub fn execute_program(prog: &Program, cfg: &KernelConfig) -> Result<Layout, ExecError> {
    let mut ex = Executor::new(cfg);
    ex.execute(prog)?;
    Ok(ex.into_layout())
}

/// What a program variable currently denotes.
#[derive(Debug, Clone, Copy)]
enum Binding {
    Module(usize),
    Unit(usize),
    Room(usize),
    /// Result of a split: the two piece modules in declaration order.
    Pieces([usize; 2]),
}

/// Mutable construction state for one program run.
pub struct Executor {
    cfg: KernelConfig,
    layout: Layout,
    env: HashMap<String, Binding>,
    /// Index of the statement currently executing.
    si: usize,
}

/// Argument accessor for one statement: reads provided values and
/// materializes signature defaults for omitted optional parameters.
struct Args<'a> {
    stmt: &'a ActionStatement,
    sig: &'static Signature,
    si: usize,
}

impl<'a> Args<'a> {
    fn fail(&self, kind: ExecErrorKind, message: String) -> ExecError {
        ExecError {
            statement: Some(self.si),
            kind,
            message,
        }
    }

    fn invalid(&self, message: String) -> ExecError {
        self.fail(ExecErrorKind::Invalid, message)
    }

    fn default_for(&self, name: &str) -> Option<DefaultVal> {
        self.sig
            .params
            .iter()
            .find(|p| p.name == name)
            .and_then(|p| p.default)
    }

    fn text(&self, name: &str) -> Result<String, ExecError> {
        match self.stmt.arg(name) {
            Some(ArgValue::Text(s)) => Ok(s.clone()),
            Some(v) => Err(self.invalid(format!(
                "parameter {name} expects text, got {}",
                v.describe()
            ))),
            None => match self.default_for(name) {
                Some(DefaultVal::Text(t)) => Ok(t.to_string()),
                _ => Err(self.invalid(format!("missing parameter {name}"))),
            },
        }
    }

    fn number(&self, name: &str) -> Result<f64, ExecError> {
        match self.stmt.arg(name) {
            Some(ArgValue::Number(n)) => Ok(*n),
            Some(v) => Err(self.invalid(format!(
                "parameter {name} expects a number, got {}",
                v.describe()
            ))),
            None => match self.default_for(name) {
                Some(DefaultVal::Num(n)) => Ok(n),
                _ => Err(self.invalid(format!("missing parameter {name}"))),
            },
        }
    }

    fn boolean(&self, name: &str) -> Result<bool, ExecError> {
        match self.stmt.arg(name) {
            Some(ArgValue::Bool(b)) => Ok(*b),
            Some(v) => Err(self.invalid(format!(
                "parameter {name} expects a boolean, got {}",
                v.describe()
            ))),
            None => match self.default_for(name) {
                Some(DefaultVal::Bool(b)) => Ok(b),
                _ => Err(self.invalid(format!("missing parameter {name}"))),
            },
        }
    }

    fn point(&self, name: &str) -> Result<Point, ExecError> {
        match self.stmt.arg(name) {
            Some(ArgValue::Point(PointExpr::Initial)) => Ok(Point::new(0.0, 0.0)),
            Some(ArgValue::Point(PointExpr::Uv(x, y))) => Ok(Point::new(*x, *y)),
            Some(v) => Err(self.invalid(format!(
                "parameter {name} expects a point, got {}",
                v.describe()
            ))),
            None => Err(self.invalid(format!("missing parameter {name}"))),
        }
    }

    fn reference(&self, name: &str) -> Result<&'a RefExpr, ExecError> {
        match self.stmt.arg(name) {
            Some(ArgValue::Ref(r)) => Ok(r),
            Some(v) => Err(self.invalid(format!(
                "parameter {name} expects a reference, got {}",
                v.describe()
            ))),
            None => Err(self.invalid(format!("missing parameter {name}"))),
        }
    }

    fn ref_list(&self, name: &str) -> Result<&'a [RefExpr], ExecError> {
        match self.stmt.arg(name) {
            Some(ArgValue::RefList(v)) => Ok(v),
            Some(v) => Err(self.invalid(format!(
                "parameter {name} expects a module list, got {}",
                v.describe()
            ))),
            None => Err(self.invalid(format!("missing parameter {name}"))),
        }
    }

    fn num_list(&self, name: &str) -> Result<&'a [f64], ExecError> {
        match self.stmt.arg(name) {
            Some(ArgValue::NumberList(v)) => Ok(v),
            Some(v) => Err(self.invalid(format!(
                "parameter {name} expects a number list, got {}",
                v.describe()
            ))),
            None => Err(self.invalid(format!("missing parameter {name}"))),
        }
    }

    fn direction(&self, name: &str) -> Result<Direction, ExecError> {
        let t = self.text(name)?;
        Direction::from_str(&t).ok_or_else(|| self.invalid(format!("unknown direction {t:?}")))
    }

    fn corner(&self, name: &str) -> Result<Corner, ExecError> {
        let t = self.text(name)?;
        Corner::from_str(&t).ok_or_else(|| self.invalid(format!("unknown corner {t:?}")))
    }

    /// Alignment parameter: `None` for the literal "none", otherwise a
    /// direction that must be perpendicular to the placement direction.
    fn alignment(&self, name: &str, facing: Direction) -> Result<Option<Direction>, ExecError> {
        let t = self.text(name)?;
        if t == "none" {
            return Ok(None);
        }
        let d = Direction::from_str(&t)
            .ok_or_else(|| self.invalid(format!("unknown alignment {t:?}")))?;
        if !d.is_perpendicular(facing) {
            return Err(self.invalid(format!(
                "alignment {t} is parallel to direction {}",
                facing.as_str()
            )));
        }
        Ok(Some(d))
    }

    fn offset_dir(&self, name: &str) -> Result<Option<Direction>, ExecError> {
        let t = self.text(name)?;
        if t == "none" {
            return Ok(None);
        }
        Direction::from_str(&t)
            .map(Some)
            .ok_or_else(|| self.invalid(format!("unknown offset direction {t:?}")))
    }
}

/// Sliver-aware rectangle conflict: the shared area must exceed `tol`
/// along both axes to count. Flush contact is always allowed.
fn rects_conflict(a: &Rect, b: &Rect, tol: f64) -> bool {
    overlap_1d(a.min.x, a.max_x(), b.min.x, b.max_x()) > tol
        && overlap_1d(a.min.y, a.max_y(), b.min.y, b.max_y()) > tol
}

fn region_bbox(cells: &[Rect]) -> Rect {
    let min_x = cells.iter().map(|c| c.min.x).fold(f64::INFINITY, f64::min);
    let min_y = cells.iter().map(|c| c.min.y).fold(f64::INFINITY, f64::min);
    let max_x = cells.iter().map(Rect::max_x).fold(f64::NEG_INFINITY, f64::max);
    let max_y = cells.iter().map(Rect::max_y).fold(f64::NEG_INFINITY, f64::max);
    Rect::new(min_x, min_y, max_x - min_x, max_y - min_y)
}

fn padded(cells: &[Rect], d: f64) -> Vec<Rect> {
    cells.iter().map(|c| c.inflate(d)).collect()
}

/// Strip of depth `depth` along the given side of `r`.
fn side_band(r: &Rect, dir: Direction, depth: f64) -> Rect {
    match dir {
        Direction::North => Rect::new(r.min.x, r.max_y() - depth, r.length, depth),
        Direction::South => Rect::new(r.min.x, r.min.y, r.length, depth),
        Direction::East => Rect::new(r.max_x() - depth, r.min.y, depth, r.width),
        Direction::West => Rect::new(r.min.x, r.min.y, depth, r.width),
    }
}

/// Places an `length` x `width` box against side `dir` of `base`,
/// `gap` mm away. With no alignment the box is centered along the shared
/// side; an alignment direction makes those two faces coplanar. The
/// optional offset then translates the result.
fn place_relative(
    base: &Rect,
    dir: Direction,
    length: f64,
    width: f64,
    gap: f64,
    alignment: Option<Direction>,
    offset_dir: Option<Direction>,
    offset: f64,
) -> Rect {
    let (min_x, min_y) = if dir.is_vertical_axis() {
        let y = match dir {
            Direction::North => base.max_y() + gap,
            _ => base.min.y - gap - width,
        };
        let x = match alignment {
            None => base.center().x - length / 2.0,
            Some(Direction::East) => base.max_x() - length,
            _ => base.min.x,
        };
        (x, y)
    } else {
        let x = match dir {
            Direction::East => base.max_x() + gap,
            _ => base.min.x - gap - length,
        };
        let y = match alignment {
            None => base.center().y - width / 2.0,
            Some(Direction::North) => base.max_y() - width,
            _ => base.min.y,
        };
        (x, y)
    };
    let (dx, dy) = offset_dir.map(Direction::vector).unwrap_or((0.0, 0.0));
    Rect::new(min_x + dx * offset, min_y + dy * offset, length, width)
}

/// Longest wall run, ties going to the first in (position, start) order.
fn pick_longest(segs: &[SideLine]) -> Option<SideLine> {
    let mut best: Option<SideLine> = None;
    for s in segs {
        match best {
            Some(b) if s.len() <= b.len() + 1e-9 => {}
            _ => best = Some(*s),
        }
    }
    best
}

impl Executor {
    pub fn new(cfg: &KernelConfig) -> Executor {
        Executor {
            cfg: cfg.clone(),
            layout: Layout::new(cfg.level.clone()),
            env: HashMap::new(),
            si: 0,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn into_layout(self) -> Layout {
        self.layout
    }

    /// Runs every statement, stopping at the first rejection.
    pub fn execute(&mut self, prog: &Program) -> Result<(), ExecError> {
        for (i, stmt) in prog.statements.iter().enumerate() {
            self.si = i;
            match stmt {
                Statement::Action(a) => self.exec_action(a)?,
                Statement::Piece(p) => self.exec_piece(p)?,
                Statement::Unknown(u) => {
                    return Err(self.err(
                        ExecErrorKind::Invalid,
                        format!("unknown operation {}", u.callee),
                    ))
                }
            }
        }
        Ok(())
    }

    fn err(&self, kind: ExecErrorKind, message: String) -> ExecError {
        ExecError {
            statement: Some(self.si),
            kind,
            message,
        }
    }

    fn exec_action(&mut self, stmt: &ActionStatement) -> Result<(), ExecError> {
        let sig = signature(stmt.sig);
        let a = Args {
            stmt,
            sig,
            si: self.si,
        };
        match stmt.op {
            OpKind::ModuleAbsolute => self.op_module_absolute(&a),
            OpKind::ModuleRelative => self.op_module_relative(&a),
            OpKind::Split => self.op_split(&a),
            OpKind::Merge => self.op_merge(&a),
            OpKind::UnitFromModules => self.op_unit_from_modules(&a),
            OpKind::UnitDirectional => self.op_unit_directional(&a),
            OpKind::RoomContainer => self.op_room_container(&a),
            OpKind::RoomDirectional => self.op_room_directional(&a),
            OpKind::RoomCorner => self.op_room_corner(&a),
            OpKind::RoomRelative => self.op_room_relative(&a),
            OpKind::RoomAtPoint => self.op_room_at_point(&a),
            OpKind::DoorForRoom => self.op_opening(&a, true, false, false),
            OpKind::DoorForModule => self.op_opening(&a, false, false, false),
            OpKind::DoorMidpoint => {
                let host_room = sig.params[0].name == "room";
                self.op_opening(&a, host_room, true, false)
            }
            OpKind::Hole => self.op_opening(&a, false, false, true),
        }
    }

    fn exec_piece(&mut self, p: &PieceBinding) -> Result<(), ExecError> {
        match self.env.get(&p.list) {
            Some(Binding::Pieces(pair)) if p.index < 2 => {
                let idx = pair[p.index];
                self.env.insert(p.name.clone(), Binding::Module(idx));
                Ok(())
            }
            _ => Err(self.err(
                ExecErrorKind::Invalid,
                format!("\"{}\" is not a split result", p.list),
            )),
        }
    }

    fn bind(&mut self, a: &Args, b: Binding) {
        if let Some(decl) = &a.stmt.binding {
            self.env.insert(decl.name.clone(), b);
        }
    }

    // ---- name resolution ------------------------------------------------

    fn module_from_ref(&self, a: &Args, r: &RefExpr) -> Result<usize, ExecError> {
        match (self.env.get(&r.name), r.index) {
            (Some(Binding::Module(i)), None) => Ok(*i),
            (Some(Binding::Pieces(p)), Some(k)) if k < 2 => Ok(p[k]),
            (Some(Binding::Pieces(_)), _) => Err(a.invalid(format!(
                "\"{}\" is a split result; index one of its pieces",
                r.name
            ))),
            (Some(_), _) => Err(a.invalid(format!("\"{}\" is not a module", r.render()))),
            (None, _) => Err(a.invalid(format!("\"{}\" is not defined", r.name))),
        }
    }

    fn alive_module_from_ref(&self, a: &Args, r: &RefExpr) -> Result<usize, ExecError> {
        let idx = self.module_from_ref(a, r)?;
        let m = &self.layout.modules[idx];
        if !m.alive {
            return Err(a.fail(
                ExecErrorKind::EntityRetired,
                format!("module \"{}\" was consumed by a split or merge", m.name),
            ));
        }
        Ok(idx)
    }

    fn alive_module(&self, a: &Args, param: &str) -> Result<usize, ExecError> {
        let r = a.reference(param)?;
        self.alive_module_from_ref(a, r)
    }

    fn resolve_unit(&self, a: &Args, param: &str) -> Result<usize, ExecError> {
        let r = a.reference(param)?;
        match (self.env.get(&r.name), r.index) {
            (Some(Binding::Unit(i)), None) => Ok(*i),
            (Some(_), _) => Err(a.invalid(format!("\"{}\" is not a unit", r.render()))),
            (None, _) => Err(a.invalid(format!("\"{}\" is not defined", r.name))),
        }
    }

    fn resolve_room(&self, a: &Args, param: &str) -> Result<usize, ExecError> {
        let r = a.reference(param)?;
        match (self.env.get(&r.name), r.index) {
            (Some(Binding::Room(i)), None) => Ok(*i),
            (Some(_), _) => Err(a.invalid(format!("\"{}\" is not a room", r.render()))),
            (None, _) => Err(a.invalid(format!("\"{}\" is not defined", r.name))),
        }
    }

    // ---- shared checks ---------------------------------------------------

    fn check_box_dims(&self, a: &Args, length: f64, width: f64) -> Result<(), ExecError> {
        if !(length.is_finite() && width.is_finite() && length > 0.0 && width > 0.0) {
            return Err(a.invalid("sides must be positive lengths".to_string()));
        }
        let min = self.cfg.min_segment;
        if length < min || width < min {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!("{length} x {width} mm falls below the {min} mm minimum side"),
            ));
        }
        Ok(())
    }

    fn check_module_overlap(&self, a: &Args, rect: &Rect, name: &str) -> Result<(), ExecError> {
        for (_, m) in self.layout.alive_modules() {
            if rects_conflict(rect, &m.rect, self.cfg.tolerance) {
                return Err(a.fail(
                    ExecErrorKind::Overlap,
                    format!("module \"{name}\" overlaps module \"{}\"", m.name),
                ));
            }
        }
        Ok(())
    }

    /// Name of a unit whose claimed region covers part of this module.
    fn claiming_unit(&self, idx: usize) -> Option<&str> {
        let rect = [self.layout.modules[idx].rect];
        self.layout
            .units
            .iter()
            .find(|u| regions_conflict(&u.region, &rect, self.cfg.tolerance))
            .map(|u| u.name.as_str())
    }

    fn outline_of(&self, region: &[Rect], what: &str) -> Result<Contour, ExecError> {
        rectilinear_union_outline(region).map_err(|e| {
            let kind = match e {
                GeomError::Disconnected => ExecErrorKind::Disconnected,
                GeomError::HasHole => ExecErrorKind::HasHole,
                _ => ExecErrorKind::Invalid,
            };
            self.err(kind, format!("{what}: {e}"))
        })
    }

    fn push_module(&mut self, name: String, rect: Rect) -> usize {
        self.layout.modules.push(ModuleEnt {
            name,
            rect,
            alive: true,
        });
        self.layout.modules.len() - 1
    }

    // ---- modules ---------------------------------------------------------

    fn op_module_absolute(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let p = a.point("point")?;
        let length = a.number("length")?;
        let width = a.number("width")?;
        self.check_box_dims(a, length, width)?;
        let rect = Rect::new(p.x, p.y, length, width);
        self.check_module_overlap(a, &rect, &name)?;
        let idx = self.push_module(name, rect);
        self.bind(a, Binding::Module(idx));
        Ok(())
    }

    fn op_module_relative(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let base_idx = self.alive_module(a, "module")?;
        let dir = a.direction("direction")?;
        let length = a.number("length")?;
        let width = a.number("width")?;
        self.check_box_dims(a, length, width)?;
        let alignment = a.alignment("alignment", dir)?;
        let off_dir = a.offset_dir("offset_direction")?;
        let offset = a.number("offset")?;
        let base = self.layout.modules[base_idx].rect;
        let rect = place_relative(&base, dir, length, width, 0.0, alignment, off_dir, offset);
        self.check_module_overlap(a, &rect, &name)?;
        let idx = self.push_module(name, rect);
        self.bind(a, Binding::Module(idx));
        Ok(())
    }

    fn op_split(&mut self, a: &Args) -> Result<(), ExecError> {
        let parent_idx = self.alive_module(a, "module")?;
        let dir = a.text("direction")?;
        let ratio = a.number("ratio")?;
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(a.invalid(format!("split ratio {ratio} is outside (0, 1)")));
        }
        if let Some(unit) = self.claiming_unit(parent_idx) {
            let m = &self.layout.modules[parent_idx];
            return Err(a.fail(
                ExecErrorKind::HostMismatch,
                format!("module \"{}\" is claimed by unit \"{unit}\"", m.name),
            ));
        }
        let parent = self.layout.modules[parent_idx].rect;
        // piece 0 is the north (west-east cut) or west (north-south cut)
        // side, so it always holds the ratio share
        let (p0, p1, cut0, cut1) = match dir.as_str() {
            "west-east" => {
                let h0 = ratio * parent.width;
                let h1 = parent.width - h0;
                (
                    Rect::new(parent.min.x, parent.min.y + h1, parent.length, h0),
                    Rect::new(parent.min.x, parent.min.y, parent.length, h1),
                    h0,
                    h1,
                )
            }
            "north-south" => {
                let w0 = ratio * parent.length;
                let w1 = parent.length - w0;
                (
                    Rect::new(parent.min.x, parent.min.y, w0, parent.width),
                    Rect::new(parent.min.x + w0, parent.min.y, w1, parent.width),
                    w0,
                    w1,
                )
            }
            other => return Err(a.invalid(format!("unknown split direction {other:?}"))),
        };
        let min = self.cfg.min_segment;
        if cut0 < min || cut1 < min {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!(
                    "split leaves a {} mm piece, below the {min} mm minimum",
                    cut0.min(cut1)
                ),
            ));
        }
        let parent_name = self.layout.modules[parent_idx].name.clone();
        self.layout.modules[parent_idx].alive = false;
        let i0 = self.push_module(format!("{parent_name} A"), p0);
        let i1 = self.push_module(format!("{parent_name} B"), p1);
        self.bind(a, Binding::Pieces([i0, i1]));
        Ok(())
    }

    fn op_merge(&mut self, a: &Args) -> Result<(), ExecError> {
        let refs = a.ref_list("modules")?;
        let mut idxs: Vec<usize> = Vec::new();
        for r in refs {
            let i = self.alive_module_from_ref(a, r)?;
            if !idxs.contains(&i) {
                idxs.push(i);
            }
        }
        if idxs.len() < 2 {
            return Err(a.invalid(
                "merging needs at least two distinct modules".to_string(),
            ));
        }
        for &i in &idxs {
            if let Some(unit) = self.claiming_unit(i) {
                let m = &self.layout.modules[i];
                return Err(a.fail(
                    ExecErrorKind::HostMismatch,
                    format!("module \"{}\" is claimed by unit \"{unit}\"", m.name),
                ));
            }
        }
        let rects: Vec<Rect> = idxs.iter().map(|&i| self.layout.modules[i].rect).collect();
        let outline = self.outline_of(&rects, "merged modules")?;
        if outline.points.len() != 4 {
            return Err(a.fail(
                ExecErrorKind::NotRectangular,
                "merged modules do not form a rectangle".to_string(),
            ));
        }
        let name = self.layout.modules[idxs[0]].name.clone();
        for &i in &idxs {
            self.layout.modules[i].alive = false;
        }
        let idx = self.push_module(name, region_bbox(&rects));
        self.bind(a, Binding::Module(idx));
        Ok(())
    }

    // ---- units -----------------------------------------------------------

    fn admit_unit(
        &mut self,
        a: &Args,
        name: String,
        modules: Vec<usize>,
        region: Vec<Rect>,
    ) -> Result<(), ExecError> {
        let outline = self.outline_of(&region, &format!("region of unit \"{name}\""))?;
        for u in &self.layout.units {
            if regions_conflict(&u.region, &region, self.cfg.tolerance) {
                return Err(a.fail(
                    ExecErrorKind::Overlap,
                    format!("unit \"{name}\" overlaps unit \"{}\"", u.name),
                ));
            }
        }
        let usable = erode_rects(&region, self.cfg.wall_thickness / 2.0);
        if usable.is_empty() {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!("unit \"{name}\" has no usable interior"),
            ));
        }
        self.layout.units.push(UnitEnt {
            name,
            modules,
            region,
            outline,
            usable,
        });
        self.bind(a, Binding::Unit(self.layout.units.len() - 1));
        Ok(())
    }

    fn op_unit_from_modules(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let refs = a.ref_list("modules")?;
        let mut idxs: Vec<usize> = Vec::new();
        for r in refs {
            let i = self.alive_module_from_ref(a, r)?;
            if !idxs.contains(&i) {
                idxs.push(i);
            }
        }
        if idxs.is_empty() {
            return Err(a.invalid("a unit needs at least one module".to_string()));
        }
        let region: Vec<Rect> = idxs.iter().map(|&i| self.layout.modules[i].rect).collect();
        self.admit_unit(a, name, idxs, region)
    }

    fn op_unit_directional(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let refs = a.ref_list("modules")?;
        let dir = a.direction("direction")?;
        let dims = a.num_list("dimensions")?;
        if refs.len() != dims.len() {
            return Err(a.invalid(format!(
                "{} modules but {} dimensions",
                refs.len(),
                dims.len()
            )));
        }
        let mut idxs: Vec<usize> = Vec::new();
        let mut region: Vec<Rect> = Vec::new();
        for (r, &depth) in refs.iter().zip(dims) {
            let i = self.alive_module_from_ref(a, r)?;
            let m = &self.layout.modules[i];
            let extent = if dir.is_vertical_axis() {
                m.rect.width
            } else {
                m.rect.length
            };
            if depth < self.cfg.min_segment {
                return Err(a.fail(
                    ExecErrorKind::TooSmall,
                    format!(
                        "a {depth} mm band falls below the {} mm minimum",
                        self.cfg.min_segment
                    ),
                ));
            }
            if depth > extent + self.cfg.tolerance {
                return Err(a.fail(
                    ExecErrorKind::OutOfBounds,
                    format!(
                        "a {depth} mm band exceeds the {extent} mm extent of module \"{}\"",
                        m.name
                    ),
                ));
            }
            region.push(side_band(&m.rect, dir, depth));
            if !idxs.contains(&i) {
                idxs.push(i);
            }
        }
        self.admit_unit(a, name, idxs, region)
    }

    // ---- rooms -----------------------------------------------------------

    /// Where the new room's faces may lie: the unit's usable region, or
    /// its restriction to one module's footprint.
    fn usable_base(
        &self,
        a: &Args,
        unit: usize,
        module: Option<usize>,
    ) -> Result<Vec<Rect>, ExecError> {
        let u = &self.layout.units[unit];
        let Some(mi) = module else {
            return Ok(u.usable.clone());
        };
        let m = &self.layout.modules[mi];
        let footprint = intersect_rects(&[m.rect], &u.region);
        let tol = self.cfg.tolerance;
        if footprint.iter().map(Rect::area).sum::<f64>() <= tol * tol {
            return Err(a.fail(
                ExecErrorKind::HostMismatch,
                format!("module \"{}\" lies outside unit \"{}\"", m.name, u.name),
            ));
        }
        let usable = erode_rects(&footprint, self.cfg.wall_thickness / 2.0);
        if usable.is_empty() {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!("module \"{}\" has no usable interior in the unit", m.name),
            ));
        }
        Ok(usable)
    }

    fn room_module_arg(&self, a: &Args) -> Result<Option<usize>, ExecError> {
        if a.stmt.arg("module").is_none() {
            return Ok(None);
        }
        Ok(Some(self.alive_module(a, "module")?))
    }

    #[allow(clippy::too_many_arguments)]
    fn admit_room(
        &mut self,
        a: &Args,
        name: String,
        unit: usize,
        module: Option<usize>,
        region: Vec<Rect>,
        base: &[Rect],
        open: bool,
    ) -> Result<(), ExecError> {
        let tol = self.cfg.tolerance;
        if region.iter().map(Rect::area).sum::<f64>() <= tol * tol {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!("room \"{name}\" has no area"),
            ));
        }
        let outline = self.outline_of(&region, &format!("room \"{name}\""))?;
        if !region_contains(base, &region, tol) {
            return Err(a.fail(
                ExecErrorKind::OutOfBounds,
                format!("room \"{name}\" leaves its usable area"),
            ));
        }
        // every pair of rooms needs a full wall slab between the faces,
        // so regions padded by half a wall each may touch but not mix
        let pad = self.cfg.wall_thickness / 2.0;
        let mine = padded(&region, pad);
        for r in self.layout.rooms.iter().filter(|r| r.unit == unit) {
            if regions_conflict(&mine, &padded(&r.region, pad), tol) {
                return Err(a.fail(
                    ExecErrorKind::Overlap,
                    format!("room \"{name}\" sits closer than a wall to room \"{}\"", r.name),
                ));
            }
        }
        let rect = region_bbox(&region);
        let regular = outline.points.len() == 4;
        self.layout.rooms.push(RoomEnt {
            name,
            unit,
            module,
            rect,
            region,
            outline,
            regular,
            open,
        });
        self.bind(a, Binding::Room(self.layout.rooms.len() - 1));
        Ok(())
    }

    fn op_room_container(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let module = self.room_module_arg(a)?;
        let unit = self.resolve_unit(a, "unit")?;
        let regular = a.boolean("regular")?;
        let base = self.usable_base(a, unit, module)?;
        if regular {
            let outline = self.outline_of(&base, &format!("room \"{name}\""))?;
            if outline.points.len() != 4 {
                return Err(a.fail(
                    ExecErrorKind::NotRectangular,
                    format!("usable area for room \"{name}\" is not rectangular"),
                ));
            }
            return self.admit_room(a, name, unit, module, base.clone(), &base, false);
        }
        let pads: Vec<Rect> = self
            .layout
            .rooms
            .iter()
            .filter(|r| r.unit == unit)
            .flat_map(|r| r.region.iter().map(|c| c.inflate(self.cfg.wall_thickness)))
            .collect();
        let residual = subtract_rects(&base, &pads);
        if residual.is_empty() {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!("no space left in the unit for room \"{name}\""),
            ));
        }
        self.admit_room(a, name, unit, module, residual, &base, false)
    }

    fn op_room_directional(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let module = self.room_module_arg(a)?;
        let unit = self.resolve_unit(a, "unit")?;
        let dir = a.direction("direction")?;
        let depth = a.number("dimension")?;
        let open = a.boolean("open")?;
        if depth < self.cfg.min_segment {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!(
                    "a {depth} mm room falls below the {} mm minimum",
                    self.cfg.min_segment
                ),
            ));
        }
        let base = self.usable_base(a, unit, module)?;
        let bbox = region_bbox(&base);
        let extent = if dir.is_vertical_axis() {
            bbox.width
        } else {
            bbox.length
        };
        if depth > extent + self.cfg.tolerance {
            return Err(a.fail(
                ExecErrorKind::OutOfBounds,
                format!("a {depth} mm room exceeds the {extent} mm usable extent"),
            ));
        }
        let band = side_band(&bbox, dir, depth);
        let region = intersect_rects(&[band], &base);
        self.admit_room(a, name, unit, module, region, &base, open)
    }

    fn op_room_corner(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let module = self.room_module_arg(a)?;
        let unit = self.resolve_unit(a, "unit")?;
        let corner = a.corner("corner")?;
        let length = a.number("length")?;
        let width = a.number("width")?;
        self.check_box_dims(a, length, width)?;
        let off_dir = a.offset_dir("offset_direction")?;
        let offset = a.number("offset")?;
        let open = a.boolean("open")?;
        let base = self.usable_base(a, unit, module)?;
        let bbox = region_bbox(&base);
        let (ew, ns) = corner.components();
        let min_x = if ew == Direction::East {
            bbox.max_x() - length
        } else {
            bbox.min.x
        };
        let min_y = if ns == Direction::North {
            bbox.max_y() - width
        } else {
            bbox.min.y
        };
        let (dx, dy) = off_dir.map(Direction::vector).unwrap_or((0.0, 0.0));
        let rect = Rect::new(min_x + dx * offset, min_y + dy * offset, length, width);
        self.admit_room(a, name, unit, module, vec![rect], &base, open)
    }

    fn op_room_relative(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let unit = self.resolve_unit(a, "unit")?;
        let anchor = self.resolve_room(a, "room")?;
        let dir = a.direction("direction")?;
        let length = a.number("length")?;
        let width = a.number("width")?;
        self.check_box_dims(a, length, width)?;
        let alignment = a.alignment("alignment", dir)?;
        let off_dir = a.offset_dir("offset_direction")?;
        let offset = a.number("offset")?;
        let open = a.boolean("open")?;
        let anchor_room = &self.layout.rooms[anchor];
        if anchor_room.unit != unit {
            return Err(a.fail(
                ExecErrorKind::HostMismatch,
                format!(
                    "room \"{}\" belongs to unit \"{}\"",
                    anchor_room.name, self.layout.units[anchor_room.unit].name
                ),
            ));
        }
        let rect = place_relative(
            &anchor_room.rect,
            dir,
            length,
            width,
            self.cfg.wall_thickness,
            alignment,
            off_dir,
            offset,
        );
        let base = self.usable_base(a, unit, None)?;
        self.admit_room(a, name, unit, None, vec![rect], &base, open)
    }

    fn op_room_at_point(&mut self, a: &Args) -> Result<(), ExecError> {
        let name = a.text("name")?;
        let unit = self.resolve_unit(a, "unit")?;
        let p = a.point("point")?;
        let length = a.number("length")?;
        let width = a.number("width")?;
        self.check_box_dims(a, length, width)?;
        let rect = Rect::new(p.x, p.y, length, width);
        let base = self.usable_base(a, unit, None)?;
        self.admit_room(a, name, unit, None, vec![rect], &base, false)
    }

    // ---- doors and holes ---------------------------------------------------

    fn op_opening(
        &mut self,
        a: &Args,
        host_room: bool,
        midpoint: bool,
        hole: bool,
    ) -> Result<(), ExecError> {
        let dir = a.direction("direction")?;
        let dim = a.number("dimension")?;
        if dim < self.cfg.min_segment {
            return Err(a.fail(
                ExecErrorKind::TooSmall,
                format!(
                    "a {dim} mm opening falls below the {} mm minimum",
                    self.cfg.min_segment
                ),
            ));
        }
        let (alignment, offset) = if midpoint {
            (None, 0.0)
        } else {
            (a.alignment("alignment", dir)?, a.number("offset")?)
        };
        let (set_out, set_dim) = if hole {
            (false, 0.0)
        } else {
            (a.text("set")? == "out", a.number("set_dimension")?)
        };
        let wt = self.cfg.wall_thickness;
        let out_sign = {
            let (dx, dy) = dir.vector();
            dx + dy
        };
        let (host, seg, centerline) = if host_room {
            let ri = self.resolve_room(a, "room")?;
            let room = &self.layout.rooms[ri];
            let segs = facing_segments(&room.outline, dir);
            let seg = pick_longest(&segs).ok_or_else(|| {
                a.invalid(format!(
                    "room \"{}\" has no wall facing {}",
                    room.name,
                    dir.as_str()
                ))
            })?;
            // room faces sit half a wall inside the boundary; the slab
            // is centered on the boundary itself
            (DoorHost::Room(ri), seg, seg.at + out_sign * wt / 2.0)
        } else {
            let mi = self.alive_module(a, "module")?;
            let seg = self.layout.modules[mi].rect.side(dir);
            (DoorHost::Module(mi), seg, seg.at)
        };
        let rect = self.opening_rect(a, &seg, dir, centerline, alignment, offset, set_out, set_dim, dim)?;
        if hole {
            let DoorHost::Module(mi) = host else {
                return Err(a.invalid("holes live on modules".to_string()));
            };
            self.layout.holes.push(HoleEnt {
                module: mi,
                direction: dir,
                rect,
                dimension: dim,
            });
        } else {
            self.layout.doors.push(DoorEnt {
                host,
                direction: dir,
                rect,
                dimension: dim,
            });
        }
        Ok(())
    }

    /// Positions an opening slab along a wall run. Without an alignment
    /// the opening is centered and `offset` moves it east/north; with an
    /// end alignment the opening starts flush at that end and `offset`
    /// moves it toward the other.
    #[allow(clippy::too_many_arguments)]
    fn opening_rect(
        &self,
        a: &Args,
        seg: &SideLine,
        dir: Direction,
        centerline: f64,
        alignment: Option<Direction>,
        offset: f64,
        set_out: bool,
        set_dim: f64,
        dim: f64,
    ) -> Result<Rect, ExecError> {
        let tol = self.cfg.tolerance;
        let wt = self.cfg.wall_thickness;
        let lo = match alignment {
            None => (seg.lo + seg.hi) / 2.0 + offset - dim / 2.0,
            Some(Direction::North | Direction::East) => seg.hi - offset - dim,
            Some(_) => seg.lo + offset,
        };
        if lo < seg.lo - tol || lo + dim > seg.hi + tol {
            return Err(a.fail(
                ExecErrorKind::OutOfBounds,
                format!(
                    "a {dim} mm opening does not fit the {} mm wall run",
                    seg.len()
                ),
            ));
        }
        let out_sign = {
            let (dx, dy) = dir.vector();
            dx + dy
        };
        let center = if set_out {
            centerline + out_sign * set_dim
        } else {
            centerline - out_sign * set_dim
        };
        Ok(if dir.is_vertical_axis() {
            Rect::new(lo, center - wt / 2.0, dim, wt)
        } else {
            Rect::new(center - wt / 2.0, lo, wt, dim)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> Result<Layout, RunError> {
        run_source(src, &KernelConfig::default())
    }

    fn layout(src: &str) -> Layout {
        match run(src) {
            Ok(l) => l,
            Err(e) => panic!("program rejected: {e}"),
        }
    }

    fn exec_err(src: &str) -> ExecError {
        match run(src) {
            Err(RunError::Exec(e)) => e,
            other => panic!("expected an execution error, got {other:?}"),
        }
    }

    fn assert_rect(r: &Rect, x: f64, y: f64, l: f64, w: f64) {
        assert!(
            (r.min.x - x).abs() < 1e-6
                && (r.min.y - y).abs() < 1e-6
                && (r.length - l).abs() < 1e-6
                && (r.width - w).abs() < 1e-6,
            "got ({}, {}, {}, {}), want ({x}, {y}, {l}, {w})",
            r.min.x,
            r.min.y,
            r.length,
            r.width
        );
    }

    const BASE: &str = "Module a = new Module(name: \"Module 1\", point: initial_point, length: 2800, width: 6880);\n";

    #[test]
    fn absolute_module_lands_on_its_point() {
        let l = layout(BASE);
        assert_eq!(l.modules.len(), 1);
        assert_eq!(l.modules[0].name, "Module 1");
        assert!(l.modules[0].alive);
        assert_rect(&l.modules[0].rect, 0.0, 0.0, 2800.0, 6880.0);
        assert_eq!(l.level, "Level 1");
    }

    #[test]
    fn relative_module_with_alignment_and_offset() {
        let src = format!(
            "{BASE}Module b = new Module(name: \"Module 2\", module: a, direction: \"south\", \
             length: 2240, width: 1620, alignment: \"east\", offset_direction: \"west\", offset: 2000);\n"
        );
        let l = layout(&src);
        assert_rect(&l.modules[1].rect, -1440.0, -1620.0, 2240.0, 1620.0);
    }

    #[test]
    fn relative_module_centers_without_alignment() {
        let src = format!(
            "{BASE}Module b = new Module(name: \"Module 2\", module: a, direction: \"east\", length: 1000, width: 2000);\n"
        );
        let l = layout(&src);
        assert_rect(&l.modules[1].rect, 2800.0, 2440.0, 1000.0, 2000.0);
    }

    #[test]
    fn modules_may_touch_but_not_overlap() {
        let touch = "Module a = new Module(name: \"M1\", point: initial_point, length: 1000, width: 1000);\n\
             Module b = new Module(name: \"M2\", point: new UV(1000, 0), length: 1000, width: 1000);\n";
        assert_eq!(layout(touch).modules.len(), 2);
        let e = exec_err(&format!(
            "{touch}Module c = new Module(name: \"M3\", point: new UV(1500, 500), length: 1000, width: 1000);\n"
        ));
        assert_eq!(e.kind, ExecErrorKind::Overlap);
        assert_eq!(e.statement, Some(2));
    }

    #[test]
    fn split_keeps_ratio_on_first_piece() {
        let src = format!(
            "{BASE}List<Module> ps = Utils.SplitModule(module: a, direction: \"west-east\", ratio: 0.25);\n"
        );
        let l = layout(&src);
        assert!(!l.modules[0].alive);
        assert_eq!(l.modules[1].name, "Module 1 A");
        assert_eq!(l.modules[2].name, "Module 1 B");
        assert_rect(&l.modules[1].rect, 0.0, 5160.0, 2800.0, 1720.0);
        assert_rect(&l.modules[2].rect, 0.0, 0.0, 2800.0, 5160.0);
    }

    #[test]
    fn split_rejects_sliver_pieces() {
        let e = exec_err(
            "Module a = new Module(name: \"M\", point: initial_point, length: 1000, width: 1000);\n\
             List<Module> ps = Utils.SplitModule(module: a, direction: \"west-east\", ratio: 0.1);\n",
        );
        assert_eq!(e.kind, ExecErrorKind::TooSmall);
    }

    #[test]
    fn split_of_claimed_module_is_rejected() {
        let src = format!(
            "{BASE}Unit u = new Unit(name: \"Unit 1\", modules: new List<Module> {{ a }});\n\
             List<Module> ps = Utils.SplitModule(module: a, direction: \"north-south\", ratio: 0.5);\n"
        );
        let e = exec_err(&src);
        assert_eq!(e.kind, ExecErrorKind::HostMismatch);
    }

    #[test]
    fn piece_bindings_reach_split_results() {
        let src = format!(
            "{BASE}List<Module> ps = Utils.SplitModule(module: a, direction: \"west-east\", ratio: 0.25);\n\
             Module p = ps[0];\n\
             Utils.CreateDoorForModule(module: p, direction: \"north\", dimension: 800);\n"
        );
        let l = layout(&src);
        assert_eq!(l.doors.len(), 1);
        assert_eq!(l.doors[0].host, DoorHost::Module(1));
        assert_rect(&l.doors[0].rect, 1000.0, 6830.0, 800.0, 100.0);
    }

    #[test]
    fn merge_joins_flush_modules() {
        let l = layout(
            "Module a = new Module(name: \"M1\", point: initial_point, length: 1000, width: 1000);\n\
             Module b = new Module(name: \"M2\", point: new UV(1000, 0), length: 1000, width: 1000);\n\
             Module m = Utils.MergeModules(modules: new List<Module> { a, b });\n",
        );
        assert!(!l.modules[0].alive && !l.modules[1].alive);
        assert_eq!(l.modules[2].name, "M1");
        assert_rect(&l.modules[2].rect, 0.0, 0.0, 2000.0, 1000.0);
    }

    #[test]
    fn merge_rejects_l_shaped_union() {
        let e = exec_err(
            "Module a = new Module(name: \"M1\", point: initial_point, length: 2000, width: 1000);\n\
             Module b = new Module(name: \"M2\", point: new UV(0, 1000), length: 1000, width: 1000);\n\
             Module m = Utils.MergeModules(modules: new List<Module> { a, b });\n",
        );
        assert_eq!(e.kind, ExecErrorKind::NotRectangular);
    }

    #[test]
    fn merge_rejects_disjoint_modules() {
        let e = exec_err(
            "Module a = new Module(name: \"M1\", point: initial_point, length: 1000, width: 1000);\n\
             Module b = new Module(name: \"M2\", point: new UV(3000, 0), length: 1000, width: 1000);\n\
             Module m = Utils.MergeModules(modules: new List<Module> { a, b });\n",
        );
        assert_eq!(e.kind, ExecErrorKind::Disconnected);
    }

    #[test]
    fn unit_usable_region_is_inset_by_half_a_wall() {
        let src = format!("{BASE}Unit u = new Unit(name: \"Unit 1\", modules: new List<Module> {{ a }});\n");
        let l = layout(&src);
        assert_eq!(l.units.len(), 1);
        assert_eq!(l.units[0].usable.len(), 1);
        assert_rect(&l.units[0].usable[0], 50.0, 50.0, 2700.0, 6780.0);
    }

    #[test]
    fn directional_unit_claims_side_bands() {
        let l = layout(
            "Module a = new Module(name: \"M1\", point: initial_point, length: 3000, width: 5000);\n\
             Module b = new Module(name: \"M2\", point: new UV(3000, 0), length: 3000, width: 5000);\n\
             Unit u = new Unit(name: \"U\", modules: new List<Module> { a, b }, direction: \"north\", dimensions: new List<double> { 1500, 1500 });\n",
        );
        let area: f64 = l.units[0].region.iter().map(Rect::area).sum();
        assert!((area - 6000.0 * 1500.0).abs() < 1e-6);
        assert_eq!(l.units[0].outline.points.len(), 4);
        assert_rect(&l.units[0].usable[0], 50.0, 3550.0, 5900.0, 1400.0);
    }

    #[test]
    fn units_cannot_claim_the_same_module() {
        let src = format!(
            "{BASE}Unit u = new Unit(name: \"U1\", modules: new List<Module> {{ a }});\n\
             Unit v = new Unit(name: \"U2\", modules: new List<Module> {{ a }});\n"
        );
        let e = exec_err(&src);
        assert_eq!(e.kind, ExecErrorKind::Overlap);
        assert_eq!(e.statement, Some(2));
    }

    const UNIT: &str = "Module a = new Module(name: \"Module 1\", point: initial_point, length: 2800, width: 6880);\n\
         Unit u = new Unit(name: \"Unit 1\", modules: new List<Module> { a });\n";

    #[test]
    fn container_room_fills_the_usable_area() {
        let src = format!("{UNIT}Room r = new Room(name: \"Room 1\", unit: u, regular: true);\n");
        let l = layout(&src);
        assert_rect(&l.rooms[0].rect, 50.0, 50.0, 2700.0, 6780.0);
        assert!(l.rooms[0].regular);
        assert!(!l.rooms[0].open);
    }

    #[test]
    fn directional_room_takes_a_band_of_the_usable_area() {
        let src = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, direction: \"north\", dimension: 1500);\n"
        );
        let l = layout(&src);
        assert_rect(&l.rooms[0].rect, 50.0, 5330.0, 2700.0, 1500.0);
    }

    #[test]
    fn irregular_container_room_keeps_a_wall_of_clearance() {
        let src = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, direction: \"north\", dimension: 1500);\n\
             Room s = new Room(name: \"Room 2\", unit: u, regular: false);\n"
        );
        let l = layout(&src);
        assert_rect(&l.rooms[1].rect, 50.0, 50.0, 2700.0, 5180.0);
    }

    #[test]
    fn corner_room_anchors_and_offsets() {
        let src = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, corner: \"southwest\", length: 1200, width: 900, offset_direction: \"east\", offset: 500);\n"
        );
        let l = layout(&src);
        assert_rect(&l.rooms[0].rect, 550.0, 50.0, 1200.0, 900.0);
    }

    #[test]
    fn relative_room_keeps_a_full_wall_gap() {
        let src = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, direction: \"south\", dimension: 2000);\n\
             Room s = new Room(name: \"Room 2\", unit: u, room: r, direction: \"north\", length: 1000, width: 800, alignment: \"west\");\n"
        );
        let l = layout(&src);
        assert_rect(&l.rooms[1].rect, 50.0, 2150.0, 1000.0, 800.0);
    }

    #[test]
    fn room_outside_the_usable_area_is_rejected() {
        let src = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, point: initial_point, length: 1000, width: 1000);\n"
        );
        let e = exec_err(&src);
        assert_eq!(e.kind, ExecErrorKind::OutOfBounds);
    }

    #[test]
    fn rooms_need_a_wall_between_them() {
        let crowded = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, point: new UV(50, 50), length: 1000, width: 1000);\n\
             Room s = new Room(name: \"Room 2\", unit: u, point: new UV(1100, 50), length: 1000, width: 1000);\n"
        );
        let e = exec_err(&crowded);
        assert_eq!(e.kind, ExecErrorKind::Overlap);

        let spaced = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, point: new UV(50, 50), length: 1000, width: 1000);\n\
             Room s = new Room(name: \"Room 2\", unit: u, point: new UV(1150, 50), length: 1000, width: 1000);\n"
        );
        assert_eq!(layout(&spaced).rooms.len(), 2);
    }

    #[test]
    fn regular_container_room_needs_a_rectangular_unit() {
        let src = "Module a = new Module(name: \"M1\", point: initial_point, length: 4000, width: 2000);\n\
             Module b = new Module(name: \"M2\", point: new UV(0, 2000), length: 2000, width: 2000);\n\
             Unit u = new Unit(name: \"U\", modules: new List<Module> { a, b });\n\
             Room r = new Room(name: \"R\", unit: u, regular: true);\n";
        let e = exec_err(src);
        assert_eq!(e.kind, ExecErrorKind::NotRectangular);
    }

    #[test]
    fn door_on_an_l_room_uses_the_longest_wall() {
        let src = "Module a = new Module(name: \"M1\", point: initial_point, length: 4000, width: 2000);\n\
             Module b = new Module(name: \"M2\", point: new UV(0, 2000), length: 2000, width: 2000);\n\
             Unit u = new Unit(name: \"U\", modules: new List<Module> { a, b });\n\
             Room r = new Room(name: \"R\", unit: u, regular: false);\n\
             Utils.CreateDoorOnMidpointForRoom(room: r, direction: \"north\");\n";
        let l = layout(src);
        assert!(!l.rooms[0].regular);
        assert_eq!(l.rooms[0].outline.points.len(), 6);
        assert_rect(&l.doors[0].rect, 2500.0, 1950.0, 900.0, 100.0);
    }

    #[test]
    fn midpoint_door_fills_the_wall_slab() {
        let src = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, regular: true);\n\
             Utils.CreateDoorOnMidpointForRoom(room: r, direction: \"south\");\n"
        );
        let l = layout(&src);
        assert_eq!(l.doors.len(), 1);
        assert_eq!(l.doors[0].host, DoorHost::Room(0));
        assert_eq!(l.doors[0].direction, Direction::South);
        assert!((l.doors[0].dimension - 900.0).abs() < 1e-9);
        assert_rect(&l.doors[0].rect, 950.0, -50.0, 900.0, 100.0);
    }

    #[test]
    fn module_door_respects_alignment_and_offset() {
        let src = "Module a = new Module(name: \"M\", point: initial_point, length: 3000, width: 5000);\n\
             Utils.CreateDoorForModule(module: a, direction: \"east\", alignment: \"south\", offset: 200, dimension: 1000);\n";
        let l = layout(src);
        assert_rect(&l.doors[0].rect, 2950.0, 200.0, 100.0, 1000.0);
    }

    #[test]
    fn set_mode_shifts_the_opening_across_the_wall() {
        let src = format!(
            "{UNIT}Room r = new Room(name: \"Room 1\", unit: u, regular: true);\n\
             Utils.CreateDoorOnMidpointForRoom(room: r, direction: \"south\", dimension: 900, set: \"out\", set_dimension: 500);\n\
             Utils.CreateDoorOnMidpointForRoom(room: r, direction: \"south\", dimension: 900, set: \"in\", set_dimension: 500);\n"
        );
        let l = layout(&src);
        assert_rect(&l.doors[0].rect, 950.0, -550.0, 900.0, 100.0);
        assert_rect(&l.doors[1].rect, 950.0, 450.0, 900.0, 100.0);
    }

    #[test]
    fn hole_is_centered_like_a_midpoint_opening() {
        let src = "Module a = new Module(name: \"M1\", point: initial_point, length: 3000, width: 5000);\n\
             Module b = new Module(name: \"M2\", point: new UV(3000, 0), length: 3000, width: 5000);\n\
             Utils.CreateHole(module: a, direction: \"east\", dimension: 1200);\n";
        let l = layout(src);
        assert_eq!(l.holes.len(), 1);
        assert_eq!(l.holes[0].module, 0);
        assert_rect(&l.holes[0].rect, 2950.0, 1900.0, 100.0, 1200.0);
    }

    #[test]
    fn oversized_opening_is_rejected() {
        let src = "Module a = new Module(name: \"M\", point: initial_point, length: 3000, width: 5000);\n\
             Utils.CreateHole(module: a, direction: \"east\", dimension: 6000);\n";
        let e = exec_err(src);
        assert_eq!(e.kind, ExecErrorKind::OutOfBounds);
    }

    #[test]
    fn retired_modules_cannot_host_new_work() {
        let src = format!(
            "{BASE}List<Module> ps = Utils.SplitModule(module: a, direction: \"west-east\", ratio: 0.5);\n\
             Utils.CreateDoorForModule(module: a, direction: \"north\");\n"
        );
        let e = exec_err(&src);
        assert_eq!(e.kind, ExecErrorKind::EntityRetired);
    }

    #[test]
    fn check_findings_stop_execution() {
        let err = run("Unit u = new Unit(name: \"U\", modules: new List<Module> { ghost });\n")
            .unwrap_err();
        assert!(matches!(err, RunError::Check(_)));
    }

    #[test]
    fn unparseable_text_reports_syntax() {
        let err = run("Module a = new Module(name: \"X\" point: initial_point);\n").unwrap_err();
        assert!(matches!(err, RunError::Syntax(_)));
    }

    #[test]
    fn unknown_operations_never_execute() {
        let (prog, _) = parse_and_check("Utils.Frobnicate(a: 1);\n");
        let e = execute_program(&prog.unwrap(), &KernelConfig::default()).unwrap_err();
        assert_eq!(e.kind, ExecErrorKind::Invalid);
    }
}
