//! Scoring of predicted programs against gold programs: compile and pass
//! checks, statement-level and argument-level F1, and geometric IoU.
//!
//! Statement scoring works on canonical instances: the operation kind
//! plus every argument materialized (defaults filled in) and normalized,
//! with entity references replaced by creation-order ids. That makes the
//! two surface styles, argument order, and variable naming all
//! irrelevant, which is the point: score the design, not the spelling.

use std::collections::{BTreeMap, HashMap};

use pathfinding::matrix::Matrix;
use pathfinding::prelude::kuhn_munkres;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsl::{
    parse_and_check, parse_program, signature, ArgValue, DefaultVal, Diagnostic, OpKind, ParamKind,
    PointExpr, Program, RefExpr, Statement,
};
use crate::geom::{min_bounding_rect, rect_iou, Rect};
use crate::kernel::{run_source, DoorHost, KernelConfig, Layout};
use crate::synth::{parse_coordinate_seq, CoordinateLayout};

/// Geometric slack for the pass check, mm per coordinate.
pub const EPS_PASS_MM: f64 = 1.0;

/// True when the text parses and passes static checks.
pub fn check_compile(pred_source: &str) -> (bool, Vec<Diagnostic>) {
    let (program, diags) = parse_and_check(pred_source);
    (program.is_some() && diags.is_empty(), diags)
}

// ---------------------------------------------------------------- pass

fn rect_close(a: &Rect, b: &Rect, eps: f64) -> bool {
    (a.min.x - b.min.x).abs() <= eps
        && (a.min.y - b.min.y).abs() <= eps
        && (a.length - b.length).abs() <= eps
        && (a.width - b.width).abs() <= eps
}

/// Room names carry a functional label plus a free running number;
/// "Bedroom 2" and "bedroom" share the label `bedroom`.
pub fn room_label(name: &str) -> String {
    name.to_lowercase()
        .trim_end_matches(|c: char| c.is_ascii_digit() || c.is_whitespace())
        .trim()
        .to_string()
}

/// Maximum bipartite matching size (augmenting paths). `adj[i]` lists the
/// right-side vertices compatible with left vertex `i`.
fn max_bipartite(adj: &[Vec<usize>], n_right: usize) -> usize {
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none() || augment(owner[v].unwrap(), adj, seen, owner) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; n_right];
    let mut size = 0;
    for u in 0..adj.len() {
        let mut seen = vec![false; n_right];
        if augment(u, adj, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}

/// Complete matching between two equal-size groups under a pair predicate.
fn groups_match<T>(a: &[T], b: &[T], compatible: impl Fn(&T, &T) -> bool) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = a
        .iter()
        .map(|x| {
            b.iter()
                .enumerate()
                .filter(|(_, y)| compatible(x, y))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    max_bipartite(&adj, b.len()) == a.len()
}

/// Layout equivalence up to `eps` per coordinate: the same multiset of
/// entities per category (rooms additionally keyed by functional label,
/// doors and holes by wall side), each matched within tolerance.
pub fn layouts_match(a: &Layout, b: &Layout, eps: f64) -> bool {
    let close = |x: &Rect, y: &Rect| rect_close(x, y, eps);

    let a_mods: Vec<Rect> = a.alive_modules().map(|(_, m)| m.rect).collect();
    let b_mods: Vec<Rect> = b.alive_modules().map(|(_, m)| m.rect).collect();
    if !groups_match(&a_mods, &b_mods, close) {
        return false;
    }

    let unit_bbox = |l: &Layout| -> Vec<Rect> {
        l.units.iter().map(|u| min_bounding_rect(&u.outline)).collect()
    };
    if !groups_match(&unit_bbox(a), &unit_bbox(b), close) {
        return false;
    }

    let rooms = |l: &Layout| -> Vec<(String, Rect)> {
        l.rooms
            .iter()
            .map(|r| (room_label(&r.name), r.rect))
            .collect()
    };
    if !groups_match(&rooms(a), &rooms(b), |x, y| x.0 == y.0 && close(&x.1, &y.1)) {
        return false;
    }

    let doors = |l: &Layout| -> Vec<(&'static str, bool, Rect)> {
        l.doors
            .iter()
            .map(|d| {
                let on_room = matches!(d.host, DoorHost::Room(_));
                (d.direction.as_str(), on_room, d.rect)
            })
            .collect()
    };
    if !groups_match(&doors(a), &doors(b), |x, y| {
        x.0 == y.0 && x.1 == y.1 && close(&x.2, &y.2)
    }) {
        return false;
    }

    let holes = |l: &Layout| -> Vec<(&'static str, Rect)> {
        l.holes
            .iter()
            .map(|h| (h.direction.as_str(), h.rect))
            .collect()
    };
    groups_match(&holes(a), &holes(b), |x, y| x.0 == y.0 && close(&x.1, &y.1))
}

/// True when the prediction compiles, executes, and produces a layout
/// equivalent to the gold layout within `eps` per coordinate.
pub fn check_pass(pred_source: &str, gold_source: &str, eps: f64, cfg: &KernelConfig) -> bool {
    let Ok(pred) = run_source(pred_source, cfg) else {
        return false;
    };
    let Ok(gold) = run_source(gold_source, cfg) else {
        return false;
    };
    layouts_match(&pred, &gold, eps)
}

// -------------------------------------------------- canonical instances

/// Millimeter value in integer nano-ticks, for exact equality and hashing.
fn ticks(v: f64) -> i64 {
    (v * 1e9).round() as i64
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonVal {
    Num(i64),
    Text(String),
    Bool(bool),
    Point(i64, i64),
    /// Creation-order entity id, e.g. `module:2`.
    Id(String),
    Ids(Vec<String>),
    Nums(Vec<i64>),
    /// Reference that never resolved; kept verbatim so it still compares.
    Unresolved(String),
}

/// One design action with every argument materialized and normalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalInstance {
    pub op: OpKind,
    pub args: BTreeMap<&'static str, CanonVal>,
}

#[derive(Clone, Copy)]
enum Tracked {
    Module(usize),
    Unit(usize),
    Room(usize),
    Pieces([usize; 2]),
}

/// Mirrors the executor's entity numbering without any geometry, so ids
/// exist even for programs whose execution would fail.
#[derive(Default)]
struct Tracker {
    env: HashMap<String, Tracked>,
    modules: usize,
    units: usize,
    rooms: usize,
}

impl Tracker {
    fn resolve(&self, r: &RefExpr) -> Option<Tracked> {
        let bound = *self.env.get(&r.name)?;
        match (bound, r.index) {
            (Tracked::Pieces(p), Some(i)) => p.get(i).map(|m| Tracked::Module(*m)),
            (Tracked::Pieces(_), None) => Some(bound),
            (_, Some(_)) => None,
            (_, None) => Some(bound),
        }
    }

    fn module_id(&self, r: &RefExpr) -> Option<String> {
        match self.resolve(r)? {
            Tracked::Module(i) => Some(format!("module:{i}")),
            _ => None,
        }
    }

    fn entity_id(&self, r: &RefExpr) -> Option<String> {
        match self.resolve(r)? {
            Tracked::Module(i) => Some(format!("module:{i}")),
            Tracked::Unit(i) => Some(format!("unit:{i}")),
            Tracked::Room(i) => Some(format!("room:{i}")),
            Tracked::Pieces(_) => None,
        }
    }
}

fn canon_default(d: DefaultVal) -> CanonVal {
    match d {
        DefaultVal::Num(v) => CanonVal::Num(ticks(v)),
        DefaultVal::Text(s) => CanonVal::Text(s.to_lowercase()),
        DefaultVal::Bool(b) => CanonVal::Bool(b),
    }
}

fn canon_value(kind: ParamKind, value: &ArgValue, tracker: &Tracker) -> CanonVal {
    match value {
        ArgValue::Text(s) => match kind {
            ParamKind::Enum(_) => CanonVal::Text(s.trim().to_lowercase()),
            _ => CanonVal::Text(s.trim().to_string()),
        },
        ArgValue::Number(v) => CanonVal::Num(ticks(*v)),
        ArgValue::Bool(b) => CanonVal::Bool(*b),
        ArgValue::Point(PointExpr::Initial) => CanonVal::Point(0, 0),
        ArgValue::Point(PointExpr::Uv(x, y)) => CanonVal::Point(ticks(*x), ticks(*y)),
        ArgValue::Ref(r) => tracker
            .entity_id(r)
            .map(CanonVal::Id)
            .unwrap_or_else(|| CanonVal::Unresolved(r.render())),
        ArgValue::RefList(items) => {
            let ids: Option<Vec<String>> = items.iter().map(|r| tracker.module_id(r)).collect();
            match ids {
                Some(ids) => CanonVal::Ids(ids),
                None => CanonVal::Unresolved(
                    items.iter().map(RefExpr::render).collect::<Vec<_>>().join(","),
                ),
            }
        }
        ArgValue::NumberList(items) => CanonVal::Nums(items.iter().map(|v| ticks(*v)).collect()),
    }
}

/// Longest prefix of the text (cut at statement boundaries) that parses.
fn parseable_prefix(src: &str) -> Program {
    if let Ok(p) = parse_program(src) {
        return p;
    }
    // statement terminators outside string literals
    let mut cuts = Vec::new();
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in src.char_indices() {
        if in_string {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
        } else if c == '"' {
            in_string = true;
        } else if c == ';' {
            cuts.push(i);
        }
    }
    // parse failures are monotone in the prefix length, so bisect
    let mut best = Program::default();
    let (mut lo, mut hi) = (0usize, cuts.len());
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        match parse_program(&src[..=cuts[mid - 1]]) {
            Ok(p) => {
                best = p;
                lo = mid;
            }
            Err(_) => hi = mid - 1,
        }
    }
    best
}

/// Canonical instances of every action statement in the text, tolerant
/// of trailing syntax errors and unresolved references.
pub fn instances(src: &str) -> Vec<CanonicalInstance> {
    let program = parseable_prefix(src);
    let mut tracker = Tracker::default();
    let mut out = Vec::new();
    for stmt in &program.statements {
        match stmt {
            Statement::Action(a) => {
                let sig = signature(a.sig);
                let mut args = BTreeMap::new();
                for p in sig.params {
                    let v = match a.arg(p.name) {
                        Some(value) => canon_value(p.kind, value, &tracker),
                        None => match p.default {
                            Some(d) => canon_default(d),
                            None => continue,
                        },
                    };
                    args.insert(p.name, v);
                }
                out.push(CanonicalInstance { op: a.op, args });
                let created = match a.op {
                    OpKind::ModuleAbsolute | OpKind::ModuleRelative | OpKind::Merge => {
                        let id = tracker.modules;
                        tracker.modules += 1;
                        Some(Tracked::Module(id))
                    }
                    OpKind::Split => {
                        let id = tracker.modules;
                        tracker.modules += 2;
                        Some(Tracked::Pieces([id, id + 1]))
                    }
                    OpKind::UnitFromModules | OpKind::UnitDirectional => {
                        let id = tracker.units;
                        tracker.units += 1;
                        Some(Tracked::Unit(id))
                    }
                    OpKind::RoomContainer
                    | OpKind::RoomDirectional
                    | OpKind::RoomCorner
                    | OpKind::RoomRelative
                    | OpKind::RoomAtPoint => {
                        let id = tracker.rooms;
                        tracker.rooms += 1;
                        Some(Tracked::Room(id))
                    }
                    OpKind::DoorForRoom
                    | OpKind::DoorForModule
                    | OpKind::DoorMidpoint
                    | OpKind::Hole => None,
                };
                if let (Some(t), Some(b)) = (created, &a.binding) {
                    tracker.env.insert(b.name.clone(), t);
                }
            }
            Statement::Piece(p) => {
                if let Some(Tracked::Pieces(pieces)) = tracker.env.get(&p.list).copied() {
                    if let Some(&m) = pieces.get(p.index) {
                        tracker.env.insert(p.name.clone(), Tracked::Module(m));
                    }
                }
            }
            Statement::Unknown(u) => {
                if let Some(name) = &u.binding_name {
                    tracker.env.remove(name);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- F1

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Scores {
    fn from_counts(matched: usize, n_pred: usize, n_gold: usize) -> Scores {
        if n_pred == 0 && n_gold == 0 {
            return Scores {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
            };
        }
        let p = if n_pred == 0 {
            0.0
        } else {
            matched as f64 / n_pred as f64
        };
        let r = if n_gold == 0 {
            0.0
        } else {
            matched as f64 / n_gold as f64
        };
        let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        Scores {
            precision: p,
            recall: r,
            f1,
        }
    }
}

fn multiset_matched(pred: &[CanonicalInstance], gold: &[CanonicalInstance]) -> usize {
    let mut pool: HashMap<&CanonicalInstance, usize> = HashMap::new();
    for g in gold {
        *pool.entry(g).or_insert(0) += 1;
    }
    let mut matched = 0;
    for p in pred {
        if let Some(n) = pool.get_mut(p) {
            if *n > 0 {
                *n -= 1;
                matched += 1;
            }
        }
    }
    matched
}

/// Statement-level F1: a predicted action counts only when some gold
/// action is identical in kind and every normalized argument.
pub fn instance_f1(pred_source: &str, gold_source: &str) -> Scores {
    let pred = instances(pred_source);
    let gold = instances(gold_source);
    Scores::from_counts(multiset_matched(&pred, &gold), pred.len(), gold.len())
}

fn overlap(a: &CanonicalInstance, b: &CanonicalInstance) -> usize {
    a.args
        .iter()
        .filter(|(k, v)| b.args.get(*k) == Some(v))
        .count()
}

/// Within one operation kind, align prediction and gold instances to
/// maximize shared (argument, value) pairs; prefer creation order among
/// equally good alignments. Returns total matched pairs.
fn aligned_overlap(pred: &[&CanonicalInstance], gold: &[&CanonicalInstance]) -> usize {
    if pred.is_empty() || gold.is_empty() {
        return 0;
    }
    let span = pred.len().max(gold.len()) as i64;
    let big = span * span + 1;
    let weight = |i: usize, j: usize| {
        overlap(pred[i], gold[j]) as i64 * big + span - (i as i64 - j as i64).abs()
    };
    let transposed = pred.len() > gold.len();
    let (rows, cols) = if transposed {
        (gold.len(), pred.len())
    } else {
        (pred.len(), gold.len())
    };
    let matrix = Matrix::from_fn(rows, cols, |(r, c)| {
        if transposed {
            weight(c, r)
        } else {
            weight(r, c)
        }
    });
    let (_, assignment) = kuhn_munkres(&matrix);
    assignment
        .iter()
        .enumerate()
        .map(|(r, &c)| {
            if transposed {
                overlap(pred[c], gold[r])
            } else {
                overlap(pred[r], gold[c])
            }
        })
        .sum()
}

/// Argument-level F1 over (instance, argument, value) triples after
/// aligning instances per operation kind.
pub fn argument_f1(pred_source: &str, gold_source: &str) -> Scores {
    let pred = instances(pred_source);
    let gold = instances(gold_source);
    let total_pred: usize = pred.iter().map(|i| i.args.len()).sum();
    let total_gold: usize = gold.iter().map(|i| i.args.len()).sum();
    let mut by_op: BTreeMap<OpKind, (Vec<&CanonicalInstance>, Vec<&CanonicalInstance>)> =
        BTreeMap::new();
    for p in &pred {
        by_op.entry(p.op).or_default().0.push(p);
    }
    for g in &gold {
        by_op.entry(g.op).or_default().1.push(g);
    }
    let matched = by_op
        .values()
        .map(|(p, g)| aligned_overlap(p, g))
        .sum::<usize>();
    Scores::from_counts(matched, total_pred, total_gold)
}

// ---------------------------------------------------------------- IoU

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IouScores {
    pub overall: f64,
    pub module: f64,
    pub unit: f64,
    pub room: f64,
}

impl IouScores {
    pub fn zeros() -> IouScores {
        IouScores {
            overall: 0.0,
            module: 0.0,
            unit: 0.0,
            room: 0.0,
        }
    }
}

/// Labeled-rectangle view of a layout, the shape shared with parsed
/// coordinate text. Consumed modules are omitted; units use their
/// region bounding box.
pub fn rect_view(layout: &Layout) -> CoordinateLayout {
    CoordinateLayout {
        modules: layout
            .alive_modules()
            .map(|(_, m)| (m.name.clone(), m.rect))
            .collect(),
        units: layout
            .units
            .iter()
            .map(|u| (u.name.clone(), min_bounding_rect(&u.outline)))
            .collect(),
        rooms: layout
            .rooms
            .iter()
            .map(|r| (r.name.clone(), r.rect))
            .collect(),
    }
}

/// Best one-to-one assignment value, summed. Entities only pair within
/// the same label group.
fn assignment_iou(pred: &[(String, Rect)], gold: &[(String, Rect)], by_label: bool) -> f64 {
    let mut groups: BTreeMap<String, (Vec<&Rect>, Vec<&Rect>)> = BTreeMap::new();
    let key = |name: &str| {
        if by_label {
            room_label(name)
        } else {
            String::new()
        }
    };
    for (name, r) in pred {
        groups.entry(key(name)).or_default().0.push(r);
    }
    for (name, r) in gold {
        groups.entry(key(name)).or_default().1.push(r);
    }
    let mut total = 0.0;
    for (p, g) in groups.values() {
        if p.is_empty() || g.is_empty() {
            continue;
        }
        let weight = |i: usize, j: usize| (rect_iou(p[i], g[j]) * 1e12).round() as i64;
        let transposed = p.len() > g.len();
        let (rows, cols) = if transposed {
            (g.len(), p.len())
        } else {
            (p.len(), g.len())
        };
        let matrix = Matrix::from_fn(rows, cols, |(r, c)| {
            if transposed {
                weight(c, r)
            } else {
                weight(r, c)
            }
        });
        let (_, assignment) = kuhn_munkres(&matrix);
        for (r, &c) in assignment.iter().enumerate() {
            let (i, j) = if transposed { (c, r) } else { (r, c) };
            total += rect_iou(p[i], g[j]);
        }
    }
    total
}

fn category_iou(pred: &[(String, Rect)], gold: &[(String, Rect)], by_label: bool) -> f64 {
    if pred.is_empty() && gold.is_empty() {
        return 1.0;
    }
    assignment_iou(pred, gold, by_label) / pred.len().max(gold.len()) as f64
}

/// Per-category and overall IoU between two labeled-rectangle views.
/// Categories absent from gold do not enter the overall mean.
pub fn layout_iou_views(pred: &CoordinateLayout, gold: &CoordinateLayout) -> IouScores {
    let module = category_iou(&pred.modules, &gold.modules, false);
    let unit = category_iou(&pred.units, &gold.units, false);
    let room = category_iou(&pred.rooms, &gold.rooms, true);
    let mut present = Vec::new();
    if !gold.modules.is_empty() {
        present.push(module);
    }
    if !gold.units.is_empty() {
        present.push(unit);
    }
    if !gold.rooms.is_empty() {
        present.push(room);
    }
    let overall = if present.is_empty() {
        let pred_empty = pred.modules.is_empty() && pred.units.is_empty() && pred.rooms.is_empty();
        if pred_empty {
            1.0
        } else {
            0.0
        }
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    };
    IouScores {
        overall,
        module,
        unit,
        room,
    }
}

pub fn layout_iou(pred: &Layout, gold: &Layout) -> IouScores {
    layout_iou_views(&rect_view(pred), &rect_view(gold))
}

// ------------------------------------------------------------- reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub compiled: bool,
    pub passed: bool,
    /// Absent for coordinate-format predictions (geometry only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Scores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argument: Option<Scores>,
    pub iou: IouScores,
}

impl EvalReport {
    fn failed_code() -> EvalReport {
        let zero = Scores {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        };
        EvalReport {
            compiled: false,
            passed: false,
            instance: Some(zero),
            argument: Some(zero),
            iou: IouScores::zeros(),
        }
    }
}

/// Full per-record scoring of a code prediction.
pub fn evaluate_pair(pred_source: &str, gold_source: &str, cfg: &KernelConfig) -> EvalReport {
    let compiled = check_compile(pred_source).0;
    let gold_layout = run_source(gold_source, cfg).ok();
    let pred_layout = run_source(pred_source, cfg).ok();
    let passed = match (&pred_layout, &gold_layout) {
        (Some(p), Some(g)) => layouts_match(p, g, EPS_PASS_MM),
        _ => false,
    };
    let iou = match (&pred_layout, &gold_layout) {
        (Some(p), Some(g)) => layout_iou(p, g),
        _ => IouScores::zeros(),
    };
    EvalReport {
        compiled,
        passed,
        instance: Some(instance_f1(pred_source, gold_source)),
        argument: Some(argument_f1(pred_source, gold_source)),
        iou,
    }
}

/// Scoring of a coordinate-format prediction: geometry only, so the F1
/// fields stay empty and `compiled` means the text parsed.
pub fn evaluate_coordinate_pair(
    pred_text: &str,
    gold_source: &str,
    cfg: &KernelConfig,
) -> EvalReport {
    let parsed = parse_coordinate_seq(pred_text).ok();
    let gold_layout = run_source(gold_source, cfg).ok();
    let iou = match (&parsed, &gold_layout) {
        (Some(p), Some(g)) => layout_iou_views(p, &rect_view(g)),
        _ => IouScores::zeros(),
    };
    EvalReport {
        compiled: parsed.is_some(),
        passed: false,
        instance: None,
        argument: None,
        iou,
    }
}

// --------------------------------------------------------------- batch

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchItem {
    pub id: String,
    pub gold: String,
    /// Absent prediction counts as a compile failure.
    pub pred: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CohortDim {
    Modules,
    Units,
    Rooms,
}

impl CohortDim {
    pub fn as_str(self) -> &'static str {
        match self {
            CohortDim::Modules => "modules",
            CohortDim::Units => "units",
            CohortDim::Rooms => "rooms",
        }
    }

    pub fn from_str(s: &str) -> Option<CohortDim> {
        match s {
            "modules" => Some(CohortDim::Modules),
            "units" => Some(CohortDim::Units),
            "rooms" => Some(CohortDim::Rooms),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    /// Predictions are coordinate text rather than code.
    pub coordinate: bool,
    /// Split aggregates into small/large cohorts along this dimension.
    pub group_by: Option<CohortDim>,
    /// Cohort boundary: counts <= threshold versus > threshold.
    pub threshold: usize,
}

impl Default for BatchConfig {
    fn default() -> BatchConfig {
        BatchConfig {
            coordinate: false,
            group_by: None,
            threshold: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordReport {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohort: Option<String>,
    #[serde(flatten)]
    pub report: EvalReport,
}

/// Micro-averaged statement counts for one component family.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassCounts {
    pub matched: usize,
    pub pred: usize,
    pub gold: usize,
}

pub const COMPONENT_CLASSES: [&str; 4] = ["modules", "units", "rooms", "elements"];

fn component_class(op: OpKind) -> usize {
    match op {
        OpKind::ModuleAbsolute | OpKind::ModuleRelative | OpKind::Split | OpKind::Merge => 0,
        OpKind::UnitFromModules | OpKind::UnitDirectional => 1,
        OpKind::RoomContainer
        | OpKind::RoomDirectional
        | OpKind::RoomCorner
        | OpKind::RoomRelative
        | OpKind::RoomAtPoint => 2,
        OpKind::DoorForRoom | OpKind::DoorForModule | OpKind::DoorMidpoint | OpKind::Hole => 3,
    }
}

fn component_counts(pred_source: &str, gold_source: &str) -> [ClassCounts; 4] {
    let pred = instances(pred_source);
    let gold = instances(gold_source);
    let mut out = [ClassCounts::default(); 4];
    for c in 0..4 {
        let p: Vec<CanonicalInstance> = pred
            .iter()
            .filter(|i| component_class(i.op) == c)
            .cloned()
            .collect();
        let g: Vec<CanonicalInstance> = gold
            .iter()
            .filter(|i| component_class(i.op) == c)
            .cloned()
            .collect();
        out[c] = ClassCounts {
            matched: multiset_matched(&p, &g),
            pred: p.len(),
            gold: g.len(),
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub group: String,
    pub count: usize,
    pub compile_rate: f64,
    pub pass_rate: f64,
    /// NaN when no record carries the score (coordinate mode).
    pub instance_f1: f64,
    pub argument_f1: f64,
    pub iou_overall: f64,
    pub iou_module: f64,
    pub iou_unit: f64,
    pub iou_room: f64,
    /// Micro-averaged per-component statement F1, indexed like
    /// [`COMPONENT_CLASSES`].
    pub component_f1: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchOutcome {
    pub records: Vec<RecordReport>,
    /// First row aggregates everything; cohort rows follow when grouping.
    pub aggregates: Vec<Aggregate>,
}

fn cohort_label(gold_layout: Option<&Layout>, dim: CohortDim, threshold: usize) -> String {
    let count = match (gold_layout, dim) {
        (Some(l), CohortDim::Modules) => l.alive_modules().count(),
        (Some(l), CohortDim::Units) => l.units.len(),
        (Some(l), CohortDim::Rooms) => l.rooms.len(),
        (None, _) => 0,
    };
    if count <= threshold {
        format!("{}<={}", dim.as_str(), threshold)
    } else {
        format!("{}>{}", dim.as_str(), threshold)
    }
}

fn aggregate_rows(
    group: &str,
    rows: &[(&RecordReport, &[ClassCounts; 4])],
) -> Aggregate {
    let n = rows.len();
    let frac = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let mean_opt = |values: Vec<Option<f64>>| {
        let present: Vec<f64> = values.into_iter().flatten().collect();
        if present.is_empty() {
            f64::NAN
        } else {
            present.iter().sum::<f64>() / present.len() as f64
        }
    };
    let mean = |f: &dyn Fn(&EvalReport) -> f64| {
        if n == 0 {
            0.0
        } else {
            rows.iter().map(|(r, _)| f(&r.report)).sum::<f64>() / n as f64
        }
    };
    let mut pooled = [ClassCounts::default(); 4];
    for (_, counts) in rows {
        for c in 0..4 {
            pooled[c].matched += counts[c].matched;
            pooled[c].pred += counts[c].pred;
            pooled[c].gold += counts[c].gold;
        }
    }
    let component_f1 = pooled.map(|c| {
        if c.pred == 0 && c.gold == 0 {
            f64::NAN
        } else {
            Scores::from_counts(c.matched, c.pred, c.gold).f1
        }
    });
    Aggregate {
        group: group.to_string(),
        count: n,
        compile_rate: frac(rows.iter().filter(|(r, _)| r.report.compiled).count()),
        pass_rate: frac(rows.iter().filter(|(r, _)| r.report.passed).count()),
        instance_f1: mean_opt(rows.iter().map(|(r, _)| r.report.instance.map(|s| s.f1)).collect()),
        argument_f1: mean_opt(rows.iter().map(|(r, _)| r.report.argument.map(|s| s.f1)).collect()),
        iou_overall: mean(&|r| r.iou.overall),
        iou_module: mean(&|r| r.iou.module),
        iou_unit: mean(&|r| r.iou.unit),
        iou_room: mean(&|r| r.iou.room),
        component_f1,
    }
}

/// Scores every record in parallel, then reduces to aggregate rows:
/// one for the whole batch plus one per cohort when grouping is on.
pub fn batch_evaluate(
    items: &[BatchItem],
    cfg: &KernelConfig,
    bcfg: &BatchConfig,
) -> BatchOutcome {
    let scored: Vec<(RecordReport, [ClassCounts; 4])> = items
        .par_iter()
        .map(|item| {
            let report = match (&item.pred, bcfg.coordinate) {
                (None, _) => EvalReport::failed_code(),
                (Some(p), false) => evaluate_pair(p, &item.gold, cfg),
                (Some(p), true) => evaluate_coordinate_pair(p, &item.gold, cfg),
            };
            let counts = if bcfg.coordinate {
                [ClassCounts::default(); 4]
            } else {
                component_counts(item.pred.as_deref().unwrap_or(""), &item.gold)
            };
            let cohort = bcfg.group_by.map(|dim| {
                let gold_layout = run_source(&item.gold, cfg).ok();
                cohort_label(gold_layout.as_ref(), dim, bcfg.threshold)
            });
            (
                RecordReport {
                    id: item.id.clone(),
                    cohort,
                    report,
                },
                counts,
            )
        })
        .collect();

    let all: Vec<(&RecordReport, &[ClassCounts; 4])> =
        scored.iter().map(|(r, c)| (r, c)).collect();
    let mut aggregates = vec![aggregate_rows("all", &all)];
    if bcfg.group_by.is_some() {
        let mut cohorts: BTreeMap<&str, Vec<(&RecordReport, &[ClassCounts; 4])>> = BTreeMap::new();
        for (r, c) in &scored {
            cohorts
                .entry(r.cohort.as_deref().unwrap_or(""))
                .or_default()
                .push((r, c));
        }
        for (label, rows) in cohorts {
            aggregates.push(aggregate_rows(label, &rows));
        }
    }
    BatchOutcome {
        records: scored.into_iter().map(|(r, _)| r).collect(),
        aggregates,
    }
}

// ------------------------------------------------------------- output

/// One JSON object per record, in input order.
pub fn records_jsonl(outcome: &BatchOutcome) -> String {
    let mut out = String::new();
    for r in &outcome.records {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    out
}

fn cell(v: f64) -> String {
    if v.is_nan() {
        "n/a".to_string()
    } else {
        format!("{:.4}", v)
    }
}

const AGGREGATE_COLUMNS: [&str; 14] = [
    "group",
    "count",
    "compile_rate",
    "pass_rate",
    "instance_f1",
    "argument_f1",
    "iou_overall",
    "iou_module",
    "iou_unit",
    "iou_room",
    "f1_modules",
    "f1_units",
    "f1_rooms",
    "f1_elements",
];

fn aggregate_cells(a: &Aggregate) -> Vec<String> {
    let mut row = vec![a.group.clone(), a.count.to_string()];
    for v in [
        a.compile_rate,
        a.pass_rate,
        a.instance_f1,
        a.argument_f1,
        a.iou_overall,
        a.iou_module,
        a.iou_unit,
        a.iou_room,
    ] {
        row.push(cell(v));
    }
    for v in a.component_f1 {
        row.push(cell(v));
    }
    row
}

pub fn aggregate_csv(outcome: &BatchOutcome) -> String {
    let mut out = AGGREGATE_COLUMNS.join(",");
    out.push('\n');
    for a in &outcome.aggregates {
        out.push_str(&aggregate_cells(a).join(","));
        out.push('\n');
    }
    out
}

pub fn aggregate_markdown(outcome: &BatchOutcome) -> String {
    let mut out = String::new();
    out.push_str(&format!("| {} |\n", AGGREGATE_COLUMNS.join(" | ")));
    out.push_str(&format!(
        "|{}\n",
        " --- |".repeat(AGGREGATE_COLUMNS.len())
    ));
    for a in &outcome.aggregates {
        out.push_str(&format!("| {} |\n", aggregate_cells(a).join(" | ")));
    }
    out
}
