//! Best-effort program repair.
//!
//! Repair rewrites a parsed program into the nearest statically clean
//! one: unknown operations are dropped, hallucinated and duplicated
//! arguments removed, misordered positional arguments reassigned to the
//! parameters they fit, dangling references renamed to the nearest
//! earlier definition of the right kind (or their statements dropped),
//! and colliding names disambiguated. Anything that would require
//! inventing a value, a missing required argument, an enum member
//! outside its domain, a reference of the wrong kind, is reported as
//! unrepairable instead of being guessed at.
//!
//! On success the returned program is guaranteed to parse and pass
//! `static_check` with no diagnostics.

use std::collections::BTreeSet;

use super::ast::*;
use super::canon::canonicalize;
use super::check::{plausible, static_check};
use super::parser::parse_program;
use super::sig::{self, EntityKind, OpKind, Param, ParamKind, ResultKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrepairable program: {0}")]
pub struct Unrepairable(pub String);

#[derive(Debug, Clone)]
pub struct RepairReport {
    pub program: Program,
    /// Canonical text of the repaired program.
    pub text: String,
    /// One entry per repair action, in application order.
    pub actions: Vec<String>,
}

impl RepairReport {
    pub fn changed(&self) -> bool {
        !self.actions.is_empty()
    }
}

/// Parses, repairs, and canonicalizes in one step.
pub fn repair_source(src: &str) -> Result<RepairReport, Unrepairable> {
    let program = parse_program(src).map_err(|e| {
        Unrepairable(format!(
            "syntax error at line {}, col {}: {}",
            e.line, e.col, e.message
        ))
    })?;
    repair_program(&program)
}

pub fn repair_program(program: &Program) -> Result<RepairReport, Unrepairable> {
    let mut log: Vec<String> = Vec::new();
    let mut stmts: Vec<Statement> = Vec::new();

    for stmt in &program.statements {
        match stmt {
            Statement::Unknown(u) => {
                log.push(format!("dropped unknown operation `{}`", u.callee));
            }
            other => stmts.push(other.clone()),
        }
    }

    for stmt in &mut stmts {
        if let Statement::Action(a) = stmt {
            repair_args(a, &mut log)?;
        }
    }

    let stmts = resolve_names(stmts, &mut log);

    let draft = Program {
        statements: stmts,
        symbols: Default::default(),
    };
    let text = canonicalize(&draft);
    let repaired = parse_program(&text)
        .map_err(|e| Unrepairable(format!("repaired text failed to parse: {}", e.message)))?;
    if let Some(d) = static_check(&repaired).first() {
        return Err(Unrepairable(d.to_string()));
    }
    Ok(RepairReport {
        program: repaired,
        text,
        actions: log,
    })
}

/// Per-statement argument surgery: drop what no parameter accepts,
/// reorder what clearly landed in the wrong slot, and give up when a
/// required argument is absent.
fn repair_args(a: &mut ActionStatement, log: &mut Vec<String>) -> Result<(), Unrepairable> {
    let sig = sig::signature(a.sig);
    let callee = sig.callee.render();

    if a.named_style {
        let mut seen: Vec<&str> = Vec::new();
        let mut kept: Vec<Arg> = Vec::with_capacity(a.args.len());
        for arg in a.args.drain(..) {
            let name = arg.name.clone().unwrap_or_default();
            match sig.params.iter().find(|p| p.name == name) {
                None => log.push(format!(
                    "dropped argument `{name}`: {callee} has no such parameter"
                )),
                Some(p) if seen.contains(&p.name) => {
                    log.push(format!("dropped duplicate argument `{name}` on {callee}"));
                }
                Some(p) => {
                    seen.push(p.name);
                    kept.push(arg);
                }
            }
        }
        a.args = kept;
    } else {
        if a.args.len() > sig.params.len() {
            log.push(format!(
                "dropped {} surplus argument(s) on {callee}",
                a.args.len() - sig.params.len()
            ));
            a.args.truncate(sig.params.len());
        }
        let n = a.args.len();
        let mut i = 0;
        while i + 1 < n {
            let (p0, p1) = (&sig.params[i], &sig.params[i + 1]);
            let bad_in_place = !plausible(p0.kind, &a.args[i].value)
                && !plausible(p1.kind, &a.args[i + 1].value);
            let fixed_by_swap = plausible(p0.kind, &a.args[i + 1].value)
                && plausible(p1.kind, &a.args[i].value);
            if bad_in_place && fixed_by_swap {
                a.args.swap(i, i + 1);
                log.push(format!(
                    "swapped arguments {} and {} on {callee}",
                    i + 1,
                    i + 2
                ));
                i += 2;
            } else {
                i += 1;
            }
        }
        let identity_ok = a
            .args
            .iter()
            .zip(sig.params)
            .all(|(arg, p)| plausible(p.kind, &arg.value))
            && sig.params[n..].iter().all(|p| !p.required());
        if !identity_ok {
            if let Some(assignment) = assign_positional(&a.args, sig.params) {
                for (arg, pi) in a.args.iter_mut().zip(&assignment) {
                    arg.name = Some(sig.params[*pi].name.to_string());
                }
                a.named_style = true;
                log.push(format!(
                    "reassigned positional arguments on {callee} to the parameters they fit"
                ));
            }
        }
    }

    for p in sig.params.iter().filter(|p| p.required()) {
        if a.arg(p.name).is_none() {
            return Err(Unrepairable(format!(
                "{callee} is missing required argument `{}`",
                p.name
            )));
        }
    }
    Ok(())
}

/// Order-preserving assignment of positional arguments to parameters,
/// skipping only optional slots. Returns the earliest feasible
/// assignment, or `None` when no assignment covers every required
/// parameter with a fitting value.
fn assign_positional(args: &[Arg], params: &'static [Param]) -> Option<Vec<usize>> {
    fn go(
        args: &[Arg],
        params: &'static [Param],
        ai: usize,
        pi: usize,
        acc: &mut Vec<usize>,
    ) -> bool {
        if ai == args.len() {
            return params[pi..].iter().all(|p| !p.required());
        }
        if pi == params.len() {
            return false;
        }
        if plausible(params[pi].kind, &args[ai].value) {
            acc.push(pi);
            if go(args, params, ai + 1, pi + 1, acc) {
                return true;
            }
            acc.pop();
        }
        if !params[pi].required() {
            return go(args, params, ai, pi + 1, acc);
        }
        false
    }
    let mut acc = Vec::with_capacity(args.len());
    go(args, params, 0, 0, &mut acc).then_some(acc)
}

struct Namer {
    /// Bindings in declaration order, most recent last.
    decls: Vec<(String, SymbolKind)>,
    /// Active substitutions applied to later references.
    renames: std::collections::BTreeMap<String, String>,
    all_names: BTreeSet<String>,
}

impl Namer {
    fn defined(&self, name: &str) -> bool {
        self.decls.iter().any(|(n, _)| n == name)
    }

    fn nearest(&self, kind: SymbolKind) -> Option<&str> {
        self.decls
            .iter()
            .rev()
            .find(|(_, k)| *k == kind)
            .map(|(n, _)| n.as_str())
    }

    fn fresh(&mut self, base: &str) -> String {
        let mut i = 2;
        loop {
            let candidate = format!("{base}_{i}");
            if !self.all_names.contains(&candidate) {
                self.all_names.insert(candidate.clone());
                return candidate;
            }
            i += 1;
        }
    }

    fn declare(&mut self, name: &mut String, kind: SymbolKind, log: &mut Vec<String>) {
        if self.defined(name) {
            let fresh = self.fresh(name);
            log.push(format!("renamed redefined `{name}` to `{fresh}`"));
            self.renames.insert(name.clone(), fresh.clone());
            *name = fresh;
        } else {
            // a fresh definition shadows any substitution for the name
            self.renames.remove(name);
        }
        self.all_names.insert(name.clone());
        self.decls.push((name.clone(), kind));
    }
}

fn wanted_symbol(expected: EntityKind) -> SymbolKind {
    match expected {
        EntityKind::Module => SymbolKind::Module,
        EntityKind::Unit => SymbolKind::Unit,
        EntityKind::Room => SymbolKind::Room,
    }
}

fn symbol_desc(kind: SymbolKind) -> &'static str {
    match kind {
        SymbolKind::Module => "module",
        SymbolKind::Unit => "unit",
        SymbolKind::Room => "room",
        SymbolKind::SplitList => "split result",
        SymbolKind::Opaque => "value",
    }
}

/// Applies active substitutions to a reference and, when it is still
/// undefined, retargets it at the nearest earlier definition of the
/// kind the slot expects. Returns false when no substitute exists.
fn fix_ref(r: &mut RefExpr, expected: EntityKind, namer: &Namer, log: &mut Vec<String>) -> bool {
    if let Some(target) = namer.renames.get(&r.name) {
        r.name = target.clone();
    }
    if namer.defined(&r.name) {
        return true;
    }
    let want = if r.index.is_some() {
        SymbolKind::SplitList
    } else {
        wanted_symbol(expected)
    };
    match namer.nearest(want) {
        Some(n) => {
            log.push(format!(
                "renamed undefined `{}` to nearest {} `{}`",
                r.name,
                symbol_desc(want),
                n
            ));
            r.name = n.to_string();
            true
        }
        None => false,
    }
}

fn param_kind_at(a: &ActionStatement, i: usize) -> Option<ParamKind> {
    let sig = sig::signature(a.sig);
    if a.named_style {
        let name = a.args[i].name.as_deref()?;
        sig.params.iter().find(|p| p.name == name).map(|p| p.kind)
    } else {
        sig.params.get(i).map(|p| p.kind)
    }
}

fn arg_index(a: &ActionStatement, param: &str) -> Option<usize> {
    let sig = sig::signature(a.sig);
    if a.named_style {
        a.args.iter().position(|x| x.name.as_deref() == Some(param))
    } else {
        sig.params
            .iter()
            .position(|p| p.name == param)
            .filter(|i| *i < a.args.len())
    }
}

/// Rewrites every reference in the statement. Returns false when the
/// statement must be dropped because some reference has no substitute.
fn rewrite_action(a: &mut ActionStatement, namer: &Namer, log: &mut Vec<String>) -> bool {
    let callee = sig::signature(a.sig).callee.render();
    let mut dropped_list_mask: Option<Vec<bool>> = None;
    for i in 0..a.args.len() {
        let Some(kind) = param_kind_at(a, i) else {
            continue;
        };
        match kind {
            ParamKind::Ref(expected) => {
                let ArgValue::Ref(r) = &mut a.args[i].value else {
                    continue;
                };
                if !fix_ref(r, expected, namer, log) {
                    log.push(format!(
                        "dropped {callee}: `{}` has no definition and no substitute",
                        r.name
                    ));
                    return false;
                }
            }
            ParamKind::ModuleList => {
                let ArgValue::RefList(items) = &mut a.args[i].value else {
                    continue;
                };
                let mut mask: Vec<bool> = Vec::with_capacity(items.len());
                let mut seen: Vec<String> = Vec::new();
                for r in items.iter_mut() {
                    if !fix_ref(r, EntityKind::Module, namer, log) {
                        log.push(format!(
                            "dropped list element `{}`: no definition and no substitute",
                            r.render()
                        ));
                        mask.push(false);
                        continue;
                    }
                    let label = r.render();
                    if seen.contains(&label) {
                        log.push(format!("dropped duplicate list element `{label}`"));
                        mask.push(false);
                    } else {
                        seen.push(label);
                        mask.push(true);
                    }
                }
                if mask.contains(&false) {
                    let mut it = mask.iter();
                    items.retain(|_| *it.next().unwrap());
                    dropped_list_mask = Some(mask);
                }
            }
            _ => {}
        }
    }
    if a.op == OpKind::UnitDirectional {
        if let Some(mask) = dropped_list_mask {
            if let Some(di) = arg_index(a, "dimensions") {
                if let ArgValue::NumberList(dims) = &mut a.args[di].value {
                    if dims.len() == mask.len() {
                        let mut it = mask.iter();
                        dims.retain(|_| *it.next().unwrap());
                        log.push("dropped dimensions paired with removed modules".to_string());
                    }
                }
            }
        }
    }
    true
}

/// Forward walk that fixes references, disambiguates redeclared names,
/// and drops statements that cannot be made to refer to anything.
/// Dropping a statement leaves its binding undefined, so dependents are
/// repaired or dropped by the same walk.
fn resolve_names(stmts: Vec<Statement>, log: &mut Vec<String>) -> Vec<Statement> {
    let mut namer = Namer {
        decls: Vec::new(),
        renames: std::collections::BTreeMap::new(),
        all_names: collect_names(&stmts),
    };
    let mut out: Vec<Statement> = Vec::new();

    for stmt in stmts {
        match stmt {
            Statement::Action(mut a) => {
                if !rewrite_action(&mut a, &namer, log) {
                    continue;
                }
                if a.op == OpKind::Merge && !keep_merge(&mut a, &mut namer, &mut out, log) {
                    continue;
                }
                let result = sig::signature(a.sig).result;
                if result == ResultKind::NoResult {
                    if a.binding.take().is_some() {
                        log.push(format!(
                            "removed binding from resultless {}",
                            sig::signature(a.sig).callee.render()
                        ));
                    }
                } else if let Some(b) = &mut a.binding {
                    let (expected_decl, kind) = match result {
                        ResultKind::Module => (DeclType::Module, SymbolKind::Module),
                        ResultKind::Unit => (DeclType::Unit, SymbolKind::Unit),
                        ResultKind::Room => (DeclType::Room, SymbolKind::Room),
                        ResultKind::ModuleList => (DeclType::ModuleList, SymbolKind::SplitList),
                        ResultKind::NoResult => unreachable!(),
                    };
                    if b.decl_type != expected_decl {
                        log.push(format!(
                            "corrected declared type of `{}` to `{}`",
                            b.name,
                            expected_decl.render()
                        ));
                        b.decl_type = expected_decl;
                    }
                    namer.declare(&mut b.name, kind, log);
                }
                out.push(Statement::Action(a));
            }
            Statement::Piece(mut p) => {
                if let Some(target) = namer.renames.get(&p.list) {
                    p.list = target.clone();
                }
                if !namer.defined(&p.list) {
                    match namer.nearest(SymbolKind::SplitList) {
                        Some(n) => {
                            log.push(format!(
                                "renamed undefined `{}` to nearest split result `{n}`",
                                p.list
                            ));
                            p.list = n.to_string();
                        }
                        None => {
                            log.push(format!(
                                "dropped piece binding `{}`: no split result in scope",
                                p.name
                            ));
                            continue;
                        }
                    }
                }
                if p.index > 1 {
                    log.push(format!("clamped piece index {} to 1", p.index));
                    p.index = 1;
                }
                if p.decl_type != DeclType::Module {
                    log.push(format!(
                        "corrected declared type of `{}` to `Module`",
                        p.name
                    ));
                    p.decl_type = DeclType::Module;
                }
                namer.declare(&mut p.name, SymbolKind::Module, log);
                out.push(Statement::Piece(p));
            }
            Statement::Unknown(_) => {}
        }
    }
    out
}

/// A merge needs two or more modules. A merge reduced to one module is
/// replaced by its sole member: a plain reference becomes a name
/// substitution, a split piece becomes a piece binding. Returns false
/// when the statement should not be kept as a merge.
fn keep_merge(
    a: &mut ActionStatement,
    namer: &mut Namer,
    out: &mut Vec<Statement>,
    log: &mut Vec<String>,
) -> bool {
    let Some(idx) = arg_index(a, "modules") else {
        return true;
    };
    let ArgValue::RefList(items) = &a.args[idx].value else {
        return true;
    };
    match items.len() {
        0 => {
            log.push("dropped merge with no surviving modules".to_string());
            false
        }
        1 => {
            let member = items[0].clone();
            match (&a.binding, member.index) {
                (Some(b), None) => {
                    log.push(format!(
                        "replaced single-module merge `{}` with `{}`",
                        b.name, member.name
                    ));
                    namer.renames.insert(b.name.clone(), member.name.clone());
                }
                (Some(b), Some(ix)) => {
                    log.push(format!(
                        "replaced single-module merge `{}` with piece `{}[{ix}]`",
                        b.name, member.name
                    ));
                    let mut piece = PieceBinding {
                        decl_type: DeclType::Module,
                        name: b.name.clone(),
                        list: member.name.clone(),
                        index: ix,
                        span: a.span,
                    };
                    namer.declare(&mut piece.name, SymbolKind::Module, log);
                    out.push(Statement::Piece(piece));
                }
                (None, _) => {
                    log.push("dropped merge of a single module".to_string());
                }
            }
            false
        }
        _ => true,
    }
}

fn collect_names(stmts: &[Statement]) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    for stmt in stmts {
        match stmt {
            Statement::Action(a) => {
                if let Some(b) = &a.binding {
                    names.insert(b.name.clone());
                }
                for arg in &a.args {
                    match &arg.value {
                        ArgValue::Ref(r) => {
                            names.insert(r.name.clone());
                        }
                        ArgValue::RefList(items) => {
                            for r in items {
                                names.insert(r.name.clone());
                            }
                        }
                        _ => {}
                    }
                }
            }
            Statement::Piece(p) => {
                names.insert(p.name.clone());
                names.insert(p.list.clone());
            }
            Statement::Unknown(u) => {
                if let Some(n) = &u.binding_name {
                    names.insert(n.clone());
                }
            }
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    fn repair(src: &str) -> RepairReport {
        repair_source(src).expect("repairable")
    }

    #[test]
    fn clean_program_is_left_alone() {
        let src = r#"Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Utils.CreateDoorForModule(module: a, direction: "north");
"#;
        let report = repair(src);
        assert!(!report.changed(), "{:?}", report.actions);
        assert_eq!(report.text, src);
    }

    #[test]
    fn unknown_operation_is_dropped() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Utils.CreateWindow(module: a, direction: "north");
"#;
        let report = repair(src);
        assert!(report.actions.iter().any(|a| a.contains("CreateWindow")));
        assert!(!report.text.contains("CreateWindow"));
    }

    #[test]
    fn hallucinated_argument_is_dropped() {
        let src = r#"Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880, height: 3000);"#;
        let report = repair(src);
        assert!(!report.text.contains("height"));
        assert!(report.actions.iter().any(|a| a.contains("height")));
    }

    #[test]
    fn duplicate_argument_keeps_the_first_value() {
        let src = r#"Module a = new Module(name: "A", point: initial_point, length: 2800, length: 3100, width: 6880);"#;
        let report = repair(src);
        assert!(report.text.contains("length: 2800"));
        assert!(!report.text.contains("3100"));
    }

    #[test]
    fn swapped_positional_arguments_are_reordered() {
        let src = r#"
Module a = new Module("A", initial_point, 2800, 6880);
List<Module> p = Utils.SplitModule(a, 0.4, "west-east");
"#;
        let report = repair(src);
        assert!(report
            .text
            .contains("Utils.SplitModule(module: a, direction: \"west-east\", ratio: 0.4);"));
    }

    #[test]
    fn tail_argument_shifts_to_the_parameter_it_fits() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Utils.CreateHole(a, "north", 1200);
"#;
        let report = repair(src);
        assert!(report.text.contains("dimension: 1200"), "{}", report.text);
    }

    #[test]
    fn dangling_reference_is_renamed_to_nearest_module() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Utils.CreateDoorForModule(module: ghost, direction: "north");
"#;
        let report = repair(src);
        assert!(report.text.contains("module: a"));
        assert!(report.actions.iter().any(|x| x.contains("ghost")));
    }

    #[test]
    fn unresolvable_reference_drops_the_statement_and_its_dependents() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Room r = new Room(name: "R", unit: ghost_unit, regular: true);
Utils.CreateDoorForRoom(room: r, direction: "north");
"#;
        let report = repair(src);
        assert!(!report.text.contains("new Room"));
        assert!(!report.text.contains("CreateDoorForRoom"));
        assert!(report.text.contains("new Module"));
    }

    #[test]
    fn missing_required_argument_is_unrepairable() {
        let src = r#"Module a = new Module(name: "A", point: initial_point);"#;
        let err = repair_source(src).unwrap_err();
        assert!(err.0.contains("length"), "{err}");
    }

    #[test]
    fn out_of_domain_enum_is_unrepairable() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Utils.CreateDoorForModule(module: a, direction: "up");
"#;
        assert!(repair_source(src).is_err());
    }

    #[test]
    fn redefined_name_is_disambiguated_for_later_uses() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module a = new Module(name: "B", module: a, direction: "east", length: 2800, width: 6880);
Utils.CreateDoorForModule(module: a, direction: "north");
"#;
        let report = repair(src);
        assert!(report.text.contains("Module a_2 = new Module(name: \"B\""));
        assert!(report.text.contains("module: a_2, direction: \"north\""));
    }

    #[test]
    fn single_module_merge_becomes_its_member() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module b = Utils.MergeModules(modules: new List<Module> { a });
Utils.CreateDoorForModule(module: b, direction: "north");
"#;
        let report = repair(src);
        assert!(!report.text.contains("MergeModules"));
        assert!(report.text.contains("module: a, direction: \"north\""));
    }

    #[test]
    fn binding_on_a_resultless_call_is_removed() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module d = Utils.CreateDoorForModule(module: a, direction: "north");
"#;
        let report = repair(src);
        assert!(report.text.contains("Utils.CreateDoorForModule(module: a"));
        assert!(!report.text.contains("Module d"));
    }

    #[test]
    fn piece_index_is_clamped() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
List<Module> p = Utils.SplitModule(module: a, direction: "west-east", ratio: 0.5);
Module b = p[2];
"#;
        let report = repair(src);
        assert!(report.text.contains("Module b = p[1];"));
    }

    #[test]
    fn declared_type_is_corrected_to_the_result_type() {
        let src = r#"Unit a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);"#;
        let report = repair(src);
        assert!(report.text.starts_with("Module a = new Module"));
    }

    #[test]
    fn dimensions_track_dropped_modules() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Unit u = new Unit(name: "U", modules: new List<Module> { a, ghost }, direction: "north", dimensions: new List<double> { 2000, 2500 });
"#;
        let report = repair(src);
        assert!(report.text.contains("new List<Module> { a }"));
        assert!(report.text.contains("new List<double> { 2000 }"));
    }

    #[test]
    fn syntax_errors_are_unrepairable() {
        assert!(repair_source("Module m = new Module(name: ;").is_err());
    }

    #[test]
    fn repaired_programs_check_clean() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Utils.CreateWindow(module: a);
Utils.CreateDoorForModule(module: ghost, direction: "north", height: 100);
"#;
        let report = repair(src);
        let (_, diags) = super::super::check::parse_and_check(&report.text);
        assert!(diags.is_empty(), "{diags:?}");
    }
}
