//! Canonical text emission.
//!
//! Canonical form is named-argument style with arguments in signature
//! order, one statement per line. Re-parsing canonical text and emitting
//! it again reproduces the same bytes, and a positional program with the
//! same argument values canonicalizes to the same text as its named twin.

use super::ast::*;
use super::sig::{self, DefaultVal, ResultKind};

/// Formats a millimeter quantity: integers without a decimal point,
/// everything else with the shortest round-trip decimal form.
pub fn format_mm(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{:.0}", v.round())
    } else {
        format!("{v}")
    }
}

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out
}

fn render_value(v: &ArgValue) -> String {
    match v {
        ArgValue::Text(s) => format!("\"{}\"", escape_text(s)),
        ArgValue::Number(n) => format_mm(*n),
        ArgValue::Bool(b) => b.to_string(),
        ArgValue::Point(PointExpr::Initial) => "initial_point".to_string(),
        ArgValue::Point(PointExpr::Uv(x, y)) => {
            format!("new UV({}, {})", format_mm(*x), format_mm(*y))
        }
        ArgValue::Ref(r) => r.render(),
        ArgValue::RefList(items) => {
            if items.is_empty() {
                "new List<Module> { }".to_string()
            } else {
                let inner: Vec<String> = items.iter().map(RefExpr::render).collect();
                format!("new List<Module> {{ {} }}", inner.join(", "))
            }
        }
        ArgValue::NumberList(items) => {
            if items.is_empty() {
                "new List<double> { }".to_string()
            } else {
                let inner: Vec<String> = items.iter().map(|n| format_mm(*n)).collect();
                format!("new List<double> {{ {} }}", inner.join(", "))
            }
        }
    }
}

fn render_default(d: DefaultVal) -> String {
    match d {
        DefaultVal::Num(n) => format_mm(n),
        DefaultVal::Text(t) => format!("\"{t}\""),
        DefaultVal::Bool(b) => b.to_string(),
    }
}

fn result_type_str(result: ResultKind) -> &'static str {
    match result {
        ResultKind::Module => "Module",
        ResultKind::Unit => "Unit",
        ResultKind::Room => "Room",
        ResultKind::ModuleList => "List<Module>",
        ResultKind::NoResult => "",
    }
}

/// Pairs each provided argument with its canonical parameter name.
/// Returns (ordered known args, extra args that match no parameter,
/// true when some extra is unnamed).
fn classify_args<'a>(
    stmt: &'a ActionStatement,
) -> (Vec<(&'static str, &'a ArgValue)>, Vec<&'a Arg>, bool) {
    let sig = sig::signature(stmt.sig);
    let mut known: Vec<(&'static str, &'a ArgValue)> = Vec::new();
    let mut extras: Vec<&'a Arg> = Vec::new();
    let mut unnamed_extra = false;
    if stmt.named_style {
        let mut seen: Vec<&str> = Vec::new();
        for p in sig.params {
            if let Some(a) = stmt
                .args
                .iter()
                .find(|a| a.name.as_deref() == Some(p.name))
            {
                known.push((p.name, &a.value));
                seen.push(p.name);
            }
        }
        for a in &stmt.args {
            let name = a.name.as_deref().unwrap_or("");
            if !sig.params.iter().any(|p| p.name == name) || seen.iter().filter(|s| **s == name).count() == 0
            {
                if !sig.params.iter().any(|p| p.name == name) {
                    extras.push(a);
                }
            }
        }
        // duplicate named args beyond the first are extras too
        let mut counted: Vec<&str> = Vec::new();
        for a in &stmt.args {
            if let Some(n) = a.name.as_deref() {
                if sig.params.iter().any(|p| p.name == n) {
                    if counted.contains(&n) {
                        extras.push(a);
                    } else {
                        counted.push(n);
                    }
                }
            }
        }
    } else {
        for (i, a) in stmt.args.iter().enumerate() {
            match sig.params.get(i) {
                Some(p) => known.push((p.name, &a.value)),
                None => {
                    extras.push(a);
                    unnamed_extra = true;
                }
            }
        }
    }
    (known, extras, unnamed_extra)
}

fn render_action_canonical(stmt: &ActionStatement) -> String {
    let sig = sig::signature(stmt.sig);
    let (known, extras, unnamed_extra) = classify_args(stmt);
    let mut parts: Vec<String> = Vec::new();
    if unnamed_extra {
        // Cannot name every argument; fall back to a fully positional
        // rendering so the emitted line stays parseable.
        for a in &stmt.args {
            parts.push(render_value(&a.value));
        }
    } else {
        for (name, value) in &known {
            parts.push(format!("{name}: {}", render_value(value)));
        }
        for a in extras {
            match &a.name {
                Some(n) => parts.push(format!("{n}: {}", render_value(&a.value))),
                None => parts.push(render_value(&a.value)),
            }
        }
    }
    let call = format!("{}({})", sig.callee.render(), parts.join(", "));
    match &stmt.binding {
        Some(b) => format!("{} {} = {call};", result_type_str(sig.result), b.name),
        None => format!("{call};"),
    }
}

fn render_action_positional(stmt: &ActionStatement) -> String {
    let sig = sig::signature(stmt.sig);
    let (known, extras, _) = classify_args(stmt);
    let mut parts: Vec<String> = Vec::new();
    for p in sig.params {
        if let Some((_, v)) = known.iter().find(|(n, _)| *n == p.name) {
            parts.push(render_value(v));
        } else if let Some(d) = p.default {
            parts.push(render_default(d));
        }
    }
    for a in extras {
        parts.push(render_value(&a.value));
    }
    let call = format!("{}({})", sig.callee.render(), parts.join(", "));
    match &stmt.binding {
        Some(b) => format!("{} {} = {call};", result_type_str(sig.result), b.name),
        None => format!("{call};"),
    }
}

fn render_piece(p: &PieceBinding) -> String {
    format!("Module {} = {}[{}];", p.name, p.list, p.index)
}

fn render_unknown(u: &UnknownStmt) -> String {
    format!("{};", u.raw.trim_end_matches(';').trim())
}

/// Canonical named-style text of a parsed program, one statement per
/// line, with a trailing newline on non-empty output.
pub fn canonicalize(program: &Program) -> String {
    let mut lines = Vec::with_capacity(program.statements.len());
    for stmt in &program.statements {
        lines.push(match stmt {
            Statement::Action(a) => render_action_canonical(a),
            Statement::Piece(p) => render_piece(p),
            Statement::Unknown(u) => render_unknown(u),
        });
    }
    if lines.is_empty() {
        String::new()
    } else {
        lines.join("\n") + "\n"
    }
}

/// Positional-style twin of a program: same values in signature order,
/// with omitted optional arguments filled from their defaults.
pub fn to_positional(program: &Program) -> String {
    let mut lines = Vec::with_capacity(program.statements.len());
    for stmt in &program.statements {
        lines.push(match stmt {
            Statement::Action(a) => render_action_positional(a),
            Statement::Piece(p) => render_piece(p),
            Statement::Unknown(u) => render_unknown(u),
        });
    }
    if lines.is_empty() {
        String::new()
    } else {
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_program;
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_mm(2800.0), "2800");
        assert_eq!(format_mm(0.5), "0.5");
        assert_eq!(format_mm(1717.5), "1717.5");
        assert_eq!(format_mm(-1440.0), "-1440");
    }

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let src = r#"Module module_1 = new Module(name: "Module 1", point: initial_point, length: 2800, width: 6880);
Unit unit_1 = new Unit(name: "Unit 1", modules: new List<Module> { module_1 });
Room living_room = new Room(name: "Living Room", module: module_1, unit: unit_1, regular: true);
"#;
        let canon = canonicalize(&parse_program(src).unwrap());
        assert_eq!(canon, src);
        let again = canonicalize(&parse_program(&canon).unwrap());
        assert_eq!(again, canon);
    }

    #[test]
    fn positional_and_named_twins_canonicalize_identically() {
        let named = r#"Module module_1 = new Module(name: "Module 1", point: initial_point, length: 2800, width: 6880);
Module module_2 = new Module(name: "Module 2", module: module_1, direction: "south", length: 2240, width: 1620, alignment: "east", offset_direction: "west", offset: 2000);
"#;
        let positional = r#"Module module_1 = new Module("Module 1", initial_point, 2800, 6880);
Module module_2 = new Module("Module 2", module_1, "south", 2240, 1620, "east", "west", 2000);
"#;
        let a = canonicalize(&parse_program(named).unwrap());
        let b = canonicalize(&parse_program(positional).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_order_follows_signature_not_source() {
        let shuffled = r#"Module m = new Module(width: 6880, point: initial_point, name: "M", length: 2800);"#;
        let canon = canonicalize(&parse_program(shuffled).unwrap());
        assert_eq!(
            canon,
            "Module m = new Module(name: \"M\", point: initial_point, length: 2800, width: 6880);\n"
        );
    }

    #[test]
    fn positional_twin_fills_optional_defaults() {
        let named = r#"Utils.CreateDoorForRoom(room: r, direction: "west");"#;
        let prog = parse_program(named).unwrap();
        assert_eq!(
            to_positional(&prog),
            "Utils.CreateDoorForRoom(r, \"west\", \"none\", 0, \"in\", 0, 900);\n"
        );
    }

    #[test]
    fn unknown_statements_round_trip_verbatim() {
        let src = "Utils.CreateWindow(module: m, direction: \"north\");\n";
        let canon = canonicalize(&parse_program(src).unwrap());
        assert_eq!(canon, src);
    }
}
