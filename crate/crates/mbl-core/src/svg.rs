//! SVG rendering of layout documents.
//!
//! Output is a pure function of the document: fixed element order, fixed
//! two-decimal coordinates, no timestamps or generated ids, so rendering
//! the same document twice yields byte-identical files and diffs stay
//! meaningful in review.

use std::fmt::Write as _;

use crate::geom::{Direction, Point, Rect};
use crate::layout_json::LayoutDoc;
use crate::metrics::room_label;

const SCALE: f64 = 0.05;
const MARGIN: f64 = 24.0;
const FONT_PX: f64 = 12.0;

struct Mapper {
    min_x: f64,
    max_y: f64,
}

impl Mapper {
    fn x(&self, v: f64) -> f64 {
        (v - self.min_x) * SCALE + MARGIN
    }

    // SVG y grows downward, layout y grows upward
    fn y(&self, v: f64) -> f64 {
        (self.max_y - v) * SCALE + MARGIN
    }

    fn d(&self, v: f64) -> f64 {
        v * SCALE
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn room_fill(name: &str) -> &'static str {
    match room_label(name).as_str() {
        "living room" => "#dce8c8",
        "bedroom" => "#cfe0f2",
        "bathroom" => "#cfe9e6",
        "kitchen" => "#f2e3c8",
        _ => "#e8e4da",
    }
}

fn push_rect(out: &mut String, m: &Mapper, r: &Rect, attrs: &str) {
    let _ = writeln!(
        out,
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {attrs}/>",
        fmt(m.x(r.min.x)),
        fmt(m.y(r.max_y())),
        fmt(m.d(r.length)),
        fmt(m.d(r.width)),
    );
}

fn push_polygon(out: &mut String, m: &Mapper, points: &[Point], attrs: &str) {
    let coords: Vec<String> = points
        .iter()
        .map(|p| format!("{},{}", fmt(m.x(p.x)), fmt(m.y(p.y))))
        .collect();
    let _ = writeln!(out, "  <polygon points=\"{}\" {attrs}/>", coords.join(" "));
}

fn push_line(out: &mut String, m: &Mapper, a: Point, b: Point, attrs: &str) {
    let _ = writeln!(
        out,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {attrs}/>",
        fmt(m.x(a.x)),
        fmt(m.y(a.y)),
        fmt(m.x(b.x)),
        fmt(m.y(b.y)),
    );
}

/// Opening span along the wall and the slab's cross-axis center.
fn opening_geometry(rect: &Rect, direction: Direction) -> (f64, f64, f64, bool) {
    match direction {
        Direction::North | Direction::South => {
            (rect.min.x, rect.max_x(), rect.min.y + rect.width / 2.0, true)
        }
        Direction::East | Direction::West => {
            (rect.min.y, rect.max_y(), rect.min.x + rect.length / 2.0, false)
        }
    }
}

fn door_glyph(out: &mut String, m: &Mapper, rect: &Rect, direction: Direction) {
    // clear the wall, then draw leaf and swing arc into the host interior
    push_rect(out, m, rect, "class=\"door\" fill=\"#ffffff\" stroke=\"none\"");
    let (lo, hi, center, horizontal) = opening_geometry(rect, direction);
    let span = hi - lo;
    let into = match direction {
        Direction::North | Direction::East => -1.0,
        Direction::South | Direction::West => 1.0,
    };
    let (hinge, tip, end) = if horizontal {
        (
            Point::new(lo, center),
            Point::new(lo, center + into * span),
            Point::new(hi, center),
        )
    } else {
        (
            Point::new(center, lo),
            Point::new(center + into * span, lo),
            Point::new(center, hi),
        )
    };
    let sweep = usize::from((into > 0.0) == horizontal);
    let r = fmt(m.d(span));
    let _ = writeln!(
        out,
        "  <path class=\"door\" d=\"M {} {} L {} {} A {r} {r} 0 0 {sweep} {} {}\" fill=\"none\" stroke=\"#8a6d3b\" stroke-width=\"1.2\"/>",
        fmt(m.x(hinge.x)),
        fmt(m.y(hinge.y)),
        fmt(m.x(tip.x)),
        fmt(m.y(tip.y)),
        fmt(m.x(end.x)),
        fmt(m.y(end.y)),
    );
}

fn hole_glyph(out: &mut String, m: &Mapper, rect: &Rect, direction: Direction) {
    // clear the wall and mark both jambs with short ticks
    push_rect(out, m, rect, "class=\"hole\" fill=\"#ffffff\" stroke=\"none\"");
    let (lo, hi, _, horizontal) = opening_geometry(rect, direction);
    let tick = "class=\"hole\" stroke=\"#444444\" stroke-width=\"1.2\"";
    if horizontal {
        for x in [lo, hi] {
            push_line(
                out,
                m,
                Point::new(x, rect.min.y),
                Point::new(x, rect.max_y()),
                tick,
            );
        }
    } else {
        for y in [lo, hi] {
            push_line(
                out,
                m,
                Point::new(rect.min.x, y),
                Point::new(rect.max_x(), y),
                tick,
            );
        }
    }
}

/// Renders the document to a standalone SVG string.
pub fn render_svg(doc: &LayoutDoc) -> String {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut grow = |r: &Rect| {
        min_x = min_x.min(r.min.x);
        min_y = min_y.min(r.min.y);
        max_x = max_x.max(r.max_x());
        max_y = max_y.max(r.max_y());
    };
    for module in doc.modules.iter().filter(|m| m.alive) {
        grow(&module.rect);
    }
    for room in &doc.rooms {
        grow(&room.rect);
    }
    if min_x > max_x {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 2000.0, 2000.0);
    }

    let m = Mapper { min_x, max_y };
    let view_w = (max_x - min_x) * SCALE + 2.0 * MARGIN;
    let view_h = (max_y - min_y) * SCALE + 2.0 * MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">",
        fmt(view_w),
        fmt(view_h),
        fmt(view_w),
        fmt(view_h),
    );
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        fmt(view_w),
        fmt(view_h),
    );

    for room in &doc.rooms {
        let attrs = format!(
            "class=\"room\" fill=\"{}\" stroke=\"none\"",
            room_fill(&room.name)
        );
        push_polygon(&mut out, &m, &room.outline.points, &attrs);
    }

    for wall in &doc.walls {
        let attrs = format!(
            "class=\"wall\" stroke=\"#333333\" stroke-width=\"{}\" stroke-linecap=\"square\"",
            fmt(m.d(wall.thickness)),
        );
        push_line(&mut out, &m, wall.a, wall.b, &attrs);
    }

    for module in doc.modules.iter().filter(|m| m.alive) {
        push_rect(
            &mut out,
            &m,
            &module.rect,
            "class=\"module\" fill=\"none\" stroke=\"#666666\" stroke-width=\"1\" stroke-dasharray=\"6 3\"",
        );
    }

    for door in &doc.doors {
        door_glyph(&mut out, &m, &door.rect, door.direction);
    }
    for hole in &doc.holes {
        hole_glyph(&mut out, &m, &hole.rect, hole.direction);
    }

    for room in &doc.rooms {
        let c = room.rect.center();
        let _ = writeln!(
            out,
            "  <text class=\"label\" x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\" fill=\"#333333\">{}</text>",
            fmt(m.x(c.x)),
            fmt(m.y(c.y)),
            fmt(FONT_PX),
            escape_xml(&room.name),
        );
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{run_source, KernelConfig, Layout};
    use crate::layout_json::export_layout;

    fn doc() -> LayoutDoc {
        let cfg = KernelConfig::default();
        let layout = run_source(
            "Module a = new Module(name: \"Module 1\", point: initial_point, length: 2800, width: 6880);\n\
             Unit u = new Unit(name: \"Unit 1\", modules: new List<Module> { a });\n\
             Room r = new Room(name: \"Bedroom 1\", unit: u, direction: \"south\", dimension: 2500);\n\
             Utils.CreateDoorOnMidpointForRoom(room: r, direction: \"north\");\n\
             Utils.CreateHole(module: a, direction: \"east\", dimension: 1200);\n",
            &cfg,
        )
        .unwrap();
        export_layout(&layout, &cfg, false)
    }

    #[test]
    fn rendering_is_deterministic_and_leaves_the_document_alone() {
        let d = doc();
        let before = d.clone();
        let first = render_svg(&d);
        let second = render_svg(&d);
        assert_eq!(first, second);
        assert_eq!(d, before);
    }

    #[test]
    fn every_entity_kind_leaves_a_glyph() {
        let text = render_svg(&doc());
        assert!(text.starts_with("<svg xmlns="));
        assert!(text.ends_with("</svg>\n"));
        assert_eq!(text.matches("class=\"module\"").count(), 1);
        assert_eq!(text.matches("class=\"room\"").count(), 1);
        assert!(text.matches("class=\"wall\"").count() >= 8);
        assert!(text.contains("class=\"door\""));
        assert!(text.contains("A ")); // the swing arc
        assert!(text.contains("class=\"hole\""));
        assert!(text.contains(">Bedroom 1</text>"));
    }

    #[test]
    fn empty_documents_render_a_valid_frame() {
        let cfg = KernelConfig::default();
        let text = render_svg(&export_layout(&Layout::new("Level 1"), &cfg, false));
        assert!(text.starts_with("<svg"));
        assert!(text.ends_with("</svg>\n"));
    }

    #[test]
    fn names_are_xml_escaped() {
        let cfg = KernelConfig::default();
        let layout = run_source(
            "Module a = new Module(name: \"Module 1\", point: initial_point, length: 4000, width: 4000);\n\
             Unit u = new Unit(name: \"Unit 1\", modules: new List<Module> { a });\n\
             Room r = new Room(name: \"A & B <Suite>\", unit: u, regular: true);\n",
            &cfg,
        )
        .unwrap();
        let text = render_svg(&export_layout(&layout, &cfg, false));
        assert!(text.contains("A &amp; B &lt;Suite&gt;"));
        assert!(!text.contains("A & B"));
    }
}
