use std::fmt::Write;

use super::{r64, PLCurve, Point, SlopeCurve};

const SIZE: f64 = 512.0;

/// Curves and marked points to draw in the unit square.
#[derive(Debug, Clone, Default)]
pub struct SvgScene {
    pub lines: Vec<(SlopeCurve, String)>,
    pub pl_curves: Vec<(PLCurve, String)>,
    pub points: Vec<(Point, String)>,
}

fn px(x: f64, y: f64) -> (f64, f64) {
    (x * SIZE, (1.0 - y) * SIZE)
}

fn segment(out: &mut String, a: (f64, f64), b: (f64, f64), color: &str) {
    let (x1, y1) = px(a.0, a.1);
    let (x2, y2) = px(b.0, b.1);
    let _ = writeln!(
        out,
        r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{color}" stroke-width="1.5"/>"#
    );
}

/// Draws a lifted segment together with its translates that meet the square.
fn wrapped_segment(out: &mut String, a: (f64, f64), d: (f64, f64), color: &str) {
    let b = (a.0 + d.0, a.1 + d.1);
    for dx in [-1.0, 0.0, 1.0] {
        for dy in [-1.0, 0.0, 1.0] {
            let lo = (a.0.min(b.0) + dx, a.1.min(b.1) + dy);
            let hi = (a.0.max(b.0) + dx, a.1.max(b.1) + dy);
            if hi.0 >= 0.0 && lo.0 <= 1.0 && hi.1 >= 0.0 && lo.1 <= 1.0 {
                segment(out, (a.0 + dx, a.1 + dy), (b.0 + dx, b.1 + dy), color);
            }
        }
    }
}

/// Deterministic 512x512 SVG of the fundamental domain.
pub fn render_svg(scene: &SvgScene) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="512" height="512" viewBox="0 0 512 512">"#
    );
    out.push_str("<defs><clipPath id=\"sq\"><rect x=\"0\" y=\"0\" width=\"512\" height=\"512\"/></clipPath></defs>\n");
    out.push_str(
        "<rect x=\"0\" y=\"0\" width=\"512\" height=\"512\" fill=\"white\" stroke=\"black\"/>\n",
    );
    out.push_str("<g clip-path=\"url(#sq)\">\n");
    for (c, color) in &scene.lines {
        let (x0, y0) = c.base_point();
        let start = (r64(x0), r64(y0));
        let d = (c.p() as f64, c.q() as f64);
        // Unit pieces keep each drawn lift short.
        let steps = (c.p().abs().max(c.q().abs()) * 2).max(1);
        for k in 0..steps {
            let t = k as f64 / steps as f64;
            let a = (start.0 + t * d.0, start.1 + t * d.1);
            let a = (a.0 - a.0.floor(), a.1 - a.1.floor());
            let step = (d.0 / steps as f64, d.1 / steps as f64);
            wrapped_segment(&mut out, a, step, color);
        }
    }
    for (curve, color) in &scene.pl_curves {
        for (a, d) in curve.edges() {
            wrapped_segment(&mut out, a, d, color);
        }
    }
    out.push_str("</g>\n");
    for (pt, color) in &scene.points {
        let (x, y) = px(r64(pt.0), r64(pt.1));
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="{color}"/>"#
        );
    }
    out.push_str("</svg>\n");
    out
}
