//! Standalone SVG rendering of contour sets.

use std::fmt::Write;

use super::{BBox, ContourSet};
use crate::equilibria::EquilibriumPoint;
use crate::model::ModelParams;

const WIDTH: f64 = 800.0;

/// Contours in the `bbox` window with the primaries (filled circles) and
/// equilibrium points (crosses) marked. `y` points up.
pub fn render(
    sets: &[ContourSet],
    bbox: &BBox,
    p: &ModelParams,
    points: &[EquilibriumPoint],
) -> String {
    let scale = WIDTH / (bbox.xmax - bbox.xmin);
    let height = (bbox.ymax - bbox.ymin) * scale;
    let px = |x: f64| (x - bbox.xmin) * scale;
    let py = |y: f64| (bbox.ymax - y) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for set in sets {
        let _ = writeln!(
            s,
            r#"<g stroke="black" stroke-width="1" fill="none" data-level="{}">"#,
            set.level
        );
        for c in &set.components {
            let mut d = String::new();
            for (k, &(x, y)) in c.points.iter().enumerate() {
                let _ = write!(
                    d,
                    "{}{:.2},{:.2} ",
                    if k == 0 { "M" } else { "L" },
                    px(x),
                    py(y)
                );
            }
            if c.closed {
                d.push('Z');
            }
            let _ = writeln!(s, r#"<path d="{}"/>"#, d.trim_end());
        }
        s.push_str("</g>\n");
    }
    for (x, r) in [(-p.mu(), 6.0), (1.0 - p.mu(), 4.0)] {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="black"/>"#,
            px(x),
            py(0.0)
        );
    }
    for pt in points {
        let (cx, cy) = (px(pt.x), py(pt.y));
        let _ = writeln!(
            s,
            r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="red" stroke-width="1.5"/>"#,
            cx - 4.0,
            cy - 4.0,
            cx + 4.0,
            cy + 4.0,
            cx - 4.0,
            cy + 4.0,
            cx + 4.0,
            cy - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="red">{}</text>"#,
            cx + 6.0,
            cy - 6.0,
            pt.family
        );
    }
    s.push_str("</svg>\n");
    s
}
