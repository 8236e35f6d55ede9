//! Marching squares over a [`FieldGrid`] and small polygon helpers.

use std::collections::HashMap;

use serde::Serialize;

use super::{BBox, FieldGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    /// Closed components repeat their first vertex at the end.
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    pub bbox: BBox,
}

impl Component {
    fn new(points: Vec<(f64, f64)>, closed: bool) -> Self {
        let bbox = BBox::enclosing(&points);
        Component {
            points,
            closed,
            bbox,
        }
    }

    /// Unsigned shoelace area; zero for open components.
    pub fn area(&self) -> f64 {
        if self.closed {
            polygon_area(&self.points)
        } else {
            0.0
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.closed && point_in_polygon(&self.points, x, y)
    }

    pub fn centroid(&self) -> Option<(f64, f64)> {
        if self.closed {
            polygon_centroid(&self.points)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet {
    pub level: f64,
    pub components: Vec<Component>,
}

impl ContourSet {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Smallest closed component enclosing `(x, y)`.
    pub fn enclosing(&self, x: f64, y: f64) -> Option<&Component> {
        self.components
            .iter()
            .filter(|c| c.contains(x, y))
            .min_by(|a, b| a.area().total_cmp(&b.area()))
    }
}

/// Edge of the node lattice: `(vertical, i, j)` where a horizontal edge
/// joins nodes `(i, j)`-`(i+1, j)` and a vertical one `(i, j)`-`(i, j+1)`.
type EdgeKey = (bool, usize, usize);

fn crossing(g: &FieldGrid, level: f64, key: EdgeKey) -> (f64, f64) {
    let (vertical, i, j) = key;
    let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
    let (va, vb) = (g.value(i, j), g.value(i2, j2));
    let t = (level - va) / (vb - va);
    let (xa, ya) = (g.x(i), g.y(j));
    let (xb, yb) = (g.x(i2), g.y(j2));
    (xa + t * (xb - xa), ya + t * (yb - ya))
}

/// Segments of one cell, as pairs of lattice edges.
fn cell_segments(g: &FieldGrid, level: f64, i: usize, j: usize, out: &mut Vec<(EdgeKey, EdgeKey)>) {
    let v = [
        g.value(i, j),
        g.value(i + 1, j),
        g.value(i + 1, j + 1),
        g.value(i, j + 1),
    ];
    let above = v.map(|x| x > level);
    // bottom, right, top, left
    let edges = [
        (false, i, j),
        (true, i + 1, j),
        (false, i, j + 1),
        (true, i, j),
    ];
    let cut: Vec<usize> = (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
    match cut.len() {
        2 => out.push((edges[cut[0]], edges[cut[1]])),
        4 => {
            // saddle: corners on the other side of the centre are cut off
            let centre = v.iter().sum::<f64>() / 4.0 > level;
            for k in 0..4 {
                if above[k] != centre {
                    out.push((edges[(k + 3) % 4], edges[k]));
                }
            }
        }
        _ => {}
    }
}

/// Level set of the grid at `level`, stitched into polylines. Masked cells
/// contribute nothing, so curves reaching them end as open components.
pub fn extract_contours(g: &FieldGrid, level: f64) -> ContourSet {
    let mut segments = Vec::new();
    if level.is_finite() {
        for j in 0..g.ny - 1 {
            for i in 0..g.nx - 1 {
                if !g.cell_masked(i, j) {
                    cell_segments(g, level, i, j, &mut segments);
                }
            }
        }
    }
    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::with_capacity(2 * segments.len());
    for (s, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(s);
        incident.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut components = Vec::new();

    let walk = |start: usize, from: EdgeKey, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut chain = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            match incident[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };

    // open chains start at edges touched by a single segment
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let (a, b) = segments[s];
        let end = if incident[&a].len() == 1 {
            Some(a)
        } else if incident[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(from) = end {
            let chain = walk(s, from, &mut used);
            let pts = chain.iter().map(|&k| crossing(g, level, k)).collect();
            components.push(Component::new(pts, false));
        }
    }
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let chain = walk(s, segments[s].0, &mut used);
        let closed = chain.first() == chain.last();
        let pts = chain.iter().map(|&k| crossing(g, level, k)).collect();
        components.push(Component::new(pts, closed));
    }
    ContourSet { level, components }
}

pub fn polygon_area(pts: &[(f64, f64)]) -> f64 {
    signed_area(pts).abs()
}

fn signed_area(pts: &[(f64, f64)]) -> f64 {
    pts.windows(2)
        .map(|w| w[0].0 * w[1].1 - w[1].0 * w[0].1)
        .sum::<f64>()
        / 2.0
}

/// Even-odd rule; the ring must be closed (first = last).
pub fn point_in_polygon(pts: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    for w in pts.windows(2) {
        let ((xa, ya), (xb, yb)) = (w[0], w[1]);
        if (ya > y) != (yb > y) && x < xa + (y - ya) * (xb - xa) / (yb - ya) {
            inside = !inside;
        }
    }
    inside
}

pub fn polygon_centroid(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let a = signed_area(pts);
    if a == 0.0 {
        return None;
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for w in pts.windows(2) {
        let ((xa, ya), (xb, yb)) = (w[0], w[1]);
        let cross = xa * yb - xb * ya;
        cx += (xa + xb) * cross;
        cy += (ya + yb) * cross;
    }
    Some((cx / (6.0 * a), cy / (6.0 * a)))
}

pub fn to_csv(set: &ContourSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["component", "x", "y"])
        .expect("in-memory write");
    for (k, c) in set.components.iter().enumerate() {
        for &(x, y) in &c.points {
            w.write_record([k.to_string(), x.to_string(), y.to_string()])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;

    fn paraboloid(n: usize) -> FieldGrid {
        FieldGrid::from_fn(BBox::square(1.6), n, n, Exec::Sequential, |x, y| {
            Some(x * x + y * y)
        })
    }

    #[test]
    fn unit_circle() {
        let g = paraboloid(161);
        let set = extract_contours(&g, 1.0);
        assert_eq!(set.components.len(), 1);
        let c = &set.components[0];
        assert!(c.closed);
        assert_eq!(c.points.first(), c.points.last());
        let h = g.hx();
        for &(x, y) in &c.points {
            assert!((x.hypot(y) - 1.0).abs() < 2.0 * h);
        }
        assert!((c.area() - std::f64::consts::PI).abs() < 1e-2);
        let (cx, cy) = c.centroid().unwrap();
        assert!(cx.abs() < 1e-9 && cy.abs() < 1e-9);
        assert!(c.contains(0.0, 0.0) && !c.contains(1.2, 0.0));
        assert!(set.enclosing(0.1, 0.1).is_some());
    }

    #[test]
    fn vertices_lie_on_the_bilinear_level_set() {
        let g = paraboloid(37);
        for c in &extract_contours(&g, 0.7).components {
            for &(x, y) in &c.points {
                assert!((g.bilinear(x, y).unwrap() - 0.7).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outside_the_range_is_empty() {
        let g = paraboloid(33);
        assert!(extract_contours(&g, -0.5).is_empty());
        assert!(extract_contours(&g, 100.0).is_empty());
        assert!(extract_contours(&g, f64::NAN).is_empty());
    }

    #[test]
    fn curves_leaving_the_box_are_open() {
        let g = paraboloid(41);
        let set = extract_contours(&g, 3.0);
        assert!(!set.is_empty());
        assert!(set.components.iter().all(|c| !c.closed));
    }

    #[test]
    fn saddle_cells_are_resolved_by_the_centre() {
        // x*y has a saddle at the origin; level +eps gives two branches in
        // the first and third quadrants, never crossing the axes
        let g = FieldGrid::from_fn(BBox::square(1.0), 20, 20, Exec::Sequential, |x, y| {
            Some(x * y)
        });
        let set = extract_contours(&g, 0.05);
        assert_eq!(set.components.len(), 2);
        for c in &set.components {
            let s = c.points[0].0.signum();
            assert!(c
                .points
                .iter()
                .all(|p| p.0.signum() == s && p.1.signum() == s));
        }
    }

    #[test]
    fn two_rings() {
        let g = FieldGrid::from_fn(BBox::square(2.0), 120, 120, Exec::Sequential, |x, y| {
            Some(((x - 1.0).powi(2) + y * y).min((x + 1.0).powi(2) + y * y))
        });
        let set = extract_contours(&g, 0.25);
        assert_eq!(set.components.len(), 2);
        let left = set.enclosing(-1.0, 0.0).unwrap();
        assert!(left.bbox.xmax < 0.0);
        assert!(set.enclosing(0.0, 0.0).is_none());
    }

    #[test]
    fn csv_rows() {
        let set = extract_contours(&paraboloid(41), 1.0);
        let csv = to_csv(&set);
        assert!(csv.starts_with("component,x,y\n"));
        assert_eq!(csv.lines().count(), set.components[0].points.len() + 1);
    }
}
