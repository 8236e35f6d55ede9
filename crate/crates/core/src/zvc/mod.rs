//! Zero-velocity curves `C = 2 Omega(x, y)`: grid sampling, contour
//! extraction, and the oval diagnostics around the triangular points.
//!
//! For `W1 > 0` the static potential carries `-W1 n atan2(y, x + mu)`, which
//! jumps across the ray `y = 0, x < -mu`; cells touching that ray are masked
//! so no contour is interpolated across the jump.

mod contour;
pub mod svg;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use contour::{
    extract_contours, point_in_polygon, polygon_area, polygon_centroid, to_csv, Component,
    ContourSet,
};

use crate::equilibria::{find_family, Family, SeedMode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{derive_params, static_gradient, static_potential, ModelInputs, ModelParams};

pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Default for BBox {
    fn default() -> Self {
        BBox::square(1.6)
    }
}

impl BBox {
    pub fn square(half: f64) -> Self {
        BBox {
            xmin: -half,
            xmax: half,
            ymin: -half,
            ymax: half,
        }
    }

    pub fn enclosing(points: &[(f64, f64)]) -> Self {
        let mut b = BBox {
            xmin: f64::INFINITY,
            xmax: f64::NEG_INFINITY,
            ymin: f64::INFINITY,
            ymax: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            b.xmin = b.xmin.min(x);
            b.xmax = b.xmax.max(x);
            b.ymin = b.ymin.min(y);
            b.ymax = b.ymax.max(y);
        }
        b
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.xmin..=self.xmax).contains(&x) && (self.ymin..=self.ymax).contains(&y)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.xmin, self.xmax, self.ymin, self.ymax]
            .iter()
            .all(|v| v.is_finite())
            && self.xmin < self.xmax
            && self.ymin < self.ymax;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("degenerate bounding box {self:?}")))
        }
    }
}

/// `xmin,xmax,ymin,ymax`
impl FromStr for BBox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Invalid(format!("bounding box '{s}': {e}")))?;
        let [xmin, xmax, ymin, ymax] = v[..] else {
            return Err(Error::Invalid(format!(
                "bounding box '{s}' needs four comma-separated numbers"
            )));
        };
        let b = BBox {
            xmin,
            xmax,
            ymin,
            ymax,
        };
        b.validate()?;
        Ok(b)
    }
}

/// Node values on a uniform lattice; `nx`, `ny` count nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub bbox: BBox,
    pub nx: usize,
    pub ny: usize,
    values: Vec<f64>,
    valid: Vec<bool>,
    cut: Vec<bool>,
}

impl FieldGrid {
    /// Samples `f` at every node; `None` or non-finite marks the node
    /// invalid. Rows are evaluated under `exec`.
    pub fn from_fn<F>(bbox: BBox, nx: usize, ny: usize, exec: Exec, f: F) -> Self
    where
        F: Fn(f64, f64) -> Option<f64> + Sync + Send,
    {
        let hx = (bbox.xmax - bbox.xmin) / (nx - 1) as f64;
        let hy = (bbox.ymax - bbox.ymin) / (ny - 1) as f64;
        let rows = exec.map_range(ny, |j| {
            let y = bbox.ymin + j as f64 * hy;
            (0..nx)
                .map(|i| f(bbox.xmin + i as f64 * hx, y).filter(|v| v.is_finite()))
                .collect::<Vec<_>>()
        });
        let flat: Vec<Option<f64>> = rows.into_iter().flatten().collect();
        FieldGrid {
            bbox,
            nx,
            ny,
            values: flat.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
            valid: flat.iter().map(Option::is_some).collect(),
            cut: vec![false; (nx - 1) * (ny - 1)],
        }
    }

    pub fn hx(&self) -> f64 {
        (self.bbox.xmax - self.bbox.xmin) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.bbox.ymax - self.bbox.ymin) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.bbox.xmin + i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.bbox.ymin + j as f64 * self.hy()
    }

    /// NaN at invalid nodes.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[j * self.nx + i]
    }

    pub fn cell_masked(&self, i: usize, j: usize) -> bool {
        self.cut[j * (self.nx - 1) + i]
            || !(self.is_valid(i, j)
                && self.is_valid(i + 1, j)
                && self.is_valid(i, j + 1)
                && self.is_valid(i + 1, j + 1))
    }

    pub fn masked_cells(&self) -> usize {
        (0..self.ny - 1)
            .flat_map(|j| (0..self.nx - 1).map(move |i| (i, j)))
            .filter(|&(i, j)| self.cell_masked(i, j))
            .count()
    }

    /// Bilinear interpolant; `None` outside the box or in a masked cell.
    pub fn bilinear(&self, x: f64, y: f64) -> Option<f64> {
        if !self.bbox.contains(x, y) {
            return None;
        }
        let fx = (x - self.bbox.xmin) / self.hx();
        let fy = (y - self.bbox.ymin) / self.hy();
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        if self.cell_masked(i, j) {
            return None;
        }
        let (u, v) = (fx - i as f64, fy - j as f64);
        Some(
            (1.0 - u) * (1.0 - v) * self.value(i, j)
                + u * (1.0 - v) * self.value(i + 1, j)
                + u * v * self.value(i + 1, j + 1)
                + (1.0 - u) * v * self.value(i, j + 1),
        )
    }
}

/// `2 Omega` at zero velocity on an `nx` x `ny` node lattice.
pub fn sample_grid(p: &ModelParams, bbox: BBox, nx: usize, ny: usize) -> Result<FieldGrid> {
    sample_grid_with(p, bbox, nx, ny, Exec::default())
}

pub fn sample_grid_with(
    p: &ModelParams,
    bbox: BBox,
    nx: usize,
    ny: usize,
    exec: Exec,
) -> Result<FieldGrid> {
    bbox.validate()?;
    if nx < MIN_RESOLUTION || ny < MIN_RESOLUTION {
        return Err(Error::Invalid(format!(
            "grid {nx}x{ny} below the minimum of {MIN_RESOLUTION} nodes per side"
        )));
    }
    let mut g = FieldGrid::from_fn(bbox, nx, ny, exec, |x, y| {
        static_potential(p, x, y).ok().map(|o| 2.0 * o)
    });
    if p.w1() > 0.0 {
        for j in 0..ny - 1 {
            let (ya, yb) = (g.y(j), g.y(j + 1));
            if ya > 0.0 || yb < 0.0 {
                continue;
            }
            for i in 0..nx - 1 {
                if g.x(i) < -p.mu() {
                    g.cut[j * (nx - 1) + i] = true;
                }
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OvalClass {
    No,
    VerySmall,
    Yes,
}

impl std::fmt::Display for OvalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OvalClass::No => "no",
            OvalClass::VerySmall => "very-small",
            OvalClass::Yes => "yes",
        })
    }
}

/// How the oval around a triangular point is probed.
///
/// Levels are stepped away from the point's `C` by `delta_start`,
/// `2 delta_start`, ... up to `delta_max`, towards the side where the curve
/// closes around the point. At each level the oval is the smallest closed
/// component enclosing the point but neither primary; the search stops at
/// the first level without one after a success. The last oval's area
/// decides between "yes" and "very-small".
///
/// Without drag the tadpole around L4 grows into the closed horseshoe
/// through L3 (area of order 2 in the mu = 0.025, T = 0.01 regime). With drag the
/// horseshoe would have to cross the masked branch cut near L3, so the
/// largest oval stays a tadpole (area of order 0.2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvalSettings {
    pub bbox: BBox,
    pub resolution: usize,
    pub area_threshold: f64,
    pub delta_start: f64,
    pub delta_max: f64,
}

impl Default for OvalSettings {
    fn default() -> Self {
        OvalSettings {
            bbox: BBox::default(),
            resolution: 400,
            area_threshold: 1.0,
            delta_start: 1e-3,
            delta_max: 4.096,
        }
    }
}

impl OvalSettings {
    pub fn validate(&self) -> Result<()> {
        self.bbox.validate()?;
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::Invalid(format!(
                "grid resolution {} below {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.area_threshold)
            && positive(self.delta_start)
            && self.delta_max >= self.delta_start)
        {
            return Err(Error::Invalid(
                "oval thresholds must be positive with delta_max >= delta_start".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvalReport {
    pub family: Family,
    pub class: OvalClass,
    /// Equilibrium position, when one exists.
    pub point: Option<(f64, f64)>,
    /// `2 Omega` at the point.
    pub jacobi: Option<f64>,
    /// Signed offset of the reported contour level from `jacobi`.
    pub delta_c: Option<f64>,
    pub level: Option<f64>,
    pub area: Option<f64>,
    pub centroid: Option<(f64, f64)>,
    /// Why the class is "no".
    pub reason: Option<String>,
}

impl OvalReport {
    fn none(family: Family, reason: impl Into<String>) -> Self {
        OvalReport {
            family,
            class: OvalClass::No,
            point: None,
            jacobi: None,
            delta_c: None,
            level: None,
            area: None,
            centroid: None,
            reason: Some(reason.into()),
        }
    }
}

/// Hessian of `Omega` from central differences of its gradient.
fn hessian(p: &ModelParams, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
    let h = 1e-5;
    let (gxp, gyp) = static_gradient(p, x + h, y)?;
    let (gxm, gym) = static_gradient(p, x - h, y)?;
    let (gxu, gyu) = static_gradient(p, x, y + h)?;
    let (gxd, gyd) = static_gradient(p, x, y - h)?;
    let xx = (gxp - gxm) / (2.0 * h);
    let yy = (gyu - gyd) / (2.0 * h);
    let xy = 0.25 * ((gyp - gym) + (gxu - gxd)) / h;
    Ok([[xx, xy], [xy, yy]])
}

fn probe_oval(
    p: &ModelParams,
    grid: &FieldGrid,
    family: Family,
    settings: &OvalSettings,
) -> Result<OvalReport> {
    let pt = match find_family(p, family, SeedMode::Series) {
        Ok(pt) => pt,
        Err(
            e @ (Error::NoConvergence { .. }
            | Error::PrimaryCollision { .. }
            | Error::FamilyMismatch { .. }),
        ) => return Ok(OvalReport::none(family, format!("no equilibrium: {e}"))),
        Err(e) => return Err(e),
    };
    let mut report = OvalReport::none(family, "");
    report.point = Some((pt.x, pt.y));
    let c0 = 2.0 * static_potential(p, pt.x, pt.y)?;
    report.jacobi = Some(c0);
    let [[hxx, hxy], [_, hyy]] = hessian(p, pt.x, pt.y)?;
    if hxx * hyy - hxy * hxy <= 0.0 {
        report.reason = Some("equilibrium is a saddle of the potential".into());
        return Ok(report);
    }
    // around a minimum of Omega the curve closes for levels above C
    let sign = if hxx > 0.0 { 1.0 } else { -1.0 };
    // curves that have wrapped around a primary no longer bound a region
    // about the point
    let others = [(-p.mu(), 0.0), (1.0 - p.mu(), 0.0)];
    let mut delta = settings.delta_start;
    let mut found = false;
    while delta <= settings.delta_max * (1.0 + 1e-12) {
        let level = c0 + sign * delta;
        let set = extract_contours(grid, level);
        let oval = set
            .components
            .iter()
            .filter(|c| c.contains(pt.x, pt.y) && !others.iter().any(|o| c.contains(o.0, o.1)))
            .min_by(|a, b| a.area().total_cmp(&b.area()));
        match oval {
            Some(c) => {
                found = true;
                report.delta_c = Some(sign * delta);
                report.level = Some(level);
                report.area = Some(c.area());
                report.centroid = c.centroid();
            }
            None if found => break,
            None => {}
        }
        delta *= 2.0;
    }
    match report.area {
        Some(a) => {
            report.reason = None;
            report.class = if a > settings.area_threshold {
                OvalClass::Yes
            } else {
                OvalClass::VerySmall
            };
        }
        None => report.reason = Some("no closed curve encloses the point".into()),
    }
    Ok(report)
}

/// Oval diagnostics for the requested families (non-triangular families
/// are reported as "no").
pub fn oval_classification(
    p: &ModelParams,
    families: &[Family],
    settings: &OvalSettings,
) -> Result<Vec<OvalReport>> {
    oval_classification_with(p, families, settings, Exec::default())
}

pub fn oval_classification_with(
    p: &ModelParams,
    families: &[Family],
    settings: &OvalSettings,
    exec: Exec,
) -> Result<Vec<OvalReport>> {
    settings.validate()?;
    let n = settings.resolution;
    let grid = sample_grid_with(p, settings.bbox, n, n, exec)?;
    families
        .iter()
        .map(|&f| {
            if f.is_triangular() {
                probe_oval(p, &grid, f, settings)
            } else {
                Ok(OvalReport::none(f, "not a triangular family"))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSpec {
    /// Table row label: A (q1 = 0), B (q1 = 0.5), C (q1 = 1), D (belt-mass
    /// sequence).
    pub row: char,
    pub inputs: ModelInputs,
}

/// The twelve frames: rows A-C over `A2 in {0, 0.02, 0.04}` with
/// `Mb = 0.2`, and row D over `Mb in {0.25, 0.5, 0.75}` with `q1 = 1`,
/// `A2 = 0.02`. All at `mu = 0.025`, `T = 0.01`.
pub fn table1_frames() -> Vec<FrameSpec> {
    let base = ModelInputs {
        mu: 0.025,
        t: 0.01,
        mb: 0.2,
        ..ModelInputs::default()
    };
    let mut frames = Vec::with_capacity(12);
    for (row, q1) in [('A', 0.0), ('B', 0.5), ('C', 1.0)] {
        for a2 in [0.0, 0.02, 0.04] {
            frames.push(FrameSpec {
                row,
                inputs: ModelInputs { q1, a2, ..base },
            });
        }
    }
    for mb in [0.25, 0.5, 0.75] {
        frames.push(FrameSpec {
            row: 'D',
            inputs: ModelInputs {
                q1: 1.0,
                a2: 0.02,
                mb,
                ..base
            },
        });
    }
    frames
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameResult {
    pub row: char,
    pub inputs: ModelInputs,
    /// The weaker of the L4 and L5 classes.
    pub class: OvalClass,
    pub l4: OvalReport,
    pub l5: OvalReport,
}

pub fn table1(
    frames: &[FrameSpec],
    settings: &OvalSettings,
    exec: Exec,
) -> Result<Vec<FrameResult>> {
    settings.validate()?;
    exec.map(frames, |f| {
        let p = derive_params(f.inputs)?;
        let mut r =
            oval_classification_with(&p, &[Family::L4, Family::L5], settings, exec)?.into_iter();
        let (l4, l5) = (
            r.next().expect("two reports"),
            r.next().expect("two reports"),
        );
        Ok(FrameResult {
            row: f.row,
            inputs: f.inputs,
            class: l4.class.min(l5.class),
            l4,
            l5,
        })
    })
    .into_iter()
    .collect()
}

pub fn table1_csv(results: &[FrameResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "row",
        "q1",
        "a2",
        "mb",
        "class",
        "l4_x",
        "l4_y",
        "l4_area",
        "l4_delta_c",
        "l4_centroid_x",
        "l4_centroid_y",
        "l5_area",
    ])
    .expect("in-memory write");
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in results {
        w.write_record([
            r.row.to_string(),
            r.inputs.q1.to_string(),
            r.inputs.a2.to_string(),
            r.inputs.mb.to_string(),
            r.class.to_string(),
            opt(r.l4.point.map(|p| p.0)),
            opt(r.l4.point.map(|p| p.1)),
            opt(r.l4.area),
            opt(r.l4.delta_c),
            opt(r.l4.centroid.map(|c| c.0)),
            opt(r.l4.centroid.map(|c| c.1)),
            opt(r.l5.area),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::find_all;

    fn table_params(q1: f64, a2: f64) -> ModelParams {
        derive_params(ModelInputs {
            mu: 0.025,
            q1,
            a2,
            mb: 0.2,
            t: 0.01,
            ..ModelInputs::default()
        })
        .unwrap()
    }

    #[test]
    fn bbox_parsing() {
        let b: BBox = "-1,2,-0.5,0.5".parse().unwrap();
        assert_eq!((b.xmin, b.xmax, b.ymin, b.ymax), (-1.0, 2.0, -0.5, 0.5));
        assert!("1,0,0,1".parse::<BBox>().is_err());
        assert!("1,2,3".parse::<BBox>().is_err());
        assert!("a,b,c,d".parse::<BBox>().is_err());
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        let p = table_params(1.0, 0.0);
        assert!(sample_grid(&p, BBox::default(), 15, 100).is_err());
        assert!(sample_grid(&p, BBox::square(0.0), 100, 100).is_err());
    }

    #[test]
    fn drag_free_grid_is_mirror_symmetric() {
        let p = table_params(1.0, 0.02);
        let g = sample_grid(&p, BBox::default(), 101, 101).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (a, b) = (g.value(i, j), g.value(i, g.ny - 1 - j));
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{i} {j}");
            }
        }
        assert_eq!(g.masked_cells(), 0);
    }

    #[test]
    fn table_regime_grid_is_finite_off_the_masks() {
        for q1 in [1.0, 0.5] {
            let p = table_params(q1, 0.02);
            let g = sample_grid(&p, BBox::default(), 400, 400).unwrap();
            let mut cut = 0;
            for j in 0..g.ny - 1 {
                for i in 0..g.nx - 1 {
                    if g.cell_masked(i, j) {
                        cut += 1;
                        continue;
                    }
                    assert!(g.value(i, j).is_finite());
                }
            }
            // the cut row is masked only under drag
            assert_eq!(cut > 0, q1 < 1.0);
            assert!(cut < 2 * g.nx);
        }
    }

    #[test]
    fn grid_value_at_triangular_point_is_second_order() {
        let p = table_params(1.0, 0.0);
        let l4 = find_family(&p, Family::L4, SeedMode::Series).unwrap();
        let exact = 2.0 * static_potential(&p, l4.x, l4.y).unwrap();
        let err = |n: usize| {
            let g = sample_grid(&p, BBox::default(), n, n).unwrap();
            (g.bilinear(l4.x, l4.y).unwrap() - exact).abs()
        };
        let (coarse, fine) = (err(101), err(401));
        let h = 3.2 / 400.0;
        assert!(fine < 10.0 * h * h, "{fine}");
        assert!(fine < coarse);
    }

    #[test]
    fn small_offset_oval_is_resolved_on_a_local_grid() {
        let p = table_params(1.0, 0.0);
        let l4 = find_family(&p, Family::L4, SeedMode::Series).unwrap();
        let c0 = 2.0 * static_potential(&p, l4.x, l4.y).unwrap();
        let local = BBox {
            xmin: l4.x - 0.15,
            xmax: l4.x + 0.15,
            ymin: l4.y - 0.15,
            ymax: l4.y + 0.15,
        };
        let g = sample_grid(&p, local, 301, 301).unwrap();
        let set = extract_contours(&g, c0 + 1e-4);
        let oval = set.enclosing(l4.x, l4.y).expect("oval around L4");
        assert!(oval.closed && oval.bbox.contains(l4.x, l4.y));
        // no curve at all on the other side of the minimum
        assert!(extract_contours(&g, c0 - 1e-4)
            .enclosing(l4.x, l4.y)
            .is_none());
    }

    #[test]
    fn drag_free_contours_are_mirror_symmetric() {
        let p = table_params(1.0, 0.02);
        let g = sample_grid(&p, BBox::default(), 201, 201).unwrap();
        let l4 = find_family(&p, Family::L4, SeedMode::Series).unwrap();
        let level = 2.0 * static_potential(&p, l4.x, l4.y).unwrap() + 0.2;
        let set = extract_contours(&g, level);
        assert!(!set.is_empty());
        for c in set.components.iter().filter(|c| c.closed) {
            let mirror = set.components.iter().filter(|m| m.closed).any(|m| {
                (m.area() - c.area()).abs() < 1e-9 && (m.bbox.ymin + c.bbox.ymax).abs() < 1e-9
            });
            assert!(mirror, "{:?}", c.bbox);
        }
    }

    #[test]
    fn contour_residual_shrinks_under_refinement() {
        let p = table_params(1.0, 0.0);
        let l4 = find_family(&p, Family::L4, SeedMode::Series).unwrap();
        let level = 2.0 * static_potential(&p, l4.x, l4.y).unwrap() + 0.05;
        let residual = |n: usize| {
            let g = sample_grid(&p, BBox::default(), n, n).unwrap();
            let set = extract_contours(&g, level);
            let mut worst = 0.0f64;
            for c in &set.components {
                for &(x, y) in &c.points {
                    let v = 2.0 * static_potential(&p, x, y).unwrap();
                    worst = worst.max((v - level).abs());
                }
            }
            (worst, g.hx())
        };
        let (r1, h1) = residual(101);
        let (r2, h2) = residual(201);
        assert!(r2 < r1, "{r1} {r2}");
        // bounded by a constant times the spacing on both grids
        assert!(r1 / h1 < 50.0 && r2 / h2 < 50.0, "{} {}", r1 / h1, r2 / h2);
    }

    #[test]
    fn rows_a_b_c_classify_as_in_the_table() {
        let settings = OvalSettings {
            resolution: 200,
            ..OvalSettings::default()
        };
        let frames: Vec<_> = table1_frames()
            .into_iter()
            .filter(|f| f.inputs.a2 == 0.02)
            .collect();
        let results = table1(&frames, &settings, Exec::default()).unwrap();
        let classes: Vec<_> = results.iter().map(|r| (r.row, r.class)).collect();
        assert_eq!(
            classes[..3],
            [
                ('A', OvalClass::No),
                ('B', OvalClass::VerySmall),
                ('C', OvalClass::Yes)
            ]
        );
        assert_eq!(results.len(), 6);
        assert!(results[3..]
            .iter()
            .all(|r| r.row == 'D' && r.class == OvalClass::Yes));
        assert!(results[0]
            .l4
            .reason
            .as_deref()
            .unwrap()
            .starts_with("no equilibrium"));
    }

    #[test]
    fn non_triangular_families_report_no() {
        let p = table_params(1.0, 0.0);
        let settings = OvalSettings {
            resolution: 64,
            ..OvalSettings::default()
        };
        let r = oval_classification(&p, &[Family::L1], &settings).unwrap();
        assert_eq!(r[0].class, OvalClass::No);
        assert!(find_all(&p).is_ok());
    }

    #[test]
    fn frames_cover_the_table() {
        let f = table1_frames();
        assert_eq!(f.len(), 12);
        assert_eq!(f.iter().filter(|x| x.row == 'D').count(), 3);
        assert!(f.iter().all(|x| x.inputs.mu == 0.025 && x.inputs.t == 0.01));
    }
}
