//! Equilibrium points as numerical zeros of the static force.
//!
//! Each of the five families is seeded either from the classical Lagrange
//! positions or from the first-order position series (oblateness, belt and
//! radiation corrections), then polished with a damped Newton iteration on a
//! finite-difference Jacobian. Points keep their classical names even when
//! drag lifts the collinear ones off the axis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Primary, Result};
use crate::exec::Exec;
use crate::model::{static_gradient, ModelParams};

/// Converged points satisfy `max(|Gx|, |Gy|)` below this.
pub const RESIDUAL_TOL: f64 = 1e-11;
pub const MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 20;
/// Newton iterates closer than this to a primary are rejected.
const COLLISION_RADIUS: f64 = 1e-6;
/// A failed iteration that stalls this close to a primary is reported as a
/// collision.
const STALL_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    L1,
    L2,
    L3,
    L4,
    L5,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::L1, Family::L2, Family::L3, Family::L4, Family::L5];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_triangular(self) -> bool {
        matches!(self, Family::L4 | Family::L5)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.index() + 1)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedKind {
    Classical,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedMode {
    /// Position series first, classical positions as fallback.
    #[default]
    Series,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Seed {
    pub family: Family,
    pub x: f64,
    pub y: f64,
    pub kind: SeedKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub family: Family,
    pub x: f64,
    pub y: f64,
    pub residual: f64,
    pub seed_kind: SeedKind,
    pub iterations: usize,
}

/// Classical Lagrange points for mass parameter `mu`, ordered L1..L5.
pub fn classical_points(mu: f64) -> [(f64, f64); 5] {
    let axis = |x: f64| {
        let d1 = x + mu;
        let d2 = x + mu - 1.0;
        x - (1.0 - mu) * d1 / d1.abs().powi(3) - mu * d2 / d2.abs().powi(3)
    };
    // The axial force is strictly increasing on each interval between
    // singularities, so plain bisection finds the unique root.
    let eps = 1e-12;
    let l1 = bisect(axis, -mu + eps, 1.0 - mu - eps);
    let l2 = bisect(axis, 1.0 - mu + eps, 3.0);
    let l3 = bisect(axis, -3.0, -mu - eps);
    let h = 3f64.sqrt() / 2.0;
    [
        (l1, 0.0),
        (l2, 0.0),
        (l3, 0.0),
        (0.5 - mu, h),
        (0.5 - mu, -h),
    ]
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Family of the classical point nearest to `(x, y)`.
pub fn nearest_family(mu: f64, x: f64, y: f64) -> Family {
    let pts = classical_points(mu);
    let d2 = |i: usize| (pts[i].0 - x).powi(2) + (pts[i].1 - y).powi(2);
    Family::ALL
        .into_iter()
        .min_by(|a, b| d2(a.index()).total_cmp(&d2(b.index())))
        .expect("five families")
}

pub fn classical_seeds(p: &ModelParams) -> [Seed; 5] {
    let pts = classical_points(p.mu());
    Family::ALL.map(|family| Seed {
        family,
        x: pts[family.index()].0,
        y: pts[family.index()].1,
        kind: SeedKind::Classical,
    })
}

/// Approximate positions from the first-order position series. Terms in
/// `W1 / y` are dropped for the near-collinear points (there `y` is of the
/// order of `W1`), and any family whose series is undefined falls back to
/// its classical position.
pub fn seed_points(p: &ModelParams) -> [Seed; 5] {
    let classical = classical_seeds(p);
    let mut seeds = classical;
    if let Some((x, y)) = triangular_series(p) {
        seeds[3] = Seed {
            family: Family::L4,
            x,
            y,
            kind: SeedKind::Series,
        };
        seeds[4] = Seed {
            family: Family::L5,
            x,
            y: -y,
            kind: SeedKind::Series,
        };
    }
    let mu = p.mu();
    let belt = belt_factor(p);
    // Radiating-primary distance of the far collinear point; equals 1 in the
    // classical limit and rescales the classical distance.
    let q = p.q1() / p.n2();
    let r1_scale = q.cbrt()
        * (1.0 + 1.5 * p.a2()
            - (1.0 - 2.0 * p.rc()) * belt * (1.0 - 1.5 * mu * p.a2() / (1.0 - mu)))
            .powf(-1.0 / 3.0);
    if r1_scale.is_finite() && r1_scale > 1e-3 {
        let d = -mu - classical[2].x;
        seeds[2] = Seed {
            x: -mu - r1_scale * d,
            kind: SeedKind::Series,
            ..classical[2]
        };
    }
    // Oblate-primary distance of the inner points, same normalisation.
    let r2_scale = (1.0 - mu * (1.0 - 2.0 * p.rc()) * belt).powf(-1.0 / 3.0);
    if r2_scale.is_finite() && r2_scale > 0.0 {
        for i in [0, 1] {
            let d = classical[i].x - (1.0 - mu);
            seeds[i] = Seed {
                x: 1.0 - mu + r2_scale * d,
                kind: SeedKind::Series,
                ..classical[i]
            };
        }
    }
    seeds
}

/// `Mb / (rc^2 + T^2)^(3/2)`.
fn belt_factor(p: &ModelParams) -> f64 {
    p.mb() / (p.rc() * p.rc() + p.t() * p.t()).powf(1.5)
}

/// Triangular position series, evaluated with `y0 = sqrt(3)/2 q1^(1/3)` and
/// then once more with `y0` set to the first estimate.
fn triangular_series(p: &ModelParams) -> Option<(f64, f64)> {
    let mu = p.mu();
    let q23 = p.q1().powf(2.0 / 3.0);
    let belt = belt_factor(p);
    let (a2, nw1, rc) = (p.a2(), p.n() * p.w1(), p.rc());
    let eval = |y0: f64| -> Option<(f64, f64)> {
        let drag_x = if nw1 == 0.0 {
            0.0
        } else {
            nw1 * (mu * q23 - 2.0 * (1.0 - mu)) / (6.0 * mu * (1.0 - mu) * y0)
        };
        let x = -mu + 0.5 * q23 * (1.0 - a2) - drag_x
            + (1.0 - 2.0 * rc) * belt * ((1.0 - 3.0 * mu * a2 / (1.0 - mu)) * q23 - 1.0) / 3.0;
        let drag_y = if nw1 == 0.0 {
            0.0
        } else {
            2.0 * nw1 * (q23 - 2.0) / (3.0 * mu * (1.0 - mu) * y0)
        };
        let bracket = 4.0 - q23 + 2.0 * (q23 - 2.0) * a2
            - drag_y
            - 4.0 * (2.0 * rc - 1.0) * belt * ((q23 - 3.0) * (1.0 - 1.5 * mu * a2 / (1.0 - mu)))
                / 3.0;
        // Prefactor q1^(1/3)/2 so that the drag-free, unperturbed case gives
        // r1 = q1^(1/3), r2 = 1.
        let y = 0.5 * p.q1().cbrt() * bracket.sqrt();
        (x.is_finite() && y.is_finite() && y > 0.0).then_some((x, y))
    };
    let y0 = 0.5 * 3f64.sqrt() * p.q1().cbrt();
    if y0.is_nan() || y0 <= 0.0 {
        return None;
    }
    let (_, y1) = eval(y0)?;
    eval(y1)
}

/// Damped Newton iteration on the static force.
pub fn refine(p: &ModelParams, seed: Seed) -> Result<EquilibriumPoint> {
    let family = seed.family;
    let eval = |x: f64, y: f64| -> Option<(f64, f64)> {
        let (r1, r2) = p.distances(x, y);
        if r1 < COLLISION_RADIUS || r2 < COLLISION_RADIUS {
            return None;
        }
        static_gradient(p, x, y).ok()
    };
    let norm = |g: (f64, f64)| g.0.abs().max(g.1.abs());

    let (mut x, mut y) = (seed.x, seed.y);
    let mut g = eval(x, y).ok_or(Error::NoConvergence {
        family,
        iterations: 0,
        residual: f64::INFINITY,
    })?;
    let mut res = norm(g);
    let mut iterations = 0;
    let mut polish = 0;
    while iterations < MAX_ITERATIONS {
        if res < RESIDUAL_TOL {
            // a few extra steps while they still help
            polish += 1;
            if polish > 3 || res == 0.0 {
                break;
            }
        }
        iterations += 1;
        let Some(j) = jacobian(&eval, x, y) else {
            break;
        };
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = -(j[1][1] * g.0 - j[0][1] * g.1) / det;
        let dy = -(-j[1][0] * g.0 + j[0][0] * g.1) / det;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let (nx, ny) = (x + lambda * dx, y + lambda * dy);
            if let Some(ng) = eval(nx, ny) {
                if norm(ng) < res {
                    accepted = Some((nx, ny, ng));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((nx, ny, ng)) => {
                x = nx;
                y = ny;
                g = ng;
                res = norm(ng);
            }
            None => break,
        }
    }

    if res.is_nan() || res >= RESIDUAL_TOL {
        let (r1, r2) = p.distances(x, y);
        if r1.min(r2) < STALL_RADIUS {
            let primary = if r1 < r2 {
                Primary::Larger
            } else {
                Primary::Smaller
            };
            return Err(Error::PrimaryCollision { family, primary });
        }
        return Err(Error::NoConvergence {
            family,
            iterations,
            residual: res,
        });
    }
    let found = nearest_family(p.mu(), x, y);
    if found != family {
        return Err(Error::FamilyMismatch {
            family,
            found,
            x,
            y,
        });
    }
    Ok(EquilibriumPoint {
        family,
        x,
        y,
        residual: res,
        seed_kind: seed.kind,
        iterations,
    })
}

fn jacobian(
    eval: &impl Fn(f64, f64) -> Option<(f64, f64)>,
    x: f64,
    y: f64,
) -> Option<[[f64; 2]; 2]> {
    let hx = 1e-7 * x.abs().max(1.0);
    let hy = 1e-7 * y.abs().max(1.0);
    let (xp, xm) = (eval(x + hx, y)?, eval(x - hx, y)?);
    let (yp, ym) = (eval(x, y + hy)?, eval(x, y - hy)?);
    Some([
        [(xp.0 - xm.0) / (2.0 * hx), (yp.0 - ym.0) / (2.0 * hy)],
        [(xp.1 - xm.1) / (2.0 * hx), (yp.1 - ym.1) / (2.0 * hy)],
    ])
}

/// Locates one family, trying the series seed before the classical one.
pub fn find_family(p: &ModelParams, family: Family, mode: SeedMode) -> Result<EquilibriumPoint> {
    let classical = classical_seeds(p)[family.index()];
    match mode {
        SeedMode::Classical => refine(p, classical),
        SeedMode::Series => {
            let seed = seed_points(p)[family.index()];
            if seed.kind == SeedKind::Classical {
                return refine(p, seed);
            }
            refine(p, seed).or_else(|first| refine(p, classical).map_err(|_| first))
        }
    }
}

pub fn find_all(p: &ModelParams) -> Result<Vec<EquilibriumPoint>> {
    find_all_with(p, SeedMode::Series, Exec::default())
}

/// All five points, ordered L1..L5.
pub fn find_all_with(p: &ModelParams, mode: SeedMode, exec: Exec) -> Result<Vec<EquilibriumPoint>> {
    let points = exec
        .map(&Family::ALL, |&f| find_family(p, f, mode))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if (a.x - b.x).hypot(a.y - b.y) < 1e-8 {
                return Err(Error::Invalid(format!(
                    "{} and {} converged to the same point",
                    a.family, b.family
                )));
            }
        }
    }
    Ok(points)
}

pub fn to_csv(points: &[EquilibriumPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["family", "x", "y", "residual", "iterations", "seed"])
        .expect("in-memory write");
    for pt in points {
        let seed = match pt.seed_kind {
            SeedKind::Classical => "classical",
            SeedKind::Series => "series",
        };
        w.write_record([
            pt.family.to_string(),
            pt.x.to_string(),
            pt.y.to_string(),
            format!("{:e}", pt.residual),
            pt.iterations.to_string(),
            seed.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_params, ModelInputs, SUN_EARTH_MU};

    fn params(mu: f64, q1: f64, a2: f64, mb: f64) -> ModelParams {
        derive_params(ModelInputs {
            mu,
            q1,
            a2,
            mb,
            t: 0.01,
            cd: 1e4,
        })
        .unwrap()
    }

    #[test]
    fn classical_seeds_are_the_lagrange_points() {
        let p = params(0.025, 1.0, 0.0, 0.0);
        let seeds = seed_points(&p);
        let pts = classical_points(0.025);
        for (s, c) in seeds.iter().zip(pts) {
            assert!(
                (s.x - c.0).abs() < 1e-15 && (s.y - c.1).abs() < 1e-15,
                "{s:?}"
            );
        }
        assert!((seeds[3].x - 0.475).abs() < 1e-15);
        assert!((seeds[3].y - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn photogravitational_triangular_seed() {
        let q1: f64 = 0.9995;
        // cd at the top of the float range leaves W1 negligible.
        let p = derive_params(ModelInputs {
            q1,
            cd: f64::MAX,
            ..ModelInputs::classical(0.025)
        })
        .unwrap();
        assert!(p.w1() < 1e-300);
        let s = seed_points(&p)[3];
        let q23 = q1.powf(2.0 / 3.0);
        assert!((s.x - (-0.025 + q23 / 2.0)).abs() < 1e-14);
        assert!((s.y * s.y - (q23 - q1.powf(4.0 / 3.0) / 4.0)).abs() < 1e-14);
    }

    #[test]
    fn belt_term_shifts_the_triangular_seed() {
        // q1 = 1, A2 = 0: the x correction of the belt is proportional to
        // (q1^(2/3) - 1) and vanishes; the height grows with (2 rc - 1).
        let p = params(0.025, 1.0, 0.0, 0.2);
        let s = seed_points(&p)[3];
        assert!((s.x - 0.475).abs() < 1e-15);
        assert!(2.0 * p.rc() - 1.0 > 0.0);
        assert!(s.y > 3f64.sqrt() / 2.0);

        // Below q1 = 1 the x shift follows sign((1 - 2 rc)(q1^(2/3) - 1)).
        let p = derive_params(ModelInputs {
            cd: f64::MAX,
            ..*params(0.025, 0.9, 0.0, 0.2).inputs()
        })
        .unwrap();
        let no_belt = derive_params(ModelInputs {
            mb: 0.0,
            ..*p.inputs()
        })
        .unwrap();
        let shift = seed_points(&p)[3].x - seed_points(&no_belt)[3].x;
        let expected = (1.0 - 2.0 * p.rc()) * (0.9f64.powf(2.0 / 3.0) - 1.0);
        assert_eq!(shift.signum(), expected.signum());
    }

    #[test]
    fn zero_q1_falls_back_to_classical_seeds() {
        let p = params(0.025, 0.0, 0.0, 0.2);
        let seeds = seed_points(&p);
        assert_eq!(seeds[2].kind, SeedKind::Classical);
        assert_eq!(seeds[3].kind, SeedKind::Classical);
        assert_eq!(seeds[4].kind, SeedKind::Classical);
    }

    #[test]
    fn classical_l4_is_a_fixed_point() {
        let p = params(0.025, 1.0, 0.0, 0.0);
        let seed = classical_seeds(&p)[3];
        let pt = refine(&p, seed).unwrap();
        assert!((pt.x - seed.x).abs() < 1e-12 && (pt.y - seed.y).abs() < 1e-12);
        assert_eq!(pt.family, Family::L4);
    }

    #[test]
    fn l1_near_hill_estimate() {
        let mu = 0.025;
        let pt = find_family(&params(mu, 1.0, 0.0, 0.0), Family::L1, SeedMode::Series).unwrap();
        let hill = (mu / 3.0).cbrt();
        let d = 1.0 - mu - pt.x;
        assert!((d - hill).abs() < 0.2 * hill, "{d} vs {hill}");
    }

    #[test]
    fn drag_lifts_collinear_points_off_the_axis() {
        let p = params(0.025, 0.5, 0.0, 0.0);
        for f in [Family::L1, Family::L2, Family::L3] {
            let pt = find_family(&p, f, SeedMode::Series).unwrap();
            assert!(pt.y.abs() > 0.0, "{f}: {pt:?}");
            assert!(pt.residual < RESIDUAL_TOL);
        }
    }

    #[test]
    fn mirror_symmetry_without_drag() {
        for (q1, a2, mb) in [(1.0, 0.0, 0.0), (1.0, 0.02, 0.2), (1.0, 0.04, 0.75)] {
            let pts = find_all(&params(0.025, q1, a2, mb)).unwrap();
            assert!((pts[3].x - pts[4].x).abs() < 1e-10);
            assert!((pts[3].y + pts[4].y).abs() < 1e-10);
            for pt in &pts[..3] {
                assert!(pt.y.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn table1_regime_has_five_points() {
        for a2 in [0.0, 0.02, 0.04] {
            let pts = find_all(&params(0.025, 1.0, a2, 0.2)).unwrap();
            assert_eq!(pts.len(), 5);
            assert!(pts.iter().all(|p| p.residual < RESIDUAL_TOL));
            assert!(pts[3].y > 0.5 && pts[4].y < -0.5);
        }
    }

    #[test]
    fn small_q1_perturbation_moves_points_continuously() {
        let a = find_all(&params(0.025, 0.7, 0.02, 0.2)).unwrap();
        let b = find_all(&params(0.025, 0.7 + 1e-8, 0.02, 0.2)).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(pa.family, pb.family);
            assert!((pa.x - pb.x).hypot(pa.y - pb.y) < 1e-4);
        }
    }

    #[test]
    fn sun_earth_points() {
        let p = derive_params(ModelInputs::classical(SUN_EARTH_MU)).unwrap();
        let pts = find_all(&p).unwrap();
        assert!((pts[3].x - (0.5 - SUN_EARTH_MU)).abs() < 1e-9);
        assert!((pts[3].y - 3f64.sqrt() / 2.0).abs() < 1e-9);
        // L1/L2 about 0.01 from the Earth
        assert!((pts[0].x - (1.0 - SUN_EARTH_MU) + 0.00997).abs() < 1e-4);
        assert!((pts[1].x - (1.0 - SUN_EARTH_MU) - 0.01004).abs() < 1e-4);
    }

    #[test]
    fn no_triangular_point_without_solar_gravity() {
        let p = params(0.025, 0.0, 0.0, 0.2);
        let err = find_family(&p, Family::L4, SeedMode::Series).unwrap_err();
        assert!(err.to_string().starts_with("L4"), "{err}");
        assert!(find_all(&p).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("L6".parse::<Family>().is_err());
    }

    #[test]
    fn csv_table_has_header_and_rows() {
        let pts = find_all(&params(0.025, 1.0, 0.0, 0.0)).unwrap();
        let csv = to_csv(&pts);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "family,x,y,residual,iterations,seed");
        assert_eq!(lines.len(), 6);
        assert!(lines[4].starts_with("L4,0.475"));
    }
}
