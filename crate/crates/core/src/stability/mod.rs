//! Linear stability of equilibrium points.
//!
//! The flow is linearised by central differences of the full vector field
//! (so the drag terms enter through their velocity partials), the
//! characteristic quartic is read off the 4x4 variational matrix, and its
//! roots decide the classification. The closed-form coefficient block is
//! evaluated alongside and reported as a discrepancy only.

mod quartic;

pub use quartic::{canonical_order, scaled_residual, solve_quartic};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibria::EquilibriumPoint;
use crate::error::{Error, Result};
use crate::model::{rhs, ModelParams, PhaseState};

/// Real parts within this band count as zero.
pub const MARGINAL_EPS: f64 = 1e-9;
/// Finite-difference step for the variational matrix.
pub const FD_STEP: f64 = 1e-6;

/// `d/dt (alpha, beta, alpha', beta') = M (alpha, beta, alpha', beta')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalMatrix(pub [[f64; 4]; 4]);

impl VariationalMatrix {
    pub fn omega_xx(&self) -> f64 {
        self.0[2][0]
    }
    pub fn omega_xy(&self) -> f64 {
        self.0[2][1]
    }
    pub fn omega_yx(&self) -> f64 {
        self.0[3][0]
    }
    pub fn omega_yy(&self) -> f64 {
        self.0[3][1]
    }

    /// Velocity partials of the force with the Coriolis part removed:
    /// `[[Omega_x,vx, Omega_x,vy], [Omega_y,vx, Omega_y,vy]]`.
    pub fn velocity_partials(&self, n: f64) -> [[f64; 2]; 2] {
        [
            [self.0[2][2], self.0[2][3] - 2.0 * n],
            [self.0[3][2] + 2.0 * n, self.0[3][3]],
        ]
    }

    /// Monic characteristic polynomial `l^4 + a l^3 + b l^2 + c l + d`,
    /// expanded from `det(l^2 I - l B - A)` for the block form `[[0, I], [A, B]]`.
    pub fn characteristic(&self) -> [f64; 4] {
        let m = &self.0;
        let (a11, a12, a21, a22) = (m[2][0], m[2][1], m[3][0], m[3][1]);
        let (b11, b12, b21, b22) = (m[2][2], m[2][3], m[3][2], m[3][3]);
        [
            -(b11 + b22),
            b11 * b22 - b12 * b21 - a11 - a22,
            a11 * b22 + a22 * b11 - b12 * a21 - a12 * b21,
            a11 * a22 - a12 * a21,
        ]
    }

    pub fn max_abs_diff(&self, other: &VariationalMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

pub fn linearize(p: &ModelParams, eq: &EquilibriumPoint) -> Result<VariationalMatrix> {
    linearize_at(p, eq.x, eq.y, FD_STEP)
}

/// Central differences of the vector field at `(x, y)` at rest. The upper
/// half (zero and identity blocks) is imposed exactly.
pub fn linearize_at(p: &ModelParams, x: f64, y: f64, h: f64) -> Result<VariationalMatrix> {
    let base = [x, y, 0.0, 0.0];
    let mut m = [[0.0; 4]; 4];
    m[0][2] = 1.0;
    m[1][3] = 1.0;
    for k in 0..4 {
        let mut plus = base;
        let mut minus = base;
        plus[k] += h;
        minus[k] -= h;
        let fp = rhs(p, &PhaseState::from_array(plus))?;
        let fm = rhs(p, &PhaseState::from_array(minus))?;
        m[2][k] = (fp[2] - fm[2]) / (2.0 * h);
        m[3][k] = (fp[3] - fm[3]) / (2.0 * h);
    }
    Ok(VariationalMatrix(m))
}

/// One Richardson step on the central-difference matrix, `(4 M(h/2) - M(h)) / 3`.
pub fn linearize_richardson(p: &ModelParams, x: f64, y: f64, h: f64) -> Result<VariationalMatrix> {
    let coarse = linearize_at(p, x, y, h)?;
    let fine = linearize_at(p, x, y, h / 2.0)?;
    Ok(VariationalMatrix(std::array::from_fn(|i| {
        std::array::from_fn(|j| (4.0 * fine.0[i][j] - coarse.0[i][j]) / 3.0)
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffSource {
    Matrix,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Only the closed-form block defines these.
    pub e: Option<f64>,
    pub fstar: Option<f64>,
    pub source: CoeffSource,
}

impl QuarticCoeffs {
    pub fn from_matrix(m: &VariationalMatrix) -> Self {
        let [a, b, c, d] = m.characteristic();
        QuarticCoeffs {
            a,
            b,
            c,
            d,
            e: None,
            fstar: None,
            source: CoeffSource::Matrix,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn roots(&self) -> [Complex64; 4] {
        solve_quartic(self.as_array())
    }

    pub fn max_abs_diff(&self, other: &QuarticCoeffs) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form coefficient block evaluated literally at the point. The
/// `r2` carrying the undefined subscript `i` is taken at the point itself.
pub fn analytic_coefficients(p: &ModelParams, eq: &EquilibriumPoint) -> Result<QuarticCoeffs> {
    let (x, y) = (eq.x, eq.y);
    let mu = p.mu();
    let (r1, r2) = p.distances(x, y);
    let r = x.hypot(y);
    let guard = 1e-12;
    if r1 < guard || r2 < guard || r < guard {
        return Err(Error::Invalid(format!(
            "{}: coefficient block undefined at ({x}, {y})",
            eq.family
        )));
    }
    if p.w1() > 0.0 && y == 0.0 {
        return Err(Error::Invalid(format!(
            "{}: coefficient block needs y != 0 under drag",
            eq.family
        )));
    }
    let (q1, a2, mb, t, n2, n, w1) = (p.q1(), p.a2(), p.mb(), p.t(), p.n2(), p.n(), p.w1());
    let (y2, r1_2, r2_2) = (y * y, r1 * r1, r2 * r2);
    let (r1_4, r1_5) = (r1_2 * r1_2, r1_2 * r1_2 * r1);
    let r2_5 = r2_2 * r2_2 * r2;
    let belt5 = (r * r + t * t).powf(2.5);
    let oblate = 1.0 + 2.5 * a2 / r2_2;

    let fstar = (1.0 - mu) * q1 / (r1_2 * r1)
        + mu / (r2_2 * r2) * (1.0 + 1.5 * a2 / r2_2)
        + 3.0 * mb / belt5;
    let a = 3.0 * w1 / r1_2;
    let b =
        2.0 * n2 - fstar - 3.0 * mu * a2 / r2_5 + 3.0 * mb * t * t / belt5 + 2.0 * w1 * w1 / r1_4;
    let e = mu * a2 / r2_5
        + mu / (r1_2 * r2_5) * oblate * y2
        + 3.0 * mb * (mu * mu * y2 / (r * r) - t * t) / belt5;
    let c = -a * (1.0 + e);
    let d = (n2 - fstar) * (n2 + 2.0 * fstar - 3.0 * mu * a2 / r2_5 + 3.0 * mb * t * t / belt5)
        + 9.0
            * mu
            * (1.0 - mu)
            * y2
            * (q1 / (r1_5 * r2_5)
                + 3.0 * mb / belt5 * (mu * q1 / r1_5 + (1.0 - mu) * oblate / r2_5))
        - 6.0 * mu * n * w1 * y / r1_4
            * (((x + mu) * (x + mu - 1.0) + y2) / r2_5 + 3.0 * mb * (x * (x + mu) + y2) / belt5);
    Ok(QuarticCoeffs {
        a,
        b,
        c,
        d,
        e: Some(e),
        fstar: Some(fstar),
        source: CoeffSource::Analytic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityClass {
    Stable,
    Marginal,
    Unstable,
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StabilityClass::Stable => "stable",
            StabilityClass::Marginal => "marginal",
            StabilityClass::Unstable => "unstable",
        })
    }
}

/// Class and largest real part of a root set.
pub fn classify(roots: &[Complex64]) -> (StabilityClass, f64) {
    let max_re = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let class = if max_re > MARGINAL_EPS {
        StabilityClass::Unstable
    } else if max_re < -MARGINAL_EPS {
        StabilityClass::Stable
    } else {
        StabilityClass::Marginal
    };
    (class, max_re)
}

/// Classical triangular-point quartic `l^4 + l^2 + 27/4 mu (1 - mu)`.
pub fn classical_triangular_quartic(mu: f64) -> [f64; 4] {
    [0.0, 1.0, 0.0, 6.75 * mu * (1.0 - mu)]
}

/// Critical mass ratio of the classical triangular points, located by
/// bisection on the marginal/unstable transition of their quartic.
pub fn routh_boundary(tol: f64) -> f64 {
    let unstable = |mu: f64| {
        classify(&solve_quartic(classical_triangular_quartic(mu))).0 == StabilityClass::Unstable
    };
    let (mut lo, mut hi) = (1e-6, 0.5);
    debug_assert!(!unstable(lo) && unstable(hi));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if unstable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub point: EquilibriumPoint,
    pub matrix: VariationalMatrix,
    pub roots: [Complex64; 4],
    pub max_re: f64,
    pub class: StabilityClass,
    pub coeffs_matrix: QuarticCoeffs,
    pub coeffs_analytic: QuarticCoeffs,
    pub coeff_discrepancy: f64,
}

pub fn stability_report(p: &ModelParams, eq: &EquilibriumPoint) -> Result<StabilityReport> {
    let matrix = linearize(p, eq)?;
    let coeffs_matrix = QuarticCoeffs::from_matrix(&matrix);
    let coeffs_analytic = analytic_coefficients(p, eq)?;
    let roots = coeffs_matrix.roots();
    let (class, max_re) = classify(&roots);
    Ok(StabilityReport {
        point: *eq,
        matrix,
        roots,
        max_re,
        class,
        coeffs_matrix,
        coeff_discrepancy: coeffs_matrix.max_abs_diff(&coeffs_analytic),
        coeffs_analytic,
    })
}
