//! Problem parameters and the planar force field in the rotating
//! barycentric frame.
//!
//! Units: total mass of the primaries, their separation and the inverse
//! mean motion of the unperturbed problem are all 1. The radiating primary
//! sits at `(-mu, 0)`, the oblate one at `(1 - mu, 0)`, and the belt is
//! centred on the origin.
//!
//! The effective potential carries the drag angle `-n W1 atan2(y, x + mu)`,
//! which makes it multivalued once `W1 > 0`. The principal branch in
//! `(-pi, pi]` is used, so the cut runs along `y = 0, x < -mu`; callers that
//! need a continuous field (contouring) must mask that ray.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Primary, Result};

/// No field evaluation is attempted closer than this to a primary.
pub const GUARD_RADIUS: f64 = 1e-9;

/// Dimensionless speed of light for the Sun-Earth system,
/// `c * (sidereal year / 2 pi) / AU`.
pub const SUN_EARTH_CD: f64 = 10_065.305_368_598_923;

/// Mass parameter of the Sun-Earth system.
pub const SUN_EARTH_MU: f64 = 3.00348e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelInputs {
    pub mu: f64,
    pub q1: f64,
    pub a2: f64,
    pub mb: f64,
    pub t: f64,
    pub cd: f64,
}

impl Default for ModelInputs {
    fn default() -> Self {
        ModelInputs {
            mu: 0.025,
            q1: 1.0,
            a2: 0.0,
            mb: 0.0,
            t: 0.01,
            cd: SUN_EARTH_CD,
        }
    }
}

impl ModelInputs {
    /// Classical restricted problem (no radiation, oblateness or belt).
    pub fn classical(mu: f64) -> Self {
        ModelInputs {
            mu,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check(field: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::Domain {
                    field,
                    value,
                    reason,
                })
            }
        }
        check(
            "mu",
            self.mu,
            self.mu > 0.0 && self.mu <= 0.5,
            "must lie in (0, 0.5]",
        )?;
        check(
            "q1",
            self.q1,
            (0.0..=1.0).contains(&self.q1),
            "must lie in [0, 1]",
        )?;
        check("a2", self.a2, self.a2 >= 0.0, "must be non-negative")?;
        check("mb", self.mb, self.mb >= 0.0, "must be non-negative")?;
        check("t", self.t, self.t >= 0.0, "must be non-negative")?;
        check("cd", self.cd, self.cd > 0.0, "must be positive")?;
        Ok(())
    }

    pub fn is_classical(&self) -> bool {
        self.q1 == 1.0 && self.a2 == 0.0 && self.mb == 0.0
    }
}

/// Grain properties in CGS units, reduced to the mass-reduction factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiationInputs {
    /// Particle radius in cm.
    pub radius: f64,
    /// Density in g/cm^3.
    pub density: f64,
    /// Radiation pressure efficiency.
    pub efficiency: f64,
}

impl RadiationInputs {
    pub fn q1(&self) -> Result<f64> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Domain {
                field: "radius",
                value: self.radius,
                reason: "must be positive",
            });
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(Error::Domain {
                field: "density",
                value: self.density,
                reason: "must be positive",
            });
        }
        if !(self.efficiency.is_finite() && self.efficiency >= 0.0) {
            return Err(Error::Domain {
                field: "efficiency",
                value: self.efficiency,
                reason: "must be non-negative",
            });
        }
        let q1 = 1.0 - 5.6e-5 * self.efficiency / (self.radius * self.density);
        if (0.0..=1.0).contains(&q1) {
            Ok(q1)
        } else {
            Err(Error::Domain {
                field: "q1",
                value: q1,
                reason: "radiation pressure exceeds gravity for this grain",
            })
        }
    }
}

/// Validated parameters together with the derived drag coefficient,
/// reference radius and mean motion. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    inputs: ModelInputs,
    w1: f64,
    rc: f64,
    n: f64,
}

pub fn derive_params(inputs: ModelInputs) -> Result<ModelParams> {
    inputs.validate()?;
    let ModelInputs {
        mu,
        q1,
        a2,
        mb,
        t,
        cd,
    } = inputs;
    let w1 = (1.0 - mu) * (1.0 - q1) / cd;
    let rc = ((1.0 - mu) * q1.powf(2.0 / 3.0) + mu * mu).sqrt();
    let n2 = 1.0 + 1.5 * a2 + 2.0 * mb * rc / (rc * rc + t * t).powf(1.5);
    Ok(ModelParams {
        inputs,
        w1,
        rc,
        n: n2.sqrt(),
    })
}

impl ModelParams {
    pub fn inputs(&self) -> &ModelInputs {
        &self.inputs
    }
    pub fn mu(&self) -> f64 {
        self.inputs.mu
    }
    pub fn q1(&self) -> f64 {
        self.inputs.q1
    }
    pub fn a2(&self) -> f64 {
        self.inputs.a2
    }
    pub fn mb(&self) -> f64 {
        self.inputs.mb
    }
    pub fn t(&self) -> f64 {
        self.inputs.t
    }
    pub fn cd(&self) -> f64 {
        self.inputs.cd
    }
    pub fn w1(&self) -> f64 {
        self.w1
    }
    pub fn rc(&self) -> f64 {
        self.rc
    }
    pub fn n(&self) -> f64 {
        self.n
    }
    pub fn n2(&self) -> f64 {
        self.n * self.n
    }

    /// Distances to the radiating and the oblate primary.
    pub fn distances(&self, x: f64, y: f64) -> (f64, f64) {
        let mu = self.mu();
        ((x + mu).hypot(y), (x + mu - 1.0).hypot(y))
    }

    fn guarded(&self, x: f64, y: f64) -> Result<Geometry> {
        let (r1, r2) = self.distances(x, y);
        if r1 < GUARD_RADIUS {
            return Err(Error::Singularity {
                primary: Primary::Larger,
                x,
                y,
            });
        }
        if r2 < GUARD_RADIUS {
            return Err(Error::Singularity {
                primary: Primary::Smaller,
                x,
                y,
            });
        }
        let rb2 = x * x + y * y + self.t() * self.t();
        if self.mb() > 0.0 && rb2.sqrt() < GUARD_RADIUS {
            return Err(Error::Singularity {
                primary: Primary::BeltCentre,
                x,
                y,
            });
        }
        Ok(Geometry { r1, r2, rb2 })
    }

    /// Polar angle about the radiating primary, principal branch.
    pub fn drag_angle(&self, x: f64, y: f64) -> f64 {
        y.atan2(x + self.mu())
    }
}

struct Geometry {
    r1: f64,
    r2: f64,
    /// r^2 + T^2 for the belt terms.
    rb2: f64,
}

/// Planar state in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl PhaseState {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64) -> Self {
        PhaseState { x, y, vx, vy }
    }

    pub fn at_rest(x: f64, y: f64) -> Self {
        PhaseState::new(x, y, 0.0, 0.0)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.vx, self.vy]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        PhaseState::new(a[0], a[1], a[2], a[3])
    }

    pub fn speed2(&self) -> f64 {
        self.vx * self.vx + self.vy * self.vy
    }
}

/// Effective potential, including the velocity-dependent drag term and the
/// drag angle.
pub fn effective_potential(p: &ModelParams, s: &PhaseState) -> Result<f64> {
    let g = p.guarded(s.x, s.y)?;
    let mu = p.mu();
    let radial = (s.x + mu) * s.vx + s.y * s.vy;
    let conservative = 0.5 * p.n2() * (s.x * s.x + s.y * s.y)
        + (1.0 - mu) * p.q1() / g.r1
        + mu / g.r2
        + mu * p.a2() / (2.0 * g.r2.powi(3))
        + p.mb() / g.rb2.sqrt();
    let drag = if p.w1() == 0.0 {
        0.0
    } else {
        p.w1() * (radial / (2.0 * g.r1 * g.r1) - p.n() * p.drag_angle(s.x, s.y))
    };
    Ok(conservative + drag)
}

/// Effective potential at zero velocity.
pub fn static_potential(p: &ModelParams, x: f64, y: f64) -> Result<f64> {
    effective_potential(p, &PhaseState::at_rest(x, y))
}

/// Force components at zero velocity; the equilibria are its zeros.
pub fn static_gradient(p: &ModelParams, x: f64, y: f64) -> Result<(f64, f64)> {
    let g = p.guarded(x, y)?;
    Ok(static_force(p, x, y, &g))
}

fn static_force(p: &ModelParams, x: f64, y: f64, g: &Geometry) -> (f64, f64) {
    let mu = p.mu();
    let n2 = p.n2();
    let r1_3 = g.r1.powi(3);
    let r2_3 = g.r2.powi(3);
    let r2_5 = r2_3 * g.r2 * g.r2;
    let belt = p.mb() / (g.rb2 * g.rb2.sqrt());
    let sun = (1.0 - mu) * p.q1() / r1_3;
    let planet = mu / r2_3 + 1.5 * mu * p.a2() / r2_5;
    let swirl = p.w1() * p.n() / (g.r1 * g.r1);
    let gx = n2 * x - sun * (x + mu) - planet * (x + mu - 1.0) - belt * x + swirl * y;
    let gy = n2 * y - sun * y - planet * y - belt * y - swirl * (x + mu);
    (gx, gy)
}

/// Full force components including the velocity-dependent drag brackets,
/// without the Coriolis terms.
pub fn force(p: &ModelParams, s: &PhaseState) -> Result<(f64, f64)> {
    let g = p.guarded(s.x, s.y)?;
    let (mut fx, mut fy) = static_force(p, s.x, s.y, &g);
    if p.w1() != 0.0 {
        let mu = p.mu();
        let r1_2 = g.r1 * g.r1;
        let radial = ((s.x + mu) * s.vx + s.y * s.vy) / r1_2;
        let k = p.w1() / r1_2;
        fx -= k * ((s.x + mu) * radial + s.vx);
        fy -= k * (s.y * radial + s.vy);
    }
    Ok((fx, fy))
}

/// First-order vector field `(vx, vy, ax, ay)`.
pub fn rhs(p: &ModelParams, s: &PhaseState) -> Result<[f64; 4]> {
    let (fx, fy) = force(p, s)?;
    let n = p.n();
    Ok([s.vx, s.vy, 2.0 * n * s.vy + fx, -2.0 * n * s.vx + fy])
}

/// `C = 2 Omega - vx^2 - vy^2`.
pub fn jacobi_constant(p: &ModelParams, s: &PhaseState) -> Result<f64> {
    Ok(2.0 * effective_potential(p, s)? - s.speed2())
}

/// Rate of change of the Jacobi function along the flow,
/// `W1 (3 |v|^2 + rho . a) / r1^2` with `rho` measured from the radiating
/// primary. Identically zero without drag.
pub fn jacobi_rate(p: &ModelParams, s: &PhaseState) -> Result<f64> {
    let d = rhs(p, s)?;
    if p.w1() == 0.0 {
        return Ok(0.0);
    }
    let (r1, _) = p.distances(s.x, s.y);
    let rho_a = (s.x + p.mu()) * d[2] + s.y * d[3];
    Ok(p.w1() * (3.0 * s.speed2() + rho_a) / (r1 * r1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn classical(mu: f64) -> ModelParams {
        derive_params(ModelInputs::classical(mu)).unwrap()
    }

    fn drag_case() -> ModelParams {
        derive_params(ModelInputs {
            mu: 0.025,
            q1: 0.5,
            a2: 0.02,
            mb: 0.2,
            t: 0.01,
            cd: 1e4,
        })
        .unwrap()
    }

    fn l4(mu: f64) -> (f64, f64) {
        (0.5 - mu, 3f64.sqrt() / 2.0)
    }

    #[test]
    fn classical_limit_has_unit_mean_motion_and_no_drag() {
        let p = derive_params(ModelInputs {
            cd: 1e4,
            ..ModelInputs::classical(0.025)
        })
        .unwrap();
        assert_eq!(p.n(), 1.0);
        assert_eq!(p.w1(), 0.0);
    }

    #[test]
    fn sun_earth_mass_parameter_is_accepted() {
        let p = derive_params(ModelInputs::classical(SUN_EARTH_MU)).unwrap();
        assert_eq!(p.mu(), 3.00348e-6);
    }

    #[test]
    fn mean_motion_with_oblateness_and_belt() {
        // Independent high-precision evaluation of n^2 with rc from its definition.
        let p = derive_params(ModelInputs {
            mu: 0.025,
            q1: 1.0,
            a2: 0.02,
            mb: 0.2,
            t: 0.01,
            cd: 1e4,
        })
        .unwrap();
        assert!((p.n2() - 1.439_930_566_395_307_5).abs() < 1e-13);
        let rc = p.rc();
        let residual = p.n2() - 1.0 - 1.5 * p.a2() - 2.0 * p.mb() * rc / (rc * rc + 1e-4).powf(1.5);
        assert!(residual.abs() < 1e-15);
    }

    #[test]
    fn reference_radius_for_sun_earth() {
        let p = derive_params(ModelInputs {
            q1: 0.9998,
            ..ModelInputs::classical(SUN_EARTH_MU)
        })
        .unwrap();
        assert_eq!(format!("{:.4}", p.rc()), "0.9999");
    }

    #[test]
    fn drag_vanishes_exactly_without_radiation() {
        for q1 in [0.0, 0.3, 0.999_999, 1.0] {
            let p = derive_params(ModelInputs {
                q1,
                ..Default::default()
            })
            .unwrap();
            assert_eq!(p.w1() == 0.0, q1 == 1.0);
        }
    }

    #[test]
    fn out_of_range_inputs_name_the_field() {
        let cases: [(ModelInputs, &str); 6] = [
            (
                ModelInputs {
                    mu: 0.7,
                    ..Default::default()
                },
                "mu",
            ),
            (
                ModelInputs {
                    mu: 0.0,
                    ..Default::default()
                },
                "mu",
            ),
            (
                ModelInputs {
                    q1: 1.2,
                    ..Default::default()
                },
                "q1",
            ),
            (
                ModelInputs {
                    a2: -0.1,
                    ..Default::default()
                },
                "a2",
            ),
            (
                ModelInputs {
                    t: f64::NAN,
                    ..Default::default()
                },
                "t",
            ),
            (
                ModelInputs {
                    cd: 0.0,
                    ..Default::default()
                },
                "cd",
            ),
        ];
        for (inputs, name) in cases {
            match derive_params(inputs) {
                Err(Error::Domain { field, .. }) => assert_eq!(field, name),
                other => panic!("expected domain error for {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn radiation_inputs_reduce_to_q1() {
        let r = RadiationInputs {
            radius: 1e-3,
            density: 2.0,
            efficiency: 1.0,
        };
        assert!((r.q1().unwrap() - (1.0 - 0.028)).abs() < 1e-15);
        let tiny = RadiationInputs { radius: 1e-6, ..r };
        assert!(matches!(tiny.q1(), Err(Error::Domain { field: "q1", .. })));
    }

    #[test]
    fn potential_is_mirror_symmetric_without_drag() {
        let p = derive_params(ModelInputs {
            a2: 0.02,
            mb: 0.3,
            ..Default::default()
        })
        .unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let s = PhaseState::new(
                rng.random_range(-1.5..1.5),
                rng.random_range(-1.5..1.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
            );
            let m = PhaseState { y: -s.y, ..s };
            let a = effective_potential(&p, &s).unwrap();
            let b = effective_potential(&p, &m).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, static_potential(&p, s.x, s.y).unwrap());
        }
    }

    #[test]
    fn classical_triangular_potential() {
        let mu = 0.025;
        let p = classical(mu);
        let (x, y) = l4(mu);
        let two_omega = 2.0 * static_potential(&p, x, y).unwrap();
        assert!((two_omega - (3.0 - mu + mu * mu)).abs() < 1e-14);
        let c = jacobi_constant(&p, &PhaseState::at_rest(x, y)).unwrap();
        assert!((c - 2.975625).abs() < 1e-14);
    }

    #[test]
    fn potential_matches_arbitrary_precision_value() {
        // 40-digit evaluation of the same expression term by term.
        let omega = static_potential(&drag_case(), 0.4, 0.6).unwrap();
        let reference = 1.407_710_833_684_582_5;
        assert!(((omega - reference) / reference).abs() < 1e-12);
    }

    #[test]
    fn classical_l4_is_a_critical_point() {
        let mu = 0.025;
        let (x, y) = l4(mu);
        let (gx, gy) = static_gradient(&classical(mu), x, y).unwrap();
        assert!(gx.abs() < 1e-14 && gy.abs() < 1e-14, "{gx} {gy}");
        let d = rhs(&classical(mu), &PhaseState::at_rest(x, y)).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn axis_is_invariant_without_drag() {
        let p = derive_params(ModelInputs {
            q1: 1.0,
            a2: 0.04,
            mb: 0.5,
            ..Default::default()
        })
        .unwrap();
        for x in [-1.4, -0.5, 0.0, 0.3, 0.9, 1.3] {
            let (_, gy) = static_gradient(&p, x, 0.0).unwrap();
            assert_eq!(gy, 0.0);
        }
    }

    #[test]
    fn static_gradient_matches_finite_differences() {
        let p = drag_case();
        let mut rng = StdRng::seed_from_u64(11);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 100 {
            let x: f64 = rng.random_range(-1.5..1.5);
            let y: f64 = rng.random_range(-1.5..1.5);
            let (r1, r2) = p.distances(x, y);
            // keep away from the primaries and the drag-angle cut
            if r1 < 0.1 || r2 < 0.1 || (x < -p.mu() && y.abs() < 0.05) {
                continue;
            }
            let f = |x: f64, y: f64| static_potential(&p, x, y).unwrap();
            let fx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
            let fy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
            let (gx, gy) = static_gradient(&p, x, y).unwrap();
            let scale = gx.abs().max(gy.abs()).max(1.0);
            assert!(
                (fx - gx).abs() / scale < 1e-6,
                "x at ({x},{y}): {fx} vs {gx}"
            );
            assert!(
                (fy - gy).abs() / scale < 1e-6,
                "y at ({x},{y}): {fy} vs {gy}"
            );
            checked += 1;
        }
    }

    #[test]
    fn drag_free_flow_is_reversible() {
        // f(S z) = -S f(z) with S(x, y, vx, vy) = (x, -y, -vx, vy).
        let p = derive_params(ModelInputs {
            a2: 0.02,
            mb: 0.2,
            ..Default::default()
        })
        .unwrap();
        let s = PhaseState::new(0.31, 0.52, 0.13, -0.07);
        let m = PhaseState::new(s.x, -s.y, -s.vx, s.vy);
        let f = rhs(&p, &s).unwrap();
        let g = rhs(&p, &m).unwrap();
        let expected = [-f[0], f[1], f[2], -f[3]];
        for (a, b) in g.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobi_rate_matches_derivative_along_flow() {
        let p = derive_params(ModelInputs {
            mu: 0.025,
            q1: 0.5,
            cd: 1e4,
            ..Default::default()
        })
        .unwrap();
        let s = PhaseState::new(0.4, 0.6, 0.1, 0.0);
        let f = rhs(&p, &s).unwrap();
        let h = 1e-5;
        let shifted = |k: f64| {
            let a = s.to_array();
            PhaseState::from_array([
                a[0] + k * h * f[0],
                a[1] + k * h * f[1],
                a[2] + k * h * f[2],
                a[3] + k * h * f[3],
            ])
        };
        let numeric = (jacobi_constant(&p, &shifted(1.0)).unwrap()
            - jacobi_constant(&p, &shifted(-1.0)).unwrap())
            / (2.0 * h);
        let analytic = jacobi_rate(&p, &s).unwrap();
        assert!(analytic.abs() > 1e-6);
        assert!((numeric - analytic).abs() < 1e-8, "{numeric} vs {analytic}");
    }

    #[test]
    fn velocity_lowers_jacobi_by_speed_squared() {
        let p = derive_params(ModelInputs {
            a2: 0.02,
            mb: 0.2,
            ..Default::default()
        })
        .unwrap();
        let rest = PhaseState::at_rest(0.2, 0.7);
        let moving = PhaseState::new(0.2, 0.7, 0.3, -0.4);
        let d = jacobi_constant(&p, &rest).unwrap() - jacobi_constant(&p, &moving).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn velocity_enters_only_through_coriolis_without_drag() {
        let p = derive_params(ModelInputs {
            a2: 0.02,
            mb: 0.2,
            ..Default::default()
        })
        .unwrap();
        let rest = rhs(&p, &PhaseState::at_rest(0.3, 0.4)).unwrap();
        let moving = rhs(&p, &PhaseState::new(0.3, 0.4, 0.2, -0.1)).unwrap();
        let n = p.n();
        assert!((moving[2] - rest[2] - 2.0 * n * -0.1).abs() < 1e-15);
        assert!((moving[3] - rest[3] + 2.0 * n * 0.2).abs() < 1e-15);
    }

    #[test]
    fn evaluations_at_a_primary_are_rejected() {
        let p = classical(0.025);
        assert!(matches!(
            static_gradient(&p, -0.025, 0.0),
            Err(Error::Singularity {
                primary: Primary::Larger,
                ..
            })
        ));
        assert!(matches!(
            rhs(&p, &PhaseState::at_rest(0.975, 0.0)),
            Err(Error::Singularity {
                primary: Primary::Smaller,
                ..
            })
        ));
        let belt = derive_params(ModelInputs {
            mb: 0.1,
            t: 0.0,
            ..Default::default()
        })
        .unwrap();
        assert!(matches!(
            static_potential(&belt, 0.0, 0.0),
            Err(Error::Singularity {
                primary: Primary::BeltCentre,
                ..
            })
        ));
    }

    #[test]
    fn default_speed_of_light_is_near_ten_thousand() {
        assert!((SUN_EARTH_CD / 1.0066e4 - 1.0).abs() < 1e-4);
    }
}
