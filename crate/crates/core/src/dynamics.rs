//! Trajectory integration with the Dormand-Prince 5(4) pair.
//!
//! Proportional-integral step control, the standard starting-step heuristic
//! and the free fourth-order continuous extension for output at a fixed
//! stride. The Jacobi function is recorded with every sample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Primary, Result};
use crate::exec::Exec;
use crate::model::{jacobi_constant, jacobi_rate, rhs, ModelParams, PhaseState, GUARD_RADIUS};

type State = [f64; 4];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: usize = 10_000_000;

fn axpy(y: &State, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += c * k[i];
        }
    }
    out
}

struct Step {
    y1: State,
    k7: State,
    err: State,
    k: [State; 6],
}

/// One Dormand-Prince step from `(t, y)` with first stage `k1`.
fn dopri_step<F>(f: &F, t: f64, y: &State, k1: &State, h: f64) -> Result<Step>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let k2 = f(t + C2 * h, &axpy(y, &[(h * A21, k1)]))?;
    let k3 = f(t + C3 * h, &axpy(y, &[(h * A31, k1), (h * A32, &k2)]))?;
    let k4 = f(
        t + C4 * h,
        &axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]),
    )?;
    let k5 = f(
        t + C5 * h,
        &axpy(
            y,
            &[
                (h * A51, k1),
                (h * A52, &k2),
                (h * A53, &k3),
                (h * A54, &k4),
            ],
        ),
    )?;
    let k6 = f(
        t + h,
        &axpy(
            y,
            &[
                (h * A61, k1),
                (h * A62, &k2),
                (h * A63, &k3),
                (h * A64, &k4),
                (h * A65, &k5),
            ],
        ),
    )?;
    let y1 = axpy(
        y,
        &[
            (h * A71, k1),
            (h * A73, &k3),
            (h * A74, &k4),
            (h * A75, &k5),
            (h * A76, &k6),
        ],
    );
    let k7 = f(t + h, &y1)?;
    let mut err = [0.0; 4];
    for i in 0..4 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok(Step {
        y1,
        k7,
        err,
        k: [*k1, k2, k3, k4, k5, k6],
    })
}

/// Fourth-order continuous extension over an accepted step.
struct Dense {
    t0: f64,
    h: f64,
    r: [State; 5],
}

impl Dense {
    fn new(t0: f64, h: f64, y0: &State, s: &Step) -> Self {
        let k = &s.k;
        let mut r = [[0.0; 4]; 5];
        for i in 0..4 {
            let diff = s.y1[i] - y0[i];
            let bspl = h * k[0][i] - diff;
            r[0][i] = y0[i];
            r[1][i] = diff;
            r[2][i] = bspl;
            r[3][i] = diff - h * s.k7[i] - bspl;
            r[4][i] = h
                * (D1 * k[0][i]
                    + D3 * k[2][i]
                    + D4 * k[3][i]
                    + D5 * k[4][i]
                    + D6 * k[5][i]
                    + D7 * s.k7[i]);
        }
        Dense { t0, h, r }
    }

    fn at(&self, t: f64) -> State {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        let mut y = [0.0; 4];
        for i in 0..4 {
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }
}

fn error_norm(err: &State, y0: &State, y1: &State, tol: f64) -> f64 {
    let sum: f64 = (0..4)
        .map(|i| {
            let sc = tol + tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / 4.0).sqrt()
}

/// Starting step from the size of the solution and its first two
/// derivatives.
fn initial_step<F>(
    f: &F,
    t0: f64,
    y0: &State,
    k1: &State,
    dir: f64,
    span: f64,
    tol: f64,
) -> Result<f64>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let sc = |i: usize| tol + tol * y0[i].abs();
    let rms = |v: &State| ((0..4).map(|i| (v[i] / sc(i)).powi(2)).sum::<f64>() / 4.0).sqrt();
    let dnf = rms(k1);
    let dny = rms(y0);
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * dny / dnf
    };
    h = h.min(span);
    let y1 = axpy(y0, &[(dir * h, k1)]);
    let k2 = f(t0 + dir * h, &y1)?;
    let diff: State = std::array::from_fn(|i| k2[i] - k1[i]);
    let der2 = rms(&diff) / h;
    let der12 = dnf.max(der2);
    let h1 = if der12 <= 1e-15 {
        (1e-6f64).max(h * 1e-3)
    } else {
        (0.01 / der12).powf(0.2)
    };
    Ok((100.0 * h).min(h1).min(span))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    /// Relative and absolute local error tolerance per step.
    pub tol: f64,
    /// Output spacing; `None` records every accepted step.
    pub stride: Option<f64>,
    /// Abort when closer than this to either primary.
    pub collision_radius: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tol: 1e-10,
            stride: None,
            collision_radius: GUARD_RADIUS,
        }
    }
}

impl IntegrateOptions {
    pub fn with_tol(tol: f64) -> Self {
        IntegrateOptions {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-3).contains(&self.tol) {
            return Err(Error::Invalid(format!(
                "tolerance {} outside [1e-14, 1e-3]",
                self.tol
            )));
        }
        if let Some(s) = self.stride {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Invalid(format!("stride must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: PhaseState,
    /// Jacobi function with the drag angle unwrapped from the initial state.
    pub jacobi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub tol: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub samples: Vec<Sample>,
    pub meta: IntegratorStats,
}

/// Raw output of the generic driver.
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 4]>,
    pub stats: IntegratorStats,
}

/// Adaptive integration of `y' = f(t, y)` from `t0` to `t_end` (either
/// direction). `check` runs on every accepted state and may abort.
pub fn solve<F, C>(
    f: F,
    check: C,
    t0: f64,
    y0: [f64; 4],
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Solution>
where
    F: Fn(f64, &State) -> Result<State>,
    C: Fn(f64, &State) -> Result<()>,
{
    opts.validate()?;
    let evals = std::cell::Cell::new(0usize);
    let f = |t: f64, y: &State| {
        evals.set(evals.get() + 1);
        f(t, y)
    };
    let tol = opts.tol;
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut times = vec![t0];
    let mut states = vec![y0];
    let mut stats = IntegratorStats {
        tol,
        ..Default::default()
    };
    if span == 0.0 {
        return Ok(Solution {
            times,
            states,
            stats,
        });
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h = initial_step(&f, t, &y, &k1, dir, span, tol)?;
    let mut fac_old = 1e-4f64;
    let mut next_out = opts.stride.map(|s| (1usize, s));
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= MAX_STEPS {
            return Err(Error::StepUnderflow { t, h });
        }
        let remaining = (t_end - t).abs();
        let finishing = h >= remaining;
        if finishing {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        let step = dopri_step(&f, t, &y, &k1, dir * h)?;
        let err = error_norm(&step.err, &y, &step.y1, tol);
        let fac11 = err.powf(0.2 - BETA * 0.75);
        if err <= 1.0 {
            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let h_new = h / fac;
            fac_old = err.max(1e-4);
            stats.accepted += 1;
            let t_new = if finishing { t_end } else { t + dir * h };
            check(t_new, &step.y1)?;
            match next_out.as_mut() {
                Some((k, stride)) => {
                    let dense = Dense::new(t, dir * h, &y, &step);
                    loop {
                        let t_out = t0 + dir * (*k as f64) * *stride;
                        if dir * (t_out - t_new) > 0.0 || (t_out - t0).abs() > span {
                            break;
                        }
                        let y_out = if t_out == t_new {
                            step.y1
                        } else {
                            dense.at(t_out)
                        };
                        times.push(t_out);
                        states.push(y_out);
                        *k += 1;
                    }
                    if finishing && *times.last().unwrap() != t_end {
                        times.push(t_end);
                        states.push(step.y1);
                    }
                }
                None => {
                    times.push(t_new);
                    states.push(step.y1);
                }
            }
            t = t_new;
            y = step.y1;
            k1 = step.k7;
            if finishing {
                break;
            }
            h = if last_rejected { h_new.min(h) } else { h_new };
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
    stats.evaluations = evals.get();
    Ok(Solution {
        times,
        states,
        stats,
    })
}

/// Fixed-step Dormand-Prince propagation (fifth-order solution), used for
/// convergence-order checks.
pub fn fixed_step<F>(f: F, t0: f64, y0: [f64; 4], h: f64, steps: usize) -> Result<[f64; 4]>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    for _ in 0..steps {
        let s = dopri_step(&f, t, &y, &k1, h)?;
        y = s.y1;
        k1 = s.k7;
        t += h;
    }
    Ok(y)
}

pub fn integrate(p: &ModelParams, init: PhaseState, t_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_with(p, init, t_end, &IntegrateOptions::with_tol(tol))
}

/// Integrates from `t = 0` to `t_end` (negative for backward runs).
pub fn integrate_with(
    p: &ModelParams,
    init: PhaseState,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let last = std::cell::Cell::new((0.0, init.to_array()));
    let nearest = |y: &State| {
        let (r1, r2) = p.distances(y[0], y[1]);
        if r1 < r2 {
            (Primary::Larger, r1)
        } else {
            (Primary::Smaller, r2)
        }
    };
    let collision = |t: f64, state: State| {
        let (primary, _) = nearest(&state);
        Error::Collision { primary, t, state }
    };
    let (_, d0) = nearest(&init.to_array());
    if d0 < opts.collision_radius {
        return Err(collision(0.0, init.to_array()));
    }
    let f = |_t: f64, y: &State| {
        rhs(p, &PhaseState::from_array(*y)).map_err(|e| match e {
            Error::Singularity { .. } => {
                let (t, s) = last.get();
                collision(t, s)
            }
            other => other,
        })
    };
    let check = |t: f64, y: &State| {
        let (_, d) = nearest(y);
        if d < opts.collision_radius {
            return Err(collision(t, *y));
        }
        last.set((t, *y));
        Ok(())
    };
    let sol = solve(f, check, 0.0, init.to_array(), t_end, opts)?;
    // The drag term carries the polar angle about the larger primary; unwrap
    // it so C stays continuous when the orbit crosses the branch cut.
    let mut turns = 0.0;
    let mut prev_angle = p.drag_angle(init.x, init.y);
    let wrap = 4.0 * std::f64::consts::PI * p.w1() * p.n();
    let mut samples = Vec::with_capacity(sol.times.len());
    for (&t, &y) in sol.times.iter().zip(&sol.states) {
        let state = PhaseState::from_array(y);
        let angle = p.drag_angle(state.x, state.y);
        let jump = angle - prev_angle;
        if jump > std::f64::consts::PI {
            turns -= 1.0;
        } else if jump < -std::f64::consts::PI {
            turns += 1.0;
        }
        prev_angle = angle;
        samples.push(Sample {
            t,
            state,
            jacobi: jacobi_constant(p, &state)? - wrap * turns,
        });
    }
    Ok(Trajectory {
        params: *p,
        samples,
        meta: sol.stats,
    })
}

/// Independent integrations over a set of initial conditions.
pub fn integrate_batch(
    p: &ModelParams,
    inits: &[PhaseState],
    t_end: f64,
    opts: &IntegrateOptions,
    exec: Exec,
) -> Vec<Result<Trajectory>> {
    exec.map(inits, |init| integrate_with(p, *init, t_end, opts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// `max |C(t) - C(0)|` over the samples.
    pub max_delta_c: f64,
    /// Largest gap between the sampled and the analytic `dC/dt`.
    pub rate_residual: f64,
}

pub fn drift_report(traj: &Trajectory) -> Result<DriftReport> {
    let s = &traj.samples;
    if s.len() < 2 {
        return Err(Error::Invalid(
            "drift report needs at least two samples".into(),
        ));
    }
    let p = &traj.params;
    let c0 = s[0].jacobi;
    let max_delta_c = s.iter().map(|x| (x.jacobi - c0).abs()).fold(0.0, f64::max);
    let rate = |x: &Sample| jacobi_rate(p, &x.state);
    let mut rate_residual = 0.0f64;
    if s.len() == 2 {
        let numeric = (s[1].jacobi - s[0].jacobi) / (s[1].t - s[0].t);
        let analytic = 0.5 * (rate(&s[0])? + rate(&s[1])?);
        rate_residual = (numeric - analytic).abs();
    } else {
        for w in s.windows(3) {
            let (h1, h2) = (w[1].t - w[0].t, w[2].t - w[1].t);
            if h1 == 0.0 || h2 == 0.0 {
                continue;
            }
            let numeric = -h2 / (h1 * (h1 + h2)) * w[0].jacobi
                + (h2 - h1) / (h1 * h2) * w[1].jacobi
                + h1 / (h2 * (h1 + h2)) * w[2].jacobi;
            rate_residual = rate_residual.max((numeric - rate(&w[1])?).abs());
        }
    }
    Ok(DriftReport {
        max_delta_c,
        rate_residual,
    })
}

pub fn to_csv(traj: &Trajectory) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "x", "y", "vx", "vy", "C"])
        .expect("in-memory write");
    for s in &traj.samples {
        let st = s.state;
        w.write_record([s.t, st.x, st.y, st.vx, st.vy, s.jacobi].map(|v| v.to_string()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
