//! Roots of the real monic quartic `z^4 + a z^3 + b z^2 + c z + d`.
//!
//! Ferrari's method: depress, pick the largest real root of the resolvent
//! cubic, split into two quadratics. Every root is then polished with Newton
//! steps on the original polynomial. When a root is still poor after
//! polishing (clustered or nearly multiple roots), the whole set is refined
//! simultaneously with Aberth-Ehrlich iterations started from the Ferrari
//! roots, and the better of the two sets is kept.

use num_complex::Complex64;

/// Scaled residual above which the simultaneous refinement is attempted.
const POLISH_TOL: f64 = 1e-13;

pub fn solve_quartic(coeffs: [f64; 4]) -> [Complex64; 4] {
    let polished = |mut roots: [Complex64; 4]| {
        for z in roots.iter_mut() {
            *z = newton_polish(coeffs, *z);
        }
        (set_error(coeffs, &roots), roots)
    };
    let (mut worst, mut roots) = ferrari_candidates(coeffs)
        .into_iter()
        .map(polished)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one candidate");
    if worst > POLISH_TOL {
        // real starting values keep a real iteration on the real axis, so
        // also start from a tilted copy and from a circle
        let tilt = Complex64::from_polar(1.0, 0.3);
        let radius = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let circle = std::array::from_fn(|k| {
            Complex64::from_polar(0.5 * radius, 0.4 + k as f64 * std::f64::consts::FRAC_PI_2)
        });
        for start in [roots, roots.map(|z| z * tilt + 1e-3 * tilt), circle] {
            let alt = aberth(coeffs, start);
            let r = set_error(coeffs, &alt);
            if r < worst {
                worst = r;
                roots = alt;
            }
        }
    }
    canonical_order(roots)
}

pub fn eval(coeffs: [f64; 4], z: Complex64) -> Complex64 {
    let [a, b, c, d] = coeffs;
    (((z + a) * z + b) * z + c) * z + d
}

fn eval_with_derivative(coeffs: [f64; 4], z: Complex64) -> (Complex64, Complex64) {
    let [a, b, c, d] = coeffs;
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for k in [a, b, c, d] {
        dp = dp * z + p;
        p = p * z + k;
    }
    (p, dp)
}

/// `|p(z)|` relative to the sum of the magnitudes of its terms.
pub fn scaled_residual(coeffs: [f64; 4], z: Complex64) -> f64 {
    let [a, b, c, d] = coeffs;
    let r = z.norm();
    let scale = r.powi(4) + a.abs() * r.powi(3) + b.abs() * r * r + c.abs() * r + d.abs();
    if scale == 0.0 {
        0.0
    } else {
        eval(coeffs, z).norm() / scale
    }
}

/// Root residuals alone cannot tell when two roots collapsed onto one, so
/// the elementary symmetric functions of the set are compared with the
/// coefficients as well, each relative to the size of its terms.
fn set_error(coeffs: [f64; 4], roots: &[Complex64; 4]) -> f64 {
    let z = roots;
    let n: [f64; 4] = z.map(|v| v.norm());
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let triples = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];
    let e1: Complex64 = z.iter().sum();
    let e2: Complex64 = pairs.iter().map(|&(i, j)| z[i] * z[j]).sum();
    let e3: Complex64 = triples.iter().map(|&(i, j, k)| z[i] * z[j] * z[k]).sum();
    let e4: Complex64 = z.iter().product();
    let s1: f64 = n.iter().sum();
    let s2: f64 = pairs.iter().map(|&(i, j)| n[i] * n[j]).sum();
    let s3: f64 = triples.iter().map(|&(i, j, k)| n[i] * n[j] * n[k]).sum();
    let s4: f64 = n.iter().product();
    let [a, b, c, d] = coeffs;
    let rel = |got: Complex64, want: f64, scale: f64| {
        (got - want).norm() / (scale + want.abs()).max(f64::MIN_POSITIVE)
    };
    let vieta = rel(e1, -a, s1)
        .max(rel(e2, b, s2))
        .max(rel(e3, -c, s3))
        .max(rel(e4, d, s4));
    vieta.max(max_scaled_residual(coeffs, roots))
}

fn max_scaled_residual(coeffs: [f64; 4], roots: &[Complex64; 4]) -> f64 {
    roots
        .iter()
        .map(|&z| scaled_residual(coeffs, z))
        .fold(0.0, f64::max)
}

/// Ferrari splittings of the quartic. When the chosen resolvent root
/// makes `2m - p` small (nearly biquadratic input) `q / 2s` loses all
/// accuracy, so the equivalent `sign(q) sqrt(m^2 - r)` and the plain
/// biquadratic split are offered as well; the caller keeps the best set.
fn ferrari_candidates(coeffs: [f64; 4]) -> Vec<[Complex64; 4]> {
    let [a, b, c, d] = coeffs;
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

    let mut out = vec![biquadratic(p, r)];
    if q != 0.0 {
        // resolvent: m^3 - (p/2) m^2 - r m + (p r / 2 - q^2 / 8) = 0
        let m = largest_real_cubic_root(-p / 2.0, -r, p * r / 2.0 - q * q / 8.0);
        let s2 = 2.0 * m - p;
        if s2 > 0.0 {
            let s = s2.sqrt();
            let split = |t: f64| {
                let [y0, y1] = quadratic(s, m - t);
                let [y2, y3] = quadratic(-s, m + t);
                [y0, y1, y2, y3]
            };
            out.push(split(q / (2.0 * s)));
            let m2r = m * m - r;
            if m2r >= 0.0 {
                out.push(split(q.signum() * m2r.sqrt()));
            }
        }
    }
    out.into_iter().map(|ys| ys.map(|y| y - shift)).collect()
}

/// `y^4 + p y^2 + r` via `w = y^2`.
fn biquadratic(p: f64, r: f64) -> [Complex64; 4] {
    let [w0, w1] = quadratic(p, r);
    let (s0, s1) = (w0.sqrt(), w1.sqrt());
    [s0, -s0, s1, -s1]
}

/// Roots of `z^2 + b z + c` for real `b`, `c`.
fn quadratic(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // avoid cancellation
        let t = -0.5 * (b + b.signum() * sq);
        if t == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(t, 0.0), Complex64::new(c / t, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im)]
    }
}

/// Largest real root of `m^3 + a m^2 + b m + c`.
fn largest_real_cubic_root(a: f64, b: f64, c: f64) -> f64 {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let t = if disc <= 0.0 && p < 0.0 {
        let rho = (-p / 3.0).sqrt();
        let cos_phi = (-q / (2.0 * rho.powi(3))).clamp(-1.0, 1.0);
        2.0 * rho * (cos_phi.acos() / 3.0).cos()
    } else {
        let sq = disc.max(0.0).sqrt();
        let u = (-q / 2.0 + if q > 0.0 { -sq } else { sq }).cbrt();
        if u == 0.0 {
            0.0
        } else {
            u - p / (3.0 * u)
        }
    };
    let mut m = t - shift;
    for _ in 0..4 {
        let f = ((m + a) * m + b) * m + c;
        let df = (3.0 * m + 2.0 * a) * m + b;
        if df == 0.0 {
            break;
        }
        let next = m - f / df;
        let f_next = ((next + a) * next + b) * next + c;
        if f_next.abs() < f.abs() {
            m = next;
        } else {
            break;
        }
    }
    m
}

fn newton_polish(coeffs: [f64; 4], mut z: Complex64) -> Complex64 {
    let (mut pz, _) = eval_with_derivative(coeffs, z);
    for _ in 0..8 {
        let (_, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 || pz.norm() == 0.0 {
            break;
        }
        let next = z - pz / dp;
        let (pn, _) = eval_with_derivative(coeffs, next);
        if pn.norm() < pz.norm() {
            z = next;
            pz = pn;
        } else {
            break;
        }
    }
    z
}

fn aberth(coeffs: [f64; 4], start: [Complex64; 4]) -> [Complex64; 4] {
    let mut z = start;
    // separate coincident starting values
    for i in 0..4 {
        for j in 0..i {
            if (z[i] - z[j]).norm() < 1e-12 * (1.0 + z[i].norm()) {
                z[i] += Complex64::new(1e-7, 1e-7 * (i as f64 + 1.0));
            }
        }
    }
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..4 {
            let (p, dp) = eval_with_derivative(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..4 {
                if j != i {
                    sum += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

/// Conjugate pairs get exactly opposite imaginary parts and a common real
/// part, then roots are sorted by (Re, Im).
pub fn canonical_order(mut roots: [Complex64; 4]) -> [Complex64; 4] {
    let mut used = [false; 4];
    for i in 0..4 {
        if used[i] || roots[i].im <= 0.0 {
            continue;
        }
        let partner = (0..4)
            .filter(|&j| j != i && !used[j] && roots[j].im < 0.0)
            .min_by(|&j, &k| {
                (roots[j] - roots[i].conj())
                    .norm()
                    .total_cmp(&(roots[k] - roots[i].conj()).norm())
            });
        if let Some(j) = partner {
            let tol = 1e-6 * (1.0 + roots[i].norm());
            if (roots[j] - roots[i].conj()).norm() < tol {
                let re = 0.5 * (roots[i].re + roots[j].re);
                let im = 0.5 * (roots[i].im - roots[j].im);
                roots[i] = Complex64::new(re, im);
                roots[j] = Complex64::new(re, -im);
                used[i] = true;
                used[j] = true;
            }
        }
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    roots
}
