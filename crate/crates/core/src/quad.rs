//! Quadrature: adaptive Gauss–Kronrod, log-scale substitution for radial
//! integrals, and a panel-adaptive Filon rule for Fourier-type integrals.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{LevyError, Result};

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for the adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of subintervals kept by the adaptive driver.
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-8,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    /// Purely relative tolerance, for integrands whose scale is unknown
    /// (deep tails, exponentially small convolutions).
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            abs: 1e-300,
            rel,
            max_intervals: 4000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).abs())
}

#[derive(PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) on a finite interval.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut err = e;
    while err > tol.target(total) {
        if heap.len() >= tol.max_intervals {
            break;
        }
        let seg = heap.pop().expect("heap is never empty here");
        let m = 0.5 * (seg.a + seg.b);
        if !(m > seg.a && m < seg.b) {
            // interval at machine resolution; keep it and stop refining
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&f, seg.a, m);
        let (v2, e2) = gk15(&f, m, seg.b);
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: m,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // re-sum to shed accumulated rounding from the running totals
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    if !value.is_finite() {
        return Err(LevyError::Quadrature {
            a,
            b,
            estimate: value,
            error,
        });
    }
    if error > 10.0 * tol.target(value) {
        return Err(LevyError::Quadrature {
            a,
            b,
            estimate: value,
            error,
        });
    }
    Ok(Estimate { value, error })
}

/// `∫_a^b f(s) ds` for `0 <= a < b <= ∞` through the substitution `s = e^u`.
///
/// Suited to radial integrands with power-type behaviour at 0 and at
/// infinity. Infinite ends in `u` are mapped onto a finite interval.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    log_substituted(&f, a, b, tol)
}

fn log_substituted(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if !(a >= 0.0 && b > a) {
        return Err(LevyError::Domain(format!(
            "integrate_log needs 0 <= a < b, got [{a}, {b}]"
        )));
    }
    let g = |u: f64| {
        let s = u.exp();
        if s == 0.0 || !s.is_finite() {
            0.0
        } else {
            f(s) * s
        }
    };
    match (a == 0.0, b.is_infinite()) {
        (false, false) => gauss_kronrod(g, a.ln(), b.ln(), tol),
        (true, false) => {
            // u = ln b - v/(1-v), v in [0,1)
            let ub = b.ln();
            gauss_kronrod(
                |v: f64| {
                    let w = 1.0 - v;
                    g(ub - v / w) / (w * w)
                },
                0.0,
                1.0,
                tol,
            )
        }
        (false, true) => {
            let ua = a.ln();
            gauss_kronrod(
                |v: f64| {
                    let w = 1.0 - v;
                    g(ua + v / w) / (w * w)
                },
                0.0,
                1.0,
                tol,
            )
        }
        (true, true) => {
            let left = log_substituted(f, 0.0, 1.0, tol)?;
            let right = log_substituted(f, 1.0, f64::INFINITY, tol)?;
            Ok(Estimate {
                value: left.value + right.value,
                error: left.error + right.error,
            })
        }
    }
}

/// [`integrate_log`] over consecutive pieces `[p_i, p_{i+1}]`, where
/// `points` is increasing and may start at 0 and end at infinity.
pub fn integrate_log_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let e = integrate_log(&f, w[0], w[1], tol)?;
            value += e.value;
            error += e.error;
        }
    }
    Ok(Estimate { value, error })
}

/// Sorted, deduplicated breakpoints strictly inside `(a, b)` plus the ends.
pub fn pieces(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    pts
}

// ---------------------------------------------------------------------------
// Fourier-type integrals

const FILON_NODES: usize = 10;
const FILON_MIN_THETA: f64 = 12.0;

/// Monomial moments `∫_{-1}^{1} x^k e^{iθx} dx`, k < n, by forward
/// recurrence (stable for θ larger than n).
fn monomial_moments(theta: f64, n: usize) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let e_pos = Complex64::from_polar(1.0, theta);
    let e_neg = e_pos.conj();
    let itheta = i * theta;
    let mut mu = Vec::with_capacity(n);
    mu.push(Complex64::new(2.0 * theta.sin() / theta, 0.0));
    for k in 1..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let boundary = (e_pos - sign * e_neg) / itheta;
        let prev = mu[k - 1];
        mu.push(boundary - (k as f64) * prev / itheta);
    }
    mu
}

/// Monomial coefficients of `T_k`, k < n.
fn chebyshev_monomials(n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n]; n];
    t[0][0] = 1.0;
    if n > 1 {
        t[1][1] = 1.0;
    }
    for k in 2..n {
        for m in 0..n {
            let mut v = -t[k - 2][m];
            if m > 0 {
                v += 2.0 * t[k - 1][m - 1];
            }
            t[k][m] = v;
        }
    }
    t
}

/// Filon–Chebyshev approximation of `∫_p^q w(s) e^{iωs} ds` and the
/// panel's `∫|w|` (for tolerance scaling).
fn filon_panel<F: Fn(f64) -> f64>(w: &F, p: f64, q: f64, omega: f64) -> (Complex64, f64) {
    let n = FILON_NODES;
    let c = 0.5 * (p + q);
    let hw = 0.5 * (q - p);
    let theta = omega * hw;
    let vals: Vec<f64> = (0..n)
        .map(|j| {
            let x = (PI * (j as f64 + 0.5) / n as f64).cos();
            w(c + hw * x)
        })
        .collect();
    // Chebyshev coefficients
    let mut cheb = vec![0.0; n];
    for (k, ck) in cheb.iter_mut().enumerate() {
        let s: f64 = vals
            .iter()
            .enumerate()
            .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
            .sum();
        *ck = 2.0 * s / n as f64;
    }
    cheb[0] *= 0.5;
    let tm = chebyshev_monomials(n);
    let mut mono = vec![0.0; n];
    for k in 0..n {
        for m in 0..n {
            mono[m] += cheb[k] * tm[k][m];
        }
    }
    let mu = monomial_moments(theta, n);
    let inner: Complex64 = mono.iter().zip(&mu).map(|(a, m)| m * *a).sum();
    let phase = Complex64::from_polar(1.0, omega * c);
    let abs_mass = hw * PI / n as f64
        * vals
            .iter()
            .enumerate()
            .map(|(j, v)| v.abs() * (PI * (j as f64 + 0.5) / n as f64).sin())
            .sum::<f64>();
    (phase * inner * hw, abs_mass)
}

fn gk_fourier<F: Fn(f64) -> f64>(
    w: &F,
    p: f64,
    q: f64,
    omega: f64,
    tol: Tolerance,
) -> Result<Complex64> {
    let re = gauss_kronrod(|s| w(s) * (omega * s).cos(), p, q, tol)?;
    let im = if omega == 0.0 {
        0.0
    } else {
        gauss_kronrod(|s| w(s) * (omega * s).sin(), p, q, tol)?.value
    };
    Ok(Complex64::new(re.value, im))
}

fn fourier_adaptive<F: Fn(f64) -> f64>(
    w: &F,
    p: f64,
    q: f64,
    omega: f64,
    tol: Tolerance,
    depth: usize,
) -> Result<Complex64> {
    let theta = omega * 0.5 * (q - p);
    if theta < FILON_MIN_THETA {
        return gk_fourier(w, p, q, omega, tol);
    }
    let m = 0.5 * (p + q);
    let (whole, mass) = filon_panel(w, p, q, omega);
    let halves = if theta * 0.5 < FILON_MIN_THETA {
        gk_fourier(w, p, m, omega, tol)? + gk_fourier(w, m, q, omega, tol)?
    } else {
        filon_panel(w, p, m, omega).0 + filon_panel(w, m, q, omega).0
    };
    let target = tol.abs.max(tol.rel * mass);
    if (whole - halves).norm() <= target || depth == 0 {
        return Ok(halves);
    }
    let sub = Tolerance {
        abs: 0.5 * tol.abs,
        ..tol
    };
    Ok(fourier_adaptive(w, p, m, omega, sub, depth - 1)?
        + fourier_adaptive(w, m, q, omega, sub, depth - 1)?)
}

/// `∫_a^b w(s) e^{iωs} ds` with `0 < a < b <= ∞`.
///
/// Panels are graded geometrically (ratio 2) from `a`, split at `breaks`,
/// and refined adaptively. For `b = ∞`, `w` must be eventually monotone
/// and decaying; the tail beyond S is bounded by `2|w(S)|/ω`.
pub fn fourier_integral<F: Fn(f64) -> f64>(
    w: F,
    a: f64,
    b: f64,
    omega: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Complex64> {
    if !(a > 0.0 && b > a) {
        return Err(LevyError::Domain(format!(
            "fourier_integral needs 0 < a < b, got [{a}, {b}]"
        )));
    }
    if omega == 0.0 {
        let e = integrate_log(&w, a, b, tol)?;
        return Ok(Complex64::new(e.value, 0.0));
    }
    let mut sorted: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    sorted.sort_by(f64::total_cmp);
    let mut next_break = sorted.into_iter().peekable();
    let mut total = Complex64::new(0.0, 0.0);
    let mut abs_scale = 0.0;
    let mut p = a;
    let max_panels = 4000;
    for _ in 0..max_panels {
        let mut q = (2.0 * p).min(b);
        if let Some(&br) = next_break.peek() {
            if br <= q {
                q = br;
                next_break.next();
            }
        }
        let panel_tol = Tolerance {
            abs: tol.abs.max(tol.rel * abs_scale) * 0.1,
            ..tol
        };
        let v = fourier_adaptive(&w, p, q, omega, panel_tol, 40)?;
        total += v;
        abs_scale += v.norm();
        p = q;
        if p >= b {
            return Ok(total);
        }
        if b.is_infinite() && next_break.peek().is_none() {
            let wq = w(q).abs();
            if 2.0 * wq / omega <= tol.abs.max(tol.rel * total.norm()) * 0.1 || wq == 0.0 {
                return Ok(total);
            }
        }
    }
    Err(LevyError::Quadrature {
        a,
        b: p,
        estimate: total.re,
        error: f64::NAN,
    })
}

/// `∫_0^b w(s) (1 - cos ωs) ds` for radial weights with a non-integrable
/// singularity of order at most 3 at the origin.
///
/// `second_moment_below(ε)` must return `∫_0^ε s² w(s) ds`; it covers the
/// innermost piece where `1 - cos ωs = ω²s²/2` to machine precision. The
/// rest is split at `a = 1/ω`: below `a` the integrand is evaluated as
/// `2 w(s) sin²(ωs/2)`, above it as `∫w - ∫w cos`.
pub fn one_minus_cos_transform<F: Fn(f64) -> f64>(
    w: F,
    omega: f64,
    support_end: f64,
    breaks: &[f64],
    second_moment_below: &dyn Fn(f64) -> f64,
    tol: Tolerance,
) -> Result<f64> {
    if omega == 0.0 {
        return Ok(0.0);
    }
    let omega = omega.abs();
    let split = (1.0 / omega).min(support_end);
    let eps = split * 1e-6;
    let inner = 0.5 * omega * omega * second_moment_below(eps);
    let near_pts = pieces(eps, split, breaks);
    let near = integrate_log_pieces(
        |s| {
            let h = (0.5 * omega * s).sin();
            2.0 * w(s) * h * h
        },
        &near_pts,
        tol,
    )?;
    if split >= support_end {
        return Ok(inner + near.value);
    }
    let far_pts = pieces(split, support_end, breaks);
    let mass = integrate_log_pieces(&w, &far_pts, tol)?;
    let osc = fourier_integral(&w, split, support_end, omega, breaks, tol)?;
    Ok(inner + near.value + mass.value - osc.re)
}
