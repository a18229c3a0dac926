//! Convolution conditions on the profile, the truncated large-jump measure
//! on a grid, its convolution powers and the compound-Poisson series.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{LevyError, Result};
use crate::exponent::ExponentTable;
use crate::grid::{log_space, Grid1};
use crate::profiles::{sphere_area, LevyModel, Profile};
use crate::quad::{gauss_kronrod, integrate_log, pieces, Tolerance};
use crate::spectral::LinearConv;
use crate::verdict::{ConditionReport, GrowthRule, RatioPoint, Toward, Verdict};

/// Which clause of the tempering classification holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FCase {
    /// `m = 0`, `δ > d`.
    A,
    /// `m > 0`, `β < 1`.
    B,
    /// `m > 0`, `β = 1`, `δ > (d+1)/2`.
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FFailure {
    /// `β > 1`.
    Superexponential,
    /// `β = 1`, `δ ≤ (d+1)/2`.
    CriticalExp,
    /// `m = 0`, `δ ≤ d`.
    HeavyTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FClass {
    Holds(FCase),
    Fails(FFailure),
}

impl FClass {
    pub fn verdict(self) -> Verdict {
        match self {
            FClass::Holds(_) => Verdict::Pass,
            FClass::Fails(_) => Verdict::Fail,
        }
    }

    pub fn label(self) -> String {
        match self {
            FClass::Holds(c) => format!("HOLDS({})", format!("{c:?}").to_lowercase()),
            FClass::Fails(FFailure::Superexponential) => "FAILS(SUPEREXPONENTIAL)".into(),
            FClass::Fails(FFailure::CriticalExp) => "FAILS(CRITICAL_EXP)".into(),
            FClass::Fails(FFailure::HeavyTail) => "FAILS(HEAVY_TAIL)".into(),
        }
    }

    pub fn report(self) -> ConditionReport {
        let mut r = ConditionReport::new("F", self.verdict(), Vec::new());
        r.reason = Some(self.label());
        r.rule = "closed-form classification of the tail parameters".into();
        r
    }
}

/// Classification of the tempered tail `c e^{-m s^β} s^{-δ}` with respect to
/// the convolution condition on `ℝ^d`.
pub fn classify_f(d: usize, m: f64, beta: f64, delta: f64) -> Result<FClass> {
    if d == 0 {
        return Err(LevyError::param("d", "dimension must be >= 1"));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(LevyError::param("m", format!("must be >= 0, got {m}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(LevyError::param("beta", format!("must be > 0, got {beta}")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(LevyError::param("delta", format!("must be >= 0, got {delta}")));
    }
    let d = d as f64;
    Ok(if m == 0.0 {
        if delta > d {
            FClass::Holds(FCase::A)
        } else {
            FClass::Fails(FFailure::HeavyTail)
        }
    } else if beta < 1.0 {
        FClass::Holds(FCase::B)
    } else if beta > 1.0 {
        FClass::Fails(FFailure::Superexponential)
    } else if delta > (d + 1.0) / 2.0 {
        FClass::Holds(FCase::C)
    } else {
        FClass::Fails(FFailure::CriticalExp)
    })
}

const LN_FLOOR: f64 = -644.7; // ln(1e-280)
const TOL: Tolerance = Tolerance {
    abs: 1e-300,
    rel: 1e-8,
    max_intervals: 4000,
};

fn integrate_pieces(k: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> Result<f64> {
    let pts = pieces(a, b, breaks);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate_log(k, w[0], w[1], TOL)?.value;
    }
    Ok(total)
}

/// `∫_{|y|>a, |x-y|>b} f(|y|) f(|x-y|) dy / f(|x|)` for `|x| = x ≥ a + b`.
pub fn pair_ratio(f: &Profile, x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && x >= a + b) {
        return Err(LevyError::Domain(format!("pair integral needs |x| >= a + b > 0, got x={x}, a={a}, b={b}")));
    }
    let lfx = f.ln_value(x);
    let mut brk = f.breakpoints();
    if f.dim() == 1 {
        let pair = |s: f64, u: f64| (f.ln_value(s) + f.ln_value(u) - lfx).exp();
        let mut bm = brk.clone();
        bm.extend(brk.iter().map(|&p| x - p));
        bm.push(0.5 * x);
        // y = -s and y = x + s
        let outer = integrate_pieces(&|s| pair(s, x + s), a, f64::INFINITY, &brk)?
            + integrate_pieces(&|s| pair(s, x + s), b, f64::INFINITY, &brk)?;
        let middle = if x - b > a {
            integrate_pieces(&|s| pair(s, x - s), a, x - b, &bm)?
        } else {
            0.0
        };
        return Ok(outer + middle);
    }
    // (s, θ) reduction: ω_{d-2} ∫ s^{d-1} f(s) ∫_0^π sin^{d-2}θ f(|x-y|) dθ ds
    let d = f.dim();
    let inner = |s: f64| -> f64 {
        let lfs = f.ln_value(s);
        let dist = |c: f64| (s * s + x * x - 2.0 * s * x * c).max(0.0).sqrt();
        let cut = (s * s + x * x - b * b) / (2.0 * s * x);
        if cut <= -1.0 {
            return 0.0;
        }
        let th0 = if cut >= 1.0 { 0.0 } else { cut.acos() };
        let mut ths = vec![th0, PI];
        for &p in &f.breakpoints() {
            let c = (s * s + x * x - p * p) / (2.0 * s * x);
            if c > -1.0 && c < 1.0 {
                let th = c.acos();
                if th > th0 && th < PI {
                    ths.push(th);
                }
            }
        }
        ths.sort_by(f64::total_cmp);
        let g = |th: f64| th.sin().powi(d as i32 - 2) * (lfs + f.ln_value(dist(th.cos())) - lfx).exp();
        let mut acc = 0.0;
        for w in ths.windows(2) {
            if w[1] > w[0] {
                acc += gauss_kronrod(g, w[0], w[1], Tolerance::relative(1e-9)).map(|e| e.value).unwrap_or(f64::NAN);
            }
        }
        acc * s.powi(d as i32 - 1)
    };
    brk.extend(f.breakpoints().iter().flat_map(|&p| [x - p, x + p]));
    brk.extend([x - b, x, x + b]);
    let total = integrate_pieces(&inner, a, f64::INFINITY, &brk)?;
    if !total.is_finite() {
        return Err(LevyError::Quadrature { a, b: f64::INFINITY, estimate: total, error: f64::NAN });
    }
    Ok(sphere_area(d - 1) * total)
}

/// Log-spaced probes from `lo·r0` to `hi·r0` (8 per decade), stopping where
/// the profile drops below `1e-280`.
pub fn far_probes(f: &Profile, r0: f64, lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi / lo).log10() * 8.0).ceil() as usize + 1;
    log_space(lo * r0, hi * r0, n)
        .into_iter()
        .filter(|&x| f.ln_value(x) > LN_FLOOR)
        .collect()
}

fn default_r_probes(r0: f64) -> Vec<f64> {
    log_space(r0 / 100.0, r0, 5)
}

fn collect_points(xs: &[f64], vals: Vec<Result<f64>>, notes: &mut Vec<String>) -> Vec<RatioPoint> {
    let mut pts = Vec::new();
    for (&x, v) in xs.iter().zip(vals) {
        match v {
            Ok(r) => pts.push(RatioPoint { x, ratio: r }),
            Err(e) => notes.push(format!("probe x = {x}: {e}")),
        }
    }
    pts
}

/// Evidence for `g_{r0} * g_{r0}(x) ≤ L g(x)`, `|x| ≥ 2r0`.
pub fn check_condition_31(model: &LevyModel, r0: f64, x_probes: Option<&[f64]>) -> Result<ConditionReport> {
    if !(r0 > 0.0) {
        return Err(LevyError::param("r0", format!("must be positive, got {r0}")));
    }
    let f = model.profile();
    let xs = match x_probes {
        Some(x) => x.to_vec(),
        None => far_probes(f, r0, 2.0, 400.0),
    };
    if let Some(&x) = xs.iter().find(|&&x| x < 2.0 * r0) {
        return Err(LevyError::param("x_probes", format!("probe {x} is below 2 r0 = {}", 2.0 * r0)));
    }
    let vals = crate::par::map(&xs, |&x| pair_ratio(f, x, r0, r0));
    let mut notes = Vec::new();
    let pts = collect_points(&xs, vals, &mut notes);
    let mut r = ConditionReport::judged("31", pts, &GrowthRule::power(Toward::Large));
    r.detail("r0", r0);
    r.notes = notes;
    Ok(r)
}

/// Evidence for both parts of the convolution condition (C) with `γ = d`.
pub fn check_condition_c(
    model: &LevyModel,
    table: &ExponentTable,
    r0: f64,
    x_probes: Option<&[f64]>,
    r_probes: Option<&[f64]>,
) -> Result<ConditionReport> {
    if !(r0 > 0.0) {
        return Err(LevyError::param("r0", format!("must be positive, got {r0}")));
    }
    let f = model.profile();
    let xs = match x_probes {
        Some(x) => x.to_vec(),
        None => far_probes(f, r0, 2.0, 400.0),
    };
    let rs = match r_probes {
        Some(r) => r.to_vec(),
        None => default_r_probes(r0),
    };
    if let Some(&r) = rs.iter().find(|&&r| !(r > 0.0 && r <= r0)) {
        return Err(LevyError::param("r_probes", format!("probe {r} is outside (0, r0]")));
    }
    if let Some(&x) = xs.iter().find(|&&x| x < 2.0 * r0) {
        return Err(LevyError::param("x_probes", format!("probe {x} is below 2 r0 = {}", 2.0 * r0)));
    }
    let psis = rs.iter().map(|&r| table.psi_at(1.0 / r)).collect::<Result<Vec<f64>>>()?;
    let vals = crate::par::map(&xs, |&x| -> Result<f64> {
        let mut best: f64 = 0.0;
        for (&r, &p) in rs.iter().zip(&psis) {
            best = best.max(pair_ratio(f, x, r, r0)? / p);
        }
        Ok(best)
    });
    let mut notes = Vec::new();
    let pts = collect_points(&xs, vals, &mut notes);
    let mut rep = ConditionReport::judged("C", pts, &GrowthRule::power(Toward::Large));
    // second part: f(r) ≤ L₄ Ψ(1/r) r^{-d}
    let d = model.dim() as f64;
    let second = rs
        .iter()
        .zip(&psis)
        .map(|(&r, &p)| f.weighted(r, d) / p)
        .fold(0.0, f64::max);
    if !second.is_finite() {
        rep.verdict = Verdict::Fail;
    }
    rep.detail("r0", r0).detail("second_part_sup", second);
    rep.notes = notes;
    Ok(rep)
}

/// `ω_{d-1} ∫_r^∞ f(s∨ρ - ρ/2) f(ρ) ρ^{d-1} dρ / (f(s) Ψ(1/r))`.
fn p_ratio(f: &Profile, s: f64, r: f64, psi: f64) -> Result<f64> {
    let d = f.dim();
    let lfs = f.ln_value(s);
    let k = |rho: f64| {
        let arg = s.max(rho) - 0.5 * rho;
        (f.ln_value(arg) + f.ln_value(rho) - lfs).exp() * rho.powi(d as i32 - 1)
    };
    let mut brk = f.breakpoints();
    brk.extend([s, 2.0 * (s - 1.0), 2.0]);
    Ok(sphere_area(d) * integrate_pieces(&k, r, f64::INFINITY, &brk)? / psi)
}

/// Evidence for condition (P) at `s ≥ 8r0`, `r ≤ r0`.
pub fn check_condition_p(
    model: &LevyModel,
    table: &ExponentTable,
    r0: f64,
    s_probes: Option<&[f64]>,
    r_probes: Option<&[f64]>,
) -> Result<ConditionReport> {
    if !(r0 > 0.0) {
        return Err(LevyError::param("r0", format!("must be positive, got {r0}")));
    }
    let f = model.profile();
    let ss = match s_probes {
        Some(s) => s.to_vec(),
        None => far_probes(f, r0, 8.0, 400.0),
    };
    if let Some(&s) = ss.iter().find(|&&s| s < 8.0 * r0) {
        return Err(LevyError::param("s_probes", format!("probe {s} is below 8 r0 = {}", 8.0 * r0)));
    }
    let rs = match r_probes {
        Some(r) => r.to_vec(),
        None => default_r_probes(r0),
    };
    let psis = rs.iter().map(|&r| table.psi_at(1.0 / r)).collect::<Result<Vec<f64>>>()?;
    let vals = crate::par::map(&ss, |&s| -> Result<f64> {
        let mut best: f64 = 0.0;
        for (&r, &p) in rs.iter().zip(&psis) {
            best = best.max(p_ratio(f, s, r, p)?);
        }
        Ok(best)
    });
    let mut notes = Vec::new();
    let pts = collect_points(&ss, vals, &mut notes);
    let mut rep = ConditionReport::judged("P", pts, &GrowthRule::power(Toward::Large));
    rep.detail("r0", r0);
    rep.notes = notes;
    Ok(rep)
}

/// The large-jump part `ν̄_r` as exact cell masses on a symmetric grid (d = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMeasure {
    pub r: f64,
    pub grid: Grid1,
    pub weights: Vec<f64>,
    /// `|ν̄_r|` from the radial quadrature.
    pub exact_mass: f64,
    /// Mass of `ν̄_r` beyond the grid.
    pub outside: f64,
}

impl TruncatedMeasure {
    pub fn new(model: &LevyModel, r: f64, grid: Grid1) -> Result<Self> {
        if model.dim() != 1 {
            return Err(LevyError::Unsupported(format!(
                "grid measures are implemented for d = 1, model has d = {}",
                model.dim()
            )));
        }
        if !(r > 0.0) {
            return Err(LevyError::param("r", format!("must be positive, got {r}")));
        }
        let f = model.profile();
        let dx = grid.dx;
        let brk = f.breakpoints();
        // ∫_{[lo,hi] ∩ (r,∞)} f for 0 <= lo < hi
        let radial = |lo: f64, hi: f64| -> Result<f64> {
            let lo = lo.max(r);
            if hi <= lo {
                return Ok(0.0);
            }
            let mut acc = 0.0;
            for w in pieces(lo, hi, &brk).windows(2) {
                acc += gauss_kronrod(|s| f.value(s), w[0], w[1], Tolerance::relative(1e-11))?.value;
            }
            Ok(acc)
        };
        let half = grid.half;
        let right = crate::par::map_range(half + 1, |k| {
            let x = k as f64 * dx;
            if k == 0 {
                radial(0.0, 0.5 * dx).map(|v| 2.0 * v)
            } else {
                radial(x - 0.5 * dx, x + 0.5 * dx)
            }
        });
        let right = right.into_iter().collect::<Result<Vec<f64>>>()?;
        let mut weights = vec![0.0; grid.len()];
        for (k, &w) in right.iter().enumerate() {
            weights[half + k] = w;
            weights[half - k] = w;
        }
        let exact_mass = model.tail_mass(r)?;
        let edge = grid.x_max() + 0.5 * dx;
        let outside = if edge > r { model.tail_mass(edge)? } else { exact_mass };
        Ok(TruncatedMeasure {
            r,
            grid,
            weights,
            exact_mass,
            outside,
        })
    }

    /// A measure given directly by cell masses.
    pub fn from_weights(grid: Grid1, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(LevyError::param("weights", format!("need {} cells, got {}", grid.len(), weights.len())));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(LevyError::param("weights", "cell masses must be nonnegative"));
        }
        let m = weights.iter().sum();
        Ok(TruncatedMeasure {
            r: 0.0,
            grid,
            weights,
            exact_mass: m,
            outside: 0.0,
        })
    }

    /// Total mass on the grid.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `ν̄_r^{n*}` as cell masses on the measure's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvPower {
    pub n: usize,
    pub grid: Grid1,
    pub values: Vec<f64>,
    /// Mass pushed beyond the grid by the repeated convolutions.
    pub leaked: f64,
}

impl ConvPower {
    pub fn mass(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Density values (mass per unit length).
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v / self.grid.dx).collect()
    }
}

const LEAK_LIMIT: f64 = 1e-4;

/// Repeated discrete convolution of the cell masses, cropped to the grid.
pub fn conv_power(measure: &TruncatedMeasure, n: usize) -> Result<ConvPower> {
    if n == 0 {
        return Err(LevyError::param("n", "convolution power must be >= 1"));
    }
    let conv = LinearConv::new(&measure.weights);
    let mut cur = measure.weights.clone();
    let mut leaked = 0.0;
    let lam = measure.mass();
    for k in 2..=n {
        let (next, l) = conv.apply(&cur);
        leaked = leaked * lam + l;
        cur = next;
        clip_negative(&mut cur);
        let total = lam.powi(k as i32);
        if leaked > LEAK_LIMIT * total {
            return Err(LevyError::BoxTooSmall {
                leaked: leaked / total,
                limit: LEAK_LIMIT,
                required: 2.0 * measure.grid.x_max(),
            });
        }
    }
    Ok(ConvPower {
        n,
        grid: measure.grid,
        values: cur,
        leaked,
    })
}

fn clip_negative(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// `P̄_t = e^{-t|ν̄|}(δ₀ + Σ_{n≥1} tⁿ ν̄^{n*}/n!)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundPoisson {
    pub t: f64,
    pub atom: f64,
    /// Absolutely continuous part as cell masses.
    pub grid: Grid1,
    pub masses: Vec<f64>,
    /// Poisson mass of the omitted terms `n > n_max`.
    pub leftover: f64,
    pub n_max: usize,
    pub leaked: f64,
}

impl CompoundPoisson {
    pub fn total_mass(&self) -> f64 {
        self.atom + self.masses.iter().sum::<f64>() + self.leftover
    }
}

/// Smallest `n` with `e^{-μ} Σ_{k>n} μ^k/k! ≤ tol`.
pub fn poisson_cutoff(mu: f64, tol: f64, cap: usize) -> Result<(usize, f64)> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(LevyError::param("mu", format!("must be finite and non-negative, got {mu}")));
    }
    let mut pmf = (-mu).exp();
    let mut cdf = pmf;
    for n in 0..=cap {
        let left = (1.0 - cdf).max(0.0);
        if left <= tol {
            return Ok((n, left));
        }
        pmf *= mu / (n + 1) as f64;
        cdf += pmf;
    }
    Err(LevyError::SeriesTruncation {
        terms: cap,
        leftover: 1.0 - cdf,
    })
}

/// Hard cap on the number of series terms.
pub const SERIES_CAP: usize = 400;

/// Compound-Poisson measure of the grid measure with the atom kept apart;
/// the series is cut where the Poisson leftover drops below `1e-8`.
pub fn compound_poisson(measure: &TruncatedMeasure, t: f64, n_max: Option<usize>) -> Result<CompoundPoisson> {
    compound_poisson_tilted(measure, t, 0.0, n_max)
}

/// As [`compound_poisson`], but the continuous part is returned multiplied
/// by `e^{θx}`. Exponential tilting commutes with grid convolution, so a
/// tilt close to the tempering rate keeps the far tail well above the FFT
/// noise floor. The atom is not tilted.
pub fn compound_poisson_tilted(
    measure: &TruncatedMeasure,
    t: f64,
    theta: f64,
    n_max: Option<usize>,
) -> Result<CompoundPoisson> {
    if !(t > 0.0) {
        return Err(LevyError::param("t", format!("must be positive, got {t}")));
    }
    if !theta.is_finite() {
        return Err(LevyError::param("theta", "tilt must be finite"));
    }
    let lam = measure.mass();
    let grid = measure.grid;
    let weights: Vec<f64> = measure
        .weights
        .iter()
        .enumerate()
        .map(|(j, &w)| if theta == 0.0 || w <= 0.0 { w } else { (w.ln() + theta * grid.x(j)).exp() })
        .collect();
    let lam_t: f64 = weights.iter().sum();
    if !lam_t.is_finite() {
        return Err(LevyError::Domain(format!("tilted mass overflows at theta = {theta}")));
    }
    let (n, _) = match n_max {
        Some(n) => (n, 0.0),
        None => poisson_cutoff(t * lam_t, 1e-8, SERIES_CAP)?,
    };
    let scale = (-t * lam).exp();
    let conv = LinearConv::new(&weights);
    let mut term: Vec<f64> = weights.iter().map(|w| t * w).collect();
    let mut masses = vec![0.0; term.len()];
    let mut leaked = 0.0;
    for k in 1..=n {
        if k > 1 {
            let (next, l) = conv.apply(&term);
            term = next;
            clip_negative(&mut term);
            let f = t / k as f64;
            term.iter_mut().for_each(|v| *v *= f);
            leaked = leaked * t * lam_t / k as f64 + l * f;
        }
        for (m, v) in masses.iter_mut().zip(&term) {
            *m += v;
        }
    }
    masses.iter_mut().for_each(|m| *m *= scale);
    // mass of the omitted terms, in tilted units
    let mut pmf = 1.0;
    let mut partial = 1.0;
    for k in 1..=n {
        pmf *= t * lam_t / k as f64;
        partial += pmf;
    }
    let leftover = (scale * ((t * lam_t).exp() - partial)).max(0.0);
    Ok(CompoundPoisson {
        t,
        atom: scale,
        grid,
        masses,
        leftover,
        n_max: n,
        leaked: leaked * scale,
    })
}

/// Grid evidence for the bound `∫_{|x-y|>r0} f(|y-x|) ν̄_r^{n*}(dy) ≤ (C Ψ(1/r))ⁿ f(|x|)`.
///
/// For each `n` the ratio to `f(|x|)` is maximized over the probes; the
/// `n`-th roots estimate a geometric rate. PASS if every per-`n` curve is
/// bounded in `x` and the rates settle (last two within 25%).
pub fn verify_lemma32(
    model: &LevyModel,
    measure: &TruncatedMeasure,
    r0: f64,
    n_max: usize,
    x_probes: &[f64],
) -> Result<ConditionReport> {
    if n_max == 0 {
        return Err(LevyError::param("n_max", "need at least one power"));
    }
    let f = model.profile();
    let grid = measure.grid;
    let conv = LinearConv::new(&measure.weights);
    let mut cur = measure.weights.clone();
    let mut rates = Vec::new();
    let mut verdict = Verdict::Pass;
    let mut rep_pts = Vec::new();
    for n in 1..=n_max {
        if n > 1 {
            cur = conv.apply(&cur).0;
            clip_negative(&mut cur);
        }
        let vals: Vec<f64> = crate::par::map(x_probes, |&x| {
            let mut acc = 0.0;
            for (j, &w) in cur.iter().enumerate() {
                let dist = (x - grid.x(j)).abs();
                if dist > r0 && w > 0.0 {
                    acc += w * (f.ln_value(dist) - f.ln_value(x)).exp();
                }
            }
            acc
        });
        let pts: Vec<RatioPoint> = x_probes.iter().zip(&vals).map(|(&x, &r)| RatioPoint { x, ratio: r }).collect();
        let (v, _) = GrowthRule::power(Toward::Large).judge(&pts);
        verdict = verdict.and(v);
        let sup = vals.iter().cloned().fold(0.0, f64::max);
        rates.push(sup.powf(1.0 / n as f64));
        rep_pts.push(RatioPoint { x: n as f64, ratio: sup });
    }
    if rates.len() >= 2 {
        let k = rates.len();
        let q = rates[k - 1] / rates[k - 2];
        if !(q < 1.25 && q > 0.8) {
            verdict = verdict.and(Verdict::Inconclusive);
        }
    }
    let mut r = ConditionReport::new("lemma32", verdict, rep_pts);
    r.rule = "per-n ratio curves bounded in x (power rule) and n-th root rates settled within 25%".into();
    let fitted = rates.iter().cloned().fold(0.0, f64::max);
    r.detail("fitted_rate", fitted);
    for (i, q) in rates.iter().enumerate() {
        r.detail(&format!("rate_n{}", i + 1), *q);
    }
    Ok(r)
}

/// Smallest `s0` (doubling search from 1) for which
/// `u^β + v^β ≥ (u+v)^β + η log(u∧v)` on an `n × n` log grid of
/// `[s0, 10⁴ s0]²`; returns `s0` and the smallest slack on that grid.
pub fn tempering_inequality_s0(beta: f64, eta: f64, n: usize) -> Result<(f64, f64)> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(LevyError::param("beta", "the inequality needs 0 < beta < 1"));
    }
    let slack = |s0: f64| {
        let g = log_space(s0, 1e4 * s0, n);
        let mut worst = f64::INFINITY;
        for &u in &g {
            for &v in &g {
                let s = u.powf(beta) + v.powf(beta) - (u + v).powf(beta) - eta * u.min(v).ln();
                worst = worst.min(s);
            }
        }
        worst
    };
    let mut s0 = 1.0;
    for _ in 0..200 {
        let w = slack(s0);
        if w >= 0.0 {
            return Ok((s0, w));
        }
        s0 *= 2.0;
    }
    Err(LevyError::Domain("no s0 found below 2^200".into()))
}
