//! Grid evidence for the two-sided density bounds: near field
//! `p_t(x) ≍ h(t)^{-d}`, far field `p_t(x) ≍ t g(x)`, the min-form lower
//! bound, the one-sided far-field bound under (C), and the dichotomy at
//! exponential tempering.

use serde::{Deserialize, Serialize};

use crate::convolution::check_condition_c;
use crate::density::{default_grid, density_fourier, density_split, require_condition_e, DensityGrid};
use crate::error::{LevyError, Result};
use crate::exponent::ExponentTable;
use crate::grid::{log_space, Grid1};
use crate::profiles::{KappaClass, LevyModel, ProfileSpec};
use crate::verdict::{GrowthRule, RatioPoint, Toward, Verdict};

/// `{inf, sup}` of a ratio over the accepted probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub inf: f64,
    pub sup: f64,
}

impl Envelope {
    fn of(points: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut e: Option<Envelope> = None;
        for v in points {
            let cur = e.get_or_insert(Envelope { inf: v, sup: v });
            cur.inf = cur.inf.min(v);
            cur.sup = cur.sup.max(v);
        }
        e
    }

    fn merge(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(a), Some(b)) => Some(Envelope {
                inf: a.inf.min(b.inf),
                sup: a.sup.max(b.sup),
            }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

/// Ratio curves at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub t: f64,
    pub h: f64,
    /// `p_t(x)·h(t)^d` for `|x| ≤ θh(t)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub near: Vec<RatioPoint>,
    /// `p_t(x)/(t g(x))` on the far probes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub far: Vec<RatioPoint>,
    /// `p_t(x)/min{h(t)^{-d}, t g(x)}`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub min_form: Vec<RatioPoint>,
    pub excluded: usize,
    pub probes: usize,
    pub error_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: String,
    pub t_grid: Vec<f64>,
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near: Option<Envelope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub far: Option<Envelope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_form: Option<Envelope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub far_verdict: Option<Verdict>,
    pub verdict: Verdict,
    /// Fraction of far probes with trustworthy density values.
    pub coverage: f64,
    pub rule: String,
    pub slices: Vec<TimeSlice>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Probe options shared by the bound checks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundOptions {
    pub t_grid: Option<Vec<f64>>,
    /// Near/far boundary in units of `h(t)`; chosen from the plateau if unset.
    pub theta: Option<f64>,
    pub far_probes: Option<Vec<f64>>,
    /// Scale `r0` of the far field (default 1).
    pub r0: Option<f64>,
}

/// Points per decade of the default far probes.
const FAR_PER_DECADE: f64 = 8.0;
/// Cells of the far-field grid.
const FAR_CELLS: f64 = 65536.0;

fn default_t_grid(t0: f64) -> Vec<f64> {
    if t0 <= 1e-3 {
        return vec![t0];
    }
    log_space(1e-3, t0, 8)
}

fn far_default(lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi / lo).log10() * FAR_PER_DECADE).ceil() as usize + 1;
    log_space(lo, hi, n.max(2))
}

/// Split density on a grid reaching `2·x_far`.
fn far_density(model: &LevyModel, table: &ExponentTable, t: f64, x_far: f64) -> Result<DensityGrid> {
    let base = default_grid(model, table, t)?;
    let x_max = 2.0 * x_far;
    let dx = base.dx.max(2.0 * x_max / FAR_CELLS);
    let grid = Grid1::covering(dx, x_max)?;
    density_split(model, table, t, &grid, None)
}

/// Fourier density on `|x| ≤ 4 max(θ, 1) h` at spacing `h/16`.
fn near_density(model: &LevyModel, table: &ExponentTable, t: f64, theta: f64) -> Result<DensityGrid> {
    let h = table.h_of_t(t)?.h;
    let grid = Grid1::covering(h / 16.0, 4.0 * theta.max(1.0) * h)?;
    density_fourier(model, table, t, &grid)
}

/// Largest `θ` with `p_t(θh) ≥ p_t(0)/2` at time `t`.
pub fn plateau_theta(model: &LevyModel, table: &ExponentTable, t: f64) -> Result<f64> {
    let h = table.h_of_t(t)?.h;
    let p = near_density(model, table, t, 1.0)?;
    let p0 = p.values[p.grid.half];
    let mut x = p.grid.dx;
    for j in p.grid.half..p.grid.len() {
        if p.values[j] >= 0.5 * p0 {
            x = p.grid.x(j).max(p.grid.dx);
        } else {
            break;
        }
    }
    Ok(x / h)
}

/// Ratio `p/(t g)` at the far probes, snapped to grid points. Probes that
/// are flagged, below four cells, or whose tilted scale `t g(x) e^{θx}` is
/// under `1e-3` of the error budget are excluded.
fn far_curve(model: &LevyModel, p: &DensityGrid, probes: &[f64], lower_cut: f64) -> (Vec<RatioPoint>, usize) {
    let f = model.profile();
    let t = p.t;
    let theta = {
        let s = f.spec();
        if s.m > 0.0 && s.beta == 1.0 {
            (s.m - 4.0 / p.grid.x_max()).max(0.0)
        } else {
            0.0
        }
    };
    let mut out = Vec::new();
    let mut excluded = 0;
    let mut last = None;
    for &x in probes {
        let Some(j) = p.grid.index_of(x) else {
            excluded += 1;
            continue;
        };
        let xj = p.grid.x(j);
        if last == Some(j) {
            continue;
        }
        last = Some(j);
        let tg_ln = t.ln() + f.ln_value(xj);
        let scale_ln = tg_ln + theta * xj;
        if xj < lower_cut.max(4.0 * p.grid.dx)
            || p.err_flags[j]
            || !(p.values[j] > 0.0)
            || scale_ln < (1e-3 * p.error_budget.max(1e-300)).ln()
        {
            excluded += 1;
            continue;
        }
        out.push(RatioPoint {
            x: xj,
            ratio: (p.values[j].ln() - tg_ln).exp(),
        });
    }
    (out, excluded)
}

fn invert(pts: &[RatioPoint]) -> Vec<RatioPoint> {
    pts.iter().map(|p| RatioPoint { x: p.x, ratio: 1.0 / p.ratio }).collect()
}

/// Two-sided boundedness of one curve toward large `x`.
fn judge_two_sided(pts: &[RatioPoint]) -> Verdict {
    let rule = GrowthRule::power(Toward::Large);
    rule.judge(pts).0.and(rule.judge(&invert(pts)).0)
}

/// Blow-up toward small `t`: per-slice `sup` growing, or `inf` shrinking,
/// monotonically by more than 10× as `t` decreases.
fn judge_across_t(env: &[(f64, Envelope)], upper_only: bool) -> Verdict {
    if env.len() < 2 {
        return Verdict::Pass;
    }
    let sups: Vec<f64> = env.iter().map(|e| e.1.sup).collect();
    let infs: Vec<f64> = env.iter().map(|e| e.1.inf).collect();
    if sups.iter().chain(&infs).any(|v| !v.is_finite() || *v <= 0.0) {
        return Verdict::Fail;
    }
    // env is ordered by increasing t
    let sup_blowup = sups.windows(2).all(|w| w[0] >= w[1]) && sups[0] / sups[sups.len() - 1] > 10.0;
    let inf_collapse = infs.windows(2).all(|w| w[0] <= w[1]) && infs[infs.len() - 1] / infs[0] > 10.0;
    if sup_blowup || (!upper_only && inf_collapse) {
        Verdict::Fail
    } else {
        Verdict::Pass
    }
}

const ACROSS_T_RULE: &str = "per-t sup must not grow, nor inf shrink, monotonically by more than 10x as t decreases";

/// Near field `p_t·h(t)^d ≍ 1` on `|x| ≤ θh(t)` and far field
/// `p_t ≍ t g` on `θh(t) ≤ |x| ≤ R` (`R = 400 r0`, default `t ≤ 0.1`).
pub fn verify_theorem_12(model: &LevyModel, table: &ExponentTable, opts: &BoundOptions) -> Result<BoundReport> {
    require_condition_e(model, table)?;
    let r0 = opts.r0.unwrap_or(1.0);
    let t_grid = opts.t_grid.clone().unwrap_or_else(|| default_t_grid(T_SMALL));
    validate_t_grid(&t_grid)?;
    let t_max = t_grid.iter().cloned().fold(0.0, f64::max);
    let theta = match opts.theta {
        Some(th) if th > 0.0 => th,
        Some(th) => return Err(LevyError::param("theta", format!("must be positive, got {th}"))),
        None => plateau_theta(model, table, t_max)?,
    };
    let x_far = opts.far_probes.as_ref().map_or(400.0 * r0, |p| p.iter().cloned().fold(0.0, f64::max));
    let mut slices = Vec::new();
    let mut near_env = Vec::new();
    let mut far_env = Vec::new();
    let mut far_v = Verdict::Pass;
    let (mut used, mut total) = (0usize, 0usize);
    for &t in &t_grid {
        let h = table.h_of_t(t)?.h;
        let pn = near_density(model, table, t, theta)?;
        let near: Vec<RatioPoint> = (pn.grid.half..pn.grid.len())
            .filter(|&j| pn.grid.x(j) <= theta * h * (1.0 + 1e-9) && !pn.err_flags[j])
            .map(|j| RatioPoint {
                x: pn.grid.x(j),
                ratio: pn.values[j] * h,
            })
            .collect();
        let probes = match &opts.far_probes {
            Some(p) => p.clone(),
            None => far_default((theta * h).max(1e-6), x_far),
        };
        let pf = far_density(model, table, t, x_far)?;
        let (far, excluded) = far_curve(model, &pf, &probes, theta * h);
        used += far.len();
        total += far.len() + excluded;
        far_v = far_v.and(judge_two_sided(&far));
        if let Some(e) = Envelope::of(near.iter().map(|p| p.ratio)) {
            near_env.push((t, e));
        }
        if let Some(e) = Envelope::of(far.iter().map(|p| p.ratio)) {
            far_env.push((t, e));
        }
        slices.push(TimeSlice {
            t,
            h,
            near,
            far,
            min_form: Vec::new(),
            excluded,
            probes: probes.len(),
            error_budget: pf.error_budget,
        });
    }
    let near_v = if near_env.is_empty() {
        Verdict::Inconclusive
    } else {
        judge_across_t(&near_env, false)
    };
    let far_v = if far_env.is_empty() {
        Verdict::Inconclusive
    } else {
        far_v.and(judge_across_t(&far_env, false))
    };
    Ok(BoundReport {
        theorem: "t12".into(),
        t_grid,
        theta,
        near: near_env.iter().fold(None, |a, e| Envelope::merge(a, Some(e.1))),
        far: far_env.iter().fold(None, |a, e| Envelope::merge(a, Some(e.1))),
        min_form: None,
        near_verdict: Some(near_v),
        far_verdict: Some(far_v),
        verdict: near_v.and(far_v),
        coverage: coverage(used, total),
        rule: format!(
            "far field: {} (applied to the ratio and its reciprocal, per t); {ACROSS_T_RULE}",
            GrowthRule::power(Toward::Large).describe()
        ),
        slices,
        notes: Vec::new(),
    })
}

fn coverage(used: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        used as f64 / total as f64
    }
}

fn validate_t_grid(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(LevyError::param("t_grid", "needs at least one time"));
    }
    if let Some(v) = t.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(LevyError::param("t_grid", format!("times must be positive, got {v}")));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LevyError::param("t_grid", "times must be increasing"));
    }
    Ok(())
}

/// Small-time horizon of every bound check.
pub const T_SMALL: f64 = 0.1;

/// `t₀ = min(T_SMALL, 1/Ψ(1/r0))`.
fn far_t0(table: &ExponentTable, r0: f64) -> Result<f64> {
    Ok((1.0 / table.psi_at(1.0 / r0)?).min(T_SMALL))
}

/// Far field `p_t ≍ t g` for `|x| ≥ 4 r0`, `t ≤ t₀`.
pub fn verify_theorem_13(model: &LevyModel, table: &ExponentTable, opts: &BoundOptions) -> Result<BoundReport> {
    require_condition_e(model, table)?;
    far_only(model, table, opts, "t13", false)
}

/// One-sided far-field bound `p_t ≤ C t f` for `|x| > 4 r0`; refuses
/// unless (C) and (E) hold.
pub fn verify_theorem_14(model: &LevyModel, table: &ExponentTable, opts: &BoundOptions) -> Result<BoundReport> {
    let r0 = opts.r0.unwrap_or(1.0);
    require_condition_e(model, table)?;
    let c = check_condition_c(model, table, r0, None, None)?;
    if c.verdict != Verdict::Pass {
        return Err(LevyError::Precondition {
            condition: "C".into(),
            verdict: c.verdict.name().into(),
        });
    }
    far_only(model, table, opts, "t14", true)
}

fn far_only(model: &LevyModel, table: &ExponentTable, opts: &BoundOptions, tag: &str, upper_only: bool) -> Result<BoundReport> {
    let r0 = opts.r0.unwrap_or(1.0);
    if !(r0 > 0.0) {
        return Err(LevyError::param("r0", format!("must be positive, got {r0}")));
    }
    let t_grid = match &opts.t_grid {
        Some(t) => t.clone(),
        None => default_t_grid(far_t0(table, r0)?),
    };
    validate_t_grid(&t_grid)?;
    let probes = opts.far_probes.clone().unwrap_or_else(|| far_default(4.0 * r0, 400.0 * r0));
    if let Some(x) = probes.iter().find(|&&x| x <= 4.0 * r0 * (1.0 - 1e-12)) {
        return Err(LevyError::param("far_probes", format!("probe {x} is inside 4 r0")));
    }
    let x_far = probes.iter().cloned().fold(0.0, f64::max);
    let mut slices = Vec::new();
    let mut env = Vec::new();
    let mut v = Verdict::Pass;
    let (mut used, mut total) = (0, 0);
    let rule = GrowthRule::power(Toward::Large);
    for &t in &t_grid {
        let h = table.h_of_t(t)?.h;
        let pf = far_density(model, table, t, x_far)?;
        let (far, excluded) = far_curve(model, &pf, &probes, 4.0 * r0);
        used += far.len();
        total += far.len() + excluded;
        v = v.and(if upper_only { rule.judge(&far).0 } else { judge_two_sided(&far) });
        if let Some(e) = Envelope::of(far.iter().map(|p| p.ratio)) {
            env.push((t, e));
        }
        slices.push(TimeSlice {
            t,
            h,
            near: Vec::new(),
            far,
            min_form: Vec::new(),
            excluded,
            probes: probes.len(),
            error_budget: pf.error_budget,
        });
    }
    let far_v = if env.is_empty() {
        Verdict::Inconclusive
    } else {
        v.and(judge_across_t(&env, upper_only))
    };
    Ok(BoundReport {
        theorem: tag.into(),
        t_grid,
        theta: f64::NAN,
        near: None,
        far: env.iter().fold(None, |a, e| Envelope::merge(a, Some(e.1))),
        min_form: None,
        near_verdict: None,
        far_verdict: Some(far_v),
        verdict: far_v,
        coverage: coverage(used, total),
        rule: format!(
            "{} ({}, per t); {ACROSS_T_RULE}",
            rule.describe(),
            if upper_only { "upper bound only" } else { "ratio and reciprocal" }
        ),
        slices,
        notes: Vec::new(),
    })
}

/// `p_t(x) ≍ min{h(t)^{-d}, t g(x)}` for `0 < |x| ≤ R`.
pub fn verify_min_form(model: &LevyModel, table: &ExponentTable, opts: &BoundOptions) -> Result<BoundReport> {
    require_condition_e(model, table)?;
    let r0 = opts.r0.unwrap_or(1.0);
    let t_grid = opts.t_grid.clone().unwrap_or_else(|| default_t_grid(T_SMALL));
    validate_t_grid(&t_grid)?;
    let x_far = opts.far_probes.as_ref().map_or(400.0 * r0, |p| p.iter().cloned().fold(0.0, f64::max));
    let f = model.profile();
    let mut slices = Vec::new();
    let mut env = Vec::new();
    let mut v = Verdict::Pass;
    let (mut used, mut total) = (0, 0);
    for &t in &t_grid {
        let h = table.h_of_t(t)?.h;
        let pn = near_density(model, table, t, 1.0)?;
        let min_ratio = |x: f64, p: f64| {
            let ln_min = (-h.ln()).min(t.ln() + f.ln_value(x));
            (p.ln() - ln_min).exp()
        };
        let mut curve: Vec<RatioPoint> = (pn.grid.half + 1..pn.grid.len())
            .filter(|&j| !pn.err_flags[j])
            .map(|j| RatioPoint {
                x: pn.grid.x(j),
                ratio: min_ratio(pn.grid.x(j), pn.values[j]),
            })
            .collect();
        let near_end = pn.grid.x_max();
        let probes = match &opts.far_probes {
            Some(p) => p.clone(),
            None => far_default(near_end, x_far),
        };
        let pf = far_density(model, table, t, x_far)?;
        let (far, excluded) = far_curve(model, &pf, &probes, near_end);
        used += far.len();
        total += far.len() + excluded;
        curve.extend(far.iter().map(|p| RatioPoint {
            x: p.x,
            ratio: min_ratio(p.x, p.ratio * t * f.value(p.x)),
        }));
        v = v.and(judge_two_sided(&curve));
        if let Some(e) = Envelope::of(curve.iter().map(|p| p.ratio)) {
            env.push((t, e));
        }
        slices.push(TimeSlice {
            t,
            h,
            near: Vec::new(),
            far: Vec::new(),
            min_form: curve,
            excluded,
            probes: probes.len(),
            error_budget: pf.error_budget,
        });
    }
    let verdict = if env.is_empty() {
        Verdict::Inconclusive
    } else {
        v.and(judge_across_t(&env, false))
    };
    Ok(BoundReport {
        theorem: "minform".into(),
        t_grid,
        theta: f64::NAN,
        near: None,
        far: None,
        min_form: env.iter().fold(None, |a, e| Envelope::merge(a, Some(e.1))),
        near_verdict: None,
        far_verdict: None,
        verdict,
        coverage: coverage(used, total),
        rule: format!(
            "{} (ratio and reciprocal, per t); {ACROSS_T_RULE}",
            GrowthRule::power(Toward::Large).describe()
        ),
        slices,
        notes: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DichotomyVerdict {
    DichotomyConfirmed,
    NotConfirmed,
    Inconclusive,
}

impl DichotomyVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            DichotomyVerdict::DichotomyConfirmed => 0,
            DichotomyVerdict::NotConfirmed => 1,
            DichotomyVerdict::Inconclusive => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DichotomyVerdict::DichotomyConfirmed => "DICHOTOMY_CONFIRMED",
            DichotomyVerdict::NotConfirmed => "NOT_CONFIRMED",
            DichotomyVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One model of the pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyArm {
    pub beta: f64,
    pub delta: f64,
    /// `R(x) = p_t(x)/(t g(x))`.
    pub curve: Vec<RatioPoint>,
    /// `R(x_hi)/R(x_lo)`.
    pub growth_factor: f64,
    /// `p_t(0)·h(t)^d`.
    pub near_level: f64,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub t: f64,
    pub window: [f64; 2],
    pub critical: DichotomyArm,
    pub subcritical: DichotomyArm,
    /// Critical growth factor over the subcritical one.
    pub factor_ratio: f64,
    pub margin: f64,
    /// Ratio of the two near-field levels (larger over smaller).
    pub near_ratio: f64,
    pub verdict: DichotomyVerdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Required excess of the critical growth factor over the subcritical one.
/// A 5% error on each of the four `R` values moves the ratio by at most
/// about 20%, far inside this margin.
pub const DICHOTOMY_MARGIN: f64 = 2.0;

/// `(β, δ)` of the default critical model.
pub const DEFAULT_CRITICAL: (f64, f64) = (1.0, 0.0);
/// `(β, δ)` of the default subcritical model.
pub const DEFAULT_SUBCRITICAL: (f64, f64) = (0.5, 0.0);

/// Shared settings of the pair compared by [`dichotomy_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomySetup {
    pub kappa: KappaClass,
    pub d: usize,
    pub m: f64,
    pub t: f64,
    pub window: [f64; 2],
}

impl Default for DichotomySetup {
    fn default() -> Self {
        DichotomySetup {
            kappa: KappaClass::PolyLog { alpha1: 0.5, alpha2: 0.0 },
            d: 1,
            m: 1.0,
            t: 0.1,
            window: [5.0, 20.0],
        }
    }
}

/// Far-field ratio growth of a critical (`β = 1`, `δ ≤ (d+1)/2`) model
/// against a subcritical one sharing `κ`, `d` and `m`.
pub fn dichotomy_experiment(setup: &DichotomySetup, critical: (f64, f64), subcritical: (f64, f64)) -> Result<DichotomyReport> {
    let DichotomySetup { kappa, d, m, t, window } = *setup;
    if !(critical.0 == 1.0 && critical.1 <= (d as f64 + 1.0) / 2.0) {
        return Err(LevyError::param(
            "critical",
            format!("needs beta = 1 and delta <= (d+1)/2, got ({}, {})", critical.0, critical.1),
        ));
    }
    if !(window[0] > 0.0 && window[1] > window[0]) {
        return Err(LevyError::param("window", "need 0 < x_lo < x_hi"));
    }
    let arm = |(beta, delta): (f64, f64)| -> Result<DichotomyArm> {
        let model = LevyModel::symmetric(d, ProfileSpec { kappa, m, beta, delta, c: None })?;
        let table = ExponentTable::for_model(&model)?;
        let h = table.h_of_t(t)?.h;
        let base = default_grid(&model, &table, t)?;
        // the missing mass t·|ν̄_X| rescales every value, so keep the box wide
        let grid = Grid1::covering(base.dx, 8.0 * window[1])?;
        let p = density_split(&model, &table, t, &grid, None)?;
        let f = model.profile();
        let probes = log_space(window[0], window[1], 16);
        let mut flagged = 0;
        let curve: Vec<RatioPoint> = probes
            .iter()
            .filter_map(|&x| grid.index_of(x))
            .map(|j| {
                if p.err_flags[j] {
                    flagged += 1;
                }
                let x = grid.x(j);
                RatioPoint {
                    x,
                    ratio: p.values[j] / (t * f.value(x)),
                }
            })
            .collect();
        let growth_factor = curve[curve.len() - 1].ratio / curve[0].ratio;
        Ok(DichotomyArm {
            beta,
            delta,
            curve,
            growth_factor,
            near_level: p.values[grid.half] * h,
            flagged,
        })
    };
    let critical = arm(critical)?;
    let subcritical = arm(subcritical)?;
    let factor_ratio = critical.growth_factor / subcritical.growth_factor;
    let near_ratio = (critical.near_level / subcritical.near_level).max(subcritical.near_level / critical.near_level);
    let verdict = if critical.flagged + subcritical.flagged > 0 || !factor_ratio.is_finite() {
        DichotomyVerdict::Inconclusive
    } else if factor_ratio >= DICHOTOMY_MARGIN {
        DichotomyVerdict::DichotomyConfirmed
    } else {
        DichotomyVerdict::NotConfirmed
    };
    let mut notes = Vec::new();
    if near_ratio > 2.0 {
        notes.push(format!(
            "near-field levels p_t(0)h(t) differ by {near_ratio:.2}x; h(t) of the two models differs because the large jumps differ"
        ));
    }
    Ok(DichotomyReport {
        notes,
        t,
        window,
        critical,
        subcritical,
        factor_ratio,
        margin: DICHOTOMY_MARGIN,
        near_ratio,
        verdict,
    })
}
