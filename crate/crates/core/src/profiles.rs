//! Radial Lévy-density profiles and the measure quantities that depend only
//! on the profile.
//!
//! A profile is `f(s) = κ(s)` on `(0, 1]` and `c·e^{-m s^β} s^{-δ}` on
//! `(1, ∞)`, with one of three small-jump singularity classes `κ`. The Lévy
//! density of the model is `g(x) = f(|x|)` exactly.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{LevyError, Result};
use crate::quad::{integrate_log, Tolerance};

/// Small-jump singularity class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KappaClass {
    /// `κ(r) = r^{-d}`.
    PureLog,
    /// `κ(r) = r^{-d-α₁} log(1+1/r)^{α₂}`.
    PolyLog { alpha1: f64, alpha2: f64 },
    /// `κ(r) = r^{-d-2} log(1+1/r)^{-2}`.
    HighIntensity,
}

impl KappaClass {
    pub fn name(&self) -> &'static str {
        match self {
            KappaClass::PureLog => "PURE_LOG",
            KappaClass::PolyLog { .. } => "POLY_LOG",
            KappaClass::HighIntensity => "HIGH_INTENSITY",
        }
    }

    fn raw(&self, d: usize, r: f64) -> f64 {
        let d = d as f64;
        match *self {
            KappaClass::PureLog => r.powf(-d),
            KappaClass::PolyLog { alpha1, alpha2 } => {
                let l = (1.0 / r).ln_1p();
                r.powf(-d - alpha1) * l.powf(alpha2)
            }
            KappaClass::HighIntensity => {
                let l = (1.0 / r).ln_1p();
                r.powf(-d - 2.0) / (l * l)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let KappaClass::PolyLog { alpha1, alpha2 } = *self {
            if !(alpha1 > 0.0 && alpha1 <= 2.0) {
                return Err(LevyError::param("kappa.alpha1", format!("must lie in (0, 2], got {alpha1}")));
            }
            if !alpha2.is_finite() {
                return Err(LevyError::param("kappa.alpha2", "must be finite"));
            }
            if alpha1 == 2.0 && alpha2 >= -1.0 {
                return Err(LevyError::param(
                    "kappa.alpha2",
                    "alpha1 = 2 needs alpha2 < -1 for a finite second moment",
                ));
            }
        }
        Ok(())
    }
}

/// Raw profile parameters as they appear in a model configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kappa: KappaClass,
    /// Tempering rate.
    pub m: f64,
    /// Tempering exponent.
    pub beta: f64,
    /// Polynomial tail order.
    pub delta: f64,
    /// Junction constant; `None` means `κ(1)e^m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

/// A validated profile in a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    spec: ProfileSpec,
    d: usize,
    c: f64,
    /// For POLY_LOG with α₂ < 0: beyond this radius κ is frozen at its
    /// running minimum so the stored profile is nonincreasing.
    kappa_floor: Option<(f64, f64)>,
}

impl Profile {
    pub fn new(spec: ProfileSpec, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(LevyError::param("d", "dimension must be >= 1"));
        }
        spec.kappa.validate()?;
        let ProfileSpec { m, beta, delta, .. } = spec;
        if !(m >= 0.0 && m.is_finite()) {
            return Err(LevyError::param("m", format!("must be >= 0, got {m}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(LevyError::param("beta", format!("must be > 0, got {beta}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(LevyError::param("delta", format!("must be >= 0, got {delta}")));
        }
        if m == 0.0 && delta <= d as f64 {
            return Err(LevyError::param(
                "delta",
                format!("m = 0 requires delta > d = {d}, got {delta}"),
            ));
        }
        let kappa_floor = monotone_floor(&spec.kappa, d);
        let mut p = Profile {
            spec,
            d,
            c: 0.0,
            kappa_floor,
        };
        let c_max = p.kappa(1.0) * m.exp();
        let c = spec.c.unwrap_or(c_max);
        if !(c > 0.0 && c <= c_max * (1.0 + 1e-12)) {
            return Err(LevyError::param(
                "c",
                format!("must lie in (0, kappa(1)e^m = {c_max}], got {c}"),
            ));
        }
        p.c = c;
        Ok(p)
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Junction constant in effect.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Monotonized small-jump profile on `(0, 1]`.
    pub fn kappa(&self, r: f64) -> f64 {
        match self.kappa_floor {
            Some((r_star, floor)) if r > r_star => floor,
            _ => self.spec.kappa.raw(self.d, r),
        }
    }

    /// `f(s)` for `s > 0` (no argument check).
    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        if s <= 1.0 {
            self.kappa(s)
        } else {
            let ProfileSpec { m, beta, delta, .. } = self.spec;
            let mut v = self.c;
            if m > 0.0 {
                v *= (-m * s.powf(beta)).exp();
            }
            if delta > 0.0 {
                v *= s.powf(-delta);
            }
            v
        }
    }

    /// `ln f(s)`; stays finite where `f(s)` underflows.
    pub fn ln_value(&self, s: f64) -> f64 {
        if s <= 1.0 {
            return self.kappa(s).ln();
        }
        let ProfileSpec { m, beta, delta, .. } = self.spec;
        let mut v = self.c.ln();
        if m > 0.0 {
            v -= m * s.powf(beta);
        }
        if delta > 0.0 {
            v -= delta * s.ln();
        }
        v
    }

    /// `f(s)`, rejecting `s <= 0`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(LevyError::Domain(format!("profile needs s > 0, got {s}")));
        }
        Ok(self.value(s))
    }

    /// `f(s)·s^k`, evaluated without intermediate overflow near the origin.
    #[inline]
    pub fn weighted(&self, s: f64, k: f64) -> f64 {
        if s > 1.0 {
            return self.value(s) * s.powf(k);
        }
        if let Some((r_star, floor)) = self.kappa_floor {
            if s > r_star {
                return floor * s.powf(k);
            }
        }
        let d = self.d as f64;
        match self.spec.kappa {
            KappaClass::PureLog => s.powf(k - d),
            KappaClass::PolyLog { alpha1, alpha2 } => {
                s.powf(k - d - alpha1) * (1.0 / s).ln_1p().powf(alpha2)
            }
            KappaClass::HighIntensity => {
                let l = (1.0 / s).ln_1p();
                s.powf(k - d - 2.0) / (l * l)
            }
        }
    }

    /// `∫_0^ε s^{d+1} f(s) ds` for small `ε`, from the leading-order
    /// behaviour of `κ` at the origin.
    pub fn radial_second_moment_below(&self, eps: f64) -> f64 {
        if !(eps > 0.0) {
            return 0.0;
        }
        let (a1, a2) = match self.spec.kappa {
            KappaClass::PureLog => (0.0, 0.0),
            KappaClass::PolyLog { alpha1, alpha2 } => (alpha1, alpha2),
            KappaClass::HighIntensity => (2.0, -2.0),
        };
        let l = (1.0 / eps).ln();
        if a1 < 2.0 {
            eps.powf(2.0 - a1) * l.powf(a2) / (2.0 - a1)
        } else {
            l.powf(a2 + 1.0) / (-a2 - 1.0)
        }
    }

    /// Radii where `f` may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![1.0];
        if let Some((r, _)) = self.kappa_floor {
            b.push(r);
        }
        b
    }
}

/// Locates the turning point of `r^{-d-α₁} log(1+1/r)^{α₂}` for α₂ < 0.
fn monotone_floor(kappa: &KappaClass, d: usize) -> Option<(f64, f64)> {
    let KappaClass::PolyLog { alpha1, alpha2 } = *kappa else {
        return None;
    };
    if alpha2 >= 0.0 {
        return None;
    }
    // d/dr log κ has the sign of  |α₂| - (d+α₁)(r+1)log(1+1/r);
    // (r+1)log(1+1/r) decreases in r.
    let slope = |r: f64| -alpha2 - (d as f64 + alpha1) * (r + 1.0) * (1.0 / r).ln_1p();
    if slope(1.0) <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (1e-300_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((hi, kappa.raw(d, hi)))
}

/// Surface measure `ω_{d-1} = 2π^{d/2}/Γ(d/2)` of the unit sphere in ℝ^d.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

/// Full model: dimension, profile and drift.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel {
    profile: Profile,
    b: Vec<f64>,
}

/// JSON model configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d: usize,
    pub kappa: KappaClass,
    pub m: f64,
    pub beta: f64,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
}

impl LevyModel {
    pub fn new(d: usize, spec: ProfileSpec, b: Vec<f64>) -> Result<Self> {
        let profile = Profile::new(spec, d)?;
        if b.len() != d {
            return Err(LevyError::param("b", format!("drift must have {d} components, got {}", b.len())));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(LevyError::param("b", "drift must be finite"));
        }
        let model = LevyModel { profile, b };
        // ∫(1∧|y|²)ν(dy) < ∞ and ν infinite
        let m2 = model.small_jump_second_moment(1.0)?;
        if !m2.is_finite() {
            return Err(LevyError::param("kappa", "second moment of small jumps diverges"));
        }
        let near = model.tail_mass(1e-6)?;
        let far = model.tail_mass(1e-3)?;
        if !(near > far) {
            return Err(LevyError::param("kappa", "Levy measure must have infinite mass"));
        }
        Ok(model)
    }

    /// Symmetric model without drift.
    pub fn symmetric(d: usize, spec: ProfileSpec) -> Result<Self> {
        Self::new(d, spec, vec![0.0; d])
    }

    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        let spec = ProfileSpec {
            kappa: cfg.kappa,
            m: cfg.m,
            beta: cfg.beta,
            delta: cfg.delta,
            c: cfg.c,
        };
        let b = cfg.b.clone().unwrap_or_else(|| vec![0.0; cfg.d]);
        Self::new(cfg.d, spec, b)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text).map_err(|e| LevyError::InvalidParameter {
            field: "config".into(),
            reason: e.to_string(),
        })?;
        Self::from_config(&cfg)
    }

    pub fn config(&self) -> ModelConfig {
        let s = self.profile.spec;
        ModelConfig {
            d: self.dim(),
            kappa: s.kappa,
            m: s.m,
            beta: s.beta,
            delta: s.delta,
            c: s.c,
            b: Some(self.b.clone()),
        }
    }

    /// Same profile with a different drift.
    pub fn with_drift(&self, b: Vec<f64>) -> Result<Self> {
        Self::new(self.dim(), self.profile.spec, b)
    }

    pub fn dim(&self) -> usize {
        self.profile.d
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn drift(&self) -> &[f64] {
        &self.b
    }

    /// `g(x) = f(|x|)`; `x = 0` is rejected.
    pub fn levy_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(LevyError::Domain(format!(
                "point has {} coordinates, model dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(LevyError::Domain("Levy density is undefined at the origin".into()));
        }
        self.profile.eval(r)
    }

    fn radial_pieces(&self, a: f64, b: f64) -> Vec<f64> {
        crate::quad::pieces(a, b, &self.profile.breakpoints())
    }

    /// `ν(B(0,r)^c) = ω_{d-1} ∫_r^∞ f(s) s^{d-1} ds`.
    pub fn tail_mass(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(LevyError::Domain(format!("tail_mass needs r > 0, got {r}")));
        }
        let k = self.dim() as f64 - 1.0;
        let f = &self.profile;
        let pts = self.radial_pieces(r, f64::INFINITY);
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += integrate_log(|s| f.weighted(s, k), w[0], w[1], Tolerance::default())?.value;
        }
        Ok(sphere_area(self.dim()) * total)
    }

    /// `ω_{d-1} ∫_0^r s² f(s) s^{d-1} ds` for `0 < r <= 1`.
    pub fn small_jump_second_moment(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(LevyError::Domain(format!("second moment needs 0 < r <= 1, got {r}")));
        }
        let k = self.dim() as f64 + 1.0;
        let f = &self.profile;
        let eps = 1e-12 * r;
        let pts = self.radial_pieces(eps, r);
        let mut total = f.radial_second_moment_below(eps);
        for w in pts.windows(2) {
            total += integrate_log(|s| f.weighted(s, k), w[0], w[1], Tolerance::default())?.value;
        }
        Ok(sphere_area(self.dim()) * total)
    }
}
