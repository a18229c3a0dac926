//! Graded verdicts for grid evidence of asymptotic statements.
//!
//! A finite grid cannot decide whether a ratio stays bounded, so every check
//! reports its ratio curve and classifies it by a documented rule: the
//! log-log slope of the ratio over the last few decades toward the
//! asymptotic end, plus the max/median and monotone-growth tests.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::grid::ls_slope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 3,
        }
    }

    /// Worst of two verdicts (FAIL > INCONCLUSIVE > PASS).
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub x: f64,
    pub ratio: f64,
}

/// Which end of the probe axis is the asymptotic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Toward {
    Large,
    Small,
}

/// Growth statistics of a ratio curve over the asymptotic window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthStats {
    /// `d ln R / d ln x`, oriented so that positive means growth toward the
    /// asymptotic end.
    pub slope: f64,
    pub max_over_median: f64,
    /// `R(end)/R(start)` across the window.
    pub growth: f64,
    pub monotone: bool,
    pub points: usize,
}

/// Slope thresholds for [`GrowthRule::judge`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRule {
    pub toward: Toward,
    /// Width of the asymptotic window in decades of `x`.
    pub decades: f64,
    pub pass_slope: f64,
    pub fail_slope: f64,
}

impl GrowthRule {
    /// Rule for ratios that should settle to a constant but may diverge
    /// polynomially (convolution conditions, far-field envelopes).
    pub fn power(toward: Toward) -> Self {
        GrowthRule {
            toward,
            decades: 1.0,
            pass_slope: 0.15,
            fail_slope: 0.25,
        }
    }

    /// Rule sensitive to logarithmic divergence; needs a window far out.
    pub fn logarithmic(toward: Toward) -> Self {
        GrowthRule {
            toward,
            decades: 2.0,
            pass_slope: 0.02,
            fail_slope: 0.035,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "log-log slope of the ratio over the last {} decade(s) toward {} x: PASS if < {} and max/median < 10; \
             FAIL if > {} or monotone growth > 10x; else INCONCLUSIVE",
            self.decades,
            match self.toward {
                Toward::Large => "large",
                Toward::Small => "small",
            },
            self.pass_slope,
            self.fail_slope
        )
    }

    /// Points of `pts` inside the asymptotic window, ordered toward the
    /// asymptotic end.
    pub fn window(&self, pts: &[RatioPoint]) -> Vec<RatioPoint> {
        let mut v: Vec<RatioPoint> = pts.iter().copied().filter(|p| p.x > 0.0).collect();
        v.sort_by(|a, b| a.x.total_cmp(&b.x));
        if self.toward == Toward::Small {
            v.reverse();
        }
        let Some(end) = v.last().map(|p| p.x.log10()) else {
            return v;
        };
        v.retain(|p| (end - p.x.log10()).abs() <= self.decades + 1e-12);
        v
    }

    pub fn stats(&self, pts: &[RatioPoint]) -> GrowthStats {
        let w = self.window(pts);
        let sign = match self.toward {
            Toward::Large => 1.0,
            Toward::Small => -1.0,
        };
        let lx: Vec<f64> = w.iter().map(|p| sign * p.x.ln()).collect();
        let ly: Vec<f64> = w.iter().map(|p| p.ratio.ln()).collect();
        let slope = ls_slope(&lx, &ly);
        let mut sorted: Vec<f64> = w.iter().map(|p| p.ratio).collect();
        sorted.sort_by(f64::total_cmp);
        let (max_over_median, growth) = if sorted.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (
                sorted[sorted.len() - 1] / sorted[sorted.len() / 2],
                w[w.len() - 1].ratio / w[0].ratio,
            )
        };
        let monotone = w.windows(2).all(|p| p[1].ratio >= p[0].ratio);
        GrowthStats {
            slope,
            max_over_median,
            growth,
            monotone,
            points: w.len(),
        }
    }

    pub fn judge(&self, pts: &[RatioPoint]) -> (Verdict, GrowthStats) {
        let s = self.stats(pts);
        if pts.iter().any(|p| p.ratio.is_infinite()) {
            return (Verdict::Fail, s);
        }
        if s.points < 3 || !s.slope.is_finite() {
            return (Verdict::Inconclusive, s);
        }
        let v = if s.slope > self.fail_slope || (s.monotone && s.growth > 10.0) {
            Verdict::Fail
        } else if s.slope < self.pass_slope && s.max_over_median < 10.0 {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
        (v, s)
    }
}

/// Numeric evidence for one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub verdict: Verdict,
    pub sup_ratio: f64,
    pub grid: Vec<RatioPoint>,
    /// Classification label for checks decided symbolically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub rule: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn new(condition: &str, verdict: Verdict, grid: Vec<RatioPoint>) -> Self {
        let sup_ratio = grid
            .iter()
            .map(|p| p.ratio)
            .filter(|r| !r.is_nan())
            .fold(f64::NEG_INFINITY, f64::max);
        ConditionReport {
            condition: condition.to_string(),
            verdict,
            sup_ratio,
            grid,
            reason: None,
            rule: String::new(),
            details: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Report judged by `rule`, with the growth statistics recorded.
    pub fn judged(condition: &str, grid: Vec<RatioPoint>, rule: &GrowthRule) -> Self {
        let (v, s) = rule.judge(&grid);
        let mut r = Self::new(condition, v, grid);
        r.rule = rule.describe();
        r.detail("window_slope", s.slope)
            .detail("window_max_over_median", s.max_over_median)
            .detail("window_growth", s.growth)
            .detail("window_points", s.points as f64);
        r
    }

    pub fn detail(&mut self, key: &str, value: f64) -> &mut Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes.push(s.into());
        self
    }

    pub fn inf_ratio(&self) -> f64 {
        self.grid.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min)
    }
}
