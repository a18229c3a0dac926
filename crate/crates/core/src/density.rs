//! Transition densities in d = 1: direct Fourier inversion and the
//! small-jump/large-jump splitting `p_t = p̊_t ∗ P̄_t ∗ δ_{tb}`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::convolution::{compound_poisson, compound_poisson_tilted, CompoundPoisson, TruncatedMeasure};
use crate::error::{LevyError, Result};
use crate::exponent::{check_condition_e, Exponent, ExponentTable, SmallJumps};
use crate::grid::{FieldGrid, Grid1};
use crate::profiles::LevyModel;
use crate::quad::{fourier_integral, gauss_kronrod, integrate_log, Tolerance};
use crate::spectral::{invert_even, invert_even_samples, LinearConv};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fourier,
    Split,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fourier => "fourier",
            Method::Split => "split",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = LevyError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(Method::Fourier),
            "split" => Ok(Method::Split),
            _ => Err(LevyError::param("method", format!("expected fourier or split, got {s}"))),
        }
    }
}

/// `p_t` on a symmetric grid. Values are `p_t(x + shift)` with
/// `shift = t·b_r`, so the stored function is even even when `b ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub t: f64,
    pub grid: Grid1,
    pub values: Vec<f64>,
    /// Points whose value is below the method's noise floor.
    pub err_flags: Vec<bool>,
    pub method: Method,
    /// Drift shift `t·b_r` folded into the abscissa.
    pub shift: f64,
    /// Splitting radius (SPLIT only).
    pub r: Option<f64>,
    /// Mass unaccounted for by series truncation, leakage and the box.
    pub error_budget: f64,
    /// Negative values set to zero.
    pub clipped: usize,
}

impl DensityGrid {
    pub fn mass(&self) -> f64 {
        self.grid.dx * self.values.iter().sum::<f64>()
    }

    /// Linear interpolation, zero off the grid.
    pub fn at(&self, x: f64) -> f64 {
        FieldGrid {
            grid: self.grid,
            values: self.values.clone(),
        }
        .at(x)
    }

    pub fn value_at_index(&self, x: f64) -> Option<(f64, bool)> {
        self.grid.index_of(x).map(|j| (self.values[j], self.err_flags[j]))
    }
}

fn require_line(model: &LevyModel) -> Result<()> {
    if model.dim() != 1 {
        return Err(LevyError::Unsupported(format!(
            "grid densities are implemented for d = 1, model has d = {}",
            model.dim()
        )));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(LevyError::param("t", format!("must be positive, got {t}")));
    }
    Ok(())
}

/// Refuses unless condition (E) holds for the model.
pub fn require_condition_e(model: &LevyModel, table: &ExponentTable) -> Result<()> {
    let e = check_condition_e(model, table, None)?;
    if e.verdict != Verdict::Pass {
        return Err(LevyError::Precondition {
            condition: "E".into(),
            verdict: e.verdict.name().into(),
        });
    }
    Ok(())
}

/// Grid reaching far enough that `t·|ν̄_X| ≤ 1e-8` (at least `64h`, at most
/// `2000`). `Δx ≤ h(t)/16`, and also small enough that `t·Ψ(2π/Δx) ≥ 12`:
/// when large jumps dominate `h(t)`, the small-jump peak is much narrower.
pub fn default_grid(model: &LevyModel, table: &ExponentTable, t: f64) -> Result<Grid1> {
    check_t(t)?;
    let h = table.h_of_t(t)?.h;
    let mut dx = h / 16.0;
    if 12.0 / t <= table.psi_max() {
        dx = dx.min(2.0 * PI / table.psi_inverse(12.0 / t)?);
    }
    let mut x = (64.0 * h).max(4.0);
    while x < 2000.0 && t * model.tail_mass(x)? > 1e-8 {
        x *= 1.25;
    }
    Grid1::covering(dx, x.min(2000.0))
}

/// Relative level below which grid inversion from the tabulated exponent
/// is not trusted.
pub const FOURIER_FLOOR: f64 = 1e-6;
const MAX_FFT: usize = 1 << 25;
/// `t·Re Φ` at the Nyquist frequency of the inversion grid.
const NYQUIST_DECAY: f64 = 30.0;

/// Largest fine spacing dividing `dx` that resolves `e^{-t Re Φ}`.
fn fine_step(table: &ExponentTable, t: f64, dx: f64, extra: f64) -> Result<(f64, usize)> {
    let level = NYQUIST_DECAY / t;
    if level > table.psi_max() {
        return Err(LevyError::Unsupported(format!(
            "exponent stays below {level:.3e} on the table; use pointwise inversion"
        )));
    }
    let rho = table.psi_inverse(level)?;
    let target = (PI / rho).min(extra);
    let q = (dx / target).ceil().max(1.0) as usize;
    Ok((dx / q as f64, q))
}

fn flag_noise(values: &mut [f64], floor_rel: f64) -> (Vec<bool>, usize) {
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let mut clipped = 0;
    let flags = values
        .iter_mut()
        .map(|v| {
            if *v < 0.0 {
                clipped += 1;
                *v = 0.0;
            }
            *v < floor_rel * peak
        })
        .collect();
    (flags, clipped)
}

/// `p_t` by FFT inversion of `e^{-t Re Φ}` on a refinement of `grid`.
///
/// The far field is only accurate to about [`FOURIER_FLOOR`] of the peak;
/// points below that are flagged (use [`density_split`] there).
pub fn density_fourier(model: &LevyModel, table: &ExponentTable, t: f64, grid: &Grid1) -> Result<DensityGrid> {
    require_line(model)?;
    check_t(t)?;
    let h = table.h_of_t(t)?.h;
    let (dx_f, q) = fine_step(table, t, grid.dx, f64::INFINITY)?;
    let span = (4.0 * grid.x_max()).max(1000.0 * h);
    let size = ((span / dx_f).ceil() as usize).max(4 * grid.half * q + 2).next_power_of_two().max(1024);
    if size > MAX_FFT {
        return Err(LevyError::Unsupported(format!(
            "Fourier inversion needs an FFT of length {size}; use the split method"
        )));
    }
    let fine = invert_even(|xi| (-t * table.re_phi_interp(xi)).exp(), dx_f, size);
    let mid = size / 2;
    let mut values: Vec<f64> = (0..grid.len())
        .map(|j| fine[mid + j * q - grid.half * q])
        .collect();
    symmetrize(&mut values);
    let (err_flags, clipped) = flag_noise(&mut values, FOURIER_FLOOR);
    if clipped > 0 {
        log::debug!("fourier density: clipped {clipped} negative values");
    }
    let shift = t * model.drift().first().copied().unwrap_or(0.0);
    Ok(DensityGrid {
        t,
        grid: *grid,
        values,
        err_flags,
        method: Method::Fourier,
        shift,
        r: None,
        error_budget: 0.0,
        clipped,
    })
}

/// A value from [`density_pointwise`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointValue {
    pub x: f64,
    pub p: f64,
    pub err_flag: bool,
}

/// `p_t(x) = (1/π) ∫_0^∞ cos(ρx) e^{-tΦ(ρ)} dρ` by oscillatory quadrature,
/// for exponents that grow too slowly for grid inversion.
pub fn density_pointwise<E: Exponent + ?Sized>(e: &E, t: f64, xs: &[f64]) -> Result<Vec<PointValue>> {
    if e.dim() != 1 {
        return Err(LevyError::Unsupported(format!(
            "pointwise inversion is implemented for d = 1, exponent has d = {}",
            e.dim()
        )));
    }
    check_t(t)?;
    let w = |rho: f64| match e.re_phi(rho) {
        Ok(v) => (-t * v).exp(),
        Err(_) => f64::NAN,
    };
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-9,
        max_intervals: 4000,
    };
    Ok(crate::par::map(xs, |&x| {
        let x = x.abs();
        let value = if x == 0.0 {
            integrate_log(w, 0.0, f64::INFINITY, tol).map(|e| e.value)
        } else {
            let a = 1.0 / x;
            gauss_kronrod(|r| w(r) * (r * x).cos(), 0.0, a, tol).and_then(|near| {
                fourier_integral(w, a, f64::INFINITY, x, &[], tol).map(|far| near.value + far.re)
            })
        };
        match value {
            Ok(v) if v.is_finite() => PointValue {
                x,
                p: v.max(0.0) / PI,
                err_flag: v <= 0.0,
            },
            _ => PointValue {
                x,
                p: f64::NAN,
                err_flag: true,
            },
        }
    }))
}

/// `p̊_t` on a fine grid whose spacing divides `dx`, wide enough that the
/// density has dropped below `1e-13` of its peak at the edges.
///
/// The exponent is evaluated exactly at every FFT frequency: interpolating
/// the table leaves derivative jumps whose power-law ripples would sit far
/// above the super-exponential tail.
fn small_jump_fine(model: &LevyModel, t: f64, r: f64, dx: f64) -> Result<(FieldGrid, usize)> {
    let small = SmallJumps { model, r };
    let table = ExponentTable::with_range(&small, 1e-3, 1e9)?;
    let h = table.h_of_t(t).map(|s| s.h).unwrap_or(r);
    let (dx_f, q) = fine_step(&table, t, dx, h / 16.0)?;
    let mut size = (((32.0 * h.max(r)) / dx_f).ceil() as usize).next_power_of_two().max(1024);
    loop {
        if size > MAX_FFT {
            return Err(LevyError::Unsupported(format!(
                "small-jump density needs an FFT longer than {MAX_FFT}"
            )));
        }
        let dxi = 2.0 * PI / (size as f64 * dx_f);
        let samples = crate::par::map_range(size / 2 + 1, |k| {
            let rho = k as f64 * dxi;
            // beyond the table range the factor is below e^{-30}·(ρ/ρ_N)^α anyway
            small.re_phi(rho).map(|v| (-t * v).exp())
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let mut v = invert_even_samples(&samples, dx_f, size);
        let peak = v.iter().cloned().fold(0.0, f64::max);
        let edge = size / 8;
        let tail = v[..edge].iter().chain(&v[size - edge..]).cloned().fold(0.0, f64::max);
        if tail < 1e-13 * peak {
            for x in v.iter_mut() {
                if *x < 1e-13 * peak {
                    *x = 0.0;
                }
            }
            // index size/2 is the origin; keep a symmetric odd-length grid
            let half = size / 2 - 1;
            let mut values = v[1..].to_vec();
            symmetrize(&mut values);
            let grid = Grid1::new(dx_f, half)?;
            return Ok((FieldGrid { grid, values }, q));
        }
        size *= 2;
    }
}

fn symmetrize(v: &mut [f64]) {
    let n = v.len();
    for j in 0..n / 2 {
        let m = 0.5 * (v[j] + v[n - 1 - j]);
        v[j] = m;
        v[n - 1 - j] = m;
    }
}

/// `p̊_t`, the density of the small-jump part `|y| < r`, sampled on `grid`.
pub fn small_jump_density(model: &LevyModel, t: f64, r: f64, grid: &Grid1) -> Result<FieldGrid> {
    require_line(model)?;
    check_t(t)?;
    if !(r > 0.0) {
        return Err(LevyError::param("r", format!("must be positive, got {r}")));
    }
    let (fine, q) = small_jump_fine(model, t, r, grid.dx)?;
    let values = (0..grid.len())
        .map(|j| {
            let k = j as i64 - grid.half as i64;
            let i = fine.grid.half as i64 + k * q as i64;
            if i >= 0 && (i as usize) < fine.values.len() {
                fine.values[i as usize]
            } else {
                0.0
            }
        })
        .collect();
    Ok(FieldGrid { grid: *grid, values })
}

/// Cell masses of `p̊` on the coarse grid (`q` fine steps per cell).
fn coarse_kernel(fine: &FieldGrid, q: usize) -> Vec<f64> {
    let fh = fine.grid.half as i64;
    let k_max = fh / q as i64;
    let dx_f = fine.grid.dx;
    let q = q as i64;
    (-k_max..=k_max)
        .map(|k| {
            let c = k * q;
            let mut acc = 0.0;
            if q % 2 == 1 {
                for i in c - q / 2..=c + q / 2 {
                    if (-fh..=fh).contains(&i) {
                        acc += fine.values[(i + fh) as usize];
                    }
                }
            } else {
                for i in c - q / 2..=c + q / 2 {
                    if (-fh..=fh).contains(&i) {
                        let w = if i == c - q / 2 || i == c + q / 2 { 0.5 } else { 1.0 };
                        acc += w * fine.values[(i + fh) as usize];
                    }
                }
            }
            acc * dx_f
        })
        .collect()
}

/// The two factors of the splitting at radius `r`.
#[derive(Debug, Clone)]
pub struct SplitParts {
    pub r: f64,
    /// `p̊_t` on its own fine grid.
    pub small: FieldGrid,
    /// `P̄_t` on the output grid.
    pub large: CompoundPoisson,
    pub drift: f64,
}

/// Factors of the splitting (untilted) for inspection.
pub fn split_parts(model: &LevyModel, t: f64, r: f64, grid: &Grid1) -> Result<SplitParts> {
    require_line(model)?;
    check_t(t)?;
    let (small, _) = small_jump_fine(model, t, r, grid.dx)?;
    let measure = TruncatedMeasure::new(model, r, *grid)?;
    let large = compound_poisson(&measure, t, None)?;
    Ok(SplitParts {
        r,
        small,
        large,
        drift: model.drift().first().copied().unwrap_or(0.0),
    })
}

/// Tilt used for exponential tempering (`β = 1`).
fn tilt_for(model: &LevyModel, grid: &Grid1) -> f64 {
    let s = model.profile().spec();
    if s.m > 0.0 && s.beta == 1.0 {
        (s.m - 4.0 / grid.x_max()).max(0.0)
    } else {
        0.0
    }
}

/// `p_t` as `p̊_t ∗ P̄_t` at splitting radius `r` (default `h(t)`).
///
/// The large-jump series runs on `grid`; `p̊_t` is integrated over the grid
/// cells from a finer inversion. For exponential tempering the whole
/// computation is done on `e^{θx}`-tilted functions, so values in the far
/// right tail keep their relative accuracy; the left half is mirrored.
pub fn density_split(
    model: &LevyModel,
    table: &ExponentTable,
    t: f64,
    grid: &Grid1,
    r: Option<f64>,
) -> Result<DensityGrid> {
    density_split_tilted(model, table, t, grid, r, tilt_for(model, grid))
}

/// [`density_split`] with an explicit tilt `θ ≥ 0`.
pub fn density_split_tilted(
    model: &LevyModel,
    table: &ExponentTable,
    t: f64,
    grid: &Grid1,
    r: Option<f64>,
    theta: f64,
) -> Result<DensityGrid> {
    require_line(model)?;
    check_t(t)?;
    let r = match r {
        Some(r) if r > 0.0 => r,
        Some(r) => return Err(LevyError::param("r", format!("must be positive, got {r}"))),
        None => table.h_of_t(t)?.h,
    };
    let (fine, q) = small_jump_fine(model, t, r, grid.dx)?;
    let kernel = coarse_kernel(&fine, q);
    let kh = (kernel.len() / 2) as i64;
    let measure = TruncatedMeasure::new(model, r, *grid)?;
    let cp = compound_poisson_tilted(&measure, t, theta, None)?;
    let n = grid.len();
    let half = grid.half as i64;
    let dx = grid.dx;
    let kt: Vec<f64> = kernel
        .iter()
        .enumerate()
        .map(|(i, k)| k * (theta * (i as f64 - kh as f64) * dx).exp())
        .collect();
    let fh = fine.grid.half as i64;
    let right: Vec<f64> = crate::par::map_range(grid.half + 1, |jj| {
        let j = jj as i64;
        // atom part at the point itself
        let fi = fh + j * q as i64;
        let mut v = if fi <= 2 * fh { cp.atom * fine.values[fi as usize] } else { 0.0 };
        let mut acc = 0.0;
        for k in -kh..=kh {
            let i = j - k + half;
            if i >= 0 && (i as usize) < n {
                acc += cp.masses[i as usize] * kt[(k + kh) as usize];
            }
        }
        v += (acc / dx) * (-theta * j as f64 * dx).exp();
        v
    });
    let mut values = vec![0.0; n];
    for (k, &v) in right.iter().enumerate() {
        values[grid.half + k] = v;
        values[grid.half - k] = v;
    }
    // FFT noise of the tilted series, mapped back
    let peak = cp.masses.iter().cloned().fold(0.0, f64::max) / dx;
    let err_flags: Vec<bool> = (0..n)
        .map(|j| {
            let x = grid.x(j).abs();
            let floor = 1e-13 * peak * (-theta * x).exp();
            values[j] < floor || !values[j].is_finite()
        })
        .collect();
    let error_budget = cp.leftover + cp.leaked.abs() + t * measure.outside;
    if error_budget > 1e-3 {
        log::warn!("split density at t = {t}: error budget {error_budget:.3e}");
    }
    let shift = t * model.drift().first().copied().unwrap_or(0.0);
    Ok(DensityGrid {
        t,
        grid: *grid,
        values,
        err_flags,
        method: Method::Split,
        shift,
        r: Some(r),
        error_budget,
        clipped: 0,
    })
}

/// Chapman–Kolmogorov defect of the split density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupDefect {
    /// `Σ|p_{2t} - p_t∗p_t| / Σ p_{2t}` over the inner half of the grid.
    pub relative_l1: f64,
    /// `max |p_{2t} - p_t∗p_t| / max p_{2t}` over the same points.
    pub relative_sup: f64,
    /// Mass of `p_t ∗ p_t` pushed off the grid.
    pub leaked: f64,
    pub inconclusive: bool,
}

/// Compares `p_{2t}` with `p_t ∗ p_t`, both from [`density_split`], on a
/// common grid with the resolution of `t` and the extent of `2t`.
pub fn semigroup_check(model: &LevyModel, table: &ExponentTable, t: f64, grid: Option<&Grid1>) -> Result<SemigroupDefect> {
    let grid = match grid {
        Some(g) => *g,
        None => {
            let fine = default_grid(model, table, t)?;
            let wide = default_grid(model, table, 2.0 * t)?;
            Grid1::covering(fine.dx, wide.x_max())?
        }
    };
    let p1 = density_split(model, table, t, &grid, None)?;
    let p2 = density_split(model, table, 2.0 * t, &grid, None)?;
    let dx = grid.dx;
    let cells: Vec<f64> = p1.values.iter().map(|v| v * dx).collect();
    let (conv, leaked) = LinearConv::new(&cells).apply(&cells);
    let lo = grid.half - grid.half / 2;
    let hi = grid.half + grid.half / 2;
    let (mut num, mut den, mut sup_d, mut sup_p) = (0.0, 0.0, 0.0f64, 0.0f64);
    for j in lo..=hi {
        let c = conv[j] / dx;
        let d = (p2.values[j] - c).abs();
        num += d;
        den += p2.values[j];
        sup_d = sup_d.max(d);
        sup_p = sup_p.max(p2.values[j]);
    }
    Ok(SemigroupDefect {
        relative_l1: num / den,
        relative_sup: sup_d / sup_p,
        leaked,
        inconclusive: leaked > 1e-4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::GeometricStable;
    use crate::profiles::{KappaClass, ProfileSpec};
    use approx::assert_relative_eq;

    fn model(beta: f64, delta: f64) -> LevyModel {
        let kappa = KappaClass::PolyLog { alpha1: 0.5, alpha2: 0.0 };
        LevyModel::symmetric(1, ProfileSpec { kappa, m: 1.0, beta, delta, c: None }).unwrap()
    }

    #[test]
    fn fourier_symmetric_and_normalized() {
        let m = model(1.0, 1.25);
        let tab = ExponentTable::for_model(&m).unwrap();
        let g = default_grid(&m, &tab, 0.1).unwrap();
        let p = density_fourier(&m, &tab, 0.1, &g).unwrap();
        assert!((p.mass() - 1.0).abs() < 5e-4, "mass {}", p.mass());
        for j in 0..g.half {
            assert_eq!(p.values[j], p.values[g.len() - 1 - j]);
        }
        assert!(p.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn small_jump_density_is_normalized_and_narrow() {
        let m = model(1.0, 1.25);
        let tab = ExponentTable::for_model(&m).unwrap();
        let h = tab.h_of_t(0.1).unwrap().h;
        let g = Grid1::covering(h / 16.0, 40.0 * h).unwrap();
        for r in [h, 2.0 * h] {
            let p = small_jump_density(&m, 0.1, r, &g).unwrap();
            assert!((p.mass() - 1.0).abs() < 5e-4, "mass {}", p.mass());
            // negligible beyond a few multiples of h
            assert!(p.at(20.0 * h) < 1e-6 * p.at(0.0));
        }
    }

    #[test]
    fn parts_are_probability_measures() {
        let m = model(1.0, 1.25);
        let tab = ExponentTable::for_model(&m).unwrap();
        let g = default_grid(&m, &tab, 0.1).unwrap();
        let s = split_parts(&m, 0.1, tab.h_of_t(0.1).unwrap().h, &g).unwrap();
        assert!((s.small.mass() - 1.0).abs() < 5e-4);
        assert!((s.large.total_mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn split_matches_fourier_near_origin() {
        let m = model(1.0, 1.25);
        let tab = ExponentTable::for_model(&m).unwrap();
        let t = 0.1;
        let g = default_grid(&m, &tab, t).unwrap();
        let f = density_fourier(&m, &tab, t, &g).unwrap();
        let s = density_split(&m, &tab, t, &g, None).unwrap();
        let h = tab.h_of_t(t).unwrap().h;
        for j in 0..g.len() {
            if g.x(j).abs() <= 5.0 * h {
                let gap = (f.values[j] - s.values[j]).abs() / f.values[j];
                assert!(gap < 1e-2, "x={} gap {gap}", g.x(j));
            }
        }
        assert!((s.mass() - 1.0).abs() < 5e-4);
    }

    #[test]
    fn pointwise_matches_gaussian() {
        struct Brownian;
        impl Exponent for Brownian {
            fn dim(&self) -> usize {
                1
            }
            fn re_phi(&self, rho: f64) -> Result<f64> {
                Ok(rho * rho)
            }
        }
        // e^{-tρ²} is the transform of N(0, 2t)
        let t = 0.5;
        let pts = density_pointwise(&Brownian, t, &[0.0, 0.3, 1.0, 2.0]).unwrap();
        for p in pts {
            let exact = (-p.x * p.x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
            assert_relative_eq!(p.p, exact, max_relative = 1e-7);
        }
    }

    #[test]
    fn geometric_stable_is_finite_near_origin() {
        let g = GeometricStable { alpha: 1.0, d: 1 };
        let pts = density_pointwise(&g, 0.2, &[1e-3, 1e-2]).unwrap();
        assert!(pts.iter().all(|p| p.p.is_finite() && p.p > 0.0 && !p.err_flag));
        assert!(pts[0].p > pts[1].p);
    }

    #[test]
    fn rejects_higher_dimension() {
        let kappa = KappaClass::PolyLog { alpha1: 0.5, alpha2: 0.0 };
        let m = LevyModel::symmetric(2, ProfileSpec { kappa, m: 1.0, beta: 1.0, delta: 2.0, c: None }).unwrap();
        let g = Grid1::covering(0.01, 1.0).unwrap();
        assert!(matches!(small_jump_density(&m, 0.1, 0.1, &g), Err(LevyError::Unsupported(_))));
    }
}
