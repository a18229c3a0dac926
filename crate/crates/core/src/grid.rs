//! Sampling grids: log-spaced radial abscissae and uniform symmetric
//! spatial grids.

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};

/// `n` points from `a` to `b`, equally spaced in `ln`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            let step = (lb - la) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| (la + step * i as f64).exp()).collect();
            // pin the ends exactly
            v[0] = a;
            v[n - 1] = b;
            v
        }
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return f64::NAN;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    sxy / sxx
}

/// Least-squares slope of `ln y` against `ln x`; nonpositive entries are skipped.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    ls_slope(&lx, &ly)
}

/// Radial abscissae with sampled values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialGrid {
    pub fn log_spaced(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > a && n >= 2) {
            return Err(LevyError::param("grid", format!("need 0 < a < b and n >= 2, got [{a}, {b}], n = {n}")));
        }
        let radii = log_space(a, b, n);
        let values = vec![0.0; n];
        Ok(RadialGrid { radii, values })
    }

    pub fn sample<F: Fn(f64) -> f64 + Sync>(mut self, f: F) -> Self {
        let r = &self.radii;
        self.values = crate::par::map(r, |&s| f(s));
        self
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Uniform grid `x_j = (j - half)·dx`, `j = 0..=2·half`, symmetric about 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1 {
    pub dx: f64,
    pub half: usize,
}

impl Grid1 {
    pub fn new(dx: f64, half: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(LevyError::param("dx", format!("must be positive, got {dx}")));
        }
        Ok(Grid1 { dx, half })
    }

    /// Smallest symmetric grid with spacing `dx` reaching `x_max`.
    pub fn covering(dx: f64, x_max: f64) -> Result<Self> {
        Self::new(dx, (x_max / dx).ceil().max(1.0) as usize)
    }

    pub fn len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.half as f64) * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.half as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    /// Index of the node nearest to `x`, if inside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let j = (x / self.dx).round() + self.half as f64;
        if j >= 0.0 && j < self.len() as f64 {
            Some(j as usize)
        } else {
            None
        }
    }
}

/// A function sampled on a [`Grid1`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub grid: Grid1,
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn zeros(grid: Grid1) -> Self {
        FieldGrid {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// `Δx·Σ values`.
    pub fn mass(&self) -> f64 {
        self.grid.dx * self.values.iter().sum::<f64>()
    }

    /// Linear interpolation; zero outside the grid.
    pub fn at(&self, x: f64) -> f64 {
        let u = x / self.grid.dx + self.grid.half as f64;
        if u < 0.0 || u > (self.grid.len() - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.grid.len() - 2);
        let w = u - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_space_ends_and_ratio() {
        let v = log_space(1e-2, 1e2, 5);
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 1e-2);
        assert_eq!(v[4], 1e2);
        assert_relative_eq!(v[2], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn slopes() {
        let x: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.5)).collect();
        assert_relative_eq!(loglog_slope(&x, &y), -1.5, max_relative = 1e-12);
        assert!(ls_slope(&[1.0], &[2.0]).is_nan());
    }

    #[test]
    fn grid_indexing() {
        let g = Grid1::new(0.25, 8).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g.x(8), 0.0);
        assert_eq!(g.index_of(-2.0), Some(0));
        assert_eq!(g.index_of(0.26), Some(9));
        assert_eq!(g.index_of(2.2), None);
        let mut f = FieldGrid::zeros(g);
        f.values[8] = 4.0;
        assert_relative_eq!(f.mass(), 1.0);
        assert_relative_eq!(f.at(0.125), 2.0);
        assert_eq!(f.at(5.0), 0.0);
    }
}
