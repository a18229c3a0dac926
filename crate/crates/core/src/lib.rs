//! Transition densities of pure-jump Lévy convolution semigroups with radial
//! Lévy densities, together with numerical diagnostics for their small-time
//! two-sided bounds.
//!
//! The model is a radial profile `f` (a singular small-jump part glued to a
//! tempered tail), dimension `d` and a drift `b`. From it the crate computes
//! the characteristic exponent, its radial maximal function `Ψ`, the time
//! scale `h(t) = 1/Ψ⁻¹(1/t)`, the density `p_t` (by Fourier inversion and by
//! the small/large-jump splitting) and grid-based evidence for the
//! convolution and regularity conditions that govern sharp bounds.

pub mod bounds;
pub mod convolution;
pub mod density;
pub mod error;
pub mod exponent;
pub mod grid;
pub mod io;
pub mod par;
pub mod profiles;
pub mod quad;
pub mod spectral;
pub mod verdict;

pub use error::{LevyError, Result};
