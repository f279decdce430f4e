//! Scattering resonances of P = D_x^2 + V on [1, infinity) with a Dirichlet
//! condition at x = 1, for potentials V(x) = x^{-gamma} W(1/x) whose profile
//! W is Gevrey-2 at the compactified boundary.
//!
//! The toolkit splits V into an exponentially decaying part V1 and a
//! sector-analytic part V2 by a truncated Borel-Laplace sum, continues the
//! resolvent by complex scaling of the analytic part, and locates resonances
//! three ways: as eigenvalues of the scaled operator, as zeros of the
//! outgoing Dirichlet trace (shooting), and as zeros of the Fredholm
//! determinant of I + V1 R_{V2}(lambda). The three detectors cross-validate
//! each other; a diagnostics module checks the Fourier-side Gevrey rates
//! that govern where continuation is possible.

pub mod cheb;
pub mod cli;
pub mod contour;
pub mod diagnostics;
pub mod error;
pub mod fredholm;
pub mod operator;
pub mod potential;
pub mod quad;
pub mod regions;
pub mod resonance;
pub mod series;
pub mod shooting;

pub use error::{Error, Result};
