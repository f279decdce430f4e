//! Taylor data of the compactified potential profile W and its Borel transform.

use crate::{Error, Result};
use num_complex::Complex64;

/// Taylor coefficients f_n of W at 0 together with the factorial bound
/// parameters (K, sigma) of the Gevrey-2 class: |f_n| <= K sigma^{-n} n!.
#[derive(Debug, Clone)]
pub struct GevreySeries {
    coeffs: Vec<Complex64>,
    bound_k: f64,
    bound_sigma: f64,
    order_a: f64,
}

/// Borel partial sum at a point together with the geometric tail bound
/// K (|zeta|/sigma)^{M+1} / (1 - |zeta|/sigma) carried by the stored data.
#[derive(Debug, Clone, Copy)]
pub struct BorelEval {
    pub value: Complex64,
    pub tail_bound: f64,
}

impl GevreySeries {
    /// Build a series, checking positivity of the bound parameters and the
    /// factorial bound on every stored coefficient (in log space, so long
    /// coefficient lists do not overflow).
    pub fn new(coeffs: Vec<Complex64>, bound_k: f64, bound_sigma: f64) -> Result<Self> {
        if !(bound_k > 0.0) || !(bound_sigma > 0.0) {
            return Err(Error::Parameter(format!(
                "Gevrey bound parameters must be positive, got K={bound_k}, sigma={bound_sigma}"
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::Parameter("series needs at least f_0".into()));
        }
        let ln_k = bound_k.ln();
        let ln_sigma = bound_sigma.ln();
        for (n, f) in coeffs.iter().enumerate() {
            let mag = f.norm();
            if mag == 0.0 {
                continue;
            }
            // |f_n| <= K sigma^{-n} n!  checked with a small relative slack
            let bound_log = ln_k - n as f64 * ln_sigma + ln_factorial(n);
            if mag.ln() > bound_log + 1e-12 {
                return Err(Error::Parameter(format!(
                    "coefficient f_{n} violates |f_n| <= K sigma^-n n! (|f_{n}| = {mag:.6e})"
                )));
            }
        }
        Ok(GevreySeries {
            coeffs,
            bound_k,
            bound_sigma,
            order_a: 2.0,
        })
    }

    /// A profile that is exactly a polynomial. Pads trailing zeros so that
    /// `taylor_eval` recognizes the sum as exact at every point.
    pub fn polynomial(mut coeffs: Vec<Complex64>, bound_k: f64, bound_sigma: f64) -> Result<Self> {
        coeffs.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), 4));
        Self::new(coeffs, bound_k, bound_sigma)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn bound_k(&self) -> f64 {
        self.bound_k
    }

    pub fn bound_sigma(&self) -> f64 {
        self.bound_sigma
    }

    pub fn order_a(&self) -> f64 {
        self.order_a
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every stored coefficient vanishes (the degenerate W = 0).
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Borel transform g(zeta) = sum f_n zeta^n / n! over the stored
    /// coefficients. Requires |zeta| < sigma, where the factorial bound makes
    /// the full series geometrically convergent.
    pub fn borel_eval(&self, zeta: Complex64) -> Result<BorelEval> {
        let r = zeta.norm();
        if r >= self.bound_sigma {
            return Err(Error::Domain(format!(
                "outside Borel disk: |zeta| = {r} >= sigma = {}",
                self.bound_sigma
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0); // zeta^n / n!
        for (n, f) in self.coeffs.iter().enumerate() {
            if n > 0 {
                pow *= zeta / n as f64;
            }
            acc += f * pow;
        }
        let q = r / self.bound_sigma;
        let m = self.coeffs.len() - 1;
        let tail_bound = self.bound_k * q.powi(m as i32 + 1) / (1.0 - q);
        Ok(BorelEval {
            value: acc,
            tail_bound,
        })
    }

    /// Direct Taylor summation of W(y) = sum f_n y^n, with a reliability
    /// check: the stored terms must have decayed below roundoff relative to
    /// the partial sum before the list runs out. Points where that fails are
    /// outside the reliable radius of the stored data.
    pub fn taylor_eval(&self, y: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut small_run = 0usize;
        let mut scale = 0.0f64;
        for f in &self.coeffs {
            let term = f * pow;
            acc += term;
            scale = scale.max(acc.norm());
            pow *= y;
            if term.norm() <= 1e-17 * scale.max(1e-300) {
                small_run += 1;
                if small_run >= 4 {
                    return Ok(acc);
                }
            } else {
                small_run = 0;
            }
        }
        // list exhausted: accept only if the trailing terms were negligible
        let m = self.coeffs.len();
        let tail: f64 = self.coeffs[m.saturating_sub(3)..]
            .iter()
            .enumerate()
            .map(|(i, f)| (f * y.powu((m.saturating_sub(3) + i) as u32)).norm())
            .fold(0.0, f64::max);
        if tail <= 1e-13 * scale.max(1e-300) {
            Ok(acc)
        } else {
            Err(Error::Domain(format!(
                "outside reliable Taylor radius at |y| = {:.6} (trailing term {:.3e} vs sum scale {:.3e})",
                y.norm(),
                tail,
                scale
            )))
        }
    }

    /// Partial sum sum_{n < n_terms} f_n z^n used by the asymptotic-defect
    /// probe. `n_terms` may not exceed the stored length.
    pub fn partial_sum(&self, z: Complex64, n_terms: usize) -> Result<Complex64> {
        if n_terms > self.coeffs.len() {
            return Err(Error::Parameter(format!(
                "partial sum of {n_terms} terms requested, only {} stored",
                self.coeffs.len()
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for f in &self.coeffs[..n_terms] {
            acc += f * pow;
            pow *= z;
        }
        Ok(acc)
    }
}

/// ln(n!) via lgamma-free accumulation; exact enough for bound checks.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}
