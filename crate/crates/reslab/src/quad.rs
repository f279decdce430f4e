//! Gauss-Legendre rules and a small adaptive quadrature used by oracles and
//! the oscillatory transforms.

use num_complex::Complex64;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights from Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            let (_, d) = legendre_with_deriv(n, 0.0);
            nodes[n / 2] = 0.0;
            weights[n / 2] = 2.0 / (d * d);
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate a complex-valued function over [a, b].
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Breakpoints on [0, len] graded geometrically toward 0, e.g. for Laplace
/// integrands that peak at the origin. Returns `panels + 1` points.
pub fn graded_breakpoints(len: f64, panels: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(panels + 1);
    pts.push(0.0);
    for p in (0..panels).rev() {
        pts.push(len * 0.5f64.powi(p as i32));
    }
    pts
}

/// Composite Gauss-Legendre over explicit breakpoints.
pub fn composite_gl<F: FnMut(f64) -> Complex64>(
    rule: &GaussLegendre,
    breaks: &[f64],
    mut f: F,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        acc += rule.integrate(w[0], w[1], &mut f);
    }
    acc
}

/// Adaptive quadrature by panel bisection, comparing an n-point rule against
/// a 2n-point rule on each panel. Used as an independent oracle and for the
/// windowed Fourier transform away from canned rules.
pub fn adaptive_quad<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> crate::Result<Complex64> {
    static RULES: std::sync::OnceLock<(GaussLegendre, GaussLegendre)> = std::sync::OnceLock::new();
    let (coarse, fine) = RULES.get_or_init(|| (GaussLegendre::new(16), GaussLegendre::new(32)));
    let mut budget = 200_000usize;
    adaptive_rec(f, a, b, tol, max_depth, coarse, fine, &mut budget)
}

fn adaptive_rec<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    coarse: &GaussLegendre,
    fine: &GaussLegendre,
    budget: &mut usize,
) -> crate::Result<Complex64> {
    let c = coarse.integrate(a, b, |x| f(x));
    let q = fine.integrate(a, b, |x| f(x));
    *budget = budget.saturating_sub(48);
    // absolute target, with a relative escape so that tolerance halving does
    // not chase panels below their roundoff floor
    let err = (q - c).norm();
    let converged = err <= tol || err <= 5e-15 * (q.norm() + c.norm());
    if converged || depth == 0 {
        if depth == 0 && !converged {
            return Err(crate::Error::Accuracy(format!(
                "adaptive quadrature did not converge on [{a}, {b}]: est err {err:.3e} > tol {tol:.3e}"
            )));
        }
        return Ok(q);
    }
    if *budget == 0 {
        return Err(crate::Error::Accuracy(
            "adaptive quadrature node budget exceeded".into(),
        ));
    }
    let mid = 0.5 * (a + b);
    let left = adaptive_rec(f, a, mid, 0.5 * tol, depth - 1, coarse, fine, budget)?;
    let right = adaptive_rec(f, mid, b, 0.5 * tol, depth - 1, coarse, fine, budget)?;
    Ok(left + right)
}
