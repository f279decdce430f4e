//! Potentials on [1, infinity) and their split into an exponentially decaying
//! part V1 and a sector-analytic part V2 via the truncated Borel-Laplace
//! (Watson) sum of the profile series.

use crate::quad::{composite_gl, graded_breakpoints, GaussLegendre};
use crate::series::GevreySeries;
use crate::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

pub type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Default Laplace truncation point as a fraction of sigma.
pub const RHO1_FRACTION_DEFAULT: f64 = 0.9;
/// Composite quadrature defaults for the Watson integral.
pub const WATSON_NODES_DEFAULT: usize = 16;
pub const WATSON_PANELS_DEFAULT: usize = 8;
/// Relative tolerance of the decay-rate certificate.
pub const FIT_TOL: f64 = 0.05;
/// Samples with |v| below this are treated as decayed to machine zero.
pub const UNDERFLOW_FLOOR: f64 = 1e-280;

/// A potential on [1, infinity) with Dirichlet point at x = 1.
#[derive(Clone)]
pub enum PotentialSpec {
    /// V(x) = x^{-gamma_pow} W(1/x) with W given by its Taylor data.
    GevreyCompactified { series: GevreySeries, gamma_pow: u8 },
    /// V given in closed form, evaluable at complex arguments in the sector.
    /// `tail` optionally carries the Taylor data of the profile W for
    /// asymptotic (outgoing-solution) initialization.
    ClosedForm {
        eval: ComplexFn,
        gamma_pow: u8,
        tail: Option<GevreySeries>,
        label: String,
    },
    /// Piecewise-linear table on [1, x_supp], identically zero beyond.
    TabulatedCompact {
        xs: Vec<f64>,
        vs: Vec<f64>,
        x_supp: f64,
    },
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::GevreyCompactified { series, gamma_pow } => f
                .debug_struct("GevreyCompactified")
                .field("terms", &series.len())
                .field("sigma", &series.bound_sigma())
                .field("gamma_pow", gamma_pow)
                .finish(),
            PotentialSpec::ClosedForm { gamma_pow, label, .. } => f
                .debug_struct("ClosedForm")
                .field("label", label)
                .field("gamma_pow", gamma_pow)
                .finish(),
            PotentialSpec::TabulatedCompact { xs, x_supp, .. } => f
                .debug_struct("TabulatedCompact")
                .field("samples", &xs.len())
                .field("x_supp", x_supp)
                .finish(),
        }
    }
}

impl PotentialSpec {
    pub fn tabulated(xs: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if xs.len() != vs.len() || xs.len() < 2 {
            return Err(Error::Parameter(
                "tabulated potential needs matching xs/vs with at least 2 samples".into(),
            ));
        }
        if (xs[0] - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter("tabulated domain must start at x = 1".into()));
        }
        if !xs.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Parameter("tabulated xs must be strictly increasing".into()));
        }
        let x_supp = *xs.last().unwrap();
        Ok(PotentialSpec::TabulatedCompact { xs, vs, x_supp })
    }

    /// Square well of height v0 on [1, b], zero beyond.
    pub fn square_well(v0: f64, b: f64) -> Self {
        PotentialSpec::TabulatedCompact {
            xs: vec![1.0, b],
            vs: vec![v0, v0],
            x_supp: b,
        }
    }

    pub fn gamma_pow(&self) -> u8 {
        match self {
            PotentialSpec::GevreyCompactified { gamma_pow, .. } => *gamma_pow,
            PotentialSpec::ClosedForm { gamma_pow, .. } => *gamma_pow,
            PotentialSpec::TabulatedCompact { .. } => 1,
        }
    }

    /// End of support for compactly supported potentials.
    pub fn x_supp(&self) -> Option<f64> {
        match self {
            PotentialSpec::TabulatedCompact { x_supp, .. } => Some(*x_supp),
            _ => None,
        }
    }

    /// Taylor data of the profile W for V(x) = x^{-gamma} W(1/x), when known.
    pub fn tail_series(&self) -> Option<&GevreySeries> {
        match self {
            PotentialSpec::GevreyCompactified { series, .. } => Some(series),
            PotentialSpec::ClosedForm { tail, .. } => tail.as_ref(),
            PotentialSpec::TabulatedCompact { .. } => None,
        }
    }

    /// Points where the potential is not analytic (panel breaks for the
    /// spectral discretization).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            PotentialSpec::TabulatedCompact { xs, .. } => xs.clone(),
            _ => Vec::new(),
        }
    }

    /// True when the potential can be evaluated at complex points directly.
    pub fn supports_complex_eval(&self) -> bool {
        !matches!(self, PotentialSpec::TabulatedCompact { .. })
    }
}

/// Value of the potential at a point. Real points need x >= 1; complex points
/// are admitted for closed forms and for series data wherever the Taylor sum
/// of W at 1/z is reliable.
pub fn potential_eval(spec: &PotentialSpec, point: Complex64) -> Result<Complex64> {
    let on_axis = point.im == 0.0;
    match spec {
        PotentialSpec::GevreyCompactified { series, gamma_pow } => {
            if on_axis && point.re < 1.0 {
                return Err(Error::Domain(format!(
                    "potential domain starts at x = 1, got {}",
                    point.re
                )));
            }
            if point.norm() == 0.0 {
                return Err(Error::Domain("potential_eval at z = 0".into()));
            }
            let y = point.inv();
            let w = series.taylor_eval(y)?;
            Ok(point.powi(-(*gamma_pow as i32)) * w)
        }
        PotentialSpec::ClosedForm { eval, .. } => Ok(eval(point)),
        PotentialSpec::TabulatedCompact { xs, vs, x_supp } => {
            if !on_axis {
                return Err(Error::Domain(
                    "tabulated potential is only defined on the real axis".into(),
                ));
            }
            let x = point.re;
            if x < 1.0 {
                return Err(Error::Domain(format!("potential domain starts at x = 1, got {x}")));
            }
            if x > *x_supp {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let j = match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
                Ok(j) => return Ok(Complex64::new(vs[j], 0.0)),
                Err(j) => j,
            };
            let (x0, x1) = (xs[j - 1], xs[j]);
            let t = (x - x0) / (x1 - x0);
            Ok(Complex64::new(vs[j - 1] * (1.0 - t) + vs[j] * t, 0.0))
        }
    }
}

/// Truncated Laplace (Watson) sum W2(z) = z^{-1} int_0^{rho1} g(zeta)
/// e^{-zeta/z} d zeta by composite Gauss-Legendre with panels graded toward
/// zeta = 0.
pub fn watson_w2_eval(series: &GevreySeries, rho1: f64, z: Complex64) -> Result<Complex64> {
    watson_w2_eval_with(series, rho1, z, WATSON_NODES_DEFAULT, WATSON_PANELS_DEFAULT)
}

pub fn watson_w2_eval_with(
    series: &GevreySeries,
    rho1: f64,
    z: Complex64,
    nodes: usize,
    panels: usize,
) -> Result<Complex64> {
    check_rho1(series, rho1)?;
    if !(z.inv().re > 0.0) {
        return Err(Error::Domain(format!(
            "Watson sum needs Re(1/z) > 0, got z = {z}"
        )));
    }
    let rule = GaussLegendre::new(nodes);
    let breaks = graded_breakpoints(rho1, panels);
    let inv_z = z.inv();
    let mut ok = Ok(());
    let integral = composite_gl(&rule, &breaks, |zeta| {
        match series.borel_eval(Complex64::new(zeta, 0.0)) {
            Ok(b) => b.value * (-zeta * inv_z).exp(),
            Err(e) => {
                ok = Err(e);
                Complex64::new(0.0, 0.0)
            }
        }
    });
    ok?;
    Ok(integral * inv_z)
}

fn check_rho1(series: &GevreySeries, rho1: f64) -> Result<()> {
    if !(rho1 > 0.0) || rho1 >= series.bound_sigma() {
        return Err(Error::Parameter(format!(
            "Laplace truncation point must satisfy 0 < rho1 < sigma = {}, got {rho1}",
            series.bound_sigma()
        )));
    }
    Ok(())
}

/// Defect of the truncated asymptotic expansion of W2 together with the
/// a-priori bound from the (K, sigma, rho1) error chain:
///
///   |W2(z) - sum_{n<N} f_n z^n|
///     <= K eps^{-1} |z|^N N! [ (sigma/(sigma-rho1) + N) (eps sigma)^{-N} ]
///        + K eps^{-1} N e^{-eps rho1 / |z|},     eps = cos(arg z).
///
/// Returns (error, bound); the caller asserts error <= bound.
pub fn asymptotic_defect(
    series: &GevreySeries,
    rho1: f64,
    z: Complex64,
    n: usize,
) -> Result<(f64, f64)> {
    check_rho1(series, rho1)?;
    if n > series.len() {
        return Err(Error::Parameter(format!(
            "defect order {n} exceeds stored coefficients {}",
            series.len()
        )));
    }
    let eps = (z.arg()).cos();
    if eps <= 0.0 {
        return Err(Error::Domain("asymptotic defect needs cos(arg z) > 0".into()));
    }
    let w2 = watson_w2_eval(series, rho1, z)?;
    let partial = series.partial_sum(z, n)?;
    let error = (w2 - partial).norm();

    let k = series.bound_k();
    let sigma = series.bound_sigma();
    let r = z.norm();
    let nf = n as f64;
    // |z|^N N! (eps sigma)^{-N} in log space
    let core = (nf * r.ln() + crate::series::ln_factorial(n) - nf * (eps * sigma).ln()).exp();
    let bound = k / eps * core * (sigma / (sigma - rho1) + nf)
        + k / eps * nf * (-eps * rho1 / r).exp();
    Ok((error, bound))
}

/// Least-squares decay rate of |v| against x: the slope of -log|v|.
/// Samples that have decayed below the underflow floor are dropped; the fit
/// runs over the surviving suffix-most block.
pub fn fit_decay_rate(samples: &[(f64, Complex64)]) -> Result<f64> {
    let kept: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, v)| v.norm() > UNDERFLOW_FLOOR)
        .map(|(x, v)| (*x, -v.norm().ln()))
        .collect();
    if kept.is_empty() {
        return Err(Error::Fit("decayed to machine zero".into()));
    }
    if kept.len() < 8 {
        return Err(Error::Fit(format!(
            "need at least 8 usable samples for the decay fit, got {}",
            kept.len()
        )));
    }
    if !samples.windows(2).all(|w| w[1].0 > w[0].0) {
        return Err(Error::Parameter("decay-fit samples must have increasing x".into()));
    }
    let n = kept.len() as f64;
    let sx: f64 = kept.iter().map(|(x, _)| x).sum();
    let sy: f64 = kept.iter().map(|(_, y)| y).sum();
    let sxx: f64 = kept.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = kept.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::Fit("degenerate abscissas in decay fit".into()));
    }
    Ok((n * sxy - sx * sy) / denom)
}

/// The pair (V1, V2) realized as samplers, with the Laplace truncation point
/// and the fitted decay certificate.
#[derive(Clone)]
pub struct Decomposition {
    spec: PotentialSpec,
    rho1: f64,
    epsilon_sector: f64,
    gamma_pow: u8,
    /// Borel transform values at the Laplace quadrature nodes.
    g_nodes: Vec<Complex64>,
    zeta_nodes: Vec<f64>,
    zeta_weights: Vec<f64>,
    quad_nodes: usize,
    quad_panels: usize,
    /// Decay rate of the W-variable remainder W1(1/x) = x^gamma V1(x); None
    /// for the degenerate zero potential and for compactly supported V1.
    pub fitted_decay: Option<f64>,
    /// Compact support end when V1 is compactly supported (degenerate split).
    v1_supp: Option<f64>,
    degenerate_zero: bool,
}

impl fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Decomposition")
            .field("rho1", &self.rho1)
            .field("epsilon_sector", &self.epsilon_sector)
            .field("fitted_decay", &self.fitted_decay)
            .field("quad", &(self.quad_nodes, self.quad_panels))
            .finish()
    }
}

/// Split a compactified-Gevrey potential into V1 + V2 with
/// V2(z) = z^{-gamma} W2(1/z) and V1 = V - V2 on the real axis.
pub fn decompose(spec: &PotentialSpec, rho1: f64, epsilon: f64) -> Result<Decomposition> {
    decompose_with(spec, rho1, epsilon, WATSON_NODES_DEFAULT, WATSON_PANELS_DEFAULT)
}

pub fn decompose_with(
    spec: &PotentialSpec,
    rho1: f64,
    epsilon: f64,
    nodes: usize,
    panels: usize,
) -> Result<Decomposition> {
    if !(epsilon > 0.0 && epsilon < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Parameter(format!(
            "sector deficit must lie in (0, pi/2), got {epsilon}"
        )));
    }
    let series = spec.tail_series().ok_or_else(|| {
        Error::Parameter("decompose needs a gevrey_compactified potential (or closed form with tail data)".into())
    })?;
    let gamma_pow = spec.gamma_pow();
    check_rho1(series, rho1)?;

    if series.is_zero() {
        return Ok(Decomposition {
            spec: spec.clone(),
            rho1,
            epsilon_sector: epsilon,
            gamma_pow,
            g_nodes: Vec::new(),
            zeta_nodes: Vec::new(),
            zeta_weights: Vec::new(),
            quad_nodes: nodes,
            quad_panels: panels,
            fitted_decay: None,
            v1_supp: None,
            degenerate_zero: true,
        });
    }

    let rule = GaussLegendre::new(nodes);
    let breaks = graded_breakpoints(rho1, panels);
    let mut zeta_nodes = Vec::with_capacity(nodes * panels);
    let mut zeta_weights = Vec::with_capacity(nodes * panels);
    for w in breaks.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[0] + w[1]);
        for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
            zeta_nodes.push(mid + half * x);
            zeta_weights.push(wt * half);
        }
    }
    let mut g_nodes = Vec::with_capacity(zeta_nodes.len());
    for &zeta in &zeta_nodes {
        g_nodes.push(series.borel_eval(Complex64::new(zeta, 0.0))?.value);
    }

    let mut dec = Decomposition {
        spec: spec.clone(),
        rho1,
        epsilon_sector: epsilon,
        gamma_pow,
        g_nodes,
        zeta_nodes,
        zeta_weights,
        quad_nodes: nodes,
        quad_panels: panels,
        fitted_decay: None,
        v1_supp: None,
        degenerate_zero: false,
    };
    dec.fitted_decay = dec.fit_decay_certificate();
    Ok(dec)
}

impl Decomposition {
    /// Degenerate split of a compactly supported potential: V1 = V, V2 = 0.
    pub fn from_compact(spec: &PotentialSpec) -> Result<Self> {
        let x_supp = spec.x_supp().ok_or_else(|| {
            Error::Parameter("from_compact needs a compactly supported potential".into())
        })?;
        Ok(Decomposition {
            spec: spec.clone(),
            rho1: f64::INFINITY,
            epsilon_sector: 0.05,
            gamma_pow: spec.gamma_pow(),
            g_nodes: Vec::new(),
            zeta_nodes: Vec::new(),
            zeta_weights: Vec::new(),
            quad_nodes: 0,
            quad_panels: 0,
            fitted_decay: None,
            v1_supp: Some(x_supp),
            degenerate_zero: false,
        })
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn epsilon_sector(&self) -> f64 {
        self.epsilon_sector
    }

    pub fn gamma_pow(&self) -> u8 {
        self.gamma_pow
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn quad_nodes(&self) -> usize {
        self.quad_nodes
    }

    /// Support end of V1 (compact splits), if any.
    pub fn v1_support(&self) -> Option<f64> {
        self.v1_supp
    }

    /// Effective exponential decay rate of V1 for admissibility decisions:
    /// the fitted certificate, or +infinity for compact V1.
    pub fn decay_rate_eff(&self) -> f64 {
        if self.v1_supp.is_some() || self.degenerate_zero {
            f64::INFINITY
        } else {
            self.fitted_decay.unwrap_or(self.rho1 * (1.0 - FIT_TOL))
        }
    }

    /// Sector-analytic part at a complex point:
    /// V2(z) = z^{-gamma} W2(1/z) = z^{1-gamma} int_0^{rho1} g(zeta) e^{-zeta z} d zeta.
    pub fn v2_eval(&self, z: Complex64) -> Result<Complex64> {
        if self.degenerate_zero || self.v1_supp.is_some() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if z.norm() == 0.0 {
            return Err(Error::Domain("V2 evaluation at z = 0".into()));
        }
        if z.arg().abs() >= std::f64::consts::FRAC_PI_2 - self.epsilon_sector {
            return Err(Error::Domain(format!(
                "z = {z} outside the analyticity sector |arg z| < pi/2 - {}",
                self.epsilon_sector
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&zeta, &w), &g) in self
            .zeta_nodes
            .iter()
            .zip(&self.zeta_weights)
            .zip(&self.g_nodes)
        {
            acc += w * g * (-zeta * z).exp();
        }
        Ok(z.powi(1 - self.gamma_pow as i32) * acc)
    }

    /// Exponentially decaying remainder at a real point x >= 1,
    /// V1(x) = V(x) - V2(x).
    pub fn v1_sample(&self, x: f64) -> Result<Complex64> {
        if self.degenerate_zero {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if x < 1.0 {
            return Err(Error::Domain(format!("V1 sample needs x >= 1, got {x}")));
        }
        if let Some(supp) = self.v1_supp {
            if x > supp {
                return Ok(Complex64::new(0.0, 0.0));
            }
            return potential_eval(&self.spec, Complex64::new(x, 0.0));
        }
        let v = potential_eval(&self.spec, Complex64::new(x, 0.0))?;
        let v2 = self.v2_eval(Complex64::new(x, 0.0))?;
        Ok(v - v2)
    }

    /// Fit of the W-variable remainder decay: slope of -log |x^gamma V1(x)|
    /// on a logarithmic grid. The x^gamma weight removes the algebraic
    /// prefactor so the certificate measures the exponential rate alone.
    fn fit_decay_certificate(&self) -> Option<f64> {
        let mut samples = Vec::new();
        let (a, b, n) = (2.0f64, 40.0f64, 24usize);
        let mut wscale = 0.0f64;
        for i in 0..n {
            let x = a * (b / a).powf(i as f64 / (n - 1) as f64);
            let Ok(v1) = self.v1_sample(x) else { continue };
            let Ok(v) = potential_eval(&self.spec, Complex64::new(x, 0.0)) else {
                continue;
            };
            let w1 = v1 * x.powi(self.gamma_pow as i32);
            wscale = wscale.max((v * x.powi(self.gamma_pow as i32)).norm());
            samples.push((x, w1));
        }
        // V1 comes from a subtraction, so beyond the quadrature noise floor
        // the samples carry no decay information
        let noise = 3e-13 * wscale.max(1e-300);
        samples.retain(|(_, w1)| w1.norm() > noise);
        fit_decay_rate(&samples).ok()
    }

    /// Dump sampled (x, V, V1, V2) arrays with the decay certificate as JSON.
    pub fn dump_json(&self, xs: &[f64]) -> Result<serde_json::Value> {
        let mut rows = Vec::new();
        for &x in xs {
            let z = Complex64::new(x, 0.0);
            let v = potential_eval(&self.spec, z).ok();
            let v2 = self.v2_eval(z).ok();
            let v1 = self.v1_sample(x).ok();
            rows.push(serde_json::json!({
                "x": x,
                "v": v.map(|c| [c.re, c.im]),
                "v1": v1.map(|c| [c.re, c.im]),
                "v2": v2.map(|c| [c.re, c.im]),
            }));
        }
        Ok(serde_json::json!({
            "rho1": self.rho1,
            "epsilon_sector": self.epsilon_sector,
            "gamma_pow": self.gamma_pow,
            "fitted_decay": self.fitted_decay,
            "quad_nodes": self.quad_nodes,
            "quad_panels": self.quad_panels,
            "samples": rows,
        }))
    }
}

/// Read a profile-series potential from the structured text format:
/// header lines `K=`, `sigma=`, `gamma_pow=`, then one coefficient per line
/// as `n re im`. Lines starting with `#` are comments.
pub fn read_series_file<R: BufRead>(reader: R) -> Result<PotentialSpec> {
    let mut k = None;
    let mut sigma = None;
    let mut gamma_pow = None;
    let mut entries: Vec<(usize, Complex64)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = |what: &str| {
            Error::Parameter(format!("series file line {}: {what}: {t}", lineno + 1))
        };
        if let Some(v) = t.strip_prefix("K=") {
            k = Some(v.trim().parse::<f64>().map_err(|_| bad("bad K"))?);
        } else if let Some(v) = t.strip_prefix("sigma=") {
            sigma = Some(v.trim().parse::<f64>().map_err(|_| bad("bad sigma"))?);
        } else if let Some(v) = t.strip_prefix("gamma_pow=") {
            gamma_pow = Some(v.trim().parse::<u8>().map_err(|_| bad("bad gamma_pow"))?);
        } else {
            let mut it = t.split_whitespace();
            let n = it
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| bad("bad index"))?;
            let re = it
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| bad("bad re"))?;
            let im = it
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| bad("bad im"))?;
            entries.push((n, Complex64::new(re, im)));
        }
    }
    let k = k.ok_or_else(|| Error::Parameter("series file missing K=".into()))?;
    let sigma = sigma.ok_or_else(|| Error::Parameter("series file missing sigma=".into()))?;
    let gamma_pow = gamma_pow.ok_or_else(|| Error::Parameter("series file missing gamma_pow=".into()))?;
    if !(gamma_pow == 1 || gamma_pow == 2) {
        return Err(Error::Parameter(format!("gamma_pow must be 1 or 2, got {gamma_pow}")));
    }
    let m = entries.iter().map(|(n, _)| *n).max().unwrap_or(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
    for (n, c) in entries {
        coeffs[n] = c;
    }
    let series = GevreySeries::new(coeffs, k, sigma)?;
    Ok(PotentialSpec::GevreyCompactified { series, gamma_pow })
}

pub fn write_series_file<W: Write>(
    mut w: W,
    series: &GevreySeries,
    gamma_pow: u8,
) -> Result<()> {
    writeln!(w, "K={}", series.bound_k())?;
    writeln!(w, "sigma={}", series.bound_sigma())?;
    writeln!(w, "gamma_pow={gamma_pow}")?;
    for (n, c) in series.coeffs().iter().enumerate() {
        writeln!(w, "{n} {:e} {:e}", c.re, c.im)?;
    }
    Ok(())
}
