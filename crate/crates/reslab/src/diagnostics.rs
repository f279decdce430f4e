//! Fourier-side Gevrey-2 diagnostics: the exponential class of e^{iz/x}, the
//! windowed transform of boundary profiles, and steepest-descent asymptotics.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::Write;

/// Class data of x -> e^{iz/x} for Im z > 0:
/// sigma(z) = (|z| - |Re z|)/2 with the two directional rates
/// sigma_+ = cos^2(arg z / 2) |z| (positive frequencies) and
/// sigma_- = sin^2(arg z / 2) |z| (negative frequencies).
#[derive(Debug, Clone, Copy)]
pub struct ExponentialClassParams {
    pub sigma: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

pub fn exponential_class_params(z: Complex64) -> Result<ExponentialClassParams> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!(
            "exponential class parameters need Im z > 0, got z = {z}"
        )));
    }
    let r = z.norm();
    let half = 0.5 * z.arg();
    let sigma_plus = half.cos().powi(2) * r;
    let sigma_minus = half.sin().powi(2) * r;
    Ok(ExponentialClassParams {
        sigma: 0.5 * (r - z.re.abs()),
        sigma_plus,
        sigma_minus,
        phi_plus: half + 0.5 * PI,
        phi_minus: half,
    })
}

/// Compactly supported analytic-type bump chi(x) = exp(-1/(1 - (x/L)^2)) on
/// |x| < L, zero beyond. Its transform decays faster than any e^{-c sqrt(xi)},
/// so it does not pollute Gevrey-2 rate fits.
#[derive(Debug, Clone)]
pub struct WindowSpec {
    pub l: f64,
    pub id: String,
}

impl WindowSpec {
    pub fn bump(l: f64) -> Self {
        WindowSpec {
            l,
            id: format!("bump(L={l})"),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = x / self.l;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }
}

/// Windowed one-sided Fourier data on a frequency grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub xi: Vec<f64>,
    pub amp: Vec<Complex64>,
    pub window_id: String,
}

impl Spectrum {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "xi,re_amp,im_amp,abs_amp")?;
        for (x, a) in self.xi.iter().zip(&self.amp) {
            writeln!(w, "{x:.12e},{:.12e},{:.12e},{:.12e}", a.re, a.im, a.norm())?;
        }
        Ok(())
    }
}

/// Geometric frequency grid with `per_decade` points per decade.
pub fn geometric_xi_grid(xi_min: f64, xi_max: f64, per_decade: usize, sign: f64) -> Vec<f64> {
    let decades = (xi_max / xi_min).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(2);
    (0..=n)
        .map(|i| sign * xi_min * (xi_max / xi_min).powf(i as f64 / n as f64))
        .collect()
}

const MAX_PANELS_PER_XI: usize = 40_000;

/// One-sided windowed transform u_hat(xi) = int_0^L chi(x) u(x) e^{-i x xi} dx.
/// Top-level panels are tied to the oscillation scale (a quarter period per
/// panel); each panel is then refined adaptively, which resolves the sharp
/// interior scales of the window and of flat-at-zero samplers.
pub fn windowed_fourier<F>(u: F, window: &WindowSpec, xi_grid: &[f64]) -> Result<Spectrum>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if xi_grid.is_empty() {
        return Err(Error::Parameter("empty frequency grid".into()));
    }
    // scale estimate for the absolute panel tolerance
    let scan = 256;
    let scale = (1..scan)
        .map(|i| {
            let x = window.l * i as f64 / scan as f64;
            (window.eval(x) * u(x)).norm()
        })
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut amp = Vec::with_capacity(xi_grid.len());
    for &xi in xi_grid {
        let width = PI / (4.0 * xi.abs().max(4.0));
        let n_panels = (window.l / width).ceil() as usize;
        if n_panels > MAX_PANELS_PER_XI {
            return Err(Error::Accuracy(format!(
                "unresolved oscillation at xi = {xi}: needs {n_panels} panels (budget {MAX_PANELS_PER_XI})"
            )));
        }
        let integrand = |x: f64| {
            let chi = window.eval(x);
            if chi == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            chi * u(x) * Complex64::from_polar(1.0, -x * xi)
        };
        let tol_panel = 2e-16 * scale * window.l / n_panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..n_panels {
            let a = window.l * p as f64 / n_panels as f64;
            let b = window.l * (p + 1) as f64 / n_panels as f64;
            acc += crate::quad::adaptive_quad(&integrand, a, b, tol_panel, 52).map_err(|_| {
                Error::Accuracy(format!(
                    "sampler detail unresolved at xi = {xi} in panel [{a:.4}, {b:.4}]"
                ))
            })?;
        }
        amp.push(acc);
    }
    Ok(Spectrum {
        xi: xi_grid.to_vec(),
        amp,
        window_id: window.id.clone(),
    })
}

/// Result of a Gevrey-2 rate fit on one side of the spectrum.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GevreyFit {
    pub sigma_hat: f64,
    pub residual: f64,
    pub n_points: usize,
    pub prefactor_power: f64,
}

/// Default prefactor power, taken from the steepest-descent leading term.
pub const PREFACTOR_POWER_DEFAULT: f64 = 0.75;

/// Least squares of log|u_hat| + p log|xi| against -2 sqrt(|xi|): recovers
/// sigma from |u_hat| ~ |xi|^{-p} e^{-2 sqrt(sigma |xi|)}.
pub fn fit_gevrey_sigma(spectrum: &Spectrum, sign: i32, prefactor_power: f64) -> Result<GevreyFit> {
    let floor = usable_floor(spectrum);
    let pts: Vec<(f64, f64)> = spectrum
        .xi
        .iter()
        .zip(&spectrum.amp)
        .filter(|(xi, a)| (xi.signum() as i32 == sign.signum()) && a.norm() > floor)
        .map(|(xi, a)| {
            let s = xi.abs().sqrt();
            (s, a.norm().ln() + prefactor_power * xi.abs().ln())
        })
        .collect();
    if pts.len() < 12 {
        return Err(Error::Fit(format!(
            "need at least 12 usable frequencies of sign {sign}, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(s, _)| s).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(s, _)| s * s).sum();
    let sxy: f64 = pts.iter().map(|(s, y)| s * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rms = (pts
        .iter()
        .map(|(s, y)| (y - intercept - slope * s).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let sigma_hat = (0.5 * slope.min(0.0)).powi(2);
    Ok(GevreyFit {
        sigma_hat,
        residual: rms,
        n_points: pts.len(),
        prefactor_power,
    })
}

/// Quadrature-cancellation floor: amplitudes below roundoff relative to the
/// strongest line cannot be trusted.
fn usable_floor(spectrum: &Spectrum) -> f64 {
    let peak = spectrum.amp.iter().map(|a| a.norm()).fold(0.0, f64::max);
    (1e-13 * peak).max(1e-280)
}

/// Leading steepest-descent term of the transform of e^{iz/x}:
///   c |xi|^{-3/4} |z|^{1/4} exp(i e^{i phi_pm} 2 sqrt(|z| |xi|)),
/// with phi_+ for xi > 0 and phi_- for xi < 0. The constant c is a
/// calibration factor; the leading term fixes only the exponent and power.
pub fn steepest_descent_model(z: Complex64, xi: f64, c: Complex64) -> Result<Complex64> {
    let p = exponential_class_params(z)?;
    if xi.abs() < 1.0 {
        return Err(Error::Domain(format!(
            "steepest-descent model is asymptotic, needs |xi| >= 1, got {xi}"
        )));
    }
    let phi = if xi > 0.0 { p.phi_plus } else { p.phi_minus };
    let s = 2.0 * (z.norm() * xi.abs()).sqrt();
    let phase = Complex64::i() * Complex64::from_polar(1.0, phi) * s;
    Ok(c * xi.abs().powf(-0.75) * z.norm().powf(0.25) * phase.exp())
}

/// Least-squares scalar calibration of the model against a spectrum, one
/// constant per (z, sign).
pub fn calibrate_model(spectrum: &Spectrum, z: Complex64, sign: i32) -> Result<Complex64> {
    let floor = usable_floor(spectrum);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0f64;
    let mut used = 0usize;
    for (&xi, a) in spectrum.xi.iter().zip(&spectrum.amp) {
        if xi.signum() as i32 != sign.signum() || a.norm() <= floor || xi.abs() < 1.0 {
            continue;
        }
        let m = steepest_descent_model(z, xi, Complex64::new(1.0, 0.0))?;
        num += a * m.conj();
        den += m.norm_sqr();
        used += 1;
    }
    if used < 4 || den == 0.0 {
        return Err(Error::Fit("too few usable frequencies for calibration".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn class_params_purely_imaginary() {
        let p = exponential_class_params(c64(0.0, 2.0)).unwrap();
        assert_relative_eq!(p.sigma, 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.sigma_plus, 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.sigma_minus, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn class_params_three_four() {
        let p = exponential_class_params(c64(3.0, 4.0)).unwrap();
        assert_relative_eq!(p.sigma, 1.0, max_relative = 1e-14);
        let arg = c64(3.0, 4.0).arg();
        assert_relative_eq!(p.sigma_plus, 5.0 * (arg / 2.0).cos().powi(2), max_relative = 1e-14);
        assert_relative_eq!(p.sigma_minus, 5.0 * (arg / 2.0).sin().powi(2), max_relative = 1e-14);
    }

    #[test]
    fn class_params_real_limit() {
        let p = exponential_class_params(c64(5.0, 1e-12)).unwrap();
        assert!(p.sigma < 1e-12);
    }

    #[test]
    fn class_params_rejects_lower_half() {
        assert!(exponential_class_params(c64(1.0, -0.5)).is_err());
        assert!(exponential_class_params(c64(1.0, 0.0)).is_err());
    }

    #[test]
    fn class_identities_on_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let z = c64(rng.gen_range(-10.0..10.0), rng.gen_range(1e-6..10.0));
            let p = exponential_class_params(z).unwrap();
            assert_relative_eq!(p.sigma_plus + p.sigma_minus, z.norm(), max_relative = 1e-13);
            assert_relative_eq!((p.sigma_plus - p.sigma_minus).abs(), z.re.abs(), epsilon = 1e-12);
            assert_relative_eq!(p.sigma, p.sigma_plus.min(p.sigma_minus), epsilon = 1e-13);
            assert_relative_eq!(p.phi_plus, (z.arg() + PI) / 2.0, max_relative = 1e-14);
            assert_relative_eq!(p.phi_minus, z.arg() / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sigma_monotone_in_imaginary_part() {
        for re in [-3.0, 0.0, 2.0] {
            let mut last = -1.0;
            for k in 1..20 {
                let p = exponential_class_params(c64(re, 0.3 * k as f64)).unwrap();
                assert!(p.sigma > last, "sigma not increasing at re={re}, k={k}");
                last = p.sigma;
            }
        }
    }

    #[test]
    fn transform_of_window_matches_adaptive_oracle() {
        let window = WindowSpec::bump(1.0);
        let spec = windowed_fourier(|_| c64(1.0, 0.0), &window, &[3.0, 17.0, 60.0]).unwrap();
        for (&xi, &amp) in spec.xi.iter().zip(&spec.amp) {
            let oracle = crate::quad::adaptive_quad(
                &|x: f64| c64(window.eval(x), 0.0) * Complex64::from_polar(1.0, -x * xi),
                0.0,
                1.0,
                1e-14,
                40,
            )
            .unwrap();
            assert!((amp - oracle).norm() < 1e-12, "xi={xi}: {amp} vs {oracle}");
        }
    }

    #[test]
    fn gevrey_decay_of_planted_profile() {
        // u(x) = e^{-2/x} is the z = 2i case: |u_hat| ~ c xi^{-3/4} e^{-2 sqrt(xi)}
        let window = WindowSpec::bump(1.0);
        let grid = geometric_xi_grid(10.0, 160.0, 16, 1.0);
        let spec = windowed_fourier(|x| c64((-2.0 / x).exp(), 0.0), &window, &grid).unwrap();
        let c = calibrate_model(&spec, c64(0.0, 2.0), 1).unwrap();
        // at xi = 100 the quadrature value sits within a factor 2 of the model
        let spec100 = windowed_fourier(|x| c64((-2.0 / x).exp(), 0.0), &window, &[100.0]).unwrap();
        let model = steepest_descent_model(c64(0.0, 2.0), 100.0, c).unwrap();
        let ratio = spec100.amp[0].norm() / model.norm();
        assert!((0.5..2.0).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn fit_recovers_planted_exponent_exactly() {
        let grid = geometric_xi_grid(10.0, 1e4, 16, 1.0);
        let amp: Vec<_> = grid
            .iter()
            .map(|&xi| c64(xi.powf(-0.75) * (-2.0 * xi.sqrt()).exp(), 0.0))
            .collect();
        let spec = Spectrum {
            xi: grid,
            amp,
            window_id: "synthetic".into(),
        };
        let fit = fit_gevrey_sigma(&spec, 1, PREFACTOR_POWER_DEFAULT).unwrap();
        assert_relative_eq!(fit.sigma_hat, 1.0, max_relative = 1e-10);
        // a pure exponential plant is recovered exactly with prefactor power 0
        let amp2: Vec<_> = spec
            .xi
            .iter()
            .map(|&xi| c64((-2.0 * xi.sqrt()).exp(), 0.0))
            .collect();
        let spec2 = Spectrum {
            xi: spec.xi.clone(),
            amp: amp2,
            window_id: "synthetic".into(),
        };
        let fit2 = fit_gevrey_sigma(&spec2, 1, 0.0).unwrap();
        assert_relative_eq!(fit2.sigma_hat, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn fit_on_windowed_profile_brackets_target() {
        let window = WindowSpec::bump(1.0);
        let grid = geometric_xi_grid(10.0, 160.0, 16, 1.0);
        let spec = windowed_fourier(|x| c64((-2.0 / x).exp(), 0.0), &window, &grid).unwrap();
        let fit = fit_gevrey_sigma(&spec, 1, PREFACTOR_POWER_DEFAULT).unwrap();
        assert!(
            (0.9..=1.1).contains(&fit.sigma_hat),
            "sigma_hat = {}",
            fit.sigma_hat
        );
    }

    #[test]
    fn directional_rates_of_rotated_profile() {
        // u(x) = e^{i(3+4i)/x}: negative frequencies decay with sigma_-,
        // positive with sigma_+ = 4 (needs a lower xi range before roundoff)
        let z = c64(3.0, 4.0);
        let p = exponential_class_params(z).unwrap();
        let window = WindowSpec::bump(1.0);
        let u = move |x: f64| (Complex64::i() * z / x).exp();

        let grid_neg = geometric_xi_grid(10.0, 160.0, 16, -1.0);
        let spec_neg = windowed_fourier(u, &window, &grid_neg).unwrap();
        let fit_neg = fit_gevrey_sigma(&spec_neg, -1, PREFACTOR_POWER_DEFAULT).unwrap();
        assert!(
            (fit_neg.sigma_hat - p.sigma_minus).abs() < 0.1 * p.sigma_minus,
            "sigma_- fit {} vs {}",
            fit_neg.sigma_hat,
            p.sigma_minus
        );

        let grid_pos = geometric_xi_grid(6.0, 55.0, 24, 1.0);
        let spec_pos = windowed_fourier(u, &window, &grid_pos).unwrap();
        let fit_pos = fit_gevrey_sigma(&spec_pos, 1, PREFACTOR_POWER_DEFAULT).unwrap();
        assert!(
            (fit_pos.sigma_hat - p.sigma_plus).abs() < 0.1 * p.sigma_plus,
            "sigma_+ fit {} vs {}",
            fit_pos.sigma_hat,
            p.sigma_plus
        );
    }

    #[test]
    fn prefactor_sandwich_brackets_fit() {
        let window = WindowSpec::bump(1.0);
        let grid = geometric_xi_grid(10.0, 160.0, 16, 1.0);
        let spec = windowed_fourier(|x| c64((-2.0 / x).exp(), 0.0), &window, &grid).unwrap();
        let mid = fit_gevrey_sigma(&spec, 1, PREFACTOR_POWER_DEFAULT).unwrap().sigma_hat;
        let lo = fit_gevrey_sigma(&spec, 1, 0.0).unwrap().sigma_hat;
        let hi = fit_gevrey_sigma(&spec, 1, 0.5).unwrap().sigma_hat;
        for (name, v) in [("p=0", lo), ("p=1/2", hi)] {
            assert!(
                (v - mid).abs() <= 0.15 * mid,
                "{name} fit {v} vs reference {mid}"
            );
        }
    }

    #[test]
    fn model_error_shrinks_like_inverse_sqrt_xi() {
        // deviation of |quadrature / model| from its limit halves when xi
        // quadruples, within a factor 1.5
        let z = c64(0.0, 2.0);
        let window = WindowSpec::bump(1.0);
        let u = |x: f64| c64((-2.0 / x).exp(), 0.0);
        let xis = [36.0, 144.0, 576.0];
        let spec = windowed_fourier(u, &window, &xis).unwrap();
        // calibration from the largest xi (closest to the limit)
        let c = spec.amp[2] / steepest_descent_model(z, xis[2], c64(1.0, 0.0)).unwrap();
        let dev: Vec<f64> = (0..2)
            .map(|i| {
                let m = steepest_descent_model(z, xis[i], c).unwrap();
                (spec.amp[i] / m - 1.0).norm()
            })
            .collect();
        let shrink = dev[0] / dev[1];
        assert!(
            (2.0 / 1.5..=2.0 * 1.5).contains(&shrink),
            "deviations {dev:?}, shrink factor {shrink}"
        );
    }

    #[test]
    fn model_ratio_cancels_calibration() {
        let z = c64(1.0, 3.0);
        let r = 7.0f64;
        let m1 = steepest_descent_model(z, r * r, c64(0.37, -0.2)).unwrap();
        let m4 = steepest_descent_model(z, 4.0 * r * r, c64(0.37, -0.2)).unwrap();
        // |model(4 r^2)| / |model(r^2)| = 4^{-3/4} e^{-2 sqrt(sigma_+) r}
        let p = exponential_class_params(z).unwrap();
        let expected = 4.0f64.powf(-0.75) * (-2.0 * p.sigma_plus.sqrt() * r).exp();
        assert_relative_eq!(m4.norm() / m1.norm(), expected, max_relative = 1e-12);
    }

    #[test]
    fn model_modulus_at_reference_point() {
        // z = 2i, xi = 400: e^{-2 sqrt(sigma_+ xi)} = e^{-40}
        let m = steepest_descent_model(c64(0.0, 2.0), 400.0, c64(1.0, 0.0)).unwrap();
        let expected = 400.0f64.powf(-0.75) * 2.0f64.powf(0.25) * (-40.0f64).exp();
        assert_relative_eq!(m.norm(), expected, max_relative = 1e-12);
        assert!(steepest_descent_model(c64(0.0, 2.0), 0.5, c64(1.0, 0.0)).is_err());
    }

    #[test]
    fn spectrum_csv_schema() {
        let spec = Spectrum {
            xi: vec![1.0, 2.0],
            amp: vec![c64(0.5, -0.25), c64(0.125, 0.0)],
            window_id: "test".into(),
        };
        let mut buf = Vec::new();
        spec.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("xi,re_amp,im_amp,abs_amp\n"));
        assert_eq!(s.lines().count(), 3);
    }
}
