//! Lambda-plane regions: the strip-minus-cut M_sigma, the Gevrey parabola
//! Omega_sigma, and the wedge W_alpha, with boundary sampling for plots.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

pub const CUT_HALFWIDTH_DEFAULT: f64 = 0.05;
/// Bounding box for boundary sampling: [re_min, re_max, im_min, im_max].
pub const BBOX_DEFAULT: [f64; 4] = [-10.0, 10.0, -6.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    /// {|lambda| - |Re lambda| < sigma} minus the cut.
    OmegaSigma,
    /// {Im lambda > -sigma/2} minus the cut.
    MSigma,
    /// {-alpha < arg lambda < pi + alpha}.
    WAlpha,
}

#[derive(Debug, Clone, Copy)]
pub struct RegionSpec {
    pub kind: RegionKind,
    /// Class parameter for OmegaSigma / MSigma.
    pub sigma: f64,
    /// Wedge half-opening beyond the upper half-plane for WAlpha.
    pub alpha: f64,
    /// Angular half-width of the numerical exclusion sector around i(-inf, 0].
    pub cut_halfwidth: f64,
}

impl RegionSpec {
    pub fn omega_sigma(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Parameter(format!("omega_sigma needs sigma > 0, got {sigma}")));
        }
        Ok(RegionSpec {
            kind: RegionKind::OmegaSigma,
            sigma,
            alpha: 0.0,
            cut_halfwidth: CUT_HALFWIDTH_DEFAULT,
        })
    }

    pub fn m_sigma(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Parameter(format!("m_sigma needs sigma > 0, got {sigma}")));
        }
        Ok(RegionSpec {
            kind: RegionKind::MSigma,
            sigma,
            alpha: 0.0,
            cut_halfwidth: CUT_HALFWIDTH_DEFAULT,
        })
    }

    pub fn w_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < PI) {
            return Err(Error::Parameter(format!("w_alpha needs alpha in (0, pi), got {alpha}")));
        }
        Ok(RegionSpec {
            kind: RegionKind::WAlpha,
            sigma: 0.0,
            alpha,
            cut_halfwidth: 0.0,
        })
    }
}

/// Angular distance of lambda from the negative imaginary direction.
fn angle_from_cut(lambda: Complex64) -> f64 {
    let mut d = (lambda.arg() + FRAC_PI_2).abs();
    if d > PI {
        d = 2.0 * PI - d;
    }
    d
}

/// Membership predicate. Points within `cut_halfwidth` (angular) of the
/// negative imaginary axis are excluded for the cut-sensitive kinds.
pub fn region_contains(spec: &RegionSpec, lambda: Complex64) -> bool {
    match spec.kind {
        RegionKind::OmegaSigma => {
            if lambda.norm() == 0.0 {
                return false;
            }
            if lambda.im < 0.0 && angle_from_cut(lambda) <= spec.cut_halfwidth {
                return false;
            }
            lambda.norm() - lambda.re.abs() < spec.sigma
        }
        RegionKind::MSigma => {
            if lambda.norm() == 0.0 {
                return false;
            }
            if lambda.im < 0.0 && angle_from_cut(lambda) <= spec.cut_halfwidth {
                return false;
            }
            lambda.im > -0.5 * spec.sigma
        }
        RegionKind::WAlpha => {
            if lambda.norm() == 0.0 {
                return false;
            }
            // complement of the closed sector of half-width pi/2 - alpha
            // around the negative imaginary direction
            angle_from_cut(lambda) > FRAC_PI_2 - spec.alpha
        }
    }
}

/// One labelled boundary point.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub lambda: Complex64,
    pub branch: &'static str,
}

/// Sample the boundary curve(s) of a region inside `BBOX_DEFAULT`, ordered by
/// the curve parameter on each branch.
pub fn region_boundary(spec: &RegionSpec, n: usize) -> Result<Vec<BoundaryPoint>> {
    region_boundary_in(spec, n, BBOX_DEFAULT)
}

pub fn region_boundary_in(spec: &RegionSpec, n: usize, bbox: [f64; 4]) -> Result<Vec<BoundaryPoint>> {
    if n < 2 {
        return Err(Error::Parameter("boundary sampling needs n >= 2".into()));
    }
    let [re_min, re_max, im_min, im_max] = bbox;
    let mut pts = Vec::new();
    match spec.kind {
        RegionKind::OmegaSigma => {
            // 2 sigma |Re| = Im^2 - sigma^2, parametrized by t = Im,
            // |t| >= sigma; four arcs split by the signs of Re and Im.
            let sigma = spec.sigma;
            let re_of_t = |t: f64| (t * t - sigma * sigma) / (2.0 * sigma);
            for (branch, re_sign, t_lo, t_hi) in [
                ("omega_ne", 1.0, sigma, im_max.max(sigma)),
                ("omega_nw", -1.0, sigma, im_max.max(sigma)),
                ("omega_se", 1.0, -(im_min.min(-sigma)).abs(), -sigma),
                ("omega_sw", -1.0, -(im_min.min(-sigma)).abs(), -sigma),
            ] {
                if t_hi <= t_lo {
                    continue;
                }
                for i in 0..n {
                    let t = t_lo + (t_hi - t_lo) * i as f64 / (n - 1) as f64;
                    let re = re_sign * re_of_t(t);
                    if re >= re_min && re <= re_max {
                        pts.push(BoundaryPoint {
                            lambda: Complex64::new(re, t),
                            branch,
                        });
                    }
                }
            }
        }
        RegionKind::MSigma => {
            let im = -0.5 * spec.sigma;
            for i in 0..n {
                let re = re_min + (re_max - re_min) * i as f64 / (n - 1) as f64;
                pts.push(BoundaryPoint {
                    lambda: Complex64::new(re, im),
                    branch: "strip_line",
                });
            }
            // the two cut edges down to the box bottom
            for (branch, rot) in [("cut_left", spec.cut_halfwidth), ("cut_right", -spec.cut_halfwidth)] {
                let dir = Complex64::from_polar(1.0, -FRAC_PI_2 + rot);
                for i in 0..n {
                    let r = im_min.abs() * i as f64 / (n - 1) as f64;
                    pts.push(BoundaryPoint { lambda: r * dir, branch });
                }
            }
        }
        RegionKind::WAlpha => {
            for (branch, ang) in [
                ("wedge_right", -spec.alpha),
                ("wedge_left", PI + spec.alpha),
            ] {
                let dir = Complex64::from_polar(1.0, ang);
                let rmax = (re_max - re_min).hypot(im_max - im_min);
                for i in 0..n {
                    let r = rmax * i as f64 / (n - 1) as f64;
                    pts.push(BoundaryPoint { lambda: r * dir, branch });
                }
            }
        }
    }
    Ok(pts)
}
