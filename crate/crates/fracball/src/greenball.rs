//! Explicit fractional Green function of the ball, its boundary expansion
//! coefficient, interior blow-up limit and normalization calibration.

use crate::error::{Error, Result};
use crate::geom::{dist, norm, scale, Point, ProblemGeometry};
use crate::specialfn::{
    adaptive, adaptive_power_endpoint, beta_fn, gamma_fn, green_profile, green_profile_full,
    GreenProfileArgs, QuadratureSpec,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreenBranch {
    Power,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub branch: GreenBranch,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExpansionCoefficient {
    pub a0: f64,
    pub at: Point,
    pub direction: Point,
}

/// Normalization of the power-branch Green function,
/// kappa(n, s) = Gamma(n/2) / (4^s pi^{n/2} Gamma(s)^2).
pub fn kappa(n: usize, s: f64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    Ok(gamma_fn(n as f64 / 2.0)?
        / (4.0f64.powf(s) * pi.powf(n as f64 / 2.0) * gamma_fn(s)?.powi(2)))
}

/// Normalization of the logarithmic branch (n = 1, s = 1/2).
pub fn kappa_log() -> f64 {
    1.0 / std::f64::consts::PI
}

/// Torsion constant gamma(n, s) = Gamma(n/2) / (4^s Gamma((n+2s)/2) Gamma(1+s)):
/// the solution of (-Delta)^s u = 1 in B_rho with zero exterior datum is
/// gamma(n,s) (rho^2 - |x|^2)_+^s.
pub fn torsion_gamma(n: usize, s: f64) -> Result<f64> {
    Ok(gamma_fn(n as f64 / 2.0)?
        / (4.0f64.powf(s) * gamma_fn((n as f64 + 2.0 * s) / 2.0)? * gamma_fn(1.0 + s)?))
}

/// The torsion function gamma(n,s) (rho^2 - |x|^2)_+^s.
pub fn torsion_value(geom: &ProblemGeometry, x: &Point) -> Result<f64> {
    let g = torsion_gamma(geom.n, geom.s())?;
    Ok(g * (geom.rho * geom.rho - norm(x).powi(2)).max(0.0).powf(geom.s()))
}

/// r0(x, z) = (rho^2 - |x|^2)(rho^2 - |z|^2) / (rho^2 |x - z|^2).
pub fn r0(x: &Point, z: &Point, geom: &ProblemGeometry) -> Result<f64> {
    let d = dist(x, z);
    if d < 1e-14 {
        return Err(Error::Singularity);
    }
    let rho2 = geom.rho * geom.rho;
    let fx = (rho2 - norm(x).powi(2)).max(0.0);
    let fz = (rho2 - norm(z).powi(2)).max(0.0);
    Ok(fx * fz / (rho2 * d * d))
}

/// Green function of B_rho, normalized so that integrating it against 1
/// reproduces the torsion function.
pub fn green(x: &Point, z: &Point, geom: &ProblemGeometry, q: &QuadratureSpec) -> Result<GreenValue> {
    if dist(x, z) < 1e-14 {
        return Err(Error::Singularity);
    }
    // vanishes outside the open ball by convention
    if norm(x) >= geom.rho || norm(z) >= geom.rho {
        let branch = if geom.log_branch() {
            GreenBranch::Logarithmic
        } else {
            GreenBranch::Power
        };
        return Ok(GreenValue {
            value: 0.0,
            branch,
            error_estimate: 0.0,
        });
    }
    if geom.log_branch() {
        let rho = geom.rho;
        let (a, b) = (x[0], z[0]);
        let arg = (rho * rho - a * b + ((rho * rho - a * a) * (rho * rho - b * b)).sqrt())
            / (rho * (b - a).abs());
        return Ok(GreenValue {
            value: kappa_log() * arg.ln(),
            branch: GreenBranch::Logarithmic,
            error_estimate: 1e-15 * arg.ln().abs(),
        });
    }
    let s = geom.s();
    let n = geom.n;
    let rr = r0(x, z, geom)?;
    let profile = green_profile(&GreenProfileArgs::new(rr, s, n)?, q)?;
    let k = kappa(n, s)?;
    let value = k * dist(x, z).powf(2.0 * s - n as f64) * profile;
    Ok(GreenValue {
        value,
        branch: GreenBranch::Power,
        error_estimate: q.abs_tol.max(q.rel_tol * value.abs()),
    })
}

/// Green evaluator with the profile integral tabulated once; use this in hot
/// loops (solvers, matrix assembly) instead of calling `green` repeatedly.
#[derive(Debug, Clone)]
pub struct GreenEvaluator {
    pub geom: ProblemGeometry,
    profile: Option<crate::specialfn::CachedProfile>,
    kappa: f64,
}

impl GreenEvaluator {
    pub fn new(geom: &ProblemGeometry) -> Result<Self> {
        if geom.log_branch() {
            return Ok(GreenEvaluator {
                geom: *geom,
                profile: None,
                kappa: kappa_log(),
            });
        }
        Ok(GreenEvaluator {
            geom: *geom,
            profile: Some(crate::specialfn::CachedProfile::build(geom.s(), geom.n)?),
            kappa: kappa(geom.n, geom.s())?,
        })
    }

    pub fn eval(&self, x: &Point, z: &Point) -> Result<f64> {
        let geom = &self.geom;
        if dist(x, z) < 1e-14 {
            return Err(Error::Singularity);
        }
        if norm(x) >= geom.rho || norm(z) >= geom.rho {
            return Ok(0.0);
        }
        match &self.profile {
            None => {
                let rho = geom.rho;
                let (a, b) = (x[0], z[0]);
                let arg = (rho * rho - a * b
                    + ((rho * rho - a * a) * (rho * rho - b * b)).sqrt())
                    / (rho * (b - a).abs());
                Ok(self.kappa * arg.ln())
            }
            Some(profile) => {
                let s = geom.s();
                let rr = r0(x, z, geom)?;
                Ok(self.kappa * dist(x, z).powf(2.0 * s - geom.n as f64) * profile.eval(rr)?)
            }
        }
    }

    /// Green function between points at radii r and t a chord w apart, with w
    /// supplied exactly. Reconstructing coordinates from (r, t, w) and taking
    /// the distance loses w to cancellation once w^2 drops below the rounding
    /// floor of r^2 + t^2, so chord quadratures must come through here.
    pub fn eval_radial(&self, r: f64, t: f64, w: f64) -> Result<f64> {
        let geom = &self.geom;
        if !(w > 0.0) || w < 1e-14 * geom.rho {
            return Err(Error::Singularity);
        }
        if r >= geom.rho || t >= geom.rho {
            return Ok(0.0);
        }
        let rho2 = geom.rho * geom.rho;
        match &self.profile {
            None => {
                // x . z = (r^2 + t^2 - w^2) / 2 determines the closed form
                let xz = 0.5 * (r * r + t * t - w * w);
                let arg = (rho2 - xz + ((rho2 - r * r) * (rho2 - t * t)).sqrt())
                    / (geom.rho * w);
                Ok(self.kappa * arg.ln())
            }
            Some(profile) => {
                let s = geom.s();
                let rr =
                    (rho2 - r * r).max(0.0) * (rho2 - t * t).max(0.0) / (rho2 * w * w);
                Ok(self.kappa * w.powf(2.0 * s - geom.n as f64) * profile.eval(rr)?)
            }
        }
    }
}

/// Leading coefficient of the boundary expansion
/// G((rho - delta) e, z) = a0(z, e) delta^s + o(delta^s),
/// carrying the same normalization as `green`.
pub fn a0_coefficient(
    z: &Point,
    e: &Point,
    geom: &ProblemGeometry,
) -> Result<ExpansionCoefficient> {
    if norm(z) >= geom.rho {
        return Err(Error::Domain(format!(
            "expansion point must lie inside the ball (|z| = {}, rho = {})",
            norm(z),
            geom.rho
        )));
    }
    let rho = geom.rho;
    let s = geom.s();
    let boundary = scale(e, rho);
    let gap = dist(&boundary, z);
    let fz = rho * rho - norm(z).powi(2);
    let a0 = if geom.log_branch() {
        // from the expansion of the logarithmic representation
        kappa_log() * (2.0 * fz).sqrt() / (rho.sqrt() * gap)
    } else {
        kappa(geom.n, s)? * 2.0f64.powf(s) * fz.powf(s) / (s * rho.powf(s) * gap.powi(geom.n as i32))
    };
    Ok(ExpansionCoefficient {
        a0,
        at: *z,
        direction: *e,
    })
}

/// lim_{rho0 -> 0} rho0^{n-2s} G(rho0 e, rho0 y) = kappa |e - y|^{2s-n} B(s, n/2 - s),
/// defined for n > 2s only.
pub fn interior_blowup_limit(e: &Point, y: &Point, geom: &ProblemGeometry) -> Result<f64> {
    let s = geom.s();
    let n = geom.n;
    if (n as f64) <= 2.0 * s {
        return Err(Error::UnsupportedBranch(format!(
            "interior blow-up limit needs n > 2s (n = {n}, s = {s})"
        )));
    }
    let d = dist(e, y);
    if d < 1e-14 {
        return Err(Error::Singularity);
    }
    Ok(kappa(n, s)? * d.powf(2.0 * s - n as f64) * green_profile_full(s, n)?)
}

/// Integral of the (kappa = 1) Green function against 1 at the centre.
fn unnormalized_torsion_at_zero(geom: &ProblemGeometry, q: &QuadratureSpec) -> Result<f64> {
    let rho = geom.rho;
    let s = geom.s();
    let n = geom.n;
    let surf = crate::specialfn::sphere_measure(n)?;
    if geom.log_branch() {
        // 2 int_0^rho ln((rho^2 + sqrt(rho^2 (rho^2 - t^2)))/(rho t)) dt, log endpoint at 0
        let f = |t: f64| {
            let arg = (rho * rho + (rho * rho * (rho * rho - t * t)).sqrt()) / (rho * t);
            arg.ln()
        };
        let head = adaptive_power_endpoint(&f, 0.0, rho / 2.0, true, -0.1, q)?;
        let tail = adaptive(&f, rho / 2.0, rho, q)?;
        return Ok(2.0 * (head.value + tail.value));
    }
    let integrand = |t: f64| {
        let rr = (rho * rho - t * t) / (t * t);
        let profile = green_profile(&GreenProfileArgs { r: rr, s, n }, q).unwrap_or(f64::NAN);
        t.powf(2.0 * s - 1.0) * profile
    };
    // t -> 0: integrand ~ t^{2s-1} for n > 2s (profile tends to a constant)
    // and stays bounded for n < 2s; t -> rho: profile vanishes like (rho - t)^s
    let p_left = (2.0 * s - 1.0).min(0.0);
    let head = adaptive_power_endpoint(&integrand, 0.0, rho / 2.0, true, p_left, q)?;
    let tail = adaptive_power_endpoint(&integrand, rho / 2.0, rho, false, s, q)?;
    Ok(surf * (head.value + tail.value))
}

/// Calibrates the normalization constant by matching the Green representation
/// of the torsion function at the centre of the ball.
pub fn calibrate_kappa(geom: &ProblemGeometry, q: &QuadratureSpec) -> Result<f64> {
    let target = torsion_gamma(geom.n, geom.s())? * geom.rho.powf(2.0 * geom.s());
    let unnorm = unnormalized_torsion_at_zero(geom, q)?;
    if !unnorm.is_finite() || unnorm <= 0.0 {
        return Err(Error::Accuracy {
            estimate: unnorm,
            bound: f64::INFINITY,
            tol: q.abs_tol,
        });
    }
    Ok(target / unnorm)
}

/// Beta-function shorthand used by the blow-up oracle.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    beta_fn(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q() -> QuadratureSpec {
        QuadratureSpec::with_tolerance(1e-10)
    }

    fn geom(n: usize, s: f64, rho: f64) -> ProblemGeometry {
        ProblemGeometry::new(n, s, rho).unwrap()
    }

    #[test]
    fn r0_direct_substitution() {
        let g = geom(2, 0.5, 1.0);
        let x = [0.0, 0.0, 0.0];
        let z = [0.5, 0.0, 0.0];
        assert_relative_eq!(r0(&x, &z, &g).unwrap(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn r0_symmetric_and_vanishes_at_boundary() {
        let g = geom(3, 0.7, 1.3);
        let x = [0.3, -0.2, 0.1];
        let z = [-0.4, 0.5, 0.6];
        assert_relative_eq!(
            r0(&x, &z, &g).unwrap(),
            r0(&z, &x, &g).unwrap(),
            max_relative = 1e-14
        );
        let zb = scale(&[1.0, 0.0, 0.0], 1.3);
        assert_eq!(r0(&x, &zb, &g).unwrap(), 0.0);
    }

    #[test]
    fn r0_rejects_coincident_points() {
        let g = geom(2, 0.5, 1.0);
        assert!(matches!(
            r0(&[0.1, 0.0, 0.0], &[0.1, 0.0, 0.0], &g),
            Err(Error::Singularity)
        ));
    }

    #[test]
    fn green_vanishes_outside_and_on_boundary() {
        let g = geom(2, 0.5, 1.0);
        let v = green(&[0.2, 0.0, 0.0], &[1.0, 0.0, 0.0], &g, &q()).unwrap();
        assert_eq!(v.value, 0.0);
        let v = green(&[0.2, 0.0, 0.0], &[1.5, 0.3, 0.0], &g, &q()).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn green_log_branch_closed_form() {
        // n=1, s=1/2, rho=1, x=0, z=0.5 -> kappa_log * ln((1 + sqrt(0.75))/0.5)
        let g = geom(1, 0.5, 1.0);
        let v = green(&[0.0, 0.0, 0.0], &[0.5, 0.0, 0.0], &g, &q()).unwrap();
        let expected = kappa_log() * ((1.0 + 0.75f64.sqrt()) / 0.5).ln();
        assert_eq!(v.branch, GreenBranch::Logarithmic);
        assert_relative_eq!(v.value, expected, max_relative = 1e-13);
        assert_relative_eq!((1.0 + 0.75f64.sqrt()) / 0.5, 3.732_050_807_568_877, max_relative = 1e-12);
    }

    #[test]
    fn green_symmetry_and_positivity() {
        for &(n, s) in &[(1usize, 0.25), (1, 0.75), (2, 0.5), (3, 0.7)] {
            let g = geom(n, s, 1.0);
            let x = [0.3, if n > 1 { 0.2 } else { 0.0 }, if n > 2 { -0.1 } else { 0.0 }];
            let z = [-0.5, if n > 1 { 0.1 } else { 0.0 }, if n > 2 { 0.3 } else { 0.0 }];
            let gxz = green(&x, &z, &g, &q()).unwrap().value;
            let gzx = green(&z, &x, &g, &q()).unwrap().value;
            assert!(gxz > 0.0);
            assert_relative_eq!(gxz, gzx, max_relative = 1e-12);
        }
    }

    #[test]
    fn green_scaling_power_branch() {
        // G_rho(x, z) = rho^{2s-n} G_1(x/rho, z/rho)
        let s = 0.6;
        let n = 2;
        let rho = 2.5;
        let g_big = geom(n, s, rho);
        let g_unit = geom(n, s, 1.0);
        let x = [0.8, -0.3, 0.0];
        let z = [-1.1, 0.4, 0.0];
        let lhs = green(&x, &z, &g_big, &q()).unwrap().value;
        let rhs = rho.powf(2.0 * s - n as f64)
            * green(&scale(&x, 1.0 / rho), &scale(&z, 1.0 / rho), &g_unit, &q())
                .unwrap()
                .value;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
    }

    #[test]
    fn a0_direct_substitution_at_origin() {
        // z = 0, rho = 1: a0 / kappa = 2^s / s
        let s = 0.5;
        let g = geom(2, s, 1.0);
        let a = a0_coefficient(&[0.0; 3], &[1.0, 0.0, 0.0], &g).unwrap();
        let expected = kappa(2, s).unwrap() * 2.0f64.powf(s) / s;
        assert_relative_eq!(a.a0, expected, max_relative = 1e-13);
        assert_relative_eq!(2.0f64.powf(0.5) / 0.5, 2.0 * 2.0f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn a0_mirror_ratio() {
        // only |rho e - z| differs between z = -+ (rho/2) e: ratio 3^{-n}
        for n in 1..=3usize {
            let g = geom(n, 0.4, 1.0);
            let e = [1.0, 0.0, 0.0];
            let plus = a0_coefficient(&[0.5, 0.0, 0.0], &e, &g).unwrap().a0;
            let minus = a0_coefficient(&[-0.5, 0.0, 0.0], &e, &g).unwrap().a0;
            assert_relative_eq!(minus / plus, 3.0f64.powi(-(n as i32)), max_relative = 1e-12);
        }
    }

    #[test]
    fn a0_rejects_boundary_point() {
        let g = geom(2, 0.5, 1.0);
        assert!(a0_coefficient(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &g).is_err());
    }

    #[test]
    fn blowup_limit_beta_oracle() {
        // n=2, s=0.5, e=e1, y=0 -> kappa * B(1/2, 1/2) = kappa * pi
        let g = geom(2, 0.5, 1.0);
        let v = interior_blowup_limit(&[1.0, 0.0, 0.0], &[0.0; 3], &g).unwrap();
        let expected = kappa(2, 0.5).unwrap() * std::f64::consts::PI;
        assert_relative_eq!(v, expected, max_relative = 1e-12);
    }

    #[test]
    fn blowup_limit_homogeneity() {
        let g = geom(3, 0.7, 1.0);
        let e = [1.0, 0.0, 0.0];
        let y1 = [0.0, 0.5, 0.0];
        // doubling |e - y| scales by 2^{2s - n}
        let v1 = interior_blowup_limit(&e, &y1, &g).unwrap();
        let d1 = dist(&e, &y1);
        let v2 = interior_blowup_limit(&scale(&e, 2.0), &scale(&y1, 2.0), &g).unwrap();
        let _ = d1;
        assert_relative_eq!(
            v2 / v1,
            2.0f64.powf(2.0 * 0.7 - 3.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn blowup_rejects_small_dimension() {
        let g = geom(1, 0.75, 1.0);
        assert!(interior_blowup_limit(&[1.0, 0.0, 0.0], &[0.0; 3], &g).is_err());
    }

    #[test]
    fn kappa_calibration_matches_closed_form() {
        for &(n, s) in &[(1usize, 0.25), (1, 0.75), (2, 0.5), (3, 0.3), (3, 0.7)] {
            let g = geom(n, s, 1.0);
            let cal = calibrate_kappa(&g, &q()).unwrap();
            let formula = kappa(n, s).unwrap();
            assert_relative_eq!(cal, formula, max_relative = 1e-3);
        }
    }

    #[test]
    fn kappa_log_calibration() {
        let g = geom(1, 0.5, 1.0);
        let cal = calibrate_kappa(&g, &q()).unwrap();
        assert_relative_eq!(cal, kappa_log(), max_relative = 1e-3);
    }

    #[test]
    fn torsion_gamma_values() {
        // gamma(1, 1/2) = 1 and gamma(3, 1/2) = 1/2... check the arithmetic ones
        assert_relative_eq!(torsion_gamma(1, 0.5).unwrap(), 1.0, max_relative = 1e-12);
        let g3 = torsion_gamma(3, 0.5).unwrap();
        assert_relative_eq!(g3, 0.5, max_relative = 1e-12);
    }
}
