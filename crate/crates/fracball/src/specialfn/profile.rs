//! The radial profile integral I(r; s, n) = int_0^r t^{s-1} (1+t)^{-n/2} dt
//! entering the explicit Green function of the ball.

use super::gamma::beta_fn;
use super::quad::{adaptive, QuadratureSpec};
use crate::error::{Error, Result};

/// Arguments of the profile integral. `r` is the upper limit, which may be
/// f64::INFINITY when n > 2s.
#[derive(Debug, Clone, Copy)]
pub struct GreenProfileArgs {
    pub r: f64,
    pub s: f64,
    pub n: usize,
}

impl GreenProfileArgs {
    pub fn new(r: f64, s: f64, n: usize) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("upper limit must be >= 0, got {r}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("order must lie in (0,1), got {s}")));
        }
        if n < 1 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        Ok(GreenProfileArgs { r, s, n })
    }
}

/// I(infinity; s, n) = B(s, n/2 - s), finite only when n > 2s.
pub fn green_profile_full(s: f64, n: usize) -> Result<f64> {
    let half_n = n as f64 / 2.0;
    if half_n <= s {
        return Err(Error::UnsupportedBranch(format!(
            "I(infinity) diverges for n = {n}, s = {s} (needs n > 2s)"
        )));
    }
    beta_fn(s, half_n - s)
}

/// Upper tail int_r^infinity t^{s-1}(1+t)^{-n/2} dt for large r, via the
/// binomial expansion of (1+1/t)^{-n/2}. Requires n > 2s and r >> 1.
fn profile_tail(r: f64, s: f64, n: usize) -> f64 {
    let half_n = n as f64 / 2.0;
    let mut coeff = 1.0; // binom(-n/2, k)
    let mut sum = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        let term = coeff * r.powf(s - half_n - kf) / (half_n - s + kf);
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
        coeff *= (-half_n - kf) / (kf + 1.0);
    }
    sum
}

/// I(r; s, n) with the endpoint singularity removed by t = tau^{1/s}:
/// I = (1/s) int_0^{r^s} (tau^{1/s} + 1)^{-n/2} dtau.
pub fn green_profile(args: &GreenProfileArgs, q: &QuadratureSpec) -> Result<f64> {
    let GreenProfileArgs { r, s, n } = *args;
    if r == 0.0 {
        return Ok(0.0);
    }
    let half_n = n as f64 / 2.0;
    if r.is_infinite() {
        return green_profile_full(s, n);
    }
    // far from the origin the integrand is a plain power law; switch to the
    // closed tail series to avoid a long adaptive sweep (and cancellation
    // when I(r) is close to I(infinity))
    if half_n > s && r > 50.0 {
        return Ok(green_profile_full(s, n)? - profile_tail(r, s, n));
    }
    if half_n < s && r > 50.0 {
        // divergent-at-infinity branch (n = 1, s > 1/2): integrate the head
        // directly and the smooth far part as a power-law series difference
        let head = green_profile(&GreenProfileArgs { r: 50.0, s, n }, q)?;
        // int_{50}^{r}: same binomial expansion, now with sign from the
        // antiderivative r^{s - n/2 - k}/(s - n/2 - k)
        let mut coeff = 1.0;
        let mut sum = 0.0;
        for k in 0..60 {
            let kf = k as f64;
            let expo = s - half_n - kf;
            let term = coeff * (r.powf(expo) - 50.0f64.powf(expo)) / expo;
            sum += term;
            if term.abs() < 1e-16 * sum.abs().max(1e-300) {
                break;
            }
            coeff *= (-half_n - kf) / (kf + 1.0);
        }
        return Ok(head + sum);
    }
    let upper = r.powf(s);
    let res = adaptive(
        |tau: f64| (tau.powf(1.0 / s) + 1.0).powf(-half_n) / s,
        0.0,
        upper,
        q,
    )?;
    Ok(res.value)
}

/// Spline-backed evaluator of I(r; s, n) for a fixed (s, n): the Green
/// function calls this in hot loops instead of re-running the quadrature.
/// For r <= 1 the smooth factor J = I / r^s is tabulated (J is analytic in r);
/// for 1 < r <= 50 the table holds I against ln r; beyond 50 the series
/// branches of `green_profile` are cheap and used directly.
#[derive(Debug, Clone)]
pub struct CachedProfile {
    pub s: f64,
    pub n: usize,
    near: CubicSpline,
    mid: CubicSpline,
}

use super::interp::CubicSpline;

impl CachedProfile {
    pub fn build(s: f64, n: usize) -> Result<Self> {
        let q = QuadratureSpec::tight();
        let m = 257;
        let mut xs = Vec::with_capacity(m);
        let mut ys = Vec::with_capacity(m);
        for i in 0..m {
            let r = i as f64 / (m - 1) as f64;
            let j = if r == 0.0 {
                1.0 / s
            } else {
                green_profile(&GreenProfileArgs::new(r, s, n)?, &q)? / r.powf(s)
            };
            xs.push(r);
            ys.push(j);
        }
        let near = CubicSpline::new(xs, ys)?;
        let mut xs = Vec::with_capacity(m);
        let mut ys = Vec::with_capacity(m);
        let (lo, hi) = (0f64, 50f64.ln());
        for i in 0..m {
            let lr = lo + (hi - lo) * i as f64 / (m - 1) as f64;
            let r = lr.exp();
            xs.push(lr);
            ys.push(green_profile(&GreenProfileArgs::new(r, s, n)?, &q)?);
        }
        let mid = CubicSpline::new(xs, ys)?;
        Ok(CachedProfile { s, n, near, mid })
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("upper limit must be >= 0, got {r}")));
        }
        if r <= 1.0 {
            Ok(self.near.eval(r) * r.powf(self.s))
        } else if r <= 50.0 {
            Ok(self.mid.eval(r.ln()))
        } else {
            green_profile(
                &GreenProfileArgs::new(r, self.s, self.n)?,
                &QuadratureSpec::tight(),
            )
        }
    }
}
