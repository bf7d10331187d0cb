//! Adaptive Gauss-Kronrod quadrature on intervals, plus Gauss-Legendre rules
//! and substitutions for algebraic endpoint singularities.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;

/// Tolerances and subdivision budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if abs_tol <= 0.0 || rel_tol <= 0.0 {
            return Err(Error::Config(format!(
                "tolerances must be positive (abs {abs_tol}, rel {rel_tol})"
            )));
        }
        if max_subdivisions < 1 {
            return Err(Error::Config("max_subdivisions must be >= 1".into()));
        }
        Ok(QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    pub fn tight() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 400,
        }
    }

    pub fn with_tolerance(tol: f64) -> Self {
        QuadratureSpec {
            abs_tol: tol,
            rel_tol: tol,
            max_subdivisions: 400,
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 400,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) with the embedded
// 7-point Gauss weights, as in QUADPACK's QK15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_26,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    // the embedded 7-point Gauss rule uses the odd-indexed abscissae plus the centre
    let mut gauss = WG[3] * fc;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let sum = f(c - h * x) + f(c + h * x);
        kronrod += wk * sum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * sum;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Adaptive GK15 over [a, b].
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    adaptive_split(f, &[a, b], spec)
}

/// Adaptive GK15 with user-supplied initial breakpoints (ascending).
pub fn adaptive_split<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    assert!(points.len() >= 2, "need at least two breakpoints");
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&f, w[0], w[1]);
        total += v;
        total_err += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut subdivisions = 0;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol || heap.is_empty() {
            return Ok(QuadResult {
                value: total,
                error: total_err,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total,
                bound: total_err,
                tol,
            });
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept its estimate
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
}

/// Integrates f over [a, b] where f behaves like |t - sing|^p near the
/// singular endpoint `sing` (which must be a or b), with p > -1.
/// The substitution |t - sing| = v^{1/(p+1)} makes the integrand bounded.
pub fn adaptive_power_endpoint<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    sing_at_a: bool,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    assert!(p > -1.0, "exponent must be integrable");
    if b <= a {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }
    let q = p + 1.0;
    let len = b - a;
    let upper = len.powf(q);
    let g = |v: f64| {
        let off = v.powf(1.0 / q);
        let t = if sing_at_a { a + off } else { b - off };
        f(t) * off.powf(1.0 - q) / q
    };
    adaptive(g, 0.0, upper, spec)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let m = (n + 1) / 2;
    for i in 0..m {
        // Newton iteration from the Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
        if i != n - 1 - i {
            out.push((-x, w));
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomial_exactly() {
        let spec = QuadratureSpec::tight();
        let r = adaptive(|t| 3.0 * t * t, 0.0, 2.0, &spec).unwrap();
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-13);
    }

    #[test]
    fn handles_peaked_integrand() {
        let spec = QuadratureSpec::with_tolerance(1e-10);
        let r = adaptive(|t: f64| (-(t * t) * 1e4).exp(), -1.0, 1.0, &spec).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt() / 100.0, max_relative = 1e-8);
    }

    #[test]
    fn power_endpoint_substitution() {
        // int_0^1 t^{-1/2} dt = 2
        let spec = QuadratureSpec::tight();
        let r = adaptive_power_endpoint(|t: f64| t.powf(-0.5), 0.0, 1.0, true, -0.5, &spec).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
        // singularity at the right endpoint: int_0^1 (1-t)^{-0.3} dt = 1/0.7
        let r = adaptive_power_endpoint(|t: f64| (1.0 - t).powf(-0.3), 0.0, 1.0, false, -0.3, &spec)
            .unwrap();
        assert_relative_eq!(r.value, 1.0 / 0.7, max_relative = 1e-10);
    }

    #[test]
    fn nonconvergence_reports_estimate() {
        let spec = QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_subdivisions: 3,
        };
        let err = adaptive(|t: f64| t.powf(-0.9), 0.0, 1.0, &spec).unwrap_err();
        match err {
            Error::Accuracy { bound, .. } => assert!(bound > 0.0),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn gauss_legendre_rule() {
        let rule = gauss_legendre(12);
        let sum: f64 = rule.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(sum, 2.0, max_relative = 1e-13);
        // exact for x^10
        let val: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert_relative_eq!(val, 2.0 / 11.0, max_relative = 1e-12);
    }
}
