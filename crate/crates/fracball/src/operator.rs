//! Pointwise principal-value evaluation of the integro-differential operator
//!
//!   L f(x) = PV int (f(x) - f(x+y)) |y|^{-n-2s} a(y/|y|) dy,
//!
//! with an even, elliptic angular density a, plus the barrier construction
//! and the tail estimate used by the comparison argument.

use crate::error::{Error, Result};
use crate::geom::{add, dist, dot, norm, scale, sub, FracOrder, Point};
use crate::specialfn::{
    adaptive_power_endpoint, adaptive_split, gamma_fn, sphere_measure, sphere_quadrature,
    QuadratureSpec,
};
use std::sync::Arc;

type DensityFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
type FieldFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Angular density a(theta) with ellipticity bounds; immutable once built.
#[derive(Clone)]
pub struct AnisoKernel {
    density: DensityFn,
    pub lambda: f64,
    pub big_lambda: f64,
    pub n: usize,
    nodes: Vec<(Point, f64)>,
}

impl AnisoKernel {
    /// Validates evenness and the ellipticity bounds at the quadrature nodes.
    pub fn new(
        density: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        lambda: f64,
        big_lambda: f64,
        n: usize,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= big_lambda) {
            return Err(Error::Config(format!(
                "ellipticity bounds must satisfy 0 < lambda <= Lambda, got {lambda}, {big_lambda}"
            )));
        }
        let degree = match n {
            1 => 1,
            2 => 40,
            _ => 24,
        };
        let nodes = sphere_quadrature(n, degree)?;
        for (theta, _) in &nodes {
            let v = density(theta);
            let w = density(&scale(theta, -1.0));
            if (v - w).abs() > 1e-12 * v.abs().max(1.0) {
                return Err(Error::Config(format!(
                    "kernel density is not even at node {theta:?}: a = {v}, a(-theta) = {w}"
                )));
            }
            if v < lambda - 1e-12 || v > big_lambda + 1e-12 {
                return Err(Error::Config(format!(
                    "kernel density {v} escapes [{lambda}, {big_lambda}] at node {theta:?}"
                )));
            }
        }
        Ok(AnisoKernel {
            density: Arc::new(density),
            lambda,
            big_lambda,
            n,
            nodes,
        })
    }

    /// The constant density making L the fractional Laplacian with Fourier
    /// symbol |xi|^{2s}: a = 4^s s Gamma(n/2 + s) / (pi^{n/2} Gamma(1 - s)).
    pub fn fractional_laplacian(n: usize, s: f64) -> Result<Self> {
        let c = frac_laplacian_constant(n, s)?;
        Self::new(move |_| c, c, c, n)
    }

    pub fn density(&self, theta: &Point) -> f64 {
        (self.density)(theta)
    }

    pub fn sphere_nodes(&self) -> &[(Point, f64)] {
        &self.nodes
    }

    /// int_{S^{n-1}} a(theta) dH.
    pub fn total_mass(&self) -> f64 {
        self.nodes.iter().map(|(th, w)| w * self.density(th)).sum()
    }
}

/// Normalization constant of the fractional Laplacian.
pub fn frac_laplacian_constant(n: usize, s: f64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    Ok(4.0f64.powf(s) * s * gamma_fn(n as f64 / 2.0 + s)?
        / (pi.powf(n as f64 / 2.0) * gamma_fn(1.0 - s)?))
}

/// Exterior control u^-(y) <= c_bar (1 + |y - base|^{2s - delta}), together
/// with the radius of the ball around `base` where the function is known
/// nonnegative.
#[derive(Debug, Clone, Copy)]
pub struct GrowthCertificate {
    pub c_bar: f64,
    pub delta: f64,
    pub base: Point,
    pub nonneg_radius: f64,
}

/// A function handle with the analytic metadata the PV evaluator needs.
#[derive(Clone)]
pub struct EvaluableFunction {
    f: FieldFn,
    pub smooth_center: Point,
    pub smooth_radius: f64,
    pub support_radius: Option<f64>,
    pub growth: Option<GrowthCertificate>,
    /// radii about the origin where the function is continuous but not C^1
    /// (e.g. the d^s cusp at the boundary of its support)
    pub radial_breakpoints: Vec<f64>,
}

impl EvaluableFunction {
    pub fn new(
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        smooth_center: Point,
        smooth_radius: f64,
    ) -> Self {
        EvaluableFunction {
            f: Arc::new(f),
            smooth_center,
            smooth_radius,
            support_radius: None,
            growth: None,
            radial_breakpoints: Vec::new(),
        }
    }

    pub fn with_support_radius(mut self, r: f64) -> Self {
        self.support_radius = Some(r);
        self
    }

    pub fn with_growth(mut self, g: GrowthCertificate) -> Self {
        self.growth = Some(g);
        self
    }

    pub fn with_breakpoints(mut self, radii: Vec<f64>) -> Self {
        self.radial_breakpoints = radii;
        self
    }

    pub fn eval(&self, x: &Point) -> f64 {
        if let Some(r) = self.support_radius {
            if norm(x) >= r {
                return 0.0;
            }
        }
        (self.f)(x)
    }

    /// The s-th power torsion profile (1 - |x|^2)_+^s on the unit ball.
    pub fn torsion_profile(s: f64) -> Self {
        EvaluableFunction::new(
            move |x: &Point| (1.0 - norm(x).powi(2)).max(0.0).powf(s),
            [0.0; 3],
            1.0,
        )
        .with_support_radius(1.0)
        .with_breakpoints(vec![1.0])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LValue {
    pub value: f64,
    pub error: f64,
}

/// Positive roots of |x + t theta| = b along the ray t >= 0.
fn ray_crossings(x: &Point, theta: &Point, b: f64) -> Vec<f64> {
    let xb = dot(x, theta);
    let disc = xb * xb + b * b - dot(x, x);
    if disc <= 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    [-xb - sq, -xb + sq]
        .into_iter()
        .filter(|t| *t > 0.0)
        .collect()
}

/// Evaluates L f at x by symmetrized inner quadrature plus truncated outer
/// quadrature with an analytic tail.
pub fn eval_l(
    f: &EvaluableFunction,
    x: &Point,
    kernel: &AnisoKernel,
    s: FracOrder,
    q: &QuadratureSpec,
) -> Result<LValue> {
    let s = s.value();
    let margin = f.smooth_radius - dist(x, &f.smooth_center);
    if margin <= 0.0 {
        return Err(Error::Domain(format!(
            "evaluation point {x:?} lies outside the declared smoothness ball"
        )));
    }
    let delta = (0.5 * margin).min(0.1);
    let fx = f.eval(x);

    let mut value = 0.0;
    let mut err = 0.0;

    for (theta, w) in kernel.sphere_nodes() {
        let a = kernel.density(theta);
        if a == 0.0 {
            continue;
        }
        // inner, symmetrized: the even density makes the gradient term drop,
        // leaving an O(t^{1-2s}) integrand
        let inner_integrand = |t: f64| {
            let fp = f.eval(&add(x, &scale(theta, t)));
            let fm = f.eval(&sub(x, &scale(theta, t)));
            (2.0 * fx - fp - fm) / (2.0 * t.powf(1.0 + 2.0 * s))
        };
        // below t_floor the second difference is pure cancellation noise;
        // integrate the leading t^{1-2s} behavior of that head in closed form
        let t_floor = 1e-3 * delta;
        let head = inner_integrand(t_floor) * t_floor / (2.0 - 2.0 * s);
        let p_inner = (1.0 - 2.0 * s).min(0.0);
        let mut inner = adaptive_power_endpoint(inner_integrand, t_floor, delta, true, p_inner, q)?;
        inner.value += head;
        inner.error += head.abs() * (t_floor / delta).powi(2);

        // outer: integrate until the ray leaves the support (or the certified
        // truncation radius), then add the f(x) tail in closed form
        let outer_integrand = |t: f64| (fx - f.eval(&add(x, &scale(theta, t)))) / t.powf(1.0 + 2.0 * s);
        let t_exit = match f.support_radius {
            Some(rsup) => ray_crossings(x, theta, rsup)
                .last()
                .copied()
                .unwrap_or(delta),
            None => {
                // truncate using the growth certificate; the neglected part is
                // charged to the error estimate below
                let g = f.growth.ok_or_else(|| {
                    Error::Domain(
                        "function needs either a support radius or a growth certificate".into(),
                    )
                })?;
                let _ = g;
                1e4
            }
        }
        .max(delta);
        let mut splits = vec![delta];
        for b in &f.radial_breakpoints {
            for t in ray_crossings(x, theta, *b) {
                if t > delta && t < t_exit {
                    splits.push(t);
                }
            }
        }
        splits.push(t_exit);
        splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let outer = adaptive_split(outer_integrand, &splits, q)?;
        let tail = fx * t_exit.powf(-2.0 * s) / (2.0 * s);
        let tail_err = match f.support_radius {
            Some(_) => 0.0,
            None => {
                let g = f.growth.unwrap();
                // |f(x + t theta)| part beyond the truncation radius
                let r_off = dist(x, &g.base);
                g.c_bar * (1.0 + (r_off + t_exit).powf(2.0 * s - g.delta))
                    * t_exit.powf(-g.delta.min(2.0 * s))
            }
        };
        value += a * w * (inner.value + outer.value + tail);
        err += a * w * (inner.error + outer.error + tail_err);
    }
    let tol = q.abs_tol.max(q.rel_tol * value.abs());
    if !err.is_finite() || err > tol.max(1e-6 * value.abs().max(1.0)) * 1e3 {
        return Err(Error::Accuracy {
            estimate: value,
            bound: err,
            tol,
        });
    }
    Ok(LValue { value, error: err })
}

/// Barrier phi = v + C1 eta (v the s-profile, eta a unit-mass bump in B_{1/4})
/// rescaled as psi(x) = alpha_r phi((x - center)/radius).
#[derive(Debug, Clone, Copy)]
pub struct BarrierSpec {
    pub center: Point,
    pub radius: f64,
    pub bump_weight: f64,
    pub scale: f64,
    pub n: usize,
}

impl BarrierSpec {
    pub fn new(center: Point, radius: f64, bump_weight: f64, scale: f64, n: usize) -> Result<Self> {
        if radius <= 0.0 || scale <= 0.0 {
            return Err(Error::Config(
                "barrier radius and scale must be positive".into(),
            ));
        }
        Ok(BarrierSpec {
            center,
            radius,
            bump_weight,
            scale,
            n,
        })
    }

    pub fn unit(n: usize, bump_weight: f64) -> Self {
        BarrierSpec {
            center: [0.0; 3],
            radius: 1.0,
            bump_weight,
            scale: 1.0,
            n,
        }
    }
}

/// Unit-mass C-infinity bump supported in B_{1/4}.
pub fn bump_eta(x: &Point, n: usize) -> f64 {
    let r = 4.0 * norm(x);
    if r >= 1.0 {
        return 0.0;
    }
    bump_normalization(n) * (-1.0 / (1.0 - r * r)).exp()
}

fn bump_normalization(n: usize) -> f64 {
    use std::sync::OnceLock;
    static NORMS: OnceLock<[f64; 3]> = OnceLock::new();
    let norms = NORMS.get_or_init(|| {
        let mut out = [0.0; 3];
        for (idx, dim) in (1usize..=3).enumerate() {
            // int over B_{1/4} of exp(-1/(1 - (4|x|)^2)) dx by radial quadrature
            let surf = sphere_measure(dim).unwrap();
            let spec = QuadratureSpec::tight();
            let integral = crate::specialfn::adaptive(
                |t: f64| {
                    let r = 4.0 * t;
                    surf * t.powi(dim as i32 - 1) * (-1.0 / (1.0 - r * r)).exp()
                },
                0.0,
                0.25,
                &spec,
            )
            .unwrap()
            .value;
            out[idx] = 1.0 / integral;
        }
        out
    });
    norms[n - 1]
}

/// psi(x) = scale * [v + C1 eta]((x - center)/radius), zero outside the
/// scaled ball.
pub fn barrier_value(spec: &BarrierSpec, x: &Point) -> f64 {
    barrier_value_s(spec, x, 0.5)
}

/// Barrier with explicit fractional order for the v-profile.
pub fn barrier_value_s(spec: &BarrierSpec, x: &Point, s: f64) -> f64 {
    let xi = scale(&sub(x, &spec.center), 1.0 / spec.radius);
    let r2 = dot(&xi, &xi);
    if r2 >= 1.0 {
        return 0.0;
    }
    let v = (1.0 - r2).powf(s);
    spec.scale * (v + spec.bump_weight * bump_eta(&xi, spec.n))
}

/// The barrier as an `EvaluableFunction` on the unit ball (center 0, radius 1).
pub fn barrier_function(spec: BarrierSpec, s: f64) -> EvaluableFunction {
    let outer = spec.radius;
    let center = spec.center;
    EvaluableFunction::new(move |x: &Point| barrier_value_s(&spec, x, s), center, outer)
        .with_support_radius(if center == [0.0; 3] { outer } else { f64::INFINITY })
        .with_breakpoints(if center == [0.0; 3] { vec![outer] } else { vec![] })
}

/// Constants coupling the barrier to the comparison argument.
#[derive(Debug, Clone, Copy)]
pub struct BarrierConstants {
    /// L v = k in B_1 for the active kernel
    pub k: f64,
    /// bump weight making L phi <= -1 in the annulus
    pub c1: f64,
    /// sup of phi over B_{1/2}
    pub c_sup: f64,
}

/// Computes k = L v (constant in B_1), then sizes the bump weight so that
/// L phi <= -1 on B_1 minus B_{1/2}, following the proof of the barrier lemma:
/// L eta <= -lambda (4/5)^{n+2s} there.
pub fn calibrate_barrier(kernel: &AnisoKernel, s: FracOrder, q: &QuadratureSpec) -> Result<BarrierConstants> {
    let n = kernel.n;
    let sv = s.value();
    let v = EvaluableFunction::torsion_profile(sv);
    let k = eval_l(&v, &[0.0; 3], kernel, s, q)?.value;
    let decay = kernel.lambda * (0.8f64).powf(n as f64 + 2.0 * sv);
    let c1 = 1.1 * (k + 1.0) / decay;
    let c_sup = 1.0 + c1 * bump_eta(&[0.0; 3], n);
    Ok(BarrierConstants { k, c1, c_sup })
}

/// Closed-form bound of the tail estimate:
///   -L f^-(x) <= 2^{2s} c_bar Lambda |S^{n-1}|
///                [ (1 + R^{2s-delta}) d0^{-2s}/(2s) + d0^{-delta}/delta ].
pub fn tail_bound(
    f: &EvaluableFunction,
    _x: &Point,
    d0: f64,
    kernel: &AnisoKernel,
    s: FracOrder,
) -> Result<f64> {
    if d0 <= 0.0 {
        return Err(Error::Domain(format!("d0 must be positive, got {d0}")));
    }
    let g = f
        .growth
        .ok_or_else(|| Error::Domain("tail_bound needs a growth certificate".into()))?;
    let sv = s.value();
    let surf = sphere_measure(kernel.n)?;
    let r_pow = 1.0 + g.nonneg_radius.powf(2.0 * sv - g.delta);
    Ok(4.0f64.powf(sv)
        * g.c_bar
        * kernel.big_lambda
        * surf
        * (r_pow * d0.powf(-2.0 * sv) / (2.0 * sv) + d0.powf(-g.delta) / g.delta))
}

/// Direct quadrature of -L f^-(x) for x where f >= 0 locally: only the
/// exterior (|y| >= d0) contributes. Used as the oracle against `tail_bound`.
pub fn neg_part_outer_integral(
    f: &EvaluableFunction,
    x: &Point,
    d0: f64,
    kernel: &AnisoKernel,
    s: FracOrder,
    q: &QuadratureSpec,
) -> Result<f64> {
    let sv = s.value();
    let t_max = match f.support_radius {
        Some(rsup) => (norm(x) + rsup) * 1.5,
        None => 1e4,
    };
    let mut total = 0.0;
    for (theta, w) in kernel.sphere_nodes() {
        let a = kernel.density(theta);
        let integrand = |t: f64| {
            let val = f.eval(&add(x, &scale(theta, t)));
            (-val).max(0.0) / t.powf(1.0 + 2.0 * sv)
        };
        let mut splits = vec![d0];
        for b in &f.radial_breakpoints {
            for t in ray_crossings(x, theta, *b) {
                if t > d0 && t < t_max {
                    splits.push(t);
                }
            }
        }
        splits.push(t_max);
        splits.sort_by(|p, q| p.partial_cmp(q).unwrap());
        total += a * w * adaptive_split(integrand, &splits, q)?.value;
    }
    Ok(total)
}
