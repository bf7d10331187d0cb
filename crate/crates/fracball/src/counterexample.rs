//! Constructive pipeline for a sign-constant solution whose boundary quotient
//! u/d^s vanishes at a boundary point: paired mollifier sources, the
//! cancellation combination u_eps, its potential V_eps, and the auxiliary
//! inequalities used along the way.

use crate::dirichlet::{
    boundary_quotient, default_delta_sweep, solve_on_grid, solve_radial_at, BoundaryQuotient,
    SampledField, SourceTerm,
};
use crate::error::{Error, Result};
use crate::geom::{norm, Point, ProblemGeometry};
use crate::greenball::{a0_coefficient, GreenEvaluator};
use crate::operator::{eval_l, AnisoKernel, EvaluableFunction};
use crate::specialfn::{
    adaptive, adaptive_power_endpoint, sphere_measure, sphere_quadrature, CubicSpline,
    QuadratureSpec,
};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Two mollified sources: a bump of width eps at the origin and a shell of
/// width 2 eps at radius rho0.
#[derive(Clone)]
pub struct MollifierPair {
    pub epsilon: f64,
    pub rho0: f64,
    profile: RadialFn,
}

/// The standard bump exp(-1/(1-t^2)) on (-1, 1).
pub fn standard_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

impl MollifierPair {
    pub fn new(
        epsilon: f64,
        rho0: f64,
        geom: &ProblemGeometry,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(rho0 > 0.0 && rho0 < geom.rho) {
            return Err(Error::Config(format!(
                "shell radius must lie in (0, rho), got {rho0}"
            )));
        }
        if !(epsilon > 0.0 && epsilon < rho0.min(geom.rho - rho0) / 2.0) {
            return Err(Error::Config(format!(
                "mollifier width {epsilon} too large for disjoint supports inside the ball"
            )));
        }
        Ok(MollifierPair {
            epsilon,
            rho0,
            profile: Arc::new(profile),
        })
    }

    pub fn defaults(geom: &ProblemGeometry) -> Result<Self> {
        Self::new(0.05 * geom.rho, 0.5 * geom.rho, geom, standard_bump)
    }

    pub fn with_epsilon(&self, epsilon: f64, geom: &ProblemGeometry) -> Result<Self> {
        let profile = self.profile.clone();
        let mut out = Self::new(epsilon, self.rho0, geom, |_| 0.0)?;
        out.profile = profile;
        Ok(out)
    }

    /// phi_1(x) = eps^{-n} phi(|x|/eps), as a function of the radius.
    pub fn source1_value(&self, t: f64, n: usize) -> f64 {
        (self.profile)(t / self.epsilon) / self.epsilon.powi(n as i32)
    }

    /// phi_2(x) = eps^{-1} phi((|x| - rho0)/eps).
    pub fn source2_value(&self, t: f64) -> f64 {
        (self.profile)((t - self.rho0) / self.epsilon) / self.epsilon
    }

    pub fn profile_value(&self, t: f64) -> f64 {
        (self.profile)(t)
    }

    pub fn support1(&self) -> (f64, f64) {
        (0.0, self.epsilon)
    }

    pub fn support2(&self) -> (f64, f64) {
        (self.rho0 - self.epsilon, self.rho0 + self.epsilon)
    }
}

/// The two sources as solver inputs.
pub fn build_sources(pair: &MollifierPair, geom: &ProblemGeometry) -> Result<(SourceTerm, SourceTerm)> {
    let n = geom.n;
    let (p1, p2) = (pair.clone(), pair.clone());
    let s1 = SourceTerm::radial(move |t| p1.source1_value(t, n), 0.0, pair.epsilon);
    let (lo2, hi2) = pair.support2();
    let s2 = SourceTerm::radial(move |t| p2.source2_value(t), lo2, hi2);
    s1.validate(geom)?;
    s2.validate(geom)?;
    Ok((s1, s2))
}

/// Spherical average of the boundary-expansion coefficient at radius t.
fn a0_ring_average(t: f64, geom: &ProblemGeometry) -> Result<f64> {
    let e = [1.0, 0.0, 0.0];
    let nodes = sphere_quadrature(geom.n, crate::dirichlet::default_sphere_degree(geom.n))?;
    let mut total = 0.0;
    for (omega, w) in &nodes {
        let z = crate::geom::scale(omega, t);
        total += w * a0_coefficient(&z, &e, geom)?.a0;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuotientConstants {
    pub c1_eps: f64,
    pub c2_eps: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Boundary quotients of the two single-source solutions, computed as
/// integrals of the expansion coefficient against the sources, plus their
/// eps -> 0 closed-form limits.
pub fn quotient_constants(
    pair: &MollifierPair,
    geom: &ProblemGeometry,
    q: &QuadratureSpec,
) -> Result<QuotientConstants> {
    let n = geom.n;
    let eps = pair.epsilon;
    let c1_eps = {
        let f = |t: f64| {
            a0_ring_average(t, geom).unwrap_or(f64::NAN)
                * pair.source1_value(t, n)
                * t.powi(n as i32 - 1)
        };
        adaptive(f, 0.0, eps, q)?.value
    };
    let (lo2, hi2) = pair.support2();
    let c2_eps = {
        let f = |t: f64| {
            a0_ring_average(t, geom).unwrap_or(f64::NAN)
                * pair.source2_value(t)
                * t.powi(n as i32 - 1)
        };
        adaptive(f, lo2, hi2, q)?.value
    };
    // limits: the first source concentrates at the origin, the second on the
    // sphere of radius rho0
    let surf = sphere_measure(n)?;
    let mass1 = surf * adaptive(|t: f64| pair.profile_value(t) * t.powi(n as i32 - 1), 0.0, 1.0, q)?.value;
    let mass2 = adaptive(|t: f64| pair.profile_value(t), -1.0, 1.0, q)?.value;
    let c1 = a0_coefficient(&[0.0; 3], &[1.0, 0.0, 0.0], geom)?.a0 * mass1;
    let c2 = a0_ring_average(pair.rho0, geom)? * pair.rho0.powi(n as i32 - 1) * mass2;
    if !(c1_eps > 0.0 && c2_eps > 0.0 && c1 > 0.0 && c2 > 0.0) {
        return Err(Error::Accuracy {
            estimate: c1_eps.min(c2_eps),
            bound: f64::INFINITY,
            tol: q.abs_tol,
        });
    }
    Ok(QuotientConstants {
        c1_eps,
        c2_eps,
        c1,
        c2,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleResult {
    pub constants: QuotientConstants,
    pub epsilon_used: f64,
    pub epsilons_tried: Vec<f64>,
    pub u_eps: SampledField,
    pub v_eps: SampledField,
    pub quotient: BoundaryQuotient,
    pub quotient_scale: f64,
    pub suppo1_margin: f64,
    pub suppo2_margin: f64,
    pub residual: f64,
    pub residual_scale: f64,
    pub boundary_sign_constant: bool,
    pub note: Option<String>,
}

/// Radial grid refined around both source supports and toward the boundary.
fn counterexample_grid(pair: &MollifierPair, geom: &ProblemGeometry) -> Vec<f64> {
    let mut grid = crate::dirichlet::boundary_clustered_grid(128, geom.rho);
    let eps = pair.epsilon;
    for k in 0..24 {
        grid.push(eps * (0.5 + 1.75 * k as f64 / 23.0));
    }
    let (lo2, hi2) = pair.support2();
    let (lo2, hi2) = (lo2 - eps, hi2 + eps);
    for k in 0..32 {
        grid.push(lo2 + (hi2 - lo2) * k as f64 / 31.0);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-4 * geom.rho);
    grid.retain(|r| *r > 0.0 && *r < geom.rho);
    grid
}

/// Builds u_eps = c2_eps u1 - c1_eps u2 and its potential, retrying with a
/// halved mollifier width when the support margins or constant bracketing
/// fail.
pub fn build_counterexample(
    pair: &MollifierPair,
    geom: &ProblemGeometry,
    q: &QuadratureSpec,
) -> Result<CounterexampleResult> {
    let mut tried = Vec::new();
    let mut current = pair.clone();
    for _attempt in 0..=4 {
        tried.push(current.epsilon);
        match try_build(&current, geom, q)? {
            Built::Done(mut res) => {
                res.epsilons_tried = tried;
                return Ok(*res);
            }
            Built::Retry(_why) => {
                current = current.with_epsilon(current.epsilon / 2.0, geom)?;
            }
        }
    }
    Err(Error::ConstructionFailed(format!(
        "support margins stayed nonpositive for widths {tried:?}"
    )))
}

enum Built {
    Done(Box<CounterexampleResult>),
    Retry(String),
}

fn try_build(pair: &MollifierPair, geom: &ProblemGeometry, q: &QuadratureSpec) -> Result<Built> {
    let constants = quotient_constants(pair, geom, q)?;
    let bracket_ok = constants.c1_eps > constants.c1 / 2.0
        && constants.c1_eps < 2.0 * constants.c1
        && constants.c2_eps > constants.c2 / 2.0
        && constants.c2_eps < 2.0 * constants.c2;
    if !bracket_ok {
        return Ok(Built::Retry("constants escaped their limit bracket".into()));
    }
    let (s1, s2) = build_sources(pair, geom)?;
    let grid = counterexample_grid(pair, geom);
    let u1 = solve_on_grid(&s1, geom, &grid, q)?;
    let u2 = solve_on_grid(&s2, geom, &grid, q)?;
    let (c1e, c2e) = (constants.c1_eps, constants.c2_eps);
    let u1_means = u1.radial_means();
    let u2_means = u2.radial_means();
    let u_vals: Vec<f64> = u1_means
        .iter()
        .zip(u2_means.iter())
        .map(|(a, b)| c2e * a - c1e * b)
        .collect();

    // nonvanishing on both source supports, at grid resolution
    let margin_over = |lo: f64, hi: f64| {
        grid.iter()
            .zip(u_vals.iter())
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .map(|(_, v)| v.abs())
            .fold(f64::INFINITY, f64::min)
    };
    let (lo1, hi1) = pair.support1();
    let (lo2, hi2) = pair.support2();
    let suppo1 = margin_over(lo1, hi1);
    let suppo2 = margin_over(lo2, hi2);
    let sign1 = interval_sign(&grid, &u_vals, lo1, hi1);
    let sign2 = interval_sign(&grid, &u_vals, lo2, hi2);
    if !(suppo1 > 0.0 && suppo2 > 0.0 && sign1 != 0 && sign2 != 0) {
        return Ok(Built::Retry("u_eps vanishes on a source support".into()));
    }

    // boundary quotient of the combination, evaluated directly through the
    // Green representation at each sweep point
    let gev = GreenEvaluator::new(geom)?;
    let p1 = pair.clone();
    let p2 = pair.clone();
    let n = geom.n;
    let prof1: RadialFn = Arc::new(move |t| p1.source1_value(t, n));
    let prof2: RadialFn = Arc::new(move |t| p2.source2_value(t));
    let u_at = |r: f64| -> Result<f64> {
        let a = solve_radial_at(&gev, &prof1, pair.support1(), r, q)?;
        let b = solve_radial_at(&gev, &prof2, pair.support2(), r, q)?;
        Ok(c2e * a - c1e * b)
    };
    let u_point = |x: &Point| u_at(norm(x));
    let quotient = boundary_quotient(
        &u_point,
        &[geom.rho, 0.0, 0.0],
        geom,
        &default_delta_sweep(geom.rho),
    )?;
    let quotient_scale = constants.c1_eps.max(constants.c2_eps) * constants.c1_eps;

    // sign constancy on the outer annulus at grid resolution
    let boundary_sign_constant =
        interval_sign(&grid, &u_vals, 0.95 * geom.rho, geom.rho) != 0;

    // potential V = (c2 phi1 - c1 phi2)/u on the supports, 0 elsewhere
    let v_vals: Vec<f64> = grid
        .iter()
        .zip(u_vals.iter())
        .map(|(r, u)| {
            let in1 = *r >= lo1 && *r <= hi1;
            let in2 = *r >= lo2 && *r <= hi2;
            if in1 || in2 {
                (c2e * pair.source1_value(*r, n) - c1e * pair.source2_value(*r)) / u
            } else {
                0.0
            }
        })
        .collect();

    let u_at_zero = u_at(0.0)?;
    let residual = residual_sup(pair, geom, q, &grid, &u_vals, u_at_zero, &quotient, c1e, c2e)?;
    let phi1_sup = pair.source1_value(0.0, n);

    let note = (geom.n == 1 && geom.s() > 0.5).then(|| {
        "one-dimensional geometry with s > 1/2: the Green function does not vanish at \
         coincident centre points; the construction is unaffected"
            .to_string()
    });

    let u_field = SampledField::from_radial_values(*geom, grid.clone(), &u_vals, "paired source combination")?;
    let v_field = SampledField::from_radial_values(*geom, grid, &v_vals, "potential on source supports")?;
    Ok(Built::Done(Box::new(CounterexampleResult {
        constants,
        epsilon_used: pair.epsilon,
        epsilons_tried: Vec::new(),
        u_eps: u_field,
        v_eps: v_field,
        quotient,
        quotient_scale,
        suppo1_margin: suppo1,
        suppo2_margin: suppo2,
        residual,
        residual_scale: phi1_sup,
        boundary_sign_constant,
        note,
    })))
}

fn interval_sign(grid: &[f64], vals: &[f64], lo: f64, hi: f64) -> i32 {
    let mut sign = 0;
    for (r, v) in grid.iter().zip(vals.iter()) {
        if *r < lo || *r > hi {
            continue;
        }
        let s = if *v > 0.0 {
            1
        } else if *v < 0.0 {
            -1
        } else {
            return 0;
        };
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return 0;
        }
    }
    sign
}

/// sup |(-Delta)^s u_eps - (c2 phi1 - c1 phi2)| over interior test points,
/// with u_eps interpolated as (rho^2 - r^2)^s times a radial spline.
#[allow(clippy::too_many_arguments)]
fn residual_sup(
    pair: &MollifierPair,
    geom: &ProblemGeometry,
    q: &QuadratureSpec,
    grid: &[f64],
    u_vals: &[f64],
    u_at_zero: f64,
    quotient: &BoundaryQuotient,
    c1e: f64,
    c2e: f64,
) -> Result<f64> {
    let s = geom.s();
    let rho = geom.rho;
    // mirror the radial data so the interpolant of u/(rho^2 - r^2)^s is even
    // (the symmetric spline has zero slope at the origin, avoiding a kink)
    let mut xs = Vec::with_capacity(2 * grid.len() + 3);
    let mut ys = Vec::with_capacity(2 * grid.len() + 3);
    let w = |r: f64, u: f64| u / (rho * rho - r * r).powf(s);
    let w_boundary = quotient.extrapolated / (2.0 * rho).powf(s);
    xs.push(-rho);
    ys.push(w_boundary);
    for (r, u) in grid.iter().zip(u_vals.iter()).rev() {
        xs.push(-*r);
        ys.push(w(*r, *u));
    }
    xs.push(0.0);
    ys.push(w(0.0, u_at_zero));
    for (r, u) in grid.iter().zip(u_vals.iter()) {
        xs.push(*r);
        ys.push(w(*r, *u));
    }
    xs.push(rho);
    ys.push(w_boundary);
    let spline = CubicSpline::new(xs, ys)?;
    let f = EvaluableFunction::new(
        move |x: &Point| {
            let r = norm(x);
            if r >= rho {
                0.0
            } else {
                spline.eval(r) * (rho * rho - r * r).powf(s)
            }
        },
        [0.0; 3],
        rho,
    )
    .with_support_radius(rho)
    .with_breakpoints(vec![rho]);
    let kernel = AnisoKernel::fractional_laplacian(geom.n, s)?;
    let n = geom.n;
    let eps = pair.epsilon;
    let (lo2, hi2) = pair.support2();
    let mut pts: Vec<f64> = (0..10).map(|k| eps * (0.05 + 0.9 * k as f64 / 9.0)).collect();
    pts.extend((0..10).map(|k| lo2 + (hi2 - lo2) * (0.05 + 0.9 * k as f64 / 9.0)));
    // and a few points away from both supports
    pts.extend([0.25 * rho, 0.75 * rho]);
    let ql = QuadratureSpec::with_tolerance(1e-7);
    let _ = q;
    let mut worst = 0.0f64;
    for r in pts {
        let x = [r, 0.0, 0.0];
        let lhs = eval_l(&f, &x, &kernel, geom.s, &ql)?.value;
        let rhs = c2e * pair.source1_value(r, n) - c1e * pair.source2_value(r);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SphereInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// int_{S^{n-1}} |e - omega|^{2s-n} dH against the plain surface measure,
/// for n in {2, 3} and s in (1/2, 1).
pub fn sphere_inequality(n: usize, s: f64) -> Result<SphereInequality> {
    if !(n == 2 || n == 3) || !(s > 0.5 && s < 1.0) {
        return Err(Error::Config(format!(
            "sphere inequality needs n in {{2,3}} and s in (1/2,1), got n = {n}, s = {s}"
        )));
    }
    let q = QuadratureSpec::tight();
    let lhs = if n == 2 {
        // 2 int_0^pi (2 sin(theta/2))^{2s-2} dtheta
        2.0 * adaptive_power_endpoint(
            |th: f64| (2.0 * (th / 2.0).sin()).powf(2.0 * s - 2.0),
            0.0,
            std::f64::consts::PI,
            true,
            2.0 * s - 2.0,
            &q,
        )?
        .value
    } else {
        // 2 pi int_0^2 (2v)^{s - 3/2} dv  (v = 1 - mu)
        2.0 * std::f64::consts::PI
            * adaptive_power_endpoint(
                |v: f64| (2.0 * v).powf(s - 1.5),
                0.0,
                2.0,
                true,
                s - 1.5,
                &q,
            )?
            .value
    };
    let rhs = sphere_measure(n)?;
    let margin = lhs - rhs;
    if margin <= 0.0 {
        return Err(Error::Accuracy {
            estimate: margin,
            bound: f64::INFINITY,
            tol: q.abs_tol,
        });
    }
    Ok(SphereInequality { lhs, rhs, margin })
}

/// Closed form of the n = 3 surface integral: 2^{2s} pi / (2s - 1).
pub fn sphere_inequality_closed_form_3d(s: f64) -> f64 {
    4.0f64.powf(s) * std::f64::consts::PI / (2.0 * s - 1.0)
}

/// The one-dimensional analogue: the two-point sum gives 2^{2s-1}, never 2.
pub fn line_analogue(s: f64) -> (f64, f64) {
    (2.0f64.powf(2.0 * s - 1.0), 2.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FSigmaReport {
    pub argmin: f64,
    pub f_at_one: f64,
    pub expected_min: f64,
    pub monotone_below: bool,
    pub monotone_above: bool,
    pub blows_up_at_ends: bool,
}

pub fn f_sigma(sigma: f64, n: usize, s: f64) -> f64 {
    let a = 2.0 * s - n as f64;
    (1.0 + sigma.powf(a)) / (1.0 + sigma).powf(a)
}

/// Verifies the shape of F(sigma) = (1 + sigma^{2s-n})/(1 + sigma)^{2s-n}:
/// strict minimum 2^{n+1-2s} at sigma = 1, monotone on each side, blowing up
/// at both ends.
pub fn f_sigma_check(n: usize, s: f64) -> Result<FSigmaReport> {
    if (n as f64) <= 2.0 * s {
        return Err(Error::Config(format!(
            "F-shape analysis needs n > 2s, got n = {n}, s = {s}"
        )));
    }
    // F'(sigma) has the sign of 1 - sigma^{a-1} with a = 2s - n; bisect that
    // expression (simple sign change, so this reaches machine accuracy where
    // a value-based search would stall at sqrt(eps))
    let a_exp = 2.0 * s - n as f64;
    let dsign = |sig: f64| 1.0 - sig.powf(a_exp - 1.0);
    let (mut a, mut b) = (0.2f64, 5.0f64);
    if !(dsign(a) < 0.0 && dsign(b) > 0.0) {
        return Err(Error::ConstructionFailed(
            "derivative did not bracket a minimum on [0.2, 5]".into(),
        ));
    }
    while b - a > 1e-14 {
        let mid = 0.5 * (a + b);
        if dsign(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let argmin = 0.5 * (a + b);
    let grid_below: Vec<f64> = (1..200).map(|k| k as f64 / 200.0).collect();
    let monotone_below = grid_below
        .windows(2)
        .all(|w| f_sigma(w[0], n, s) > f_sigma(w[1], n, s));
    let grid_above: Vec<f64> = (1..200).map(|k| 1.0 + k as f64 * 0.25).collect();
    let monotone_above = grid_above
        .windows(2)
        .all(|w| f_sigma(w[0], n, s) < f_sigma(w[1], n, s));
    let blows_up = f_sigma(1e-8, n, s) > 1e3 && f_sigma(1e8, n, s) > 1e3;
    Ok(FSigmaReport {
        argmin,
        f_at_one: f_sigma(1.0, n, s),
        expected_min: 2.0f64.powf(n as f64 + 1.0 - 2.0 * s),
        monotone_below,
        monotone_above,
        blows_up_at_ends: blows_up,
    })
}

/// Slack of a^{2s-n} + b^{2s-n} >= 2^{n+1-2s} (a+b)^{2s-n} (nonnegative,
/// zero only at a = b).
pub fn power_inequality_slack(a: f64, b: f64, n: usize, s: f64) -> f64 {
    let e = 2.0 * s - n as f64;
    a.powf(e) + b.powf(e) - 2.0f64.powf(n as f64 + 1.0 - 2.0 * s) * (a + b).powf(e)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnboundedVRow {
    pub delta: f64,
    pub v_abs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnboundedVReport {
    pub rows: Vec<UnboundedVRow>,
    /// slope of log|V| against log(delta) over the last rows
    pub growth_exponent: f64,
    pub dropped_points: usize,
}

/// Tabulates V = ((-Delta)^s u)/u along a normal approach to the boundary for
/// a radial profile u0 on the unit interval (u(x) = u0(|x|/rho)).
pub fn unbounded_v_example(
    geom: &ProblemGeometry,
    u0: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<UnboundedVReport> {
    let rho = geom.rho;
    let u0 = Arc::new(u0);
    let u0c = u0.clone();
    let f = EvaluableFunction::new(
        move |x: &Point| {
            let t = norm(x) / rho;
            if t >= 1.0 {
                0.0
            } else {
                u0c(t)
            }
        },
        [0.0; 3],
        rho,
    )
    .with_support_radius(rho)
    .with_breakpoints(vec![rho]);
    let kernel = AnisoKernel::fractional_laplacian(geom.n, geom.s())?;
    let q = QuadratureSpec::with_tolerance(1e-7);
    let mut rows = Vec::new();
    let mut dropped = 0;
    for k in 0..8 {
        let delta = 0.2 * rho / (1u64 << k) as f64;
        let r = rho - delta;
        let u_val = u0(r / rho);
        if u_val.abs() < 1e-14 {
            dropped += 1;
            continue;
        }
        let g = eval_l(&f, &[r, 0.0, 0.0], &kernel, geom.s, &q)?.value;
        rows.push(UnboundedVRow {
            delta,
            v_abs: (g / u_val).abs(),
        });
    }
    if rows.len() < 4 {
        return Err(Error::ConstructionFailed(
            "too few valid approach points for the potential tabulation".into(),
        ));
    }
    // least-squares slope on the last four rows
    let tail = &rows[rows.len() - 4..];
    let xs: Vec<f64> = tail.iter().map(|r| r.delta.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.v_abs.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = ys.iter().sum::<f64>() / 4.0;
    let num: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(UnboundedVReport {
        rows,
        growth_exponent: num / den,
        dropped_points: dropped,
    })
}
