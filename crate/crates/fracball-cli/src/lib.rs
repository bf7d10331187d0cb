//! Experiment runner: each numerical verification is a subcommand producing a
//! deterministic JSON report and, where relevant, CSV sweep tables.

use anyhow::{bail, Context, Result};
use fracball::dirichlet::{
    boundary_clustered_grid, default_delta_sweep, radial_eigenpair, solve_radial_at,
};
use fracball::geom::{norm, Point, ProblemGeometry};
use fracball::greenball::{a0_coefficient, green, interior_blowup_limit, torsion_gamma, torsion_value, GreenEvaluator};
use fracball::hopf::{cone_quotient, growth_table, normal_approach, ConeSpec, InteriorSphereConfig};
use fracball::operator::{barrier_function, calibrate_barrier, eval_l, AnisoKernel, BarrierSpec, EvaluableFunction};
use fracball::counterexample::{
    build_counterexample, f_sigma_check, line_analogue, power_inequality_slack, sphere_inequality,
    sphere_inequality_closed_form_3d, unbounded_v_example, MollifierPair,
};
use fracball::specialfn::{lowdisc::ball_point, QuadratureSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// Geometries exercised by `suite`.
pub const SUITE_GEOMETRIES: [(usize, f64); 3] = [(1, 0.5), (2, 0.5), (3, 0.75)];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n: usize,
    pub s: f64,
    pub rho: f64,
    /// quadrature tolerance for the heavy inner loops
    pub tol: f64,
    /// mollifier width (counterexample); default 0.05 rho
    pub epsilon: Option<f64>,
    /// shell radius (counterexample); default 0.5 rho
    pub rho0: Option<f64>,
    /// cone opening angle (hopf-verify); default pi/4
    pub beta: Option<f64>,
    /// boundary distances for quotient sweeps; default geometric 1e-2..1e-4 rho
    pub delta_sweep: Option<Vec<f64>>,
    /// radial grid size for field solves
    pub grid_size: usize,
    /// start offset for the low-discrepancy sampler
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 1,
            s: 0.5,
            rho: 1.0,
            tol: 1e-8,
            epsilon: None,
            rho0: None,
            beta: None,
            delta_sweep: None,
            grid_size: 128,
            seed: 0,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            bail!("dimension must be 1, 2 or 3, got {}", self.n);
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            bail!("fractional order must lie in (0, 1), got {}", self.s);
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            bail!("ball radius must be positive, got {}", self.rho);
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            bail!("tolerance must lie in (0, 1e-2], got {}", self.tol);
        }
        if self.grid_size < 16 || self.grid_size > 4096 {
            bail!("grid size must lie in [16, 4096], got {}", self.grid_size);
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < self.rho) {
                bail!("mollifier width must lie in (0, rho), got {e}");
            }
        }
        if let Some(r0) = self.rho0 {
            if !(r0 > 0.0 && r0 < self.rho) {
                bail!("shell radius must lie in (0, rho), got {r0}");
            }
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < std::f64::consts::FRAC_PI_2) {
                bail!("cone angle must lie in (0, pi/2), got {b}");
            }
        }
        if let Some(sweep) = &self.delta_sweep {
            if sweep.len() < 3 || sweep.windows(2).any(|w| w[1] >= w[0]) {
                bail!("delta sweep must be decreasing with at least 3 entries");
            }
        }
        Ok(())
    }

    fn geometry(&self) -> Result<ProblemGeometry> {
        ProblemGeometry::new(self.n, self.s, self.rho).map_err(Into::into)
    }

    fn quad(&self) -> QuadratureSpec {
        QuadratureSpec::with_tolerance(self.tol)
    }

    fn sweep(&self) -> Vec<f64> {
        self.delta_sweep
            .clone()
            .unwrap_or_else(|| default_delta_sweep(self.rho))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub subcommand: String,
    /// one line per verified statement, naming what is checked
    pub header: Vec<String>,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckResult>,
    pub values: BTreeMap<String, serde_json::Value>,
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    fn new(subcommand: &str, header: &[&str], config: &ExperimentConfig) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            config: config.clone(),
            checks: Vec::new(),
            values: BTreeMap::new(),
            wall_time_ms: 0,
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.values
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable value"));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// JSON with the timing field zeroed, for byte-level comparisons.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_time_ms = 0;
        serde_json::to_string_pretty(&clone).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Files produced alongside a report.
#[derive(Debug, Default)]
pub struct Artifacts {
    /// (file name, contents)
    pub files: Vec<(String, String)>,
}

pub const SUBCOMMANDS: [&str; 11] = [
    "torsion-calibrate",
    "green-expansion",
    "interior-blowup",
    "barrier-check",
    "hopf-verify",
    "counterexample",
    "sphere-inequality",
    "f-sigma",
    "eigen-radial",
    "unbounded-v",
    "suite",
];

pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let (mut report, artifacts) = match name {
        "torsion-calibrate" => torsion_calibrate(cfg),
        "green-expansion" => green_expansion(cfg),
        "interior-blowup" => interior_blowup(cfg),
        "barrier-check" => barrier_check(cfg),
        "hopf-verify" => hopf_verify(cfg),
        "counterexample" => counterexample_run(cfg),
        "sphere-inequality" => sphere_inequality_run(cfg),
        "f-sigma" => f_sigma_run(cfg),
        "eigen-radial" => eigen_radial(cfg),
        "unbounded-v" => unbounded_v_run(cfg),
        other => bail!("unknown subcommand `{other}`"),
    }?;
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok((report, artifacts))
}

/// Writes the report and any sweep tables; call only after a successful run so
/// failures never leave partial outputs.
pub fn write_outputs(
    report: &ExperimentReport,
    artifacts: &Artifacts,
    out_dir: &Path,
    file_stem: &str,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let report_name = if report.subcommand == "counterexample" {
        format!("{file_stem}_report.json")
    } else {
        format!("{file_stem}.json")
    };
    std::fs::write(out_dir.join(report_name), report.to_json())?;
    for (name, contents) in &artifacts.files {
        std::fs::write(out_dir.join(name), contents)?;
    }
    Ok(())
}

fn torsion_calibrate(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "torsion-calibrate",
        &["solve of the constant source problem matches the closed-form torsion function"],
        cfg,
    );
    let geom = cfg.geometry()?;
    let q = cfg.quad();
    let gev = GreenEvaluator::new(&geom)?;
    let prof: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync> = std::sync::Arc::new(|_| 1.0);
    let mut max_rel: f64 = 0.0;
    let mut table = Vec::new();
    for k in 0..20 {
        let r = 0.9 * geom.rho * (k as f64 + 1.0) / 20.0;
        let got = solve_radial_at(&gev, &prof, (0.0, geom.rho), r, &q)?;
        let want = torsion_value(&geom, &[r, 0.0, 0.0])?;
        let rel = (got - want).abs() / want;
        max_rel = max_rel.max(rel);
        table.push((r, got, want, rel));
    }
    rep.put("samples", &table);
    rep.put("max_rel_error", max_rel);
    rep.check(
        "torsion_rel_error",
        max_rel <= 1e-3,
        format!("max relative error {max_rel:.3e} (tolerance 1e-3) over 20 radii"),
    );
    Ok((rep, Artifacts::default()))
}

fn green_expansion(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "green-expansion",
        &["Green function along a normal approach behaves like a0(z, e) delta^s"],
        cfg,
    );
    let geom = cfg.geometry()?;
    let q = QuadratureSpec::tight();
    let e = [1.0, 0.0, 0.0];
    let sweep = cfg.sweep();
    let mut csv = String::from("z_index,delta,ratio,deviation\n");
    let mut worst_final: f64 = 0.0;
    let mut decay_ok = true;
    let mut ratios_per_z = Vec::new();
    for zi in 0..5 {
        let z = ball_point(zi, geom.n, &[0.0; 3], 0.49 * geom.rho, cfg.seed);
        let a0 = a0_coefficient(&z, &e, &geom)?.a0;
        let mut devs = Vec::new();
        let mut rows = Vec::new();
        for &d in &sweep {
            let x = [geom.rho - d, 0.0, 0.0];
            let g = green(&x, &z, &geom, &q)?.value;
            let ratio = g / (a0 * d.powf(geom.s()));
            let dev = (ratio - 1.0).abs();
            writeln!(csv, "{zi},{d},{ratio},{dev}").unwrap();
            devs.push(dev);
            rows.push((d, ratio));
        }
        worst_final = worst_final.max(*devs.last().unwrap());
        for w in devs.windows(2) {
            if w[1] > w[0] / 1.5 {
                decay_ok = false;
            }
        }
        ratios_per_z.push(rows);
    }
    rep.put("ratio_sweeps", &ratios_per_z);
    rep.put("worst_final_deviation", worst_final);
    rep.check(
        "ratio_near_one",
        worst_final <= 0.05,
        format!("worst |ratio - 1| at the smallest distance: {worst_final:.3e} (tolerance 0.05)"),
    );
    rep.check(
        "deviation_decay",
        decay_ok,
        "deviation shrinks by at least 1.5x per distance halving".into(),
    );
    let mut artifacts = Artifacts::default();
    artifacts.files.push(("expansion_sweep.csv".into(), csv));
    Ok((rep, artifacts))
}

fn interior_blowup(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "interior-blowup",
        &["rescaled Green function at shrinking radius approaches the free-space power kernel"],
        cfg,
    );
    let geom = cfg.geometry()?;
    if (geom.n as f64) <= 2.0 * geom.s() {
        bail!(
            "interior blow-up needs n > 2s (got n = {}, s = {})",
            geom.n,
            geom.s()
        );
    }
    let q = QuadratureSpec::tight();
    let rho0 = 1e-3 * geom.rho;
    // the limit is approached at rate (rho0 |e - y| / rho)^{n - 2s}; keep the
    // pair separations inside the regime where that remainder stays below
    // half the 1% tolerance
    let nu = geom.n as f64 - 2.0 * geom.s();
    let max_sep: f64 = (0.005f64.powf(1.0 / nu) * geom.rho / rho0).min(1.5);
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for k in 0..5 {
        let e = unit_direction(geom.n, k, cfg.seed);
        let sep = max_sep * (0.2 + 0.8 * k as f64 / 4.0);
        let y = separated_point(&e, geom.n, sep, k, cfg.seed);
        let x = fracball::geom::scale(&e, rho0);
        let zz = fracball::geom::scale(&y, rho0);
        let g = green(&x, &zz, &geom, &q)?.value;
        let got = rho0.powf(geom.n as f64 - 2.0 * geom.s()) * g;
        let want = interior_blowup_limit(&e, &y, &geom)?;
        let rel = (got - want).abs() / want;
        worst = worst.max(rel);
        rows.push((e, y, got, want, rel));
    }
    rep.put("pairs", &rows);
    rep.put("worst_rel_error", worst);
    rep.check(
        "blowup_limit",
        worst <= 0.01,
        format!("worst relative error {worst:.3e} at radius 1e-3 rho (tolerance 1%)"),
    );
    Ok((rep, Artifacts::default()))
}

/// Interior point at distance about `sep` from the unit vector `e`.
fn separated_point(e: &Point, n: usize, sep: f64, k: u64, seed: u64) -> Point {
    if n == 1 {
        return [e[0] * (1.0 - sep), 0.0, 0.0];
    }
    // mix a radial pull with a tangential rotation, staying inside the ball
    let radial = 0.5 * sep;
    let angle = 0.7 * sep;
    let t = ball_point(k + 53, n, &[0.0; 3], 1.0, seed + 3);
    let mut tangent = [
        t[1] * e[2] - t[2] * e[1],
        t[2] * e[0] - t[0] * e[2],
        t[0] * e[1] - t[1] * e[0],
    ];
    if n == 2 {
        tangent = [-e[1], e[0], 0.0];
    }
    let tn = norm(&tangent).max(1e-12);
    let dir = fracball::geom::scale(&tangent, 1.0 / tn);
    let rotated = [
        e[0] * angle.cos() + dir[0] * angle.sin(),
        e[1] * angle.cos() + dir[1] * angle.sin(),
        e[2] * angle.cos() + dir[2] * angle.sin(),
    ];
    fracball::geom::scale(&rotated, 1.0 - radial)
}

fn unit_direction(n: usize, k: u64, seed: u64) -> Point {
    if n == 1 {
        return [if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0, 0.0];
    }
    let p = ball_point(k + 31, n, &[0.0; 3], 1.0, seed + 2);
    let r = norm(&p).max(1e-12);
    fracball::geom::scale(&p, 1.0 / r)
}

fn barrier_check(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "barrier-check",
        &[
            "calibrated subsolution has operator value <= -1 + 0.05 in the outer annulus",
            "operator value of the s-power profile is constant across the unit ball",
        ],
        cfg,
    );
    let geom = cfg.geometry()?;
    let s = geom.s;
    let q = QuadratureSpec::with_tolerance(1e-7);
    let kernel = AnisoKernel::fractional_laplacian(geom.n, geom.s())?;
    let consts = calibrate_barrier(&kernel, s, &q)?;
    let phi = barrier_function(
        BarrierSpec::new([0.0; 3], 1.0, consts.c1, 1.0, geom.n)?,
        geom.s(),
    );
    let mut worst_phi = f64::NEG_INFINITY;
    let mut accepted = 0u64;
    let mut i = 0u64;
    while accepted < 30 {
        let x = ball_point(i, geom.n, &[0.0; 3], 0.999, cfg.seed);
        i += 1;
        let r = norm(&x);
        if r <= 0.5 || r >= 0.98 {
            continue;
        }
        accepted += 1;
        let v = eval_l(&phi, &x, &kernel, s, &q)?.value;
        worst_phi = worst_phi.max(v);
    }
    rep.put("barrier_constants", (consts.k, consts.c1, consts.c_sup));
    rep.put("worst_annulus_value", worst_phi);
    rep.check(
        "subsolution_annulus",
        worst_phi <= -1.0 + 0.05,
        format!("max L(phi) over 30 annulus points: {worst_phi:.4} (must be <= -0.95)"),
    );
    for (label, kern) in [
        ("constant_kernel", AnisoKernel::fractional_laplacian(geom.n, geom.s())?),
        (
            "nonconstant_kernel",
            AnisoKernel::new(|th: &Point| 1.0 + th[0] * th[0], 1.0, 2.0, geom.n)?,
        ),
    ] {
        let v = EvaluableFunction::torsion_profile(geom.s());
        let mut vals = Vec::new();
        for k in 0..10 {
            let x = ball_point(k + 101, geom.n, &[0.0; 3], 0.8, cfg.seed);
            vals.push(eval_l(&v, &x, &kern, s, &q)?.value);
        }
        let (lo, hi) = (
            vals.iter().cloned().fold(f64::INFINITY, f64::min),
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let spread = (hi - lo) / hi.abs().max(1e-300);
        rep.put(&format!("{label}_spread"), spread);
        rep.check(
            &format!("{label}_constancy"),
            spread <= 0.01,
            format!("L of the s-power profile varies by {spread:.3e} across 10 points (<= 1%)"),
        );
    }
    Ok((rep, Artifacts::default()))
}

fn hopf_verify(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "hopf-verify",
        &[
            "interior growth ratio of the torsion field exceeds the 2s-power rate",
            "cone-restricted boundary quotient matches the closed-form torsion quotient",
        ],
        cfg,
    );
    let geom = cfg.geometry()?;
    let x0 = [geom.rho, 0.0, 0.0];
    let nu = [-1.0, 0.0, 0.0];
    let sphere = InteriorSphereConfig::dyadic(&geom, x0, nu, 0.4 * geom.rho)?;
    let u = move |x: &Point| torsion_value(&geom, x).map_err(Into::into);
    let table = growth_table(&u, &sphere, &geom, geom.s)?;
    let ratios = table.halving_ratios();
    let min_ratio = ratios
        .iter()
        .take(6)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    rep.put("growth_rows", &table.rows);
    rep.put("halving_ratios", &ratios);
    rep.check(
        "growth_condition",
        min_ratio >= 1.3,
        format!("min growth ratio over 6 halvings: {min_ratio:.3} (must be >= 1.3)"),
    );
    let beta = cfg.beta.unwrap_or(std::f64::consts::FRAC_PI_4);
    let cone = ConeSpec::new(beta)?;
    let approach = normal_approach(&sphere, &cfg.sweep());
    let quot = cone_quotient(&u, &sphere, &cone, geom.s, &approach, None)?;
    let oracle = torsion_gamma(geom.n, geom.s())? * (2.0 * geom.rho).powf(geom.s());
    let rel = (quot.estimate - oracle).abs() / oracle;
    rep.put("cone_quotient", quot.estimate);
    rep.put("cone_quotient_oracle", oracle);
    rep.check(
        "cone_quotient",
        rel <= 0.05,
        format!("cone quotient {:.6} vs closed form {oracle:.6} (rel {rel:.3e})", quot.estimate),
    );
    Ok((rep, Artifacts::default()))
}

fn counterexample_run(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "counterexample",
        &[
            "paired-source combination is a sign-constant eigen-type solution",
            "its boundary quotient at the chosen boundary point vanishes within tolerance",
        ],
        cfg,
    );
    let geom = cfg.geometry()?;
    let q = cfg.quad();
    let base = MollifierPair::defaults(&geom)?;
    let pair = match (cfg.epsilon, cfg.rho0) {
        (None, None) => base,
        (e, r0) => MollifierPair::new(
            e.unwrap_or(0.05 * geom.rho),
            r0.unwrap_or(0.5 * geom.rho),
            &geom,
            fracball::counterexample::standard_bump,
        )?,
    };
    let res = build_counterexample(&pair, &geom, &q)?;
    let quotient_bound = 1e-2 * res.quotient_scale;
    rep.put("constants", res.constants);
    rep.put("epsilon_used", res.epsilon_used);
    rep.put("boundary_quotient", res.quotient.extrapolated);
    rep.put("quotient_uncertainty", res.quotient.uncertainty);
    rep.put("support_margins", (res.suppo1_margin, res.suppo2_margin));
    rep.put("residual", res.residual);
    if let Some(note) = &res.note {
        rep.put("note", note);
    }
    rep.check(
        "vanishing_quotient",
        res.quotient.extrapolated.abs() <= quotient_bound,
        format!(
            "extrapolated quotient {:.3e} (bound {quotient_bound:.3e})",
            res.quotient.extrapolated
        ),
    );
    rep.check(
        "support_nonvanishing",
        res.suppo1_margin > 0.0 && res.suppo2_margin > 0.0,
        format!(
            "min |u| on source supports: {:.3e}, {:.3e} (must be > 0)",
            res.suppo1_margin, res.suppo2_margin
        ),
    );
    rep.check(
        "residual",
        res.residual <= 1e-2 * res.residual_scale,
        format!(
            "operator residual {:.3e} vs 1e-2 x source sup {:.3e}",
            res.residual,
            1e-2 * res.residual_scale
        ),
    );
    rep.check(
        "boundary_sign_constant",
        res.boundary_sign_constant,
        "u keeps one sign on the outer 5% annulus at grid resolution".into(),
    );
    let c = &res.constants;
    let bracket = c.c1_eps > c.c1 / 2.0
        && c.c1_eps < 2.0 * c.c1
        && c.c2_eps > c.c2 / 2.0
        && c.c2_eps < 2.0 * c.c2;
    rep.check(
        "constant_bracketing",
        bracket,
        format!(
            "c1 {:.6} in ({:.6}, {:.6}); c2 {:.6} in ({:.6}, {:.6})",
            c.c1_eps,
            c.c1 / 2.0,
            2.0 * c.c1,
            c.c2_eps,
            c.c2 / 2.0,
            2.0 * c.c2
        ),
    );
    let mut csv = String::from("delta,quotient\n");
    for (d, v) in &res.quotient.sweep {
        writeln!(csv, "{d},{v}").unwrap();
    }
    let mut artifacts = Artifacts::default();
    artifacts.files.push(("quotient_sweep.csv".into(), csv));
    artifacts.files.push((
        "counterexample_field.json".into(),
        serde_json::to_string_pretty(&res.u_eps)?,
    ));
    Ok((rep, artifacts))
}

fn sphere_inequality_run(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "sphere-inequality",
        &["surface integral of the power kernel strictly exceeds the plain surface measure"],
        cfg,
    );
    if cfg.n == 1 {
        let (lhs, rhs) = line_analogue(cfg.s);
        rep.put("lhs", lhs);
        rep.put("rhs", rhs);
        rep.check(
            "line_analogue_strict",
            (lhs - rhs).abs() > 1e-12,
            format!("two-point sum {lhs:.12} differs from 2"),
        );
        return Ok((rep, Artifacts::default()));
    }
    if cfg.s <= 0.5 {
        bail!("surface integral needs s > 1/2 for n >= 2 (got s = {})", cfg.s);
    }
    let r = sphere_inequality(cfg.n, cfg.s)?;
    rep.put("lhs", r.lhs);
    rep.put("rhs", r.rhs);
    rep.put("margin", r.margin);
    rep.check(
        "strict_excess",
        r.margin > 0.0,
        format!("lhs {:.9} exceeds surface measure {:.9}", r.lhs, r.rhs),
    );
    if cfg.n == 3 {
        let closed = sphere_inequality_closed_form_3d(cfg.s);
        let rel = (r.lhs - closed).abs() / closed;
        rep.put("closed_form", closed);
        rep.check(
            "closed_form_match",
            rel <= 1e-6,
            format!("lhs {:.9} vs closed form {closed:.9} (rel {rel:.3e})", r.lhs),
        );
    }
    Ok((rep, Artifacts::default()))
}

fn f_sigma_run(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "f-sigma",
        &["ratio shape function has its strict minimum 2^{n+1-2s} at sigma = 1"],
        cfg,
    );
    let shape = f_sigma_check(cfg.n, cfg.s)?;
    rep.put("argmin", shape.argmin);
    rep.put("f_at_one", shape.f_at_one);
    rep.put("expected_min", shape.expected_min);
    rep.check(
        "argmin",
        (shape.argmin - 1.0).abs() <= 1e-10,
        format!("argmin {:.14} (must be 1 within 1e-10)", shape.argmin),
    );
    rep.check(
        "min_value",
        (shape.f_at_one - shape.expected_min).abs() <= 1e-12 * shape.expected_min,
        format!("F(1) = {:.15} vs 2^(n+1-2s) = {:.15}", shape.f_at_one, shape.expected_min),
    );
    rep.check(
        "shape",
        shape.monotone_below && shape.monotone_above && shape.blows_up_at_ends,
        "monotone on both sides of 1 and unbounded at 0 and infinity".into(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut strict_ok = true;
    let mut min_slack = f64::INFINITY;
    for _ in 0..1000 {
        let a: f64 = rng.gen_range(0.1..10.0);
        let b: f64 = rng.gen_range(0.1..10.0);
        let slack = power_inequality_slack(a, b, cfg.n, cfg.s);
        if (a - b).abs() > 1e-12 {
            if slack <= 1e-12 {
                strict_ok = false;
            }
            min_slack = min_slack.min(slack);
        } else if slack.abs() > 1e-12 {
            strict_ok = false;
        }
    }
    rep.put("min_offdiagonal_slack", min_slack);
    rep.check(
        "power_inequality",
        strict_ok,
        format!("1000 random pairs: strict slack off the diagonal (min {min_slack:.3e})"),
    );
    Ok((rep, Artifacts::default()))
}

fn eigen_radial(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "eigen-radial",
        &["leading radial eigenpair is stable under grid refinement and has a positive boundary quotient"],
        cfg,
    );
    let geom = cfg.geometry()?;
    let q = cfg.quad();
    let mut lambdas = Vec::new();
    let mut last_field = None;
    for m in [64usize, 128, 256] {
        let grid = boundary_clustered_grid(m, geom.rho);
        let (lam, field) = radial_eigenpair(&geom, &grid, &q)?;
        lambdas.push((m, lam));
        last_field = Some(field);
    }
    rep.put("eigenvalues", &lambdas);
    let drift1 = (lambdas[1].1 - lambdas[0].1).abs() / lambdas[0].1;
    let drift2 = (lambdas[2].1 - lambdas[1].1).abs() / lambdas[1].1;
    rep.put("refinement_drift", (drift1, drift2));
    rep.check(
        "refinement_stability",
        drift1 <= 0.02 && drift2 <= 0.02,
        format!("eigenvalue drift per refinement: {drift1:.3e}, {drift2:.3e} (<= 2%)"),
    );
    let field = last_field.expect("three refinements ran");
    let means = field.radial_means();
    let sup = means.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    let r_last = *field.radii.last().unwrap();
    let quot = means.last().unwrap() / (geom.rho - r_last).powf(geom.s());
    let interior_scale = sup / geom.rho.powf(geom.s());
    rep.put("boundary_quotient", quot);
    rep.put("interior_scale", interior_scale);
    rep.check(
        "boundary_quotient_lower_bound",
        quot >= 0.1 * interior_scale,
        format!("boundary quotient {quot:.4} vs 0.1 x interior scale {:.4}", 0.1 * interior_scale),
    );
    Ok((rep, Artifacts::default()))
}

fn unbounded_v_run(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Artifacts)> {
    let mut rep = ExperimentReport::new(
        "unbounded-v",
        &["fast boundary decay forces an unbounded potential; torsion-rate decay stays milder"],
        cfg,
    );
    let geom = cfg.geometry()?;
    let s = geom.s();
    let fast = unbounded_v_example(&geom, move |t| (1.0 - t * t).max(0.0).powf(3.0 * s))?;
    let slow = unbounded_v_example(&geom, move |t| (1.0 - t * t).max(0.0).powf(s))?;
    rep.put("fast_rows", &fast.rows);
    rep.put("fast_growth_exponent", fast.growth_exponent);
    rep.put("torsion_rate_growth_exponent", slow.growth_exponent);
    rep.check(
        "unbounded_potential",
        fast.growth_exponent < -1.5 * s,
        format!(
            "potential grows like delta^({:.3}) for the fast-decay profile (< -1.5 s)",
            fast.growth_exponent
        ),
    );
    rep.check(
        "torsion_rate_control",
        slow.growth_exponent > -1.5 * s && slow.growth_exponent < 0.0,
        format!(
            "torsion-rate profile gives exponent {:.3} (between -1.5 s and 0)",
            slow.growth_exponent
        ),
    );
    rep.check(
        "separation",
        fast.growth_exponent < slow.growth_exponent,
        "fast-decay exponent is strictly more singular".into(),
    );
    Ok((rep, Artifacts::default()))
}

/// Subcommands applicable to a given geometry with default configs.
pub fn suite_plan(n: usize, s: f64) -> Vec<&'static str> {
    let mut plan = vec!["torsion-calibrate", "green-expansion"];
    if (n as f64) > 2.0 * s {
        plan.push("interior-blowup");
    }
    plan.push("barrier-check");
    plan.push("hopf-verify");
    if n <= 2 {
        plan.push("counterexample");
    }
    if n == 1 || s > 0.5 {
        plan.push("sphere-inequality");
    }
    if (n as f64) > 2.0 * s {
        plan.push("f-sigma");
    }
    if n == 1 {
        plan.push("eigen-radial");
    }
    plan.push("unbounded-v");
    plan
}

/// Runs every applicable experiment on the default geometries. Reports are
/// returned in a fixed order; `out_dir` (when set) receives one JSON file per
/// experiment.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<(Vec<ExperimentReport>, bool)> {
    let mut reports = Vec::new();
    let mut all_passed = true;
    for (n, s) in SUITE_GEOMETRIES {
        let mut geo_cfg = cfg.clone();
        geo_cfg.n = n;
        geo_cfg.s = s;
        for name in suite_plan(n, s) {
            let (report, artifacts) = run_experiment(name, &geo_cfg)
                .with_context(|| format!("{name} on n = {n}, s = {s}"))?;
            all_passed &= report.all_passed();
            if let Some(dir) = &cfg.out_dir {
                let stem = format!("{}_n{}_s{}", name.replace('-', "_"), n, format_s(s));
                write_outputs(&report, &artifacts, dir, &stem)?;
            }
            reports.push(report);
        }
    }
    Ok((reports, all_passed))
}

fn format_s(s: f64) -> String {
    format!("{s}").replace('.', "p")
}
