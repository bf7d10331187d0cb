use clap::{Args, Parser, Subcommand};
use fracball_cli::{run_experiment, run_suite, write_outputs, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracball", version, about = "Numerical experiments on fractional boundary behavior")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory for reports and sweep tables
    #[arg(long)]
    out: Option<PathBuf>,
    /// spatial dimension (1, 2 or 3)
    #[arg(long)]
    n: Option<usize>,
    /// fractional order in (0, 1)
    #[arg(long)]
    s: Option<f64>,
    /// ball radius
    #[arg(long)]
    rho: Option<f64>,
    /// quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// print the JSON report to stdout
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Clone)]
enum Cmd {
    /// Check the constant-source solve against the closed-form torsion function
    TorsionCalibrate(Common),
    /// Sweep the Green function boundary expansion ratio
    GreenExpansion(Common),
    /// Check the rescaled Green function against its interior limit
    InteriorBlowup(Common),
    /// Verify the calibrated subsolution barrier
    BarrierCheck(Common),
    /// Verify growth condition and cone quotient for the torsion field
    HopfVerify(Common),
    /// Build the vanishing-quotient paired-source solution
    Counterexample(Common),
    /// Strict surface-integral inequality for the power kernel
    SphereInequality(Common),
    /// Shape of the two-point ratio function F(sigma)
    FSigma(Common),
    /// Leading radial eigenpair under grid refinement
    EigenRadial(Common),
    /// Potential growth along a normal approach for decaying profiles
    UnboundedV(Common),
    /// Run every applicable experiment on the default geometries
    Suite(Common),
}

impl Cmd {
    fn split(&self) -> (&'static str, &Common) {
        match self {
            Cmd::TorsionCalibrate(c) => ("torsion-calibrate", c),
            Cmd::GreenExpansion(c) => ("green-expansion", c),
            Cmd::InteriorBlowup(c) => ("interior-blowup", c),
            Cmd::BarrierCheck(c) => ("barrier-check", c),
            Cmd::HopfVerify(c) => ("hopf-verify", c),
            Cmd::Counterexample(c) => ("counterexample", c),
            Cmd::SphereInequality(c) => ("sphere-inequality", c),
            Cmd::FSigma(c) => ("f-sigma", c),
            Cmd::EigenRadial(c) => ("eigen-radial", c),
            Cmd::UnboundedV(c) => ("unbounded-v", c),
            Cmd::Suite(c) => ("suite", c),
        }
    }
}

fn build_config(common: &Common) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if let Some(s) = common.s {
        cfg.s = s;
    }
    if let Some(rho) = common.rho {
        cfg.rho = rho;
    }
    if let Some(tol) = common.tol {
        cfg.tol = tol;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = cli.cmd.split();
    let cfg = match build_config(common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if name == "suite" {
        return match run_suite(&cfg) {
            Ok((reports, all_passed)) => {
                for r in &reports {
                    let status = if r.all_passed() { "pass" } else { "FAIL" };
                    eprintln!(
                        "{status} {} (n = {}, s = {})",
                        r.subcommand, r.config.n, r.config.s
                    );
                }
                if common.json {
                    let blob = serde_json::to_string_pretty(&reports).expect("reports serialize");
                    println!("{blob}");
                }
                if all_passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        };
    }
    match run_experiment(name, &cfg) {
        Ok((report, artifacts)) => {
            if let Some(dir) = &cfg.out_dir {
                let stem = name.replace('-', "_");
                if let Err(e) = write_outputs(&report, &artifacts, dir, &stem) {
                    eprintln!("error writing outputs: {e:#}");
                    return ExitCode::from(2);
                }
            }
            if common.json {
                println!("{}", report.to_json());
            }
            for c in &report.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                eprintln!("{status} {}: {}", c.name, c.detail);
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
