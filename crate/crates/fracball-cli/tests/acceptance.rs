//! Acceptance gate: one pass/fail line per criterion, exercised end to end
//! through the experiment runners and the library oracles.

use fracball::counterexample::{
    line_analogue, quotient_constants, sphere_inequality, sphere_inequality_closed_form_3d,
    standard_bump, MollifierPair,
};
use fracball::geom::ProblemGeometry;
use fracball::specialfn::QuadratureSpec;
use fracball_cli::{run_experiment, run_suite, ExperimentConfig};
use std::time::Instant;

struct Gate {
    failures: usize,
}

impl Gate {
    fn report(&mut self, idx: usize, name: &str, outcome: Result<bool, String>) {
        match outcome {
            Ok(true) => println!("PASS criterion {idx}: {name}"),
            Ok(false) => {
                println!("FAIL criterion {idx}: {name}");
                self.failures += 1;
            }
            Err(e) => {
                println!("FAIL criterion {idx}: {name} (error: {e})");
                self.failures += 1;
            }
        }
    }
}

fn cfg(n: usize, s: f64) -> ExperimentConfig {
    ExperimentConfig {
        n,
        s,
        ..Default::default()
    }
}

/// Runs an experiment; Ok(true) iff every check passed within the deadline.
fn experiment_passes(name: &str, n: usize, s: f64, deadline_s: u64) -> Result<bool, String> {
    let start = Instant::now();
    let (rep, _) = run_experiment(name, &cfg(n, s)).map_err(|e| format!("{e:#}"))?;
    let ok = rep.all_passed();
    if !ok {
        for c in rep.checks.iter().filter(|c| !c.passed) {
            println!("    failed check [{name} n={n} s={s}] {}: {}", c.name, c.detail);
        }
    }
    let elapsed = start.elapsed().as_secs();
    if elapsed > deadline_s {
        println!("    [{name} n={n} s={s}] exceeded {deadline_s}s budget ({elapsed}s)");
        return Ok(false);
    }
    Ok(ok)
}

fn all_geometries() -> [(usize, f64); 6] {
    [(1, 0.25), (1, 0.5), (1, 0.75), (2, 0.5), (3, 0.3), (3, 0.7)]
}

/// Runs the experiment on every geometry, accumulating instead of stopping at
/// the first failure so the log shows them all.
fn each_geometry(name: &str, geoms: &[(usize, f64)], deadline_s: u64) -> Result<bool, String> {
    let mut ok = true;
    for &(n, s) in geoms {
        match experiment_passes(name, n, s, deadline_s) {
            Ok(b) => ok &= b,
            Err(e) => {
                println!("    [{name} n={n} s={s}] error: {e}");
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn main() {
    let mut gate = Gate { failures: 0 };

    // 1: constant-source solve reproduces the closed-form torsion function
    let r = each_geometry("torsion-calibrate", &all_geometries(), 60);
    gate.report(1, "torsion solve matches closed form (6 geometries, 1e-3)", r);

    // 2: boundary expansion ratio near 1 with 1.5x decay per halving
    let r = each_geometry("green-expansion", &all_geometries(), 120);
    gate.report(2, "Green boundary expansion ratio sweep (5 points, 6 geometries)", r);

    // 3: rescaled interior limit (power branch only)
    let power_branch: Vec<(usize, f64)> = all_geometries()
        .iter()
        .copied()
        .filter(|(n, s)| (*n as f64) > 2.0 * s)
        .collect();
    let r = each_geometry("interior-blowup", &power_branch, 120);
    gate.report(3, "interior blow-up limit within 1% at radius 1e-3", r);

    // 4: barrier subsolution and constancy of L on the s-power profile,
    // including one genuinely anisotropic kernel (n = 2)
    let r = experiment_passes("barrier-check", 2, 0.5, 300);
    gate.report(4, "calibrated barrier and operator constancy checks", r);

    // 5: growth condition and cone quotient for the torsion field
    let r = each_geometry("hopf-verify", &[(1, 0.5), (2, 0.5), (3, 0.75)], 120);
    gate.report(5, "torsion growth ratios and cone quotient (5%)", r);

    // 6: paired-source construction with vanishing boundary quotient
    let r = each_geometry("counterexample", &[(1, 0.5), (2, 0.75)], 300);
    gate.report(6, "vanishing-quotient construction (quotient, supports, residual, sign)", r);

    // 7: source constants bracket their limits and the gap contracts at
    // least as fast as halving per width halving (the symmetric ring average
    // makes the origin constant contract quadratically, which passes)
    let r = (|| -> Result<bool, String> {
        let mut ok = true;
        for (n, s) in [(1usize, 0.5), (2usize, 0.5)] {
            let g = ProblemGeometry::new(n, s, 1.0).map_err(|e| e.to_string())?;
            let q = QuadratureSpec::with_tolerance(1e-10);
            let mut pair = MollifierPair::new(0.05, 0.5, &g, standard_bump)
                .map_err(|e| e.to_string())?;
            let c = quotient_constants(&pair, &g, &q).map_err(|e| e.to_string())?;
            ok &= c.c1_eps > c.c1 / 2.0 && c.c1_eps < 2.0 * c.c1;
            ok &= c.c2_eps > c.c2 / 2.0 && c.c2_eps < 2.0 * c.c2;
            let mut gaps = ((c.c1_eps - c.c1).abs(), (c.c2_eps - c.c2).abs());
            for _ in 0..3 {
                pair = pair
                    .with_epsilon(pair.epsilon / 2.0, &g)
                    .map_err(|e| e.to_string())?;
                let c = quotient_constants(&pair, &g, &q).map_err(|e| e.to_string())?;
                let next = ((c.c1_eps - c.c1).abs(), (c.c2_eps - c.c2).abs());
                ok &= next.0 <= 0.625 * gaps.0 && next.1 <= 0.625 * gaps.1;
                gaps = next;
            }
        }
        Ok(ok)
    })();
    gate.report(7, "source constants bracket their limits and contract per halving", r);

    // 8: strict surface-integral inequality with the 3d closed form
    let r = (|| -> Result<bool, String> {
        let mut ok = true;
        for s in [0.6, 0.75, 0.9] {
            let r3 = sphere_inequality(3, s).map_err(|e| e.to_string())?;
            let closed = sphere_inequality_closed_form_3d(s);
            ok &= (r3.lhs - closed).abs() / closed <= 1e-6;
            ok &= r3.lhs > 4.0 * std::f64::consts::PI;
            let r2 = sphere_inequality(2, s).map_err(|e| e.to_string())?;
            ok &= r2.lhs > 2.0 * std::f64::consts::PI;
        }
        let (lhs, rhs) = line_analogue(0.75);
        ok &= (lhs - 2.0f64.powf(0.5)).abs() < 1e-14 && (lhs - rhs).abs() > 1e-12;
        Ok(ok)
    })();
    gate.report(8, "surface-integral inequality: closed form and strict margins", r);

    // 9: shape of F(sigma) plus the random-pair power inequality
    let r = each_geometry("f-sigma", &[(3, 0.5), (2, 0.5), (3, 0.75)], 60);
    gate.report(9, "F(sigma) minimum at 1 and strict power inequality (1000 pairs)", r);

    // 10: leading radial eigenpair stability and boundary quotient
    let r = experiment_passes("eigen-radial", 1, 0.5, 300);
    gate.report(10, "radial eigenpair: refinement drift <= 2%, positive quotient", r);

    // 11: determinism of the full suite (reports byte-identical mod timing)
    let r = (|| -> Result<bool, String> {
        let base = ExperimentConfig::default();
        let start = Instant::now();
        let (first, ok1) = run_suite(&base).map_err(|e| format!("{e:#}"))?;
        let (second, ok2) = run_suite(&base).map_err(|e| format!("{e:#}"))?;
        let elapsed = start.elapsed().as_secs();
        if elapsed > 2 * 15 * 60 {
            println!("    two suite runs took {elapsed}s (budget 2 x 15 min)");
            return Ok(false);
        }
        if first.len() != second.len() {
            return Ok(false);
        }
        let identical = first
            .iter()
            .zip(second.iter())
            .all(|(a, b)| a.canonical_json() == b.canonical_json());
        if !identical {
            println!("    suite reports differ between runs");
        }
        Ok(ok1 && ok2 && identical)
    })();
    gate.report(11, "suite determinism and runtime budget", r);

    if gate.failures > 0 {
        println!("acceptance: {} criterion(s) failed", gate.failures);
        std::process::exit(1);
    }
    println!("acceptance: all 11 criteria passed");
}
