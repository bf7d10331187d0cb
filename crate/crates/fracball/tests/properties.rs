//! Randomized invariants: Green symmetry, quotient-scale identities, and the
//! strict power inequality.

use fracball::counterexample::{f_sigma, power_inequality_slack};
use fracball::geom::{norm, ProblemGeometry};
use fracball::greenball::{green, r0, torsion_gamma};
use fracball::specialfn::QuadratureSpec;
use proptest::prelude::*;

fn ball_pair(rho: f64) -> impl Strategy<Value = ([f64; 3], [f64; 3])> {
    let coord = move || -0.7 * rho..0.7f64 * rho;
    (
        (coord(), coord(), coord()),
        (coord(), coord(), coord()),
    )
        .prop_map(|((a, b, c), (d, e, f))| ([a, b, c], [d, e, f]))
        .prop_filter("distinct interior points", move |(x, z)| {
            norm(x) < 0.95 * rho
                && norm(z) < 0.95 * rho
                && fracball::geom::dist(x, z) > 1e-3
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn green_is_symmetric((x, z) in ball_pair(1.0)) {
        let q = QuadratureSpec::with_tolerance(1e-10);
        for (n, s) in [(2usize, 0.5), (3usize, 0.7)] {
            let geom = ProblemGeometry::new(n, s, 1.0).unwrap();
            let mut xx = x;
            let mut zz = z;
            if n < 3 {
                xx[2] = 0.0;
                zz[2] = 0.0;
            }
            if n < 2 {
                xx[1] = 0.0;
                zz[1] = 0.0;
            }
            let a = green(&xx, &zz, &geom, &q).unwrap().value;
            let b = green(&zz, &xx, &geom, &q).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1e-12));
        }
    }

    #[test]
    fn r0_is_symmetric((x, z) in ball_pair(1.3)) {
        let geom = ProblemGeometry::new(3, 0.6, 1.3).unwrap();
        let a = r0(&x, &z, &geom).unwrap();
        let b = r0(&z, &x, &geom).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn power_inequality_holds(a in 0.05f64..20.0, b in 0.05f64..20.0) {
        for (n, s) in [(2usize, 0.5), (3usize, 0.3), (3usize, 0.75)] {
            let slack = power_inequality_slack(a, b, n, s);
            prop_assert!(slack >= -1e-12, "slack {slack} at a={a}, b={b}, n={n}, s={s}");
        }
    }

    #[test]
    fn f_sigma_inversion_symmetry(sigma in 0.01f64..100.0) {
        // F(1/sigma) = F(sigma): the two-point ratio cannot see the ordering
        for (n, s) in [(2usize, 0.5), (3usize, 0.75)] {
            let a = f_sigma(sigma, n, s);
            let b = f_sigma(1.0 / sigma, n, s);
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn torsion_gamma_positive_and_bounded(s in 0.05f64..0.95) {
        for n in 1usize..=3 {
            let g = torsion_gamma(n, s).unwrap();
            prop_assert!(g > 0.0 && g < 10.0);
        }
    }
}
