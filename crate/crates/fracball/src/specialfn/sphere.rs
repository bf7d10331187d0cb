//! Surface quadrature on S^{n-1} for n in {1, 2, 3}.

use super::quad::gauss_legendre;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Node/weight pairs with weights summing to H^{n-1}(S^{n-1}).
pub fn sphere_quadrature(n: usize, degree: usize) -> Result<Vec<(Point, f64)>> {
    if degree < 1 {
        return Err(Error::Config("sphere quadrature degree must be >= 1".into()));
    }
    match n {
        1 => Ok(vec![([-1.0, 0.0, 0.0], 1.0), ([1.0, 0.0, 0.0], 1.0)]),
        2 => {
            // equispaced rule on the circle: exact for trig polynomials below m
            let m = (degree + 1).max(4);
            let w = 2.0 * std::f64::consts::PI / m as f64;
            Ok((0..m)
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    ([th.cos(), th.sin(), 0.0], w)
                })
                .collect())
        }
        3 => {
            // product rule: Gauss-Legendre in cos(theta), equispaced in phi
            let n_mu = degree / 2 + 1;
            let n_phi = (degree + 1).max(4);
            let mu_rule = gauss_legendre(n_mu);
            let wphi = 2.0 * std::f64::consts::PI / n_phi as f64;
            let mut out = Vec::with_capacity(n_mu * n_phi);
            for &(mu, wmu) in &mu_rule {
                let sin_t = (1.0 - mu * mu).sqrt();
                for k in 0..n_phi {
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
                    out.push(([sin_t * phi.cos(), sin_t * phi.sin(), mu], wmu * wphi));
                }
            }
            Ok(out)
        }
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// H^{n-1}(S^{n-1}) for n in {1, 2, 3}.
pub fn sphere_measure(n: usize) -> Result<f64> {
    match n {
        1 => Ok(2.0),
        2 => Ok(2.0 * std::f64::consts::PI),
        3 => Ok(4.0 * std::f64::consts::PI),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn s0_is_two_points() {
        let rule = sphere_quadrature(1, 5).unwrap();
        assert_eq!(rule.len(), 2);
        assert_eq!(rule[0].0[0], -1.0);
        assert_eq!(rule[1].0[0], 1.0);
        assert_eq!(rule[0].1, 1.0);
    }

    #[test]
    fn weights_sum_to_surface_measure() {
        for n in 1..=3 {
            let rule = sphere_quadrature(n, 10).unwrap();
            let sum: f64 = rule.iter().map(|(_, w)| w).sum();
            assert_relative_eq!(sum, sphere_measure(n).unwrap(), epsilon = 1e-12);
            assert!(rule.iter().all(|(_, w)| *w > 0.0));
        }
    }

    #[test]
    fn second_moment_on_s2() {
        // int omega_3^2 dH = 4 pi / 3 by symmetry
        let rule = sphere_quadrature(3, 10).unwrap();
        let val: f64 = rule.iter().map(|(x, w)| w * x[2] * x[2]).sum();
        assert_relative_eq!(val, 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn rotational_moments_on_s2() {
        let rule = sphere_quadrature(3, 12).unwrap();
        for axis in 0..3 {
            let val: f64 = rule.iter().map(|(x, w)| w * x[axis] * x[axis]).sum();
            assert_relative_eq!(val, 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert!(sphere_quadrature(4, 5).is_err());
    }
}
