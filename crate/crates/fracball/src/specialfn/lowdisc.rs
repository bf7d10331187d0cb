//! Deterministic low-discrepancy sampling (Halton) in balls.

use crate::geom::Point;

const BASES: [u64; 3] = [2, 3, 5];

/// Radical-inverse (van der Corput) value of index i in the given base.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// The i-th Halton point in [0,1)^dim; `seed` shifts the start index so runs
/// stay reproducible while decorrelating nested loops.
pub fn halton(i: u64, dim: usize, seed: u64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for d in 0..dim.min(3) {
        out[d] = radical_inverse(i + 1 + seed, BASES[d]);
    }
    out
}

/// Maps the i-th Halton point into the ball B_radius(center) in R^n.
pub fn ball_point(i: u64, n: usize, center: &Point, radius: f64, seed: u64) -> Point {
    let u = halton(i, n, seed);
    if n == 1 {
        return [center[0] + radius * (2.0 * u[0] - 1.0), center[1], center[2]];
    }
    let r = radius * u[0].powf(1.0 / n as f64);
    let dir: Point = match n {
        2 => {
            let th = 2.0 * std::f64::consts::PI * u[1];
            [th.cos(), th.sin(), 0.0]
        }
        3 => {
            let mu = 2.0 * u[1] - 1.0;
            let st = (1.0 - mu * mu).sqrt();
            let phi = 2.0 * std::f64::consts::PI * u[2];
            [st * phi.cos(), st * phi.sin(), mu]
        }
        _ => unreachable!("dimension checked upstream"),
    };
    [
        center[0] + r * dir[0],
        center[1] + r * dir[1],
        center[2] + r * dir[2],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::dist;

    #[test]
    fn points_stay_inside_ball() {
        let c = [0.3, -0.2, 0.1];
        for n in 1..=3 {
            for i in 0..500 {
                let p = ball_point(i, n, &c, 0.7, 0);
                assert!(dist(&p, &c) <= 0.7 + 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = ball_point(17, 3, &[0.0; 3], 1.0, 5);
        let b = ball_point(17, 3, &[0.0; 3], 1.0, 5);
        assert_eq!(a, b);
        let c = ball_point(17, 3, &[0.0; 3], 1.0, 6);
        assert_ne!(a, c);
    }

    #[test]
    fn reasonably_uniform_in_2d() {
        // fraction of points in the half-ball x > 0 should be near 1/2
        let hits = (0..4096)
            .filter(|&i| ball_point(i, 2, &[0.0; 3], 1.0, 0)[0] > 0.0)
            .count();
        let frac = hits as f64 / 4096.0;
        assert!((frac - 0.5).abs() < 0.02, "frac = {frac}");
    }
}
