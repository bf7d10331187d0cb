//! Points, ball geometry and the fractional order.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point in R^n with n <= 3. Unused coordinates stay zero.
pub type Point = [f64; 3];

pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: &Point, c: f64) -> Point {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Fractional order s in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s < 1.0 {
            Ok(FracOrder(s))
        } else {
            Err(Error::Domain(format!("fractional order must lie in (0,1), got {s}")))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Dimension, fractional order and ball radius; every formula branch keys off this.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProblemGeometry {
    pub n: usize,
    pub s: FracOrder,
    pub rho: f64,
}

impl ProblemGeometry {
    pub fn new(n: usize, s: f64, rho: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if rho <= 0.0 {
            return Err(Error::Domain(format!("ball radius must be positive, got {rho}")));
        }
        Ok(ProblemGeometry {
            n,
            s: FracOrder::new(s)?,
            rho,
        })
    }

    pub fn s(&self) -> f64 {
        self.s.value()
    }

    /// n == 2s happens exactly at (n, s) = (1, 1/2); the Green function
    /// switches to its logarithmic representation there.
    pub fn log_branch(&self) -> bool {
        self.n == 1 && (self.s() - 0.5).abs() < 1e-12
    }

    pub fn contains(&self, x: &Point) -> bool {
        norm(x) < self.rho
    }
}
