//! Cubic spline interpolation (not-a-knot end conditions).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the nodes
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::Config(format!(
                "spline needs >= 3 matching nodes, got {} and {}",
                n,
                y.len()
            )));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("spline nodes must be strictly increasing".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("spline values must be finite".into()));
        }
        // tridiagonal-like system for the second derivatives with not-a-knot
        // conditions (third derivative continuous at x1 and x_{n-2})
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let h = |i: usize| x[i + 1] - x[i];
        for i in 1..n - 1 {
            sub[i] = h(i - 1);
            diag[i] = 2.0 * (h(i - 1) + h(i));
            sup[i] = h(i);
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1));
        }
        // not-a-knot: m0 interpolated linearly through m1, m2 (and symmetric)
        let h0 = h(0);
        let h1 = h(1);
        diag[0] = h1;
        sup[0] = -(h0 + h1);
        // express m0 (h1) - m1 (h0+h1) + m2 h0 = 0 -> fold m2 into row 1 later;
        // simplest: eliminate m0 and m_{n-1} directly
        let hn2 = h(n - 3);
        let hn1 = h(n - 2);
        // solve the interior (n-2) x (n-2) system with the substitutions
        //   m0 = ((h0 + h1) m1 - h0 m2) / h1
        //   m_{n-1} = ((hn1 + hn2) m_{n-2} - hn1 m_{n-3}) / hn2
        let mut a = sub.clone();
        let mut b = diag.clone();
        let mut c = sup.clone();
        let mut d = rhs.clone();
        b[1] += a[1] * (h0 + h1) / h1;
        c[1] -= a[1] * h0 / h1;
        a[1] = 0.0;
        b[n - 2] += c[n - 2] * (hn1 + hn2) / hn2;
        a[n - 2] -= c[n - 2] * hn1 / hn2;
        c[n - 2] = 0.0;
        // Thomas algorithm on rows 1..n-1
        for i in 2..n - 1 {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 2] = d[n - 2] / b[n - 2];
        for i in (1..n - 2).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
        m[n - 1] = ((hn1 + hn2) * m[n - 2] - hn1 * m[n - 3]) / hn2;
        Ok(CubicSpline { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    fn segment(&self, t: f64) -> usize {
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    /// Evaluates the spline; clamps to the end segments outside the domain.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }
}
