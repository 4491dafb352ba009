//! Gauss-Legendre rules, the semi-infinite map `x = t / (1 - t)`, and
//! uniform angular rules.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Node counts for the two radial and two angular directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    pub radial1: usize,
    pub radial2: usize,
    pub angular1: usize,
    pub angular2: usize,
}

impl QuadratureSpec {
    pub const fn new(radial1: usize, radial2: usize, angular1: usize, angular2: usize) -> Self {
        Self { radial1, radial2, angular1, angular2 }
    }

    pub fn doubled(&self) -> Self {
        Self::new(self.radial1 * 2, self.radial2 * 2, self.angular1 * 2, self.angular2 * 2)
    }

    pub fn doubled_radial(&self) -> Self {
        Self::new(self.radial1 * 2, self.radial2 * 2, self.angular1, self.angular2)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(64, 64, 32, 32)
    }
}

impl fmt::Display for QuadratureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.radial1, self.radial2, self.angular1, self.angular2)
    }
}

impl FromStr for QuadratureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("node counts '{s}': {e}")))?;
        match parts.as_slice() {
            [r1, r2, a1, a2] if parts.iter().all(|&n| n > 0) => Ok(Self::new(*r1, *r2, *a1, *a2)),
            _ => Err(Error::InvalidArgument(format!(
                "expected four positive node counts 'radial1,radial2,angular1,angular2', got '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        pairwise_sum(&self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre rule on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, x);
            let dx = p / (nf * (x * p - p_prev) / (x * x - 1.0));
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, x);
        let dp = nf * (x * p - p_prev) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Gauss-Legendre on `[0, 1)` pushed to `[0, inf)` by `x = t / (1 - t)`;
/// weights include the Jacobian `1 / (1 - t)^2`.
pub fn semi_infinite(n: usize) -> Rule {
    let gl = gauss_legendre(n);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&s, &w) in gl.nodes.iter().zip(&gl.weights) {
        let t = 0.5 * (s + 1.0);
        let one_minus = 1.0 - t;
        nodes.push(t / one_minus);
        weights.push(0.5 * w / (one_minus * one_minus));
    }
    Rule { nodes, weights }
}

/// Normalized trapezoid sum `(1/M) sum_k exp(i m theta_k)` on `M` uniform
/// angles; equals the exact average `delta_{m,0}` whenever `|m| < M`.
pub fn angular_average(m: i64, nodes: usize) -> crate::C64 {
    let mut acc = crate::C64::new(0.0, 0.0);
    for k in 0..nodes {
        let theta = 2.0 * PI * k as f64 / nodes as f64;
        acc += crate::C64::from_polar(1.0, m as f64 * theta);
    }
    acc / nodes as f64
}

/// Pairwise summation; deterministic order independent of thread count.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_known_rules() {
        let r = gauss_legendre(2);
        assert!((r.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
        let r = gauss_legendre(3);
        assert!((r.nodes[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!(r.nodes[1].abs() < 1e-15);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_exact_for_degree_2n_minus_1() {
        for n in [1usize, 4, 16, 64, 128] {
            let r = gauss_legendre(n);
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            for d in [deg - 1, deg] {
                let got = r.integrate(|x| x.powi(d as i32));
                let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
                assert!((got - exact).abs() < 1e-13, "n={n} d={d}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn semi_infinite_beta_integral() {
        // int_0^inf x / (1 + x)^4 dx = B(2, 2) = 1/6
        let r = semi_infinite(16);
        let got = r.integrate(|x| x / (1.0 + x).powi(4));
        assert!((got - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn angular_rule_exactness() {
        assert!((angular_average(0, 7) - 1.0).norm() < 1e-15);
        for m in 1..7 {
            assert!(angular_average(m, 7).norm() < 1e-14);
            assert!(angular_average(-m, 7).norm() < 1e-14);
        }
        assert!((angular_average(7, 7) - 1.0).norm() < 1e-13);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("64,64,32,32".parse::<QuadratureSpec>().unwrap(), QuadratureSpec::default());
        assert!("64,64,32".parse::<QuadratureSpec>().is_err());
        assert!("64,0,32,32".parse::<QuadratureSpec>().is_err());
        assert!("a,b,c,d".parse::<QuadratureSpec>().is_err());
    }
}
