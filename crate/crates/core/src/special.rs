//! Log-gamma, binomials and terminating Gauss hypergeometric sums.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance within which a real number is treated as an integer.
const INTEGER_SLACK: f64 = 1e-9;

pub fn nearest_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= INTEGER_SLACK).then_some(r as i64)
}

pub fn is_pole(x: f64) -> bool {
    matches!(nearest_integer(x), Some(n) if n <= 0)
}

/// `ln |Gamma(x)|`. Returns `+inf` at the poles.
pub fn ln_gamma(x: f64) -> f64 {
    if is_pole(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return PI.ln() - (PI * x).sin().abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Sign of `Gamma(x)` away from the poles.
pub fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if (-x).ceil() as i64 % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `prod Gamma(num) / prod Gamma(den)` evaluated in log space.
///
/// A pole in the denominator makes the ratio vanish; a pole in the
/// numerator that is not cancelled by a denominator pole is an error.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let num_poles = num.iter().filter(|&&x| is_pole(x)).count();
    let den_poles = den.iter().filter(|&&x| is_pole(x)).count();
    if num_poles > den_poles {
        return Err(Error::NonTerminating(format!(
            "Gamma prefactor has {num_poles} numerator pole(s) and only {den_poles} denominator pole(s): num={num:?} den={den:?}"
        )));
    }
    if den_poles > num_poles {
        return Ok(0.0);
    }
    if num_poles > 0 {
        // Matching poles: the limit depends on how the parameters approach
        // them, which a point evaluation cannot decide.
        return Err(Error::NonTerminating(format!(
            "Gamma prefactor has cancelling poles with no limiting direction: num={num:?} den={den:?}"
        )));
    }
    let mut log = 0.0;
    let mut sign = 1.0;
    for &x in num {
        log += ln_gamma(x);
        sign *= gamma_sign(x);
    }
    for &x in den {
        log -= ln_gamma(x);
        sign *= gamma_sign(x);
    }
    Ok(sign * log.exp())
}

/// Binomial coefficient as a float; exact for the sizes used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `2F1(a, b; c; z)` when the series terminates, i.e. `a` or `b` is a
/// non-positive integer. Fails if neither is, or if `(c)_k` vanishes
/// before the series stops.
pub fn hyp2f1_terminating(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let stop =
        [a, b].iter().filter_map(|&p| nearest_integer(p).filter(|&n| n <= 0).map(|n| (-n) as usize)).min().ok_or_else(
            || Error::NonTerminating(format!("2F1({a}, {b}; {c}; {z}): no non-positive integer numerator parameter")),
        )?;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..stop {
        let kf = k as f64;
        let den = c + kf;
        if nearest_integer(den) == Some(0) {
            return Err(Error::NonTerminating(format!(
                "2F1({a}, {b}; {c}; {z}): (c)_k vanishes at k = {} before the series terminates at {stop}",
                k + 1
            )));
        }
        term *= (a + kf) * (b + kf) / (den * (kf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        for n in 1..25u32 {
            let exact = factorial(n - 1).ln();
            assert!((ln_gamma(n as f64) - exact).abs() < 1e-12 * exact.abs().max(1.0), "n={n}");
        }
        // Gamma(1/2) = sqrt(pi), Gamma(-1/2) = -2 sqrt(pi).
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(-0.5) - (2.0 * PI.sqrt()).ln()).abs() < 1e-13);
        assert_eq!(gamma_sign(-0.5), -1.0);
        assert_eq!(gamma_sign(-1.5), 1.0);
        assert!(ln_gamma(-2.0).is_infinite());
    }

    #[test]
    fn gamma_ratio_poles() {
        assert!((gamma_ratio(&[4.0, 3.0], &[6.0]).unwrap() - 6.0 * 2.0 / 120.0).abs() < 1e-15);
        assert_eq!(gamma_ratio(&[2.0], &[-1.0]).unwrap(), 0.0);
        assert!(matches!(gamma_ratio(&[0.0], &[3.0]), Err(Error::NonTerminating(_))));
        assert!((gamma_ratio(&[-0.5], &[0.5]).unwrap() + 2.0).abs() < 1e-13);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(20, 10), 184_756.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn hyp2f1_krawtchouk_generating_function() {
        // (1 - t)^x (1 + t)^(N - x) = sum_n C(N, n) 2F1(-n, -x; -N; 2) t^n.
        for big_n in 0..9u32 {
            for x in 0..=big_n {
                let mut poly = vec![1.0f64];
                for _ in 0..x {
                    poly = mul_linear(&poly, -1.0);
                }
                for _ in 0..(big_n - x) {
                    poly = mul_linear(&poly, 1.0);
                }
                for n in 0..=big_n {
                    let f = hyp2f1_terminating(-(n as f64), -(x as f64), -(big_n as f64), 2.0).unwrap();
                    let got = binomial(big_n, n) * f;
                    assert!((got - poly[n as usize]).abs() < 1e-9, "N={big_n} x={x} n={n}");
                }
            }
        }
    }

    fn mul_linear(p: &[f64], s: f64) -> Vec<f64> {
        // p(t) * (1 + s t)
        let mut out = vec![0.0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            out[i] += c;
            out[i + 1] += s * c;
        }
        out
    }

    #[test]
    fn hyp2f1_rejects_non_terminating() {
        assert!(matches!(hyp2f1_terminating(2.0, 1.5, 3.0, 2.0), Err(Error::NonTerminating(_))));
        // (c)_k hits zero at k = 2 while the series runs to k = 3.
        assert!(matches!(hyp2f1_terminating(-3.0, 1.0, -1.0, 2.0), Err(Error::NonTerminating(_))));
        // Gauss sum at z = 1: 2F1(-n, b; c; 1) = (c - b)_n / (c)_n.
        let got = hyp2f1_terminating(-3.0, 0.5, 2.5, 1.0).unwrap();
        let expect = (2.0 * 3.0 * 4.0) / (2.5 * 3.5 * 4.5);
        assert!((got - expect).abs() < 1e-14);
    }
}
