use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::arith::{FixedReal, FRAC_BITS};
use crate::error::{Error, Result};

/// `sum_{1 <= n <= X, n = a mod d} e(alpha n)` in closed form.
pub fn eval_progression_sum(alpha: &FixedReal, x: u64, d: u64, a: u64) -> Result<Complex64> {
    if x == 0 || d == 0 || a >= d {
        return Err(Error::domain(format!(
            "need X >= 1, d >= 1, 0 <= a < d (X={x}, d={d}, a={a})"
        )));
    }
    let j0 = u64::from(a == 0);
    let first = match d.checked_mul(j0).and_then(|v| v.checked_add(a)) {
        Some(f) if f <= x => f,
        _ => return Ok(Complex64::new(0.0, 0.0)),
    };
    let count = (x - first) / d + 1;
    let start = alpha.frac_mul_u64(first).cis();
    let theta = alpha.frac_mul_u64(d);
    // Below f64 resolution the ratio of sines is N to working precision.
    if theta.dist_nearest_int() == 0.0 {
        return Ok(start * count as f64);
    }
    // sum_{j<N} e(j t) = e(t (N-1)/2) sin(pi N t) / sin(pi t); the half
    // phases are exact, and sin(pi t) = sin(pi ||t||) for t in [0, 1).
    let centre = theta.mul_int_half(count - 1).cis();
    let num = (TAU * theta.mul_int_half(count).to_signed_f64()).sin();
    let den = (PI * theta.dist_nearest_int()).sin();
    Ok(start * centre * (num / den))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Check {
    pub abs_sum: f64,
    pub bound: f64,
    pub pass: bool,
    /// `||alpha d|| = 0`, so only the trivial bound applies.
    pub resonant: bool,
}

/// Compares the progression sum against `min(X/d + 1, 1 / (2 ||alpha d||))`.
pub fn lemma3_check(alpha: &FixedReal, x: u64, d: u64, a: u64) -> Result<Lemma3Check> {
    let s = eval_progression_sum(alpha, x, d, a)?;
    let dist = alpha.frac_mul_u64(d).dist_nearest_int();
    let trivial = x as f64 / d as f64 + 1.0;
    // alpha carries 2^-F rounding, so ||alpha d|| below d 2^-(F-2) is zero.
    let resonant = dist <= d as f64 * 2f64.powi(-(FRAC_BITS as i32) + 2);
    let bound = if resonant {
        trivial
    } else {
        trivial.min(0.5 / dist)
    };
    let abs_sum = s.norm();
    // Allow rounding in the closed form: a few ulps relative to the count.
    let slack = 64.0 * f64::EPSILON * trivial;
    Ok(Lemma3Check {
        abs_sum,
        bound,
        pass: abs_sum <= bound + slack,
        resonant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(alpha: &FixedReal, x: u64, d: u64, a: u64) -> Complex64 {
        (1..=x)
            .filter(|n| n % d == a)
            .map(|n| alpha.frac_mul_u64(n).cis())
            .sum()
    }

    #[test]
    fn examples() {
        let half = FixedReal::from_ratio(1, 2);
        assert!(eval_progression_sum(&half, 10, 1, 0).unwrap().norm() < 1e-12);
        let zero = FixedReal::from_int(0);
        let s = eval_progression_sum(&zero, 10, 2, 1).unwrap();
        assert!((s - Complex64::new(5.0, 0.0)).norm() < 1e-12);
        let r2 = FixedReal::from_sqrt(2);
        let s = eval_progression_sum(&r2, 10_000, 3, 1).unwrap();
        assert!((s - brute(&r2, 10_000, 3, 1)).norm() < 1e-8);
        assert!(eval_progression_sum(&r2, 10, 3, 3).is_err());
        assert!(eval_progression_sum(&r2, 0, 3, 1).is_err());
        assert_eq!(
            eval_progression_sum(&r2, 2, 5, 4).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn lemma3_examples() {
        let half = FixedReal::from_ratio(1, 2);
        let c = lemma3_check(&half, 10, 1, 0).unwrap();
        assert!(c.pass && (c.bound - 1.0).abs() < 1e-15);
        let third = FixedReal::from_ratio(1, 3);
        let c = lemma3_check(&third, 30, 3, 0).unwrap();
        assert!(c.resonant && c.pass, "{c:?}");
        assert!((c.bound - 11.0).abs() < 1e-12);
        assert!((c.abs_sum - 10.0).abs() < 1e-9);
    }
}
