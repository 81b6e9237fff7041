use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::SieveParams;
use super::tables::{CoefficientTable, WeightTable};
use crate::arith::{FixedReal, UnitFrac};
use crate::det::par_sum;
use crate::error::{Error, Result};
use crate::primes::{PrimeTable, MAX_SPF_LIMIT};

/// Largest `(number of n) * (number of k)` evaluated by the direct sums.
pub const MAX_PHASE_TERMS: u64 = 200_000_000_000;

/// Arithmetic weight attached to each `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    /// `Lambda(n)` on prime powers.
    VonMangoldt,
    /// `1` on primes.
    PrimesUnit,
    /// `log p` on primes.
    PrimesLog,
}

/// A phase sum
/// `sum_d lambda(d) sum_k c(k) sum_{n in [lo, hi), n = b mod d} e((alpha n^2 + beta) k) w(n)`.
#[derive(Clone, Debug)]
pub struct PhaseSum<'a> {
    pub alpha: &'a FixedReal,
    pub beta: &'a FixedReal,
    pub coeffs: &'a CoefficientTable,
    pub weights: &'a WeightTable,
    pub b: i64,
    pub lo: u64,
    pub hi: u64,
    pub support: Support,
}

fn support_weight(table: &PrimeTable, n: u64, support: Support) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if table.is_prime(n) {
        return match support {
            Support::PrimesUnit => 1.0,
            _ => (n as f64).ln(),
        };
    }
    if support != Support::VonMangoldt {
        return 0.0;
    }
    let p = match table.spf(n) {
        Some(p) => p,
        None => table.factorize(n)[0].0,
    };
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

/// `sum_k c(k) e(k t)`.
pub fn coefficient_sum(coeffs: &CoefficientTable, t: UnitFrac) -> Complex64 {
    if let Some(a) = &coeffs.cosine {
        return Complex64::new(cosine_series(a, t), 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(k, c) in &coeffs.entries {
        let ph = t.mul_int(k.unsigned_abs());
        let ph = if k < 0 { ph.wrapping_neg() } else { ph };
        acc += c * ph.cis();
    }
    acc
}

/// `sum_{k >= 1} a[k - 1] cos(2 pi k t)` by Clenshaw's recurrence.
pub fn cosine_series(a: &[f64], t: UnitFrac) -> f64 {
    let c = (2.0 * std::f64::consts::PI * t.to_f64()).cos();
    let two_c = 2.0 * c;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ak in a.iter().rev() {
        let b0 = ak + two_c * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    // b1 = b_1, b2 = b_2; the sum is b_1 cos - b_2 with the k = 0 term absent.
    b1 * c - b2
}

/// `sum_{d | m, lambda(d) != 0} lambda(d)`, with every `d` dividing `m = 0`.
fn divisor_weight(table: &PrimeTable, weights: &WeightTable, m: u64) -> f64 {
    if weights.level() <= 1 {
        return weights.get(1);
    }
    if m == 0 {
        return weights.nonzero().map(|(_, w)| w).sum();
    }
    let level = weights.level();
    let mut divs = vec![1u64];
    for (p, e) in table.factorize(m) {
        let len = divs.len();
        for i in 0..len {
            let mut d = divs[i];
            for _ in 0..e {
                match d.checked_mul(p) {
                    Some(v) if v <= level => {
                        d = v;
                        divs.push(d);
                    }
                    _ => break,
                }
            }
        }
    }
    divs.iter().map(|d| weights.get(*d)).sum()
}

impl PhaseSum<'_> {
    pub fn check_budget(&self) -> Result<()> {
        let terms = (self.hi.saturating_sub(self.lo)).saturating_mul(self.coeffs.len() as u64);
        if terms > MAX_PHASE_TERMS {
            return Err(Error::budget(format!(
                "{terms} phase terms exceed {MAX_PHASE_TERMS}"
            )));
        }
        Ok(())
    }

    /// Evaluates the sum; `table` must cover `hi` for primality.
    pub fn eval(&self, table: &PrimeTable) -> Result<Complex64> {
        self.check_budget()?;
        if self.hi > table.limit() + 1 {
            return Err(Error::domain(format!(
                "prime table limit {} below {}",
                table.limit(),
                self.hi - 1
            )));
        }
        if self.coeffs.is_empty() || self.lo >= self.hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(par_sum(self.lo..self.hi, |n| {
            let w = support_weight(table, n, self.support);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let m = (n as i128 - self.b as i128).unsigned_abs() as u64;
            let lam = divisor_weight(table, self.weights, m);
            if lam == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let t = self.alpha.quadratic_phase(n, self.beta);
            coefficient_sum(self.coeffs, t) * (w * lam)
        }))
    }

    /// `sum_d |lambda(d)| sum_k |c(k)| sum_{n = b mod d} w(n)`.
    pub fn trivial_bound(&self, table: &PrimeTable) -> f64 {
        let csum = self.coeffs.abs_sum();
        let mut total = 0.0;
        for (d, lam) in self.weights.nonzero() {
            let r = (self.b.rem_euclid(d as i64)) as u64;
            let mut n = self.lo + (r + d - self.lo % d) % d;
            let mut s = 0.0;
            while n < self.hi {
                s += support_weight(table, n, self.support);
                n += d;
            }
            total += lam.abs() * s;
        }
        total * csum
    }
}

/// Range `[ceil(x/2), ceil(x))` of integers `n ~ x`.
pub fn dyadic_range(x: f64) -> (u64, u64) {
    ((x / 2.0).ceil() as u64, x.ceil() as u64)
}

/// Builds a prime table covering `[0, n_max]` with SPF data where it fits.
pub fn table_for(n_max: u64) -> Result<PrimeTable> {
    PrimeTable::new(n_max.max(2), n_max <= MAX_SPF_LIMIT)
}

/// `W` for `n ~ x` against `Lambda(n)`.
pub fn eval_w_direct(
    params: &SieveParams,
    weights: &WeightTable,
    coeffs: &CoefficientTable,
    b: i64,
    alpha: &FixedReal,
    beta: &FixedReal,
) -> Result<Complex64> {
    if weights.level() as f64 > params.effective_level().floor().max(1.0) {
        return Err(Error::domain(format!(
            "weight level {} exceeds D = {}",
            weights.level(),
            params.effective_level()
        )));
    }
    if coeffs.k_max() as f64 > params.k_cutoff {
        return Err(Error::domain(format!(
            "coefficient |k| = {} exceeds K = {}",
            coeffs.k_max(),
            params.k_cutoff
        )));
    }
    let (lo, hi) = dyadic_range(params.x);
    let sum = PhaseSum {
        alpha,
        beta,
        coeffs,
        weights,
        b,
        lo,
        hi,
        support: Support::VonMangoldt,
    };
    sum.check_budget()?;
    let table = table_for(hi + b.unsigned_abs())?;
    sum.eval(&table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::von_mangoldt;

    #[test]
    fn divisor_weights() {
        let t = table_for(1000).unwrap();
        let w =
            WeightTable::from_pairs([(1, 1.0), (2, -1.0), (3, -1.0), (6, 2.0), (4, 5.0)]).unwrap();
        assert_eq!(divisor_weight(&t, &w, 12), 1.0 - 1.0 - 1.0 + 2.0 + 5.0);
        assert_eq!(divisor_weight(&t, &w, 9), 0.0);
        assert_eq!(divisor_weight(&t, &w, 0), 6.0);
    }

    #[test]
    fn empty_table_is_zero() {
        let p = SieveParams::desk(1e4, 0.1, 0.0, 0.0).unwrap();
        let a = FixedReal::from_sqrt(2);
        let z = FixedReal::from_int(0);
        let v = eval_w_direct(
            &p,
            &WeightTable::unit(),
            &CoefficientTable::empty(),
            0,
            &a,
            &z,
        )
        .unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn support_weights() {
        let t = table_for(100).unwrap();
        assert_eq!(support_weight(&t, 8, Support::VonMangoldt), von_mangoldt(8));
        assert_eq!(support_weight(&t, 8, Support::PrimesLog), 0.0);
        assert_eq!(support_weight(&t, 12, Support::VonMangoldt), 0.0);
        assert_eq!(support_weight(&t, 7, Support::PrimesUnit), 1.0);
        assert_eq!(support_weight(&t, 7, Support::PrimesLog), 7f64.ln());
    }

    #[test]
    fn cosine_path_matches_entries() {
        let bump = crate::bump::build_bump(0.05, 1e4).unwrap();
        let fast = CoefficientTable::from_bump(&bump, 1.0);
        let slow = CoefficientTable::new(fast.entries.clone()).unwrap();
        for i in 0..200u64 {
            let t = UnitFrac::from_ratio(i * 7919 % 1009, 1009);
            let (a, b) = (coefficient_sum(&fast, t), coefficient_sum(&slow, t));
            assert!((a - b).norm() < 1e-11, "t = {t:?}: {a} vs {b}");
        }
    }
}
