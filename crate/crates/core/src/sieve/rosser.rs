use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::WeightTable;
use crate::primes::{factorize_trial, sieve_primes};

/// Largest Rosser support materialised as a table.
pub const MAX_SUPPORT: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Upper,
    Lower,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Upper => "upper",
            Parity::Lower => "lower",
        }
    }

    /// Whether position `l` (1-based) is constrained.
    fn checks(self, l: usize) -> bool {
        match self {
            Parity::Upper => l % 2 == 1,
            Parity::Lower => l % 2 == 0,
        }
    }
}

/// The sifting primes: all primes below `z`, or only the odd ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sifting {
    pub z: f64,
    pub odd_only: bool,
}

impl Sifting {
    pub fn new(z: f64) -> Self {
        Sifting { z, odd_only: false }
    }

    pub fn odd(z: f64) -> Self {
        Sifting { z, odd_only: true }
    }

    pub fn contains(&self, p: u64) -> bool {
        (p as f64) < self.z && !(self.odd_only && p == 2)
    }

    /// The sifting primes in ascending order.
    pub fn primes(&self) -> Result<Vec<u64>> {
        if self.z <= 2.0 {
            return Ok(Vec::new());
        }
        let table = sieve_primes(self.z.ceil() as u64)?;
        Ok(table.primes().filter(|p| self.contains(*p)).collect())
    }
}

/// `floor(level)` as an integer bound, saturating.
fn level_bound(level: f64) -> u128 {
    if level >= u128::MAX as f64 {
        u128::MAX
    } else {
        level.floor().max(0.0) as u128
    }
}

/// Whether appending `p` as the `l`-th prime to a product `prefix` of
/// larger primes keeps `prefix * p^3 <= level` where that is required.
fn admits(prefix: u128, p: u64, l: usize, bound: u128, parity: Parity) -> bool {
    if !parity.checks(l) {
        return true;
    }
    let p = p as u128;
    prefix.checked_mul(p * p * p).is_some_and(|v| v <= bound)
}

/// Rosser membership of `d = p_1 ... p_r` given its primes in decreasing order.
pub fn rosser_admissible(primes_desc: &[u64], level: f64, parity: Parity) -> bool {
    let bound = level_bound(level);
    let mut prefix: u128 = 1;
    for (i, &p) in primes_desc.iter().enumerate() {
        if !admits(prefix, p, i + 1, bound, parity) {
            return false;
        }
        prefix *= p as u128;
    }
    true
}

/// `sum_{d | P, d Rosser-admissible} mu(d)` over the squarefree divisors
/// built from `primes_desc` (distinct, decreasing).
pub fn rosser_divisor_sum(primes_desc: &[u64], level: f64, parity: Parity) -> i64 {
    fn go(
        primes: &[u64],
        start: usize,
        prefix: u128,
        l: usize,
        bound: u128,
        parity: Parity,
    ) -> i64 {
        let mut total = 1;
        for i in start..primes.len() {
            if admits(prefix, primes[i], l + 1, bound, parity) {
                total -= go(
                    primes,
                    i + 1,
                    prefix * primes[i] as u128,
                    l + 1,
                    bound,
                    parity,
                );
            }
        }
        total
    }
    go(primes_desc, 0, 1, 0, level_bound(level), parity)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RosserWeightTable {
    pub level: f64,
    pub sifting: Sifting,
    pub parity: Parity,
    /// `(d, mu(d))` ascending in `d`.
    pub support: Vec<(u64, i8)>,
}

/// Rosser weights over all primes below `z`.
pub fn rosser_weights(level: f64, z: f64, parity: Parity) -> Result<RosserWeightTable> {
    RosserWeightTable::build(level, Sifting::new(z), parity)
}

impl RosserWeightTable {
    pub fn build(level: f64, sifting: Sifting, parity: Parity) -> Result<Self> {
        if !(level >= 2.0) {
            return Err(Error::domain(format!("level D = {level} below 2")));
        }
        if !(sifting.z >= 2.0) || sifting.z * sifting.z > level * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "need 2 <= z <= D^(1/2) (z = {}, D = {level})",
                sifting.z
            )));
        }
        let mut primes = sifting.primes()?;
        primes.reverse();
        let bound = level_bound(level);
        let mut support = vec![(1u64, 1i8)];
        // Depth-first over decreasing primes; (next index, product, depth, sign).
        let mut stack: Vec<(usize, u128, usize, i8)> = vec![(0, 1, 0, 1)];
        while let Some((start, prefix, l, sign)) = stack.pop() {
            for i in start..primes.len() {
                if admits(prefix, primes[i], l + 1, bound, parity) {
                    let d = prefix * primes[i] as u128;
                    let d64 = u64::try_from(d)
                        .map_err(|_| Error::Range(format!("divisor {d} exceeds u64")))?;
                    support.push((d64, -sign));
                    if support.len() > MAX_SUPPORT {
                        return Err(Error::budget(format!(
                            "Rosser support exceeds {MAX_SUPPORT}"
                        )));
                    }
                    stack.push((i + 1, d, l + 1, -sign));
                }
            }
        }
        support.sort_unstable();
        Ok(RosserWeightTable {
            level,
            sifting,
            parity,
            support,
        })
    }

    pub fn z(&self) -> f64 {
        self.sifting.z
    }

    pub fn weight(&self, d: u64) -> i8 {
        match self.support.binary_search_by_key(&d, |e| e.0) {
            Ok(i) => self.support[i].1,
            Err(_) => 0,
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `sum_{d | n} lambda(d)` via the squarefree sifting divisors of `n`.
    pub fn divisor_sum(&self, n: u64) -> i64 {
        let primes = sifting_factors(n, &self.sifting);
        let mut divs: Vec<u64> = vec![1];
        for p in primes {
            let len = divs.len();
            for i in 0..len {
                divs.push(divs[i] * p);
            }
        }
        divs.iter().map(|d| self.weight(*d) as i64).sum()
    }

    pub fn to_weight_table(&self) -> WeightTable {
        WeightTable::from_pairs(self.support.iter().map(|&(d, w)| (d, w as f64)))
            .expect("support excludes zero")
    }

    /// CSV with header `d,weight,parity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,weight,parity\n");
        for (d, w) in &self.support {
            out.push_str(&format!("{},{},{}\n", d, w, self.parity.as_str()));
        }
        out
    }
}

/// Distinct prime factors of `n` in the sifting range, decreasing.
pub fn sifting_factors(n: u64, sifting: &Sifting) -> Vec<u64> {
    let mut v: Vec<u64> = factorize_trial(n)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| sifting.contains(*p))
        .collect();
    v.reverse();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub lo: i64,
    pub mid: i64,
    pub hi: i64,
    pub pass: bool,
}

pub fn sandwich_check(
    n: u64,
    upper: &RosserWeightTable,
    lower: &RosserWeightTable,
) -> Result<SandwichCheck> {
    if upper.sifting != lower.sifting || upper.level != lower.level {
        return Err(Error::domain("upper and lower tables differ in D or z"));
    }
    if upper.parity != Parity::Upper || lower.parity != Parity::Lower {
        return Err(Error::domain("tables passed in the wrong order"));
    }
    let lo = lower.divisor_sum(n);
    let hi = upper.divisor_sum(n);
    let mid = i64::from(sifting_factors(n, &upper.sifting).is_empty());
    Ok(SandwichCheck {
        lo,
        mid,
        hi,
        pass: lo <= mid && mid <= hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let up = rosser_weights(30.0, 5.0, Parity::Upper).unwrap();
        let lo = rosser_weights(30.0, 5.0, Parity::Lower).unwrap();
        assert_eq!(up.weight(1), 1);
        assert_eq!(up.weight(6), 1);
        assert_eq!(lo.weight(6), 1);
        assert_eq!(lo.weight(3), -1);
        assert!(rosser_weights(30.0, 6.0, Parity::Upper).is_err());
    }

    #[test]
    fn divisor_sum_matches_table() {
        let s = Sifting::new(31.0);
        for parity in [Parity::Upper, Parity::Lower] {
            let t = RosserWeightTable::build(1000.0, s, parity).unwrap();
            for n in 1..5000u64 {
                let f = rosser_divisor_sum(&sifting_factors(n, &s), 1000.0, parity);
                assert_eq!(f, t.divisor_sum(n), "n = {n}");
            }
        }
    }

    #[test]
    fn admissibility_by_prefix() {
        // 7 * 5 * 3: upper checks l = 1 (343 > 100) and fails.
        assert!(!rosser_admissible(&[7, 5, 3], 100.0, Parity::Upper));
        // Lower checks only l = 2: 7 * 125 > 100.
        assert!(!rosser_admissible(&[7, 5, 3], 100.0, Parity::Lower));
        assert!(rosser_admissible(&[7, 2], 100.0, Parity::Lower));
        assert!(rosser_admissible(&[], 2.0, Parity::Upper));
    }

    #[test]
    fn odd_sifting_skips_two() {
        let t = RosserWeightTable::build(100.0, Sifting::odd(10.0), Parity::Lower).unwrap();
        assert_eq!(t.weight(2), 0);
        assert_eq!(t.weight(3), -1);
        assert!(t.to_csv().starts_with("d,weight,parity\n1,1,lower\n"));
    }
}
