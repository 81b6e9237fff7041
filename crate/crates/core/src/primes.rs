//! Prime tables and the classical arithmetic functions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sieve limit accepted.
pub const MAX_LIMIT: u64 = 1 << 40;

/// Largest limit for which a smallest-prime-factor array is built.
pub const MAX_SPF_LIMIT: u64 = 1 << 28;

/// Odd numbers per sieve segment: 2^21 bits, 256 KiB of bitset.
const SEGMENT_ODDS: u64 = 1 << 21;

/// Primality of every `n <= limit`, as a packed odd-only bitset.
///
/// Bit `i` of the bitset describes the odd number `2i + 1`.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    odd_bits: Vec<u64>,
    spf: Option<Vec<u32>>,
}

/// Counts attached to one integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCount {
    pub n: u64,
    /// Prime factors counted with multiplicity.
    pub omega_big: u32,
    /// Distinct prime factors.
    pub omega_small: u32,
    pub mu: i8,
    pub phi: u64,
}

impl FactorCount {
    pub fn from_factorization(n: u64, factors: &[(u64, u32)]) -> Self {
        let omega_big = factors.iter().map(|&(_, e)| e).sum();
        let omega_small = factors.len() as u32;
        let mu = if factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if omega_small % 2 == 0 {
            1
        } else {
            -1
        };
        let phi = factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1));
        FactorCount {
            n,
            omega_big,
            omega_small,
            mu,
            phi,
        }
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Sieves one block of odd numbers `2i+1` for `i` in `[i_lo, i_hi)`.
/// `i_lo` is a multiple of 64.
fn sieve_segment(i_lo: u64, i_hi: u64, base: &[u64]) -> Vec<u64> {
    let len = i_hi - i_lo;
    let mut words = vec![u64::MAX; len.div_ceil(64) as usize];
    if len % 64 != 0 {
        let last = words.len() - 1;
        words[last] = (1u64 << (len % 64)) - 1;
    }
    let lo = 2 * i_lo + 1;
    let hi = 2 * (i_hi - 1) + 1;
    for &p in base.iter().skip(1) {
        if p * p > hi {
            break;
        }
        // First odd multiple of p that is >= max(p^2, lo).
        let mut m = (p * p).max(lo.div_ceil(p) * p);
        if m % 2 == 0 {
            m += p;
        }
        let mut i = (m - 1) / 2 - i_lo;
        while i < len {
            words[(i / 64) as usize] &= !(1u64 << (i % 64));
            i += p;
        }
    }
    if i_lo == 0 {
        words[0] &= !1; // 1 is not prime
    }
    words
}

/// Smallest prime factor of every `n <= limit` by the linear sieve.
fn spf_table(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si || i * p as usize > n {
                break;
            }
            spf[i * p as usize] = p;
        }
    }
    if n >= 1 {
        spf[1] = 1;
    }
    spf
}

/// Exact primality for all `n <= limit` by a segmented sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    PrimeTable::new(limit, false)
}

/// As [`sieve_primes`], also building the smallest-prime-factor array.
pub fn sieve_primes_with_spf(limit: u64) -> Result<PrimeTable> {
    PrimeTable::new(limit, true)
}

impl PrimeTable {
    pub fn new(limit: u64, with_spf: bool) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit {limit} < 2")));
        }
        if limit > MAX_LIMIT {
            return Err(Error::budget(format!("sieve limit {limit} exceeds 2^40")));
        }
        if with_spf && limit > MAX_SPF_LIMIT {
            return Err(Error::budget(format!(
                "smallest-prime-factor array to {limit} exceeds 2^28 entries"
            )));
        }
        let base = simple_sieve(isqrt(limit) + 1);
        // odd numbers 1, 3, ..., <= limit
        let n_odds = limit.div_ceil(2);
        let n_segments = n_odds.div_ceil(SEGMENT_ODDS);
        let segments: Vec<Vec<u64>> = (0..n_segments)
            .into_par_iter()
            .map(|s| {
                let lo = s * SEGMENT_ODDS;
                let hi = (lo + SEGMENT_ODDS).min(n_odds);
                sieve_segment(lo, hi, &base)
            })
            .collect();
        let odd_bits = segments.concat();
        let spf = with_spf.then(|| spf_table(limit));
        Ok(PrimeTable {
            limit,
            odd_bits,
            spf,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn has_spf(&self) -> bool {
        self.spf.is_some()
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond table limit {}", self.limit);
        if n == 2 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let i = n / 2;
        self.odd_bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// Primes in `[lo, hi]`, ascending.
    pub fn primes_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        let hi = hi.min(self.limit);
        let two = (lo <= 2 && hi >= 2).then_some(2);
        let start = lo.max(3) / 2;
        let end = if hi < 3 { 0 } else { (hi - 1) / 2 + 1 };
        two.into_iter()
            .chain(OddBitIter::new(&self.odd_bits, start, end))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes_in(2, self.limit)
    }

    /// `pi(n)` for `n <= limit`.
    pub fn prime_pi(&self, n: u64) -> u64 {
        let n = n.min(self.limit);
        if n < 2 {
            return 0;
        }
        let end = (n - 1) / 2 + 1; // odd indices 0..end cover 1..=n
        let full = (end / 64) as usize;
        let mut count: u64 = self.odd_bits[..full]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        if end % 64 != 0 {
            count += (self.odd_bits[full] & ((1u64 << (end % 64)) - 1)).count_ones() as u64;
        }
        count + 1
    }

    pub fn spf(&self, n: u64) -> Option<u64> {
        self.spf
            .as_ref()
            .filter(|_| n <= self.limit && n >= 2)
            .map(|t| t[n as usize] as u64)
    }

    /// Prime factorization as `(p, e)` pairs, ascending in `p`.
    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1);
        if let (Some(spf), true) = (&self.spf, n <= self.limit) {
            let mut out: Vec<(u64, u32)> = Vec::new();
            let mut m = n;
            while m > 1 {
                let p = spf[m as usize] as u64;
                m /= p;
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
            return out;
        }
        let mut out = Vec::new();
        let mut m = n;
        let root = isqrt(n);
        let mut last = 1;
        for p in self.primes_in(2, root) {
            if p * p > m {
                break;
            }
            last = p;
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        // Table too short for sqrt(n): continue with odd trial divisors.
        if root > self.limit {
            let mut d = (last + 1) | 1;
            while d * d <= m {
                if m % d == 0 {
                    let mut e = 0;
                    while m % d == 0 {
                        m /= d;
                        e += 1;
                    }
                    out.push((d, e));
                }
                d += 2;
            }
        }
        if m > 1 {
            out.push((m, 1));
        }
        out
    }

    pub fn factor(&self, n: u64) -> FactorCount {
        FactorCount::from_factorization(n, &self.factorize(n))
    }

    /// `Omega(n) <= r`.
    pub fn is_almost_prime(&self, n: u64, r: u32) -> bool {
        self.factor(n).omega_big <= r
    }

    pub fn von_mangoldt(&self, n: u64) -> f64 {
        match self.factorize(n).as_slice() {
            [(p, _)] => (*p as f64).ln(),
            _ => 0.0,
        }
    }

    /// `Lambda(n)` for every `n <= n_max` (index 0 unused).
    pub fn mangoldt_table(&self, n_max: u64) -> Vec<f64> {
        assert!(n_max <= self.limit);
        let mut out = vec![0.0; n_max as usize + 1];
        for p in self.primes_in(2, n_max) {
            let lp = (p as f64).ln();
            let mut pk = p;
            loop {
                out[pk as usize] = lp;
                match pk.checked_mul(p) {
                    Some(v) if v <= n_max => pk = v,
                    _ => break,
                }
            }
        }
        out
    }
}

struct OddBitIter<'a> {
    words: &'a [u64],
    idx: u64,
    end: u64,
}

impl<'a> OddBitIter<'a> {
    fn new(words: &'a [u64], start: u64, end: u64) -> Self {
        OddBitIter {
            words,
            idx: start,
            end,
        }
    }
}

impl Iterator for OddBitIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.idx < self.end {
            let w = self.words[(self.idx / 64) as usize] >> (self.idx % 64);
            if w == 0 {
                self.idx = (self.idx / 64 + 1) * 64;
                continue;
            }
            let i = self.idx + w.trailing_zeros() as u64;
            if i >= self.end {
                self.idx = self.end;
                return None;
            }
            self.idx = i + 1;
            return Some(2 * i + 1);
        }
        None
    }
}

/// Factorization by trial division; for one-off queries without a table.
pub fn factorize_trial(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn factor(n: u64) -> FactorCount {
    FactorCount::from_factorization(n, &factorize_trial(n))
}

pub fn is_almost_prime(n: u64, r: u32) -> bool {
    factor(n).omega_big <= r
}

pub fn von_mangoldt(n: u64) -> f64 {
    match factorize_trial(n).as_slice() {
        [(p, _)] => (*p as f64).ln(),
        _ => 0.0,
    }
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Number of ordered `k`-tuples with product `n`.
pub fn tau_k(n: u64, k: u32) -> Result<u128> {
    tau_k_from_factors(&factorize_trial(n), k)
}

pub fn tau_k_from_factors(factors: &[(u64, u32)], k: u32) -> Result<u128> {
    if k < 1 {
        return Err(Error::domain("tau_k needs k >= 1"));
    }
    factors.iter().try_fold(1u128, |acc, &(_, a)| {
        binomial(a as u64 + k as u64 - 1, k as u64 - 1)
            .and_then(|c| acc.checked_mul(c))
            .ok_or_else(|| Error::Range(format!("tau_{k} overflows u128")))
    })
}

/// Largest `X` accepted by [`divisor_moment_check`].
pub const MAX_MOMENT_X: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorMoment {
    pub x: u64,
    pub k: u32,
    pub l: u32,
    pub sum: u128,
    /// `sum / (X (log X)^(k^l - 1))`.
    pub ratio: f64,
}

/// `sum_{n <= X} tau_k(n)^l` and its ratio to `X (log X)^(k^l - 1)`.
pub fn divisor_moment_check(x: u64, k: u32, l: u32) -> Result<DivisorMoment> {
    if x < 2 || k < 2 || l < 1 {
        return Err(Error::domain("divisor moments need X >= 2, k >= 2, l >= 1"));
    }
    if x > MAX_MOMENT_X {
        return Err(Error::budget(format!("X = {x} exceeds {MAX_MOMENT_X}")));
    }
    let table = sieve_primes_with_spf(x.max(2))?;
    let mut sum: u128 = 0;
    for n in 1..=x {
        let t = tau_k_from_factors(&table.factorize(n), k)?;
        let tl = (0..l).try_fold(1u128, |acc, _| acc.checked_mul(t));
        sum = tl
            .and_then(|v| sum.checked_add(v))
            .ok_or_else(|| Error::Range("divisor moment overflows u128".into()))?;
    }
    let exponent = (k as f64).powi(l as i32) - 1.0;
    let xf = x as f64;
    let ratio = sum as f64 / (xf * xf.ln().powf(exponent));
    Ok(DivisorMoment {
        x,
        k,
        l,
        sum,
        ratio,
    })
}

/// `mu(n)` for every `n <= n_max`.
pub fn mobius_table(n_max: u64) -> Vec<i8> {
    let n = n_max as usize;
    let mut mu = vec![1i8; n + 1];
    let mut is_comp = vec![false; n + 1];
    if n >= 1 {
        mu[0] = 0;
    }
    for p in 2..=n {
        if is_comp[p] {
            continue;
        }
        let mut j = p;
        while j <= n {
            if j > p {
                is_comp[j] = true;
            }
            mu[j] = -mu[j];
            j += p;
        }
        let sq = p.saturating_mul(p);
        let mut j = sq;
        while j <= n {
            mu[j] = 0;
            j += sq;
        }
    }
    mu
}

/// `Omega(n)` for each `n` in `[lo, hi)` by a segmented factor-count sieve.
/// `base` must contain every prime up to `sqrt(hi)`.
pub fn big_omega_range(lo: u64, hi: u64, base: &[u64]) -> Vec<u8> {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut count = vec![0u8; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut pk = p;
        loop {
            let start = lo.div_ceil(pk) * pk;
            let mut m = start;
            while m < hi {
                let i = (m - lo) as usize;
                rem[i] /= p;
                count[i] += 1;
                m += pk;
            }
            match pk.checked_mul(p) {
                Some(v) if v < hi => pk = v,
                _ => break,
            }
        }
    }
    for i in 0..len {
        if rem[i] > 1 {
            count[i] += 1;
        }
    }
    count
}
