use std::ops::Add;

use serde::{Deserialize, Serialize};

use super::functions::SieveFunctionTable;
use super::rosser::{rosser_divisor_sum, Parity, Sifting};
use crate::det::par_sum_slice;
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// Integers `n` with non-negative weights `f_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSequence {
    pub elements: Vec<(u64, f64)>,
    pub descriptor: String,
}

impl WeightedSequence {
    pub fn new(elements: Vec<(u64, f64)>, descriptor: impl Into<String>) -> Result<Self> {
        if let Some((n, f)) = elements.iter().find(|(_, f)| !(f.is_finite() && *f >= 0.0)) {
            return Err(Error::domain(format!(
                "weight f_{n} = {f} is not finite and non-negative"
            )));
        }
        Ok(WeightedSequence {
            elements,
            descriptor: descriptor.into(),
        })
    }

    /// `n = 1..=n_max`, each with weight 1.
    pub fn integers(n_max: u64) -> Self {
        WeightedSequence {
            elements: (1..=n_max).map(|n| (n, 1.0)).collect(),
            descriptor: format!("integers 1..={n_max}"),
        }
    }

    pub fn total_weight(&self) -> f64 {
        par_sum_slice(&self.elements, |(_, f)| *f)
    }

    pub fn max_element(&self) -> u64 {
        self.elements.iter().map(|(n, _)| *n).max().unwrap_or(1)
    }
}

/// A multiplicative sieve density `omega(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Density {
    /// `omega(p) = 1`.
    Unit,
    /// `omega(2) = 0`, `omega(p) = p / (p - 1)`: shifted primes `p + 2`.
    ShiftedPrimes,
}

impl Density {
    pub fn omega(self, p: u64) -> f64 {
        match self {
            Density::Unit => 1.0,
            Density::ShiftedPrimes if p == 2 => 0.0,
            Density::ShiftedPrimes => p as f64 / (p as f64 - 1.0),
        }
    }
}

/// `V(z) = prod_{p in sifting} (1 - omega(p) / p)`.
pub fn v_of_z(sifting: &Sifting, density: Density) -> Result<f64> {
    Ok(sifting
        .primes()?
        .iter()
        .map(|&p| 1.0 - density.omega(p) / p as f64)
        .product())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: f64,
    /// Elements whose Rosser multipliers fail `lo <= [sifted] <= hi`.
    pub violations: u64,
    pub v_z: f64,
    pub s: f64,
    pub main_lower: f64,
    pub main_upper: f64,
    /// `(log D)^(-1/3)`, the relative error order, kept separate.
    pub error_order: f64,
}

#[derive(Clone, Copy)]
struct Acc<const N: usize>([f64; N]);

impl<const N: usize> Default for Acc<N> {
    fn default() -> Self {
        Acc([0.0; N])
    }
}

impl<const N: usize> Add for Acc<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for i in 0..N {
            self.0[i] += o.0[i];
        }
        self
    }
}

/// Distinct prime factors of `n`, decreasing.
fn prime_factors_desc(table: &PrimeTable, n: u64) -> Vec<u64> {
    let mut v: Vec<u64> = table.factorize(n).into_iter().map(|(p, _)| p).collect();
    v.reverse();
    v
}

/// Lower and upper Rosser bounds for `S(A, z)`, the exact value by a
/// direct scan, and the main-term predictions `X V(z) f(s)`, `X V(z) F(s)`.
pub fn sieve_bounds(
    seq: &WeightedSequence,
    sifting: Sifting,
    level: f64,
    density: Density,
    main_scale: f64,
    functions: &SieveFunctionTable,
) -> Result<SieveBounds> {
    if !(sifting.z >= 2.0) || sifting.z * sifting.z > level * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "need 2 <= z <= D^(1/2) (z = {}, D = {level})",
            sifting.z
        )));
    }
    let table = PrimeTable::new(
        seq.max_element().max(2),
        seq.max_element() <= crate::primes::MAX_SPF_LIMIT,
    )?;
    let acc: Acc<4> = par_sum_slice(&seq.elements, |&(n, f)| {
        let small: Vec<u64> = prime_factors_desc(&table, n)
            .into_iter()
            .filter(|p| sifting.contains(*p))
            .collect();
        let mid = i64::from(small.is_empty());
        let lo = rosser_divisor_sum(&small, level, Parity::Lower);
        let hi = rosser_divisor_sum(&small, level, Parity::Upper);
        let bad = if lo <= mid && mid <= hi { 0.0 } else { 1.0 };
        Acc([f * lo as f64, f * hi as f64, f * mid as f64, bad])
    });
    let v_z = v_of_z(&sifting, density)?;
    let s = level.ln() / sifting.z.ln();
    Ok(SieveBounds {
        lower: acc.0[0],
        upper: acc.0[1],
        exact: acc.0[2],
        violations: acc.0[3] as u64,
        v_z,
        s,
        main_lower: main_scale * v_z * functions.lower_at(s),
        main_upper: main_scale * v_z * functions.upper_at(s),
        error_order: level.ln().powf(-1.0 / 3.0),
    })
}

/// One sifted piece with its Rosser bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
    /// Element-level sandwich failures.
    pub violations: u64,
}

impl Piece {
    pub fn sandwiched(&self) -> bool {
        self.violations == 0
    }
}

/// The exact pieces of the lower-bound decomposition, their Rosser bounds
/// and `S(A, x^(1/3))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuchstabTerms {
    pub x: f64,
    pub z: f64,
    pub y: f64,
    pub level: f64,
    pub s1: Piece,
    pub s2: Piece,
    pub s3: Piece,
    pub s4: Piece,
    /// `S(A, x^(1/3))` by direct scan.
    pub s_cube_root: f64,
}

impl BuchstabTerms {
    /// `S1 - S2/2 - S3/2 - S4` from the exact scans.
    pub fn decomposition(&self) -> f64 {
        self.s1.exact - 0.5 * self.s2.exact - 0.5 * self.s3.exact - self.s4.exact
    }

    /// `S1_lower - S2_upper/2 - S3_upper/2 - S4_upper`.
    pub fn assembled_lower(&self) -> f64 {
        self.s1.lower - 0.5 * self.s2.upper - 0.5 * self.s3.upper - self.s4.upper
    }

    pub fn violations(&self) -> u64 {
        self.s1.violations + self.s2.violations + self.s3.violations + self.s4.violations
    }
}

/// Exponents and level for [`buchstab_terms`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuchstabSpec {
    pub x: f64,
    /// `z = x^z_exponent`.
    pub z_exponent: f64,
    /// `y = x^y_exponent` separates the `p_1` ranges.
    pub y_exponent: f64,
    /// Sieve level for `S1`; pieces sifting `A_m` use `level / m`,
    /// never below `z^2`.
    pub level: f64,
    pub odd_only: bool,
}

impl BuchstabSpec {
    pub fn new(x: f64) -> Self {
        BuchstabSpec {
            x,
            z_exponent: 1.0 / 12.0,
            y_exponent: 1.0 / 3.1,
            level: x.sqrt(),
            odd_only: true,
        }
    }
}

/// Scans the sequence once, classifying each element by its prime factors.
pub fn buchstab_terms(seq: &WeightedSequence, spec: &BuchstabSpec) -> Result<BuchstabTerms> {
    let x = spec.x;
    if !(x >= 2.0) {
        return Err(Error::domain(format!("x = {x} below 2")));
    }
    let z = x.powf(spec.z_exponent);
    let y = x.powf(spec.y_exponent);
    let cube = x.powf(1.0 / 3.0);
    let sifting = Sifting {
        z,
        odd_only: spec.odd_only,
    };
    let cube_sifting = Sifting {
        z: cube,
        odd_only: spec.odd_only,
    };
    let floor_level = z * z;
    let lvl = |m: f64| (spec.level / m).max(floor_level);
    let table = PrimeTable::new(
        seq.max_element().max(2),
        seq.max_element() <= crate::primes::MAX_SPF_LIMIT,
    )?;

    // Slots: for each piece (lower, exact, upper, violations), then S(A, x^(1/3)).
    let acc: Acc<17> = par_sum_slice(&seq.elements, |&(n, f)| {
        let mut out = [0.0; 17];
        let primes = prime_factors_desc(&table, n);
        let small: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|p| sifting.contains(*p))
            .collect();
        let mid = i64::from(small.is_empty());
        if !primes.iter().any(|p| cube_sifting.contains(*p)) {
            out[16] = f;
        }
        let mut add = |slot: usize, level: f64| {
            let lo = rosser_divisor_sum(&small, level, Parity::Lower);
            let hi = rosser_divisor_sum(&small, level, Parity::Upper);
            out[4 * slot] += f * lo as f64;
            out[4 * slot + 1] += f * mid as f64;
            out[4 * slot + 2] += f * hi as f64;
            if !(lo <= mid && mid <= hi) {
                out[4 * slot + 3] += 1.0;
            }
        };
        add(0, spec.level);
        // primes is decreasing; walk it ascending for the ranges.
        let asc: Vec<f64> = primes.iter().rev().map(|&p| p as f64).collect();
        for (i, &p1) in asc.iter().enumerate() {
            if p1 < z {
                continue;
            }
            let p2_max = (x / p1).sqrt();
            if p1 < y {
                add(1, lvl(p1));
                for &p2 in &asc[i + 1..] {
                    if p2 >= y && p2 < p2_max {
                        add(2, lvl(p1 * p2));
                    }
                }
            } else {
                for &p2 in &asc[i + 1..] {
                    if p2 < p2_max {
                        add(3, lvl(p1 * p2));
                    }
                }
            }
        }
        Acc(out)
    });
    let piece = |k: usize| Piece {
        lower: acc.0[4 * k],
        exact: acc.0[4 * k + 1],
        upper: acc.0[4 * k + 2],
        violations: acc.0[4 * k + 3] as u64,
    };
    Ok(BuchstabTerms {
        x,
        z,
        y,
        level: spec.level,
        s1: piece(0),
        s2: piece(1),
        s3: piece(2),
        s4: piece(3),
        s_cube_root: acc.0[16],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::functions::sieve_functions;

    #[test]
    fn integers_up_to_ten_thousand() {
        let fns = sieve_functions(10.0, 1e-3).unwrap();
        let seq = WeightedSequence::integers(10_000);
        let b = sieve_bounds(
            &seq,
            Sifting::new(10.0),
            100.0,
            Density::Unit,
            10_000.0,
            &fns,
        )
        .unwrap();
        assert_eq!(b.exact, 2285.0);
        assert!(b.lower <= b.exact && b.exact <= b.upper);
        assert_eq!(b.violations, 0);
    }

    #[test]
    fn trivial_sifting_limit() {
        let fns = sieve_functions(10.0, 1e-3).unwrap();
        let seq = WeightedSequence::new(vec![(4, 0.5), (9, 0.25), (15, 1.0)], "t").unwrap();
        let b = sieve_bounds(&seq, Sifting::new(2.0), 4.0, Density::Unit, 1.0, &fns).unwrap();
        assert_eq!(b.exact, 1.75);
        assert_eq!((b.lower, b.upper), (1.75, 1.75));
        assert!(WeightedSequence::new(vec![(1, -1.0)], "bad").is_err());
    }

    #[test]
    fn v_of_z_shifted_primes() {
        let v = v_of_z(&Sifting::odd(100.0), Density::ShiftedPrimes).unwrap();
        let mut want = 1.0;
        for p in [
            3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
            89, 97,
        ] {
            want *= 1.0 - 1.0 / (p as f64 - 1.0);
        }
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn tiny_x_has_empty_ranges() {
        let seq = WeightedSequence::new(vec![(5, 1.0), (7, 2.0), (9, 0.5)], "t").unwrap();
        let t = buchstab_terms(&seq, &BuchstabSpec::new(3.0)).unwrap();
        assert_eq!(t.s1.exact, 3.5);
        assert_eq!((t.s2.exact, t.s3.exact, t.s4.exact), (0.0, 0.0, 0.0));
    }
}
