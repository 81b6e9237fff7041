//! Continued-fraction convergents of a fixed-point `alpha`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{FixedReal, FRAC_BITS};
use crate::error::{Error, Result};

/// Bits of headroom kept between `q^2` and the fixed-point resolution.
pub const PRECISION_GUARD_BITS: u32 = FRAC_BITS - 8;

/// A reduced fraction `a / q` with `|alpha - a/q| < 1/q^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub a: i128,
    pub q: u128,
}

impl Convergent {
    pub fn to_f64(&self) -> f64 {
        self.a as f64 / self.q as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergents {
    pub items: Vec<Convergent>,
    /// Set when `alpha` is rational at the stored precision and its
    /// expansion ended before `count` items were produced.
    pub truncated: bool,
}

/// Raw convergent generator over the Euclidean recurrence on
/// `(alpha * 2^F, 2^F)`.
struct Expansion {
    alpha_scaled: BigInt,
    num: BigInt,
    den: BigInt,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
    done: bool,
}

enum Step {
    Next(Convergent, bool),
    Exhausted,
}

impl Expansion {
    fn new(alpha: &FixedReal) -> Self {
        let scaled = alpha.to_scaled();
        Expansion {
            num: scaled.clone(),
            den: BigInt::from(1) << FRAC_BITS,
            alpha_scaled: scaled,
            p: (BigInt::from(1), BigInt::zero()),
            q: (BigInt::zero(), BigInt::from(1)),
            done: false,
        }
    }

    fn step(&mut self) -> Result<Step> {
        if self.done || self.den.is_zero() {
            return Ok(Step::Exhausted);
        }
        let (digit, rem) = self.num.div_mod_floor(&self.den);
        let p = &digit * &self.p.0 + &self.p.1;
        let q = &digit * &self.q.0 + &self.q.1;
        if (&q * &q).bits() > PRECISION_GUARD_BITS as u64 {
            return Err(Error::InsufficientPrecision {
                q: q.to_string(),
                max_bits: PRECISION_GUARD_BITS,
            });
        }
        self.num = std::mem::replace(&mut self.den, rem);
        self.p = (p.clone(), std::mem::take(&mut self.p.0));
        self.q = (q.clone(), std::mem::take(&mut self.q.0));

        // alpha is only known to within 2^-F; once a/q sits inside that
        // uncertainty the expansion carries no further information.
        let resid = (&self.alpha_scaled * &q - (&p << FRAC_BITS)).abs();
        let exact = resid <= q;
        if exact {
            self.done = true;
        }
        let conv = Convergent {
            a: p.to_i128()
                .ok_or_else(|| Error::Range("numerator exceeds i128".into()))?,
            q: q.to_u128()
                .ok_or_else(|| Error::Range("denominator exceeds u128".into()))?,
        };
        Ok(Step::Next(conv, exact || self.den.is_zero()))
    }
}

/// The first `count` convergents of `alpha` with strictly increasing
/// denominators. When the first partial quotient after the integer part is
/// 1, the leading `a0/1` is dropped in favour of `(a0+1)/1`.
pub fn convergents(alpha: &FixedReal, count: usize) -> Result<Convergents> {
    if count == 0 {
        return Err(Error::domain("count must be at least 1"));
    }
    let mut exp = Expansion::new(alpha);
    let mut items: Vec<Convergent> = Vec::with_capacity(count);
    let mut truncated = false;
    while items.len() < count {
        match exp.step()? {
            Step::Exhausted => {
                truncated = true;
                break;
            }
            Step::Next(c, last) => {
                if items.last().is_some_and(|prev| prev.q == c.q) {
                    items.pop();
                }
                items.push(c);
                if last {
                    // A pending duplicate-q swap cannot happen after the end.
                    truncated = items.len() < count;
                    break;
                }
            }
        }
    }
    if items.len() == count && !truncated {
        // `count` is reached but the next raw convergent might share the
        // last denominator (only possible for the leading 1/1 pair).
        if items.len() == 1 && items[0].q == 1 {
            if let Ok(Step::Next(c, _)) = exp.step() {
                if c.q == 1 {
                    items[0] = c;
                }
            }
        }
    }
    Ok(Convergents { items, truncated })
}

/// Checks `|alpha - a/q| < 1/q^2` in exact integer arithmetic, charging
/// the full `2^-F` uncertainty of the stored `alpha` against the inequality.
pub fn satisfies_dirichlet(alpha: &FixedReal, c: &Convergent) -> bool {
    let q = BigInt::from(c.q);
    let resid = (alpha.to_scaled() * &q - (BigInt::from(c.a) << FRAC_BITS)).abs();
    let lhs = (resid + &q) * &q;
    lhs < (BigInt::from_biguint(Sign::Plus, 1u32.into()) << FRAC_BITS)
}

/// The convergent with the largest denominator in the open window
/// `(q_min, q_max)`.
pub fn select_denominator(alpha: &FixedReal, q_min: f64, q_max: f64) -> Result<Convergent> {
    if !(q_min < q_max) {
        return Err(Error::domain(format!("empty window ({q_min}, {q_max})")));
    }
    let mut exp = Expansion::new(alpha);
    let mut below: Option<Convergent> = None;
    let mut above: Option<Convergent> = None;
    let mut best: Option<Convergent> = None;
    let mut guard_hit = false;
    loop {
        match exp.step() {
            Ok(Step::Exhausted) => break,
            Ok(Step::Next(c, last)) => {
                let qf = c.q as f64;
                if qf >= q_max {
                    above = Some(c);
                    break;
                } else if qf > q_min {
                    best = Some(c);
                } else {
                    below = Some(c);
                }
                if last {
                    break;
                }
            }
            Err(Error::InsufficientPrecision { .. }) => {
                guard_hit = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    match best {
        Some(c) => Ok(c),
        None if guard_hit => Err(Error::InsufficientPrecision {
            q: format!(">= {}", below.map_or(0, |c| c.q)),
            max_bits: PRECISION_GUARD_BITS,
        }),
        None => Err(Error::WindowEmpty {
            q_min,
            q_max,
            below,
            above,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(cs: &[Convergent]) -> Vec<(i128, u128)> {
        cs.iter().map(|c| (c.a, c.q)).collect()
    }

    #[test]
    fn sqrt2_first_five() {
        let a = FixedReal::from_sqrt(2);
        let cs = convergents(&a, 5).unwrap();
        assert!(!cs.truncated);
        assert_eq!(
            pairs(&cs.items),
            vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]
        );
        // Independent float check of |sqrt2 - a/q| < 1/q^2.
        for c in &cs.items {
            let err = (2f64.sqrt() - c.to_f64()).abs();
            assert!(err < 1.0 / (c.q as f64).powi(2));
            assert!(satisfies_dirichlet(&a, c));
        }
    }

    #[test]
    fn golden_ratio_gives_fibonacci() {
        let a = FixedReal::golden_ratio();
        let cs = convergents(&a, 4).unwrap();
        assert_eq!(pairs(&cs.items), vec![(2, 1), (3, 2), (5, 3), (8, 5)]);
        let one = convergents(&a, 1).unwrap();
        assert_eq!(pairs(&one.items), vec![(2, 1)]);
    }

    #[test]
    fn rational_alpha_truncates() {
        let a = FixedReal::from_ratio(1, 3);
        let cs = convergents(&a, 10).unwrap();
        assert!(cs.truncated);
        assert_eq!(pairs(&cs.items), vec![(0, 1), (1, 3)]);
        let half = FixedReal::from_ratio(1, 2);
        let cs = convergents(&half, 10).unwrap();
        assert!(cs.truncated);
        assert_eq!(pairs(&cs.items).last(), Some(&(1, 2)));
    }

    #[test]
    fn precision_guard() {
        let a = FixedReal::from_sqrt(2);
        // sqrt 2 denominators grow like 2.414^n; n = 80 is past 2^92.
        let err = convergents(&a, 80).unwrap_err();
        assert!(matches!(err, Error::InsufficientPrecision { .. }));
        assert!(convergents(&a, 0).is_err());
    }

    #[test]
    fn window_selection() {
        let a = FixedReal::from_sqrt(2);
        let c = select_denominator(&a, 10.0, 100.0).unwrap();
        assert_eq!((c.a, c.q), (99, 70));
        let c = select_denominator(&a, 0.0, 2.0).unwrap();
        assert_eq!((c.a, c.q), (1, 1));
        match select_denominator(&a, 169.0, 238.0) {
            Err(Error::WindowEmpty { below, above, .. }) => {
                assert_eq!(below.unwrap().q, 169);
                assert_eq!(above.unwrap().q, 408);
            }
            other => panic!("expected empty window, got {other:?}"),
        }
        assert!(select_denominator(&a, 5.0, 5.0).is_err());
    }

    #[test]
    fn determinant_identity() {
        for alpha in [
            FixedReal::from_sqrt(2),
            FixedReal::from_sqrt(7),
            FixedReal::golden_ratio(),
        ] {
            let cs = convergents(&alpha, 40).unwrap();
            for w in cs.items.windows(2) {
                let det = w[0].a * w[1].q as i128 - w[1].a * w[0].q as i128;
                assert_eq!(det.abs(), 1);
                assert!(w[1].q > w[0].q);
            }
            for c in &cs.items {
                assert!(satisfies_dirichlet(&alpha, c));
                assert_eq!(num_integer::gcd(c.a.unsigned_abs(), c.q), 1);
            }
        }
    }

    #[test]
    fn negative_alpha() {
        let a = FixedReal::from_ratio(-7, 5);
        let cs = convergents(&a, 10).unwrap();
        assert!(cs.truncated);
        assert_eq!(pairs(&cs.items).last(), Some(&(-7, 5)));
    }
}
