use crate::error::{Error, Result};
use crate::primes::factorize_trial;

/// Splits squarefree `d` as `h s` with `h <= H`, `s <= S`.
///
/// Primes are placed greedily in decreasing order; if that fails every
/// assignment is tried before giving up.
pub fn well_separable_split(d: u64, level: f64, h_max: f64, s_max: f64) -> Result<(u64, u64)> {
    if d == 0 || !(h_max >= 1.0 && s_max >= 1.0) {
        return Err(Error::domain("need d >= 1 and H, S >= 1"));
    }
    if ((h_max * s_max - level) / level).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "H S = {} differs from D = {level}",
            h_max * s_max
        )));
    }
    let factors = factorize_trial(d);
    if factors.iter().any(|&(_, e)| e > 1) {
        return Err(Error::domain(format!("{d} is not squarefree")));
    }
    let mut primes: Vec<u64> = factors.into_iter().map(|(p, _)| p).collect();
    primes.reverse();
    let fits = |v: u64, lim: f64| v as f64 <= lim;

    let (mut h, mut s) = (1u64, 1u64);
    for &p in &primes {
        if fits(h * p, h_max) {
            h *= p;
        } else {
            s *= p;
        }
    }
    if fits(s, s_max) {
        return Ok((h, s));
    }

    let r = primes.len();
    if r < 32 {
        for mask in 0u64..(1 << r) {
            let h: u64 = (0..r)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| primes[i])
                .product();
            let s = d / h;
            if fits(h, h_max) && fits(s, s_max) {
                return Ok((h, s));
            }
        }
    }
    Err(Error::SplitFailed {
        d,
        h_max,
        s_max,
        factors: primes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(well_separable_split(1, 100.0, 10.0, 10.0).unwrap(), (1, 1));
        assert_eq!(well_separable_split(6, 6.0, 3.0, 2.0).unwrap(), (3, 2));
        assert!(well_separable_split(4, 6.0, 3.0, 2.0).is_err());
        assert!(well_separable_split(6, 7.0, 3.0, 2.0).is_err());
        match well_separable_split(35, 12.0, 4.0, 3.0) {
            Err(Error::SplitFailed { factors, .. }) => assert_eq!(factors, vec![7, 5]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fallback_finds_non_greedy_split() {
        // Greedy gives h = 7 * 2, s = 5 * 3 = 15 > 14; h = 15, s = 14 works.
        let (h, s) = well_separable_split(210, 210.0, 15.0, 14.0).unwrap();
        assert_eq!((h, s), (15, 14));
    }
}
