use serde::{Deserialize, Serialize};

use crate::arith::FixedReal;
use crate::det::par_sum;
use crate::error::{Error, Result};
use crate::primes::{factorize_trial, tau_k_from_factors};

/// Largest number of `min` terms a single evaluator may sum.
pub const MAX_MINSUM_TERMS: u64 = 4_000_000_000;

/// `min(a, 1 / ||alpha n||)`.
fn min_term(alpha: &FixedReal, n: u64, a: f64) -> f64 {
    let dist = alpha.frac_mul_u64(n).dist_nearest_int();
    if dist == 0.0 {
        a
    } else {
        a.min(1.0 / dist)
    }
}

/// Integers `m` with `M/2 <= m < M`.
fn dyadic(m: u64) -> std::ops::Range<u64> {
    m.div_ceil(2).max(1)..m
}

fn tau_table(range: std::ops::Range<u64>, k: u32) -> Result<Vec<f64>> {
    range
        .map(|m| tau_k_from_factors(&factorize_trial(m), k).map(|t| t as f64))
        .collect()
}

fn check_budget(terms: u64) -> Result<()> {
    if terms > MAX_MINSUM_TERMS {
        return Err(Error::budget(format!(
            "{terms} terms exceed {MAX_MINSUM_TERMS}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Sum {
    pub value: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `sum_{n <= X} min(XY/n, 1/||alpha n||)` against
/// `XY (1/q + 1/Y + q/(XY)) log(2Xq)`.
pub fn eval_lemma4_sum(alpha: &FixedReal, x: f64, y: f64, q: u128) -> Result<Lemma4Sum> {
    if !(x >= 1.0 && y >= 1.0) || q == 0 {
        return Err(Error::domain(format!(
            "need X, Y >= 1 and q >= 1 (X={x}, Y={y}, q={q})"
        )));
    }
    let n_max = x.floor() as u64;
    check_budget(n_max)?;
    let xy = x * y;
    let value: f64 = par_sum(1..n_max + 1, |n| min_term(alpha, n, xy / n as f64));
    let qf = q as f64;
    let rhs = xy * (1.0 / qf + 1.0 / y + qf / xy) * (2.0 * x * qf).ln();
    Ok(Lemma4Sum {
        value,
        rhs,
        ratio: value / rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma5Sum {
    pub value: f64,
    /// The same sum with every `min` replaced by its first argument.
    pub trivial: f64,
}

/// `sum_{m ~ M} tau_mu(m) sum_{j ~ J} tau_zeta(j) min{x/(m^2 j), 1/||alpha m^2 j||}`.
pub fn eval_lemma5_sum(
    alpha: &FixedReal,
    m: u64,
    j: u64,
    x: f64,
    mu: u32,
    zeta: u32,
) -> Result<Lemma5Sum> {
    if m == 0 || j == 0 || mu < 2 || zeta < 2 {
        return Err(Error::domain("need M, J >= 1 and mu, zeta >= 2"));
    }
    if (m as f64).powi(2) * j as f64 > x {
        return Err(Error::domain(format!(
            "M^2 J = {} exceeds x = {x}",
            (m as f64).powi(2) * j as f64
        )));
    }
    check_budget(m.saturating_mul(j))?;
    let mr = dyadic(m);
    let jr = dyadic(j);
    let tm = tau_table(mr.clone(), mu)?;
    let tj = tau_table(jr.clone(), zeta)?;
    let pair = par_sum(mr.clone(), |mi| {
        let wm = tm[(mi - mr.start) as usize];
        let mut v = 0.0;
        let mut t = 0.0;
        for ji in jr.clone() {
            let w = wm * tj[(ji - jr.start) as usize];
            let n = mi * mi * ji;
            let a = x / n as f64;
            v += w * min_term(alpha, n, a);
            t += w * a;
        }
        Pair(v, t)
    });
    Ok(Lemma5Sum {
        value: pair.0,
        trivial: pair.1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSum {
    pub value: f64,
    pub rhs9: f64,
    pub rhs10: f64,
    pub ratio9: f64,
    pub ratio10: f64,
}

/// The triple min-sum over `m ~ M, s ~ S, j ~ J` with phases
/// `alpha m^3 s^2 j`, compared against both right-hand sides.
#[allow(clippy::too_many_arguments)]
pub fn eval_g(
    alpha: &FixedReal,
    m: u64,
    s: u64,
    j: u64,
    x: f64,
    mu: u32,
    sigma: u32,
    zeta: u32,
    q: u128,
) -> Result<GSum> {
    if m == 0 || s == 0 || j == 0 || mu < 2 || sigma < 2 || zeta < 2 || q == 0 {
        return Err(Error::domain(
            "need M, S, J, q >= 1 and mu, sigma, zeta >= 2",
        ));
    }
    let (mf, sf, jf) = (m as f64, s as f64, j as f64);
    if !(x > mf.powi(3) * sf * sf * jf) {
        return Err(Error::domain(format!("x = {x} must exceed M^3 S^2 J")));
    }
    check_budget(m.saturating_mul(s).saturating_mul(j))?;
    let (mr, sr, jr) = (dyadic(m), dyadic(s), dyadic(j));
    let tm = tau_table(mr.clone(), mu)?;
    let ts = tau_table(sr.clone(), sigma)?;
    let tj = tau_table(jr.clone(), zeta)?;
    let value = par_sum(mr.clone(), |mi| {
        let m3 = mi * mi * mi;
        let wm = tm[(mi - mr.start) as usize];
        let mut v = 0.0;
        for si in sr.clone() {
            let ws = wm * ts[(si - sr.start) as usize];
            for ji in jr.clone() {
                let n = m3 * si * si * ji;
                v += ws * tj[(ji - jr.start) as usize] * min_term(alpha, n, x / n as f64);
            }
        }
        v
    });
    let qf = q as f64;
    let msj = mf * sf * jf;
    let m2s = mf * mf * sf;
    let rhs9 = msj
        + x / (mf.powf(2.25) * sf)
        + x / (mf * mf * sf.powf(1.125))
        + x / (m2s * qf.powf(0.125))
        + x.powf(0.875) * qf.powf(0.125) / m2s;
    let s34 = sf.powf(0.75);
    let rhs10 = msj
        + x / (mf.powf(2.25) * s34)
        + x / (mf * mf * s34 * qf.powf(0.25))
        + x.powf(0.75) * qf.powf(0.25) / (mf * mf * s34);
    Ok(GSum {
        value,
        rhs9,
        rhs10,
        ratio9: value / rhs9,
        ratio10: value / rhs10,
    })
}

#[derive(Clone, Copy, Default)]
struct Pair(f64, f64);

impl std::ops::Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}
