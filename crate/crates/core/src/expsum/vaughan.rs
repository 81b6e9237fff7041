//! Vaughan's identity, for `n > V`:
//!
//! `Lambda(n) = sum_{d | n, d <= U} mu(d) log(n/d)
//!            - sum_{t l = n} a1(t)
//!            - sum_{k l = n, k > U, l > V} a2(k) Lambda(l)`
//!
//! with `a1 = mu_{<=U} * Lambda_{<=V}` and `a2(k) = sum_{d | k, d <= U} mu(d)`.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::det::par_sum;
use crate::error::{Error, Result};
use crate::primes::{factorize_trial, mobius_table, tau_k_from_factors, PrimeTable};

/// Largest `x` the decomposition materialises.
pub const MAX_VAUGHAN_X: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    /// `a(m) = mu(m)` against `log l`.
    TypeILog,
    /// `a(m) = a1(m)` against `1`.
    TypeIConst,
    /// `a(m) = a2(m)`, `m > U`, against `Lambda(l)` with `l > V`.
    TypeII,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllWeight {
    Log,
    One,
    Mangoldt,
}

/// `sign * sum_{m in [m_lo, m_hi)} a(m) sum_{l >= l_min} b(l) g(m l)`,
/// restricted to `m l` in the decomposition's range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub sign: f64,
    pub m_lo: u64,
    pub m_hi: u64,
    pub coeffs: Vec<f64>,
    pub ell_min: u64,
    pub ell_weight: EllWeight,
}

impl Component {
    pub fn a(&self, m: u64) -> f64 {
        if m < self.m_lo || m >= self.m_hi {
            0.0
        } else {
            self.coeffs[(m - self.m_lo) as usize]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VaughanDecomposition {
    pub x: u64,
    pub u: f64,
    pub v: f64,
    /// Sums run over `n` in `(n_lo, x]`, `n_lo = floor(max(U, V))`.
    pub n_lo: u64,
    pub components: Vec<Component>,
    #[serde(skip)]
    mangoldt: Vec<f64>,
}

fn dyadic_pieces(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let next = if a.is_power_of_two() {
            2 * a
        } else {
            a.next_power_of_two()
        };
        let b = next.min(hi);
        out.push((a, b));
        a = b;
    }
    out
}

pub fn vaughan_decompose(x: f64, u: f64, v: f64) -> Result<VaughanDecomposition> {
    if !(u >= 2.0 && v >= 2.0) {
        return Err(Error::domain(format!("need U, V >= 2 (U={u}, V={v})")));
    }
    if u * v > x {
        return Err(Error::domain(format!("U V = {} exceeds x = {x}", u * v)));
    }
    if x > MAX_VAUGHAN_X as f64 {
        return Err(Error::budget(format!("x = {x} exceeds {MAX_VAUGHAN_X}")));
    }
    let xi = x.floor() as u64;
    let ui = u.floor() as u64;
    let vi = v.floor() as u64;
    let n_lo = ui.max(vi);
    let table = PrimeTable::new(xi, false)?;
    let mangoldt = table.mangoldt_table(xi);
    let mu = mobius_table(ui);

    let t_max = (ui * vi).min(xi);
    let mut a1 = vec![0.0; t_max as usize + 1];
    for d in 1..=ui {
        if mu[d as usize] == 0 {
            continue;
        }
        let md = mu[d as usize] as f64;
        for m in 2..=vi.min(t_max / d) {
            let l = mangoldt[m as usize];
            if l != 0.0 {
                a1[(d * m) as usize] += md * l;
            }
        }
    }

    let k_max = xi / (vi + 1);
    let mut a2 = vec![0.0; k_max as usize + 1];
    for d in 1..=ui.min(k_max) {
        let md = mu[d as usize] as f64;
        if md == 0.0 {
            continue;
        }
        let mut k = d;
        while k <= k_max {
            a2[k as usize] += md;
            k += d;
        }
    }

    let mut components = Vec::new();
    for (lo, hi) in dyadic_pieces(1, ui + 1) {
        components.push(Component {
            kind: ComponentKind::TypeILog,
            sign: 1.0,
            m_lo: lo,
            m_hi: hi,
            coeffs: (lo..hi).map(|d| mu[d as usize] as f64).collect(),
            ell_min: 1,
            ell_weight: EllWeight::Log,
        });
    }
    for (lo, hi) in dyadic_pieces(1, t_max + 1) {
        components.push(Component {
            kind: ComponentKind::TypeIConst,
            sign: -1.0,
            m_lo: lo,
            m_hi: hi,
            coeffs: a1[lo as usize..hi as usize].to_vec(),
            ell_min: 1,
            ell_weight: EllWeight::One,
        });
    }
    for (lo, hi) in dyadic_pieces(ui + 1, k_max + 1) {
        components.push(Component {
            kind: ComponentKind::TypeII,
            sign: -1.0,
            m_lo: lo,
            m_hi: hi,
            coeffs: a2[lo as usize..hi as usize].to_vec(),
            ell_min: vi + 1,
            ell_weight: EllWeight::Mangoldt,
        });
    }
    Ok(VaughanDecomposition {
        x: xi,
        u,
        v,
        n_lo,
        components,
        mangoldt,
    })
}

impl VaughanDecomposition {
    fn ell_weight(&self, w: EllWeight, l: u64) -> f64 {
        match w {
            EllWeight::Log => (l as f64).ln(),
            EllWeight::One => 1.0,
            EllWeight::Mangoldt => self.mangoldt[l as usize],
        }
    }

    /// The contribution of one component against `g`.
    pub fn eval_component<T, G>(&self, c: &Component, g: &G) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T> + Send,
        G: Fn(u64) -> T + Sync,
    {
        let s: T = par_sum(c.m_lo..c.m_hi, |m| {
            let a = c.a(m);
            if a == 0.0 {
                return T::default();
            }
            let l_lo = c.ell_min.max(self.n_lo / m + 1);
            let l_hi = self.x / m;
            let mut acc = T::default();
            for l in l_lo..=l_hi {
                let b = self.ell_weight(c.ell_weight, l);
                if b != 0.0 {
                    acc = acc + g(m * l) * b;
                }
            }
            acc * a
        });
        s * c.sign
    }

    /// Sum of every component against `g`.
    pub fn evaluate<T, G>(&self, g: G) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T> + Send,
        G: Fn(u64) -> T + Sync,
    {
        let parts: Vec<T> = self
            .components
            .iter()
            .map(|c| self.eval_component(c, &g))
            .collect();
        crate::det::pairwise_sum(&parts)
    }

    /// `sum_{n in (n_lo, x]} Lambda(n) g(n)`.
    pub fn direct<T, G>(&self, g: G) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T> + Send,
        G: Fn(u64) -> T + Sync,
    {
        par_sum(self.n_lo + 1..self.x + 1, |n| {
            let l = self.mangoldt[n as usize];
            if l == 0.0 {
                T::default()
            } else {
                g(n) * l
            }
        })
    }

    /// Counts coefficients with `|a(m)| > tau(m) (1 + log m)`.
    pub fn coefficient_bound_violations(&self) -> usize {
        let mut bad = 0;
        for c in &self.components {
            for m in c.m_lo..c.m_hi {
                let tau = tau_k_from_factors(&factorize_trial(m), 2).unwrap_or(u128::MAX) as f64;
                if c.a(m).abs() > tau * (1.0 + (m as f64).ln()) + 1e-9 {
                    bad += 1;
                }
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_pieces_cover() {
        assert_eq!(dyadic_pieces(1, 10), vec![(1, 2), (2, 4), (4, 8), (8, 10)]);
        assert_eq!(dyadic_pieces(5, 20), vec![(5, 8), (8, 16), (16, 20)]);
        assert!(dyadic_pieces(3, 3).is_empty());
    }

    #[test]
    fn unit_test_function_gives_psi() {
        let dec = vaughan_decompose(1000.0, 10.0, 10.0).unwrap();
        let table = PrimeTable::new(1000, false).unwrap();
        let psi: f64 = (11..=1000).map(|n| table.von_mangoldt(n)).sum();
        let got: f64 = dec.evaluate(|_| 1.0);
        assert!((got - psi).abs() < 1e-8 * psi, "{got} vs {psi}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(vaughan_decompose(50.0, 10.0, 10.0).is_err());
        assert!(vaughan_decompose(1000.0, 1.0, 10.0).is_err());
    }
}
