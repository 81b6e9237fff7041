use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent `c` in `Delta = K^c` for the Lemma-1 parameter family, read as
/// the mixed number `32 + 34/33`.
pub const LEMMA1_DELTA_EXPONENT: f64 = 32.0 + 34.0 / 33.0;

/// The same exponent under a decimal-comma reading, `32.34 / 33`.
pub const LEMMA1_DELTA_EXPONENT_DECIMAL: f64 = 32.34 / 33.0;

/// The coupled scale parameters `x, theta, rho` and everything derived
/// from them: `delta = x^-theta`, `K = delta^-1 log^2 x`, `Delta = x^rho`
/// and the level `D = x^(1/2) / (Delta K^4)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveParams {
    pub x: f64,
    pub theta: f64,
    pub rho: f64,
    pub delta: f64,
    pub k_cutoff: f64,
    pub big_delta: f64,
    pub level: f64,
    pub omega_margin: f64,
    /// Whether `(theta, rho)` was validated against the asymptotic regime.
    pub regime_checked: bool,
}

/// The asymptotic constraints on `(theta, rho)`.
pub fn check_regime(theta: f64, rho: f64) -> Result<()> {
    let ok = theta > 0.0
        && theta < 1.0 / 200.0
        && rho > 32.0 * theta
        && rho + 4.0 * theta < 11.0 / 54.0
        && rho + theta > 0.0;
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "(theta, rho) = ({theta}, {rho}) violates 0 < theta < 1/200, rho > 32 theta, rho + 4 theta < 11/54"
        )))
    }
}

impl SieveParams {
    /// Parameters in the asymptotic regime; rejects `(theta, rho)` outside it.
    pub fn new(x: f64, theta: f64, rho: f64, omega_margin: f64) -> Result<Self> {
        check_regime(theta, rho)?;
        let mut p = Self::desk(x, theta, rho, omega_margin)?;
        p.regime_checked = true;
        Ok(p)
    }

    /// Parameters for desk-scale runs: only `x >= 100`, `0 <= theta < 1`
    /// and finite `rho` are required.
    pub fn desk(x: f64, theta: f64, rho: f64, omega_margin: f64) -> Result<Self> {
        if !(x >= 100.0) || !x.is_finite() {
            return Err(Error::domain(format!("x = {x} below 100")));
        }
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::domain(format!("theta = {theta} outside [0, 1)")));
        }
        if !rho.is_finite() || !(omega_margin >= 0.0) {
            return Err(Error::domain("rho and omega must be finite, omega >= 0"));
        }
        let lx = x.ln();
        let delta = (-theta * lx).exp();
        let k_cutoff = lx * lx / delta;
        let big_delta = (rho * lx).exp();
        let level = (0.5 * lx - rho * lx - 4.0 * k_cutoff.ln()).exp();
        Ok(SieveParams {
            x,
            theta,
            rho,
            delta,
            k_cutoff,
            big_delta,
            level,
            omega_margin,
            regime_checked: false,
        })
    }

    /// The Lemma-1 family: `K = x^theta log^2 x`, `Delta = K^exponent`.
    /// The regime is checked at the exponent level, `rho = exponent * theta`.
    pub fn lemma1(x: f64, theta: f64, exponent: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 0.005) {
            return Err(Error::domain(format!("theta = {theta} outside (0, 0.005)")));
        }
        check_regime(theta, exponent * theta)?;
        let lx = x.ln();
        let ln_k = theta * lx + 2.0 * lx.ln();
        let rho = exponent * ln_k / lx;
        let mut p = Self::desk(x, theta, rho, 0.0)?;
        p.regime_checked = true;
        Ok(p)
    }

    /// `max(D, 1)`: at desk scale `D < 1` and only `d = 1` survives.
    pub fn effective_level(&self) -> f64 {
        self.level.max(1.0)
    }

    pub fn level_below_one(&self) -> bool {
        self.level < 1.0
    }

    /// `floor(K)`.
    pub fn k_max(&self) -> u64 {
        self.k_cutoff.floor() as u64
    }
}

/// Smallest `log x` at which the Lemma-1 family reaches `D >= 1`, i.e.
/// `x^(1/2) >= K^(exponent + 4)` with `K = x^theta log^2 x`.
pub fn lemma1_level_threshold(theta: f64, exponent: f64) -> Option<f64> {
    let c = exponent + 4.0;
    let slope = 0.5 - c * theta;
    if slope <= 0.0 {
        return None;
    }
    // g(L) = 0.5 L - c (theta L + 2 ln L); negative near L = e, then grows.
    let g = |l: f64| 0.5 * l - c * (theta * l + 2.0 * l.ln());
    let mut lo = std::f64::consts::E;
    let mut hi = lo;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    if g(lo) > 0.0 {
        return Some(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// The five terms of the W bound, without the `x^eps` factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bound {
    pub terms: [f64; 5],
    pub total: f64,
    /// `eps = log log x / log x`, so `x^eps = log x`.
    pub eps: f64,
    pub x_eps: f64,
}

impl Theorem1Bound {
    pub fn with_x_eps(&self) -> f64 {
        self.total * self.x_eps
    }
}

pub fn theorem1_bound(params: &SieveParams, q: f64) -> Result<Theorem1Bound> {
    if !(q >= 2.0) {
        return Err(Error::domain(format!("q = {q} below 2")));
    }
    let lx = params.x.ln();
    let lk = params.k_cutoff.ln();
    let ld = params.big_delta.ln();
    let lq = q.ln();
    let logs = [
        lx + lk - ld / 32.0,
        lx + lk - lq / 32.0,
        15.0 / 16.0 * lx + 31.0 / 32.0 * lk + lq / 32.0,
        lx + 0.5 * ld + lk - lq / 4.0,
        0.5 * lx + 0.5 * ld + 0.75 * lk + lq / 4.0,
    ];
    let terms = logs.map(f64::exp);
    let eps = lx.ln() / lx;
    Ok(Theorem1Bound {
        terms,
        total: terms.iter().sum(),
        eps,
        x_eps: (eps * lx).exp(),
    })
}

/// The admissible window for `q`, kept in logarithms because the bounds
/// leave the `f64` range quickly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QWindow {
    /// `ln` of `x^omega`, `Delta K^2`, `x^2 / K^31`, `x^2 / (Delta^2 K^3)`.
    pub ln_parts: [f64; 4],
    pub ln_lo: f64,
    pub ln_hi: f64,
    pub empty: bool,
}

impl QWindow {
    pub fn lo(&self) -> f64 {
        self.ln_lo.exp()
    }

    pub fn hi(&self) -> f64 {
        self.ln_hi.exp()
    }

    /// Geometric mean of the endpoints, in logs.
    pub fn ln_mid(&self) -> f64 {
        0.5 * (self.ln_lo + self.ln_hi)
    }
}

pub fn remark2_window(params: &SieveParams) -> QWindow {
    let lx = params.x.ln();
    let lk = params.k_cutoff.ln();
    let ld = params.big_delta.ln();
    let ln_parts = [
        params.omega_margin * lx,
        ld + 2.0 * lk,
        2.0 * lx - 31.0 * lk,
        2.0 * lx - 2.0 * ld - 3.0 * lk,
    ];
    let ln_lo = ln_parts[0].max(ln_parts[1]);
    let ln_hi = ln_parts[2].min(ln_parts[3]);
    QWindow {
        ln_parts,
        ln_lo,
        ln_hi,
        empty: ln_lo >= ln_hi,
    }
}

/// Log of the trivial bound `x K` that a nontrivial estimate must beat.
pub fn ln_trivial_bound(params: &SieveParams) -> f64 {
    params.x.ln() + params.k_cutoff.ln()
}

/// `ln` of each bound term at `ln q`, for windows beyond the `f64` range.
pub fn theorem1_ln_terms(params: &SieveParams, ln_q: f64) -> [f64; 5] {
    let lx = params.x.ln();
    let lk = params.k_cutoff.ln();
    let ld = params.big_delta.ln();
    [
        lx + lk - ld / 32.0,
        lx + lk - ln_q / 32.0,
        15.0 / 16.0 * lx + 31.0 / 32.0 * lk + ln_q / 32.0,
        lx + 0.5 * ld + lk - ln_q / 4.0,
        0.5 * lx + 0.5 * ld + 0.75 * lk + ln_q / 4.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_constraints() {
        assert!(SieveParams::new(1e6, 1e-3, 0.04, 0.01).is_ok());
        assert!(SieveParams::new(1e6, 1e-3, 0.02, 0.01).is_err()); // rho <= 32 theta
        assert!(SieveParams::new(1e6, 0.006, 0.2, 0.01).is_err());
        assert!(SieveParams::new(1e6, 1e-3, 0.21, 0.01).is_err());
        let p = SieveParams::desk(1e6, 0.3, 0.0, 0.0).unwrap();
        assert!(!p.regime_checked);
    }

    #[test]
    fn derived_quantities() {
        let p = SieveParams::new(1e6, 1e-3, 0.04, 0.01).unwrap();
        let lx = 1e6f64.ln();
        assert!((p.delta - 1e6f64.powf(-1e-3)).abs() < 1e-15);
        assert!((p.k_cutoff - lx * lx / p.delta).abs() < 1e-9);
        assert!((p.big_delta - 1e6f64.powf(0.04)).abs() < 1e-12);
        let d = 1e3 / (p.big_delta * p.k_cutoff.powi(4));
        assert!(((p.level - d) / d).abs() < 1e-12);
        assert!(p.level_below_one());
        assert_eq!(p.effective_level(), 1.0);
    }

    #[test]
    fn lemma1_family() {
        let p = SieveParams::lemma1(33461.0, 0.004, LEMMA1_DELTA_EXPONENT).unwrap();
        let k = 33461f64.powf(0.004) * 33461f64.ln().powi(2);
        assert!((p.k_cutoff - k).abs() < 1e-9 * k);
        assert!((p.big_delta - k.powf(LEMMA1_DELTA_EXPONENT)).abs() < 1e-9 * p.big_delta);
        assert!(SieveParams::lemma1(1e6, 0.006, LEMMA1_DELTA_EXPONENT).is_err());
        // The decimal reading gives rho ~ 0.98 theta < 32 theta.
        assert!(SieveParams::lemma1(1e6, 0.004, LEMMA1_DELTA_EXPONENT_DECIMAL).is_err());
    }

    #[test]
    fn lemma1_threshold_solves_level_equation() {
        let l = lemma1_level_threshold(0.004, LEMMA1_DELTA_EXPONENT).unwrap();
        let c = LEMMA1_DELTA_EXPONENT + 4.0;
        let resid = 0.5 * l - c * (0.004 * l + 2.0 * l.ln());
        assert!(resid.abs() < 1e-6, "{resid}");
        assert!(l > 1000.0);
        assert!(lemma1_level_threshold(0.02, LEMMA1_DELTA_EXPONENT).is_none());
    }

    #[test]
    fn bound_terms() {
        let p = SieveParams::new(1e6, 1e-3, 0.04, 0.01).unwrap();
        let b = theorem1_bound(&p, 99.0).unwrap();
        let sum: f64 = b.terms.iter().sum();
        assert_eq!(b.total, sum);
        // Direct arithmetic for the first and third terms.
        let t1 = p.x * p.k_cutoff / p.big_delta.powf(1.0 / 32.0);
        let t3 = p.x.powf(15.0 / 16.0) * p.k_cutoff.powf(31.0 / 32.0) * 99f64.powf(1.0 / 32.0);
        assert!((b.terms[0] - t1).abs() < 1e-9 * t1);
        assert!((b.terms[2] - t3).abs() < 1e-9 * t3);
        assert!((b.x_eps - p.x.ln()).abs() < 1e-9);
        // q -> infinity: terms 2 and 4 fall, 3 grows.
        let big = theorem1_bound(&p, 1e12).unwrap();
        assert!(big.terms[1] < b.terms[1] && big.terms[3] < b.terms[3]);
        assert!(big.terms[2] > b.terms[2]);
        assert!(theorem1_bound(&p, 1.0).is_err());
    }

    #[test]
    fn window_is_empty_at_desk_scale() {
        let p = SieveParams::new(1e6, 1.0 / 1300.0, 32.5 / 1300.0, 0.01).unwrap();
        let w = remark2_window(&p);
        assert!(w.empty);
        // x^2 / K^31 alone is far below Delta K^2.
        assert!(w.ln_parts[2] < w.ln_parts[1]);
    }

    #[test]
    fn window_opens_at_large_scale_and_bound_is_nontrivial() {
        let p = SieveParams::new(1e100, 1.0 / 1300.0, 32.5 / 1300.0, 0.01).unwrap();
        let w = remark2_window(&p);
        assert!(!w.empty);
        let terms = theorem1_ln_terms(&p, w.ln_mid());
        let total = terms.iter().map(|t| t.exp()).sum::<f64>();
        assert!(total.ln() < ln_trivial_bound(&p));
    }
}
