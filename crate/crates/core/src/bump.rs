//! The periodic bump `chi` supported on `(-delta, delta)` mod 1.
//!
//! `chi = h * (1_[-d2, d2] * U_w^{*r})`, periodised, where `U_w` is the
//! uniform density of width `w`. With
//!
//! * `r = ceil(log x)`,
//! * `h = 2r / (2r + 1)`,
//! * `d2 = delta (2r + 1) / (4r)`,
//! * `w = delta (2r - 1) / (2 r^2)`,
//!
//! the support is exactly `(-delta, delta)`, the mean is `delta`, and
//! `0 <= chi <= h < 1`. The Fourier coefficients are in closed form:
//! `c(k) = h sin(2 pi k d2) / (pi k) * sinc(pi k w)^r`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::UnitFrac;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub delta: f64,
    /// Smoothing order (number of convolved uniform kernels).
    pub r: u32,
    pub h_scale: f64,
    /// Plateau half-width before smoothing.
    pub delta2: f64,
    /// Width of each uniform kernel.
    pub w: f64,
    /// Coefficient cutoff `K = delta^-1 log^2 x`.
    pub k_cutoff: f64,
    /// `c(k)` for `k = 0..=floor(K)`; `c(-k) = c(k)`.
    pub coefficients: Vec<f64>,
}

/// Largest `floor(K)` for which a coefficient table is materialised.
pub const MAX_COEFFICIENTS: u64 = 50_000_000;

pub fn build_bump(delta: f64, x: f64) -> Result<BumpSpec> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::domain(format!("delta = {delta} outside (0, 1/4)")));
    }
    if !(x >= 100.0) || !x.is_finite() {
        return Err(Error::domain(format!("x = {x} below 100")));
    }
    let lx = x.ln();
    let r = lx.ceil() as u32;
    let k_cutoff = lx * lx / delta;
    BumpSpec::with_order(delta, r, k_cutoff)
}

impl BumpSpec {
    /// Bump of order `r` with coefficients tabulated to `k_cutoff`.
    pub fn with_order(delta: f64, r: u32, k_cutoff: f64) -> Result<BumpSpec> {
        if !(delta > 0.0 && delta < 0.25) {
            return Err(Error::domain(format!("delta = {delta} outside (0, 1/4)")));
        }
        if r == 0 {
            return Err(Error::domain("smoothing order must be positive"));
        }
        if !(k_cutoff >= 0.0) || k_cutoff.floor() > MAX_COEFFICIENTS as f64 {
            return Err(Error::budget(format!("coefficient cutoff {k_cutoff}")));
        }
        let rf = r as f64;
        let h_scale = 2.0 * rf / (2.0 * rf + 1.0);
        let delta2 = delta * (2.0 * rf + 1.0) / (4.0 * rf);
        let w = delta * (2.0 * rf - 1.0) / (2.0 * rf * rf);
        let mut spec = BumpSpec {
            delta,
            r,
            h_scale,
            delta2,
            w,
            k_cutoff,
            coefficients: Vec::new(),
        };
        let n = k_cutoff.floor() as u64;
        spec.coefficients = (0..=n).map(|k| spec.coefficient(k as i64)).collect();
        Ok(spec)
    }

    /// Largest tabulated `|k|`.
    pub fn k_max(&self) -> u64 {
        self.coefficients.len() as u64 - 1
    }

    /// `c(k)` from the closed form, for any `k`.
    pub fn coefficient(&self, k: i64) -> f64 {
        if k == 0 {
            return self.delta;
        }
        let kf = k.unsigned_abs() as f64;
        let plateau = (2.0 * PI * kf * self.delta2).sin() / (PI * kf);
        let arg = PI * kf * self.w;
        let sinc = arg.sin() / arg;
        self.h_scale * plateau * sinc.powi(self.r as i32)
    }

    /// Envelope bound `|c(k)| <= h / (pi k) * (pi k w)^-r` summed over
    /// `|k| > k_max`, via the integral comparison
    /// `sum_{k > n} k^-(r+1) <= n^-r / r`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound_from(self.k_max())
    }

    pub fn tail_bound_from(&self, n: u64) -> f64 {
        let rf = self.r as f64;
        if n == 0 {
            return f64::INFINITY;
        }
        let nf = n as f64;
        // 2 h / pi * (pi w)^-r * n^-r / r, assembled in logs.
        let log = (2.0 * self.h_scale / PI).ln() - rf * (PI * self.w).ln() - rf * nf.ln() - rf.ln();
        log.exp()
    }

    /// Direct evaluation of the spline at `t` (reduced mod 1).
    pub fn eval_direct(&self, t: f64) -> f64 {
        self.eval_direct_with_error(t).0
    }

    /// Value and a bound on its floating-point error.
    pub fn eval_direct_with_error(&self, t: f64) -> (f64, f64) {
        let s = (t - t.round()).abs();
        self.eval_reduced(s)
    }

    /// Evaluation at an exact phase.
    pub fn eval_phase(&self, t: UnitFrac) -> f64 {
        self.eval_reduced(t.dist_nearest_int()).0
    }

    fn eval_reduced(&self, s: f64) -> (f64, f64) {
        if s >= self.delta {
            return (0.0, 0.0);
        }
        // chi(s) = h * (P(Y > s - d2) - P(Y > s + d2)), Y the kernel sum.
        let (a, ea) = self.kernel_tail(s - self.delta2);
        let (b, eb) = self.kernel_tail(s + self.delta2);
        let v = self.h_scale * (a - b);
        let err = self.h_scale * (ea + eb) + 4.0 * f64::EPSILON * v.abs();
        (v.max(0.0), err)
    }

    /// `P(Y > y)` for `Y = w (U_1 + ... + U_r - r/2)` and its error bound.
    fn kernel_tail(&self, y: f64) -> (f64, f64) {
        let r = self.r as f64;
        // P(Y > y) = P(S < r/2 - y/w) = IrwinHall_r(r/2 - y/w).
        let u = r / 2.0 - y / self.w;
        irwin_hall_cdf(self.r, u)
    }

    /// `delta + sum_{0 < |k| <= cutoff} c(k) e(k t)`.
    pub fn eval_fourier(&self, t: f64, cutoff: u64) -> f64 {
        self.eval_fourier_phase(UnitFrac::from_f64(t), cutoff)
    }

    pub fn eval_fourier_phase(&self, t: UnitFrac, cutoff: u64) -> f64 {
        let cutoff = cutoff.min(self.k_max());
        let mut acc = 0.0;
        for k in 1..=cutoff {
            let phase = t.mul_int(k).to_signed_f64();
            acc += self.coefficients[k as usize] * (std::f64::consts::TAU * phase).cos();
        }
        self.delta + 2.0 * acc
    }

    /// Floating-point error bound for [`BumpSpec::eval_fourier`] at `cutoff`.
    pub fn fourier_rounding_bound(&self, cutoff: u64) -> f64 {
        let cutoff = cutoff.min(self.k_max());
        let abs_sum: f64 = self.coefficients[1..=cutoff as usize]
            .iter()
            .map(|c| c.abs())
            .sum();
        // Sequential summation of 2*cutoff terms, each with a few ulps of
        // error from cos and the product; the f64 input phase adds 2^-64 k.
        let summation = (cutoff as f64 + 8.0) * f64::EPSILON * (self.delta + 2.0 * abs_sum);
        let phase: f64 = self.coefficients[1..=cutoff as usize]
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * std::f64::consts::TAU * (i + 1) as f64)
            .sum::<f64>()
            * 2.0
            * 2f64.powi(-63);
        summation + phase
    }

    /// `sum_{k in (from, to]} |c(k)|` over both signs, by direct summation.
    pub fn abs_coefficient_sum(&self, from: u64, to: u64) -> f64 {
        2.0 * (from + 1..=to)
            .map(|k| self.coefficient(k as i64).abs())
            .sum::<f64>()
    }

    /// Checks the structural identities of the construction.
    pub fn invariant_residuals(&self) -> [f64; 2] {
        let rf = self.r as f64;
        [
            self.delta2 + rf * self.w / 2.0 - self.delta,
            self.h_scale * 2.0 * self.delta2 - self.delta,
        ]
    }

    /// Half-width of the region where `chi` equals `h_scale`.
    pub fn plateau_half_width(&self) -> f64 {
        (self.delta2 - self.r as f64 * self.w / 2.0).max(0.0)
    }

    /// CSV with header `k,c_k` covering `-K..=K`.
    pub fn to_csv(&self) -> String {
        let n = self.k_max() as i64;
        let mut out = String::from("k,c_k\n");
        for k in -n..=n {
            out.push_str(&format!(
                "{},{}\n",
                k,
                crate::report::fmt_real(self.coefficients[k.unsigned_abs() as usize])
            ));
        }
        out
    }
}

/// CDF of the sum of `r` independent uniforms on `[0, 1]` with an error
/// bound. Uses `F(u) = 1 - F(r - u)` so the alternating sum only runs over
/// `j <= u <= r/2`.
fn irwin_hall_cdf(r: u32, u: f64) -> (f64, f64) {
    let rf = r as f64;
    if u <= 0.0 {
        return (0.0, 0.0);
    }
    if u >= rf {
        return (1.0, 0.0);
    }
    let (flip, v) = if u > rf / 2.0 {
        (true, rf - u)
    } else {
        (false, u)
    };
    let mut fact = 1.0;
    for i in 2..=r {
        fact *= i as f64;
    }
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut binom = 1.0;
    let jmax = v.floor() as u32;
    for j in 0..=jmax.min(r) {
        let term = binom * (v - j as f64).powi(r as i32) / fact;
        let signed = if j % 2 == 0 { term } else { -term };
        sum += signed;
        abs_sum += term;
        binom = binom * (rf - j as f64) / (j as f64 + 1.0);
    }
    let err = (rf + 4.0) * 2.0 * f64::EPSILON * abs_sum;
    let sum = sum.clamp(0.0, 1.0);
    if flip {
        (1.0 - sum, err + f64::EPSILON)
    } else {
        (sum, err)
    }
}
