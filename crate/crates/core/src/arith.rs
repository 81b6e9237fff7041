//! Fixed-point phase arithmetic.
//!
//! Phases `frac(alpha * m)` are computed in 192-bit fixed point so that
//! `alpha * k * n^2` keeps more than 100 correct fractional bits for
//! `k * n^2` up to about `2^90`. Only the final conversion to an angle
//! drops to `f64`.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Number of fractional bits carried by [`FixedReal`] and [`UnitFrac`].
pub const FRAC_BITS: u32 = 192;

const LIMBS: usize = 3;

/// Largest multiplier accepted by [`FixedReal::frac_mul`].
pub const MAX_PHASE_MULTIPLIER: u128 = 1 << 96;

/// A point of the unit circle `R/Z`, stored as `value / 2^192`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct UnitFrac([u64; LIMBS]);

impl UnitFrac {
    pub const ZERO: UnitFrac = UnitFrac([0; LIMBS]);
    pub const HALF: UnitFrac = UnitFrac([0, 0, 1 << 63]);

    /// Limbs are little-endian.
    pub const fn from_limbs(limbs: [u64; LIMBS]) -> Self {
        UnitFrac(limbs)
    }

    pub const fn limbs(&self) -> [u64; LIMBS] {
        self.0
    }

    /// `t` reduced mod 1, rounded down to 64 fractional bits.
    pub fn from_f64(t: f64) -> Self {
        let r = t - t.floor();
        let top = (r * 2f64.powi(64)).floor();
        let top = if top >= 2f64.powi(64) {
            u64::MAX
        } else {
            top as u64
        };
        UnitFrac([0, 0, top])
    }

    /// `num / den` reduced mod 1, truncated to 192 bits.
    pub fn from_ratio(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let mut rem = (num % den) as u128;
        let mut limbs = [0u64; LIMBS];
        for i in (0..LIMBS).rev() {
            rem <<= 64;
            limbs[i] = (rem / den as u128) as u64;
            rem %= den as u128;
        }
        UnitFrac(limbs)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; LIMBS]
    }

    pub fn wrapping_add(self, other: UnitFrac) -> UnitFrac {
        let mut out = [0u64; LIMBS];
        let mut carry = false;
        for (i, slot) in out.iter_mut().enumerate() {
            let (s1, c1) = self.0[i].overflowing_add(other.0[i]);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *slot = s2;
            carry = c1 || c2;
        }
        UnitFrac(out)
    }

    /// `1 - t` mod 1.
    pub fn wrapping_neg(self) -> UnitFrac {
        let mut out = [0u64; LIMBS];
        let mut borrow = true;
        for (i, slot) in out.iter_mut().enumerate() {
            let (v, b) = (!self.0[i]).overflowing_add(borrow as u64);
            *slot = v;
            borrow = b;
        }
        UnitFrac(out)
    }

    /// `frac(t * m)`, exact.
    pub fn mul_int(self, m: u64) -> UnitFrac {
        let (low, _) = self.widening_mul(m);
        UnitFrac(low)
    }

    /// `frac(t * m / 2)`, exact: keeps the lowest integer bit of `t * m`.
    pub fn mul_int_half(self, m: u64) -> UnitFrac {
        let (low, high) = self.widening_mul(m);
        let mut out = [0u64; LIMBS];
        out[0] = (low[0] >> 1) | (low[1] << 63);
        out[1] = (low[1] >> 1) | (low[2] << 63);
        out[2] = (low[2] >> 1) | ((high & 1) << 63);
        UnitFrac(out)
    }

    fn widening_mul(self, m: u64) -> ([u64; LIMBS], u64) {
        let mut out = [0u64; LIMBS];
        let mut carry: u128 = 0;
        for (i, slot) in out.iter_mut().enumerate() {
            let t = self.0[i] as u128 * m as u128 + carry;
            *slot = t as u64;
            carry = t >> 64;
        }
        (out, carry as u64)
    }

    /// Value in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        self.0[2] as f64 * 2f64.powi(-64) + self.0[1] as f64 * 2f64.powi(-128)
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn to_signed_f64(self) -> f64 {
        if self.0[2] >> 63 == 1 {
            -self.wrapping_neg().to_f64()
        } else {
            self.to_f64()
        }
    }

    /// `||t||`, the distance to the nearest integer, in `[0, 1/2]`.
    pub fn dist_nearest_int(self) -> f64 {
        if self.0[2] >> 63 == 1 {
            self.wrapping_neg().to_f64()
        } else {
            self.to_f64()
        }
    }

    /// `e(t) = exp(2 pi i t)`. The angle is built from the top 64 bits,
    /// so each call carries an absolute error below `2^-50`.
    pub fn cis(self) -> Complex64 {
        let (s, c) = (TAU * self.to_signed_f64()).sin_cos();
        Complex64::new(c, s)
    }
}

impl fmt::Debug for UnitFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "UnitFrac(0x{:016x}{:016x}{:016x})",
            self.0[2], self.0[1], self.0[0]
        )
    }
}

impl PartialOrd for UnitFrac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UnitFrac {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

/// A real number `integer_part + frac / 2^192`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Debug)]
pub struct FixedReal {
    pub integer_part: i64,
    pub frac: UnitFrac,
}

impl FixedReal {
    pub const fn new(integer_part: i64, frac: UnitFrac) -> Self {
        FixedReal { integer_part, frac }
    }

    pub const fn from_int(n: i64) -> Self {
        FixedReal {
            integer_part: n,
            frac: UnitFrac::ZERO,
        }
    }

    /// `floor(num / den * 2^192) / 2^192`.
    pub fn from_ratio(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let int = num.div_euclid(den as i64);
        let rem = num.rem_euclid(den as i64) as u64;
        FixedReal::new(int, UnitFrac::from_ratio(rem, den))
    }

    /// `sqrt(d)` rounded down to 192 fractional bits, by integer Newton
    /// iteration on `d * 2^384`.
    pub fn from_sqrt(d: u64) -> Self {
        let target = BigUint::from(d) << (2 * FRAC_BITS);
        let root = isqrt_newton(&target);
        FixedReal::from_scaled(&BigInt::from_biguint(Sign::Plus, root))
            .expect("sqrt of u64 fits the integer part")
    }

    /// `(1 + sqrt(5)) / 2`.
    pub fn golden_ratio() -> Self {
        let s = FixedReal::from_sqrt(5).to_scaled();
        let one = BigInt::one() << FRAC_BITS;
        FixedReal::from_scaled(&((s + one) >> 1u32)).expect("fits")
    }

    /// Builds `n / 2^192` (floored). Fails if the integer part overflows `i64`.
    pub fn from_scaled(n: &BigInt) -> Result<Self> {
        let int = n >> FRAC_BITS;
        let frac_part: BigInt = n - (&int << FRAC_BITS);
        let integer_part = i64::try_from(&int)
            .map_err(|_| Error::Range(format!("integer part {int} exceeds i64")))?;
        let (_, digits) = frac_part.to_u64_digits();
        let mut limbs = [0u64; LIMBS];
        for (slot, d) in limbs.iter_mut().zip(digits) {
            *slot = d;
        }
        Ok(FixedReal::new(integer_part, UnitFrac(limbs)))
    }

    /// The exact value times `2^192`.
    pub fn to_scaled(&self) -> BigInt {
        let mut frac = BigUint::zero();
        for limb in self.frac.0.iter().rev() {
            frac = (frac << 64u32) + BigUint::from(*limb);
        }
        (BigInt::from(self.integer_part) << FRAC_BITS) + BigInt::from_biguint(Sign::Plus, frac)
    }

    pub fn to_f64(&self) -> f64 {
        self.integer_part as f64 + self.frac.to_f64()
    }

    /// `frac(alpha * m)` with absolute error at most `(m + 1) * 2^-192`.
    pub fn frac_mul(&self, m: u128) -> Result<UnitFrac> {
        if m > MAX_PHASE_MULTIPLIER {
            return Err(Error::Range(format!("phase multiplier {m} exceeds 2^96")));
        }
        Ok(self.frac_mul_wide(m))
    }

    /// Same as [`FixedReal::frac_mul`] for multipliers that fit a `u64`.
    pub fn frac_mul_u64(&self, m: u64) -> UnitFrac {
        self.frac.mul_int(m)
    }

    pub(crate) fn frac_mul_wide(&self, m: u128) -> UnitFrac {
        let a = self.frac.0;
        let (m0, m1) = (m as u64, (m >> 64) as u64);
        let mut r = [0u64; LIMBS];
        let mut carry: u128 = 0;
        for i in 0..LIMBS {
            let t = a[i] as u128 * m0 as u128 + carry;
            r[i] = t as u64;
            carry = t >> 64;
        }
        carry = 0;
        for i in 0..LIMBS - 1 {
            let t = a[i] as u128 * m1 as u128 + r[i + 1] as u128 + carry;
            r[i + 1] = t as u64;
            carry = t >> 64;
        }
        UnitFrac(r)
    }

    /// `frac(alpha * n^2 + beta)`.
    pub fn quadratic_phase(&self, n: u64, beta: &FixedReal) -> UnitFrac {
        let sq = n as u128 * n as u128;
        self.frac_mul_wide(sq).wrapping_add(beta.frac)
    }
}

fn isqrt_newton(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    // Start above the root; the iteration then decreases monotonically.
    let bits = n.bits();
    let mut x = BigUint::one() << bits.div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// `||t||` for a phase.
pub fn dist_nearest_int(t: UnitFrac) -> f64 {
    t.dist_nearest_int()
}

/// `Li(x) = integral from 2 to x of dt / log t`, by adaptive Gauss-Kronrod
/// quadrature after the substitution `t = e^u`.
pub fn log_integral(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::domain(format!("Li(x) needs finite x >= 2, got {x}")));
    }
    if x == 2.0 {
        return Ok(0.0);
    }
    let f = |u: f64| u.exp() / u;
    let (a, b) = (2f64.ln(), x.ln());
    let (whole, _) = gauss_kronrod_15(&f, a, b);
    let tol = 1e-14 * whole.abs();
    Ok(adaptive(&f, a, b, tol, 0))
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gauss_kronrod_15(f, a, b);
    if err <= tol || depth >= 40 {
        return k;
    }
    let mid = 0.5 * (a + b);
    adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}
