//! The twin almost-prime pipeline: the weighted sequence `A = {p + 2}`,
//! remainders `R1`, `R2`, the Buchstab pieces and a direct count of primes
//! with `||alpha p^2 + beta|| < p^-theta` and `p + 2 = P2`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{log_integral, FixedReal, UnitFrac};
use crate::bump::{build_bump, BumpSpec};
use crate::config::{RealSpec, RunConfig};
use crate::det::{pairwise_sum, par_blocks};
use crate::error::{Error, Result};
use crate::expsum::{
    check_regime, eval_w_direct, table_for, CoefficientTable, PhaseSum, SieveParams, Support,
    WeightTable, LEMMA1_DELTA_EXPONENT,
};
use crate::primes::{big_omega_range, factorize_trial, mobius_table, sieve_primes, PrimeTable};
use crate::report::fmt_real;
use crate::sieve::{
    buchstab_terms, sieve_functions, v_of_z, BuchstabSpec, BuchstabTerms, Density, Parity,
    RosserWeightTable, Sifting, WeightedSequence,
};

pub const SCHEMA: u32 = 1;

/// Largest `x` for the prime scans.
pub const MAX_X: f64 = 1e9;

pub const MAX_WITNESSES: usize = 100;

/// Largest `(primes in the progression) * (number of k)` for the direct `R2`.
pub const MAX_DIRECT_R2_TERMS: f64 = 1e10;

/// Upper end of the partial product for the twin-prime constant.
pub const TWIN_CUTOFF: u64 = 100_000_000;

const SEGMENT: u64 = 1 << 18;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha: RealSpec,
    pub beta: RealSpec,
    pub theta: f64,
    pub x: f64,
    /// Bump half-width; `x^-theta` when absent.
    pub delta: Option<f64>,
    /// `Delta = x^rho`; `33 theta` when absent.
    pub rho: Option<f64>,
    pub omega: f64,
    pub z_exponent: f64,
    pub p1_exponent: f64,
}

impl ExperimentConfig {
    pub fn new(alpha: RealSpec, theta: f64, x: f64) -> Self {
        ExperimentConfig {
            alpha,
            beta: RealSpec::Int(0),
            theta,
            x,
            delta: None,
            rho: None,
            omega: 0.0,
            z_exponent: 1.0 / 12.0,
            p1_exponent: 1.0 / 3.1,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    /// Reads `alpha`, `beta`, `theta`, `x`, `delta`, `rho`, `omega`,
    /// `z_exponent` and `p1_exponent`; `alpha` defaults to `sqrt:2`.
    pub fn from_run_config(rc: &RunConfig) -> Result<Self> {
        let mut cfg = ExperimentConfig::new(
            rc.spec("alpha").cloned().unwrap_or(RealSpec::Sqrt(2)),
            rc.real("theta").unwrap_or(0.0),
            rc.real("x")
                .ok_or_else(|| Error::domain("experiment needs x"))?,
        );
        if let Some(b) = rc.spec("beta") {
            cfg.beta = b.clone();
        }
        cfg.delta = rc.real("delta");
        cfg.rho = rc.real("rho");
        cfg.omega = rc.real("omega").unwrap_or(0.0);
        if let Some(z) = rc.real("z_exponent") {
            cfg.z_exponent = z;
        }
        if let Some(p) = rc.real("p1_exponent") {
            cfg.p1_exponent = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.theta) {
            return Err(Error::domain(format!(
                "theta = {} outside [0, 1)",
                self.theta
            )));
        }
        if !(self.x >= 2.0 && self.x.is_finite()) {
            return Err(Error::domain(format!("x = {} below 2", self.x)));
        }
        if self.x > MAX_X {
            return Err(Error::budget(format!("x = {} exceeds {MAX_X}", self.x)));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 0.25) {
                return Err(Error::domain(format!("delta = {d} outside (0, 1/4)")));
            }
        }
        if !(self.z_exponent > 0.0 && self.z_exponent < self.p1_exponent && self.p1_exponent <= 0.5)
        {
            return Err(Error::domain("need 0 < z_exponent < p1_exponent <= 1/2"));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::domain("omega must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn rho_value(&self) -> f64 {
        self.rho.unwrap_or(33.0 * self.theta)
    }

    /// `0 < theta < 1/1296` and `(theta, rho)` in the asymptotic regime.
    pub fn theorem2_regime(&self) -> bool {
        self.theta > 0.0
            && self.theta < 1.0 / 1296.0
            && check_regime(self.theta, self.rho_value()).is_ok()
    }

    pub fn params(&self) -> Result<SieveParams> {
        if self.theorem2_regime() {
            SieveParams::new(self.x, self.theta, self.rho_value(), self.omega)
        } else {
            SieveParams::desk(self.x, self.theta, self.rho_value(), self.omega)
        }
    }

    pub fn delta_value(&self) -> Result<f64> {
        match self.delta {
            Some(d) => Ok(d),
            None => Ok(self.params()?.delta),
        }
    }

    pub fn bump(&self) -> Result<BumpSpec> {
        build_bump(self.delta_value()?, self.x)
    }

    pub fn alpha_value(&self) -> Result<FixedReal> {
        self.alpha.value()
    }

    pub fn beta_value(&self) -> Result<FixedReal> {
        self.beta.value()
    }

    fn x_int(&self) -> u64 {
        self.x.floor() as u64
    }
}

/// A prime with `p + 2 = P2` near the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub p: u64,
    pub omega_p_plus_2: u8,
    pub dist: f64,
    pub p_to_minus_theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodPrimes {
    /// Primes `p <= x` with `Omega(p + 2) <= 2` and `||alpha p^2 + beta|| < p^-theta`.
    pub count: u64,
    /// Primes `p <= x` with `Omega(p + 2) <= 2`.
    pub p2_count: u64,
    pub prime_count: u64,
    /// `sum min(1, 2 p^-theta)` over the `P2` twins.
    pub expected_count: f64,
    /// The smallest qualifying primes, at most [`MAX_WITNESSES`].
    pub witnesses: Vec<Witness>,
}

/// Calls `f` on each segment's list of `(p, Omega(p + 2))`, `p <= x`, in
/// parallel; results come back in segment order.
fn scan_twins<T, F>(x: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[(u64, u8)]) -> T + Sync + Send,
{
    if x < 2 {
        return Ok(Vec::new());
    }
    let root = ((x + 2) as f64).sqrt() as u64 + 2;
    let base: Vec<u64> = sieve_primes(root.max(2))?.primes().collect();
    Ok(par_blocks(2..x + 1, SEGMENT, |r| {
        let omega = big_omega_range(r.start, r.end + 2, &base);
        let list: Vec<(u64, u8)> = (r.start..r.end)
            .filter(|n| omega[(n - r.start) as usize] == 1)
            .map(|p| (p, omega[(p + 2 - r.start) as usize]))
            .collect();
        f(&list)
    }))
}

pub fn count_good_primes(cfg: &ExperimentConfig) -> Result<GoodPrimes> {
    cfg.validate()?;
    let alpha = cfg.alpha_value()?;
    let beta = cfg.beta_value()?;
    let theta = cfg.theta;
    let parts = scan_twins(cfg.x_int(), |list| {
        let mut count = 0u64;
        let mut p2 = 0u64;
        let mut expected = 0.0;
        let mut witnesses = Vec::new();
        for &(p, om) in list {
            if om > 2 {
                continue;
            }
            p2 += 1;
            let target = (p as f64).powf(-theta);
            expected += (2.0 * target).min(1.0);
            let dist = alpha.quadratic_phase(p, &beta).dist_nearest_int();
            if dist < target {
                count += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(Witness {
                        p,
                        omega_p_plus_2: om,
                        dist,
                        p_to_minus_theta: target,
                    });
                }
            }
        }
        (count, p2, list.len() as u64, expected, witnesses)
    })?;
    let expected: Vec<f64> = parts.iter().map(|t| t.3).collect();
    let mut out = GoodPrimes {
        count: parts.iter().map(|t| t.0).sum(),
        p2_count: parts.iter().map(|t| t.1).sum(),
        prime_count: parts.iter().map(|t| t.2).sum(),
        expected_count: pairwise_sum(&expected),
        witnesses: Vec::new(),
    };
    for (.., w) in parts {
        let room = MAX_WITNESSES - out.witnesses.len();
        out.witnesses.extend(w.into_iter().take(room));
    }
    Ok(out)
}

/// Every prime `p <= x` with `Omega(p + 2) <= 2`, as `(p, Omega(p + 2))`.
pub fn p2_twins(x: u64) -> Result<Vec<(u64, u8)>> {
    if x as f64 > MAX_X {
        return Err(Error::budget(format!("x = {x} exceeds {MAX_X}")));
    }
    let parts = scan_twins(x, |list| {
        list.iter()
            .copied()
            .filter(|&(_, om)| om <= 2)
            .collect::<Vec<_>>()
    })?;
    Ok(parts.concat())
}

/// `sum_{p <= x, p + 2 = P2} min(1, 2 p^-theta)`.
pub fn expected_count(cfg: &ExperimentConfig) -> Result<f64> {
    Ok(count_good_primes(cfg)?.expected_count)
}

/// CSV with header `p,omega_p_plus_2,dist,p_to_minus_theta`.
pub fn witnesses_csv(witnesses: &[Witness]) -> String {
    let mut out = String::from("p,omega_p_plus_2,dist,p_to_minus_theta\n");
    for w in witnesses {
        out.push_str(&format!(
            "{},{},{},{}\n",
            w.p,
            w.omega_p_plus_2,
            fmt_real(w.dist),
            fmt_real(w.p_to_minus_theta)
        ));
    }
    out
}

/// Elements `(p + 2, chi(alpha p^2 + beta))` for odd primes `p <= x - 2`.
pub fn build_sequence(cfg: &ExperimentConfig, bump: &BumpSpec) -> Result<WeightedSequence> {
    cfg.validate()?;
    let alpha = cfg.alpha_value()?;
    let beta = cfg.beta_value()?;
    let top = cfg.x_int().saturating_sub(2);
    if top < 3 {
        return WeightedSequence::new(Vec::new(), "empty");
    }
    let table = sieve_primes(top)?;
    let primes: Vec<u64> = table.primes().filter(|p| *p > 2).collect();
    let blocks = par_blocks(0..primes.len() as u64, 1 << 14, |r| {
        primes[r.start as usize..r.end as usize]
            .iter()
            .map(|&p| (p + 2, bump.eval_phase(alpha.quadratic_phase(p, &beta))))
            .collect::<Vec<_>>()
    });
    WeightedSequence::new(
        blocks.concat(),
        format!("p + 2 for odd primes p <= {top}, weight chi(alpha p^2 + beta)"),
    )
}

fn euler_phi(d: u64) -> u64 {
    factorize_trial(d)
        .iter()
        .fold(d, |acc, &(p, _)| acc / p * (p - 1))
}

/// `#{p <= y : p = a mod d}` by stepping through the progression.
fn primes_in_progression(table: &PrimeTable, y: u64, d: u64, a: i64) -> u64 {
    let start = a.rem_euclid(d as i64) as u64;
    let mut n = start;
    let mut count = 0;
    while n <= y {
        if table.is_prime(n) {
            count += 1;
        }
        n += d;
    }
    count
}

/// `R1(d) = pi(x - 2; d, -2) - Li(x) / phi(d)` for odd `d`.
pub fn remainder_r1(d: u64, x: f64) -> Result<f64> {
    if d == 0 || d % 2 == 0 {
        return Err(Error::domain(format!("R1 needs odd d, got {d}")));
    }
    if !(x >= 4.0) || x > MAX_X {
        return Err(Error::domain(format!("x = {x} outside [4, {MAX_X}]")));
    }
    let y = x.floor() as u64 - 2;
    let table = sieve_primes(y.max(2))?;
    let count = primes_in_progression(&table, y, d, -2);
    Ok(count as f64 - log_integral(x)? / euler_phi(d) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct R1Stats {
    pub x: f64,
    pub level: f64,
    /// Number of odd squarefree `d <= level`.
    pub count: u64,
    pub max: f64,
    pub mean: f64,
    pub sum: f64,
    /// `sum / (x / (log x)^A)` for `A = 1, 2, 3`.
    pub normalized: [f64; 3],
}

/// `|R1(d)|` statistics over odd squarefree `d <= level`, counting each
/// prime's `p + 2` into its divisors.
pub fn r1_stats(x: f64, level: f64) -> Result<R1Stats> {
    if !(x >= 4.0) || x > MAX_X {
        return Err(Error::domain(format!("x = {x} outside [4, {MAX_X}]")));
    }
    if !(level >= 1.0) || level > x {
        return Err(Error::domain(format!("level {level} outside [1, x]")));
    }
    let y = x.floor() as u64 - 2;
    let lvl = level.floor() as u64;
    let table = table_for(y + 2)?;
    let primes: Vec<u64> = table.primes().filter(|p| *p <= y).collect();
    let blocks = par_blocks(0..primes.len() as u64, 1 << 14, |r| {
        let mut counts = vec![0u64; lvl as usize + 1];
        for &p in &primes[r.start as usize..r.end as usize] {
            let mut divs = vec![1u64];
            for (q, _) in table.factorize(p + 2) {
                if q == 2 {
                    continue;
                }
                let len = divs.len();
                for i in 0..len {
                    let v = divs[i] * q;
                    if v <= lvl {
                        divs.push(v);
                    }
                }
            }
            for d in divs {
                counts[d as usize] += 1;
            }
        }
        counts
    });
    let mut counts = vec![0u64; lvl as usize + 1];
    for b in blocks {
        for (c, v) in counts.iter_mut().zip(b) {
            *c += v;
        }
    }
    let li = log_integral(x)?;
    let mu = mobius_table(lvl);
    let mut abs: Vec<f64> = Vec::new();
    for d in (1..=lvl).step_by(2) {
        if mu[d as usize] == 0 {
            continue;
        }
        abs.push((counts[d as usize] as f64 - li / euler_phi(d) as f64).abs());
    }
    let sum = pairwise_sum(&abs);
    let lx = x.ln();
    Ok(R1Stats {
        x,
        level,
        count: abs.len() as u64,
        max: abs.iter().copied().fold(0.0, f64::max),
        mean: sum / abs.len() as f64,
        sum,
        normalized: [
            sum / (x / lx),
            sum / (x / lx.powi(2)),
            sum / (x / lx.powi(3)),
        ],
    })
}

/// `R2(d) = sum_{0 < |k| <= K} c(k) e(beta k) sum_{p <= x - 2, p = -2 mod d} e(alpha p^2 k)`,
/// with every phase formed separately.
pub fn remainder_r2(d: u64, cfg: &ExperimentConfig, bump: &BumpSpec) -> Result<Complex64> {
    if d == 0 || d % 2 == 0 {
        return Err(Error::domain(format!("R2 needs odd d, got {d}")));
    }
    cfg.validate()?;
    let k_max = bump.k_max();
    let y = cfg.x_int().saturating_sub(2);
    if k_max == 0 || y < 2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let terms = (y as f64 / d as f64 + 1.0) * 2.0 * k_max as f64;
    if terms > MAX_DIRECT_R2_TERMS {
        return Err(Error::budget(format!(
            "{terms:.3e} direct R2 terms exceed {MAX_DIRECT_R2_TERMS:e}"
        )));
    }
    let alpha = cfg.alpha_value()?;
    let beta = cfg.beta_value()?;
    let zero = FixedReal::from_int(0);
    let table = sieve_primes(y)?;
    let start = (-2i64).rem_euclid(d as i64) as u64;
    let n_terms = if start > y { 0 } else { (y - start) / d + 1 };
    let beta_k: Vec<Complex64> = (1..=k_max).map(|k| beta.frac.mul_int(k).cis()).collect();
    Ok(crate::det::par_sum(0..n_terms, |i| {
        let p = start + i * d;
        if !table.is_prime(p) {
            return Complex64::new(0.0, 0.0);
        }
        let a: UnitFrac = alpha.quadratic_phase(p, &zero);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=k_max {
            let c = bump.coefficients[k as usize];
            let plus = a.mul_int(k).cis() * beta_k[k as usize - 1];
            acc += (plus + plus.conj()) * c;
        }
        acc
    }))
}

/// `R2(d)` through the phase-sum machinery with the singleton weight `lambda = 1_{d}`.
pub fn remainder_r2_via_w(d: u64, cfg: &ExperimentConfig, bump: &BumpSpec) -> Result<Complex64> {
    if d == 0 || d % 2 == 0 {
        return Err(Error::domain(format!("R2 needs odd d, got {d}")));
    }
    let weights = WeightTable::from_pairs([(d, 1.0)])?;
    Ok(weighted_r2_sum(cfg, &weights, bump)?.unit)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedR2 {
    /// `sum_d lambda(d) R2(d)` over primes.
    pub unit: Complex64,
    /// The same sum with each prime weighted by `log p`.
    pub log: Complex64,
    /// The same sum with `Lambda(n)`, prime powers included.
    pub mangoldt: Complex64,
    /// `|mangoldt - log|`: the prime-power contribution.
    pub prime_power_diff: f64,
    /// `|unit| / x`.
    pub ratio_to_x: f64,
    pub support_size: u64,
}

/// `sum_d lambda(d) R2(d)` for `n <= x - 2`, `n = -2 mod d`, on the three supports.
pub fn weighted_r2_sum(
    cfg: &ExperimentConfig,
    weights: &WeightTable,
    bump: &BumpSpec,
) -> Result<WeightedR2> {
    cfg.validate()?;
    let alpha = cfg.alpha_value()?;
    let beta = cfg.beta_value()?;
    let coeffs = CoefficientTable::from_bump(bump, 1.0);
    let y = cfg.x_int().saturating_sub(2);
    let table = table_for(y + 2)?;
    let eval = |support| {
        PhaseSum {
            alpha: &alpha,
            beta: &beta,
            coeffs: &coeffs,
            weights,
            b: -2,
            lo: 2,
            hi: y + 1,
            support,
        }
        .eval(&table)
    };
    let unit = eval(Support::PrimesUnit)?;
    let log = eval(Support::PrimesLog)?;
    let mangoldt = eval(Support::VonMangoldt)?;
    Ok(WeightedR2 {
        unit,
        log,
        mangoldt,
        prime_power_diff: (mangoldt - log).norm(),
        ratio_to_x: unit.norm() / cfg.x,
        support_size: weights.nonzero().count() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwinConstant {
    pub value: f64,
    /// Product over `2 < p < cutoff`.
    pub partial: f64,
    pub cutoff: u64,
    /// Bracket for the full product.
    pub lo: f64,
    pub hi: f64,
}

/// `prod_{2 < p < cutoff} (1 - 1/(p - 1)^2)`.
pub fn twin_constant_partial(cutoff: u64) -> Result<f64> {
    if cutoff <= 3 {
        return Ok(1.0);
    }
    let table = sieve_primes(cutoff - 1)?;
    let factors: Vec<f64> = table
        .primes()
        .filter(|p| *p > 2)
        .map(|p| {
            let q = (p - 1) as f64;
            (-1.0 / (q * q)).ln_1p()
        })
        .collect();
    Ok(pairwise_sum(&factors).exp())
}

/// `C0 = prod_{p > 2} (1 - 1/(p - 1)^2)` from the partial product to
/// [`TWIN_CUTOFF`], a tail `exp(-1/(P log P))` and the bracket
/// `[partial (1 - 1/(P - 2)), partial]`.
pub fn twin_constant() -> Result<TwinConstant> {
    static CACHE: OnceLock<TwinConstant> = OnceLock::new();
    if let Some(c) = CACHE.get() {
        return Ok(*c);
    }
    let partial = twin_constant_partial(TWIN_CUTOFF)?;
    let p = TWIN_CUTOFF as f64;
    let c = TwinConstant {
        value: partial * (-1.0 / (p * p.ln())).exp(),
        partial,
        cutoff: TWIN_CUTOFF,
        lo: partial * (1.0 - 1.0 / (p - 2.0)),
        hi: partial,
    };
    Ok(*CACHE.get_or_init(|| c))
}

/// The Lemma-1 family at `x` with the default `Delta` exponent.
pub fn lemma1_params(theta: f64, x: f64) -> Result<SieveParams> {
    SieveParams::lemma1(x, theta, LEMMA1_DELTA_EXPONENT)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WTrendPoint {
    pub q: u64,
    pub k_max: u64,
    pub w: Complex64,
    pub ratio: f64,
}

/// `|W(q)| / q` for each `q` with the Lemma-1 parameters at `theta`,
/// `c(k) = 1` for `0 < |k| <= K`, `lambda = 1_{1}` and `b = -2`.
pub fn w_trend(alpha: &FixedReal, theta: f64, qs: &[u64]) -> Result<Vec<WTrendPoint>> {
    let zero = FixedReal::from_int(0);
    qs.iter()
        .map(|&q| {
            let params = lemma1_params(theta, q as f64)?;
            let k = params.k_max() as i64;
            let entries = (-k..=k)
                .filter(|j| *j != 0)
                .map(|j| (j, Complex64::new(1.0, 0.0)))
                .collect();
            let coeffs = CoefficientTable::new(entries)?;
            let w = eval_w_direct(&params, &WeightTable::unit(), &coeffs, -2, alpha, &zero)?;
            Ok(WTrendPoint {
                q,
                k_max: k as u64,
                w,
                ratio: w.norm() / q as f64,
            })
        })
        .collect()
}

/// Whether each value is at most `factor` times its predecessor.
pub fn non_increasing_within(values: &[f64], factor: f64) -> bool {
    values.windows(2).all(|w| w[1] <= factor * w[0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSummary {
    pub len: u64,
    pub total_weight: f64,
    pub delta: f64,
    /// `total_weight / (delta pi(x))`.
    pub calibration_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainTerm {
    /// `X = delta Li(x)`.
    pub scale: f64,
    pub v_z: f64,
    pub s: f64,
    pub lower: f64,
    pub upper: f64,
    pub error_order: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct R2Summary {
    /// Level of the Rosser weights; `1` when `D < 2` leaves only `d = 1`.
    pub level_used: f64,
    pub values: WeightedR2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub prime_count: u64,
    pub sequence_len: u64,
    pub k_max: u64,
    pub phase_terms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub theorem2_regime: bool,
    pub params: SieveParams,
    pub direct_count: u64,
    pub p2_count: u64,
    pub expected_count: f64,
    pub witnesses: Vec<Witness>,
    pub sequence: SequenceSummary,
    pub buchstab: BuchstabTerms,
    /// `S1 - S2/2 - S3/2 - S4` from exact scans.
    pub decomposition: f64,
    /// `S1_lower - S2_upper/2 - S3_upper/2 - S4_upper`.
    pub lower_bound_estimate: f64,
    /// `S(A, x^(1/3))` by direct scan.
    pub s_cube_root: f64,
    pub decomposition_positive: bool,
    pub assembly_holds: bool,
    pub sandwich_violations: u64,
    pub main_term: MainTerm,
    pub r1_stats: R1Stats,
    pub r2: R2Summary,
    pub c0: TwinConstant,
    pub run: RunInfo,
    pub methodology: String,
}

const METHODOLOGY: &str = "A = {p + 2 : p odd prime, p <= x - 2} weighted by the bump chi(alpha p^2 + beta). \
Sieving uses odd primes only (omega(2) = 0, omega(p) = p/(p-1)). S1..S4 and S(A, x^(1/3)) are exact scans; \
their lower/upper values use Rosser weights at level x^(1/2)/m, floored at z^2. \
R2 uses c(k) e(beta k) with no extra delta factor in front of the k-sum. \
R1 uses the progression p = -2 mod d and Li(x)/phi(d). \
When the sieve level D of the parameter set is below 2, the weighted R2 sum keeps only d = 1.";

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.x < 100.0 {
        return Err(Error::domain(format!(
            "run_experiment needs x >= 100, got {}",
            cfg.x
        )));
    }
    let params = cfg.params()?;
    let delta = cfg.delta_value()?;
    let bump = build_bump(delta, cfg.x)?;
    let good = count_good_primes(cfg)?;

    let seq = build_sequence(cfg, &bump)?;
    let total_weight = seq.total_weight();
    let sequence = SequenceSummary {
        len: seq.elements.len() as u64,
        total_weight,
        delta,
        calibration_ratio: total_weight / (delta * good.prime_count as f64),
    };

    let level = cfg.x.sqrt();
    let spec = BuchstabSpec {
        x: cfg.x,
        z_exponent: cfg.z_exponent,
        y_exponent: cfg.p1_exponent,
        level,
        odd_only: true,
    };
    let buchstab = buchstab_terms(&seq, &spec)?;

    let functions = sieve_functions(20.0, 1e-3)?;
    let sifting = Sifting::odd(buchstab.z);
    let v_z = v_of_z(&sifting, Density::ShiftedPrimes)?;
    let s = level.ln() / buchstab.z.ln();
    let scale = delta * log_integral(cfg.x)?;
    let main_term = MainTerm {
        scale,
        v_z,
        s,
        lower: scale * v_z * functions.lower_at(s),
        upper: scale * v_z * functions.upper_at(s),
        error_order: level.ln().powf(-1.0 / 3.0),
    };

    let r1 = r1_stats(cfg.x, level)?;

    let (weights, level_used) = if params.level >= 2.0 {
        let z = buchstab.z.min(params.level.sqrt());
        let t = RosserWeightTable::build(params.level, Sifting::odd(z.max(2.0)), Parity::Lower)?;
        (t.to_weight_table(), params.level)
    } else {
        (WeightTable::unit(), 1.0)
    };
    let values = weighted_r2_sum(cfg, &weights, &bump)?;

    let decomposition = buchstab.decomposition();
    let lower_bound_estimate = buchstab.assembled_lower();
    let s_cube_root = buchstab.s_cube_root;
    let sandwich_violations = buchstab.violations();
    Ok(ExperimentReport {
        schema: SCHEMA,
        config: cfg.clone(),
        theorem2_regime: cfg.theorem2_regime(),
        params,
        direct_count: good.count,
        p2_count: good.p2_count,
        expected_count: good.expected_count,
        witnesses: good.witnesses,
        sequence,
        decomposition,
        lower_bound_estimate,
        s_cube_root,
        decomposition_positive: decomposition > 0.0,
        assembly_holds: lower_bound_estimate <= s_cube_root,
        sandwich_violations,
        buchstab,
        main_term,
        r1_stats: r1,
        r2: R2Summary { level_used, values },
        c0: twin_constant()?,
        run: RunInfo {
            prime_count: good.prime_count,
            sequence_len: seq.elements.len() as u64,
            k_max: bump.k_max(),
            phase_terms: seq.elements.len() as u64 * 2 * bump.k_max(),
        },
        methodology: METHODOLOGY.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twins_up_to_fifty() {
        let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.0, 50.0);
        let g = count_good_primes(&cfg).unwrap();
        assert_eq!(g.prime_count, 15);
        assert_eq!(g.p2_count, 14);
        assert_eq!(g.count, 14);
        assert_eq!(g.expected_count, 14.0);
        assert!(g.witnesses.iter().all(|w| w.p != 43));
    }

    #[test]
    fn euler_phi_small() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(15), 8);
    }

    #[test]
    fn twin_partial_small() {
        assert!((twin_constant_partial(4).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn csv_header() {
        assert_eq!(
            witnesses_csv(&[]),
            "p,omega_p_plus_2,dist,p_to_minus_theta\n"
        );
    }
}
