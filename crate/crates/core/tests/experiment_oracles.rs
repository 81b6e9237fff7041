use num_complex::Complex64;
use proptest::prelude::*;

use twinphase::arith::log_integral;
use twinphase::bump::{build_bump, BumpSpec};
use twinphase::config::RealSpec;
use twinphase::experiment::{
    build_sequence, count_good_primes, expected_count, lemma1_params, r1_stats, remainder_r1,
    remainder_r2, remainder_r2_via_w, run_experiment, twin_constant, twin_constant_partial,
    weighted_r2_sum, witnesses_csv, ExperimentConfig, ExperimentReport, MAX_WITNESSES,
};
use twinphase::expsum::WeightTable;
use twinphase::primes::factorize_trial;
use twinphase::FixedReal;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn omega_big(n: u64) -> u32 {
    factorize_trial(n).iter().map(|&(_, e)| e).sum()
}

fn frac_dist(alpha: &FixedReal, p: u64) -> f64 {
    alpha
        .quadratic_phase(p, &FixedReal::from_int(0))
        .dist_nearest_int()
}

#[test]
fn fifty_has_fourteen_twins() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.0, 50.0);
    let g = count_good_primes(&cfg).unwrap();
    assert_eq!(g.count, 14);
    let primes: Vec<u64> = (2..=50).filter(|n| is_prime(*n)).collect();
    let want: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|p| omega_big(p + 2) <= 2)
        .collect();
    assert_eq!(want.len(), 14);
    assert_eq!(g.witnesses.iter().map(|w| w.p).collect::<Vec<_>>(), want);
}

#[test]
fn expected_count_at_fifty() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, 50.0);
    let want: f64 = (2..=50u64)
        .filter(|p| is_prime(*p) && omega_big(p + 2) <= 2)
        .map(|p| (2.0 * (p as f64).powf(-0.3)).min(1.0))
        .sum();
    assert!((expected_count(&cfg).unwrap() - want).abs() < 1e-12);
    let at_zero = ExperimentConfig::new(RealSpec::Sqrt(2), 0.0, 50.0);
    assert_eq!(expected_count(&at_zero).unwrap(), 14.0);
}

#[test]
fn good_primes_match_brute_force_scan() {
    let x = 200_000u64;
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, x as f64);
    let g = count_good_primes(&cfg).unwrap();
    let alpha = FixedReal::from_sqrt(2);
    let mut count = 0;
    let mut first = Vec::new();
    for p in (2..=x).filter(|n| is_prime(*n)) {
        if omega_big(p + 2) <= 2 && frac_dist(&alpha, p) < (p as f64).powf(-0.3) {
            count += 1;
            if first.len() < MAX_WITNESSES {
                first.push(p);
            }
        }
    }
    assert!(count > 0);
    assert_eq!(g.count, count);
    assert_eq!(g.witnesses.iter().map(|w| w.p).collect::<Vec<_>>(), first);
    let csv = witnesses_csv(&g.witnesses);
    assert_eq!(csv.lines().count(), first.len() + 1);
}

#[test]
fn x_budget_guard() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, 2e9);
    assert!(count_good_primes(&cfg).unwrap_err().is_budget());
}

#[test]
fn sequence_weights_follow_the_bump() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, 1e5).with_delta(0.05);
    let bump = cfg.bump().unwrap();
    let seq = build_sequence(&cfg, &bump).unwrap();
    let alpha = FixedReal::from_sqrt(2);
    for &(n, f) in &seq.elements {
        assert!((0.0..1.0).contains(&f));
        if frac_dist(&alpha, n - 2) >= 0.05 {
            assert_eq!(f, 0.0);
        }
    }
    assert_eq!(
        seq.elements.len() as u64,
        (3..=99_998).filter(|n| is_prime(*n)).count() as u64
    );
}

#[test]
fn r1_small_cases() {
    let li = log_integral(100.0).unwrap();
    let count = (2..=98u64).filter(|p| is_prime(*p) && p % 3 == 1).count() as f64;
    assert!((remainder_r1(3, 100.0).unwrap() - (count - li / 2.0)).abs() < 1e-12);
    let pi = (2..=98u64).filter(|p| is_prime(*p)).count() as f64;
    assert!((remainder_r1(1, 100.0).unwrap() - (pi - li)).abs() < 1e-12);
    assert!(remainder_r1(4, 100.0).is_err());
}

#[test]
fn r1_batch_matches_single_calls() {
    let x = 20_000.0;
    let stats = r1_stats(x, 60.0).unwrap();
    let mut abs = Vec::new();
    for d in (1..=60u64).step_by(2) {
        if factorize_trial(d).iter().any(|&(_, e)| e > 1) {
            continue;
        }
        abs.push(remainder_r1(d, x).unwrap().abs());
    }
    assert_eq!(stats.count, abs.len() as u64);
    let sum: f64 = abs.iter().sum();
    assert!((stats.sum - sum).abs() < 1e-9 * sum);
    assert!((stats.max - abs.iter().copied().fold(0.0, f64::max)).abs() < 1e-9);
}

fn naive_r2(
    d: u64,
    x: u64,
    alpha: &FixedReal,
    beta_num: u64,
    beta_den: u64,
    bump: &BumpSpec,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in (2..=x - 2).filter(|n| is_prime(*n) && (n + 2) % d == 0) {
        // alpha p^2 in f64 from the exact phase, beta as a float.
        let a = alpha.quadratic_phase(p, &FixedReal::from_int(0)).to_f64();
        let b = beta_num as f64 / beta_den as f64;
        for k in 1..=bump.k_max() as i64 {
            for s in [-1i64, 1] {
                let k = s * k;
                let ph = 2.0
                    * std::f64::consts::PI
                    * ((a * k as f64).rem_euclid(1.0) + (b * k as f64).rem_euclid(1.0));
                acc += Complex64::from_polar(bump.coefficients[k.unsigned_abs() as usize], ph);
            }
        }
    }
    acc
}

#[test]
fn r2_matches_naive_double_loop() {
    let mut cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, 1e4).with_delta(0.05);
    let bump = BumpSpec::with_order(0.05, 10, 10.0).unwrap();
    let alpha = FixedReal::from_sqrt(2);
    let got = remainder_r2(1, &cfg, &bump).unwrap();
    let want = naive_r2(1, 10_000, &alpha, 0, 1, &bump);
    assert!((got - want).norm() < 1e-8, "{got} vs {want}");

    cfg.beta = RealSpec::parse("fixed:1/1").unwrap();
    let got = remainder_r2(3, &cfg, &bump).unwrap();
    let want = naive_r2(3, 10_000, &alpha, 1, 2, &bump);
    assert!((got - want).norm() < 1e-8, "{got} vs {want}");

    let empty = BumpSpec::with_order(0.05, 10, 0.5).unwrap();
    assert_eq!(
        remainder_r2(1, &cfg, &empty).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    assert!(remainder_r2(2, &cfg, &bump).is_err());
}

#[test]
fn r2_two_routes_agree() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(3), 0.3, 3e4).with_delta(0.05);
    let bump = cfg.bump().unwrap();
    let n_primes = (2..=29_998u64).filter(|n| is_prime(*n)).count() as f64;
    for d in [1u64, 3, 5, 15, 21] {
        let a = remainder_r2(d, &cfg, &bump).unwrap();
        let b = remainder_r2_via_w(d, &cfg, &bump).unwrap();
        assert!(
            (a - b).norm() <= 1e-6 * a.norm().max(1.0),
            "d={d}: {a} vs {b}"
        );
        let trivial = bump.coefficients[1..]
            .iter()
            .map(|c| 2.0 * c.abs())
            .sum::<f64>()
            * n_primes;
        assert!(a.norm() <= trivial);
    }
}

#[test]
fn weighted_r2_matches_per_d_sum() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, 1e4).with_delta(0.1);
    let bump = cfg.bump().unwrap();
    let pairs = [(1u64, 1.0), (3, -1.0), (5, -1.0), (15, 1.0), (7, -1.0)];
    let weights = WeightTable::from_pairs(pairs).unwrap();
    let got = weighted_r2_sum(&cfg, &weights, &bump).unwrap();
    let mut want = Complex64::new(0.0, 0.0);
    for (d, w) in pairs {
        want += remainder_r2(d, &cfg, &bump).unwrap() * w;
    }
    assert!(
        (got.unit - want).norm() <= 1e-6 * want.norm().max(1.0),
        "{} vs {want}",
        got.unit
    );
    assert!(got.prime_power_diff >= 0.0);

    let zero = WeightTable::from_pairs([(1u64, 0.0)]).unwrap();
    assert_eq!(
        weighted_r2_sum(&cfg, &zero, &bump).unwrap().unit,
        Complex64::new(0.0, 0.0)
    );
}

#[test]
fn twin_constant_values() {
    assert!((twin_constant_partial(4).unwrap() - 0.75).abs() < 1e-15);
    let want: f64 = (3..100u64)
        .filter(|p| is_prime(*p))
        .map(|p| 1.0 - 1.0 / ((p - 1) as f64).powi(2))
        .product();
    assert!((twin_constant_partial(100).unwrap() - want).abs() < 1e-14);
    let c = twin_constant().unwrap();
    assert!(c.value > 0.66016 && c.value < 0.66017, "{c:?}");
    assert!(c.lo <= c.value && c.value <= c.hi);
    assert!(c.hi - c.lo < 1e-6);
}

#[test]
fn lemma1_params_range() {
    let p = lemma1_params(0.004, 33461.0).unwrap();
    assert!(p.regime_checked);
    assert!(lemma1_params(0.006, 33461.0).is_err());
}

#[test]
fn degenerate_run_completes() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, 1e3).with_delta(0.05);
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.schema, 1);
    assert_eq!(r.sandwich_violations, 0);
    // With z < 2 nothing is sifted, so the assembled bound equals the exact
    // decomposition and exceeds S(A, x^(1/3)); the gap sits inside O(x^(11/12)).
    assert_eq!(r.lower_bound_estimate, r.decomposition);
    assert!(!r.assembly_holds);
    assert!(r.lower_bound_estimate - r.s_cube_root <= 1e3f64.powf(11.0 / 12.0));
    assert!(!r.theorem2_regime);
    assert!(r.c0.value > 0.66 && r.c0.value < 0.661);
    let json = r.to_json().unwrap();
    let back = ExperimentReport::from_json(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json().unwrap(), json);
}

#[test]
fn theorem2_flag() {
    let mut cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.0005, 1e6);
    assert!(cfg.theorem2_regime());
    cfg.theta = 0.3;
    assert!(!cfg.theorem2_regime());
    cfg.theta = 0.0005;
    cfg.rho = Some(0.0);
    assert!(!cfg.theorem2_regime());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn count_monotone_in_theta(t1 in 0.0f64..0.9, t2 in 0.0f64..0.9, d in 2u64..40) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let alpha = RealSpec::Sqrt(d);
        let a = count_good_primes(&ExperimentConfig::new(alpha.clone(), lo, 20_000.0)).unwrap();
        let b = count_good_primes(&ExperimentConfig::new(alpha, hi, 20_000.0)).unwrap();
        prop_assert!(a.count >= b.count);
        prop_assert!(a.expected_count >= b.expected_count);
    }
}

#[test]
fn bump_for_default_delta() {
    let cfg = ExperimentConfig::new(RealSpec::Sqrt(2), 0.3, 1e6);
    let b = cfg.bump().unwrap();
    assert!((b.delta - 1e6f64.powf(-0.3)).abs() < 1e-15);
    assert!(build_bump(0.3, 1e6).is_err());
}
