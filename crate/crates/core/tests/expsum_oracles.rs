use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twinphase::expsum::{
    coefficient_sum, eval_g, eval_lemma5_sum, eval_progression_sum, lemma3_check,
    vaughan_decompose, CoefficientTable, PhaseSum, SieveParams, Support, WeightTable,
};
use twinphase::primes::{factorize_trial, von_mangoldt, PrimeTable};
use twinphase::{FixedReal, UnitFrac};

fn norm(t: UnitFrac) -> f64 {
    t.dist_nearest_int()
}

fn tau_brute(n: u64, k: u32) -> f64 {
    // Ordered k-fold factorisations by recursion on the first factor.
    if k == 1 {
        return 1.0;
    }
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| tau_brute(n / d, k - 1))
        .sum()
}

fn dyadic(m: u64) -> std::ops::Range<u64> {
    m.div_ceil(2).max(1)..m
}

#[test]
fn progression_sums_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alpha = FixedReal::from_sqrt(3);
    for _ in 0..300 {
        let x = rng.gen_range(1..3000u64);
        let d = rng.gen_range(1..50u64);
        let a = rng.gen_range(0..d);
        let brute: Complex64 = (1..=x)
            .filter(|n| n % d == a)
            .map(|n| alpha.frac_mul_u64(n).cis())
            .sum();
        let s = eval_progression_sum(&alpha, x, d, a).unwrap();
        assert!((s - brute).norm() < 1e-9, "x={x} d={d} a={a}");
    }
}

#[test]
fn lemma3_holds_for_rational_and_irrational_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let alphas = [
        FixedReal::from_sqrt(2),
        FixedReal::from_ratio(1, 3),
        FixedReal::from_ratio(22, 7),
    ];
    for alpha in &alphas {
        for _ in 0..20_000 {
            let x = rng.gen_range(1..1_000_000u64);
            let d = rng.gen_range(1..10_000u64);
            let a = rng.gen_range(0..d);
            let c = lemma3_check(alpha, x, d, a).unwrap();
            assert!(c.pass, "x={x} d={d} a={a}: {c:?}");
        }
    }
}

#[test]
fn lemma5_at_64_by_64() {
    let alpha = FixedReal::from_sqrt(2);
    let x = 1e7;
    let got = eval_lemma5_sum(&alpha, 64, 64, x, 2, 3).unwrap();
    let mut want = 0.0;
    let mut trivial = 0.0;
    for m in dyadic(64) {
        for j in dyadic(64) {
            let w = tau_brute(m, 2) * tau_brute(j, 3);
            let n = m * m * j;
            let a = x / n as f64;
            want += w * a.min(1.0 / norm(alpha.frac_mul_u64(n)));
            trivial += w * a;
        }
    }
    assert!(
        (got.value - want).abs() <= 1e-9 * want,
        "{} vs {want}",
        got.value
    );
    assert!((got.trivial - trivial).abs() <= 1e-9 * trivial);
    assert!(got.value <= got.trivial);
}

#[test]
fn g_sum_at_eight_cubed() {
    let alpha = FixedReal::from_sqrt(2);
    let x = 1e7;
    let got = eval_g(&alpha, 8, 8, 8, x, 2, 2, 2, 12).unwrap();
    let mut want = 0.0;
    for m in dyadic(8) {
        for s in dyadic(8) {
            for j in dyadic(8) {
                let n = m * m * m * s * s * j;
                let w = tau_brute(m, 2) * tau_brute(s, 2) * tau_brute(j, 2);
                want += w * (x / n as f64).min(1.0 / norm(alpha.frac_mul_u64(n)));
            }
        }
    }
    assert!((got.value - want).abs() <= 1e-9 * want);
    assert!(got.rhs9 > 0.0 && got.rhs10 > 0.0);
    assert!(eval_g(&alpha, 8, 8, 8, 1e5, 2, 2, 2, 12).is_err());
}

#[test]
fn weighted_phase_sum_matches_triple_loop() {
    let alpha = FixedReal::from_sqrt(2);
    let beta = FixedReal::from_ratio(1, 7);
    let weights =
        WeightTable::from_pairs([(1, 1.0), (3, -1.0), (5, -1.0), (15, 1.0), (7, 0.5)]).unwrap();
    let coeffs = CoefficientTable::new(vec![
        (1, Complex64::new(0.5, 0.25)),
        (-2, Complex64::new(-0.3, 0.0)),
        (3, Complex64::new(0.0, 1.0)),
    ])
    .unwrap();
    let (lo, hi) = (5_000u64, 10_000u64);
    let b = -2i64;
    let table = PrimeTable::new(hi + 2, true).unwrap();
    for support in [
        Support::VonMangoldt,
        Support::PrimesUnit,
        Support::PrimesLog,
    ] {
        let sum = PhaseSum {
            alpha: &alpha,
            beta: &beta,
            coeffs: &coeffs,
            weights: &weights,
            b,
            lo,
            hi,
            support,
        };
        let got = sum.eval(&table).unwrap();
        let mut want = Complex64::new(0.0, 0.0);
        for (d, lam) in weights.nonzero() {
            for &(k, c) in &coeffs.entries {
                for n in lo..hi {
                    if (n as i64 - b) % d as i64 != 0 {
                        continue;
                    }
                    let w = match support {
                        Support::VonMangoldt => von_mangoldt(n),
                        Support::PrimesUnit => {
                            f64::from(u8::from(factorize_trial(n) == vec![(n, 1)]))
                        }
                        Support::PrimesLog => {
                            if factorize_trial(n) == vec![(n, 1)] {
                                (n as f64).ln()
                            } else {
                                0.0
                            }
                        }
                    };
                    if w == 0.0 {
                        continue;
                    }
                    let t = alpha.quadratic_phase(n, &beta);
                    let ph = t.mul_int(k.unsigned_abs());
                    let ph = if k < 0 { ph.wrapping_neg() } else { ph };
                    want += c * ph.cis() * (w * lam);
                }
            }
        }
        assert!(
            (got - want).norm() <= 1e-9 * want.norm().max(1.0),
            "{support:?}: {got} vs {want}"
        );
        assert!(got.norm() <= sum.trivial_bound(&table) + 1e-9);
    }
}

#[test]
fn vaughan_identity_at_three_scales() {
    let alpha = FixedReal::from_sqrt(2);
    for x in [1e3f64, 1e4, 1e5] {
        let u = x.cbrt();
        let dec = vaughan_decompose(x, u, u).unwrap();
        let one = |_: u64| 1.0;
        let (a, b) = (dec.evaluate(one), dec.direct(one));
        assert!((a - b).abs() <= 1e-9 * b, "x={x}: {a} vs {b}");
        let g = |n: u64| {
            alpha
                .quadratic_phase(n, &FixedReal::from_int(0))
                .mul_int(3)
                .cis()
        };
        let (a, b): (Complex64, Complex64) = (dec.evaluate(g), dec.direct(g));
        assert!(
            (a - b).norm() <= 1e-9 * b.norm().max(1.0),
            "x={x}: {a} vs {b}"
        );
    }
}

#[test]
fn vaughan_coefficients_bounded_to_ten_thousand() {
    let dec = vaughan_decompose(1e6, 100.0, 100.0).unwrap();
    let max_m = dec.components.iter().map(|c| c.m_hi - 1).max().unwrap();
    assert!(max_m >= 9_000);
    assert_eq!(dec.coefficient_bound_violations(), 0);
}

#[test]
fn bump_coefficients_reconstruct_the_bump() {
    let bump = twinphase::bump::build_bump(0.05, 1e4).unwrap();
    let coeffs = CoefficientTable::from_bump(&bump, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let t = UnitFrac::from_f64(rng.gen::<f64>());
        let series = bump.delta + coefficient_sum(&coeffs, t).re;
        let direct = bump.eval_phase(t);
        assert!(
            (series - direct).abs() <= bump.tail_bound() + 1e-9,
            "{series} vs {direct}"
        );
    }
}

#[test]
fn desk_params_shapes() {
    let p = SieveParams::desk(1e6, 0.3, 0.0, 0.0).unwrap();
    assert!((p.delta - 1e6f64.powf(-0.3)).abs() < 1e-15);
    assert!((p.k_cutoff - 1e6f64.ln().powi(2) / p.delta).abs() < 1e-6);
    assert!(SieveParams::new(1e6, 0.3, 0.0, 0.0).is_err());
}
