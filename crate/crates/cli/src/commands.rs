//! One runner per subcommand. Each returns the JSON document and the CSV
//! text for the requested format.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use twinphase::bump::build_bump;
use twinphase::config::{Format, RealSpec, RunConfig};
use twinphase::diophantine::{convergents, satisfies_dirichlet};
use twinphase::experiment::{
    non_increasing_within, p2_twins, run_experiment, w_trend, witnesses_csv, ExperimentConfig,
};
use twinphase::expsum::{
    eval_g, eval_lemma4_sum, eval_lemma5_sum, lemma1_level_threshold, lemma3_check,
    vaughan_decompose, SieveParams, LEMMA1_DELTA_EXPONENT,
};
use twinphase::primes::sieve_primes;
use twinphase::report::fmt_real;
use twinphase::sieve::{
    rosser_weights, sieve_bounds, sieve_functions, Density, Parity, Sifting, WeightedSequence,
};
use twinphase::{Error, FixedReal, Result};

pub struct Output {
    pub json: String,
    pub csv: String,
}

impl Output {
    fn new<T: Serialize>(doc: &T, csv: String) -> Result<Output> {
        let mut json = serde_json::to_string_pretty(doc)?;
        json.push('\n');
        Ok(Output { json, csv })
    }
}

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    /// `(flag, help)`; the config key is the flag with `-` replaced by `_`.
    pub params: &'static [(&'static str, &'static str)],
    pub run: fn(&RunConfig) -> Result<Output>,
}

const ALPHA: (&str, &str) = (
    "alpha",
    "sqrt:<d>, fixed:<hex>/<F> or an integer (default sqrt:2)",
);
const BETA: (&str, &str) = ("beta", "Shift, same syntax as alpha (default 0)");

pub const COMMANDS: [CommandSpec; 12] = [
    CommandSpec {
        name: "convergents",
        about: "Continued-fraction convergents a/q of alpha",
        params: &[ALPHA, ("count", "Number of convergents (default 10)")],
        run: run_convergents,
    },
    CommandSpec {
        name: "primes",
        about: "Primes up to a limit",
        params: &[("limit", "Upper bound")],
        run: run_primes,
    },
    CommandSpec {
        name: "classify",
        about: "Primes p <= limit with Omega(p + 2) <= 2 and their distance ||alpha p^2 + beta||",
        params: &[("limit", "Upper bound for p"), ALPHA, BETA, ("theta", "Marks p with ||alpha p^2 + beta|| < p^-theta (default 0)")],
        run: run_classify,
    },
    CommandSpec {
        name: "bump",
        about: "Bump function parameters and Fourier coefficients",
        params: &[("delta", "Half-width of the support"), ("x", "Scale setting the smoothing order and cutoff")],
        run: run_bump,
    },
    CommandSpec {
        name: "expsum",
        about: "Progression sum over n <= x, n = a mod d, against min(x/d + 1, 1/(2||alpha d||))",
        params: &[
            ALPHA,
            ("x", "Length"),
            ("d", "Modulus (default 1)"),
            ("a", "Residue (default 0)"),
            ("count", "Check this many seeded random instances with x, d up to the given values"),
        ],
        run: run_expsum,
    },
    CommandSpec {
        name: "vaughan-check",
        about: "Vaughan decomposition of sum Lambda(n) e(k alpha n^2) against the direct sum",
        params: &[
            ALPHA,
            ("x", "Upper end"),
            ("u", "U (default x^(1/3))"),
            ("v", "V (default x^(1/3))"),
            ("k", "Frequency; 0 means g = 1 (default 1)"),
        ],
        run: run_vaughan,
    },
    CommandSpec {
        name: "lemma-bounds",
        about: "Min-sums: sum_n min(xy/n, 1/||alpha n||) with --y --q, the divisor-weighted sum with --m --j, G with --m --s --j --q",
        params: &[
            ALPHA,
            ("x", "Scale x"),
            ("y", "Y for the two-variable min-sum"),
            ("q", "Denominator q"),
            ("m", "M"),
            ("s", "S"),
            ("j", "J"),
            ("mu", "Divisor order for m (default 2)"),
            ("sigma", "Divisor order for s (default 2)"),
            ("zeta", "Divisor order for j (default 2)"),
        ],
        run: run_lemma_bounds,
    },
    CommandSpec {
        name: "rosser",
        about: "Rosser weights at level D and sifting limit z",
        params: &[("level", "Level D"), ("z", "Sifting limit"), ("parity", "upper, lower or both (default both)")],
        run: run_rosser,
    },
    CommandSpec {
        name: "sieve-functions",
        about: "Linear-sieve functions F and f on a grid",
        params: &[("s-max", "Largest s (default 10)"), ("step", "Grid step (default 0.001)")],
        run: run_sieve_functions,
    },
    CommandSpec {
        name: "sieve-bounds",
        about: "Rosser bounds and the exact count for the integers n <= x free of primes below z",
        params: &[("x", "Largest integer"), ("z", "Sifting limit"), ("level", "Level D (default z^2)")],
        run: run_sieve_bounds,
    },
    CommandSpec {
        name: "experiment",
        about: "Full sieve experiment for primes p with p + 2 = P2 near alpha p^2 + beta",
        params: &[
            ALPHA,
            BETA,
            ("theta", "Target exponent (default 0)"),
            ("x", "Range p <= x"),
            ("delta", "Bump half-width (default x^-theta)"),
            ("rho", "Delta = x^rho (default 33 theta)"),
            ("omega", "Margin omega (default 0)"),
            ("z-exponent", "z = x^e (default 1/12)"),
            ("p1-exponent", "Split point x^e for p1 (default 1/3.1)"),
        ],
        run: run_experiment_cmd,
    },
    CommandSpec {
        name: "lemma1-scan",
        about: "|W(q)|/q over convergent denominators q of alpha, with x = q and Delta = K^(32 + 34/33)",
        params: &[ALPHA, ("theta", "Exponent theta (default 0.004)"), ("limit", "Largest q (default 40000)")],
        run: run_lemma1_scan,
    },
];

fn missing(key: &str) -> Error {
    Error::Domain(format!("missing parameter --{}", key.replace('_', "-")))
}

fn real(rc: &RunConfig, key: &str) -> Result<f64> {
    rc.real(key).ok_or_else(|| missing(key))
}

fn uint_or(rc: &RunConfig, key: &str, default: u64) -> Result<u64> {
    match rc.int(key) {
        Some(v) => {
            u64::try_from(v).map_err(|_| Error::Range(format!("{key} = {v} exceeds 64 bits")))
        }
        None => Ok(default),
    }
}

fn uint(rc: &RunConfig, key: &str) -> Result<u64> {
    if rc.int(key).is_none() {
        return Err(missing(key));
    }
    uint_or(rc, key, 0)
}

fn small(rc: &RunConfig, key: &str, default: u32) -> Result<u32> {
    let v = uint_or(rc, key, default as u64)?;
    u32::try_from(v).map_err(|_| Error::Range(format!("{key} = {v} too large")))
}

fn alpha_spec(rc: &RunConfig) -> RealSpec {
    rc.spec("alpha").cloned().unwrap_or(RealSpec::Sqrt(2))
}

fn beta_spec(rc: &RunConfig) -> RealSpec {
    rc.spec("beta").cloned().unwrap_or(RealSpec::Int(0))
}

fn csv_wanted(rc: &RunConfig) -> bool {
    rc.format == Some(Format::Csv)
}

/// Integer-valued real parameter such as `x` for sums over `n <= x`.
fn floor_uint(rc: &RunConfig, key: &str) -> Result<u64> {
    let v = real(rc, key)?;
    if !(v >= 1.0) || v >= u64::MAX as f64 {
        return Err(Error::Domain(format!("{key} = {v} must be at least 1")));
    }
    Ok(v.floor() as u64)
}

#[derive(Serialize)]
struct ConvergentRow {
    n: usize,
    a: i128,
    q: u128,
    dirichlet: bool,
}

fn run_convergents(rc: &RunConfig) -> Result<Output> {
    let spec = alpha_spec(rc);
    let alpha = spec.value()?;
    let count = uint_or(rc, "count", 10)? as usize;
    let cs = convergents(&alpha, count)?;
    let rows: Vec<ConvergentRow> = cs
        .items
        .iter()
        .enumerate()
        .map(|(n, c)| ConvergentRow {
            n,
            a: c.a,
            q: c.q,
            dirichlet: satisfies_dirichlet(&alpha, c),
        })
        .collect();
    let mut csv = String::from("n,a,q\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{}\n", r.n, r.a, r.q));
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        alpha: String,
        truncated: bool,
        convergents: &'a [ConvergentRow],
    }
    Output::new(
        &Doc {
            alpha: spec.to_string(),
            truncated: cs.truncated,
            convergents: &rows,
        },
        csv,
    )
}

/// Largest limit whose primes are listed one per CSV row.
const MAX_LISTED: u64 = 100_000_000;

fn run_primes(rc: &RunConfig) -> Result<Output> {
    let limit = uint(rc, "limit")?;
    if csv_wanted(rc) && limit > MAX_LISTED {
        return Err(Error::Budget(format!(
            "listing primes up to {limit} exceeds {MAX_LISTED}"
        )));
    }
    let table = sieve_primes(limit)?;
    let mut csv = String::new();
    if csv_wanted(rc) {
        csv.push_str("p\n");
        for p in table.primes() {
            csv.push_str(&format!("{p}\n"));
        }
    }
    #[derive(Serialize)]
    struct Doc {
        limit: u64,
        prime_pi: u64,
        largest: Option<u64>,
    }
    let largest = table.primes().last();
    Output::new(
        &Doc {
            limit,
            prime_pi: table.prime_pi(limit),
            largest,
        },
        csv,
    )
}

#[derive(Serialize)]
struct ClassifyRow {
    p: u64,
    omega_p_plus_2: u8,
    dist: f64,
    good: bool,
}

fn run_classify(rc: &RunConfig) -> Result<Output> {
    let limit = uint(rc, "limit")?;
    let alpha = alpha_spec(rc).value()?;
    let beta = beta_spec(rc).value()?;
    let theta = rc.real("theta").unwrap_or(0.0);
    let rows: Vec<ClassifyRow> = p2_twins(limit)?
        .into_iter()
        .map(|(p, om)| {
            let dist = alpha.quadratic_phase(p, &beta).dist_nearest_int();
            ClassifyRow {
                p,
                omega_p_plus_2: om,
                dist,
                good: dist < (p as f64).powf(-theta),
            }
        })
        .collect();
    let mut csv = String::from("p,omega_p_plus_2,dist,good\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.p,
            r.omega_p_plus_2,
            fmt_real(r.dist),
            u8::from(r.good)
        ));
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        limit: u64,
        theta: f64,
        count: usize,
        good_count: usize,
        rows: &'a [ClassifyRow],
    }
    Output::new(
        &Doc {
            limit,
            theta,
            count: rows.len(),
            good_count: rows.iter().filter(|r| r.good).count(),
            rows: &rows,
        },
        csv,
    )
}

fn run_bump(rc: &RunConfig) -> Result<Output> {
    let bump = build_bump(real(rc, "delta")?, real(rc, "x")?)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        delta: f64,
        r: u32,
        h_scale: f64,
        delta2: f64,
        w: f64,
        k_cutoff: f64,
        k_max: u64,
        tail_bound: f64,
        plateau_half_width: f64,
        coefficients: &'a [f64],
    }
    let csv = if csv_wanted(rc) {
        bump.to_csv()
    } else {
        String::new()
    };
    Output::new(
        &Doc {
            delta: bump.delta,
            r: bump.r,
            h_scale: bump.h_scale,
            delta2: bump.delta2,
            w: bump.w,
            k_cutoff: bump.k_cutoff,
            k_max: bump.k_max(),
            tail_bound: bump.tail_bound(),
            plateau_half_width: bump.plateau_half_width(),
            coefficients: &bump.coefficients,
        },
        csv,
    )
}

#[derive(Serialize)]
struct ProgressionRow {
    x: u64,
    d: u64,
    a: u64,
    abs_sum: f64,
    bound: f64,
    pass: bool,
    resonant: bool,
}

fn progression_row(alpha: &FixedReal, x: u64, d: u64, a: u64) -> Result<ProgressionRow> {
    let c = lemma3_check(alpha, x, d, a)?;
    Ok(ProgressionRow {
        x,
        d,
        a,
        abs_sum: c.abs_sum,
        bound: c.bound,
        pass: c.pass,
        resonant: c.resonant,
    })
}

fn run_expsum(rc: &RunConfig) -> Result<Output> {
    let alpha = alpha_spec(rc).value()?;
    let x = floor_uint(rc, "x")?;
    let d = uint_or(rc, "d", 1)?;
    let a = uint_or(rc, "a", 0)?;
    if d == 0 || a >= d {
        return Err(Error::Domain(format!(
            "need d >= 1 and 0 <= a < d (d = {d}, a = {a})"
        )));
    }
    let rows = match rc.int("count") {
        None => vec![progression_row(&alpha, x, d, a)?],
        Some(_) => {
            let count = uint(rc, "count")?;
            if count > 10_000_000 {
                return Err(Error::Budget(format!("count = {count} exceeds 1e7")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(rc.seed.unwrap_or(0));
            (0..count)
                .map(|_| {
                    let xi = rng.gen_range(1..=x);
                    let di = rng.gen_range(1..=d);
                    let ai = rng.gen_range(0..di);
                    progression_row(&alpha, xi, di, ai)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let mut csv = String::from("x,d,a,abs_sum,bound,pass\n");
    if csv_wanted(rc) {
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.x,
                r.d,
                r.a,
                fmt_real(r.abs_sum),
                fmt_real(r.bound),
                u8::from(r.pass)
            ));
        }
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        instances: usize,
        violations: usize,
        max_ratio: f64,
        rows: &'a [ProgressionRow],
    }
    let max_ratio = rows.iter().map(|r| r.abs_sum / r.bound).fold(0.0, f64::max);
    let shown = if rows.len() == 1 {
        &rows[..]
    } else {
        &rows[..0]
    };
    Output::new(
        &Doc {
            instances: rows.len(),
            violations: rows.iter().filter(|r| !r.pass).count(),
            max_ratio,
            rows: shown,
        },
        csv,
    )
}

fn run_vaughan(rc: &RunConfig) -> Result<Output> {
    let alpha = alpha_spec(rc).value()?;
    let x = real(rc, "x")?;
    let u = rc.real("u").unwrap_or(x.cbrt());
    let v = rc.real("v").unwrap_or(x.cbrt());
    let k = rc.int("k").unwrap_or(1);
    let k = u64::try_from(k.unsigned_abs()).map_err(|_| Error::Range(format!("k = {k}")))?;
    let dec = vaughan_decompose(x, u, v)?;
    let zero = FixedReal::from_int(0);
    let g = |n: u64| {
        if k == 0 {
            num_complex::Complex64::new(1.0, 0.0)
        } else {
            alpha.quadratic_phase(n, &zero).mul_int(k).cis()
        }
    };
    let a: num_complex::Complex64 = dec.evaluate(g);
    let b: num_complex::Complex64 = dec.direct(g);
    let rel_err = (a - b).norm() / b.norm().max(1.0);
    #[derive(Serialize)]
    struct Doc {
        x: f64,
        u: f64,
        v: f64,
        k: u64,
        decomposed: [f64; 2],
        direct: [f64; 2],
        rel_err: f64,
        components: usize,
        coefficient_bound_violations: usize,
    }
    let doc = Doc {
        x,
        u,
        v,
        k,
        decomposed: [a.re, a.im],
        direct: [b.re, b.im],
        rel_err,
        components: dec.components.len(),
        coefficient_bound_violations: dec.coefficient_bound_violations(),
    };
    let csv = format!(
        "x,u,v,k,decomposed_re,decomposed_im,direct_re,direct_im,rel_err\n{},{},{},{k},{},{},{},{},{}\n",
        fmt_real(x),
        fmt_real(u),
        fmt_real(v),
        fmt_real(a.re),
        fmt_real(a.im),
        fmt_real(b.re),
        fmt_real(b.im),
        fmt_real(rel_err)
    );
    Output::new(&doc, csv)
}

#[derive(Serialize)]
struct BoundRow {
    sum: &'static str,
    value: f64,
    rhs: f64,
    ratio: f64,
}

fn run_lemma_bounds(rc: &RunConfig) -> Result<Output> {
    let alpha = alpha_spec(rc).value()?;
    let x = real(rc, "x")?;
    let q = || -> Result<u128> { Ok(uint(rc, "q")? as u128) };
    let mut rows = Vec::new();
    if let Some(y) = rc.real("y") {
        let r = eval_lemma4_sum(&alpha, x, y, q()?)?;
        rows.push(BoundRow {
            sum: "lemma4",
            value: r.value,
            rhs: r.rhs,
            ratio: r.ratio,
        });
    }
    if rc.int("m").is_some() || rc.int("j").is_some() || rc.int("s").is_some() {
        let (m, j) = (uint(rc, "m")?, uint(rc, "j")?);
        let (mu, zeta) = (small(rc, "mu", 2)?, small(rc, "zeta", 2)?);
        if rc.int("s").is_some() {
            let s = uint(rc, "s")?;
            let r = eval_g(&alpha, m, s, j, x, mu, small(rc, "sigma", 2)?, zeta, q()?)?;
            rows.push(BoundRow {
                sum: "g_rhs9",
                value: r.value,
                rhs: r.rhs9,
                ratio: r.ratio9,
            });
            rows.push(BoundRow {
                sum: "g_rhs10",
                value: r.value,
                rhs: r.rhs10,
                ratio: r.ratio10,
            });
        } else {
            let r = eval_lemma5_sum(&alpha, m, j, x, mu, zeta)?;
            rows.push(BoundRow {
                sum: "lemma5",
                value: r.value,
                rhs: r.trivial,
                ratio: r.value / r.trivial,
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::Domain(
            "nothing to evaluate: give --y --q, --m --j, or --m --s --j --q".into(),
        ));
    }
    let mut csv = String::from("sum,value,rhs,ratio\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.sum,
            fmt_real(r.value),
            fmt_real(r.rhs),
            fmt_real(r.ratio)
        ));
    }
    Output::new(&rows, csv)
}

fn run_rosser(rc: &RunConfig) -> Result<Output> {
    let level = real(rc, "level")?;
    let z = real(rc, "z")?;
    let parities = match rc.text("parity").unwrap_or("both") {
        "upper" => vec![Parity::Upper],
        "lower" => vec![Parity::Lower],
        "both" => vec![Parity::Upper, Parity::Lower],
        other => {
            return Err(Error::Domain(format!(
                "parity must be upper, lower or both, got {other:?}"
            )))
        }
    };
    #[derive(Serialize)]
    struct Table {
        parity: &'static str,
        size: usize,
        support: Vec<(u64, i8)>,
    }
    let mut csv = String::from("d,weight,parity\n");
    let mut tables = Vec::new();
    for parity in parities {
        let t = rosser_weights(level, z, parity)?;
        csv.push_str(t.to_csv().split_once('\n').map_or("", |(_, rows)| rows));
        tables.push(Table {
            parity: parity.as_str(),
            size: t.len(),
            support: t.support,
        });
    }
    #[derive(Serialize)]
    struct Doc {
        level: f64,
        z: f64,
        tables: Vec<Table>,
    }
    Output::new(&Doc { level, z, tables }, csv)
}

fn run_sieve_functions(rc: &RunConfig) -> Result<Output> {
    let s_max = rc.real("s_max").unwrap_or(10.0);
    let step = rc.real("step").unwrap_or(1e-3);
    let t = sieve_functions(s_max, step)?;
    Output::new(&t, t.to_csv())
}

fn run_sieve_bounds(rc: &RunConfig) -> Result<Output> {
    let n = floor_uint(rc, "x")?;
    if n > 100_000_000 {
        return Err(Error::Budget(format!(
            "x = {n} exceeds 1e8 for the integer sequence"
        )));
    }
    let z = real(rc, "z")?;
    let level = rc.real("level").unwrap_or(z * z);
    let fns = sieve_functions(20.0, 1e-3)?;
    let seq = WeightedSequence::integers(n);
    let b = sieve_bounds(&seq, Sifting::new(z), level, Density::Unit, n as f64, &fns)?;
    let csv = format!(
        "lower,exact,upper,violations,v_z,s,main_lower,main_upper,error_order\n{},{},{},{},{},{},{},{},{}\n",
        fmt_real(b.lower),
        fmt_real(b.exact),
        fmt_real(b.upper),
        b.violations,
        fmt_real(b.v_z),
        fmt_real(b.s),
        fmt_real(b.main_lower),
        fmt_real(b.main_upper),
        fmt_real(b.error_order)
    );
    Output::new(&b, csv)
}

fn run_experiment_cmd(rc: &RunConfig) -> Result<Output> {
    let cfg = ExperimentConfig::from_run_config(rc)?;
    let report = run_experiment(&cfg)?;
    let mut json = report.to_json()?;
    json.push('\n');
    Ok(Output {
        json,
        csv: witnesses_csv(&report.witnesses),
    })
}

fn run_lemma1_scan(rc: &RunConfig) -> Result<Output> {
    let alpha = alpha_spec(rc).value()?;
    let theta = rc.real("theta").unwrap_or(0.004);
    let limit = uint_or(rc, "limit", 40_000)?;
    if limit > 1_000_000 {
        return Err(Error::Budget(format!("limit = {limit} exceeds 1e6")));
    }
    let qs: Vec<u64> = convergents(&alpha, 64)?
        .items
        .iter()
        .filter(|c| c.q >= 100 && c.q <= limit as u128)
        .map(|c| c.q as u64)
        .collect();
    let points = w_trend(&alpha, theta, &qs)?;
    #[derive(Serialize)]
    struct Row {
        q: u64,
        k_max: u64,
        level: f64,
        w_re: f64,
        w_im: f64,
        ratio: f64,
    }
    let rows = points
        .iter()
        .map(|p| {
            Ok(Row {
                q: p.q,
                k_max: p.k_max,
                level: SieveParams::lemma1(p.q as f64, theta, LEMMA1_DELTA_EXPONENT)?.level,
                w_re: p.w.re,
                w_im: p.w.im,
                ratio: p.ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("q,k_max,level,w_re,w_im,ratio\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.q,
            r.k_max,
            fmt_real(r.level),
            fmt_real(r.w_re),
            fmt_real(r.w_im),
            fmt_real(r.ratio)
        ));
    }
    #[derive(Serialize)]
    struct Doc {
        theta: f64,
        exponent: f64,
        level_threshold_ln_x: Option<f64>,
        non_increasing_within_2: bool,
        points: Vec<Row>,
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    Output::new(
        &Doc {
            theta,
            exponent: LEMMA1_DELTA_EXPONENT,
            level_threshold_ln_x: lemma1_level_threshold(theta, LEMMA1_DELTA_EXPONENT),
            non_increasing_within_2: non_increasing_within(&ratios, 2.0),
            points: rows,
        },
        csv,
    )
}
