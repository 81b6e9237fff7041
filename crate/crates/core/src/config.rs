//! Text formats for real parameters and run configuration files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::arith::{FixedReal, FRAC_BITS};
use crate::error::{Error, Result};

/// A real parameter given without decimal rounding: an integer, a square
/// root `sqrt:<d>`, or a dyadic `fixed:<hex>/<F>` meaning `hex / 2^F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RealSpec {
    Int(i64),
    Sqrt(u64),
    Fixed { mantissa: BigInt, frac_bits: u32 },
}

/// Largest `F` accepted in `fixed:<hex>/<F>`.
pub const MAX_FIXED_BITS: u32 = 4096;

impl RealSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: format!("{msg}: {s:?}"),
        };
        if let Some(d) = s.strip_prefix("sqrt:") {
            let d: u64 = d
                .parse()
                .map_err(|_| bad("sqrt:<d> needs a non-negative integer d"))?;
            return Ok(RealSpec::Sqrt(d));
        }
        if let Some(rest) = s.strip_prefix("fixed:") {
            let (hex, bits) = rest
                .split_once('/')
                .ok_or_else(|| bad("fixed:<hex>/<F> needs a '/'"))?;
            let (neg, digits) = match hex.strip_prefix('-') {
                Some(h) => (true, h),
                None => (false, hex),
            };
            let digits = digits.strip_prefix("0x").unwrap_or(digits);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(bad("hex mantissa expected"));
            }
            let mut mantissa =
                BigInt::from_str_radix(digits, 16).map_err(|_| bad("hex mantissa expected"))?;
            if neg {
                mantissa = -mantissa;
            }
            let frac_bits: u32 = bits
                .parse()
                .map_err(|_| bad("F must be a non-negative integer"))?;
            if frac_bits > MAX_FIXED_BITS {
                return Err(bad("F too large"));
            }
            return Ok(RealSpec::Fixed {
                mantissa,
                frac_bits,
            });
        }
        s.parse::<i64>()
            .map(RealSpec::Int)
            .map_err(|_| bad("expected an integer, sqrt:<d> or fixed:<hex>/<F>"))
    }

    /// The value at 192 fractional bits, rounded toward minus infinity.
    pub fn value(&self) -> Result<FixedReal> {
        match self {
            RealSpec::Int(n) => Ok(FixedReal::from_int(*n)),
            RealSpec::Sqrt(d) => Ok(FixedReal::from_sqrt(*d)),
            RealSpec::Fixed {
                mantissa,
                frac_bits,
            } => {
                let scaled = if *frac_bits <= FRAC_BITS {
                    mantissa << (FRAC_BITS - frac_bits)
                } else {
                    // Arithmetic shift floors negative mantissas too.
                    mantissa >> (frac_bits - FRAC_BITS)
                };
                FixedReal::from_scaled(&scaled)
            }
        }
    }

    /// Whether the value is irrational (a square root of a non-square).
    pub fn is_irrational(&self) -> bool {
        match self {
            RealSpec::Sqrt(d) => {
                let r = (*d as f64).sqrt() as u64;
                !(r.saturating_sub(1)..=r + 1).any(|c| c.checked_mul(c) == Some(*d))
            }
            _ => false,
        }
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Int(n) => write!(f, "{n}"),
            RealSpec::Sqrt(d) => write!(f, "sqrt:{d}"),
            RealSpec::Fixed {
                mantissa,
                frac_bits,
            } => {
                if mantissa.sign() == Sign::Minus {
                    write!(f, "fixed:-{}/{frac_bits}", (-mantissa).to_str_radix(16))
                } else {
                    write!(f, "fixed:{}/{frac_bits}", mantissa.to_str_radix(16))
                }
            }
        }
    }
}

impl FromStr for RealSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RealSpec::parse(s)
    }
}

impl From<RealSpec> for String {
    fn from(r: RealSpec) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for RealSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        RealSpec::parse(&s)
    }
}

/// Output format of a command.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::domain(format!(
                "format must be json or csv, got {s:?}"
            ))),
        }
    }
}

pub const COMMANDS: [&str; 12] = [
    "convergents",
    "primes",
    "classify",
    "bump",
    "expsum",
    "vaughan-check",
    "lemma-bounds",
    "rosser",
    "sieve-functions",
    "sieve-bounds",
    "experiment",
    "lemma1-scan",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Real,
    Int,
    UInt,
    Spec,
    Text,
}

/// Every parameter key a configuration may set, with its type.
pub const PARAMS: [(&str, Kind); 31] = [
    ("alpha", Kind::Spec),
    ("beta", Kind::Spec),
    ("theta", Kind::Real),
    ("rho", Kind::Real),
    ("omega", Kind::Real),
    ("delta", Kind::Real),
    ("x", Kind::Real),
    ("y", Kind::Real),
    ("q", Kind::UInt),
    ("count", Kind::UInt),
    ("limit", Kind::UInt),
    ("d", Kind::UInt),
    ("a", Kind::UInt),
    ("b", Kind::Int),
    ("k", Kind::Int),
    ("m", Kind::UInt),
    ("s", Kind::UInt),
    ("j", Kind::UInt),
    ("mu", Kind::UInt),
    ("sigma", Kind::UInt),
    ("zeta", Kind::UInt),
    ("u", Kind::Real),
    ("v", Kind::Real),
    ("level", Kind::Real),
    ("z", Kind::Real),
    ("parity", Kind::Text),
    ("s_max", Kind::Real),
    ("step", Kind::Real),
    ("z_exponent", Kind::Real),
    ("p1_exponent", Kind::Real),
    ("exponent", Kind::Real),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Int(i128),
    Spec(RealSpec),
    Text(String),
}

fn parse_value(kind: Kind, raw: &str) -> std::result::Result<Value, String> {
    match kind {
        Kind::Real => raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Value::Real)
            .ok_or_else(|| "expected a finite real".to_string()),
        Kind::Int => raw
            .parse::<i64>()
            .map(|v| Value::Int(v as i128))
            .map_err(|_| "expected an integer".to_string()),
        Kind::UInt => raw
            .parse::<u128>()
            .map(|v| Value::Int(v as i128))
            .map_err(|_| "expected a non-negative integer".to_string()),
        Kind::Spec => RealSpec::parse(raw)
            .map(Value::Spec)
            .map_err(|e| e.to_string()),
        Kind::Text => Ok(Value::Text(raw.to_string())),
    }
}

/// A parsed run configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Option<String>,
    pub params: BTreeMap<String, Value>,
    pub out: Option<String>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("key {key:?} has no value")));
            }
            match key {
                "command" => {
                    if !COMMANDS.contains(&value) {
                        return Err(err(format!("unknown command {value:?}")));
                    }
                    cfg.command = Some(value.to_string());
                }
                "out" => cfg.out = Some(value.to_string()),
                "format" => {
                    cfg.format = Some(value.parse().map_err(|e: Error| err(e.to_string()))?)
                }
                "threads" => {
                    let t: usize = value
                        .parse()
                        .map_err(|_| err(format!("key threads: expected a positive integer")))?;
                    if t == 0 {
                        return Err(err("key threads: must be at least 1".into()));
                    }
                    cfg.threads = Some(t);
                }
                "seed" => {
                    cfg.seed = Some(
                        value
                            .parse()
                            .map_err(|_| err("key seed: expected a non-negative integer".into()))?,
                    )
                }
                _ => {
                    let kind = PARAMS
                        .iter()
                        .find(|(k, _)| *k == key)
                        .map(|(_, kind)| *kind)
                        .ok_or_else(|| err(format!("unknown key {key:?}")))?;
                    let v = parse_value(kind, value).map_err(|m| err(format!("key {key}: {m}")))?;
                    if cfg.params.insert(key.to_string(), v).is_some() {
                        return Err(err(format!("duplicate key {key:?}")));
                    }
                }
            }
        }
        cfg.check_ranges()?;
        Ok(cfg)
    }

    /// Range checks that do not depend on the command.
    fn check_ranges(&self) -> Result<()> {
        if let Some(t) = self.real("theta") {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::domain(format!("theta = {t} outside [0, 1)")));
            }
        }
        if let Some(d) = self.real("delta") {
            if !(d > 0.0 && d < 0.5) {
                return Err(Error::domain(format!("delta = {d} outside (0, 1/2)")));
            }
        }
        Ok(())
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(Value::Real(v)) => Some(*v),
            Some(Value::Int(v)) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> Option<i128> {
        match self.params.get(key) {
            Some(Value::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn spec(&self, key: &str) -> Option<&RealSpec> {
        match self.params.get(key) {
            Some(Value::Spec(s)) => Some(s),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.params.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    /// Sets a parameter from its textual form, with the same typing as files.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let kind = PARAMS
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, kind)| *kind)
            .ok_or_else(|| Error::domain(format!("unknown parameter {key:?}")))?;
        let v = parse_value(kind, raw).map_err(|m| Error::domain(format!("{key}: {m}")))?;
        self.params.insert(key.to_string(), v);
        self.check_ranges()
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    RunConfig::parse_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_specs() {
        assert_eq!(RealSpec::parse("sqrt:2").unwrap(), RealSpec::Sqrt(2));
        assert_eq!(RealSpec::parse("-3").unwrap(), RealSpec::Int(-3));
        let half = RealSpec::parse("fixed:1/1").unwrap();
        assert_eq!(half.value().unwrap(), FixedReal::from_ratio(1, 2));
        let neg = RealSpec::parse("fixed:-3/2").unwrap();
        assert_eq!(neg.value().unwrap(), FixedReal::from_ratio(-3, 4));
        assert_eq!(neg.to_string(), "fixed:-3/2");
        assert_eq!(
            RealSpec::parse("fixed:0xff/4").unwrap().value().unwrap(),
            FixedReal::from_ratio(255, 16)
        );
        for bad in [
            "sqrt:-1",
            "fixed:xyz/3",
            "fixed:12",
            "1.5",
            "",
            "fixed:1/99999",
        ] {
            assert!(RealSpec::parse(bad).is_err(), "{bad}");
        }
        assert!(RealSpec::Sqrt(2).is_irrational());
        assert!(!RealSpec::Sqrt(49).is_irrational());
    }

    #[test]
    fn fixed_beyond_resolution_floors() {
        // 1 / 2^200 floors to zero; -1 / 2^200 floors to -2^-192.
        let tiny = RealSpec::parse("fixed:1/200").unwrap().value().unwrap();
        assert_eq!(tiny, FixedReal::from_int(0));
        let neg = RealSpec::parse("fixed:-1/200").unwrap().value().unwrap();
        assert_eq!(neg.to_scaled(), BigInt::from(-1));
    }

    #[test]
    fn config_files() {
        assert_eq!(RunConfig::parse_str("").unwrap(), RunConfig::default());
        let c = RunConfig::parse_str(
            "command = experiment\n# note\ntheta = 0.3\nalpha = sqrt:2 # inline\n",
        )
        .unwrap();
        assert_eq!(c.command.as_deref(), Some("experiment"));
        assert_eq!(c.real("theta"), Some(0.3));
        assert_eq!(c.spec("alpha"), Some(&RealSpec::Sqrt(2)));
        assert!(RunConfig::parse_str("theta = -1").is_err());
        match RunConfig::parse_str("theta = 0.1\nbogus = 3\n") {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        match RunConfig::parse_str("x = abc") {
            Err(Error::Parse { line: 1, msg }) => assert!(msg.contains("key x")),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::parse_str("theta = 0.1\ntheta = 0.2").is_err());
        assert!(RunConfig::parse_str("threads = 0").is_err());
        assert!(RunConfig::parse_str("command = nope").is_err());
    }
}
