//! Output records and number formatting shared by every command.

/// Reals are written with 17 significant digits, which round-trips `f64`.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    format!("{:.16e}", v)
}

use serde::{Deserialize, Serialize};

/// One evaluation result as emitted by the command-line tools.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub operation: String,
    pub inputs: serde_json::Value,
    pub value_re: f64,
    pub value_im: f64,
    pub bound_terms: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl Record {
    pub fn new(operation: &str, inputs: serde_json::Value) -> Self {
        Record {
            operation: operation.to_string(),
            inputs,
            value_re: 0.0,
            value_im: 0.0,
            bound_terms: Vec::new(),
            ratios: Vec::new(),
        }
    }

    pub fn value(mut self, re: f64, im: f64) -> Self {
        self.value_re = re;
        self.value_im = im;
        self
    }

    pub fn bounds(mut self, terms: Vec<f64>) -> Self {
        self.bound_terms = terms;
        self
    }

    pub fn ratios(mut self, ratios: Vec<f64>) -> Self {
        self.ratios = ratios;
        self
    }
}
