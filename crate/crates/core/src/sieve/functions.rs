use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::fmt_real;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `F` and `f` of the linear sieve on the grid `s_i = i h`, `i >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveFunctionTable {
    pub step: f64,
    pub s_grid: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

/// Trapezoid stepping of `(s F)' = f(s-1)`, `(s f)' = F(s-1)` on the grid
/// `i / per_unit`, `i = 0..=n`. Returns `(F, f)` indexed by `i`.
fn trapezoid(per_unit: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / per_unit as f64;
    let two_eg = 2.0 * EULER_GAMMA.exp();
    let mut s_up = vec![0.0; n + 1];
    let mut s_lo = vec![0.0; n + 1];
    let mut big = vec![0.0; n + 1];
    let mut small = vec![0.0; n + 1];
    for i in 1..=n {
        let s = i as f64 * h;
        if i <= 2 * per_unit {
            big[i] = two_eg / s;
            s_up[i] = two_eg;
        } else {
            let j = i - per_unit;
            s_up[i] = s_up[i - 1] + 0.5 * h * (small[j - 1] + small[j]);
            s_lo[i] = s_lo[i - 1] + 0.5 * h * (big[j - 1] + big[j]);
            big[i] = s_up[i] / s;
            small[i] = s_lo[i] / s;
        }
    }
    (big, small)
}

/// Integrates the delay system for `F` and `f` from `F = 2 e^gamma / s`,
/// `f = 0` on `(0, 2]`. The step is rounded to `1/N` so that `s - 1` and
/// every integer fall on the grid. Trapezoid stepping on the products is
/// run at `h` and `h/2` and combined by one Richardson step, which removes
/// the `O(h^2)` drift of the limit that otherwise breaks monotonicity
/// near `s = 10`.
pub fn sieve_functions(s_max: f64, step: f64) -> Result<SieveFunctionTable> {
    if !(s_max > 0.0 && s_max <= 20.0) {
        return Err(Error::domain(format!("s_max = {s_max} outside (0, 20]")));
    }
    if !(1e-5..=1e-2).contains(&step) {
        return Err(Error::domain(format!("step = {step} outside [1e-5, 1e-2]")));
    }
    let per_unit = (1.0 / step).round() as usize;
    let h = 1.0 / per_unit as f64;
    let n = (s_max * per_unit as f64 + 1e-9).floor() as usize;
    let (big_h, small_h) = trapezoid(per_unit, n);
    let (big_h2, small_h2) = trapezoid(2 * per_unit, 2 * n);
    let two_eg = 2.0 * EULER_GAMMA.exp();
    let mut s_grid = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    for i in 1..=n {
        let s = i as f64 * h;
        s_grid.push(s);
        if i <= 2 * per_unit {
            upper.push(two_eg / s);
            lower.push(0.0);
        } else {
            upper.push((4.0 * big_h2[2 * i] - big_h[i]) / 3.0);
            lower.push((4.0 * small_h2[2 * i] - small_h[i]) / 3.0);
        }
    }
    Ok(SieveFunctionTable {
        step: h,
        s_grid,
        upper,
        lower,
    })
}

impl SieveFunctionTable {
    fn interp(&self, values: &[f64], s: f64) -> f64 {
        let pos = s / self.step;
        let last = self.s_grid.len();
        if pos >= last as f64 {
            return values[last - 1];
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        let a = if i == 0 { values[0] } else { values[i - 1] };
        let b = values[i.min(last - 1)];
        a + t * (b - a)
    }

    /// `F(s)`: closed form on `(0, 2]`, linear interpolation above, the
    /// last grid value beyond `s_max`.
    pub fn upper_at(&self, s: f64) -> f64 {
        if s <= 2.0 {
            return 2.0 * EULER_GAMMA.exp() / s;
        }
        self.interp(&self.upper, s)
    }

    /// `f(s)`, with the same conventions as [`Self::upper_at`].
    pub fn lower_at(&self, s: f64) -> f64 {
        if s <= 2.0 {
            return 0.0;
        }
        self.interp(&self.lower, s)
    }

    /// Grid index of `s` if it lies on the grid.
    pub fn index_of(&self, s: f64) -> Option<usize> {
        let i = (s / self.step).round() as usize;
        (i >= 1 && i <= self.s_grid.len() && (i as f64 * self.step - s).abs() < 1e-9).then(|| i - 1)
    }

    /// CSV with header `s,F,f`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,F,f\n");
        for i in 0..self.s_grid.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_real(self.s_grid[i]),
                fmt_real(self.upper[i]),
                fmt_real(self.lower[i])
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_values_and_closed_form() {
        let t = sieve_functions(6.0, 1e-3).unwrap();
        let eg = EULER_GAMMA.exp();
        let i2 = t.index_of(2.0).unwrap();
        assert!((t.upper[i2] - eg).abs() < 1e-12);
        assert_eq!(t.lower[i2], 0.0);
        // s f(s) = 2 e^gamma ln(s - 1) on (2, 4].
        let i4 = t.index_of(4.0).unwrap();
        let want = 2.0 * eg * 3f64.ln() / 4.0;
        assert!(
            (t.lower[i4] - want).abs() < 1e-6,
            "{} vs {want}",
            t.lower[i4]
        );
        // F = 2 e^gamma / s persists up to s = 3.
        let i3 = t.index_of(3.0).unwrap();
        assert!((t.upper[i3] - 2.0 * eg / 3.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_and_converging() {
        let t = sieve_functions(10.0, 1e-3).unwrap();
        for (i, w) in t.upper.windows(2).enumerate() {
            assert!(
                w[1] <= w[0],
                "F rises at s = {}: {} -> {}",
                t.s_grid[i + 1],
                w[0],
                w[1]
            );
        }
        for w in t.lower.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(t.upper.iter().zip(&t.lower).all(|(a, b)| b <= a));
        assert!((t.upper_at(10.0) - t.lower_at(10.0)).abs() < 1e-3);
    }

    #[test]
    fn bad_inputs() {
        assert!(sieve_functions(21.0, 1e-3).is_err());
        assert!(sieve_functions(6.0, 0.1).is_err());
        assert!(sieve_functions(6.0, 1e-6).is_err());
    }

    #[test]
    fn csv_header() {
        let t = sieve_functions(3.0, 1e-2).unwrap();
        assert!(t.to_csv().starts_with("s,F,f\n"));
        assert_eq!(t.to_csv().lines().count(), 301);
    }
}
