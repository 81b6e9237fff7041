//! The weighted exponential sum `W`, its Vaughan decomposition, the
//! auxiliary min-sums and the bound evaluators.

mod minsums;
mod params;
mod progression;
mod tables;
mod vaughan;
mod weyl;

pub use minsums::{
    eval_g, eval_lemma4_sum, eval_lemma5_sum, GSum, Lemma4Sum, Lemma5Sum, MAX_MINSUM_TERMS,
};
pub use params::{
    check_regime, lemma1_level_threshold, ln_trivial_bound, remark2_window, theorem1_bound,
    theorem1_ln_terms, QWindow, SieveParams, Theorem1Bound, LEMMA1_DELTA_EXPONENT,
    LEMMA1_DELTA_EXPONENT_DECIMAL,
};
pub use progression::{eval_progression_sum, lemma3_check, Lemma3Check};
pub use tables::{CoefficientTable, WeightTable};
pub use vaughan::{
    vaughan_decompose, Component, ComponentKind, EllWeight, VaughanDecomposition, MAX_VAUGHAN_X,
};
pub use weyl::{
    coefficient_sum, dyadic_range, eval_w_direct, table_for, PhaseSum, Support, MAX_PHASE_TERMS,
};
