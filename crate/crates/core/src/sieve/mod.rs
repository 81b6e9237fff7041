//! Rosser weights, well-separable splits, the linear-sieve functions and
//! sieve bounds for weighted sequences.

mod bounds;
mod functions;
mod rosser;
mod split;

pub use bounds::{
    buchstab_terms, sieve_bounds, v_of_z, BuchstabSpec, BuchstabTerms, Density, Piece, SieveBounds,
    WeightedSequence,
};
pub use functions::{sieve_functions, SieveFunctionTable, EULER_GAMMA};
pub use rosser::{
    rosser_admissible, rosser_divisor_sum, rosser_weights, sandwich_check, sifting_factors, Parity,
    RosserWeightTable, SandwichCheck, Sifting, MAX_SUPPORT,
};
pub use split::well_separable_split;
