//! Certified scalar arithmetic.
//!
//! [`Rat`] is an exact arbitrary-precision rational. [`Enclosure`] is a
//! binary midpoint–radius interval whose operations are sound: the returned
//! interval always contains the exact result of the operation applied to
//! any point of the inputs. Transcendentals are evaluated by argument
//! reduction plus Taylor series with an explicit bound on the truncated tail.

mod dyadic;
mod elementary;
mod enclosure;
pub mod linalg;
mod rat;

pub use dyadic::{Dyadic, Round};
pub use elementary::{
    cbrt_rat, enclose_atan, enclose_cbrt, enclose_cos, enclose_exp, enclose_pi, enclose_pow_rat,
    enclose_ln2, enclose_log, enclose_root, enclose_sin, enclose_sqrt, enclose_tan_pi, log_rat,
    tan_pi_rat,
};
pub use enclosure::{compare, Enclosure, Ordering3};
pub use rat::{
    floor_log2, int, parse_rat, pow2, rat, rat_abs, rat_powi, rat_to_decimal, rat_to_string, serde_rat,
    serde_rat_vec, simplest_between, Rat,
};
