//! Certified constructions of classical counterexamples in real analysis.
//!
//! Every family is built from exact rationals ([`Rat`]) and midpoint–radius
//! enclosures ([`Enclosure`]), so each defining property can be checked by
//! a finite witness:
//!
//! * [`cantor_mes`]: a measurable, everywhere-surjective function built from
//!   disjoint Cantor sets, and the vector space `{g ∘ f}` of its compositions
//!   with odd exponential sums.
//! * [`pompeiu`]: a strictly increasing differentiable function whose
//!   derivative vanishes on a dense set, plus nonconstancy witnesses.
//! * [`sepcont`]: a separately continuous function discontinuous at the
//!   origin and the free algebra generated by `e^{|x|^c} − e^{−|x|^c}`.
//! * [`series_lab`]: series defeating the ratio and root tests, weighted
//!   `c₀` spaces and divergence witnesses.
//! * [`measure_lab`]: exact step-function calculus and the typewriter
//!   sequence (convergence in measure without pointwise convergence).

pub mod cantor_mes;
pub mod error;
pub mod expalg;
pub mod measure_lab;
pub mod numkernel;
pub mod pompeiu;
pub mod report;
pub mod sepcont;
pub mod series_lab;

pub use error::{Error, Result};
pub use numkernel::{Enclosure, Ordering3, Rat};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;
