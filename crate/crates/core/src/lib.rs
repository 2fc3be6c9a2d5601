//! Exact arithmetic for exponential sums over finite fields.
//!
//! The crate decides, through base-`p` digit-sum inequalities, whether the
//! local systems attached to `x^D + t_r x^{d_r} + ... + t_1 x` (optionally
//! twisted by the quadratic character) can have finite monodromy. Alongside
//! the digit criteria it provides two independent routes to the same verdict
//! (Kubert's `V` function and Gauss-sum valuations), exact trace tables over
//! explicit models of `F_q`, and a mechanical replay of the digit-inequality
//! argument for the `(3, 23, {1, 5})` system.
//!
//! Enumerations run on rayon when the default `parallel` feature is enabled
//! and fall back to plain iterators otherwise. Results never depend on which
//! path ran.

pub mod characters;
pub mod criteria;
pub mod cyclotomic;
pub mod digits;
mod error;
pub mod finite_field;
mod par;
pub mod proofcheck;
pub mod traces;

pub use error::{Error, Result};

pub use characters::MultChar;
pub use criteria::{CriterionId, CriterionReport, SystemSpec, Twist, Verdict};
pub use cyclotomic::CycInt;
pub use digits::FractionModZ;
pub use finite_field::{FieldElement, FieldTable};
pub use par::is_parallel;

/// Library version echoed in report metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
