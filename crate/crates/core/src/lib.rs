//! Exact arithmetic for Cohen-Ramanujan sums `c_r^s(n)`, their series
//! expansions, and empirical checks of correlation asymptotics.
//!
//! * [`arith`]: factorization, Möbius, `(m, n)_s`, `J_s`, `Φ_s`, `τ_s`,
//!   `σ_{k,s}`, ζ and harmonic sums.
//! * [`crsum`]: `c_r^s(n)` by the divisor representation and by the literal
//!   exponential sum, sieved batch tables and orthogonality.
//! * [`expansion`]: truncated coefficient families `r ↦ f̂(r)`.
//! * [`asymptotics`]: shifted correlation sums, predicted main terms and
//!   the lemma bound grids.
//! * [`report`]: deterministic CSV/JSON output.

pub mod arith;
pub mod asymptotics;
pub mod crsum;
pub mod error;
pub mod expansion;
pub mod report;

pub use arith::{Factorization, SExponent};
pub use crsum::CRSumTable;
pub use error::{Error, Result};
pub use expansion::{ArgumentMode, ExpansionCoefficients, Provenance};
