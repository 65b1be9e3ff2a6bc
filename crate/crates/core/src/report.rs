//! Deterministic number formatting and parallel summation shared by the
//! report writers.

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Floats in output files carry 17 significant digits.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Terminal summaries use 6 significant digits.
pub fn fmt_sig6(x: f64) -> String {
    format!("{x:.5e}")
}

/// An `f64` that serializes to JSON with 17 significant digits, or `null`
/// when not finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(fmt_sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// Block size for [`chunked_sum`]. Fixed so that the summation tree does not
/// depend on the thread count.
pub const SUM_CHUNK: u64 = 4096;

/// `Σ_{i=1}^{len} term(i)`: ascending within fixed blocks of [`SUM_CHUNK`],
/// block partials then added in ascending order.
///
/// Blocks are evaluated in parallel; the result is bit-identical for any
/// number of threads.
pub fn chunked_sum<F>(len: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let blocks = len.div_ceil(SUM_CHUNK);
    let partials: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * SUM_CHUNK + 1;
            let hi = ((b + 1) * SUM_CHUNK).min(len);
            let mut acc = 0.0;
            for i in lo..=hi {
                acc += term(i);
            }
            acc
        })
        .collect();
    partials.into_iter().sum()
}
