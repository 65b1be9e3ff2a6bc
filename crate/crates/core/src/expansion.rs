//! Truncated Cohen-Ramanujan expansions `f(n) ≈ Σ_{r ≤ R} f̂(r) c_r^s(·)`.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, factorize, jordan_totient, tau, zeta, Factorization, SExponent};
use crate::crsum::cr_sum_exact_of;
use crate::error::{Error, Result};
use crate::report::{chunked_sum, fmt_sig17};

/// Which argument the sums are evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgumentMode {
    /// `Σ f̂(r) c_r^s(n)`
    PlainN,
    /// `Σ f̂(r) c_r^s(n^s)`
    NToS,
}

/// Where a coefficient family came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed form for `σ_{ks}(n)/n^{ks}`.
    ClosedFormSigma { k: u32 },
    /// Finite-`N` mean values `M(f c_r^s)/Φ_s(r^s)`.
    MeanValueExtracted { samples: u64, period_exact: bool },
    /// Coefficients of `n ↦ f(n + h)` derived from those of `f`.
    Shifted { h: u64 },
    /// Read from a coefficient file; origin not recorded.
    Imported,
}

/// Coefficients `f̂(1), …, f̂(R)` for a fixed `s`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    s: SExponent,
    mode: ArgumentMode,
    coeffs: Vec<f64>,
    provenance: Provenance,
}

impl ExpansionCoefficients {
    /// `coeffs[i]` is `f̂(i + 1)`.
    pub fn new(
        s: SExponent,
        mode: ArgumentMode,
        coeffs: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition(
                "an expansion needs at least one coefficient".into(),
            ));
        }
        Ok(ExpansionCoefficients {
            s,
            mode,
            coeffs,
            provenance,
        })
    }

    pub fn s(&self) -> SExponent {
        self.s
    }

    pub fn mode(&self) -> ArgumentMode {
        self.mode
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The truncation `R`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// `f̂(r)` for `1 ≤ r ≤ R`.
    pub fn coefficient(&self, r: usize) -> Option<f64> {
        r.checked_sub(1).and_then(|i| self.coeffs.get(i)).copied()
    }

    fn argument(&self, n: u64) -> Result<u64> {
        match self.mode {
            ArgumentMode::PlainN => Ok(n),
            ArgumentMode::NToS => checked_pow(n, self.s.get()),
        }
    }

    /// `Σ_{r ≤ R} f̂(r) c_r^s(arg)` with `arg = n` or `n^s` per the mode.
    pub fn evaluate(&self, n: u64) -> Result<f64> {
        self.evaluate_truncated(n, self.len())
    }

    /// As [`evaluate`](Self::evaluate) but keeping only `r ≤ terms`; zero
    /// terms give 0.
    pub fn evaluate_truncated(&self, n: u64, terms: usize) -> Result<f64> {
        let factored = factor_range(terms.min(self.len()))?;
        self.evaluate_with(&factored, n)
    }

    /// Evaluates at every `n` in `ns`, in parallel over `n`.
    pub fn evaluate_many(&self, ns: &[u64]) -> Result<Vec<f64>> {
        let factored = factor_range(self.len())?;
        ns.par_iter()
            .map(|&n| self.evaluate_with(&factored, n))
            .collect()
    }

    fn evaluate_with(&self, factored: &[Factorization], n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("expansions are evaluated at n >= 1".into()));
        }
        let arg = self.argument(n)?;
        let mut acc = 0.0;
        for (coef, rf) in self.coeffs.iter().zip(factored) {
            let c = cr_sum_exact_of(rf, arg, self.s)?;
            acc += coef * c as f64;
        }
        Ok(acc)
    }

    /// `Σ_{r ≤ R} |f̂(r)| τ(r)`.
    pub fn tau_weighted_norm(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c.abs() * tau(i as u64 + 1)? as f64;
        }
        Ok(acc)
    }

    /// CSV with header `r,coefficient`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "coefficient"])?;
        for (i, c) in self.coeffs.iter().enumerate() {
            w.write_record([(i + 1).to_string(), fmt_sig17(*c)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `r,coefficient` CSV. Rows must list `r = 1, 2, …` in order.
    pub fn read_csv<R: Read>(
        input: R,
        s: SExponent,
        mode: ArgumentMode,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "coefficient" {
            return Err(Error::Parse(format!(
                "expected header r,coefficient, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut coeffs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let r: usize = rec[0]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: bad r: {e}", i + 1)))?;
            if r != i + 1 {
                return Err(Error::Parse(format!(
                    "row {}: expected r = {}, found {r}",
                    i + 1,
                    i + 1
                )));
            }
            let c: f64 = rec[1]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: bad coefficient: {e}", i + 1)))?;
            coeffs.push(c);
        }
        ExpansionCoefficients::new(s, mode, coeffs, provenance)
    }
}

fn factor_range(len: usize) -> Result<Vec<Factorization>> {
    (1..=len as u64).map(factorize).collect()
}

/// Closed-form family for `σ_{ks}(n)/n^{ks}` evaluated against `c_r^s(n^s)`:
/// `f̂(r) = ζ((k+1)s) / r^{(k+1)s}`.
pub fn sigma_expansion(k: u32, s: SExponent, terms: usize) -> Result<ExpansionCoefficients> {
    if k == 0 {
        return Err(Error::Domain("sigma expansion needs k >= 1".into()));
    }
    let exponent = f64::from(k + 1) * f64::from(s.get());
    let z = zeta(exponent)?;
    let coeffs = (1..=terms).map(|r| z / (r as f64).powf(exponent)).collect();
    ExpansionCoefficients::new(
        s,
        ArgumentMode::NToS,
        coeffs,
        Provenance::ClosedFormSigma { k },
    )
}

/// A finite-`N` mean-value coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValue {
    pub value: f64,
    /// `r^s` divides `N`, so the average runs over whole periods of `c_r^s`.
    pub period_exact: bool,
}

/// `(1/N) Σ_{n ≤ N} f(n) c_r^s(n) / Φ_s(r^s)`.
pub fn mean_value_coefficient<F>(f: F, r: u64, s: SExponent, samples: u64) -> Result<MeanValue>
where
    F: Fn(u64) -> f64 + Sync,
{
    if samples == 0 {
        return Err(Error::Domain("mean value needs N >= 1".into()));
    }
    let rf = factorize(r)?;
    let phi = jordan_totient_f64(r, s)?;
    // c_r^s(n) is bounded and n ≥ 1, so the exact route cannot fail here
    let total = chunked_sum(samples, |n| {
        let c = cr_sum_exact_of(&rf, n, s).expect("c_r^s(n) for n >= 1 fits i128");
        f(n) * c as f64
    });
    let period_exact = r
        .checked_pow(s.get())
        .is_some_and(|p| samples.is_multiple_of(p));
    Ok(MeanValue {
        value: total / samples as f64 / phi,
        period_exact,
    })
}

/// Mean-value coefficients `f̂(1), …, f̂(R)` of `f` against `c_r^s(n)`.
pub fn mean_value_family<F>(
    f: F,
    terms: usize,
    s: SExponent,
    samples: u64,
) -> Result<ExpansionCoefficients>
where
    F: Fn(u64) -> f64 + Sync,
{
    let mut coeffs = Vec::with_capacity(terms);
    let mut period_exact = true;
    for r in 1..=terms as u64 {
        let mv = mean_value_coefficient(&f, r, s, samples)?;
        period_exact &= mv.period_exact;
        coeffs.push(mv.value);
    }
    ExpansionCoefficients::new(
        s,
        ArgumentMode::PlainN,
        coeffs,
        Provenance::MeanValueExtracted {
            samples,
            period_exact,
        },
    )
}

/// Coefficients `f̂(r) c_r^s(h) / Φ_s(r^s)` for the shifted function
/// `n ↦ f(n + h)`. Only defined for expansions in `c_r^s(n)`.
pub fn shift_coefficients(coeffs: &ExpansionCoefficients, h: u64) -> Result<ExpansionCoefficients> {
    if coeffs.mode != ArgumentMode::PlainN {
        return Err(Error::Precondition(
            "shift is defined for expansions in c_r^s(n), not c_r^s(n^s)".into(),
        ));
    }
    let s = coeffs.s;
    let mut shifted = Vec::with_capacity(coeffs.len());
    for (i, &c) in coeffs.coeffs.iter().enumerate() {
        let r = i as u64 + 1;
        let rf = factorize(r)?;
        let at_h = cr_sum_exact_of(&rf, h, s)? as f64;
        let phi = jordan_totient_f64(r, s)?;
        shifted.push(c * (at_h / phi));
    }
    ExpansionCoefficients::new(s, ArgumentMode::PlainN, shifted, Provenance::Shifted { h })
}

pub(crate) fn jordan_totient_f64(r: u64, s: SExponent) -> Result<f64> {
    Ok(jordan_totient(r, s)? as f64)
}
