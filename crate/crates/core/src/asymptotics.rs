//! Empirical checks of the correlation asymptotics
//! `Σ_{n ≤ N} f(n) g(n + h) ~ N · Σ_r f̂(r) ĝ(r) w(r)` and of the bounds on
//! sums of products of Cohen-Ramanujan sums.
//!
//! All sums of `c`-products are accumulated in exact integers from a
//! [`CRSumTable`]; floats appear only in bounds involving roots or logs and in
//! the normalized ratios.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arith::{
    checked_pow, factorize, gcd_s, is_sth_power_free, jordan_totient, sigma_real, sigma_real_table,
    tau, tau_s, zeta, SExponent,
};
use crate::crsum::{cr_sum_exact_of, CRSumTable};
use crate::error::{overflow, Error, Result};
use crate::expansion::{jordan_totient_f64, ExpansionCoefficients};
use crate::report::{chunked_sum, fmt_sig17, Sig17};

/// `Σ_{n=1}^{N} f(n) g(n + h)`.
///
/// Summed in ascending `n` inside fixed blocks, blocks in parallel; see
/// [`chunked_sum`].
pub fn correlation_sum<F, G>(f: F, g: G, h: u64, n_max: u64) -> f64
where
    F: Fn(u64) -> f64 + Sync,
    G: Fn(u64) -> f64 + Sync,
{
    chunked_sum(n_max, |n| f(n) * g(n + h))
}

fn check_pair(f: &ExpansionCoefficients, g: &ExpansionCoefficients, terms: usize) -> Result<()> {
    if f.s() != g.s() {
        return Err(Error::Precondition(format!(
            "coefficient families use different s ({} vs {})",
            f.s(),
            g.s()
        )));
    }
    if terms > f.len() || terms > g.len() {
        return Err(Error::Precondition(format!(
            "R = {terms} exceeds a truncation ({} / {})",
            f.len(),
            g.len()
        )));
    }
    Ok(())
}

/// `Σ_{r ≤ R} f̂(r) ĝ(r) Φ_s(r^s)`.
pub fn theorem1_main(
    f: &ExpansionCoefficients,
    g: &ExpansionCoefficients,
    terms: usize,
) -> Result<f64> {
    check_pair(f, g, terms)?;
    let mut acc = 0.0;
    for r in 1..=terms {
        let w = jordan_totient_f64(r as u64, f.s())?;
        acc += f.coefficients()[r - 1] * g.coefficients()[r - 1] * w;
    }
    Ok(acc)
}

/// `Σ_{r ≤ R} f̂(r) ĝ(r) c_r^s(h)`. Equal to [`theorem1_main`] at `h = 0`.
pub fn theorem2_main(
    f: &ExpansionCoefficients,
    g: &ExpansionCoefficients,
    h: u64,
    terms: usize,
) -> Result<f64> {
    check_pair(f, g, terms)?;
    let mut acc = 0.0;
    for r in 1..=terms {
        let w = cr_sum_exact_of(&factorize(r as u64)?, h, f.s())? as f64;
        acc += f.coefficients()[r - 1] * g.coefficients()[r - 1] * w;
    }
    Ok(acc)
}

/// `h = m^s k` with `k` s-th power free and `m` maximal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HDecomposition {
    pub h: u64,
    pub m: u64,
    pub k: u64,
}

pub fn decompose_h(h: u64, s: SExponent) -> Result<HDecomposition> {
    if h == 0 {
        return Err(Error::Domain("decomposition needs h >= 1".into()));
    }
    let f = factorize(h)?;
    let (mut m, mut k) = (1u64, 1u64);
    for &(p, e) in f.factors() {
        m *= p.pow(e / s.get());
        k *= p.pow(e % s.get());
    }
    debug_assert!(is_sth_power_free(k, s).unwrap_or(false));
    Ok(HDecomposition { h, m, k })
}

fn check_corollary_exponents(a: f64, b: f64) -> Result<()> {
    if !(a > 1.5 && b > 1.5) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Precondition(format!(
            "exponents must exceed 3/2 (a = {a}, b = {b})"
        )));
    }
    Ok(())
}

/// Predicted per-`N` multiplier
/// `ζ(a+1) ζ(b+1) / ζ(a+b+2) · σ_{-(a+b+1)s}(m)` where `h = m^s k`.
pub fn corollary_main(a: f64, b: f64, s: SExponent, h: u64) -> Result<f64> {
    check_corollary_exponents(a, b)?;
    let dec = decompose_h(h, s)?;
    let ratio = zeta(a + 1.0)? * zeta(b + 1.0)? / zeta(a + b + 2.0)?;
    Ok(ratio * sigma_real(dec.m, -(a + b + 1.0) * f64::from(s.get()))?)
}

/// `Σ_{n ≤ N} σ_{as}(n)/n^{as} · σ_{bs}(n+h)/(n+h)^{bs}` with the classical
/// `σ_t(n) = Σ_{d | n} d^t`, evaluated as `Σ_{d | n} d^{-t}`.
pub fn corollary_lhs(a: f64, b: f64, s: SExponent, h: u64, n_max: u64) -> Result<f64> {
    check_corollary_exponents(a, b)?;
    let (fa, gb) = corollary_tables(a, b, s, h, n_max)?;
    Ok(correlation_sum(
        |n| fa[n as usize],
        |n| gb[n as usize],
        h,
        n_max,
    ))
}

fn corollary_tables(
    a: f64,
    b: f64,
    s: SExponent,
    h: u64,
    n_max: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let limit = n_max
        .checked_add(h)
        .and_then(|l| usize::try_from(l).ok())
        .filter(|&l| l <= crate::crsum::TABLE_CELL_LIMIT)
        .ok_or_else(|| Error::Resource(format!("N + h = {n_max} + {h} too large")))?;
    let sf = f64::from(s.get());
    Ok((
        sigma_real_table(n_max as usize, -a * sf),
        sigma_real_table(limit, -b * sf),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremKind {
    T1,
    T2,
    #[serde(rename = "corollary")]
    Corollary,
}

/// The weight `w(r)` in the predicted main term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `Φ_s(r^s)`
    Phi,
    /// `c_r^s(h)`
    CrAtH,
}

/// The pair of functions being correlated.
#[derive(Debug, Clone)]
pub enum CorrelationSource {
    /// `σ_{as}(n)/n^{as}` against `σ_{bs}(n)/n^{bs}`.
    Corollary { a: f64, b: f64 },
    /// Two truncated expansions with a common `s`; `R` is the shorter one.
    Expansions {
        f: ExpansionCoefficients,
        g: ExpansionCoefficients,
    },
}

#[derive(Debug, Clone)]
pub struct CorrelationConfig {
    pub s: SExponent,
    pub h: u64,
    /// Strictly increasing values of `N`.
    pub schedule: Vec<u64>,
    pub source: CorrelationSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationRecord {
    #[serde(rename = "N")]
    pub n: u64,
    pub lhs: Sig17,
    pub main_term: Sig17,
    /// `None` when the main term vanishes.
    pub ratio: Option<Sig17>,
}

/// One record per `N` of the schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub theorem: TheoremKind,
    pub params: BTreeMap<String, serde_json::Value>,
    pub records: Vec<CorrelationRecord>,
    #[serde(skip)]
    pub s: SExponent,
    #[serde(skip)]
    pub h: u64,
    #[serde(skip)]
    pub weight_kind: WeightKind,
    /// Per-`N` multiplier of the predicted main term.
    #[serde(skip)]
    pub multiplier: f64,
}

impl CorrelationReport {
    pub fn final_ratio(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.ratio).map(|r| r.0)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// CSV with columns `N,lhs,main_term,ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "lhs", "main_term", "ratio"])?;
        for rec in &self.records {
            w.write_record([
                rec.n.to_string(),
                fmt_sig17(rec.lhs.0),
                fmt_sig17(rec.main_term.0),
                rec.ratio.map(|r| fmt_sig17(r.0)).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn check_schedule(schedule: &[u64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Precondition("N schedule is empty".into()));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "N schedule must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Computes `Σ_{n ≤ N} f(n) g(n + h)` and the predicted main term for every
/// `N` of the schedule.
pub fn run_correlation_report(config: &CorrelationConfig) -> Result<CorrelationReport> {
    check_schedule(&config.schedule)?;
    let n_top = *config.schedule.last().unwrap_or(&0);
    let h = config.h;
    let mut params = BTreeMap::new();
    params.insert("s".to_string(), config.s.get().into());
    params.insert("h".to_string(), h.into());

    let (theorem, weight_kind, multiplier, f_vals, g_vals) = match &config.source {
        CorrelationSource::Corollary { a, b } => {
            let multiplier = corollary_main(*a, *b, config.s, h)?;
            let (fa, gb) = corollary_tables(*a, *b, config.s, h, n_top)?;
            let dec = decompose_h(h, config.s)?;
            params.insert("a".to_string(), json_f64(*a));
            params.insert("b".to_string(), json_f64(*b));
            params.insert("m".to_string(), dec.m.into());
            params.insert("k".to_string(), dec.k.into());
            (
                TheoremKind::Corollary,
                WeightKind::CrAtH,
                multiplier,
                fa,
                gb,
            )
        }
        CorrelationSource::Expansions { f, g } => {
            let terms = f.len().min(g.len());
            let (theorem, weight, multiplier) = if h == 0 {
                (
                    TheoremKind::T1,
                    WeightKind::Phi,
                    theorem1_main(f, g, terms)?,
                )
            } else {
                (
                    TheoremKind::T2,
                    WeightKind::CrAtH,
                    theorem2_main(f, g, h, terms)?,
                )
            };
            if f.s() != config.s {
                return Err(Error::Precondition(
                    "config s differs from the families' s".into(),
                ));
            }
            params.insert("R".to_string(), terms.into());
            params.insert("f_mode".to_string(), serde_json::to_value(f.mode())?);
            params.insert("g_mode".to_string(), serde_json::to_value(g.mode())?);
            let top = n_top.checked_add(h).ok_or_else(|| overflow("N + h"))?;
            let mut fv = vec![0.0];
            fv.extend(f.evaluate_many(&(1..=n_top).collect::<Vec<_>>())?);
            let mut gv = vec![0.0];
            gv.extend(g.evaluate_many(&(1..=top).collect::<Vec<_>>())?);
            (theorem, weight, multiplier, fv, gv)
        }
    };
    params.insert("weight".to_string(), serde_json::to_value(weight_kind)?);
    params.insert("main_multiplier".to_string(), json_f64(multiplier));

    let records = config
        .schedule
        .iter()
        .map(|&n| {
            let lhs = correlation_sum(|i| f_vals[i as usize], |i| g_vals[i as usize], h, n);
            let main = n as f64 * multiplier;
            CorrelationRecord {
                n,
                lhs: Sig17(lhs),
                main_term: Sig17(main),
                ratio: (main != 0.0).then(|| Sig17(lhs / main)),
            }
        })
        .collect();

    Ok(CorrelationReport {
        theorem,
        params,
        records,
        s: config.s,
        h,
        weight_kind,
        multiplier,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LemmaId {
    /// `Σ_{n≤N} c_r^s(n) c_k^s(n) ≤ N τ_s(r^s) τ_s(k^s) (r^s, k^s)_s`
    L1,
    /// `Σ_{n≤N} c_r^s(n) c_k^s(n+h) = δ_{r,k} N c_r^s(h) + O(r^s k^s log r^s k^s)`
    L2,
    /// `|Σ_{n≤N} c_r^s(n) c_k^s(n+h)| ≤ √N √(N+h) √(r^s k^s) τ_s(r^s) τ_s(k^s)`
    L3,
    /// `Σ_{n≤N} c_r^s(n) c_k^s(n+h) ≤ 2N Φ_s(r^s) τ(k)` for `h ≤ N`
    L4,
}

impl LemmaId {
    pub const ALL: [LemmaId; 4] = [LemmaId::L1, LemmaId::L2, LemmaId::L3, LemmaId::L4];

    /// L2 is an O-statement: it is reported, never pass/fail.
    pub fn is_inequality(self) -> bool {
        self != LemmaId::L2
    }
}

impl std::fmt::Display for LemmaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches(['L', 'l']) {
            "1" => Ok(LemmaId::L1),
            "2" => Ok(LemmaId::L2),
            "3" => Ok(LemmaId::L3),
            "4" => Ok(LemmaId::L4),
            other => Err(Error::Parse(format!("unknown lemma {other:?}"))),
        }
    }
}

/// Parameter grid: all `1 ≤ r ≤ r_max`, `1 ≤ k ≤ k_max` crossed with the
/// listed `s`, `h` and `N` values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaGrid {
    pub r_max: u64,
    pub k_max: u64,
    pub s_values: Vec<SExponent>,
    pub h_values: Vec<u64>,
    pub n_values: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaPoint {
    pub r: u64,
    pub k: u64,
    pub s: u32,
    pub h: u64,
    #[serde(rename = "N")]
    pub n: u64,
    /// Exact integer quantity compared against the bound.
    pub measured: i128,
    pub bound: Sig17,
    pub normalized: Sig17,
    /// `None` for L2 and for L2 points excluded from normalization.
    #[serde(skip)]
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheckReport {
    pub lemma: LemmaId,
    pub grid: Vec<LemmaPoint>,
    pub max_normalized: Sig17,
}

impl LemmaCheckReport {
    pub fn violations(&self) -> impl Iterator<Item = &LemmaPoint> {
        self.grid.iter().filter(|p| p.holds == Some(false))
    }

    pub fn all_hold(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// CSV with columns `r,k,s,h,N,measured,bound,normalized`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "k", "s", "h", "N", "measured", "bound", "normalized"])?;
        for p in &self.grid {
            w.write_record([
                p.r.to_string(),
                p.k.to_string(),
                p.s.to_string(),
                p.h.to_string(),
                p.n.to_string(),
                p.measured.to_string(),
                fmt_sig17(p.bound.0),
                fmt_sig17(p.normalized.0),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_grid(lemma: LemmaId, grid: &LemmaGrid) -> Result<()> {
    if grid.r_max == 0 || grid.k_max == 0 {
        return Err(Error::Precondition("grid needs r_max, k_max >= 1".into()));
    }
    if grid.s_values.is_empty() || grid.n_values.is_empty() || grid.h_values.is_empty() {
        return Err(Error::Precondition("grid has an empty axis".into()));
    }
    if grid.n_values.contains(&0) {
        return Err(Error::Precondition("grid N values must be positive".into()));
    }
    if lemma == LemmaId::L4 {
        for &h in &grid.h_values {
            for &n in &grid.n_values {
                if h > n {
                    return Err(Error::Precondition(format!(
                        "L4 requires h <= N (h = {h}, N = {n})"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn to_i128(v: u128, what: &str) -> Result<i128> {
    i128::try_from(v).map_err(|_| overflow(what.to_string()))
}

/// Evaluates one lemma over a grid, with exact integer sums from a
/// [`CRSumTable`] per `s`.
///
/// L1 does not involve `h`; its points are reported with `h = 0`. L2 points
/// with `r^s k^s = 1` have a zero denominator and are skipped.
pub fn lemma_check(lemma: LemmaId, grid: &LemmaGrid) -> Result<LemmaCheckReport> {
    check_grid(lemma, grid)?;
    let h_values: Vec<u64> = if lemma == LemmaId::L1 {
        vec![0]
    } else {
        grid.h_values.clone()
    };
    let n_top = *grid.n_values.iter().max().unwrap_or(&0);
    let h_top = *h_values.iter().max().unwrap_or(&0);
    let rk_max = grid.r_max.max(grid.k_max);
    let mut points = Vec::new();

    for &s in &grid.s_values {
        let table = CRSumTable::build(rk_max, n_top + h_top, s)?;
        let sv = s.get();
        for r in 1..=grid.r_max {
            let rs = checked_pow(r, sv)?;
            let tau_r = tau_s(rs, s)? as i128;
            let row_r = table.row(r as usize).ok_or_else(|| overflow("table row"))?;
            for k in 1..=grid.k_max {
                let ks = checked_pow(k, sv)?;
                let tau_k = tau_s(ks, s)? as i128;
                let row_k = table.row(k as usize).ok_or_else(|| overflow("table row"))?;
                for &h in &h_values {
                    for &n in &grid.n_values {
                        let mut sum: i128 = 0;
                        for i in 1..=n as usize {
                            sum += i128::from(row_r[i]) * i128::from(row_k[i + h as usize]);
                        }
                        let point =
                            |measured: i128, bound: f64, normalized: f64, holds| LemmaPoint {
                                r,
                                k,
                                s: sv,
                                h,
                                n,
                                measured,
                                bound: Sig17(bound),
                                normalized: Sig17(normalized),
                                holds,
                            };
                        let ni = n as i128;
                        match lemma {
                            LemmaId::L1 => {
                                let g = gcd_s(rs, ks, s)? as i128;
                                let bound = ni * tau_r * tau_k * g;
                                points.push(point(
                                    sum,
                                    bound as f64,
                                    sum as f64 / bound as f64,
                                    Some(sum <= bound),
                                ));
                            }
                            LemmaId::L2 => {
                                let rks = rs as f64 * ks as f64;
                                if rs.checked_mul(ks) == Some(1) {
                                    continue;
                                }
                                let main = if r == k {
                                    ni * i128::from(row_r[h as usize])
                                } else {
                                    0
                                };
                                let measured = (sum - main).abs();
                                let denom = rks * rks.ln();
                                points.push(point(measured, denom, measured as f64 / denom, None));
                            }
                            LemmaId::L3 => {
                                let measured = sum.abs();
                                let rks = rs as i128 * ks as i128;
                                let nh = ni + h as i128;
                                let tt = tau_r * tau_k;
                                // measured ≤ √(N(N+h) r^s k^s) τ τ, compared in squares
                                let rhs_sq = (ni * nh)
                                    .checked_mul(rks)
                                    .and_then(|v| v.checked_mul(tt * tt))
                                    .ok_or_else(|| overflow("L3 bound"))?;
                                let holds = measured
                                    .checked_mul(measured)
                                    .map(|m2| m2 <= rhs_sq)
                                    .ok_or_else(|| overflow("L3 measured"))?;
                                let bound = (n as f64).sqrt()
                                    * ((n + h) as f64).sqrt()
                                    * (rks as f64).sqrt()
                                    * tt as f64;
                                points.push(point(
                                    measured,
                                    bound,
                                    measured as f64 / bound,
                                    Some(holds),
                                ));
                            }
                            LemmaId::L4 => {
                                let phi = to_i128(jordan_totient(r, s)?, "Φ_s(r^s)")?;
                                let bound = 2 * ni * phi * tau(k)? as i128;
                                points.push(point(
                                    sum,
                                    bound as f64,
                                    sum as f64 / bound as f64,
                                    Some(sum <= bound),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    let max_normalized = points
        .iter()
        .map(|p| p.normalized.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LemmaCheckReport {
        lemma,
        grid: points,
        max_normalized: Sig17(max_normalized),
    })
}

/// A point where the L2 normalized remainder grew by more than the allowed
/// slack relative to the largest value seen at smaller `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthViolation {
    pub r: u64,
    pub k: u64,
    pub s: u32,
    pub h: u64,
    pub n: u64,
    pub normalized: f64,
    pub earlier_max: f64,
}

/// For each `(r, k, s, h)` in an L2 report, checks that the normalized
/// remainder at every `N ≥ from_n` stays within `slack` times the maximum over
/// earlier `N ≥ from_n`.
///
/// The remainder is an exact integer, so an earlier maximum of 0 admits no
/// growth at all.
pub fn l2_growth_violations(
    report: &LemmaCheckReport,
    from_n: u64,
    slack: f64,
) -> Vec<GrowthViolation> {
    type Series = Vec<(u64, f64)>;
    let mut series: BTreeMap<(u64, u64, u32, u64), Series> = BTreeMap::new();
    for p in report.grid.iter().filter(|p| p.n >= from_n) {
        series
            .entry((p.r, p.k, p.s, p.h))
            .or_default()
            .push((p.n, p.normalized.0));
    }
    let mut out = Vec::new();
    for ((r, k, s, h), mut pts) in series {
        pts.sort_by_key(|&(n, _)| n);
        let mut earlier_max: Option<f64> = None;
        for (n, v) in pts {
            if let Some(m) = earlier_max {
                if v > slack * m {
                    out.push(GrowthViolation {
                        r,
                        k,
                        s,
                        h,
                        n,
                        normalized: v,
                        earlier_max: m,
                    });
                }
            }
            earlier_max = Some(earlier_max.map_or(v, |m| m.max(v)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{mobius, sigma_ks};
    use crate::crsum::cr_sum_exact;
    use crate::expansion::{sigma_expansion, ArgumentMode, Provenance};
    use approx::assert_abs_diff_eq;

    fn s(v: u32) -> SExponent {
        SExponent::new(v).unwrap()
    }

    fn family(sv: u32, coeffs: Vec<f64>) -> ExpansionCoefficients {
        ExpansionCoefficients::new(
            s(sv),
            ArgumentMode::PlainN,
            coeffs,
            Provenance::Shifted { h: 0 },
        )
        .unwrap()
    }

    #[test]
    fn correlation_sum_examples() {
        assert_eq!(correlation_sum(|_| 1.0, |_| 1.0, 7, 10), 10.0);
        assert_eq!(correlation_sum(|n| n as f64, |n| n as f64, 0, 3), 14.0);
        let sig = |n: u64| sigma_real(n, -1.0).unwrap();
        assert_abs_diff_eq!(correlation_sum(sig, sig, 1, 2), 3.5, epsilon = 1e-15);
    }

    #[test]
    fn theorem_main_examples() {
        let delta = family(2, vec![1.0, 0.0, 0.0]);
        assert_eq!(theorem1_main(&delta, &delta, 3).unwrap(), 1.0);
        for h in [0, 1, 5, 12] {
            assert_eq!(theorem2_main(&delta, &delta, h, 3).unwrap(), 1.0);
        }
        let zero = family(2, vec![0.0; 3]);
        assert_eq!(theorem1_main(&zero, &delta, 3).unwrap(), 0.0);

        let sig = sigma_expansion(1, s(1), 1000).unwrap();
        let mut prev = 0.0;
        for terms in [1, 10, 100, 1000] {
            let v = theorem1_main(&sig, &sig, terms).unwrap();
            assert!(v > prev);
            prev = v;
        }
        let zeta2: f64 = std::f64::consts::PI.powi(2) / 6.0;
        let expected: f64 = (1..=1000u64)
            .map(|r| zeta2 * zeta2 * f64::from(mobius(r).unwrap()) / (r as f64).powi(4))
            .sum();
        assert_abs_diff_eq!(
            theorem2_main(&sig, &sig, 1, 1000).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn theorem_main_preconditions() {
        let a = family(1, vec![1.0; 4]);
        let b = family(2, vec![1.0; 4]);
        assert!(matches!(
            theorem1_main(&a, &b, 4),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            theorem2_main(&a, &a, 1, 5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn theorem2_at_zero_is_theorem1() {
        for sv in 1..=3 {
            let f = family(sv, (1..=60).map(|r| 1.0 / (r as f64).powf(2.7)).collect());
            let g = family(
                sv,
                (1..=60)
                    .map(|r| (-1.0f64).powi(r) / (r as f64).powi(3))
                    .collect(),
            );
            assert_eq!(
                theorem2_main(&f, &g, 0, 60).unwrap().to_bits(),
                theorem1_main(&f, &g, 60).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(
            decompose_h(12, s(2)).unwrap(),
            HDecomposition { h: 12, m: 2, k: 3 }
        );
        assert_eq!(
            decompose_h(97, s(1)).unwrap(),
            HDecomposition { h: 97, m: 97, k: 1 }
        );
        assert_eq!(
            decompose_h(32, s(2)).unwrap(),
            HDecomposition { h: 32, m: 4, k: 2 }
        );
        assert!(decompose_h(0, s(2)).is_err());
    }

    #[test]
    fn decompose_round_trip_and_maximality() {
        for sv in 1..=3u32 {
            for h in 1..=10_000u64 {
                let d = decompose_h(h, s(sv)).unwrap();
                assert_eq!(d.m.pow(sv) * d.k, h);
                assert!(is_sth_power_free(d.k, s(sv)).unwrap());
                if h <= 1000 {
                    let best = (1..=h)
                        .filter(|m| {
                            let ms = m.pow(sv);
                            h % ms == 0 && is_sth_power_free(h / ms, s(sv)).unwrap()
                        })
                        .max()
                        .unwrap();
                    assert_eq!(best, d.m);
                }
            }
        }
    }

    #[test]
    fn corollary_main_examples() {
        let z3 = 1.202_056_903_159_594_3;
        let z6 = std::f64::consts::PI.powi(6) / 945.0;
        assert_abs_diff_eq!(
            corollary_main(2.0, 2.0, s(1), 1).unwrap(),
            z3 * z3 / z6,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            corollary_main(2.0, 2.0, s(1), 1).unwrap(),
            1.42031,
            epsilon = 1e-5
        );
        assert_abs_diff_eq!(
            corollary_main(2.0, 2.0, s(1), 2).unwrap(),
            z3 * z3 / z6 * 1.03125,
            epsilon = 1e-12
        );
        // h = 3 is square free, so m = 1 for s = 2
        let pure = zeta(3.5).unwrap() * zeta(2.7).unwrap() / zeta(6.2).unwrap();
        assert_abs_diff_eq!(
            corollary_main(2.5, 1.7, s(2), 3).unwrap(),
            pure,
            epsilon = 1e-14
        );
        assert!(matches!(
            corollary_main(1.5, 2.0, s(1), 1),
            Err(Error::Precondition(_))
        ));
        assert!(corollary_main(2.0, 1.2, s(1), 1).is_err());
    }

    #[test]
    fn corollary_lhs_examples() {
        assert_abs_diff_eq!(
            corollary_lhs(2.0, 2.0, s(1), 1, 1).unwrap(),
            1.25,
            epsilon = 1e-15
        );
        let brute: f64 = (1..=2u64)
            .map(|n| {
                let f = sigma_ks(n, 2, s(1)).unwrap() as f64 / (n * n) as f64;
                let g = sigma_ks(n + 1, 2, s(1)).unwrap() as f64 / ((n + 1) * (n + 1)) as f64;
                f * g
            })
            .sum();
        assert_abs_diff_eq!(
            corollary_lhs(2.0, 2.0, s(1), 1, 2).unwrap(),
            brute,
            epsilon = 1e-15
        );
    }

    #[test]
    fn report_with_constant_functions() {
        let one = family(1, vec![1.0]);
        let config = CorrelationConfig {
            s: s(1),
            h: 3,
            schedule: vec![10],
            source: CorrelationSource::Expansions {
                f: one.clone(),
                g: one.clone(),
            },
        };
        let report = run_correlation_report(&config).unwrap();
        assert_eq!(report.theorem, TheoremKind::T2);
        assert_eq!(report.final_ratio(), Some(1.0));

        let zero = family(1, vec![0.0]);
        let config = CorrelationConfig {
            source: CorrelationSource::Expansions {
                f: zero.clone(),
                g: one,
            },
            ..config
        };
        let report = run_correlation_report(&config).unwrap();
        assert_eq!(report.records[0].ratio, None);

        let bad = CorrelationConfig {
            schedule: vec![100, 10],
            ..config.clone()
        };
        assert!(matches!(
            run_correlation_report(&bad),
            Err(Error::Precondition(_))
        ));
        let empty = CorrelationConfig {
            schedule: vec![],
            ..config
        };
        assert!(run_correlation_report(&empty).is_err());
    }

    #[test]
    fn report_json_shape() {
        let config = CorrelationConfig {
            s: s(1),
            h: 2,
            schedule: vec![10, 100],
            source: CorrelationSource::Corollary { a: 2.0, b: 2.0 },
        };
        let report = run_correlation_report(&config).unwrap();
        let mut buf = Vec::new();
        report.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["theorem"], "corollary");
        assert_eq!(v["params"]["m"], 2);
        assert_eq!(v["records"].as_array().unwrap().len(), 2);
        assert_eq!(v["records"][1]["N"], 100);
        let lhs = v["records"][0]["lhs"].as_f64().unwrap();
        assert_eq!(lhs, corollary_lhs(2.0, 2.0, s(1), 2, 10).unwrap());
    }

    #[test]
    fn lemma_examples() {
        let grid = LemmaGrid {
            r_max: 1,
            k_max: 1,
            s_values: vec![s(2)],
            h_values: vec![0],
            n_values: vec![37],
        };
        let rep = lemma_check(LemmaId::L1, &grid).unwrap();
        assert_eq!(rep.grid[0].measured, 37);
        assert_eq!(rep.grid[0].bound.0, 37.0);
        assert!(rep.all_hold());

        let grid = LemmaGrid {
            r_max: 2,
            k_max: 2,
            s_values: vec![s(1)],
            h_values: vec![0],
            n_values: vec![100],
        };
        let rep = lemma_check(LemmaId::L1, &grid).unwrap();
        let p = rep.grid.iter().find(|p| p.r == 2 && p.k == 2).unwrap();
        assert_eq!(p.bound.0, 800.0);
        assert_eq!(p.measured, 100);
        assert!(rep.all_hold());
    }

    #[test]
    fn lemma_sums_match_direct_evaluation() {
        let grid = LemmaGrid {
            r_max: 4,
            k_max: 4,
            s_values: vec![s(2)],
            h_values: vec![0, 3],
            n_values: vec![50],
        };
        let rep = lemma_check(LemmaId::L4, &grid).unwrap();
        for p in &rep.grid {
            let direct: i128 = (1..=p.n)
                .map(|n| {
                    cr_sum_exact(p.r, n, s(2)).unwrap() * cr_sum_exact(p.k, n + p.h, s(2)).unwrap()
                })
                .sum();
            assert_eq!(p.measured, direct);
            // r = 1: the bound is 2N τ(k)
            if p.r == 1 {
                assert_eq!(p.bound.0, (2 * p.n * tau(p.k).unwrap()) as f64);
            }
        }
        let rep = lemma_check(LemmaId::L2, &grid).unwrap();
        assert!(rep.grid.iter().all(|p| p.r * p.k > 1));
        assert!(rep.grid.iter().all(|p| p.holds.is_none()));
        for p in rep.grid.iter().filter(|p| p.r == p.k && p.h == 0) {
            // diagonal main term N Φ_s(r^s)
            let direct: i128 = (1..=p.n)
                .map(|n| cr_sum_exact(p.r, n, s(2)).unwrap().pow(2))
                .sum();
            let main = p.n as i128 * jordan_totient(p.r, s(2)).unwrap() as i128;
            assert_eq!(p.measured, (direct - main).abs());
        }
    }

    #[test]
    fn lemma_preconditions() {
        let grid = LemmaGrid {
            r_max: 3,
            k_max: 3,
            s_values: vec![s(1)],
            h_values: vec![5],
            n_values: vec![4],
        };
        assert!(matches!(
            lemma_check(LemmaId::L4, &grid),
            Err(Error::Precondition(_))
        ));
        assert!(lemma_check(LemmaId::L3, &grid).is_ok());
        let empty = LemmaGrid {
            n_values: vec![],
            ..grid
        };
        assert!(lemma_check(LemmaId::L1, &empty).is_err());
        assert_eq!("L3".parse::<LemmaId>().unwrap(), LemmaId::L3);
        assert_eq!("4".parse::<LemmaId>().unwrap(), LemmaId::L4);
        assert!("5".parse::<LemmaId>().is_err());
    }

    #[test]
    fn growth_check_flags_increase() {
        let mk = |n, v| LemmaPoint {
            r: 2,
            k: 3,
            s: 1,
            h: 0,
            n,
            measured: 0,
            bound: Sig17(1.0),
            normalized: Sig17(v),
            holds: None,
        };
        let report = LemmaCheckReport {
            lemma: LemmaId::L2,
            grid: vec![mk(100, 9.0), mk(500, 1.0), mk(2000, 1.9), mk(4000, 4.5)],
            max_normalized: Sig17(9.0),
        };
        let v = l2_growth_violations(&report, 500, 2.0);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].n, 4000);
    }
}
