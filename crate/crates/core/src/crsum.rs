//! Cohen-Ramanujan sums `c_r^s(n)`.
//!
//! Two independent routes are provided: the exact divisor representation
//! `c_r^s(n) = Σ_{d | r, d^s | n} μ(r/d) d^s` and the literal exponential sum
//! over an s-reduced residue system modulo `r^s`. The first is the production
//! path; the second exists to check it.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::arith::{
    checked_pow, checked_pow_wide, factorize, gcd_s, is_sth_power_free, jordan_totient, mobius,
    mobius_table, Factorization, SExponent,
};
use crate::error::{overflow, Error, Result};

/// Largest modulus `r^s` accepted by the exponential route.
pub const EXPONENTIAL_MODULUS_LIMIT: u64 = 10_000_000;

/// Largest number of cells a [`CRSumTable`] may hold (1 GiB of `i64`).
pub const TABLE_CELL_LIMIT: usize = 1 << 27;

/// Largest period `r^s` scanned by [`orthogonality_value`].
pub const ORTHOGONALITY_PERIOD_LIMIT: u64 = 100_000_000;

/// `c_r^s(n)` from the divisor representation, in exact integers.
///
/// For `n = 0` every divisor of `r` contributes, which gives `J_s(r)`.
pub fn cr_sum_exact(r: u64, n: u64, s: SExponent) -> Result<i128> {
    if r == 0 {
        return Err(Error::Domain("c_r^s(n) needs r >= 1".into()));
    }
    cr_sum_exact_of(&factorize(r)?, n, s)
}

/// As [`cr_sum_exact`] with `r` already factored.
pub fn cr_sum_exact_of(r: &Factorization, n: u64, s: SExponent) -> Result<i128> {
    let primes: Vec<u64> = r.primes().collect();
    // μ(r/d) vanishes unless r/d is squarefree, so d = r / (product of a
    // subset of the primes of r).
    let mut total: i128 = 0;
    for mask in 0u32..(1u32 << primes.len()) {
        let mut d = r.n();
        for (i, &p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d /= p;
            }
        }
        let term = if n == 0 {
            let ds = checked_pow_wide(d as u128, s.get())?;
            i128::try_from(ds).map_err(|_| overflow("d^s exceeds i128"))?
        } else {
            match d.checked_pow(s.get()) {
                Some(ds) if n.is_multiple_of(ds) => ds as i128,
                _ => continue,
            }
        };
        let signed = if mask.count_ones() % 2 == 0 {
            term
        } else {
            -term
        };
        total = total
            .checked_add(signed)
            .ok_or_else(|| overflow("c_r^s(n) exceeds i128"))?;
    }
    Ok(total)
}

/// The s-reduced residue system modulo `r^s`: all `1 ≤ h ≤ r^s` with
/// `(h, r^s)_s = 1`.
#[derive(Debug, Clone)]
pub struct SReducedResidues {
    r: u64,
    s: SExponent,
    modulus: u64,
    residues: Vec<u64>,
}

impl SReducedResidues {
    pub fn new(r: u64, s: SExponent) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("residue system needs r >= 1".into()));
        }
        let modulus = match r.checked_pow(s.get()) {
            Some(m) if m <= EXPONENTIAL_MODULUS_LIMIT => m,
            _ => {
                return Err(Error::Resource(format!(
                    "{r}^{s} exceeds the exponential-sum limit {EXPONENTIAL_MODULUS_LIMIT}"
                )))
            }
        };
        // (h, M)_s only depends on gcd(h, M)
        let mut by_gcd: HashMap<u64, bool> = HashMap::new();
        let mut residues = Vec::new();
        for h in 1..=modulus {
            let g = h.gcd(&modulus);
            let coprime = match by_gcd.get(&g) {
                Some(&c) => c,
                None => {
                    let c = gcd_s(h, modulus, s)? == 1;
                    by_gcd.insert(g, c);
                    c
                }
            };
            if coprime {
                residues.push(h);
            }
        }
        Ok(SReducedResidues {
            r,
            s,
            modulus,
            residues,
        })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> SExponent {
        self.s
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// `Σ_h e^{2πi n h / r^s}` over the residue system.
    pub fn exponential_sum(&self, n: u64) -> Complex64 {
        let m = self.modulus as u128;
        let n_red = n as u128 % m;
        let mut acc = Complex64::new(0.0, 0.0);
        for &h in &self.residues {
            let phase = (n_red * h as u128 % m) as f64 / self.modulus as f64;
            let (sin, cos) = (TAU * phase).sin_cos();
            acc += Complex64::new(cos, sin);
        }
        acc
    }
}

/// `c_r^s(n)` as the literal exponential sum. Costs `O(r^s)`; limited to
/// `r^s ≤` [`EXPONENTIAL_MODULUS_LIMIT`].
pub fn cr_sum_exponential(r: u64, n: u64, s: SExponent) -> Result<Complex64> {
    Ok(SReducedResidues::new(r, s)?.exponential_sum(n))
}

/// Classical Ramanujan sum by Hölder's evaluation
/// `c_r(n) = μ(r/g) φ(r) / φ(r/g)`, `g = gcd(r, n)`.
pub fn ramanujan_sum_oracle(r: u64, n: u64) -> Result<i128> {
    if r == 0 {
        return Err(Error::Domain("c_r(n) needs r >= 1".into()));
    }
    let g = r.gcd(&n);
    let q = r / g;
    let phi_r = jordan_totient(r, SExponent::ONE)? as i128;
    let phi_q = jordan_totient(q, SExponent::ONE)? as i128;
    Ok(i128::from(mobius(q)?) * (phi_r / phi_q))
}

/// `(1/r^s) Σ_{m=1}^{r^s} c_d^s(m) c_t^s(m)` as an exact rational.
///
/// For `d, t | r` this equals `Φ_s(d^s)` when `d = t` and 0 otherwise.
pub fn orthogonality_value(r: u64, d: u64, t: u64, s: SExponent) -> Result<Ratio<i128>> {
    let (sum, period) = orthogonality_sum(r, d, t, s)?;
    Ok(Ratio::new(sum, period as i128))
}

fn orthogonality_sum(r: u64, d: u64, t: u64, s: SExponent) -> Result<(i128, u64)> {
    if r == 0 || d == 0 || t == 0 || !r.is_multiple_of(d) || !r.is_multiple_of(t) {
        return Err(Error::Precondition(format!(
            "orthogonality needs d | r and t | r (r = {r}, d = {d}, t = {t})"
        )));
    }
    let period = match r.checked_pow(s.get()) {
        Some(p) if p <= ORTHOGONALITY_PERIOD_LIMIT => p,
        _ => return Err(Error::Resource(format!("period {r}^{s} too large"))),
    };
    let (fd, ft) = (factorize(d)?, factorize(t)?);
    let mut sum: i128 = 0;
    for m in 1..=period {
        let prod = cr_sum_exact_of(&fd, m, s)?
            .checked_mul(cr_sum_exact_of(&ft, m, s)?)
            .ok_or_else(|| overflow("orthogonality product"))?;
        sum = sum
            .checked_add(prod)
            .ok_or_else(|| overflow("orthogonality sum"))?;
    }
    Ok((sum, period))
}

/// One `(d, t)` cell of an orthogonality check modulo `r^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityEntry {
    pub d: u64,
    pub t: u64,
    /// `Σ_{m ≤ r^s} c_d^s(m) c_t^s(m)`
    pub inner_sum: i128,
    pub value: Ratio<i128>,
    /// `Φ_s(d^s)` on the diagonal, 0 off it.
    pub expected: i128,
}

impl OrthogonalityEntry {
    /// Exact agreement, including divisibility of the inner sum by `r^s`.
    pub fn holds(&self) -> bool {
        self.value.is_integer() && *self.value.numer() == self.expected
    }
}

/// Orthogonality entries for every ordered pair of divisors of `r`.
pub fn orthogonality_grid(r: u64, s: SExponent) -> Result<Vec<OrthogonalityEntry>> {
    let divs = factorize(r)?.divisors();
    let mut out = Vec::with_capacity(divs.len() * divs.len());
    for &d in &divs {
        for &t in &divs {
            let (inner_sum, period) = orthogonality_sum(r, d, t, s)?;
            let expected = if d == t {
                i128::try_from(jordan_totient(d, s)?).map_err(|_| overflow("J_s(d)"))?
            } else {
                0
            };
            out.push(OrthogonalityEntry {
                d,
                t,
                inner_sum,
                value: Ratio::new(inner_sum, period as i128),
                expected,
            });
        }
    }
    Ok(out)
}

/// Checks `c_r^s(m^s k) = c_r^s(m^s)` for s-th power free `k`.
pub fn power_free_absorption_check(r: u64, m: u64, k: u64, s: SExponent) -> Result<bool> {
    if r == 0 || m == 0 {
        return Err(Error::Precondition("absorption needs r, m >= 1".into()));
    }
    if k == 0 || !is_sth_power_free(k, s)? {
        return Err(Error::Precondition(format!("{k} is not {s}-th power free")));
    }
    let ms = checked_pow(m, s.get())?;
    let h = ms.checked_mul(k).ok_or_else(|| overflow("m^s k"))?;
    let rf = factorize(r)?;
    Ok(cr_sum_exact_of(&rf, h, s)? == cr_sum_exact_of(&rf, ms, s)?)
}

/// Immutable table of `c_r^s(n)` for `1 ≤ r ≤ r_max`, `0 ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CRSumTable {
    s: SExponent,
    r_max: usize,
    n_max: usize,
    values: Vec<i64>,
}

impl CRSumTable {
    /// Builds the table by striding: for every `d | r` with `μ(r/d) ≠ 0`,
    /// `μ(r/d) d^s` is added to the cells `n ≡ 0 (mod d^s)` of row `r`.
    ///
    /// Rows are filled in parallel; the result does not depend on the number
    /// of threads.
    pub fn build(r_max: u64, n_max: u64, s: SExponent) -> Result<Self> {
        if r_max == 0 {
            return Err(Error::Domain("table needs r_max >= 1".into()));
        }
        let width = usize::try_from(n_max)
            .ok()
            .and_then(|n| n.checked_add(1))
            .ok_or_else(|| Error::Resource("n_max too large".into()))?;
        let rows = usize::try_from(r_max).map_err(|_| Error::Resource("r_max too large".into()))?;
        let cells = rows
            .checked_mul(width)
            .filter(|&c| c <= TABLE_CELL_LIMIT)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "{r_max} x {width} cells exceed the table budget of {TABLE_CELL_LIMIT}"
                ))
            })?;

        let mu = mobius_table(rows);
        let mut divisors: Vec<Vec<u32>> = vec![Vec::new(); rows + 1];
        for d in 1..=rows {
            for r in (d..=rows).step_by(d) {
                if mu[r / d] != 0 {
                    divisors[r].push(d as u32);
                }
            }
        }

        let mut values = vec![0i64; cells];
        values
            .par_chunks_mut(width)
            .enumerate()
            .try_for_each(|(i, row)| -> Result<()> {
                let r = i + 1;
                for &d in &divisors[r] {
                    let sign = i64::from(mu[r / d as usize]);
                    let ds = (d as i64)
                        .checked_pow(s.get())
                        .ok_or_else(|| overflow(format!("{d}^{s} exceeds i64")))?;
                    let step = usize::try_from(ds).unwrap_or(usize::MAX);
                    let mut n = 0usize;
                    while n < width {
                        row[n] = row[n]
                            .checked_add(sign * ds)
                            .ok_or_else(|| overflow("table cell exceeds i64"))?;
                        n = match n.checked_add(step) {
                            Some(next) => next,
                            None => break,
                        };
                    }
                }
                Ok(())
            })?;

        Ok(CRSumTable {
            s,
            r_max: rows,
            n_max: width - 1,
            values,
        })
    }

    pub fn s(&self) -> SExponent {
        self.s
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `c_r^s(n)`, or `None` outside the table.
    #[inline]
    pub fn get(&self, r: usize, n: usize) -> Option<i64> {
        if r == 0 || r > self.r_max || n > self.n_max {
            return None;
        }
        Some(self.values[(r - 1) * (self.n_max + 1) + n])
    }

    /// Row `r`, indexed by `n = 0..=n_max`.
    pub fn row(&self, r: usize) -> Option<&[i64]> {
        if r == 0 || r > self.r_max {
            return None;
        }
        let width = self.n_max + 1;
        Some(&self.values[(r - 1) * width..r * width])
    }

    /// CSV with header `r,n,value`, one row per cell in `(r, n)` order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "n", "value"])?;
        for r in 1..=self.r_max {
            for (n, v) in self.row(r).unwrap_or(&[]).iter().enumerate() {
                w.write_record([r.to_string(), n.to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
