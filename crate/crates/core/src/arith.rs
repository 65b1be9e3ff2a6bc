//! Elementary arithmetic functions: factorization, Möbius, the generalized
//! GCD `(m, n)_s`, Jordan's totient, Klee's function, s-th power divisor
//! counts and sums, real-exponent divisor sums, ζ and harmonic sums.
//!
//! Every divisor-indexed function is evaluated from the prime-power
//! decomposition rather than by scanning `1..=n`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{overflow, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// The fixed exponent `s ≥ 1` of the generalized GCD theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SExponent(u32);

impl SExponent {
    pub const ONE: SExponent = SExponent(1);

    pub fn new(s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::Domain("exponent s must be at least 1".into()));
        }
        Ok(SExponent(s))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for SExponent {
    type Error = Error;

    fn try_from(s: u32) -> Result<Self> {
        SExponent::new(s)
    }
}

impl From<SExponent> for u32 {
    fn from(s: SExponent) -> u32 {
        s.0
    }
}

impl std::fmt::Display for SExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// A positive integer together with its prime-power decomposition.
///
/// Primes are strictly increasing and every exponent is at least one; the
/// factor list is empty exactly when `n == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    #[inline]
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factor `n` by trial division up to `√n`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let twos = m.trailing_zeros();
    if twos > 0 {
        factors.push((2, twos));
        m >>= twos;
    }
    let mut p = 3u64;
    while p <= m / p {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 2;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}

/// Checked `base^exp` in 64 bits.
pub fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| overflow(format!("{base}^{exp} exceeds 64 bits")))
}

/// Checked `base^exp` in 128 bits.
pub fn checked_pow_wide(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp)
        .ok_or_else(|| overflow(format!("{base}^{exp} exceeds 128 bits")))
}

pub fn mobius(n: u64) -> Result<i8> {
    Ok(mobius_of(&factorize(n)?))
}

pub fn mobius_of(f: &Factorization) -> i8 {
    if !f.is_squarefree() {
        0
    } else if f.omega().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Möbius values for `0..=limit` (index 0 holds 0) by a linear sieve.
pub fn mobius_table(limit: usize) -> Vec<i8> {
    let mut mu = vec![0i8; limit + 1];
    if limit == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut is_composite = vec![false; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=limit {
        if !is_composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            is_composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Largest s-th power dividing `n`, read off a factorization.
fn largest_sth_power_divisor(f: &Factorization, s: SExponent) -> Result<u64> {
    let s = s.get();
    f.factors().iter().try_fold(1u64, |acc, &(p, e)| {
        let pk = checked_pow(p, (e / s) * s)?;
        Ok(acc * pk)
    })
}

/// Generalized GCD `(m, n)_s`: the largest `l^s` dividing both `m` and `n`.
///
/// Every integer divides 0, so `gcd_s(0, n, s)` is the largest s-th power
/// dividing `n`.
pub fn gcd_s(m: u64, n: u64, s: SExponent) -> Result<u64> {
    if m == 0 && n == 0 {
        return Err(Error::Domain(
            "generalized gcd needs m, n not both zero".into(),
        ));
    }
    let g = m.gcd(&n);
    largest_sth_power_divisor(&factorize(g)?, s)
}

pub fn is_s_prime(m: u64, n: u64, s: SExponent) -> Result<bool> {
    Ok(gcd_s(m, n, s)? == 1)
}

/// True when no `l^s` with `l > 1` divides `k`.
pub fn is_sth_power_free(k: u64, s: SExponent) -> Result<bool> {
    let f = factorize(k)?;
    Ok(f.factors().iter().all(|&(_, e)| e < s.get()))
}

/// Jordan's totient `J_s(n) = n^s ∏_{p | n} (1 - p^{-s})`.
pub fn jordan_totient(n: u64, s: SExponent) -> Result<u128> {
    jordan_totient_of(&factorize(n)?, s)
}

pub fn jordan_totient_of(f: &Factorization, s: SExponent) -> Result<u128> {
    let s = s.get();
    f.factors().iter().try_fold(1u128, |acc, &(p, e)| {
        let ps = checked_pow_wide(p as u128, s)?;
        let head = checked_pow_wide(
            p as u128,
            (e - 1).checked_mul(s).ok_or_else(|| overflow("exponent"))?,
        )?;
        acc.checked_mul(head)
            .and_then(|v| v.checked_mul(ps - 1))
            .ok_or_else(|| overflow(format!("J_{s}({}) exceeds 128 bits", f.n())))
    })
}

/// Klee's function: `#{1 ≤ m ≤ n : (m, n)_s = 1}`.
pub fn klee_phi(n: u64, s: SExponent) -> Result<u64> {
    let f = factorize(n)?;
    let mut value = n;
    for &(p, e) in f.factors() {
        if e >= s.get() {
            let ps = checked_pow(p, s.get())?;
            value = value / ps * (ps - 1);
        }
    }
    Ok(value)
}

/// `τ_s(n)`: the number of `l` with `l^s | n`.
pub fn tau_s(n: u64, s: SExponent) -> Result<u64> {
    Ok(tau_s_of(&factorize(n)?, s))
}

pub fn tau_s_of(f: &Factorization, s: SExponent) -> u64 {
    f.factors()
        .iter()
        .map(|&(_, e)| u64::from(e / s.get()) + 1)
        .product()
}

/// Ordinary divisor count `τ(n)`.
pub fn tau(n: u64) -> Result<u64> {
    tau_s(n, SExponent::ONE)
}

/// `σ_{k,s}(n) = Σ_{d^s | n} (d^s)^k`, exact.
pub fn sigma_ks(n: u64, k: u32, s: SExponent) -> Result<u128> {
    if k == 0 {
        return Err(Error::Domain("sigma_ks needs k >= 1".into()));
    }
    let f = factorize(n)?;
    let step = s
        .get()
        .checked_mul(k)
        .ok_or_else(|| overflow("exponent k*s"))?;
    let mut total = 1u128;
    for &(p, e) in f.factors() {
        let q = checked_pow_wide(p as u128, step)?;
        let mut local = 1u128;
        let mut term = 1u128;
        for _ in 0..(e / s.get()) {
            term = term
                .checked_mul(q)
                .ok_or_else(|| overflow("sigma_ks term"))?;
            local = local
                .checked_add(term)
                .ok_or_else(|| overflow("sigma_ks sum"))?;
        }
        total = total
            .checked_mul(local)
            .ok_or_else(|| overflow(format!("sigma_({k},{s})({n}) exceeds 128 bits")))?;
    }
    Ok(total)
}

/// Classical divisor sum with real exponent, `Σ_{d | n} d^x`, accumulated in
/// increasing `d`.
pub fn sigma_real(n: u64, x: f64) -> Result<f64> {
    let divs = factorize(n)?.divisors();
    Ok(divs.iter().map(|&d| (d as f64).powf(x)).sum())
}

/// `Σ_{d | n} d^x` for every `n` in `0..=limit` (index 0 holds 0).
///
/// Contributions arrive in increasing `d`, so each entry is bit-identical to
/// [`sigma_real`].
pub fn sigma_real_table(limit: usize, x: f64) -> Vec<f64> {
    let mut acc = vec![0.0f64; limit + 1];
    for d in 1..=limit {
        let w = (d as f64).powf(x);
        for m in (d..=limit).step_by(d) {
            acc[m] += w;
        }
    }
    acc
}

// B_2 .. B_18
const BERNOULLI_EVEN: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

const ZETA_TAIL_TOLERANCE: f64 = 1e-12;

/// Euler–Maclaurin correction terms after the `N^{-x}/2` boundary term.
/// Returns the sum of the first `count` terms and the magnitude of the next.
fn zeta_corrections(x: f64, cutoff: f64, count: usize) -> (f64, f64) {
    let mut sum = 0.0;
    // rising factorial x(x+1)...(x+2j-2) / (2j)!, times N^{-x-2j+1}
    let mut coeff = x / 2.0 * cutoff.powf(-x - 1.0);
    for (j, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b * coeff;
        if j == count {
            return (sum, term.abs());
        }
        sum += term;
        let jj = (j + 1) as f64;
        coeff *= (x + 2.0 * jj - 1.0) * (x + 2.0 * jj)
            / ((2.0 * jj + 1.0) * (2.0 * jj + 2.0))
            / (cutoff * cutoff);
    }
    unreachable!("count must be below the Bernoulli table length")
}

/// Riemann ζ for real `x > 1`.
///
/// Partial sum below a cutoff `N`, the integral tail `N^{1-x}/(x-1)`, the
/// boundary term `N^{-x}/2`, and Euler–Maclaurin corrections. `N` is doubled
/// until the first omitted correction falls below `1e-12`.
pub fn zeta(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 1.0) {
        return Err(Error::Domain(format!("zeta needs finite x > 1, got {x}")));
    }
    const TERMS: usize = 7;
    let mut cutoff = 8u64;
    loop {
        let nf = cutoff as f64;
        let (correction, next) = zeta_corrections(x, nf, TERMS);
        if next < ZETA_TAIL_TOLERANCE || cutoff >= 1 << 20 {
            // small terms first
            let mut head = 0.0;
            for n in (1..cutoff).rev() {
                head += (n as f64).powf(-x);
            }
            let tail = nf.powf(1.0 - x) / (x - 1.0) + 0.5 * nf.powf(-x) + correction;
            return Ok(head + tail);
        }
        cutoff *= 2;
    }
}

/// `Σ_{n ≤ x} 1/n`, accumulated in increasing `n`.
pub fn harmonic_sum(x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 1.0) {
        return Err(Error::Domain(format!(
            "harmonic sum needs finite x >= 1, got {x}"
        )));
    }
    let upper = x.floor() as u64;
    Ok((1..=upper).map(|n| 1.0 / n as f64).sum())
}
