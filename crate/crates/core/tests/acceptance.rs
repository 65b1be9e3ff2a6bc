//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use crlab_core::arith::{
    checked_pow, gcd_s, jordan_totient, klee_phi, mobius, sigma_ks, sigma_real, SExponent,
};
use crlab_core::asymptotics::{
    corollary_lhs, corollary_main, l2_growth_violations, lemma_check, run_correlation_report,
    CorrelationConfig, CorrelationSource, LemmaGrid, LemmaId,
};
use crlab_core::crsum::{
    cr_sum_exact, cr_sum_exponential, orthogonality_grid, ramanujan_sum_oracle, CRSumTable,
};
use crlab_core::expansion::{
    mean_value_coefficient, mean_value_family, shift_coefficients, sigma_expansion,
};
use crlab_core::report::fmt_sig6;

const ZETA3_SQ_OVER_ZETA6_TIMES_SIGMA_M5_OF_2: f64 = 1.464_692_937_973_230_6;

type Job = dyn Fn() -> Vec<u8> + Sync;
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn s(v: u32) -> SExponent {
    SExponent::new(v).unwrap()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn euler_phi(n: u64) -> i128 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as i128
}

fn holder(r: u64, n: u64) -> i128 {
    let g = gcd(r, n);
    let q = r / g;
    i128::from(mobius(q).unwrap()) * euler_phi(r) / euler_phi(q)
}

fn dual_definition() -> Outcome {
    let (mut worst_re, mut worst_im) = (0.0f64, 0.0f64);
    for sv in 1..=3 {
        for r in 1..=30 {
            for n in 0..=200 {
                let z = cr_sum_exponential(r, n, s(sv)).unwrap();
                let exact = cr_sum_exact(r, n, s(sv)).unwrap() as f64;
                worst_re = worst_re.max((z.re - exact).abs());
                worst_im = worst_im.max(z.im.abs());
            }
        }
    }
    Outcome {
        pass: worst_re < 1e-6 && worst_im < 1e-9,
        detail: format!(
            "max |Re diff| = {}, max |Im| = {}",
            fmt_sig6(worst_re),
            fmt_sig6(worst_im)
        ),
    }
}

fn orthogonality() -> Outcome {
    let mut cells = 0;
    let mut bad = Vec::new();
    for sv in 1..=3 {
        for r in 1..=12 {
            for e in orthogonality_grid(r, s(sv)).unwrap() {
                cells += 1;
                if !e.holds() {
                    bad.push((r, sv, e.d, e.t));
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{cells} cells, {} mismatches {:?}",
            bad.len(),
            bad.iter().take(5).collect::<Vec<_>>()
        ),
    }
}

fn identities() -> Outcome {
    let mut failures = Vec::new();
    for sv in 1..=4 {
        for r in 1..=200u64 {
            let at_zero = cr_sum_exact(r, 0, s(sv)).unwrap();
            let j = jordan_totient(r, s(sv)).unwrap() as i128;
            let rs = checked_pow(r, sv).unwrap();
            let klee = klee_phi(rs, s(sv)).unwrap() as i128;
            if at_zero != j || j != klee {
                failures.push(format!("c_{r}^{sv}(0)"));
            }
        }
    }
    for sv in 1..=3 {
        for n in 1..=500u64 {
            let total: u128 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| jordan_totient(d, s(sv)).unwrap())
                .sum();
            if total != u128::from(n).pow(sv) {
                failures.push(format!("divisor sum of J_{sv} at {n}"));
            }
        }
        for m in 1..=100u64 {
            for n in 1..=100u64 {
                let (ms, ns) = (m.pow(sv) as u128, n.pow(sv) as u128);
                let g = u128::from(gcd_s(ms as u64, ns as u64, s(sv)).unwrap());
                let lcm = ms / gcd(ms as u64, ns as u64) as u128 * ns;
                if g * lcm != ms * ns {
                    failures.push(format!("gcd_s/lcm at ({m},{n},{sv})"));
                }
            }
        }
    }
    for r in 1..=100 {
        for n in 1..=100 {
            let c = cr_sum_exact(r, n, s(1)).unwrap();
            if c != holder(r, n) || c != ramanujan_sum_oracle(r, n).unwrap() {
                failures.push(format!("Hölder at ({r},{n})"));
            }
            for sv in 1..=3 {
                let c = cr_sum_exact(r, n, s(sv)).unwrap();
                if c.unsigned_abs() > sigma_ks(n, 1, s(sv)).unwrap() {
                    failures.push(format!("|c| bound at ({r},{n},{sv})"));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} failures {:?}",
            failures.len(),
            failures.iter().take(5).collect::<Vec<_>>()
        ),
    }
}

fn lemma_bounds() -> Outcome {
    let grid = LemmaGrid {
        r_max: 10,
        k_max: 10,
        s_values: vec![s(1), s(2)],
        h_values: vec![0, 1, 5],
        n_values: vec![100, 500, 2000],
    };
    let mut notes = Vec::new();
    let mut pass = true;
    for lemma in [LemmaId::L1, LemmaId::L3, LemmaId::L4] {
        let rep = lemma_check(lemma, &grid).unwrap();
        let violations = rep.violations().count();
        pass &= violations == 0;
        notes.push(format!(
            "{lemma}: {} points, {violations} violations, max ratio {}",
            rep.grid.len(),
            fmt_sig6(rep.max_normalized.0)
        ));
    }
    let l2 = lemma_check(LemmaId::L2, &grid).unwrap();
    let finite = l2.grid.iter().all(|p| p.normalized.0.is_finite());
    let growth = l2_growth_violations(&l2, 500, 2.0);
    pass &= finite && growth.is_empty();
    let per_n: Vec<String> = grid
        .n_values
        .iter()
        .map(|&n| {
            let m = l2
                .grid
                .iter()
                .filter(|p| p.n == n)
                .map(|p| p.normalized.0)
                .fold(0.0, f64::max);
            format!("N={n}: {}", fmt_sig6(m))
        })
        .collect();
    notes.push(format!(
        "L2: finite {finite}, {} of {} (r,k,s,h) series grow beyond 2x after N=500, grid max by N [{}]",
        growth.len(),
        l2.grid.len() / grid.n_values.len(),
        per_n.join(", ")
    ));
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn expansion_convergence() -> Outcome {
    let family = sigma_expansion(1, s(1), 10_000).unwrap();
    let max_err = |terms: usize| {
        (1..=50u64)
            .map(|n| {
                let v = family.evaluate_truncated(n, terms).unwrap();
                (v - sigma_real(n, -1.0).unwrap()).abs()
            })
            .fold(0.0, f64::max)
    };
    let (e3, e4) = (max_err(1_000), max_err(10_000));
    Outcome {
        pass: e4 <= 0.05 && e4 < e3,
        detail: format!("max error R=1e3: {}, R=1e4: {}", fmt_sig6(e3), fmt_sig6(e4)),
    }
}

fn mean_value_exactness() -> Outcome {
    let mut bad = Vec::new();
    for sv in 1..=2u32 {
        // lcm(1..=6)^s covers every period r^s
        let samples = 60u64.pow(sv) * 3;
        for q in 1..=6u64 {
            let f = |n: u64| cr_sum_exact(q, n, s(sv)).unwrap() as f64;
            for r in 1..=6u64 {
                let mv = mean_value_coefficient(f, r, s(sv), samples).unwrap();
                let expected = if q == r { 1.0 } else { 0.0 };
                if mv.value != expected || !mv.period_exact {
                    bad.push((q, r, sv, mv.value));
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} inexact coefficients {:?}",
            bad.len(),
            bad.iter().take(5).collect::<Vec<_>>()
        ),
    }
}

fn corollary_trend() -> Outcome {
    let (a, b, h) = (2.0, 2.0, 2);
    let main = corollary_main(a, b, s(1), h).unwrap();
    let rel = (main - ZETA3_SQ_OVER_ZETA6_TIMES_SIGMA_M5_OF_2).abs()
        / ZETA3_SQ_OVER_ZETA6_TIMES_SIGMA_M5_OF_2;
    let report = run_correlation_report(&CorrelationConfig {
        s: s(1),
        h,
        schedule: vec![1_000, 100_000],
        source: CorrelationSource::Corollary { a, b },
    })
    .unwrap();
    let r3 = report.records[0].ratio.unwrap().0;
    let r5 = report.records[1].ratio.unwrap().0;
    let direct = corollary_lhs(a, b, s(1), h, 100_000).unwrap() / (100_000.0 * main);
    let pass = rel < 1e-10
        && (0.9..=1.1).contains(&r5)
        && (r5 - 1.0).abs() < (r3 - 1.0).abs()
        && direct.to_bits() == r5.to_bits();
    Outcome {
        pass,
        detail: format!(
            "constant {main:.12} (rel err {}), ratio N=1e3: {}, N=1e5: {}",
            fmt_sig6(rel),
            fmt_sig6(r3),
            fmt_sig6(r5)
        ),
    }
}

fn shift_tracking() -> Outcome {
    // σ(n)/n with coefficients extracted over a common period of r ≤ 12
    let terms = 12;
    let samples = 27_720;
    let n_max = 200u64;
    let f = |n: u64| sigma_real(n, -1.0).unwrap();
    let family = mean_value_family(f, terms, s(1), samples).unwrap();
    let tail = (1..=n_max + 3)
        .map(|n| (f(n) - family.evaluate(n).unwrap()).abs())
        .fold(0.0, f64::max);
    let h0 = shift_coefficients(&family, 0).unwrap();
    let identity = h0
        .coefficients()
        .iter()
        .zip(family.coefficients())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    let mut pass = identity;
    let mut notes = vec![
        format!("h=0 identical: {identity}"),
        format!("tail {}", fmt_sig6(tail)),
    ];
    for h in [1u64, 3] {
        let shifted = shift_coefficients(&family, h).unwrap();
        let err = (1..=n_max)
            .map(|n| (shifted.evaluate(n).unwrap() - f(n + h)).abs())
            .fold(0.0, f64::max);
        pass &= err <= tail;
        // coefficient-level identity M(f(n+h) c_r(n)) / φ(r) = f̂(r) c_r(h) / φ(r)
        let shifted_direct = mean_value_family(|n| f(n + h), terms, s(1), samples).unwrap();
        let coeff_gap = shifted
            .coefficients()
            .iter()
            .zip(shifted_direct.coefficients())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        notes.push(format!(
            "h={h}: pointwise error {}, coefficient gap vs direct extraction {}",
            fmt_sig6(err),
            fmt_sig6(coeff_gap)
        ));
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn determinism() -> Outcome {
    let in_pool = |threads: usize, job: &Job| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(job)
    };
    let table = || {
        let mut buf = Vec::new();
        CRSumTable::build(60, 5_000, s(2))
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        buf
    };
    let lemmas = || {
        let grid = LemmaGrid {
            r_max: 6,
            k_max: 6,
            s_values: vec![s(1), s(2)],
            h_values: vec![0, 3],
            n_values: vec![100, 1000],
        };
        let mut buf = Vec::new();
        lemma_check(LemmaId::L3, &grid)
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        buf
    };
    let correlate = || {
        let config = CorrelationConfig {
            s: s(1),
            h: 2,
            schedule: vec![1_000, 50_000],
            source: CorrelationSource::Corollary { a: 2.0, b: 2.0 },
        };
        let mut buf = Vec::new();
        run_correlation_report(&config)
            .unwrap()
            .write_json(&mut buf)
            .unwrap();
        buf
    };
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, job) in [
        ("table", &table as &Job),
        ("lemmas", &lemmas),
        ("correlate", &correlate),
    ] {
        let first = in_pool(1, job);
        let same = [1, 2, 8].iter().all(|&t| in_pool(t, job) == first);
        pass &= same;
        notes.push(format!("{name}: {} bytes, identical {same}", first.len()));
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("dual-definition agreement", dual_definition),
        ("orthogonality, exact", orthogonality),
        ("identity suite", identities),
        ("lemma bounds", lemma_bounds),
        ("sigma expansion convergence", expansion_convergence),
        ("mean-value extraction exactness", mean_value_exactness),
        ("corollary trend", corollary_trend),
        ("shift tracking", shift_tracking),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{verdict}] {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
