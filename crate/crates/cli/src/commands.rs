use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crlab_core::arith::{sigma_real, SExponent};
use crlab_core::asymptotics::{
    decompose_h, lemma_check, run_correlation_report, CorrelationConfig, CorrelationSource,
    LemmaGrid, LemmaId,
};
use crlab_core::crsum::{cr_sum_exact, cr_sum_exponential, orthogonality_grid, CRSumTable};
use crlab_core::expansion::{
    mean_value_family, shift_coefficients, sigma_expansion, ArgumentMode, ExpansionCoefficients,
    Provenance,
};
use crlab_core::report::{fmt_sig17, fmt_sig6, Sig17};

use crate::output::{Failure, Sink};
use crate::{Format, Func, Method};

const AGREEMENT_TOL: f64 = 1e-6;
const IMAGINARY_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct CrsumRecord {
    r: u64,
    n: u64,
    s: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<i128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponential_re: Option<Sig17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponential_im: Option<Sig17>,
}

pub fn crsum(sink: &Sink, r: u64, n: u64, s: SExponent, method: Method) -> Result<bool, Failure> {
    let exact = match method {
        Method::Exact | Method::Both => Some(cr_sum_exact(r, n, s)?),
        Method::Exponential => None,
    };
    let z = match method {
        Method::Exponential | Method::Both => Some(cr_sum_exponential(r, n, s)?),
        Method::Exact => None,
    };
    let agree = match (exact, z) {
        (Some(e), Some(z)) => {
            (z.re - e as f64).abs() <= AGREEMENT_TOL && z.im.abs() <= IMAGINARY_TOL
        }
        _ => true,
    };
    match sink.format {
        Format::Json => sink.json(&CrsumRecord {
            r,
            n,
            s: s.get(),
            exact,
            exponential_re: z.map(|z| Sig17(z.re)),
            exponential_im: z.map(|z| Sig17(z.im)),
        })?,
        Format::Csv => {
            let line = match (exact, z) {
                (Some(e), None) => e.to_string(),
                (None, Some(z)) => format!("{:.6}", z.re),
                (Some(e), Some(z)) => format!("{e} / {:.6}", z.re),
                (None, None) => unreachable!(),
            };
            sink.emit(|buf| Ok(writeln!(buf, "{line}")?))?;
        }
    }
    if !agree {
        let z = z.unwrap_or_default();
        eprintln!(
            "mismatch: exact {} vs exponential {} + {}i",
            exact.unwrap_or_default(),
            fmt_sig17(z.re),
            fmt_sig17(z.im)
        );
    }
    Ok(agree)
}

pub fn table(sink: &Sink, r_max: u64, n_max: u64, s: SExponent) -> Result<bool, Failure> {
    if sink.format == Format::Json {
        return Err(Failure::Usage("table is exported as CSV only".into()));
    }
    let table = CRSumTable::build(r_max, n_max, s)?;
    sink.emit(|buf| Ok(table.write_csv(buf)?))?;
    sink.summary(&format!(
        "table: r <= {r_max}, 0 <= n <= {n_max}, s = {s}, {} cells",
        r_max * (n_max + 1)
    ));
    Ok(true)
}

#[derive(Serialize)]
struct OrthogonalityRecord {
    d: u64,
    t: u64,
    inner_sum: i128,
    value: String,
    expected: i128,
}

pub fn orthogonality(sink: &Sink, r: u64, s: SExponent) -> Result<bool, Failure> {
    let entries = orthogonality_grid(r, s)?;
    let failures = entries.iter().filter(|e| !e.holds()).count();
    let records: Vec<OrthogonalityRecord> = entries
        .iter()
        .map(|e| OrthogonalityRecord {
            d: e.d,
            t: e.t,
            inner_sum: e.inner_sum,
            value: e.value.to_string(),
            expected: e.expected,
        })
        .collect();
    match sink.format {
        Format::Json => sink.json(&records)?,
        Format::Csv => sink.emit(|buf| {
            let mut w = csv::Writer::from_writer(buf);
            for rec in &records {
                w.serialize(rec)?;
            }
            w.flush()?;
            Ok(())
        })?,
    }
    sink.summary(&format!(
        "orthogonality mod {r}^{s}: {} pairs, {failures} mismatches",
        entries.len()
    ));
    Ok(failures == 0)
}

#[derive(Serialize)]
struct CoefficientFile<'a> {
    s: u32,
    argument_mode: ArgumentMode,
    provenance: &'a Provenance,
    coefficients: Vec<Sig17>,
}

fn write_coefficients(sink: &Sink, family: &ExpansionCoefficients) -> Result<(), Failure> {
    match sink.format {
        Format::Csv => sink.emit(|buf| Ok(family.write_csv(buf)?)),
        Format::Json => sink.json(&CoefficientFile {
            s: family.s().get(),
            argument_mode: family.mode(),
            provenance: family.provenance(),
            coefficients: family.coefficients().iter().map(|&c| Sig17(c)).collect(),
        }),
    }
}

#[derive(Serialize)]
struct EvaluationRecord {
    n: u64,
    value: Sig17,
    target: Sig17,
    error: Sig17,
}

pub fn expand(
    sink: &Sink,
    k: u32,
    s: SExponent,
    terms: usize,
    ns: &[u64],
) -> Result<bool, Failure> {
    if terms == 0 {
        return Err(Failure::Usage("--R must be at least 1".into()));
    }
    let family = sigma_expansion(k, s, terms)?;
    if ns.is_empty() {
        write_coefficients(sink, &family)?;
        sink.summary(&format!(
            "sigma expansion k = {k}, s = {s}, R = {terms}, tau-weighted norm {}",
            fmt_sig6(family.tau_weighted_norm()?)
        ));
        return Ok(true);
    }
    let values = family.evaluate_many(ns)?;
    let exponent = -f64::from(k) * f64::from(s.get());
    let mut records = Vec::with_capacity(ns.len());
    for (&n, &value) in ns.iter().zip(&values) {
        let target = sigma_real(n, exponent)?;
        records.push(EvaluationRecord {
            n,
            value: Sig17(value),
            target: Sig17(target),
            error: Sig17((value - target).abs()),
        });
    }
    match sink.format {
        Format::Json => sink.json(&records)?,
        Format::Csv => sink.emit(|buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["n", "value", "target", "error"])?;
            for rec in &records {
                w.write_record([
                    rec.n.to_string(),
                    fmt_sig17(rec.value.0),
                    fmt_sig17(rec.target.0),
                    fmt_sig17(rec.error.0),
                ])?;
            }
            w.flush()?;
            Ok(())
        })?,
    }
    let worst = records.iter().map(|r| r.error.0).fold(0.0, f64::max);
    sink.summary(&format!("R = {terms}: max |error| {}", fmt_sig6(worst)));
    Ok(true)
}

pub fn meanvalue(
    sink: &Sink,
    func: Func,
    k: u64,
    s: SExponent,
    terms: usize,
    samples: u64,
) -> Result<bool, Failure> {
    if terms == 0 || samples == 0 {
        return Err(Failure::Usage("--R and --N must be at least 1".into()));
    }
    let family = match func {
        Func::One => mean_value_family(|_| 1.0, terms, s, samples)?,
        Func::Sigma => {
            let x = -(k as f64);
            sigma_real(1, x)?;
            mean_value_family(|n| sigma_real(n, x).unwrap_or(f64::NAN), terms, s, samples)?
        }
        Func::Crsum => {
            cr_sum_exact(k, 1, s)?;
            mean_value_family(
                |n| cr_sum_exact(k, n, s).map_or(f64::NAN, |c| c as f64),
                terms,
                s,
                samples,
            )?
        }
    };
    write_coefficients(sink, &family)?;
    let period_exact = matches!(
        family.provenance(),
        Provenance::MeanValueExtracted {
            period_exact: true,
            ..
        }
    );
    sink.summary(&format!(
        "{} coefficients from N = {samples}, period exact: {period_exact}",
        family.len()
    ));
    Ok(true)
}

fn read_family(path: &Path, s: SExponent) -> Result<ExpansionCoefficients, Failure> {
    let file = File::open(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(ExpansionCoefficients::read_csv(
        BufReader::new(file),
        s,
        ArgumentMode::PlainN,
        Provenance::Imported,
    )?)
}

pub fn shift(sink: &Sink, coeffs: &Path, s: SExponent, h: u64) -> Result<bool, Failure> {
    let family = read_family(coeffs, s)?;
    let shifted = shift_coefficients(&family, h)?;
    write_coefficients(sink, &shifted)?;
    sink.summary(&format!(
        "shifted by h = {h}: R = {}, tau-weighted norm {}",
        shifted.len(),
        fmt_sig6(shifted.tau_weighted_norm()?)
    ));
    Ok(true)
}

pub enum Pair {
    Corollary { a: f64, b: f64 },
    Files { f: PathBuf, g: PathBuf },
}

pub fn correlate(
    sink: &Sink,
    pair: Pair,
    s: SExponent,
    h: u64,
    schedule: Vec<u64>,
) -> Result<bool, Failure> {
    let source = match pair {
        Pair::Corollary { a, b } => CorrelationSource::Corollary { a, b },
        Pair::Files { f, g } => CorrelationSource::Expansions {
            f: read_family(&f, s)?,
            g: read_family(&g, s)?,
        },
    };
    let report = run_correlation_report(&CorrelationConfig {
        s,
        h,
        schedule,
        source,
    })?;
    match sink.format {
        Format::Json => sink.emit(|buf| Ok(report.write_json(buf)?))?,
        Format::Csv => sink.emit(|buf| Ok(report.write_csv(buf)?))?,
    }
    let ratio = report
        .final_ratio()
        .map_or("undefined".to_string(), fmt_sig6);
    sink.summary(&format!("{:?}: final ratio {ratio}", report.theorem));
    Ok(true)
}

pub fn lemmas(
    sink: &Sink,
    which: LemmaId,
    r_max: u64,
    k_max: u64,
    s_values: Vec<SExponent>,
    h_values: Vec<u64>,
    n_values: Vec<u64>,
) -> Result<bool, Failure> {
    let grid = LemmaGrid {
        r_max,
        k_max,
        s_values,
        h_values,
        n_values,
    };
    let report = lemma_check(which, &grid)?;
    match sink.format {
        Format::Json => sink.emit(|buf| Ok(report.write_json(buf)?))?,
        Format::Csv => sink.emit(|buf| Ok(report.write_csv(buf)?))?,
    }
    let violations = report.violations().count();
    let verdict = if which.is_inequality() {
        format!("{violations} violations")
    } else {
        "reported only".to_string()
    };
    sink.summary(&format!(
        "{which}: {} points, max normalized {}, {verdict}",
        report.grid.len(),
        fmt_sig6(report.max_normalized.0)
    ));
    Ok(violations == 0)
}

#[derive(Serialize)]
struct DecompositionRecord {
    h: u64,
    s: u32,
    m: u64,
    k: u64,
}

pub fn decompose(sink: &Sink, h: u64, s: SExponent) -> Result<bool, Failure> {
    let d = decompose_h(h, s)?;
    let rec = DecompositionRecord {
        h: d.h,
        s: s.get(),
        m: d.m,
        k: d.k,
    };
    match sink.format {
        Format::Json => sink.json(&rec)?,
        Format::Csv => sink.emit(|buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.serialize(&rec)?;
            w.flush()?;
            Ok(())
        })?,
    }
    Ok(true)
}
