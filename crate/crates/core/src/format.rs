//! Text formats: matrix and polynomial documents, CSV trajectory rows.
//!
//! Matrices are JSON objects `{"dim": n, "entries": [[[re, im], ...], ...]}`
//! in row-major order. Polynomials are
//! `{"neg_degree": k, "pos_degree": m, "coefficients": [[re, im], ...]}` with
//! coefficients listed from `a_{-k}` to `a_m`. Floats are written with 17
//! significant digits and parsed exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::certify::CertificationRecord;
use crate::error::{Error, Result};
use crate::experiment::RunRecord;
use crate::operator::{c, CMatrix, C64};
use crate::signfun::FourierPolynomial;

/// Bumped whenever a column or field changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 9] = [
    "trial",
    "step",
    "energy_estimate",
    "true_energy",
    "ground_overlap",
    "leakage_weight",
    "queries_eiH",
    "queries_UA",
    "success",
];

/// Scientific notation with 17 significant digits.
pub fn float(x: f64) -> String {
    // Adding zero folds -0 into +0.
    format!("{:.16e}", x + 0.0)
}

fn complex(z: C64) -> String {
    format!("[{}, {}]", float(z.re), float(z.im))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_error(&path.display().to_string(), e))
}

pub(crate) fn parse_error(context: &str, message: impl ToString) -> Error {
    Error::Parse {
        context: context.to_string(),
        message: message.to_string(),
    }
}

pub fn write_matrix(m: &CMatrix) -> String {
    let n = m.nrows();
    let mut s = format!("{{\n  \"dim\": {n},\n  \"entries\": [\n");
    for i in 0..n {
        let row: Vec<String> = (0..m.ncols()).map(|j| complex(m[(i, j)])).collect();
        let sep = if i + 1 < n { "," } else { "" };
        let _ = writeln!(s, "    [{}]{sep}", row.join(", "));
    }
    s.push_str("  ]\n}\n");
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

/// Parse a matrix document. `context` names the source in error messages.
pub fn parse_matrix(text: &str, context: &str) -> Result<CMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| parse_error(context, e))?;
    if doc.entries.len() != doc.dim {
        return Err(parse_error(
            context,
            format!("field `entries`: {} rows, expected dim = {}", doc.entries.len(), doc.dim),
        ));
    }
    let mut m = CMatrix::zeros(doc.dim, doc.dim);
    for (i, row) in doc.entries.iter().enumerate() {
        if row.len() != doc.dim {
            return Err(parse_error(
                context,
                format!("field `entries[{i}]`: {} columns, expected {}", row.len(), doc.dim),
            ));
        }
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = c(z[0], z[1]);
        }
    }
    Ok(m)
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = read_text(path)?;
    parse_matrix(&text, &path.display().to_string())
}

pub fn write_polynomial(p: &FourierPolynomial) -> String {
    let coef: Vec<String> = p.coefficients().iter().map(|&z| complex(z)).collect();
    format!(
        "{{\n  \"neg_degree\": {},\n  \"pos_degree\": {},\n  \"coefficients\": [\n    {}\n  ]\n}}\n",
        p.neg_degree(),
        p.pos_degree(),
        coef.join(",\n    ")
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialDoc {
    neg_degree: usize,
    pos_degree: usize,
    coefficients: Vec<[f64; 2]>,
}

pub fn parse_polynomial(text: &str, context: &str) -> Result<FourierPolynomial> {
    let doc: PolynomialDoc = serde_json::from_str(text).map_err(|e| parse_error(context, e))?;
    let coef = doc.coefficients.iter().map(|z| c(z[0], z[1])).collect();
    FourierPolynomial::new(doc.neg_degree, doc.pos_degree, coef).map_err(|e| parse_error(context, format!("field `coefficients`: {e}")))
}

pub fn read_polynomial(path: &Path) -> Result<FourierPolynomial> {
    let text = read_text(path)?;
    parse_polynomial(&text, &path.display().to_string())
}

/// One row per step of every trial; `step` counts from 1. `success` is the
/// trajectory-level outcome (no leakage event anywhere in the trial).
pub fn write_csv(record: &RunRecord) -> String {
    let mut s = CSV_HEADER.join(",");
    s.push('\n');
    for trial in &record.trials {
        for (k, step) in trial.steps.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                trial.trial,
                k + 1,
                float(step.energy_estimate),
                float(step.true_energy),
                float(step.ground_overlap),
                float(step.leakage_weight),
                step.queries_eih,
                step.queries_ua,
                trial.success
            );
        }
    }
    s
}

pub const CERTIFICATION_HEADER: [&str; 7] = ["claim", "instance", "comparison", "bound", "measured", "slack", "pass"];

pub fn write_certification_csv(records: &[CertificationRecord]) -> String {
    let mut s = CERTIFICATION_HEADER.join(",");
    s.push('\n');
    for r in records {
        let comparison = serde_json::to_value(r.comparison).expect("enum serializes");
        let _ = writeln!(
            s,
            "{},\"{}\",{},{},{},{},{}",
            r.claim,
            r.instance.replace('"', "\"\""),
            comparison.as_str().unwrap_or_default(),
            float(r.bound),
            float(r.measured),
            float(r.slack),
            r.pass
        );
    }
    s
}

pub fn write_structured(record: &RunRecord) -> Result<String> {
    let mut s = serde_json::to_string_pretty(record).map_err(|e| parse_error("run record", e))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_structured(text: &str, context: &str) -> Result<RunRecord> {
    serde_json::from_str(text).map_err(|e| parse_error(context, e))
}
