//! Serialization of reports: JSON lines (one object per report) and CSV (one
//! row per report, nested fields as compact JSON). Exact values travel as
//! "num/den" strings next to a float field.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::concentration::ConcentrationReport;
use crate::error::{Error, Result};
use crate::moments::{CancellationRecord, MomentKind, MomentReport};
use crate::poles;
use crate::rational::{to_f64, to_fraction_string};
use crate::visibility::VisibilityReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub kind: MomentKind,
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub alpha: Option<String>,
    pub value: String,
    pub value_float: f64,
    pub oracle_value: Option<String>,
    pub oracle_float: Option<f64>,
    pub exact_equal: Option<bool>,
}

impl From<&MomentReport> for MomentRecord {
    fn from(r: &MomentReport) -> Self {
        MomentRecord {
            kind: r.kind,
            p: r.p,
            n: r.n,
            alpha: r.alpha.clone(),
            value: to_fraction_string(&r.formula_value),
            value_float: to_f64(&r.formula_value),
            oracle_value: r.oracle_value.as_ref().map(to_fraction_string),
            oracle_float: r.oracle_value.as_ref().map(to_f64),
            exact_equal: r.exact_equal(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CancellationRow {
    pub name: String,
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub enumerated: String,
    pub expected: String,
    pub holds: bool,
}

pub fn cancellation_rows(rec: &CancellationRecord) -> Vec<CancellationRow> {
    rec.checks
        .iter()
        .map(|c| CancellationRow {
            name: c.name.to_string(),
            p: rec.p,
            n: rec.n,
            enumerated: c.enumerated.to_string(),
            expected: c.expected.to_string(),
            holds: c.holds(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub q: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub name: String,
    pub coeffs: String,
    pub re: f64,
    pub im: f64,
    pub euclidean_diameter: Option<f64>,
}

/// NP, EP, SP and WP of the q-th cyclotomic box of half-width N.
pub fn pole_records(q: u64, n: u64) -> Result<Vec<PoleRecord>> {
    if q < 3 {
        return Err(Error::ModulusTooSmall(q));
    }
    let diameter = poles::euclidean_diameter(q, n).ok();
    let entries = [
        ("NP", poles::north_pole(q, n)),
        ("EP", poles::east_pole(q, n)),
        ("SP", poles::south_pole(q, n)),
        ("WP", poles::west_pole(q, n)),
    ];
    Ok(entries
        .into_iter()
        .map(|(name, c)| {
            let (re, im) = poles::embed_coeffs(q, &c);
            let coeffs: Vec<String> = c.iter().map(ToString::to_string).collect();
            PoleRecord {
                q,
                n,
                name: name.into(),
                coeffs: format!("({})", coeffs.join(",")),
                re,
                im,
                euclidean_diameter: diameter,
            }
        })
        .collect())
}

/// Report types the CLI can emit.
pub trait Record: Serialize + DeserializeOwned {}

impl Record for MomentRecord {}
impl Record for CancellationRow {}
impl Record for PoleRecord {}
impl Record for ConcentrationReport {}
impl Record for VisibilityReport {}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidParameter(format!("serialization failed: {e}"))
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit_reports<T: Record>(records: &[T], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(r).map_err(json_err)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            let mut header_done = false;
            for r in records {
                let Value::Object(map) = serde_json::to_value(r).map_err(json_err)? else {
                    return Err(Error::InvalidParameter("report is not an object".into()));
                };
                let csv_err = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
                if !header_done {
                    w.write_record(map.keys()).map_err(csv_err)?;
                    header_done = true;
                }
                w.write_record(map.values().map(csv_cell)).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn emit_report<T: Record>(record: &T, format: Format) -> Result<String> {
    emit_reports(std::slice::from_ref(record), format)
}

/// Parses JSON-lines output back into records.
pub fn parse_json_reports<T: Record>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(json_err))
        .collect()
}
