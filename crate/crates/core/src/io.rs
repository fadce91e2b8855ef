//! Economy and table file formats.
//!
//! Structured documents are JSON:
//!
//! ```json
//! { "n": 2, "A": [[0.5, 0.0], [0.0, 0.5]],
//!   "labor_shares": [0.5, 0.5], "consumption_shares": [0.5, 0.5],
//!   "preferences": [0.5, 0.5], "names": ["x", "y"] }
//! ```
//!
//! A JSON document may instead carry raw `flows`, `labor_payments` and
//! `final_sales`, in which case it is normalized through [`from_io_table`].
//!
//! Delimited files come in two shapes, told apart by their dimensions:
//! an economy matrix is `n + 2` rows of `n` fields (labor shares, then the
//! `n` rows of `A`, then consumption shares); an IO table is `n` rows of
//! `n + 2` fields (flows, labor payments, final sales). Lines starting with
//! `#` are ignored.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{from_io_table_with, normalize_table, Economy, EconomyError, IoTable, Tolerances};
use crate::linalg;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed delimited file: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Economy(#[from] EconomyError),
}

impl LoadError {
    /// True for errors caused by the file's content violating a model invariant,
    /// as opposed to an unreadable or unparsable file.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, LoadError::Economy(EconomyError::Invariant { .. }))
    }
}

/// JSON shape of an economy file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labor_shares: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consumption_shares: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferences: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flows: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labor_payments: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_sales: Option<Vec<f64>>,
}

impl EconomyDocument {
    pub fn from_economy(e: &Economy) -> Self {
        Self {
            n: Some(e.n()),
            a: Some(linalg::to_rows(e.coefficients())),
            labor_shares: Some(e.labor_shares().as_slice().to_vec()),
            consumption_shares: Some(e.consumption_shares().as_slice().to_vec()),
            preferences: e.preferences().map(|p| p.as_slice().to_vec()),
            names: e.names().map(<[String]>::to_vec),
            ..Self::default()
        }
    }

    pub fn into_economy(self, tol: &Tolerances) -> Result<Economy, LoadError> {
        if let Some(flows) = self.flows {
            if self.a.is_some() {
                return Err(LoadError::Malformed("both `A` and `flows` given".into()));
            }
            let flows = linalg::from_rows(&flows)
                .ok_or_else(|| LoadError::Malformed("ragged `flows` rows".into()))?;
            let labor = self
                .labor_payments
                .ok_or_else(|| LoadError::Malformed("missing `labor_payments`".into()))?;
            let sales = self
                .final_sales
                .ok_or_else(|| LoadError::Malformed("missing `final_sales`".into()))?;
            let table = IoTable::with_tolerance(
                flows,
                DVector::from_vec(labor),
                DVector::from_vec(sales),
                tol.balance_rel,
            )?;
            let e = from_io_table_with(&table, tol)?;
            return match self.names {
                Some(names) => Ok(e.with_names(names)?),
                None => Ok(e),
            };
        }
        let rows = self.a.ok_or_else(|| LoadError::Malformed("missing `A`".into()))?;
        let a = linalg::from_rows(&rows).ok_or_else(|| LoadError::Malformed("ragged `A` rows".into()))?;
        if let Some(n) = self.n {
            if a.nrows() != n || a.ncols() != n {
                return Err(LoadError::Malformed(format!(
                    "`n` = {n} but `A` is {}x{}",
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        let consumption = self
            .consumption_shares
            .ok_or_else(|| LoadError::Malformed("missing `consumption_shares`".into()))?;
        Ok(Economy::with_tolerances(
            a,
            self.labor_shares.map(DVector::from_vec),
            DVector::from_vec(consumption),
            self.preferences.map(DVector::from_vec),
            self.names,
            tol,
        )?)
    }
}

/// Field delimiter for a path: tab for `.tsv`, comma otherwise.
fn delimiter_for(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => b'\t',
        _ => b',',
    }
}

fn read_to_string(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses delimiter-separated numeric rows.
pub fn parse_numeric_rows(text: &str, delimiter: u8) -> Result<Vec<Vec<f64>>, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| {
                    LoadError::Malformed(format!("record {line}, field {col}: `{field}` is not a number"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

enum DelimitedShape {
    EconomyMatrix(usize),
    Table(usize),
}

fn classify(rows: &[Vec<f64>]) -> Result<DelimitedShape, LoadError> {
    let width = rows.first().map_or(0, Vec::len);
    if width == 0 || rows.iter().any(|r| r.len() != width) {
        return Err(LoadError::Malformed("rows have differing or zero widths".into()));
    }
    if rows.len() == width + 2 {
        Ok(DelimitedShape::EconomyMatrix(width))
    } else if width >= 3 && rows.len() == width - 2 {
        Ok(DelimitedShape::Table(rows.len()))
    } else {
        Err(LoadError::Malformed(format!(
            "{} rows of {width} fields matches neither an (n+2)xn economy matrix nor an nx(n+2) table",
            rows.len()
        )))
    }
}

fn table_from_rows(rows: &[Vec<f64>], n: usize, balance_rel: f64) -> Result<IoTable, LoadError> {
    let flows = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let labor = DVector::from_fn(n, |i, _| rows[i][n]);
    let sales = DVector::from_fn(n, |i, _| rows[i][n + 1]);
    Ok(IoTable::with_tolerance(flows, labor, sales, balance_rel)?)
}

/// Parses a delimited economy or table body.
pub fn parse_delimited_economy(text: &str, delimiter: u8, tol: &Tolerances) -> Result<Economy, LoadError> {
    let rows = parse_numeric_rows(text, delimiter)?;
    match classify(&rows)? {
        DelimitedShape::EconomyMatrix(n) => {
            let labor = DVector::from_vec(rows[0].clone());
            let a = DMatrix::from_fn(n, n, |i, j| rows[i + 1][j]);
            let consumption = DVector::from_vec(rows[n + 1].clone());
            Ok(Economy::with_tolerances(a, Some(labor), consumption, None, None, tol)?)
        }
        DelimitedShape::Table(n) => {
            let table = table_from_rows(&rows, n, tol.balance_rel)?;
            Ok(from_io_table_with(&table, tol)?)
        }
    }
}

/// Loads an economy from a `.json` document or a delimited file.
pub fn load_economy(path: &Path) -> Result<Economy, LoadError> {
    load_economy_with(path, &Tolerances::default())
}

pub fn load_economy_with(path: &Path, tol: &Tolerances) -> Result<Economy, LoadError> {
    let text = read_to_string(path)?;
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let doc: EconomyDocument = serde_json::from_str(&text)?;
        doc.into_economy(tol)
    } else {
        parse_delimited_economy(&text, delimiter_for(path), tol)
    }
}

/// Loads an economy without enforcing its invariants, for reporting.
///
/// Structural problems (unreadable file, bad shape) still fail.
pub fn load_economy_unchecked(path: &Path) -> Result<Economy, LoadError> {
    let text = read_to_string(path)?;
    let (a, labor, consumption, preferences, names) =
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            let doc: EconomyDocument = serde_json::from_str(&text)?;
            if let Some(flows) = doc.flows {
                let flows = linalg::from_rows(&flows)
                    .ok_or_else(|| LoadError::Malformed("ragged `flows` rows".into()))?;
                let n = flows.nrows();
                let labor = doc.labor_payments.unwrap_or_else(|| vec![0.0; n]);
                let sales = doc.final_sales.unwrap_or_else(|| vec![0.0; n]);
                let table = IoTable::with_tolerance(
                    flows,
                    DVector::from_vec(labor),
                    DVector::from_vec(sales),
                    f64::INFINITY,
                )?;
                let (a, l, c) = normalize_table(&table)?;
                return Ok(Economy::unchecked(a, Some(l), c, None, doc.names)?);
            }
            let rows = doc.a.ok_or_else(|| LoadError::Malformed("missing `A`".into()))?;
            let a = linalg::from_rows(&rows).ok_or_else(|| LoadError::Malformed("ragged `A` rows".into()))?;
            let c = doc
                .consumption_shares
                .ok_or_else(|| LoadError::Malformed("missing `consumption_shares`".into()))?;
            (
                a,
                doc.labor_shares.map(DVector::from_vec),
                DVector::from_vec(c),
                doc.preferences.map(DVector::from_vec),
                doc.names,
            )
        } else {
            let rows = parse_numeric_rows(&text, delimiter_for(path))?;
            match classify(&rows)? {
                DelimitedShape::EconomyMatrix(n) => (
                    DMatrix::from_fn(n, n, |i, j| rows[i + 1][j]),
                    Some(DVector::from_vec(rows[0].clone())),
                    DVector::from_vec(rows[n + 1].clone()),
                    None,
                    None,
                ),
                DelimitedShape::Table(n) => {
                    let table = table_from_rows(&rows, n, f64::INFINITY)?;
                    let (a, l, c) = normalize_table(&table)?;
                    return Ok(Economy::unchecked(a, Some(l), c, None, None)?);
                }
            }
        };
    Ok(Economy::unchecked(a, labor, consumption, preferences, names)?)
}

/// Loads a delimited `n x (n+2)` IO table.
pub fn load_io_table(path: &Path) -> Result<IoTable, LoadError> {
    let text = read_to_string(path)?;
    let rows = parse_numeric_rows(&text, delimiter_for(path))?;
    match classify(&rows)? {
        DelimitedShape::Table(n) => table_from_rows(&rows, n, Tolerances::default().balance_rel),
        DelimitedShape::EconomyMatrix(_) => {
            Err(LoadError::Malformed("file holds an economy matrix, not a flow table".into()))
        }
    }
}

/// Writes an economy in the delimited matrix layout.
pub fn economy_to_delimited(e: &Economy) -> String {
    let row = |v: &[f64]| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",");
    let mut out = String::new();
    out.push_str(&row(e.labor_shares().as_slice()));
    out.push('\n');
    for r in linalg::to_rows(e.coefficients()) {
        out.push_str(&row(&r));
        out.push('\n');
    }
    out.push_str(&row(e.consumption_shares().as_slice()));
    out.push('\n');
    out
}
