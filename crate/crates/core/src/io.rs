//! File formats: dissimilarity matrices, edge lists and similarity tables.
//!
//! Matrix layout: the first row holds the node labels (optionally preceded
//! by an empty corner cell); each following row is a label followed by `n`
//! numbers, entry `(i, j)` being the dissimilarity from row `i` to column `j`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{Dissimilarity, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Matrix,
    Edges,
    Similarity,
}

impl FromStr for InputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" | "matrix-csv" => Ok(InputFormat::Matrix),
            "edges" | "edge-list" => Ok(InputFormat::Edges),
            "similarity" | "similarity-table" => Ok(InputFormat::Similarity),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// What to do with zero off-diagonal similarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroPolicy {
    /// Replace with ten times the largest finite dissimilarity.
    #[default]
    Sentinel,
    Error,
}

impl FromStr for ZeroPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentinel" => Ok(ZeroPolicy::Sentinel),
            "error" => Ok(ZeroPolicy::Error),
            other => Err(Error::InvalidArgument(format!(
                "unknown zero policy `{other}`"
            ))),
        }
    }
}

/// Multiplier applied to the largest finite dissimilarity to fill zero similarities.
pub const SENTINEL_FACTOR: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct IngestionSpec {
    pub path: PathBuf,
    pub format: InputFormat,
    pub delimiter: char,
    /// Divide similarities by the destination column total before inverting.
    pub normalize: bool,
    pub zero_policy: ZeroPolicy,
}

impl IngestionSpec {
    pub fn new(path: impl Into<PathBuf>, format: InputFormat) -> Self {
        IngestionSpec {
            path: path.into(),
            format,
            delimiter: ',',
            normalize: true,
            zero_policy: ZeroPolicy::Sentinel,
        }
    }
}

pub fn ingest(spec: &IngestionSpec) -> Result<Network> {
    let text = read(&spec.path)?;
    match spec.format {
        InputFormat::Matrix => parse_matrix(&text, spec.delimiter),
        InputFormat::Edges => parse_edge_list(&text, spec.delimiter),
        InputFormat::Similarity => {
            let (labels, cells) = parse_table(&text, spec.delimiter)?;
            network_from_similarity(labels, &cells, spec.normalize, spec.zero_policy)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Non-empty records with their 1-based line numbers; `#` lines are comments.
fn records(text: &str, delim: char) -> Result<Vec<(usize, Vec<String>)>> {
    let delim = u8::try_from(delim)
        .map_err(|_| Error::InvalidArgument(format!("delimiter `{delim}` is not ASCII")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .delimiter(delim)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

/// Splits a labelled table into labels and raw cells (row-major, as text).
fn parse_table(text: &str, delim: char) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rows = records(text, delim)?.into_iter();
    let (_, mut header) = rows
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let rows: Vec<(usize, Vec<String>)> = rows.collect();
    let n = rows.len();
    if header.len() == n + 1 {
        header.remove(0);
    }
    if header.len() != n {
        return Err(Error::Parse(format!(
            "header has {} labels but there are {n} rows",
            header.len()
        )));
    }
    let mut cells = Vec::with_capacity(n);
    for (k, (lineno, mut row)) in rows.into_iter().enumerate() {
        if row.len() != n + 1 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected a label and {n} entries, found {} cells",
                row.len()
            )));
        }
        let label = row.remove(0);
        if label != header[k] {
            return Err(Error::Parse(format!(
                "line {lineno}: row label `{label}` does not match column label `{}`",
                header[k]
            )));
        }
        cells.push(row);
    }
    Ok((header, cells))
}

fn number(cell: &str, i: usize, j: usize) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|_| Error::Parse(format!("entry ({i},{j}) `{cell}` is not a number")))
}

pub fn parse_matrix(text: &str, delim: char) -> Result<Network> {
    let (labels, cells) = parse_table(text, delim)?;
    let mut values = Vec::with_capacity(labels.len() * labels.len());
    for (i, row) in cells.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            values.push(number(c, i, j)?);
        }
    }
    Network::new(labels, values)
}

/// `src,dst,weight` lines. Every ordered pair of distinct nodes must appear
/// exactly once; node order follows first appearance.
pub fn parse_edge_list(text: &str, delim: char) -> Result<Network> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, cells) in records(text, delim)? {
        if cells.len() != 3 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected src,dst,weight"
            )));
        }
        let mut id = |l: &str| {
            *index.entry(l.to_string()).or_insert_with(|| {
                labels.push(l.to_string());
                labels.len() - 1
            })
        };
        let (s, d) = (id(&cells[0]), id(&cells[1]));
        if s == d {
            return Err(Error::Parse(format!(
                "line {lineno}: self-pair `{}`",
                cells[0]
            )));
        }
        let w: f64 = cells[2]
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad weight `{}`", cells[2])))?;
        edges.push((lineno, s, d, w));
    }
    let n = labels.len();
    let mut values = vec![f64::NAN; n * n];
    for i in 0..n {
        values[i * n + i] = 0.0;
    }
    for (lineno, s, d, w) in edges {
        let slot = &mut values[s * n + d];
        if !slot.is_nan() {
            return Err(Error::Parse(format!(
                "line {lineno}: pair {}->{} listed twice",
                labels[s], labels[d]
            )));
        }
        *slot = w;
    }
    if let Some(k) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::Parse(format!(
            "pair {}->{} is missing",
            labels[k / n],
            labels[k % n]
        )));
    }
    Network::new(labels, values)
}

/// Turns a similarity table `U` into dissimilarities.
///
/// With normalization, `A(i, j) = (U(i, j) / sum_{k != j} U(k, j))^-1`: the
/// inverse share of column `j`'s inputs that comes from `i`. Without it,
/// `A(i, j) = 1 / U(i, j)`. Diagonal cells are ignored and may be empty or `-`.
pub fn network_from_similarity(
    labels: Vec<String>,
    cells: &[Vec<String>],
    normalize: bool,
    zero_policy: ZeroPolicy,
) -> Result<Network> {
    let n = labels.len();
    if cells.len() != n || cells.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeMismatch(
            "similarity table is not square".into(),
        ));
    }
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = number(&cells[i][j], i, j)?;
            if !v.is_finite() {
                return Err(Error::NonFinite(i, j));
            }
            if v < 0.0 {
                return Err(Error::NegativeSimilarity(i, j));
            }
            u[i * n + j] = v;
        }
    }
    similarity_to_dissimilarity(labels, &u, normalize, zero_policy)
}

/// Same as [`network_from_similarity`] from a numeric row-major grid; the
/// diagonal is ignored.
pub fn similarity_to_dissimilarity(
    labels: Vec<String>,
    u: &[f64],
    normalize: bool,
    zero_policy: ZeroPolicy,
) -> Result<Network> {
    let n = labels.len();
    if u.len() != n * n {
        return Err(Error::ShapeMismatch("similarity grid is not square".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let v = u[i * n + j];
            if i != j && v < 0.0 {
                return Err(Error::NegativeSimilarity(i, j));
            }
        }
    }
    let mut col_sum = vec![0.0; n];
    if normalize {
        for j in 0..n {
            col_sum[j] = (0..n).filter(|&k| k != j).map(|k| u[k * n + j]).sum();
            if n > 1 && !(col_sum[j] > 0.0) {
                return Err(Error::ZeroColumnSum(labels[j].clone()));
            }
        }
    }
    let mut a = vec![0.0; n * n];
    let mut zeros = Vec::new();
    let mut max_finite: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let s = u[i * n + j];
            if s == 0.0 {
                if zero_policy == ZeroPolicy::Error {
                    return Err(Error::ZeroSimilarity(i, j));
                }
                zeros.push(i * n + j);
                continue;
            }
            let v = if normalize { col_sum[j] / s } else { 1.0 / s };
            if !v.is_finite() {
                return Err(Error::NonFinite(i, j));
            }
            max_finite = max_finite.max(v);
            a[i * n + j] = v;
        }
    }
    if !zeros.is_empty() {
        let sentinel = if max_finite > 0.0 {
            SENTINEL_FACTOR * max_finite
        } else {
            SENTINEL_FACTOR
        };
        for k in zeros {
            a[k] = sentinel;
        }
    }
    Network::new(labels, a)
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Matrix CSV with full round-trip precision.
pub fn to_matrix_csv<D: Dissimilarity>(d: &D) -> String {
    let mut out = String::new();
    for l in d.labels() {
        out.push(',');
        out.push_str(&csv_cell(l));
    }
    out.push('\n');
    for i in 0..d.len() {
        out.push_str(&csv_cell(&d.labels()[i]));
        for j in 0..d.len() {
            let _ = write!(out, ",{}", d.at(i, j));
        }
        out.push('\n');
    }
    out
}
