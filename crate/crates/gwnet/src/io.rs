//! Network, spec, dissimilarity and curve file formats.
//!
//! Networks are JSON objects `{"labels": [...], "weights": [[...]],
//! "measure": [...]}` (labels and measure optional), or CSV square
//! matrices with an optional header of node labels and an optional
//! trailing measure row.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use gwnet_core::generators::SbmSpec;
use gwnet_core::invariants::SizeCurve;
use gwnet_core::{DissimilarityMatrix, Matrix, MeasureNetwork};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub weights: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<f64>>,
}

impl NetworkFile {
    pub fn from_network(x: &MeasureNetwork) -> Self {
        Self {
            labels: x.labels().map(<[String]>::to_vec),
            weights: x.weights().to_rows(),
            measure: Some(x.measure().to_vec()),
        }
    }

    /// Validates into a network; a missing measure means uniform.
    pub fn into_network(self) -> Result<MeasureNetwork> {
        let rows = self.weights.len();
        if let Some((_, r)) = self.weights.iter().enumerate().find(|(_, r)| r.len() != rows) {
            return Err(Error::NonSquare { rows, cols: r.len() });
        }
        let weights = Matrix::from_rows(&self.weights)?;
        let measure = self.measure.unwrap_or_else(|| vec![1.0 / rows as f64; rows]);
        Ok(MeasureNetwork::new(weights, measure, self.labels)?)
    }
}

pub fn network_from_json(text: &str) -> serde_json::Result<NetworkFile> {
    serde_json::from_str(text)
}

pub fn network_to_json(x: &MeasureNetwork) -> String {
    serde_json::to_string_pretty(&NetworkFile::from_network(x)).expect("network serializes")
}

pub fn read_network_json(path: &Path) -> Result<MeasureNetwork> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    network_from_json(&text).map_err(|source| Error::Json { path: path.into(), source })?.into_network()
}

pub fn write_network_json(path: &Path, x: &MeasureNetwork) -> Result<()> {
    fs::write(path, network_to_json(x) + "\n").map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasureMode {
    /// Every node gets mass `1/n`.
    #[default]
    Uniform,
    /// The last row of the file holds the node measure.
    LastRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// The first row is a header if any of its fields is not a number.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CsvOptions {
    pub measure: MeasureMode,
    pub header: HeaderMode,
}

fn parse_field(field: &str, row: usize, col: usize) -> Result<f64> {
    let t = field.trim();
    t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::ParseError { row, col, value: t.to_string() })
}

/// Reads a numeric CSV matrix. Row and column numbers in errors are
/// 1-based positions in the file, header included.
pub fn parse_matrix_csv<R: Read>(reader: R, opts: CsvOptions) -> Result<MeasureNetwork> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let records: Vec<csv::StringRecord> = rdr.records().collect::<Result<_, _>>()?;
    let has_header = match opts.header {
        HeaderMode::Present => true,
        HeaderMode::Absent => false,
        HeaderMode::Auto => records.first().is_some_and(|r| r.iter().any(|f| f.trim().parse::<f64>().is_err())),
    };
    let offset = usize::from(has_header);
    let labels: Option<Vec<String>> =
        if has_header { records.first().map(|r| r.iter().map(|f| f.trim().to_string()).collect()) } else { None };
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(records.len());
    let width = records.get(offset).map_or(0, |r| r.len());
    for (k, rec) in records.iter().enumerate().skip(offset) {
        if rec.len() != width {
            return Err(Error::Ragged { row: k + 1, expected: width, found: rec.len() });
        }
        rows.push(rec.iter().enumerate().map(|(c, f)| parse_field(f, k + 1, c + 1)).collect::<Result<_>>()?);
    }
    let measure = match opts.measure {
        MeasureMode::LastRow => Some(rows.pop().ok_or(Error::NonSquare { rows: 0, cols: width })?),
        MeasureMode::Uniform => None,
    };
    if rows.len() != width || width == 0 {
        return Err(Error::NonSquare { rows: rows.len(), cols: width });
    }
    let labels = labels.filter(|l| l.len() == width);
    NetworkFile { labels, weights: rows, measure }.into_network()
}

pub fn ingest_matrix_csv(path: &Path, opts: CsvOptions) -> Result<MeasureNetwork> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_csv(BufReader::new(f), opts)
}

/// Writes `x` in the format [`parse_matrix_csv`] reads: a label header if
/// the network has labels, the weight rows, and the measure row for
/// [`MeasureMode::LastRow`].
pub fn write_matrix_csv<W: Write>(writer: W, x: &MeasureNetwork, mode: MeasureMode) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if let Some(labels) = x.labels() {
        w.write_record(labels)?;
    }
    for i in 0..x.len() {
        w.write_record(x.weights().row(i).iter().map(|v| v.to_string()))?;
    }
    if mode == MeasureMode::LastRow {
        w.write_record(x.measure().iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Loads a `.json` or `.csv` network (CSV with default options).
pub fn load_network(path: &Path) -> Result<MeasureNetwork> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("json") => read_network_json(path),
        Some("csv") => ingest_matrix_csv(path, CsvOptions::default()),
        _ => Err(Error::Input(format!("{}: expected a .json or .csv network file", path.display()))),
    }
}

fn is_network_file(p: &Path) -> bool {
    matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "csv"))
}

/// Expands directories (non-recursively, sorted by name) and returns
/// `(name, path)` pairs, the name being the file stem.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.is_file() && is_network_file(q))
                .collect();
            entries.sort();
            out.extend(entries);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out
        .into_iter()
        .map(|p| (p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()), p))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpecFile {
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
    pub block_sizes: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl SbmSpecFile {
    pub fn into_spec(self) -> Result<SbmSpec> {
        Ok(SbmSpec::new(Matrix::from_rows(&self.means)?, Matrix::from_rows(&self.variances)?, self.block_sizes, self.seed)?)
    }
}

pub fn read_sbm_spec(path: &Path) -> Result<SbmSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: SbmSpecFile = serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })?;
    file.into_spec()
}

/// `label,<l1>,<l2>,...` header, then one labelled row per entry. Missing
/// entries (NaN) are written as `NaN`.
pub fn write_labelled_matrix<W: Write>(writer: W, labels: &[String], values: &Matrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(std::iter::once("label").chain(labels.iter().map(String::as_str)))?;
    for (i, l) in labels.iter().enumerate() {
        w.write_record(std::iter::once(l.clone()).chain(values.row(i).iter().map(|v| v.to_string())))?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn parse_dissimilarity_csv<R: Read>(reader: R) -> Result<DissimilarityMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let k = labels.len();
    let mut values = Matrix::zeros(k, k);
    let mut count = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if i >= k || rec.len() != k + 1 {
            return Err(Error::Ragged { row: i + 2, expected: k + 1, found: rec.len() });
        }
        for (j, f) in rec.iter().skip(1).enumerate() {
            values[(i, j)] = parse_field(f, i + 2, j + 2)?;
        }
        count += 1;
    }
    if count != k {
        return Err(Error::NonSquare { rows: count, cols: k });
    }
    Ok(DissimilarityMatrix::new(labels, values)?)
}

pub fn read_dissimilarity_csv(path: &Path) -> Result<DissimilarityMatrix> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dissimilarity_csv(BufReader::new(f))
}

/// Two-column `t,value` CSV.
pub fn write_curve_csv<W: Write>(writer: W, curve: &SizeCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "value"])?;
    for (t, v) in curve.grid.iter().zip(&curve.values) {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}
