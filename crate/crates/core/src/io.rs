//! File ingestion (CSV series, PGM images) and result persistence (CSV, JSON).

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{factorial, PatternDistribution, PatternSymbol};
use crate::scalar::Scalar;
use crate::segmentation::DivergenceProfile;

/// Where and how to read a numeric column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesFile {
    pub path: PathBuf,
    pub column: usize,
    pub delimiter: u8,
    pub skip_header: bool,
}

impl SeriesFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        SeriesFile {
            path: path.into(),
            column: 0,
            delimiter: b',',
            skip_header: false,
        }
    }

    pub fn column(mut self, column: usize) -> Self {
        self.column = column;
        self
    }

    pub fn delimiter(mut self, delimiter: u8) -> Self {
        self.delimiter = delimiter;
        self
    }

    pub fn skip_header(mut self, skip: bool) -> Self {
        self.skip_header = skip;
        self
    }
}

/// Reads the selected column as finite reals, preserving row order.
///
/// Rows in errors are 1-based file lines.
pub fn load_series<T: Scalar>(source: &SeriesFile) -> Result<Vec<T>> {
    let file = File::open(&source.path).map_err(|e| Error::io(&source.path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(source.skip_header)
        .delimiter(source.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                row,
                column: source.column,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let cell = record.get(source.column).ok_or_else(|| Error::Parse {
            row,
            column: source.column,
            message: format!("row has only {} column(s)", record.len()),
        })?;
        let value: f64 = cell
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::Parse {
                row,
                column: source.column,
                message: format!("'{cell}' is not a finite real"),
            })?;
        out.push(T::lit(value));
    }
    if out.is_empty() {
        return Err(Error::format(&source.path, "no data rows"));
    }
    Ok(out)
}

/// Writes one value per line.
pub fn save_series<T: Scalar>(values: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for v in values {
        writeln!(w, "{}", v.to_f64_lossy()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Grayscale image with integer levels in `[0, 2^bits)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageMatrix {
    pub width: usize,
    pub height: usize,
    pub bits: u32,
    pub pixels: Vec<u16>,
}

impl ImageMatrix {
    pub fn new(width: usize, height: usize, pixels: Vec<u16>) -> Result<Self> {
        let img = ImageMatrix {
            width,
            height,
            bits: 8,
            pixels,
        };
        img.validate()?;
        Ok(img)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width * self.height != self.pixels.len() {
            return Err(Error::invalid(format!(
                "{}x{} image holds {} pixels",
                self.width,
                self.height,
                self.pixels.len()
            )));
        }
        let limit = 1u32 << self.bits;
        if let Some(i) = self.pixels.iter().position(|&p| u32::from(p) >= limit) {
            return Err(Error::invalid(format!("pixel {i} exceeds {}-bit range", self.bits)));
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.width + col]
    }

    /// `height x width` array (rows first).
    pub fn to_array<T: Scalar>(&self) -> Array2<T> {
        Array2::from_shape_fn((self.height, self.width), |(r, c)| T::lit(f64::from(self.get(r, c))))
    }
}

struct PgmCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl PgmCursor<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&[u8]> {
        self.skip_space();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn number(&mut self) -> Option<usize> {
        std::str::from_utf8(self.token()?).ok()?.parse().ok()
    }
}

/// Parses an 8-bit PGM image, ASCII (`P2`) or binary (`P5`).
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageMatrix> {
    let path = path.as_ref();
    let mut data = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(|e| Error::io(path, e))?;
    parse_pgm(&data).map_err(|m| Error::format(path, m))
}

fn parse_pgm(data: &[u8]) -> std::result::Result<ImageMatrix, String> {
    let mut cur = PgmCursor { data, pos: 0 };
    let binary = match cur.token() {
        Some(b"P2") => false,
        Some(b"P5") => true,
        Some(other) => {
            return Err(format!(
                "bad magic number '{}' (expected P2 or P5)",
                String::from_utf8_lossy(other)
            ))
        }
        None => return Err("empty file".into()),
    };
    let width = cur.number().ok_or("missing or malformed width")?;
    let height = cur.number().ok_or("missing or malformed height")?;
    let maxval = cur.number().ok_or("missing or malformed maxval")?;
    if width == 0 || height == 0 {
        return Err(format!("degenerate dimensions {width}x{height}"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(format!("maxval {maxval} unsupported (must be 1..=255)"));
    }
    let count = width * height;
    let pixels: Vec<u16> = if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = cur.pos + 1;
        let raster = data.get(start..).unwrap_or(&[]);
        if raster.len() < count {
            return Err(format!(
                "truncated payload: expected {count} pixels, found {}",
                raster.len()
            ));
        }
        raster[..count].iter().map(|&b| u16::from(b)).collect()
    } else {
        let mut px = Vec::with_capacity(count);
        for i in 0..count {
            match cur.token() {
                None => return Err(format!("truncated payload: expected {count} pixels, found {i}")),
                Some(t) => {
                    let v: usize = std::str::from_utf8(t)
                        .ok()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| format!("malformed pixel {i}: '{}'", String::from_utf8_lossy(t)))?;
                    if v > maxval {
                        return Err(format!("pixel {i} value {v} exceeds maxval {maxval}"));
                    }
                    px.push(v as u16);
                }
            }
        }
        px
    };
    if let Some(i) = pixels.iter().position(|&p| usize::from(p) > maxval) {
        return Err(format!("pixel {i} value {} exceeds maxval {maxval}", pixels[i]));
    }
    Ok(ImageMatrix {
        width,
        height,
        bits: 8,
        pixels,
    })
}

/// Writes an 8-bit PGM (`P5` when `binary`, else `P2`).
pub fn save_image(img: &ImageMatrix, path: impl AsRef<Path>, binary: bool) -> Result<()> {
    let path = path.as_ref();
    img.validate()?;
    if img.pixels.iter().any(|&p| p > 255) {
        return Err(Error::invalid("only 8-bit images can be written"));
    }
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    if binary {
        write!(w, "P5\n{} {}\n255\n", img.width, img.height).map_err(io)?;
        let bytes: Vec<u8> = img.pixels.iter().map(|&p| p as u8).collect();
        w.write_all(&bytes).map_err(io)?;
    } else {
        write!(w, "P2\n{} {}\n255\n", img.width, img.height).map_err(io)?;
        for row in img.pixels.chunks(img.width) {
            let line: Vec<String> = row.iter().map(u16::to_string).collect();
            writeln!(w, "{}", line.join(" ")).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown format '{other}' (csv or json)"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Provenance stored alongside JSON results.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dy: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_y: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl ResultMeta {
    pub fn series(d: usize, tau: usize) -> Self {
        ResultMeta {
            d: Some(d),
            tau: Some(tau),
            ..Default::default()
        }
    }

    pub fn image(dx: usize, dy: usize, tau_x: usize, tau_y: usize) -> Self {
        ResultMeta {
            dx: Some(dx),
            dy: Some(dy),
            tau_x: Some(tau_x),
            tau_y: Some(tau_y),
            ..Default::default()
        }
    }

    pub fn with_g(mut self, g: impl Into<String>) -> Self {
        self.g = Some(g.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    /// Embedding fields only, for compatibility checks between inputs.
    pub fn embedding_key(&self) -> [Option<usize>; 6] {
        [self.d, self.tau, self.dx, self.dy, self.tau_x, self.tau_y]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRecord {
    #[serde(flatten)]
    pub meta: ResultMeta,
    pub pattern_len: usize,
    pub sample_count: usize,
    pub probs: Vec<f64>,
}

impl DistributionRecord {
    pub fn new<T: Scalar>(dist: &PatternDistribution<T>, meta: ResultMeta) -> Self {
        DistributionRecord {
            meta,
            pattern_len: dist.pattern_len(),
            sample_count: dist.sample_count(),
            probs: dist.probs().iter().map(|p| p.to_f64_lossy()).collect(),
        }
    }

    pub fn to_distribution<T: Scalar>(&self) -> Result<PatternDistribution<T>> {
        PatternDistribution::from_probs(
            self.probs.iter().map(|&p| T::lit(p)).collect(),
            self.pattern_len,
            self.sample_count,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    #[serde(flatten)]
    pub meta: ResultMeta,
    pub positions: Vec<usize>,
    pub values: Vec<f64>,
    pub argmax_position: usize,
    pub max_value: f64,
}

impl ProfileRecord {
    pub fn new<T: Scalar>(profile: &DivergenceProfile<T>, meta: ResultMeta) -> Self {
        ProfileRecord {
            meta,
            positions: profile.positions().to_vec(),
            values: profile.values().iter().map(|v| v.to_f64_lossy()).collect(),
            argmax_position: profile.argmax_position(),
            max_value: profile.max_value().to_f64_lossy(),
        }
    }

    pub fn to_profile<T: Scalar>(&self) -> Result<DivergenceProfile<T>> {
        DivergenceProfile::new(
            self.positions.clone(),
            self.values.iter().map(|&v| T::lit(v)).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    #[serde(flatten)]
    pub meta: ResultMeta,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl MatrixRecord {
    pub fn new<T: Scalar>(matrix: &Array2<T>, labels: Vec<String>, meta: ResultMeta) -> Self {
        MatrixRecord {
            meta,
            labels,
            values: matrix
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|v| v.to_f64_lossy()).collect())
                .collect(),
        }
    }

    pub fn to_array(&self) -> Result<Array2<f64>> {
        let n = self.values.len();
        let m = self.values.first().map_or(0, Vec::len);
        if self.values.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(Array2::from_shape_fn((n, m), |(i, j)| self.values[i][j]))
    }
}

/// Any persisted result; JSON carries a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ResultRecord {
    Distribution(DistributionRecord),
    Profile(ProfileRecord),
    Matrix(MatrixRecord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Distribution,
    Profile,
    Matrix,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::format(path, e.to_string())
}

fn pattern_label(index: usize, m: usize) -> String {
    PatternSymbol::from_index(index, m)
        .map(|s| s.ranks().iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
        .unwrap_or_default()
}

/// Persists a result. CSV layouts:
/// distribution `index,pattern,probability`; profile `position,value`;
/// matrix: bare square grid, one row per line, no header.
pub fn save_results(record: &ResultRecord, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    let path = path.as_ref();
    let w = create(path)?;
    match format {
        OutputFormat::Json => {
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, record).map_err(|e| Error::format(path, e.to_string()))?;
            writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
        }
        OutputFormat::Csv => {
            let mut cw = csv::WriterBuilder::new().has_headers(false).from_writer(w);
            match record {
                ResultRecord::Distribution(d) => {
                    cw.write_record(["index", "pattern", "probability"]).map_err(|e| csv_err(path, e))?;
                    for (i, p) in d.probs.iter().enumerate() {
                        cw.write_record([i.to_string(), pattern_label(i, d.pattern_len), p.to_string()])
                            .map_err(|e| csv_err(path, e))?;
                    }
                }
                ResultRecord::Profile(p) => {
                    cw.write_record(["position", "value"]).map_err(|e| csv_err(path, e))?;
                    for (pos, v) in p.positions.iter().zip(&p.values) {
                        cw.write_record([pos.to_string(), v.to_string()]).map_err(|e| csv_err(path, e))?;
                    }
                }
                ResultRecord::Matrix(m) => {
                    for row in &m.values {
                        cw.write_record(row.iter().map(f64::to_string)).map_err(|e| csv_err(path, e))?;
                    }
                }
            }
            cw.flush().map_err(|e| Error::io(path, e))
        }
    }
}

pub fn load_results_json(path: impl AsRef<Path>) -> Result<ResultRecord> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::format(path, e.to_string()))
}

/// Reads a CSV written by [`save_results`]; metadata is not stored in CSV.
pub fn load_results_csv(path: impl AsRef<Path>, kind: RecordKind) -> Result<ResultRecord> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(kind != RecordKind::Matrix)
        .from_reader(BufReader::new(file));
    let rows: Vec<csv::StringRecord> = r
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_err(path, e))?;
    let num = |rec: &csv::StringRecord, col: usize| -> Result<f64> {
        rec.get(col)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                row: rec.position().map_or(0, |p| p.line() as usize),
                column: col,
                message: "expected a number".into(),
            })
    };
    Ok(match kind {
        RecordKind::Distribution => {
            let probs = rows.iter().map(|r| num(r, 2)).collect::<Result<Vec<_>>>()?;
            let pattern_len = (2..=crate::ordinal::MAX_PATTERN_LEN)
                .find(|&m| factorial(m) == probs.len())
                .ok_or_else(|| Error::format(path, format!("{} bins is not m! for any m", probs.len())))?;
            ResultRecord::Distribution(DistributionRecord {
                meta: ResultMeta::default(),
                pattern_len,
                sample_count: 0,
                probs,
            })
        }
        RecordKind::Profile => {
            let positions = rows.iter().map(|r| num(r, 0).map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
            let values = rows.iter().map(|r| num(r, 1)).collect::<Result<Vec<_>>>()?;
            let tmp = DivergenceProfile::new(positions, values)?;
            ResultRecord::Profile(ProfileRecord::new(&tmp, ResultMeta::default()))
        }
        RecordKind::Matrix => {
            let values = rows
                .iter()
                .map(|r| (0..r.len()).map(|c| num(r, c)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let labels = (0..values.len()).map(|i| i.to_string()).collect();
            ResultRecord::Matrix(MatrixRecord {
                meta: ResultMeta::default(),
                labels,
                values,
            })
        }
    })
}

/// A table cell: numbers stay numbers in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Plot-ready table: one observable per column.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let c = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[c]).collect())
    }

    pub fn save(&self, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
        let path = path.as_ref();
        let w = create(path)?;
        match format {
            OutputFormat::Csv => {
                let mut cw = csv::Writer::from_writer(w);
                cw.write_record(&self.headers).map_err(|e| csv_err(path, e))?;
                for row in &self.rows {
                    cw.write_record(row.iter().map(Cell::to_string)).map_err(|e| csv_err(path, e))?;
                }
                cw.flush().map_err(|e| Error::io(path, e))
            }
            OutputFormat::Json => {
                let objs: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|row| {
                        self.headers
                            .iter()
                            .cloned()
                            .zip(row.iter().map(|c| serde_json::to_value(c).unwrap_or_default()))
                            .collect()
                    })
                    .collect();
                let mut w = w;
                serde_json::to_writer_pretty(&mut w, &objs).map_err(|e| Error::format(path, e.to_string()))?;
                writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, content: &[u8]) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn plain_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.csv", b"1\n2\n3\n");
        assert_eq!(load_series::<f64>(&SeriesFile::new(p)).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn header_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.csv", b"t,v\n0,0.5\n1,0.7\n");
        let source = SeriesFile::new(p).column(1).skip_header(true);
        assert_eq!(load_series::<f64>(&source).unwrap(), vec![0.5, 0.7]);
    }

    #[test]
    fn bad_cell_names_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.csv", b"1\n2\nabc\n4\n");
        match load_series::<f64>(&SeriesFile::new(p)) {
            Err(Error::Parse { row, column, message }) => {
                assert_eq!(row, 3);
                assert_eq!(column, 0);
                assert!(message.contains("abc"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn series_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "e.csv", b"");
        assert!(load_series::<f64>(&SeriesFile::new(p)).is_err());
        let p = write(dir.path(), "n.csv", b"1\nnan\n");
        assert!(matches!(load_series::<f64>(&SeriesFile::new(p)), Err(Error::Parse { row: 2, .. })));
        let p = write(dir.path(), "c.csv", b"1,2\n3\n");
        assert!(matches!(
            load_series::<f64>(&SeriesFile::new(p).column(1)),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            load_series::<f64>(&SeriesFile::new(dir.path().join("missing.csv"))),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn semicolon_delimiter() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.csv", b"1;10\n2;20\n");
        let source = SeriesFile::new(p).column(1).delimiter(b';');
        assert_eq!(load_series::<f64>(&source).unwrap(), vec![10.0, 20.0]);
    }

    #[test]
    fn ascii_pgm() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.pgm", b"P2\n# comment\n2 2\n255\n0 10\n20 30\n");
        let img = load_image(p).unwrap();
        assert_eq!((img.width, img.height), (2, 2));
        assert_eq!(img.pixels, vec![0, 10, 20, 30]);
        let a = img.to_array::<f64>();
        assert_eq!(a[[0, 1]], 10.0);
        assert_eq!(a[[1, 0]], 20.0);
    }

    #[test]
    fn binary_matches_ascii() {
        let dir = tempfile::tempdir().unwrap();
        let img = ImageMatrix::new(3, 2, vec![1, 2, 3, 250, 0, 9]).unwrap();
        let a = dir.path().join("a.pgm");
        let b = dir.path().join("b.pgm");
        save_image(&img, &a, false).unwrap();
        save_image(&img, &b, true).unwrap();
        assert_eq!(load_image(&a).unwrap(), img);
        assert_eq!(load_image(&b).unwrap(), img);
    }

    #[test]
    fn pgm_defects() {
        let dir = tempfile::tempdir().unwrap();
        let bad = |name: &str, content: &[u8], needle: &str| {
            let p = write(dir.path(), name, content);
            let msg = load_image(p).unwrap_err().to_string();
            assert!(msg.contains(needle), "{msg}");
        };
        bad("m.pgm", b"P6\n2 2\n255\n", "magic");
        bad("t.pgm", b"P2\n2 2\n255\n1 2 3\n", "truncated");
        bad("tb.pgm", b"P5\n2 2\n255\n\x01\x02", "truncated");
        bad("x.pgm", b"P2\n1 1\n65535\n7\n", "maxval");
        bad("o.pgm", b"P2\n1 1\n100\n101\n", "exceeds maxval");
        bad("h.pgm", b"P2\n2\n", "height");
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let probs: Vec<f64> = (1..=24).map(|i| i as f64 / 300.0).collect();
        let d = PatternDistribution::from_probs(probs, 4, 1000).unwrap();
        let meta = ResultMeta::series(4, 1).with_g("log").with_seed(7);
        let rec = ResultRecord::Distribution(DistributionRecord::new(&d, meta));
        let p = dir.path().join("d.json");
        save_results(&rec, &p, OutputFormat::Json).unwrap();
        let back = load_results_json(&p).unwrap();
        assert_eq!(back, rec);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"kind\": \"distribution\""));
    }

    #[test]
    fn profile_json_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let prof = DivergenceProfile::new(vec![48, 49], vec![0.1, 0.25]).unwrap();
        let rec = ResultRecord::Profile(ProfileRecord::new(&prof, ResultMeta::series(4, 1).with_g("log")));
        let p = dir.path().join("p.json");
        save_results(&rec, &p, OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert_eq!(v["g"], "log");
        assert_eq!(v["d"], 4);
        assert_eq!(v["tau"], 1);
        assert_eq!(v["argmax_position"], 49);
    }

    #[test]
    fn matrix_csv_shape() {
        let dir = tempfile::tempdir().unwrap();
        let m = Array2::from_shape_fn((6, 6), |(i, j)| (i as f64 - j as f64).abs() / 7.0);
        let rec = ResultRecord::Matrix(MatrixRecord::new(&m, vec![], ResultMeta::default()));
        let p = dir.path().join("m.csv");
        save_results(&rec, &p, OutputFormat::Csv).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.split(',').count() == 6));
        match load_results_csv(&p, RecordKind::Matrix).unwrap() {
            ResultRecord::Matrix(mr) => assert_eq!(mr.to_array().unwrap(), m),
            _ => unreachable!(),
        }
    }

    #[test]
    fn csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let probs: Vec<f64> = vec![0.1, 0.2, 0.3, 0.15, 0.05, 0.2];
        let d = PatternDistribution::from_probs(probs.clone(), 3, 10).unwrap();
        let p = dir.path().join("d.csv");
        save_results(&ResultRecord::Distribution(DistributionRecord::new(&d, ResultMeta::default())), &p, OutputFormat::Csv)
            .unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().contains("3,1-2-0,0.15"));
        match load_results_csv(&p, RecordKind::Distribution).unwrap() {
            ResultRecord::Distribution(r) => assert_eq!(r.probs, probs),
            _ => unreachable!(),
        }
        let prof = DivergenceProfile::new(vec![5, 6, 7], vec![0.1, 1.0 / 3.0, 0.2]).unwrap();
        let p = dir.path().join("p.csv");
        save_results(&ResultRecord::Profile(ProfileRecord::new(&prof, ResultMeta::default())), &p, OutputFormat::Csv)
            .unwrap();
        match load_results_csv(&p, RecordKind::Profile).unwrap() {
            ResultRecord::Profile(r) => assert_eq!(r.to_profile::<f64>().unwrap(), prof),
            _ => unreachable!(),
        }
    }

    #[test]
    fn table_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(["eps", "g", "median"]);
        t.push(vec![0.0.into(), "log".into(), 0.5.into()]);
        let p = dir.path().join("t.csv");
        t.save(&p, OutputFormat::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "eps,g,median\n0,log,0.5\n");
        let p = dir.path().join("t.json");
        t.save(&p, OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert_eq!(v[0]["g"], "log");
    }
}
