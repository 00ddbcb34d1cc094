//! Loading, standardizing and cross-multiplying data matrices.
//!
//! Two on-disk formats are understood: plain CSV (optional header row) and
//! MatrixMarket `array`/`coordinate` files with `real general` qualifiers.

use std::fs;
use std::io::Write;
use std::ops::Deref;
use std::path::Path;

use crate::dense::Matrix;
use crate::error::{Error, Result};

/// Samples-by-variables matrix, optionally with column names.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Matrix,
    col_names: Option<Vec<String>>,
}

impl DataMatrix {
    pub fn new(values: Matrix, col_names: Option<Vec<String>>) -> Result<Self> {
        if values.rows() == 0 || values.cols() == 0 {
            return Err(Error::Shape(format!(
                "data matrix must be non-empty, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        if !values.is_finite() {
            return Err(Error::InvalidParameter(
                "data matrix contains non-finite entries".into(),
            ));
        }
        if let Some(names) = &col_names {
            if names.len() != values.cols() {
                return Err(Error::Shape(format!(
                    "{} column names for {} columns",
                    names.len(),
                    values.cols()
                )));
            }
        }
        Ok(Self { values, col_names })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        if let Some(first) = rows.first() {
            let c = first.as_ref().len();
            if let Some(i) = rows.iter().position(|r| r.as_ref().len() != c) {
                return Err(Error::Shape(format!("row {i} has a different length")));
            }
        }
        Self::new(Matrix::from_rows(rows), None)
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn col_names(&self) -> Option<&[String]> {
        self.col_names.as_deref()
    }

    pub fn into_parts(self) -> (Matrix, Option<Vec<String>>) {
        (self.values, self.col_names)
    }
}

/// Cross-covariance `XᵀY` (or any matrix handed to the solver directly).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCov(Matrix);

impl CrossCov {
    pub fn new(values: Matrix) -> Result<Self> {
        if values.rows() == 0 || values.cols() == 0 {
            return Err(Error::Shape("cross-covariance must be non-empty".into()));
        }
        if !values.is_finite() {
            return Err(Error::InvalidParameter(
                "cross-covariance contains non-finite entries".into(),
            ));
        }
        Ok(Self(values))
    }

    /// Panics on ragged or empty input; intended for literals and tests.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        Self::new(Matrix::from_rows(rows)).expect("valid cross-covariance literal")
    }

    pub fn m(&self) -> usize {
        self.0.rows()
    }

    pub fn n(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn transpose(&self) -> CrossCov {
        CrossCov(self.0.transpose())
    }
}

impl Deref for CrossCov {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl From<DataMatrix> for CrossCov {
    fn from(d: DataMatrix) -> Self {
        CrossCov(d.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    MatrixMarket,
}

impl Format {
    /// `.mtx`/`.mm` map to MatrixMarket, everything else to CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("mtx") || e.eq_ignore_ascii_case("mm") => {
                Format::MatrixMarket
            }
            _ => Format::Csv,
        }
    }
}

/// CSV header handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Header {
    /// First row is a header iff some cell in it is not numeric.
    #[default]
    Auto,
    Present,
    Absent,
}

pub fn load_matrix(path: impl AsRef<Path>, format: Format) -> Result<DataMatrix> {
    load_matrix_with(path, format, Header::Auto)
}

pub fn load_matrix_with(
    path: impl AsRef<Path>,
    format: Format,
    header: Header,
) -> Result<DataMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        Format::Csv => parse_csv(&text, header),
        Format::MatrixMarket => parse_matrix_market(&text),
    }
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_csv(text: &str, header: Header) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut names = None;
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0usize;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        if k == 0 {
            let is_header = match header {
                Header::Present => true,
                Header::Absent => false,
                Header::Auto => record.iter().any(|c| parse_finite(c).is_none()),
            };
            if is_header {
                names = Some(record.iter().map(str::to_owned).collect::<Vec<_>>());
                cols = Some(record.len());
                continue;
            }
        }
        let width = *cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::parse(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            let v = parse_finite(cell).ok_or_else(|| {
                Error::parse(
                    line,
                    format!("column {}: '{cell}' is not a finite number", j + 1),
                )
            })?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(Error::parse(0, "no numeric data rows"));
    }
    DataMatrix::new(Matrix::from_row_major(rows, cols, data), names)
}

pub fn parse_matrix_market(text: &str) -> Result<DataMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty MatrixMarket file"))?;
    let fields: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" {
        return Err(Error::parse(1, "missing %%MatrixMarket banner"));
    }
    if fields[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object '{}'", fields[1])));
    }
    let coordinate = match fields[2].as_str() {
        "array" => false,
        "coordinate" => true,
        other => return Err(Error::UnsupportedFormat(format!("format '{other}'"))),
    };
    if fields[3] != "real" {
        return Err(Error::UnsupportedFormat(format!("field '{}'", fields[3])));
    }
    if fields[4] != "general" {
        return Err(Error::UnsupportedFormat(format!(
            "symmetry '{}'",
            fields[4]
        )));
    }

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body
        .next()
        .ok_or_else(|| Error::parse(1, "missing size line"))?;
    let dims = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::parse(size_line, format!("bad size line: {e}")))?;
    let expected = if coordinate { 3 } else { 2 };
    if dims.len() != expected {
        return Err(Error::parse(
            size_line,
            format!("size line needs {expected} integers"),
        ));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows == 0 || cols == 0 {
        return Err(Error::parse(size_line, "empty matrix"));
    }
    let mut m = Matrix::zeros(rows, cols);

    if coordinate {
        let nnz = dims[2];
        let mut seen = std::collections::HashSet::with_capacity(nnz);
        let mut count = 0usize;
        for (line, l) in body {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(Error::parse(line, "coordinate entry needs 'row col value'"));
            }
            let i: usize = t[0]
                .parse()
                .map_err(|_| Error::parse(line, format!("bad row index '{}'", t[0])))?;
            let j: usize = t[1]
                .parse()
                .map_err(|_| Error::parse(line, format!("bad column index '{}'", t[1])))?;
            let v = parse_finite(t[2])
                .ok_or_else(|| Error::parse(line, format!("'{}' is not a finite number", t[2])))?;
            if i == 0 || i > rows || j == 0 || j > cols {
                return Err(Error::parse(
                    line,
                    format!("entry ({i},{j}) outside {rows}x{cols}"),
                ));
            }
            if !seen.insert((i, j)) {
                return Err(Error::parse(line, format!("duplicate entry ({i},{j})")));
            }
            m[(i - 1, j - 1)] = v;
            count += 1;
        }
        if count != nnz {
            return Err(Error::parse(
                size_line,
                format!("declared {nnz} entries, found {count}"),
            ));
        }
    } else {
        // array data is column-major, one value per line
        let mut k = 0usize;
        for (line, l) in body {
            for tok in l.split_whitespace() {
                let v = parse_finite(tok)
                    .ok_or_else(|| Error::parse(line, format!("'{tok}' is not a finite number")))?;
                if k >= rows * cols {
                    return Err(Error::parse(line, "more values than declared"));
                }
                m[(k % rows, k / rows)] = v;
                k += 1;
            }
        }
        if k != rows * cols {
            return Err(Error::parse(
                size_line,
                format!("declared {} values, found {k}", rows * cols),
            ));
        }
    }
    DataMatrix::new(m, None)
}

fn fmt_value(v: f64) -> String {
    // Debug formatting is the shortest string that parses back to `v`.
    format!("{v:?}")
}

pub fn write_csv<W: Write>(m: &DataMatrix, mut w: W) -> std::io::Result<()> {
    if let Some(names) = m.col_names() {
        writeln!(w, "{}", names.join(","))?;
    }
    for i in 0..m.rows() {
        let row: Vec<String> = m.values().row(i).iter().map(|&v| fmt_value(v)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes the `array real general` variant (column-major values).
pub fn write_matrix_market<W: Write>(m: &DataMatrix, mut w: W) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(w, "{}", fmt_value(m.values()[(i, j)]))?;
        }
    }
    Ok(())
}

/// Centers each column and scales it to unit sample standard deviation
/// (divisor `k - 1`).
pub fn standardize(m: &DataMatrix) -> Result<DataMatrix> {
    let k = m.rows();
    if k < 2 {
        return Err(Error::Shape(format!(
            "standardizing needs at least 2 samples, got {k}"
        )));
    }
    let src = m.values();
    let mut out = src.clone();
    for j in 0..m.cols() {
        let col = src.column(j);
        let scale = col.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let mean = col.iter().sum::<f64>() / k as f64;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let std = (ss / (k - 1) as f64).sqrt();
        if std <= 1e-12 * scale || std == 0.0 {
            return Err(Error::DegenerateColumn(j));
        }
        for (i, v) in col.iter().enumerate() {
            out[(i, j)] = (v - mean) / std;
        }
    }
    DataMatrix::new(out, m.col_names.clone())
}

/// `XᵀY` for matrices sharing the sample dimension.
pub fn cross_covariance(x: &DataMatrix, y: &DataMatrix) -> Result<CrossCov> {
    if x.rows() != y.rows() {
        return Err(Error::Shape(format!(
            "X has {} samples but Y has {}",
            x.rows(),
            y.rows()
        )));
    }
    CrossCov::new(x.values().t_matmul(y.values()))
}
