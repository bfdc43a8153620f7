//! Marker/trait matrices from delimited text and their joint correlation matrix.
//!
//! Files have one header row of column names and one sample per row, no
//! quoting. Missing cells are rejected rather than imputed. Correlations use
//! mean-centered scatter (the 1/n convention cancels in the ratio).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView1};
use thiserror::Error;

use crate::bayes::{TripletCorrelation, TripletError};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: no header row")]
    NoHeader { path: PathBuf },
    #[error("{path}: no data rows")]
    NoRows { path: PathBuf },
    #[error("{path}: row {row}, column '{column}': missing value")]
    Missing { path: PathBuf, row: usize, column: String },
    #[error("{path}: row {row}, column '{column}': '{value}' is not a finite number")]
    NonNumeric { path: PathBuf, row: usize, column: String, value: String },
    #[error("column '{0}' is constant (zero variance)")]
    ConstantColumn(String),
    #[error("marker file has {markers} rows but trait file has {traits}")]
    RowMismatch { markers: usize, traits: usize },
    #[error("{what}: {names} names for {columns} columns")]
    NameMismatch { what: &'static str, names: usize, columns: usize },
    #[error("{0} has no columns")]
    NoColumns(&'static str),
}

/// Parsing options for delimited input.
#[derive(Debug, Clone, Copy)]
pub struct FormatOptions {
    pub delimiter: u8,
}

impl Default for FormatOptions {
    fn default() -> Self {
        FormatOptions { delimiter: b'\t' }
    }
}

/// A named numeric table, rows = samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub values: Array2<f64>,
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

pub fn read_table(path: &Path, opts: FormatOptions) -> Result<Table, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io { path: path.into(), source })?;
    let mut reader =
        csv::ReaderBuilder::new().delimiter(opts.delimiter).has_headers(true).quoting(false).from_reader(file);
    let parse_err = |source| DataError::Parse { path: path.into(), source };

    let names: Vec<String> = reader.headers().map_err(parse_err)?.iter().map(|s| s.trim().to_string()).collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(DataError::NoHeader { path: path.into() });
    }

    let mut flat = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(parse_err)?;
        rows += 1;
        for (c, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if is_missing(cell) {
                return Err(DataError::Missing { path: path.into(), row: rows, column: names[c].clone() });
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => flat.push(v),
                _ => {
                    return Err(DataError::NonNumeric {
                        path: path.into(),
                        row: rows,
                        column: names[c].clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }
    }
    if rows == 0 {
        return Err(DataError::NoRows { path: path.into() });
    }
    let values = Array2::from_shape_vec((rows, names.len()), flat).expect("csv enforces equal row lengths");
    Ok(Table { names, values })
}

/// Write a table with full round-trip precision (shortest exact decimal).
pub fn write_table<W: Write>(out: W, table: &Table, delimiter: u8) -> std::io::Result<()> {
    let mut w = BufWriter::new(out);
    let sep = delimiter as char;
    let header: Vec<&str> = table.names.iter().map(String::as_str).collect();
    writeln!(w, "{}", header.join(&sep.to_string()))?;
    for row in table.values.rows() {
        let mut first = true;
        for v in row {
            if !first {
                write!(w, "{sep}")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        writeln!(w)?;
    }
    w.flush()
}

/// Genetic markers and expression traits measured on the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionDataset {
    markers: Table,
    traits: Table,
}

impl ExpressionDataset {
    pub fn new(markers: Table, traits: Table) -> Result<Self, DataError> {
        for (what, t) in [("markers", &markers), ("traits", &traits)] {
            if t.values.ncols() == 0 {
                return Err(DataError::NoColumns(what));
            }
            if t.names.len() != t.values.ncols() {
                return Err(DataError::NameMismatch { what, names: t.names.len(), columns: t.values.ncols() });
            }
        }
        if markers.values.nrows() != traits.values.nrows() {
            return Err(DataError::RowMismatch { markers: markers.values.nrows(), traits: traits.values.nrows() });
        }
        for t in [&markers, &traits] {
            for (name, col) in t.names.iter().zip(t.values.columns()) {
                if is_constant(col) {
                    return Err(DataError::ConstantColumn(name.clone()));
                }
            }
        }
        Ok(ExpressionDataset { markers, traits })
    }

    pub fn from_arrays(markers: Array2<f64>, traits: Array2<f64>) -> Result<Self, DataError> {
        let names = |prefix: &str, k: usize| (1..=k).map(|i| format!("{prefix}{i}")).collect();
        let markers = Table { names: names("L", markers.ncols()), values: markers };
        let traits = Table { names: names("T", traits.ncols()), values: traits };
        Self::new(markers, traits)
    }

    pub fn markers(&self) -> &Table {
        &self.markers
    }

    pub fn traits(&self) -> &Table {
        &self.traits
    }

    pub fn n_samples(&self) -> usize {
        self.markers.values.nrows()
    }

    pub fn n_markers(&self) -> usize {
        self.markers.values.ncols()
    }

    pub fn n_traits(&self) -> usize {
        self.traits.values.ncols()
    }
}

fn is_constant(col: ArrayView1<f64>) -> bool {
    let first = col[0];
    col.iter().all(|&v| v == first)
}

pub fn load_dataset(
    marker_path: &Path,
    trait_path: &Path,
    opts: FormatOptions,
) -> Result<ExpressionDataset, DataError> {
    let markers = read_table(marker_path, opts)?;
    let traits = read_table(trait_path, opts)?;
    ExpressionDataset::new(markers, traits)
}

/// Dense correlation matrix over markers followed by traits.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCorrelation {
    matrix: Array2<f64>,
    n_samples: u64,
    n_markers: usize,
    n_traits: usize,
}

impl JointCorrelation {
    /// Wrap a precomputed correlation matrix (markers first, then traits).
    /// Symmetry and the unit diagonal are checked, and entries must lie in [-1, 1].
    pub fn from_matrix(matrix: Array2<f64>, n_samples: u64, n_markers: usize) -> Result<Self, CorrelationError> {
        let p = matrix.nrows();
        if matrix.ncols() != p || n_markers > p {
            return Err(CorrelationError::Shape);
        }
        for a in 0..p {
            if matrix[(a, a)] != 1.0 {
                return Err(CorrelationError::Diagonal(a));
            }
            for b in 0..a {
                let v = matrix[(a, b)];
                if !(v.abs() <= 1.0) || (v - matrix[(b, a)]).abs() > 1e-12 {
                    return Err(CorrelationError::Entry(a, b));
                }
            }
        }
        Ok(JointCorrelation { matrix, n_samples, n_markers, n_traits: p - n_markers })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn n_markers(&self) -> usize {
        self.n_markers
    }

    pub fn n_traits(&self) -> usize {
        self.n_traits
    }

    /// corr(marker k, trait i)
    pub fn marker_trait(&self, k: usize, i: usize) -> f64 {
        self.matrix[(k, self.n_markers + i)]
    }

    /// corr(trait i, trait j)
    pub fn trait_trait(&self, i: usize, j: usize) -> f64 {
        self.matrix[(self.n_markers + i, self.n_markers + j)]
    }

    /// Triplet `(X1, X2, X3) = (L_k, T_i, T_j)`.
    pub fn triplet(&self, k: usize, i: usize, j: usize, nu: f64) -> Result<TripletCorrelation, TripletError> {
        TripletCorrelation::new(
            self.marker_trait(k, i),
            self.marker_trait(k, j),
            self.trait_trait(i, j),
            self.n_samples,
            nu,
        )
    }

    /// Triplet `(X1, X2, X3) = (T_a, T_b, T_c)`, all traits.
    pub fn trait_triplet(&self, a: usize, b: usize, c: usize, nu: f64) -> Result<TripletCorrelation, TripletError> {
        TripletCorrelation::new(
            self.trait_trait(a, b),
            self.trait_trait(a, c),
            self.trait_trait(b, c),
            self.n_samples,
            nu,
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrelationError {
    #[error("correlation matrix must be square with at least as many columns as markers")]
    Shape,
    #[error("diagonal entry {0} is not 1")]
    Diagonal(usize),
    #[error("entry ({0}, {1}) is outside [-1, 1] or breaks symmetry")]
    Entry(usize, usize),
}

/// Pearson correlations over all marker and trait columns.
pub fn correlation_matrix(d: &ExpressionDataset) -> JointCorrelation {
    let n = d.n_samples();
    let l = d.n_markers();
    let m = d.n_traits();
    let mut z = Array2::<f64>::zeros((n, l + m));
    let cols = d.markers.values.columns().into_iter().chain(d.traits.values.columns());
    for (mut dst, src) in z.columns_mut().into_iter().zip(cols) {
        let mean = src.sum() / n as f64;
        let ss: f64 = src.iter().map(|&x| (x - mean) * (x - mean)).sum();
        let scale = ss.sqrt().recip();
        dst.zip_mut_with(&src, |o, &x| *o = (x - mean) * scale);
    }
    let mut c = z.t().dot(&z);
    let p = l + m;
    for a in 0..p {
        c[(a, a)] = 1.0;
        for b in 0..a {
            let v = c[(b, a)].clamp(-1.0, 1.0);
            c[(a, b)] = v;
            c[(b, a)] = v;
        }
    }
    JointCorrelation { matrix: c, n_samples: n as u64, n_markers: l, n_traits: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        let mut f = File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    /// Textbook double loop, two-pass means.
    fn naive_pearson(x: &Array2<f64>) -> Array2<f64> {
        let (n, p) = x.dim();
        let mut out = Array2::zeros((p, p));
        for a in 0..p {
            for b in 0..p {
                let ma = (0..n).map(|r| x[(r, a)]).sum::<f64>() / n as f64;
                let mb = (0..n).map(|r| x[(r, b)]).sum::<f64>() / n as f64;
                let mut sab = 0.0;
                let mut saa = 0.0;
                let mut sbb = 0.0;
                for r in 0..n {
                    sab += (x[(r, a)] - ma) * (x[(r, b)] - mb);
                    saa += (x[(r, a)] - ma).powi(2);
                    sbb += (x[(r, b)] - mb).powi(2);
                }
                out[(a, b)] = sab / (saa * sbb).sqrt();
            }
        }
        out
    }

    #[test]
    fn loads_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_tmp(&dir, "m.tsv", "L1\tL2\n0\t1\n1\t0\n1\t1\n0\t0\n");
        let t = write_tmp(&dir, "t.tsv", "A\tB\tC\n1.5\t2\t3\n0.1\t-2\t3.5\n4\t2e-1\t1\n7\t8\t9\n");
        let d = load_dataset(&m, &t, FormatOptions::default()).unwrap();
        assert_eq!((d.n_samples(), d.n_markers(), d.n_traits()), (4, 2, 3));
        assert_eq!(d.traits().names, vec!["A", "B", "C"]);
        assert_eq!(d.traits().values[(2, 1)], 0.2);
    }

    #[test]
    fn comma_delimiter() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_tmp(&dir, "m.csv", "L1\n0\n1\n");
        let t = write_tmp(&dir, "t.csv", "A,B\n1,2\n3,5\n");
        let d = load_dataset(&m, &t, FormatOptions { delimiter: b',' }).unwrap();
        assert_eq!(d.n_traits(), 2);
    }

    #[test]
    fn empty_cell_is_missing() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_tmp(&dir, "m.tsv", "L1\n0\n1\n");
        let t = write_tmp(&dir, "t.tsv", "A\tB\n1\t\n3\t5\n");
        match load_dataset(&m, &t, FormatOptions::default()) {
            Err(DataError::Missing { row, column, .. }) => {
                assert_eq!((row, column.as_str()), (1, "B"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reported() {
        let dir = tempfile::tempdir().unwrap();
        let t = write_tmp(&dir, "t.tsv", "A\tB\n1\t2\n3\tx7\n");
        match read_table(&t, FormatOptions::default()) {
            Err(DataError::NonNumeric { row, column, value, .. }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "B", "x7"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_marker_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_tmp(&dir, "m.tsv", "L1\tL2\n0\t1\n0\t0\n0\t1\n");
        let t = write_tmp(&dir, "t.tsv", "A\n1\n2\n3\n");
        match load_dataset(&m, &t, FormatOptions::default()) {
            Err(DataError::ConstantColumn(name)) => assert_eq!(name, "L1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn row_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_tmp(&dir, "m.tsv", "L1\n0\n1\n");
        let t = write_tmp(&dir, "t.tsv", "A\n1\n2\n3\n");
        assert!(matches!(
            load_dataset(&m, &t, FormatOptions::default()),
            Err(DataError::RowMismatch { markers: 2, traits: 3 })
        ));
    }

    #[test]
    fn ragged_row_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let t = write_tmp(&dir, "t.tsv", "A\tB\n1\t2\n3\n");
        assert!(matches!(read_table(&t, FormatOptions::default()), Err(DataError::Parse { .. })));
    }

    #[test]
    fn correlation_matches_naive_loop() {
        let markers = array![[0.0], [1.0], [1.0], [0.0], [1.0]];
        let traits = array![[1.2, -0.3, 2.0], [0.7, 0.4, 2.5], [3.1, 1.9, -1.0], [-0.5, 0.2, 0.0], [2.2, 2.8, 0.3]];
        let d = ExpressionDataset::from_arrays(markers.clone(), traits.clone()).unwrap();
        let c = correlation_matrix(&d);
        let joint = ndarray::concatenate![ndarray::Axis(1), markers, traits];
        let expected = naive_pearson(&joint);
        for ((a, b), v) in c.matrix().indexed_iter() {
            assert!((v - expected[(a, b)]).abs() < 1e-12, "({a},{b})");
        }
    }

    #[test]
    fn duplicate_and_negated_columns() {
        let markers = array![[0.0], [1.0], [1.0], [0.0]];
        let traits = array![[1.0, 1.0, -1.0], [2.0, 2.0, -2.0], [0.5, 0.5, -0.5], [4.0, 4.0, -4.0]];
        let c = correlation_matrix(&ExpressionDataset::from_arrays(markers, traits).unwrap());
        assert_eq!(c.trait_trait(0, 1), 1.0);
        assert_eq!(c.trait_trait(0, 2), -1.0);
        assert!(c.triplet(0, 0, 1, 4.0).is_err());
    }

    #[test]
    fn standardizing_first_changes_nothing() {
        let markers = array![[0.0, 3.0], [1.0, 1.0], [1.0, 2.0], [0.0, 7.0], [1.0, 5.5], [0.0, 0.1]];
        let traits = array![[1.2, 100.0], [0.7, 250.0], [3.1, -30.0], [-0.5, 12.0], [2.2, 80.0], [1.0, 1.0]];
        let standardize = |x: &Array2<f64>| {
            let mut y = x.clone();
            for mut col in y.columns_mut() {
                let mean = col.mean().unwrap();
                let sd = col.std(0.0);
                col.mapv_inplace(|v| (v - mean) / sd);
            }
            y
        };
        let a = correlation_matrix(&ExpressionDataset::from_arrays(markers.clone(), traits.clone()).unwrap());
        let b =
            correlation_matrix(&ExpressionDataset::from_arrays(standardize(&markers), standardize(&traits)).unwrap());
        for (x, y) in a.matrix().iter().zip(b.matrix()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn write_then_read_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let table = Table {
            names: vec!["a".into(), "b".into()],
            values: array![[0.1 + 0.2, -1e-300], [std::f64::consts::PI, 12345.678901234567]],
        };
        let path = dir.path().join("x.tsv");
        write_table(File::create(&path).unwrap(), &table, b'\t').unwrap();
        let back = read_table(&path, FormatOptions::default()).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn from_matrix_validation() {
        let ok = array![[1.0, 0.5], [0.5, 1.0]];
        assert!(JointCorrelation::from_matrix(ok, 10, 1).is_ok());
        let bad = array![[1.0, 0.5], [0.4, 1.0]];
        assert_eq!(JointCorrelation::from_matrix(bad, 10, 1), Err(CorrelationError::Entry(1, 0)));
        let diag = array![[0.9, 0.5], [0.5, 1.0]];
        assert_eq!(JointCorrelation::from_matrix(diag, 10, 1), Err(CorrelationError::Diagonal(0)));
    }
}
