//! Binary dataset representation, CSV ingestion, validation, and the
//! multidimensional poverty index.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use thiserror::Error;

/// Errors raised while building or loading a [`BinaryDataset`].
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("file {path} contains no data rows")]
    Empty { path: String },
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cell at row {row}, column {col} is {value:?}; expected 0, 1, true or false")]
    NonBinaryCell {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("duplicate column name {name:?}")]
    DuplicateColumn { name: String },
    #[error("column name must be non-empty")]
    EmptyColumnName,
    #[error("dataset needs at least 2 columns, got {0}")]
    TooFewColumns(usize),
    #[error("dataset needs at least 1 row")]
    NoRows,
    #[error("deprivation threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
}

/// An n x d matrix of 0/1 indicator values with named columns.
///
/// Rows are observations (e.g. households), columns are binary variables.
/// Datasets are immutable after construction and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    names: Vec<String>,
    rows: Vec<Vec<u8>>,
}

impl BinaryDataset {
    /// Builds a dataset from named columns and row-major 0/1 cells.
    pub fn new(names: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self, DatasetError> {
        if names.len() < 2 {
            return Err(DatasetError::TooFewColumns(names.len()));
        }
        if rows.is_empty() {
            return Err(DatasetError::NoRows);
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(DatasetError::EmptyColumnName);
            }
            if names[..i].contains(name) {
                return Err(DatasetError::DuplicateColumn { name: name.clone() });
            }
        }
        let d = names.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(DatasetError::RaggedRow {
                    row: r + 1,
                    expected: d,
                    found: row.len(),
                });
            }
            for (c, &cell) in row.iter().enumerate() {
                if cell > 1 {
                    return Err(DatasetError::NonBinaryCell {
                        row: r + 1,
                        col: c + 1,
                        value: cell.to_string(),
                    });
                }
            }
        }
        Ok(Self { names, rows })
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns.
    pub fn d(&self) -> usize {
        self.names.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, col: usize) -> u8 {
        self.rows[row][col]
    }

    /// Loads a dataset from a CSV file.
    ///
    /// Cells must be `0`, `1`, `true` or `false` (surrounding whitespace is
    /// ignored). With `has_header = false`, columns are named `X1..Xd`.
    /// Row order matches file order.
    pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = File::open(path).map_err(|source| DatasetError::Io {
            path: display.clone(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(file);

        let mut names: Vec<String> = Vec::new();
        if has_header {
            let headers = reader.headers().map_err(|source| DatasetError::Csv {
                path: display.clone(),
                source,
            })?;
            names = headers.iter().map(|h| h.to_string()).collect();
        }

        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record.map_err(|source| DatasetError::Csv {
                path: display.clone(),
                source,
            })?;
            let row_no = idx + 1;
            if names.is_empty() {
                names = (1..=record.len()).map(|i| format!("X{i}")).collect();
            }
            if record.len() != names.len() {
                return Err(DatasetError::RaggedRow {
                    row: row_no,
                    expected: names.len(),
                    found: record.len(),
                });
            }
            let mut row = Vec::with_capacity(record.len());
            for (c, field) in record.iter().enumerate() {
                let value = match field {
                    "0" | "false" => 0,
                    "1" | "true" => 1,
                    other => {
                        return Err(DatasetError::NonBinaryCell {
                            row: row_no,
                            col: c + 1,
                            value: other.to_string(),
                        })
                    }
                };
                row.push(value);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(DatasetError::Empty { path: display });
        }
        Self::new(names, rows)
    }

    /// Writes the dataset as CSV: header always present, LF line endings,
    /// cells rendered as `0`/`1`.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let file = File::create(path).map_err(|source| DatasetError::Io {
            path: display.clone(),
            source,
        })?;
        let mut out = BufWriter::new(file);
        let write = |out: &mut BufWriter<File>, line: &str| {
            out.write_all(line.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|source| DatasetError::Io {
                    path: display.clone(),
                    source,
                })
        };
        write(&mut out, &self.names.join(","))?;
        let mut line = String::with_capacity(self.d() * 2);
        for row in &self.rows {
            line.clear();
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    line.push(',');
                }
                line.push(if *cell == 1 { '1' } else { '0' });
            }
            write(&mut out, &line)?;
        }
        Ok(())
    }

    /// Checks the dataset for conditions that degrade downstream statistics.
    ///
    /// Constructed datasets already satisfy the cell-domain and naming
    /// invariants, so in practice only constant columns appear; the report
    /// re-checks everything so it can also describe hand-built values.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for c in 0..self.d() {
            let first = self.rows[0][c];
            if self.rows.iter().all(|r| r[c] == first) {
                report.constant_columns.push(c);
            }
        }
        for (i, name) in self.names.iter().enumerate() {
            if self.names[..i].contains(name) {
                report.duplicate_name_errors.push(name.clone());
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &cell) in row.iter().enumerate() {
                if cell > 1 {
                    report.cell_domain_errors.push((r, c));
                }
            }
        }
        report
    }

    /// Computes the poverty index M0 = q0 * a0 at the given deprivation
    /// threshold.
    ///
    /// Row `i`'s deprivation degree is its fraction of 1-cells; a row is
    /// deprived iff that degree is strictly greater than `threshold`.
    /// `q0` is the deprived fraction, `a0` the mean degree among deprived
    /// rows (0 when nobody is deprived).
    pub fn mpi_index(&self, threshold: f64) -> Result<MpiResult, DatasetError> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(DatasetError::InvalidThreshold(threshold));
        }
        let d = self.d() as f64;
        let per_row: Vec<f64> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&c| c as u32).sum::<u32>() as f64 / d)
            .collect();
        let deprived: Vec<f64> = per_row.iter().copied().filter(|&x| x > threshold).collect();
        let q0 = deprived.len() as f64 / per_row.len() as f64;
        let a0 = if deprived.is_empty() {
            0.0
        } else {
            deprived.iter().sum::<f64>() / deprived.len() as f64
        };
        Ok(MpiResult {
            m0: q0 * a0,
            q0,
            a0,
            per_row_deprivation: per_row,
        })
    }
}

/// Report produced by [`BinaryDataset::validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Column indices whose cells are all 0 or all 1.
    pub constant_columns: Vec<usize>,
    pub duplicate_name_errors: Vec<String>,
    /// `(row, column)` coordinates of out-of-domain cells.
    pub cell_domain_errors: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.constant_columns.is_empty()
            && self.duplicate_name_errors.is_empty()
            && self.cell_domain_errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ok");
        }
        if !self.constant_columns.is_empty() {
            write!(f, "constant columns: {:?}", self.constant_columns)?;
        }
        if !self.duplicate_name_errors.is_empty() {
            write!(f, " duplicate names: {:?}", self.duplicate_name_errors)?;
        }
        if !self.cell_domain_errors.is_empty() {
            write!(f, " bad cells: {:?}", self.cell_domain_errors)?;
        }
        Ok(())
    }
}

/// Result of [`BinaryDataset::mpi_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct MpiResult {
    /// Poverty index, exactly `q0 * a0`.
    pub m0: f64,
    /// Headcount ratio: fraction of deprived rows.
    pub q0: f64,
    /// Mean deprivation degree among deprived rows (0 when none).
    pub a0: f64,
    /// Deprivation degree of every row, in row order.
    pub per_row_deprivation: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(names: &[&str], rows: &[&[u8]]) -> BinaryDataset {
        BinaryDataset::new(
            names.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert!(matches!(
            BinaryDataset::new(vec!["a".into()], vec![vec![0]]),
            Err(DatasetError::TooFewColumns(1))
        ));
        assert!(matches!(
            BinaryDataset::new(vec!["a".into(), "b".into()], vec![]),
            Err(DatasetError::NoRows)
        ));
        assert!(matches!(
            BinaryDataset::new(vec!["a".into(), "a".into()], vec![vec![0, 1]]),
            Err(DatasetError::DuplicateColumn { .. })
        ));
        assert!(matches!(
            BinaryDataset::new(vec!["a".into(), "b".into()], vec![vec![0, 2]]),
            Err(DatasetError::NonBinaryCell { row: 1, col: 2, .. })
        ));
    }

    #[test]
    fn load_csv_parses_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "a,b\n1,1\n0,1\n").unwrap();
        let ds = BinaryDataset::load_csv(&path, true).unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.d(), 2);
        assert_eq!(ds.column_names(), ["a", "b"]);
        assert_eq!(ds.rows(), [[1, 1], [0, 1]]);
    }

    #[test]
    fn load_csv_reports_cell_coordinates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "a,b\n1,1\n0,2\n").unwrap();
        match BinaryDataset::load_csv(&path, true) {
            Err(DatasetError::NonBinaryCell { row, col, value }) => {
                assert_eq!((row, col), (2, 2));
                assert_eq!(value, "2");
            }
            other => panic!("expected NonBinaryCell, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_accepts_booleans_and_no_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "true,false\n0,1\n").unwrap();
        let ds = BinaryDataset::load_csv(&path, false).unwrap();
        assert_eq!(ds.column_names(), ["X1", "X2"]);
        assert_eq!(ds.rows(), [[1, 0], [0, 1]]);
    }

    #[test]
    fn load_csv_rejects_ragged_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let ragged = dir.path().join("r.csv");
        std::fs::write(&ragged, "a,b\n1,1\n1\n").unwrap();
        assert!(matches!(
            BinaryDataset::load_csv(&ragged, true),
            Err(DatasetError::RaggedRow { row: 2, .. }) | Err(DatasetError::Csv { .. })
        ));
        let empty = dir.path().join("e.csv");
        std::fs::write(&empty, "a,b\n").unwrap();
        assert!(matches!(
            BinaryDataset::load_csv(&empty, true),
            Err(DatasetError::Empty { .. })
        ));
        let missing = dir.path().join("nope.csv");
        assert!(matches!(
            BinaryDataset::load_csv(&missing, true),
            Err(DatasetError::Io { .. })
        ));
    }

    #[test]
    fn save_load_round_trip_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        let original = ds(&["a", "b", "c"], &[&[1, 0, 1], &[0, 0, 0], &[1, 1, 1]]);
        original.save_csv(&path).unwrap();
        let reloaded = BinaryDataset::load_csv(&path, true).unwrap();
        assert_eq!(original, reloaded);
        // emitted file uses LF endings and always carries the header
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("a,b,c\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn validate_flags_constant_columns() {
        let all_zero = ds(&["a", "b"], &[&[0, 1], &[0, 0]]);
        assert_eq!(all_zero.validate().constant_columns, vec![0]);

        let both = ds(&["a", "b", "c"], &[&[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(both.validate().constant_columns, vec![0, 2]);

        let clean = ds(&["a", "b"], &[&[0, 1], &[1, 0]]);
        assert!(clean.validate().is_empty());
    }

    #[test]
    fn mpi_all_zero_dataset_has_zero_index() {
        let z = ds(&["a", "b"], &[&[0, 0], &[0, 0]]);
        let r = z.mpi_index(0.3).unwrap();
        assert_eq!(r.m0, 0.0);
        assert_eq!(r.q0, 0.0);
        assert_eq!(r.a0, 0.0);
    }

    #[test]
    fn mpi_all_one_dataset_saturates() {
        let o = ds(&["a", "b"], &[&[1, 1], &[1, 1]]);
        let r = o.mpi_index(0.5).unwrap();
        assert_eq!((r.q0, r.a0, r.m0), (1.0, 1.0, 1.0));
    }

    #[test]
    fn mpi_hand_counted_example() {
        // per-row degrees 0.25, 0.5, 0.75, 1.0 over d = 4; threshold 0.5 is
        // strict, so only the last two rows are deprived
        let m = ds(
            &["a", "b", "c", "d"],
            &[&[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 0], &[1, 1, 1, 1]],
        );
        let r = m.mpi_index(0.5).unwrap();
        assert_eq!(r.per_row_deprivation, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(r.q0, 0.5);
        assert_eq!(r.a0, 0.875);
        assert_eq!(r.m0, 0.4375);
    }

    #[test]
    fn mpi_threshold_domain_is_enforced() {
        let m = ds(&["a", "b"], &[&[1, 0]]);
        assert!(m.mpi_index(0.0).is_err());
        assert!(m.mpi_index(1.0).is_err());
        assert!(m.mpi_index(-0.1).is_err());
    }

    #[test]
    fn mpi_is_permutation_invariant() {
        let a = ds(
            &["a", "b", "c"],
            &[&[1, 0, 1], &[0, 1, 1], &[0, 0, 0], &[1, 1, 1]],
        );
        // permute rows
        let b = ds(
            &["a", "b", "c"],
            &[&[1, 1, 1], &[0, 0, 0], &[1, 0, 1], &[0, 1, 1]],
        );
        // permute columns
        let c = ds(
            &["c", "a", "b"],
            &[&[1, 1, 0], &[1, 0, 1], &[0, 0, 0], &[1, 1, 1]],
        );
        for t in [0.2, 0.4, 0.6] {
            let ra = a.mpi_index(t).unwrap();
            let rb = b.mpi_index(t).unwrap();
            let rc = c.mpi_index(t).unwrap();
            assert_eq!((ra.m0, ra.q0, ra.a0), (rb.m0, rb.q0, rb.a0));
            assert_eq!((ra.m0, ra.q0, ra.a0), (rc.m0, rc.q0, rc.a0));
        }
    }

    #[test]
    fn mpi_bounds_hold() {
        let m = ds(
            &["a", "b", "c", "d"],
            &[&[1, 1, 0, 0], &[1, 1, 1, 0], &[0, 0, 0, 1], &[1, 1, 1, 1]],
        );
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let r = m.mpi_index(t).unwrap();
            assert!(r.m0 >= 0.0 && r.m0 <= r.q0 && r.q0 <= 1.0);
            if r.q0 > 0.0 {
                assert!(r.m0 <= r.a0);
            }
        }
    }
}
