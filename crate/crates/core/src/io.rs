//! Text formats: dense CSV matrices, `index,value` vectors, `i,j,value` edge
//! lists, LIBSVM classification data and solver traces.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! writing is deterministic and reading back is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, PairSupport, SupportSet};
use crate::solver::SolverTrace;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("`{}` is not a number", field.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value `{}`", field.trim())));
    }
    Ok(v)
}

fn parse_index(field: &str, line: usize) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("`{}` is not an index", field.trim())))
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Dense matrix: a `rows,cols` header line, then one comma-separated row per
/// line.
pub fn parse_dense_csv(text: &str) -> Result<Matrix> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing `rows,cols` header"))?;
    let (r, c) = header
        .split_once(',')
        .ok_or_else(|| parse_err(hl, "header must be `rows,cols`"))?;
    let (rows, cols) = (parse_index(r, hl)?, parse_index(c, hl)?);
    if rows == 0 || cols == 0 {
        return Err(parse_err(hl, "matrix dimensions must be positive"));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (ln, line) in lines {
        seen += 1;
        if seen > rows {
            return Err(parse_err(ln, format!("more than the {rows} rows declared")));
        }
        let row = line.split(',').map(|f| parse_f64(f, ln)).collect::<Result<Vec<_>>>()?;
        if row.len() != cols {
            return Err(parse_err(ln, format!("expected {cols} columns, found {}", row.len())));
        }
        data.extend(row);
    }
    if seen != rows {
        return Err(parse_err(0, format!("expected {rows} rows, found {seen}")));
    }
    Matrix::from_vec(rows, cols, data)
}

pub fn dense_csv(m: &Matrix) -> String {
    let mut out = format!("{},{}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_dense_csv(path: &Path) -> Result<Matrix> {
    parse_dense_csv(&fs::read_to_string(path)?)
}

pub fn write_dense_csv(path: &Path, m: &Matrix) -> Result<()> {
    Ok(fs::write(path, dense_csv(m))?)
}

/// `index,value` rows (0-based), header included. Zero entries are kept so
/// the dimension survives a round trip.
pub fn vector_csv(x: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in x.iter().enumerate() {
        writeln!(out, "{i},{v}").unwrap();
    }
    out
}

pub fn parse_vector_csv(text: &str) -> Result<Vec<f64>> {
    let mut entries = Vec::new();
    for (ln, line) in content_lines(text) {
        if line.starts_with("index") {
            continue;
        }
        let (i, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(ln, "expected `index,value`"))?;
        entries.push((parse_index(i, ln)?, parse_f64(v, ln)?));
    }
    let p = entries.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
    let mut x = vec![0.0; p];
    for (i, v) in entries {
        x[i] = v;
    }
    Ok(x)
}

/// Off-diagonal entries of `m` on `support` as `i,j,value` rows with
/// 0-based `i < j`.
pub fn edge_list_csv(m: &Matrix, support: &PairSupport) -> String {
    let mut out = String::from("i,j,value\n");
    for &(i, j) in support.pairs() {
        writeln!(out, "{i},{j},{}", m[(i, j)]).unwrap();
    }
    out
}

pub fn parse_edge_list(text: &str, dim: usize) -> Result<Vec<(usize, usize, f64)>> {
    let mut edges = Vec::new();
    for (ln, line) in content_lines(text) {
        if line.starts_with("i,") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(parse_err(ln, "expected `i,j,value`"));
        }
        let (i, j) = (parse_index(f[0], ln)?, parse_index(f[1], ln)?);
        if i >= j || j >= dim {
            return Err(parse_err(ln, format!("pair ({i},{j}) is not i < j < {dim}")));
        }
        edges.push((i, j, parse_f64(f[2], ln)?));
    }
    Ok(edges)
}

/// Classification data in LIBSVM format.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledData {
    /// One sample per row.
    pub features: Matrix,
    /// Labels mapped to ±1.
    pub labels: Vec<f64>,
}

/// Parses `label idx:value ...` lines with 1-based feature indices. Labels
/// `1`/`+1` map to `+1`, `0`/`-1` to `−1`. The dimension is the largest
/// index seen unless `dim` is given.
pub fn parse_libsvm(text: &str, dim: Option<usize>) -> Result<LabeledData> {
    let mut samples: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0;
    for (ln, line) in content_lines(text) {
        let mut fields = line.split_whitespace();
        let label = match fields.next().map(|l| l.parse::<f64>()) {
            Some(Ok(1.0)) => 1.0,
            Some(Ok(l)) if l == 0.0 || l == -1.0 => -1.0,
            _ => return Err(parse_err(ln, "label must be one of -1, 0, 1, +1")),
        };
        let mut entries = Vec::new();
        let mut last = 0;
        for field in fields {
            let (i, v) = field
                .split_once(':')
                .ok_or_else(|| parse_err(ln, format!("`{field}` is not `index:value`")))?;
            let i = parse_index(i, ln)?;
            if i == 0 {
                return Err(parse_err(ln, "feature indices are 1-based"));
            }
            if i <= last {
                return Err(parse_err(ln, "feature indices must be increasing"));
            }
            last = i;
            entries.push((i - 1, parse_f64(v, ln)?));
        }
        max_index = max_index.max(last);
        samples.push((label, entries));
    }
    if samples.is_empty() {
        return Err(parse_err(0, "no samples"));
    }
    let p = match dim {
        Some(d) if d < max_index => {
            return Err(Error::InvalidArgument(format!(
                "feature index {max_index} exceeds the declared dimension {d}"
            )));
        }
        Some(d) => d,
        None => max_index,
    };
    if p == 0 {
        return Err(parse_err(0, "no features"));
    }
    let mut features = Matrix::zeros(samples.len(), p);
    let mut labels = Vec::with_capacity(samples.len());
    for (r, (label, entries)) in samples.into_iter().enumerate() {
        labels.push(label);
        for (j, v) in entries {
            features[(r, j)] = v;
        }
    }
    Ok(LabeledData { features, labels })
}

pub fn read_libsvm(path: &Path, dim: Option<usize>) -> Result<LabeledData> {
    parse_libsvm(&fs::read_to_string(path)?, dim)
}

/// Writes nonzero features only; labels as `+1` / `-1`.
pub fn libsvm(data: &LabeledData) -> String {
    let mut out = String::new();
    for (r, &label) in data.labels.iter().enumerate() {
        out.push_str(if label > 0.0 { "+1" } else { "-1" });
        for (j, &v) in data.features.row(r).iter().enumerate() {
            if v != 0.0 {
                write!(out, " {}:{v}", j + 1).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Number of selected coordinates (vectors) or pairs (matrices).
pub trait Cardinality {
    fn cardinality(&self) -> usize;
}

impl Cardinality for SupportSet {
    fn cardinality(&self) -> usize {
        self.len()
    }
}

impl Cardinality for PairSupport {
    fn cardinality(&self) -> usize {
        self.len()
    }
}

/// `iteration,step,objective,step_norm,support_size,inner_flagged` rows.
pub fn trace_csv<S: Cardinality>(trace: &SolverTrace<S>) -> String {
    let mut out = String::from("iteration,step,objective,step_norm,support_size,inner_flagged\n");
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iteration,
            trace.step.as_str(),
            r.objective,
            r.step_norm,
            r.support.cardinality(),
            u8::from(r.inner_flagged)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_is_exact() {
        let m = Matrix::from_rows(&[vec![0.1, -2.5e-17, 3.0], vec![1.0 / 3.0, 0.0, -7.25]]).unwrap();
        assert_eq!(parse_dense_csv(&dense_csv(&m)).unwrap(), m);
    }

    #[test]
    fn dense_errors_carry_line_numbers() {
        match parse_dense_csv("2,2\n1,2\n\n3,x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_dense_csv("2,2\n1,2\n3\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_dense_csv("").is_err());
        assert!(parse_dense_csv("1,2\n1,nan\n").is_err());
        assert!(parse_dense_csv("1,2\n1,2\n").is_ok());
        assert!(parse_dense_csv("2,2\n1,2\n").is_err());
        assert!(parse_dense_csv("1,2\n1,2\n3,4\n").is_err());
    }

    #[test]
    fn vector_round_trip() {
        let x = vec![0.0, 1.5, 0.0, -2.0];
        assert_eq!(parse_vector_csv(&vector_csv(&x)).unwrap(), x);
    }

    #[test]
    fn edge_list_round_trip() {
        let m = Matrix::from_rows(&[vec![1.0, 0.5, 0.0], vec![0.5, 1.0, -0.25], vec![0.0, -0.25, 1.0]]).unwrap();
        let s = PairSupport::of(&m, 1e-3);
        let text = edge_list_csv(&m, &s);
        assert_eq!(text, "i,j,value\n0,1,0.5\n1,2,-0.25\n");
        assert_eq!(parse_edge_list(&text, 3).unwrap(), vec![(0, 1, 0.5), (1, 2, -0.25)]);
        assert!(parse_edge_list("1,0,2.0\n", 3).is_err());
    }

    #[test]
    fn libsvm_parses_and_maps_labels() {
        let d = parse_libsvm("+1 1:0.5 3:2\n0 2:1\n-1\n1 3:-1 # trailing\n", None);
        // comments are only recognized at the start of a line
        assert!(d.is_err());
        let d = parse_libsvm("+1 1:0.5 3:2\n0 2:1\n-1\n# c\n1 3:-1\n", None).unwrap();
        assert_eq!(d.labels, vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(d.features.rows(), 4);
        assert_eq!(d.features.cols(), 3);
        assert_eq!(d.features.row(0), &[0.5, 0.0, 2.0]);
        assert_eq!(d.features.row(2), &[0.0, 0.0, 0.0]);
        assert_eq!(parse_libsvm(&libsvm(&d), Some(3)).unwrap(), d);
    }

    #[test]
    fn libsvm_errors() {
        assert!(matches!(parse_libsvm("1 1:1\n2 1:1\n", None), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_libsvm("1 0:1\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_libsvm("1 2:1 1:1\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_libsvm("1 1:1\n-1 2:q\n", None), Err(Error::Parse { line: 2, .. })));
        assert!(parse_libsvm("1 5:1\n", Some(3)).is_err());
        assert!(parse_libsvm("", None).is_err());
    }
}
