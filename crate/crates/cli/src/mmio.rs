//! Matrix Market reader and writer.
//!
//! Supports `matrix` objects in `array` and `coordinate` format with fields
//! `real`, `double`, `integer` and `complex`, and symmetries `general`,
//! `symmetric`, `skew-symmetric` and `hermitian`. Symmetric storage is
//! expanded to full storage on read. Dense output uses the shortest decimal
//! representation that round-trips, so write-then-read is bit-exact.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use sassenfeld_core::{ComplexMatrix, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MmError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        line: usize,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("expected a vector, found a {rows}x{cols} matrix")]
    NotAVector { rows: usize, cols: usize },
    #[error(transparent)]
    Matrix(#[from] sassenfeld_core::Error),
}

pub type Result<T> = std::result::Result<T, MmError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub format: Format,
    pub field: Field,
    pub symmetry: Symmetry,
}

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let format = match self.format {
            Format::Array => "array",
            Format::Coordinate => "coordinate",
        };
        let field = match self.field {
            Field::Real => "real",
            Field::Integer => "integer",
            Field::Complex => "complex",
        };
        let symmetry = match self.symmetry {
            Symmetry::General => "general",
            Symmetry::Symmetric => "symmetric",
            Symmetry::SkewSymmetric => "skew-symmetric",
            Symmetry::Hermitian => "hermitian",
        };
        write!(f, "%%MatrixMarket matrix {format} {field} {symmetry}")
    }
}

/// A rectangular matrix as read from a file, in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub header: Header,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl RawMatrix {
    pub fn into_square(self) -> Result<ComplexMatrix> {
        if self.rows != self.cols {
            return Err(MmError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(ComplexMatrix::new(self.rows, self.data)?)
    }

    /// Accepts `m x 1` and `1 x m` shapes.
    pub fn into_vector(self) -> Result<Vec<C64>> {
        if self.rows != 1 && self.cols != 1 {
            return Err(MmError::NotAVector {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.data)
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<Header> {
    let bad = |msg: &str| MmError::Header {
        line: lineno,
        msg: msg.to_string(),
    };
    let lower = line.trim().to_ascii_lowercase();
    let mut words = lower.split_whitespace();
    if words.next() != Some("%%matrixmarket") {
        return Err(bad("expected '%%MatrixMarket'"));
    }
    if words.next() != Some("matrix") {
        return Err(bad("only 'matrix' objects are supported"));
    }
    let format = match words.next() {
        Some("array") => Format::Array,
        Some("coordinate") => Format::Coordinate,
        other => return Err(bad(&format!("unknown format {other:?}"))),
    };
    let field = match words.next() {
        Some("real") | Some("double") => Field::Real,
        Some("integer") => Field::Integer,
        Some("complex") => Field::Complex,
        Some("pattern") => return Err(bad("pattern matrices carry no values")),
        other => return Err(bad(&format!("unknown field {other:?}"))),
    };
    let symmetry = match words.next() {
        Some("general") => Symmetry::General,
        Some("symmetric") => Symmetry::Symmetric,
        Some("skew-symmetric") => Symmetry::SkewSymmetric,
        Some("hermitian") => Symmetry::Hermitian,
        other => return Err(bad(&format!("unknown symmetry {other:?}"))),
    };
    if words.next().is_some() {
        return Err(bad("trailing words"));
    }
    if field != Field::Complex && symmetry == Symmetry::Hermitian {
        return Err(bad("hermitian symmetry requires a complex field"));
    }
    Ok(Header {
        format,
        field,
        symmetry,
    })
}

fn parse_usize(tok: Option<&str>, what: &str, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| MmError::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| MmError::Parse {
        line,
        msg: format!("invalid {what} '{tok}'"),
    })
}

fn parse_real(tok: Option<&str>, field: Field, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| MmError::Parse {
        line,
        msg: "missing value".into(),
    })?;
    let value = match field {
        Field::Integer => tok
            .parse::<i64>()
            .map(|v| v as f64)
            .map_err(|_| MmError::Parse {
                line,
                msg: format!("invalid integer '{tok}'"),
            })?,
        _ => tok.parse::<f64>().map_err(|_| MmError::Parse {
            line,
            msg: format!("invalid number '{tok}'"),
        })?,
    };
    if !value.is_finite() {
        return Err(MmError::Parse {
            line,
            msg: format!("non-finite value '{tok}'"),
        });
    }
    Ok(value)
}

fn parse_value<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    field: Field,
    line: usize,
) -> Result<C64> {
    let re = parse_real(toks.next(), field, line)?;
    let im = if field == Field::Complex {
        parse_real(toks.next(), field, line)?
    } else {
        0.0
    };
    if toks.next().is_some() {
        return Err(MmError::Parse {
            line,
            msg: "trailing tokens".into(),
        });
    }
    Ok(C64::new(re, im))
}

/// Mirror of an off-diagonal entry under the declared symmetry.
fn mirror(symmetry: Symmetry, v: C64) -> C64 {
    match symmetry {
        Symmetry::General | Symmetry::Symmetric => v,
        Symmetry::SkewSymmetric => -v,
        Symmetry::Hermitian => v.conj(),
    }
}

/// Data lines with their 1-based line numbers, comments and blanks removed.
struct Lines<R> {
    inner: io::Lines<R>,
    lineno: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_data(&mut self) -> Result<Option<(usize, String)>> {
        for line in self.inner.by_ref() {
            self.lineno += 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            return Ok(Some((self.lineno, trimmed.to_string())));
        }
        Ok(None)
    }
}

pub fn read_raw<R: BufRead>(reader: R) -> Result<RawMatrix> {
    let mut inner = reader.lines();
    let first = match inner.next() {
        Some(l) => l?,
        None => {
            return Err(MmError::Header {
                line: 1,
                msg: "empty input".into(),
            })
        }
    };
    let header = parse_header(&first, 1)?;
    let mut lines = Lines { inner, lineno: 1 };
    let (size_line, size) = lines.next_data()?.ok_or(MmError::Parse {
        line: lines.lineno,
        msg: "missing size line".into(),
    })?;
    let mut toks = size.split_whitespace();
    let rows = parse_usize(toks.next(), "row count", size_line)?;
    let cols = parse_usize(toks.next(), "column count", size_line)?;
    let nnz = match header.format {
        Format::Coordinate => Some(parse_usize(toks.next(), "entry count", size_line)?),
        Format::Array => None,
    };
    if toks.next().is_some() {
        return Err(MmError::Parse {
            line: size_line,
            msg: "trailing tokens on size line".into(),
        });
    }
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(MmError::Parse {
            line: size_line,
            msg: format!("{rows}x{cols} matrix cannot carry a symmetry"),
        });
    }

    let mut data = vec![C64::new(0.0, 0.0); rows * cols];
    match nnz {
        None => read_array(&mut lines, header, rows, cols, &mut data)?,
        Some(nnz) => read_coordinate(&mut lines, header, rows, cols, nnz, &mut data)?,
    }
    Ok(RawMatrix {
        header,
        rows,
        cols,
        data,
    })
}

fn read_array<R: BufRead>(
    lines: &mut Lines<R>,
    header: Header,
    rows: usize,
    cols: usize,
    data: &mut [C64],
) -> Result<()> {
    // Column-major; symmetric storage keeps the lower triangle (strictly
    // lower for skew-symmetric).
    let mut slots = Vec::new();
    for j in 0..cols {
        let start = match header.symmetry {
            Symmetry::General => 0,
            Symmetry::Symmetric | Symmetry::Hermitian => j,
            Symmetry::SkewSymmetric => j + 1,
        };
        for i in start..rows {
            slots.push((i, j));
        }
    }
    let mut found = 0;
    while let Some((line, text)) = lines.next_data()? {
        let Some(&(i, j)) = slots.get(found) else {
            return Err(MmError::Parse {
                line,
                msg: format!("more than the expected {} entries", slots.len()),
            });
        };
        let v = parse_value(&mut text.split_whitespace(), header.field, line)?;
        check_diagonal(header.symmetry, i, j, v, line)?;
        data[i * cols + j] = v;
        if i != j && header.symmetry != Symmetry::General {
            data[j * cols + i] = mirror(header.symmetry, v);
        }
        found += 1;
    }
    if found != slots.len() {
        return Err(MmError::EntryCount {
            expected: slots.len(),
            found,
        });
    }
    Ok(())
}

fn read_coordinate<R: BufRead>(
    lines: &mut Lines<R>,
    header: Header,
    rows: usize,
    cols: usize,
    nnz: usize,
    data: &mut [C64],
) -> Result<()> {
    let mut seen = vec![false; rows * cols];
    let mut found = 0;
    while let Some((line, text)) = lines.next_data()? {
        if found == nnz {
            return Err(MmError::Parse {
                line,
                msg: format!("more than the declared {nnz} entries"),
            });
        }
        let mut toks = text.split_whitespace();
        let row = parse_usize(toks.next(), "row index", line)?;
        let col = parse_usize(toks.next(), "column index", line)?;
        if row == 0 || col == 0 || row > rows || col > cols {
            return Err(MmError::IndexOutOfRange {
                line,
                row,
                col,
                rows,
                cols,
            });
        }
        let (i, j) = (row - 1, col - 1);
        if header.symmetry != Symmetry::General && i < j {
            return Err(MmError::Parse {
                line,
                msg: format!("entry ({row}, {col}) above the diagonal in symmetric storage"),
            });
        }
        if seen[i * cols + j] {
            return Err(MmError::Parse {
                line,
                msg: format!("duplicate entry ({row}, {col})"),
            });
        }
        seen[i * cols + j] = true;
        let v = parse_value(&mut toks, header.field, line)?;
        check_diagonal(header.symmetry, i, j, v, line)?;
        data[i * cols + j] = v;
        if i != j && header.symmetry != Symmetry::General {
            data[j * cols + i] = mirror(header.symmetry, v);
        }
        found += 1;
    }
    if found != nnz {
        return Err(MmError::EntryCount {
            expected: nnz,
            found,
        });
    }
    Ok(())
}

fn check_diagonal(symmetry: Symmetry, i: usize, j: usize, v: C64, line: usize) -> Result<()> {
    if i != j {
        return Ok(());
    }
    let msg = match symmetry {
        Symmetry::SkewSymmetric => "skew-symmetric storage cannot hold diagonal entries",
        Symmetry::Hermitian if v.im != 0.0 => "hermitian diagonal entries must be real",
        _ => return Ok(()),
    };
    Err(MmError::Parse {
        line,
        msg: msg.into(),
    })
}

pub fn read_matrix_from<R: BufRead>(reader: R) -> Result<ComplexMatrix> {
    read_raw(reader)?.into_square()
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    read_matrix_from(BufReader::new(File::open(path)?))
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<C64>> {
    read_raw(BufReader::new(File::open(path)?))?.into_vector()
}

/// Writes `rows x cols` values given in row-major order as a general dense
/// array, choosing the `real` field when every imaginary part is zero.
fn write_array<W: Write + ?Sized>(
    w: &mut W,
    rows: usize,
    cols: usize,
    data: &[C64],
) -> io::Result<()> {
    let real = data.iter().all(|v| v.im == 0.0 && v.im.is_sign_positive());
    let field = if real { Field::Real } else { Field::Complex };
    let header = Header {
        format: Format::Array,
        field,
        symmetry: Symmetry::General,
    };
    writeln!(w, "{header}")?;
    writeln!(w, "{rows} {cols}")?;
    for j in 0..cols {
        for i in 0..rows {
            let v = data[i * cols + j];
            if real {
                writeln!(w, "{:e}", v.re)?;
            } else {
                writeln!(w, "{:e} {:e}", v.re, v.im)?;
            }
        }
    }
    Ok(())
}

pub fn write_matrix<W: Write + ?Sized>(w: &mut W, a: &ComplexMatrix) -> io::Result<()> {
    write_array(w, a.order(), a.order(), a.as_slice())
}

pub fn write_complex_vector<W: Write + ?Sized>(w: &mut W, v: &[C64]) -> io::Result<()> {
    write_array(w, v.len(), 1, v)
}

pub fn write_real_vector<W: Write + ?Sized>(w: &mut W, v: &[f64]) -> io::Result<()> {
    let data: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
    write_array(w, v.len(), 1, &data)
}

/// Writes to `path`, or to standard output when `path` is `-`.
pub fn write_to_path(
    path: &Path,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> io::Result<()> {
    if path.as_os_str() == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        write(&mut lock)?;
        lock.flush()
    } else {
        let mut w = BufWriter::new(File::create(path)?);
        write(&mut w)?;
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<ComplexMatrix> {
        read_matrix_from(text.as_bytes())
    }

    fn real(rows: Vec<Vec<f64>>) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn array_real() {
        let a = read("%%MatrixMarket matrix array real general\n% comment\n2 2\n2\n-1\n-1\n2\n")
            .unwrap();
        assert_eq!(a, real(vec![vec![2.0, -1.0], vec![-1.0, 2.0]]));
    }

    #[test]
    fn array_is_column_major() {
        let a = read("%%MatrixMarket matrix array integer general\n2 2\n1\n2\n3\n4\n").unwrap();
        assert_eq!(a, real(vec![vec![1.0, 3.0], vec![2.0, 4.0]]));
    }

    #[test]
    fn coordinate_symmetric_expands() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n3 3 5\n1 1 2\n2 1 -1\n2 2 2\n3 2 -1\n3 3 2\n";
        let a = read(text).unwrap();
        assert_eq!(a, sassenfeld_core::fdm_matrix(3).unwrap());
    }

    #[test]
    fn coordinate_hermitian_and_skew() {
        let text = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 3\n1 1 1 0\n2 1 0 1\n2 2 3 0\n";
        let a = read(text).unwrap();
        assert_eq!(a.get(0, 1), C64::new(0.0, -1.0));
        assert_eq!(a.get(1, 0), C64::new(0.0, 1.0));

        let text = "%%MatrixMarket matrix array real skew-symmetric\n2 2\n5\n";
        let a = read(text).unwrap();
        assert_eq!(a, real(vec![vec![0.0, -5.0], vec![5.0, 0.0]]));
    }

    #[test]
    fn array_symmetric_lower_triangle() {
        let text = "%%MatrixMarket matrix array real symmetric\n2 2\n4\n1\n3\n";
        assert_eq!(
            read(text).unwrap(),
            real(vec![vec![4.0, 1.0], vec![1.0, 3.0]])
        );
    }

    #[test]
    fn non_square_rejected() {
        let text = "%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n";
        assert!(matches!(
            read(text),
            Err(MmError::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err =
            read("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").unwrap_err();
        assert!(matches!(
            err,
            MmError::IndexOutOfRange {
                line: 3,
                row: 3,
                ..
            }
        ));

        let err = read("%%MatrixMarket tensor array real general\n").unwrap_err();
        assert!(matches!(err, MmError::Header { line: 1, .. }));

        let err = read("%%MatrixMarket matrix array real general\n1 1\n% c\nabc\n").unwrap_err();
        assert!(matches!(err, MmError::Parse { line: 4, .. }), "{err}");

        let err = read("%%MatrixMarket matrix array real general\n2 2\n1\n2\n").unwrap_err();
        assert!(matches!(
            err,
            MmError::EntryCount {
                expected: 4,
                found: 2
            }
        ));

        let err =
            read("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n").unwrap_err();
        assert!(matches!(err, MmError::Parse { line: 3, .. }));

        let err = read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n")
            .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn round_trip_special_values() {
        let a = ComplexMatrix::from_rows(vec![
            vec![C64::new(0.1, -0.0), C64::new(f64::MIN_POSITIVE, 1e308)],
            vec![C64::new(-5e-324, 1.0 / 3.0), C64::new(-0.0, 0.0)],
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &a).unwrap();
        let b = read_matrix_from(buf.as_slice()).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn vectors() {
        let mut buf = Vec::new();
        write_real_vector(&mut buf, &[0.5, 0.75]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix array real general\n2 1\n"));
        let v = read_raw(buf.as_slice()).unwrap().into_vector().unwrap();
        assert_eq!(v, vec![C64::new(0.5, 0.0), C64::new(0.75, 0.0)]);

        let raw =
            read_raw("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n".as_bytes());
        assert!(matches!(
            raw.unwrap().into_vector(),
            Err(MmError::NotAVector { .. })
        ));
    }
}
