//! Plain-text matrix and vector files.
//!
//! ```text
//! rkmat 1 <real|complex> <m> <n>
//! <n entries separated by single spaces>     (m lines)
//!
//! rkvec 1 <real|complex> <len>
//! <one entry per line>                       (len lines)
//! ```
//!
//! Real entries are decimal floats, complex entries are `re,im`. Every float
//! is written with 17 significant digits, which round-trips `f64` exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::linalg::{AnyMatrix, AnyVector, Complex64, DenseMatrix, Field, Scalar};

const MATRIX_MAGIC: &str = "rkmat";
const VECTOR_MAGIC: &str = "rkvec";
const FORMAT_VERSION: &str = "1";

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_scalar<T: Scalar>(x: T) -> String {
    match T::FIELD {
        Field::Real => fmt_f64(x.re()),
        Field::Complex => format!("{},{}", fmt_f64(x.re()), fmt_f64(x.im())),
    }
}

struct Source<'a> {
    path: &'a str,
}

impl Source<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_string(),
            line,
            msg: msg.into(),
        }
    }

    fn float(&self, line: usize, tok: &str) -> Result<f64> {
        tok.parse::<f64>()
            .map_err(|_| self.err(line, format!("invalid number `{tok}`")))
    }

    fn scalar<T: Scalar>(&self, line: usize, tok: &str) -> Result<T> {
        match T::FIELD {
            Field::Real => {
                if tok.contains(',') {
                    return Err(self.err(line, format!("complex entry `{tok}` in a real file")));
                }
                self.float(line, tok).map(T::from_real)
            }
            Field::Complex => {
                let (re, im) = tok
                    .split_once(',')
                    .ok_or_else(|| self.err(line, format!("expected `re,im`, found `{tok}`")))?;
                Ok(T::from_parts(self.float(line, re)?, self.float(line, im)?))
            }
        }
    }

    fn count(&self, line: usize, tok: &str, what: &str) -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| self.err(line, format!("invalid {what} `{tok}`")))
    }

    /// Parses `<magic> 1 <field> <dims...>` and returns the field and dims.
    fn header(&self, text: Option<io::Result<String>>, magic: &str, dims: usize) -> Result<(Field, Vec<usize>)> {
        let text = text.ok_or_else(|| self.err(1, "empty file"))??;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 3 + dims || toks[0] != magic {
            return Err(self.err(1, format!("expected `{magic} 1 <real|complex> ...` header")));
        }
        if toks[1] != FORMAT_VERSION {
            return Err(self.err(1, format!("unsupported {magic} version `{}`", toks[1])));
        }
        let field: Field = toks[2].parse().map_err(|e: String| self.err(1, e))?;
        let dims = toks[3..]
            .iter()
            .map(|t| self.count(1, t, "dimension"))
            .collect::<Result<Vec<_>>>()?;
        if dims.contains(&0) {
            return Err(self.err(1, "dimensions must be positive"));
        }
        Ok((field, dims))
    }

    fn expect_end(&self, mut lines: impl Iterator<Item = io::Result<String>>, after: usize) -> Result<()> {
        for (k, l) in (&mut lines).enumerate() {
            if !l?.trim().is_empty() {
                return Err(self.err(after + k + 1, "unexpected trailing data"));
            }
        }
        Ok(())
    }
}

pub fn write_matrix<T: Scalar, W: Write>(mut w: W, a: &DenseMatrix<T>) -> io::Result<()> {
    writeln!(w, "{MATRIX_MAGIC} {FORMAT_VERSION} {} {} {}", T::FIELD, a.rows(), a.cols())?;
    for row in a.row_iter() {
        let line: Vec<String> = row.iter().map(|&x| fmt_scalar(x)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_any_matrix<W: Write>(w: W, a: &AnyMatrix) -> io::Result<()> {
    match a {
        AnyMatrix::Real(a) => write_matrix(w, a),
        AnyMatrix::Complex(a) => write_matrix(w, a),
    }
}

fn read_rows<T: Scalar>(
    src: &Source<'_>,
    lines: &mut impl Iterator<Item = io::Result<String>>,
    m: usize,
    n: usize,
) -> Result<DenseMatrix<T>> {
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        let lineno = i + 2;
        let text = lines
            .next()
            .ok_or_else(|| src.err(lineno, format!("expected {m} rows, found {i}")))??;
        let before = data.len();
        for tok in text.split_whitespace() {
            data.push(src.scalar::<T>(lineno, tok)?);
        }
        if data.len() - before != n {
            return Err(src.err(
                lineno,
                format!("expected {n} entries, found {}", data.len() - before),
            ));
        }
    }
    DenseMatrix::from_row_major(m, n, data)
}

/// Reads an rkmat stream; `label` names the source in error messages.
pub fn read_matrix<R: BufRead>(r: R, label: &str) -> Result<AnyMatrix> {
    let src = Source { path: label };
    let mut lines = r.lines();
    let (field, dims) = src.header(lines.next(), MATRIX_MAGIC, 2)?;
    let (m, n) = (dims[0], dims[1]);
    let a = match field {
        Field::Real => AnyMatrix::Real(read_rows::<f64>(&src, &mut lines, m, n)?),
        Field::Complex => AnyMatrix::Complex(read_rows::<Complex64>(&src, &mut lines, m, n)?),
    };
    src.expect_end(lines, m + 1)?;
    Ok(a)
}

pub fn write_vector<T: Scalar, W: Write>(mut w: W, v: &[T]) -> io::Result<()> {
    writeln!(w, "{VECTOR_MAGIC} {FORMAT_VERSION} {} {}", T::FIELD, v.len())?;
    for &x in v {
        writeln!(w, "{}", fmt_scalar(x))?;
    }
    Ok(())
}

pub fn write_any_vector<W: Write>(w: W, v: &AnyVector) -> io::Result<()> {
    match v {
        AnyVector::Real(v) => write_vector(w, v),
        AnyVector::Complex(v) => write_vector(w, v),
    }
}

fn read_entries<T: Scalar>(
    src: &Source<'_>,
    lines: &mut impl Iterator<Item = io::Result<String>>,
    len: usize,
) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let lineno = i + 2;
        let text = lines
            .next()
            .ok_or_else(|| src.err(lineno, format!("expected {len} entries, found {i}")))??;
        let tok = text.trim();
        if tok.split_whitespace().count() != 1 {
            return Err(src.err(lineno, "expected exactly one entry per line"));
        }
        out.push(src.scalar::<T>(lineno, tok)?);
    }
    Ok(out)
}

pub fn read_vector<R: BufRead>(r: R, label: &str) -> Result<AnyVector> {
    let src = Source { path: label };
    let mut lines = r.lines();
    let (field, dims) = src.header(lines.next(), VECTOR_MAGIC, 1)?;
    let len = dims[0];
    let v = match field {
        Field::Real => AnyVector::Real(read_entries(&src, &mut lines, len)?),
        Field::Complex => AnyVector::Complex(read_entries(&src, &mut lines, len)?),
    };
    src.expect_end(lines, len + 1)?;
    Ok(v)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<AnyMatrix> {
    let path = path.as_ref();
    let f = File::open(path)?;
    read_matrix(BufReader::new(f), &path.display().to_string())
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<AnyVector> {
    let path = path.as_ref();
    let f = File::open(path)?;
    read_vector(BufReader::new(f), &path.display().to_string())
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never observe a partial file.
pub fn atomic_write<F>(path: impl AsRef<Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<&mut File>) -> io::Result<()>,
{
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn save_matrix(path: impl AsRef<Path>, a: &AnyMatrix) -> Result<()> {
    atomic_write(path, |w| write_any_matrix(w, a))
}

pub fn save_vector(path: impl AsRef<Path>, v: &AnyVector) -> Result<()> {
    atomic_write(path, |w| write_any_vector(w, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip_matrix(a: &AnyMatrix) -> AnyMatrix {
        let mut buf = Vec::new();
        write_any_matrix(&mut buf, a).unwrap();
        read_matrix(&buf[..], "mem").unwrap()
    }

    #[test]
    fn header_format() {
        let a = DenseMatrix::from_rows(&[[Complex64::new(1.0, -0.5)]]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "rkmat 1 complex 1 1\n1.0000000000000000e0,-5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn awkward_values_round_trip_exactly() {
        let vals = [0.1, -1.0 / 3.0, 1e-300, 5e-324, f64::MAX, -0.0, 123456789.12345679];
        let a = AnyMatrix::Real(DenseMatrix::from_row_major(1, vals.len(), vals.to_vec()).unwrap());
        assert_eq!(round_trip_matrix(&a), a);
    }

    #[test]
    fn vector_round_trip() {
        let v = AnyVector::Complex(vec![Complex64::new(0.1, 0.2), Complex64::new(-3.0, 1e-17)]);
        let mut buf = Vec::new();
        write_any_vector(&mut buf, &v).unwrap();
        assert_eq!(read_vector(&buf[..], "mem").unwrap(), v);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let cases: &[&str] = &[
            "",
            "rkvec 1 real 1 1\n1\n",
            "rkmat 2 real 1 1\n1\n",
            "rkmat 1 quaternion 1 1\n1\n",
            "rkmat 1 real 2 2\n1 2\n",
            "rkmat 1 real 1 2\n1 2 3\n",
            "rkmat 1 real 1 1\nabc\n",
            "rkmat 1 real 1 1\n1,2\n",
            "rkmat 1 complex 1 1\n1\n",
            "rkmat 1 real 1 1\n1\n2\n",
            "rkmat 1 real 0 1\n",
        ];
        for c in cases {
            assert!(
                matches!(read_matrix(c.as_bytes(), "t"), Err(Error::Parse { .. })),
                "accepted {c:?}"
            );
        }
        assert!(read_vector("rkvec 1 real 2\n1 2\n3\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match read_matrix("rkmat 1 real 2 1\n1\nx\n".as_bytes(), "a.rkmat") {
            Err(Error::Parse { line, path, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(path, "a.rkmat");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn atomic_save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.rkmat");
        let a = AnyMatrix::Real(DenseMatrix::from_rows(&[[1.5, 2.0], [3.0, -4.25]]).unwrap());
        save_matrix(&p, &a).unwrap();
        assert_eq!(load_matrix(&p).unwrap(), a);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
