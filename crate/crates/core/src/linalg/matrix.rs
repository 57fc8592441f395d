use num_complex::Complex64;

use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Row-major dense matrix. Rows are contiguous, so [`DenseMatrix::row`] is a
/// plain slice into the backing storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidSpec(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "row length",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(rows, cols, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { T::zero() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    /// Row `i` as a contiguous view. Panics when `i` is out of range; see
    /// [`DenseMatrix::try_row`] for the checked variant.
    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn try_row(&self, i: usize) -> Result<&[T]> {
        if i >= self.rows {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.rows,
            });
        }
        Ok(self.row(i))
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.cols)
    }

    pub fn row_norm_sq(&self, i: usize) -> Result<f64> {
        self.try_row(i).map(norm_sq)
    }

    pub fn row_norms_sq(&self) -> Vec<f64> {
        self.row_iter().map(norm_sq).collect()
    }

    /// Squared Frobenius norm, accumulated row by row.
    pub fn frobenius_sq(&self) -> f64 {
        self.row_iter().map(norm_sq).sum()
    }

    /// Matrix-vector product `A v`, where entry `i` is `<a_i, v>`.
    ///
    /// Each row acts through the inner product, so the system `A x = b` is
    /// exactly the set of hyperplanes the solver projects onto. For complex
    /// rows this is the ordinary product with the entrywise conjugate; for
    /// real matrices the two coincide.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        check_len("matrix-vector product", self.cols, v.len())?;
        Ok(self.row_iter().map(|row| inner_unchecked(row, v)).collect())
    }

    /// Adjoint product `A* c = sum_i c_i a_i`.
    pub fn adjoint_mul_vec(&self, c: &[T]) -> Result<Vec<T>> {
        check_len("adjoint product", self.rows, c.len())?;
        let mut out = vec![T::zero(); self.cols];
        for (row, &ci) in self.row_iter().zip(c) {
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * ci;
            }
        }
        Ok(out)
    }

    /// Hermitian Gram matrix `A* A` of the map computed by [`mul_vec`](Self::mul_vec),
    /// row-major `n x n`. Entry `(p, q)` is `sum_i a_ip conj(a_iq)`.
    pub fn gram(&self) -> DenseMatrix<T> {
        let n = self.cols;
        let mut g = vec![T::zero(); n * n];
        for row in self.row_iter() {
            for (p, &ap) in row.iter().enumerate() {
                // upper triangle only, mirrored below
                for q in p..n {
                    g[p * n + q] += ap * row[q].conj();
                }
            }
        }
        for p in 0..n {
            g[p * n + p] = T::from_real(g[p * n + p].re());
            for q in (p + 1)..n {
                g[q * n + p] = g[p * n + q].conj();
            }
        }
        DenseMatrix {
            rows: n,
            cols: n,
            data: g,
        }
    }

    /// Multiplies every entry by a real factor.
    pub fn scaled(&self, s: f64) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x.scale(s)).collect(),
        }
    }

    /// Copy of the matrix with row `i` multiplied by `s`.
    pub fn with_row_scaled(&self, i: usize, s: f64) -> Result<DenseMatrix<T>> {
        self.try_row(i)?;
        let mut out = self.clone();
        for x in &mut out.data[i * self.cols..(i + 1) * self.cols] {
            *x = x.scale(s);
        }
        Ok(out)
    }

    /// Reorders rows: row `k` of the result is row `perm[k]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<DenseMatrix<T>> {
        check_len("row permutation", self.rows, perm.len())?;
        let mut data = Vec::with_capacity(self.data.len());
        for &p in perm {
            data.extend_from_slice(self.try_row(p)?);
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Inner product, conjugate-linear in the first argument: `sum conj(a_j) x_j`.
pub fn inner<T: Scalar>(a: &[T], x: &[T]) -> Result<T> {
    check_len("inner product", a.len(), x.len())?;
    Ok(inner_unchecked(a, x))
}

#[inline]
pub(crate) fn inner_unchecked<T: Scalar>(a: &[T], x: &[T]) -> T {
    a.iter()
        .zip(x)
        .fold(T::zero(), |acc, (&ai, &xi)| acc + ai.conj() * xi)
}

#[inline]
pub fn norm_sq<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs_sq()).sum()
}

#[inline]
pub fn norm<T: Scalar>(v: &[T]) -> f64 {
    norm_sq(v).sqrt()
}

/// `||a - b||_2`. Panics on length mismatch.
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    assert_eq!(a.len(), b.len(), "distance between vectors of unequal length");
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs_sq())
        .sum::<f64>()
        .sqrt()
}

/// A matrix whose field is only known at run time (e.g. after reading a file).
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Real(DenseMatrix<f64>),
    Complex(DenseMatrix<Complex64>),
}

impl AnyMatrix {
    pub fn field(&self) -> Field {
        match self {
            AnyMatrix::Real(_) => Field::Real,
            AnyMatrix::Complex(_) => Field::Complex,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            AnyMatrix::Real(a) => a.rows(),
            AnyMatrix::Complex(a) => a.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            AnyMatrix::Real(a) => a.cols(),
            AnyMatrix::Complex(a) => a.cols(),
        }
    }
}

impl From<DenseMatrix<f64>> for AnyMatrix {
    fn from(a: DenseMatrix<f64>) -> Self {
        AnyMatrix::Real(a)
    }
}

impl From<DenseMatrix<Complex64>> for AnyMatrix {
    fn from(a: DenseMatrix<Complex64>) -> Self {
        AnyMatrix::Complex(a)
    }
}

/// A vector whose field is only known at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyVector {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl AnyVector {
    pub fn field(&self) -> Field {
        match self {
            AnyVector::Real(_) => Field::Real,
            AnyVector::Complex(_) => Field::Complex,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyVector::Real(v) => v.len(),
            AnyVector::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Extracts the concrete vector when its field matches `T`.
    pub fn into_field<T: Scalar>(self) -> Result<Vec<T>> {
        let found = self.field();
        if found != T::FIELD {
            return Err(Error::FieldMismatch(format!(
                "expected a {} vector, found {found}",
                T::FIELD
            )));
        }
        // Same field, so the element types coincide; rebuild through the
        // scalar constructors rather than transmuting.
        Ok(match self {
            AnyVector::Real(v) => v.into_iter().map(T::from_real).collect(),
            AnyVector::Complex(v) => v.into_iter().map(|z| T::from_parts(z.re, z.im)).collect(),
        })
    }
}

impl From<Vec<f64>> for AnyVector {
    fn from(v: Vec<f64>) -> Self {
        AnyVector::Real(v)
    }
}

impl From<Vec<Complex64>> for AnyVector {
    fn from(v: Vec<Complex64>) -> Self {
        AnyVector::Complex(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&[1.0, 0.0], &[3.0, 5.0]).unwrap(), 3.0);
        assert_eq!(inner(&[c(0.0, 1.0)], &[c(0.0, 1.0)]).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_slot() {
        let a = [c(1.0, 2.0), c(-0.5, 0.25)];
        let x = [c(0.3, -1.0), c(2.0, 1.0)];
        let s = c(0.0, 1.0);
        let sa: Vec<_> = a.iter().map(|&z| s * z).collect();
        let lhs = inner(&sa, &x).unwrap();
        let rhs = s.conj() * inner(&a, &x).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn inner_rejects_length_mismatch() {
        assert!(matches!(
            inner(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn row_norm_examples() {
        let eye = DenseMatrix::<f64>::identity(3).unwrap();
        assert_eq!(eye.row_norm_sq(0).unwrap(), 1.0);
        let a = DenseMatrix::from_rows(&[[3.0, 4.0]]).unwrap();
        assert_eq!(a.row_norm_sq(0).unwrap(), 25.0);
        assert!(matches!(
            a.row_norm_sq(1),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(DenseMatrix::<f64>::identity(7).unwrap().frobenius_sq(), 7.0);
        assert_eq!(DenseMatrix::diagonal(&[1.0, 2.0]).unwrap().frobenius_sq(), 5.0);
    }

    #[test]
    fn inner_of_row_with_itself_is_row_norm() {
        let a = DenseMatrix::from_rows(&[[c(1.0, -2.0), c(0.5, 3.0)], [c(0.0, 0.0), c(2.0, 2.0)]])
            .unwrap();
        for i in 0..a.rows() {
            let ip = inner(a.row(i), a.row(i)).unwrap();
            assert!((ip.re - a.row_norm_sq(i).unwrap()).abs() < 1e-15);
            assert_eq!(ip.im, 0.0);
        }
    }

    #[test]
    fn gram_trace_is_frobenius() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 0.5], [-1.0, 0.0, 4.0], [3.0, 1.0, 1.0], [0.0, 2.0, -2.0]])
            .unwrap();
        let g = a.gram();
        let trace: f64 = (0..3).map(|i| g.get(i, i)).sum();
        assert!((trace - a.frobenius_sq()).abs() < 1e-12);
    }

    #[test]
    fn gram_is_hermitian() {
        let a = DenseMatrix::from_rows(&[[c(1.0, 1.0), c(0.0, 2.0)], [c(3.0, -1.0), c(1.0, 0.0)], [c(0.5, 0.5), c(-1.0, 1.0)]])
            .unwrap();
        let g = a.gram();
        for p in 0..2 {
            assert_eq!(g.get(p, p).im, 0.0);
            for q in 0..2 {
                assert_eq!(g.get(p, q), g.get(q, p).conj());
            }
        }
    }

    #[test]
    fn adjoint_product_is_the_adjoint_of_mul_vec() {
        let a = DenseMatrix::from_rows(&[[c(1.0, 1.0), c(0.0, 2.0)], [c(3.0, -1.0), c(1.0, 0.0)], [c(0.5, 0.5), c(-1.0, 1.0)]])
            .unwrap();
        let x = [c(0.3, -1.2), c(2.0, 0.7)];
        let y = [c(1.0, 0.0), c(-0.4, 2.5), c(0.9, 0.1)];
        let lhs = inner(&a.mul_vec(&x).unwrap(), &y).unwrap();
        let rhs = inner(&x, &a.adjoint_mul_vec(&y).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        // entries of A x are the row functionals
        assert_eq!(a.mul_vec(&x).unwrap()[1], inner(a.row(1), &x).unwrap());
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(DenseMatrix::<f64>::from_row_major(0, 3, vec![]).is_err());
        assert!(DenseMatrix::<f64>::from_row_major(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn any_vector_field_check() {
        let v = AnyVector::Real(vec![1.0, 2.0]);
        assert!(v.clone().into_field::<Complex64>().is_err());
        assert_eq!(v.into_field::<f64>().unwrap(), vec![1.0, 2.0]);
    }
}
