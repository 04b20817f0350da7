//! Dense row-major `f64` matrices, the seeded generator and the
//! central-difference gradient oracle.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawMatrix"))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)).take(8))
            .finish()
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Matrix::new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Changes the shape in place, keeping the allocation. Entries are
    /// unspecified afterwards.
    pub fn reshape_scratch(&mut self, rows: usize, cols: usize) {
        self.data.resize(rows * cols, 0.0);
        self.rows = rows;
        self.cols = cols;
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Shape {
                    op: "Matrix::from_rows",
                    left: (1, cols),
                    right: (1, row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Column vector.
    pub fn column(values: Vec<f64>) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Rows `start..end` as a new matrix.
    pub fn slice_rows(&self, start: usize, end: usize) -> Matrix {
        Matrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Gathers the listed rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Sum of each column.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        self.column_sums_into(&mut sums);
        sums
    }

    pub(crate) fn column_sums_into(&self, sums: &mut [f64]) {
        sums.fill(0.0);
        for row in self.data.chunks_exact(self.cols.max(1)) {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }
}

#[derive(Clone, Copy)]
enum Layout {
    Plain,
    Transposed,
}

/// `out = op(a) * op(b)` where `op` optionally transposes its argument
/// through strides. `out` is reshaped and fully overwritten.
fn gemm(op: &'static str, out: &mut Matrix, a: &Matrix, ta: Layout, b: &Matrix, tb: Layout) -> Result<()> {
    let (m, k, rsa, csa) = match ta {
        Layout::Plain => (a.rows, a.cols, a.cols as isize, 1),
        Layout::Transposed => (a.cols, a.rows, 1, a.cols as isize),
    };
    let (kb, n, rsb, csb) = match tb {
        Layout::Plain => (b.rows, b.cols, b.cols as isize, 1),
        Layout::Transposed => (b.cols, b.rows, 1, b.cols as isize),
    };
    if k != kb {
        return Err(Error::Shape {
            op,
            left: a.shape(),
            right: b.shape(),
        });
    }
    out.reshape_scratch(m, n);
    if m == 0 || n == 0 {
        return Ok(());
    }
    if k == 0 {
        out.data.fill(0.0);
        return Ok(());
    }
    // SAFETY: the pointers cover `m*k`, `k*n` and `m*n` elements with the
    // strides computed above, and `out` is borrowed mutably so it cannot
    // alias the inputs. With beta = 0 the prior contents of `out` are
    // never read.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            0.0,
            out.data.as_mut_ptr(),
            n as isize,
            1,
        );
    }
    Ok(())
}

/// Matrix product `a * b`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let mut out = Matrix::zeros(0, 0);
    matmul_into(&mut out, a, b)?;
    Ok(out)
}

/// `a * bᵀ` without materializing the transpose.
pub fn matmul_transpose_b(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let mut out = Matrix::zeros(0, 0);
    matmul_transpose_b_into(&mut out, a, b)?;
    Ok(out)
}

/// `aᵀ * b` without materializing the transpose.
pub fn matmul_transpose_a(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let mut out = Matrix::zeros(0, 0);
    matmul_transpose_a_into(&mut out, a, b)?;
    Ok(out)
}

/// [`matmul`] into an existing buffer.
pub fn matmul_into(out: &mut Matrix, a: &Matrix, b: &Matrix) -> Result<()> {
    gemm("matmul", out, a, Layout::Plain, b, Layout::Plain)
}

pub fn matmul_transpose_b_into(out: &mut Matrix, a: &Matrix, b: &Matrix) -> Result<()> {
    gemm("matmul_transpose_b", out, a, Layout::Plain, b, Layout::Transposed)
}

pub fn matmul_transpose_a_into(out: &mut Matrix, a: &Matrix, b: &Matrix) -> Result<()> {
    gemm("matmul_transpose_a", out, a, Layout::Transposed, b, Layout::Plain)
}

/// Seeded xoshiro256++ generator.
///
/// The 256-bit state is expanded from the 64-bit seed with SplitMix64
/// (`0x9E3779B97F4A7C15` increment, `0xBF58476D1CE4E5B9` / `0x94D049BB133111EB`
/// finalizer), so a seed yields the same stream on every platform.
#[derive(Clone, Debug)]
pub struct Rng {
    inner: Xoshiro256PlusPlus,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`. Callers guarantee `lo < hi`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let v = lo + (hi - lo) * self.next_f64();
        // rounding can land exactly on `hi`
        if v < hi {
            v
        } else {
            hi.next_down()
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.inner);
    }

    /// Independent child stream, used to give sub-tasks their own seed.
    pub fn fork(&mut self) -> Rng {
        Rng::new(self.next_u64())
    }
}

/// `rows × cols` matrix of i.i.d. draws from `[lo, hi)`, filled row-major.
pub fn uniform_matrix(rng: &mut Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Result<Matrix> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidRange { lo, hi });
    }
    let data = (0..rows * cols).map(|_| rng.uniform(lo, hi)).collect();
    Ok(Matrix { rows, cols, data })
}

/// Central-difference gradient of `f` at `theta`.
pub fn finite_diff_grad<F>(mut f: F, theta: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "step h must be positive, got {h}"
        )));
    }
    let mut point = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        let orig = point[i];
        point[i] = orig + h;
        let plus = f(&point);
        point[i] = orig - h;
        let minus = f(&point);
        point[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(grad)
}
