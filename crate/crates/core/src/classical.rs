//! Nyquist bookkeeping and the explicit-representation baseline: an
//! orthonormal DST-II, its separable 2D form, M-term truncation, and
//! coefficient projection onto an arbitrary orthogonal basis.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::Matrix;
use crate::{Error, Result};

/// Per-dimension sample counts and, for audio, the sampling rate.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplingInfo {
    pub sample_counts: Vec<usize>,
    /// Samples per second; `None` for spatial signals.
    pub sample_rate: Option<f64>,
}

impl SamplingInfo {
    pub fn grid(sample_counts: Vec<usize>) -> Self {
        Self {
            sample_counts,
            sample_rate: None,
        }
    }

    pub fn audio(samples: usize, rate: f64) -> Self {
        Self {
            sample_counts: vec![samples],
            sample_rate: Some(rate),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_counts.is_empty() || self.sample_counts.iter().any(|&c| c < 2) {
            return Err(Error::InvalidArgument(format!(
                "every dimension needs at least 2 samples, got {:?}",
                self.sample_counts
            )));
        }
        if let Some(rate) = self.sample_rate {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "sample rate must be positive, got {rate}"
                )));
            }
        }
        Ok(())
    }
}

/// Half the sampling rate in Hz when a rate is known, otherwise half the
/// smallest per-axis sample count in cycles per signal.
pub fn nyquist_frequency(info: &SamplingInfo) -> f64 {
    match info.sample_rate {
        Some(rate) => rate / 2.0,
        None => info.sample_counts.iter().copied().min().unwrap_or(0) as f64 / 2.0,
    }
}

/// `sin(π m / 2N)` for `m = 0..4N`; every DST-II angle is one of these.
struct SineTable {
    n: usize,
    values: Vec<f64>,
}

impl SineTable {
    fn new(n: usize) -> Self {
        let step = core::f64::consts::PI / (2 * n) as f64;
        let values = (0..4 * n).map(|m| libm::sin(m as f64 * step)).collect();
        Self { n, values }
    }

    /// Orthonormal DST-II basis value: column `k` at sample `i`.
    #[inline]
    fn basis(&self, i: usize, k: usize) -> f64 {
        let n = self.n;
        let m = ((2 * i + 1) * (k + 1)) % (4 * n);
        let mut v = libm::sqrt(2.0 / n as f64) * self.values[m];
        if k == n - 1 {
            v *= core::f64::consts::FRAC_1_SQRT_2;
        }
        v
    }
}

fn dst_apply(input: &[f64], forward: bool) -> Vec<f64> {
    let n = input.len();
    if n == 0 {
        return Vec::new();
    }
    let table = SineTable::new(n);
    (0..n)
        .map(|out| {
            let mut acc = 0.0;
            for (inp, &v) in input.iter().enumerate() {
                let b = if forward {
                    table.basis(inp, out)
                } else {
                    table.basis(out, inp)
                };
                acc += b * v;
            }
            acc
        })
        .collect()
}

/// Orthonormal DST-II coefficients `c = Φᵀ x`.
pub fn dst_forward(signal: &[f64]) -> Vec<f64> {
    dst_apply(signal, true)
}

/// Inverse of [`dst_forward`], `x = Φ c`.
pub fn dst_inverse(coeffs: &[f64]) -> Vec<f64> {
    dst_apply(coeffs, false)
}

/// Sampled basis functions as columns plus their frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSet {
    /// `N × M`, column `m` is `φ_m` at the N grid points.
    pub matrix: Matrix,
    /// Frequency of each column in cycles per signal.
    pub frequencies: Vec<f64>,
}

impl BasisSet {
    pub fn new(matrix: Matrix, frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.len() != matrix.cols() {
            return Err(Error::Shape {
                op: "BasisSet::new",
                left: matrix.shape(),
                right: (frequencies.len(), 1),
            });
        }
        Ok(Self { matrix, frequencies })
    }

    /// The `N × N` orthonormal DST-II basis. Column `k` completes `(k+1)/2`
    /// cycles over the signal.
    pub fn dst(n: usize) -> Self {
        let table = SineTable::new(n);
        let matrix = Matrix::from_fn(n, n, |i, k| table.basis(i, k));
        let frequencies = (0..n).map(|k| (k + 1) as f64 / 2.0).collect();
        Self { matrix, frequencies }
    }

    /// Largest `|⟨φᵢ,φⱼ⟩| / (‖φᵢ‖‖φⱼ‖)` over `i ≠ j`.
    pub fn max_coherence(&self) -> f64 {
        let m = &self.matrix;
        let cols: Vec<Vec<f64>> = (0..m.cols())
            .map(|c| (0..m.rows()).map(|r| m.get(r, c)).collect())
            .collect();
        let norms: Vec<f64> = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();
        let mut worst: f64 = 0.0;
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                worst = worst.max(libm::fabs(dot(&cols[i], &cols[j])) / (norms[i] * norms[j]));
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `c_m = ⟨f, φ_m⟩ / ⟨φ_m, φ_m⟩`, each coefficient on its own.
pub fn project_coefficients(signal: &[f64], basis: &BasisSet) -> Result<Vec<f64>> {
    let m = &basis.matrix;
    if m.rows() != signal.len() {
        return Err(Error::Shape {
            op: "project_coefficients",
            left: (signal.len(), 1),
            right: m.shape(),
        });
    }
    (0..m.cols())
        .map(|c| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (r, f) in signal.iter().enumerate() {
                let phi = m.get(r, c);
                num += f * phi;
                den += phi * phi;
            }
            if den == 0.0 {
                Err(Error::DegenerateBasis(c))
            } else {
                Ok(num / den)
            }
        })
        .collect()
}

/// `f*(x) = Σ c_m φ_m(x)` at the basis grid points.
pub fn synthesize(coeffs: &[f64], basis: &BasisSet) -> Result<Vec<f64>> {
    let m = &basis.matrix;
    if m.cols() != coeffs.len() {
        return Err(Error::Shape {
            op: "synthesize",
            left: (coeffs.len(), 1),
            right: m.shape(),
        });
    }
    Ok((0..m.rows()).map(|r| dot(m.row(r), coeffs)).collect())
}

fn separable(image: &Matrix, forward: bool) -> Matrix {
    let (h, w) = image.shape();
    let mut rows_done = Matrix::zeros(h, w);
    for r in 0..h {
        rows_done.row_mut(r).copy_from_slice(&dst_apply(image.row(r), forward));
    }
    let mut out = Matrix::zeros(h, w);
    let mut column = vec![0.0; h];
    for c in 0..w {
        for (r, v) in column.iter_mut().enumerate() {
            *v = rows_done.get(r, c);
        }
        for (r, v) in dst_apply(&column, forward).into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    out
}

/// Separable 2D orthonormal DST-II.
pub fn dst2_forward(image: &Matrix) -> Matrix {
    separable(image, true)
}

pub fn dst2_inverse(coeffs: &Matrix) -> Matrix {
    separable(coeffs, false)
}

/// Keeps the `m` largest-magnitude 2D DST coefficients (ties go to the lower
/// row-major index), zeroes the rest, and transforms back.
pub fn dst2_truncated_reconstruct(image: &Matrix, m: usize) -> Result<Matrix> {
    let total = image.rows() * image.cols();
    if m == 0 || m > total {
        return Err(Error::InvalidArgument(format!(
            "coefficient budget {m} outside 1..={total}"
        )));
    }
    let mut coeffs = dst2_forward(image);
    let mut order: Vec<usize> = (0..total).collect();
    let data = coeffs.data();
    order.sort_by(|&a, &b| libm::fabs(data[b]).total_cmp(&libm::fabs(data[a])).then(a.cmp(&b)));
    let values = coeffs.data_mut();
    for &idx in &order[m..] {
        values[idx] = 0.0;
    }
    Ok(dst2_inverse(&coeffs))
}
