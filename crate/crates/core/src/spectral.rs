//! Singular value decomposition and the spectral statistics built on it.
//!
//! Every operation accepts matrices of either orientation. The aspect ratio
//! is always `min(m, n) / max(m, n)` and `n` in normalizations is `max(m, n)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::mp_law::{MpLaw, Probability};

/// Thin SVD `X = Σ λᵢ uᵢ vᵢᵀ` with `λ` sorted descending.
///
/// Signs are fixed so that the largest-magnitude entry of each `uᵢ` (first
/// index on ties) is nonnegative.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    singular_values: Vec<f64>,
    left: DenseMatrix,
    right: DenseMatrix,
}

impl SpectralDecomposition {
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `m x k` matrix whose columns are the left singular vectors.
    pub fn left_vectors(&self) -> &DenseMatrix {
        &self.left
    }

    /// `n x k` matrix whose columns are the right singular vectors.
    pub fn right_vectors(&self) -> &DenseMatrix {
        &self.right
    }

    pub fn rank_bound(&self) -> usize {
        self.singular_values.len()
    }

    /// `Σ_{i ∈ indices} λᵢ uᵢ vᵢᵀ` for zero-based `indices`.
    pub fn reconstruct(&self, indices: &[usize]) -> DenseMatrix {
        let (m, n) = (self.left.rows(), self.right.rows());
        if indices.is_empty() {
            return DenseMatrix::zeros(m, n);
        }
        let k = indices.len();
        let scaled_left = DMatrix::from_fn(m, k, |r, c| {
            self.left.get(r, indices[c]) * self.singular_values[indices[c]]
        });
        let right = DMatrix::from_fn(n, k, |r, c| self.right.get(r, indices[c]));
        DenseMatrix::from_nalgebra(&(scaled_left * right.transpose()))
    }

    pub fn reconstruct_all(&self) -> DenseMatrix {
        let all: Vec<usize> = (0..self.rank_bound()).collect();
        self.reconstruct(&all)
    }
}

struct RawSvd {
    values: Vec<f64>,
    // Columns of u/v for the original (untransposed) orientation.
    u: Option<DMatrix<f64>>,
    v: Option<DMatrix<f64>>,
}

fn raw_svd(x: &DenseMatrix, vectors: bool) -> Result<RawSvd> {
    let (m, n) = x.shape();
    let k = m.min(n);
    // nalgebra is markedly faster on tall inputs.
    let wide = m < n;
    let a = if wide {
        x.transpose().to_nalgebra()
    } else {
        x.to_nalgebra()
    };
    let max_iter = 1000 + 100 * k;
    let svd = a
        .try_svd(vectors, vectors, f64::EPSILON, max_iter)
        .ok_or(Error::SvdFailed { rows: m, cols: n })?;
    let values: Vec<f64> = svd.singular_values.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::SvdFailed { rows: m, cols: n });
    }
    let (u, v) = match (svd.u, svd.v_t) {
        (Some(u_tall), Some(v_t)) if vectors => {
            let v_tall = v_t.transpose();
            if wide {
                (Some(v_tall), Some(u_tall))
            } else {
                (Some(u_tall), Some(v_tall))
            }
        }
        _ => (None, None),
    };
    Ok(RawSvd { values, u, v })
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    order
}

pub fn svd(x: &DenseMatrix) -> Result<SpectralDecomposition> {
    let (m, n) = x.shape();
    let raw = raw_svd(x, true)?;
    let (u, v) = match (raw.u, raw.v) {
        (Some(u), Some(v)) => (u, v),
        _ => return Err(Error::SvdFailed { rows: m, cols: n }),
    };
    let order = descending_order(&raw.values);
    let k = order.len();
    let mut left = DMatrix::zeros(m, k);
    let mut right = DMatrix::zeros(n, k);
    let mut singular_values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let ucol = u.column(src);
        let mut pivot = 0;
        for r in 1..m {
            if ucol[r].abs() > ucol[pivot].abs() {
                pivot = r;
            }
        }
        let sign = if ucol[pivot] < 0.0 { -1.0 } else { 1.0 };
        left.set_column(dst, &(ucol * sign));
        right.set_column(dst, &(v.column(src) * sign));
        singular_values.push(raw.values[src].max(0.0));
    }
    Ok(SpectralDecomposition {
        singular_values,
        left: DenseMatrix::from_nalgebra(&left),
        right: DenseMatrix::from_nalgebra(&right),
    })
}

/// Singular values in descending order, length `min(m, n)`.
pub fn singular_values(x: &DenseMatrix) -> Result<Vec<f64>> {
    let mut values = raw_svd(x, false)?.values;
    for v in &mut values {
        *v = v.max(0.0);
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Sample median: middle order statistic, or the mean of the two middle ones
/// for an even count. Returns 0 for an empty slice.
pub fn sample_median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

pub fn median_singular_value(x: &DenseMatrix) -> Result<f64> {
    Ok(sample_median(&singular_values(x)?))
}

pub fn nuclear_norm(x: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(x)?.iter().sum())
}

pub fn frobenius_norm(x: &DenseMatrix) -> f64 {
    x.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn operator_norm(x: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(x)?.first().copied().unwrap_or(0.0))
}

/// Eigenvalues of `XXᵀ / n` (`n = max(m, n)`) in ascending order.
pub fn spectral_eigenvalues(x: &DenseMatrix) -> Result<Vec<f64>> {
    let scale = (x.rows().max(x.cols()) as f64).sqrt();
    let mut eig: Vec<f64> = singular_values(x)?
        .iter()
        .map(|s| (s / scale).powi(2))
        .collect();
    eig.reverse();
    Ok(eig)
}

/// Fraction of eigenvalues of `XXᵀ / n` that are `≤ t`.
pub fn empirical_spectral_cdf(x: &DenseMatrix, t: f64) -> Result<Probability> {
    Ok(step_cdf(&spectral_eigenvalues(x)?, t))
}

fn step_cdf(sorted: &[f64], t: f64) -> Probability {
    let count = sorted.partition_point(|&e| e <= t);
    Probability::clamped(count as f64 / sorted.len() as f64)
}

/// `sup_x |F_n(x) − F_γ(x)|` for the empirical spectral CDF of `x`.
pub fn ks_distance(x: &DenseMatrix, law: &MpLaw) -> Result<f64> {
    Ok(ks_distance_from_eigenvalues(&spectral_eigenvalues(x)?, law))
}

/// KS distance for eigenvalues sorted ascending. Both one-sided limits are
/// checked at each jump, plus the support edges.
pub fn ks_distance_from_eigenvalues(sorted: &[f64], law: &MpLaw) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let total = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == value {
            j += 1;
        }
        let limit = law.cdf(value).value();
        sup = sup
            .max((i as f64 / total - limit).abs())
            .max((j as f64 / total - limit).abs());
        i = j;
    }
    for edge in [law.lower_edge(), law.upper_edge()] {
        let below = sorted.partition_point(|&e| e < edge) as f64 / total;
        let upto = sorted.partition_point(|&e| e <= edge) as f64 / total;
        let limit = law.cdf(edge).value();
        sup = sup.max((below - limit).abs()).max((upto - limit).abs());
    }
    sup.min(1.0)
}
