//! Thin wrappers around the LAPACK-backed primitives plus a few dense
//! helpers (Kronecker products, pseudo-inverses, small matrix exponentials)
//! shared across the crate.

use crate::error::{Error, Result};
use ndarray::prelude::*;
use ndarray_linalg::{Eigh, QR, SVD, UPLO};
use num_complex::Complex64 as C64;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const MINUS_I: C64 = C64::new(0.0, -1.0);

/// Conjugate transpose.
pub fn dagger(a: &ArrayView2<C64>) -> Array2<C64> {
    let mut out = Array2::zeros((a.ncols(), a.nrows()));
    for ((i, j), v) in a.indexed_iter() {
        out[[j, i]] = v.conj();
    }
    out
}

/// Hermitize as (A + A†)/2.
pub fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    let ad = dagger(&a.view());
    (a + &ad).mapv(|z| 0.5 * z)
}

pub fn frobenius(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_real(a: &ArrayView2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest Hermiticity violation max |A - A†|.
pub fn hermiticity_defect(a: &ArrayView2<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Kronecker product with the first factor on the slow index:
/// `out[(i*rb + k), (j*cb + l)] = a[i,j] * b[k,l]`.
pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

pub fn identity_c(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO })
}

pub fn to_complex(a: &ArrayView2<f64>) -> Array2<C64> {
    a.mapv(|x| C64::new(x, 0.0))
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors in columns.
pub fn eigh_c(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (w, v) = a.eigh(UPLO::Lower)?;
    Ok((w, v))
}

/// Eigenvalues only of a Hermitian matrix, ascending.
pub fn eigvalsh_c(a: &Array2<C64>) -> Result<Array1<f64>> {
    let (w, _) = a.eigh(UPLO::Lower)?;
    Ok(w)
}

pub fn eigh_real(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (w, v) = a.eigh(UPLO::Lower)?;
    Ok((w, v))
}

/// Thin SVD: returns (U, s, Vh) with U: m×k, s: k, Vh: k×n, k = min(m, n).
pub fn svd_thin(a: &Array2<C64>) -> Result<(Array2<C64>, Array1<f64>, Array2<C64>)> {
    let (u, s, vh) = a.svd(true, true)?;
    let u = u.ok_or_else(|| Error::Linalg("svd returned no U".into()))?;
    let vh = vh.ok_or_else(|| Error::Linalg("svd returned no Vh".into()))?;
    Ok((u, s, vh))
}

/// Thin QR of a tall or square matrix: Q m×k with orthonormal columns, R k×n.
pub fn qr_thin(a: &Array2<C64>) -> Result<(Array2<C64>, Array2<C64>)> {
    let (q, r) = a.qr()?;
    Ok((q, r))
}

/// LQ through the QR of the adjoint: A = L·Q with Q k×n having orthonormal rows.
pub fn lq_thin(a: &Array2<C64>) -> Result<(Array2<C64>, Array2<C64>)> {
    let ah = dagger(&a.view());
    let (q, r) = ah.qr()?;
    Ok((dagger(&r.view()), dagger(&q.view())))
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
/// Returns the pseudo-inverse together with the smallest/largest singular values.
pub fn pinv(a: &Array2<C64>, rel_cutoff: f64) -> Result<(Array2<C64>, f64, f64)> {
    let (u, s, vh) = svd_thin(a)?;
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let cut = rel_cutoff * smax;
    let k = s.len();
    let mut sinv = Array2::<C64>::zeros((k, k));
    for i in 0..k {
        if s[i] > cut && s[i] > 0.0 {
            sinv[[i, i]] = C64::new(1.0 / s[i], 0.0);
        }
    }
    let pinv = dagger(&vh.view()).dot(&sinv).dot(&dagger(&u.view()));
    Ok((pinv, smin, smax))
}

/// Matrix exponential of a small real matrix by scaling and squaring with a
/// Taylor series on the scaled block.
pub fn expm_real(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[[i, j]].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let s = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a.mapv(|x| x / 2f64.powi(s as i32));
    let mut term = Array2::<f64>::eye(n);
    let mut acc = Array2::<f64>::eye(n);
    for k in 1..=24 {
        term = term.dot(&b).mapv(|x| x / k as f64);
        acc += &term;
        if term.iter().map(|x| x.abs()).fold(0.0f64, f64::max) < 1e-300 {
            break;
        }
    }
    for _ in 0..s {
        acc = acc.dot(&acc);
    }
    acc
}

/// Deterministic pseudo-random complex matrices and tensors for tests and
/// oracle cross-checks.
#[doc(hidden)]
pub mod testing {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_complex_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<C64> {
        Array2::from_shape_vec((rows, cols), random_complex_vec(rng, rows * cols)).unwrap()
    }

    pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Array2<C64> {
        let a = random_matrix(rng, n, n);
        hermitize(&a)
    }

    /// Haar-ish random unitary from the QR of a random matrix.
    pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Array2<C64> {
        let a = random_matrix(rng, n, n);
        let (q, _r) = qr_thin(&a).unwrap();
        q
    }
}
