//! Tensor-train vectors and operators: storage, canonical forms, rounding,
//! inner products, and operator application.
//!
//! A [`TTVector`] stores a chain of complex 3-index cores `G^(k)` of shape
//! `(r_{k-1}, p_k, r_k)` with boundary ranks `r_0 = r_L = 1`. The dense
//! reconstruction orders sites slowest-to-fastest, i.e. site 0 is the most
//! significant index. A [`TTOperator`] stores 4-index cores
//! `(R_{k-1}, p_out, p_in, R_k)` acting on the same site sequence.

use crate::error::{Error, Result};
use crate::linalg::{qr_thin, svd_thin, ZERO};
use ndarray::prelude::*;
use num_complex::Complex64 as C64;

/// Largest dense dimension materialized by `from_dense`/`to_dense`.
pub const DENSE_CAP: usize = 1 << 24;

fn product_checked(dims: &[usize], cap: usize, context: &'static str) -> Result<usize> {
    let mut acc: usize = 1;
    for &d in dims {
        acc = acc.saturating_mul(d);
        if acc > cap {
            return Err(Error::SizeOverflow {
                context,
                dim: acc,
                cap,
            });
        }
    }
    Ok(acc)
}

/// Number of singular values to keep given an absolute root-sum-square
/// budget for the discarded tail and an optional rank cap.
fn truncation_keep(s: &Array1<f64>, budget: f64, max_rank: Option<usize>) -> usize {
    let n = s.len();
    let mut tail = 0.0f64;
    let mut keep = n;
    for i in (0..n).rev() {
        let next = tail + s[i] * s[i];
        if next.sqrt() <= budget {
            tail = next;
            keep = i;
        } else {
            break;
        }
    }
    let mut keep = keep.max(1);
    if let Some(cap) = max_rank {
        keep = keep.min(cap.max(1));
    }
    keep
}

/// Maximal meaningful TT rank profile for the given site dimensions,
/// optionally capped. Entry `k` is the bond between sites `k-1` and `k`;
/// the returned vector has `L + 1` entries with 1 at both ends.
pub fn max_rank_profile(dims: &[usize], cap: Option<usize>) -> Vec<usize> {
    let l = dims.len();
    let mut out = vec![1usize; l + 1];
    for k in 1..l {
        let left: usize = dims[..k].iter().fold(1usize, |a, &b| a.saturating_mul(b));
        let right: usize = dims[k..].iter().fold(1usize, |a, &b| a.saturating_mul(b));
        let mut r = left.min(right);
        if let Some(c) = cap {
            r = r.min(c.max(1));
        }
        out[k] = r;
    }
    out
}

/// Tensor-train factorization of a state vector.
#[derive(Debug, Clone)]
pub struct TTVector {
    cores: Vec<Array3<C64>>,
    ortho_center: Option<usize>,
}

impl TTVector {
    /// Build from raw cores, validating boundary ranks and bond chaining.
    pub fn new(cores: Vec<Array3<C64>>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::InvalidArgument("empty core list".into()));
        }
        if cores[0].shape()[0] != 1 || cores[cores.len() - 1].shape()[2] != 1 {
            return Err(Error::DimensionMismatch {
                context: "TTVector boundary ranks",
                expected: vec![1, 1],
                got: vec![cores[0].shape()[0], cores[cores.len() - 1].shape()[2]],
            });
        }
        for k in 0..cores.len() - 1 {
            if cores[k].shape()[2] != cores[k + 1].shape()[0] {
                return Err(Error::DimensionMismatch {
                    context: "TTVector bond chaining",
                    expected: vec![cores[k].shape()[2]],
                    got: vec![cores[k + 1].shape()[0]],
                });
            }
        }
        Ok(Self {
            cores,
            ortho_center: None,
        })
    }

    /// Rank-1 product state from per-site vectors.
    pub fn from_product(states: &[Array1<C64>]) -> Result<Self> {
        let cores = states
            .iter()
            .map(|s| {
                Array3::from_shape_vec((1, s.len(), 1), s.to_vec())
                    .map_err(|e| Error::InvalidArgument(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut v = Self::new(cores)?;
        v.ortho_center = Some(0);
        Ok(v)
    }

    /// Exact-to-tolerance TT factorization of a dense tensor given in
    /// row-major order over `dims` (site 0 slowest).
    pub fn from_dense(data: ArrayView1<C64>, dims: &[usize], tol: f64) -> Result<Self> {
        let total = product_checked(dims, DENSE_CAP, "tt_from_dense")?;
        if total != data.len() {
            return Err(Error::DimensionMismatch {
                context: "tt_from_dense data length",
                expected: vec![total],
                got: vec![data.len()],
            });
        }
        let l = dims.len();
        let norm = data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let budget = if l > 1 {
            tol * norm / ((l - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut cores = Vec::with_capacity(l);
        let mut rest: Array1<C64> = data.to_owned();
        let mut r_prev = 1usize;
        for (k, &p) in dims.iter().enumerate().take(l - 1) {
            let m = r_prev * p;
            let ncols = rest.len() / m;
            let mat = rest.to_shape((m, ncols)).unwrap().into_owned();
            let (u, s, vh) = svd_thin(&mat)?;
            let keep = truncation_keep(&s, budget, None);
            let uk = u.slice(s![.., ..keep]).to_owned();
            cores.push(
                uk.to_shape((r_prev, p, keep))
                    .unwrap()
                    .into_owned(),
            );
            let mut carry = vh.slice(s![..keep, ..]).to_owned();
            for (i, mut row) in carry.rows_mut().into_iter().enumerate() {
                let si = C64::new(s[i], 0.0);
                row.map_inplace(|z| *z *= si);
            }
            let _ = k;
            rest = carry.to_shape(keep * ncols).unwrap().into_owned();
            r_prev = keep;
        }
        cores.push(
            rest.to_shape((r_prev, dims[l - 1], 1))
                .unwrap()
                .into_owned(),
        );
        let mut v = Self::new(cores)?;
        v.ortho_center = Some(l - 1);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn core(&self, k: usize) -> &Array3<C64> {
        &self.cores[k]
    }

    pub fn cores(&self) -> &[Array3<C64>] {
        &self.cores
    }

    pub(crate) fn cores_mut(&mut self) -> &mut Vec<Array3<C64>> {
        self.ortho_center = None;
        &mut self.cores
    }

    pub fn ortho_center(&self) -> Option<usize> {
        self.ortho_center
    }

    pub(crate) fn set_ortho_center(&mut self, c: Option<usize>) {
        self.ortho_center = c;
    }

    pub fn phys_dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.shape()[1]).collect()
    }

    /// Bond ranks including the trivial boundaries; `L + 1` entries.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.shape()[0]).collect();
        r.push(1);
        r
    }

    /// Dense reconstruction (row-major over sites, site 0 slowest).
    pub fn to_dense(&self) -> Result<Array1<C64>> {
        let dims = self.phys_dims();
        let total = product_checked(&dims, DENSE_CAP, "tt_to_dense")?;
        // acc: (prefix, r_k)
        let mut acc: Array2<C64> = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
        for core in &self.cores {
            let (rl, p, rr) = (core.shape()[0], core.shape()[1], core.shape()[2]);
            let cm = core.to_shape((rl, p * rr)).unwrap();
            let next = acc.dot(&cm);
            acc = next
                .to_shape((next.len() / rr, rr))
                .unwrap()
                .into_owned();
        }
        debug_assert_eq!(acc.len(), total);
        Ok(acc.to_shape(total).unwrap().into_owned())
    }

    /// Canonicalize with the orthogonality center at `center`; the state is
    /// unchanged up to gauge. SVD-based sweeps, no truncation.
    pub fn orthogonalize(&self, center: usize) -> Result<Self> {
        let l = self.len();
        if center >= l {
            return Err(Error::IndexOutOfBounds {
                context: "orthogonalize center",
                index: center,
                bound: l,
            });
        }
        let mut cores = self.cores.clone();
        // Left-to-right: make sites < center left-orthogonal.
        for k in 0..center {
            let (rl, p, rr) = dim3(&cores[k]);
            let mat = cores[k].to_shape((rl * p, rr)).unwrap().into_owned();
            let (u, s, vh) = svd_thin(&mat)?;
            let keep = s.len();
            cores[k] = u.to_shape((rl, p, keep)).unwrap().into_owned();
            let mut carry = vh;
            for (i, mut row) in carry.rows_mut().into_iter().enumerate() {
                let si = C64::new(s[i], 0.0);
                row.map_inplace(|z| *z *= si);
            }
            absorb_left(&mut cores[k + 1], &carry)?;
        }
        // Right-to-left: make sites > center right-orthogonal.
        for k in (center + 1..l).rev() {
            let (rl, p, rr) = dim3(&cores[k]);
            let mat = cores[k].to_shape((rl, p * rr)).unwrap().into_owned();
            let (u, s, vh) = svd_thin(&mat)?;
            let keep = s.len();
            cores[k] = vh.to_shape((keep, p, rr)).unwrap().into_owned();
            let mut carry = u;
            for (i, mut col) in carry.columns_mut().into_iter().enumerate() {
                let si = C64::new(s[i], 0.0);
                col.map_inplace(|z| *z *= si);
            }
            absorb_right(&mut cores[k - 1], &carry)?;
        }
        let mut v = Self::new(cores)?;
        v.ortho_center = Some(center);
        Ok(v)
    }

    /// SVD rounding: canonicalize, then truncate every bond with a uniform
    /// share of the `tol * ||v||` budget and an optional rank cap.
    pub fn round(&self, tol: f64, max_rank: Option<usize>) -> Result<Self> {
        let l = self.len();
        if l == 1 {
            let mut v = self.clone();
            v.ortho_center = Some(0);
            return Ok(v);
        }
        let canon = self.orthogonalize(l - 1)?;
        let norm = canon.norm();
        let budget = tol * norm / ((l - 1) as f64).sqrt();
        let mut cores = canon.cores;
        for k in (1..l).rev() {
            let (rl, p, rr) = dim3(&cores[k]);
            let mat = cores[k].to_shape((rl, p * rr)).unwrap().into_owned();
            let (u, s, vh) = svd_thin(&mat)?;
            let keep = truncation_keep(&s, budget, max_rank);
            cores[k] = vh
                .slice(s![..keep, ..])
                .to_owned()
                .to_shape((keep, p, rr))
                .unwrap()
                .into_owned();
            let mut carry = u.slice(s![.., ..keep]).to_owned();
            for (i, mut col) in carry.columns_mut().into_iter().enumerate() {
                let si = C64::new(s[i], 0.0);
                col.map_inplace(|z| *z *= si);
            }
            absorb_right(&mut cores[k - 1], &carry)?;
        }
        let mut v = Self::new(cores)?;
        v.ortho_center = Some(0);
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        inner(self, self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.cores[0].map_inplace(|z| *z *= c);
        out
    }

    /// TT addition by block concatenation of cores.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.phys_dims() != other.phys_dims() {
            return Err(Error::DimensionMismatch {
                context: "tt add phys dims",
                expected: self.phys_dims(),
                got: other.phys_dims(),
            });
        }
        let l = self.len();
        if l == 1 {
            let sum = &self.cores[0] + &other.cores[0];
            return Self::new(vec![sum]);
        }
        let mut cores = Vec::with_capacity(l);
        for k in 0..l {
            let a = &self.cores[k];
            let b = &other.cores[k];
            let (alr, p, arr) = dim3(a);
            let (blr, _, brr) = dim3(b);
            let (nl, nr) = if k == 0 {
                (1, arr + brr)
            } else if k == l - 1 {
                (alr + blr, 1)
            } else {
                (alr + blr, arr + brr)
            };
            let mut c = Array3::<C64>::from_elem((nl, p, nr), ZERO);
            let (ro, co) = if k == 0 { (0, 0) } else { (alr, arr) };
            c.slice_mut(s![..alr, .., ..arr]).assign(a);
            if k == 0 {
                c.slice_mut(s![..blr, .., arr..]).assign(b);
            } else if k == l - 1 {
                c.slice_mut(s![alr.., .., ..brr]).assign(b);
            } else {
                c.slice_mut(s![ro.., .., co..]).assign(b);
            }
            cores.push(c);
        }
        Self::new(cores)
    }

    /// Zero-pad bond ranks up to `profile` (length `L + 1`, ends must be 1).
    /// Existing ranks above the profile are rejected.
    pub fn pad_ranks(&self, profile: &[usize]) -> Result<Self> {
        let l = self.len();
        if profile.len() != l + 1 || profile[0] != 1 || profile[l] != 1 {
            return Err(Error::InvalidArgument(format!(
                "rank profile must have {} entries with unit boundaries",
                l + 1
            )));
        }
        let ranks = self.ranks();
        for k in 0..=l {
            if ranks[k] > profile[k] {
                return Err(Error::InvalidArgument(format!(
                    "bond {} has rank {} above target {}",
                    k, ranks[k], profile[k]
                )));
            }
        }
        let mut cores = Vec::with_capacity(l);
        for k in 0..l {
            let (rl, p, rr) = dim3(&self.cores[k]);
            let mut c = Array3::<C64>::from_elem((profile[k], p, profile[k + 1]), ZERO);
            c.slice_mut(s![..rl, .., ..rr]).assign(&self.cores[k]);
            cores.push(c);
        }
        let mut v = Self::new(cores)?;
        v.ortho_center = None;
        Ok(v)
    }

    /// Verify the canonical-form invariant around `ortho_center` to `tol`.
    pub fn canonical_defect(&self) -> Result<f64> {
        let c = match self.ortho_center {
            Some(c) => c,
            None => return Err(Error::InvalidArgument("no orthogonality center set".into())),
        };
        let mut worst = 0.0f64;
        for k in 0..c {
            worst = worst.max(left_orth_defect(&self.cores[k]));
        }
        for k in c + 1..self.len() {
            worst = worst.max(right_orth_defect(&self.cores[k]));
        }
        Ok(worst)
    }
}

pub(crate) fn dim3(a: &Array3<C64>) -> (usize, usize, usize) {
    let s = a.shape();
    (s[0], s[1], s[2])
}

/// Multiply `carry` (k×r_l) onto the left bond of `core`.
fn absorb_left(core: &mut Array3<C64>, carry: &Array2<C64>) -> Result<()> {
    let (rl, p, rr) = dim3(core);
    if carry.ncols() != rl {
        return Err(Error::DimensionMismatch {
            context: "absorb_left",
            expected: vec![rl],
            got: vec![carry.ncols()],
        });
    }
    let mat = core.to_shape((rl, p * rr)).unwrap().into_owned();
    let new = carry.dot(&mat);
    *core = new
        .to_shape((carry.nrows(), p, rr))
        .unwrap()
        .into_owned();
    Ok(())
}

/// Multiply `carry` (r_r×k) onto the right bond of `core`.
fn absorb_right(core: &mut Array3<C64>, carry: &Array2<C64>) -> Result<()> {
    let (rl, p, rr) = dim3(core);
    if carry.nrows() != rr {
        return Err(Error::DimensionMismatch {
            context: "absorb_right",
            expected: vec![rr],
            got: vec![carry.nrows()],
        });
    }
    let mat = core.to_shape((rl * p, rr)).unwrap().into_owned();
    let new = mat.dot(carry);
    *core = new
        .to_shape((rl, p, carry.ncols()))
        .unwrap()
        .into_owned();
    Ok(())
}

fn left_orth_defect(core: &Array3<C64>) -> f64 {
    let (rl, p, rr) = dim3(core);
    let m = core.to_shape((rl * p, rr)).unwrap().into_owned();
    let g = crate::linalg::dagger(&m.view()).dot(&m);
    let mut worst = 0.0f64;
    for i in 0..rr {
        for j in 0..rr {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[[i, j]] - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

fn right_orth_defect(core: &Array3<C64>) -> f64 {
    let (rl, p, rr) = dim3(core);
    let m = core.to_shape((rl, p * rr)).unwrap().into_owned();
    let g = m.dot(&crate::linalg::dagger(&m.view()));
    let mut worst = 0.0f64;
    for i in 0..rl {
        for j in 0..rl {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[[i, j]] - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

/// Inner product `<a|b>` with conjugation on `a`.
pub fn inner(a: &TTVector, b: &TTVector) -> Result<C64> {
    if a.phys_dims() != b.phys_dims() {
        return Err(Error::DimensionMismatch {
            context: "tt inner phys dims",
            expected: a.phys_dims(),
            got: b.phys_dims(),
        });
    }
    // env: (r_a, r_b)
    let mut env = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
    for (ca, cb) in a.cores.iter().zip(b.cores.iter()) {
        let (ral, p, rar) = dim3(ca);
        let (rbl, _, rbr) = dim3(cb);
        // t = env · B  -> (r_a_l, p*r_b_r)
        let bm = cb.to_shape((rbl, p * rbr)).unwrap();
        let t = env.dot(&bm);
        // regroup to (r_a_l * p, r_b_r), contract with conj(A) over (r_a_l * p)
        let t = t.to_shape((ral * p, rbr)).unwrap().into_owned();
        let am = ca.to_shape((ral * p, rar)).unwrap().into_owned();
        let ah = crate::linalg::dagger(&am.view());
        env = ah.dot(&t);
    }
    Ok(env[[0, 0]])
}

/// Tensor-train (matrix-product) operator.
#[derive(Debug, Clone)]
pub struct TTOperator {
    cores: Vec<Array4<C64>>,
}

impl TTOperator {
    /// Cores of shape (R_{k-1}, p_out, p_in, R_k); boundary op-ranks must be 1.
    pub fn new(cores: Vec<Array4<C64>>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::InvalidArgument("empty operator core list".into()));
        }
        if cores[0].shape()[0] != 1 || cores[cores.len() - 1].shape()[3] != 1 {
            return Err(Error::DimensionMismatch {
                context: "TTOperator boundary ranks",
                expected: vec![1, 1],
                got: vec![cores[0].shape()[0], cores[cores.len() - 1].shape()[3]],
            });
        }
        for k in 0..cores.len() - 1 {
            if cores[k].shape()[3] != cores[k + 1].shape()[0] {
                return Err(Error::DimensionMismatch {
                    context: "TTOperator bond chaining",
                    expected: vec![cores[k].shape()[3]],
                    got: vec![cores[k + 1].shape()[0]],
                });
            }
        }
        for c in &cores {
            if c.shape()[1] != c.shape()[2] {
                return Err(Error::DimensionMismatch {
                    context: "TTOperator square site dims",
                    expected: vec![c.shape()[1]],
                    got: vec![c.shape()[2]],
                });
            }
        }
        Ok(Self { cores })
    }

    pub fn identity(dims: &[usize]) -> Self {
        let cores = dims
            .iter()
            .map(|&p| {
                Array4::from_shape_fn((1, p, p, 1), |(_, i, j, _)| {
                    if i == j {
                        C64::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                })
            })
            .collect();
        Self { cores }
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn core(&self, k: usize) -> &Array4<C64> {
        &self.cores[k]
    }

    pub fn phys_dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.shape()[1]).collect()
    }

    pub fn op_ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.shape()[0]).collect();
        r.push(1);
        r
    }

    /// Dense matrix (row index = output, both in the slowest-to-fastest site
    /// order). Capped to modest dimensions.
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        let dims = self.phys_dims();
        let total = product_checked(&dims, 1 << 12, "tt_operator_to_dense")?;
        // acc: (Dout, Din, R)
        let mut acc = Array3::from_elem((1, 1, 1), C64::new(1.0, 0.0));
        for w in &self.cores {
            let (rl, po, pi, rr) = dim4(w);
            let (dout, din, _) = (acc.shape()[0], acc.shape()[1], acc.shape()[2]);
            let am = acc.to_shape((dout * din, rl)).unwrap().into_owned();
            let wm = w.to_shape((rl, po * pi * rr)).unwrap();
            let t = am.dot(&wm); // (dout*din, po*pi*rr)
            let t5 = t.to_shape((dout, din, po, pi, rr)).unwrap().into_owned();
            let t5 = t5.permuted_axes([0, 2, 1, 3, 4]);
            acc = t5
                .as_standard_layout()
                .to_owned()
                .to_shape((dout * po, din * pi, rr))
                .unwrap()
                .into_owned();
        }
        Ok(acc.to_shape((total, total)).unwrap().into_owned())
    }

    /// Apply to a TT vector; result ranks are the products of operator and
    /// vector ranks, no rounding is performed.
    pub fn apply(&self, v: &TTVector) -> Result<TTVector> {
        if self.phys_dims() != v.phys_dims() {
            return Err(Error::DimensionMismatch {
                context: "apply_operator phys dims",
                expected: self.phys_dims(),
                got: v.phys_dims(),
            });
        }
        let mut cores = Vec::with_capacity(v.len());
        for (w, g) in self.cores.iter().zip(v.cores.iter()) {
            let (rl, po, pi, rr) = dim4(w);
            let (al, _, ar) = dim3(g);
            // tmp[(rl,po,rr),(al,ar)] = sum_i w[rl,po,i,rr] g[al,i,ar]
            let wp = w.view().permuted_axes([0, 1, 3, 2]);
            let wm = wp
                .as_standard_layout()
                .to_owned()
                .to_shape((rl * po * rr, pi))
                .unwrap()
                .into_owned();
            let gp = g.view().permuted_axes([1, 0, 2]);
            let gm = gp
                .as_standard_layout()
                .to_owned()
                .to_shape((pi, al * ar))
                .unwrap()
                .into_owned();
            let t = wm.dot(&gm); // (rl*po*rr, al*ar)
            let t5 = t.to_shape((rl, po, rr, al, ar)).unwrap().into_owned();
            let t5 = t5.permuted_axes([0, 3, 1, 2, 4]);
            cores.push(
                t5.as_standard_layout()
                    .to_owned()
                    .to_shape((rl * al, po, rr * ar))
                    .unwrap()
                    .into_owned(),
            );
        }
        TTVector::new(cores)
    }
}

pub(crate) fn dim4(a: &Array4<C64>) -> (usize, usize, usize, usize) {
    let s = a.shape();
    (s[0], s[1], s[2], s[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing;
    use approx::assert_abs_diff_eq;

    fn random_tt(seed: u64, dims: &[usize], rank: usize) -> TTVector {
        let mut rng = testing::rng(seed);
        let profile = max_rank_profile(dims, Some(rank));
        let cores = (0..dims.len())
            .map(|k| {
                let data =
                    testing::random_complex_vec(&mut rng, profile[k] * dims[k] * profile[k + 1]);
                Array3::from_shape_vec((profile[k], dims[k], profile[k + 1]), data).unwrap()
            })
            .collect();
        TTVector::new(cores).unwrap()
    }

    fn random_mpo(seed: u64, dims: &[usize], rank: usize) -> TTOperator {
        let mut rng = testing::rng(seed);
        let l = dims.len();
        let mut ranks = vec![1usize; l + 1];
        for r in ranks.iter_mut().take(l).skip(1) {
            *r = rank;
        }
        let cores = (0..l)
            .map(|k| {
                let data = testing::random_complex_vec(
                    &mut rng,
                    ranks[k] * dims[k] * dims[k] * ranks[k + 1],
                );
                Array4::from_shape_vec((ranks[k], dims[k], dims[k], ranks[k + 1]), data).unwrap()
            })
            .collect();
        TTOperator::new(cores).unwrap()
    }

    fn dense_err(a: &TTVector, b: &TTVector) -> f64 {
        let da = a.to_dense().unwrap();
        let db = b.to_dense().unwrap();
        (&da - &db).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn product_state_has_rank_one() {
        let e1 = Array1::from_vec(vec![C64::new(1.0, 0.0), ZERO]);
        let v = TTVector::from_product(&[e1.clone(), e1.clone(), e1]).unwrap();
        assert_eq!(v.ranks(), vec![1, 1, 1, 1]);
        let d = v.to_dense().unwrap();
        assert_abs_diff_eq!(d[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            d.iter().map(|z| z.norm_sqr()).sum::<f64>(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn from_dense_rank_one_product() {
        // e_1 x e_1 x e_1 over three sites of dim 2
        let mut data = vec![ZERO; 8];
        data[0] = C64::new(1.0, 0.0);
        let v = TTVector::from_dense(
            ArrayView1::from(&data),
            &[2, 2, 2],
            1e-14,
        )
        .unwrap();
        assert_eq!(v.ranks(), vec![1, 1, 1, 1]);
        assert_eq!(v.ortho_center(), Some(2));
    }

    #[test]
    fn from_dense_exact_small() {
        let mut rng = testing::rng(11);
        let data = testing::random_complex_vec(&mut rng, 8);
        let v = TTVector::from_dense(ArrayView1::from(&data), &[2, 2, 2], 0.0).unwrap();
        let ranks = v.ranks();
        assert!(ranks[1] <= 2 && ranks[2] <= 2);
        let d = v.to_dense().unwrap();
        let err = d
            .iter()
            .zip(data.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-14, "err = {err:e}");
    }

    #[test]
    fn from_dense_tolerance_roundtrip() {
        let mut rng = testing::rng(12);
        let data = testing::random_complex_vec(&mut rng, 256);
        let norm = data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v = TTVector::from_dense(ArrayView1::from(&data), &[4, 4, 4, 4], 1e-3).unwrap();
        let d = v.to_dense().unwrap();
        let err = d
            .iter()
            .zip(data.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-3 * norm, "err = {err:e}, norm = {norm:e}");
    }

    #[test]
    fn from_dense_size_overflow() {
        let dims = vec![2usize; 25];
        let data = vec![ZERO; 4];
        let res = TTVector::from_dense(ArrayView1::from(&data), &dims, 0.0);
        assert!(matches!(res, Err(Error::SizeOverflow { .. })));
    }

    #[test]
    fn orthogonalize_preserves_state_and_sets_forms() {
        let v = random_tt(21, &[3, 4, 2, 3], 3);
        let n2 = inner(&v, &v).unwrap().re;
        for center in [0usize, 2, 3] {
            let w = v.orthogonalize(center).unwrap();
            assert_eq!(w.ortho_center(), Some(center));
            assert!(w.canonical_defect().unwrap() < 1e-12);
            let olap = inner(&w, &v).unwrap();
            assert_abs_diff_eq!(olap.re, n2, epsilon = 1e-12 * n2.abs().max(1.0));
            assert_abs_diff_eq!(olap.im, 0.0, epsilon = 1e-12 * n2.abs().max(1.0));
            assert!(dense_err(&w, &v) < 1e-12 * n2.sqrt());
        }
    }

    #[test]
    fn orthogonalize_product_state_stays_rank_one() {
        let e = Array1::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0)]);
        let v = TTVector::from_product(&[e.clone(), e.clone(), e]).unwrap();
        for center in 0..3 {
            let w = v.orthogonalize(center).unwrap();
            assert_eq!(w.ranks(), vec![1, 1, 1, 1]);
        }
    }

    #[test]
    fn orthogonalize_idempotent_norm() {
        let v = random_tt(22, &[2, 3, 2], 2).orthogonalize(1).unwrap();
        let w = v.orthogonalize(1).unwrap();
        assert!(dense_err(&w, &v) < 1e-12 * v.norm());
    }

    #[test]
    fn inner_matches_dense() {
        let a = random_tt(31, &[2, 3, 4], 3);
        let b = random_tt(32, &[2, 3, 4], 2);
        let da = a.to_dense().unwrap();
        let db = b.to_dense().unwrap();
        let want: C64 = da.iter().zip(db.iter()).map(|(x, y)| x.conj() * y).sum();
        let got = inner(&a, &b).unwrap();
        assert!((want - got).norm() < 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn inner_self_nonnegative_and_orthogonal_products() {
        let a = random_tt(33, &[2, 2], 2);
        let s = inner(&a, &a).unwrap();
        assert!(s.re >= 0.0 && s.im.abs() < 1e-13 * s.re.max(1.0));

        let e1 = Array1::from_vec(vec![C64::new(1.0, 0.0), ZERO]);
        let e2 = Array1::from_vec(vec![ZERO, C64::new(1.0, 0.0)]);
        let p1 = TTVector::from_product(&[e1.clone(), e1]).unwrap();
        let p2 = TTVector::from_product(&[e2.clone(), e2]).unwrap();
        assert_eq!(inner(&p1, &p2).unwrap(), ZERO);
    }

    #[test]
    fn round_removes_zero_padding() {
        let v = random_tt(41, &[2, 3, 2], 2);
        let profile = max_rank_profile(&[2, 3, 2], Some(5));
        let padded = v.pad_ranks(&profile).unwrap();
        let rounded = padded.round(1e-14, None).unwrap();
        assert_eq!(rounded.ranks(), v.orthogonalize(0).unwrap().ranks());
        assert!(dense_err(&rounded, &v) < 1e-12 * v.norm());
    }

    #[test]
    fn round_rank_one_unchanged() {
        let e = Array1::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0)]);
        let v = TTVector::from_product(&[e.clone(), e]).unwrap();
        let r = v.round(0.5, None).unwrap();
        assert_eq!(r.ranks(), vec![1, 1, 1]);
        assert!(dense_err(&r, &v) < 1e-14);
    }

    #[test]
    fn round_error_equals_discarded_tail_two_sites() {
        // Single-bond truncation: the discarded singular values are the
        // Schmidt values of the dense matricization.
        let v = random_tt(42, &[6, 6], 6);
        let dense = v.to_dense().unwrap();
        let mat = dense.to_shape((6, 6)).unwrap().into_owned();
        let (_, s, _) = svd_thin(&mat).unwrap();
        let capped = v.round(0.0, Some(2)).unwrap();
        let err = dense_err(&capped, &v);
        let expect = s.iter().skip(2).map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(err, expect, epsilon = 1e-12 * expect.max(1.0));
        assert!(capped.ranks().iter().all(|&r| r <= 2));
    }

    #[test]
    fn round_never_increases_ranks() {
        let v = random_tt(43, &[3, 3, 3, 3], 3);
        let r = v.round(1e-2, None).unwrap();
        for (a, b) in r.ranks().iter().zip(v.ranks().iter()) {
            assert!(a <= b);
        }
    }

    #[test]
    fn apply_identity_mpo() {
        let v = random_tt(51, &[2, 3, 2], 2);
        let id = TTOperator::identity(&[2, 3, 2]);
        let w = id.apply(&v).unwrap().round(1e-14, None).unwrap();
        assert!(dense_err(&w, &v) < 1e-12 * v.norm());
    }

    #[test]
    fn apply_number_operator_on_fock_state() {
        // single site: b'b |2> = 2 |2>
        let p = 5usize;
        let mut nop = Array4::<C64>::from_elem((1, p, p, 1), ZERO);
        for i in 0..p {
            nop[[0, i, i, 0]] = C64::new(i as f64, 0.0);
        }
        let op = TTOperator::new(vec![nop]).unwrap();
        let mut f2 = Array1::from_vec(vec![ZERO; p]);
        f2[2] = C64::new(1.0, 0.0);
        let v = TTVector::from_product(&[f2]).unwrap();
        let w = op.apply(&v).unwrap();
        let d = w.to_dense().unwrap();
        assert_abs_diff_eq!(d[2].re, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            d.iter().map(|z| z.norm_sqr()).sum::<f64>(),
            4.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn apply_matches_dense_matvec() {
        let dims = [2usize, 3, 2];
        let v = random_tt(52, &dims, 2);
        let h = random_mpo(53, &dims, 3);
        let w = h.apply(&v).unwrap();
        let want = h.to_dense().unwrap().dot(&v.to_dense().unwrap());
        let got = w.to_dense().unwrap();
        let err = (&want - &got).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = want.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-12 * scale.max(1.0), "err = {err:e}");
        // rank bound R_k * r_k
        let vr = v.ranks();
        let hr = h.op_ranks();
        for (k, r) in w.ranks().iter().enumerate() {
            assert!(*r <= vr[k] * hr[k]);
        }
    }

    #[test]
    fn apply_distributes_over_addition() {
        let dims = [2usize, 2, 3];
        let a = random_tt(54, &dims, 2);
        let b = random_tt(55, &dims, 2);
        let h = random_mpo(56, &dims, 2);
        let lhs = h.apply(&a.add(&b).unwrap()).unwrap().to_dense().unwrap();
        let rhs = {
            let x = h.apply(&a).unwrap().to_dense().unwrap();
            let y = h.apply(&b).unwrap().to_dense().unwrap();
            &x + &y
        };
        let err = (&lhs - &rhs).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-12 * frob1(&rhs).max(1.0));
    }

    fn frob1(a: &Array1<C64>) -> f64 {
        a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn gauge_invariance_of_inner() {
        let a = random_tt(57, &[2, 3, 2, 2], 3);
        let b = random_tt(58, &[2, 3, 2, 2], 2);
        let base = inner(&a, &b).unwrap();
        for c in 0..4 {
            let ac = a.orthogonalize(c).unwrap();
            let got = inner(&ac, &b).unwrap();
            assert!((base - got).norm() <= 1e-12 * base.norm().max(1.0));
        }
    }

    #[test]
    fn pad_ranks_preserves_state() {
        let v = random_tt(59, &[2, 3, 2], 2);
        let profile = max_rank_profile(&[2, 3, 2], Some(6));
        let p = v.pad_ranks(&profile).unwrap();
        assert_eq!(p.ranks(), profile);
        assert!(dense_err(&p, &v) < 1e-14 * v.norm().max(1.0));
    }

    #[test]
    fn max_rank_profile_respects_bounds() {
        let dims = [2usize, 2, 6, 6, 6, 6];
        let prof = max_rank_profile(&dims, None);
        assert_eq!(prof, vec![1, 2, 4, 24, 36, 6, 1]);
        let capped = max_rank_profile(&dims, Some(8));
        assert_eq!(capped, vec![1, 2, 4, 8, 8, 6, 1]);
    }
}
