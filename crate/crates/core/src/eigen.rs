//! Low-lying eigenpairs of sparse Hermitian operators.
//!
//! Two paths share the same symmetric-tridiagonal kernel (Sturm-sequence
//! bisection plus inverse iteration):
//!
//! - dense, for dimensions up to `2^10`: Householder tridiagonalization of
//!   the full matrix, then the tridiagonal kernel;
//! - iterative, above that: Lanczos with full reorthogonalization and
//!   sequential deflation, one eigenpair at a time.
//!
//! Hamiltonians of the Ising-plus-transverse-field form are real symmetric
//! in the computational basis; genuinely complex Hermitian inputs are
//! handled in the dense path through the standard embedding
//! `A + iB -> [[A, -B], [B, A]]`.

use crate::error::Error;
use crate::num::{Complex, Float};
use crate::sparse::SparseOperator;
use crate::state::{self, StateVector};
use crate::Result;

/// Dimension up to which the dense path is used.
pub const DENSE_DIM_LIMIT: usize = 1 << 10;

/// Default quasi-degeneracy threshold, GHz.
pub const DEFAULT_GAP_TOL: f64 = 1e-9;

const LANCZOS_MAX_ITER: usize = 800;

/// Lowest eigenpairs in ascending order, gauge fixed.
#[derive(Debug, Clone)]
pub struct EigenResult<T> {
    /// Ascending eigenvalues, GHz.
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<StateVector<T>>,
    /// `E1 - E0` (zero when the operator is one-dimensional).
    pub gap: T,
    /// True iff `gap < gap_tol`.
    pub degenerate: bool,
}

/// `k` lowest eigenpairs of a Hermitian operator.
pub fn ground_state<T: Float>(
    h: &SparseOperator<T>,
    k: usize,
    gap_tol: T,
) -> Result<EigenResult<T>> {
    ground_state_warm(h, k, gap_tol, None)
}

/// Like [`ground_state`], with an optional warm-start vector for the
/// iterative path (ignored by the dense path).
pub fn ground_state_warm<T: Float>(
    h: &SparseOperator<T>,
    k: usize,
    gap_tol: T,
    warm: Option<&StateVector<T>>,
) -> Result<EigenResult<T>> {
    let dim = h.dim();
    if k == 0 || k > dim {
        return Err(Error::TooManyEigenpairs { k, dim });
    }
    // one extra pair so the gap is always known
    let want = (k + 1).min(dim).max(2.min(dim));
    let (values, vectors) = if dim <= DENSE_DIM_LIMIT {
        dense_lowest(h, want)?
    } else {
        lanczos_lowest(h, want, warm)?
    };
    finish(h, values, vectors, k, gap_tol)
}

/// Dense-path eigenpairs, exposed for oracle tests.
pub fn dense_ground_state<T: Float>(
    h: &SparseOperator<T>,
    k: usize,
    gap_tol: T,
) -> Result<EigenResult<T>> {
    let dim = h.dim();
    if k == 0 || k > dim {
        return Err(Error::TooManyEigenpairs { k, dim });
    }
    let want = (k + 1).min(dim).max(2.min(dim));
    let (values, vectors) = dense_lowest(h, want)?;
    finish(h, values, vectors, k, gap_tol)
}

/// Iterative-path eigenpairs, exposed for oracle tests.
pub fn lanczos_ground_state<T: Float>(
    h: &SparseOperator<T>,
    k: usize,
    gap_tol: T,
    warm: Option<&StateVector<T>>,
) -> Result<EigenResult<T>> {
    let dim = h.dim();
    if k == 0 || k > dim {
        return Err(Error::TooManyEigenpairs { k, dim });
    }
    let want = (k + 1).min(dim).max(2.min(dim));
    let (values, vectors) = lanczos_lowest(h, want, warm)?;
    finish(h, values, vectors, k, gap_tol)
}

fn finish<T: Float>(
    h: &SparseOperator<T>,
    mut values: Vec<T>,
    mut vectors: Vec<Vec<Complex<T>>>,
    k: usize,
    gap_tol: T,
) -> Result<EigenResult<T>> {
    let scale = operator_scale(h).max(T::one());
    // Rayleigh-quotient polish and residual check.
    for (val, vec) in values.iter_mut().zip(vectors.iter_mut()) {
        let hv = h.apply_raw(vec);
        let rq = state::inner(vec, &hv).re;
        *val = rq;
        let mut res = T::zero();
        for (a, b) in hv.iter().zip(vec.iter()) {
            res += (*a - b.scale(rq)).norm_sqr();
        }
        let res = res.sqrt();
        if res > T::of(1e-8) * scale {
            return Err(Error::NoConvergence {
                iterations: LANCZOS_MAX_ITER,
                residual: res.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let gap = if values.len() >= 2 {
        values[1] - values[0]
    } else {
        T::zero()
    };
    let degenerate = values.len() >= 2 && gap < gap_tol;
    values.truncate(k);
    vectors.truncate(k);
    let eigenvectors = vectors
        .into_iter()
        .map(state::fix_gauge)
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenResult {
        eigenvalues: values,
        eigenvectors,
        gap,
        degenerate,
    })
}

/// Row-sum (Gershgorin) bound on the spectral radius.
pub fn operator_scale<T: Float>(h: &SparseOperator<T>) -> T {
    let mut worst = T::zero();
    for r in 0..h.dim() {
        let s: T = h.row(r).iter().map(|&(_, v)| v.norm()).sum();
        if s > worst {
            worst = s;
        }
    }
    worst
}

// ---------------------------------------------------------------------
// dense path
// ---------------------------------------------------------------------

fn dense_lowest<T: Float>(
    h: &SparseOperator<T>,
    k: usize,
) -> Result<(Vec<T>, Vec<Vec<Complex<T>>>)> {
    let dim = h.dim();
    let dense = h.to_dense();
    let mut max_im = T::zero();
    for c in &dense {
        if c.im.abs() > max_im {
            max_im = c.im.abs();
        }
    }
    let scale = operator_scale(h).max(T::one());
    if max_im <= T::epsilon() * scale * T::of(16.0) {
        // real symmetric
        let a: Vec<T> = dense.iter().map(|c| c.re).collect();
        let (vals, vecs) = real_sym_lowest(&a, dim, k)?;
        let cvecs = vecs
            .into_iter()
            .map(|v| v.into_iter().map(|x| Complex::new(x, T::zero())).collect())
            .collect();
        Ok((vals, cvecs))
    } else {
        // embed A + iB into the 2N real symmetric [[A, -B], [B, A]]
        let m = 2 * dim;
        let mut a = vec![T::zero(); m * m];
        for r in 0..dim {
            for c in 0..dim {
                let v = dense[r * dim + c];
                a[r * m + c] = v.re;
                a[(r + dim) * m + (c + dim)] = v.re;
                a[r * m + (c + dim)] = -v.im;
                a[(r + dim) * m + c] = v.im;
            }
        }
        // every complex eigenvalue appears twice in the embedding
        let (vals, vecs) = real_sym_lowest(&a, m, (2 * k).min(m))?;
        let mut out_vals = Vec::with_capacity(k);
        let mut out_vecs: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
        for (val, v) in vals.iter().zip(vecs.iter()) {
            let mut cv: Vec<Complex<T>> =
                (0..dim).map(|i| Complex::new(v[i], v[i + dim])).collect();
            // project out already accepted vectors; duplicates collapse
            for kept in &out_vecs {
                let ov = state::inner(kept, &cv);
                for (x, y) in cv.iter_mut().zip(kept.iter()) {
                    *x -= *y * ov;
                }
            }
            let nrm = state::norm(&cv);
            if nrm > T::half() {
                for x in cv.iter_mut() {
                    *x = x.unscale(nrm);
                }
                out_vals.push(*val);
                out_vecs.push(cv);
                if out_vals.len() == k {
                    break;
                }
            }
        }
        Ok((out_vals, out_vecs))
    }
}

/// `k` lowest eigenpairs of a real symmetric matrix (row-major, `dim x dim`).
fn real_sym_lowest<T: Float>(
    a: &[T],
    dim: usize,
    k: usize,
) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    if dim == 1 {
        return Ok((vec![a[0]], vec![vec![T::one()]]));
    }
    let (d, e, q) = householder_tridiagonalize(a, dim);
    let scale = tridiag_scale(&d, &e).max(T::one());
    let vals = tridiag_lowest_eigenvalues(&d, &e, k, scale);
    let tvecs = tridiag_eigenvectors(&d, &e, &vals, scale)?;
    // back-transform: v = Q x
    let mut vecs = Vec::with_capacity(k);
    for x in &tvecs {
        let mut v = vec![T::zero(); dim];
        for (r, vr) in v.iter_mut().enumerate() {
            let mut acc = T::zero();
            for c in 0..dim {
                acc += q[r * dim + c] * x[c];
            }
            *vr = acc;
        }
        vecs.push(v);
    }
    Ok((vals, vecs))
}

/// Householder similarity reduction `A = Q T Q^T`.
///
/// Returns the tridiagonal `(d, e)` (`e[i]` couples `i` and `i+1`) and the
/// accumulated orthogonal `Q` (row-major).
fn householder_tridiagonalize<T: Float>(a: &[T], dim: usize) -> (Vec<T>, Vec<T>, Vec<T>) {
    let mut m = a.to_vec();
    let mut q = vec![T::zero(); dim * dim];
    for i in 0..dim {
        q[i * dim + i] = T::one();
    }
    let at = |m: &[T], r: usize, c: usize| m[r * dim + c];
    for col in 0..dim.saturating_sub(2) {
        // Householder vector for the column below the diagonal
        let mlen = dim - col - 1;
        let mut x = vec![T::zero(); mlen];
        for (idx, xi) in x.iter_mut().enumerate() {
            *xi = at(&m, col + 1 + idx, col);
        }
        let xnorm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let alpha = if x[0] >= T::zero() { -xnorm } else { xnorm };
        x[0] -= alpha;
        let vnorm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if vnorm <= T::epsilon() * xnorm {
            continue;
        }
        for v in x.iter_mut() {
            *v /= vnorm;
        }
        // symmetric update of the trailing block: A <- A - v p^T - p v^T
        // with w = A v, tau = v.w, p = 2(w - tau v)
        let mut w = vec![T::zero(); mlen];
        for r in 0..mlen {
            let mut acc = T::zero();
            let base = (col + 1 + r) * dim + col + 1;
            for c in 0..mlen {
                acc += m[base + c] * x[c];
            }
            w[r] = acc;
        }
        let tau: T = x.iter().zip(&w).map(|(v, ww)| *v * *ww).sum();
        let p: Vec<T> = w
            .iter()
            .zip(&x)
            .map(|(ww, v)| (*ww - tau * *v) * T::two())
            .collect();
        for r in 0..mlen {
            let base = (col + 1 + r) * dim + col + 1;
            for c in 0..mlen {
                m[base + c] = m[base + c] - x[r] * p[c] - p[r] * x[c];
            }
        }
        // annihilated column
        m[(col + 1) * dim + col] = alpha;
        m[col * dim + col + 1] = alpha;
        for r in col + 2..dim {
            m[r * dim + col] = T::zero();
            m[col * dim + r] = T::zero();
        }
        // accumulate Q <- Q P (update columns col+1..)
        for r in 0..dim {
            let base = r * dim + col + 1;
            let mut dot = T::zero();
            for c in 0..mlen {
                dot += q[base + c] * x[c];
            }
            let dot2 = dot * T::two();
            for c in 0..mlen {
                q[base + c] = q[base + c] - dot2 * x[c];
            }
        }
    }
    let d: Vec<T> = (0..dim).map(|i| at(&m, i, i)).collect();
    let e: Vec<T> = (0..dim - 1).map(|i| at(&m, i, i + 1)).collect();
    (d, e, q)
}

fn tridiag_scale<T: Float>(d: &[T], e: &[T]) -> T {
    let mut s = T::zero();
    for (i, di) in d.iter().enumerate() {
        let mut row = di.abs();
        if i > 0 {
            row += e[i - 1].abs();
        }
        if i < e.len() {
            row += e[i].abs();
        }
        if row > s {
            s = row;
        }
    }
    s
}

/// Sturm-sequence count of eigenvalues strictly below `x`.
fn sturm_count<T: Float>(d: &[T], e: &[T], x: T, scale: T) -> usize {
    let tiny = T::epsilon() * scale * T::epsilon().max(T::of(1e-300));
    let floor = if tiny > T::zero() {
        tiny
    } else {
        T::min_positive_value()
    };
    let mut count = 0usize;
    let mut q = d[0] - x;
    if q < T::zero() {
        count += 1;
    }
    for i in 1..d.len() {
        if q.abs() < floor {
            q = if q < T::zero() { -floor } else { floor };
        }
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// `k` lowest eigenvalues of the tridiagonal, by bisection.
fn tridiag_lowest_eigenvalues<T: Float>(d: &[T], e: &[T], k: usize, scale: T) -> Vec<T> {
    let lo0 = -scale - T::one();
    let hi0 = scale + T::one();
    let mut out = Vec::with_capacity(k);
    for idx in 0..k.min(d.len()) {
        let mut lo = lo0;
        let mut hi = hi0;
        // ~100 halvings bottom out at machine precision
        for _ in 0..120 {
            let mid = (lo + hi) * T::half();
            if sturm_count(d, e, mid, scale) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= T::epsilon() * scale * T::two() {
                break;
            }
        }
        out.push((lo + hi) * T::half());
    }
    out
}

/// Eigenvectors of the tridiagonal by inverse iteration, with
/// orthogonalization inside eigenvalue clusters.
fn tridiag_eigenvectors<T: Float>(
    d: &[T],
    e: &[T],
    vals: &[T],
    scale: T,
) -> Result<Vec<Vec<T>>> {
    let n = d.len();
    let cluster_tol = T::epsilon() * scale * T::of(1e3);
    let mut rng = SplitMix64::new(0x5ee3_1d00_5eed_cafe);
    let mut out: Vec<Vec<T>> = Vec::with_capacity(vals.len());
    let mut cluster_start = 0usize;
    for (i, &lam) in vals.iter().enumerate() {
        if i > 0 && (lam - vals[i - 1]).abs() > cluster_tol {
            cluster_start = i;
        }
        // separate shifts of clustered eigenvalues
        let shift = lam
            + T::epsilon() * scale * T::of((i - cluster_start) as f64 + 1.0) * T::of(8.0);
        let mut x: Vec<T> = (0..n).map(|_| rng.next_uniform::<T>() - T::half()).collect();
        normalize_real(&mut x);
        let mut ok = false;
        for _ in 0..6 {
            for prev in &out[cluster_start..] {
                let dot: T = prev.iter().zip(&x).map(|(p, y)| *p * *y).sum();
                for (y, p) in x.iter_mut().zip(prev) {
                    *y -= dot * *p;
                }
            }
            let mut y = tridiag_solve_shifted(d, e, shift, &x);
            let growth = normalize_real(&mut y);
            x = y;
            if growth > T::one() / (T::epsilon() * T::of(n as f64) * T::of(100.0)) {
                ok = true;
                break;
            }
        }
        let _ = ok; // growth heuristic only; residual is checked downstream
        for prev in &out[cluster_start..] {
            let dot: T = prev.iter().zip(&x).map(|(p, y)| *p * *y).sum();
            for (y, p) in x.iter_mut().zip(prev) {
                *y -= dot * *p;
            }
        }
        normalize_real(&mut x);
        out.push(x);
    }
    Ok(out)
}

fn normalize_real<T: Float>(x: &mut [T]) -> T {
    let n = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if n > T::zero() {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
    n
}

/// Solves `(T - shift I) x = b` for tridiagonal `T` by LU with partial
/// pivoting (a second superdiagonal fills in under row swaps). Near-zero
/// pivots are floored so exact eigenvalue shifts stay solvable, which is
/// what inverse iteration relies on.
fn tridiag_solve_shifted<T: Float>(d: &[T], e: &[T], shift: T, b: &[T]) -> Vec<T> {
    let n = d.len();
    let tiny = T::epsilon() * tridiag_scale(d, e).max(T::one()) * T::epsilon();
    let floor = if tiny > T::zero() {
        tiny
    } else {
        T::min_positive_value()
    };
    let guard = |p: T| {
        if p.abs() < floor {
            if p < T::zero() {
                -floor
            } else {
                floor
            }
        } else {
            p
        }
    };
    let mut dd: Vec<T> = d.iter().map(|&x| x - shift).collect();
    if n == 1 {
        return vec![b[0] / guard(dd[0])];
    }
    let dl: Vec<T> = e.to_vec();
    let mut du: Vec<T> = e.to_vec();
    let mut du2 = vec![T::zero(); n.saturating_sub(2)];
    let mut mult = vec![T::zero(); n - 1];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if dd[i].abs() >= dl[i].abs() {
            let piv = guard(dd[i]);
            dd[i] = piv;
            let fact = dl[i] / piv;
            mult[i] = fact;
            dd[i + 1] = dd[i + 1] - fact * du[i];
        } else {
            swapped[i] = true;
            let fact = dd[i] / dl[i];
            mult[i] = fact;
            dd[i] = dl[i];
            let tmp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = tmp - fact * dd[i + 1];
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
        }
    }
    dd[n - 1] = guard(dd[n - 1]);
    let mut x = b.to_vec();
    for i in 0..n - 1 {
        if swapped[i] {
            x.swap(i, i + 1);
        }
        let xi = x[i];
        x[i + 1] = x[i + 1] - mult[i] * xi;
    }
    x[n - 1] = x[n - 1] / dd[n - 1];
    x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i];
    }
    x
}

// ---------------------------------------------------------------------
// iterative path
// ---------------------------------------------------------------------

/// `k` lowest eigenpairs via Lanczos with full reorthogonalization,
/// finding one pair at a time and deflating.
fn lanczos_lowest<T: Float>(
    h: &SparseOperator<T>,
    k: usize,
    warm: Option<&StateVector<T>>,
) -> Result<(Vec<T>, Vec<Vec<Complex<T>>>)> {
    let mut vals = Vec::with_capacity(k);
    let mut vecs: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
    let mut rng = SplitMix64::new(0x1a2c_05f1_7ab1_e551);
    for pair in 0..k {
        let start = if pair == 0 {
            warm.map(|s| s.amplitudes().to_vec())
        } else {
            None
        };
        let (val, vec) = lanczos_one(h, &vecs, start, &mut rng)?;
        vals.push(val);
        vecs.push(vec);
    }
    Ok((vals, vecs))
}

fn lanczos_one<T: Float>(
    h: &SparseOperator<T>,
    deflate: &[Vec<Complex<T>>],
    start: Option<Vec<Complex<T>>>,
    rng: &mut SplitMix64,
) -> Result<(T, Vec<Complex<T>>)> {
    let dim = h.dim();
    let scale = operator_scale(h).max(T::one());
    let tol = T::epsilon() * scale * T::of(64.0);
    let max_iter = LANCZOS_MAX_ITER.min(dim);

    let mut v = start.unwrap_or_else(|| random_complex(dim, rng));
    project_out(&mut v, deflate);
    if state::norm(&v) < T::of(1e-8) {
        v = random_complex(dim, rng);
        project_out(&mut v, deflate);
    }
    normalize_complex(&mut v);

    let mut basis: Vec<Vec<Complex<T>>> = vec![v];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut last_residual = T::infinity();

    for j in 0..max_iter {
        let vj = basis[j].clone();
        let mut w = h.apply_raw(&vj);
        if j > 0 {
            let beta = betas[j - 1];
            for (wi, pi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= pi.scale(beta);
            }
        }
        let alpha = state::inner(&vj, &w).re;
        for (wi, vi) in w.iter_mut().zip(&vj) {
            *wi -= vi.scale(alpha);
        }
        alphas.push(alpha);
        // full reorthogonalization (two passes) against basis and deflated
        for _ in 0..2 {
            project_out(&mut w, deflate);
            project_out(&mut w, &basis);
        }
        let beta = state::norm(&w);

        // convergence check on the lowest Ritz pair
        let m = alphas.len();
        let tscale = tridiag_scale(&alphas, &betas).max(T::one());
        let theta = tridiag_lowest_eigenvalues(&alphas, &betas, 1, tscale)[0];
        let svec = &tridiag_eigenvectors(&alphas, &betas, &[theta], tscale)?[0];
        let residual = beta * svec[m - 1].abs();
        last_residual = residual;
        if residual <= tol || beta <= tol || m == max_iter {
            if residual <= tol || beta <= tol {
                let mut ritz = vec![Complex::new(T::zero(), T::zero()); dim];
                for (c, bv) in svec.iter().zip(&basis) {
                    for (r, b) in ritz.iter_mut().zip(bv) {
                        *r += b.scale(*c);
                    }
                }
                project_out(&mut ritz, deflate);
                normalize_complex(&mut ritz);
                return Ok((theta, ritz));
            }
            break;
        }
        betas.push(beta);
        let next: Vec<Complex<T>> = w.iter().map(|c| c.unscale(beta)).collect();
        basis.push(next);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: last_residual.to_f64().unwrap_or(f64::NAN),
    })
}

fn project_out<T: Float>(v: &mut [Complex<T>], others: &[Vec<Complex<T>>]) {
    for o in others {
        let ov = state::inner(o, v);
        for (x, y) in v.iter_mut().zip(o) {
            *x -= *y * ov;
        }
    }
}

fn normalize_complex<T: Float>(v: &mut [Complex<T>]) {
    let n = state::norm(v);
    if n > T::zero() {
        for x in v.iter_mut() {
            *x = x.unscale(n);
        }
    }
}

fn random_complex<T: Float>(dim: usize, rng: &mut SplitMix64) -> Vec<Complex<T>> {
    (0..dim)
        .map(|_| {
            Complex::new(
                rng.next_uniform::<T>() - T::half(),
                rng.next_uniform::<T>() - T::half(),
            )
        })
        .collect()
}

/// Minimal deterministic RNG for start vectors; no external dependency.
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn next_uniform<T: Float>(&mut self) -> T {
        T::of((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }
}
