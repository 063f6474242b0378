//! Sparse Hermitian operators on the `2^n`-dimensional spin Hilbert space.

use crate::error::Error;
use crate::network::{ControlParams, SpinNetwork};
use crate::num::{Complex, Float};
use crate::state::StateVector;
use crate::Result;

/// Pauli axis tag for [`build_pauli_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(Error::InvalidAxis),
        }
    }
}

/// Default memory budget for operator construction (bytes).
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

/// Row-compressed sparse operator.
///
/// Each row holds `(column, value)` entries sorted by column. Diagonal
/// contributions are accumulated into a single entry per row, so the
/// Ising-network Hamiltonian has at most `n + 1` entries per row.
#[derive(Debug, Clone)]
pub struct SparseOperator<T> {
    dim: usize,
    rows: Vec<Vec<(usize, Complex<T>)>>,
}

impl<T: Float> SparseOperator<T> {
    /// Empty (zero) operator of the given dimension.
    pub fn zero(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension must be a power of two");
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim);
        for (r, row) in op.rows.iter_mut().enumerate() {
            row.push((r, Complex::new(T::one(), T::zero())));
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Adds `v` at `(r, c)`, merging with an existing entry if present.
    pub fn add_entry(&mut self, r: usize, c: usize, v: Complex<T>) {
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(k) => row[k].1 += v,
            Err(k) => row.insert(k, (c, v)),
        }
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex<T>)] {
        &self.rows[r]
    }

    /// Entry at `(r, c)`, zero if absent.
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        match self.rows[r].binary_search_by_key(&c, |&(col, _)| col) {
            Ok(k) => self.rows[r][k].1,
            Err(_) => Complex::new(T::zero(), T::zero()),
        }
    }

    /// Sparse matrix-vector product. Fixed summation order within a row.
    pub fn apply(&self, v: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        Ok(self.apply_raw(v.amplitudes()))
    }

    /// Matvec on a raw amplitude slice (no normalization assumptions).
    pub fn apply_raw(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim];
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(c, val) in row {
                acc += val * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Complex<T>> {
        let mut m = vec![Complex::new(T::zero(), T::zero()); self.dim * self.dim];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[r * self.dim + c] = v;
            }
        }
        m
    }

    /// Largest deviation `|A[r][c] - conj(A[c][r])|` over stored entries.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                let d = (v - self.get(c, r).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// `a*self + b*other`, entrywise.
    pub fn linear_combination(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for row in out.rows.iter_mut() {
            for entry in row.iter_mut() {
                entry.1 = entry.1.scale(a);
            }
        }
        for (r, row) in other.rows.iter().enumerate() {
            for &(c, v) in row {
                out.add_entry(r, c, v.scale(b));
            }
        }
        Ok(out)
    }
}

/// Bytes needed to hold the network Hamiltonian for `n` sites.
pub fn required_bytes<T>(n: usize) -> u64 {
    let entry = std::mem::size_of::<(usize, Complex<T>)>() as u64;
    // (n+1) entries per row plus the row headers.
    (1u64 << n) * ((n as u64 + 1) * entry + std::mem::size_of::<Vec<u8>>() as u64)
}

fn check_budget<T>(n: usize, budget: u64) -> Result<()> {
    let required = required_bytes::<T>(n);
    if required > budget {
        return Err(Error::MemoryBudget {
            sites: n,
            required,
            budget,
        });
    }
    Ok(())
}

/// Builds the network Hamiltonian
/// `H = sum_i -(eps_i sz_i + delta_i sx_i) + sum_{(i,j)} J_ij sz_i sz_j`.
///
/// Diagonal terms (`sz`, `sz sz`) collapse into one entry per row, so the
/// result has at most `(n+1) * 2^n` nonzeros.
pub fn build_hamiltonian<T: Float>(
    network: &SpinNetwork,
    params: &ControlParams<T>,
) -> Result<SparseOperator<T>> {
    build_hamiltonian_budgeted(network, params, DEFAULT_MEMORY_BUDGET)
}

pub fn build_hamiltonian_budgeted<T: Float>(
    network: &SpinNetwork,
    params: &ControlParams<T>,
    budget: u64,
) -> Result<SparseOperator<T>> {
    params.validate(network)?;
    check_budget::<T>(network.n(), budget)?;
    let n = network.n();
    let dim = network.dim();
    let mut op = SparseOperator::zero(dim);
    for b in 0..dim {
        // Diagonal: -sum_i eps_i z_i + sum_e J_e z_i z_j, with z = +1 for
        // spin-up (bit 0) and -1 for spin-down (bit 1).
        let mut diag = T::zero();
        for i in 0..n {
            let z = sign_z::<T>(b, i);
            diag -= params.epsilon[i] * z;
        }
        for (e, &(i, j)) in network.edges().iter().enumerate() {
            diag += params.j[e] * sign_z::<T>(b, i) * sign_z::<T>(b, j);
        }
        if diag != T::zero() {
            op.add_entry(b, b, Complex::new(diag, T::zero()));
        }
        // Off-diagonal: -delta_i sx_i flips bit i.
        for i in 0..n {
            let d = params.delta[i];
            if d != T::zero() {
                op.add_entry(b, b ^ (1 << i), Complex::new(-d, T::zero()));
            }
        }
    }
    Ok(op)
}

/// Weighted single-axis Pauli sum `sum_i w_i sigma_i^axis`.
pub fn build_pauli_sum<T: Float>(
    network: &SpinNetwork,
    axis: Axis,
    weights: &[T],
) -> Result<SparseOperator<T>> {
    if weights.len() != network.n() {
        return Err(Error::DimensionMismatch {
            expected: network.n(),
            got: weights.len(),
        });
    }
    let n = network.n();
    let dim = network.dim();
    let mut op = SparseOperator::zero(dim);
    for b in 0..dim {
        match axis {
            Axis::Z => {
                let mut diag = T::zero();
                for i in 0..n {
                    diag += weights[i] * sign_z::<T>(b, i);
                }
                if diag != T::zero() {
                    op.add_entry(b, b, Complex::new(diag, T::zero()));
                }
            }
            Axis::X => {
                for i in 0..n {
                    if weights[i] != T::zero() {
                        op.add_entry(b, b ^ (1 << i), Complex::new(weights[i], T::zero()));
                    }
                }
            }
            Axis::Y => {
                // <b^i|sy_i|b> = i for b_i = 0 (up -> down), -i for b_i = 1.
                for i in 0..n {
                    if weights[i] != T::zero() {
                        let up = (b >> i) & 1 == 0;
                        let im = if up { weights[i] } else { -weights[i] };
                        op.add_entry(b ^ (1 << i), b, Complex::new(T::zero(), im));
                    }
                }
            }
        }
    }
    Ok(op)
}

/// sigma^z eigenvalue of basis state `b` at site `i`: +1 up, -1 down.
#[inline]
pub fn sign_z<T: Float>(b: usize, i: usize) -> T {
    if (b >> i) & 1 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    type C = Complex<f64>;

    #[test]
    fn single_site_transverse_field() {
        // n=1, eps=0, delta=5 -> [[0, -5], [-5, 0]]
        let net = SpinNetwork::custom(1, &[]).unwrap();
        let params = ControlParams::uniform(&net, 0.0, 5.0, 0.0);
        let h = build_hamiltonian(&net, &params).unwrap();
        assert_eq!(h.get(0, 0), C::new(0.0, 0.0));
        assert_eq!(h.get(0, 1), C::new(-5.0, 0.0));
        assert_eq!(h.get(1, 0), C::new(-5.0, 0.0));
        assert_eq!(h.get(1, 1), C::new(0.0, 0.0));
    }

    #[test]
    fn frustrated_triangle_diagonal() {
        // Brute-force oracle: enumerate all 8 spin configurations of
        // sum_{(i,j)} z_i z_j on the triangle.
        let net = SpinNetwork::triangle();
        let params = ControlParams::uniform(&net, 0.0, 0.0, 1.0);
        let h = build_hamiltonian(&net, &params).unwrap();
        for b in 0..8usize {
            let mut expected = 0.0;
            for &(i, j) in net.edges() {
                expected += sign_z::<f64>(b, i) * sign_z::<f64>(b, j);
            }
            assert_eq!(h.get(b, b).re, expected);
            // aligned configurations sit at +3, the frustrated six at -1
            let aligned = b == 0 || b == 7;
            assert_eq!(expected, if aligned { 3.0 } else { -1.0 });
        }
        // diagonal collapses to one entry per row
        assert_eq!(h.nnz(), 8);
    }

    #[test]
    fn chain_n3_equals_triangle() {
        let tri = SpinNetwork::triangle();
        let chain = SpinNetwork::nn_nnn_chain(3).unwrap();
        let p = |net: &SpinNetwork| ControlParams::uniform(net, 0.0, 2.5, 1.5);
        let a = build_hamiltonian(&tri, &p(&tri)).unwrap();
        let b = build_hamiltonian(&chain, &p(&chain)).unwrap();
        assert_eq!(a.to_dense(), b.to_dense());
    }

    #[test]
    fn pauli_z_sum_is_moment_operator() {
        let net = SpinNetwork::custom(2, &[]).unwrap();
        let mz = build_pauli_sum(&net, Axis::Z, &[1.0, 1.0]).unwrap();
        let diag: Vec<f64> = (0..4).map(|b| mz.get(b, b).re).collect();
        // basis order |uu>, |du>, |ud>, |dd> by our bit convention; the
        // spectrum is {2, 0, 0, -2}
        assert_eq!(diag, vec![2.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn pauli_y_single_site() {
        let net = SpinNetwork::custom(1, &[]).unwrap();
        let sy = build_pauli_sum(&net, Axis::Y, &[1.0]).unwrap();
        // [[0, -i], [i, 0]]
        assert_eq!(sy.get(0, 1), C::new(0.0, -1.0));
        assert_eq!(sy.get(1, 0), C::new(0.0, 1.0));
        assert_eq!(sy.get(0, 0), C::new(0.0, 0.0));
        assert!(sy.hermiticity_defect() == 0.0);
    }

    #[test]
    fn pauli_x_on_plus_state() {
        let net = SpinNetwork::triangle();
        let sx = build_pauli_sum(&net, Axis::X, &[1.0; 3]).unwrap();
        let plus = StateVector::<f64>::plus_state(3);
        let out = sx.apply(&plus).unwrap();
        for (o, p) in out.iter().zip(plus.amplitudes()) {
            assert!((*o - p.scale(3.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_identity_and_zero() {
        let v = StateVector::<f64>::from_amplitudes(vec![
            C::new(0.6, 0.0),
            C::new(0.0, 0.8),
        ])
        .unwrap();
        let id = SparseOperator::identity(2);
        assert_eq!(id.apply(&v).unwrap(), v.amplitudes().to_vec());
        let z = SparseOperator::zero(2);
        assert!(z.apply(&v).unwrap().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn apply_diagonal_triangle() {
        let net = SpinNetwork::triangle();
        let params = ControlParams::uniform(&net, 0.0, 0.0, 1.0);
        let h = build_hamiltonian(&net, &params).unwrap();
        let up3 = StateVector::<f64>::basis_state(8, 0).unwrap();
        let out = h.apply(&up3).unwrap();
        assert_eq!(out[0], C::new(3.0, 0.0));
        assert!(out[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn budget_rejection_reports_bytes() {
        let net = SpinNetwork::nn_nnn_chain(20).unwrap();
        let params = ControlParams::uniform(&net, 0.0, 1.0, 1.0);
        match build_hamiltonian_budgeted(&net, &params, 1024) {
            Err(Error::MemoryBudget { required, budget, .. }) => {
                assert!(required > budget);
            }
            other => panic!("expected budget rejection, got {other:?}"),
        }
    }

    #[test]
    fn params_size_mismatch_rejected() {
        let net = SpinNetwork::triangle();
        let mut params = ControlParams::uniform(&net, 0.0, 1.0, 1.0);
        params.delta.pop();
        assert!(build_hamiltonian(&net, &params).is_err());
    }
}
