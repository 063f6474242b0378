//! Measurement-side quantities: net-moment distributions and the
//! symmetric three-site entanglement witness.

use crate::error::Error;
use crate::network::SpinNetwork;
use crate::num::{Complex, Float};
use crate::sparse::{build_pauli_sum, Axis, SparseOperator};
use crate::state::StateVector;
use crate::Result;

/// Probability distribution of the net magnetic moment
/// `mu = n - 2 * popcount(b)` of an `n`-site register.
///
/// The support is the `n + 1` moments `-n, -n+2, ..., n` in ascending
/// order; `probabilities()[k]` belongs to moment `-n + 2k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentHistogram<T> {
    n: usize,
    probs: Vec<T>,
}

impl<T: Float> MomentHistogram<T> {
    /// Wraps an explicit distribution; must have `n + 1` entries summing
    /// to one within 1e-8.
    pub fn from_probabilities(n: usize, probs: Vec<T>) -> Result<Self> {
        if probs.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: probs.len(),
            });
        }
        let total: T = probs.iter().copied().sum();
        let defect = (total - T::one()).abs();
        if defect > T::of(1e-8) {
            return Err(Error::NotNormalized(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ascending support `-n, -n+2, ..., n`.
    pub fn support(&self) -> Vec<i64> {
        (0..=self.n).map(|k| 2 * k as i64 - self.n as i64).collect()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    pub fn prob_of_moment(&self, moment: i64) -> Option<T> {
        let n = self.n as i64;
        if moment < -n || moment > n || (moment + n) % 2 != 0 {
            return None;
        }
        Some(self.probs[((moment + n) / 2) as usize])
    }

    /// Mean absolute moment `E|mu|`.
    pub fn mean_abs_moment(&self) -> T {
        self.support()
            .iter()
            .zip(&self.probs)
            .map(|(&m, &p)| T::of(m.unsigned_abs() as f64) * p)
            .sum()
    }
}

/// `|amp_b|^2` over the computational basis.
pub fn computational_basis_probabilities<T: Float>(state: &StateVector<T>) -> Vec<T> {
    state.amplitudes().iter().map(|c| c.norm_sqr()).collect()
}

/// Marginalizes the basis distribution of `state` onto the net moment.
pub fn moment_distribution<T: Float>(state: &StateVector<T>) -> Result<MomentHistogram<T>> {
    let dim = state.dim();
    if !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two(),
            got: dim,
        });
    }
    let n = dim.trailing_zeros() as usize;
    let mut probs = vec![T::zero(); n + 1];
    for (b, amp) in state.amplitudes().iter().enumerate() {
        // moment n - 2*popcount maps to ascending index n - popcount
        probs[n - b.count_ones() as usize] += amp.norm_sqr();
    }
    Ok(MomentHistogram { n, probs })
}

/// Exact binomial moment distribution of the paramagnetic product state
/// `|+>^n`: `P(mu = n - 2k) = C(n, k) / 2^n`.
pub fn paramagnetic_reference<T: Float>(n: usize) -> MomentHistogram<T> {
    assert!(n <= 120, "binomial table overflows u128 beyond n = 120");
    let denom = T::of(2.0).powi(n as i32);
    let probs = (0..=n)
        .map(|idx| {
            // ascending index idx corresponds to k = n - idx down spins
            T::of(binomial_u128(n, n - idx) as f64) / denom
        })
        .collect();
    MomentHistogram { n, probs }
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Witness value on one three-site block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessValue<T> {
    pub sites: (usize, usize, usize),
    pub value: T,
}

/// The symmetric three-site witness
/// `W = (4 + sqrt 5) I - (Sx^2 + Sy^2) / 2` with `Sa = sum_i sigma_a_i`.
///
/// `<W> >= 0` on every three-qubit product state (and its symmetric
/// extensions); negativity certifies W-class entanglement. The spectral
/// floor is `sqrt 5 - 3`.
pub fn witness_matrix<T: Float>() -> SparseOperator<T> {
    let net = SpinNetwork::custom(3, &[]).expect("static three-site network");
    let ones = vec![T::one(); 3];
    let sx = build_pauli_sum(&net, Axis::X, &ones).expect("static operator");
    let sy = build_pauli_sum(&net, Axis::Y, &ones).expect("static operator");
    let shift = T::of(4.0) + T::of(5.0).sqrt();
    let half = T::half();
    let mut w = SparseOperator::zero(8);
    for col in 0..8 {
        let e: Vec<Complex<T>> = (0..8)
            .map(|r| {
                if r == col {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        let sx2 = sx.apply_raw(&sx.apply_raw(&e));
        let sy2 = sy.apply_raw(&sy.apply_raw(&e));
        for r in 0..8 {
            let mut v = (sx2[r] + sy2[r]).scale(-half);
            if r == col {
                v += Complex::new(shift, T::zero());
            }
            if v.norm_sqr() > T::zero() {
                w.add_entry(r, col, v);
            }
        }
    }
    w
}

/// `<psi|W|psi>` for a pure three-qubit state.
pub fn witness_expectation_pure<T: Float>(state: &StateVector<T>) -> Result<T> {
    if state.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            got: state.dim(),
        });
    }
    let w = witness_matrix::<T>();
    let wpsi = w.apply(state)?;
    Ok(crate::state::inner(state.amplitudes(), &wpsi).re)
}

/// `tr(rho W)` for a row-major 8x8 density operator.
///
/// `rho` must have unit trace within 1e-8.
pub fn witness_expectation_density<T: Float>(rho: &[Complex<T>]) -> Result<T> {
    if rho.len() != 64 {
        return Err(Error::DimensionMismatch {
            expected: 64,
            got: rho.len(),
        });
    }
    let trace: Complex<T> = (0..8).map(|i| rho[i * 8 + i]).sum();
    let defect = (trace - Complex::new(T::one(), T::zero())).norm();
    if defect > T::of(1e-8) {
        return Err(Error::TraceNotUnit {
            trace: trace.re.to_f64().unwrap_or(f64::NAN),
        });
    }
    let w = witness_matrix::<T>();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..8 {
        for &(j, wij) in w.row(i) {
            // tr(rho W) = sum_ij rho_ji W_ij
            acc += rho[j * 8 + i] * wij;
        }
    }
    Ok(acc.re)
}

/// Reduced density operator of `state` on the given sites (ascending,
/// distinct), row major, with block bit `j` carrying site `sites[j]`.
pub fn reduce_to_block<T: Float>(
    state: &StateVector<T>,
    sites: &[usize],
) -> Result<Vec<Complex<T>>> {
    let dim = state.dim();
    let n = dim.trailing_zeros() as usize;
    if !dim.is_power_of_two() {
        return Err(Error::InvalidBlock("state dimension is not 2^n".into()));
    }
    if sites.is_empty() || sites.len() > n {
        return Err(Error::InvalidBlock(format!(
            "block of {} sites out of {n}",
            sites.len()
        )));
    }
    for w in sites.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidBlock(
                "sites must be ascending and distinct".into(),
            ));
        }
    }
    if *sites.last().unwrap() >= n {
        return Err(Error::InvalidBlock(format!(
            "site {} out of range for {n} sites",
            sites.last().unwrap()
        )));
    }
    let k = sites.len();
    let dk = 1usize << k;
    let env_sites: Vec<usize> = (0..n).filter(|i| !sites.contains(i)).collect();
    let de = 1usize << env_sites.len();
    let embed = |block: usize, env: usize| -> usize {
        let mut b = 0usize;
        for (j, &s) in sites.iter().enumerate() {
            b |= ((block >> j) & 1) << s;
        }
        for (j, &s) in env_sites.iter().enumerate() {
            b |= ((env >> j) & 1) << s;
        }
        b
    };
    let amps = state.amplitudes();
    let mut rho = vec![Complex::new(T::zero(), T::zero()); dk * dk];
    for env in 0..de {
        let idx: Vec<usize> = (0..dk).map(|a| embed(a, env)).collect();
        for a in 0..dk {
            for b in 0..dk {
                rho[a * dk + b] += amps[idx[a]] * amps[idx[b]].conj();
            }
        }
    }
    Ok(rho)
}

/// Witness on one three-site block of a larger register: reduces and
/// evaluates `tr(rho W)`.
pub fn block_witness<T: Float>(
    state: &StateVector<T>,
    sites: (usize, usize, usize),
) -> Result<WitnessValue<T>> {
    let rho = reduce_to_block(state, &[sites.0, sites.1, sites.2])?;
    let value = witness_expectation_density(&rho)?;
    Ok(WitnessValue { sites, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::dense_ground_state;

    type C = Complex<f64>;

    #[test]
    fn paramagnetic_reference_n3() {
        let h = paramagnetic_reference::<f64>(3);
        assert_eq!(h.support(), vec![-3, -1, 1, 3]);
        let expect = [0.125, 0.375, 0.375, 0.125];
        for (p, e) in h.probabilities().iter().zip(expect) {
            assert!((p - e).abs() < 1e-16);
        }
    }

    #[test]
    fn plus_state_moments_are_binomial() {
        for n in 1..=8 {
            let h = moment_distribution(&StateVector::<f64>::plus_state(n)).unwrap();
            let b = paramagnetic_reference::<f64>(n);
            for (p, q) in h.probabilities().iter().zip(b.probabilities()) {
                assert!((p - q).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn aligned_state_moment_is_extremal() {
        // |000...0> is all spins up: moment +n with certainty
        let up = StateVector::<f64>::basis_state(16, 0).unwrap();
        let h = moment_distribution(&up).unwrap();
        assert_eq!(h.prob_of_moment(4), Some(1.0));
        assert_eq!(h.prob_of_moment(2), Some(0.0));
        assert_eq!(h.prob_of_moment(3), None);
        // |1111> is all spins down
        let down = StateVector::<f64>::basis_state(16, 15).unwrap();
        let h = moment_distribution(&down).unwrap();
        assert_eq!(h.prob_of_moment(-4), Some(1.0));
    }

    #[test]
    fn mean_abs_moment_matches_binomial() {
        // n = 3: E|mu| = 3 * 1/4 * 2 + 1 * 3/4 * ... = (3+3*3)/... compute directly
        let h = paramagnetic_reference::<f64>(3);
        // 2 * (3 * 1/8 + 1 * 3/8) = 1.5
        assert!((h.mean_abs_moment() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn witness_matrix_is_hermitian_with_known_floor() {
        let w = witness_matrix::<f64>();
        assert!(w.hermiticity_defect() < 1e-13);
        let r = dense_ground_state(&w, 1, 1e-9).unwrap();
        let floor = 5.0_f64.sqrt() - 3.0;
        assert!((r.eigenvalues[0] - floor).abs() < 1e-12);
    }

    #[test]
    fn witness_on_product_and_frustrated_states() {
        let plus = StateVector::<f64>::plus_state(3);
        let w_plus = witness_expectation_pure(&plus).unwrap();
        assert!((w_plus - (5.0_f64.sqrt() - 2.0)).abs() < 1e-12);
        // equal-weight superposition of the six one- and two-down states
        let s = 1.0 / 6.0_f64.sqrt();
        let mut amps = vec![C::new(0.0, 0.0); 8];
        for b in 1..7 {
            amps[b] = C::new(s, 0.0);
        }
        let frustrated = StateVector::from_amplitudes(amps).unwrap();
        let w_f = witness_expectation_pure(&frustrated).unwrap();
        assert!((w_f - (5.0_f64.sqrt() - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn density_path_matches_pure_path() {
        let s = 1.0 / 6.0_f64.sqrt();
        let mut amps = vec![C::new(0.0, 0.0); 8];
        for b in 1..7 {
            amps[b] = C::new(s, 0.0);
        }
        let psi = StateVector::from_amplitudes(amps).unwrap();
        let rho = reduce_to_block(&psi, &[0, 1, 2]).unwrap();
        let via_rho = witness_expectation_density(&rho).unwrap();
        let via_psi = witness_expectation_pure(&psi).unwrap();
        assert!((via_rho - via_psi).abs() < 1e-13);
    }

    #[test]
    fn block_reduction_of_product_state_is_pure() {
        let psi = StateVector::<f64>::plus_state(5);
        let rho = reduce_to_block(&psi, &[1, 2, 4]).unwrap();
        // rho^2 = rho for a pure reduction
        let mut rho2 = vec![C::new(0.0, 0.0); 64];
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    rho2[i * 8 + j] += rho[i * 8 + k] * rho[k * 8 + j];
                }
            }
        }
        for (a, b) in rho2.iter().zip(&rho) {
            assert!((*a - *b).norm() < 1e-13);
        }
        let w = block_witness(&psi, (1, 2, 4)).unwrap();
        assert!((w.value - (5.0_f64.sqrt() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn trace_check_rejects_unnormalized_density() {
        let mut rho = vec![C::new(0.0, 0.0); 64];
        rho[0] = C::new(0.5, 0.0); // trace 1/2
        match witness_expectation_density(&rho) {
            Err(crate::error::Error::TraceNotUnit { .. }) => {}
            other => panic!("expected trace error, got {other:?}"),
        }
    }

    #[test]
    fn block_validation() {
        let psi = StateVector::<f64>::plus_state(4);
        assert!(reduce_to_block(&psi, &[2, 1]).is_err());
        assert!(reduce_to_block(&psi, &[1, 1, 2]).is_err());
        assert!(reduce_to_block(&psi, &[0, 1, 4]).is_err());
    }
}
