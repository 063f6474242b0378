//! Normalized state vectors in the computational basis.

use crate::error::Error;
use crate::num::{Complex, Float};
use crate::Result;

/// Modulus threshold for picking the gauge-reference amplitude.
pub fn gauge_threshold<T: Float>() -> T {
    T::of(1e-8)
}

/// Normalized complex amplitude vector of length `2^n`.
///
/// Stored gauge fixed: the first amplitude with modulus above `1e-8` is
/// real and positive, so numerical derivatives of eigenvectors along a
/// parameter sweep are well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Float> StateVector<T> {
    /// Normalizes and gauge-fixes `amps`. Fails on the zero vector.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        fix_gauge(amps)
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { amps })
    }

    /// `|+>^n`, the uniform superposition.
    pub fn plus_state(n: usize) -> Self {
        let dim = 1usize << n;
        let a = T::one() / T::of(dim as f64).sqrt();
        Self {
            amps: vec![Complex::new(a, T::zero()); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        inner(&self.amps, &other.amps)
    }

    /// Squared overlap `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    pub fn norm(&self) -> T {
        norm(&self.amps)
    }
}

pub fn inner<T: Float>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    assert_eq!(a.len(), b.len());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * *y;
    }
    acc
}

pub fn norm<T: Float>(a: &[Complex<T>]) -> T {
    a.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// Removes the global phase and normalizes: returns `v e^{-i phi} / |v|`
/// where `phi` is the phase of the first amplitude with modulus above the
/// gauge threshold. Idempotent; errors on the zero vector.
pub fn fix_gauge<T: Float>(mut amps: Vec<Complex<T>>) -> Result<StateVector<T>> {
    let nrm = norm(&amps);
    if nrm == T::zero() || !nrm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let thr = gauge_threshold::<T>();
    let reference = amps
        .iter()
        .find(|c| c.norm() > thr)
        .copied()
        // all amplitudes tiny: fall back to the largest one
        .unwrap_or_else(|| {
            amps.iter()
                .copied()
                .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                .unwrap()
        });
    let phase = reference / reference.norm();
    let scale = phase.conj().unscale(nrm);
    for c in amps.iter_mut() {
        *c *= scale;
    }
    Ok(StateVector { amps })
}
