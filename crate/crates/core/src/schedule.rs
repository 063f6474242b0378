//! Adiabatic control schedule for the paramagnetic-to-frustrated sweep.

use crate::error::Error;
use crate::num::Float;
use crate::Result;

/// Linear ramp with additive floors:
///
/// ```text
/// delta(t) = delta_max * (1 - s) + delta_floor
/// j(t)     = j_max * s + j_floor          with s = t / t_final
/// ```
///
/// With the default parameters the endpoint coupling ratios are
/// `J/delta = 1e-6` at `t = 0` and `1e6` at `t = t_final`. The floors keep
/// both parameters strictly positive so the tracked ground state stays
/// unique along the whole sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSchedule<T> {
    /// Sweep duration, ns.
    pub t_final: T,
    /// Tunneling at the start of the ramp, GHz.
    pub delta_max: T,
    /// Coupling at the end of the ramp, GHz.
    pub j_max: T,
    /// Additive tunneling floor, GHz.
    pub delta_floor: T,
    /// Additive coupling floor, GHz.
    pub j_floor: T,
}

impl<T: Float> ControlSchedule<T> {
    /// The quoted experiment: 50 ns, delta 5 -> 0 GHz, J 0 -> 5 GHz,
    /// floors of 5e-6 GHz realizing the 1e-/+6 endpoint ratios.
    pub fn experiment_defaults() -> Self {
        Self {
            t_final: T::of(50.0),
            delta_max: T::of(5.0),
            j_max: T::of(5.0),
            delta_floor: T::of(5e-6),
            j_floor: T::of(5e-6),
        }
    }

    /// `(delta, j)` at time `t` in ns.
    pub fn at(&self, t: T) -> Result<(T, T)> {
        if t < T::zero() || t > self.t_final || !t.is_finite() {
            return Err(Error::TimeOutOfRange {
                t: t.to_f64().unwrap_or(f64::NAN),
                t_final: self.t_final.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.at_fraction(t / self.t_final))
    }

    /// `(delta, j)` at sweep fraction `s` in `[0, 1]` (unchecked clamp-free).
    pub fn at_fraction(&self, s: T) -> (T, T) {
        let delta = self.delta_max * (T::one() - s) + self.delta_floor;
        let j = self.j_max * s + self.j_floor;
        (delta, j)
    }

    /// Endpoint ratios `(J/delta at 0, J/delta at t_final)`.
    pub fn endpoint_ratios(&self) -> (T, T) {
        let (d0, j0) = self.at_fraction(T::zero());
        let (d1, j1) = self.at_fraction(T::one());
        (j0 / d0, j1 / d1)
    }
}

/// Convenience alias for [`ControlSchedule::at`].
pub fn schedule_at<T: Float>(sched: &ControlSchedule<T>, t: T) -> Result<(T, T)> {
    sched.at(t)
}
