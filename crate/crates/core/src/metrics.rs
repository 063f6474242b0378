//! Transition diagnostics: fidelity susceptibility, Kullback-Leibler
//! divergence, exponential moment fits, and the macroscopic sign measure.

use crate::dynamics::{self, track_ground_state};
use crate::eigen::{self, ground_state_warm};
use crate::error::Error;
use crate::network::SpinNetwork;
use crate::num::Float;
use crate::observables::{moment_distribution, paramagnetic_reference, MomentHistogram};
use crate::schedule::ControlSchedule;
use crate::state::StateVector;
use crate::Result;

/// Additive smoothing applied to both arguments of the KL divergence.
pub const KL_SMOOTHING: f64 = 1e-12;

/// Smallest parameter offset accepted by the finite-difference estimators.
pub const MIN_DELTA: f64 = 1e-7;

/// Overlap-form fidelity susceptibility of a one-parameter state family,
///
/// ```text
/// chi(s) = -[ ln|<psi(s)|psi(s+d)>| + ln|<psi(s)|psi(s-d)>| ] / d^2
/// ```
///
/// exact to `O(d^2)`. The family closure must return gauge-consistent
/// normalized states (the estimator only uses overlap moduli, so any
/// smooth gauge works here).
pub fn chi_overlap_from<T, F>(family: &F, s: T, delta: T) -> Result<T>
where
    T: Float,
    F: Fn(T) -> Result<StateVector<T>>,
{
    check_stencil(s, delta)?;
    let center = family(s)?;
    let fwd = family(s + delta)?;
    let bwd = family(s - delta)?;
    let lf = center.inner(&fwd).norm().ln();
    let lb = center.inner(&bwd).norm().ln();
    Ok(-(lf + lb) / (delta * delta))
}

/// Derivative-form fidelity susceptibility
/// `chi = <dpsi|dpsi> - |<psi|dpsi>|^2` with `|dpsi>` the central
/// difference `(|psi(s+d)> - |psi(s-d)>) / 2d`.
///
/// Unlike the overlap form this is gauge sensitive; the fixed gauge of
/// [`StateVector`] makes the difference well defined.
pub fn chi_derivative_from<T, F>(family: &F, s: T, delta: T) -> Result<T>
where
    T: Float,
    F: Fn(T) -> Result<StateVector<T>>,
{
    check_stencil(s, delta)?;
    let center = family(s)?;
    let fwd = family(s + delta)?;
    let bwd = family(s - delta)?;
    let inv = (T::two() * delta).recip();
    let dpsi: Vec<_> = fwd
        .amplitudes()
        .iter()
        .zip(bwd.amplitudes())
        .map(|(f, b)| (*f - *b).scale(inv))
        .collect();
    let dd = dpsi.iter().map(|c| c.norm_sqr()).sum::<T>();
    let pd = crate::state::inner(center.amplitudes(), &dpsi).norm_sqr();
    Ok(dd - pd)
}

fn check_stencil<T: Float>(_s: T, delta: T) -> Result<()> {
    if delta < T::of(MIN_DELTA) {
        return Err(Error::PrecisionLoss {
            delta_s: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn check_sweep_range<T: Float>(s: T, delta: T) -> Result<()> {
    if s - delta < T::zero() || s + delta > T::one() {
        return Err(Error::SweepOutOfRange {
            s: s.to_f64().unwrap_or(f64::NAN),
            delta_s: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Richardson extrapolation `(4 f(d/2) - f(d)) / 3` cancelling the leading
/// `O(d^2)` stencil error of either chi estimator.
pub fn richardson<T: Float>(f: impl Fn(T) -> Result<T>, delta: T) -> Result<T> {
    let coarse = f(delta)?;
    let fine = f(delta * T::half())?;
    Ok((T::of(4.0) * fine - coarse) / T::of(3.0))
}

/// Instantaneous-ground-state family of a network under the schedule,
/// parameterized by sweep fraction.
pub fn ground_state_family<'a, T: Float>(
    network: &'a SpinNetwork,
    sched: &'a ControlSchedule<T>,
    gap_tol: T,
) -> impl Fn(T) -> Result<StateVector<T>> + 'a {
    move |s: T| {
        let t = s * sched.t_final;
        let h = dynamics::hamiltonian_at(network, sched, t)?;
        let r = ground_state_warm(&h, 1, gap_tol, None)?;
        if r.degenerate {
            return Err(Error::Degenerate {
                s: s.to_f64().unwrap_or(f64::NAN),
                gap: r.gap.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(r.eigenvectors.into_iter().next().unwrap())
    }
}

/// Both chi estimates at one sweep fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiEstimate<T> {
    pub overlap_form: T,
    pub derivative_form: T,
}

/// Fidelity susceptibility of the instantaneous ground state with respect
/// to the sweep fraction, via both estimators.
pub fn fidelity_susceptibility<T: Float>(
    network: &SpinNetwork,
    sched: &ControlSchedule<T>,
    s: T,
    delta_s: T,
) -> Result<ChiEstimate<T>> {
    check_sweep_range(s, delta_s)?;
    let family = ground_state_family(network, sched, T::of(eigen::DEFAULT_GAP_TOL));
    Ok(ChiEstimate {
        overlap_form: chi_overlap_from(&family, s, delta_s)?,
        derivative_form: chi_derivative_from(&family, s, delta_s)?,
    })
}

/// Overlap-form chi along a uniform sweep grid.
#[derive(Debug, Clone)]
pub struct ChiTrace<T> {
    /// Grid sweep fractions in `[0, 1]`.
    pub s: Vec<T>,
    /// Stencil centers actually used (endpoints are clamped inward so the
    /// stencil stays inside the sweep).
    pub s_center: Vec<T>,
    pub chi_overlap: Vec<T>,
    pub chi_derivative: Vec<T>,
    /// Ground gap at each grid point, GHz.
    pub gaps: Vec<T>,
    /// Quasi-degenerate points; their chi entries are NaN.
    pub flags: Vec<bool>,
}

impl<T: Float> ChiTrace<T> {
    /// `(s_center, chi)` of the largest unflagged overlap-form value.
    pub fn peak(&self) -> Option<(T, T)> {
        self.s_center
            .iter()
            .zip(&self.chi_overlap)
            .filter(|(_, c)| c.is_finite())
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(s, c)| (*s, *c))
    }
}

/// Sweeps chi over `grid_points` uniform fractions with stencil width
/// `delta_s`. Quasi-degenerate points (gap below `gap_tol`) are flagged
/// and reported as NaN instead of failing the whole trace.
pub fn chi_trace<T: Float>(
    network: &SpinNetwork,
    sched: &ControlSchedule<T>,
    grid_points: usize,
    delta_s: T,
    gap_tol: T,
) -> Result<ChiTrace<T>> {
    assert!(grid_points >= 2, "grid must have at least two points");
    check_stencil(T::half(), delta_s)?;
    let nan = T::nan();
    // one warm-started solve per stencil leg, shared by both estimators
    let solve = |s: T, warm: Option<&StateVector<T>>| -> Result<(StateVector<T>, T, bool)> {
        let h = dynamics::hamiltonian_at(network, sched, s * sched.t_final)?;
        let r = ground_state_warm(&h, 1, gap_tol, warm)?;
        let state = r.eigenvectors.into_iter().next().unwrap();
        Ok((state, r.gap, r.degenerate))
    };
    let mut out = ChiTrace {
        s: Vec::with_capacity(grid_points),
        s_center: Vec::with_capacity(grid_points),
        chi_overlap: Vec::with_capacity(grid_points),
        chi_derivative: Vec::with_capacity(grid_points),
        gaps: Vec::with_capacity(grid_points),
        flags: Vec::with_capacity(grid_points),
    };
    let mut warm: Option<StateVector<T>> = None;
    for k in 0..grid_points {
        let s = T::of(k as f64) / T::of((grid_points - 1) as f64);
        let center = s.max(delta_s).min(T::one() - delta_s);
        let (psi, gap, flagged) = solve(center, warm.as_ref())?;
        out.s.push(s);
        out.s_center.push(center);
        out.gaps.push(gap);
        if flagged {
            out.flags.push(true);
            out.chi_overlap.push(nan);
            out.chi_derivative.push(nan);
            warm = Some(psi);
            continue;
        }
        let (fwd, _, f_deg) = solve(center + delta_s, Some(&psi))?;
        let (bwd, _, b_deg) = solve(center - delta_s, Some(&psi))?;
        if f_deg || b_deg {
            // a stencil leg landed on a quasi-degenerate point
            out.flags.push(true);
            out.chi_overlap.push(nan);
            out.chi_derivative.push(nan);
            warm = Some(psi);
            continue;
        }
        let lf = psi.inner(&fwd).norm().ln();
        let lb = psi.inner(&bwd).norm().ln();
        out.chi_overlap.push(-(lf + lb) / (delta_s * delta_s));
        let inv = (T::two() * delta_s).recip();
        let dpsi: Vec<_> = fwd
            .amplitudes()
            .iter()
            .zip(bwd.amplitudes())
            .map(|(f, b)| (*f - *b).scale(inv))
            .collect();
        let dd = dpsi.iter().map(|c| c.norm_sqr()).sum::<T>();
        let pd = crate::state::inner(psi.amplitudes(), &dpsi).norm_sqr();
        out.chi_derivative.push(dd - pd);
        out.flags.push(false);
        warm = Some(psi);
    }
    Ok(out)
}

/// Smoothed Kullback-Leibler divergence `KL(p || q)` in nats.
///
/// Both arguments receive additive smoothing [`KL_SMOOTHING`] and are
/// renormalized, so zero bins are tolerated on either side.
pub fn kl_divergence<T: Float>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::SupportMismatch);
    }
    let ps = smooth(p);
    let qs = smooth(q);
    let mut acc = T::zero();
    for (a, b) in ps.iter().zip(&qs) {
        acc += *a * (*a / *b).ln();
    }
    Ok(acc)
}

fn smooth<T: Float>(p: &[T]) -> Vec<T> {
    let eps = T::of(KL_SMOOTHING);
    let total: T = p.iter().copied().sum::<T>() + eps * T::of(p.len() as f64);
    p.iter().map(|&x| (x + eps) / total).collect()
}

/// Exponential fit of a moment histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    /// Decay rate of `P(mu) ~ exp(-alpha |mu|)`.
    pub alpha: T,
    /// The fitted distribution on the same support.
    pub fitted: MomentHistogram<T>,
    /// `KL(hist || fitted)`, the residual divergence of the fit.
    pub goodness: T,
}

/// Fits `P(mu) ~ exp(-alpha |mu|)` to `hist` by minimizing
/// `KL(hist || P_alpha)` over `alpha`.
///
/// For this one-parameter exponential family the minimizer matches the
/// mean absolute moment, so the fit reduces to a bisection on the strictly
/// decreasing map `alpha -> E_alpha|mu|`. Histograms whose mean absolute
/// moment sits at the boundary of the family (for instance all weight on
/// `mu = 0`) are rejected as degenerate.
pub fn fit_exponential<T: Float>(hist: &MomentHistogram<T>) -> Result<FitResult<T>> {
    let n = hist.n();
    let support = hist.support();
    let target = hist.mean_abs_moment();
    let mean_at = |alpha: T| -> T {
        let p = exponential_family(&support, alpha);
        support
            .iter()
            .zip(&p)
            .map(|(&m, &w)| T::of(m.unsigned_abs() as f64) * w)
            .sum()
    };
    // bracket by doubling; mean_at is strictly decreasing in alpha
    let mut lo = T::of(-1.0);
    let mut hi = T::of(1.0);
    let cap = T::of(80.0) * T::of(n.max(1) as f64);
    for _ in 0..90 {
        if mean_at(lo) >= target {
            break;
        }
        lo = lo * T::two();
    }
    for _ in 0..90 {
        if mean_at(hi) <= target {
            break;
        }
        hi = hi * T::two();
    }
    if mean_at(lo) < target || mean_at(hi) > target || hi > cap || lo < -cap {
        return Err(Error::DegenerateHistogram);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::half();
        if mean_at(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < T::of(1e-12) * (T::one() + lo.abs().max(hi.abs())) {
            break;
        }
    }
    let alpha = (lo + hi) * T::half();
    let fitted =
        MomentHistogram::from_probabilities(n, exponential_family(&support, alpha))?;
    let goodness = kl_divergence(hist.probabilities(), fitted.probabilities())?;
    Ok(FitResult {
        alpha,
        fitted,
        goodness,
    })
}

fn exponential_family<T: Float>(support: &[i64], alpha: T) -> Vec<T> {
    let mut w: Vec<T> = support
        .iter()
        .map(|&m| (-alpha * T::of(m.unsigned_abs() as f64)).exp())
        .collect();
    let z: T = w.iter().copied().sum();
    for x in w.iter_mut() {
        *x = *x / z;
    }
    w
}

/// The macroscopic sign measure
/// `D = KL(p_exp || hist) - KL(p_bin || hist)`:
/// positive while the measured moments look binomial (paramagnetic),
/// negative once they look exponential (frustrated).
pub fn macro_measure<T: Float>(
    hist: &MomentHistogram<T>,
    p_exp: &MomentHistogram<T>,
    p_bin: &MomentHistogram<T>,
) -> Result<T> {
    if hist.n() != p_exp.n() || hist.n() != p_bin.n() {
        return Err(Error::SupportMismatch);
    }
    let to_exp = kl_divergence(p_exp.probabilities(), hist.probabilities())?;
    let to_bin = kl_divergence(p_bin.probabilities(), hist.probabilities())?;
    Ok(to_exp - to_bin)
}

/// The sign measure along a sweep.
#[derive(Debug, Clone)]
pub struct MacroTrace<T> {
    /// Grid sweep fractions.
    pub s: Vec<T>,
    /// `D(s)`; reference distributions are held fixed along the sweep.
    pub d: Vec<T>,
    /// Quasi-degenerate grid points (values are still reported: the moment
    /// histogram of the tracked state remains well defined).
    pub flags: Vec<bool>,
    /// Exponential reference fitted to the end-of-sweep histogram.
    pub fit: FitResult<T>,
}

impl<T: Float> MacroTrace<T> {
    /// Number of strict sign changes of `D` along the sweep.
    pub fn sign_changes(&self) -> usize {
        sign_changes(&self.d)
    }
}

/// Counts strict sign changes, skipping NaN and exact zeros.
pub fn sign_changes<T: Float>(xs: &[T]) -> usize {
    let mut count = 0;
    let mut prev: Option<bool> = None;
    for &x in xs {
        if !x.is_finite() || x == T::zero() {
            continue;
        }
        let pos = x > T::zero();
        if let Some(p) = prev {
            if p != pos {
                count += 1;
            }
        }
        prev = Some(pos);
    }
    count
}

/// Tracks the ground state over `grid_points` uniform fractions and
/// evaluates `D(s)` against two fixed references: the exact binomial of
/// the paramagnetic product state and an exponential fitted once to the
/// end-of-sweep histogram.
pub fn macro_trace<T: Float>(
    network: &SpinNetwork,
    sched: &ControlSchedule<T>,
    grid_points: usize,
    gap_tol: T,
) -> Result<MacroTrace<T>> {
    let traj = track_ground_state(network, sched, grid_points, gap_tol)?;
    macro_trace_of(network, &traj)
}

/// As [`macro_trace`], over an existing trajectory.
pub fn macro_trace_of<T: Float>(
    network: &SpinNetwork,
    traj: &crate::dynamics::Trajectory<T>,
) -> Result<MacroTrace<T>> {
    let n = network.n();
    let final_hist = moment_distribution(traj.states.last().ok_or(Error::ZeroVector)?)?;
    let fit = fit_exponential(&final_hist)?;
    let p_bin = paramagnetic_reference::<T>(n);
    let t_final = *traj.times.last().unwrap();
    let mut s = Vec::with_capacity(traj.times.len());
    let mut d = Vec::with_capacity(traj.times.len());
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let hist = moment_distribution(state)?;
        s.push(*t / t_final);
        d.push(macro_measure(&hist, &fit.fitted, &p_bin)?);
    }
    Ok(MacroTrace {
        s,
        d,
        flags: traj.flags.clone(),
        fit,
    })
}
