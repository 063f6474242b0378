//! Randomized invariants of the operator algebra, gauge fixing, witness,
//! and divergence machinery.

use proptest::collection::vec;
use proptest::prelude::*;
use spinqpt::eigen::{dense_ground_state, operator_scale};
use spinqpt::metrics::{fit_exponential, kl_divergence};
use spinqpt::network::{ControlParams, SpinNetwork};
use spinqpt::observables::{
    block_witness, moment_distribution, witness_expectation_pure, MomentHistogram,
};
use spinqpt::sparse::build_hamiltonian;
use spinqpt::state::fix_gauge;
use spinqpt::{Complex64, StateVector};

fn arb_network() -> impl Strategy<Value = SpinNetwork> {
    (2usize..=7).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let m = pairs.len();
        vec(any::<bool>(), m).prop_map(move |mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .zip(&mask)
                .filter(|(_, &keep)| keep)
                .map(|(&e, _)| e)
                .collect();
            SpinNetwork::custom(n, &edges).expect("generated edges are valid")
        })
    })
}

fn arb_instance() -> impl Strategy<Value = (SpinNetwork, ControlParams<f64>)> {
    arb_network().prop_flat_map(|net| {
        let n = net.n();
        let m = net.edges().len();
        (
            Just(net),
            vec(-3.0..3.0f64, n),
            vec(-3.0..3.0f64, n),
            vec(-3.0..3.0f64, m),
        )
            .prop_map(|(net, epsilon, delta, j)| (net, ControlParams { epsilon, delta, j }))
    })
}

fn arb_state(dim: usize) -> impl Strategy<Value = StateVector> {
    vec((-1.0..1.0f64, -1.0..1.0f64), dim).prop_filter_map("nonzero state", |xs| {
        let amps: Vec<Complex64> = xs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        StateVector::from_amplitudes(amps).ok()
    })
}

/// |theta, phi> per site, tensored.
fn product_state(angles: &[(f64, f64)]) -> StateVector {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for &(theta, phi) in angles {
        let up = Complex64::new((theta / 2.0).cos(), 0.0);
        let down = Complex64::from_polar((theta / 2.0).sin(), phi);
        let mut next = Vec::with_capacity(amps.len() * 2);
        // new site becomes the highest bit
        for &a in &amps {
            next.push(a * up);
        }
        for &a in &amps {
            next.push(a * down);
        }
        amps = next;
    }
    StateVector::from_amplitudes(amps).unwrap()
}

proptest! {
    #[test]
    fn hamiltonians_are_hermitian((net, params) in arb_instance()) {
        let h = build_hamiltonian(&net, &params).unwrap();
        prop_assert!(h.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn sparse_apply_matches_dense(
        (net, params) in arb_instance(),
        seed in any::<u64>(),
    ) {
        let h = build_hamiltonian(&net, &params).unwrap();
        let dim = net.dim();
        // cheap deterministic pseudo-random vector from the seed
        let mut x = seed | 1;
        let mut nextf = || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(nextf(), nextf()))
            .collect();
        let fast = h.apply_raw(&v);
        let dense = h.to_dense();
        for r in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..dim {
                acc += dense[r * dim + c] * v[c];
            }
            prop_assert!((acc - fast[r]).norm() < 1e-10);
        }
    }

    #[test]
    fn spectrum_is_bounded_by_gershgorin((net, params) in arb_instance()) {
        if net.dim() > 128 {
            return Ok(()); // keep the dense solve cheap
        }
        let h = build_hamiltonian(&net, &params).unwrap();
        let scale = operator_scale(&h);
        let r = dense_ground_state(&h, net.dim().min(4), 1e-9).unwrap();
        for &e in &r.eigenvalues {
            prop_assert!(e.abs() <= scale + 1e-9);
        }
    }

    #[test]
    fn ground_energy_is_a_lower_bound(
        (net, params) in arb_instance(),
        probe_seed in any::<u32>(),
    ) {
        if net.dim() > 128 {
            return Ok(());
        }
        let h = build_hamiltonian(&net, &params).unwrap();
        let r = dense_ground_state(&h, 1, 1e-9).unwrap();
        let dim = net.dim();
        let amps: Vec<Complex64> = (0..dim)
            .map(|i| {
                let t = ((probe_seed as usize + 7 * i + 1) % 97) as f64 / 97.0;
                Complex64::new(t - 0.5, (t * t).fract() - 0.5)
            })
            .collect();
        if let Ok(probe) = StateVector::from_amplitudes(amps) {
            let hp = h.apply(&probe).unwrap();
            let rayleigh = spinqpt::state::inner(probe.amplitudes(), &hp).re;
            prop_assert!(r.eigenvalues[0] <= rayleigh + 1e-8);
        }
    }

    #[test]
    fn gauge_fixing_kills_global_phase(
        state in arb_state(8),
        phase in 0.0..std::f64::consts::TAU,
    ) {
        let rotated: Vec<Complex64> = state
            .amplitudes()
            .iter()
            .map(|a| a * Complex64::from_polar(1.0, phase))
            .collect();
        let refixed = fix_gauge(rotated).unwrap();
        for (a, b) in state.amplitudes().iter().zip(refixed.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn kl_is_nonnegative_and_faithful(
        p_raw in vec(1e-6..1.0f64, 7),
        q_raw in vec(1e-6..1.0f64, 7),
    ) {
        let norm = |v: &[f64]| {
            let s: f64 = v.iter().sum();
            v.iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let p = norm(&p_raw);
        let q = norm(&q_raw);
        let kl = kl_divergence(&p, &q).unwrap();
        prop_assert!(kl >= -1e-12);
        prop_assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn moment_distribution_is_normalized(state in arb_state(32)) {
        let h = moment_distribution(&state).unwrap();
        let total: f64 = h.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert_eq!(h.support().len(), 6);
    }

    #[test]
    fn fit_matches_the_mean_absolute_moment(probs_raw in vec(0.01..1.0f64, 7)) {
        let s: f64 = probs_raw.iter().sum();
        let probs: Vec<f64> = probs_raw.iter().map(|x| x / s).collect();
        let h = MomentHistogram::from_probabilities(6, probs).unwrap();
        let fit = fit_exponential(&h).unwrap();
        prop_assert!(
            (fit.fitted.mean_abs_moment() - h.mean_abs_moment()).abs() < 1e-7
        );
        let total: f64 = fit.fitted.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn witness_floor_on_arbitrary_states(state in arb_state(8)) {
        let w = witness_expectation_pure(&state).unwrap();
        prop_assert!(w >= 5.0_f64.sqrt() - 3.0 - 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn witness_is_nonnegative_on_product_states(
        angles in vec((0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU), 3),
    ) {
        let psi = product_state(&angles);
        let w = witness_expectation_pure(&psi).unwrap();
        prop_assert!(w >= -1e-10, "product state violated the witness: {w}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn block_witness_respects_the_floor_on_larger_registers(
        state in arb_state(32),
        which in 0usize..10,
    ) {
        // all C(5,3) = 10 ascending triples of a 5-site register
        let triples: Vec<(usize, usize, usize)> = (0..5)
            .flat_map(|a| {
                ((a + 1)..5).flat_map(move |b| ((b + 1)..5).map(move |c| (a, b, c)))
            })
            .collect();
        let w = block_witness(&state, triples[which]).unwrap();
        prop_assert!(w.value >= 5.0_f64.sqrt() - 3.0 - 1e-10);
    }
}
