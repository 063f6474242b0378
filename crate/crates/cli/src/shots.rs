//! Optional finite-shot sampling of moment distributions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinqpt::MomentHistogram;

use crate::error::{CliError, Result};

/// Multinomial draw of `shots` measurements from `h`, deterministic given
/// `(h, shots, seed)`. Returns per-bin counts alongside the empirical
/// distribution.
pub fn sample_shots(
    h: &MomentHistogram,
    shots: u64,
    seed: u64,
) -> Result<(Vec<u64>, MomentHistogram)> {
    if shots == 0 {
        return Err(CliError::Config("shots: must be >= 1".into()));
    }
    let probs = h.probabilities();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen_range(0.0..acc);
        let idx = cdf.partition_point(|&c| c < u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    let hist = MomentHistogram::from_probabilities(h.n(), empirical)?;
    Ok((counts, hist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinqpt::observables::paramagnetic_reference;

    #[test]
    fn single_shot_is_a_delta() {
        let h = paramagnetic_reference::<f64>(3);
        let (counts, emp) = sample_shots(&h, 1, 42).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 1);
        assert_eq!(emp.probabilities().iter().filter(|&&p| p == 1.0).count(), 1);
    }

    #[test]
    fn deterministic_given_seed() {
        let h = paramagnetic_reference::<f64>(4);
        let a = sample_shots(&h, 1000, 9).unwrap();
        let b = sample_shots(&h, 1000, 9).unwrap();
        assert_eq!(a.0, b.0);
        let c = sample_shots(&h, 1000, 10).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn zero_shots_rejected() {
        let h = paramagnetic_reference::<f64>(3);
        assert!(sample_shots(&h, 0, 1).is_err());
    }
}
