//! Fairness checks: no single party can bias the agreement key.

use rayon::prelude::*;

use crate::analysis::{AnalysisError, MetricsReport};
use crate::protocol::{
    bob_announce_bit, final_key_bit, infer_counterpart, run_key_bit, Bit, Preparation, Role,
};
use crate::rng::RandomSource;

/// A single party forcing a constant choice while everyone else stays
/// honest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forcing {
    /// Alice prepares every qubit as `|bit⟩`.
    Alice(Bit),
    /// Bob prepares every qubit as `|bit⟩`.
    Bob(Bit),
    /// The controller emits the same pair every time (bit 0 ↔ φ⁺).
    Charlie(Bit),
}

/// Empirical `P(K = 0)` over `key_bits` honest key bits with one party
/// forcing; the closed form is ½ (an unbiased key).
///
/// Each key bit runs the full quantum phase and reconciles Alice's key bit
/// through the announcements, so the estimate exercises the real pipeline
/// rather than the preparation identity.
pub fn fairness_report(
    forcing: Forcing,
    key_bits: u64,
    master: &RandomSource,
) -> Result<MetricsReport, AnalysisError> {
    if key_bits == 0 {
        return Err(AnalysisError::ZeroSessions);
    }
    let zeros = (0..key_bits)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.derive(i);
            let prep = match forcing {
                Forcing::Alice(b) => Preparation::new(rng.bit(), b, rng.bit()),
                Forcing::Bob(b) => Preparation::new(rng.bit(), rng.bit(), b),
                Forcing::Charlie(b) => Preparation::new(b, rng.bit(), rng.bit()),
            };
            let run = run_key_bit(prep, None, None, None, &mut rng).expect("honest bit runs");
            let k_b = bob_announce_bit(run.outcome_bob);
            let inferred = infer_counterpart(prep.charlie, prep.alice, k_b, run.r_alice, Role::Alice)
                .expect("honest sessions reconcile");
            let key = final_key_bit(run.r_alice, inferred);
            u64::from(key == Bit::ZERO)
        })
        .sum::<u64>();
    Ok(MetricsReport::binomial(zeros, key_bits, 0.5, Some(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forcing_any_single_party_leaves_the_key_unbiased() {
        let master = RandomSource::from_seed(51);
        let bits = 20_000u64;
        let sigma = 0.5 / (bits as f64).sqrt();
        for forcing in [
            Forcing::Alice(Bit::ZERO),
            Forcing::Bob(Bit::ONE),
            Forcing::Charlie(Bit::ZERO),
        ] {
            let r = fairness_report(forcing, bits, &master).unwrap();
            assert!(
                (r.estimate - 0.5).abs() < 4.0 * sigma,
                "{forcing:?}: P(K=0) = {}",
                r.estimate
            );
            assert!(!r.discrepancy);
        }
    }

    #[test]
    fn zero_bits_is_an_error() {
        let master = RandomSource::from_seed(52);
        assert!(fairness_report(Forcing::Alice(Bit::ZERO), 0, &master).is_err());
    }
}
