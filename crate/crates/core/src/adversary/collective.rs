//! Collective entangling attack on the two distribution channels.
//!
//! The eavesdropper attaches one private 4-dimensional ancilla to each
//! in-flight pair half through an entangling isometry
//!
//! ```text
//!   |0⟩|anc⟩ → A|0⟩|v00⟩ + B|1⟩|v01⟩
//!   |1⟩|anc⟩ → B|0⟩|v10⟩ + A|1⟩|v11⟩        A² + B² = 1
//! ```
//!
//! with the conditional ancilla states pairwise orthogonal except for the
//! two tunable overlaps ⟨v00|v11⟩ = cos α and ⟨v01|v10⟩ = cos β. The explicit
//! four-dimensional realization below is the minimal one satisfying all of
//! those constraints together with unitarity (⟨v00|v10⟩ + ⟨v01|v11⟩ = 0).

use crate::adversary::AdversaryError;
use crate::protocol::{ChannelTap, ProtocolError};
use crate::qcore::{Amplitude, IsometryColumns, QubitLabel, StateVector};
use crate::rng::RandomSource;

/// Ancilla labels used by the tap on the channel to Alice.
pub const ZETA_LABELS: [QubitLabel; 2] = [QubitLabel::new("x0"), QubitLabel::new("x1")];
/// Ancilla labels used by the tap on the channel to Bob.
pub const ETA_LABELS: [QubitLabel; 2] = [QubitLabel::new("y0"), QubitLabel::new("y1")];

const NORM_TOL: f64 = 1e-12;

/// Parameters of the collective attack: per-channel isometry amplitudes,
/// ancilla overlap angles (radians), and the eavesdropper's 0-vs-1 decision
/// bias `e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollectiveParams {
    pub a_zeta: f64,
    pub b_zeta: f64,
    pub a_eta: f64,
    pub b_eta: f64,
    pub alpha_zeta: f64,
    pub beta_zeta: f64,
    pub alpha_eta: f64,
    pub beta_eta: f64,
    pub bias: f64,
}

impl CollectiveParams {
    /// The strongest-information configuration: no bit-flip component
    /// (A = 1) and a common overlap angle α on both channels.
    pub fn optimal(alpha: f64) -> Self {
        Self {
            a_zeta: 1.0,
            b_zeta: 0.0,
            a_eta: 1.0,
            b_eta: 0.0,
            alpha_zeta: alpha,
            beta_zeta: std::f64::consts::FRAC_PI_2,
            alpha_eta: alpha,
            beta_eta: std::f64::consts::FRAC_PI_2,
            bias: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        for (name, a, b) in [
            ("zeta", self.a_zeta, self.b_zeta),
            ("eta", self.a_eta, self.b_eta),
        ] {
            let sum = a * a + b * b;
            if (sum - 1.0).abs() > NORM_TOL {
                return Err(AdversaryError::InvalidParams(format!(
                    "{name} amplitudes must satisfy A² + B² = 1, got {sum}"
                )));
            }
        }
        for (name, angle) in [
            ("alpha_zeta", self.alpha_zeta),
            ("beta_zeta", self.beta_zeta),
            ("alpha_eta", self.alpha_eta),
            ("beta_eta", self.beta_eta),
        ] {
            if !(0.0..=std::f64::consts::PI).contains(&angle) {
                return Err(AdversaryError::InvalidParams(format!(
                    "{name} must lie in [0, π], got {angle}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.bias) {
            return Err(AdversaryError::InvalidParams(format!(
                "bias must lie in [0, 1], got {}",
                self.bias
            )));
        }
        Ok(())
    }

    /// True when neither channel has a bit-flip component (B = 0), the
    /// family for which the ancilla readout model is defined.
    pub fn is_flip_free(&self) -> bool {
        self.b_zeta.abs() < 1e-12 && self.b_eta.abs() < 1e-12
    }
}

/// The four conditional ancilla states as explicit 4-dimensional vectors.
#[derive(Clone, Debug)]
pub struct AncillaVectors {
    pub v00: [Amplitude; 4],
    pub v01: [Amplitude; 4],
    pub v10: [Amplitude; 4],
    pub v11: [Amplitude; 4],
}

/// Minimal realization of the overlap constraints:
/// `v00 = ê0`, `v01 = ê1`, `v10 = cos β ê1 + sin β ê2`,
/// `v11 = cos α ê0 + sin α ê3`.
pub fn build_ancilla_vectors(alpha: f64, beta: f64) -> AncillaVectors {
    let z = Amplitude::new(0.0, 0.0);
    let re = |x: f64| Amplitude::new(x, 0.0);
    AncillaVectors {
        v00: [re(1.0), z, z, z],
        v01: [z, re(1.0), z, z],
        v10: [z, re(beta.cos()), re(beta.sin()), z],
        v11: [re(alpha.cos()), z, z, re(alpha.sin())],
    }
}

impl AncillaVectors {
    pub fn overlap(a: &[Amplitude; 4], b: &[Amplitude; 4]) -> Amplitude {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }
}

/// One channel's entangling tap.
#[derive(Clone, Debug)]
pub struct CollectiveTap {
    columns: IsometryColumns,
    ancillas: [QubitLabel; 2],
}

impl CollectiveTap {
    fn new(a: f64, b: f64, vectors: &AncillaVectors, ancillas: [QubitLabel; 2]) -> Self {
        // Columns over the joint (target, ancilla) space, target = bit 0.
        let dim = 8;
        let mut zero_image = vec![Amplitude::new(0.0, 0.0); dim];
        let mut one_image = vec![Amplitude::new(0.0, 0.0); dim];
        for k in 0..4 {
            zero_image[2 * k] = vectors.v00[k] * a;
            zero_image[2 * k + 1] = vectors.v01[k] * b;
            one_image[2 * k] = vectors.v10[k] * b;
            one_image[2 * k + 1] = vectors.v11[k] * a;
        }
        Self {
            columns: IsometryColumns { zero_image, one_image },
            ancillas,
        }
    }

    pub fn ancilla_labels(&self) -> [QubitLabel; 2] {
        self.ancillas
    }
}

impl ChannelTap for CollectiveTap {
    fn intercept(
        &mut self,
        state: &mut StateVector,
        qubit: QubitLabel,
        _rng: &mut RandomSource,
    ) -> Result<(), ProtocolError> {
        state.apply_isometry(qubit, &self.ancillas, &self.columns)?;
        Ok(())
    }
}

/// A fully configured collective attack: validated parameters, both channels'
/// ancilla constructions, and tap factories.
#[derive(Clone, Debug)]
pub struct CollectiveAttack {
    params: CollectiveParams,
    zeta: AncillaVectors,
    eta: AncillaVectors,
}

impl CollectiveAttack {
    pub fn new(params: CollectiveParams) -> Result<Self, AdversaryError> {
        params.validate()?;
        let zeta = build_ancilla_vectors(params.alpha_zeta, params.beta_zeta);
        let eta = build_ancilla_vectors(params.alpha_eta, params.beta_eta);
        Ok(Self { params, zeta, eta })
    }

    pub fn params(&self) -> &CollectiveParams {
        &self.params
    }

    pub fn zeta_vectors(&self) -> &AncillaVectors {
        &self.zeta
    }

    pub fn eta_vectors(&self) -> &AncillaVectors {
        &self.eta
    }

    /// Tap for the channel to Alice (ζ ancilla).
    pub fn tap_to_alice(&self) -> CollectiveTap {
        CollectiveTap::new(self.params.a_zeta, self.params.b_zeta, &self.zeta, ZETA_LABELS)
    }

    /// Tap for the channel to Bob (η ancilla).
    pub fn tap_to_bob(&self) -> CollectiveTap {
        CollectiveTap::new(self.params.a_eta, self.params.b_eta, &self.eta, ETA_LABELS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn orthogonal_angles_give_an_orthonormal_quartet() {
        let v = build_ancilla_vectors(FRAC_PI_2, FRAC_PI_2);
        let all = [&v.v00, &v.v01, &v.v10, &v.v11];
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let dot = AncillaVectors::overlap(a, b);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot.re - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_alpha_collapses_v11_onto_v00() {
        let v = build_ancilla_vectors(0.0, FRAC_PI_2);
        for k in 0..4 {
            assert!((v.v11[k] - v.v00[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn constraints_hold_across_the_angle_range() {
        let mut rng = RandomSource::from_seed(8);
        for _ in 0..200 {
            let alpha = rng.uniform() * PI;
            let beta = rng.uniform() * PI;
            let v = build_ancilla_vectors(alpha, beta);
            // Unitarity: ⟨v00|v10⟩ + ⟨v01|v11⟩ = 0.
            let u = AncillaVectors::overlap(&v.v00, &v.v10) + AncillaVectors::overlap(&v.v01, &v.v11);
            assert!(u.norm() < 1e-10);
            // Tunable overlaps.
            assert!((AncillaVectors::overlap(&v.v00, &v.v11).re - alpha.cos()).abs() < 1e-10);
            assert!((AncillaVectors::overlap(&v.v01, &v.v10).re - beta.cos()).abs() < 1e-10);
            // The six orthogonality assumptions.
            for (a, b) in [
                (&v.v00, &v.v01),
                (&v.v00, &v.v10),
                (&v.v10, &v.v11),
                (&v.v01, &v.v11),
            ] {
                assert!(AncillaVectors::overlap(a, b).norm() < 1e-10);
            }
            // Unit norms.
            for s in [&v.v00, &v.v01, &v.v10, &v.v11] {
                assert!((AncillaVectors::overlap(s, s).re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn taps_build_valid_isometries_for_random_parameters() {
        // 100 random draws; applying both taps must preserve the norm.
        use crate::protocol::{run_key_bit, Preparation};
        let mut rng = RandomSource::from_seed(99);
        for _ in 0..100 {
            let theta = rng.uniform() * FRAC_PI_2;
            let params = CollectiveParams {
                a_zeta: theta.cos(),
                b_zeta: theta.sin(),
                a_eta: (0.3 + 0.5 * rng.uniform()).cos(),
                b_eta: (0.3 + 0.5 * rng.uniform()).cos(),
                alpha_zeta: rng.uniform() * PI,
                beta_zeta: rng.uniform() * PI,
                alpha_eta: rng.uniform() * PI,
                beta_eta: rng.uniform() * PI,
                bias: rng.uniform(),
            };
            // Re-normalize the eta pair to satisfy A² + B² = 1 exactly.
            let norm = (params.a_eta * params.a_eta + params.b_eta * params.b_eta).sqrt();
            let params = CollectiveParams {
                a_eta: params.a_eta / norm,
                b_eta: params.b_eta / norm,
                ..params
            };
            let attack = CollectiveAttack::new(params).unwrap();
            let mut tap_a = attack.tap_to_alice();
            let mut tap_b = attack.tap_to_bob();
            let prep = Preparation::new(rng.bit(), rng.bit(), rng.bit());
            let run = run_key_bit(prep, None, Some(&mut tap_a), Some(&mut tap_b), &mut rng).unwrap();
            let anc = run.ancillas.expect("taps must leave ancillas behind");
            assert!((anc.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let mut p = CollectiveParams::optimal(0.3);
        p.a_zeta = 0.9;
        assert!(matches!(CollectiveAttack::new(p), Err(AdversaryError::InvalidParams(_))));
        let mut p = CollectiveParams::optimal(0.3);
        p.bias = 1.5;
        assert!(p.validate().is_err());
        let mut p = CollectiveParams::optimal(0.3);
        p.alpha_eta = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn identity_attack_leaves_honest_statistics() {
        // α = 0 and A = 1: the tap appends a fixed product ancilla and the
        // parties' joint outcomes must stay inside the expected set.
        use crate::protocol::{detection_event, run_key_bit, Preparation};
        let attack = CollectiveAttack::new(CollectiveParams::optimal(0.0)).unwrap();
        let mut rng = RandomSource::from_seed(12);
        for _ in 0..200 {
            let prep = Preparation::new(rng.bit(), rng.bit(), rng.bit());
            let mut tap_a = attack.tap_to_alice();
            let mut tap_b = attack.tap_to_bob();
            let run = run_key_bit(prep, None, Some(&mut tap_a), Some(&mut tap_b), &mut rng).unwrap();
            assert!(!detection_event(prep, run.outcome_alice, run.outcome_bob));
        }
    }
}
