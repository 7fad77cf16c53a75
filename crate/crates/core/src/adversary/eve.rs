//! The eavesdropper's post-announcement ancilla readout and key guess.
//!
//! Defined for the bit-flip-free attack family (B = 0), where each channel
//! use tags the pair's computational branch z into the ancilla pair
//! (ζ_zz, η_zz). The readout resolves the branch from the session's residual
//! ancilla state (the two branch weights are ½ each in this family), applies
//! the optimal two-state discrimination to each ancilla's true branch vector,
//! and forms the key guess
//!
//! ```text
//!   guess = k_C ⊕ bias-coin(e) ⊕ ẑ_ζ ⊕ ẑ_η
//! ```
//!
//! One wrong discrimination flips the inferred key; two wrong ones cancel.
//! The disagreement indicator ẑ_ζ ≠ ẑ_η therefore carries exactly the
//! discrimination-stage error, while the overall guess is correct with
//! probability ½ for any bias (the key is symmetric in the announcements).

use crate::adversary::{AdversaryError, CollectiveAttack, Discriminator, ETA_LABELS, ZETA_LABELS};
use crate::protocol::Bit;
use crate::qcore::{Amplitude, BraFactor, QubitLabel, StateVector};
use crate::rng::RandomSource;

/// One key bit's readout: the two discrimination outcomes and the announced
/// guess.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EveRecordEntry {
    pub zeta_outcome: Bit,
    pub eta_outcome: Bit,
    pub guess: Bit,
}

impl EveRecordEntry {
    /// True when exactly one of the two discriminations erred.
    pub fn discrimination_disagreement(&self) -> bool {
        self.zeta_outcome != self.eta_outcome
    }
}

/// Per-key-bit readout entries paired with the true key bits.
#[derive(Clone, Debug, Default)]
pub struct EveRecord {
    rows: Vec<(EveRecordEntry, Bit)>,
}

impl EveRecord {
    pub fn push(&mut self, entry: EveRecordEntry, true_key: Bit) {
        self.rows.push((entry, true_key));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(EveRecordEntry, Bit)> {
        self.rows.iter()
    }

    /// Fraction of bits where the two discrimination outcomes disagree —
    /// the eavesdropper's inference error rate (QBER).
    pub fn disagreement_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let hits = self.rows.iter().filter(|(e, _)| e.discrimination_disagreement()).count();
        hits as f64 / self.rows.len() as f64
    }

    /// Fraction of bits where the announced guess matched the key.
    pub fn guess_success_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let hits = self.rows.iter().filter(|(e, k)| e.guess == *k).count();
        hits as f64 / self.rows.len() as f64
    }
}

/// Prebuilt readout apparatus for one collective attack configuration.
#[derive(Clone, Debug)]
pub struct EveReadout {
    zeta_branches: [[Amplitude; 4]; 2],
    eta_branches: [[Amplitude; 4]; 2],
    zeta_discriminator: Discriminator,
    eta_discriminator: Discriminator,
    branch_overlap: f64,
    bias: f64,
}

impl EveReadout {
    pub fn new(attack: &CollectiveAttack) -> Result<Self, AdversaryError> {
        let params = attack.params();
        if !params.is_flip_free() {
            return Err(AdversaryError::InvalidParams(
                "ancilla readout is defined for the bit-flip-free family (B = 0)".into(),
            ));
        }
        let zeta = attack.zeta_vectors();
        let eta = attack.eta_vectors();
        Ok(Self {
            zeta_branches: [zeta.v00, zeta.v11],
            eta_branches: [eta.v00, eta.v11],
            zeta_discriminator: Discriminator::new(&zeta.v00, &zeta.v11),
            eta_discriminator: Discriminator::new(&eta.v00, &eta.v11),
            branch_overlap: params.alpha_zeta.cos() * params.alpha_eta.cos(),
            bias: params.bias,
        })
    }

    /// Resolve the session's ancilla branch, discriminate both ancillas, and
    /// produce the key guess.
    ///
    /// `ancillas` is the residual state over the four ancilla labels left by
    /// the taps after the participants' measurements.
    pub fn measure_and_guess(
        &self,
        ancillas: &StateVector,
        k_c: Bit,
        rng: &mut RandomSource,
    ) -> Result<EveRecordEntry, AdversaryError> {
        let labels: Vec<QubitLabel> = ZETA_LABELS.iter().chain(ETA_LABELS.iter()).copied().collect();
        if ancillas.num_qubits() != 4 || labels.iter().any(|&l| !ancillas.contains(l)) {
            return Err(AdversaryError::MissingAncillas);
        }

        let weights = self.branch_weights(ancillas, &labels)?;
        let z = rng.weighted(&weights);

        let zeta_outcome = self.zeta_discriminator.measure(&self.zeta_branches[z], rng);
        let eta_outcome = self.eta_discriminator.measure(&self.eta_branches[z], rng);

        let base = if rng.bernoulli(self.bias) { Bit::ZERO } else { Bit::ONE };
        let guess = k_c ^ base ^ Bit::from(zeta_outcome == 1) ^ Bit::from(eta_outcome == 1);
        Ok(EveRecordEntry {
            zeta_outcome: Bit::from(zeta_outcome == 1),
            eta_outcome: Bit::from(eta_outcome == 1),
            guess,
        })
    }

    /// Weights of the two branch components (ζ00⊗η00 vs ζ11⊗η11) in the
    /// residual ancilla state, via the 2×2 Gram system of the non-orthogonal
    /// branch frame.
    fn branch_weights(
        &self,
        ancillas: &StateVector,
        labels: &[QubitLabel],
    ) -> Result<[f64; 2], AdversaryError> {
        let f0 = branch_frame(&self.zeta_branches[0], &self.eta_branches[0]);
        let f1 = branch_frame(&self.zeta_branches[1], &self.eta_branches[1]);
        let b0 = ancillas.amplitude_of(&[BraFactor::group(labels.to_vec(), f0.clone())])?;
        let b1 = ancillas.amplitude_of(&[BraFactor::group(labels.to_vec(), f1.clone())])?;
        let g = self.branch_overlap;
        let det = 1.0 - g * g;
        if det < 1e-9 {
            // Branches coincide (α ≈ 0 on both channels): any split is
            // equivalent; the physical weights are equal.
            let residual = 1.0 - b0.norm_sqr();
            if residual > 1e-6 {
                return Err(AdversaryError::UnsupportedAncilla { residual });
            }
            return Ok([0.5, 0.5]);
        }
        let x0 = (b0 - b1 * g) / det;
        let x1 = (b1 - b0 * g) / det;
        // For states inside the branch span the projection norm equals 1.
        let span_norm = x0.norm_sqr()
            + x1.norm_sqr()
            + 2.0 * (x0.conj() * x1).re * g;
        let residual = (1.0 - span_norm).abs();
        if residual > 1e-6 {
            return Err(AdversaryError::UnsupportedAncilla { residual });
        }
        Ok([x0.norm_sqr(), x1.norm_sqr()])
    }
}

/// Tensor ζ ⊗ η in the little-endian convention over labels
/// [x0, x1, y0, y1].
fn branch_frame(zeta: &[Amplitude; 4], eta: &[Amplitude; 4]) -> Vec<Amplitude> {
    let mut out = vec![Amplitude::new(0.0, 0.0); 16];
    for (j, e) in eta.iter().enumerate() {
        for (i, z) in zeta.iter().enumerate() {
            out[i | (j << 2)] = z * e;
        }
    }
    out
}

/// Convenience wrapper building the apparatus per call.
pub fn eve_measure_and_guess(
    attack: &CollectiveAttack,
    ancillas: &StateVector,
    k_c: Bit,
    rng: &mut RandomSource,
) -> Result<EveRecordEntry, AdversaryError> {
    EveReadout::new(attack)?.measure_and_guess(ancillas, k_c, rng)
}
