//! Amplitude inspection: inner products against product/Bell-pair bras and
//! partial projections that strip measured subsystems off a register.

use crate::protocol::Bit;
use crate::qcore::{Amplitude, BasisChoice, BellState, QubitLabel, StateError, StateVector};

/// One factor of a bra assignment: a state over one or more labels.
#[derive(Clone, Debug)]
pub struct BraFactor {
    labels: Vec<QubitLabel>,
    /// Amplitudes indexed little-endian in `labels` order.
    vector: Vec<Amplitude>,
}

impl BraFactor {
    /// Computational-basis qubit `⟨bit|`.
    pub fn bit(label: QubitLabel, bit: Bit) -> Self {
        Self::single(label, BasisChoice::Z.state(bit))
    }

    /// Basis eigenstate bra (`⟨0|/⟨1|` or `⟨+|/⟨−|`).
    pub fn in_basis(label: QubitLabel, basis: BasisChoice, bit: Bit) -> Self {
        Self::single(label, basis.state(bit))
    }

    pub fn single(label: QubitLabel, vector: [Amplitude; 2]) -> Self {
        Self {
            labels: vec![label],
            vector: vector.to_vec(),
        }
    }

    /// Bell-pair bra; `first` is the first qubit of the pair.
    pub fn bell(first: QubitLabel, second: QubitLabel, state: BellState) -> Self {
        Self {
            labels: vec![first, second],
            vector: state.vector().to_vec(),
        }
    }

    /// General multi-qubit factor; `vector` has length `2^labels.len()`,
    /// indexed little-endian in `labels` order.
    pub fn group(labels: Vec<QubitLabel>, vector: Vec<Amplitude>) -> Self {
        assert_eq!(
            vector.len(),
            1 << labels.len(),
            "group vector length must be 2^(number of labels)"
        );
        Self { labels, vector }
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }
}

/// Resolved factor: label positions within a concrete register.
struct PlacedFactor<'a> {
    positions: Vec<usize>,
    vector: &'a [Amplitude],
}

impl PlacedFactor<'_> {
    /// conj(factor amplitude) for the factor's bits inside `idx`.
    fn bra_amp(&self, idx: usize) -> Amplitude {
        let mut local = 0usize;
        for (i, &p) in self.positions.iter().enumerate() {
            local |= ((idx >> p) & 1) << i;
        }
        self.vector[local].conj()
    }
}

fn place_factors<'a>(
    state: &StateVector,
    factors: &'a [BraFactor],
) -> Result<Vec<PlacedFactor<'a>>, StateError> {
    let mut seen: Vec<QubitLabel> = Vec::new();
    let mut placed = Vec::with_capacity(factors.len());
    for factor in factors {
        let mut positions = Vec::with_capacity(factor.labels.len());
        for &label in &factor.labels {
            if seen.contains(&label) {
                return Err(StateError::DuplicateLabel(label));
            }
            seen.push(label);
            positions.push(state.position(label)?);
        }
        placed.push(PlacedFactor {
            positions,
            vector: &factor.vector,
        });
    }
    Ok(placed)
}

impl StateVector {
    /// Exact inner product `⟨assignment|state⟩`.
    ///
    /// The factors must cover every label of the register exactly once.
    pub fn amplitude_of(&self, factors: &[BraFactor]) -> Result<Amplitude, StateError> {
        let placed = place_factors(self, factors)?;
        let covered: usize = placed.iter().map(|f| f.positions.len()).sum();
        if covered != self.num_qubits() {
            let missing = self
                .labels()
                .iter()
                .find(|&&l| factors.iter().all(|f| !f.labels.contains(&l)))
                .copied()
                .expect("a label must be missing when coverage is incomplete");
            return Err(StateError::IncompleteAssignment(missing));
        }
        let mut total = Amplitude::new(0.0, 0.0);
        for (idx, amp) in self.amps().iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut bra = Amplitude::new(1.0, 0.0);
            for factor in &placed {
                bra *= factor.bra_amp(idx);
            }
            total += bra * amp;
        }
        Ok(total)
    }

    /// Born weight of the projection onto `⟨factors|` over a subset of
    /// labels, without touching the state. Factors covering the whole
    /// register reduce to `|⟨assignment|state⟩|²`.
    pub fn projection_weight(&self, factors: &[BraFactor]) -> Result<f64, StateError> {
        let placed = place_factors(self, factors)?;
        let covered: usize = placed.iter().map(|f| f.positions.len()).sum();
        if covered == self.num_qubits() {
            return Ok(self.amplitude_of(factors)?.norm_sqr());
        }
        let kept_positions: Vec<usize> = {
            let mut projected: Vec<usize> = placed.iter().flat_map(|f| f.positions.clone()).collect();
            projected.sort_unstable();
            (0..self.num_qubits()).filter(|p| !projected.contains(p)).collect()
        };
        let mut out = vec![Amplitude::new(0.0, 0.0); 1 << kept_positions.len()];
        for (idx, amp) in self.amps().iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut bra = Amplitude::new(1.0, 0.0);
            for factor in &placed {
                bra *= factor.bra_amp(idx);
            }
            if bra.norm_sqr() == 0.0 {
                continue;
            }
            let mut out_idx = 0usize;
            for (i, &p) in kept_positions.iter().enumerate() {
                out_idx |= ((idx >> p) & 1) << i;
            }
            out[out_idx] += bra * amp;
        }
        Ok(out.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Project onto `⟨factors|` over a subset of labels and return the Born
    /// weight together with the normalized residual state over the remaining
    /// labels (those labels are removed from the register).
    ///
    /// Errors with [`StateError::VanishingProjection`] when the weight is
    /// numerically zero.
    pub fn project_out(&self, factors: &[BraFactor]) -> Result<(f64, StateVector), StateError> {
        let placed = place_factors(self, factors)?;
        let covered: usize = placed.iter().map(|f| f.positions.len()).sum();
        if covered == self.num_qubits() {
            // Nothing would remain; treat as a full inner product instead.
            let amp = self.amplitude_of(factors)?;
            return Err(StateError::VanishingRegister { weight: amp.norm_sqr() });
        }

        let mut projected_positions: Vec<usize> = placed.iter().flat_map(|f| f.positions.clone()).collect();
        projected_positions.sort_unstable();
        let kept_positions: Vec<usize> =
            (0..self.num_qubits()).filter(|p| !projected_positions.contains(p)).collect();
        let kept_labels: Vec<QubitLabel> = kept_positions.iter().map(|&p| self.labels()[p]).collect();

        let mut out = vec![Amplitude::new(0.0, 0.0); 1 << kept_positions.len()];
        for (idx, amp) in self.amps().iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut bra = Amplitude::new(1.0, 0.0);
            for factor in &placed {
                bra *= factor.bra_amp(idx);
            }
            if bra.norm_sqr() == 0.0 {
                continue;
            }
            let mut out_idx = 0usize;
            for (i, &p) in kept_positions.iter().enumerate() {
                out_idx |= ((idx >> p) & 1) << i;
            }
            out[out_idx] += bra * amp;
        }
        let weight: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if weight < 1e-30 {
            return Err(StateError::VanishingProjection(weight));
        }
        let scale = weight.sqrt().recip();
        for a in &mut out {
            *a *= scale;
        }
        Ok((weight, StateVector::from_parts(kept_labels, out)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{StatePrep, FRAC_1_SQRT_2};

    const Q1: QubitLabel = QubitLabel::new("q1");
    const Q2: QubitLabel = QubitLabel::new("q2");
    const Q3: QubitLabel = QubitLabel::new("q3");
    const Q4: QubitLabel = QubitLabel::new("q4");

    /// Post-CNOT state for the preparation (controller state, alice bit, bob bit).
    fn encoded(charlie: BellState, alice: Bit, bob: Bit) -> StateVector {
        let mut s = StateVector::make_state(&[
            StatePrep::bit(Q1, alice),
            StatePrep::bell(Q2, Q3, charlie),
            StatePrep::bit(Q4, bob),
        ])
        .unwrap();
        s.apply_cnot(Q2, Q1).unwrap();
        s.apply_cnot(Q3, Q4).unwrap();
        s
    }

    fn bell_pair_amp(state: &StateVector, a: BellState, b: BellState) -> Amplitude {
        state
            .amplitude_of(&[BraFactor::bell(Q1, Q2, a), BraFactor::bell(Q3, Q4, b)])
            .unwrap()
    }

    #[test]
    fn phi_plus_phi_plus_component_of_00_preparation() {
        // (φ⁺,0,0) expands to (φ⁺φ⁺ + φ⁻φ⁻)/√2.
        let s = encoded(BellState::PhiPlus, Bit::ZERO, Bit::ZERO);
        let amp = bell_pair_amp(&s, BellState::PhiPlus, BellState::PhiPlus);
        assert!((amp.re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(amp.im.abs() < 1e-15);
    }

    #[test]
    fn absent_component_is_zero() {
        // (φ⁺,0,1) expands to (φ⁺ψ⁺ + φ⁻ψ⁻)/√2; φ⁺ψ⁻ does not appear.
        let s = encoded(BellState::PhiPlus, Bit::ZERO, Bit::ONE);
        let amp = bell_pair_amp(&s, BellState::PhiPlus, BellState::PsiMinus);
        assert!(amp.norm() < 1e-12);
    }

    #[test]
    fn negative_component_keeps_its_sign() {
        // (φ⁺,1,1) expands to (ψ⁺ψ⁺ − ψ⁻ψ⁻)/√2.
        let s = encoded(BellState::PhiPlus, Bit::ONE, Bit::ONE);
        let amp = bell_pair_amp(&s, BellState::PsiMinus, BellState::PsiMinus);
        assert!((amp.re + FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn incomplete_assignment_is_rejected() {
        let s = encoded(BellState::PhiPlus, Bit::ZERO, Bit::ZERO);
        let err = s.amplitude_of(&[BraFactor::bell(Q1, Q2, BellState::PhiPlus)]);
        assert!(matches!(err, Err(StateError::IncompleteAssignment(_))));
    }

    #[test]
    fn project_out_strips_measured_pair() {
        let s = encoded(BellState::PhiPlus, Bit::ZERO, Bit::ONE);
        let (weight, rest) = s.project_out(&[BraFactor::bell(Q1, Q2, BellState::PhiPlus)]).unwrap();
        assert!((weight - 0.5).abs() < 1e-12);
        assert_eq!(rest.labels(), &[Q3, Q4]);
        // Conditioned on Alice's φ⁺, Bob's pair is exactly ψ⁺.
        let amp = rest.amplitude_of(&[BraFactor::bell(Q3, Q4, BellState::PsiPlus)]).unwrap();
        assert!((amp.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn project_out_vanishing_component_errors() {
        let s = encoded(BellState::PhiPlus, Bit::ZERO, Bit::ONE);
        let err = s.project_out(&[BraFactor::bell(Q1, Q2, BellState::PsiPlus)]);
        assert!(matches!(err, Err(StateError::VanishingProjection(_))));
    }
}
