//! Dense complex statevector over a labelled qubit register.
//!
//! Registers hold up to [`MAX_QUBITS`] qubits. The amplitude array is indexed
//! little-endian in label insertion order: the label at position `i`
//! contributes bit `i` of the array index. Positions are an internal detail;
//! every operation addresses qubits by label.

use num_complex::Complex64;

use crate::protocol::Bit;
use crate::qcore::{BasisChoice, BellState, QubitLabel, StateError};
use crate::rng::RandomSource;

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Hard cap on register width; 2^8 amplitudes cover the protocol's largest
/// case (four particles plus two 2-qubit adversary ancillas).
pub const MAX_QUBITS: usize = 8;

/// Absolute tolerance for norm checks.
pub const NORM_TOL: f64 = 1e-12;

/// Absolute tolerance for isometry-column validation.
pub const ISOMETRY_TOL: f64 = 1e-10;

const ZERO: Amplitude = Amplitude::new(0.0, 0.0);

/// One factor of an initial product state.
#[derive(Clone, Debug)]
pub enum StatePrep {
    /// A single qubit in the given (unit) superposition.
    Single(QubitLabel, [Amplitude; 2]),
    /// Two fresh qubits in a Bell state; first label is the first qubit.
    Pair(QubitLabel, QubitLabel, BellState),
}

impl StatePrep {
    /// Computational-basis qubit `|bit⟩`.
    pub fn bit(label: QubitLabel, bit: Bit) -> Self {
        StatePrep::Single(label, BasisChoice::Z.state(bit))
    }

    /// Qubit prepared as `bit` in `basis` (`|0⟩/|1⟩` or `|+⟩/|−⟩`).
    pub fn in_basis(label: QubitLabel, basis: BasisChoice, bit: Bit) -> Self {
        StatePrep::Single(label, basis.state(bit))
    }

    pub fn bell(first: QubitLabel, second: QubitLabel, state: BellState) -> Self {
        StatePrep::Pair(first, second, state)
    }
}

/// The two images `U(|0⟩⊗|0…0⟩)` and `U(|1⟩⊗|0…0⟩)` of an isometry that
/// maps one qubit into the joint qubit ⊗ ancilla space.
///
/// Joint indices are little-endian with the target qubit as bit 0 and the
/// ancilla qubits following in their listed order.
#[derive(Clone, Debug)]
pub struct IsometryColumns {
    pub zero_image: Vec<Amplitude>,
    pub one_image: Vec<Amplitude>,
}

impl IsometryColumns {
    fn validate(&self, ancilla_count: usize) -> Result<(), StateError> {
        let dim = 2usize << ancilla_count;
        if self.zero_image.len() != dim || self.one_image.len() != dim {
            return Err(StateError::InvalidIsometry {
                reason: format!(
                    "columns must have length {dim} for {ancilla_count} ancilla qubit(s), got {} and {}",
                    self.zero_image.len(),
                    self.one_image.len()
                ),
            });
        }
        for (name, col) in [("zero", &self.zero_image), ("one", &self.one_image)] {
            let norm_sqr: f64 = col.iter().map(|a| a.norm_sqr()).sum();
            if (norm_sqr - 1.0).abs() > ISOMETRY_TOL {
                return Err(StateError::InvalidIsometry {
                    reason: format!("{name} image is not a unit vector (norm² = {norm_sqr})"),
                });
            }
        }
        let overlap: Amplitude = self
            .zero_image
            .iter()
            .zip(&self.one_image)
            .map(|(a, b)| a.conj() * b)
            .sum();
        if overlap.norm() > ISOMETRY_TOL {
            return Err(StateError::InvalidIsometry {
                reason: format!("column images are not orthogonal (|⟨c0|c1⟩| = {})", overlap.norm()),
            });
        }
        Ok(())
    }
}

/// Dense statevector with labelled qubits.
///
/// Value semantics: cloning yields an independent register, and all mutation
/// goes through `&mut self`, so states move freely between threads.
#[derive(Clone, Debug)]
pub struct StateVector {
    labels: Vec<QubitLabel>,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Tensor product of the given factors, normalized.
    pub fn make_state(spec: &[StatePrep]) -> Result<Self, StateError> {
        if spec.is_empty() {
            return Err(StateError::EmptyRegister);
        }
        let mut state = StateVector {
            labels: Vec::new(),
            amps: vec![Amplitude::new(1.0, 0.0)],
        };
        for prep in spec {
            match prep {
                StatePrep::Single(label, vector) => state.extend_with_qubit(*label, *vector)?,
                StatePrep::Pair(first, second, bell) => state.extend_with_pair(*first, *second, *bell)?,
            }
        }
        state.renormalize();
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn contains(&self, label: QubitLabel) -> bool {
        self.labels.contains(&label)
    }

    /// Raw amplitudes, indexed little-endian in label insertion order.
    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit position of `label` in the amplitude index.
    pub fn position(&self, label: QubitLabel) -> Result<usize, StateError> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(StateError::UnknownLabel(label))
    }

    /// Append a fresh qubit in the given (unit) single-qubit state.
    pub fn extend_with_qubit(
        &mut self,
        label: QubitLabel,
        vector: [Amplitude; 2],
    ) -> Result<(), StateError> {
        self.check_fresh(label)?;
        self.check_capacity(self.labels.len() + 1)?;
        let norm_sqr = vector[0].norm_sqr() + vector[1].norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL * 10.0 {
            return Err(StateError::NonUnitFactor { label, norm_sqr });
        }
        let shift = self.labels.len();
        let old = std::mem::take(&mut self.amps);
        let mut amps = vec![ZERO; old.len() << 1];
        for (idx, amp) in old.iter().enumerate() {
            amps[idx] = amp * vector[0];
            amps[idx | (1 << shift)] = amp * vector[1];
        }
        self.amps = amps;
        self.labels.push(label);
        Ok(())
    }

    /// Append two fresh qubits in a Bell state.
    pub fn extend_with_pair(
        &mut self,
        first: QubitLabel,
        second: QubitLabel,
        bell: BellState,
    ) -> Result<(), StateError> {
        self.extend_with_pair_state(first, second, bell.vector())
    }

    /// Append two fresh qubits in an arbitrary unit joint state, indexed
    /// `first_bit | second_bit << 1`.
    pub fn extend_with_pair_state(
        &mut self,
        first: QubitLabel,
        second: QubitLabel,
        vector: [Amplitude; 4],
    ) -> Result<(), StateError> {
        self.check_fresh(first)?;
        self.check_fresh(second)?;
        if first == second {
            return Err(StateError::DuplicateLabel(first));
        }
        let norm_sqr: f64 = vector.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL * 10.0 {
            return Err(StateError::NonUnitFactor { label: first, norm_sqr });
        }
        self.check_capacity(self.labels.len() + 2)?;
        let shift = self.labels.len();
        let old = std::mem::take(&mut self.amps);
        let mut amps = vec![ZERO; old.len() << 2];
        for (idx, amp) in old.iter().enumerate() {
            for (pair, coeff) in vector.iter().enumerate() {
                if coeff.norm_sqr() > 0.0 {
                    amps[idx | (pair << shift)] = amp * coeff;
                }
            }
        }
        self.amps = amps;
        self.labels.push(first);
        self.labels.push(second);
        Ok(())
    }

    /// CNOT with `control` flipping `target`.
    pub fn apply_cnot(&mut self, control: QubitLabel, target: QubitLabel) -> Result<(), StateError> {
        if control == target {
            return Err(StateError::ControlEqualsTarget(control));
        }
        let pc = self.position(control)?;
        let pt = self.position(target)?;
        let (cmask, tmask) = (1usize << pc, 1usize << pt);
        for idx in 0..self.amps.len() {
            if idx & cmask != 0 && idx & tmask == 0 {
                self.amps.swap(idx, idx | tmask);
            }
        }
        debug_assert!(self.norm_is_unit());
        Ok(())
    }

    /// Extend the register by fresh ancilla qubits and map the target qubit's
    /// `|0⟩`/`|1⟩` components to the given isometry columns.
    pub fn apply_isometry(
        &mut self,
        target: QubitLabel,
        ancillas: &[QubitLabel],
        columns: &IsometryColumns,
    ) -> Result<(), StateError> {
        let pt = self.position(target)?;
        for (i, &a) in ancillas.iter().enumerate() {
            self.check_fresh(a)?;
            if ancillas[..i].contains(&a) {
                return Err(StateError::DuplicateLabel(a));
            }
        }
        columns.validate(ancillas.len())?;
        self.check_capacity(self.labels.len() + ancillas.len())?;

        let old_n = self.labels.len();
        let tmask = 1usize << pt;
        let old = std::mem::take(&mut self.amps);
        let mut amps = vec![ZERO; old.len() << ancillas.len()];
        for (idx, amp) in old.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let column = if idx & tmask == 0 { &columns.zero_image } else { &columns.one_image };
            let base = idx & !tmask;
            for (joint, coeff) in column.iter().enumerate() {
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let target_bit = joint & 1;
                let anc = joint >> 1;
                let new_idx = base | (target_bit << pt) | (anc << old_n);
                amps[new_idx] += amp * coeff;
            }
        }
        self.amps = amps;
        self.labels.extend_from_slice(ancillas);
        debug_assert!(self.norm_is_unit());
        Ok(())
    }

    /// Born probabilities of the four Bell outcomes on the pair
    /// `(first, second)`, leaving the state untouched.
    pub fn bell_probabilities(
        &self,
        first: QubitLabel,
        second: QubitLabel,
    ) -> Result<[f64; 4], StateError> {
        let (p1, p2) = self.pair_positions(first, second)?;
        let mut probs = [0.0; 4];
        for (slot, bell) in BellState::ALL.iter().enumerate() {
            let vector = bell.vector();
            self.for_each_pair_block(p1, p2, |block| {
                let a = block_inner(&vector, block);
                probs[slot] += a.norm_sqr();
            });
        }
        Ok(probs)
    }

    /// Bell measurement of the pair `(first, second)`.
    ///
    /// The outcome is Born-sampled; the pair collapses in place onto the
    /// outcome vector (labels are kept) and the state is renormalized.
    pub fn measure_bell(
        &mut self,
        first: QubitLabel,
        second: QubitLabel,
        rng: &mut RandomSource,
    ) -> Result<BellState, StateError> {
        let probs = self.bell_probabilities(first, second)?;
        let outcome = BellState::ALL[rng.weighted(&probs)];
        self.collapse_bell(first, second, outcome)?;
        Ok(outcome)
    }

    /// Collapse the pair onto a specific Bell outcome without sampling.
    ///
    /// Returns the Born probability of that outcome. Errors if the outcome
    /// has (numerically) zero probability.
    pub fn collapse_bell(
        &mut self,
        first: QubitLabel,
        second: QubitLabel,
        outcome: BellState,
    ) -> Result<f64, StateError> {
        let (p1, p2) = self.pair_positions(first, second)?;
        let vector = outcome.vector();
        // Block index convention: first qubit = bit 0, second = bit 1,
        // matching BellState::vector.
        let masks = [0usize, 1 << p1, 1 << p2, (1 << p1) | (1 << p2)];
        let block_mask = masks[3];
        let mut weight = 0.0;
        for base in 0..self.amps.len() {
            if base & block_mask != 0 {
                continue;
            }
            let a: Amplitude = vector
                .iter()
                .zip(masks)
                .map(|(coeff, mask)| coeff.conj() * self.amps[base | mask])
                .sum();
            weight += a.norm_sqr();
            for (coeff, mask) in vector.iter().zip(masks) {
                self.amps[base | mask] = a * coeff;
            }
        }
        if weight < 1e-30 {
            return Err(StateError::VanishingProjection(weight));
        }
        let scale = weight.sqrt().recip();
        for amp in &mut self.amps {
            *amp *= scale;
        }
        debug_assert!(self.norm_is_unit());
        Ok(weight)
    }

    /// Collapse one qubit onto a specific basis outcome without sampling.
    ///
    /// Returns the Born probability of that outcome. A numerically zero
    /// probability leaves the state untouched and returns `Ok(0.0)`, so
    /// branch enumerations can skip impossible outcomes.
    pub fn collapse_single(
        &mut self,
        qubit: QubitLabel,
        basis: BasisChoice,
        outcome: Bit,
    ) -> Result<f64, StateError> {
        let p = self.position(qubit)?;
        let mask = 1usize << p;
        let v = basis.state(outcome);
        let mut weight = 0.0;
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let a = v[0].conj() * self.amps[base] + v[1].conj() * self.amps[base | mask];
            weight += a.norm_sqr();
        }
        if weight < 1e-30 {
            return Ok(0.0);
        }
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let a = v[0].conj() * self.amps[base] + v[1].conj() * self.amps[base | mask];
            self.amps[base] = a * v[0];
            self.amps[base | mask] = a * v[1];
        }
        let scale = weight.sqrt().recip();
        for amp in &mut self.amps {
            *amp *= scale;
        }
        debug_assert!(self.norm_is_unit());
        Ok(weight)
    }

    /// Measure one qubit in the chosen basis; collapses in place.
    pub fn measure_single(
        &mut self,
        qubit: QubitLabel,
        basis: BasisChoice,
        rng: &mut RandomSource,
    ) -> Result<Bit, StateError> {
        let p = self.position(qubit)?;
        let mask = 1usize << p;
        let vectors = [basis.state(Bit::ZERO), basis.state(Bit::ONE)];
        let mut probs = [0.0; 2];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (b, v) in vectors.iter().enumerate() {
                let a = v[0].conj() * self.amps[base] + v[1].conj() * self.amps[base | mask];
                probs[b] += a.norm_sqr();
            }
        }
        let outcome = rng.weighted(&probs);
        let v = vectors[outcome];
        let mut weight = 0.0;
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let a = v[0].conj() * self.amps[base] + v[1].conj() * self.amps[base | mask];
            weight += a.norm_sqr();
            self.amps[base] = a * v[0];
            self.amps[base | mask] = a * v[1];
        }
        if weight < 1e-30 {
            return Err(StateError::VanishingProjection(weight));
        }
        let scale = weight.sqrt().recip();
        for amp in &mut self.amps {
            *amp *= scale;
        }
        debug_assert!(self.norm_is_unit());
        Ok(Bit::from(outcome == 1))
    }

    /// True when the norm is 1 within [`NORM_TOL`] and all amplitudes are finite.
    pub fn norm_is_unit(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
            && (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    pub(crate) fn from_parts(labels: Vec<QubitLabel>, amps: Vec<Amplitude>) -> Self {
        debug_assert_eq!(amps.len(), 1 << labels.len());
        Self { labels, amps }
    }

    pub(crate) fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            let scale = norm.recip();
            for amp in &mut self.amps {
                *amp *= scale;
            }
        }
    }

    fn pair_positions(
        &self,
        first: QubitLabel,
        second: QubitLabel,
    ) -> Result<(usize, usize), StateError> {
        if first == second {
            return Err(StateError::ControlEqualsTarget(first));
        }
        Ok((self.position(first)?, self.position(second)?))
    }

    /// Visit every 4-amplitude block spanned by the qubits at positions
    /// `(p1, p2)`, in block index convention `first=bit0, second=bit1`.
    fn for_each_pair_block(&self, p1: usize, p2: usize, mut f: impl FnMut(&[Amplitude; 4])) {
        let block_mask = (1usize << p1) | (1 << p2);
        for base in 0..self.amps.len() {
            if base & block_mask != 0 {
                continue;
            }
            let block = [
                self.amps[base],
                self.amps[base | (1 << p1)],
                self.amps[base | (1 << p2)],
                self.amps[base | (1 << p1) | (1 << p2)],
            ];
            f(&block);
        }
    }

    fn check_fresh(&self, label: QubitLabel) -> Result<(), StateError> {
        if self.contains(label) {
            Err(StateError::DuplicateLabel(label))
        } else {
            Ok(())
        }
    }

    fn check_capacity(&self, total: usize) -> Result<(), StateError> {
        if total > MAX_QUBITS {
            Err(StateError::RegisterTooLarge { requested: total })
        } else {
            Ok(())
        }
    }
}

fn block_inner(bra: &[Amplitude; 4], block: &[Amplitude; 4]) -> Amplitude {
    bra.iter().zip(block).map(|(b, a)| b.conj() * a).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::FRAC_1_SQRT_2;

    const Q1: QubitLabel = QubitLabel::new("q1");
    const Q2: QubitLabel = QubitLabel::new("q2");
    const Q3: QubitLabel = QubitLabel::new("q3");
    const Q4: QubitLabel = QubitLabel::new("q4");

    fn re(x: f64) -> Amplitude {
        Amplitude::new(x, 0.0)
    }

    #[test]
    fn make_state_single_zero() {
        let s = StateVector::make_state(&[StatePrep::bit(Q1, Bit::ZERO)]).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert!((s.amps()[0] - re(1.0)).norm() < 1e-15);
        assert!(s.amps()[1].norm() < 1e-15);
    }

    #[test]
    fn make_state_plus_tensor_zero() {
        // |+⟩ on q1 (bit 0), |0⟩ on q2 (bit 1); little-endian layout puts the
        // two occupied entries at indices 0b00 and 0b01.
        let s = StateVector::make_state(&[
            StatePrep::in_basis(Q1, BasisChoice::X, Bit::ZERO),
            StatePrep::bit(Q2, Bit::ZERO),
        ])
        .unwrap();
        assert!((s.amps()[0b00].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amps()[0b01].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.amps()[0b10].norm() < 1e-15);
        assert!(s.amps()[0b11].norm() < 1e-15);
    }

    #[test]
    fn make_state_bell_sandwich() {
        // |0⟩ ⊗ φ⁺ ⊗ |1⟩ = (|0⟩|00⟩|1⟩ + |0⟩|11⟩|1⟩)/√2.
        let s = StateVector::make_state(&[
            StatePrep::bit(Q1, Bit::ZERO),
            StatePrep::bell(Q2, Q3, BellState::PhiPlus),
            StatePrep::bit(Q4, Bit::ONE),
        ])
        .unwrap();
        assert_eq!(s.num_qubits(), 4);
        // q1=0, q2=0, q3=0, q4=1 → index 0b1000; q1=0,q2=1,q3=1,q4=1 → 0b1110.
        assert!((s.amps()[0b1000].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amps()[0b1110].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let occupied: f64 = s.amps()[0b1000].norm_sqr() + s.amps()[0b1110].norm_sqr();
        assert!((occupied - 1.0).abs() < 1e-14);
    }

    #[test]
    fn make_state_rejects_duplicates_and_non_unit() {
        let err = StateVector::make_state(&[StatePrep::bit(Q1, Bit::ZERO), StatePrep::bit(Q1, Bit::ONE)]);
        assert!(matches!(err, Err(StateError::DuplicateLabel(_))));
        let err = StateVector::make_state(&[StatePrep::Single(Q1, [re(0.5), re(0.5)])]);
        assert!(matches!(err, Err(StateError::NonUnitFactor { .. })));
    }

    #[test]
    fn cnot_pair_matches_known_expansion() {
        // CNOT(q2→q1) CNOT(q3→q4) on |0⟩₁ φ⁺₂₃ |1⟩₄ = (|00⟩₁₂|01⟩₃₄ + |11⟩₁₂|10⟩₃₄)/√2.
        let mut s = StateVector::make_state(&[
            StatePrep::bit(Q1, Bit::ZERO),
            StatePrep::bell(Q2, Q3, BellState::PhiPlus),
            StatePrep::bit(Q4, Bit::ONE),
        ])
        .unwrap();
        s.apply_cnot(Q2, Q1).unwrap();
        s.apply_cnot(Q3, Q4).unwrap();
        // |0011⟩ in (q1,q2,q3,q4) order: q4=1 → idx 0b1000. |1110⟩: q1=1,q2=1,q3=1 → 0b0111.
        assert!((s.amps()[0b1000].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amps()[0b0111].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < NORM_TOL);
    }

    #[test]
    fn cnot_identity_on_zero_control() {
        let mut s = StateVector::make_state(&[StatePrep::bit(Q1, Bit::ZERO), StatePrep::bit(Q2, Bit::ZERO)]).unwrap();
        let before = s.amps().to_vec();
        s.apply_cnot(Q1, Q2).unwrap();
        assert_eq!(s.amps(), &before[..]);
    }

    #[test]
    fn cnot_is_an_involution() {
        let mut s = StateVector::make_state(&[
            StatePrep::in_basis(Q1, BasisChoice::X, Bit::ZERO),
            StatePrep::bell(Q2, Q3, BellState::PsiMinus),
        ])
        .unwrap();
        let before = s.amps().to_vec();
        s.apply_cnot(Q1, Q3).unwrap();
        s.apply_cnot(Q1, Q3).unwrap();
        for (a, b) in s.amps().iter().zip(&before) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn cnot_rejects_bad_labels() {
        let mut s = StateVector::make_state(&[StatePrep::bit(Q1, Bit::ZERO), StatePrep::bit(Q2, Bit::ZERO)]).unwrap();
        assert!(matches!(s.apply_cnot(Q1, Q1), Err(StateError::ControlEqualsTarget(_))));
        assert!(matches!(s.apply_cnot(Q1, Q4), Err(StateError::UnknownLabel(_))));
    }

    #[test]
    fn isometry_identity_appends_factor_ancilla() {
        // Columns |0⟩|0⟩, |1⟩|0⟩: the register is unchanged apart from a
        // fresh ancilla in |0⟩.
        let anc = QubitLabel::new("anc");
        let mut s = StateVector::make_state(&[StatePrep::in_basis(Q1, BasisChoice::X, Bit::ZERO)]).unwrap();
        let columns = IsometryColumns {
            zero_image: vec![re(1.0), ZERO, ZERO, ZERO],
            one_image: vec![ZERO, re(1.0), ZERO, ZERO],
        };
        s.apply_isometry(Q1, &[anc], &columns).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert!((s.amps()[0b00].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amps()[0b01].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.amps()[0b10].norm() + s.amps()[0b11].norm() < 1e-15);
    }

    #[test]
    fn isometry_rejects_non_orthogonal_columns() {
        let anc = QubitLabel::new("anc");
        let mut s = StateVector::make_state(&[StatePrep::bit(Q1, Bit::ZERO)]).unwrap();
        let columns = IsometryColumns {
            zero_image: vec![re(1.0), ZERO, ZERO, ZERO],
            one_image: vec![re(1.0), ZERO, ZERO, ZERO],
        };
        let err = s.apply_isometry(Q1, &[anc], &columns);
        assert!(matches!(err, Err(StateError::InvalidIsometry { .. })));
    }

    #[test]
    fn isometry_preserves_norm_for_random_valid_columns() {
        // 100 random two-ancilla isometries built by Gram-Schmidt.
        let mut rng = RandomSource::from_seed(2024);
        for _ in 0..100 {
            let mut c0: Vec<Amplitude> = (0..8)
                .map(|_| Amplitude::new(rng.uniform() - 0.5, rng.uniform() - 0.5))
                .collect();
            let n0: f64 = c0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            c0.iter_mut().for_each(|a| *a /= n0);
            let mut c1: Vec<Amplitude> = (0..8)
                .map(|_| Amplitude::new(rng.uniform() - 0.5, rng.uniform() - 0.5))
                .collect();
            let overlap: Amplitude = c0.iter().zip(&c1).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in c1.iter_mut().zip(&c0) {
                *x -= overlap * y;
            }
            let n1: f64 = c1.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            c1.iter_mut().for_each(|a| *a /= n1);

            let a0 = QubitLabel::new("a0");
            let a1 = QubitLabel::new("a1");
            let mut s = StateVector::make_state(&[
                StatePrep::bell(Q1, Q2, BellState::PhiMinus),
                StatePrep::in_basis(Q3, BasisChoice::X, Bit::ONE),
            ])
            .unwrap();
            s.apply_isometry(Q2, &[a0, a1], &IsometryColumns { zero_image: c0.clone(), one_image: c1.clone() })
                .unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < NORM_TOL, "norm drifted: {}", s.norm_sqr());
        }
    }

    #[test]
    fn bell_probabilities_sum_to_one() {
        let mut s = StateVector::make_state(&[
            StatePrep::bell(Q1, Q2, BellState::PsiPlus),
            StatePrep::in_basis(Q3, BasisChoice::X, Bit::ZERO),
            StatePrep::bit(Q4, Bit::ONE),
        ])
        .unwrap();
        s.apply_cnot(Q3, Q2).unwrap();
        s.apply_cnot(Q1, Q4).unwrap();
        let probs = s.bell_probabilities(Q1, Q3).unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < NORM_TOL);
    }

    #[test]
    fn measure_bell_on_eigenstate_is_certain() {
        let mut rng = RandomSource::from_seed(1);
        for bell in BellState::ALL {
            let mut s = StateVector::make_state(&[
                StatePrep::bell(Q1, Q2, bell),
                StatePrep::bit(Q3, Bit::ONE),
            ])
            .unwrap();
            let outcome = s.measure_bell(Q1, Q2, &mut rng).unwrap();
            assert_eq!(outcome, bell);
        }
    }

    #[test]
    fn repeated_bell_measurement_is_stable() {
        let mut rng = RandomSource::from_seed(33);
        for trial in 0..20 {
            let mut s = StateVector::make_state(&[
                StatePrep::bit(Q1, Bit::ZERO),
                StatePrep::bell(Q2, Q3, BellState::PhiPlus),
                StatePrep::bit(Q4, Bit::from(trial % 2 == 0)),
            ])
            .unwrap();
            s.apply_cnot(Q2, Q1).unwrap();
            s.apply_cnot(Q3, Q4).unwrap();
            let first = s.measure_bell(Q1, Q2, &mut rng).unwrap();
            let again = s.measure_bell(Q1, Q2, &mut rng).unwrap();
            assert_eq!(first, again);
        }
    }

    #[test]
    fn measure_single_certain_cases() {
        let mut rng = RandomSource::from_seed(4);
        let mut s = StateVector::make_state(&[StatePrep::bit(Q1, Bit::ZERO)]).unwrap();
        assert_eq!(s.measure_single(Q1, BasisChoice::Z, &mut rng).unwrap(), Bit::ZERO);

        let mut s = StateVector::make_state(&[StatePrep::in_basis(Q1, BasisChoice::X, Bit::ONE)]).unwrap();
        assert_eq!(s.measure_single(Q1, BasisChoice::X, &mut rng).unwrap(), Bit::ONE);
    }

    #[test]
    fn measure_single_plus_in_z_is_unbiased() {
        let mut rng = RandomSource::from_seed(6);
        let n = 20_000;
        let mut ones = 0usize;
        for _ in 0..n {
            let mut s = StateVector::make_state(&[StatePrep::in_basis(Q1, BasisChoice::X, Bit::ZERO)]).unwrap();
            if s.measure_single(Q1, BasisChoice::Z, &mut rng).unwrap() == Bit::ONE {
                ones += 1;
            }
        }
        // 3σ band around 1/2 for a binomial with n draws.
        let sigma = (0.25 / n as f64).sqrt();
        let p = ones as f64 / n as f64;
        assert!((p - 0.5).abs() < 3.0 * sigma, "p = {p}");
    }

    #[test]
    fn same_seed_same_measurement_record() {
        let run = |seed: u64| -> Vec<BellState> {
            let mut rng = RandomSource::from_seed(seed);
            (0..50)
                .map(|_| {
                    let mut s = StateVector::make_state(&[
                        StatePrep::bit(Q1, Bit::ZERO),
                        StatePrep::bell(Q2, Q3, BellState::PhiPlus),
                        StatePrep::bit(Q4, Bit::ONE),
                    ])
                    .unwrap();
                    s.apply_cnot(Q2, Q1).unwrap();
                    s.apply_cnot(Q3, Q4).unwrap();
                    s.measure_bell(Q1, Q2, &mut rng).unwrap()
                })
                .collect()
        };
        assert_eq!(run(77), run(77));
    }
}
