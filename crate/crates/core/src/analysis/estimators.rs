//! Monte Carlo estimators with exact analytic counterparts.
//!
//! Every estimator takes a master [`RandomSource`] and derives one
//! independent stream per session, so results are deterministic for a given
//! seed regardless of the worker pool's scheduling.

use rayon::prelude::*;

use crate::adversary::{
    impersonate_source, AttackStrategy, CollectiveAttack, CollectiveParams, EveReadout,
};
use crate::analysis::{
    binary_entropy, collective_detection_closed_form, collective_detection_derived,
    impersonation_detection_average, AnalysisError, MetricsReport,
    INTERCEPT_RESEND_SIGNAL_DETECTION,
};
use crate::protocol::{
    detection_event, run_key_bit, BitRun, PairSource, Preparation, ProtocolError, LABEL_ALICE,
    LABEL_BOB, LABEL_TO_ALICE, LABEL_TO_BOB,
};
use crate::qcore::{BasisChoice, BellState, BraFactor, StatePrep, StateVector};
use crate::rng::RandomSource;

/// Prebuilt per-attack context; cheap per-session instrument construction.
struct AttackContext {
    source: Option<PairSource>,
    collective: Option<CollectiveAttack>,
    intercept: bool,
}

impl AttackContext {
    fn new(attack: &AttackStrategy) -> Result<Self, AnalysisError> {
        Ok(match attack {
            AttackStrategy::None => Self { source: None, collective: None, intercept: false },
            AttackStrategy::Impersonation(p) => Self {
                source: Some(impersonate_source(p)?),
                collective: None,
                intercept: false,
            },
            AttackStrategy::Collective(p) => Self {
                source: None,
                collective: Some(CollectiveAttack::new(*p)?),
                intercept: false,
            },
            AttackStrategy::InterceptResend => {
                Self { source: None, collective: None, intercept: true }
            }
        })
    }

    fn run_bit(&self, prep: Preparation, rng: &mut RandomSource) -> Result<BitRun, ProtocolError> {
        use crate::adversary::InterceptResendTap;
        match (&self.collective, self.intercept) {
            (Some(attack), _) => {
                let mut tap_a = attack.tap_to_alice();
                let mut tap_b = attack.tap_to_bob();
                run_key_bit(prep, None, Some(&mut tap_a), Some(&mut tap_b), rng)
            }
            (None, true) => {
                let mut tap_a = InterceptResendTap::new();
                let mut tap_b = InterceptResendTap::new();
                run_key_bit(prep, None, Some(&mut tap_a), Some(&mut tap_b), rng)
            }
            (None, false) => run_key_bit(prep, self.source.as_ref(), None, None, rng),
        }
    }
}

fn random_prep(rng: &mut RandomSource) -> Preparation {
    Preparation::new(rng.bit(), rng.bit(), rng.bit())
}

/// Exact joint Born distribution over the participants' Bell outcomes.
fn exact_joint_distribution(state: &StateVector) -> Result<[[f64; 4]; 4], AnalysisError> {
    let mut dist = [[0.0; 4]; 4];
    for (i, a) in BellState::ALL.iter().enumerate() {
        for (j, b) in BellState::ALL.iter().enumerate() {
            dist[i][j] = state.projection_weight(&[
                BraFactor::bell(LABEL_ALICE, LABEL_TO_ALICE, *a),
                BraFactor::bell(LABEL_TO_BOB, LABEL_BOB, *b),
            ])?;
        }
    }
    Ok(dist)
}

fn detection_from_distribution(prep: Preparation, dist: &[[f64; 4]; 4]) -> f64 {
    let mut accepted = 0.0;
    for outcome in prep.expected_outcomes() {
        let i = BellState::ALL.iter().position(|&s| s == outcome.alice).unwrap();
        let j = BellState::ALL.iter().position(|&s| s == outcome.bob).unwrap();
        accepted += dist[i][j];
    }
    1.0 - accepted
}

/// Exact (enumerated, no sampling) detection probability of an attack for
/// one preparation.
pub fn detection_probability_exact(
    attack: &AttackStrategy,
    prep: Preparation,
) -> Result<f64, AnalysisError> {
    match attack {
        AttackStrategy::None => Ok(0.0),
        AttackStrategy::Impersonation(params) => {
            let source = impersonate_source(params)?;
            let state = exact_encoded_state(prep, Some(&source), None)?;
            Ok(detection_from_distribution(prep, &exact_joint_distribution(&state)?))
        }
        AttackStrategy::Collective(params) => {
            let attack = CollectiveAttack::new(*params)?;
            let state = exact_encoded_state(prep, None, Some(&attack))?;
            Ok(detection_from_distribution(prep, &exact_joint_distribution(&state)?))
        }
        AttackStrategy::InterceptResend => intercept_resend_detection_exact(prep),
    }
}

/// Exact detection probability averaged over the eight preparations.
pub fn detection_probability_exact_average(attack: &AttackStrategy) -> Result<f64, AnalysisError> {
    let mut total = 0.0;
    for prep in Preparation::all() {
        total += detection_probability_exact(attack, prep)?;
    }
    Ok(total / 8.0)
}

/// Exact per-preparation detection probabilities, preparation order
/// (controller, alice, bob) counting in binary.
pub fn detection_probability_exact_by_prep(
    attack: &AttackStrategy,
) -> Result<[f64; 8], AnalysisError> {
    let mut out = [0.0; 8];
    for (i, prep) in Preparation::all().enumerate() {
        out[i] = detection_probability_exact(attack, prep)?;
    }
    Ok(out)
}

/// Deterministic assembly of the post-CNOT state (independent of the
/// session runner): source, optional entangling taps, fresh qubits, CNOTs.
fn exact_encoded_state(
    prep: Preparation,
    source: Option<&PairSource>,
    collective: Option<&CollectiveAttack>,
) -> Result<StateVector, AnalysisError> {
    let mut state = match source {
        Some(pair) => {
            let mut s = StateVector::make_state(&[StatePrep::bit(LABEL_ALICE, prep.alice)])?;
            s.extend_with_pair_state(LABEL_TO_ALICE, LABEL_TO_BOB, pair.register_vector())?;
            s
        }
        None => {
            let mut s = StateVector::make_state(&[StatePrep::bit(LABEL_ALICE, prep.alice)])?;
            s.extend_with_pair(LABEL_TO_ALICE, LABEL_TO_BOB, prep.charlie_state())?;
            s
        }
    };
    if let Some(attack) = collective {
        let mut rng = RandomSource::from_seed(0); // entangling taps draw nothing
        let mut tap_a = attack.tap_to_alice();
        let mut tap_b = attack.tap_to_bob();
        use crate::protocol::transmit;
        transmit(&mut state, LABEL_TO_ALICE, Some(&mut tap_a), &mut rng)?;
        transmit(&mut state, LABEL_TO_BOB, Some(&mut tap_b), &mut rng)?;
    }
    state.apply_cnot(LABEL_TO_ALICE, LABEL_ALICE)?;
    state.extend_with_qubit(LABEL_BOB, BasisChoice::Z.state(prep.bob))?;
    state.apply_cnot(LABEL_TO_BOB, LABEL_BOB)?;
    Ok(state)
}

/// Exact detection probability of double intercept-resend by enumerating
/// the eavesdropper's basis choices and outcomes.
fn intercept_resend_detection_exact(prep: Preparation) -> Result<f64, AnalysisError> {
    let bases = [BasisChoice::Z, BasisChoice::X];
    let bits = [crate::protocol::Bit::ZERO, crate::protocol::Bit::ONE];
    let mut detection = 0.0;
    for basis_a in bases {
        for basis_b in bases {
            for s in bits {
                for t in bits {
                    let mut state = StateVector::make_state(&[StatePrep::bell(
                        LABEL_TO_ALICE,
                        LABEL_TO_BOB,
                        prep.charlie_state(),
                    )])?;
                    let w1 = state.collapse_single(LABEL_TO_ALICE, basis_a, s)?;
                    if w1 == 0.0 {
                        continue;
                    }
                    let w2 = state.collapse_single(LABEL_TO_BOB, basis_b, t)?;
                    if w2 == 0.0 {
                        continue;
                    }
                    state.extend_with_qubit(LABEL_ALICE, BasisChoice::Z.state(prep.alice))?;
                    state.apply_cnot(LABEL_TO_ALICE, LABEL_ALICE)?;
                    state.extend_with_qubit(LABEL_BOB, BasisChoice::Z.state(prep.bob))?;
                    state.apply_cnot(LABEL_TO_BOB, LABEL_BOB)?;
                    let dist = exact_joint_distribution(&state)?;
                    detection += 0.25 * w1 * w2 * detection_from_distribution(prep, &dist);
                }
            }
        }
    }
    Ok(detection)
}

fn closed_forms_for(attack: &AttackStrategy) -> Result<(f64, Option<f64>), AnalysisError> {
    Ok(match attack {
        AttackStrategy::None => (0.0, Some(0.0)),
        AttackStrategy::Impersonation(p) => (0.5, Some(impersonation_detection_average(p))),
        AttackStrategy::Collective(p) => (
            collective_detection_closed_form(p),
            Some(collective_detection_derived(p)),
        ),
        AttackStrategy::InterceptResend => (
            INTERCEPT_RESEND_SIGNAL_DETECTION,
            Some(detection_probability_exact_average(&AttackStrategy::InterceptResend)?),
        ),
    })
}

/// Monte Carlo detection probability under `attack` over single-bit
/// sessions with uniformly random preparations.
pub fn estimate_detection(
    attack: &AttackStrategy,
    sessions: u64,
    master: &RandomSource,
) -> Result<MetricsReport, AnalysisError> {
    if sessions == 0 {
        return Err(AnalysisError::ZeroSessions);
    }
    let context = AttackContext::new(attack)?;
    let detections = (0..sessions)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.derive(i);
            let prep = random_prep(&mut rng);
            let run = context.run_bit(prep, &mut rng).expect("session must run");
            u64::from(detection_event(prep, run.outcome_alice, run.outcome_bob))
        })
        .sum::<u64>();
    let (closed_form, derived) = closed_forms_for(attack)?;
    Ok(MetricsReport::binomial(detections, sessions, closed_form, derived))
}

/// Monte Carlo detection probability for one fixed preparation.
pub fn estimate_detection_for_prep(
    attack: &AttackStrategy,
    prep: Preparation,
    sessions: u64,
    master: &RandomSource,
) -> Result<MetricsReport, AnalysisError> {
    if sessions == 0 {
        return Err(AnalysisError::ZeroSessions);
    }
    let context = AttackContext::new(attack)?;
    let detections = (0..sessions)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.derive(i);
            let run = context.run_bit(prep, &mut rng).expect("session must run");
            u64::from(detection_event(prep, run.outcome_alice, run.outcome_bob))
        })
        .sum::<u64>();
    let exact = detection_probability_exact(attack, prep)?;
    let (closed_form, _) = closed_forms_for(attack)?;
    Ok(MetricsReport::binomial(detections, sessions, closed_form, Some(exact)))
}

struct ReadoutTally {
    undetected: u64,
    disagreements: u64,
    /// joint counts[true key][informed guess]
    histogram: [[u64; 2]; 2],
}

/// Shared loop for the readout-based estimators: run `sessions` single-bit
/// collective sessions, apply the ancilla readout on undetected ones.
fn readout_tally(
    params: &CollectiveParams,
    sessions: u64,
    master: &RandomSource,
) -> Result<ReadoutTally, AnalysisError> {
    let attack = CollectiveAttack::new(*params)?;
    let readout = EveReadout::new(&attack)?;
    let tally = (0..sessions)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.derive(i);
            let prep = random_prep(&mut rng);
            let mut tap_a = attack.tap_to_alice();
            let mut tap_b = attack.tap_to_bob();
            let run = run_key_bit(prep, None, Some(&mut tap_a), Some(&mut tap_b), &mut rng)
                .expect("session must run");
            if detection_event(prep, run.outcome_alice, run.outcome_bob) {
                return None;
            }
            let ancillas = run.ancillas.as_ref().expect("collective taps leave ancillas");
            let entry = readout
                .measure_and_guess(ancillas, prep.charlie, &mut rng)
                .expect("readout applies to flip-free sessions");
            Some((entry.discrimination_disagreement(), prep.key_bit()))
        })
        .fold(
            || ReadoutTally { undetected: 0, disagreements: 0, histogram: [[0; 2]; 2] },
            |mut acc, item| {
                if let Some((disagrees, truth)) = item {
                    acc.undetected += 1;
                    acc.disagreements += u64::from(disagrees);
                    let informed_guess = truth ^ crate::protocol::Bit::from(disagrees);
                    acc.histogram[truth.value() as usize][informed_guess.value() as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || ReadoutTally { undetected: 0, disagreements: 0, histogram: [[0; 2]; 2] },
            |mut a, b| {
                a.undetected += b.undetected;
                a.disagreements += b.disagreements;
                for i in 0..2 {
                    for j in 0..2 {
                        a.histogram[i][j] += b.histogram[i][j];
                    }
                }
                a
            },
        );
    if tally.undetected == 0 {
        return Err(AnalysisError::NoUndetectedSessions);
    }
    Ok(tally)
}

/// QBER of the eavesdropper's inference: disagreement rate of the two
/// discrimination outcomes over undetected sessions, against the closed
/// form (1 − sin α_ζ sin α_η)/2.
pub fn estimate_qber(
    params: &CollectiveParams,
    key_bits: u64,
    master: &RandomSource,
) -> Result<MetricsReport, AnalysisError> {
    if key_bits == 0 {
        return Err(AnalysisError::ZeroSessions);
    }
    let tally = readout_tally(params, key_bits, master)?;
    let closed_form = (1.0 - params.alpha_zeta.sin() * params.alpha_eta.sin()) / 2.0;
    Ok(MetricsReport::binomial(
        tally.disagreements,
        tally.undetected,
        closed_form,
        None,
    ))
}

/// Plug-in mutual information between the true key bit and the
/// eavesdropper's informed guess over undetected sessions, halved by the
/// outcome-symmetry factor (both legitimate outcome branches are identical
/// and equiprobable for either ancilla branch, so only half the channel
/// pertains to the key).
pub fn estimate_mutual_information(
    params: &CollectiveParams,
    key_bits: u64,
    master: &RandomSource,
) -> Result<MetricsReport, AnalysisError> {
    if key_bits == 0 {
        return Err(AnalysisError::ZeroSessions);
    }
    let tally = readout_tally(params, key_bits, master)?;
    let estimate = 0.5 * plug_in_mutual_information(&tally.histogram);

    let q_hat = tally.disagreements as f64 / tally.undetected as f64;
    let q_formula = (1.0 - params.alpha_zeta.sin() * params.alpha_eta.sin()) / 2.0;
    let closed_form = 0.5 * (1.0 - binary_entropy(q_formula.clamp(0.0, 1.0)));

    // Delta-method error bar: σ_I ≈ |dI/dq| σ_q from the q-parametrized
    // curve; zero when the discrimination is error-free.
    let sigma_q = (q_hat * (1.0 - q_hat) / tally.undetected as f64).sqrt();
    let std_error = if sigma_q == 0.0 {
        0.0
    } else {
        let dq = sigma_q.max(1e-6);
        let lo = (q_hat - dq).clamp(0.0, 1.0);
        let hi = (q_hat + dq).clamp(0.0, 1.0);
        let slope = ((0.5 * (1.0 - binary_entropy(hi))) - (0.5 * (1.0 - binary_entropy(lo)))).abs()
            / (hi - lo);
        slope * sigma_q
    };
    Ok(MetricsReport::new(
        estimate,
        std_error,
        tally.undetected,
        closed_form,
        None,
    ))
}

fn plug_in_mutual_information(counts: &[[u64; 2]; 2]) -> f64 {
    let total: u64 = counts.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let mut mi = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let nij = counts[i][j] as f64;
            if nij == 0.0 {
                continue;
            }
            let ni: u64 = counts[i].iter().sum();
            let nj: u64 = counts[0][j] + counts[1][j];
            mi += (nij / n) * ((nij * n) / (ni as f64 * nj as f64)).log2();
        }
    }
    mi.max(0.0)
}

/// Success-probability estimate together with the detection rate measured
/// in the same runs.
#[derive(Clone, Debug)]
pub struct SuccessEstimate {
    pub report: MetricsReport,
    pub measured_detection: f64,
}

/// Probability that the eavesdropper obtains all `n` key bits of a session
/// while staying undetected on every bit.
///
/// `closed_form` composes the analytic detection value; `closed_form_derived`
/// composes the detection rate measured in these very runs, which is the
/// oracle the simulation is checked against.
pub fn estimate_success(
    params: &CollectiveParams,
    n: usize,
    sessions: u64,
    master: &RandomSource,
) -> Result<SuccessEstimate, AnalysisError> {
    if sessions == 0 || n == 0 {
        return Err(AnalysisError::ZeroSessions);
    }
    let attack = CollectiveAttack::new(*params)?;
    let readout = EveReadout::new(&attack)?;
    let (successes, detections) = (0..sessions)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.derive(i);
            let mut all_good = true;
            let mut detected_bits = 0u64;
            for _ in 0..n {
                let prep = random_prep(&mut rng);
                let mut tap_a = attack.tap_to_alice();
                let mut tap_b = attack.tap_to_bob();
                let run = run_key_bit(prep, None, Some(&mut tap_a), Some(&mut tap_b), &mut rng)
                    .expect("session must run");
                if detection_event(prep, run.outcome_alice, run.outcome_bob) {
                    detected_bits += 1;
                    all_good = false;
                    continue;
                }
                let ancillas = run.ancillas.as_ref().expect("collective taps leave ancillas");
                let entry = readout
                    .measure_and_guess(ancillas, prep.charlie, &mut rng)
                    .expect("readout applies to flip-free sessions");
                if entry.guess != prep.key_bit() {
                    all_good = false;
                }
            }
            (u64::from(all_good), detected_bits)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let measured_detection = detections as f64 / (sessions * n as u64) as f64;
    let closed_form = crate::analysis::curve_success(n, collective_detection_derived(params));
    let derived = crate::analysis::curve_success(n, measured_detection);
    let report = MetricsReport::binomial(successes, sessions, closed_form, Some(derived));
    Ok(SuccessEstimate { report, measured_detection })
}

/// The published-vs-evaluated check for the quoted (n = 6, d = 25%) success
/// probability; always carries the discrepancy flag.
pub fn success_quote_check() -> MetricsReport {
    let evaluated = crate::analysis::curve_success(6, 0.25);
    MetricsReport::analytic(evaluated, crate::analysis::QUOTED_SUCCESS_N6_D25, Some(evaluated))
}
