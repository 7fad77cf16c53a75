//! Closed-form security curves.
//!
//! Each curve returns the published formula value; where an independent
//! derivation disagrees with the published form, both are exposed and the
//! pair is reported side by side (the simulation is the ground truth the
//! acceptance suite pins).

use crate::adversary::{CollectiveParams, ImpersonationParams};
use crate::protocol::Bit;

/// Binary entropy in bits, with h₂(0) = h₂(1) = 0.
///
/// Panics outside [0, 1].
pub fn binary_entropy(q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&q), "binary_entropy domain is [0,1], got {q}");
    if q == 0.0 || q == 1.0 {
        return 0.0;
    }
    -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
}

/// A published closed form paired with an independently derived oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePair {
    pub closed_form: f64,
    pub derived: f64,
}

/// Minimal detection probability of the balanced collective attack at
/// overlap angle α.
///
/// Published form: ½(1 + cos²α). The branch-interference derivation gives
/// ½(1 − cos²α) instead (0 at α = 0, ½ at α = π/2); simulation follows the
/// derived value.
pub fn curve_detection_min(alpha: f64) -> CurvePair {
    assert!(
        (0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&alpha),
        "alpha domain is [0, π/2], got {alpha}"
    );
    let c2 = alpha.cos().powi(2);
    CurvePair {
        closed_form: 0.5 * (1.0 + c2),
        derived: 0.5 * (1.0 - c2),
    }
}

/// Eavesdropper information on one key bit under the balanced collective
/// attack: ½[1 − h₂((1 − sin²α)/2)].
pub fn curve_eve_information(alpha: f64) -> f64 {
    assert!(
        (0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&alpha),
        "alpha domain is [0, π/2], got {alpha}"
    );
    let s2 = alpha.sin().powi(2);
    0.5 * (1.0 - binary_entropy((1.0 - s2) / 2.0))
}

/// The eavesdropper's inference error rate: (1 − sin α_ζ sin α_η)/2.
pub fn curve_qber(alpha_zeta: f64, alpha_eta: f64) -> f64 {
    for a in [alpha_zeta, alpha_eta] {
        assert!(
            (0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&a),
            "angle domain is [0, π/2], got {a}"
        );
    }
    (1.0 - alpha_zeta.sin() * alpha_eta.sin()) / 2.0
}

/// Probability of obtaining all `n` key bits undetected and correct:
/// [½(1 − d)]ⁿ.
pub fn curve_success(n: usize, d: f64) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    assert!((0.0..=1.0).contains(&d), "d domain is [0,1], got {d}");
    (0.5 * (1.0 - d)).powi(n as i32)
}

/// The value quoted alongside the success formula for (n = 6, d = 25%).
/// Direct evaluation of the formula gives 2.781e-3; the quote differs and is
/// reported with a discrepancy flag rather than matched.
pub const QUOTED_SUCCESS_N6_D25: f64 = 2.629e-3;

/// Published general detection probability of the collective attack
/// (all `+cos·cos` cross terms).
pub fn collective_detection_closed_form(p: &CollectiveParams) -> f64 {
    collective_detection_with_sign(p, 1.0)
}

/// Independently derived detection probability (all `−cos·cos` cross
/// terms), obtained by projecting the post-CNOT state onto the outcomes
/// outside the expected set. This is what the exact simulation reproduces.
pub fn collective_detection_derived(p: &CollectiveParams) -> f64 {
    collective_detection_with_sign(p, -1.0)
}

fn collective_detection_with_sign(p: &CollectiveParams, sign: f64) -> f64 {
    let (az2, bz2) = (p.a_zeta * p.a_zeta, p.b_zeta * p.b_zeta);
    let (ae2, be2) = (p.a_eta * p.a_eta, p.b_eta * p.b_eta);
    let (caz, cbz) = (p.alpha_zeta.cos(), p.beta_zeta.cos());
    let (cae, cbe) = (p.alpha_eta.cos(), p.beta_eta.cos());
    0.5 * (az2 * ae2 * (1.0 + sign * caz * cae)
        + az2 * be2 * (1.0 + sign * caz * cbe)
        + bz2 * ae2 * (1.0 + sign * cbz * cae)
        + bz2 * be2 * (1.0 + sign * cbz * cbe))
}

/// Per-preparation detection probability of the impersonation attack:
/// ½[1 ∓ 2Re(a·conj(d) + b·conj(c))], the sign set by the controller bit.
/// Averaged over the eight preparations this is exactly ½ for any
/// normalized amplitudes.
pub fn impersonation_detection_by_charlie_bit(params: &ImpersonationParams, charlie: Bit) -> f64 {
    let cross = 2.0 * (params.a * params.d.conj() + params.b * params.c.conj()).re;
    if charlie.is_one() {
        0.5 * (1.0 + cross)
    } else {
        0.5 * (1.0 - cross)
    }
}

/// Exact eight-preparation average of the impersonation detection
/// probability (= ½ identically).
pub fn impersonation_detection_average(params: &ImpersonationParams) -> f64 {
    0.5 * (impersonation_detection_by_charlie_bit(params, Bit::ZERO)
        + impersonation_detection_by_charlie_bit(params, Bit::ONE))
}

/// Hand-derived detection probability of double intercept-resend on the
/// signal channels: basis cases (Z,Z), (Z,X), (X,Z) each detect with ½ and
/// (X,X) never does, averaging 3/8 for every preparation.
pub const INTERCEPT_RESEND_SIGNAL_DETECTION: f64 = 0.375;
