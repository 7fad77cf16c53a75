//! Source impersonation: the eavesdropper replaces the distributed Bell pair
//! with her own generalized two-qubit state `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`.
//!
//! She cannot correlate the injected state with the controller's classical
//! record, so averaged over the eight preparation combinations the honest
//! parties detect each transmission with probability exactly ½ regardless of
//! (a, b, c, d).

use crate::adversary::AdversaryError;
use crate::protocol::PairSource;
use crate::qcore::Amplitude;
use crate::rng::RandomSource;

const NORM_TOL: f64 = 1e-12;

/// Amplitudes of the injected two-qubit state over `{|00⟩,|01⟩,|10⟩,|11⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpersonationParams {
    pub a: Amplitude,
    pub b: Amplitude,
    pub c: Amplitude,
    pub d: Amplitude,
}

impl ImpersonationParams {
    pub fn new(a: Amplitude, b: Amplitude, c: Amplitude, d: Amplitude) -> Result<Self, AdversaryError> {
        let sum = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(AdversaryError::NotNormalized { sum });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_reals(v: [f64; 4]) -> Result<Self, AdversaryError> {
        Self::new(
            Amplitude::new(v[0], 0.0),
            Amplitude::new(v[1], 0.0),
            Amplitude::new(v[2], 0.0),
            Amplitude::new(v[3], 0.0),
        )
    }

    /// Haar-style random state: eight independent gaussians, normalized.
    pub fn random(rng: &mut RandomSource) -> Self {
        let mut gauss = || {
            // Box-Muller from two uniform draws.
            let u1 = rng.uniform().max(f64::MIN_POSITIVE);
            let u2 = rng.uniform();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let raw = [
            Amplitude::new(gauss(), gauss()),
            Amplitude::new(gauss(), gauss()),
            Amplitude::new(gauss(), gauss()),
            Amplitude::new(gauss(), gauss()),
        ];
        let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Self {
            a: raw[0] / norm,
            b: raw[1] / norm,
            c: raw[2] / norm,
            d: raw[3] / norm,
        }
    }

    pub fn amplitudes(&self) -> [Amplitude; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Build the source override that injects the impersonated state in place of
/// every distributed pair.
pub fn impersonate_source(params: &ImpersonationParams) -> Result<PairSource, AdversaryError> {
    PairSource::new(params.amplitudes()).map_err(AdversaryError::from)
}
