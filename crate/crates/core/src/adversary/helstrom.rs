//! Optimal discrimination between two pure states.
//!
//! For two unit states with real overlap cos α the optimal projective
//! measurement identifies the prepared state with probability ½(1 + sin α).
//! The measurement is built explicitly (projectors symmetric about the pair's
//! bisector) and outcomes are Born-sampled, so that success rate emerges from
//! the projection arithmetic instead of being injected as a coin flip.

use crate::qcore::Amplitude;
use crate::rng::RandomSource;

/// Two-outcome discriminator for a fixed pair of unit vectors.
#[derive(Clone, Debug)]
pub struct Discriminator {
    outcomes: Option<[Vec<Amplitude>; 2]>,
}

impl Discriminator {
    /// Build the optimal measurement for the (equal-prior) pair `(s0, s1)`.
    ///
    /// Degenerate pairs (equal up to global sign) admit no informative
    /// measurement; the discriminator then returns unbiased coin flips.
    pub fn new(s0: &[Amplitude], s1: &[Amplitude]) -> Self {
        assert_eq!(s0.len(), s1.len(), "states must share a dimension");
        let sum: Vec<Amplitude> = s0.iter().zip(s1).map(|(a, b)| a + b).collect();
        let diff: Vec<Amplitude> = s0.iter().zip(s1).map(|(a, b)| a - b).collect();
        let sum_norm = norm(&sum);
        let diff_norm = norm(&diff);
        if sum_norm < 1e-9 || diff_norm < 1e-9 {
            return Self { outcomes: None };
        }
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let e_plus: Vec<Amplitude> = sum.iter().map(|a| a / sum_norm).collect();
        let e_minus: Vec<Amplitude> = diff.iter().map(|a| a / diff_norm).collect();
        let m0: Vec<Amplitude> = e_plus
            .iter()
            .zip(&e_minus)
            .map(|(p, m)| (p + m) * inv_sqrt2)
            .collect();
        let m1: Vec<Amplitude> = e_plus
            .iter()
            .zip(&e_minus)
            .map(|(p, m)| (p - m) * inv_sqrt2)
            .collect();
        Self { outcomes: Some([m0, m1]) }
    }

    /// Born-sample the measurement on `state` (assumed inside span{s0, s1}).
    /// Returns the index of the identified state.
    pub fn measure(&self, state: &[Amplitude], rng: &mut RandomSource) -> usize {
        match &self.outcomes {
            None => rng.index(2),
            Some([m0, m1]) => {
                let p0 = inner(m0, state).norm_sqr();
                let p1 = inner(m1, state).norm_sqr();
                rng.weighted(&[p0, p1])
            }
        }
    }

    /// Closed-form success probability given the pair overlap cos α.
    pub fn success_probability(overlap: f64) -> f64 {
        0.5 * (1.0 + (1.0 - overlap * overlap).max(0.0).sqrt())
    }
}

fn inner(bra: &[Amplitude], ket: &[Amplitude]) -> Amplitude {
    bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
}

fn norm(v: &[Amplitude]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Amplitude {
        Amplitude::new(x, 0.0)
    }

    #[test]
    fn orthogonal_states_are_perfectly_distinguished() {
        let s0 = [re(1.0), re(0.0)];
        let s1 = [re(0.0), re(1.0)];
        let d = Discriminator::new(&s0, &s1);
        let mut rng = RandomSource::from_seed(1);
        for _ in 0..100 {
            assert_eq!(d.measure(&s0, &mut rng), 0);
            assert_eq!(d.measure(&s1, &mut rng), 1);
        }
    }

    #[test]
    fn identical_states_give_coin_flips() {
        let s = [re(1.0), re(0.0)];
        let d = Discriminator::new(&s, &s);
        let mut rng = RandomSource::from_seed(2);
        let n = 20_000;
        let hits = (0..n).filter(|_| d.measure(&s, &mut rng) == 0).count();
        let sigma = (0.25 * n as f64).sqrt();
        assert!((hits as f64 - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn success_rate_emerges_at_intermediate_overlap() {
        // Overlap cos α with α = π/3: success ½(1 + sin α) ≈ 0.933.
        let alpha = std::f64::consts::FRAC_PI_3;
        let s0 = [re(1.0), re(0.0)];
        let s1 = [re(alpha.cos()), re(alpha.sin())];
        let d = Discriminator::new(&s0, &s1);
        let mut rng = RandomSource::from_seed(3);
        let n = 100_000usize;
        let mut correct = 0usize;
        for i in 0..n {
            let (truth, state) = if i % 2 == 0 { (0, &s0) } else { (1, &s1) };
            if d.measure(state, &mut rng) == truth {
                correct += 1;
            }
        }
        let expected = Discriminator::success_probability(alpha.cos());
        let p = correct as f64 / n as f64;
        let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((p - expected).abs() < 4.0 * sigma, "p = {p}, expected {expected}");
    }
}
