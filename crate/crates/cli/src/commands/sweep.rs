//! `sweep`: Monte Carlo estimates across a parameter grid, one
//! formula-vs-simulation report row per grid point.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use clap::ValueEnum;
use cqka_core::adversary::{AttackStrategy, CollectiveParams};
use cqka_core::analysis::{
    estimate_detection, estimate_mutual_information, estimate_qber, estimate_success,
    MetricsReport,
};
use cqka_core::rng::RandomSource;

use crate::commands::curves::linspace;
use crate::config::{ConfigError, RunConfig};
use crate::output::{write_output, SweepCsv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Ancilla overlap angle of the collective attack, [0, π/2].
    Alpha,
    /// Keep amplitude A of the collective attack's first channel, [0, 1].
    AZeta,
    /// Key length, 1..=points.
    N,
    /// Detection probability realized by a matching collective attack, [0, 0.5].
    D,
    /// Decoys per channel, 0..points (scaled).
    P,
    /// Tolerable error limit, [0, 1].
    Tolerance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepMetric {
    Detection,
    Qber,
    MutualInformation,
    Success,
    AbortRate,
}

impl SweepParam {
    /// Sensible default metric for each swept parameter.
    pub fn default_metric(self) -> SweepMetric {
        match self {
            SweepParam::Alpha | SweepParam::AZeta => SweepMetric::Detection,
            SweepParam::N | SweepParam::D => SweepMetric::Success,
            SweepParam::P | SweepParam::Tolerance => SweepMetric::AbortRate,
        }
    }
}

pub fn execute(
    config: &RunConfig,
    param: SweepParam,
    metric: Option<SweepMetric>,
    points: usize,
) -> Result<PathBuf, ConfigError> {
    config.validate()?;
    if points < 1 {
        return Err(ConfigError::Domain("sweep needs at least 1 grid point".into()));
    }
    let metric = metric.unwrap_or_else(|| param.default_metric());
    let master = RandomSource::from_seed(config.seed);

    let grid: Vec<f64> = match param {
        SweepParam::Alpha => linspace(0.0, FRAC_PI_2, points.max(2)).collect(),
        SweepParam::AZeta => linspace(0.0, 1.0, points.max(2)).collect(),
        SweepParam::N => (1..=points).map(|n| n as f64).collect(),
        SweepParam::D => linspace(0.0, 0.5, points.max(2)).collect(),
        SweepParam::P => (0..points).map(|i| (i * config.decoys().max(1)) as f64).collect(),
        SweepParam::Tolerance => linspace(0.0, 0.5, points.max(2)).collect(),
    };

    let mut csv = SweepCsv::new();
    for (idx, &value) in grid.iter().enumerate() {
        let point_master = master.derive(idx as u64);
        let report = run_point(config, param, metric, value, &point_master)?;
        csv.push(value, report);
    }

    let name = format!(
        "sweep_{}_{}.csv",
        param_slug(param),
        metric_slug(metric)
    );
    write_output(&config.out, &name, &csv.render())
        .map_err(|e| ConfigError::Domain(format!("write {name}: {e}")))
}

fn param_slug(p: SweepParam) -> &'static str {
    match p {
        SweepParam::Alpha => "alpha",
        SweepParam::AZeta => "a_zeta",
        SweepParam::N => "n",
        SweepParam::D => "d",
        SweepParam::P => "p",
        SweepParam::Tolerance => "tolerance",
    }
}

fn metric_slug(m: SweepMetric) -> &'static str {
    match m {
        SweepMetric::Detection => "detection",
        SweepMetric::Qber => "qber",
        SweepMetric::MutualInformation => "mutual_information",
        SweepMetric::Success => "success",
        SweepMetric::AbortRate => "abort_rate",
    }
}

/// Collective parameters for one grid point, starting from the configured
/// attack when it is collective.
fn point_params(config: &RunConfig, param: SweepParam, value: f64) -> CollectiveParams {
    let mut params = match &config.attack {
        AttackStrategy::Collective(p) => *p,
        _ => CollectiveParams::optimal(FRAC_PI_2),
    };
    match param {
        SweepParam::Alpha => {
            params.alpha_zeta = value;
            params.alpha_eta = value;
        }
        SweepParam::AZeta => {
            params.a_zeta = value;
            params.b_zeta = (1.0 - value * value).max(0.0).sqrt();
        }
        SweepParam::D => {
            // Realize detection d with the balanced attack:
            // d = ½(1 − cos²α) → α = acos(√(1 − 2d)).
            let alpha = (1.0 - 2.0 * value).max(0.0).sqrt().acos();
            params = CollectiveParams::optimal(alpha);
        }
        SweepParam::N | SweepParam::P | SweepParam::Tolerance => {}
    }
    params
}

fn run_point(
    config: &RunConfig,
    param: SweepParam,
    metric: SweepMetric,
    value: f64,
    master: &RandomSource,
) -> Result<MetricsReport, ConfigError> {
    let params = point_params(config, param, value);
    let domain = |e: cqka_core::analysis::AnalysisError| ConfigError::Domain(e.to_string());
    match metric {
        SweepMetric::Detection => {
            let attack = match param {
                SweepParam::Alpha | SweepParam::AZeta | SweepParam::D => {
                    AttackStrategy::Collective(params)
                }
                _ => config.attack.clone(),
            };
            estimate_detection(&attack, config.sessions, master).map_err(domain)
        }
        SweepMetric::Qber => estimate_qber(&params, config.sessions, master).map_err(domain),
        SweepMetric::MutualInformation => {
            estimate_mutual_information(&params, config.sessions, master).map_err(domain)
        }
        SweepMetric::Success => {
            let n = if param == SweepParam::N { value as usize } else { config.n };
            estimate_success(&params, n, config.sessions, master)
                .map(|s| s.report)
                .map_err(domain)
        }
        SweepMetric::AbortRate => abort_rate_point(config, param, value, master),
    }
}

/// Abort rate of full protocol-1 sessions at one grid point.
fn abort_rate_point(
    config: &RunConfig,
    param: SweepParam,
    value: f64,
    master: &RandomSource,
) -> Result<MetricsReport, ConfigError> {
    let mut cfg = config.clone();
    match param {
        SweepParam::P => cfg.p = Some(value as usize),
        SweepParam::Tolerance => cfg.tolerance = value,
        _ => {}
    }
    let mut aborted = 0u64;
    let runner = RunConfigRunner { config: &cfg };
    for i in 0..cfg.sessions {
        let mut rng = master.derive(i);
        if runner.run_one(&mut rng)? {
            aborted += 1;
        }
    }
    let closed_form = abort_rate_closed_form(&cfg);
    Ok(MetricsReport::binomial(aborted, cfg.sessions, closed_form, None))
}

struct RunConfigRunner<'a> {
    config: &'a RunConfig,
}

impl RunConfigRunner<'_> {
    /// Run one session, returning whether it aborted.
    fn run_one(&self, rng: &mut RandomSource) -> Result<bool, ConfigError> {
        use cqka_core::adversary::{impersonate_source, CollectiveAttack, InterceptResendTap};
        use cqka_core::protocol::{run_protocol1_with, SessionOptions};
        let cfg = self.config;
        let options = SessionOptions {
            spot_check_fraction: cfg.spot_check_fraction,
            ..Default::default()
        };
        let source = match &cfg.attack {
            AttackStrategy::Impersonation(p) => {
                Some(impersonate_source(p).map_err(|e| ConfigError::Domain(e.to_string()))?)
            }
            _ => None,
        };
        let transcript = match &cfg.attack {
            AttackStrategy::Collective(p) => {
                let attack =
                    CollectiveAttack::new(*p).map_err(|e| ConfigError::Domain(e.to_string()))?;
                let mut a = attack.tap_to_alice();
                let mut b = attack.tap_to_bob();
                run_protocol1_with(
                    cfg.n,
                    cfg.decoys(),
                    Some(&mut a),
                    Some(&mut b),
                    None,
                    cfg.tolerance,
                    options,
                    rng,
                )
            }
            AttackStrategy::InterceptResend => {
                let mut a = InterceptResendTap::new();
                let mut b = InterceptResendTap::new();
                run_protocol1_with(
                    cfg.n,
                    cfg.decoys(),
                    Some(&mut a),
                    Some(&mut b),
                    None,
                    cfg.tolerance,
                    options,
                    rng,
                )
            }
            _ => run_protocol1_with(
                cfg.n,
                cfg.decoys(),
                None,
                None,
                source.as_ref(),
                cfg.tolerance,
                options,
                rng,
            ),
        }
        .map_err(|e| ConfigError::Domain(e.to_string()))?;
        Ok(transcript.is_aborted())
    }
}

/// Exact abort probability where the per-decoy error rate is known:
/// none/impersonation leave decoys untouched (0), intercept-resend errs with
/// ¼ per decoy; the session aborts when either channel's binomial count
/// exceeds the tolerance.
fn abort_rate_closed_form(cfg: &RunConfig) -> f64 {
    let per_decoy = match &cfg.attack {
        AttackStrategy::None | AttackStrategy::Impersonation(_) => 0.0,
        AttackStrategy::InterceptResend => 0.25,
        AttackStrategy::Collective(p) => collective_decoy_error(p),
    };
    let p = cfg.decoys();
    let channel_fail = binomial_tail_above(p, per_decoy, cfg.tolerance);
    1.0 - (1.0 - channel_fail) * (1.0 - channel_fail)
}

/// Per-decoy error probability of the collective tap: a Z-basis decoy flips
/// with B², an X-basis decoy errs with the overlap-dependent projection;
/// averaged over the four decoy states.
fn collective_decoy_error(params: &CollectiveParams) -> f64 {
    let mut total = 0.0;
    for (a, b, alpha, beta) in [
        (params.a_zeta, params.b_zeta, params.alpha_zeta, params.beta_zeta),
        (params.a_eta, params.b_eta, params.alpha_eta, params.beta_eta),
    ] {
        // Z basis: |0⟩ → A|0⟩v00 + B|1⟩v01; error probability B².
        let z_err = b * b;
        // X basis: project E|±⟩ onto the conjugate outcome ∓.
        // E|+⟩ = (A|0⟩v00 + B|1⟩v01 + B|0⟩v10 + A|1⟩v11)/√2;
        // ⟨−|E|+⟩ = (A v00 + B v10 − B v01 − A v11)/2, squared norm via the
        // construction's overlaps (⟨v00|v11⟩ = cos α, ⟨v01|v10⟩ = cos β).
        let x_err = 0.25
            * (2.0 * a * a * (1.0 - alpha.cos()) + 2.0 * b * b * (1.0 - beta.cos()));
        total += 0.5 * (z_err + x_err);
    }
    total / 2.0
}

/// P(X > tolerance·trials) for X ~ Binomial(trials, q), in log space.
fn binomial_tail_above(trials: usize, q: f64, tolerance: f64) -> f64 {
    if trials == 0 || q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return if tolerance < 1.0 { 1.0 } else { 0.0 };
    }
    let k_min = (tolerance * trials as f64).floor() as usize + 1;
    if k_min > trials {
        return 0.0;
    }
    let ln_q = q.ln();
    let ln_one_minus_q = (1.0 - q).ln();
    let mut tail = 0.0f64;
    for k in k_min..=trials {
        let ln_c = ln_choose(trials, k);
        tail += (ln_c + k as f64 * ln_q + (trials - k) as f64 * ln_one_minus_q).exp();
    }
    tail.min(1.0)
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Stirling's series with exact values for small arguments.
fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 16 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_tail_sanity() {
        // Bin(4, 0.5): P(X > 2) = P(3) + P(4) = (4 + 1)/16.
        let tail = binomial_tail_above(4, 0.5, 0.5);
        assert!((tail - 5.0 / 16.0).abs() < 1e-12);
        assert_eq!(binomial_tail_above(100, 0.0, 0.1), 0.0);
        // 25% per-decoy error against a 10% limit over many decoys → certain.
        assert!(binomial_tail_above(10_000, 0.25, 0.1) > 0.999_999);
    }

    #[test]
    fn identity_collective_tap_never_errs_on_decoys() {
        let e = collective_decoy_error(&CollectiveParams::optimal(0.0));
        assert!(e.abs() < 1e-15);
        // Orthogonal ancillas disturb X-basis decoys half the time:
        // per-channel ½ · (0 + ½) = ¼.
        let e = collective_decoy_error(&CollectiveParams::optimal(FRAC_PI_2));
        assert!((e - 0.25).abs() < 1e-12);
    }
}
