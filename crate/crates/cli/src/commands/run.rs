//! `run`: execute protocol sessions and emit transcripts plus a summary.

use std::path::PathBuf;

use cqka_core::adversary::{
    impersonate_source, AttackStrategy, CollectiveAttack, InterceptResendTap,
};
use cqka_core::protocol::{
    run_protocol1_with, run_protocol2_with, AbortReason, PairSource, PartyPolicy, SessionOptions,
    SessionTranscript,
};
use cqka_core::rng::RandomSource;
use serde::Serialize;

use crate::config::{ConfigError, RunConfig};
use crate::output::write_output;

/// Aggregate statistics over all sessions of one run.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub protocol: u8,
    pub n: usize,
    pub p: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub attack: String,
    pub sessions: u64,
    pub agreement_rate: f64,
    pub abort_rate: f64,
    pub aborts_decoy: u64,
    pub aborts_inconsistent: u64,
    pub aborts_key_mismatch: u64,
    pub decoy_error_mean: f64,
    pub decoy_error_min: f64,
    pub decoy_error_max: f64,
}

pub struct RunOutput {
    pub summary: RunSummary,
    pub summary_path: PathBuf,
    pub transcripts_path: PathBuf,
}

pub fn execute(config: &RunConfig) -> Result<RunOutput, ConfigError> {
    config.validate()?;
    let master = RandomSource::from_seed(config.seed);
    let mut transcripts: Vec<SessionTranscript> = Vec::with_capacity(config.sessions as usize);

    let source: Option<PairSource> = match &config.attack {
        AttackStrategy::Impersonation(p) => {
            Some(impersonate_source(p).map_err(|e| ConfigError::Domain(e.to_string()))?)
        }
        _ => None,
    };
    let collective = match &config.attack {
        AttackStrategy::Collective(p) => {
            Some(CollectiveAttack::new(*p).map_err(|e| ConfigError::Domain(e.to_string()))?)
        }
        _ => None,
    };
    let options = SessionOptions {
        spot_check_fraction: config.spot_check_fraction,
        policy: PartyPolicy::default(),
    };

    for i in 0..config.sessions {
        let mut rng = master.derive(i);
        let transcript = match config.protocol {
            1 => {
                let mut tap_a;
                let mut tap_b;
                let mut ir_a;
                let mut ir_b;
                let (t_ca, t_cb): (
                    Option<&mut dyn cqka_core::protocol::ChannelTap>,
                    Option<&mut dyn cqka_core::protocol::ChannelTap>,
                ) = match (&collective, &config.attack) {
                    (Some(att), _) => {
                        tap_a = att.tap_to_alice();
                        tap_b = att.tap_to_bob();
                        (Some(&mut tap_a), Some(&mut tap_b))
                    }
                    (None, AttackStrategy::InterceptResend) => {
                        ir_a = InterceptResendTap::new();
                        ir_b = InterceptResendTap::new();
                        (Some(&mut ir_a), Some(&mut ir_b))
                    }
                    _ => (None, None),
                };
                run_protocol1_with(
                    config.n,
                    config.decoys(),
                    t_ca,
                    t_cb,
                    source.as_ref(),
                    config.tolerance,
                    options,
                    &mut rng,
                )
            }
            2 => {
                let mut tap_b;
                let mut ir;
                let t_ab: Option<&mut dyn cqka_core::protocol::ChannelTap> =
                    match (&collective, &config.attack) {
                        (Some(att), _) => {
                            tap_b = att.tap_to_bob();
                            Some(&mut tap_b)
                        }
                        (None, AttackStrategy::InterceptResend) => {
                            ir = InterceptResendTap::new();
                            Some(&mut ir)
                        }
                        _ => None,
                    };
                run_protocol2_with(config.n, t_ab, config.tolerance, options, &mut rng)
            }
            other => return Err(ConfigError::Domain(format!("unsupported protocol {other}"))),
        }
        .map_err(|e| ConfigError::Domain(format!("session {i} failed: {e}")))?;
        transcripts.push(transcript);
    }

    let summary = summarize(config, &transcripts);

    // Everything succeeded; only now touch the filesystem.
    let mut jsonl = String::new();
    for t in &transcripts {
        jsonl.push_str(
            &serde_json::to_string(t).map_err(|e| ConfigError::Domain(format!("serialize: {e}")))?,
        );
        jsonl.push('\n');
    }
    let transcripts_path = write_output(&config.out, "transcripts.jsonl", &jsonl)
        .map_err(|e| ConfigError::Domain(format!("write transcripts: {e}")))?;
    let summary_json = serde_json::to_string_pretty(&summary)
        .map_err(|e| ConfigError::Domain(format!("serialize summary: {e}")))?;
    let summary_path = write_output(&config.out, "summary.json", &format!("{summary_json}\n"))
        .map_err(|e| ConfigError::Domain(format!("write summary: {e}")))?;

    Ok(RunOutput { summary, summary_path, transcripts_path })
}

fn summarize(config: &RunConfig, transcripts: &[SessionTranscript]) -> RunSummary {
    let sessions = transcripts.len() as u64;
    let mut agreed = 0u64;
    let mut aborts = [0u64; 3];
    let mut decoy_sum = 0.0;
    let mut decoy_min = f64::INFINITY;
    let mut decoy_max = f64::NEG_INFINITY;
    for t in transcripts {
        if t.keys_agree() {
            agreed += 1;
        }
        match t.aborted() {
            Some(AbortReason::DecoyCheckFailed { .. }) => aborts[0] += 1,
            Some(AbortReason::InconsistentAnnouncement { .. }) => aborts[1] += 1,
            Some(AbortReason::KeyMismatch { .. }) => aborts[2] += 1,
            None => {}
        }
        decoy_sum += t.decoy_error_rate();
        decoy_min = decoy_min.min(t.decoy_error_rate());
        decoy_max = decoy_max.max(t.decoy_error_rate());
    }
    let aborted = aborts.iter().sum::<u64>();
    RunSummary {
        protocol: config.protocol,
        n: config.n,
        p: if config.protocol == 1 { config.decoys() } else { 0 },
        tolerance: config.tolerance,
        seed: config.seed,
        attack: config.attack.describe(),
        sessions,
        agreement_rate: agreed as f64 / sessions as f64,
        abort_rate: aborted as f64 / sessions as f64,
        aborts_decoy: aborts[0],
        aborts_inconsistent: aborts[1],
        aborts_key_mismatch: aborts[2],
        decoy_error_mean: decoy_sum / sessions as f64,
        decoy_error_min: decoy_min,
        decoy_error_max: decoy_max,
    }
}
