//! Run configuration: defaults, flat key=value config files, and CLI flag
//! overrides (flags win over file values, file values over defaults).

use std::fmt;
use std::path::{Path, PathBuf};

use cqka_core::adversary::{AttackStrategy, CollectiveParams, ImpersonationParams};
use cqka_core::protocol::{DEFAULT_SPOT_CHECK_FRACTION, DEFAULT_TOLERANCE};

/// Fixed default seed so runs are reproducible out of the box.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug)]
pub enum ConfigError {
    /// Malformed input: wrong syntax, unknown key, unparsable value.
    Usage(String),
    /// Well-formed but invalid: out-of-range values, impossible combinations.
    Domain(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Usage(m) | ConfigError::Domain(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub protocol: u8,
    pub n: usize,
    /// Decoys per channel; tracks `n` unless set explicitly.
    pub p: Option<usize>,
    pub tolerance: f64,
    pub seed: u64,
    pub attack: AttackStrategy,
    pub sessions: u64,
    pub out: PathBuf,
    pub max_abort_rate: Option<f64>,
    pub spot_check_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            protocol: 1,
            n: 16,
            p: None,
            tolerance: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
            attack: AttackStrategy::None,
            sessions: 100,
            out: PathBuf::from("out"),
            max_abort_rate: None,
            spot_check_fraction: DEFAULT_SPOT_CHECK_FRACTION,
        }
    }
}

impl RunConfig {
    /// Effective decoy count per channel (defaults to `n`).
    pub fn decoys(&self) -> usize {
        self.p.unwrap_or(self.n)
    }

    /// Apply one `key = value` assignment (config-file line or flag).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "protocol" => self.protocol = parse(key, v)?,
            "n" => self.n = parse(key, v)?,
            "p" => self.p = Some(parse(key, v)?),
            "tolerance" => self.tolerance = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "sessions" => self.sessions = parse(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "attack" => self.attack = parse_attack(v)?,
            "max_abort_rate" => self.max_abort_rate = Some(parse(key, v)?),
            "spot_check_fraction" => self.spot_check_fraction = parse(key, v)?,
            other => return Err(ConfigError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Load assignments from a flat key=value file over the current values.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::Usage(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.protocol == 1 || self.protocol == 2) {
            return Err(ConfigError::Domain(format!(
                "protocol must be 1 or 2, got {}",
                self.protocol
            )));
        }
        if self.n == 0 {
            return Err(ConfigError::Domain("n must be at least 1".into()));
        }
        if self.sessions == 0 {
            return Err(ConfigError::Domain("sessions must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.tolerance) {
            return Err(ConfigError::Domain(format!(
                "tolerance must lie in [0, 1], got {}",
                self.tolerance
            )));
        }
        if !(0.0..=1.0).contains(&self.spot_check_fraction) {
            return Err(ConfigError::Domain(format!(
                "spot_check_fraction must lie in [0, 1], got {}",
                self.spot_check_fraction
            )));
        }
        if let Some(r) = self.max_abort_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(ConfigError::Domain(format!(
                    "max_abort_rate must lie in [0, 1], got {r}"
                )));
            }
        }
        if self.protocol == 2 && matches!(self.attack, AttackStrategy::Impersonation(_)) {
            return Err(ConfigError::Domain(
                "impersonation targets the controller's source; protocol 2 has none".into(),
            ));
        }
        Ok(())
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| ConfigError::Usage(format!("invalid value for `{key}`: {e}")))
}

/// Attack specs:
/// `none` | `intercept_resend` | `impersonation:a,b,c,d` |
/// `collective:<alpha>` | `collective:key=value,...`
/// (keys: a_zeta, b_zeta, a_eta, b_eta, alpha_zeta, beta_zeta, alpha_eta,
/// beta_eta, e).
pub fn parse_attack(spec: &str) -> Result<AttackStrategy, ConfigError> {
    let spec = spec.trim();
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k.trim(), Some(r.trim())),
        None => (spec, None),
    };
    match (kind, rest) {
        ("none", None) => Ok(AttackStrategy::None),
        ("intercept_resend" | "intercept-resend", None) => Ok(AttackStrategy::InterceptResend),
        ("impersonation", Some(args)) => {
            let values: Vec<f64> = args
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|e| ConfigError::Usage(format!("impersonation amplitude `{x}`: {e}")))
                })
                .collect::<Result<_, _>>()?;
            if values.len() != 4 {
                return Err(ConfigError::Usage(format!(
                    "impersonation needs 4 amplitudes a,b,c,d, got {}",
                    values.len()
                )));
            }
            let params = ImpersonationParams::from_reals([values[0], values[1], values[2], values[3]])
                .map_err(|e| ConfigError::Domain(e.to_string()))?;
            Ok(AttackStrategy::Impersonation(params))
        }
        ("collective", Some(args)) => {
            if !args.contains('=') {
                let alpha: f64 = args
                    .parse()
                    .map_err(|e| ConfigError::Usage(format!("collective alpha `{args}`: {e}")))?;
                let params = CollectiveParams::optimal(alpha);
                params.validate().map_err(|e| ConfigError::Domain(e.to_string()))?;
                return Ok(AttackStrategy::Collective(params));
            }
            let mut params = CollectiveParams::optimal(0.0);
            for pair in args.split(',') {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| ConfigError::Usage(format!("expected key=value, got `{pair}`")))?;
                let value: f64 = v
                    .trim()
                    .parse()
                    .map_err(|e| ConfigError::Usage(format!("collective `{k}`: {e}")))?;
                match k.trim() {
                    "a_zeta" => params.a_zeta = value,
                    "b_zeta" => params.b_zeta = value,
                    "a_eta" => params.a_eta = value,
                    "b_eta" => params.b_eta = value,
                    "alpha_zeta" => params.alpha_zeta = value,
                    "beta_zeta" => params.beta_zeta = value,
                    "alpha_eta" => params.alpha_eta = value,
                    "beta_eta" => params.beta_eta = value,
                    "alpha" => {
                        params.alpha_zeta = value;
                        params.alpha_eta = value;
                    }
                    "e" => params.bias = value,
                    other => {
                        return Err(ConfigError::Usage(format!("unknown collective key `{other}`")))
                    }
                }
            }
            params.validate().map_err(|e| ConfigError::Domain(e.to_string()))?;
            Ok(AttackStrategy::Collective(params))
        }
        _ => Err(ConfigError::Usage(format!(
            "unknown attack spec `{spec}` (expected none, intercept_resend, impersonation:a,b,c,d, collective:...)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attack_specs_parse() {
        assert!(matches!(parse_attack("none").unwrap(), AttackStrategy::None));
        assert!(matches!(
            parse_attack("intercept-resend").unwrap(),
            AttackStrategy::InterceptResend
        ));
        let a = parse_attack("impersonation:1,0,0,0").unwrap();
        assert!(matches!(a, AttackStrategy::Impersonation(_)));
        let a = parse_attack("collective:0.785").unwrap();
        match a {
            AttackStrategy::Collective(p) => assert!((p.alpha_zeta - 0.785).abs() < 1e-12),
            _ => panic!("expected collective"),
        }
        let a = parse_attack("collective:alpha=1.0,e=0.3").unwrap();
        match a {
            AttackStrategy::Collective(p) => {
                assert_eq!(p.alpha_eta, 1.0);
                assert_eq!(p.bias, 0.3);
            }
            _ => panic!("expected collective"),
        }
    }

    #[test]
    fn bad_attack_specs_are_usage_errors() {
        assert!(matches!(parse_attack("bogus"), Err(ConfigError::Usage(_))));
        assert!(matches!(parse_attack("impersonation:1,0"), Err(ConfigError::Usage(_))));
        // Non-normalized amplitudes are a domain problem, not syntax.
        assert!(matches!(parse_attack("impersonation:1,1,0,0"), Err(ConfigError::Domain(_))));
    }

    #[test]
    fn p_defaults_to_n() {
        let mut cfg = RunConfig::default();
        cfg.set("n", "24").unwrap();
        assert_eq!(cfg.decoys(), 24);
        cfg.set("p", "3").unwrap();
        assert_eq!(cfg.decoys(), 3);
    }

    #[test]
    fn validation_catches_domain_problems() {
        let mut cfg = RunConfig::default();
        cfg.set("sessions", "0").unwrap();
        assert!(matches!(cfg.validate(), Err(ConfigError::Domain(_))));
        let mut cfg = RunConfig::default();
        cfg.set("protocol", "3").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.set("protocol", "2").unwrap();
        cfg.set("attack", "impersonation:1,0,0,0").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("cqka-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "protocol = 2\nn = 8   # key length\nseed = 7\nattack = none\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.load_file(&path).unwrap();
        assert_eq!(cfg.protocol, 2);
        assert_eq!(cfg.n, 8);
        assert_eq!(cfg.seed, 7);
        std::fs::remove_dir_all(&dir).ok();
    }
}
