//! Run configuration with layered resolution: defaults, then a TOML file,
//! then `FIGCAP_*` environment variables, then command-line flags.

use std::path::Path;
use std::str::FromStr;

use figcap_core::metrics::Normalizer;
use figcap_core::ranking::LossConfig;
use figcap_core::refine::MergePolicy;
use figcap_core::text::TokenizerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// External refinement endpoint settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinerSettings {
    /// Chat-completion endpoint URL; external mode requires it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    pub model: String,
    pub timeout_secs: u64,
    /// Environment variable read for the bearer token.
    pub auth_env: String,
    pub max_in_flight: usize,
}

impl Default for RefinerSettings {
    fn default() -> Self {
        Self {
            endpoint: None,
            model: "llama-2-7b-chat".into(),
            timeout_secs: 30,
            auth_env: "FIGCAP_API_TOKEN".into(),
            max_in_flight: 4,
        }
    }
}

/// Effective settings for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub normalizer: Normalizer,
    /// N-gram order used for metric ranking and fusion.
    pub metric_n: usize,
    /// Worker threads; 0 keeps the default pool size.
    pub jobs: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// Character budget for refined paragraphs.
    pub char_budget: usize,
    /// Token budget for assembled generation inputs.
    pub token_budget: usize,
    pub merge_policy: MergePolicy,
    pub tokenizer: TokenizerConfig,
    pub refiner: RefinerSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let losses = LossConfig::default();
        Self {
            normalizer: Normalizer::LengthRatio,
            metric_n: 2,
            jobs: 0,
            alpha: losses.alpha,
            lambda: losses.lambda,
            gamma: losses.gamma,
            char_budget: 1500,
            token_budget: 1024,
            merge_policy: MergePolicy::PreferAlt,
            tokenizer: TokenizerConfig::default(),
            refiner: RefinerSettings::default(),
        }
    }
}

impl RunConfig {
    /// Resolves configuration from a file (when given) and the environment.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut config = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::io_at(path, e))?;
                toml::from_str(&text).map_err(|e| {
                    Error::Config(format!("{}: {e}", path.display()))
                })?
            }
            None => Self::default(),
        };
        config.apply_env()?;
        Ok(config)
    }

    fn apply_env(&mut self) -> Result<()> {
        env_override("FIGCAP_NORMALIZER", &mut self.normalizer)?;
        env_override("FIGCAP_METRIC_N", &mut self.metric_n)?;
        env_override("FIGCAP_JOBS", &mut self.jobs)?;
        env_override("FIGCAP_ALPHA", &mut self.alpha)?;
        env_override("FIGCAP_LAMBDA", &mut self.lambda)?;
        env_override("FIGCAP_GAMMA", &mut self.gamma)?;
        env_override("FIGCAP_CHAR_BUDGET", &mut self.char_budget)?;
        env_override("FIGCAP_TOKEN_BUDGET", &mut self.token_budget)?;
        env_override("FIGCAP_MERGE_POLICY", &mut self.merge_policy)?;
        env_override_opt("FIGCAP_ENDPOINT", &mut self.refiner.endpoint)?;
        env_override("FIGCAP_MODEL", &mut self.refiner.model)?;
        env_override("FIGCAP_TIMEOUT_SECS", &mut self.refiner.timeout_secs)?;
        env_override("FIGCAP_AUTH_ENV", &mut self.refiner.auth_env)?;
        env_override("FIGCAP_MAX_IN_FLIGHT", &mut self.refiner.max_in_flight)?;
        Ok(())
    }

    /// Rejects configurations the pipeline cannot run under.
    pub fn validate(&self) -> Result<()> {
        if self.metric_n == 0 {
            return Err(Error::Config("metric_n must be at least 1".into()));
        }
        if self.char_budget == 0 {
            return Err(Error::Config("char_budget must be at least 1".into()));
        }
        if self.token_budget == 0 {
            return Err(Error::Config("token_budget must be at least 1".into()));
        }
        if self.refiner.max_in_flight == 0 {
            return Err(Error::Config("max_in_flight must be at least 1".into()));
        }
        self.loss_config().validate().map_err(Error::Core)?;
        Ok(())
    }

    /// The ranking loss parameters this configuration selects.
    pub fn loss_config(&self) -> LossConfig {
        LossConfig {
            alpha: self.alpha,
            lambda: self.lambda,
            gamma: self.gamma,
            norm: self.normalizer,
        }
    }

    /// Prints the effective configuration to stderr so every run records the
    /// settings it ran under without polluting data outputs.
    pub fn echo(&self) {
        match serde_json::to_string(self) {
            Ok(json) => eprintln!("config: {json}"),
            Err(e) => eprintln!("config: <unserializable: {e}>"),
        }
    }
}

fn env_override<T: FromStr>(name: &str, slot: &mut T) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Ok(raw) = std::env::var(name) {
        *slot = raw
            .parse()
            .map_err(|e| Error::Config(format!("{name}={raw}: {e}")))?;
    }
    Ok(())
}

fn env_override_opt(name: &str, slot: &mut Option<String>) -> Result<()> {
    if let Ok(raw) = std::env::var(name) {
        *slot = Some(raw);
    }
    Ok(())
}
