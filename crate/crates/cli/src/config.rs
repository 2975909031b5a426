use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use eigenperturb::dataset::Schema;
use eigenperturb::nn::TrainConfig;
use eigenperturb::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub rho: Option<f64>,
    pub nu: Option<f64>,
    pub c0: Option<f64>,
}

/// Pipeline configuration file (TOML).
///
/// ```toml
/// rans_file = "rans.csv"
/// hifi_file = "dns.csv"
/// schema_file = "schema.toml"
/// output_dir = "out"
/// seed = 42
///
/// [constants]
/// rho = 1.0
/// nu = 1.0e-5
///
/// [train]
/// learning_rate = 2.5e-4
/// batch_size = 256
/// ```
///
/// Relative paths are resolved against the directory holding the file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub rans_file: Option<PathBuf>,
    pub hifi_file: Option<PathBuf>,
    pub schema_file: Option<PathBuf>,
    /// Schema for the high-fidelity file when its headers differ.
    pub hifi_schema_file: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub constants: ConstantsSection,
    pub train: TrainConfig,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.rans_file,
            &mut cfg.hifi_file,
            &mut cfg.schema_file,
            &mut cfg.hifi_schema_file,
            &mut cfg.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.output_dir().join(name)
    }

    pub fn require_file(&self, value: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
        let path = value.clone().ok_or_else(|| {
            Error::Config(format!(
                "'{key}' is not set (config key or --{})",
                key.replace('_', "-")
            ))
        })?;
        existing(path, key)
    }

    fn schema_from(&self, path: &Option<PathBuf>, key: &str) -> Result<Schema> {
        let mut schema = match path {
            Some(p) => Schema::from_file(&existing(p.clone(), key)?)?,
            None => Schema::default(),
        };
        let c = &self.constants;
        if let Some(rho) = c.rho {
            schema.rho = Some(rho);
        }
        if let Some(nu) = c.nu {
            schema.nu = Some(nu);
        }
        if let Some(c0) = c.c0 {
            schema.c0 = c0;
        }
        Ok(schema)
    }

    pub fn schema(&self) -> Result<Schema> {
        self.schema_from(&self.schema_file, "schema_file")
    }

    pub fn hifi_schema(&self) -> Result<Schema> {
        match &self.hifi_schema_file {
            Some(_) => self.schema_from(&self.hifi_schema_file, "hifi_schema_file"),
            None => self.schema(),
        }
    }

    /// Training settings with the pipeline seed applied.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed(),
            ..self.train.clone()
        }
    }

    /// SHA-256 of the effective configuration in canonical TOML form.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).unwrap_or_default();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Comment lines that open every output file.
    pub fn metadata(&self) -> Vec<String> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        vec![
            format!("tool: eigenperturb {}", env!("CARGO_PKG_VERSION")),
            format!("config_sha256: {}", self.hash()),
            format!("seed: {}", self.seed()),
            format!("timestamp: {now} (unix seconds)"),
        ]
    }
}

fn existing(path: PathBuf, key: &str) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::Config(format!(
            "{key} '{}' does not exist",
            path.display()
        )))
    }
}
