//! Run manifests: one JSON document per invocation.

use std::path::Path;

use clap::ValueEnum;
use pllab_core::fekete::{WeightSpec, DEFAULT_RESTARTS, DEFAULT_TOL};
use pllab_core::io::content_hash;
use pllab_core::SetSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandId {
    Fekete,
    Extremal,
    Relative,
    ScanRegularity,
    Localize,
    Capacity,
    Equidist,
    Verify,
}

impl CommandId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandId::Fekete => "fekete",
            CommandId::Extremal => "extremal",
            CommandId::Relative => "relative",
            CommandId::ScanRegularity => "scan-regularity",
            CommandId::Localize => "localize",
            CommandId::Capacity => "capacity",
            CommandId::Equidist => "equidist",
            CommandId::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightTag {
    #[default]
    Zero,
    FubiniStudy,
}

impl WeightTag {
    pub fn spec(&self) -> WeightSpec {
        match self {
            WeightTag::Zero => WeightSpec::Zero,
            WeightTag::FubiniStudy => WeightSpec::FubiniStudy,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Exchange acceptance threshold of the Fekete solver.
    #[serde(default = "default_fekete_tol")]
    pub fekete: f64,
    /// Convergence threshold of the relaxation solver.
    #[serde(default = "default_solver_tol")]
    pub solver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fekete: DEFAULT_TOL,
            solver: pllab_core::relative::DEFAULT_TOL,
        }
    }
}

fn default_fekete_tol() -> f64 {
    DEFAULT_TOL
}

fn default_solver_tol() -> f64 {
    pllab_core::relative::DEFAULT_TOL
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: CommandId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetSpec>,
    #[serde(default)]
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub weight: WeightTag,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Sample count per cloud; `None` picks `max(4000, 20 N)`.
    #[serde(default)]
    pub cloud_size: Option<usize>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Command-specific fields.
    #[serde(default)]
    pub params: Value,
    /// Written into copies of the manifest; ignored on input except for a
    /// mismatch warning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hash: Option<String>,
}

impl RunManifest {
    pub fn verify_default() -> Self {
        RunManifest {
            command: CommandId::Verify,
            set: None,
            degrees: Vec::new(),
            weight: WeightTag::Zero,
            seeds: default_seeds(),
            tolerances: Tolerances::default(),
            cloud_size: None,
            restarts: DEFAULT_RESTARTS,
            output: None,
            params: Value::Null,
            hash: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("manifest {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut m: RunManifest = serde_json::from_str(text).map_err(|e| CliError::Schema(format!("manifest: {e}")))?;
        if let Some(set) = m.set.as_mut() {
            set.normalize().map_err(|e| CliError::Schema(format!("set: {e}")))?;
        }
        m.validate()?;
        let digest = m.content_hash();
        if let Some(h) = &m.hash {
            if *h != digest {
                log::warn!("manifest hash {h} does not match its content; using {digest}");
            }
        }
        m.hash = Some(digest);
        Ok(m)
    }

    /// Digest of the canonical JSON with `output` and `hash` removed.
    pub fn content_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Value::Object(map) = &mut v {
            map.remove("output");
            map.remove("hash");
        }
        content_hash(&v).expect("canonical json")
    }

    fn validate(&self) -> Result<(), CliError> {
        let schema = |msg: String| Err(CliError::Schema(msg));
        for (i, d) in self.degrees.iter().enumerate() {
            if *d == 0 {
                return schema(format!("degrees[{i}]: degree must be at least 1"));
            }
        }
        if self.seeds.is_empty() {
            return schema("seeds: at least one seed is required".into());
        }
        if !(self.tolerances.fekete > 0.0) {
            return schema("tolerances.fekete: must be positive".into());
        }
        if !(self.tolerances.solver > 0.0) {
            return schema("tolerances.solver: must be positive".into());
        }
        if self.restarts == 0 {
            return schema("restarts: must be at least 1".into());
        }
        if let Some(c) = self.cloud_size {
            if c < 4 {
                return schema("cloud_size: must be at least 4".into());
            }
        }
        if self.command == CommandId::Verify {
            return Ok(());
        }
        if self.set.is_none() {
            return schema(format!("set: required by `{}`", self.command.as_str()));
        }
        let min_degrees = match self.command {
            CommandId::Fekete | CommandId::Extremal | CommandId::Localize => 1,
            CommandId::Capacity => 3,
            CommandId::Equidist => 4,
            CommandId::Relative | CommandId::ScanRegularity | CommandId::Verify => 0,
        };
        if self.degrees.len() < min_degrees {
            return schema(format!(
                "degrees: `{}` needs at least {min_degrees} degree(s)",
                self.command.as_str()
            ));
        }
        if matches!(self.command, CommandId::Capacity | CommandId::Equidist)
            && self.degrees.windows(2).any(|w| w[0] >= w[1])
        {
            return schema("degrees: must be strictly increasing".into());
        }
        Ok(())
    }

    pub fn set(&self) -> &SetSpec {
        self.set.as_ref().expect("validated")
    }

    pub fn seed(&self) -> u64 {
        self.seeds[0]
    }

    /// Command parameters; a missing block parses as `{}`.
    pub fn params<T: serde::de::DeserializeOwned>(&self) -> Result<T, CliError> {
        let v = match &self.params {
            Value::Null => Value::Object(Default::default()),
            other => other.clone(),
        };
        serde_json::from_value(v).map_err(|e| CliError::Schema(format!("params: {e}")))
    }
}
