//! Machine-readable report envelope shared by the command-line tools.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Identity of the metric a report was computed from.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ModelId {
    Builtin { builtin: String },
    File { path: String, sha256: String },
}

impl ModelId {
    /// `builtin:<name>` stays symbolic, file paths are content-hashed.
    pub fn from_source(source: &str) -> std::io::Result<ModelId> {
        if let Some(name) = source.strip_prefix("builtin:") {
            return Ok(ModelId::Builtin {
                builtin: name.to_string(),
            });
        }
        let bytes = std::fs::read(source)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        Ok(ModelId::File {
            path: source.to_string(),
            sha256: format!("{:x}", hasher.finalize()),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub version: &'static str,
    pub command: &'static str,
    pub model: ModelId,
    pub payload: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &'static str, model: ModelId, payload: T) -> Self {
        Report {
            version: env!("CARGO_PKG_VERSION"),
            command,
            model,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// Probe samples as `eps,value` rows.
pub fn probe_csv(samples: &[crate::limits::ProbeSample]) -> String {
    let mut out = String::from("eps,value\n");
    for s in samples {
        out.push_str(&format!("{},{}\n", s.eps, s.value));
    }
    out
}
