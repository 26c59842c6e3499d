use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use dcm_core::DegreeSequence;

/// Where an output file came from; written at the top of every emitted file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha_effective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub degree_sha256: String,
    pub n: usize,
    pub ell: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<String>,
}

/// SHA-256 of the canonical one-degree-per-line text of `seq`.
pub fn degree_digest(seq: &DegreeSequence) -> String {
    let digest = Sha256::digest(seq.to_text().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Provenance {
    pub fn new(command: &str, seq: &DegreeSequence, seed: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            alpha_effective: None,
            k: None,
            degree_sha256: degree_digest(seq),
            n: seq.n(),
            ell: seq.ell(),
            timestamp: None,
        }
    }

    pub fn with_rate(mut self, k: usize, alpha_effective: f64) -> Self {
        self.k = Some(k);
        self.alpha_effective = Some(alpha_effective);
        self
    }

    /// Stamps the current time as seconds since the Unix epoch.
    pub fn stamped(mut self) -> Self {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.timestamp = Some(format!("unix:{secs}"));
        self
    }

    /// `# key: value` lines for the top of a CSV file.
    pub fn comment_lines(&self) -> String {
        let value = serde_json::to_value(self).expect("plain struct");
        let mut out = String::new();
        for (key, v) in value.as_object().expect("object") {
            let shown = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {key}: {shown}\n"));
        }
        out
    }
}
