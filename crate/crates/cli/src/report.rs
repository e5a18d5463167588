use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// One command's output. Field order and map ordering are fixed, so equal
/// inputs and parameters give byte-identical JSON.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub inputs_digest: String,
    pub parameters: Value,
    pub status: Status,
    pub result: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    VerdictFailure,
}

/// SHA-256 over the inputs, each prefixed by its length.
pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} ({})\n", self.command, serde_json::to_value(self.status).expect("status serializes"));
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                out.push_str(&format!("  {k}: {v}\n"));
            }
        } else {
            out.push_str(&format!("  {}\n", self.result));
        }
        out
    }
}
