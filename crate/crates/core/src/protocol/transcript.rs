use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sender {
    Alice,
    Bob,
}

/// One protocol message. The payload itself is not kept, only the SHA-256
/// of its JSON encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub seq: usize,
    pub phase: String,
    pub sender: Sender,
    pub message: String,
    pub payload_digest: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn push<P: Serialize + ?Sized>(
        &mut self,
        phase: &str,
        sender: Sender,
        message: &str,
        payload: &P,
    ) {
        let bytes = serde_json::to_vec(payload).expect("payloads are plain data");
        self.records.push(TranscriptRecord {
            seq: self.records.len(),
            phase: phase.to_string(),
            sender,
            message: message.to_string(),
            payload_digest: hex::encode(Sha256::digest(&bytes)),
        });
    }

    pub fn records(&self) -> &[TranscriptRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Newline-delimited JSON, one record per line.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}
