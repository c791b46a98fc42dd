use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `{"config": .., "digest": "sha256:..", "result": ..}` where the digest
/// covers the compact serialization of `result`.
pub fn json_artifact(config: &Value, result: &impl Serialize) -> Result<String, CliError> {
    let result = serde_json::to_value(result).map_err(CliError::internal)?;
    let body = serde_json::to_string(&result).map_err(CliError::internal)?;
    let doc = serde_json::json!({
        "config": config,
        "digest": format!("sha256:{}", sha256_hex(body.as_bytes())),
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(CliError::internal)?;
    text.push('\n');
    Ok(text)
}

/// CSV body preceded by `# config:` and `# digest:` comment lines.
pub fn csv_artifact(config: &Value, body: &str) -> Result<String, CliError> {
    let cfg = serde_json::to_string(config).map_err(CliError::internal)?;
    Ok(format!(
        "# config: {cfg}\n# digest: sha256:{}\n{body}",
        sha256_hex(body.as_bytes())
    ))
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Strips the comment header from a CSV artifact and checks its digest.
    fn verify_csv(text: &str) -> bool {
        let mut digest = None;
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            if !line.starts_with('#') {
                break;
            }
            if let Some(d) = line.trim_end().strip_prefix("# digest: sha256:") {
                digest = Some(d.to_string());
            }
            body_start += line.len();
        }
        digest.is_some_and(|d| d == sha256_hex(&text.as_bytes()[body_start..]))
    }

    fn verify_json(text: &str) -> bool {
        let Ok(doc) = serde_json::from_str::<Value>(text) else {
            return false;
        };
        let (Some(d), Some(r)) = (doc.get("digest").and_then(Value::as_str), doc.get("result")) else {
            return false;
        };
        let Ok(body) = serde_json::to_string(r) else {
            return false;
        };
        d.strip_prefix("sha256:") == Some(sha256_hex(body.as_bytes()).as_str())
    }

    #[test]
    fn digests_round_trip() {
        let cfg = serde_json::json!({"command": "x"});
        let csv = csv_artifact(&cfg, "a,b\n1,2\n").unwrap();
        assert!(verify_csv(&csv));
        assert!(!verify_csv(&csv.replace("1,2", "1,3")));
        let js = json_artifact(&cfg, &vec![1.5, 2.0]).unwrap();
        assert!(verify_json(&js));
        assert!(!verify_json(&js.replace("1.5", "1.25")));
    }
}
