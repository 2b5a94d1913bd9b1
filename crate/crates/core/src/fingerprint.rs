use serde::Serialize;
use sha2::{Digest, Sha256};

/// SHA-256 of the canonical JSON encoding of `value`, hex encoded.
pub fn fingerprint<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("fingerprinted values serialize");
    fingerprint_bytes(&bytes)
}

pub fn fingerprint_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(digest.as_slice())
}

/// Fingerprint of a sequence of `f64` slices, hashed by bit pattern.
pub fn fingerprint_f64s<'a>(parts: impl IntoIterator<Item = &'a [f64]>) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        for x in part {
            hasher.update(x.to_bits().to_le_bytes());
        }
    }
    hex::encode(hasher.finalize().as_slice())
}
