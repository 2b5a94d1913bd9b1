use std::path::{Path, PathBuf};

use magnomech::fingerprint::fingerprint;
use serde::Serialize;
use serde_json::Value;

/// What was run, with which inputs, and where the results went.
///
/// `fingerprint` hashes the command, the physical inputs and the engine
/// settings; output locations do not enter it.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub settings: Value,
    pub inputs_fingerprint: String,
    pub outputs: Vec<PathBuf>,
    pub fingerprint: String,
    pub version: String,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_path: Option<&Path>,
        settings: Value,
        inputs_fingerprint: String,
    ) -> Self {
        let fp = fingerprint(&(command, &settings, &inputs_fingerprint));
        Self {
            command: command.into(),
            config_path: config_path.map(Path::to_path_buf),
            settings,
            inputs_fingerprint,
            outputs: Vec::new(),
            fingerprint: fp,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}
