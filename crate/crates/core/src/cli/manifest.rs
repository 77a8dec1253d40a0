//! Run manifests: what was run, with which configuration and seeds, and
//! checksums of everything written.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

pub const RUN_MANIFEST: &str = "run_manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputChecksum {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub config_hash: String,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<OutputChecksum>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

impl RunManifest {
    /// Checksums `files` (relative to `dir`), sorted by path.
    pub fn build(command: &str, config_hash: String, seeds: BTreeMap<String, u64>, dir: &Path, files: &[String]) -> Result<Self> {
        let mut outputs =
            files.iter().map(|f| Ok(OutputChecksum { path: f.clone(), sha256: sha256_file(&dir.join(f))? })).collect::<Result<Vec<_>>>()?;
        outputs.sort_by(|a, b| a.path.cmp(&b.path));
        outputs.dedup();
        Ok(RunManifest { command: command.to_string(), tool_version: env!("CARGO_PKG_VERSION").to_string(), config_hash, seeds, outputs })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(RUN_MANIFEST), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(dir.join(RUN_MANIFEST))?)?)
    }

    /// Re-hashes every listed output and returns the paths that differ.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for o in &self.outputs {
            if sha256_file(&dir.join(&o.path))? != o.sha256 {
                bad.push(o.path.clone());
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_are_sorted_and_verified() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("b.csv"), "x\n").unwrap();
        std::fs::write(dir.path().join("a.json"), "{}").unwrap();
        let m =
            RunManifest::build("test", "h".into(), BTreeMap::from([("root".into(), 7)]), dir.path(), &["b.csv".into(), "a.json".into()])
                .unwrap();
        assert_eq!(m.outputs[0].path, "a.json");
        // sha256("{}")
        assert_eq!(m.outputs[0].sha256, "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
        m.write(dir.path()).unwrap();
        assert_eq!(RunManifest::read(dir.path()).unwrap(), m);
        assert!(m.verify(dir.path()).unwrap().is_empty());
        std::fs::write(dir.path().join("b.csv"), "y\n").unwrap();
        assert_eq!(m.verify(dir.path()).unwrap(), vec!["b.csv".to_string()]);
    }
}
