use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::Format;

/// Bumped whenever a report field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// One theorem check. Checks whose hypotheses fail are kept with
/// `applies: false` and never count as failures.
#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub applies: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    pub detail: serde_json::Value,
}

impl Check {
    pub fn new(
        name: &'static str,
        pass: bool,
        max_deviation: Option<f64>,
        detail: serde_json::Value,
    ) -> Self {
        Check {
            name,
            applies: true,
            pass,
            max_deviation,
            detail,
        }
    }

    pub fn skipped(name: &'static str, reason: &str) -> Self {
        Check {
            name,
            applies: false,
            pass: true,
            max_deviation: None,
            detail: serde_json::json!({ "reason": reason }),
        }
    }

    pub fn failed(&self) -> bool {
        self.applies && !self.pass
    }
}

/// Writes artifacts into the output directory, skipping formats that were
/// not requested. Each file is written once, from one thread.
pub struct Artifacts {
    dir: PathBuf,
    formats: Vec<Format>,
}

impl Artifacts {
    pub fn new(dir: &Path, formats: &[Format]) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            formats: formats.to_vec(),
        })
    }

    fn write(&self, format: Format, name: &str, content: &str) -> Result<()> {
        if !self.formats.contains(&format) {
            return Ok(());
        }
        let path = self.dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
    }

    pub fn csv(&self, name: &str, content: &str) -> Result<()> {
        self.write(Format::Csv, name, content)
    }

    pub fn svg(&self, name: &str, content: &str) -> Result<()> {
        self.write(Format::Svg, name, content)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(Format::Json, name, &text)
    }
}
