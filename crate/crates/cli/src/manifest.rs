//! Run manifest: a JSON record of what a command produced, written last so
//! its presence implies every listed file exists.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub input: String,
    pub options: Vec<(String, String)>,
    pub output_dir: String,
    pub emitted_files: Vec<String>,
    pub wall_clock_ms: f64,
}

pub struct Emitter {
    out_dir: PathBuf,
    manifest: RunManifest,
    started: Instant,
}

impl Emitter {
    pub fn new(command: &str, input: &str, out_dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                input: input.to_string(),
                options: Vec::new(),
                output_dir: out_dir.display().to_string(),
                emitted_files: Vec::new(),
                wall_clock_ms: 0.0,
            },
            started: Instant::now(),
        })
    }

    pub fn option(&mut self, key: &str, value: impl ToString) {
        self.manifest.options.push((key.to_string(), value.to_string()));
    }

    /// Write one artifact into the output directory and record it.
    pub fn emit(&mut self, file_name: &str, contents: &str) -> std::io::Result<PathBuf> {
        let path = self.out_dir.join(file_name);
        std::fs::write(&path, contents)?;
        self.manifest.emitted_files.push(file_name.to_string());
        Ok(path)
    }

    /// Write the manifest itself; call once, after all artifacts.
    pub fn finish(mut self) -> std::io::Result<()> {
        self.manifest.wall_clock_ms = self.started.elapsed().as_secs_f64() * 1e3;
        let path = self.out_dir.join("run_manifest.json");
        let body = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(path, body)
    }
}
