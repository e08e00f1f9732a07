use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use tikhreg::export::write_json;
use tikhreg::Result;

/// Collects the files of one run; the directory is created only when the
/// first file is written, and `finish` adds `manifest.json` listing them.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir, files: Vec::new() }
    }

    pub fn write<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        fs::create_dir_all(&self.dir)?;
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        body(&mut w)?;
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        self.write(name, |w| write_json(w, value))
    }

    pub fn finish(mut self, mut manifest: Value) -> Result<PathBuf> {
        self.files.push("manifest.json".into());
        manifest["files"] = json!(self.files);
        fs::create_dir_all(&self.dir)?;
        let mut w = BufWriter::new(File::create(self.dir.join("manifest.json"))?);
        write_json(&mut w, &manifest)?;
        w.flush()?;
        Ok(self.dir)
    }
}

/// `--out-dir` if given, else `$TIKHREG_OUT/<command>`, else
/// `tikhreg-out/<command>`.
pub fn resolve_dir(explicit: Option<&PathBuf>, command: &str) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.clone();
    }
    let base = std::env::var_os("TIKHREG_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new("tikhreg-out").to_path_buf());
    base.join(command)
}
