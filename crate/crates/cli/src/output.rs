//! Result files. Every file opens with a comment block holding the fully
//! resolved config, so `--config <result file>` repeats the run.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

const BEGIN: &str = "# config begin";
const END: &str = "# config end";

pub fn header(command: &str, config_toml: &str) -> String {
    let mut out = format!("# cfa {command}\n{BEGIN}\n");
    for line in config_toml.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str(END);
    out.push('\n');
    out
}

/// The config block of a file written by [`header`], if present.
pub fn extract_embedded_config(text: &str) -> Option<String> {
    let mut lines = text.lines().skip_while(|l| *l != BEGIN);
    lines.next()?;
    let mut out = String::new();
    for line in lines {
        if line == END {
            return Some(out);
        }
        let body = line.strip_prefix("# ").or_else(|| line.strip_prefix('#'))?;
        out.push_str(body);
        out.push('\n');
    }
    None
}

/// Table writer: the header block, then CSV rows.
pub struct ResultFile {
    path: PathBuf,
    head: String,
    writer: csv::Writer<Vec<u8>>,
}

impl ResultFile {
    pub fn new(path: PathBuf, head: &str, columns: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(columns).expect("in-memory write");
        Self {
            path,
            head: head.to_string(),
            writer,
        }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        let body = self.writer.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
        let mut bytes = self.head.into_bytes();
        bytes.extend(body);
        write_file(&self.path, &bytes)?;
        Ok(self.path)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// Shortest round-trip decimal; negative zero prints as `0`.
pub fn num(v: f64) -> String {
    format!("{}", v + 0.0)
}
