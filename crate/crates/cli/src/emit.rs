//! CSV tables and run manifests.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// 17 significant digits, round-trippable.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streams rows to a file or to standard output.
pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
    path: Option<PathBuf>,
    rows: usize,
}

impl Table {
    pub fn create(path: Option<&Path>, header: &[&str]) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        };
        let mut writer = csv::WriterBuilder::new().from_writer(sink);
        writer.write_record(header).context("writing CSV header")?;
        Ok(Self { writer, path: path.map(Path::to_path_buf), rows: 0 })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).with_context(|| self.context())?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<usize> {
        self.writer.flush().with_context(|| self.context())?;
        Ok(self.rows)
    }

    fn context(&self) -> String {
        match &self.path {
            Some(p) => format!("writing {}", p.display()),
            None => "writing to standard output".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Flag values as given on the command line.
    pub parameters: BTreeMap<String, String>,
    /// Full argument vector, without the program name; `replay` re-executes it.
    pub argv: Vec<String>,
    pub versions: String,
    pub wall_time: f64,
    pub output_paths: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String], wall_time: f64, output_paths: Vec<String>) -> Self {
        let mut parameters = BTreeMap::new();
        let mut i = 0;
        while i < argv.len() {
            if let Some(flag) = argv[i].strip_prefix("--") {
                if let Some((k, v)) = flag.split_once('=') {
                    parameters.insert(k.to_string(), v.to_string());
                } else if i + 1 < argv.len() && !argv[i + 1].starts_with("--") {
                    parameters.insert(flag.to_string(), argv[i + 1].clone());
                    i += 1;
                } else {
                    parameters.insert(flag.to_string(), "true".into());
                }
            }
            i += 1;
        }
        Self {
            command: command.to_string(),
            parameters,
            argv: argv.to_vec(),
            versions: format!("oppenheim {}", env!("CARGO_PKG_VERSION")),
            wall_time,
            output_paths,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
