//! JSON-lines records. Every line carries the tool version, the problem-file
//! digest and the seed, followed by the command-specific payload.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
struct Envelope<'a, T> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    file_digest: Option<&'a str>,
    seed: Option<u64>,
    record: &'a T,
}

pub struct Records<'a> {
    command: &'a str,
    digest: Option<&'a str>,
    lines: Vec<String>,
}

impl<'a> Records<'a> {
    pub fn new(command: &'a str, digest: Option<&'a str>) -> Self {
        Self {
            command,
            digest,
            lines: Vec::new(),
        }
    }

    pub fn push<T: Serialize>(&mut self, seed: Option<u64>, record: &T) -> Result<(), CliError> {
        let env = Envelope {
            tool: "qfe",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            file_digest: self.digest,
            seed,
            record,
        };
        let line = serde_json::to_string(&env)
            .map_err(|e| CliError::Input(format!("cannot serialize record: {e}")))?;
        self.lines.push(line);
        Ok(())
    }

    pub fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        let Some(path) = out else { return Ok(()) };
        let write = || -> std::io::Result<()> {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            for l in &self.lines {
                writeln!(f, "{l}")?;
            }
            f.flush()
        };
        write().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}
