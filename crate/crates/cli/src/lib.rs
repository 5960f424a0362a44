//! Pipelines behind the `subharm` binary. Each command reads one JSON input,
//! writes `report.json` plus CSV tables into the output directory, and maps
//! failures onto exit codes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use subharmonic::{Error, ErrorCategory};

pub mod analyze;
pub mod complete;
pub mod synth;

/// Grid and bookkeeping flags shared by all commands.
#[derive(Debug, Clone, Serialize)]
pub struct Flags {
    pub phi_grid: usize,
    pub t_decades: f64,
    pub t_per_decade: usize,
    pub seed: u64,
}

impl Default for Flags {
    fn default() -> Self {
        Flags { phi_grid: 256, t_decades: 2.0, t_per_decade: 32, seed: 0 }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input.
    Input(String),
    /// Failure writing results.
    Output(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Output(_) => 3,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Input => 2,
                ErrorCategory::Numeric => 3,
                ErrorCategory::Infeasible => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_input(path: &Path) -> CliResult<String> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(CliError::Input(format!("{} is empty", path.display())));
    }
    Ok(text)
}

/// Collects output files and writes them in one place.
pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        Ok(OutDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// CSV with a header row; floats in `{:.12e}`.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Output(format!("{name}: {e}"));
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(format!("{name}: {e}")))?;
        self.write(name, &String::from_utf8_lossy(&bytes))
    }

    pub fn files(&self) -> Vec<String> {
        let mut f = self.files.clone();
        f.push("report.json".into());
        f
    }

    pub fn write_report<T: Serialize>(&mut self, report: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
        self.write("report.json", &(text + "\n"))
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}
