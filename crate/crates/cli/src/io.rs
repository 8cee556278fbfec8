use std::fmt;
use std::io::Write;
use std::path::Path;

use qcompress::ensemble::{Ensemble, EnsembleSpec};
use qcompress::qstate::linalg::c;
use qcompress::qstate::CMatrix;

/// A failure with its exit code: 1 for domain errors, 2 for I/O and parse
/// errors.
#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<qcompress::Error> for CliError {
    fn from(e: qcompress::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn parse_spec(path: &Path) -> CliResult<EnsembleSpec> {
    let text = read_text(path)?;
    EnsembleSpec::from_json(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses, validates and builds an ensemble. Violations are a domain error.
pub fn load_ensemble(path: &Path) -> CliResult<Ensemble> {
    let spec = parse_spec(path)?;
    let violations = spec.validate();
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Domain(format!("{}: invalid ensemble\n{}", path.display(), lines.join("\n"))));
    }
    Ok(spec.build()?)
}

/// A square complex matrix written as rows of `[re, im]` pairs.
pub fn load_matrix(path: &Path) -> CliResult<CMatrix> {
    let text = read_text(path)?;
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Domain(format!("{}: matrix must be square and non-empty", path.display())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

/// Writes via a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Writes to `out` if given, otherwise to stdout.
pub fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}
