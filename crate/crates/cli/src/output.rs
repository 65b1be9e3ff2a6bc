use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use crate::Format;

/// A failed run, by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Range(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Range(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Io(m) => write!(f, "I/O error: {m}"),
            Failure::Range(m) => write!(f, "{m}"),
        }
    }
}

impl From<crlab_core::Error> for Failure {
    fn from(e: crlab_core::Error) -> Self {
        use crlab_core::Error;
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            Error::Overflow(_) | Error::Resource(_) => Failure::Range(e.to_string()),
            Error::Domain(_) | Error::Precondition(_) | Error::Parse(_) => {
                Failure::Usage(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Where results go. The body is rendered fully in memory before anything is
/// written, so a failed computation never leaves a partial file.
pub struct Sink {
    out: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn new(out: Option<PathBuf>, format: Format) -> Self {
        Sink { out, format }
    }

    pub fn emit<F>(&self, render: F) -> Result<(), Failure>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<(), Failure>,
    {
        let mut buf = Vec::new();
        render(&mut buf)?;
        match &self.out {
            Some(path) => std::fs::write(path, &buf)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&buf)?;
                stdout.flush()?;
                Ok(())
            }
        }
    }

    pub fn json<T: serde::Serialize>(&self, value: &T) -> Result<(), Failure> {
        self.emit(|buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }

    /// One-line summary: to stdout when the body went to a file, to stderr
    /// otherwise.
    pub fn summary(&self, line: &str) {
        if self.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}
