use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] geneo_core::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// Well-formed CSV whose content violates the format. `line` is 0 when
    /// the problem concerns the file as a whole.
    #[error("{}", located(*line, message))]
    Format { line: u64, message: String },
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Whether the error is caused by the caller's input (arguments, files
    /// or parameters) rather than by the environment or an infeasible
    /// configuration.
    pub fn is_bad_input(&self) -> bool {
        match self {
            Error::Core(geneo_core::Error::Infeasible { .. }) => false,
            Error::Core(_) | Error::Csv(_) | Error::Json(_) | Error::Format { .. } => true,
            Error::File { .. } | Error::Io(_) | Error::ThreadPool(_) => false,
        }
    }
}

fn located(line: u64, message: &str) -> String {
    if line == 0 {
        message.to_owned()
    } else {
        format!("line {line}: {message}")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
