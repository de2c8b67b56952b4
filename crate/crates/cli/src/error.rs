use thiserror::Error;

/// Bad invocation; exit code 2.
#[derive(Debug, Error)]
pub enum UsageError {
    #[error("{}", first_line(.0))]
    Clap(#[from] clap::Error),

    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: &'static str, message: String },

    #[error("config file: {message}")]
    File { message: String },
}

fn first_line(e: &clap::Error) -> String {
    let rendered = e.to_string();
    rendered
        .lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ")
        .to_string()
}

impl UsageError {
    pub fn exit_code(&self) -> i32 {
        match self {
            UsageError::Clap(e) => e.exit_code(),
            _ => 2,
        }
    }
}

/// Failure while running a valid configuration; exit code 1.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Simulation(#[from] cheshire_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}
