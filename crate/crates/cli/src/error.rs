use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: surfgl_core::Error,
    },
    #[error(transparent)]
    Core(#[from] surfgl_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CRITERION_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
}

impl CliError {
    pub fn stage(stage: &str) -> impl FnOnce(surfgl_core::Error) -> CliError + '_ {
        move |source| CliError::Stage { stage: stage.to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use surfgl_core::Error as E;
        let core = match self {
            CliError::Usage(_) => return exit::USAGE,
            CliError::Io(_) => return exit::CRITERION_FAILURE,
            CliError::Stage { source, .. } | CliError::Core(source) => source,
        };
        match core {
            E::InvalidParameter(_)
            | E::MarginOutOfRange { .. }
            | E::InvalidGeometry(_)
            | E::ZeroSpeed { .. }
            | E::SelfIntersection { .. }
            | E::TooFewCells { .. }
            | E::Json(_) => exit::USAGE,
            e if e.is_non_convergence() => exit::NON_CONVERGENCE,
            _ => exit::CRITERION_FAILURE,
        }
    }
}
