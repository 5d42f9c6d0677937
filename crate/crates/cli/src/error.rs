use thiserror::Error;

/// Failures of a run, each mapped to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration is unreadable, malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] dblab_core::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration and schema problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use dblab_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(E::InvalidSpace(_) | E::InvalidArgument(_) | E::NotIncreasing { .. }) => 2,
            CliError::Core(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            _ => "numeric",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dblab_core::Error as E;

    #[test]
    fn exit_codes_separate_schema_from_numerics() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(E::InvalidSpace("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(E::IllPosedWindow { eig_min: 0.0 }).exit_code(), 3);
        assert_eq!(CliError::Core(E::DensityMargin("x".into())).kind(), "numeric");
    }
}
