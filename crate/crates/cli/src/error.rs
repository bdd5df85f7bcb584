use fracstab_core::Error;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CERTIFICATE_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DIVERGENCE: u8 = 3;
pub const EXIT_DOMAIN: u8 = 4;
pub const EXIT_INTERNAL: u8 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver diverged at node {node} (order {order})")]
    Divergence { order: f64, node: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Divergence { .. } => EXIT_DIVERGENCE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io { .. } | CliError::Core(_) => EXIT_INTERNAL,
        }
    }

    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }

    /// Attach the order being solved to a core error.
    pub(crate) fn at_order(order: f64) -> impl FnOnce(Error) -> Self {
        move |e| match e {
            Error::Divergence { node } => CliError::Divergence { order, node },
            other => other.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence { node } => CliError::Divergence { order: f64::NAN, node },
            Error::Domain(m) => CliError::Domain(m),
            Error::InvalidOrder(_) | Error::Grid(_) | Error::Dimension { .. } | Error::Params(_) => {
                CliError::Config(e.to_string())
            }
            Error::NoEndemicEquilibrium { .. } => CliError::Config(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
