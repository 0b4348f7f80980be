use std::fmt;

/// A failed invocation, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an invalid configuration. Exit code 1.
    Validation(String),
    /// The simulation diverged. Exit code 2.
    BlowUp(String),
    /// Reading inputs or writing outputs failed. Exit code 3.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::BlowUp(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::BlowUp(m) => write!(f, "blow-up: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<rdcnn::ConfigErrors> for CliError {
    fn from(errs: rdcnn::ConfigErrors) -> Self {
        let lines: Vec<String> = errs.0.iter().map(ToString::to_string).collect();
        CliError::Validation(lines.join("\nerror: "))
    }
}

impl From<rdcnn::imagery::ImageError> for CliError {
    fn from(e: rdcnn::imagery::ImageError) -> Self {
        use rdcnn::imagery::ImageError;
        match e {
            ImageError::NonFinite => CliError::BlowUp(e.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<rdcnn::manifest::ManifestError> for CliError {
    fn from(e: rdcnn::manifest::ManifestError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<rdcnn::init::InitError> for CliError {
    fn from(e: rdcnn::init::InitError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<rdcnn::RunError> for CliError {
    fn from(e: rdcnn::RunError) -> Self {
        match e {
            rdcnn::RunError::BlowUp { .. } => CliError::BlowUp(e.to_string()),
            rdcnn::RunError::Kernel(_) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
