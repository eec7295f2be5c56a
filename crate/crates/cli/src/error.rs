use memwalk::WalkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("resource: {0}")]
    Resource(String),

    #[error(transparent)]
    Walk(WalkError),

    #[error("output: {0}")]
    Io(#[from] std::io::Error),

    #[error("output: {0}")]
    Csv(#[from] csv::Error),
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Resource(msg) => CliError::Resource(msg),
            WalkError::InvalidSpec(_)
            | WalkError::Dimension(_)
            | WalkError::Domain(_)
            | WalkError::MustBeCyclic => CliError::Usage(e.to_string()),
            other => CliError::Walk(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Walk(WalkError::Verification { .. }) => 4,
            CliError::Walk(_) | CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
