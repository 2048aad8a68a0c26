use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension {0} out of range 1..=24")]
    InvalidDimension(u8),
    #[error("direction {direction} out of range 1..={d}")]
    DirectionOutOfRange { direction: u8, d: u8 },
    #[error("vertex {vertex} out of range for d={d}")]
    VertexOutOfRange { vertex: u32, d: u8 },
    #[error("loop edge at vertex {0}")]
    LoopEdge(u32),
    #[error("vertex {0} is already covered")]
    AlreadyCovered(u32),
    #[error("no matching edge at vertex {0}")]
    NotMatched(u32),
    #[error("odd number of terminal vertices")]
    OddTerminalCount,
    #[error("odd number of MATCH vertices")]
    OddMatchCount,
    #[error("forbidden vertex {0} is covered by the matching")]
    ForbiddenCovered(u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
