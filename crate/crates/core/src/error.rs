use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `position` is a 1-based character column; end of input is reported
    /// one past the last character.
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("capacity exceeded: {required} > cap {cap}")]
    CapacityExceeded { required: u64, cap: u64 },

    #[error("not a partition: {0}")]
    NotAPartition(String),

    #[error("gamma is not closed under subformulas")]
    GammaNotSubClosed,

    #[error("gamma is not a subset of psi")]
    GammaNotSubsetPsi,

    #[error("frame is not point-generated: inequality is not contained in the second relation")]
    NotPointGenerated,

    #[error("point `{0}` is R-reflexive but not D-reflexive")]
    ReflexiveWithoutDiffLoop(String),

    #[error("invalid document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
