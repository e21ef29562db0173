use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Every variant maps onto a short machine-readable code through
/// [`Error::code`], which the command-line tool prints as an error prefix.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid shape does not match: {0}")]
    ShapeMismatch(String),
    #[error("diagonal entry ({0},{0}) is {1}, expected 0")]
    NonZeroDiagonal(usize, f64),
    #[error("off-diagonal entry ({0},{1}) is {2}, expected a positive value")]
    NonPositiveOffDiagonal(usize, usize, f64),
    #[error("entry ({0},{1}) is not finite")]
    NonFinite(usize, usize),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("network has no nodes")]
    EmptyNetwork,
    #[error("scale factor {0} is not positive")]
    NonPositiveScale(f64),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("subset is empty")]
    EmptySubset,
    #[error("separation is undefined for a single-node network")]
    SingletonNetwork,
    #[error("dissimilarities are not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("strong triangle inequality fails for ({0},{1}) through {2}")]
    NotUltrametric(usize, usize, usize),
    #[error("invalid dendrogram: {0}")]
    InvalidDendrogram(String),
    #[error("hop bound {0} is below 2")]
    InvalidHopBound(usize),
    #[error("invalid method: {0}")]
    InvalidMethod(String),
    #[error("representer has {k} nodes, above the cap of {cap}")]
    RepresenterTooLarge { k: usize, cap: usize },
    #[error("representer size {0} is invalid")]
    InvalidSize(usize),
    #[error("representer is not weakly connected")]
    NotWeaklyConnected,
    #[error("representer family is empty")]
    EmptyFamily,
    #[error("representer weight {0} is not a positive finite value")]
    NonPositiveWeight(f64),
    #[error("invalid representer: {0}")]
    InvalidRepresenter(String),
    #[error("node map: {0}")]
    InvalidNodeMap(String),
    #[error("map is not dissimilarity reducing at ({0},{1})")]
    NotDissimilarityReducing(usize, usize),
    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),
    #[error("instance with {size} nodes exceeds the exact-search cap of {cap}")]
    InstanceTooLarge { size: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("column `{0}` has zero total similarity")]
    ZeroColumnSum(String),
    #[error("negative similarity at ({0},{1})")]
    NegativeSimilarity(usize, usize),
    #[error("zero similarity at ({0},{1}) with zero policy `error`")]
    ZeroSimilarity(usize, usize),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable upper-case identifier for the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::NonZeroDiagonal(..) => "NON_ZERO_DIAGONAL",
            Error::NonPositiveOffDiagonal(..) => "NON_POSITIVE_OFF_DIAGONAL",
            Error::NonFinite(..) => "NON_FINITE",
            Error::DuplicateLabel(_) => "DUPLICATE_LABEL",
            Error::EmptyNetwork => "EMPTY_NETWORK",
            Error::NonPositiveScale(_) => "NON_POSITIVE_SCALE",
            Error::UnknownLabel(_) => "UNKNOWN_LABEL",
            Error::EmptySubset => "EMPTY_SUBSET",
            Error::SingletonNetwork => "SINGLETON_NETWORK",
            Error::NotSymmetric(..) => "NOT_SYMMETRIC",
            Error::NotUltrametric(..) => "NOT_ULTRAMETRIC",
            Error::InvalidDendrogram(_) => "INVALID_DENDROGRAM",
            Error::InvalidHopBound(_) => "INVALID_HOP_BOUND",
            Error::InvalidMethod(_) => "INVALID_METHOD",
            Error::RepresenterTooLarge { .. } => "REPRESENTER_TOO_LARGE",
            Error::InvalidSize(_) => "INVALID_SIZE",
            Error::NotWeaklyConnected => "NOT_WEAKLY_CONNECTED",
            Error::EmptyFamily => "EMPTY_FAMILY",
            Error::NonPositiveWeight(_) => "NON_POSITIVE_WEIGHT",
            Error::InvalidRepresenter(_) => "INVALID_REPRESENTER",
            Error::InvalidNodeMap(_) => "INVALID_NODE_MAP",
            Error::NotDissimilarityReducing(..) => "NOT_DISSIMILARITY_REDUCING",
            Error::InvalidCorrespondence(_) => "INVALID_CORRESPONDENCE",
            Error::InstanceTooLarge { .. } => "INSTANCE_TOO_LARGE",
            Error::Parse(_) => "PARSE_ERROR",
            Error::ZeroColumnSum(_) => "ZERO_COLUMN_SUM",
            Error::NegativeSimilarity(..) => "NEGATIVE_SIMILARITY",
            Error::ZeroSimilarity(..) => "ZERO_SIMILARITY",
            Error::UnknownProperty(_) => "UNKNOWN_PROPERTY",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::Io(_) => "IO_ERROR",
        }
    }

    /// True for errors raised because an instance exceeds a configured size cap.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::RepresenterTooLarge { .. } | Error::InstanceTooLarge { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
