use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network parameters: c={clusters}, l={neurons} (both must be at least 2)")]
    InvalidParams { clusters: usize, neurons: usize },

    #[error("expected {expected} sub-messages, got {found}")]
    WrongArity { expected: usize, found: usize },

    #[error("symbol {symbol} in cluster {cluster} is out of range (l={neurons})")]
    SymbolOutOfRange { cluster: usize, symbol: usize, neurons: usize },

    #[error("neuron ({cluster}, {neuron}) is out of range")]
    IndexOutOfRange { cluster: usize, neuron: usize },

    #[error("links never join two neurons of cluster {0}")]
    SameCluster(usize),

    #[error("partial bits in cluster {cluster} match no neuron below l")]
    InconsistentPartialBits { cluster: usize },

    #[error("cluster {cluster} has {active} active neurons; expected exactly one")]
    NotSingleton { cluster: usize, active: usize },

    #[error("cannot erase {erase_count} of {clusters} clusters")]
    EraseCountTooLarge { erase_count: usize, clusters: usize },

    #[error("no stored messages to draw queries from")]
    EmptyMessageSet,

    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("malformed token {token:?}")]
    MalformedToken { token: String },

    #[error("bad magic {0:?}, expected \"SCNW\"")]
    BadMagic([u8; 4]),

    #[error("unsupported network file version {0}")]
    UnsupportedVersion(u16),

    #[error("network file truncated")]
    Truncated,

    #[error("network file has trailing bytes after the link payload")]
    TrailingBytes,

    #[error("block ({a},{b}) is not the transpose of block ({b},{a})")]
    SymmetryViolation { a: usize, b: usize },

    #[error("nonzero pad bits in block ({a},{b}) row {row}")]
    NonzeroPadding { a: usize, b: usize, row: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}
