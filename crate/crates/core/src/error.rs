use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate Möbius map: |det| = {0:e} is below 1e-300")]
    Degenerate(f64),

    #[error("every point is fixed by the identity map")]
    IdentityMap,

    #[error("generator {digit} composed with its inverse {inverse} is not the identity")]
    BrokenInversePair { digit: u8, inverse: u8 },

    #[error("unknown group `{name}` (available: {available})")]
    UnknownGroup { name: String, available: String },

    #[error("digit {digit} at position {position} is outside 1..={m}")]
    DigitOutOfRange { digit: u8, position: usize, m: u8 },

    #[error("unknown letter `{token}` at position {position}")]
    UnknownLetter { token: String, position: usize },

    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),

    #[error("invalid group spec: {0}")]
    SpecFormat(String),

    #[error("index {index} does not fit depth {depth} (needs index < {m}^{depth})")]
    IndexOutOfRange { index: u64, m: u64, depth: u32 },

    #[error("alphabet size {0} is unsupported (need 2..=255)")]
    AlphabetSize(u64),

    #[error("depth {depth} overflows 64-bit node counts for m = {m}; maximum supported depth is {max_depth}")]
    DepthOverflow { m: u64, depth: u32, max_depth: u32 },

    #[error("invalid depth {0}")]
    InvalidDepth(u32),

    #[error("group `{0}` has no Möbius generators")]
    MissingGenerators(String),

    #[error("invalid viewport: {0}")]
    InvalidViewport(String),

    #[error("canvas {width}x{height} is empty or exceeds the pixel budget")]
    CanvasSize { width: u32, height: u32 },

    #[error("dictionary at depth {depth} would store more than {budget} digits")]
    StorageBudget { depth: u32, budget: u64 },

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
