//! Crate-wide error type.

use crate::ratio::Ratio;
use thiserror::Error;

/// Alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building parameters, coding blocks,
/// parsing packets or running experiments.
#[derive(Debug, Error)]
pub enum Error {
    // --- parameter validation ---
    #[error("stretch factor must exceed 1")]
    StretchTooSmall,
    #[error("message length must be positive")]
    EmptyMessage,
    #[error("message length must be a whole number of bytes, got {0} bits")]
    MessageNotByteAligned(u64),
    #[error("packet payload must be a positive multiple of 8 bits, got {0}")]
    InvalidPayloadLength(u32),
    #[error("total packet count {p} must not be below source count {k}")]
    NotEnoughPackets { k: u32, p: u32 },
    #[error("message of {message_bits} bits exceeds block capacity of {capacity_bits} bits")]
    MessageTooLong {
        message_bits: u64,
        capacity_bits: u64,
    },
    #[error("derived packet counts exceed implementation limits")]
    CountOverflow,

    // --- block framing ---
    #[error("expected {expected} bytes of block data, got {got}")]
    BlockSizeMismatch { expected: usize, got: usize },
    #[error("length prefix declares {declared} bytes but only {available} are present")]
    PaddingOverrun { declared: u64, available: u64 },
    #[error("length prefix declares an empty message")]
    PaddingEmpty,

    // --- packet wire format ---
    #[error("bad packet magic")]
    BadMagic,
    #[error("unsupported packet version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown codec id {0}")]
    UnknownCodecId(u8),
    #[error("packet truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },

    // --- decoding input ---
    #[error("duplicate packet index {0}")]
    DuplicateIndex(u32),
    #[error("packet index {index} out of range for {p} packets")]
    IndexOutOfRange { index: u32, p: u32 },
    #[error("packets from different blocks: {0:#018x} and {1:#018x}")]
    MixedBlocks(u64, u64),

    // --- field and MDS ---
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("mds code supports at most 256 packets, got k={k} + m={m}")]
    FieldPointsExhausted { k: usize, m: usize },
    #[error("received submatrix is singular")]
    SingularSubmatrix,

    // --- cascade graph ---
    #[error("cascade degree must be at least 2, got {0}")]
    InvalidDegree(usize),
    #[error("cascade decay must be in (0, 1), got {0}")]
    InvalidDecay(Ratio),
    #[error("cascade tail threshold must be in [1, 128], got {0}")]
    InvalidTailThreshold(usize),
    #[error(
        "check budget mismatch: parameters allow {budget} check symbols but the graph \
         needs {needed}; nearest achievable stretch is {achievable_c}"
    )]
    BudgetMismatch {
        budget: u32,
        needed: u32,
        achievable_c: Ratio,
    },

    // --- channel simulation ---
    #[error("probability must be in [0, 1], got {0}")]
    InvalidProbability(Ratio),
    #[error("cannot deliver {requested} of {available} packets")]
    DeliverTooLarge { requested: usize, available: usize },

    // --- bench harness ---
    #[error("linearity check needs at least 2 records, got {0}")]
    NotEnoughRecords(usize),
    #[error("benchmark sizes must be strictly increasing")]
    SizesNotIncreasing,
    #[error("no decodable subset found after {0} attempts")]
    NoDecodableSubset(u32),

    // --- misc ---
    #[error("bad rational literal {0:?}")]
    BadRatio(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
