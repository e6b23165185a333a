use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet is empty; no code set applies")]
    EmptyAlphabet,

    #[error("code set {0} is outside the supported range 1..={max}", max = crate::codebook::MAX_SET)]
    SetOutOfRange(u32),

    #[error("zero count {z} is out of range for code set {n}")]
    ZeroCountOutOfRange { n: u32, z: u32 },

    #[error("requested {requested} codes but set {n} holds only {capacity}")]
    TooManyCodes {
        n: u32,
        requested: u64,
        capacity: u64,
    },

    #[error("index {index} is outside 1..={max}")]
    IndexOutOfRange { index: u64, max: u64 },

    #[error("invalid trit digit {0}")]
    InvalidTrit(u8),

    #[error("trit string has length {actual}, expected {expected}")]
    TritLength { expected: usize, actual: usize },

    #[error("invalid digit {digit} for base {base}")]
    InvalidDigit { digit: u32, base: u32 },

    #[error("base {base} is below the minimum {min}")]
    BaseTooSmall { base: u32, min: u32 },

    #[error("value must be at least 1")]
    ZeroValue,

    #[error("letter width {0} is outside 1..=32")]
    LetterWidth(u32),

    #[error("letter {letter:#x} does not fit in {bits} bits")]
    LetterTooWide { letter: u32, bits: u32 },

    #[error("letter {0:#x} is not in the model")]
    UnknownLetter(u32),

    #[error("bitstream ended at bit {at_bit} in the middle of codeword {codeword}")]
    Truncated { at_bit: u64, codeword: u64 },

    #[error("decoded index {index} exceeds alphabet size {m}")]
    IndexBeyondAlphabet { index: u64, m: u64 },

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error("bad magic {found:02x?} at byte offset 0")]
    BadMagic { found: [u8; 2] },

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("unsupported flag bits {0:#06b}")]
    UnsupportedFlags(u8),

    #[error("container truncated at byte offset {offset} while reading {what}")]
    TruncatedContainer { offset: usize, what: &'static str },

    #[error("duplicate alphabet letter {letter:#x} at byte offset {offset}")]
    DuplicateLetter { letter: u32, offset: usize },

    #[error("letter count {letters} does not match bit length {bit_length} at width {width}")]
    LengthMismatch {
        letters: u64,
        bit_length: u64,
        width: u32,
    },
}

impl Error {
    /// True for errors that indicate damaged payload data rather than a
    /// malformed or foreign file.
    pub fn is_corruption(&self) -> bool {
        matches!(
            self,
            Error::Truncated { .. }
                | Error::IndexBeyondAlphabet { .. }
                | Error::Corrupt(_)
                | Error::LengthMismatch { .. }
        )
    }

    /// True for container structure errors (wrong magic, bad header, short
    /// alphabet block).
    pub fn is_format(&self) -> bool {
        matches!(
            self,
            Error::BadMagic { .. }
                | Error::UnsupportedVersion(_)
                | Error::UnsupportedFlags(_)
                | Error::LetterWidth(_)
                | Error::TruncatedContainer { .. }
                | Error::DuplicateLetter { .. }
                | Error::LetterTooWide { .. }
        )
    }
}
