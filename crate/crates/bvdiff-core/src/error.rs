use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors surfaced by the solver, cipher kit and oracles.
///
/// Resource guards fail hard with the offending size so callers can switch
/// to sampled estimation explicitly instead of silently degrading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands of a GF(2) operation disagree on width.
    WidthMismatch { left: u8, right: u8 },
    /// Bit width outside the supported 1..=64 range.
    BadWidth(u8),
    /// A table or spectrum would exceed the desk-scale ceiling.
    ResourceGuard { bits: u8, limit: u8, what: &'static str },
    /// Round index outside `1..=r` (or `0..r` for suffix splits).
    RoundRange { got: u8, rounds: u8 },
    /// Parameter outside its documented domain.
    BadParam(&'static str),
    /// Malformed cipher definition.
    BadCipher(&'static str),
    /// Internal invariant violated; indicates a bug, not bad input.
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::WidthMismatch { left, right } => {
                write!(f, "bit-width mismatch: {left} vs {right}")
            }
            Error::BadWidth(w) => write!(f, "unsupported bit width {w} (need 1..=64)"),
            Error::ResourceGuard { bits, limit, what } => write!(
                f,
                "{what} over {bits} bits exceeds the desk-scale guard of {limit} bits; \
                 use a smaller instance or an explicitly sampled mode"
            ),
            Error::RoundRange { got, rounds } => {
                write!(f, "round index {got} out of range for an {rounds}-round cipher")
            }
            Error::BadParam(msg) => write!(f, "bad parameter: {msg}"),
            Error::BadCipher(msg) => write!(f, "bad cipher definition: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
