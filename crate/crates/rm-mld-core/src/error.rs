use alloc::string::String;
use core::fmt;

/// Errors reported by the core operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A dimension or code parameter is outside the supported range.
    ParameterOutOfRange(String),
    /// The requested enumeration would be too large to materialise.
    CostGuard(String),
    /// A modulus polynomial is not primitive; carries the multiplicative
    /// order of `x` that was actually found (0 if `x` is not even a unit).
    NotPrimitive { modulus: u32, order: u32 },
    /// A supposed basis is linearly dependent.
    DependentBasis,
    /// Vector or matrix lengths do not match.
    LengthMismatch { expected: usize, found: usize },
    /// A position set of the right size fails the rank criterion.
    NotInformationSet,
    /// An admissible-family condition is violated; carries the offending
    /// position and the pair of flat indices that fail at it.
    FamilyViolation {
        position: u16,
        flats: (usize, usize),
        reason: &'static str,
    },
    /// Embedded fixture data does not match its pinned checksum.
    FixtureCorrupt {
        name: &'static str,
        expected: u64,
        found: u64,
    },
    /// A check-system precondition is violated (e.g. a flat through the
    /// excluded point in puncturing mode).
    CheckSystem(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ParameterOutOfRange(msg) => write!(f, "parameter out of range: {msg}"),
            Error::CostGuard(msg) => write!(f, "enumeration guard: {msg}"),
            Error::NotPrimitive { modulus, order } => write!(
                f,
                "modulus {modulus:#x} is not primitive: x has multiplicative order {order}"
            ),
            Error::DependentBasis => write!(f, "basis vectors are linearly dependent"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NotInformationSet => write!(f, "positions do not form an information set"),
            Error::FamilyViolation {
                position,
                flats,
                reason,
            } => write!(
                f,
                "family violation at position {position}, flats {} and {}: {reason}",
                flats.0, flats.1
            ),
            Error::FixtureCorrupt {
                name,
                expected,
                found,
            } => write!(
                f,
                "fixture `{name}` corrupt: checksum {found:#018x}, expected {expected:#018x}"
            ),
            Error::CheckSystem(msg) => write!(f, "check system: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
