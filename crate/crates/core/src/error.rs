use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    NotPrime(u64),
    InvalidPrecision { p: u64, precision: u32 },
    ParamsMismatch,
    DimensionMismatch,
    NonUnit,
    /// The answer needs more `p`-adic digits than were available.
    PrecisionExhausted,
    /// `Λ/(P, omega_n)` is infinite.
    InfiniteQuotient,
    NotDistinguished,
    UnsortedExponents,
    WellDefinednessViolation { row: usize, col: usize },
    NotAutomorphism,
    OrderNotPPower,
    ParentMismatch,
    LevelOutOfRange { level: u32, length: u32 },
    NotTowerInstance(&'static str),
    TheoremViolation { level: u32, detail: &'static str },
    NoStableFit,
    InvalidGroupTable(&'static str),
    ActionNotHomomorphism(&'static str),
    BudgetExceeded { needed: u64, budget: u64 },
    InvalidSection { index: usize, detail: &'static str },
    GenerationFailed,
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::InvalidPrecision { p, precision } => {
                write!(f, "precision {precision} is not supported for p = {p}")
            }
            Error::ParamsMismatch => f.write_str("operands carry different ring parameters"),
            Error::DimensionMismatch => f.write_str("dimension mismatch"),
            Error::NonUnit => f.write_str("element is not a unit"),
            Error::PrecisionExhausted => f.write_str("precision exhausted; raise the precision"),
            Error::InfiniteQuotient => f.write_str("quotient is infinite"),
            Error::NotDistinguished => f.write_str("polynomial is not distinguished"),
            Error::UnsortedExponents => f.write_str("exponents must be sorted descending and positive"),
            Error::WellDefinednessViolation { row, col } => {
                write!(f, "sigma[{row}][{col}] does not respect the cyclic orders")
            }
            Error::NotAutomorphism => f.write_str("action is not an automorphism"),
            Error::OrderNotPPower => f.write_str("action does not have p-power order"),
            Error::ParentMismatch => f.write_str("submodule belongs to a different module"),
            Error::LevelOutOfRange { level, length } => {
                write!(f, "level {level} exceeds tower length {length}")
            }
            Error::NotTowerInstance(why) => write!(f, "invalid tower instance: {why}"),
            Error::TheoremViolation { level, detail } => {
                write!(f, "theorem violation at level {level}: {detail}")
            }
            Error::NoStableFit => f.write_str("no stable (mu, lambda, nu) fit; extend the sequence"),
            Error::InvalidGroupTable(why) => write!(f, "invalid group table: {why}"),
            Error::ActionNotHomomorphism(why) => write!(f, "action is not a homomorphism: {why}"),
            Error::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} elements, budget is {budget}")
            }
            Error::InvalidSection { index, detail } => {
                write!(f, "inertia section {} invalid: {detail}", index + 1)
            }
            Error::GenerationFailed => f.write_str("random generation failed after retry cap"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}
