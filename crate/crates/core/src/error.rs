use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{a} and {m} are not coprime")]
    NotCoprime { a: u64, m: u64 },

    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),

    #[error("denominator {den} is divisible by p = {p}")]
    DenominatorNotPrimeToP { den: u64, p: u64 },

    #[error("order of {p} modulo {m} exceeds the cap of {cap}")]
    OrderTooLarge { p: u64, m: u64, cap: u32 },

    #[error("field of size {p}^{f} exceeds the bound {bound}")]
    FieldTooLarge { p: u64, f: u32, bound: u64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("invalid system: {0}")]
    InvalidSpec(String),

    #[error("element is not divisible by alpha^{k}")]
    NotDivisible { k: u32 },

    #[error("alpha is undefined: {0}")]
    AlphaUndefined(String),

    #[error("iteration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("field cache: {0}")]
    Cache(String),
}
