use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Exact Fibonacci evaluation refused because the index is above the budget.
    #[error("index {index} exceeds the exact-index budget {max}")]
    BudgetExceeded { index: BigUint, max: u64 },

    /// The oracle ladder overflowed its index budget at tower level `level`.
    #[error("oracle index at level {level} exceeds budget {max}")]
    OracleBudgetExceeded { level: u64, max: u64 },

    /// A composite cofactor resisted the budgeted rho effort.
    #[error("could not factor {value} within the rho budget")]
    FactorBudgetExceeded { value: BigUint },

    #[error("no Pisano recurrence mod {modulus} within {cap} steps")]
    CapExceeded { modulus: u64, cap: u64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// No exponent c with j | a*s^c exists.
    #[error("no exponent c with {j} | {a}*{s}^c")]
    NoC { a: BigUint, j: BigUint, s: BigUint },

    /// A minimal c exists but no prime of s has p^c | j.
    #[error("no prime witness for a={a}, j={j}, s={s}, c={c}")]
    NoWitness {
        a: BigUint,
        j: BigUint,
        s: BigUint,
        c: u32,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
