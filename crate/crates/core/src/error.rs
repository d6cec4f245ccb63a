use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group spec at position {position}: {message}")]
    GroupSpec { position: usize, message: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration budget exceeded: need {required}, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("homomorphism is not surjective")]
    NotSurjective,

    #[error("homomorphism is not injective")]
    NotInjective,

    #[error("subgroup is not maximal (index {index})")]
    NotMaximal { index: u64 },

    #[error("constant terms must vanish")]
    NonzeroConstantTerm,

    #[error("series division left a remainder")]
    InexactDivision,

    #[error("coefficient {coefficient} of x^{x_exp} y^{y_exp} is not p-integral")]
    NotIntegral { x_exp: u32, y_exp: u32, coefficient: String },

    #[error("coefficient mode {mode} is incompatible with the formal group law {fgl}")]
    IncompatibleMode { mode: String, fgl: String },

    #[error("operation requires the height 1 integral model")]
    RequiresHeightOne,

    #[error("unknown check '{0}'")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
