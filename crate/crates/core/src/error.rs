use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("prime table is empty: limit {0} < 2")]
    EmptyTable(u64),

    #[error("query {value} exceeds the prime table limit {limit}")]
    OutOfRange { value: f64, limit: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("jet shape mismatch: {0}")]
    Shape(String),

    #[error("derivative order {requested} exceeds jet order {order}")]
    Order { requested: usize, order: usize },

    #[error("exponent {exponent} of prime {prime} is not below b = {b}")]
    NotInSet { prime: u64, exponent: u32, b: u32 },

    #[error("refusing to enumerate {size} elements (cap {cap})")]
    CapExceeded { size: String, cap: u64 },

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("numerical accuracy failure: {0}")]
    Accuracy(String),

    #[error("constraint violated: {0}")]
    Constraint(String),
}

impl Error {
    /// Whether the failure is numerical (as opposed to invalid input).
    pub fn is_accuracy(&self) -> bool {
        matches!(self, Error::Accuracy(_))
    }
}
