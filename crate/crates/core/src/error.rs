use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cell budget exceeded: dimension {dim} needs {count} cells (budget {budget})")]
    BudgetExceeded { dim: isize, count: u128, budget: usize },

    #[error("vertex {vertex} out of range for a complex on {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("duplicate vertex {vertex} in simplex")]
    DuplicateVertex { vertex: usize },

    #[error("position {position} out of range for a cell of length {len}")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("operation requires a {expected} cell, got {found}")]
    WrongCellKind { expected: &'static str, found: &'static str },

    #[error("cell {cell} is not in the complex")]
    UnknownCell { cell: String },

    #[error("dimension {dim} outside the available range {min}..={max}")]
    DimensionOutOfRange { dim: isize, min: isize, max: isize },

    #[error(
        "dimension {dim} is the truncation layer of a full sequence complex (max_dim {max_dim}); \
         its up-Laplacian would be incomplete"
    )]
    Truncation { dim: isize, max_dim: isize },

    #[error("probability mass of dimension {dim} is zero")]
    DegenerateSlice { dim: isize },

    #[error("weight of cell {cell} must be strictly positive, got {value}")]
    Positivity { cell: String, value: f64 },

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("invalid independent vertices model: {0}")]
    Model(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dense eigensolve limited to {limit}x{limit}, operator has size {size}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Name of the subsystem that raised the error, used in CLI diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::BudgetExceeded { .. }
            | Error::VertexOutOfRange { .. }
            | Error::DuplicateVertex { .. }
            | Error::PositionOutOfRange { .. }
            | Error::WrongCellKind { .. }
            | Error::UnknownCell { .. } => "cell-complex",
            Error::DegenerateSlice { .. }
            | Error::Positivity { .. }
            | Error::Normalization(_)
            | Error::Model(_) => "weights",
            Error::DimensionOutOfRange { .. }
            | Error::Truncation { .. }
            | Error::DimensionMismatch { .. }
            | Error::TooLarge { .. } => "hodge-core",
            Error::Precondition(_) => "spectral-analysis",
            Error::InvalidInput(_) => "input",
        }
    }
}
