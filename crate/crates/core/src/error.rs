use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate resultant: {0}")]
    DegenerateResultant(String),

    #[error("parameter outside its domain: {0}")]
    Domain(String),

    #[error("instance generation infeasible: {0}")]
    Infeasible(String),

    #[error("invalid attack plan: {0}")]
    InvalidPlan(String),

    #[error("lattice basis is rank deficient (row {row} has a zero Gram-Schmidt projection)")]
    RankDeficient { row: usize },

    #[error("malformed lattice: {0}")]
    MalformedLattice(String),

    #[error("entry {column} of reduced vector {row} is not a multiple of its column scale")]
    InexactScaling { row: usize, column: usize },

    #[error("no reduced polynomial passed the Howgrave-Graham norm test")]
    NoFilteredPolynomials,

    #[error("extracted polynomials are algebraically dependent: {0}")]
    Dependence(String),

    #[error("no verified root inside the bounds")]
    NoRootInBounds,

    #[error("spurious root: {0}")]
    SpuriousRoot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
