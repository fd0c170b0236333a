use thiserror::Error;

use crate::circuit::ParseDiagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero coefficient row")]
    ZeroRow,

    #[error("strict row passed where a closed row is required")]
    StrictRow,

    #[error("polytope is unbounded")]
    UnboundedPolytope,

    #[error("unbounded region")]
    UnboundedRegion,

    #[error("integer feasibility undecided: {0}")]
    IlpIncomplete(String),

    #[error("cell count exceeded cap of {cap}")]
    CellCapExceeded { cap: usize },

    #[error("empty polyhedron list")]
    EmptyList,

    #[error("instance too large for brute force: {0}")]
    TooLarge(String),

    #[error("invalid budget k={k} for {m} regions")]
    InvalidBudget { k: usize, m: usize },

    #[error("invalid cover parameters: {0}")]
    InvalidParams(String),

    #[error("element {element} outside universe 1..={n}")]
    ElementOutsideUniverse { element: i64, n: usize },

    #[error("invalid number `{0}`")]
    InvalidNumber(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("{}", format_diagnostics(.0))]
    Parse(Vec<ParseDiagnostic>),

    #[error("oracle plugin failed: {0}")]
    Oracle(String),

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_diagnostics(diags: &[ParseDiagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
