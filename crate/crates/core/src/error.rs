use alloc::string::String;

/// Errors raised by the geometry, solver and analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported sphere dimension n = {0}; grids exist for n = 2 and n = 3 only")]
    UnsupportedDimension(usize),

    #[error("resolution {0} is below the minimum of 8 nodes per angular direction")]
    ResolutionTooSmall(usize),

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("support value {value} at node {node} is not positive; the origin must lie inside the body")]
    NonPositiveSupport { node: usize, value: f64 },

    #[error("slice is not strictly convex: smallest eigenvalue of b_ij is {min_eig:e} at node {node}, largest is {max_eig:e}")]
    NonConvexSlice { node: usize, min_eig: f64, max_eig: f64 },

    #[error("orientation violated at node {node}: h_t = {h_t:e}, expected h_t < 0")]
    Orientation { node: usize, h_t: f64 },

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("inner body is not strictly inside the outer body at node {node} (h_inner = {inner}, h_outer = {outer})")]
    NotContained { node: usize, inner: f64, outer: f64 },

    #[error("no minimal graph over the ring: requested height drop {requested} exceeds the attainable maximum {max_drop}")]
    NoGraphSolution { requested: f64, max_drop: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("b_11 = {value:e} <= 0 at node {node}; iterate left the strictly convex cone")]
    ConvexityLoss { node: usize, value: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("converged solution has h_t = {h_t:e} >= 0 at node {node}")]
    OrientationLoss { node: usize, h_t: f64 },

    #[error("precondition violated at node {node}: value {value:e}")]
    Precondition { node: usize, value: f64 },

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("root not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
