use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("invalid range [{lo}, {hi})")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("invalid width: {0}")]
    InvalidWidth(String),
    #[error("activation spec: {0}")]
    Spec(String),
    #[error("model build: {0}")]
    Build(String),
    #[error("non-finite function value at coordinate {index}")]
    NonFinite { index: usize },
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Diverged { epoch: usize, loss: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate basis: column {0} has zero norm")]
    DegenerateBasis(usize),
    #[error("IoU undefined: union of occupied voxels is empty")]
    EmptyUnion,
    #[error("degenerate baseline: reference Frobenius norm is zero")]
    DegenerateBaseline,
    #[error("aliasing: component at {freq} Hz is not below the Nyquist frequency {nyquist} Hz")]
    Aliasing { freq: f64, nyquist: f64 },
}
