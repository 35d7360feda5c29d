use thiserror::Error;

/// Errors raised by the geometry, spinor and catalog layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {0} out of range (expected 0..=3)")]
    IndexOutOfRange(usize),

    #[error("plane ({r}, {s}) is not ordered: require r < s <= 3")]
    PlaneOrder { r: usize, s: usize },

    #[error("matrix is not in SO(3,1): |L^T eta L - eta| = {residual:e}")]
    NotLorentz { residual: f64 },

    #[error("Lorentz matrix is not proper orthochronous (det = {det}, L00 = {l00})")]
    NotProperOrthochronous { det: f64, l00: f64 },

    #[error("point {0:?} lies outside the chart domain")]
    OutsideDomain([f64; 4]),

    #[error("degenerate coframe: condition number {0:e} exceeds 1e12")]
    DegenerateCoframe(f64),

    #[error("form degree {0} is invalid in four dimensions")]
    BadDegree(usize),

    #[error("imaginary part {0:e} of a real bilinear exceeds tolerance")]
    NonRealBilinear(f64),

    #[error("momentum is off the mass shell (shell residual {0:e})")]
    OffShellMomentum(f64),

    #[error("plane-wave branch {branch} unavailable: null space has dimension {dimension}")]
    EmptyNullSpace { branch: usize, dimension: usize },

    #[error("spinor field is off-shell (Dirac residual {0:e})")]
    OffShell(f64),

    #[error("local Lorentz field is not smooth at {point:?}: {reason}")]
    NonSmoothField { point: [f64; 4], reason: String },

    #[error("spacetime spec: {0}")]
    Spec(String),

    #[error("unphysical parameter: {0}")]
    Unphysical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
