use core::fmt;

/// Errors reported by the library. Every fallible operation returns one of
/// these instead of panicking mid-pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Division by a para-complex zero divisor (`z* z = 0`).
    ZeroDivisor,
    /// A point violates `<x, chi> = 1`.
    OffQuadric { residual: f64 },
    /// A tangent vector violates `<X, chi> + <x, Xt> = 0`.
    NotTangent { residual: f64 },
    /// Two tangent vectors live over different base points.
    BaseMismatch,
    /// Grid has fewer points per axis than the stencil needs.
    GridTooSmall { need: usize, got: usize },
    /// Grid exceeds a size cap of a direct method.
    GridTooLarge { cap: usize, got: usize },
    /// Array lengths disagree with the grid or with each other.
    ShapeMismatch { expected: usize, got: usize },
    /// Non-positive or non-finite spacing, or another malformed parameter.
    InvalidParameter(&'static str),
    /// A matrix that must be invertible is (numerically) singular.
    Singular,
    /// Christoffel symbols are not symmetric in their lower indices.
    Torsion { residual: f64 },
    /// Angle function leaves the guard band `(theta_min, pi - theta_min)`.
    GuardBand { theta: f64 },
    /// Adjacent square roots landed on different branches.
    BranchCut,
    /// Input that must be holomorphic is not.
    NotHolomorphic { residual: f64 },
    /// Newton iteration failed (line search exhausted or iteration cap hit).
    NewtonDiverged { iterations: usize, residual: f64 },
    /// A Maurer-Cartan pair fails the primitivity test required by the caller.
    NotPrimitive { residual: f64 },
    /// A quantity that must be real has an imaginary part above tolerance.
    NotReal { imag: f64 },
    /// A frame lies outside the twisted real form.
    NotInRealForm { residual: f64 },
    /// Matrix exponential input too large to integrate safely.
    Overflow,
    /// A scaling field or determinant vanishes.
    Vanishing,
    /// Gram matrix of the tangent plane is degenerate.
    DegenerateTangent,
    /// Input contains NaN or infinity.
    NonFinite,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroDivisor => f.write_str("division by a para-complex zero divisor"),
            Error::OffQuadric { residual } => {
                write!(f, "point is off the quadric: |<x,chi> - 1| = {residual:e}")
            }
            Error::NotTangent { residual } => {
                write!(
                    f,
                    "vector is not tangent to the quadric (residual {residual:e})"
                )
            }
            Error::BaseMismatch => f.write_str("tangent vectors have different base points"),
            Error::GridTooSmall { need, got } => {
                write!(f, "grid too small: need {need} points per axis, got {got}")
            }
            Error::GridTooLarge { cap, got } => {
                write!(
                    f,
                    "grid too large for direct method: cap {cap} points, got {got}"
                )
            }
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected} values, got {got}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::Singular => f.write_str("singular matrix"),
            Error::Torsion { residual } => {
                write!(f, "connection has torsion (asymmetry {residual:e})")
            }
            Error::GuardBand { theta } => {
                write!(f, "angle {theta} outside the guard band")
            }
            Error::BranchCut => f.write_str("square-root branch jumps between neighbouring points"),
            Error::NotHolomorphic { residual } => {
                write!(f, "field is not holomorphic (max |d/dzbar| = {residual:e})")
            }
            Error::NewtonDiverged {
                iterations,
                residual,
            } => {
                write!(
                    f,
                    "Newton iteration failed after {iterations} steps (residual {residual:e})"
                )
            }
            Error::NotPrimitive { residual } => {
                write!(
                    f,
                    "Maurer-Cartan form is not primitive (residual {residual:e})"
                )
            }
            Error::NotReal { imag } => write!(f, "imaginary part {imag:e} above tolerance"),
            Error::NotInRealForm { residual } => {
                write!(
                    f,
                    "matrix outside the twisted real form (residual {residual:e})"
                )
            }
            Error::Overflow => f.write_str("matrix exponential overflow"),
            Error::Vanishing => f.write_str("scale factor or determinant vanishes"),
            Error::DegenerateTangent => f.write_str("degenerate tangent plane"),
            Error::NonFinite => f.write_str("non-finite input"),
        }
    }
}

impl core::error::Error for Error {}
