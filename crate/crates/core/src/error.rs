use thiserror::Error;

/// Unified error type for the whole crate. Variants map onto the failure
/// modes of the arithmetic, model, quadrature, scale, and estimator layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (e.g. a k-fold log of a value too small to keep every level positive).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value could not be reduced to the requested representation
    /// (typically a tower value asked for as a plain float).
    #[error("overflow: {0}")]
    Overflow(String),

    /// Evaluation requested at (or within 1e-14 of) a pole.
    #[error("evaluation at a pole (|z - pole| < 1e-14)")]
    Pole,

    /// A pole modulus coincides with the requested circle radius.
    #[error("pole modulus equals the circle radius {r} within tolerance")]
    PoleOnCircle { r: f64 },

    /// An a-point lies on the integration/counting contour.
    #[error("a-point on the contour |z| = {r}")]
    OnCircle { r: f64 },

    /// Argument-principle refinement did not produce an integer winding.
    #[error("non-integral winding number {winding} (point straddling contour or refinement exhausted)")]
    NonIntegralWinding { winding: f64 },

    /// An a-point sits on the quadrature contour and defeats subdivision.
    #[error("singular node on the quadrature contour")]
    SingularNode,

    /// Node-doubling quadrature hit its cap without converging.
    #[error("quadrature did not converge within the node cap")]
    NonConvergent,

    /// Scale queried below its domain threshold x0.
    #[error("argument {x} below the scale domain threshold {x0}")]
    BelowDomain { x: f64, x0: f64 },

    /// A derived (quadrature-backed) scale needs a plain-float radius.
    #[error("derived scale queried at a radius exceeding float range")]
    NonLevelZero,

    /// Inverse queried below the scale's range.
    #[error("value below the scale's range")]
    BelowRange,

    /// Grid too small or too narrow for estimation.
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    /// Transition endpoints do not classify as Diverges/Converges.
    #[error("bad bracket: {0}")]
    BadBracket(String),

    /// Literal or config text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
