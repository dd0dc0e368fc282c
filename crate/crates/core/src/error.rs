//! Error type shared by parameter derivation, model builders, and solvers.

use alloc::string::String;
use core::fmt;

/// Failure modes of the simulation library.
///
/// Programmer errors (mixing operators from different bases in arithmetic,
/// out-of-range indices) panic instead; this enum covers conditions a caller
/// with valid code can still run into, such as unphysical inputs or solver
/// breakdown.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter set failed validation.
    InvalidParams(String),
    /// Elimination of the intermediate level divides by the intermediate
    /// detuning, which must be nonzero.
    ZeroIntermediateDetuning,
    /// The pair-corrected Kerr coefficient divides by `bubble_count - 1`,
    /// which vanishes for a single bubble.
    SingleBubbleKerr,
    /// The blockade-volume estimate requires a positive effective two-photon
    /// detuning under the control-field light shift.
    NonPositiveTwoPhotonDetuning,
    /// An excitation cutoff too small for the requested quantity.
    CutoffTooSmall { required: u32, got: u32 },
    /// Two objects built on different bases were combined.
    BasisMismatch,
    /// The generator has more than one stationary state within tolerance.
    DegenerateSteadyState,
    /// Long-time propagation did not meet its convergence criterion by
    /// `t_max`.
    NonConvergence { t_max: f64 },
    /// The steady-state residual stayed above tolerance after refinement.
    ResidualAboveTolerance { residual: f64 },
    /// The steady state carries no photons, so intensity correlations are
    /// undefined.
    VanishingPhotonNumber,
    /// A linear solve hit a numerically singular matrix.
    SingularLinearSolve,
    /// A time grid was not finite, nonnegative, and nondecreasing.
    InvalidTimeGrid,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParams(why) => write!(f, "invalid physical parameters: {why}"),
            Self::ZeroIntermediateDetuning => {
                write!(f, "intermediate-level detuning must be nonzero")
            }
            Self::SingleBubbleKerr => write!(
                f,
                "pair-corrected Kerr coefficient is undefined for a single bubble"
            ),
            Self::NonPositiveTwoPhotonDetuning => write!(
                f,
                "blockade-volume estimate needs a positive light-shifted two-photon detuning"
            ),
            Self::CutoffTooSmall { required, got } => {
                write!(f, "excitation cutoff {got} too small; need at least {required}")
            }
            Self::BasisMismatch => write!(f, "objects live on different bases"),
            Self::DegenerateSteadyState => {
                write!(f, "stationary state is not unique within tolerance")
            }
            Self::NonConvergence { t_max } => {
                write!(f, "propagation did not converge by t = {t_max}")
            }
            Self::ResidualAboveTolerance { residual } => {
                write!(f, "steady-state residual {residual:.3e} above tolerance")
            }
            Self::VanishingPhotonNumber => {
                write!(f, "steady state holds no photons; correlation undefined")
            }
            Self::SingularLinearSolve => write!(f, "linear solve hit a singular matrix"),
            Self::InvalidTimeGrid => {
                write!(f, "time grid must be finite, nonnegative, and nondecreasing")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
