use alloc::string::String;
use core::fmt;

/// Failure modes of the numerical routines.
///
/// Every variant maps to a stable short tag (see [`Error::tag`]) which is what
/// the command line front end reports in its JSON error documents.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A domain description violates its invariants.
    InvalidDomain(String),
    /// A puncture lies outside its base domain or the excision radius is too large.
    InvalidPuncture(String),
    /// A point argument is not inside the domain it is evaluated on.
    NotInDomain,
    /// A Green function evaluation needed for membership could not be resolved.
    GreenEvalFailed(String),
    /// No quadrature node survived the membership filter.
    EmptyDomain,
    /// Grid resolution below the supported minimum.
    InvalidResolution(usize),
    /// `z` coincides with the pole of the Green function.
    PoleCollision,
    /// The image series of the annulus Green function did not converge.
    SeriesDiverged,
    /// Successive Richardson capacity estimates disagree.
    ExtrapolationUnstable { spread: f64 },
    /// Every eigenvalue of the Gram matrix fell below the spectral cutoff.
    GramSingular,
    /// Condition number after the cutoff exceeds the admissible bound.
    IllConditioned { condition: f64 },
    /// Basis request incompatible with the domain (e.g. negative powers without a hole).
    InvalidBasis(String),
    /// The finite difference stencil leaves the domain.
    StencilOutside,
    /// Point is not inside the disc passed to a disc-only routine.
    NotInDisc,
    /// Sublevel requested with a non-negative level.
    InvalidLevel(f64),
    /// Too few trace samples for the requested report.
    InsufficientSamples { needed: usize, got: usize },
    /// Evaluation point outside the sublevel domain.
    TOutsideSublevel,
    /// Finite difference step incompatible with the level.
    InvalidStep,
    /// All basis evaluations at the constrained point vanish.
    ConstraintInfeasible,
    /// Riemann map requested on a sublevel that is not simply connected.
    NotSimplyConnected,
    /// A polyline integration path leaves the domain.
    PathExitsDomain,
    /// The requested route is not available for this domain.
    Unsupported(String),
    /// An argument is outside its admissible range.
    InvalidArgument(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidDomain(_) => "invalid-domain",
            Error::InvalidPuncture(_) => "invalid-puncture",
            Error::NotInDomain => "not-in-domain",
            Error::GreenEvalFailed(_) => "green-eval-failed",
            Error::EmptyDomain => "empty-domain",
            Error::InvalidResolution(_) => "invalid-resolution",
            Error::PoleCollision => "pole-collision",
            Error::SeriesDiverged => "series-diverged",
            Error::ExtrapolationUnstable { .. } => "extrapolation-unstable",
            Error::GramSingular => "gram-singular",
            Error::IllConditioned { .. } => "ill-conditioned",
            Error::InvalidBasis(_) => "invalid-basis",
            Error::StencilOutside => "stencil-outside",
            Error::NotInDisc => "not-in-disc",
            Error::InvalidLevel(_) => "invalid-level",
            Error::InsufficientSamples { .. } => "insufficient-samples",
            Error::TOutsideSublevel => "t-outside-sublevel",
            Error::InvalidStep => "invalid-step",
            Error::ConstraintInfeasible => "constraint-infeasible",
            Error::NotSimplyConnected => "not-simply-connected",
            Error::PathExitsDomain => "path-exits-domain",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }

    /// Whether the error stems from invalid input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDomain(_)
                | Error::InvalidPuncture(_)
                | Error::NotInDomain
                | Error::InvalidResolution(_)
                | Error::InvalidBasis(_)
                | Error::StencilOutside
                | Error::NotInDisc
                | Error::InvalidLevel(_)
                | Error::InsufficientSamples { .. }
                | Error::TOutsideSublevel
                | Error::InvalidStep
                | Error::NotSimplyConnected
                | Error::Unsupported(_)
                | Error::InvalidArgument(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDomain(m) => write!(f, "invalid domain: {m}"),
            Error::InvalidPuncture(m) => write!(f, "invalid puncture: {m}"),
            Error::NotInDomain => f.write_str("point is not inside the domain"),
            Error::GreenEvalFailed(m) => write!(f, "green function evaluation failed: {m}"),
            Error::EmptyDomain => f.write_str("no quadrature node lies inside the domain"),
            Error::InvalidResolution(n) => write!(f, "grid resolution {n} is below 16"),
            Error::PoleCollision => f.write_str("evaluation point collides with the pole"),
            Error::SeriesDiverged => f.write_str("image series did not converge within 200 pairs"),
            Error::ExtrapolationUnstable { spread } => {
                write!(f, "richardson estimates disagree by {spread:e}")
            }
            Error::GramSingular => f.write_str("gram matrix has no eigenvalue above the cutoff"),
            Error::IllConditioned { condition } => {
                write!(f, "gram condition {condition:e} exceeds 1e12")
            }
            Error::InvalidBasis(m) => write!(f, "invalid basis: {m}"),
            Error::StencilOutside => f.write_str("finite difference stencil leaves the domain"),
            Error::NotInDisc => f.write_str("point is not inside the disc"),
            Error::InvalidLevel(s) => write!(f, "sublevel requires a negative level, got {s}"),
            Error::InsufficientSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            Error::TOutsideSublevel => f.write_str("t lies outside the sublevel domain"),
            Error::InvalidStep => f.write_str("finite difference step crosses the level zero"),
            Error::ConstraintInfeasible => {
                f.write_str("every basis function vanishes at the constrained point")
            }
            Error::NotSimplyConnected => f.write_str("sublevel domain is not simply connected"),
            Error::PathExitsDomain => f.write_str("integration path leaves the domain"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
