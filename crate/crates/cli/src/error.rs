use isoforge_core::cayley::CayleyError;
use isoforge_core::free_space::FreeSpaceError;
use isoforge_core::group::GroupError;
use isoforge_core::metric::MetricError;
use isoforge_core::realization::RealizationError;
use isoforge_core::rigidity::RigidityError;

use crate::formats::FormatError;

/// A failed run, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input, or a matrix that is not a metric.
    #[error("input error: {0}")]
    Input(String),
    /// Well-formed input that does not meet an operation's precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A size or order cap was hit.
    #[error("resource cap: {0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

/// Exit code when a verification step fails.
pub const VERIFICATION_FAILED: i32 = 1;

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Group(g) => g.into(),
            FormatError::Metric(m) => CliError::Input(m.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::MissingIdentity | GroupError::NotClosed => CliError::Precondition(format!("not a subgroup: {e}")),
            GroupError::OrderBound(_) => CliError::Resource(e.to_string()),
            GroupError::DegreeMismatch(..) => CliError::Precondition(e.to_string()),
            GroupError::NotAPermutation { .. } | GroupError::PointOutOfRange(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::NotSquare { .. } | MetricError::DuplicateLabel(_) | MetricError::AxiomViolation { .. } => {
                CliError::Input(e.to_string())
            }
            MetricError::TooLarge(_) => CliError::Resource(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<RealizationError> for CliError {
    fn from(e: RealizationError) -> Self {
        match e {
            RealizationError::SizeBound { .. } => CliError::Resource(e.to_string()),
            RealizationError::Metric(m) => m.into(),
            RealizationError::Group(g) => g.into(),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<FreeSpaceError> for CliError {
    fn from(e: FreeSpaceError) -> Self {
        match e {
            FreeSpaceError::NotBalanced(_) | FreeSpaceError::LengthMismatch { .. } => CliError::Input(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<CayleyError> for CliError {
    fn from(e: CayleyError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<RigidityError> for CliError {
    fn from(e: RigidityError) -> Self {
        CliError::Precondition(e.to_string())
    }
}
