use std::fmt;

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    SelftestFailed,
    MalformedInput,
    Singular,
    Inconclusive,
    VerdictFailed,
    EvalAtPole,
    Io,
    InvalidParameters,
    Internal,
    Usage,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::SelftestFailed => 1,
            Kind::MalformedInput => 2,
            Kind::Singular => 3,
            Kind::Inconclusive => 4,
            Kind::VerdictFailed => 5,
            Kind::EvalAtPole => 6,
            Kind::Io => 7,
            Kind::InvalidParameters => 8,
            Kind::Internal => 9,
            Kind::Usage => 64,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Kind::SelftestFailed => "selftest",
            Kind::MalformedInput => "malformed-input",
            Kind::Singular => "singular",
            Kind::Inconclusive => "inconclusive",
            Kind::VerdictFailed => "verdict",
            Kind::EvalAtPole => "eval-at-pole",
            Kind::Io => "io",
            Kind::InvalidParameters => "invalid-parameters",
            Kind::Internal => "internal",
            Kind::Usage => "usage",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(Kind::MalformedInput, message)
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(Kind::InvalidParameters, message)
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::new(Kind::Io, format!("{}: {err}", path.display()))
    }
}

/// One line: `error[<kind>]: <message>` with newlines flattened.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.kind.slug(), self.message.replace('\n', " "))
    }
}

impl From<itea::Error> for CliError {
    fn from(e: itea::Error) -> Self {
        use itea::Error as E;
        let kind = match &e {
            E::SingularSystem { .. } => Kind::Singular,
            E::StudyInconclusive { .. } => Kind::Inconclusive,
            E::EvalAtPole { .. } => Kind::EvalAtPole,
            E::NonContiguousNodes { .. } | E::MissingDerivative { .. } | E::DimensionMismatch { .. } => {
                Kind::MalformedInput
            }
            E::InvalidConfig(_)
            | E::Precondition(_)
            | E::PointInsideE(_)
            | E::PointIsNode(_)
            | E::UnsortedPoles
            | E::InsufficientData(_) => Kind::InvalidParameters,
            E::IndexOutOfRange { .. } | E::NonFinite(_) => Kind::Internal,
        };
        CliError::new(kind, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
