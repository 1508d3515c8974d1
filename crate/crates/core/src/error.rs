use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("domains {0} and {1} share objects")]
    OverlappingDomains(String, String),
    #[error("DPG not applicable: {0}")]
    DpgNotApplicable(String),
    #[error("range mismatch on {0}")]
    RangeMismatch(String),
    #[error("variable {0} is not in the factor")]
    MissingVar(String),
    #[error("model has {count} ground randvars, above the cap of {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("tree is not liftable: {0}")]
    NotLiftable(String),
    #[error("plan error: {0}")]
    Plan(String),
}

impl Error {
    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Semantic(_) | Error::OverlappingDomains(..) => 2,
            Error::NotLiftable(_) => 3,
            Error::CapExceeded { .. } => 4,
            _ => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::Semantic(_) => "semantic",
            Error::OverlappingDomains(..) => "overlapping_domains",
            Error::DpgNotApplicable(_) => "dpg_not_applicable",
            Error::RangeMismatch(_) => "range_mismatch",
            Error::MissingVar(_) => "missing_var",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::NotLiftable(_) => "not_liftable",
            Error::Plan(_) => "plan",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
