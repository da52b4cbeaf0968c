use std::io;
use std::path::PathBuf;

use fpl_core::arith::ArithError;
use fpl_core::charkloost::CharError;
use fpl_core::decomp::DecompError;
use fpl_core::expsums::ExpSumError;
use fpl_core::oscillatory::OscError;
use fpl_core::smoothing::SmoothingError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FplError {
    /// Bad configuration; `field` names the offending key.
    #[error("config error: {field}: {message}")]
    Config { field: String, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("bad cache file {path}: {message}")]
    Cache { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, FplError>;

impl FplError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        FplError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        FplError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            FplError::Config { .. } => 2,
            FplError::Invariant(_) => 3,
            FplError::Resource(_) => 4,
            FplError::Io { .. } | FplError::Cache { .. } => 1,
        }
    }
}

// Core errors carry no field name; callers attach one through `Context`.
// Budget overruns map to resource errors and a failed Weil check to an
// invariant violation; everything else is a rejected parameter.
enum Kind {
    Param,
    Budget,
    Violation,
}

fn wrap(field: &str, kind: Kind, message: String) -> FplError {
    match kind {
        Kind::Param => FplError::config(field, message),
        Kind::Budget => FplError::Resource(message),
        Kind::Violation => FplError::Invariant(message),
    }
}

pub trait Context<T> {
    fn field(self, name: &str) -> Result<T>;
}

macro_rules! context_for {
    ($err:ty, |$e:ident| $kind:expr) => {
        impl<T> Context<T> for std::result::Result<T, $err> {
            fn field(self, name: &str) -> Result<T> {
                self.map_err(|$e| wrap(name, $kind, $e.to_string()))
            }
        }
    };
}

fn arith_kind(e: &ArithError) -> Kind {
    match e {
        ArithError::RangeTooLarge { .. } => Kind::Budget,
        _ => Kind::Param,
    }
}

context_for!(ArithError, |e| arith_kind(&e));
context_for!(ExpSumError, |e| match &e {
    ExpSumError::BudgetExceeded { .. } => Kind::Budget,
    ExpSumError::Arith(a) => arith_kind(a),
    _ => Kind::Param,
});
context_for!(DecompError, |e| match &e {
    DecompError::BudgetExceeded(_) => Kind::Budget,
    _ => Kind::Param,
});
context_for!(CharError, |e| match &e {
    CharError::TooLarge { .. } => Kind::Budget,
    CharError::WeilViolation { .. } => Kind::Violation,
    _ => Kind::Param,
});
context_for!(SmoothingError, |_e| Kind::Param);
context_for!(OscError, |e| match &e {
    OscError::TooManyPanels(_) | OscError::NoConvergence { .. } => Kind::Budget,
    OscError::Truncation { .. } => Kind::Budget,
    _ => Kind::Param,
});
