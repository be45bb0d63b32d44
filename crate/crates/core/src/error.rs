use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rotation axis must have unit norm, got norm {norm}")]
    InvalidAxis { norm: f64 },

    #[error("invalid rotation expression: {0}")]
    InvalidExpression(String),

    #[error("expression contains a sum node; the MSR interval form requires a pure product")]
    NotMsr,

    #[error("time averaging failed: {reason} (windows tried: {windows}, last change {last_change:e})")]
    AveragingFailure {
        reason: String,
        windows: usize,
        last_change: f64,
    },

    #[error("frames are not omega-invariant: {0}")]
    NotOmegaInvariant(String),

    #[error("no stable surface: {0}")]
    NoSurface(String),

    #[error("no zero of the dt^2 coefficient before r_max = {r_max} ({} profile samples attached)", profile.len())]
    RootNotFound {
        r_max: f64,
        /// (r, g_tt) samples of the scan.
        profile: Vec<(f64, f64)>,
    },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("boost speed |beta| = {beta} is not below light speed")]
    SuperluminalBoost { beta: f64 },

    #[error("profile vanishes at {} grid node(s), first at {:?}", nodes.len(), nodes.first())]
    DivisionSingularity { nodes: Vec<[f64; 3]> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root bracketing exhausted after {} scan points", trace.len())]
    BracketExhausted {
        /// (x, f(x)) pairs visited by the scan.
        trace: Vec<(f64, f64)>,
    },

    #[error("parse error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Parse {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
