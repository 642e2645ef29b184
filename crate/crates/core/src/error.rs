use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("curvature vector leaves the cone Gamma_{k}{}", node_suffix(*.node))]
    ConeViolation { k: usize, node: Option<usize> },

    #[error("grid too coarse: {nodes} nodes, need at least {min}")]
    GridTooCoarse { nodes: usize, min: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate metric at node {node}")]
    DegenerateMetric { node: usize },

    #[error("value {value} outside attainable range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("radius-to-quermassintegral map not strictly increasing for n={n}, k={k}")]
    NonMonotone { n: usize, k: isize },

    #[error("loss of convexity at node {node}")]
    ConvexityLoss { node: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn node_suffix(node: Option<usize>) -> String {
    match node {
        Some(j) => format!(" at node {j}"),
        None => String::new(),
    }
}
