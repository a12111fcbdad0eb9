use crate::array::CellId;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("power parameter p = {0} must lie in (-inf, 0] or [1, inf)")]
    InvalidPower(f64),

    #[error("alpha = (2 - p)/(1 - p) is undefined at p = 1")]
    UndefinedAlpha,

    #[error("canonical parameter theta = {theta} is out of domain for p = {p}")]
    ThetaOutOfDomain { p: f64, theta: f64 },

    #[error("index parameter lambda = {0} must be positive and finite")]
    InvalidLambda(f64),

    #[error("mean mu = {0} must be positive and finite")]
    InvalidMean(f64),

    #[error("squared CoV nu = {0} must be positive and finite")]
    InvalidCov(f64),

    #[error("p = 1 forces nu = 1/mu; got mu = {mu}, nu = {nu}")]
    PoissonCovMismatch { mu: f64, nu: f64 },

    #[error("scaling is not closed at p = 1; a scaled Poisson variate leaves the family")]
    ScaleUndefinedAtPoisson,

    #[error("scale factor k = {0} must be positive and finite")]
    InvalidScaleFactor(f64),

    #[error(
        "incompatible summands: (p = {p_a}, theta = {theta_a}) vs (p = {p_b}, theta = {theta_b})"
    )]
    IncompatibleSummands {
        p_a: f64,
        theta_a: f64,
        p_b: f64,
        theta_b: f64,
    },

    #[error(
        "sampling is unsupported for p = {0}; only p in {{0, 1}} U (1, 2) U {{2}} can be drawn"
    )]
    UnsupportedSamplingPower(f64),

    #[error("cell ({i}, {j}) is outside the {rows} x {cols} grid", i = .cell.i(), j = .cell.j())]
    CellOutOfBounds { cell: CellId, rows: u32, cols: u32 },

    #[error("partition kind {0} requires explicit subsets")]
    PartitionKindNeedsSubsets(String),

    #[error("invalid partition: cells {} appear in more than one subset", fmt_cells(.0))]
    PartitionOverlap(Vec<CellId>),

    #[error("invalid partition: present cells {} are not covered by any subset", fmt_cells(.0))]
    PartitionGap(Vec<CellId>),

    #[error("invalid partition: cells {} are not present in the layout", fmt_cells(.0))]
    PartitionForeignCells(Vec<CellId>),

    #[error("invalid partition: subset {0} is empty")]
    PartitionEmptySubset(usize),

    #[error("array index {array} out of range; the model has {count} arrays")]
    ArrayOutOfRange { array: usize, count: usize },

    #[error("partition index {layer} out of range; the model has {count} partitions")]
    LayerOutOfRange { layer: usize, count: usize },

    #[error("cell ({i}, {j}) is not present in array {array}", i = .cell.i(), j = .cell.j())]
    CellNotPresent { array: usize, cell: CellId },

    #[error("no {kind} shock is attached to partition {layer}")]
    ComponentAbsent { kind: &'static str, layer: usize },

    #[error("partition {layer} carries neither an umbrella nor an array-specific shock")]
    EmptyLayer { layer: usize },

    #[error("model structure mismatch: {0}")]
    ModelShape(String),

    #[error("report is not balanced; {0} is only defined for balanced models")]
    NotBalanced(&'static str),

    #[error("simulation retained no per-replication records; rerun with retain enabled")]
    NotRetained,

    #[error("replication index {index} out of range; {count} replications were run")]
    ReplicationOutOfRange { index: usize, count: usize },

    #[error("at least {needed} replications are required, got {got}")]
    TooFewReplications { needed: u64, got: u64 },

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("unknown dataset {0}; expected 1, 2 or 3")]
    UnknownDataset(u8),
}

pub type Result<T> = std::result::Result<T, Error>;

fn fmt_cells(cells: &[CellId]) -> String {
    let mut out = String::new();
    for (k, c) in cells.iter().take(8).enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!("({}, {})", c.i(), c.j()));
    }
    if cells.len() > 8 {
        out.push_str(&format!(", ... ({} total)", cells.len()));
    }
    out
}
