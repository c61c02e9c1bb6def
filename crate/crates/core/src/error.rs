use thiserror::Error;

/// Failures of the pseudo-metric axioms and of space constructions.
///
/// Witnesses are point ids.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("distance matrix is not square: {rows} rows for {points} points")]
    NotSquare { rows: usize, points: usize },
    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),
    #[error("unknown point id {0:?}")]
    UnknownPoint(String),
    #[error("d({0}, {0}) = {1} is not zero")]
    NonzeroDiagonal(String, f64),
    #[error("d({x}, {y}) = {dxy} but d({y}, {x}) = {dyx}")]
    Asymmetric { x: String, y: String, dxy: f64, dyx: f64 },
    #[error("triangle inequality fails at ({x}, {y}, {z}): d(x,y) = {dxy} > d(x,z) + d(z,y) = {via}")]
    Triangle { x: String, y: String, z: String, dxy: f64, via: f64 },
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("one basepoint is required per space ({spaces} spaces, {basepoints} basepoints)")]
    BasepointCount { spaces: usize, basepoints: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PuError {
    #[error("point {0:?} is not covered")]
    NotCovered(String),
    #[error("cover element {label:?} contains point {point:?} outside the domain")]
    OutsideDomain { label: String, point: String },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("weights at {point:?} sum to {sum}, expected 1")]
    BadSum { point: String, sum: f64 },
    #[error("weight {weight} at {point:?} is negative or not finite")]
    BadWeight { point: String, weight: f64 },
    #[error("point {0:?} appears twice")]
    DuplicatePoint(String),
    #[error("point index {0} is out of range")]
    PointOutOfRange(usize),
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("index sets collide on label {0:?}")]
    LabelCollision(String),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("partitions live on spaces of different sizes ({0} vs {1})")]
    SpaceMismatch(usize, usize),
    #[error("invalid tree of partitions of unity: {0}")]
    InvalidTree(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompError {
    #[error("invalid decomposition tree: {0}")]
    InvalidTree(String),
    #[error(
        "level {level}: children of node {node} at depth {depth} are only {found}-separated; \
         {required} (S_{level} = {s_k} plus R_{level} = {r_k}) is required"
    )]
    InsufficientSeparation { level: usize, depth: usize, node: String, found: f64, required: f64, s_k: f64, r_k: f64 },
    #[error("schedule has {given} levels but the tree needs {needed}")]
    ScheduleTooShort { given: usize, needed: usize },
    #[error("enlargement merges members {a} and {b} of layer {layer}")]
    LayerCollision { layer: usize, a: usize, b: usize },
    #[error("enlargement makes children {a} and {b} of node {node} overlap")]
    EnlargementCollision { node: String, a: usize, b: usize },
    #[error("annuli {a} and {b} of the same parity are not {r}-disjoint")]
    AnnuliOverlap { a: usize, b: usize, r: f64 },
    #[error("points at infinite distance from the annulus center, e.g. {0:?}")]
    UnreachablePoints(String),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Pu(#[from] PuError),
}

/// Errors raised while reading the JSON formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Shape(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Pu(#[from] PuError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

impl FormatError {
    /// True when the input could not be read at all, as opposed to a
    /// well-formed input that fails a mathematical check.
    pub fn is_malformed(&self) -> bool {
        match self {
            FormatError::Syntax(_) | FormatError::Shape(_) => true,
            FormatError::Metric(e) => matches!(
                e,
                MetricError::NotSquare { .. }
                    | MetricError::DuplicatePoint(_)
                    | MetricError::UnknownPoint(_)
                    | MetricError::BadParams(_)
            ),
            FormatError::Pu(e) => {
                matches!(e, PuError::UnknownLabel(_) | PuError::DuplicatePoint(_) | PuError::PointOutOfRange(_))
            }
            FormatError::Decomp(_) => false,
        }
    }
}
