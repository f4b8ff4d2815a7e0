use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HexError {
    #[error("torus side must be at least {min}, got {got}")]
    TorusTooSmall { got: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("edge {0} is not a northwest (B-type) edge")]
    NotNorthwest(usize),

    #[error("edges e and f must be distinct")]
    SameEdge,

    #[error("edge pair ({e}, {f}) is not on a common northwest diagonal")]
    UnsupportedPair { e: usize, f: usize },

    #[error("edge id {id} out of range for a lattice with {count} edges")]
    EdgeOutOfRange { id: usize, count: usize },

    #[error("half-edge set does not have boundary {{Me, Mf}}: {0}")]
    BadPathBoundary(String),

    #[error("enumeration for n = {n} exceeds the oracle bound n <= {max}")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("matrix dimension {0} is odd; Pfaffian undefined")]
    OddDimension(usize),

    #[error("matrix is not antisymmetric: |m[{i}][{j}] + m[{j}][{i}]| = {defect:e}")]
    NotAntisymmetric { i: usize, j: usize, defect: f64 },

    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is numerically singular (pivot {pivot:e} at step {step})")]
    Singular { step: usize, pivot: f64 },

    #[error("orientation is not clockwise odd on {0} face(s)")]
    OrientationAudit(usize),

    #[error("empty correlation path")]
    EmptyPath,

    #[error("path edge {0} not present in the augmented graph")]
    PathEdgeMissing(usize),

    #[error("parameter point is critical or numerically too close to criticality: {0}")]
    CriticalProximity(String),

    #[error("Ising couplings need all parameters in (0,1); got {name} = {value}")]
    OutsideHighTemperature { name: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, HexError>;
