use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-manifold input: edge ({0}, {1}) is shared by more than two cells")]
    NonManifold(usize, usize),
    #[error("inconsistent orientation across edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),
    #[error("degenerate or inverted cell {cell} (signed measure {measure:e})")]
    DegenerateCell { cell: usize, measure: f64 },
    #[error("mesh is not well-centered: {kind} {id} has dual measure {measure:e}")]
    NotWellCentered {
        kind: &'static str,
        id: usize,
        measure: f64,
    },
    #[error("invalid mesh input: {0}")]
    InvalidMesh(String),
    #[error("unknown boundary component '{0}'")]
    UnknownComponent(String),
    #[error("mesh inversion after motion at cell {0}; remeshing is not supported")]
    MeshInversion(usize),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("valence mismatch: {0}")]
    Valence(String),
    #[error("rank-deficient reconstruction patch at {kind} {id}")]
    RankDeficient { kind: &'static str, id: usize },
    #[error("carrier mismatch: {0}")]
    Carrier(String),
    #[error("empty junction")]
    EmptyJunction,
    #[error("stale modulation: transformer tagged t={tagged}, requested t={requested}")]
    StaleModulation { tagged: f64, requested: f64 },
    #[error("frame mismatch: expected {expected}, got {got}")]
    Frame {
        expected: &'static str,
        got: &'static str,
    },
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("non-finite state: {0}")]
    NonFinite(String),
    #[error("incompatible boundary flux: net outflow {0:e}")]
    IncompatibleFlux(f64),
    #[error("divergence residual {0:e} exceeds tolerance after projection")]
    Divergence(f64),
    #[error("linear solver did not converge: residual {residual:e} after {iterations} iterations")]
    Solver { residual: f64, iterations: usize },
    #[error("snapshot misalignment: {0}")]
    Snapshot(String),
    #[error("missing ledger channel '{0}'")]
    MissingChannel(String),
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("coupling sub-iterations diverged (increment {0:e}); increase the body density ratio or reduce dt")]
    CouplingDiverged(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
