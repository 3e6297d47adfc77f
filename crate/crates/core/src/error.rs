use thiserror::Error;

/// Errors produced by the planning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-quad face at index {0}")]
    NonQuadFace(usize),

    #[error("quad {quad} references missing vertex {vertex}")]
    MissingVertex { quad: usize, vertex: usize },

    #[error("quad {0} has repeated vertices")]
    RepeatedVertex(usize),

    #[error("non-manifold edge ({0}, {1})")]
    NonManifoldEdge(usize, usize),

    #[error("non-manifold vertex {0}")]
    NonManifoldVertex(usize),

    #[error("inconsistent orientation across edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),

    #[error("not strip-decomposable (conflict at edge ({0}, {1}))")]
    NotStripDecomposable(usize, usize),

    #[error("edge labels invalid: {0}")]
    BadLabels(String),

    #[error("degenerate quad {0}")]
    DegenerateQuad(usize),

    #[error("degenerate rung (edge {0})")]
    DegenerateRung(usize),

    #[error("zero average normal at vertex {0}")]
    ZeroNormal(usize),

    #[error("cannot open handle without overlap (patch {0})")]
    HandleOverlap(usize),

    #[error("no admissible cut for patch {0}")]
    NoAdmissibleCut(usize),

    #[error("irreducible angle violation in patch {0}")]
    IrreducibleAngle(usize),

    #[error("gap consumed patch {0}")]
    GapConsumedPatch(usize),

    #[error("partitioning did not reach a fixpoint")]
    NoFixpoint,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate print directions")]
    DegenerateDirections,

    #[error("orientation/support inconsistency")]
    OrientationSupportInconsistency,

    #[error("unknown preview kind: {0}")]
    UnknownPreviewKind(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Process exit code for the CLI: 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_)
            | Error::Parse(_)
            | Error::NonQuadFace(_)
            | Error::MissingVertex { .. }
            | Error::RepeatedVertex(_)
            | Error::NonManifoldEdge(..)
            | Error::NonManifoldVertex(_)
            | Error::InconsistentOrientation(..)
            | Error::NotStripDecomposable(..)
            | Error::BadLabels(_)
            | Error::DegenerateQuad(_)
            | Error::InvalidConfig(_)
            | Error::InvalidParams(_)
            | Error::UnknownPreviewKind(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
