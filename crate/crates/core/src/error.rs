use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A state left the admissible set; `node` is set when the state belongs to a nodal field.
    #[error("inadmissible state{}: {reason}", node_suffix(*.node))]
    Inadmissible { node: Option<usize>, reason: String },

    #[error("singular opacity at T = {temperature} (negative temperature exponent)")]
    SingularOpacity { temperature: f64 },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("stiffness assembly failed: {0}")]
    Assembly(String),

    #[error("time step undefined: all graph viscosities vanish")]
    ZeroTimeStep,

    #[error("newton solve for T* failed at node {node} after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged {
        node: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("picard loop did not converge in {iterations} iterations (last residual {residual:e})")]
    PicardDiverged { iterations: usize, residual: f64 },

    #[error("singular radiation system at row {row}")]
    SingularSystem { row: usize },

    #[error("zero reference norm for field `{0}`")]
    ZeroReferenceNorm(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("step {step} (t = {time:e}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn node_suffix(node: Option<usize>) -> String {
    match node {
        Some(i) => format!(" at node {i}"),
        None => String::new(),
    }
}

impl Error {
    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Inadmissible { .. } => "inadmissible",
            Error::SingularOpacity { .. } => "singular_opacity",
            Error::Mesh(_) => "mesh",
            Error::Assembly(_) => "assembly",
            Error::ZeroTimeStep => "zero_time_step",
            Error::NewtonDiverged { .. } => "newton_diverged",
            Error::PicardDiverged { .. } => "picard_diverged",
            Error::SingularSystem { .. } => "singular_system",
            Error::ZeroReferenceNorm(_) => "zero_reference_norm",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Step { source, .. } => source.kind(),
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn at_node(self, index: usize) -> Self {
        match self {
            Error::Inadmissible { reason, .. } => Error::Inadmissible {
                node: Some(index),
                reason,
            },
            other => other,
        }
    }
}
