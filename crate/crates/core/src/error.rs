use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph document: {0}")]
    Schema(#[from] serde_json::Error),

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },

    #[error("loop edge `{edge}` needs at least one interior joint")]
    LoopWithoutJoint { edge: String },

    #[error("edge `{edge}`: consecutive points {index} and {} coincide", index + 1)]
    CoincidentPoints { edge: String, index: usize },

    #[error("non-finite coordinate in {0}")]
    NonFinite(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("edge `{edge}` has {joints} joints; index {index} is out of range")]
    JointIndexOutOfRange { edge: String, index: usize, joints: usize },

    #[error("invalid direction {0}")]
    InvalidDirection(String),

    #[error("need at least {needed} tangents, got {got}")]
    DegreeTooSmall { needed: usize, got: usize },

    #[error("direction is not generic: {0}")]
    NonGeneric(String),

    #[error("level {0} passes through a critical height")]
    CriticalLevel(f64),

    #[error("fiber identity violated at level {level}: {geometric} crossings vs {predicted} from nlm")]
    FiberIdentity { level: f64, geometric: i64, predicted: i64 },

    #[error("circuit is not closed at step {0}")]
    OpenCircuit(usize),

    #[error("vertex `{0}` has degree 1; a non-reversing circuit is impossible")]
    DegreeOneVertex(String),

    #[error("vertex `{0}` has degree 0")]
    IsolatedVertex(String),

    #[error("invalid height assignment: {0}")]
    InvalidAssignment(String),

    #[error("{vertices} vertices exceed the search budget of {budget}")]
    BudgetExceeded { vertices: usize, budget: usize },

    #[error("invalid parameter: {0}")]
    BadParameter(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("{rejected} of {samples} directions rejected as non-generic")]
    ExcessiveRejections { rejected: usize, samples: usize },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
}
