use thiserror::Error;

/// Errors raised while building or evaluating categories, spaces and diagrams.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // indexing categories
    #[error("duplicate object label `{0}`")]
    DuplicateObject(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("ancestry matrix is {got}x{got}, expected {expected}x{expected}")]
    MatrixShape { expected: usize, got: usize },
    #[error("ancestry relation is not transitive: {0} -> {1} -> {2} but not {0} -> {2}")]
    NotTransitive(String, String, String),
    #[error("distinct objects `{0}` and `{1}` have morphisms both ways")]
    TwoWayMorphismBetweenDistinct(String, String),
    #[error("objects `{0}` and `{1}` have no minimal common ancestor")]
    NoMinimalCommonAncestor(String, String),
    #[error("no object is an ancestor of every object")]
    MissingInitial,
    #[error("`{apex}` is not a common ancestor of `{left}` and `{right}`")]
    NotAFan { apex: String, left: String, right: String },

    // spaces and distributions
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("duplicate atom `{atom}` in space `{object}`")]
    DuplicateAtom { object: String, atom: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("atom `{atom}` not found in space `{object}`")]
    AtomNotFound { object: String, atom: String },
    #[error("atom `{0}` is not in the target of the reduction")]
    AtomNotInTarget(String),
    #[error("distributions live on sets of different size ({0} vs {1})")]
    MismatchedSupportSets(usize, usize),
    #[error("tuples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    // maps and diagrams
    #[error("map into `{object}` has {got} entries, expected {expected}")]
    MapLength { object: String, expected: usize, got: usize },
    #[error("map into `{object}` points outside its set (index {index})")]
    MapOutOfRange { object: String, index: usize },
    #[error("map into `{0}` is not surjective")]
    NotSurjective(String),
    #[error("map onto `{0}` is not measure preserving")]
    NotMeasurePreserving(String),
    #[error("induced map `{0}` -> `{1}` is not well defined")]
    NotWellDefined(String, String),
    #[error("no map given for object `{0}`")]
    MissingMap(String),
    #[error("map at the initial object `{0}` must be the identity")]
    InitialMapNotIdentity(String),
    #[error("reduction does not commute with the diagram maps at `{0}`")]
    NotNatural(String),
    #[error("diagrams have different shapes")]
    ShapeMismatch,
    #[error("coupling marginal mismatch: {0}")]
    BadCoupling(String),

    // budgets
    #[error("outcome budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("exact coupling search needs {needed} product atoms, budget {budget}")]
    ExactBudgetExceeded { needed: usize, budget: usize },

    // tropical / homogeneity
    #[error("tail integral diverges")]
    TailDiverges,
    #[error("entropy estimates did not converge (gap {0:e})")]
    NonConvergent(f64),
    #[error("diagram is not homogeneous")]
    NotHomogeneous,

    // serialization
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for the two budget errors; the CLI maps these to a distinct exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::ExactBudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
