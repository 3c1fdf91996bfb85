use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("duplicate name: {0}")]
    DuplicateName(String),
    #[error("empty name is not allowed")]
    EmptyName,
    #[error("generator index out of range")]
    BadGenerator,
    #[error("point index out of range")]
    BadPoint,
    #[error("precedence must list every generator exactly once")]
    BadPrecedence,
    #[error("duplicate rule {0}")]
    DuplicateRule(String),
    #[error("the empty word has no direct prefix")]
    EmptyWord,
    #[error("word is not normal: {0}")]
    NotNormal(String),
    #[error("inverse table must be an involution covering every generator")]
    BadInverses,
    #[error("matrix must be square and match the point count")]
    BadMatrix,
    #[error("metric entries must be nonnegative numbers or infinity")]
    BadMetricEntry,
    #[error("the action is not confluent")]
    NotConfluent,
    #[error("the space carries no metric")]
    MissingMetric,
    #[error("the space carries no topology")]
    MissingTopology,
    #[error("the space carries neither a metric nor a topology")]
    MissingStructure,
    #[error("no group structure declared: generator {0} has no inverse")]
    NoGroupStructure(String),
    #[error("identification is not isometric at ({0}, {1})")]
    NonIsometricIdent(String, String),
    #[error("identification must be injective")]
    BadIdent,
    #[error("composite of {f} after {g} is missing from the morphism list")]
    MissingComposite { f: String, g: String },
    #[error("identity morphisms must be removed: {0}")]
    IdentityMorphism(String),
    #[error("two morphisms carry identical data: {0} and {1}")]
    DuplicateMorphism(String, String),
    #[error("morphism {0} is not well formed: {1}")]
    BadMorphism(String, String),
    #[error("map {0} is not isometric on its domain")]
    NonIsometricMap(String),
    #[error("map {0} has an empty domain")]
    EmptyDomainMap(String),
    #[error("inconsistent action data: {0}")]
    InconsistentAction(String),
    #[error("monoid table is invalid: {0}")]
    BadMonoid(String),
    #[error("action must supply exactly one partial map per generator")]
    BadActionShape,
    #[error("result too large: {0}")]
    TooLarge(String),
    #[error("need at least two points")]
    TooFewPoints,
    #[error("invalid topology data: {0}")]
    BadTopology(String),
}
