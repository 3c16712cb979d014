use thiserror::Error;

use crate::topology::LightpathId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("topology needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("self-loop edge at node {0}")]
    SelfLoop(usize),
    #[error("node {node} out of range for a {node_count}-node topology")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("wavelengths per fiber must be at least 1")]
    NoWavelengths,

    #[error("request {0} has identical source and destination")]
    DegenerateRequest(LightpathId),
    #[error("request id {0} appears more than once")]
    DuplicateRequestId(LightpathId),

    #[error("route must contain at least two nodes")]
    RouteTooShort,
    #[error("route nodes {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("route visits node {0} twice")]
    RepeatedNode(usize),

    #[error("link {from}->{to} wavelength {wavelength} already held by lightpath {holder}")]
    Conflict {
        from: usize,
        to: usize,
        wavelength: usize,
        holder: LightpathId,
    },
    #[error("segmentation violation at node {0}: segments may only split at interior converter nodes")]
    SegmentationViolation(usize),
    #[error("segments do not match the route's links")]
    SegmentMismatch,
    #[error("wavelength {wavelength} out of range (W = {available})")]
    WavelengthOutOfRange { wavelength: usize, available: usize },
    #[error("lightpath {0} is not present")]
    UnknownLightpath(LightpathId),
    #[error("route has a segment without a free wavelength")]
    RouteInfeasible,

    #[error("search space {size:.3e} exceeds the limit {limit:.3e}")]
    SearchSpaceExceeded { size: f64, limit: f64 },
    #[error("cannot place {count} converters in a {node_count}-node topology")]
    TooManyConverters { count: usize, node_count: usize },
    #[error("average degree {degree} is infeasible for {nodes} nodes")]
    InfeasibleDegree { nodes: usize, degree: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
