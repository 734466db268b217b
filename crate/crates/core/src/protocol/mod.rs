//! Activity switching: who is active, toward which goal, and when rounds
//! end.

mod detector;
mod rounds;
mod state;

pub use detector::{delta_d, detector_query, detector_query_since, DetectorBuffer, DetectorParams};
pub use rounds::round_boundaries;
pub use state::{
    AgentProtocolState, FProb, ProtocolKind, Provided, ReachOutcome, SwitchReason,
};
