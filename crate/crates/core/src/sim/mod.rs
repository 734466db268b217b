//! Closed-loop simulation: scenarios, the stepping engine, traces and their
//! offline verification.

mod engine;
mod report;
mod scenario;
mod trace;

pub use engine::{run, run_batch, RunOutcome, RunStatus, SimConfig, World};
pub use report::{
    satisfaction_report, verify, AgentVerdict, SatisfactionReport, Verdict, VerifyReport,
    FINITE_TRACE_NOTE,
};
pub use scenario::{
    compile, validate_scenario, AgentSpec, Compiled, DetectorSpec, Issue, RunSpec, Scenario,
    ScenarioParams, ValidationReport,
};
pub use trace::{pair_index, Event, EventKind, EventTrace, Sample};
