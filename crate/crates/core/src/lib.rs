//! Engine for policy-aware intentional agents: a ground action-language
//! transition system, authorization/obligation policy evaluation with
//! defeasible statements and preferences, compliance-tracking dynamics under
//! configurable behavior modes, an optimizing planner, and the
//! observe-interpret-act control loop that ties them together.

pub mod action;
pub mod agent;
pub mod compliance;
pub mod domain;
pub mod dsl;
pub mod ids;
pub mod intentions;
pub mod modes;
pub mod planner;
pub mod policy;
pub mod state;
pub mod transition;

pub use action::{ActionSet, AgentAction, ExoAction, Waiver, WaiverFamily};
pub use agent::{
    run_iteration, run_to_quiescence, select_intended, BeliefModel, Engine, History, LoopError,
    LoopState, RunOutcome, TraceRecord,
};
pub use compliance::{compile_policy_dynamics, compile_without_policy_layer, waive_semantics};
pub use domain::{Activity, Domain, FluentLit};
pub use dsl::{parse_domain, parse_policy, parse_scenario, Diagnostic, Scenario};
pub use ids::{ActionId, ActivityId, FluentId};
pub use intentions::{apply_mental_dynamics, next_physical_action, MentalState};
pub use modes::{AuthMode, AuthThreshold, ModeConfig, OblMode};
pub use planner::{plan, prefer_stored, CostVec, Plan, PlanOutcome};
pub use policy::{
    check_policy_consistency, classify_action_set, classify_trajectory, derive_verdicts,
    ComplianceClass, GroundPolicy, PolicyInconsistency, PolicyVerdictSet, Tri,
};
pub use state::{close_defined, State};
pub use transition::{executable, successor, EvalCtx};
