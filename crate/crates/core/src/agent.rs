//! The observe-interpret-act control loop: diagnosis of unexpected
//! observations by abducing undetected exogenous actions, intended-action
//! selection, attempt recording, and history maintenance.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::action::{ActionSet, AgentAction, ExoAction, Waiver};
use crate::domain::{Activity, Domain, FluentLit};
use crate::dsl::{ObsRecord, Scenario, StaticObs};
use crate::ids::{ActionId, ActivityId};
use crate::intentions::{apply_mental_dynamics, MentalError, MentalState};
use crate::planner::{plan, prefer_stored, replay_cost, CostVec, PlanError, PlanOutcome};
use crate::policy::{derive_verdicts, GroundPolicy, PolicyInconsistency};
use crate::state::State;
use crate::transition::{executable, successor, EvalCtx, TransitionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttemptOutcome {
    Ok,
    Blocked,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttemptRecord {
    pub step: usize,
    pub action: AgentAction,
    pub waivers: BTreeSet<Waiver>,
    pub outcome: AttemptOutcome,
}

/// Everything the agent has recorded: attempts with their outcomes, observed
/// exogenous events, and fluent observations. Records are append-only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct History {
    pub attempts: Vec<AttemptRecord>,
    pub observed_events: Vec<(usize, ExoAction)>,
    pub observations: Vec<ObsRecord>,
    pub static_observations: Vec<StaticObs>,
}

impl History {
    fn attempt_at(&self, step: usize) -> Option<&AttemptRecord> {
        self.attempts.iter().find(|a| a.step == step)
    }

    fn events_at(&self, step: usize) -> impl Iterator<Item = &ExoAction> + '_ {
        self.observed_events
            .iter()
            .filter(move |(s, _)| *s == step)
            .map(|(_, e)| e)
    }

    fn observations_at(&self, step: usize) -> impl Iterator<Item = FluentLit> + '_ {
        self.observations
            .iter()
            .filter(move |o| o.step == step)
            .map(|o| o.lit)
    }
}

/// The reconstructed past: belief states and mental states for steps
/// `0..=now`, plus the abduced undetected exogenous actions that make the
/// history consistent.
#[derive(Clone, Debug)]
pub struct BeliefModel {
    pub states: Vec<State>,
    pub mentals: Vec<MentalState>,
    pub abduced: Vec<(usize, ActionId)>,
}

impl BeliefModel {
    pub fn current_state(&self) -> &State {
        self.states.last().expect("nonempty")
    }

    pub fn current_mental(&self) -> &MentalState {
        self.mentals.last().expect("nonempty")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoopError {
    #[error(transparent)]
    Policy(#[from] PolicyInconsistency),
    #[error(transparent)]
    Transition(#[from] TransitionError),
    #[error(transparent)]
    Mental(#[from] MentalError),
    #[error("diagnosis failure: {0}")]
    Diagnosis(String),
    #[error("scripted event cannot execute at step {step}: {reasons:?}")]
    ScriptedEventBlocked { step: usize, reasons: Vec<String> },
}

impl From<PlanError> for LoopError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Policy(p) => LoopError::Policy(p),
            PlanError::Transition(t) => LoopError::Transition(t),
        }
    }
}

enum ReplayFailure {
    /// Belief contradicts the record at this step; abduction may explain it.
    Mismatch(usize),
    Fatal(LoopError),
}

/// The agent's engine configuration: compiled domain, ground policy, and
/// planning horizon.
pub struct Engine<'a> {
    pub domain: &'a Domain,
    pub policy: &'a GroundPolicy,
    pub horizon: usize,
    /// Abduction budget per unexplained observation window.
    pub abduction_per_window: usize,
}

impl<'a> Engine<'a> {
    pub fn new(domain: &'a Domain, policy: &'a GroundPolicy, horizon: usize) -> Self {
        Engine {
            domain,
            policy,
            horizon,
            abduction_per_window: 2,
        }
    }

    fn replay(
        &self,
        history: &History,
        abduced: &[(usize, ActionId)],
        now: usize,
        activities: &[Activity],
    ) -> Result<(Vec<State>, Vec<MentalState>), ReplayFailure> {
        for so in &history.static_observations {
            if self.domain.static_true(so.atom) != so.value {
                // statics hold in every state; no abduction can explain this
                return Err(ReplayFailure::Fatal(LoopError::Diagnosis(format!(
                    "observation contradicts static `{}`",
                    self.domain.render_static(so.atom)
                ))));
            }
        }

        let initial: Vec<FluentLit> = history.observations_at(0).collect();
        for lit in &initial {
            if initial
                .iter()
                .any(|o| o.fluent == lit.fluent && o.value != lit.value)
            {
                return Err(ReplayFailure::Fatal(LoopError::Diagnosis(format!(
                    "contradictory initial observations of `{}`",
                    self.domain.render_fluent(lit.fluent)
                ))));
            }
        }
        let mut states = vec![State::initial(self.domain, &initial)];
        let mut mentals = vec![MentalState::default()];

        for step in 0..now {
            let mut set = ActionSet::empty();
            let attempt = history.attempt_at(step);
            if let Some(a) = attempt {
                if a.outcome == AttemptOutcome::Ok {
                    set.agent = Some(a.action);
                    set.waivers = a.waivers.clone();
                }
            }
            for e in history.events_at(step) {
                set.exogenous.insert(*e);
            }
            for &(s, a) in abduced {
                if s == step {
                    set.exogenous.insert(ExoAction::Physical(a));
                }
            }

            let state = states.last().unwrap();
            let verdicts = derive_verdicts(state, &set, self.policy, self.domain)
                .map_err(|e| ReplayFailure::Fatal(LoopError::Policy(e)))?;
            let ctx = EvalCtx::with_verdicts(&verdicts);

            let blocked = executable(state, &set, self.domain, &ctx);
            if !blocked.is_empty() {
                // the belief disagrees with what the record says happened
                return Err(ReplayFailure::Mismatch(step));
            }
            if let Some(a) = attempt {
                if a.outcome == AttemptOutcome::Blocked {
                    // the record says this was blocked; the belief must agree
                    let mut probe = set.clone();
                    probe.agent = Some(a.action);
                    probe.waivers = a.waivers.clone();
                    let pverdicts = derive_verdicts(state, &probe, self.policy, self.domain)
                        .map_err(|e| ReplayFailure::Fatal(LoopError::Policy(e)))?;
                    let pctx = EvalCtx::with_verdicts(&pverdicts);
                    if executable(state, &probe, self.domain, &pctx).is_empty() {
                        return Err(ReplayFailure::Mismatch(step));
                    }
                }
            }

            let next = successor(state, &set, self.domain, &ctx)
                .map_err(|e| ReplayFailure::Fatal(LoopError::Transition(e)))?;
            let mental = apply_mental_dynamics(
                mentals.last().unwrap(),
                &set,
                &next,
                self.domain,
                activities,
            )
            .map_err(|e| ReplayFailure::Fatal(LoopError::Mental(e)))?;

            for lit in history.observations_at(step + 1) {
                if !next.holds(lit) {
                    return Err(ReplayFailure::Mismatch(step + 1));
                }
            }
            states.push(next);
            mentals.push(mental);
        }
        Ok((states, mentals))
    }

    /// Explains the history with a cardinality-minimal set of undetected
    /// exogenous actions. Deterministic: candidates are tried in action-name
    /// order, most recent step first.
    pub fn interpret(
        &self,
        history: &History,
        now: usize,
        activities: &[Activity],
    ) -> Result<BeliefModel, LoopError> {
        let first_mismatch = match self.replay(history, &[], now, activities) {
            Ok((states, mentals)) => {
                return Ok(BeliefModel { states, mentals, abduced: Vec::new() })
            }
            Err(ReplayFailure::Fatal(e)) => return Err(e),
            Err(ReplayFailure::Mismatch(s)) => s,
        };

        let mut exo: Vec<ActionId> = self.domain.exogenous_physical_actions().collect();
        exo.sort_by_key(|&a| self.domain.render_action(a));
        let mut candidates: Vec<(usize, ActionId)> = Vec::new();
        for a in exo {
            for step in (0..now).rev() {
                candidates.push((step, a));
            }
        }

        // every recorded-observation step from the first mismatch on may
        // open its own unexplained window
        let windows = history
            .observations
            .iter()
            .map(|o| o.step)
            .filter(|&s| s >= first_mismatch && s > 0)
            .collect::<BTreeSet<_>>()
            .len()
            .max(1);
        let budget = (self.abduction_per_window * windows).min(candidates.len());

        for k in 1..=budget {
            let mut chosen = vec![0usize; k];
            if let Some(model) = self.try_combinations(&mut chosen, 0, 0, &candidates, history, now, activities)? {
                return Ok(model);
            }
        }
        Err(LoopError::Diagnosis(format!(
            "no consistent explanation of the history within {budget} abduced exogenous actions"
        )))
    }

    #[allow(clippy::too_many_arguments)]
    fn try_combinations(
        &self,
        chosen: &mut Vec<usize>,
        depth: usize,
        start: usize,
        candidates: &[(usize, ActionId)],
        history: &History,
        now: usize,
        activities: &[Activity],
    ) -> Result<Option<BeliefModel>, LoopError> {
        if depth == chosen.len() {
            let abduced: Vec<(usize, ActionId)> =
                chosen.iter().map(|&i| candidates[i]).collect();
            return match self.replay(history, &abduced, now, activities) {
                Ok((states, mentals)) => Ok(Some(BeliefModel { states, mentals, abduced })),
                Err(ReplayFailure::Fatal(e)) => Err(e),
                Err(ReplayFailure::Mismatch(_)) => Ok(None),
            };
        }
        for i in start..candidates.len() {
            chosen[depth] = i;
            if let Some(m) = self.try_combinations(
                chosen,
                depth + 1,
                i + 1,
                candidates,
                history,
                now,
                activities,
            )? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Intended-action selection
// ---------------------------------------------------------------------------

/// Why the loop picked what it picked; rendered into the trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectNote {
    ContinueActivity { activity: ActivityId, component: u32 },
    StopCompleted { activity: ActivityId },
    StopGoalGone { activity: ActivityId },
    StopNotViable { activity: ActivityId },
    StartStored { activity: ActivityId, cost: CostVec },
    StartPlanned { activity: ActivityId, cost: CostVec },
    Futile,
    Idle,
}

#[derive(Clone, Debug)]
pub struct Selection {
    pub action: AgentAction,
    pub waivers: BTreeSet<Waiver>,
    pub new_activity: Option<Activity>,
    pub note: SelectNote,
}

/// Picks the intended action: continue a viable active activity, stop a
/// finished or no-longer-viable one, start the best stored or freshly
/// planned activity for the active goal, and otherwise wait.
pub fn select_intended(
    engine: &Engine,
    belief: &BeliefModel,
    activities: &[Activity],
    next_activity_id: ActivityId,
) -> Result<Selection, LoopError> {
    let state = belief.current_state();
    let mental = belief.current_mental();

    if let Some((mid, k)) = mental.active {
        let activity = activities
            .iter()
            .find(|a| a.id == mid)
            .ok_or(MentalError::UnknownActivity(mid))?;
        let goal_active = mental.active_goal == Some(activity.goal);
        let completed = k as usize >= activity.len();
        if !goal_active {
            return Ok(Selection {
                action: AgentAction::Stop(mid),
                waivers: BTreeSet::new(),
                new_activity: None,
                note: if completed {
                    SelectNote::StopCompleted { activity: mid }
                } else {
                    SelectNote::StopGoalGone { activity: mid }
                },
            });
        }
        if completed {
            return Ok(Selection {
                action: AgentAction::Stop(mid),
                waivers: BTreeSet::new(),
                new_activity: None,
                note: SelectNote::StopCompleted { activity: mid },
            });
        }
        let viable =
            replay_cost(activity, k, state, activity.goal, engine.domain, engine.policy)?.is_some();
        if viable {
            let step = &activity.components[k as usize];
            return Ok(Selection {
                action: AgentAction::Physical(step.action),
                waivers: step.waivers.iter().copied().collect(),
                new_activity: None,
                note: SelectNote::ContinueActivity { activity: mid, component: k + 1 },
            });
        }
        return Ok(Selection {
            action: AgentAction::Stop(mid),
            waivers: BTreeSet::new(),
            new_activity: None,
            note: SelectNote::StopNotViable { activity: mid },
        });
    }

    if let Some(goal) = mental.active_goal {
        if let Some((aid, cost)) =
            prefer_stored(activities, state, goal, engine.domain, engine.policy)?
        {
            return Ok(Selection {
                action: AgentAction::Start(aid),
                waivers: BTreeSet::new(),
                new_activity: None,
                note: SelectNote::StartStored { activity: aid, cost },
            });
        }
        match plan(state, goal, engine.domain, engine.policy, engine.horizon)? {
            PlanOutcome::Found(p) => {
                let activity = Activity {
                    id: next_activity_id,
                    goal,
                    components: p.steps,
                };
                return Ok(Selection {
                    action: AgentAction::Start(next_activity_id),
                    waivers: BTreeSet::new(),
                    new_activity: Some(activity),
                    note: SelectNote::StartPlanned { activity: next_activity_id, cost: p.cost },
                });
            }
            PlanOutcome::Futile => {
                return Ok(Selection {
                    action: AgentAction::Wait,
                    waivers: BTreeSet::new(),
                    new_activity: None,
                    note: SelectNote::Futile,
                });
            }
        }
    }

    Ok(Selection {
        action: AgentAction::Wait,
        waivers: BTreeSet::new(),
        new_activity: None,
        note: SelectNote::Idle,
    })
}

// ---------------------------------------------------------------------------
// Loop state and iteration
// ---------------------------------------------------------------------------

/// One trace record per control-loop iteration, with every field rendered
/// to stable text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub abduced: Vec<String>,
    pub goal: Option<String>,
    pub activity: Option<ActivityStatus>,
    pub intended: String,
    pub outcome: String,
    pub note: String,
    pub events: Vec<EventSeen>,
    pub observed: Vec<String>,
    pub compliance: ComplianceSnapshot,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActivityStatus {
    pub id: ActivityId,
    pub done: u32,
    pub len: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventSeen {
    pub action: String,
    pub observed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplianceSnapshot {
    pub auth_strong: bool,
    pub auth_weak: bool,
    pub obl_do: bool,
    pub obl_refrain: bool,
}

impl ComplianceSnapshot {
    pub fn of(state: &State, domain: &Domain) -> Self {
        match domain.compliance.as_ref().and_then(|l| l.fluents) {
            Some(cf) => ComplianceSnapshot {
                auth_strong: state.get(cf.auth_strong),
                auth_weak: state.get(cf.auth_weak),
                obl_do: state.get(cf.obl_do),
                obl_refrain: state.get(cf.obl_refrain),
            },
            None => ComplianceSnapshot {
                auth_strong: true,
                auth_weak: true,
                obl_do: true,
                obl_refrain: true,
            },
        }
    }
}

impl TraceRecord {
    pub fn render_human(&self) -> String {
        let mut out = format!("step {}\n", self.step);
        let list = |items: &[String]| -> String {
            if items.is_empty() {
                "none".to_string()
            } else {
                items.join(", ")
            }
        };
        out.push_str(&format!("  abduced: {}\n", list(&self.abduced)));
        out.push_str(&format!(
            "  goal: {}\n",
            self.goal.as_deref().unwrap_or("none")
        ));
        match &self.activity {
            Some(a) => out.push_str(&format!("  activity: {} at {}/{}\n", a.id, a.done, a.len)),
            None => out.push_str("  activity: none\n"),
        }
        out.push_str(&format!("  intended: {}\n", self.intended));
        out.push_str(&format!("  outcome: {}\n", self.outcome));
        if !self.note.is_empty() {
            out.push_str(&format!("  note: {}\n", self.note));
        }
        let events: Vec<String> = self
            .events
            .iter()
            .map(|e| {
                if e.observed {
                    e.action.clone()
                } else {
                    format!("{} [unobserved]", e.action)
                }
            })
            .collect();
        out.push_str(&format!("  events: {}\n", list(&events)));
        out.push_str(&format!("  observed: {}\n", list(&self.observed)));
        out.push_str(&format!(
            "  compliance: strong={} weak={} obl_do={} obl_refrain={}\n",
            self.compliance.auth_strong,
            self.compliance.auth_weak,
            self.compliance.obl_do,
            self.compliance.obl_refrain
        ));
        out
    }
}

/// The mutable loop state: current step, recorded history, the true world
/// state, and the activity store (pre-computed plus planned this run).
pub struct LoopState {
    pub step: usize,
    pub history: History,
    pub world: State,
    pub activities: Vec<Activity>,
    next_activity_id: ActivityId,
}

impl LoopState {
    /// Seeds the loop from a scenario: step-0 observations enter the history
    /// and define the initial world state.
    pub fn seed(domain: &Domain, scenario: &Scenario) -> Self {
        let initial = scenario.initial_observations();
        let history = History {
            attempts: Vec::new(),
            observed_events: Vec::new(),
            observations: scenario
                .observations
                .iter()
                .filter(|o| o.step == 0)
                .copied()
                .collect(),
            static_observations: scenario
                .static_observations
                .iter()
                .filter(|o| o.step == 0)
                .copied()
                .collect(),
        };
        let next_activity_id = domain.activities.iter().map(|a| a.id).max().unwrap_or(0) + 1;
        LoopState {
            step: 0,
            history,
            world: State::initial(domain, &initial),
            activities: domain.activities.clone(),
            next_activity_id,
        }
    }
}

fn render_selection(engine: &Engine, selection: &Selection) -> String {
    let mut s = selection.action.render(engine.domain);
    for w in &selection.waivers {
        s.push_str(" + ");
        s.push_str(&engine.domain.render_waiver(*w));
    }
    s
}

fn render_note(note: &SelectNote) -> String {
    match note {
        SelectNote::ContinueActivity { .. } | SelectNote::Idle => String::new(),
        SelectNote::StopCompleted { activity } => format!("activity {activity} has run its course"),
        SelectNote::StopGoalGone { activity } => {
            format!("goal of activity {activity} is no longer active")
        }
        SelectNote::StopNotViable { activity } => {
            format!("activity {activity} no longer achieves its goal admissibly")
        }
        SelectNote::StartStored { activity, cost } => {
            format!("selected stored activity {activity}, cost {cost}")
        }
        SelectNote::StartPlanned { activity, cost } => {
            format!("planned new activity {activity}, cost {cost}")
        }
        SelectNote::Futile => "goal is futile within the horizon; waiting".to_string(),
    }
}

/// Runs one full loop iteration: interpret, select, attempt, observe.
/// Returns the appended trace record.
pub fn run_iteration(
    engine: &Engine,
    loop_state: &mut LoopState,
    scenario: &Scenario,
) -> Result<TraceRecord, LoopError> {
    let belief = engine.interpret(&loop_state.history, loop_state.step, &loop_state.activities)?;
    run_iteration_with(engine, loop_state, scenario, &belief)
}

fn run_iteration_with(
    engine: &Engine,
    loop_state: &mut LoopState,
    scenario: &Scenario,
    belief: &BeliefModel,
) -> Result<TraceRecord, LoopError> {
    let step = loop_state.step;
    let selection = select_intended(engine, belief, &loop_state.activities, loop_state.next_activity_id)?;
    if let Some(activity) = &selection.new_activity {
        loop_state.activities.push(activity.clone());
        loop_state.next_activity_id += 1;
    }

    // scripted events at this step happen in the world regardless
    let mut event_set = ActionSet::empty();
    for e in scenario.events_at(step) {
        event_set.exogenous.insert(e.action);
    }
    {
        let verdicts = derive_verdicts(&loop_state.world, &event_set, engine.policy, engine.domain)?;
        let ctx = EvalCtx::with_verdicts(&verdicts);
        let blocked = executable(&loop_state.world, &event_set, engine.domain, &ctx);
        if !blocked.is_empty() {
            return Err(LoopError::ScriptedEventBlocked {
                step,
                reasons: blocked.into_iter().map(|b| b.law).collect(),
            });
        }
    }

    let mut full_set = event_set.clone();
    full_set.agent = Some(selection.action);
    full_set.waivers = selection.waivers.clone();
    let verdicts = derive_verdicts(&loop_state.world, &full_set, engine.policy, engine.domain)?;
    let ctx = EvalCtx::with_verdicts(&verdicts);
    let blocked = executable(&loop_state.world, &full_set, engine.domain, &ctx);
    let outcome = if blocked.is_empty() {
        AttemptOutcome::Ok
    } else {
        AttemptOutcome::Blocked
    };

    let effective = if outcome == AttemptOutcome::Ok {
        full_set.clone()
    } else {
        event_set
    };
    let everdicts = derive_verdicts(&loop_state.world, &effective, engine.policy, engine.domain)?;
    let ectx = EvalCtx::with_verdicts(&everdicts);
    loop_state.world = successor(&loop_state.world, &effective, engine.domain, &ectx)?;

    // record the attempt and everything observed
    loop_state.history.attempts.push(AttemptRecord {
        step,
        action: selection.action,
        waivers: selection.waivers.clone(),
        outcome,
    });
    for e in scenario.events_at(step) {
        if e.observed {
            loop_state.history.observed_events.push((step, e.action));
        }
    }
    let mut observed = Vec::new();
    for o in scenario.observations_at(step + 1) {
        loop_state.history.observations.push(*o);
        observed.push(engine.domain.render_fluent_lit(o.lit));
    }
    for so in scenario.static_observations.iter().filter(|o| o.step == step + 1) {
        loop_state.history.static_observations.push(*so);
        let rendered = engine.domain.render_static(so.atom);
        observed.push(if so.value { rendered } else { format!("-{rendered}") });
    }

    let mental = belief.current_mental();
    let record = TraceRecord {
        step,
        abduced: belief
            .abduced
            .iter()
            .map(|&(s, a)| format!("{} at {}", engine.domain.render_action(a), s))
            .collect(),
        goal: mental.active_goal.map(|g| engine.domain.render_goal(g)),
        activity: mental.active.map(|(id, done)| ActivityStatus {
            id,
            done,
            len: loop_state
                .activities
                .iter()
                .find(|a| a.id == id)
                .map(|a| a.len() as u32)
                .unwrap_or(0),
        }),
        intended: render_selection(engine, &selection),
        outcome: match outcome {
            AttemptOutcome::Ok => "ok".to_string(),
            AttemptOutcome::Blocked => "blocked".to_string(),
        },
        note: render_note(&selection.note),
        events: scenario
            .events_at(step)
            .map(|e| EventSeen {
                action: e.action.render(engine.domain),
                observed: e.observed,
            })
            .collect(),
        observed,
        compliance: ComplianceSnapshot::of(belief.current_state(), engine.domain),
    };

    loop_state.step += 1;
    Ok(record)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// Goal achieved or abandoned and nothing left scripted.
    Quiescent,
    /// Goal futile and nothing left scripted that could change that.
    FutileParked,
    /// The step cap cut the run short.
    StepCapped,
}

/// Runs the scenario to quiescence or the step cap, returning the trace.
pub fn run_to_quiescence(
    engine: &Engine,
    loop_state: &mut LoopState,
    scenario: &Scenario,
    max_steps: usize,
) -> Result<(Vec<TraceRecord>, RunOutcome), LoopError> {
    let mut records = Vec::new();
    loop {
        if loop_state.step >= max_steps {
            return Ok((records, RunOutcome::StepCapped));
        }
        let belief =
            engine.interpret(&loop_state.history, loop_state.step, &loop_state.activities)?;
        let mental = belief.current_mental();
        let pending = scenario.pending_input(loop_state.step);
        if mental.active_goal.is_none() && mental.active.is_none() && !pending {
            return Ok((records, RunOutcome::Quiescent));
        }
        let record = run_iteration_with(engine, loop_state, scenario, &belief)?;
        let futile = record.note.starts_with("goal is futile");
        records.push(record);
        if futile && !scenario.pending_input(loop_state.step) {
            return Ok((records, RunOutcome::FutileParked));
        }
    }
}
