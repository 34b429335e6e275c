//! On-demand activity generation: uniform-cost search for a goal-achieving
//! plan that is minimal under the mode's lexicographic objective, and the
//! selection of a pre-computed activity when one qualifies.
//!
//! Waivers carry the cost. Plans needing `ignore_neg_permitted` or an
//! obligation waiver rank strictly worse than plans needing only
//! `ignore_not_permitted`, which rank worse than clean plans; length breaks
//! ties. Waivers are attached exactly where a degradation of a
//! goal-relevant compliance fluent would otherwise fire, so a clean plan
//! carries none.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::action::{ActionSet, AgentAction, Waiver, WaiverFamily};
use crate::domain::{Activity, ActivityStep, ComplianceLayer, Domain};
use crate::ids::{ActionId, ActivityId, FluentId, Valuation};
use crate::policy::{derive_verdicts, GroundPolicy, PolicyInconsistency, Tri};
use crate::state::State;
use crate::transition::{executable, successor, EvalCtx, TransitionError};

/// One plan step: a physical agent action with its concurrent policy actions.
pub type PlanStep = ActivityStep;

/// Waiver counts and length; ordered by ((neg + obl), not-permitted, length).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostVec {
    pub non_compliance_waivers: u32,
    pub weak_waivers: u32,
    pub obligation_waivers: u32,
    pub length: u32,
}

impl CostVec {
    pub fn key(&self) -> (u32, u32, u32) {
        (
            self.non_compliance_waivers + self.obligation_waivers,
            self.weak_waivers,
            self.length,
        )
    }

    fn add_waiver(&mut self, family: WaiverFamily) {
        match family {
            WaiverFamily::NegPermitted => self.non_compliance_waivers += 1,
            WaiverFamily::NotPermitted => self.weak_waivers += 1,
            WaiverFamily::OblDo | WaiverFamily::OblRefrain => self.obligation_waivers += 1,
        }
    }
}

impl std::fmt::Display for CostVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.non_compliance_waivers, self.weak_waivers, self.obligation_waivers, self.length
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub cost: CostVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanOutcome {
    Found(Plan),
    Futile,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error(transparent)]
    Policy(#[from] PolicyInconsistency),
    #[error(transparent)]
    Transition(#[from] TransitionError),
}

/// The waivers an action needs at a state so that no goal-relevant
/// compliance fluent degrades, or `None` when a needed family is blocked by
/// the mode (the step would forfeit the goal for good).
fn required_waivers(
    action: ActionId,
    verdicts: &crate::policy::PolicyVerdictSet,
    layer: &ComplianceLayer,
    domain: &Domain,
) -> Option<Vec<Waiver>> {
    let Some(cf) = layer.fluents else {
        return Some(Vec::new());
    };
    let mode = &layer.mode;
    let mut waivers = Vec::new();
    let mut need = |family: WaiverFamily, target: FluentId, action: ActionId| -> bool {
        if !layer.conjuncts.contains(&target) {
            return true; // degradation is irrelevant to the goal
        }
        if mode.allows(family) {
            waivers.push(Waiver { family, action });
            true
        } else {
            false
        }
    };

    if verdicts.permitted_physical(action) != Tri::True
        && !need(WaiverFamily::NotPermitted, cf.auth_strong, action)
    {
        return None;
    }
    if verdicts.permitted_physical(action) == Tri::False
        && !need(WaiverFamily::NegPermitted, cf.auth_weak, action)
    {
        return None;
    }
    if verdicts.obl_refrain_physical(action) == Tri::True
        && !need(WaiverFamily::OblRefrain, cf.obl_refrain, action)
    {
        return None;
    }
    for other in domain.agent_physical_actions() {
        if other != action
            && verdicts.obl_do_physical(other) == Tri::True
            && !need(WaiverFamily::OblDo, cf.obl_do, other)
        {
            return None;
        }
    }
    Some(waivers)
}

fn goal_holds(state: &State, goal: FluentId, layer: &ComplianceLayer) -> bool {
    let pc = layer.pc_of(goal).expect("goal is a physical fluent");
    state.get(pc)
}

/// Compliance fluents the goal depends on can never be re-established; once
/// one is false the branch is dead.
fn conjuncts_alive(state: &State, layer: &ComplianceLayer) -> bool {
    layer.conjuncts.iter().all(|&c| state.get(c))
}

struct SearchNode {
    state: State,
    steps: Vec<PlanStep>,
    cost: CostVec,
    /// action-name ranks along the path, for deterministic tie-breaking
    path: Vec<u32>,
}

/// Finds a cost-minimal plan of length <= horizon achieving
/// `policy_compliant(goal)`, or reports the goal futile within the horizon.
/// Deterministic: ties break on action names, then step order.
pub fn plan(
    start: &State,
    goal: FluentId,
    domain: &Domain,
    policy: &GroundPolicy,
    horizon: usize,
) -> Result<PlanOutcome, PlanError> {
    let layer = domain.compliance.as_ref().expect("compiled domain");
    if !conjuncts_alive(start, layer) {
        return Ok(PlanOutcome::Futile);
    }

    // expansion order: agent actions sorted by rendered name
    let mut actions: Vec<ActionId> = domain.agent_physical_actions().collect();
    actions.sort_by_key(|&a| domain.render_action(a));
    let rank: HashMap<ActionId, u32> = actions
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i as u32))
        .collect();

    let mut heap: BinaryHeap<Reverse<((u32, u32, u32), Vec<u32>, usize)>> = BinaryHeap::new();
    let mut arena: Vec<SearchNode> = Vec::new();
    let mut visited: HashSet<(Valuation, usize)> = HashSet::new();

    arena.push(SearchNode {
        state: start.clone(),
        steps: Vec::new(),
        cost: CostVec::default(),
        path: Vec::new(),
    });
    heap.push(Reverse(((0, 0, 0), Vec::new(), 0)));

    while let Some(Reverse((_, _, idx))) = heap.pop() {
        let (state, steps_len) = {
            let node = &arena[idx];
            (node.state.clone(), node.steps.len())
        };
        if !visited.insert((state.valuation().clone(), steps_len)) {
            continue;
        }
        if goal_holds(&state, goal, layer) {
            let node = &arena[idx];
            return Ok(PlanOutcome::Found(Plan {
                steps: node.steps.clone(),
                cost: node.cost,
            }));
        }
        if steps_len == horizon {
            continue;
        }

        for &a in &actions {
            let probe = ActionSet::of_agent(AgentAction::Physical(a));
            if !executable(&state, &probe, domain, &EvalCtx::default()).is_empty() {
                continue;
            }
            let verdicts = derive_verdicts(&state, &probe, policy, domain)?;
            let Some(waivers) = required_waivers(a, &verdicts, layer, domain) else {
                continue;
            };
            let set = ActionSet::with_waivers(AgentAction::Physical(a), waivers.iter().copied());
            let ctx = EvalCtx::with_verdicts(&verdicts);
            if !executable(&state, &set, domain, &ctx).is_empty() {
                continue;
            }
            let next = successor(&state, &set, domain, &ctx)?;
            if !conjuncts_alive(&next, layer) {
                continue;
            }
            let node = &arena[idx];
            let mut cost = node.cost;
            cost.length += 1;
            for w in &waivers {
                cost.add_waiver(w.family);
            }
            let mut steps = node.steps.clone();
            steps.push(PlanStep {
                action: a,
                waivers: waivers.clone(),
            });
            let mut path = node.path.clone();
            path.push(rank[&a]);
            if visited.contains(&(next.valuation().clone(), steps.len())) {
                continue;
            }
            let entry = (cost.key(), path.clone(), arena.len());
            arena.push(SearchNode { state: next, steps, cost, path });
            heap.push(Reverse(entry));
        }
    }
    Ok(PlanOutcome::Futile)
}

/// Replays a stored activity from the current state: every component must be
/// executable in sequence and the goal fluent true at the end. Returns its
/// cost when it qualifies.
pub fn replay_cost(
    activity: &Activity,
    from: u32,
    state: &State,
    goal: FluentId,
    domain: &Domain,
    policy: &GroundPolicy,
) -> Result<Option<CostVec>, PlanError> {
    let layer = domain.compliance.as_ref().expect("compiled domain");
    let mut current = state.clone();
    let mut cost = CostVec::default();
    for step in activity.components.iter().skip(from as usize) {
        let set = ActionSet::with_waivers(
            AgentAction::Physical(step.action),
            step.waivers.iter().copied(),
        );
        let verdicts = derive_verdicts(&current, &set, policy, domain)?;
        let ctx = EvalCtx::with_verdicts(&verdicts);
        if !executable(&current, &set, domain, &ctx).is_empty() {
            return Ok(None);
        }
        current = successor(&current, &set, domain, &ctx)?;
        cost.length += 1;
        for w in &step.waivers {
            cost.add_waiver(w.family);
        }
    }
    if goal_holds(&current, goal, layer) {
        Ok(Some(cost))
    } else {
        Ok(None)
    }
}

/// Among stored activities whose goal matches and whose execution from the
/// current state achieves it admissibly, the cost-minimal one (ties: the
/// shorter, then the smaller id).
pub fn prefer_stored(
    activities: &[Activity],
    state: &State,
    goal: FluentId,
    domain: &Domain,
    policy: &GroundPolicy,
) -> Result<Option<(ActivityId, CostVec)>, PlanError> {
    let mut best: Option<(ActivityId, CostVec)> = None;
    for activity in activities {
        if activity.goal != goal {
            continue;
        }
        let Some(cost) = replay_cost(activity, 0, state, goal, domain, policy)? else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((bid, bcost)) => {
                (cost.key(), activity.id) < (bcost.key(), *bid)
            }
        };
        if better {
            best = Some((activity.id, cost));
        }
    }
    Ok(best)
}
