//! Mental state: the agent's active goal and its progress through the
//! currently intended activity, maintained by the mental actions
//! start/stop/select/abandon and by component execution.

use thiserror::Error;

use crate::action::{ActionSet, AgentAction, ExoAction};
use crate::domain::{Activity, ActivityStep, Domain};
use crate::ids::{ActivityId, FluentId};
use crate::state::State;

/// The agent's mental fluents. At most one activity is intended at a time;
/// its status counts completed components (0 after start, up to the
/// activity's length).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MentalState {
    pub active_goal: Option<FluentId>,
    pub active: Option<(ActivityId, u32)>,
}

impl MentalState {
    pub fn status(&self, activity: ActivityId) -> i64 {
        match self.active {
            Some((m, k)) if m == activity => k as i64,
            _ => -1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MentalError {
    #[error("start({0}) while activity {1} is active")]
    StartWhileActive(ActivityId, ActivityId),
    #[error("stop({0}) but that activity is not active")]
    StopInactive(ActivityId),
    #[error("activity {0} is not known")]
    UnknownActivity(ActivityId),
}

/// Advances the mental state by one step: goal selection and abandonment,
/// start/stop, component progress, and the deactivation of achieved goals
/// (a goal that has become true ceases to be active). `next_state` is the
/// physical state after the step.
pub fn apply_mental_dynamics(
    mental: &MentalState,
    set: &ActionSet,
    next_state: &State,
    domain: &Domain,
    activities: &[Activity],
) -> Result<MentalState, MentalError> {
    let mut out = mental.clone();

    for event in &set.exogenous {
        match event {
            ExoAction::Select(goal) => out.active_goal = Some(*goal),
            ExoAction::Abandon(goal) => {
                if out.active_goal == Some(*goal) {
                    out.active_goal = None;
                }
            }
            ExoAction::Physical(_) => {}
        }
    }

    match set.agent {
        Some(AgentAction::Start(m)) => {
            if let Some((active, _)) = out.active {
                return Err(MentalError::StartWhileActive(m, active));
            }
            if !activities.iter().any(|a| a.id == m) {
                return Err(MentalError::UnknownActivity(m));
            }
            out.active = Some((m, 0));
        }
        Some(AgentAction::Stop(m)) => {
            if out.active.map(|(id, _)| id) != Some(m) {
                return Err(MentalError::StopInactive(m));
            }
            out.active = None;
        }
        Some(AgentAction::Physical(a)) => {
            if let Some((m, k)) = out.active {
                let activity = activities
                    .iter()
                    .find(|act| act.id == m)
                    .ok_or(MentalError::UnknownActivity(m))?;
                if (k as usize) < activity.len() && activity.components[k as usize].action == a {
                    out.active = Some((m, k + 1));
                }
            }
        }
        Some(AgentAction::Wait) | None => {}
    }

    if let Some(goal) = out.active_goal {
        let layer = domain.compliance.as_ref().expect("compiled domain");
        let pc = layer.pc_of(goal).expect("goal is a physical fluent");
        if next_state.get(pc) {
            out.active_goal = None;
        }
    }

    Ok(out)
}

/// The next component of the active activity, or none when no activity is
/// intended or the activity has run out of components.
pub fn next_physical_action<'a>(
    mental: &MentalState,
    activities: &'a [Activity],
) -> Option<&'a ActivityStep> {
    let (m, k) = mental.active?;
    let activity = activities.iter().find(|a| a.id == m)?;
    activity.components.get(k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Waiver;
    use crate::compliance::compile_policy_dynamics;
    use crate::dsl::parse_domain;
    use crate::modes::ModeConfig;
    use std::collections::BTreeSet;

    fn office() -> (Domain, Vec<Activity>) {
        let text = std::fs::read_to_string(
            concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/office_a.dom"),
        )
        .unwrap();
        let base = parse_domain(&text).unwrap();
        let compiled = compile_policy_dynamics(&base, ModeConfig::default());
        let activities = compiled.activities.clone();
        (compiled, activities)
    }

    fn action(domain: &Domain, name: &str) -> crate::ids::ActionId {
        domain
            .agent_physical_actions()
            .find(|&a| domain.render_action(a) == name)
            .unwrap()
    }

    fn goal_of(domain: &Domain) -> FluentId {
        domain.activities[0].goal
    }

    #[test]
    fn select_activates_goal_and_achievement_clears_it() {
        let (domain, acts) = office();
        let state = State::initial(&domain, &[]);
        let goal = goal_of(&domain);
        let mut set = ActionSet::empty();
        set.exogenous.insert(ExoAction::Select(goal));
        let m = apply_mental_dynamics(&MentalState::default(), &set, &state, &domain, &acts).unwrap();
        assert_eq!(m.active_goal, Some(goal));

        // a state where the goal fluent holds deactivates the goal
        let achieved = State::initial(
            &domain,
            &[crate::domain::FluentLit { fluent: goal, value: true }],
        );
        let m2 = apply_mental_dynamics(&m, &ActionSet::empty(), &achieved, &domain, &acts).unwrap();
        assert_eq!(m2.active_goal, None);
    }

    #[test]
    fn start_then_component_advances_status() {
        let (domain, acts) = office();
        let state = State::initial(&domain, &[]);
        let m0 = MentalState { active_goal: Some(goal_of(&domain)), active: None };
        let m1 = apply_mental_dynamics(
            &m0,
            &ActionSet::of_agent(AgentAction::Start(1)),
            &state,
            &domain,
            &acts,
        )
        .unwrap();
        assert_eq!(m1.status(1), 0);
        let mv = action(&domain, "move_through(alice, d12)");
        let m2 = apply_mental_dynamics(
            &m1,
            &ActionSet::of_agent(AgentAction::Physical(mv)),
            &state,
            &domain,
            &acts,
        )
        .unwrap();
        assert_eq!(m2.status(1), 1);
        assert_eq!(
            next_physical_action(&m2, &acts).map(|s| domain.render_action(s.action)),
            Some("move_through(alice, d23)".to_string())
        );
    }

    #[test]
    fn completed_activity_has_no_next_component() {
        let (domain, acts) = office();
        let m = MentalState { active_goal: None, active: Some((1, 4)) };
        assert!(next_physical_action(&m, &acts).is_none());
    }

    #[test]
    fn start_while_active_and_stop_inactive_are_errors() {
        let (domain, acts) = office();
        let state = State::initial(&domain, &[]);
        let m = MentalState { active_goal: None, active: Some((1, 2)) };
        let err = apply_mental_dynamics(
            &m,
            &ActionSet::of_agent(AgentAction::Start(1)),
            &state,
            &domain,
            &acts,
        )
        .unwrap_err();
        assert!(matches!(err, MentalError::StartWhileActive(1, 1)));
        let err = apply_mental_dynamics(
            &MentalState::default(),
            &ActionSet::of_agent(AgentAction::Stop(1)),
            &state,
            &domain,
            &acts,
        )
        .unwrap_err();
        assert!(matches!(err, MentalError::StopInactive(1)));
    }

    #[test]
    fn inertia_without_mental_actions() {
        let (domain, acts) = office();
        let state = State::initial(&domain, &[]);
        let m = MentalState { active_goal: Some(goal_of(&domain)), active: Some((1, 1)) };
        // an unrelated set: waivers and no matching component
        let set = ActionSet::with_waivers(
            AgentAction::Wait,
            BTreeSet::<Waiver>::new(),
        );
        let m2 = apply_mental_dynamics(&m, &set, &state, &domain, &acts).unwrap();
        assert_eq!(m, m2);
    }
}
