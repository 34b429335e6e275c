//! Action instances as they occur at a step: the single agent action, any
//! concurrent policy (ignore) actions, and exogenous events.

use crate::domain::Domain;
use crate::ids::{ActionId, ActivityId, FluentId};
use std::collections::BTreeSet;

/// The four families of built-in policy actions, one instance per physical
/// agent action. Each waives exactly one compliance degradation at the step
/// where it occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WaiverFamily {
    /// ignore_not_permitted(a): waives the strong-compliance degradation.
    NotPermitted,
    /// ignore_neg_permitted(a): waives the weak-compliance degradation.
    NegPermitted,
    /// ignore_obl(a): waives the do-obligation degradation for an omitted a.
    OblDo,
    /// ignore_obl(neg(a)): waives the refrain-obligation degradation.
    OblRefrain,
}

impl WaiverFamily {
    pub const ALL: [WaiverFamily; 4] = [
        WaiverFamily::NotPermitted,
        WaiverFamily::NegPermitted,
        WaiverFamily::OblDo,
        WaiverFamily::OblRefrain,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Waiver {
    pub family: WaiverFamily,
    pub action: ActionId,
}

/// The agent's own action at a step: exactly one of these may occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentAction {
    Wait,
    Physical(ActionId),
    Start(ActivityId),
    Stop(ActivityId),
}

impl AgentAction {
    pub fn render(&self, domain: &Domain) -> String {
        match self {
            AgentAction::Wait => "wait".to_string(),
            AgentAction::Physical(a) => domain.render_action(*a),
            AgentAction::Start(m) => format!("start({m})"),
            AgentAction::Stop(m) => format!("stop({m})"),
        }
    }
}

/// An exogenous action: a physical event in the environment, or a
/// goal-selection communication from the agent's controller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExoAction {
    Physical(ActionId),
    /// select(policy_compliant(f))
    Select(FluentId),
    /// abandon(policy_compliant(f))
    Abandon(FluentId),
}

impl ExoAction {
    pub fn render(&self, domain: &Domain) -> String {
        match self {
            ExoAction::Physical(a) => domain.render_action(*a),
            ExoAction::Select(f) => format!("select({})", domain.render_goal(*f)),
            ExoAction::Abandon(f) => format!("abandon({})", domain.render_goal(*f)),
        }
    }
}

/// The set of actions occurring at one step. At most one agent physical or
/// mental action; any number of policy actions and exogenous actions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ActionSet {
    pub agent: Option<AgentAction>,
    pub waivers: BTreeSet<Waiver>,
    pub exogenous: BTreeSet<ExoAction>,
}

impl ActionSet {
    pub fn empty() -> Self {
        ActionSet::default()
    }

    pub fn of_agent(agent: AgentAction) -> Self {
        ActionSet {
            agent: Some(agent),
            ..ActionSet::default()
        }
    }

    pub fn with_waivers(agent: AgentAction, waivers: impl IntoIterator<Item = Waiver>) -> Self {
        ActionSet {
            agent: Some(agent),
            waivers: waivers.into_iter().collect(),
            ..ActionSet::default()
        }
    }

    /// The physical actions occurring at this step (the agent's, if physical,
    /// plus exogenous physical events).
    pub fn physical_occurring(&self) -> impl Iterator<Item = ActionId> + '_ {
        let agent = match self.agent {
            Some(AgentAction::Physical(a)) => Some(a),
            _ => None,
        };
        agent.into_iter().chain(self.exogenous.iter().filter_map(|e| match e {
            ExoAction::Physical(a) => Some(*a),
            _ => None,
        }))
    }

    pub fn occurs(&self, action: ActionId) -> bool {
        self.physical_occurring().any(|a| a == action)
    }

    pub fn occurs_waiver(&self, w: Waiver) -> bool {
        self.waivers.contains(&w)
    }

    pub fn is_empty(&self) -> bool {
        self.agent.is_none() && self.waivers.is_empty() && self.exogenous.is_empty()
    }
}
