//! Authorization and obligation policy evaluation.
//!
//! `derive_verdicts` computes, at a state and occurring action set, the
//! three-valued verdicts permitted(a) / obl(a) / obl(neg(a)) for every agent
//! action: strict rules fire outright, defeasible rules yield to contrary
//! conclusions, cross-modality blockers, and preference defeat. A defeasible
//! conclusion is derived only when no rival conclusion could equally well be
//! drawn; rival pairs leave both atoms undetermined and emit a warning.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::action::{ActionSet, AgentAction};
use crate::domain::{CondLit, Domain};
use crate::ids::{ActionId, ActivityId};
use crate::state::State;
use crate::transition::{cond_holds, executable, successor, EvalCtx, TransitionError};

/// An agent action a policy statement may describe: a declared physical
/// agent action or one of the built-in mental actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Physical(ActionId),
    Start(ActivityId),
    Stop(ActivityId),
}

impl Subject {
    pub fn render(&self, domain: &Domain) -> String {
        match self {
            Subject::Physical(a) => domain.render_action(*a),
            Subject::Start(m) => format!("start({m})"),
            Subject::Stop(m) => format!("stop({m})"),
        }
    }

    fn occurs_in(&self, set: &ActionSet) -> bool {
        match self {
            Subject::Physical(a) => set.occurs(*a),
            Subject::Start(m) => set.agent == Some(AgentAction::Start(*m)),
            Subject::Stop(m) => set.agent == Some(AgentAction::Stop(*m)),
        }
    }
}

/// The three verdict slots kept per subject.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Permitted,
    OblDo,
    OblRefrain,
}

/// Three-valued verdict: derived true, derived false, or underived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Tri {
    True,
    False,
    #[default]
    Undet,
}

/// A derivable policy literal, e.g. (greet, Permitted, false) for
/// `-permitted(greet(..))`.
pub type PolicyLit = (Subject, Slot, bool);

/// The conclusions that may not stand together for one subject. Presence of
/// one blocks a defeasible derivation of the other; a strict derivation of
/// both is a policy inconsistency. All blocking is symmetric.
fn rivals(slot: Slot, sign: bool) -> &'static [(Slot, bool)] {
    match (slot, sign) {
        (Slot::Permitted, true) => &[(Slot::Permitted, false), (Slot::OblRefrain, true)],
        (Slot::Permitted, false) => &[(Slot::Permitted, true), (Slot::OblDo, true)],
        (Slot::OblDo, true) => &[(Slot::OblDo, false), (Slot::Permitted, false)],
        (Slot::OblDo, false) => &[(Slot::OblDo, true)],
        (Slot::OblRefrain, true) => &[(Slot::OblRefrain, false), (Slot::Permitted, true)],
        (Slot::OblRefrain, false) => &[(Slot::OblRefrain, true)],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRule {
    /// Index into `GroundPolicy::labels`; present iff defeasible. Several
    /// ground rules may share one label instance (one source statement).
    pub label: Option<u32>,
    pub defeasible: bool,
    pub subject: Subject,
    pub slot: Slot,
    pub sign: bool,
    pub cond: Vec<CondLit>,
}

impl GroundRule {
    pub fn head(&self) -> PolicyLit {
        (self.subject, self.slot, self.sign)
    }

    /// Rule text without its label; see `GroundPolicy::render_rule`.
    pub fn render(&self, domain: &Domain) -> String {
        let head = render_policy_lit(domain, self.head());
        let mut s = String::new();
        if self.defeasible {
            s.push_str("normally ");
        }
        s.push_str(&head);
        if !self.cond.is_empty() {
            let conds: Vec<String> = self.cond.iter().map(|c| domain.render_cond_lit(c)).collect();
            s.push_str(" if ");
            s.push_str(&conds.join(", "));
        }
        s
    }
}

pub fn render_policy_lit(domain: &Domain, lit: PolicyLit) -> String {
    let (subject, slot, sign) = lit;
    let a = subject.render(domain);
    let body = match slot {
        Slot::Permitted => format!("permitted({a})"),
        Slot::OblDo => format!("obl({a})"),
        Slot::OblRefrain => format!("obl(neg({a}))"),
    };
    if sign {
        body
    } else {
        format!("-{body}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroundPolicy {
    pub rules: Vec<GroundRule>,
    /// Rendered ground label instances, e.g. `m1(alice, d12)`.
    pub labels: Vec<String>,
    /// prefer(d1, d2) edges over label instances: d1 defeats d2.
    pub prefer: Vec<(u32, u32)>,
}

impl GroundPolicy {
    pub fn render_rule(&self, domain: &Domain, idx: usize) -> String {
        let rule = &self.rules[idx];
        let body = rule.render(domain);
        match rule.label {
            Some(l) => format!("{}: {}", self.labels[l as usize], body),
            None => body,
        }
    }
}

/// The derived policy atoms at one state/action-set, with defeat bookkeeping.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolicyVerdictSet {
    verdicts: BTreeMap<Subject, [Tri; 3]>,
    /// Label instances put out of force by a preferred rival.
    pub defeated: BTreeSet<u32>,
    /// Contradictory defeasible pairs left undetermined.
    pub warnings: Vec<String>,
}

impl PolicyVerdictSet {
    pub fn get(&self, subject: Subject, slot: Slot) -> Tri {
        self.verdicts
            .get(&subject)
            .map(|t| t[slot as usize])
            .unwrap_or_default()
    }

    fn set(&mut self, subject: Subject, slot: Slot, value: Tri) {
        self.verdicts.entry(subject).or_default()[slot as usize] = value;
    }

    pub fn permitted(&self, subject: Subject) -> Tri {
        self.get(subject, Slot::Permitted)
    }

    pub fn permitted_physical(&self, action: ActionId) -> Tri {
        self.permitted(Subject::Physical(action))
    }

    pub fn obl_do_physical(&self, action: ActionId) -> Tri {
        self.get(Subject::Physical(action), Slot::OblDo)
    }

    pub fn obl_refrain_physical(&self, action: ActionId) -> Tri {
        self.get(Subject::Physical(action), Slot::OblRefrain)
    }

    /// Subjects with at least one derived (non-undetermined) slot.
    pub fn derived_subjects(&self) -> impl Iterator<Item = Subject> + '_ {
        self.verdicts.keys().copied()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("policy inconsistency: {}", conflicts.join("; "))]
pub struct PolicyInconsistency {
    pub conflicts: Vec<String>,
}

/// Derives the verdicts for every agent action at `state` with `set`
/// occurring.
pub fn derive_verdicts(
    state: &State,
    set: &ActionSet,
    policy: &GroundPolicy,
    domain: &Domain,
) -> Result<PolicyVerdictSet, PolicyInconsistency> {
    let ctx = EvalCtx::default();
    let applicable: Vec<bool> = policy
        .rules
        .iter()
        .map(|r| cond_holds(&r.cond, state, set, &ctx))
        .collect();

    // Strict layer: every applicable strict rule fires.
    let mut strict: BTreeMap<PolicyLit, usize> = BTreeMap::new();
    for (i, rule) in policy.rules.iter().enumerate() {
        if rule.defeasible || !applicable[i] {
            continue;
        }
        strict.entry(rule.head()).or_insert(i);
    }

    // Contradictory strict derivations and non-contradiction violations.
    let mut conflicts = Vec::new();
    for (&(subject, slot, sign), &ri) in &strict {
        for &(rslot, rsign) in rivals(slot, sign) {
            if let Some(&rj) = strict.get(&(subject, rslot, rsign)) {
                if (slot, sign) < (rslot, rsign) {
                    conflicts.push(format!(
                        "`{}` contradicts `{}`",
                        policy.render_rule(domain, ri),
                        policy.render_rule(domain, rj)
                    ));
                }
            }
        }
    }
    if !conflicts.is_empty() {
        return Err(PolicyInconsistency { conflicts });
    }

    // Preference defeat: prefer(d1, d2) puts d2 out of force whenever some
    // rule labeled d1 has a true condition.
    let mut defeated: BTreeSet<u32> = BTreeSet::new();
    for &(winner, loser) in &policy.prefer {
        let winner_applies = policy
            .rules
            .iter()
            .enumerate()
            .any(|(i, r)| r.label == Some(winner) && applicable[i]);
        if winner_applies {
            defeated.insert(loser);
        }
    }

    // Candidate defeasible conclusions: applicable, not defeated, and not
    // already excluded by a strict rival.
    let mut candidates: BTreeMap<PolicyLit, Vec<usize>> = BTreeMap::new();
    for (i, rule) in policy.rules.iter().enumerate() {
        if !rule.defeasible || !applicable[i] {
            continue;
        }
        if rule.label.is_some_and(|l| defeated.contains(&l)) {
            continue;
        }
        let (subject, slot, sign) = rule.head();
        let blocked = rivals(slot, sign)
            .iter()
            .any(|&(rslot, rsign)| strict.contains_key(&(subject, rslot, rsign)));
        if !blocked {
            candidates.entry(rule.head()).or_default().push(i);
        }
    }

    // A candidate stands only if no rival candidate exists; rival pairs
    // leave both sides undetermined.
    let mut derived: Vec<PolicyLit> = strict.keys().copied().collect();
    let mut warnings = Vec::new();
    for (&(subject, slot, sign), rule_idxs) in &candidates {
        let rival = rivals(slot, sign)
            .iter()
            .find(|&&(rslot, rsign)| candidates.contains_key(&(subject, rslot, rsign)));
        match rival {
            None => derived.push((subject, slot, sign)),
            Some(&(rslot, rsign)) => {
                if (slot, sign) < (rslot, rsign) {
                    let ours = policy.render_rule(domain, rule_idxs[0]);
                    let theirs = candidates[&(subject, rslot, rsign)][0];
                    warnings.push(format!(
                        "contradictory defeasible statements `{}` and `{}`: both left undetermined",
                        ours,
                        policy.render_rule(domain, theirs)
                    ));
                }
            }
        }
    }

    let mut verdicts = PolicyVerdictSet {
        defeated,
        warnings,
        ..PolicyVerdictSet::default()
    };
    for (subject, slot, sign) in derived {
        verdicts.set(subject, slot, if sign { Tri::True } else { Tri::False });
    }
    Ok(verdicts)
}

// ---------------------------------------------------------------------------
// Compliance classification (per occurring action set, and per trajectory)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AuthLevel {
    NonCompliant,
    Weak,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OblLevel {
    NonCompliant,
    Compliant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplianceClass {
    pub authorization: AuthLevel,
    pub obligation: OblLevel,
}

impl ComplianceClass {
    pub fn best() -> Self {
        ComplianceClass {
            authorization: AuthLevel::Strong,
            obligation: OblLevel::Compliant,
        }
    }

    fn min(self, other: Self) -> Self {
        ComplianceClass {
            authorization: self.authorization.min(other.authorization),
            obligation: self.obligation.min(other.obligation),
        }
    }
}

impl fmt::Display for ComplianceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let auth = match self.authorization {
            AuthLevel::Strong => "strong",
            AuthLevel::Weak => "weak",
            AuthLevel::NonCompliant => "non-compliant",
        };
        let obl = match self.obligation {
            OblLevel::Compliant => "compliant",
            OblLevel::NonCompliant => "non-compliant",
        };
        write!(f, "({auth}, {obl})")
    }
}

/// Classifies an occurring action set against the verdicts at this state.
/// Authorization covers the agent's own physical and mental actions (wait is
/// always strongly compliant; policy and exogenous actions are excluded).
pub fn classify_with_verdicts(set: &ActionSet, verdicts: &PolicyVerdictSet) -> ComplianceClass {
    let mut auth = AuthLevel::Strong;
    let occurring_subject = match set.agent {
        Some(AgentAction::Physical(a)) => Some(Subject::Physical(a)),
        Some(AgentAction::Start(m)) => Some(Subject::Start(m)),
        Some(AgentAction::Stop(m)) => Some(Subject::Stop(m)),
        Some(AgentAction::Wait) | None => None,
    };
    if let Some(subject) = occurring_subject {
        auth = match verdicts.permitted(subject) {
            Tri::True => AuthLevel::Strong,
            Tri::Undet => AuthLevel::Weak,
            Tri::False => AuthLevel::NonCompliant,
        };
    }

    let mut obl = OblLevel::Compliant;
    for subject in verdicts.derived_subjects() {
        if verdicts.get(subject, Slot::OblDo) == Tri::True && !subject.occurs_in(set) {
            obl = OblLevel::NonCompliant;
        }
        if verdicts.get(subject, Slot::OblRefrain) == Tri::True && subject.occurs_in(set) {
            obl = OblLevel::NonCompliant;
        }
    }
    ComplianceClass {
        authorization: auth,
        obligation: obl,
    }
}

pub fn classify_action_set(
    state: &State,
    set: &ActionSet,
    policy: &GroundPolicy,
    domain: &Domain,
) -> Result<ComplianceClass, PolicyInconsistency> {
    let verdicts = derive_verdicts(state, set, policy, domain)?;
    Ok(classify_with_verdicts(set, &verdicts))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrajectoryError {
    #[error("step {step} is not executable: {reasons:?}")]
    NonExecutable { step: usize, reasons: Vec<String> },
    #[error(transparent)]
    Policy(#[from] PolicyInconsistency),
    #[error(transparent)]
    Transition(#[from] TransitionError),
}

/// Classifies a whole trajectory: authorization is the minimum over steps,
/// obligation compliance must hold at every step. Steps before `now` are
/// skipped — past actions always count as compliant.
pub fn classify_trajectory(
    initial: &State,
    sets: &[ActionSet],
    policy: &GroundPolicy,
    domain: &Domain,
    now: usize,
) -> Result<ComplianceClass, TrajectoryError> {
    let mut state = initial.clone();
    let mut class = ComplianceClass::best();
    for (i, set) in sets.iter().enumerate() {
        let verdicts = derive_verdicts(&state, set, policy, domain)?;
        let ctx = EvalCtx::with_verdicts(&verdicts);
        let blocked = executable(&state, set, domain, &ctx);
        if !blocked.is_empty() {
            return Err(TrajectoryError::NonExecutable {
                step: i,
                reasons: blocked.into_iter().map(|b| b.law).collect(),
            });
        }
        if i >= now {
            class = class.min(classify_with_verdicts(set, &verdicts));
        }
        state = successor(&state, set, domain, &ctx)?;
    }
    Ok(class)
}

// ---------------------------------------------------------------------------
// Policy consistency checking over a state sample
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ConsistencyViolation {
    pub state: String,
    pub action_set: String,
    pub conflicts: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ConsistencyReport {
    pub states_checked: usize,
    pub violations: Vec<ConsistencyViolation>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }

    /// One violating state per line, machine-splittable on tabs.
    pub fn machine_lines(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("{}\t{}\t{}", v.state, v.action_set, v.conflicts.join("; ")))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn human_text(&self) -> String {
        if self.consistent() {
            return format!("policy consistent on {} sampled states", self.states_checked);
        }
        let mut out = format!(
            "policy INCONSISTENT: {} violations over {} sampled states\n",
            self.violations.len(),
            self.states_checked
        );
        for v in &self.violations {
            out.push_str(&format!(
                "  at state {{{}}} with {}: {}\n",
                v.state,
                v.action_set,
                v.conflicts.join("; ")
            ));
        }
        out
    }
}

/// Enumerates every state of the domain when its inertial universe is small
/// enough (2^n states, n <= 12), for exhaustive consistency checking.
pub fn exhaustive_states(domain: &Domain) -> Option<Vec<State>> {
    let inertial: Vec<_> = domain.inertial_fluents().collect();
    if inertial.len() > 12 {
        return None;
    }
    let mut out = Vec::with_capacity(1 << inertial.len());
    for bits in 0..(1u32 << inertial.len()) {
        let mut v = crate::ids::Valuation::new_false(domain.fluent_count());
        for (i, f) in inertial.iter().enumerate() {
            v.set(f.index(), bits >> i & 1 == 1);
        }
        out.push(State::from_inertial(domain, 0, &v));
    }
    Some(out)
}

/// Runs `derive_verdicts` across the sample, with the empty action set and
/// with each agent action occurring alone, and reports every state that
/// triggers a policy inconsistency.
pub fn check_policy_consistency(
    policy: &GroundPolicy,
    domain: &Domain,
    states: &[State],
) -> ConsistencyReport {
    let mut report = ConsistencyReport {
        states_checked: states.len(),
        ..ConsistencyReport::default()
    };
    for state in states {
        let mut sets = vec![ActionSet::empty()];
        for a in domain.agent_physical_actions() {
            sets.push(ActionSet::of_agent(AgentAction::Physical(a)));
        }
        for set in sets {
            if let Err(e) = derive_verdicts(state, &set, policy, domain) {
                let true_fluents: Vec<String> = (0..domain.fluent_count())
                    .filter(|&i| state.get(crate::ids::FluentId(i as u32)))
                    .map(|i| domain.render_fluent(crate::ids::FluentId(i as u32)))
                    .collect();
                report.violations.push(ConsistencyViolation {
                    state: true_fluents.join(", "),
                    action_set: domain.render_action_set(&set),
                    conflicts: e.conflicts,
                });
            }
        }
    }
    report
}
