//! The physical transition relation: condition evaluation, executability,
//! and successor computation with direct effects plus inertia.

use thiserror::Error;

use crate::action::ActionSet;
use crate::domain::{CondLit, Domain, DynamicLaw, ExecSubject, PolicyCond};
use crate::ids::Valuation;
use crate::policy::{PolicyVerdictSet, Tri};
use crate::state::State;

/// Evaluation context for condition literals. Compiled compliance laws test
/// policy verdicts; every caller that steps a compiled domain must supply
/// the verdicts derived for this state and action set.
#[derive(Clone, Copy, Default)]
pub struct EvalCtx<'a> {
    pub verdicts: Option<&'a PolicyVerdictSet>,
}

impl<'a> EvalCtx<'a> {
    pub fn with_verdicts(verdicts: &'a PolicyVerdictSet) -> Self {
        EvalCtx {
            verdicts: Some(verdicts),
        }
    }
}

pub fn eval_cond(lit: &CondLit, state: &State, set: &ActionSet, ctx: &EvalCtx) -> bool {
    match lit {
        CondLit::Fluent(fl) => state.holds(*fl),
        CondLit::Occurs { action, value } => set.occurs(*action) == *value,
        CondLit::OccursWaiver { waiver, value } => set.occurs_waiver(*waiver) == *value,
        CondLit::Policy(p) => {
            let v = ctx
                .verdicts
                .expect("compiled law evaluated without policy verdicts");
            match p {
                PolicyCond::PermittedNotTrue(a) => v.permitted_physical(*a) != Tri::True,
                PolicyCond::PermittedFalse(a) => v.permitted_physical(*a) == Tri::False,
                PolicyCond::OblDoTrue(a) => v.obl_do_physical(*a) == Tri::True,
                PolicyCond::OblRefrainTrue(a) => v.obl_refrain_physical(*a) == Tri::True,
            }
        }
    }
}

pub fn cond_holds(cond: &[CondLit], state: &State, set: &ActionSet, ctx: &EvalCtx) -> bool {
    cond.iter().all(|lit| eval_cond(lit, state, set, ctx))
}

/// An executability law that blocks an occurring action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocked {
    pub subject: String,
    pub law: String,
}

/// Returns the blocking reasons for this action set; empty means executable.
pub fn executable(state: &State, set: &ActionSet, domain: &Domain, ctx: &EvalCtx) -> Vec<Blocked> {
    let mut blocked = Vec::new();
    for law in &domain.exec_laws {
        let occurs = match law.subject {
            ExecSubject::Physical(a) => set.occurs(a),
            ExecSubject::Waiver(w) => set.occurs_waiver(w),
        };
        if occurs && cond_holds(&law.cond, state, set, ctx) {
            let subject = match law.subject {
                ExecSubject::Physical(a) => domain.render_action(a),
                ExecSubject::Waiver(w) => domain.render_waiver(w),
            };
            let conds: Vec<String> = law.cond.iter().map(|c| domain.render_cond_lit(c)).collect();
            blocked.push(Blocked {
                subject: subject.clone(),
                law: if conds.is_empty() {
                    format!("impossible {subject}")
                } else {
                    format!("impossible {subject} if {}", conds.join(", "))
                },
            });
        }
    }
    blocked
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransitionError {
    #[error("contradictory direct effects on {fluent}: `{law_true}` vs `{law_false}`")]
    InconsistentEffects {
        fluent: String,
        law_true: String,
        law_false: String,
    },
}

fn law_fires(law: &DynamicLaw, state: &State, set: &ActionSet, ctx: &EvalCtx) -> bool {
    if let Some(trigger) = law.trigger {
        if !set.occurs(trigger) {
            return false;
        }
    }
    cond_holds(&law.cond, state, set, ctx)
}

/// Computes the successor state: direct effects where a dynamic law fires,
/// inertia otherwise, then the defined-fluent closure. Deterministic;
/// contradictory direct effects are a hard error naming the laws.
pub fn successor(
    state: &State,
    set: &ActionSet,
    domain: &Domain,
    ctx: &EvalCtx,
) -> Result<State, TransitionError> {
    let n = domain.fluent_count();
    let mut forced: Vec<Option<(bool, usize)>> = vec![None; n];
    for (li, law) in domain.dynamic_laws.iter().enumerate() {
        if !law_fires(law, state, set, ctx) {
            continue;
        }
        let idx = law.head.fluent.index();
        match forced[idx] {
            Some((v, prev)) if v != law.head.value => {
                let (law_true, law_false) = if law.head.value {
                    (li, prev)
                } else {
                    (prev, li)
                };
                return Err(TransitionError::InconsistentEffects {
                    fluent: domain.render_fluent(law.head.fluent),
                    law_true: domain.render_dynamic_law(&domain.dynamic_laws[law_true]),
                    law_false: domain.render_dynamic_law(&domain.dynamic_laws[law_false]),
                });
            }
            _ => forced[idx] = Some((law.head.value, li)),
        }
    }

    let mut inertial = Valuation::new_false(n);
    for i in 0..n {
        let value = match forced[i] {
            Some((v, _)) => v,
            None => state.get(crate::ids::FluentId(i as u32)),
        };
        inertial.set(i, value);
    }
    Ok(State::from_inertial(domain, state.step + 1, &inertial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{AgentAction, ExoAction};
    use crate::compliance::compile_policy_dynamics;
    use crate::domain::{Domain, FluentLit};
    use crate::dsl::parse_domain;
    use crate::ids::FluentId;
    use crate::modes::{AuthMode, ModeConfig, OblMode};
    use crate::state::close_defined;

    fn office(example: char) -> Domain {
        let path = format!(
            "{}/../../scenarios/office_{example}.dom",
            env!("CARGO_MANIFEST_DIR")
        );
        parse_domain(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn fluent(domain: &Domain, name: &str) -> FluentId {
        (0..domain.fluents.len() as u32)
            .map(FluentId)
            .find(|&f| domain.render_fluent(f) == name)
            .unwrap_or_else(|| panic!("no fluent {name}"))
    }

    fn action(domain: &Domain, name: &str) -> crate::ids::ActionId {
        (0..domain.actions.len() as u32)
            .map(crate::ids::ActionId)
            .find(|&a| domain.render_action(a) == name)
            .unwrap_or_else(|| panic!("no action {name}"))
    }

    fn lit(domain: &Domain, name: &str, value: bool) -> FluentLit {
        FluentLit { fluent: fluent(domain, name), value }
    }

    fn initial_a(domain: &Domain) -> State {
        State::initial(
            domain,
            &[
                lit(domain, "in_room(alice, r1)", true),
                lit(domain, "in_room(bob, r4)", true),
            ],
        )
    }

    #[test]
    fn locked_door_blocks_movement() {
        let domain = office('a');
        let mut state = initial_a(&domain);
        state.set(fluent(&domain, "door_locked(d34)"), true);
        // re-derive defined fluents after poking the valuation
        close_defined(&domain, &mut state);
        let st = State::from_inertial(&domain, 0, state.valuation());
        let mv = action(&domain, "move_through(alice, d34)");
        let set = ActionSet::of_agent(AgentAction::Physical(mv));
        let blocked = executable(&st, &set, &domain, &EvalCtx::default());
        assert_eq!(blocked.len(), 1);
        assert!(blocked[0].law.contains("door_locked"), "{blocked:?}");
    }

    #[test]
    fn wait_is_always_executable() {
        let domain = office('a');
        let state = initial_a(&domain);
        let set = ActionSet::of_agent(AgentAction::Wait);
        assert!(executable(&state, &set, &domain, &EvalCtx::default()).is_empty());
    }

    #[test]
    fn greeting_across_rooms_is_blocked() {
        let domain = office('a');
        let state = initial_a(&domain);
        let greet = action(&domain, "greet(alice, bob)");
        let set = ActionSet::of_agent(AgentAction::Physical(greet));
        let blocked = executable(&state, &set, &domain, &EvalCtx::default());
        assert_eq!(blocked.len(), 1, "alice r1, bob r4: must be blocked");
    }

    #[test]
    fn movement_updates_location() {
        let domain = office('a');
        let state = initial_a(&domain);
        let mv = action(&domain, "move_through(alice, d12)");
        let set = ActionSet::of_agent(AgentAction::Physical(mv));
        let next = successor(&state, &set, &domain, &EvalCtx::default()).unwrap();
        assert!(next.get(fluent(&domain, "in_room(alice, r2)")));
        assert!(!next.get(fluent(&domain, "in_room(alice, r1)")));
        assert!(next.get(fluent(&domain, "in_room(bob, r4)")), "bob unaffected");
        assert_eq!(next.step, 1);
    }

    #[test]
    fn empty_step_is_pure_inertia() {
        let domain = office('a');
        let state = initial_a(&domain);
        let next = successor(&state, &ActionSet::empty(), &domain, &EvalCtx::default()).unwrap();
        assert_eq!(state.valuation(), next.valuation());
        assert_eq!(next.step, 1);
    }

    #[test]
    fn exogenous_effect_persists_by_inertia() {
        let domain = office('b');
        let state = State::initial(
            &domain,
            &[lit(&domain, "in_room(alice, r1)", true), lit(&domain, "in_room(bob, r4)", true)],
        );
        let begin = action(&domain, "begin_working(bob)");
        let mut set = ActionSet::empty();
        set.exogenous.insert(ExoAction::Physical(begin));
        let next = successor(&state, &set, &domain, &EvalCtx::default()).unwrap();
        assert!(next.get(fluent(&domain, "busy_working(bob)")));
        let later = successor(&next, &ActionSet::empty(), &domain, &EvalCtx::default()).unwrap();
        assert!(later.get(fluent(&domain, "busy_working(bob)")));
    }

    #[test]
    fn contradictory_direct_effects_name_the_laws() {
        let text = "\
sort u = {o}.
fluent inertial f(u).
action agent a(u).
a(X) causes f(X).
a(X) causes -f(X).
";
        let domain = parse_domain(text).unwrap();
        let state = State::initial(&domain, &[]);
        let set = ActionSet::of_agent(AgentAction::Physical(crate::ids::ActionId(0)));
        let err = successor(&state, &set, &domain, &EvalCtx::default()).unwrap_err();
        let TransitionError::InconsistentEffects { fluent, law_true, law_false } = err;
        assert_eq!(fluent, "f(o)");
        assert!(law_true.contains("causes f(o)"));
        assert!(law_false.contains("causes -f(o)"));
    }

    #[test]
    fn successor_is_deterministic() {
        let domain = office('a');
        let state = initial_a(&domain);
        let mv = action(&domain, "move_through(alice, d12)");
        let set = ActionSet::of_agent(AgentAction::Physical(mv));
        let a = successor(&state, &set, &domain, &EvalCtx::default()).unwrap();
        let b = successor(&state, &set, &domain, &EvalCtx::default()).unwrap();
        assert_eq!(a, b);
    }

    // policy_compliant(f) under threshold strong: true iff f holds and every
    // compliance conjunct holds. Oracle: direct truth-table enumeration over
    // the four compliance fluents.
    #[test]
    fn policy_compliant_matches_truth_table_oracle() {
        let base = office('a');
        let mode = ModeConfig::new(AuthMode::Paranoid, OblMode::Subordinate);
        let domain = compile_policy_dynamics(&base, mode);
        let layer = domain.compliance.as_ref().unwrap();
        let cf = layer.fluents.unwrap();
        let greeted = fluent(&domain, "greeted_by(alice, bob)");
        let pc = layer.pc_of(greeted).unwrap();

        for bits in 0..32u32 {
            let f_val = bits & 1 == 1;
            let comp = [bits >> 1 & 1 == 1, bits >> 2 & 1 == 1, bits >> 3 & 1 == 1, bits >> 4 & 1 == 1];
            let mut v = crate::ids::Valuation::new_false(domain.fluent_count());
            v.set(greeted.index(), f_val);
            for (i, &f) in cf.all().iter().enumerate() {
                v.set(f.index(), comp[i]);
            }
            let state = State::from_inertial(&domain, 0, &v);
            // paranoid+subordinate conjoins all four compliance fluents
            let expected = f_val && comp.iter().all(|&b| b);
            assert_eq!(state.get(pc), expected, "bits {bits:05b}");
        }
    }

    #[test]
    fn policy_compliant_ignores_compliance_under_utilitarian() {
        let base = office('a');
        let domain = compile_policy_dynamics(&base, ModeConfig::default());
        let layer = domain.compliance.as_ref().unwrap();
        let cf = layer.fluents.unwrap();
        let greeted = fluent(&domain, "greeted_by(alice, bob)");
        let pc = layer.pc_of(greeted).unwrap();
        let mut v = crate::ids::Valuation::new_false(domain.fluent_count());
        v.set(greeted.index(), true);
        for f in cf.all() {
            v.set(f.index(), false); // fully degraded
        }
        let state = State::from_inertial(&domain, 0, &v);
        assert!(state.get(pc), "utilitarian: policy_compliant(f) is just f");
    }

    #[test]
    fn close_defined_is_idempotent() {
        let base = office('a');
        let domain = compile_policy_dynamics(
            &base,
            ModeConfig::new(AuthMode::Paranoid, OblMode::Subordinate),
        );
        let mut state = State::initial(
            &domain,
            &[lit(&domain, "in_room(alice, r1)", true), lit(&domain, "in_room(bob, r4)", true)],
        );
        let once = state.clone();
        close_defined(&domain, &mut state);
        assert_eq!(once, state);
    }
}
