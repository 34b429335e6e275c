//! Scenario file (`.scn`) parsing: initial observations, scripted exogenous
//! events and observations, behavior mode, and planning horizon.

use std::collections::BTreeMap;

use super::ground::{AtomKind, Cursor, RawTerm, Resolver, VarRanges};
use super::lex::{lex_statements, Tok, TokKind};
use super::parse_dom::parse_goal;
use super::Diagnostic;
use crate::action::ExoAction;
use crate::domain::{Actor, Domain, FluentLit};
use crate::ids::StaticId;
use crate::modes::{AuthMode, ModeConfig, OblMode};

pub const DEFAULT_HORIZON: usize = 10;
pub const DEFAULT_MAX_STEPS: usize = 25;

/// A scripted fluent observation the agent makes at a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObsRecord {
    pub step: usize,
    pub lit: FluentLit,
}

/// An observation of a static relation (checked against the domain's facts).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StaticObs {
    pub step: usize,
    pub atom: StaticId,
    pub value: bool,
}

/// A scripted exogenous event. Unobserved events change the world without
/// entering the agent's history; the agent can only recover them by
/// abduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventRecord {
    pub step: usize,
    pub action: ExoAction,
    pub observed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub observations: Vec<ObsRecord>,
    pub static_observations: Vec<StaticObs>,
    pub events: Vec<EventRecord>,
    pub mode: ModeConfig,
    pub horizon: usize,
    pub max_steps: usize,
}

impl Scenario {
    pub fn initial_observations(&self) -> Vec<FluentLit> {
        self.observations
            .iter()
            .filter(|o| o.step == 0)
            .map(|o| o.lit)
            .collect()
    }

    pub fn events_at(&self, step: usize) -> impl Iterator<Item = &EventRecord> + '_ {
        self.events.iter().filter(move |e| e.step == step)
    }

    pub fn observations_at(&self, step: usize) -> impl Iterator<Item = &ObsRecord> + '_ {
        self.observations.iter().filter(move |o| o.step == step)
    }

    /// Is anything still scripted at or after the given step?
    pub fn pending_input(&self, step: usize) -> bool {
        self.events.iter().any(|e| e.step >= step)
            || self.observations.iter().any(|o| o.step > step)
            || self.static_observations.iter().any(|o| o.step > step)
    }
}

pub(super) fn parse(text: &str, domain: &Domain) -> Result<Scenario, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let stmts = lex_statements(text, &mut diags);

    let mut scenario = Scenario {
        observations: Vec::new(),
        static_observations: Vec::new(),
        events: Vec::new(),
        mode: ModeConfig::default(),
        horizon: DEFAULT_HORIZON,
        max_steps: DEFAULT_MAX_STEPS,
    };
    let mut saw_mode = false;

    for toks in &stmts {
        let result = parse_stmt(toks, domain, &mut scenario, &mut saw_mode);
        if let Err(d) = result {
            diags.push(d);
        }
    }

    if diags.is_empty() {
        Ok(scenario)
    } else {
        Err(diags)
    }
}

fn parse_stmt(
    toks: &[Tok],
    domain: &Domain,
    scenario: &mut Scenario,
    saw_mode: &mut bool,
) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    if cur.eat_ident("initially") {
        let (atom, positive) = cur.parse_lit()?;
        cur.expect_dot_end()?;
        return push_observation(domain, scenario, atom, positive, 0);
    }
    if cur.eat_ident("observe") {
        let (atom, positive) = cur.parse_lit()?;
        cur.expect(TokKind::Ident("at".into()), "`at`")?;
        let step = cur.take_num("a step number")? as usize;
        cur.expect_dot_end()?;
        return push_observation(domain, scenario, atom, positive, step);
    }
    if cur.eat_ident("event") {
        let action = parse_event_action(&mut cur, domain)?;
        cur.expect(TokKind::Ident("at".into()), "`at`")?;
        let step = cur.take_num("a step number")? as usize;
        let observed = !cur.eat_ident("unobserved");
        cur.expect_dot_end()?;
        if !observed && !matches!(action, ExoAction::Physical(_)) {
            return Err(cur.error(
                "goal selection events come from the agent's controller and cannot be unobserved",
            ));
        }
        scenario.events.push(EventRecord { step, action, observed });
        return Ok(());
    }
    if cur.eat_ident("mode") {
        if *saw_mode {
            return Err(cur.error("mode is declared twice"));
        }
        *saw_mode = true;
        let (auth, aline, acol) = cur.take_ident("an authorization mode")?;
        let (obl, oline, ocol) = cur.take_ident("an obligation mode")?;
        cur.expect_dot_end()?;
        let auth: AuthMode = auth
            .parse()
            .map_err(|e| Diagnostic::new(aline, acol, format!("{e}")))?;
        let obl: OblMode = obl
            .parse()
            .map_err(|e| Diagnostic::new(oline, ocol, format!("{e}")))?;
        scenario.mode = ModeConfig::new(auth, obl);
        return Ok(());
    }
    if cur.eat_ident("horizon") {
        let n = cur.take_num("a horizon")?;
        cur.expect_dot_end()?;
        if n == 0 {
            return Err(cur.error("horizon must be at least 1"));
        }
        scenario.horizon = n as usize;
        return Ok(());
    }
    if cur.eat_ident("max_steps") {
        let n = cur.take_num("a step cap")?;
        cur.expect_dot_end()?;
        scenario.max_steps = n as usize;
        return Ok(());
    }
    Err(cur.error(
        "expected `initially`, `observe`, `event`, `mode`, `horizon`, or `max_steps`",
    ))
}

fn push_observation(
    domain: &Domain,
    scenario: &mut Scenario,
    atom: super::ground::RawAtom,
    positive: bool,
    step: usize,
) -> Result<(), Diagnostic> {
    if atom.args.iter().any(|a| matches!(a, RawTerm::Var(..))) {
        return Err(Diagnostic::new(atom.line, atom.col, "observations must be ground"));
    }
    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let resolved = resolver
        .resolve_atom(&atom, &mut vars, "observed fluent")
        .map_err(|d| {
            if d.message.contains("is not declared") {
                Diagnostic::new(
                    d.line,
                    d.col,
                    format!("observation of undeclared fluent `{}`", atom.name),
                )
            } else {
                d
            }
        })?;
    match resolved.kind {
        AtomKind::Fluent => {
            let fluent = resolver.ground_fluent(&resolved, &BTreeMap::new());
            scenario.observations.push(ObsRecord {
                step,
                lit: FluentLit { fluent, value: positive },
            });
            Ok(())
        }
        AtomKind::Static => {
            let id = resolver.ground_static(&resolved, &BTreeMap::new());
            scenario.static_observations.push(StaticObs {
                step,
                atom: id,
                value: positive,
            });
            Ok(())
        }
        AtomKind::Action => Err(Diagnostic::new(
            atom.line,
            atom.col,
            format!("observation of undeclared fluent `{}` (it is an action)", atom.name),
        )),
    }
}

fn parse_event_action(cur: &mut Cursor, domain: &Domain) -> Result<ExoAction, Diagnostic> {
    // select(G) and select_goal(G) are the same exogenous action
    if cur.eat_ident("select") || cur.eat_ident("select_goal") {
        cur.expect(TokKind::LParen, "`(`")?;
        let goal = parse_goal(cur, domain)?;
        cur.expect(TokKind::RParen, "`)`")?;
        return Ok(ExoAction::Select(goal));
    }
    if cur.eat_ident("abandon") {
        cur.expect(TokKind::LParen, "`(`")?;
        let goal = parse_goal(cur, domain)?;
        cur.expect(TokKind::RParen, "`)`")?;
        return Ok(ExoAction::Abandon(goal));
    }
    let atom = cur.parse_atom()?;
    if atom.args.iter().any(|a| matches!(a, RawTerm::Var(..))) {
        return Err(Diagnostic::new(atom.line, atom.col, "events must be ground"));
    }
    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let resolved = resolver.resolve_atom(&atom, &mut vars, "event action")?;
    if resolved.kind != AtomKind::Action {
        return Err(Diagnostic::new(
            atom.line,
            atom.col,
            format!("`{}` is not a declared action", atom.name),
        ));
    }
    let id = resolver.ground_action(&resolved, &BTreeMap::new());
    if domain.action_actor(id) == Actor::Agent {
        return Err(Diagnostic::new(
            atom.line,
            atom.col,
            format!(
                "`{}` is an agent action; agent actions are chosen by the control loop, not scripted",
                atom.name
            ),
        ));
    }
    Ok(ExoAction::Physical(id))
}

#[cfg(test)]
mod tests {
    use super::super::{parse_domain, parse_scenario};
    use crate::action::ExoAction;
    use crate::modes::{AuthMode, ModeConfig, OblMode};

    fn office() -> crate::domain::Domain {
        let text = std::fs::read_to_string(
            concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/office_a.dom"),
        )
        .unwrap();
        parse_domain(&text).unwrap()
    }

    #[test]
    fn example_scenario_parses_with_expected_initial_state() {
        let d = office();
        let text = std::fs::read_to_string(
            concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/office_a.scn"),
        )
        .unwrap();
        let s = parse_scenario(&text, &d).unwrap();
        let rendered: Vec<String> = s
            .initial_observations()
            .iter()
            .map(|l| d.render_fluent_lit(*l))
            .collect();
        assert_eq!(
            rendered,
            vec![
                "in_room(alice, r1)",
                "in_room(bob, r4)",
                "-door_locked(d34)",
                "-greeted_by(alice, bob)"
            ]
        );
        let ev: Vec<_> = s.events_at(0).collect();
        assert_eq!(ev.len(), 1);
        assert!(matches!(ev[0].action, ExoAction::Select(_)));
        assert!(ev[0].observed);
        assert_eq!(s.mode, ModeConfig::new(AuthMode::Paranoid, OblMode::Subordinate));
    }

    #[test]
    fn mode_defaults_to_utilitarian_pair() {
        let d = office();
        let s = parse_scenario("initially in_room(alice, r1).", &d).unwrap();
        assert_eq!(s.mode, ModeConfig::default());
        assert_eq!(s.horizon, super::DEFAULT_HORIZON);
    }

    #[test]
    fn scripted_agent_action_is_an_error() {
        let d = office();
        let errs = parse_scenario("event move_through(alice, d12) at 0.", &d).unwrap_err();
        assert!(errs[0].message.contains("agent action"), "{errs:?}");
    }

    #[test]
    fn observation_of_undeclared_fluent_is_an_error() {
        let d = office();
        let errs = parse_scenario("initially floating(alice).", &d).unwrap_err();
        assert!(errs[0].message.contains("undeclared fluent"));
    }

    #[test]
    fn select_goal_spelling_is_accepted() {
        let d = office();
        let a = parse_scenario(
            "event select(policy_compliant(greeted_by(alice, bob))) at 0.",
            &d,
        )
        .unwrap();
        let b = parse_scenario(
            "event select_goal(policy_compliant(greeted_by(alice, bob))) at 0.",
            &d,
        )
        .unwrap();
        assert_eq!(a.events, b.events);
    }
}
