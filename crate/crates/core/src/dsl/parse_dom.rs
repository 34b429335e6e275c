//! Domain file (`.dom`) parsing, grounding, and validation.

use std::collections::BTreeMap;

use super::ground::{AtomKind, Cursor, RawTerm, Resolver, VarRanges};
use super::lex::{lex_statements, Tok, TokKind};
use super::Diagnostic;
use crate::action::{Waiver, WaiverFamily};
use crate::domain::{
    ActionDecl, Activity, ActivityStep, Actor, Domain, DynamicLaw, ExecLaw, ExecSubject,
    FluentDecl, FluentKind, FluentLit, GroundAtom, LawSource, SortDecl, StateConstraint, StaticDecl,
};
use crate::ids::{FluentId, ObjectId, SortId};

/// Names that belong to the built-in layer or the grammar itself and may not
/// be re-declared by a domain.
pub(super) const RESERVED: &[&str] = &[
    "wait", "start", "stop", "select", "select_goal", "abandon", "ignore_not_permitted",
    "ignore_neg_permitted", "ignore_obl", "neg", "policy_compliant", "auth_compliance",
    "obl_compliant", "permitted", "obl", "prefer", "normally", "impossible", "causes", "if",
    "sort", "fluent", "static", "action", "fact", "activity", "goal", "component", "with",
    "initially", "observe", "event", "at", "unobserved", "mode", "horizon", "max_steps", "not",
];

pub(super) fn reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

pub(super) fn parse(text: &str) -> Result<Domain, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let stmts = lex_statements(text, &mut diags);

    let mut domain = Domain::default();
    let mut fact_stmts: Vec<&[Tok]> = Vec::new();
    let mut law_stmts: Vec<&[Tok]> = Vec::new();

    // Phase 1: declarations.
    for toks in &stmts {
        let head = match &toks[0].kind {
            TokKind::Ident(s) => s.as_str(),
            _ => {
                // laws may start with `-`? No: heads of statements here are
                // atoms or keywords; anything else is reported in phase 2.
                law_stmts.push(toks);
                continue;
            }
        };
        let result = match head {
            "sort" => parse_sort(toks, &mut domain),
            "fluent" => parse_fluent_decl(toks, &mut domain),
            "static" => parse_static_decl(toks, &mut domain),
            "action" => parse_action_decl(toks, &mut domain),
            "fact" => {
                fact_stmts.push(toks);
                Ok(())
            }
            _ => {
                law_stmts.push(toks);
                Ok(())
            }
        };
        if let Err(d) = result {
            diags.push(d);
        }
    }

    check_namespaces(&domain, &mut diags);
    build_universes(&mut domain);
    domain.rebuild_indexes();

    // Phase 1.5: static facts.
    for toks in fact_stmts {
        if let Err(d) = parse_fact(toks, &mut domain) {
            diags.push(d);
        }
    }

    // Phase 2: laws and activities, ground-instantiated.
    let mut activities: BTreeMap<u32, RawActivity> = BTreeMap::new();
    let mut new_dynamic = Vec::new();
    let mut new_constraints = Vec::new();
    let mut new_exec = Vec::new();
    for toks in law_stmts {
        if let Err(d) = parse_law_stmt(
            toks,
            &domain,
            &mut new_dynamic,
            &mut new_constraints,
            &mut new_exec,
            &mut activities,
            &mut diags,
        ) {
            diags.push(d);
        }
    }
    domain.dynamic_laws = new_dynamic;
    domain.constraints = new_constraints;
    domain.exec_laws = new_exec;

    finish_activities(activities, &mut domain, &mut diags);
    stratify(&mut domain, &mut diags);

    if diags.is_empty() {
        Ok(domain)
    } else {
        Err(diags)
    }
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

fn decl_name(cur: &mut Cursor, domain: &Domain, what: &str) -> Result<(String, usize, usize), Diagnostic> {
    let (name, line, col) = cur.take_ident(what)?;
    if reserved(&name) {
        return Err(Diagnostic::new(line, col, format!("`{name}` is a reserved name")));
    }
    let clash = domain.fluent_decls.iter().any(|d| d.name == name)
        || domain.static_decls.iter().any(|d| d.name == name)
        || domain.action_decls.iter().any(|d| d.name == name);
    if clash {
        return Err(Diagnostic::new(line, col, format!("`{name}` is already declared")));
    }
    Ok((name, line, col))
}

fn parse_sort(toks: &[Tok], domain: &mut Domain) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    cur.expect(TokKind::Ident("sort".into()), "`sort`")?;
    let (name, line, col) = cur.take_ident("a sort name")?;
    if reserved(&name) {
        return Err(Diagnostic::new(line, col, format!("`{name}` is a reserved name")));
    }
    if domain.sorts.iter().any(|s| s.name == name) {
        return Err(Diagnostic::new(line, col, format!("sort `{name}` is already declared")));
    }
    cur.expect(TokKind::Eq, "`=`")?;
    cur.expect(TokKind::LBrace, "`{`")?;
    let mut members = Vec::new();
    if !cur.eat(&TokKind::RBrace) {
        loop {
            let (obj, oline, ocol) = cur.take_ident("an object name")?;
            if reserved(&obj) {
                return Err(Diagnostic::new(oline, ocol, format!("`{obj}` is a reserved name")));
            }
            let id = match domain.objects.iter().position(|o| *o == obj) {
                Some(i) => ObjectId(i as u32),
                None => {
                    domain.objects.push(obj.clone());
                    ObjectId(domain.objects.len() as u32 - 1)
                }
            };
            if members.contains(&id) {
                return Err(Diagnostic::new(oline, ocol, format!("duplicate member `{obj}`")));
            }
            members.push(id);
            if cur.eat(&TokKind::RBrace) {
                break;
            }
            cur.expect(TokKind::Comma, "`,` or `}`")?;
        }
    }
    cur.expect_dot_end()?;
    domain.sorts.push(SortDecl { name, members });
    Ok(())
}

fn parse_arg_sorts(cur: &mut Cursor, domain: &Domain) -> Result<Vec<SortId>, Diagnostic> {
    let mut args = Vec::new();
    if cur.eat(&TokKind::LParen) {
        loop {
            let (sort, line, col) = cur.take_ident("a sort name")?;
            match domain.sorts.iter().position(|s| s.name == sort) {
                Some(i) => args.push(SortId(i as u32)),
                None => {
                    return Err(Diagnostic::new(line, col, format!("sort `{sort}` is not declared")))
                }
            }
            if cur.eat(&TokKind::RParen) {
                break;
            }
            cur.expect(TokKind::Comma, "`,` or `)`")?;
        }
    }
    Ok(args)
}

fn parse_fluent_decl(toks: &[Tok], domain: &mut Domain) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    cur.expect(TokKind::Ident("fluent".into()), "`fluent`")?;
    let kind = if cur.eat_ident("inertial") {
        FluentKind::Inertial
    } else if cur.eat_ident("defined") {
        FluentKind::Defined
    } else {
        return Err(cur.error("expected `inertial` or `defined`"));
    };
    let (name, _, _) = decl_name(&mut cur, domain, "a fluent name")?;
    let args = parse_arg_sorts(&mut cur, domain)?;
    cur.expect_dot_end()?;
    domain.fluent_decls.push(FluentDecl { name, args, kind });
    Ok(())
}

fn parse_static_decl(toks: &[Tok], domain: &mut Domain) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    cur.expect(TokKind::Ident("static".into()), "`static`")?;
    let (name, _, _) = decl_name(&mut cur, domain, "a static relation name")?;
    let args = parse_arg_sorts(&mut cur, domain)?;
    cur.expect_dot_end()?;
    domain.static_decls.push(StaticDecl { name, args });
    Ok(())
}

fn parse_action_decl(toks: &[Tok], domain: &mut Domain) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    cur.expect(TokKind::Ident("action".into()), "`action`")?;
    let actor = if cur.eat_ident("agent") {
        Actor::Agent
    } else if cur.eat_ident("exogenous") {
        Actor::Exogenous
    } else {
        return Err(cur.error("expected `agent` or `exogenous`"));
    };
    // only physical actions are user-declared; mental and policy actions
    // are built in
    cur.eat_ident("physical");
    let (name, _, _) = decl_name(&mut cur, domain, "an action name")?;
    let args = parse_arg_sorts(&mut cur, domain)?;
    cur.expect_dot_end()?;
    domain.action_decls.push(ActionDecl { name, args, actor });
    Ok(())
}

fn check_namespaces(domain: &Domain, diags: &mut Vec<Diagnostic>) {
    for obj in &domain.objects {
        let clash = domain.fluent_decls.iter().any(|d| &d.name == obj)
            || domain.static_decls.iter().any(|d| &d.name == obj)
            || domain.action_decls.iter().any(|d| &d.name == obj);
        if clash {
            diags.push(Diagnostic::new(
                0,
                0,
                format!("`{obj}` is both an object and a declared atom name"),
            ));
        }
    }
}

fn product(sorts: &[SortId], domain: &Domain) -> Vec<Vec<ObjectId>> {
    let mut rows: Vec<Vec<ObjectId>> = vec![Vec::new()];
    for sort in sorts {
        let members = &domain.sorts[sort.index()].members;
        let mut next = Vec::with_capacity(rows.len() * members.len());
        for row in &rows {
            for &m in members {
                let mut r = row.clone();
                r.push(m);
                next.push(r);
            }
        }
        rows = next;
    }
    rows
}

fn build_universes(domain: &mut Domain) {
    let mut fluents = Vec::new();
    for (di, decl) in domain.fluent_decls.iter().enumerate() {
        for args in product(&decl.args, domain) {
            fluents.push(GroundAtom { decl: di as u32, args });
        }
    }
    domain.fluents = fluents;

    let mut actions = Vec::new();
    for (di, decl) in domain.action_decls.iter().enumerate() {
        for args in product(&decl.args, domain) {
            actions.push(GroundAtom { decl: di as u32, args });
        }
    }
    domain.actions = actions;

    let mut statics = Vec::new();
    for (di, decl) in domain.static_decls.iter().enumerate() {
        for args in product(&decl.args, domain) {
            statics.push(GroundAtom { decl: di as u32, args });
        }
    }
    domain.static_facts = vec![false; statics.len()];
    domain.statics = statics;
}

fn parse_fact(toks: &[Tok], domain: &mut Domain) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    cur.expect(TokKind::Ident("fact".into()), "`fact`")?;
    let atom = cur.parse_atom()?;
    cur.expect_dot_end()?;
    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let resolved = resolver.resolve_atom(&atom, &mut vars, "static relation")?;
    if resolved.kind != AtomKind::Static {
        return Err(Diagnostic::new(
            atom.line,
            atom.col,
            format!("`{}` is not a static relation", atom.name),
        ));
    }
    if atom.args.iter().any(|a| matches!(a, RawTerm::Var(..))) {
        return Err(Diagnostic::new(atom.line, atom.col, "facts must be ground"));
    }
    let _ = vars;
    let id = resolver.ground_static(&resolved, &BTreeMap::new());
    domain.static_facts[id.index()] = true;
    Ok(())
}

// ---------------------------------------------------------------------------
// Laws
// ---------------------------------------------------------------------------

struct RawActivity {
    goal: Option<(FluentId, usize, usize)>,
    components: BTreeMap<u32, (ActivityStep, usize, usize)>,
    line: usize,
    col: usize,
}

#[allow(clippy::too_many_arguments)]
fn parse_law_stmt(
    toks: &[Tok],
    domain: &Domain,
    dynamic: &mut Vec<DynamicLaw>,
    constraints: &mut Vec<StateConstraint>,
    exec: &mut Vec<ExecLaw>,
    activities: &mut BTreeMap<u32, RawActivity>,
    diags: &mut Vec<Diagnostic>,
) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    if cur.eat_ident("impossible") {
        return parse_exec_law(&mut cur, domain, exec, diags);
    }
    if cur.eat_ident("activity") {
        return parse_activity_stmt(&mut cur, domain, activities);
    }
    let head_atom = cur.parse_atom()?;
    if cur.eat_ident("causes") {
        parse_dynamic_law(&mut cur, head_atom, domain, dynamic, diags)
    } else if cur.eat_ident("if") {
        parse_constraint(&mut cur, head_atom, domain, constraints, diags)
    } else {
        Err(cur.error("expected `causes` or `if`"))
    }
}

fn parse_dynamic_law(
    cur: &mut Cursor,
    trigger_atom: super::ground::RawAtom,
    domain: &Domain,
    out: &mut Vec<DynamicLaw>,
    diags: &mut Vec<Diagnostic>,
) -> Result<(), Diagnostic> {
    let (head_atom, head_positive) = cur.parse_lit()?;
    let conds = if cur.eat_ident("if") {
        cur.parse_cond_list()?
    } else {
        Vec::new()
    };
    cur.expect_dot_end()?;

    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let trigger = resolver.resolve_atom(&trigger_atom, &mut vars, "action")?;
    if trigger.kind != AtomKind::Action {
        return Err(Diagnostic::new(
            trigger_atom.line,
            trigger_atom.col,
            format!("`{}` is not a declared action", trigger_atom.name),
        ));
    }
    let head = resolver.resolve_atom(&head_atom, &mut vars, "fluent")?;
    if head.kind != AtomKind::Fluent {
        return Err(Diagnostic::new(
            head_atom.line,
            head_atom.col,
            format!("`{}` is not a declared fluent", head_atom.name),
        ));
    }
    if domain.fluent_decls[head.decl as usize].kind != FluentKind::Inertial {
        return Err(Diagnostic::new(
            head_atom.line,
            head_atom.col,
            "direct effects may only change inertial fluents",
        ));
    }
    let rconds = resolver.resolve_cond(&conds, &mut vars)?;
    if !vars.check_nonempty(cur, diags) {
        return Ok(());
    }
    let mut err = None;
    vars.for_each_assignment(|asg| {
        if err.is_some() {
            return;
        }
        match resolver.ground_cond(&rconds, asg) {
            Err(d) => err = Some(d),
            Ok(None) => {}
            Ok(Some(cond)) => out.push(DynamicLaw {
                trigger: Some(resolver.ground_action(&trigger, asg)),
                head: FluentLit {
                    fluent: resolver.ground_fluent(&head, asg),
                    value: head_positive,
                },
                cond,
                source: LawSource::User,
            }),
        }
    });
    err.map_or(Ok(()), Err)
}

fn parse_constraint(
    cur: &mut Cursor,
    head_atom: super::ground::RawAtom,
    domain: &Domain,
    out: &mut Vec<StateConstraint>,
    diags: &mut Vec<Diagnostic>,
) -> Result<(), Diagnostic> {
    let conds = cur.parse_cond_list()?;
    cur.expect_dot_end()?;

    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let head = resolver.resolve_atom(&head_atom, &mut vars, "fluent")?;
    if head.kind != AtomKind::Fluent
        || domain.fluent_decls[head.decl as usize].kind != FluentKind::Defined
    {
        return Err(Diagnostic::new(
            head_atom.line,
            head_atom.col,
            "a state constraint head must be a defined fluent",
        ));
    }
    let rconds = resolver.resolve_cond(&conds, &mut vars)?;
    for c in &rconds {
        if let super::ground::ResolvedCond::Lit { atom, .. } = c {
            if atom.kind == AtomKind::Action {
                return Err(cur.error("state constraints may not test action occurrence"));
            }
        }
    }
    if !vars.check_nonempty(cur, diags) {
        return Ok(());
    }
    let mut err = None;
    vars.for_each_assignment(|asg| {
        if err.is_some() {
            return;
        }
        match resolver.ground_cond(&rconds, asg) {
            Err(d) => err = Some(d),
            Ok(None) => {}
            Ok(Some(cond)) => out.push(StateConstraint {
                head: resolver.ground_fluent(&head, asg),
                cond,
                source: LawSource::User,
            }),
        }
    });
    err.map_or(Ok(()), Err)
}

fn parse_exec_law(
    cur: &mut Cursor,
    domain: &Domain,
    out: &mut Vec<ExecLaw>,
    diags: &mut Vec<Diagnostic>,
) -> Result<(), Diagnostic> {
    let subject_atom = cur.parse_atom()?;
    let conds = if cur.eat_ident("if") {
        cur.parse_cond_list()?
    } else {
        Vec::new()
    };
    cur.expect_dot_end()?;

    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let subject = resolver.resolve_atom(&subject_atom, &mut vars, "action")?;
    if subject.kind != AtomKind::Action {
        return Err(Diagnostic::new(
            subject_atom.line,
            subject_atom.col,
            format!("`{}` is not a declared action", subject_atom.name),
        ));
    }
    let rconds = resolver.resolve_cond(&conds, &mut vars)?;
    if !vars.check_nonempty(cur, diags) {
        return Ok(());
    }
    let mut err = None;
    vars.for_each_assignment(|asg| {
        if err.is_some() {
            return;
        }
        match resolver.ground_cond(&rconds, asg) {
            Err(d) => err = Some(d),
            Ok(None) => {}
            Ok(Some(cond)) => out.push(ExecLaw {
                subject: ExecSubject::Physical(resolver.ground_action(&subject, asg)),
                cond,
                source: LawSource::User,
            }),
        }
    });
    err.map_or(Ok(()), Err)
}

// ---------------------------------------------------------------------------
// Activities
// ---------------------------------------------------------------------------

/// Parses the built-in policy-action forms `ignore_not_permitted(a)`,
/// `ignore_neg_permitted(a)`, `ignore_obl(a)`, `ignore_obl(neg(a))`.
pub(super) fn parse_waiver(cur: &mut Cursor, domain: &Domain) -> Result<Waiver, Diagnostic> {
    let (name, line, col) = cur.take_ident("a policy action")?;
    let family_outer = match name.as_str() {
        "ignore_not_permitted" => Some(WaiverFamily::NotPermitted),
        "ignore_neg_permitted" => Some(WaiverFamily::NegPermitted),
        "ignore_obl" => None,
        _ => {
            return Err(Diagnostic::new(
                line,
                col,
                format!("`{name}` is not a policy action"),
            ))
        }
    };
    cur.expect(TokKind::LParen, "`(`")?;
    let (family, action_atom) = match family_outer {
        Some(f) => (f, cur.parse_atom()?),
        None => {
            if cur.eat_ident("neg") {
                cur.expect(TokKind::LParen, "`(`")?;
                let atom = cur.parse_atom()?;
                cur.expect(TokKind::RParen, "`)`")?;
                (WaiverFamily::OblRefrain, atom)
            } else {
                (WaiverFamily::OblDo, cur.parse_atom()?)
            }
        }
    };
    cur.expect(TokKind::RParen, "`)`")?;
    let action = ground_agent_action(domain, &action_atom)?;
    Ok(Waiver { family, action })
}

/// Resolves a ground atom that must be a declared physical agent action.
pub(super) fn ground_agent_action(
    domain: &Domain,
    atom: &super::ground::RawAtom,
) -> Result<crate::ids::ActionId, Diagnostic> {
    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let resolved = resolver.resolve_atom(atom, &mut vars, "action")?;
    if resolved.kind != AtomKind::Action {
        return Err(Diagnostic::new(
            atom.line,
            atom.col,
            format!("`{}` is not a declared action", atom.name),
        ));
    }
    if atom.args.iter().any(|a| matches!(a, RawTerm::Var(..))) {
        return Err(Diagnostic::new(atom.line, atom.col, "must be ground"));
    }
    let id = resolver.ground_action(&resolved, &BTreeMap::new());
    if domain.action_actor(id) != Actor::Agent {
        return Err(Diagnostic::new(
            atom.line,
            atom.col,
            format!("`{}` is an exogenous action", atom.name),
        ));
    }
    Ok(id)
}

/// Resolves a ground `policy_compliant(f)` goal, returning the inner fluent.
pub(super) fn parse_goal(cur: &mut Cursor, domain: &Domain) -> Result<FluentId, Diagnostic> {
    let (name, line, col) = cur.take_ident("`policy_compliant`")?;
    if name != "policy_compliant" {
        return Err(Diagnostic::new(
            line,
            col,
            "goals must have the form policy_compliant(fluent)",
        ));
    }
    cur.expect(TokKind::LParen, "`(`")?;
    let atom = cur.parse_atom()?;
    cur.expect(TokKind::RParen, "`)`")?;
    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();
    let resolved = resolver.resolve_atom(&atom, &mut vars, "fluent")?;
    if resolved.kind != AtomKind::Fluent {
        return Err(Diagnostic::new(
            atom.line,
            atom.col,
            format!("`{}` is not a declared fluent", atom.name),
        ));
    }
    if atom.args.iter().any(|a| matches!(a, RawTerm::Var(..))) {
        return Err(Diagnostic::new(atom.line, atom.col, "goals must be ground"));
    }
    Ok(resolver.ground_fluent(&resolved, &BTreeMap::new()))
}

fn parse_activity_stmt(
    cur: &mut Cursor,
    domain: &Domain,
    activities: &mut BTreeMap<u32, RawActivity>,
) -> Result<(), Diagnostic> {
    let (line, col) = cur.here();
    let id = cur.take_num("an activity id")?;
    let entry = activities.entry(id).or_insert_with(|| RawActivity {
        goal: None,
        components: BTreeMap::new(),
        line,
        col,
    });
    if cur.eat_ident("goal") {
        let goal = parse_goal(cur, domain)?;
        cur.expect_dot_end()?;
        if entry.goal.is_some() {
            return Err(Diagnostic::new(line, col, format!("activity {id} already has a goal")));
        }
        entry.goal = Some((goal, line, col));
        return Ok(());
    }
    if cur.eat_ident("component") {
        let k = cur.take_num("a component index")?;
        let atom = cur.parse_atom()?;
        let action = ground_agent_action(domain, &atom)?;
        let mut waivers = Vec::new();
        if cur.eat_ident("with") {
            loop {
                let w = parse_waiver(cur, domain)?;
                match w.family {
                    WaiverFamily::NotPermitted | WaiverFamily::NegPermitted | WaiverFamily::OblRefrain
                        if w.action != action =>
                    {
                        return Err(cur.error(
                            "this policy action must be paired with the component's own action",
                        ));
                    }
                    WaiverFamily::OblDo if w.action == action => {
                        return Err(cur.error(
                            "ignore_obl(a) waives an omission of a and cannot be paired with a itself",
                        ));
                    }
                    _ => {}
                }
                waivers.push(w);
                if !cur.eat(&TokKind::Comma) {
                    break;
                }
            }
        }
        cur.expect_dot_end()?;
        if entry.components.contains_key(&k) {
            return Err(Diagnostic::new(
                line,
                col,
                format!("activity {id} already has component {k}"),
            ));
        }
        entry.components.insert(k, (ActivityStep { action, waivers }, line, col));
        return Ok(());
    }
    Err(cur.error("expected `goal` or `component`"))
}

fn finish_activities(
    raw: BTreeMap<u32, RawActivity>,
    domain: &mut Domain,
    diags: &mut Vec<Diagnostic>,
) {
    for (id, act) in raw {
        let Some((goal, _, _)) = act.goal else {
            diags.push(Diagnostic::new(
                act.line,
                act.col,
                format!("activity {id} has no goal"),
            ));
            continue;
        };
        let len = act.components.len() as u32;
        let contiguous = (1..=len).all(|k| act.components.contains_key(&k));
        if !contiguous || len == 0 {
            diags.push(Diagnostic::new(
                act.line,
                act.col,
                format!("activity {id} components must be numbered 1..L contiguously"),
            ));
            continue;
        }
        let components = (1..=len)
            .map(|k| act.components[&k].0.clone())
            .collect();
        domain.activities.push(Activity { id, goal, components });
    }
}

// ---------------------------------------------------------------------------
// Stratification of defined fluents
// ---------------------------------------------------------------------------

fn stratify(domain: &mut Domain, diags: &mut Vec<Diagnostic>) {
    if let Err(fluent) = domain.restratify() {
        diags.push(Diagnostic::new(
            0,
            0,
            format!(
                "defined fluents are not stratified: recursion through negation involving `{fluent}`"
            ),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_domain;
    use crate::domain::FluentKind;

    #[test]
    fn empty_file_is_a_valid_vacuous_domain() {
        let d = parse_domain("").unwrap();
        assert!(d.fluents.is_empty() && d.actions.is_empty() && d.activities.is_empty());
        let d = parse_domain("% just a comment\n\n").unwrap();
        assert!(d.fluents.is_empty());
    }

    #[test]
    fn office_domain_declares_expected_atoms() {
        let text = std::fs::read_to_string(
            concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/office_a.dom"),
        )
        .unwrap();
        let d = parse_domain(&text).unwrap();
        let fluent_names: Vec<&str> =
            d.fluent_decls.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(fluent_names, vec!["in_room", "door_locked", "greeted_by"]);
        let action_names: Vec<&str> =
            d.action_decls.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(
            action_names,
            vec!["move_through", "lock_door", "unlock_door", "greet"]
        );
        assert_eq!(d.activities.len(), 1);
        assert_eq!(d.activities[0].len(), 4);
    }

    #[test]
    fn collects_multiple_errors_with_positions() {
        let text = "fluent inertial f(nosort).\naction agent mystery(alsono).\n";
        let errs = parse_domain(text).unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].line, 1);
        assert_eq!(errs[1].line, 2);
        assert!(errs[0].message.contains("not declared"));
    }

    #[test]
    fn rejects_unstratified_defined_fluents() {
        let text = "\
sort u = {o}.
fluent defined p(u).
fluent defined q(u).
p(X) if -q(X).
q(X) if p(X).
";
        let errs = parse_domain(text).unwrap_err();
        assert!(errs[0].message.contains("not stratified"), "{errs:?}");
    }

    #[test]
    fn positive_recursion_is_fine() {
        let text = "\
sort u = {o}.
fluent inertial base(u).
fluent defined p(u).
fluent defined q(u).
p(X) if q(X).
q(X) if p(X).
q(X) if base(X).
";
        let d = parse_domain(text).unwrap();
        assert_eq!(d.strata.len(), 1);
    }

    #[test]
    fn rejects_reserved_and_duplicate_names() {
        let errs = parse_domain("sort wait = {a}.").unwrap_err();
        assert!(errs[0].message.contains("reserved"));
        let errs = parse_domain("sort s = {a}.\nfluent inertial f(s).\naction agent f(s).")
            .unwrap_err();
        assert!(errs[0].message.contains("already declared"));
    }

    #[test]
    fn state_constraint_heads_must_be_defined() {
        let text = "\
sort u = {o}.
fluent inertial p(u).
p(X) if p(X).
";
        let errs = parse_domain(text).unwrap_err();
        assert!(errs[0].message.contains("defined fluent"));
    }

    #[test]
    fn defined_fluents_are_kind_defined() {
        let text = "\
sort u = {o}.
fluent inertial p(u).
fluent defined d(u).
d(X) if p(X).
";
        let d = parse_domain(text).unwrap();
        let defined: Vec<_> = (0..d.fluents.len() as u32)
            .map(crate::ids::FluentId)
            .filter(|&f| d.fluent_kind(f) == FluentKind::Defined)
            .collect();
        assert_eq!(defined.len(), 1);
    }

    #[test]
    fn activity_components_must_be_contiguous() {
        let text = "\
sort u = {o}.
fluent inertial g(u).
action agent a(u).
a(X) causes g(X).
activity 1 goal policy_compliant(g(o)).
activity 1 component 2 a(o).
";
        let errs = parse_domain(text).unwrap_err();
        assert!(errs[0].message.contains("contiguous"));
    }
}
