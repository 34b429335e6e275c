//! Policy file (`.pol`) parsing: strict and defeasible authorization and
//! obligation statements, plus `prefer` edges between defeasible labels.

use std::collections::BTreeMap;

use super::ground::{AtomKind, Cursor, RawAtom, RawTerm, Resolver, VarRanges};
use super::lex::{lex_statements, Tok, TokKind};
use super::parse_dom::reserved;
use super::Diagnostic;
use crate::domain::{Actor, Domain};
use crate::ids::ObjectId;
use crate::policy::{GroundPolicy, GroundRule, Slot, Subject};

pub(super) fn parse(text: &str, domain: &Domain) -> Result<GroundPolicy, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let stmts = lex_statements(text, &mut diags);

    let mut policy = GroundPolicy::default();
    // label name -> (args declared by first use, line, col)
    let mut label_decls: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut prefer_stmts: Vec<&[Tok]> = Vec::new();

    for toks in &stmts {
        if matches!(&toks[0].kind, TokKind::Ident(s) if s == "prefer") {
            prefer_stmts.push(toks);
            continue;
        }
        if let Err(d) = parse_rule_stmt(toks, domain, &mut policy, &mut label_decls, &mut diags) {
            diags.push(d);
        }
    }
    // prefer edges are resolved after all labels are known
    for toks in prefer_stmts {
        if let Err(d) = parse_prefer(toks, domain, &mut policy, &label_decls) {
            diags.push(d);
        }
    }

    if diags.is_empty() {
        Ok(policy)
    } else {
        Err(diags)
    }
}

/// `permitted(a)`, `-permitted(a)`, `obl(h)`, `-obl(h)` with `h` an action
/// atom or `neg(action atom)`.
struct RawHead {
    slot: Slot,
    sign: bool,
    subject: RawSubject,
}

enum RawSubject {
    Atom(RawAtom),
    /// start(M) / stop(M) over a declared activity
    Mental { stop: bool, activity: u32 },
}

fn parse_head(cur: &mut Cursor, refrain_allowed: bool) -> Result<RawHead, Diagnostic> {
    let sign = !cur.eat(&TokKind::Minus);
    let (kw, line, col) = cur.take_ident("`permitted` or `obl`")?;
    let (slot_if_do, is_obl) = match kw.as_str() {
        "permitted" => (Slot::Permitted, false),
        "obl" => (Slot::OblDo, true),
        _ => {
            return Err(Diagnostic::new(
                line,
                col,
                format!("expected `permitted` or `obl`, found `{kw}`"),
            ))
        }
    };
    cur.expect(TokKind::LParen, "`(`")?;
    let mut slot = slot_if_do;
    let subject = if is_obl && cur.eat_ident("neg") {
        if !refrain_allowed {
            return Err(Diagnostic::new(line, col, "obl(neg(..)) is not allowed here"));
        }
        cur.expect(TokKind::LParen, "`(`")?;
        let s = parse_subject(cur)?;
        cur.expect(TokKind::RParen, "`)`")?;
        slot = Slot::OblRefrain;
        s
    } else {
        parse_subject(cur)?
    };
    cur.expect(TokKind::RParen, "`)`")?;
    Ok(RawHead { slot, sign, subject })
}

fn parse_subject(cur: &mut Cursor) -> Result<RawSubject, Diagnostic> {
    if cur.eat_ident("start") || matches!(cur.peek_kind(), Some(TokKind::Ident(s)) if s == "stop") {
        // the eat consumed `start`; for `stop` consume it now
        let stop = cur.eat_ident("stop");
        cur.expect(TokKind::LParen, "`(`")?;
        let activity = cur.take_num("an activity id")?;
        cur.expect(TokKind::RParen, "`)`")?;
        return Ok(RawSubject::Mental { stop, activity });
    }
    Ok(RawSubject::Atom(cur.parse_atom()?))
}

fn parse_rule_stmt(
    toks: &[Tok],
    domain: &Domain,
    policy: &mut GroundPolicy,
    label_decls: &mut BTreeMap<String, Vec<String>>,
    diags: &mut Vec<Diagnostic>,
) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);

    // optional `label:` or `label(Vars):` prefix
    let mut label: Option<(String, Vec<String>, usize, usize)> = None;
    let looks_labeled = matches!(cur.peek_kind(), Some(TokKind::Ident(s))
        if !matches!(s.as_str(), "permitted" | "obl" | "normally"));
    if looks_labeled {
        let atom = cur.parse_atom()?;
        cur.expect(TokKind::Colon, "`:` after the label")?;
        if reserved(&atom.name) {
            return Err(Diagnostic::new(atom.line, atom.col, "label uses a reserved name"));
        }
        let mut args = Vec::new();
        for a in &atom.args {
            match a {
                RawTerm::Var(v, _, _) => args.push(v.clone()),
                _ => {
                    return Err(Diagnostic::new(
                        atom.line,
                        atom.col,
                        "label arguments must be variables",
                    ))
                }
            }
        }
        if label_decls.contains_key(&atom.name) {
            return Err(Diagnostic::new(
                atom.line,
                atom.col,
                format!("label `{}` is already used by another statement", atom.name),
            ));
        }
        label = Some((atom.name, args, atom.line, atom.col));
    }

    let defeasible = cur.eat_ident("normally");
    match (&label, defeasible) {
        (Some((name, _, line, col)), false) => {
            return Err(Diagnostic::new(
                *line,
                *col,
                format!("label `{name}` on a strict statement (labels mark defeasible ones)"),
            ))
        }
        (None, true) => {
            return Err(cur.error("a defeasible statement needs a label (`d: normally ...`)"))
        }
        _ => {}
    }

    let head = parse_head(&mut cur, true)?;
    let conds = if cur.eat_ident("if") {
        cur.parse_cond_list()?
    } else {
        Vec::new()
    };
    cur.expect_dot_end()?;

    let resolver = Resolver::new(domain);
    let mut vars = VarRanges::default();

    let subject_template = match &head.subject {
        RawSubject::Mental { stop, activity } => {
            if domain.activity(*activity).is_none() {
                return Err(cur.error(format!("activity {activity} is not declared")));
            }
            SubjectTemplate::Mental {
                stop: *stop,
                activity: *activity,
            }
        }
        RawSubject::Atom(atom) => {
            let resolved = resolver.resolve_atom(atom, &mut vars, "policy subject").map_err(|d| {
                if d.message.contains("is not declared") {
                    Diagnostic::new(
                        d.line,
                        d.col,
                        format!(
                            "policy statement describes an object that is not declared as an action: `{}`",
                            atom.name
                        ),
                    )
                } else {
                    d
                }
            })?;
            if resolved.kind != AtomKind::Action {
                return Err(Diagnostic::new(
                    atom.line,
                    atom.col,
                    format!(
                        "policy statement describes an object that is not declared as an action: `{}`",
                        atom.name
                    ),
                ));
            }
            if domain.action_decls[resolved.decl as usize].actor != Actor::Agent {
                return Err(Diagnostic::new(
                    atom.line,
                    atom.col,
                    format!(
                        "`{}` is exogenous; policies may only describe the agent's own actions",
                        atom.name
                    ),
                ));
            }
            SubjectTemplate::Atom(resolved)
        }
    };

    let rconds = resolver.resolve_cond(&conds, &mut vars)?;
    if let Some((_, args, line, col)) = &label {
        for v in args {
            if !vars.contains(v) {
                return Err(Diagnostic::new(
                    *line,
                    *col,
                    format!("label variable `{v}` does not occur in the statement"),
                ));
            }
        }
    }
    if !vars.check_nonempty(&cur, diags) {
        return Ok(());
    }

    let label_idx = label.as_ref().map(|(name, args, _, _)| {
        label_decls.insert(name.clone(), args.clone());
        (name.clone(), args.clone())
    });

    let mut err = None;
    vars.for_each_assignment(|asg| {
        if err.is_some() {
            return;
        }
        let cond = match resolver.ground_cond(&rconds, asg) {
            Err(d) => {
                err = Some(d);
                return;
            }
            Ok(None) => return,
            Ok(Some(c)) => c,
        };
        let subject = match &subject_template {
            SubjectTemplate::Mental { stop: true, activity } => Subject::Stop(*activity),
            SubjectTemplate::Mental { stop: false, activity } => Subject::Start(*activity),
            SubjectTemplate::Atom(resolved) => {
                Subject::Physical(resolver.ground_action(resolved, asg))
            }
        };
        let label = label_idx.as_ref().map(|(name, args)| {
            let rendered = render_label(domain, name, args, asg);
            intern_label(policy, &rendered)
        });
        policy.rules.push(GroundRule {
            label,
            defeasible,
            subject,
            slot: head.slot,
            sign: head.sign,
            cond,
        });
    });
    err.map_or(Ok(()), Err)
}

enum SubjectTemplate {
    Atom(super::ground::ResolvedAtom),
    Mental { stop: bool, activity: u32 },
}

fn render_label(
    domain: &Domain,
    name: &str,
    args: &[String],
    asg: &BTreeMap<&str, ObjectId>,
) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        let parts: Vec<&str> = args
            .iter()
            .map(|v| domain.objects[asg[v.as_str()].index()].as_str())
            .collect();
        format!("{}({})", name, parts.join(", "))
    }
}

fn intern_label(policy: &mut GroundPolicy, rendered: &str) -> u32 {
    if let Some(i) = policy.labels.iter().position(|l| l == rendered) {
        return i as u32;
    }
    policy.labels.push(rendered.to_string());
    policy.labels.len() as u32 - 1
}

fn parse_prefer(
    toks: &[Tok],
    domain: &Domain,
    policy: &mut GroundPolicy,
    label_decls: &BTreeMap<String, Vec<String>>,
) -> Result<(), Diagnostic> {
    let mut cur = Cursor::new(toks);
    cur.expect(TokKind::Ident("prefer".into()), "`prefer`")?;
    cur.expect(TokKind::LParen, "`(`")?;
    let winner = cur.parse_atom()?;
    cur.expect(TokKind::Comma, "`,`")?;
    let loser = cur.parse_atom()?;
    cur.expect(TokKind::RParen, "`)`")?;
    cur.expect_dot_end()?;

    for atom in [&winner, &loser] {
        if !label_decls.contains_key(&atom.name) {
            return Err(Diagnostic::new(
                atom.line,
                atom.col,
                format!("prefer references unknown label `{}`", atom.name),
            ));
        }
    }

    // shared variables between the two label atoms instantiate pointwise;
    // each variable ranges over the objects its label position saw
    let resolver = Resolver::new(domain);
    let constrain = |atom: &RawAtom| -> Result<Vec<String>, Diagnostic> {
        let mut names = Vec::new();
        for term in &atom.args {
            match term {
                RawTerm::Var(v, _, _) => {
                    names.push(v.clone());
                }
                RawTerm::Obj(o, line, col) => {
                    resolver.lookup_object(o).ok_or_else(|| {
                        Diagnostic::new(*line, *col, format!("unknown object `{o}`"))
                    })?;
                    names.push(format!("\u{0}{o}")); // literal marker
                }
                RawTerm::Num(n, line, col) => {
                    return Err(Diagnostic::new(*line, *col, format!("unexpected number `{n}`")))
                }
            }
        }
        Ok(names)
    };
    let winner_args = constrain(&winner)?;
    let loser_args = constrain(&loser)?;

    // collect the set of object tuples each label was actually grounded with
    let tuples_for = |policy: &GroundPolicy, name: &str| -> Vec<Vec<String>> {
        policy
            .labels
            .iter()
            .filter_map(|l| {
                let (lname, rest) = match l.find('(') {
                    Some(i) => (&l[..i], l[i + 1..l.len() - 1].split(", ").map(str::to_string).collect()),
                    None => (l.as_str(), Vec::new()),
                };
                (lname == name).then_some(rest)
            })
            .collect()
    };
    let winner_tuples = tuples_for(policy, &winner.name);
    let loser_tuples = tuples_for(policy, &loser.name);

    let mut edges = Vec::new();
    for wt in &winner_tuples {
        if wt.len() != winner_args.len() {
            continue;
        }
        // binding of shared variables from the winner tuple
        let mut binding: BTreeMap<&str, &str> = BTreeMap::new();
        let mut ok = true;
        for (arg, obj) in winner_args.iter().zip(wt) {
            if let Some(lit) = arg.strip_prefix('\u{0}') {
                ok &= lit == obj;
            } else {
                match binding.get(arg.as_str()) {
                    Some(prev) => ok &= *prev == obj,
                    None => {
                        binding.insert(arg, obj);
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        for lt in &loser_tuples {
            if lt.len() != loser_args.len() {
                continue;
            }
            let mut ok = true;
            for (arg, obj) in loser_args.iter().zip(lt) {
                if let Some(lit) = arg.strip_prefix('\u{0}') {
                    ok &= lit == obj;
                } else if let Some(prev) = binding.get(arg.as_str()) {
                    ok &= *prev == obj;
                }
                // unshared loser variables match anything
            }
            if ok {
                let w = render_ground_label(&winner.name, wt);
                let l = render_ground_label(&loser.name, lt);
                let wi = intern_label(policy, &w);
                let li = intern_label(policy, &l);
                edges.push((wi, li));
            }
        }
    }
    policy.prefer.extend(edges);
    Ok(())
}

fn render_ground_label(name: &str, tuple: &[String]) -> String {
    if tuple.is_empty() {
        name.to_string()
    } else {
        format!("{}({})", name, tuple.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_domain, parse_policy};

    fn toy() -> crate::domain::Domain {
        parse_domain(
            "\
sort u = {a, b}.
fluent inertial p(u).
action agent act(u).
action exogenous happen(u).
",
        )
        .unwrap()
    }

    #[test]
    fn unconditional_permits_ground_per_action() {
        let d = toy();
        let p = parse_policy("permitted(act(X)).", &d).unwrap();
        assert_eq!(p.rules.len(), 2);
        assert!(p.rules.iter().all(|r| !r.defeasible && r.cond.is_empty()));
    }

    #[test]
    fn policy_over_undeclared_action_is_the_spec_error() {
        let d = toy();
        let errs = parse_policy("permitted(greet_loudly(X)).", &d).unwrap_err();
        assert!(
            errs[0].message.contains("not declared as an action"),
            "{errs:?}"
        );
        // a fluent as subject gets the same diagnostic
        let errs = parse_policy("permitted(p(X)).", &d).unwrap_err();
        assert!(errs[0].message.contains("not declared as an action"));
    }

    #[test]
    fn exogenous_subjects_are_rejected() {
        let d = toy();
        let errs = parse_policy("obl(happen(X)).", &d).unwrap_err();
        assert!(errs[0].message.contains("exogenous"));
    }

    #[test]
    fn labels_mark_defeasible_statements_only() {
        let d = toy();
        assert!(parse_policy("d1: permitted(act(X)).", &d).is_err());
        assert!(parse_policy("normally permitted(act(X)).", &d).is_err());
        let p = parse_policy("d1(X): normally permitted(act(X)).", &d).unwrap();
        assert_eq!(p.labels, vec!["d1(a)", "d1(b)"]);
    }

    #[test]
    fn prefer_with_undefined_label_errors() {
        let d = toy();
        let text = "d1(X): normally permitted(act(X)).\nprefer(d1(X), nope(X)).";
        let errs = parse_policy(text, &d).unwrap_err();
        assert!(errs[0].message.contains("unknown label `nope`"));
    }

    #[test]
    fn prefer_edges_instantiate_pointwise_over_shared_vars() {
        let d = toy();
        let text = "\
d1(X): normally permitted(act(X)).
d2(X): normally -permitted(act(X)) if p(X).
prefer(d2(X), d1(X)).
";
        let p = parse_policy(text, &d).unwrap();
        let rendered: Vec<(String, String)> = p
            .prefer
            .iter()
            .map(|&(w, l)| (p.labels[w as usize].clone(), p.labels[l as usize].clone()))
            .collect();
        assert_eq!(
            rendered,
            vec![
                ("d2(a)".to_string(), "d1(a)".to_string()),
                ("d2(b)".to_string(), "d1(b)".to_string())
            ]
        );
    }

    #[test]
    fn obligation_heads_parse_all_four_forms() {
        let d = toy();
        let text = "\
obl(act(a)).
obl(neg(act(b))).
-obl(act(b)).
-obl(neg(act(a))).
";
        let p = parse_policy(text, &d).unwrap();
        assert_eq!(p.rules.len(), 4);
    }
}
