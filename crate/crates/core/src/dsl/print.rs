//! Pretty-printing of domain descriptions back to parseable text. Printing a
//! parsed domain and re-parsing it yields a structurally equal value; laws
//! come back out ground, exactly as the parser left them.

use crate::domain::{Domain, ExecSubject, FluentKind, LawSource};

fn args_of(domain: &Domain, sorts: &[crate::ids::SortId]) -> String {
    if sorts.is_empty() {
        String::new()
    } else {
        let names: Vec<&str> = sorts
            .iter()
            .map(|s| domain.sorts[s.index()].name.as_str())
            .collect();
        format!("({})", names.join(", "))
    }
}

/// Renders the user-visible part of a domain (compiled compliance structures
/// are an internal augmentation and are skipped).
pub fn pretty_domain(domain: &Domain) -> String {
    let mut out = String::new();
    for sort in &domain.sorts {
        let members: Vec<&str> = sort
            .members
            .iter()
            .map(|o| domain.objects[o.index()].as_str())
            .collect();
        out.push_str(&format!("sort {} = {{{}}}.\n", sort.name, members.join(", ")));
    }
    for decl in &domain.static_decls {
        out.push_str(&format!("static {}{}.\n", decl.name, args_of(domain, &decl.args)));
    }
    for decl in &domain.fluent_decls {
        if decl.name.contains('(') {
            continue; // compiled compliance fluent
        }
        let kind = match decl.kind {
            FluentKind::Inertial => "inertial",
            FluentKind::Defined => "defined",
        };
        out.push_str(&format!(
            "fluent {} {}{}.\n",
            kind,
            decl.name,
            args_of(domain, &decl.args)
        ));
    }
    for decl in &domain.action_decls {
        let actor = match decl.actor {
            crate::domain::Actor::Agent => "agent",
            crate::domain::Actor::Exogenous => "exogenous",
        };
        out.push_str(&format!(
            "action {} {}{}.\n",
            actor,
            decl.name,
            args_of(domain, &decl.args)
        ));
    }
    for (i, truth) in domain.static_facts.iter().enumerate() {
        if *truth {
            out.push_str(&format!("fact {}.\n", domain.render_static(crate::ids::StaticId(i as u32))));
        }
    }
    for law in &domain.dynamic_laws {
        if law.source == LawSource::User {
            out.push_str(&domain.render_dynamic_law(law));
            out.push_str(".\n");
        }
    }
    for law in &domain.constraints {
        if law.source != LawSource::User {
            continue;
        }
        let conds: Vec<String> = law.cond.iter().map(|c| domain.render_cond_lit(c)).collect();
        out.push_str(&format!(
            "{} if {}.\n",
            domain.render_fluent(law.head),
            conds.join(", ")
        ));
    }
    for law in &domain.exec_laws {
        if law.source != LawSource::User {
            continue;
        }
        let subject = match law.subject {
            ExecSubject::Physical(a) => domain.render_action(a),
            ExecSubject::Waiver(w) => domain.render_waiver(w),
        };
        if law.cond.is_empty() {
            out.push_str(&format!("impossible {subject}.\n"));
        } else {
            let conds: Vec<String> = law.cond.iter().map(|c| domain.render_cond_lit(c)).collect();
            out.push_str(&format!("impossible {} if {}.\n", subject, conds.join(", ")));
        }
    }
    for act in &domain.activities {
        out.push_str(&format!(
            "activity {} goal {}.\n",
            act.id,
            domain.render_goal(act.goal)
        ));
        for (k, step) in act.components.iter().enumerate() {
            let mut line = format!(
                "activity {} component {} {}",
                act.id,
                k + 1,
                domain.render_action(step.action)
            );
            if !step.waivers.is_empty() {
                let ws: Vec<String> = step.waivers.iter().map(|w| domain.render_waiver(*w)).collect();
                line.push_str(&format!(" with {}", ws.join(", ")));
            }
            out.push_str(&line);
            out.push_str(".\n");
        }
    }
    out
}

/// Debug rendering of the compiled compliance laws (not parseable; the
/// manual mode uses it to show what a mode compiles to).
pub fn pretty_compliance(domain: &Domain) -> String {
    let mut out = String::new();
    for law in &domain.dynamic_laws {
        if law.source == LawSource::Compliance {
            out.push_str(&domain.render_dynamic_law(law));
            out.push_str(".\n");
        }
    }
    for law in &domain.constraints {
        if law.source == LawSource::Compliance {
            let conds: Vec<String> = law.cond.iter().map(|c| domain.render_cond_lit(c)).collect();
            out.push_str(&format!(
                "{} if {}.\n",
                domain.render_fluent(law.head),
                conds.join(", ")
            ));
        }
    }
    for law in &domain.exec_laws {
        if law.source == LawSource::Compliance {
            let subject = match law.subject {
                ExecSubject::Physical(a) => domain.render_action(a),
                ExecSubject::Waiver(w) => domain.render_waiver(w),
            };
            if law.cond.is_empty() {
                out.push_str(&format!("impossible {subject}.\n"));
            } else {
                let conds: Vec<String> =
                    law.cond.iter().map(|c| domain.render_cond_lit(c)).collect();
                out.push_str(&format!("impossible {} if {}.\n", subject, conds.join(", ")));
            }
        }
    }
    out
}

