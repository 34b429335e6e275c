//! The policy layer over the physical transition system: compliance fluents,
//! ignore actions, `policy_compliant(f)` defined fluents, and the dynamic
//! laws that degrade compliance when the agent acts against its policy.

use thiserror::Error;

use crate::action::{ActionSet, Waiver, WaiverFamily};
use crate::domain::{
    ComplianceFluents, ComplianceLayer, CondLit, Domain, DynamicLaw, ExecLaw, ExecSubject,
    FluentDecl, FluentKind, FluentLit, GroundAtom, LawSource, PolicyCond, StateConstraint,
};
use crate::ids::{ActionId, FluentId};
use crate::modes::{AuthThreshold, ModeConfig};
use crate::policy::PolicyVerdictSet;
use crate::state::State;
use crate::transition::{cond_holds, EvalCtx};

fn push_fluent(domain: &mut Domain, display: String, kind: FluentKind) -> FluentId {
    domain.fluent_decls.push(FluentDecl {
        name: display,
        args: Vec::new(),
        kind,
    });
    domain.fluents.push(GroundAtom {
        decl: domain.fluent_decls.len() as u32 - 1,
        args: Vec::new(),
    });
    FluentId(domain.fluents.len() as u32 - 1)
}

/// Compiles the policy layer for a behavior mode into an augmented domain:
///
/// * four inertial compliance fluents, initially true and never restored;
/// * for every physical agent action `a`, dynamic laws degrading
///   `auth_compliance(strong)` when `a` occurs and permitted(a) is not known
///   true, `auth_compliance(weak)` when permitted(a) is known false, and the
///   obligation fluents on omissions and commissions — each waived by the
///   matching concurrent ignore action;
/// * a defined fluent `policy_compliant(f)` per physical fluent, conjoining
///   the mode's compliance threshold (excess conjuncts are dropped so that
///   unneeded policy actions are never required);
/// * executability blocks for every ignore action the mode does not
///   cost-minimize, and pairing conditions for the rest.
pub fn compile_policy_dynamics(base: &Domain, mode: ModeConfig) -> Domain {
    let mut domain = base.clone();
    let physical_fluents: Vec<FluentId> = (0..domain.fluents.len() as u32).map(FluentId).collect();
    let agent_actions: Vec<ActionId> = domain.agent_physical_actions().collect();

    let fluents = ComplianceFluents {
        auth_strong: push_fluent(&mut domain, "auth_compliance(strong)".into(), FluentKind::Inertial),
        auth_weak: push_fluent(&mut domain, "auth_compliance(weak)".into(), FluentKind::Inertial),
        obl_do: push_fluent(&mut domain, "obl_compliant(do_action)".into(), FluentKind::Inertial),
        obl_refrain: push_fluent(
            &mut domain,
            "obl_compliant(refrain_from_action)".into(),
            FluentKind::Inertial,
        ),
    };

    let mut conjuncts = Vec::new();
    match mode.threshold() {
        AuthThreshold::Strong => {
            conjuncts.push(fluents.auth_strong);
            conjuncts.push(fluents.auth_weak);
        }
        AuthThreshold::Weak => conjuncts.push(fluents.auth_weak),
        AuthThreshold::None => {}
    }
    if mode.obl_tracked() {
        conjuncts.push(fluents.obl_do);
        conjuncts.push(fluents.obl_refrain);
    }

    let mut policy_compliant = std::collections::HashMap::new();
    for f in physical_fluents {
        let display = format!("policy_compliant({})", domain.render_fluent(f));
        let pc = push_fluent(&mut domain, display, FluentKind::Defined);
        policy_compliant.insert(f, pc);
        let mut cond = vec![CondLit::Fluent(FluentLit { fluent: f, value: true })];
        cond.extend(
            conjuncts
                .iter()
                .map(|&c| CondLit::Fluent(FluentLit { fluent: c, value: true })),
        );
        domain.constraints.push(StateConstraint {
            head: pc,
            cond,
            source: LawSource::Compliance,
        });
    }

    for &a in &agent_actions {
        // occurring without being known permitted forfeits strong compliance
        domain.dynamic_laws.push(DynamicLaw {
            trigger: Some(a),
            head: FluentLit { fluent: fluents.auth_strong, value: false },
            cond: vec![
                CondLit::Policy(PolicyCond::PermittedNotTrue(a)),
                CondLit::OccursWaiver {
                    waiver: Waiver { family: WaiverFamily::NotPermitted, action: a },
                    value: false,
                },
            ],
            source: LawSource::Compliance,
        });
        // occurring while known not permitted forfeits weak compliance
        domain.dynamic_laws.push(DynamicLaw {
            trigger: Some(a),
            head: FluentLit { fluent: fluents.auth_weak, value: false },
            cond: vec![
                CondLit::Policy(PolicyCond::PermittedFalse(a)),
                CondLit::OccursWaiver {
                    waiver: Waiver { family: WaiverFamily::NegPermitted, action: a },
                    value: false,
                },
            ],
            source: LawSource::Compliance,
        });
        // an omitted obligatory action forfeits do-obligation compliance
        domain.dynamic_laws.push(DynamicLaw {
            trigger: None,
            head: FluentLit { fluent: fluents.obl_do, value: false },
            cond: vec![
                CondLit::Policy(PolicyCond::OblDoTrue(a)),
                CondLit::Occurs { action: a, value: false },
                CondLit::OccursWaiver {
                    waiver: Waiver { family: WaiverFamily::OblDo, action: a },
                    value: false,
                },
            ],
            source: LawSource::Compliance,
        });
        // doing what must be refrained from forfeits refrain compliance
        domain.dynamic_laws.push(DynamicLaw {
            trigger: Some(a),
            head: FluentLit { fluent: fluents.obl_refrain, value: false },
            cond: vec![
                CondLit::Policy(PolicyCond::OblRefrainTrue(a)),
                CondLit::OccursWaiver {
                    waiver: Waiver { family: WaiverFamily::OblRefrain, action: a },
                    value: false,
                },
            ],
            source: LawSource::Compliance,
        });

        for family in WaiverFamily::ALL {
            let w = Waiver { family, action: a };
            if !mode.allows(family) {
                domain.exec_laws.push(ExecLaw {
                    subject: ExecSubject::Waiver(w),
                    cond: Vec::new(),
                    source: LawSource::Compliance,
                });
            } else {
                // a waiver only makes sense alongside the event it waives
                let pairing = match family {
                    WaiverFamily::OblDo => CondLit::Occurs { action: a, value: true },
                    _ => CondLit::Occurs { action: a, value: false },
                };
                domain.exec_laws.push(ExecLaw {
                    subject: ExecSubject::Waiver(w),
                    cond: vec![pairing],
                    source: LawSource::Compliance,
                });
            }
        }
    }

    domain.compliance = Some(ComplianceLayer {
        fluents: Some(fluents),
        policy_compliant,
        conjuncts,
        mode,
    });
    domain.rebuild_indexes();
    domain
        .restratify()
        .expect("compliance layer preserves stratification");
    domain
}

/// Compiles the domain with the policy layer absent: `policy_compliant(f)`
/// is simply `f`, and no compliance fluents, ignore actions, or degradation
/// laws exist. This is the plain intentional-agent baseline.
pub fn compile_without_policy_layer(base: &Domain) -> Domain {
    let mut domain = base.clone();
    let physical_fluents: Vec<FluentId> = (0..domain.fluents.len() as u32).map(FluentId).collect();
    let mut policy_compliant = std::collections::HashMap::new();
    for f in physical_fluents {
        let display = format!("policy_compliant({})", domain.render_fluent(f));
        let pc = push_fluent(&mut domain, display, FluentKind::Defined);
        policy_compliant.insert(f, pc);
        domain.constraints.push(StateConstraint {
            head: pc,
            cond: vec![CondLit::Fluent(FluentLit { fluent: f, value: true })],
            source: LawSource::Compliance,
        });
    }
    domain.compliance = Some(ComplianceLayer {
        fluents: None,
        policy_compliant,
        conjuncts: Vec::new(),
        mode: ModeConfig::default(),
    });
    domain.rebuild_indexes();
    domain.restratify().expect("baseline layer preserves stratification");
    domain
}

/// One compliance degradation: which fluent is forfeited, caused by which
/// physical action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DegradationEvent {
    pub fluent: FluentId,
    pub action: ActionId,
}

/// The compliance effects of one step, after waivers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComplianceDelta {
    /// Degradations that fire at this step (waived ones excluded).
    pub fired: Vec<DegradationEvent>,
    /// Fired degradations whose fluent was still true (the actual flips).
    pub flips: Vec<FluentId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WaiverError {
    #[error("dangling waiver: {waiver} occurs without its paired action")]
    Dangling { waiver: String },
}

/// Evaluates the compiled degradation laws at one step. Ignore actions
/// suppress exactly their paired degradation at exactly this step; a waiver
/// without its pairing is an error.
pub fn waive_semantics(
    state: &State,
    set: &ActionSet,
    verdicts: &PolicyVerdictSet,
    domain: &Domain,
) -> Result<ComplianceDelta, WaiverError> {
    for w in &set.waivers {
        let paired = match w.family {
            WaiverFamily::OblDo => !set.occurs(w.action),
            _ => set.occurs(w.action),
        };
        if !paired {
            return Err(WaiverError::Dangling {
                waiver: domain.render_waiver(*w),
            });
        }
    }

    let ctx = EvalCtx::with_verdicts(verdicts);
    let mut delta = ComplianceDelta::default();
    for law in &domain.dynamic_laws {
        if law.source != LawSource::Compliance {
            continue;
        }
        if let Some(t) = law.trigger {
            if !set.occurs(t) {
                continue;
            }
        }
        if !cond_holds(&law.cond, state, set, &ctx) {
            continue;
        }
        // the action this law is about is its trigger, or for omission laws
        // the action tested absent in the condition
        let action = law.trigger.unwrap_or_else(|| {
            law.cond
                .iter()
                .find_map(|c| match c {
                    CondLit::Occurs { action, value: false } => Some(*action),
                    _ => None,
                })
                .expect("omission law names its action")
        });
        delta.fired.push(DegradationEvent {
            fluent: law.head.fluent,
            action,
        });
        if state.get(law.head.fluent) {
            delta.flips.push(law.head.fluent);
        }
    }
    delta.fired.sort();
    delta.fired.dedup();
    delta.flips.sort();
    delta.flips.dedup();
    Ok(delta)
}
