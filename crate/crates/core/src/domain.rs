//! Ground domain descriptions: sorts, fluents, actions, statics, laws, and
//! stored activities.
//!
//! Everything downstream of the parser is fully ground. Variables in the
//! surface syntax are instantiated over their sorts at parse time, so a
//! `Domain` is a finite universe of atoms plus ground laws over them.

use std::collections::HashMap;
use std::fmt;

use crate::action::{ActionSet, Waiver, WaiverFamily};
use crate::ids::{ActionId, ActivityId, FluentId, ObjectId, SortId, StaticId, Valuation};
use crate::modes::ModeConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluentKind {
    Inertial,
    Defined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Actor {
    Agent,
    Exogenous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    pub members: Vec<ObjectId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluentDecl {
    pub name: String,
    pub args: Vec<SortId>,
    pub kind: FluentKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub args: Vec<SortId>,
    pub actor: Actor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticDecl {
    pub name: String,
    pub args: Vec<SortId>,
}

/// One ground instance of a declared fluent, action, or static relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub decl: u32,
    pub args: Vec<ObjectId>,
}

/// A ground fluent literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FluentLit {
    pub fluent: FluentId,
    pub value: bool,
}

/// A condition literal of a ground law, evaluated against a state, the
/// occurring action set, and (for compiled compliance laws) the policy
/// verdicts of the step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CondLit {
    Fluent(FluentLit),
    /// The physical action occurs (or does not occur) at this step.
    Occurs { action: ActionId, value: bool },
    /// A waiver (ignore action) occurs at this step. Compiled laws only.
    OccursWaiver { waiver: Waiver, value: bool },
    /// Three-valued tests against the step's policy verdicts. Compiled only.
    Policy(PolicyCond),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyCond {
    /// Default negation: permitted(a) is not derived true.
    PermittedNotTrue(ActionId),
    /// permitted(a) is derived false.
    PermittedFalse(ActionId),
    /// obl(a) is derived true.
    OblDoTrue(ActionId),
    /// obl(neg(a)) is derived true.
    OblRefrainTrue(ActionId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawSource {
    User,
    Compliance,
}

/// `trigger causes head if cond`. Compiled obligation laws have no trigger
/// action; they fire on their condition alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicLaw {
    pub trigger: Option<ActionId>,
    pub head: FluentLit,
    pub cond: Vec<CondLit>,
    pub source: LawSource,
}

/// `head if cond`, head a defined fluent (closed world).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateConstraint {
    pub head: FluentId,
    pub cond: Vec<CondLit>,
    pub source: LawSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExecSubject {
    Physical(ActionId),
    Waiver(Waiver),
}

/// `impossible subject if cond`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecLaw {
    pub subject: ExecSubject,
    pub cond: Vec<CondLit>,
    pub source: LawSource,
}

/// One step of a stored activity: a physical agent action plus the policy
/// actions paired with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivityStep {
    pub action: ActionId,
    pub waivers: Vec<Waiver>,
}

/// A named, fixed-length plan with an associated goal fluent. The goal is
/// always "achieve `policy_compliant(goal)`" for a physical fluent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Activity {
    pub id: ActivityId,
    pub goal: FluentId,
    pub components: Vec<ActivityStep>,
}

impl Activity {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Ids of the four inertial compliance fluents of the compiled layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplianceFluents {
    pub auth_strong: FluentId,
    pub auth_weak: FluentId,
    pub obl_do: FluentId,
    pub obl_refrain: FluentId,
}

impl ComplianceFluents {
    pub fn all(&self) -> [FluentId; 4] {
        [self.auth_strong, self.auth_weak, self.obl_do, self.obl_refrain]
    }
}

/// The compiled policy layer: compliance fluents (absent when the layer is
/// compiled out), the `policy_compliant(f)` fluent per physical fluent, and
/// the mode that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplianceLayer {
    pub fluents: Option<ComplianceFluents>,
    /// physical fluent -> its policy_compliant(f) defined fluent
    pub policy_compliant: HashMap<FluentId, FluentId>,
    /// fluents policy_compliant(f) conjoins besides f itself
    pub conjuncts: Vec<FluentId>,
    pub mode: ModeConfig,
}

impl ComplianceLayer {
    pub fn pc_of(&self, fluent: FluentId) -> Option<FluentId> {
        self.policy_compliant.get(&fluent).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Domain {
    pub objects: Vec<String>,
    pub sorts: Vec<SortDecl>,
    pub fluent_decls: Vec<FluentDecl>,
    pub action_decls: Vec<ActionDecl>,
    pub static_decls: Vec<StaticDecl>,

    /// Ground universes. `fluents[i]` is the atom with `FluentId(i)`, etc.
    pub fluents: Vec<GroundAtom>,
    pub actions: Vec<GroundAtom>,
    pub statics: Vec<GroundAtom>,
    /// Truth of each ground static atom (closed world).
    pub static_facts: Vec<bool>,

    pub dynamic_laws: Vec<DynamicLaw>,
    pub constraints: Vec<StateConstraint>,
    pub exec_laws: Vec<ExecLaw>,
    pub activities: Vec<Activity>,

    /// Defined-fluent strata, each a list of indices into `constraints`,
    /// in evaluation order. Derived during validation.
    pub strata: Vec<Vec<usize>>,

    pub compliance: Option<ComplianceLayer>,

    fluent_index: HashMap<GroundAtom, FluentId>,
    action_index: HashMap<GroundAtom, ActionId>,
    static_index: HashMap<GroundAtom, StaticId>,
}

impl Domain {
    pub fn fluent_count(&self) -> usize {
        self.fluents.len()
    }

    pub fn fluent_kind(&self, id: FluentId) -> FluentKind {
        self.fluent_decls[self.fluents[id.index()].decl as usize].kind
    }

    pub fn action_actor(&self, id: ActionId) -> Actor {
        self.action_decls[self.actions[id.index()].decl as usize].actor
    }

    pub fn agent_physical_actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len() as u32)
            .map(ActionId)
            .filter(|&a| self.action_actor(a) == Actor::Agent)
    }

    pub fn exogenous_physical_actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len() as u32)
            .map(ActionId)
            .filter(|&a| self.action_actor(a) == Actor::Exogenous)
    }

    pub fn activity(&self, id: ActivityId) -> Option<&Activity> {
        self.activities.iter().find(|a| a.id == id)
    }

    /// Recomputes the defined-fluent strata. Errs with the offending fluent
    /// when the constraints recurse through negation.
    pub(crate) fn restratify(&mut self) -> Result<(), String> {
        let defined: Vec<FluentId> = (0..self.fluents.len() as u32)
            .map(FluentId)
            .filter(|&f| self.fluent_kind(f) == FluentKind::Defined)
            .collect();
        let mut level: HashMap<FluentId, usize> = defined.iter().map(|&f| (f, 0)).collect();
        let bound = defined.len() + 1;
        loop {
            let mut changed = false;
            for law in &self.constraints {
                for lit in &law.cond {
                    let CondLit::Fluent(fl) = lit else { continue };
                    if self.fluent_kind(fl.fluent) != FluentKind::Defined {
                        continue;
                    }
                    let dep = level[&fl.fluent] + usize::from(!fl.value);
                    let entry = level.get_mut(&law.head).expect("defined head");
                    if *entry < dep {
                        *entry = dep;
                        changed = true;
                        if dep > bound {
                            return Err(self.render_fluent(law.head));
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let max_level = level.values().copied().max().unwrap_or(0);
        let mut strata: Vec<Vec<usize>> = vec![Vec::new(); max_level + 1];
        for (ci, law) in self.constraints.iter().enumerate() {
            strata[level[&law.head]].push(ci);
        }
        strata.retain(|s| !s.is_empty());
        self.strata = strata;
        Ok(())
    }

    pub(crate) fn rebuild_indexes(&mut self) {
        self.fluent_index = self
            .fluents
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), FluentId(i as u32)))
            .collect();
        self.action_index = self
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), ActionId(i as u32)))
            .collect();
        self.static_index = self
            .statics
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), StaticId(i as u32)))
            .collect();
    }

    pub fn lookup_fluent(&self, atom: &GroundAtom) -> Option<FluentId> {
        self.fluent_index.get(atom).copied()
    }

    pub fn lookup_action(&self, atom: &GroundAtom) -> Option<ActionId> {
        self.action_index.get(atom).copied()
    }

    pub fn lookup_static(&self, atom: &GroundAtom) -> Option<StaticId> {
        self.static_index.get(atom).copied()
    }

    pub fn static_true(&self, id: StaticId) -> bool {
        self.static_facts[id.index()]
    }

    /// All inertial fluents, in id order.
    pub fn inertial_fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        (0..self.fluents.len() as u32)
            .map(FluentId)
            .filter(|&f| self.fluent_kind(f) == FluentKind::Inertial)
    }

    // ---- rendering -------------------------------------------------------

    fn render_args(&self, args: &[ObjectId]) -> String {
        if args.is_empty() {
            String::new()
        } else {
            let names: Vec<&str> = args.iter().map(|o| self.objects[o.index()].as_str()).collect();
            format!("({})", names.join(", "))
        }
    }

    pub fn render_fluent(&self, id: FluentId) -> String {
        let atom = &self.fluents[id.index()];
        let decl = &self.fluent_decls[atom.decl as usize];
        format!("{}{}", decl.name, self.render_args(&atom.args))
    }

    pub fn render_fluent_lit(&self, lit: FluentLit) -> String {
        if lit.value {
            self.render_fluent(lit.fluent)
        } else {
            format!("-{}", self.render_fluent(lit.fluent))
        }
    }

    pub fn render_action(&self, id: ActionId) -> String {
        let atom = &self.actions[id.index()];
        let decl = &self.action_decls[atom.decl as usize];
        format!("{}{}", decl.name, self.render_args(&atom.args))
    }

    pub fn render_static(&self, id: StaticId) -> String {
        let atom = &self.statics[id.index()];
        let decl = &self.static_decls[atom.decl as usize];
        format!("{}{}", decl.name, self.render_args(&atom.args))
    }

    pub fn render_waiver(&self, w: Waiver) -> String {
        let a = self.render_action(w.action);
        match w.family {
            WaiverFamily::NotPermitted => format!("ignore_not_permitted({a})"),
            WaiverFamily::NegPermitted => format!("ignore_neg_permitted({a})"),
            WaiverFamily::OblDo => format!("ignore_obl({a})"),
            WaiverFamily::OblRefrain => format!("ignore_obl(neg({a}))"),
        }
    }

    pub fn render_goal(&self, goal: FluentId) -> String {
        format!("policy_compliant({})", self.render_fluent(goal))
    }

    pub fn render_action_set(&self, set: &ActionSet) -> String {
        let mut parts = Vec::new();
        if let Some(agent) = &set.agent {
            parts.push(agent.render(self));
        }
        for w in &set.waivers {
            parts.push(self.render_waiver(*w));
        }
        for e in &set.exogenous {
            parts.push(e.render(self));
        }
        if parts.is_empty() {
            "{}".to_string()
        } else {
            format!("{{{}}}", parts.join(", "))
        }
    }

    pub fn render_cond_lit(&self, lit: &CondLit) -> String {
        match lit {
            CondLit::Fluent(fl) => self.render_fluent_lit(*fl),
            CondLit::Occurs { action, value: true } => self.render_action(*action),
            CondLit::Occurs { action, value: false } => format!("-{}", self.render_action(*action)),
            CondLit::OccursWaiver { waiver, value: true } => self.render_waiver(*waiver),
            CondLit::OccursWaiver { waiver, value: false } => format!("-{}", self.render_waiver(*waiver)),
            CondLit::Policy(p) => match p {
                PolicyCond::PermittedNotTrue(a) => format!("not permitted({})", self.render_action(*a)),
                PolicyCond::PermittedFalse(a) => format!("-permitted({})", self.render_action(*a)),
                PolicyCond::OblDoTrue(a) => format!("obl({})", self.render_action(*a)),
                PolicyCond::OblRefrainTrue(a) => format!("obl(neg({}))", self.render_action(*a)),
            },
        }
    }

    pub fn render_dynamic_law(&self, law: &DynamicLaw) -> String {
        let mut s = String::new();
        if let Some(t) = law.trigger {
            s.push_str(&self.render_action(t));
            s.push_str(" causes ");
        } else {
            s.push_str("causes ");
        }
        s.push_str(&self.render_fluent_lit(law.head));
        if !law.cond.is_empty() {
            let conds: Vec<String> = law.cond.iter().map(|c| self.render_cond_lit(c)).collect();
            s.push_str(" if ");
            s.push_str(&conds.join(", "));
        }
        s
    }

    pub fn render_valuation(&self, v: &Valuation) -> String {
        let lits: Vec<String> = (0..self.fluents.len())
            .map(|i| {
                self.render_fluent_lit(FluentLit {
                    fluent: FluentId(i as u32),
                    value: v.get(i),
                })
            })
            .collect();
        lits.join(", ")
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::dsl::print::pretty_domain(self))
    }
}
