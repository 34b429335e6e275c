//! States of the transition diagram: a total valuation of inertial fluents
//! plus the derived values of defined fluents.

use crate::domain::{CondLit, Domain, FluentKind, FluentLit};
use crate::ids::{FluentId, Valuation};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct State {
    pub step: usize,
    values: Valuation,
}

impl State {
    /// Builds the step-0 state from a set of observed literals. Inertial
    /// fluents not mentioned default to false (closed world at the start),
    /// except the compiled compliance fluents, which start true.
    pub fn initial(domain: &Domain, observed: &[FluentLit]) -> Self {
        let mut values = Valuation::new_false(domain.fluent_count());
        if let Some(cf) = domain.compliance.as_ref().and_then(|l| l.fluents) {
            for f in cf.all() {
                values.set(f.index(), true);
            }
        }
        for lit in observed {
            values.set(lit.fluent.index(), lit.value);
        }
        let mut state = State { step: 0, values };
        close_defined(domain, &mut state);
        state
    }

    /// A state directly from an inertial valuation; defined fluents are
    /// recomputed.
    pub fn from_inertial(domain: &Domain, step: usize, inertial: &Valuation) -> Self {
        let mut state = State {
            step,
            values: inertial.clone(),
        };
        close_defined(domain, &mut state);
        state
    }

    pub fn get(&self, fluent: FluentId) -> bool {
        self.values.get(fluent.index())
    }

    pub fn holds(&self, lit: FluentLit) -> bool {
        self.get(lit.fluent) == lit.value
    }

    pub(crate) fn set(&mut self, fluent: FluentId, value: bool) {
        self.values.set(fluent.index(), value);
    }

    /// The full valuation, inertial and defined alike. Two states with equal
    /// valuations are interchangeable for search purposes regardless of step.
    pub fn valuation(&self) -> &Valuation {
        &self.values
    }
}

/// Recomputes every defined fluent as the least fixpoint of the state
/// constraints, stratum by stratum (closed world on defined fluents).
pub fn close_defined(domain: &Domain, state: &mut State) {
    for f in 0..domain.fluent_count() {
        let id = FluentId(f as u32);
        if domain.fluent_kind(id) == FluentKind::Defined {
            state.set(id, false);
        }
    }
    for stratum in &domain.strata {
        loop {
            let mut changed = false;
            for &ci in stratum {
                let law = &domain.constraints[ci];
                if state.get(law.head) {
                    continue;
                }
                let fires = law.cond.iter().all(|lit| match lit {
                    CondLit::Fluent(fl) => state.holds(*fl),
                    // validated away at parse/compile time
                    _ => unreachable!("state constraints test fluents only"),
                });
                if fires {
                    state.set(law.head, true);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
}
