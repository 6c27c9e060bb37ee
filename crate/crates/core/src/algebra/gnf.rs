//! Greibach Normal Form: every equation becomes
//! `X = (1 +) sum a_i . xi_i` with each `xi_i` a parallel composition of
//! identifiers.
//!
//! Targets of head-normal-form summands are flattened into parallel
//! components; every component that is not already an identifier is named
//! by a fresh identifier (deterministically, in first-visit order) and
//! processed in turn. Priority operators inside targets are absorbed: the
//! specification's single order is re-applied globally by wrapping the
//! initial expression in `theta`, so filtering happens at every reachable
//! state. The component vocabulary is bounded; specifications whose
//! vocabulary does not stabilise are rejected.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::foundations::{ActionLabel, DataSymbol, Port, PriorityOrder};

use super::canon::{canonical, canonical_key};
use super::hnf::head_normal_form;
use super::sos::SosError;
use super::{Identifier, ProcessExpr, RecSpec};

use std::collections::BTreeSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GnfError {
    #[error("{0}")]
    Sos(#[from] SosError),
    #[error(
        "component vocabulary did not stabilise within {limit} fresh identifiers; \
         the specification has no finite normal form of this shape"
    )]
    VocabularyDiverged { limit: usize },
}

/// `X = (1 +) sum a_i . xi_i`, each `xi_i` a sorted multiset of identifiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnfEquation {
    pub has_one: bool,
    pub summands: Vec<(ActionLabel, Vec<Identifier>)>,
}

#[derive(Clone, Debug)]
pub struct GnfSpec {
    pub name: String,
    pub equations: BTreeMap<Identifier, GnfEquation>,
    pub initial: Identifier,
    /// The specification's priority order, re-applied as a global wrapper.
    pub priority: Option<PriorityOrder>,
    pub data: BTreeSet<DataSymbol>,
    pub ports: BTreeSet<Port>,
    /// Fresh identifiers introduced for non-identifier components, with the
    /// component expressions they name.
    pub named_components: BTreeMap<Identifier, ProcessExpr>,
}

impl GnfSpec {
    /// The accepting identifiers (those whose equation has the 1-summand).
    pub fn accepting_identifiers(&self) -> BTreeSet<Identifier> {
        self.equations
            .iter()
            .filter(|(_, eq)| eq.has_one)
            .map(|(x, _)| x.clone())
            .collect()
    }

    pub fn non_accepting_identifiers(&self) -> BTreeSet<Identifier> {
        self.equations
            .iter()
            .filter(|(_, eq)| !eq.has_one)
            .map(|(x, _)| x.clone())
            .collect()
    }

    /// Renders the normal form back into an ordinary specification.
    pub fn to_rec_spec(&self) -> RecSpec {
        let equations = self.equations.iter().map(|(x, eq)| {
            let prefixes = eq.summands.iter().map(|(a, xi)| {
                ProcessExpr::prefix(
                    a.clone(),
                    ProcessExpr::par_all(xi.iter().cloned().map(ProcessExpr::Ident)),
                )
            });
            let body = if eq.has_one {
                ProcessExpr::sum(std::iter::once(ProcessExpr::Accept).chain(prefixes))
            } else {
                ProcessExpr::sum(prefixes)
            };
            (x.clone(), body)
        });
        RecSpec::new(
            self.name.clone(),
            equations,
            self.initial.clone(),
            self.data.iter().cloned(),
            self.ports.iter().cloned(),
            self.priority.clone(),
        )
        .expect("normal form references only defined identifiers")
    }

    /// Expression denoting an identifier under the global wrapper.
    pub fn identifier_expr(&self, x: &Identifier) -> ProcessExpr {
        let base = ProcessExpr::Ident(x.clone());
        if self.priority.is_some() {
            ProcessExpr::theta(base)
        } else {
            base
        }
    }

    pub fn root_expr(&self) -> ProcessExpr {
        self.identifier_expr(&self.initial)
    }
}

const FRESH_LIMIT: usize = 512;

pub fn to_gnf(spec: &RecSpec) -> Result<GnfSpec, GnfError> {
    let mut component_names: BTreeMap<String, Identifier> = BTreeMap::new();
    let mut named_components: BTreeMap<Identifier, ProcessExpr> = BTreeMap::new();
    let mut equations: BTreeMap<Identifier, GnfEquation> = BTreeMap::new();
    let mut worklist: VecDeque<(Identifier, ProcessExpr)> = VecDeque::new();
    let mut fresh_counter = 0usize;

    for x in spec.equations().keys() {
        let expr = ProcessExpr::Ident(x.clone());
        component_names.insert(canonical_key(&expr), x.clone());
        worklist.push_back((x.clone(), expr));
    }

    while let Some((name, expr)) = worklist.pop_front() {
        let hnf = head_normal_form(spec, &expr)?;
        let mut summands = Vec::new();
        for (label, target) in &hnf.summands {
            let mut names = Vec::new();
            for component in decompose(target) {
                let key = canonical_key(&component);
                let ident = match component_names.get(&key) {
                    Some(existing) => existing.clone(),
                    None => {
                        if named_components.len() >= FRESH_LIMIT {
                            return Err(GnfError::VocabularyDiverged { limit: FRESH_LIMIT });
                        }
                        let fresh = loop {
                            let candidate = Identifier::new(format!("G{}", fresh_counter));
                            fresh_counter += 1;
                            if !spec.equations().contains_key(&candidate) {
                                break candidate;
                            }
                        };
                        component_names.insert(key, fresh.clone());
                        named_components.insert(fresh.clone(), component.clone());
                        worklist.push_back((fresh.clone(), component));
                        fresh
                    }
                };
                names.push(ident);
            }
            names.sort();
            summands.push((label.clone(), names));
        }
        summands.sort();
        summands.dedup();
        equations.insert(name, GnfEquation { has_one: hnf.has_one, summands });
    }

    Ok(GnfSpec {
        name: spec.name().to_string(),
        equations,
        initial: spec.initial().clone(),
        priority: spec.priority().cloned(),
        data: spec.data().clone(),
        ports: spec.ports().clone(),
        named_components,
    })
}

/// Parallel components of a summand target: `||` flattened, `1` units
/// dropped, `theta` absorbed into the global wrapper. Anything else is one
/// opaque component.
fn decompose(target: &ProcessExpr) -> Vec<ProcessExpr> {
    fn go(expr: &ProcessExpr, out: &mut Vec<ProcessExpr>) {
        match expr {
            ProcessExpr::Accept => {}
            ProcessExpr::Parallel(p, q) => {
                go(p, out);
                go(q, out);
            }
            ProcessExpr::Priority(p) => go(p, out),
            other => out.push(other.clone()),
        }
    }
    let mut out = Vec::new();
    go(&canonical(target), &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{bounded_game, Relation};
    use crate::lts::{explore, Budget};
    use ProcessExpr as E;

    fn plain(name: &str) -> ActionLabel {
        ActionLabel::plain(name)
    }

    /// S = 1 + a.(S || B) + c.(S || D); B = b.1; D = 1 + d.1
    pub(crate) fn large_example() -> RecSpec {
        RecSpec::new(
            "Large",
            [
                (
                    Identifier::new("S"),
                    E::sum([
                        E::Accept,
                        E::prefix(plain("a"), E::parallel(E::ident("S"), E::ident("B"))),
                        E::prefix(plain("c"), E::parallel(E::ident("S"), E::ident("D"))),
                    ]),
                ),
                (Identifier::new("B"), E::prefix(plain("b"), E::Accept)),
                (
                    Identifier::new("D"),
                    E::choice(E::Accept, E::prefix(plain("d"), E::Accept)),
                ),
            ],
            Identifier::new("S"),
            [],
            [],
            None,
        )
        .unwrap()
    }

    #[test]
    fn ac_gets_one_fresh_component() {
        let gnf = to_gnf(&super::super::ac()).unwrap();
        assert_eq!(gnf.equations.len(), 2);
        let ac = &gnf.equations[&Identifier::new("AC")];
        assert!(ac.has_one);
        assert_eq!(ac.summands.len(), 1);
        let (label, xi) = &ac.summands[0];
        assert_eq!(label, &plain("a"));
        assert_eq!(xi.len(), 2);
        assert!(xi.contains(&Identifier::new("AC")));
        let fresh = &gnf.named_components[&Identifier::new("G0")];
        assert_eq!(
            fresh,
            &E::choice(E::Accept, E::prefix(plain("b"), E::Accept))
        );
    }

    #[test]
    fn gnf_input_is_unchanged_modulo_naming() {
        let gnf = to_gnf(&large_example()).unwrap();
        assert!(gnf.named_components.is_empty());
        assert_eq!(gnf.accepting_identifiers().len(), 2); // S and D
        assert_eq!(
            gnf.non_accepting_identifiers(),
            [Identifier::new("B")].into_iter().collect()
        );
        let s = &gnf.equations[&Identifier::new("S")];
        assert_eq!(s.summands.len(), 2);
    }

    #[test]
    fn tau_loop_is_already_normal() {
        let spec = RecSpec::single("t", "X", E::prefix(ActionLabel::tau(), E::ident("X")));
        let gnf = to_gnf(&spec).unwrap();
        let x = &gnf.equations[&Identifier::new("X")];
        assert!(!x.has_one);
        assert_eq!(x.summands, vec![(ActionLabel::tau(), vec![Identifier::new("X")])]);
    }

    #[test]
    fn theta_is_absorbed_with_global_wrapper() {
        let gnf = to_gnf(&super::super::abag(&["d"])).unwrap();
        assert!(gnf.priority.is_some());
        let bag = &gnf.equations[&Identifier::new("ABag")];
        // ins(d) and show(-d) summands
        assert_eq!(bag.summands.len(), 2);
        for (_, xi) in &bag.summands {
            for ident in xi {
                assert!(gnf.equations.contains_key(ident));
            }
        }
    }

    #[test]
    fn gnf_preserves_bounded_strong_bisimilarity() {
        for spec in [super::super::ac(), super::super::ec(), large_example()] {
            let gnf = to_gnf(&spec).unwrap();
            let gnf_spec = gnf.to_rec_spec();
            for x in spec.equations().keys() {
                let budget = Budget::new(3000, 6);
                let left =
                    explore(&spec.semantics(ProcessExpr::Ident(x.clone())), budget).unwrap();
                let right =
                    explore(&gnf_spec.semantics(gnf.identifier_expr(x)), budget).unwrap();
                let verdict =
                    bounded_game(&left, left.root(), &right, right.root(), Relation::Strong, 6);
                assert!(
                    verdict.is_equivalent(),
                    "{}: identifier {} not preserved\n{}",
                    spec.name(),
                    x,
                    verdict.report()
                );
            }
        }
    }
}
