//! The step function on process expressions.
//!
//! Negative premises (the priority filter and failed gets) are evaluated in
//! two phases: the complete positive step set of the subterm is computed
//! first and then filtered, which is well defined for weakly guarded
//! specifications. Identifier unfolding is tracked: an identifier hit again
//! while its own unfolding is in progress means the evaluation recursed
//! through an unguarded cycle, which is an error in strict mode and a
//! truncation point in budgeted mode.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::foundations::{ActionLabel, Arg, Polarity};

use super::{Identifier, ProcessExpr, RecSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SosError {
    #[error("evaluation recursed through an unguarded identifier cycle: {}", cycle.join(" -> "))]
    UnguardedCycle { cycle: Vec<String> },
}

/// One state's acceptance and complete derivable step set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSet {
    pub accepting: bool,
    pub steps: BTreeSet<(ActionLabel, ProcessExpr)>,
    /// True when a budgeted evaluation cut an identifier unfolding, so the
    /// set may be incomplete.
    pub truncated: bool,
}

impl StepSet {
    fn new() -> StepSet {
        StepSet { accepting: false, steps: BTreeSet::new(), truncated: false }
    }

    pub fn labels(&self) -> BTreeSet<ActionLabel> {
        self.steps.iter().map(|(l, _)| l.clone()).collect()
    }
}

enum Policy {
    Strict,
    Budget(usize),
}

struct Eval<'a> {
    spec: &'a RecSpec,
    policy: Policy,
    unfolding: Vec<Identifier>,
    used: usize,
}

/// The derivable steps and acceptance of `expr` under `spec`. Unguarded
/// identifier cycles are reported as errors.
pub fn sos_step(spec: &RecSpec, expr: &ProcessExpr) -> Result<StepSet, SosError> {
    Eval { spec, policy: Policy::Strict, unfolding: Vec::new(), used: 0 }.eval(expr)
}

/// Like `sos_step`, but instead of failing on unguarded recursion the
/// evaluation lazily unfolds identifiers up to `budget` times in total and
/// then cuts, marking the result truncated.
pub fn sos_step_bounded(spec: &RecSpec, expr: &ProcessExpr, budget: usize) -> StepSet {
    Eval { spec, policy: Policy::Budget(budget), unfolding: Vec::new(), used: 0 }
        .eval(expr)
        .expect("budgeted evaluation cannot fail")
}

impl Eval<'_> {
    fn eval(&mut self, expr: &ProcessExpr) -> Result<StepSet, SosError> {
        match expr {
            ProcessExpr::Deadlock => Ok(StepSet::new()),
            ProcessExpr::Accept => {
                Ok(StepSet { accepting: true, steps: BTreeSet::new(), truncated: false })
            }
            ProcessExpr::Prefix(label, p) => {
                let mut out = StepSet::new();
                out.steps.insert((label.clone(), (**p).clone()));
                Ok(out)
            }
            ProcessExpr::Choice(p, q) => {
                let sp = self.eval(p)?;
                let sq = self.eval(q)?;
                Ok(StepSet {
                    accepting: sp.accepting || sq.accepting,
                    steps: sp.steps.into_iter().chain(sq.steps).collect(),
                    truncated: sp.truncated || sq.truncated,
                })
            }
            ProcessExpr::Parallel(p, q) => {
                let sp = self.eval(p)?;
                let sq = self.eval(q)?;
                let mut out = StepSet {
                    accepting: sp.accepting && sq.accepting,
                    steps: BTreeSet::new(),
                    truncated: sp.truncated || sq.truncated,
                };
                for (a, p2) in &sp.steps {
                    out.steps
                        .insert((a.clone(), ProcessExpr::parallel(p2.clone(), (**q).clone())));
                }
                for (a, q2) in &sq.steps {
                    out.steps
                        .insert((a.clone(), ProcessExpr::parallel((**p).clone(), q2.clone())));
                }
                for (a, p2) in &sp.steps {
                    for (b, q2) in &sq.steps {
                        if let Some(comm) = handshake(a, b) {
                            out.steps
                                .insert((comm, ProcessExpr::parallel(p2.clone(), q2.clone())));
                        }
                    }
                }
                // failed gets: c??-d fires as cxd only when the other
                // component offers no matching send
                for (a, p2) in &sp.steps {
                    if let Some(failed) = failed_get_label(a, &sq) {
                        out.steps
                            .insert((failed, ProcessExpr::parallel(p2.clone(), (**q).clone())));
                    }
                }
                for (b, q2) in &sq.steps {
                    if let Some(failed) = failed_get_label(b, &sp) {
                        out.steps
                            .insert((failed, ProcessExpr::parallel((**p).clone(), q2.clone())));
                    }
                }
                Ok(out)
            }
            ProcessExpr::Ident(x) => {
                match self.policy {
                    Policy::Strict => {
                        if self.unfolding.contains(x) {
                            let mut cycle: Vec<String> = self
                                .unfolding
                                .iter()
                                .map(|i| i.name().to_string())
                                .collect();
                            cycle.push(x.name().to_string());
                            return Err(SosError::UnguardedCycle { cycle });
                        }
                    }
                    Policy::Budget(limit) => {
                        if self.used >= limit {
                            let mut out = StepSet::new();
                            out.truncated = true;
                            return Ok(out);
                        }
                        self.used += 1;
                    }
                }
                let body = self
                    .spec
                    .body(x)
                    .unwrap_or_else(|| panic!("undefined identifier {x} in validated spec"))
                    .clone();
                self.unfolding.push(x.clone());
                let result = self.eval(&body);
                self.unfolding.pop();
                result
            }
            ProcessExpr::Priority(p) => {
                let sp = self.eval(p)?;
                let steps = match self.spec.priority() {
                    None => sp.steps,
                    Some(order) => {
                        let enabled = sp.labels();
                        let maximal = crate::foundations::maximal_labels(&enabled, order);
                        sp.steps
                            .into_iter()
                            .filter(|(l, _)| maximal.contains(l))
                            .collect()
                    }
                };
                Ok(StepSet {
                    accepting: sp.accepting,
                    steps: steps
                        .into_iter()
                        .map(|(l, t)| (l, ProcessExpr::theta(t)))
                        .collect(),
                    truncated: sp.truncated,
                })
            }
            ProcessExpr::Rename(f, p) => {
                let sp = self.eval(p)?;
                Ok(StepSet {
                    accepting: sp.accepting,
                    steps: sp
                        .steps
                        .into_iter()
                        .map(|(l, t)| (f.apply(&l), ProcessExpr::rename(f.clone(), t)))
                        .collect(),
                    truncated: sp.truncated,
                })
            }
            ProcessExpr::Encapsulate(ports, p) => {
                let sp = self.eval(p)?;
                Ok(StepSet {
                    accepting: sp.accepting,
                    steps: sp
                        .steps
                        .into_iter()
                        .filter(|(l, _)| !ports.iter().any(|c| l.is_com_on(c)))
                        .map(|(l, t)| (l, ProcessExpr::encap(ports.clone(), t)))
                        .collect(),
                    truncated: sp.truncated,
                })
            }
            ProcessExpr::Hide(ports, p) => {
                let sp = self.eval(p)?;
                Ok(StepSet {
                    accepting: sp.accepting,
                    steps: sp
                        .steps
                        .into_iter()
                        .map(|(l, t)| {
                            let label = if ports.iter().any(|c| l.is_hidden_on(c)) {
                                ActionLabel::tau()
                            } else {
                                l
                            };
                            (label, ProcessExpr::hide(ports.clone(), t))
                        })
                        .collect(),
                    truncated: sp.truncated,
                })
            }
        }
    }
}

/// Successful communication of two labels into `c(d)`: a send against a
/// matching receive, or a send against a matching get.
fn handshake(a: &ActionLabel, b: &ActionLabel) -> Option<ActionLabel> {
    use ActionLabel::*;
    match (a, b) {
        (Send { port: c1, arg }, Receive { port: c2, arg: arg2 })
        | (Receive { port: c2, arg: arg2 }, Send { port: c1, arg })
            if c1 == c2 && arg == arg2 =>
        {
            Some(ActionLabel::comm(c1.clone(), arg.clone()))
        }
        (Send { port: c1, arg }, Get { port: c2, datum })
        | (Get { port: c2, datum }, Send { port: c1, arg })
            if c1 == c2 && *arg == Arg::bare(datum.clone()) =>
        {
            Some(ActionLabel::comm(c1.clone(), arg.clone()))
        }
        _ => None,
    }
}

/// If `a` is a failed get and `other` offers no matching send, the failed
/// communication label it fires as.
fn failed_get_label(a: &ActionLabel, other: &StepSet) -> Option<ActionLabel> {
    let ActionLabel::FailedGet { port, datum } = a else {
        return None;
    };
    let send = ActionLabel::send(port.clone(), Arg { symbol: datum.clone(), polarity: Polarity::Bare });
    if other.steps.iter().any(|(l, _)| *l == send) {
        return None;
    }
    Some(ActionLabel::FailedComm { port: port.clone(), datum: datum.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundations::Port;
    use ProcessExpr as E;

    fn a() -> ActionLabel {
        ActionLabel::plain("a")
    }

    fn b() -> ActionLabel {
        ActionLabel::plain("b")
    }

    #[test]
    fn constants() {
        let spec = RecSpec::single("t", "X", E::Accept);
        let dl = sos_step(&spec, &E::Deadlock).unwrap();
        assert!(!dl.accepting);
        assert!(dl.steps.is_empty());
        let one = sos_step(&spec, &E::Accept).unwrap();
        assert!(one.accepting);
        assert!(one.steps.is_empty());
    }

    #[test]
    fn ac_first_step() {
        let spec = super::super::ac();
        let steps = sos_step(&spec, &spec.initial_expr()).unwrap();
        assert!(steps.accepting);
        assert_eq!(steps.steps.len(), 1);
        let (label, target) = steps.steps.first().unwrap();
        assert_eq!(label, &a());
        // AC || (1 + b . 1)
        assert_eq!(
            target,
            &E::parallel(
                E::ident("AC"),
                E::choice(E::Accept, E::prefix(b(), E::Accept))
            )
        );
    }

    #[test]
    fn choice_is_union_and_acceptance_or() {
        let spec = RecSpec::single("t", "X", E::Accept);
        let p = E::prefix(a(), E::Accept);
        let q = E::choice(E::Accept, E::prefix(b(), E::Deadlock));
        let joint = sos_step(&spec, &E::choice(p.clone(), q.clone())).unwrap();
        let sp = sos_step(&spec, &p).unwrap();
        let sq = sos_step(&spec, &q).unwrap();
        assert_eq!(joint.accepting, sp.accepting || sq.accepting);
        let union: BTreeSet<_> = sp.steps.into_iter().chain(sq.steps).collect();
        assert_eq!(joint.steps, union);
    }

    #[test]
    fn encapsulated_handshake() {
        // encap[l](l!d . 1 || l?d . 1) can only do the communication l(d)
        let l = Port::new("l");
        let d = crate::foundations::DataSymbol::new("d");
        let spec = RecSpec::single("t", "X", E::Accept);
        let expr = E::encap(
            [l.clone()],
            E::parallel(
                E::prefix(ActionLabel::send(l.clone(), Arg::bare(d.clone())), E::Accept),
                E::prefix(ActionLabel::receive(l.clone(), Arg::bare(d.clone())), E::Accept),
            ),
        );
        let steps = sos_step(&spec, &expr).unwrap();
        assert_eq!(steps.steps.len(), 1);
        let (label, _) = steps.steps.first().unwrap();
        assert_eq!(label, &ActionLabel::comm(l, Arg::bare(d)));
    }

    #[test]
    fn unguarded_cycle_is_an_error_and_budget_truncates() {
        let spec = super::super::unguarded_example();
        let root = spec.initial_expr();
        let err = sos_step(&spec, &root).unwrap_err();
        assert!(matches!(err, SosError::UnguardedCycle { .. }));

        // with a budget, X exhibits one a-successor per unfolding
        let steps = sos_step_bounded(&spec, &root, 7);
        assert!(steps.truncated);
        let a_targets: BTreeSet<String> = steps
            .steps
            .iter()
            .filter(|(l, _)| *l == a())
            .map(|(_, t)| super::super::canonical_key(t))
            .collect();
        assert!(a_targets.len() >= 5, "got {:?}", a_targets);
    }

    #[test]
    fn failed_get_fires_only_without_matching_send() {
        let c = Port::new("c");
        let d = crate::foundations::DataSymbol::new("d");
        let spec = RecSpec::single("t", "X", E::Accept);
        let getter = E::prefix(ActionLabel::failed_get(c.clone(), d.clone()), E::Accept);
        // against a sender: no failed communication
        let sender = E::prefix(ActionLabel::send(c.clone(), Arg::bare(d.clone())), E::Accept);
        let steps = sos_step(&spec, &E::parallel(getter.clone(), sender)).unwrap();
        assert!(steps
            .steps
            .iter()
            .all(|(l, _)| !matches!(l, ActionLabel::FailedComm { .. })));
        // against an idle partner: the failed communication fires
        let steps = sos_step(&spec, &E::parallel(getter, E::Accept)).unwrap();
        assert!(steps
            .steps
            .iter()
            .any(|(l, _)| matches!(l, ActionLabel::FailedComm { .. })));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let spec = super::super::abag(&["d", "e"]);
        let root = spec.initial_expr();
        let s1 = sos_step(&spec, &root).unwrap();
        let s2 = sos_step(&spec, &root).unwrap();
        assert_eq!(s1, s2);
    }
}
