//! Guardedness analysis.
//!
//! A specification is weakly guarded when every identifier occurrence in
//! every defining equation sits inside the scope of an action prefix (tau
//! allowed), and strongly guarded when a visible prefix is required.

use std::fmt;

use super::{Identifier, ProcessExpr, RecSpec};

/// Where an identifier occurrence sits inside an equation body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceWitness {
    pub equation: Identifier,
    pub occurrence: Identifier,
    pub path: Vec<String>,
}

impl fmt::Display for OccurrenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "`{}` in the equation for {} ({})",
            self.occurrence,
            self.equation,
            self.path.join(", ")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guardedness {
    StronglyGuarded,
    /// Some occurrence is guarded only by tau prefixes.
    WeaklyGuarded { witness: OccurrenceWitness },
    /// Some occurrence is under no prefix at all.
    Unguarded { witness: OccurrenceWitness },
}

impl Guardedness {
    pub fn is_weakly_guarded(&self) -> bool {
        !matches!(self, Guardedness::Unguarded { .. })
    }
}

impl fmt::Display for Guardedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guardedness::StronglyGuarded => f.write_str("strongly guarded"),
            Guardedness::WeaklyGuarded { witness } => {
                write!(f, "weakly guarded (tau-guarded occurrence: {})", witness)
            }
            Guardedness::Unguarded { witness } => {
                write!(f, "unguarded (unguarded occurrence: {})", witness)
            }
        }
    }
}

pub fn check_guardedness(spec: &RecSpec) -> Guardedness {
    let mut weak_witness: Option<OccurrenceWitness> = None;
    for (x, body) in spec.equations() {
        let mut path = Vec::new();
        if let Some(result) =
            walk(x, body, false, false, &mut path, &mut weak_witness)
        {
            return result;
        }
    }
    match weak_witness {
        Some(witness) => Guardedness::WeaklyGuarded { witness },
        None => Guardedness::StronglyGuarded,
    }
}

/// Returns Some(Unguarded) as soon as a bare occurrence is found; remembers
/// the first tau-only-guarded occurrence on the side.
fn walk(
    equation: &Identifier,
    expr: &ProcessExpr,
    under_prefix: bool,
    under_visible: bool,
    path: &mut Vec<String>,
    weak: &mut Option<OccurrenceWitness>,
) -> Option<Guardedness> {
    match expr {
        ProcessExpr::Deadlock | ProcessExpr::Accept => None,
        ProcessExpr::Ident(y) => {
            let witness = OccurrenceWitness {
                equation: equation.clone(),
                occurrence: y.clone(),
                path: if path.is_empty() { vec!["at top level".into()] } else { path.clone() },
            };
            if !under_prefix {
                return Some(Guardedness::Unguarded { witness });
            }
            if !under_visible && weak.is_none() {
                *weak = Some(witness);
            }
            None
        }
        ProcessExpr::Prefix(label, p) => {
            path.push(format!("under {}", label));
            let result = walk(
                equation,
                p,
                true,
                under_visible || !label.is_tau(),
                path,
                weak,
            );
            path.pop();
            result
        }
        ProcessExpr::Choice(p, q) => {
            for (i, sub) in [p, q].into_iter().enumerate() {
                path.push(format!("summand {}", i + 1));
                let result = walk(equation, sub, under_prefix, under_visible, path, weak);
                path.pop();
                if result.is_some() {
                    return result;
                }
            }
            None
        }
        ProcessExpr::Parallel(p, q) => {
            for (i, sub) in [p, q].into_iter().enumerate() {
                path.push(format!("parallel component {}", i + 1));
                let result = walk(equation, sub, under_prefix, under_visible, path, weak);
                path.pop();
                if result.is_some() {
                    return result;
                }
            }
            None
        }
        ProcessExpr::Priority(p) => scoped(equation, p, "under theta", under_prefix, under_visible, path, weak),
        ProcessExpr::Rename(_, p) => scoped(equation, p, "under rho", under_prefix, under_visible, path, weak),
        ProcessExpr::Encapsulate(_, p) => {
            scoped(equation, p, "under encap", under_prefix, under_visible, path, weak)
        }
        ProcessExpr::Hide(_, p) => {
            scoped(equation, p, "under hide", under_prefix, under_visible, path, weak)
        }
    }
}

fn scoped(
    equation: &Identifier,
    p: &ProcessExpr,
    what: &str,
    under_prefix: bool,
    under_visible: bool,
    path: &mut Vec<String>,
    weak: &mut Option<OccurrenceWitness>,
) -> Option<Guardedness> {
    path.push(what.to_string());
    let result = walk(equation, p, under_prefix, under_visible, path, weak);
    path.pop();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundations::ActionLabel;
    use ProcessExpr as E;

    #[test]
    fn ac_is_strongly_guarded() {
        assert_eq!(check_guardedness(&super::super::ac()), Guardedness::StronglyGuarded);
    }

    #[test]
    fn unguarded_example_has_bare_witness() {
        let spec = super::super::unguarded_example();
        match check_guardedness(&spec) {
            Guardedness::Unguarded { witness } => {
                assert_eq!(witness.occurrence, Identifier::new("X"));
                assert!(witness.path.iter().any(|p| p.contains("summand 2")), "{witness}");
            }
            other => panic!("expected unguarded, got {other:?}"),
        }
    }

    #[test]
    fn tau_guard_is_weak_but_not_strong() {
        let spec = RecSpec::single(
            "t",
            "X",
            E::prefix(ActionLabel::tau(), E::ident("X")),
        );
        assert!(matches!(check_guardedness(&spec), Guardedness::WeaklyGuarded { .. }));
    }

    #[test]
    fn visible_prefix_above_tau_is_strong() {
        let spec = RecSpec::single(
            "t",
            "X",
            E::prefix(
                ActionLabel::plain("a"),
                E::prefix(ActionLabel::tau(), E::ident("X")),
            ),
        );
        assert_eq!(check_guardedness(&spec), Guardedness::StronglyGuarded);
    }
}
