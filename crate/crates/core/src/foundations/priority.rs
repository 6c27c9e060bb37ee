use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::label::ActionLabel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PriorityError {
    #[error("tau may never have lower priority than another action (tau < {0})")]
    TauBelow(ActionLabel),
    #[error("declared order requires {lower} < tau because {lower} < {upper} holds")]
    MissingTauPair { lower: ActionLabel, upper: ActionLabel },
    #[error("order is not irreflexive: {0} < {0} after transitive closure")]
    Reflexive(ActionLabel),
}

/// A strict partial order on action labels, `a < b` meaning `a` has lower
/// priority.
///
/// The order is closed transitively at construction and the side conditions
/// are enforced eagerly: `tau < a` never holds, and whenever `a < b` for a
/// visible `b` the pair `a < tau` must also be declared. A declared order
/// missing `a < tau` is rejected rather than silently completed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PriorityOrder {
    pairs: BTreeSet<(ActionLabel, ActionLabel)>,
}

impl PriorityOrder {
    pub fn empty() -> Self {
        PriorityOrder::default()
    }

    pub fn new(
        declared: impl IntoIterator<Item = (ActionLabel, ActionLabel)>,
    ) -> Result<Self, PriorityError> {
        let mut pairs: BTreeSet<(ActionLabel, ActionLabel)> = declared.into_iter().collect();
        // transitive closure
        loop {
            let mut added = Vec::new();
            for (a, b) in &pairs {
                for (b2, c) in &pairs {
                    if b == b2 && !pairs.contains(&(a.clone(), c.clone())) {
                        added.push((a.clone(), c.clone()));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            pairs.extend(added);
        }
        for (a, b) in &pairs {
            if a.is_tau() {
                return Err(PriorityError::TauBelow(b.clone()));
            }
            if a == b {
                return Err(PriorityError::Reflexive(a.clone()));
            }
            if !b.is_tau() && !pairs.contains(&(a.clone(), ActionLabel::tau())) {
                return Err(PriorityError::MissingTauPair {
                    lower: a.clone(),
                    upper: b.clone(),
                });
            }
        }
        Ok(PriorityOrder { pairs })
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True when `a < b` holds in the closed order.
    pub fn less(&self, a: &ActionLabel, b: &ActionLabel) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(ActionLabel, ActionLabel)> {
        self.pairs.iter()
    }
}

impl fmt::Display for PriorityOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, b) in &self.pairs {
            if !first {
                f.write_str(", ")?;
            }
            write!(f, "{} < {}", a, b)?;
            first = false;
        }
        Ok(())
    }
}

/// The labels of `enabled` that are maximal under `order`: exactly those `a`
/// with no `b` in `enabled` such that `a < b`.
pub fn maximal_labels(
    enabled: &BTreeSet<ActionLabel>,
    order: &PriorityOrder,
) -> BTreeSet<ActionLabel> {
    enabled
        .iter()
        .filter(|a| !enabled.iter().any(|b| order.less(a, b)))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundations::{Arg, DataSymbol};

    fn show_minus_d() -> ActionLabel {
        ActionLabel::plain_arg("show", Arg::minus(DataSymbol::new("d")))
    }

    fn rem_d() -> ActionLabel {
        ActionLabel::plain_arg("rem", Arg::bare(DataSymbol::new("d")))
    }

    #[test]
    fn bag_order_is_accepted() {
        let order = PriorityOrder::new([
            (show_minus_d(), rem_d()),
            (show_minus_d(), ActionLabel::tau()),
        ]);
        assert!(order.is_ok());
        let order = order.unwrap();
        assert!(order.less(&show_minus_d(), &rem_d()));
        assert!(!order.less(&rem_d(), &show_minus_d()));
    }

    #[test]
    fn tau_is_never_lower() {
        let err = PriorityOrder::new([(ActionLabel::tau(), ActionLabel::plain("a"))]);
        assert_eq!(err, Err(PriorityError::TauBelow(ActionLabel::plain("a"))));
    }

    #[test]
    fn missing_tau_pair_is_rejected() {
        let err = PriorityOrder::new([(ActionLabel::plain("a"), ActionLabel::plain("b"))]);
        assert_eq!(
            err,
            Err(PriorityError::MissingTauPair {
                lower: ActionLabel::plain("a"),
                upper: ActionLabel::plain("b"),
            })
        );
    }

    #[test]
    fn closure_is_stable() {
        let a = ActionLabel::plain("a");
        let b = ActionLabel::plain("b");
        let c = ActionLabel::plain("c");
        let order = PriorityOrder::new([
            (a.clone(), b.clone()),
            (b.clone(), c.clone()),
            (a.clone(), ActionLabel::tau()),
            (b.clone(), ActionLabel::tau()),
        ])
        .unwrap();
        assert!(order.less(&a, &c));
        // feeding the closed pairs back in re-validates
        let again = PriorityOrder::new(order.pairs().cloned().collect::<Vec<_>>()).unwrap();
        assert_eq!(again, order);
    }

    #[test]
    fn cyclic_order_is_rejected() {
        let a = ActionLabel::plain("a");
        let b = ActionLabel::plain("b");
        let err = PriorityOrder::new([
            (a.clone(), b.clone()),
            (b.clone(), a.clone()),
            (a.clone(), ActionLabel::tau()),
            (b.clone(), ActionLabel::tau()),
        ]);
        assert!(matches!(err, Err(PriorityError::Reflexive(_))));
    }

    #[test]
    fn maximal_labels_filters_dominated() {
        let order = PriorityOrder::new([
            (show_minus_d(), rem_d()),
            (show_minus_d(), ActionLabel::tau()),
        ])
        .unwrap();
        let enabled: BTreeSet<_> = [rem_d(), show_minus_d()].into_iter().collect();
        let max = maximal_labels(&enabled, &order);
        assert_eq!(max, [rem_d()].into_iter().collect());

        let lone: BTreeSet<_> = [show_minus_d()].into_iter().collect();
        assert_eq!(maximal_labels(&lone, &order), lone);
    }

    #[test]
    fn maximal_labels_keeps_incomparable() {
        let a = ActionLabel::plain("a");
        let b = ActionLabel::plain("b");
        let c = ActionLabel::plain("c");
        let order = PriorityOrder::new([
            (c.clone(), b.clone()),
            (c.clone(), a.clone()),
            (c.clone(), ActionLabel::tau()),
        ])
        .unwrap();
        let enabled: BTreeSet<_> = [a.clone(), b.clone(), c.clone()].into_iter().collect();
        let max = maximal_labels(&enabled, &order);
        assert_eq!(max, [a, b].into_iter().collect());
    }

    #[test]
    fn maximal_labels_properties() {
        let order = PriorityOrder::new([
            (show_minus_d(), rem_d()),
            (show_minus_d(), ActionLabel::tau()),
        ])
        .unwrap();
        let enabled: BTreeSet<_> =
            [rem_d(), show_minus_d(), ActionLabel::plain("x")].into_iter().collect();
        let max = maximal_labels(&enabled, &order);
        assert!(max.is_subset(&enabled));
        assert_eq!(maximal_labels(&max, &order), max); // idempotent
        assert_eq!(maximal_labels(&enabled, &PriorityOrder::empty()), enabled);
    }
}
