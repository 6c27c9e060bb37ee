//! Head normal form: `p` is strongly bisimilar to `(1 +) sum a_i . p_i`
//! where the summands are exactly the derivable steps of `p`. Computing the
//! step set (including the expansion of parallel compositions and
//! communication) therefore is the head normal form computation.

use super::sos::{sos_step, SosError};
use super::{ActionLabel, ProcessExpr, RecSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub has_one: bool,
    pub summands: Vec<(ActionLabel, ProcessExpr)>,
}

impl Hnf {
    /// `(1 +) sum a_i . p_i`, with `0` for the empty non-accepting form.
    pub fn to_expr(&self) -> ProcessExpr {
        let prefixes = self
            .summands
            .iter()
            .map(|(a, p)| ProcessExpr::prefix(a.clone(), p.clone()));
        if self.has_one {
            ProcessExpr::sum(std::iter::once(ProcessExpr::Accept).chain(prefixes))
        } else {
            ProcessExpr::sum(prefixes)
        }
    }
}

pub fn head_normal_form(spec: &RecSpec, expr: &ProcessExpr) -> Result<Hnf, SosError> {
    let steps = sos_step(spec, expr)?;
    Ok(Hnf { has_one: steps.accepting, summands: steps.steps.into_iter().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{bounded_game, Relation};
    use crate::lts::{explore, Budget};
    use ProcessExpr as E;

    fn label(name: &str) -> ActionLabel {
        ActionLabel::plain(name)
    }

    #[test]
    fn constants_have_trivial_hnf() {
        let spec = RecSpec::single("t", "X", E::Accept);
        let dl = head_normal_form(&spec, &E::Deadlock).unwrap();
        assert!(!dl.has_one);
        assert!(dl.summands.is_empty());
        let one = head_normal_form(&spec, &E::Accept).unwrap();
        assert!(one.has_one);
        assert!(one.summands.is_empty());
    }

    #[test]
    fn ac_hnf() {
        let spec = super::super::ac();
        let hnf = head_normal_form(&spec, &spec.initial_expr()).unwrap();
        assert!(hnf.has_one);
        assert_eq!(hnf.summands.len(), 1);
        assert_eq!(hnf.summands[0].0, label("a"));
    }

    #[test]
    fn interleaving_expansion() {
        // a.1 || b.1 expands to a.(1 || b.1) + b.(a.1 || 1)
        let spec = RecSpec::single("t", "X", E::Accept);
        let expr = E::parallel(
            E::prefix(label("a"), E::Accept),
            E::prefix(label("b"), E::Accept),
        );
        let hnf = head_normal_form(&spec, &expr).unwrap();
        assert!(!hnf.has_one);
        let labels: Vec<_> = hnf.summands.iter().map(|(l, _)| l.clone()).collect();
        assert_eq!(labels, vec![label("a"), label("b")]);
    }

    #[test]
    fn hnf_is_strongly_bisimilar_to_original() {
        let spec = super::super::ac();
        let original = spec.initial_expr();
        let hnf_expr = head_normal_form(&spec, &original).unwrap().to_expr();
        let budget = Budget::new(400, 6);
        let left = explore(&spec.semantics(original), budget).unwrap();
        let right = explore(&spec.semantics(hnf_expr), budget).unwrap();
        let verdict = bounded_game(
            &left,
            left.root(),
            &right,
            right.root(),
            Relation::Strong,
            6,
        );
        assert!(verdict.is_equivalent(), "{}", verdict.report());
    }
}
