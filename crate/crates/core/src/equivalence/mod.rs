//! Deciding strong, branching and divergence-preserving branching
//! bisimilarity on finite fragments, with witnesses and truncation-aware
//! verdicts.
//!
//! Two engines are provided. `refine` runs signature-based partition
//! refinement and is the primary decision procedure; `game` runs a
//! brute-force coinductive closure over state pairs (and a bounded
//! attacker/defender game) and serves as the independent oracle.
//!
//! Horizon states are incompletely observed, so the verdicts are
//! three-valued. Refinement keeps all horizon states in one frozen block
//! never merged with interior blocks; a pair of roots in the same block is
//! `equivalent` at the explored truncation. When refinement separates the
//! roots, the pair closure is re-run with horizon states treated as
//! compatible with everything: only a distinction that survives — one whose
//! witness never traverses a horizon state — is reported `inequivalent`;
//! otherwise the verdict is `inconclusive-at-horizon`.

mod game;
mod refine;
mod witness;

pub use game::{bounded_game, closure, Closure};
pub use refine::{refine, Partition};
pub use witness::{Witness, WitnessReason};

use std::fmt;

use crate::lts::{LtsFragment, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relation {
    Strong,
    Branching,
    Dpbb,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Strong => "strong",
            Relation::Branching => "branching",
            Relation::Dpbb => "dpbb",
        })
    }
}

impl std::str::FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Relation::Strong),
            "branching" => Ok(Relation::Branching),
            "dpbb" => Ok(Relation::Dpbb),
            other => Err(format!("unknown relation `{}` (strong, branching, dpbb)", other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Equivalent,
    Inequivalent(Witness),
    InconclusiveAtHorizon,
}

/// Outcome of one equivalence check, together with the relation used and the
/// block count of the final partition.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub relation: Relation,
    pub result: CheckResult,
    pub blocks: usize,
    /// Truncation parameters of the explored inputs, for the report.
    pub params: String,
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self.result, CheckResult::Equivalent)
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self.result, CheckResult::Inequivalent(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.result, CheckResult::InconclusiveAtHorizon)
    }

    pub fn with_params(mut self, params: impl Into<String>) -> Verdict {
        self.params = params.into();
        self
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.result {
            CheckResult::Inequivalent(w) => Some(w),
            _ => None,
        }
    }

    /// Structured text report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("relation: {}\n", self.relation));
        if !self.params.is_empty() {
            out.push_str(&format!("parameters: {}\n", self.params));
        }
        match &self.result {
            CheckResult::Equivalent => out.push_str("result: equivalent\n"),
            CheckResult::Inequivalent(w) => {
                out.push_str("result: inequivalent\n");
                out.push_str(&format!("witness: {}\n", w));
            }
            CheckResult::InconclusiveAtHorizon => {
                out.push_str("result: inconclusive-at-horizon\n")
            }
        }
        if self.blocks > 0 {
            out.push_str(&format!("blocks: {}\n", self.blocks));
        }
        out
    }
}

/// Checks two states of one fragment under the selected relation.
pub fn check_states(
    fragment: &LtsFragment,
    s: StateId,
    t: StateId,
    relation: Relation,
) -> Verdict {
    let partition = refine(fragment, relation);
    let blocks = partition.blocks;
    if fragment.horizon(s) || fragment.horizon(t) {
        return Verdict {
            relation,
            result: CheckResult::InconclusiveAtHorizon,
            blocks,
            params: String::new(),
        };
    }
    if partition.block_of[s.0] == partition.block_of[t.0] {
        return Verdict { relation, result: CheckResult::Equivalent, blocks, params: String::new() };
    }
    // Distinguished by refinement; confirm against unknown horizon
    // behaviour and extract a witness.
    let closure = closure(fragment, relation);
    let result = if closure.related(s, t) {
        CheckResult::InconclusiveAtHorizon
    } else {
        CheckResult::Inequivalent(closure.explain(fragment, s, t))
    };
    Verdict { relation, result, blocks, params: String::new() }
}

/// Checks the roots of two fragments on their disjoint union.
pub fn check_fragments(a: &LtsFragment, b: &LtsFragment, relation: Relation) -> Verdict {
    let (union, root_a, root_b) = LtsFragment::disjoint_union(a, b);
    check_states(&union, root_a, root_b, relation)
}

pub fn strong_bisim(fragment: &LtsFragment, s: StateId, t: StateId) -> Verdict {
    check_states(fragment, s, t, Relation::Strong)
}

pub fn branching_bisim(fragment: &LtsFragment, s: StateId, t: StateId) -> Verdict {
    check_states(fragment, s, t, Relation::Branching)
}

pub fn dpbb(fragment: &LtsFragment, s: StateId, t: StateId) -> Verdict {
    check_states(fragment, s, t, Relation::Dpbb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundations::ActionLabel;
    use crate::lts::LtsFragment;

    fn a() -> ActionLabel {
        ActionLabel::plain("a")
    }

    fn b() -> ActionLabel {
        ActionLabel::plain("b")
    }

    fn tau() -> ActionLabel {
        ActionLabel::tau()
    }

    fn frag(states: &[(&str, bool)], edges: &[(usize, ActionLabel, usize)]) -> LtsFragment {
        LtsFragment::build(
            states.iter().map(|(k, acc)| (k.to_string(), *acc)).collect(),
            edges.to_vec(),
        )
    }

    #[test]
    fn reflexive() {
        let f = frag(&[("x", true)], &[(0, a(), 0)]);
        for relation in [Relation::Strong, Relation::Branching, Relation::Dpbb] {
            assert!(check_states(&f, StateId(0), StateId(0), relation).is_equivalent());
        }
        let v = bounded_game(&f, StateId(0), &f, StateId(0), Relation::Strong, 5);
        assert!(v.is_equivalent());
    }

    #[test]
    fn missing_action_witness() {
        // a.1 + b.1 vs a.1
        let f = frag(
            &[("p", false), ("q", false), ("done1", true), ("done2", true)],
            &[(0, a(), 2), (0, b(), 2), (1, a(), 3)],
        );
        let v = strong_bisim(&f, StateId(0), StateId(1));
        let w = v.witness().expect("inequivalent");
        assert!(w.mentions(&b()), "witness should mention b: {w}");
    }

    #[test]
    fn inert_tau_loop_is_branching_but_not_dpbb() {
        // u: tau self-loop plus a; u2: only a
        let f = frag(
            &[("u", false), ("u2", false), ("v", true)],
            &[(0, tau(), 0), (0, a(), 2), (1, a(), 2)],
        );
        assert!(branching_bisim(&f, StateId(0), StateId(1)).is_equivalent());
        let v = dpbb(&f, StateId(0), StateId(1));
        let w = v.witness().expect("dpbb distinguishes the divergence");
        assert_eq!(w.reason, WitnessReason::DivergenceMismatch);
    }

    #[test]
    fn acceptance_after_a_distinguishes() {
        // a.1 vs a.0: acceptance after a differs
        let f = frag(
            &[("p", false), ("q", false), ("acc", true), ("dead", false)],
            &[(0, a(), 2), (1, a(), 3)],
        );
        let v = strong_bisim(&f, StateId(0), StateId(1));
        let w = v.witness().expect("inequivalent");
        assert_eq!(w.steps, vec![a()]);
        assert_eq!(w.reason, WitnessReason::AcceptanceMismatch);
    }

    #[test]
    fn strong_implies_branching_implies_on_examples() {
        // a small stuttering example: inert tau before a
        let f = frag(
            &[("x", false), ("y", false), ("z", true), ("x2", false), ("z2", true)],
            &[(0, tau(), 1), (1, a(), 2), (3, a(), 4)],
        );
        // x vs x2: not strongly bisimilar, but branching (and dpbb? the tau
        // is inert and non-divergent, so dpbb too)
        assert!(!strong_bisim(&f, StateId(0), StateId(3)).is_equivalent());
        assert!(branching_bisim(&f, StateId(0), StateId(3)).is_equivalent());
        assert!(dpbb(&f, StateId(0), StateId(3)).is_equivalent());
    }

    #[test]
    fn bounded_game_counter_distance() {
        // all-accepting counter chain 0..3: states at distance 1 differ at
        // depth 1 (b enabled on one side only)
        let chain = frag(
            &[("c0", true), ("c1", true), ("c2", true), ("c3", true)],
            &[
                (0, a(), 1),
                (1, a(), 2),
                (2, a(), 3),
                (1, b(), 0),
                (2, b(), 1),
                (3, b(), 2),
            ],
        );
        let v = bounded_game(&chain, StateId(0), &chain, StateId(1), Relation::Strong, 1);
        assert!(v.is_inequivalent());
        // at depth 0 everything is equivalent-at-depth
        let v = bounded_game(&chain, StateId(0), &chain, StateId(1), Relation::Strong, 0);
        assert!(v.is_equivalent());
    }

    #[test]
    fn closure_matches_refinement_on_examples() {
        let f = frag(
            &[
                ("x", false),
                ("y", false),
                ("z", true),
                ("w", false),
                ("v", true),
                ("dead", false),
            ],
            &[
                (0, tau(), 1),
                (1, a(), 2),
                (3, a(), 4),
                (3, b(), 5),
                (1, b(), 5),
            ],
        );
        for relation in [Relation::Strong, Relation::Branching, Relation::Dpbb] {
            let partition = refine(&f, relation);
            let cls = closure(&f, relation);
            for s in f.state_ids() {
                for t in f.state_ids() {
                    assert_eq!(
                        partition.same_block(s, t),
                        cls.related(s, t),
                        "{relation}: {} vs {}",
                        f.key(s),
                        f.key(t)
                    );
                }
            }
        }
    }

    #[test]
    fn horizon_roots_are_inconclusive() {
        let f = LtsFragment::build_with_horizon(
            vec![("r".to_string(), false, true), ("u".to_string(), false, false)],
            vec![(1, a(), 1)],
        );
        let v = strong_bisim(&f, StateId(0), StateId(1));
        assert!(v.is_inconclusive());
    }

    #[test]
    fn distinction_through_horizon_is_inconclusive() {
        // s -a-> h (horizon), t -a-> u (interior, dead non-accepting): the
        // only distinction would inspect h, so the verdict must not claim
        // inequivalence
        let f = LtsFragment::build_with_horizon(
            vec![
                ("s".to_string(), false, false),
                ("t".to_string(), false, false),
                ("h".to_string(), false, true),
                ("u".to_string(), false, false),
            ],
            vec![(0, a(), 2), (1, a(), 3)],
        );
        let v = strong_bisim(&f, StateId(0), StateId(1));
        assert!(v.is_inconclusive(), "got {:?}", v.result);
    }

    #[test]
    fn quotient_respects_partition() {
        let f = frag(
            &[("x", true), ("y", true), ("z", false)],
            &[(0, a(), 2), (1, a(), 2), (2, b(), 0), (2, b(), 1)],
        );
        let partition = refine(&f, Relation::Strong);
        assert!(partition.same_block(StateId(0), StateId(1)));
        let q = f.quotient(&partition.block_of);
        assert_eq!(q.len(), 2);
        // each state is equivalent to its block representative
        let (union, _, _) = LtsFragment::disjoint_union(&f, &q);
        let rep = union.lookup(&format!("R:[{}]", f.key(StateId(0)))).unwrap();
        let orig = union.lookup(&format!("L:{}", f.key(StateId(1)))).unwrap();
        assert!(strong_bisim(&union, orig, rep).is_equivalent());
    }
}
