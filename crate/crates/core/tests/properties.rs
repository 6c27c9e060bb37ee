//! Randomized and hand-derived properties across the modules.

mod common;

use std::collections::BTreeSet;

use ppdalab_core::algebra::{
    self, head_normal_form, sos_step, ProcessExpr, RecSpec,
};
use ppdalab_core::equivalence::{bounded_game, check_states, refine, Relation};
use ppdalab_core::foundations::ActionLabel;
use ppdalab_core::lts::{explore, Budget, StateId};
use ppdalab_core::ppda;

use common::{random_bpp_spec, random_fragment, Rng};

use ProcessExpr as E;

/// Steps of a choice are the union of the steps; acceptance is disjunction.
#[test]
fn choice_soundness_on_random_expressions() {
    let mut rng = Rng::new(0xc0ffee);
    for _ in 0..100 {
        let spec = random_bpp_spec(&mut rng, 3, 6);
        let p = spec.body(spec.initial()).unwrap().clone();
        let q = spec
            .equations()
            .values()
            .last()
            .unwrap()
            .clone();
        let joint = sos_step(&spec, &E::choice(p.clone(), q.clone())).unwrap();
        let sp = sos_step(&spec, &p).unwrap();
        let sq = sos_step(&spec, &q).unwrap();
        assert_eq!(joint.accepting, sp.accepting || sq.accepting);
        let union: BTreeSet<_> = sp.steps.into_iter().chain(sq.steps).collect();
        assert_eq!(joint.steps, union);
    }
}

/// Parallel composition is symmetric up to the canonical-form bijection of
/// targets, and acceptance is conjunction.
#[test]
fn parallel_symmetry_on_random_expressions() {
    let mut rng = Rng::new(0xbeef);
    for _ in 0..100 {
        let spec = random_bpp_spec(&mut rng, 3, 6);
        let p = spec.body(spec.initial()).unwrap().clone();
        let q = spec.equations().values().last().unwrap().clone();
        let pq = sos_step(&spec, &E::parallel(p.clone(), q.clone())).unwrap();
        let qp = sos_step(&spec, &E::parallel(q.clone(), p.clone())).unwrap();
        assert_eq!(pq.accepting, qp.accepting);
        let keys = |steps: &BTreeSet<(ActionLabel, ProcessExpr)>| -> BTreeSet<(ActionLabel, String)> {
            steps
                .iter()
                .map(|(l, t)| (l.clone(), algebra::canonical_key(t)))
                .collect()
        };
        assert_eq!(keys(&pq.steps), keys(&qp.steps));
    }
}

/// The priority filter keeps exactly the maximal labels and preserves
/// acceptance; without a declared order it is the identity.
#[test]
fn theta_filters_to_maximal_labels() {
    let spec = algebra::abag(&["d"]);
    let inner = spec.body(spec.initial()).unwrap().clone();
    let plain = sos_step(&spec, &inner).unwrap();
    let filtered = sos_step(&spec, &E::theta(inner)).unwrap();
    assert_eq!(filtered.accepting, plain.accepting);
    let expected = ppdalab_core::foundations::maximal_labels(
        &plain.labels(),
        spec.priority().unwrap(),
    );
    assert_eq!(filtered.labels(), expected);
}

/// Head normal forms of random weakly guarded expressions are strongly
/// bisimilar to the original at depth 6.
#[test]
fn hnf_preserves_random_expressions() {
    let mut rng = Rng::new(0x1234);
    for round in 0..60 {
        let spec = random_bpp_spec(&mut rng, 3, 8);
        let expr = spec.body(spec.initial()).unwrap().clone();
        let hnf = head_normal_form(&spec, &expr).unwrap().to_expr();
        let budget = Budget::new(2000, 7);
        let left = explore(&spec.semantics(expr), budget).unwrap();
        let right = explore(&spec.semantics(hnf), budget).unwrap();
        let verdict = bounded_game(&left, left.root(), &right, right.root(), Relation::Strong, 6);
        assert!(
            !verdict.is_inequivalent(),
            "round {round}: head normal form changed behaviour\n{}\n{}",
            algebra::print_spec(&spec),
            verdict.report()
        );
    }
}

/// Strong equivalence implies branching equivalence, and the
/// divergence-preserving variant implies the plain branching one.
#[test]
fn relation_inclusions_on_random_fragments() {
    let mut rng = Rng::new(0xfeed);
    for _ in 0..60 {
        let fragment = random_fragment(&mut rng, 14);
        let strong = refine(&fragment, Relation::Strong);
        let branching = refine(&fragment, Relation::Branching);
        let dpbb = refine(&fragment, Relation::Dpbb);
        for s in fragment.state_ids() {
            for t in fragment.state_ids() {
                if strong.same_block(s, t) {
                    assert!(branching.same_block(s, t), "strong must refine branching");
                }
                if dpbb.same_block(s, t) {
                    assert!(branching.same_block(s, t), "dpbb must refine branching");
                }
            }
        }
    }
}

/// The three relations are equivalence relations: spot-check transitivity
/// and symmetry on random triples.
#[test]
fn equivalences_on_random_triples() {
    let mut rng = Rng::new(0xabcdef);
    for _ in 0..40 {
        let fragment = random_fragment(&mut rng, 12);
        for relation in [Relation::Strong, Relation::Branching, Relation::Dpbb] {
            let partition = refine(&fragment, relation);
            for _ in 0..10 {
                let pick = |rng: &mut Rng| StateId(rng.below(fragment.len()));
                let (s, t, u) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                let st = partition.same_block(s, t);
                let ts = partition.same_block(t, s);
                assert_eq!(st, ts);
                if st && partition.same_block(t, u) {
                    assert!(partition.same_block(s, u));
                }
                assert!(partition.same_block(s, s));
            }
        }
    }
}

/// Quotienting by the computed partition leaves every state equivalent to
/// its block representative.
#[test]
fn quotient_is_faithful_on_random_fragments() {
    let mut rng = Rng::new(0x9999);
    for _ in 0..20 {
        let fragment = random_fragment(&mut rng, 10);
        let partition = refine(&fragment, Relation::Strong);
        let quotient = fragment.quotient(&partition.block_of);
        let (union, _, _) =
            ppdalab_core::lts::LtsFragment::disjoint_union(&fragment, &quotient);
        for s in fragment.state_ids() {
            let original = union.lookup(&format!("L:{}", fragment.key(s))).unwrap();
            let rep_key = quotient
                .state_ids()
                .find(|q| {
                    quotient.key(*q)
                        == format!(
                            "[{}]",
                            fragment.key(StateId(
                                fragment
                                    .state_ids()
                                    .position(|x| partition.block_of[x.0]
                                        == partition.block_of[s.0])
                                    .unwrap()
                            ))
                        )
                })
                .map(|q| quotient.key(q).to_string());
            if let Some(rep_key) = rep_key {
                let rep = union.lookup(&format!("R:{}", rep_key)).unwrap();
                let verdict = check_states(&union, original, rep, Relation::Strong);
                assert!(verdict.is_equivalent(), "{}", verdict.report());
            }
        }
    }
}

/// Hand-derived exploration counts.
#[test]
fn counter_depth_two_fragment() {
    let counter = ppda::fixtures().remove("counter").unwrap();
    let fragment = explore(&counter.semantics(), Budget::new(100, 2)).unwrap();
    // bags 0, 1 and 2; the deepest is enqueued but not expanded and keeps
    // no transitions, leaving the three chain edges
    assert_eq!(fragment.len(), 3);
    assert_eq!(fragment.transition_count(), 3);
    assert!(fragment.state_ids().all(|s| fragment.accepting(s)));
    let reached = fragment
        .weighted_reach(fragment.root(), &[ActionLabel::plain("a"), ActionLabel::plain("a")])
        .unwrap();
    let keys: Vec<&str> = reached.iter().map(|&s| fragment.key(s)).collect();
    assert_eq!(keys, vec!["s0|{1,1}"]);
}

#[test]
fn bag_over_two_symbols_depth_two() {
    let bag = ppda::always_accepting_bag(&["d", "e"]);
    let fragment = explore(&bag.semantics(), Budget::new(100, 2)).unwrap();
    // hand-run of the four rules per symbol: {}, {d}, {e} expanded plus the
    // three two-element bags on the horizon; 4 edges from each expanded bag
    assert_eq!(fragment.len(), 6);
    assert_eq!(fragment.transition_count(), 12);
    assert_eq!(fragment.horizon_states().count(), 3);
}

/// On the divergence automaton, the trace "a" reaches the bottom row
/// through the tau loop states.
#[test]
fn divergence_fixture_weighted_reach() {
    let m = ppda::fixtures().remove("divergence").unwrap();
    let fragment = explore(&m.semantics(), Budget::new(60, 6)).unwrap();
    let reached = fragment.weighted_reach(fragment.root(), &[ActionLabel::plain("a")]).unwrap();
    assert!(!reached.is_empty());
    for s in reached {
        assert!(fragment.key(s).starts_with("v|"), "landed in {}", fragment.key(s));
    }
}

/// The EC specification accepts exactly in states whose canonical form has
/// no pending decrement component.
#[test]
fn ec_acceptance_matches_canonical_form() {
    let spec = algebra::ec();
    let fragment =
        explore(&spec.semantics(spec.initial_expr()), Budget::new(300, 8).with_weight(4)).unwrap();
    for s in fragment.state_ids() {
        let expected = !fragment.key(s).contains("b . 1");
        assert_eq!(fragment.accepting(s), expected, "state {}", fragment.key(s));
    }
}

/// AC explored to depth 4 is an all-accepting a/b chain.
#[test]
fn ac_graph_is_the_counter_chain() {
    let spec = algebra::ac();
    let fragment =
        explore(&spec.semantics(spec.initial_expr()), Budget::new(300, 4)).unwrap();
    assert_eq!(fragment.len(), 5);
    for s in fragment.state_ids() {
        assert!(fragment.accepting(s));
        if !fragment.horizon(s) {
            let labels: BTreeSet<String> = fragment
                .transitions_from(s)
                .iter()
                .map(|(l, _)| l.to_string())
                .collect();
            let expected: BTreeSet<String> = if s == fragment.root() {
                ["a".to_string()].into()
            } else {
                ["a".to_string(), "b".to_string()].into()
            };
            assert_eq!(labels, expected, "state {}", fragment.key(s));
        }
    }
}

/// The empty-bag composition of a regular control that never sends anything
/// with the priority bag stays silent (used as the trivial harness case).
#[test]
fn trivial_control_with_bag() {
    let control = RecSpec::single("Idle", "Q", E::Accept);
    let composed = ppdalab_core::transforms::regular_with_bag(
        &control,
        ppdalab_core::transforms::BagFlavor::WithPriority,
        &["d"],
        Budget::new(10, 4),
    )
    .unwrap();
    let fragment = explore(
        &composed.spec.semantics(composed.root.clone()),
        Budget::new(50, 8),
    )
    .unwrap();
    assert_eq!(fragment.len(), 1);
    assert!(fragment.accepting(fragment.root()));
}

/// Renaming relabels and preserves acceptance; encapsulation removes all
/// send/receive steps on its ports; abstraction leaves no visible
/// communications on its ports.
#[test]
fn wrapper_invariants_on_the_communicating_bag() {
    use ppdalab_core::foundations::{Port, Renaming};
    let spec = algebra::abag_io(&["d"], "i", "o");
    let inner = spec.body(spec.initial()).unwrap().clone();

    let renaming =
        Renaming::new([(ActionLabel::plain("x"), ActionLabel::plain("y"))]).unwrap();
    let renamed = sos_step(&spec, &E::rename(renaming, inner.clone())).unwrap();
    let plain = sos_step(&spec, &inner).unwrap();
    assert_eq!(renamed.accepting, plain.accepting);
    assert_eq!(renamed.steps.len(), plain.steps.len());

    let encapsulated =
        sos_step(&spec, &E::encap([Port::new("i"), Port::new("o")], inner.clone())).unwrap();
    assert!(
        encapsulated.steps.is_empty(),
        "all steps of the bare bag are sends or receives on i/o"
    );
    assert_eq!(encapsulated.accepting, plain.accepting);

    let hidden = sos_step(&spec, &E::hide([Port::new("i"), Port::new("o")], inner)).unwrap();
    for (label, _) in &hidden.steps {
        assert!(
            !label.is_hidden_on(&Port::new("i")) && !label.is_hidden_on(&Port::new("o")),
            "hiding left a visible communication {label}"
        );
    }
}

/// Distinct counter chain positions are strongly inequivalent: the
/// acceptance-respecting game finds the depth difference.
#[test]
fn counter_chain_positions_are_distinguished() {
    let counter = ppda::fixtures().remove("counter").unwrap();
    let fragment = explore(&counter.semantics(), Budget::new(100, 40).with_weight(4)).unwrap();
    let at = |n: usize| {
        let key = format!("s0|{{{}}}", vec!["1"; n].join(","));
        fragment.lookup(&key).unwrap()
    };
    let verdict = check_states(&fragment, at(1), at(3), Relation::Strong);
    assert!(verdict.is_inequivalent(), "{}", verdict.report());
    let witness = verdict.witness().unwrap();
    assert!(
        witness.mentions(&ActionLabel::plain("b")),
        "distance shows up along b-steps: {witness}"
    );
    assert!(check_states(&fragment, at(2), at(2), Relation::Strong).is_equivalent());
}

/// The divergence automaton's explored graph, compared with a hand-built
/// collapsed graph (one divergent top node fanning out to a descending
/// chain): no distinction is found, and the bounded game reports
/// equivalence at its depth for both branching variants.
#[test]
fn divergence_collapse_comparison() {
    let m = ppda::fixtures().remove("divergence").unwrap();
    let explored = explore(&m.semantics(), Budget::new(400, 40).with_weight(4)).unwrap();

    // hand-built collapsed truncation: top T with a tau loop and a-edges to
    // every bottom node; bottom nodes count down by a and are accepting.
    // The fan-out matches the explored truncation's bottom row.
    let depth = explored
        .state_ids()
        .filter(|&s| explored.key(s).starts_with("v|"))
        .count();
    assert!(depth >= 3, "need a few bottom-row states");
    let mut states = vec![("T".to_string(), false)];
    for n in 0..depth {
        states.push((format!("B{}", n), true));
    }
    let mut edges = vec![(0, ActionLabel::tau(), 0)];
    for n in 0..depth {
        edges.push((0, ActionLabel::plain("a"), n + 1));
        if n > 0 {
            edges.push((n + 1, ActionLabel::plain("a"), n));
        }
    }
    let collapsed = ppdalab_core::lts::LtsFragment::build(states, edges);

    for relation in [Relation::Branching, Relation::Dpbb] {
        let verdict =
            ppdalab_core::equivalence::check_fragments(&explored, &collapsed, relation);
        assert!(
            !verdict.is_inequivalent(),
            "collapse must not be distinguishable ({relation})\n{}",
            verdict.report()
        );
        let game = bounded_game(
            &explored,
            explored.root(),
            &collapsed,
            collapsed.root(),
            relation,
            4,
        );
        assert!(game.is_equivalent(), "({relation}) {}", game.report());
    }
}

/// The one-state construction on the fixture bag agrees with the priority
/// bag specification directly.
#[test]
fn one_state_bag_matches_abag() {
    let bag = ppda::always_accepting_bag(&["d"]);
    let compiled =
        ppdalab_core::transforms::one_state_ppda_to_bpp_theta(&bag).expect("bag compiles");
    let abag = algebra::abag(&["d"]);
    let left = explore(
        &abag.semantics(abag.initial_expr()),
        Budget::new(2000, 40).with_weight(4),
    )
    .unwrap();
    let right = explore(
        &compiled.spec.semantics(compiled.root.clone()),
        Budget::new(2000, 40).with_weight(4),
    )
    .unwrap();
    let verdict =
        ppdalab_core::equivalence::check_fragments(&left, &right, Relation::Dpbb);
    assert!(verdict.is_equivalent(), "{}", verdict.report());
}

/// Round-trip soundness, specification side: every builtin specification
/// (except the deliberately unguarded one) compiles to an automaton whose
/// graph matches the source at a small truncation.
#[test]
fn builtin_specs_compile_soundly() {
    for (name, spec) in algebra::builtin_specs() {
        if name == "unguarded" {
            continue;
        }
        let compiled = ppdalab_core::transforms::bcp_spec_to_ppda(&spec)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let verdict = compiled
            .verify(
                &spec,
                Budget::new(8000, 40).with_weight(3),
                Budget::new(8000, 40).with_weight(4),
            )
            .unwrap();
        assert!(
            verdict.is_equivalent(),
            "{name}: compiled automaton differs\n{}",
            verdict.report()
        );
    }
}

/// Round-trip soundness, automaton side: every fixture automaton compiles
/// to a communicating specification whose graph matches at a small
/// truncation.
#[test]
fn fixture_automata_compile_soundly() {
    for (name, m) in ppda::fixtures() {
        let compiled = ppdalab_core::transforms::ppda_to_bcp_theta(&m)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let verdict = compiled
            .verify(
                &m,
                Budget::new(8000, 60).with_weight(3),
                Budget::new(60000, 400).with_weight(3),
            )
            .unwrap();
        assert!(
            verdict.is_equivalent(),
            "{name}: compiled specification differs\n{}",
            verdict.report()
        );
    }
}

/// The one-state outputs never nest the priority filter more than one level
/// under any prefix, mirroring the flat bag shape.
#[test]
fn one_state_output_theta_nesting() {
    fn max_nesting(expr: &ProcessExpr, inside: usize) -> usize {
        match expr {
            E::Priority(p) => max_nesting(p, inside + 1),
            E::Prefix(_, p) => max_nesting(p, 0).max(inside),
            E::Choice(p, q) | E::Parallel(p, q) => {
                max_nesting(p, inside).max(max_nesting(q, inside)).max(inside)
            }
            E::Rename(_, p) | E::Encapsulate(_, p) | E::Hide(_, p) => max_nesting(p, inside),
            _ => inside,
        }
    }
    for name in ["counter", "counter-change", "bag"] {
        let m = ppda::fixtures().remove(name).unwrap();
        let compiled = ppdalab_core::transforms::one_state_ppda_to_bpp_theta(&m).unwrap();
        for (x, body) in compiled.spec.equations() {
            assert!(
                max_nesting(body, 0) <= 1,
                "{name}: equation {x} nests the priority filter: {body}"
            );
        }
    }
}
