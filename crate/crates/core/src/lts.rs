//! Finite fragments of labelled transition systems.
//!
//! Process graphs in this crate are usually infinite; `explore` carves out a
//! finite fragment breadth-first under a budget, marking the states whose
//! successors were cut as *horizon* states. Equivalence checking downstream
//! treats horizon states as incompletely observed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::foundations::ActionLabel;

/// Index of a state inside one fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

#[derive(Debug, Error)]
#[error("{0}")]
pub struct GeneratorError(pub String);

/// Successor set and acceptance of one state.
#[derive(Clone, Debug)]
pub struct Expansion<S> {
    pub accepting: bool,
    pub steps: Vec<(ActionLabel, S)>,
}

/// A uniform interface over the step functions of automata and process
/// expressions: an opaque state descriptor, its complete finite successor
/// set, an acceptance predicate, and a canonical printable key used for
/// deduplication.
pub trait StateGenerator {
    type State: Clone;

    fn initial(&self) -> Self::State;

    /// The complete successor set of a state. `expand` is deterministic as a
    /// set-valued function: the same descriptor always yields the same set.
    fn expand(&self, state: &Self::State) -> Result<Expansion<Self::State>, GeneratorError>;

    /// Canonical printable form; two descriptors with equal keys denote the
    /// same state of the process graph.
    fn key(&self, state: &Self::State) -> String;

    /// Size measure used by `Budget::max_weight` to truncate by configuration
    /// size (bag size, parallel width) rather than path length.
    fn weight(&self, _state: &Self::State) -> usize {
        0
    }
}

/// Exploration budget. Depth is measured in transitions from the root, tau
/// included. A state heavier than `max_weight` is kept but not expanded.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_states: usize,
    pub max_depth: usize,
    pub max_weight: Option<usize>,
}

impl Budget {
    pub fn new(max_states: usize, max_depth: usize) -> Self {
        Budget { max_states, max_depth, max_weight: None }
    }

    pub fn with_weight(mut self, max_weight: usize) -> Self {
        self.max_weight = Some(max_weight);
        self
    }
}

#[derive(Clone, Debug)]
struct StateInfo {
    key: String,
    accepting: bool,
    horizon: bool,
}

/// A finite explored portion of a process graph: states with acceptance
/// marking, a root, transitions, and horizon flags.
#[derive(Clone, Debug)]
pub struct LtsFragment {
    states: Vec<StateInfo>,
    transitions: Vec<Vec<(ActionLabel, StateId)>>,
    root: StateId,
    by_key: BTreeMap<String, StateId>,
}

impl LtsFragment {
    /// Builds a fragment directly from an explicit state/edge list. The
    /// first state is the root; all states are interior (no horizon).
    pub fn build(
        states: Vec<(String, bool)>,
        edges: Vec<(usize, ActionLabel, usize)>,
    ) -> LtsFragment {
        Self::build_with_horizon(
            states.into_iter().map(|(k, a)| (k, a, false)).collect(),
            edges,
        )
    }

    /// `build` with explicit horizon flags (key, accepting, horizon).
    /// Horizon states keep no outgoing transitions.
    pub fn build_with_horizon(
        states: Vec<(String, bool, bool)>,
        edges: Vec<(usize, ActionLabel, usize)>,
    ) -> LtsFragment {
        let mut infos = Vec::new();
        let mut by_key = BTreeMap::new();
        for (i, (key, accepting, horizon)) in states.into_iter().enumerate() {
            by_key.insert(key.clone(), StateId(i));
            infos.push(StateInfo { key, accepting, horizon });
        }
        let mut transitions = vec![Vec::new(); infos.len()];
        for (src, label, dst) in edges {
            assert!(!infos[src].horizon, "horizon states keep no transitions");
            transitions[src].push((label, StateId(dst)));
        }
        for row in &mut transitions {
            row.sort();
            row.dedup();
        }
        LtsFragment { states: infos, transitions, root: StateId(0), by_key }
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn key(&self, s: StateId) -> &str {
        &self.states[s.0].key
    }

    pub fn accepting(&self, s: StateId) -> bool {
        self.states[s.0].accepting
    }

    pub fn horizon(&self, s: StateId) -> bool {
        self.states[s.0].horizon
    }

    pub fn lookup(&self, key: &str) -> Option<StateId> {
        self.by_key.get(key).copied()
    }

    /// Outgoing transitions, sorted by (label, target key).
    pub fn transitions_from(&self, s: StateId) -> &[(ActionLabel, StateId)] {
        &self.transitions[s.0]
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(|t| t.len()).sum()
    }

    pub fn horizon_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.state_ids().filter(|&s| self.horizon(s))
    }

    /// Disjoint union of two fragments. Keys are prefixed to stay unique.
    /// Returns the combined fragment and the two roots.
    pub fn disjoint_union(a: &LtsFragment, b: &LtsFragment) -> (LtsFragment, StateId, StateId) {
        let mut states = Vec::with_capacity(a.len() + b.len());
        let mut transitions = Vec::with_capacity(a.len() + b.len());
        let mut by_key = BTreeMap::new();
        for (i, info) in a.states.iter().enumerate() {
            let key = format!("L:{}", info.key);
            by_key.insert(key.clone(), StateId(i));
            states.push(StateInfo { key, ..info.clone() });
            transitions.push(a.transitions[i].clone());
        }
        let offset = a.len();
        for (i, info) in b.states.iter().enumerate() {
            let key = format!("R:{}", info.key);
            by_key.insert(key.clone(), StateId(offset + i));
            states.push(StateInfo { key, ..info.clone() });
            transitions.push(
                b.transitions[i]
                    .iter()
                    .map(|(l, t)| (l.clone(), StateId(t.0 + offset)))
                    .collect(),
            );
        }
        let union = LtsFragment { states, transitions, root: a.root, by_key };
        (union, a.root, StateId(b.root.0 + offset))
    }

    /// All states reachable from `s` by the trace `w`, traversing
    /// tau-transitions freely. `w` must not contain tau.
    pub fn weighted_reach(
        &self,
        s: StateId,
        w: &[ActionLabel],
    ) -> Result<BTreeSet<StateId>, GeneratorError> {
        if w.iter().any(|l| l.is_tau()) {
            return Err(GeneratorError("trace for weighted_reach must not contain tau".into()));
        }
        let mut current = self.tau_closure_set(&[s].into_iter().collect());
        for letter in w {
            let mut after: BTreeSet<StateId> = BTreeSet::new();
            for &state in &current {
                for (label, target) in self.transitions_from(state) {
                    if label == letter {
                        after.insert(*target);
                    }
                }
            }
            current = self.tau_closure_set(&after);
        }
        Ok(current)
    }

    fn tau_closure_set(&self, initial: &BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut seen = initial.clone();
        let mut queue: VecDeque<StateId> = initial.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for (label, target) in self.transitions_from(s) {
                if label.is_tau() && seen.insert(*target) {
                    queue.push_back(*target);
                }
            }
        }
        seen
    }

    /// Quotient of the fragment by a partition given as a block id per
    /// state. Block representatives are the least state id in each block;
    /// the root block becomes the new root.
    pub fn quotient(&self, block_of: &[usize]) -> LtsFragment {
        assert_eq!(block_of.len(), self.len());
        let mut rep_of_block: BTreeMap<usize, StateId> = BTreeMap::new();
        for s in self.state_ids() {
            rep_of_block.entry(block_of[s.0]).or_insert(s);
        }
        let mut new_id: BTreeMap<usize, usize> = BTreeMap::new();
        let mut states = Vec::new();
        for (&block, &rep) in &rep_of_block {
            new_id.insert(block, states.len());
            states.push(StateInfo {
                key: format!("[{}]", self.key(rep)),
                accepting: self.accepting(rep),
                horizon: self.horizon(rep),
            });
        }
        let mut transitions = vec![BTreeSet::new(); states.len()];
        for s in self.state_ids() {
            let src = new_id[&block_of[s.0]];
            for (label, target) in self.transitions_from(s) {
                let dst = new_id[&block_of[target.0]];
                transitions[src].insert((label.clone(), StateId(dst)));
            }
        }
        let by_key = states
            .iter()
            .enumerate()
            .map(|(i, info)| (info.key.clone(), StateId(i)))
            .collect();
        LtsFragment {
            states,
            transitions: transitions.into_iter().map(|t| t.into_iter().collect()).collect(),
            root: StateId(new_id[&block_of[self.root.0]]),
            by_key,
        }
    }

    /// Fragment dump: one line per transition plus root/accepting/horizon
    /// stanzas, deterministic.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "root: {}", self.key(self.root));
        let mut accepting: Vec<&str> =
            self.state_ids().filter(|&s| self.accepting(s)).map(|s| self.key(s)).collect();
        accepting.sort();
        let _ = writeln!(out, "accepting: {}", accepting.join(" ; "));
        let mut horizon: Vec<&str> =
            self.horizon_states().map(|s| self.key(s)).collect();
        horizon.sort();
        let _ = writeln!(out, "horizon: {}", horizon.join(" ; "));
        let mut lines = Vec::new();
        for s in self.state_ids() {
            for (label, target) in self.transitions_from(s) {
                lines.push(format!("{} -{}-> {}", self.key(s), label, self.key(*target)));
            }
        }
        lines.sort();
        for line in lines {
            let _ = writeln!(out, "{}", line);
        }
        out
    }

    /// DOT rendering: accepting states double-circled, the root marked with
    /// an entry arrow, horizon states dashed. Node order is deterministic
    /// (sorted by key).
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph fragment {\n  rankdir=LR;\n");
        out.push_str("  __entry [shape=point, label=\"\"];\n");
        let mut order: Vec<StateId> = self.state_ids().collect();
        order.sort_by(|a, b| self.key(*a).cmp(self.key(*b)));
        for s in &order {
            let shape = if self.accepting(*s) { "doublecircle" } else { "circle" };
            let style = if self.horizon(*s) { ", style=dashed" } else { "" };
            let _ = writeln!(
                out,
                "  \"{}\" [shape={}{}];",
                escape_dot(self.key(*s)),
                shape,
                style
            );
        }
        let _ = writeln!(out, "  __entry -> \"{}\";", escape_dot(self.key(self.root)));
        let mut lines = Vec::new();
        for s in &order {
            for (label, target) in self.transitions_from(*s) {
                lines.push(format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    escape_dot(self.key(*s)),
                    escape_dot(self.key(*target)),
                    escape_dot(&label.to_string())
                ));
            }
        }
        lines.sort();
        for line in lines {
            let _ = writeln!(out, "{}", line);
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Breadth-first closure of the generator's initial state under its step
/// function, deduplicating by canonical key. States whose expansion was
/// skipped because of the budget are marked horizon and keep zero recorded
/// transitions; all recorded transition sets are complete.
pub fn explore<G: StateGenerator>(
    gen: &G,
    budget: Budget,
) -> Result<LtsFragment, GeneratorError> {
    assert!(budget.max_states > 0 && budget.max_depth > 0, "budget must be positive");
    let mut states: Vec<StateInfo> = Vec::new();
    let mut pending: Vec<Option<Expansion<G::State>>> = Vec::new();
    let mut weights: Vec<usize> = Vec::new();
    let mut transitions: Vec<Vec<(ActionLabel, StateId)>> = Vec::new();
    let mut by_key: BTreeMap<String, StateId> = BTreeMap::new();

    let initial = gen.initial();
    let initial_key = gen.key(&initial);
    let initial_expansion = gen.expand(&initial)?;
    by_key.insert(initial_key.clone(), StateId(0));
    states.push(StateInfo {
        key: initial_key,
        accepting: initial_expansion.accepting,
        horizon: true,
    });
    pending.push(Some(initial_expansion));
    weights.push(gen.weight(&initial));
    transitions.push(Vec::new());

    let mut queue: VecDeque<(StateId, usize)> = VecDeque::new();
    queue.push_back((StateId(0), 0));

    while let Some((id, depth)) = queue.pop_front() {
        if depth >= budget.max_depth {
            continue; // stays horizon
        }
        if let Some(max_weight) = budget.max_weight {
            if weights[id.0] > max_weight {
                continue;
            }
        }
        let expansion = pending[id.0].take().expect("state expanded twice");
        let mut steps: Vec<(ActionLabel, String, G::State)> = expansion
            .steps
            .into_iter()
            .map(|(label, target)| {
                let key = gen.key(&target);
                (label, key, target)
            })
            .collect();
        steps.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        steps.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);

        // a state can only be expanded if all its successors fit in the budget
        let new_needed = {
            let mut fresh: BTreeSet<&str> = BTreeSet::new();
            for (_, key, _) in &steps {
                if !by_key.contains_key(key.as_str()) {
                    fresh.insert(key);
                }
            }
            fresh.len()
        };
        if states.len() + new_needed > budget.max_states {
            pending[id.0] = Some(Expansion { accepting: states[id.0].accepting, steps: steps.into_iter().map(|(l, _, t)| (l, t)).collect() });
            continue; // stays horizon
        }

        let mut recorded = Vec::with_capacity(steps.len());
        for (label, key, target) in steps {
            let target_id = match by_key.get(&key) {
                Some(&existing) => existing,
                None => {
                    let new_id = StateId(states.len());
                    by_key.insert(key.clone(), new_id);
                    let target_expansion = gen.expand(&target)?;
                    states.push(StateInfo {
                        key,
                        accepting: target_expansion.accepting,
                        horizon: true,
                    });
                    pending.push(Some(target_expansion));
                    weights.push(gen.weight(&target));
                    transitions.push(Vec::new());
                    queue.push_back((new_id, depth + 1));
                    new_id
                }
            };
            recorded.push((label, target_id));
        }
        transitions[id.0] = recorded;
        states[id.0].horizon = false;
    }

    Ok(LtsFragment { states, transitions, root: StateId(0), by_key })
}
