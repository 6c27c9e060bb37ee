//! Signature-based partition refinement.
//!
//! Strong bisimilarity splits on (label, target block) moves and the
//! acceptance bit. Branching bisimilarity computes signatures up to inert
//! (within-block) tau steps: per round, the within-block tau graph is
//! condensed into strongly connected components and visible moves, the
//! tau-reachable acceptance bit and (for the divergence-preserving variant)
//! a per-block divergence flag are propagated backwards through it.
//!
//! Horizon states form one frozen block that is never split or merged.

use std::collections::BTreeSet;

use crate::foundations::ActionLabel;
use crate::lts::{LtsFragment, StateId};

use super::Relation;

/// A disjoint cover of a fragment's states, as a block id per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub block_of: Vec<usize>,
    pub blocks: usize,
}

impl Partition {
    pub fn same_block(&self, s: StateId, t: StateId) -> bool {
        self.block_of[s.0] == self.block_of[t.0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SigItem {
    Move(ActionLabel, usize),
    Accept,
    Diverge,
}

type Signature = BTreeSet<SigItem>;

pub fn refine(fragment: &LtsFragment, relation: Relation) -> Partition {
    let n = fragment.len();
    if n == 0 {
        return Partition { block_of: Vec::new(), blocks: 0 };
    }
    let any_horizon = fragment.horizon_states().next().is_some();
    let mut block_of: Vec<usize> = (0..n)
        .map(|i| if fragment.horizon(StateId(i)) { 0 } else { usize::from(any_horizon) })
        .collect();
    let mut blocks = 1 + usize::from(any_horizon);

    loop {
        let sigs = signatures(fragment, &block_of, relation);
        // group interior states by (old block, signature); horizon states
        // stay in the frozen block 0
        let mut keys: Vec<(usize, Option<&Signature>, usize)> = (0..n)
            .map(|i| (block_of[i], sigs[i].as_ref(), i))
            .collect();
        keys.sort();
        let mut next_block = 0usize;
        let mut new_block_of = vec![0usize; n];
        let mut previous: Option<(usize, Option<&Signature>)> = None;
        for (old, sig, state) in keys {
            let group = (old, sig);
            if previous.as_ref() != Some(&group) {
                if previous.is_some() {
                    next_block += 1;
                }
                previous = Some(group);
            }
            new_block_of[state] = next_block;
        }
        let new_blocks = next_block + 1;
        if new_blocks == blocks {
            return Partition { block_of: new_block_of, blocks: new_blocks };
        }
        block_of = new_block_of;
        blocks = new_blocks;
    }
}

/// Signatures per state; `None` for horizon states (frozen).
fn signatures(
    fragment: &LtsFragment,
    block_of: &[usize],
    relation: Relation,
) -> Vec<Option<Signature>> {
    let n = fragment.len();
    let mut sigs: Vec<Option<Signature>> = vec![None; n];

    if relation == Relation::Strong {
        for (i, slot) in sigs.iter_mut().enumerate() {
            let s = StateId(i);
            if fragment.horizon(s) {
                continue;
            }
            let mut sig = Signature::new();
            if fragment.accepting(s) {
                sig.insert(SigItem::Accept);
            }
            for (label, target) in fragment.transitions_from(s) {
                sig.insert(SigItem::Move(label.clone(), block_of[target.0]));
            }
            *slot = Some(sig);
        }
        return sigs;
    }

    // branching / dpbb: base signatures plus propagation over the
    // within-block tau graph
    let mut base: Vec<Signature> = vec![Signature::new(); n];
    let mut inert: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let s = StateId(i);
        if fragment.horizon(s) {
            continue;
        }
        if fragment.accepting(s) {
            base[i].insert(SigItem::Accept);
        }
        for (label, target) in fragment.transitions_from(s) {
            let inert_step = label.is_tau() && block_of[target.0] == block_of[i];
            if inert_step {
                inert[i].push(target.0);
            } else {
                base[i].insert(SigItem::Move(label.clone(), block_of[target.0]));
            }
        }
    }

    let sccs = tarjan_sccs(&inert, n);
    let mut scc_of = vec![0usize; n];
    for (idx, scc) in sccs.iter().enumerate() {
        for &m in scc {
            scc_of[m] = idx;
        }
    }
    // Tarjan emits components in reverse topological order, so every
    // within-block tau successor component is finished before its
    // predecessors.
    let mut scc_sigs: Vec<Signature> = Vec::with_capacity(sccs.len());
    for (idx, scc) in sccs.iter().enumerate() {
        let mut sig = Signature::new();
        let divergent = relation == Relation::Dpbb
            && scc.iter().any(|&m| inert[m].iter().any(|&t| scc_of[t] == idx));
        if divergent {
            sig.insert(SigItem::Diverge);
        }
        for &m in scc {
            sig.extend(base[m].iter().cloned());
            for &t in &inert[m] {
                if scc_of[t] != idx {
                    sig.extend(scc_sigs[scc_of[t]].iter().cloned());
                }
            }
        }
        scc_sigs.push(sig);
    }
    for (i, sig) in sigs.iter_mut().enumerate() {
        if !fragment.horizon(StateId(i)) {
            *sig = Some(scc_sigs[scc_of[i]].clone());
        }
    }
    sigs
}

/// Iterative Tarjan; returns components in emission order (reverse
/// topological order of the condensation).
fn tarjan_sccs(adj: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    // explicit DFS frame: (node, next child position)
    let mut call_stack: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        call_stack.push((start, 0));
        index[start] = next_index;
        lowlink[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(top) = call_stack.last_mut() {
            let v = top.0;
            let child = top.1;
            if child < adj[v].len() {
                top.1 += 1;
                let w = adj[v][child];
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call_stack.pop();
                if let Some(parent) = call_stack.last() {
                    let p = parent.0;
                    lowlink[p] = lowlink[p].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    sccs.push(component);
                }
            }
        }
    }
    sccs
}
