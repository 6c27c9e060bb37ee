//! Compiling parallel pushdown automata into recursive specifications.
//!
//! General automata become communicating specifications: one broadcaster
//! process per control state repeatedly announces the state over a fresh
//! port until every component is repositioned, then retires through an
//! `exit` step; one token process per bag occurrence offers the
//! presence-test transitions of the announced state; one absence agent per
//! data symbol offers the absence-test transitions, kept below the
//! presence offers by the priority order. Labels are first made distinct
//! and tau-free and a final renaming restores them.
//!
//! One-state automata need no state broadcast: a persistent root process
//! offers the absence-test transitions under the priority filter and the
//! tokens offer the presence-test ones.
//!
//! Both constructions generalise proofs the source material leaves at the
//! level of examples, so each compiled artifact carries its own equivalence
//! check (`verify`).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::{Identifier, ProcessExpr, RecSpec, SpecError};
use crate::equivalence::{check_fragments, Relation, Verdict};
use crate::foundations::{
    ActionLabel, Arg, DataSymbol, Port, PriorityError, PriorityOrder, Renaming, RenamingError,
};
use crate::lts::{explore, Budget, GeneratorError};
use crate::ppda::{Ppda, StateName, TransitionTest};

use ProcessExpr as E;

#[derive(Debug, Error)]
pub enum ToSpecError {
    #[error("this construction requires exactly one control state, found {found}")]
    MultiState { found: usize },
    #[error("control process is not regular within the budget: state `{state}` was not fully explored")]
    NotRegular { state: String },
    #[error("name `{0}` collides between the control and the bag specification")]
    NameCollision(String),
    #[error("the control specification must not declare its own priority order")]
    ControlPriority,
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Priority(#[from] PriorityError),
    #[error("{0}")]
    Renaming(#[from] RenamingError),
    #[error("{0}")]
    Explore(#[from] GeneratorError),
}

/// A compiled specification plus the renaming table and construction notes.
#[derive(Clone, Debug)]
pub struct CompiledSpec {
    pub spec: RecSpec,
    pub root: ProcessExpr,
    pub renaming: Renaming,
    /// Identifiers that stand for one bag occurrence each; the truncation
    /// measure of the compiled graph counts exactly these, aligning it with
    /// the bag size of the source automaton.
    pub token_idents: BTreeSet<Identifier>,
    pub notes: Vec<String>,
}

/// Parallel token components of a state, counted through the wrappers.
fn token_count(expr: &ProcessExpr, tokens: &BTreeSet<Identifier>) -> usize {
    match expr {
        E::Parallel(p, q) => token_count(p, tokens) + token_count(q, tokens),
        E::Priority(p) | E::Rename(_, p) | E::Encapsulate(_, p) | E::Hide(_, p) => {
            token_count(p, tokens)
        }
        E::Ident(x) if tokens.contains(x) => 1,
        _ => 0,
    }
}

impl CompiledSpec {
    /// Divergence-preserving branching bisimilarity check between the
    /// source automaton's graph and the compiled specification's graph.
    /// Both sides are truncated at the same bag size.
    pub fn verify(
        &self,
        m: &Ppda,
        ppda_budget: Budget,
        spec_budget: Budget,
    ) -> Result<Verdict, GeneratorError> {
        let ppda_graph = explore(&m.semantics(), ppda_budget)?;
        let mut generator = self.spec.semantics(self.root.clone());
        if !self.token_idents.is_empty() {
            let tokens = self.token_idents.clone();
            generator = generator.with_weight(move |state| token_count(state, &tokens));
        }
        let spec_graph = explore(&generator, spec_budget)?;
        Ok(check_fragments(&ppda_graph, &spec_graph, Relation::Dpbb).with_params(format!(
            "ppda states {} / spec states {}",
            ppda_graph.len(),
            spec_graph.len()
        )))
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("identifiers: {}\n", self.spec.equations().len()));
        if !self.renaming.is_identity() {
            out.push_str("renaming:\n");
            for (from, to) in self.renaming.pairs() {
                out.push_str(&format!("  {} -> {}\n", from, to));
            }
        }
        for note in &self.notes {
            out.push_str(&format!("note: {}\n", note));
        }
        out
    }
}

/// Names already used by the automaton, to keep fresh names disjoint.
fn taken_names(m: &Ppda) -> BTreeSet<String> {
    let mut taken: BTreeSet<String> = BTreeSet::new();
    for s in m.states() {
        taken.insert(s.name().to_string());
    }
    for d in m.data() {
        taken.insert(d.name().to_string());
    }
    for t in m.transitions() {
        taken.insert(t.label.to_string());
        if let ActionLabel::Plain { name, .. } = &t.label {
            taken.insert(name.clone());
        }
    }
    taken
}

fn fresh_name(taken: &mut BTreeSet<String>, base: &str) -> String {
    let mut candidate = base.to_string();
    let mut counter = 0usize;
    while taken.contains(&candidate) {
        counter += 1;
        candidate = format!("{}_{}", base, counter);
    }
    taken.insert(candidate.clone());
    candidate
}

/// A prefix such that `{prefix}{i}` is fresh for every index.
fn fresh_prefix(taken: &BTreeSet<String>, base: &str) -> String {
    let mut candidate = base.to_string();
    while taken.iter().any(|t| t.starts_with(&candidate)) {
        candidate.push('x');
    }
    candidate
}

/// Distinct tau-free stand-in labels per transition, with the renaming that
/// restores the originals.
fn stand_ins(
    m: &Ppda,
    taken: &BTreeSet<String>,
) -> (Vec<ActionLabel>, Vec<(ActionLabel, ActionLabel)>) {
    let prefix = fresh_prefix(taken, "e");
    let mut labels = Vec::new();
    let mut pairs = Vec::new();
    for (i, t) in m.transitions().iter().enumerate() {
        let stand_in = ActionLabel::plain(format!("{}{}", prefix, i));
        pairs.push((stand_in.clone(), t.label.clone()));
        labels.push(stand_in);
    }
    (labels, pairs)
}

/// Same-datum priority pairs: every absence-test stand-in below every
/// presence-test stand-in on that symbol (and below tau).
fn absence_below_presence(
    m: &Ppda,
    stand_in: &[ActionLabel],
) -> Vec<(ActionLabel, ActionLabel)> {
    let mut pairs = Vec::new();
    for (j, tj) in m.transitions().iter().enumerate() {
        let TransitionTest::Absent(d) = &tj.test else { continue };
        pairs.push((stand_in[j].clone(), ActionLabel::tau()));
        for (k, tk) in m.transitions().iter().enumerate() {
            if matches!(&tk.test, TransitionTest::Present(d2) if d2 == d) {
                pairs.push((stand_in[j].clone(), stand_in[k].clone()));
            }
        }
    }
    pairs
}

/// The full correspondence direction: any automaton into a communicating
/// specification with priorities.
pub fn ppda_to_bcp_theta(m: &Ppda) -> Result<CompiledSpec, ToSpecError> {
    let mut taken = taken_names(m);
    let (stand_in, mut rename_pairs) = stand_ins(m, &taken.clone());
    for label in &stand_in {
        taken.insert(label.to_string());
    }
    let port = Port::new(fresh_name(&mut taken, "p"));
    let exit = ActionLabel::plain(fresh_name(&mut taken, "exit"));
    rename_pairs.push((exit.clone(), ActionLabel::tau()));
    let renaming = Renaming::new(rename_pairs)?;

    let states: Vec<&StateName> = m.states().iter().collect();
    let data: Vec<&DataSymbol> = m.data().iter().collect();
    let accepts = |s: &StateName| m.accepting().contains(s);

    // identifier names
    let mut p_name: BTreeMap<&StateName, Identifier> = BTreeMap::new();
    for s in &states {
        p_name.insert(s, Identifier::new(fresh_name(&mut taken, &format!("P_{}", s))));
    }
    let mut t_name: BTreeMap<&DataSymbol, Identifier> = BTreeMap::new();
    let mut a_name: BTreeMap<&DataSymbol, Identifier> = BTreeMap::new();
    let mut r_name: BTreeMap<(&DataSymbol, &StateName), Identifier> = BTreeMap::new();
    let mut b_name: BTreeMap<(&DataSymbol, &StateName), Identifier> = BTreeMap::new();
    for d in &data {
        t_name.insert(d, Identifier::new(fresh_name(&mut taken, &format!("T_{}", d))));
        a_name.insert(d, Identifier::new(fresh_name(&mut taken, &format!("A_{}", d))));
        for s in &states {
            r_name.insert(
                (d, s),
                Identifier::new(fresh_name(&mut taken, &format!("R_{}_{}", d, s))),
            );
            b_name.insert(
                (d, s),
                Identifier::new(fresh_name(&mut taken, &format!("B_{}_{}", d, s))),
            );
        }
    }
    let sys = Identifier::new(fresh_name(&mut taken, "Sys"));

    let state_arg = |s: &StateName| Arg::bare(DataSymbol::new(s.name()));
    let send_state = |s: &StateName| ActionLabel::send(port.clone(), state_arg(s));
    let recv_state = |s: &StateName| ActionLabel::receive(port.clone(), state_arg(s));
    let comm_state = |s: &StateName| ActionLabel::comm(port.clone(), state_arg(s));

    // a fresh broadcaster and one token per payload occurrence
    let new_round = |target: &StateName, payload: &crate::foundations::Bag| -> ProcessExpr {
        let mut components = vec![E::Ident(p_name[target].clone())];
        for (d, count) in payload.iter() {
            for _ in 0..count {
                components.push(E::Ident(t_name[d].clone()));
            }
        }
        E::par_all(components)
    };

    let mut equations: Vec<(Identifier, ProcessExpr)> = Vec::new();

    for s in &states {
        // P_s = (1 +) p!s . P_s + exit . 1; acceptance of a stable state is
        // carried by the synced tokens and agents, which re-synchronise on
        // every state change, so the exit residue can be plain 1
        let mut summands = Vec::new();
        if accepts(s) {
            summands.push(E::Accept);
        }
        summands.push(E::prefix(send_state(s), E::Ident(p_name[s].clone())));
        summands.push(E::prefix(exit.clone(), E::Accept));
        equations.push((p_name[s].clone(), E::sum(summands)));
    }

    for d in &data {
        // T_d = sum_s p?s . R_d_s
        equations.push((
            t_name[d].clone(),
            E::sum(states.iter().map(|s| {
                E::prefix(recv_state(s), E::Ident(r_name[&(*d, *s)].clone()))
            })),
        ));
        // A_d = sum_s p?s . B_d_s
        equations.push((
            a_name[d].clone(),
            E::sum(states.iter().map(|s| {
                E::prefix(recv_state(s), E::Ident(b_name[&(*d, *s)].clone()))
            })),
        ));
        for s in &states {
            // R_d_s = (1 +) sum {presence transitions of s on d} + re-syncs;
            // the 1-summand mirrors the state's acceptance
            let mut summands = Vec::new();
            if accepts(s) {
                summands.push(E::Accept);
            }
            for (i, t) in m.transitions().iter().enumerate() {
                if t.source == **s && t.test == TransitionTest::Present((*d).clone()) {
                    summands.push(E::prefix(
                        stand_in[i].clone(),
                        new_round(&t.target, &t.payload),
                    ));
                }
            }
            for s2 in &states {
                if s2 != s {
                    summands.push(E::prefix(
                        recv_state(s2),
                        E::Ident(r_name[&(*d, *s2)].clone()),
                    ));
                }
            }
            equations.push((r_name[&(*d, *s)].clone(), E::sum(summands)));

            // B_d_s = (1 +) sum {absence transitions of s on d, re-spawning
            // the agent} + re-syncs
            let mut summands = Vec::new();
            if accepts(s) {
                summands.push(E::Accept);
            }
            for (i, t) in m.transitions().iter().enumerate() {
                if t.source == **s && t.test == TransitionTest::Absent((*d).clone()) {
                    summands.push(E::prefix(
                        stand_in[i].clone(),
                        E::parallel(
                            new_round(&t.target, &t.payload),
                            E::Ident(a_name[d].clone()),
                        ),
                    ));
                }
            }
            for s2 in &states {
                if s2 != s {
                    summands.push(E::prefix(
                        recv_state(s2),
                        E::Ident(b_name[&(*d, *s2)].clone()),
                    ));
                }
            }
            equations.push((b_name[&(*d, *s)].clone(), E::sum(summands)));
        }
    }

    // Sys hoists the first step (only absence tests fire on the empty bag),
    // so every identifier occurrence is prefixed
    let wrap = |inner: ProcessExpr| {
        E::rename(
            renaming.clone(),
            E::hide([port.clone()], E::encap([port.clone()], E::theta(inner))),
        )
    };
    let mut sys_summands = Vec::new();
    if accepts(m.initial()) {
        sys_summands.push(E::Accept);
    }
    for t in m.transitions() {
        if t.source != *m.initial() {
            continue;
        }
        let TransitionTest::Absent(_) = &t.test else { continue };
        let mut components = vec![new_round(&t.target, &t.payload)];
        components.extend(data.iter().map(|d| E::Ident(a_name[d].clone())));
        sys_summands.push(E::prefix(t.label.clone(), wrap(E::par_all(components))));
    }
    equations.push((sys.clone(), E::sum(sys_summands)));

    // priority: state communications above exit, exit above every stand-in,
    // absence stand-ins below presence stand-ins on the same symbol
    let mut priority_pairs = vec![(exit.clone(), ActionLabel::tau())];
    for s in &states {
        priority_pairs.push((exit.clone(), comm_state(s)));
    }
    for label in &stand_in {
        priority_pairs.push((label.clone(), exit.clone()));
        priority_pairs.push((label.clone(), ActionLabel::tau()));
    }
    priority_pairs.extend(absence_below_presence(m, &stand_in));
    let priority = PriorityOrder::new(priority_pairs)?;

    let spec = RecSpec::new(
        format!("{}_spec", m.name()),
        equations,
        sys.clone(),
        m.data().iter().cloned().chain(m.states().iter().map(|s| DataSymbol::new(s.name()))),
        [port.clone()],
        Some(priority),
    )?;

    let token_idents: BTreeSet<Identifier> = t_name
        .values()
        .cloned()
        .chain(r_name.values().cloned())
        .collect();
    Ok(CompiledSpec {
        root: E::Ident(sys),
        spec,
        renaming,
        token_idents,
        notes: vec![format!(
            "state information broadcast over port {}; every round ends with an exit step",
            port
        )],
    })
}

/// The one-state direction into basic parallel processes with priorities.
pub fn one_state_ppda_to_bpp_theta(m: &Ppda) -> Result<CompiledSpec, ToSpecError> {
    if m.states().len() != 1 {
        return Err(ToSpecError::MultiState { found: m.states().len() });
    }
    let accepting = !m.accepting().is_empty();
    let mut taken = taken_names(m);
    let (stand_in, rename_pairs) = stand_ins(m, &taken.clone());
    for label in &stand_in {
        taken.insert(label.to_string());
    }
    let renaming = Renaming::new(rename_pairs)?;

    let data: Vec<&DataSymbol> = m.data().iter().collect();
    let mut t_name: BTreeMap<&DataSymbol, Identifier> = BTreeMap::new();
    for d in &data {
        t_name.insert(d, Identifier::new(fresh_name(&mut taken, &format!("T_{}", d))));
    }
    let root = Identifier::new(fresh_name(&mut taken, "Root"));
    let sys = Identifier::new(fresh_name(&mut taken, "Sys"));

    let tokens_of = |payload: &crate::foundations::Bag| -> Vec<ProcessExpr> {
        let mut components = Vec::new();
        for (d, count) in payload.iter() {
            for _ in 0..count {
                components.push(E::Ident(t_name[d].clone()));
            }
        }
        components
    };

    let mut equations: Vec<(Identifier, ProcessExpr)> = Vec::new();

    // Root = (1 +) sum {absence transitions} l_j . (Root || tokens); the
    // priority filter is applied once by the persistent root wrapper rather
    // than re-wrapped per branch, which keeps the state space flat
    let mut root_summands = Vec::new();
    if accepting {
        root_summands.push(E::Accept);
    }
    for (j, t) in m.transitions().iter().enumerate() {
        let TransitionTest::Absent(_) = &t.test else { continue };
        let mut components = vec![E::Ident(root.clone())];
        components.extend(tokens_of(&t.payload));
        root_summands.push(E::prefix(stand_in[j].clone(), E::par_all(components)));
    }
    equations.push((root.clone(), E::sum(root_summands)));

    // T_d = 1 + sum {presence transitions on d} l_i . tokens
    for d in &data {
        let mut summands = vec![E::Accept];
        for (i, t) in m.transitions().iter().enumerate() {
            if t.test == TransitionTest::Present((*d).clone()) {
                summands.push(E::prefix(stand_in[i].clone(), E::par_all(tokens_of(&t.payload))));
            }
        }
        equations.push((t_name[d].clone(), E::sum(summands)));
    }

    // Sys hoists the first step so the wrapper sits under a prefix
    let mut sys_summands = Vec::new();
    if accepting {
        sys_summands.push(E::Accept);
    }
    for t in m.transitions() {
        let TransitionTest::Absent(_) = &t.test else { continue };
        let mut components = vec![E::Ident(root.clone())];
        components.extend(tokens_of(&t.payload));
        sys_summands.push(E::prefix(
            t.label.clone(),
            E::rename(renaming.clone(), E::theta(E::par_all(components))),
        ));
    }
    equations.push((sys.clone(), E::sum(sys_summands)));

    let priority = PriorityOrder::new(absence_below_presence(m, &stand_in))?;

    let spec = RecSpec::new(
        format!("{}_spec", m.name()),
        equations,
        sys.clone(),
        m.data().iter().cloned(),
        [],
        Some(priority),
    )?;

    Ok(CompiledSpec {
        root: E::Ident(sys),
        spec,
        renaming,
        token_idents: t_name.values().cloned().collect(),
        notes: vec!["one token identifier per data symbol; absence offers filtered by priority".into()],
    })
}

/// Which bag the regular control is composed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BagFlavor {
    /// `ABag^io`: priority-filtered absence signalling.
    WithPriority,
    /// `AB^io`: plain sends, for get-based communication.
    GetBased,
}

/// Composes a regular control process with a bag over ports `i`/`o`:
/// `hide[i,o](encap[i,o](control || bag))`. The control must be finite
/// within the given budget and must not declare its own priority order.
pub fn regular_with_bag(
    control: &RecSpec,
    flavor: BagFlavor,
    data: &[&str],
    regularity_budget: Budget,
) -> Result<CompiledSpec, ToSpecError> {
    if control.priority().is_some() {
        return Err(ToSpecError::ControlPriority);
    }
    let graph = explore(&control.semantics(control.initial_expr()), regularity_budget)?;
    if let Some(h) = graph.horizon_states().next() {
        return Err(ToSpecError::NotRegular { state: graph.key(h).to_string() });
    }

    let bag = match flavor {
        BagFlavor::WithPriority => crate::algebra::abag_io(data, "i", "o"),
        BagFlavor::GetBased => crate::algebra::ab_io(data, "i", "o"),
    };
    for x in control.equations().keys() {
        if bag.equations().contains_key(x) {
            return Err(ToSpecError::NameCollision(x.name().to_string()));
        }
    }
    let equations = control
        .equations()
        .iter()
        .chain(bag.equations().iter())
        .map(|(x, b)| (x.clone(), b.clone()));
    let spec = RecSpec::new(
        format!("{}_with_bag", control.name()),
        equations,
        control.initial().clone(),
        control.data().iter().cloned().chain(bag.data().iter().cloned()),
        control.ports().iter().cloned().chain(bag.ports().iter().cloned()),
        bag.priority().cloned(),
    )?;
    let ports = [Port::new("i"), Port::new("o")];
    let mut root = E::hide(
        ports.clone(),
        E::encap(
            ports,
            E::parallel(control.initial_expr(), bag.initial_expr()),
        ),
    );
    if spec.priority().is_some() {
        // the ambient priority filter applies to the composition; its
        // a < tau pairs keep filtered offers suppressed under hiding
        root = E::theta(root);
    }
    Ok(CompiledSpec {
        spec,
        root,
        renaming: Renaming::identity(),
        token_idents: BTreeSet::new(),
        notes: vec![format!("control composed with {}", bag.name())],
    })
}
