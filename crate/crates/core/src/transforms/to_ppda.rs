//! Compiling recursive specifications into parallel pushdown automata.
//!
//! The specification is first brought into Greibach Normal Form. Its
//! identifiers become the data alphabet; the control states are the
//! reachable subsets of non-accepting identifiers (the support of the
//! non-accepting part of the bag), plus auxiliary states that re-check the
//! support after a non-accepting identifier fires its last summand. The
//! initial state is the empty subset, which is also the only accepting
//! state.
//!
//! Communication summands consume two identifiers in one visible step,
//! realised as a chain of auxiliary tau hops. Priority-filtered summands
//! compile to gated transitions in the two supported shapes: when every
//! dominating offer comes from non-accepting identifiers the gate is
//! resolved per control state, and when it comes from one accepting (bag
//! resident) identifier the transition tests its absence instead. Every
//! construction is re-checked against the source semantics: callers should
//! run `verify` and surface its verdict.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::algebra::{to_gnf, GnfError, GnfSpec, Identifier, RecSpec};
use crate::equivalence::{check_fragments, Relation, Verdict};
use crate::foundations::{ActionLabel, Bag, DataSymbol};
use crate::lts::{explore, Budget, GeneratorError};
use crate::ppda::{Ppda, PpdaError, PpdaTransition, StateName, TransitionTest};

#[derive(Debug, Error)]
pub enum ToPpdaError {
    #[error("{0}")]
    Gnf(#[from] GnfError),
    #[error("specification uses {found}, but this direction only accepts {required}")]
    TierMismatch { required: String, found: String },
    #[error("priority-filtered summand outside the supported shapes: {0}")]
    UnsupportedPriority(String),
    #[error("unsupported feature for this direction: {0}")]
    UnsupportedFeature(String),
    #[error("invalid automaton produced: {0}")]
    Ppda(#[from] PpdaError),
    #[error("exploration failed during verification: {0}")]
    Explore(#[from] GeneratorError),
}

#[derive(Clone, Debug)]
pub struct CompiledPpda {
    pub ppda: Ppda,
    pub gnf: GnfSpec,
    pub aux_states: BTreeSet<StateName>,
    pub notes: Vec<String>,
}

impl CompiledPpda {
    /// Compares the compiled automaton's process graph against the source
    /// specification's graph up to divergence-preserving branching
    /// bisimilarity on the given truncations.
    pub fn verify(
        &self,
        spec: &RecSpec,
        spec_budget: Budget,
        ppda_budget: Budget,
    ) -> Result<Verdict, GeneratorError> {
        let spec_graph = explore(&spec.semantics(spec.initial_expr()), spec_budget)?;
        let ppda_graph = explore(&self.ppda.semantics(), ppda_budget)?;
        Ok(check_fragments(&spec_graph, &ppda_graph, Relation::Dpbb).with_params(format!(
            "spec states {} / ppda states {}",
            spec_graph.len(),
            ppda_graph.len()
        )))
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("states: {}\n", self.ppda.states().len()));
        out.push_str(&format!("auxiliary states: {}\n", self.aux_states.len()));
        out.push_str(&format!("transitions: {}\n", self.ppda.transitions().len()));
        out.push_str(&format!("data symbols: {}\n", self.ppda.data().len()));
        for note in &self.notes {
            out.push_str(&format!("note: {}\n", note));
        }
        out
    }
}

/// Direction restricted to plain basic parallel processes (no priority, no
/// communication).
pub fn spec_to_ppda(spec: &RecSpec) -> Result<CompiledPpda, ToPpdaError> {
    let tier = spec.tier();
    if tier != crate::algebra::AlgebraTier::Bpp {
        return Err(ToPpdaError::TierMismatch {
            required: "BPP".into(),
            found: tier.to_string(),
        });
    }
    compile(spec)
}

/// Full direction: communication summands and the supported priority shapes
/// are compiled as well.
pub fn bcp_spec_to_ppda(spec: &RecSpec) -> Result<CompiledPpda, ToPpdaError> {
    compile(spec)
}

/// How a summand's priority filter is realised.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Gate {
    /// Never filtered.
    Open,
    /// Fires only in control states disjoint from these (non-accepting)
    /// dominating offerers.
    State(BTreeSet<Identifier>),
    /// Fires only when this accepting dominating offerer is absent from the
    /// bag; the stepping identifier is invariantly present and re-spawned,
    /// so the transition leaves it untouched.
    BagAbsent(Identifier),
}

struct Summand {
    owner: Identifier,
    label: ActionLabel,
    xi: Vec<Identifier>,
    gate: Gate,
}

fn compile(spec: &RecSpec) -> Result<CompiledPpda, ToPpdaError> {
    let gnf = to_gnf(spec)?;
    let accepting = gnf.accepting_identifiers();
    let non_accepting = gnf.non_accepting_identifiers();
    let initial_ident = gnf.initial.clone();

    let mut notes = Vec::new();

    // flat summand table with gate analysis
    let mut summands: Vec<Summand> = Vec::new();
    for (owner, eq) in &gnf.equations {
        for (label, xi) in &eq.summands {
            if matches!(label, ActionLabel::FailedGet { .. }) {
                return Err(ToPpdaError::UnsupportedFeature(
                    "failed-get summands cannot be compiled to a single bag test".into(),
                ));
            }
            let gate = analyze_gate(&gnf, owner, label, xi, &accepting, &non_accepting)?;
            if gate != Gate::Open {
                notes.push(format!(
                    "summand {} of {} compiled with gate {:?}",
                    label, owner, gate
                ));
            }
            summands.push(Summand {
                owner: owner.clone(),
                label: label.clone(),
                xi: xi.clone(),
                gate,
            });
        }
    }

    // handshake pairs among summands
    let comm_rules = communication_rules(&gnf, &summands)?;
    if !comm_rules.is_empty() {
        notes.push(format!(
            "{} communication pairs compiled as auxiliary hop chains",
            comm_rules.len()
        ));
    }

    let mut names = StateNames::new();
    let empty_name = names.subset(&BTreeSet::new());

    // The empty subset doubles as the initial state only when the initial
    // identifier is accepting and re-spawned by each of its summands (so
    // its absence test can never misfire later). Otherwise bootstrapping
    // happens from a dedicated initial state.
    let respawning = accepting.contains(&initial_ident)
        && gnf.equations[&initial_ident]
            .summands
            .iter()
            .all(|(_, xi)| xi.contains(&initial_ident));
    let init_name = if respawning {
        empty_name.clone()
    } else {
        let dedicated = names.unique("I".to_string());
        notes.push(format!(
            "initial identifier {} is not invariantly re-spawned; bootstrapping from dedicated state {}",
            initial_ident, dedicated
        ));
        dedicated
    };

    let mut transitions: Vec<PpdaTransition> = Vec::new();
    let mut aux_states: BTreeSet<StateName> = BTreeSet::new();
    let mut seen: BTreeSet<BTreeSet<Identifier>> = BTreeSet::new();
    let mut queue: VecDeque<BTreeSet<Identifier>> = VecDeque::new();
    seen.insert(BTreeSet::new());
    queue.push_back(BTreeSet::new());

    let reach = |target: BTreeSet<Identifier>,
                 seen: &mut BTreeSet<BTreeSet<Identifier>>,
                 queue: &mut VecDeque<BTreeSet<Identifier>>| {
        if seen.insert(target.clone()) {
            queue.push_back(target);
        }
    };

    // bootstrap steps: the initial identifier fires from the initial state
    // with an absence test, since the bag starts empty
    for summand in &summands {
        if summand.owner != initial_ident {
            continue;
        }
        if matches!(summand.gate, Gate::BagAbsent(_)) {
            continue; // covered by the gate transitions below
        }
        let target = support_of(&summand.xi, &non_accepting);
        transitions.push(PpdaTransition {
            source: StateName::new(&init_name),
            label: summand.label.clone(),
            test: TransitionTest::Absent(ident_symbol(&initial_ident)),
            payload: ident_bag(&summand.xi),
            target: StateName::new(names.subset(&target)),
        });
        reach(target, &mut seen, &mut queue);
    }

    while let Some(n) = queue.pop_front() {
        let n_name = names.subset(&n);

        for summand in &summands {
            let x = &summand.owner;
            let xi_bag = ident_bag(&summand.xi);
            let xi_nonacc = support_of(&summand.xi, &non_accepting);
            match &summand.gate {
                Gate::Open => {}
                Gate::State(offerers) => {
                    if !n.is_disjoint(offerers) {
                        continue;
                    }
                }
                Gate::BagAbsent(dominator) => {
                    // the invariantly present identifier is left in place:
                    // test the dominating offerer's absence instead
                    let mut payload_idents = summand.xi.clone();
                    let pos = payload_idents
                        .iter()
                        .position(|i| i == x)
                        .expect("bag-gated summand re-spawns its owner");
                    payload_idents.remove(pos);
                    let target: BTreeSet<Identifier> =
                        n.union(&support_of(&payload_idents, &non_accepting)).cloned().collect();
                    transitions.push(PpdaTransition {
                        source: StateName::new(&n_name),
                        label: summand.label.clone(),
                        test: TransitionTest::Absent(ident_symbol(dominator)),
                        payload: ident_bag(&payload_idents),
                        target: StateName::new(names.subset(&target)),
                    });
                    reach(target, &mut seen, &mut queue);
                    continue;
                }
            }

            if accepting.contains(x) {
                // an accepting identifier steps from the bag
                let target: BTreeSet<Identifier> =
                    n.union(&xi_nonacc).cloned().collect();
                transitions.push(PpdaTransition {
                    source: StateName::new(&n_name),
                    label: summand.label.clone(),
                    test: TransitionTest::Present(ident_symbol(x)),
                    payload: xi_bag.clone(),
                    target: StateName::new(names.subset(&target)),
                });
                reach(target, &mut seen, &mut queue);
            } else if n.contains(x) {
                if xi_nonacc.is_empty() {
                    // possibly the last occurrence of x: hop through an
                    // auxiliary state that re-checks the support
                    let aux = StateName::new(names.aux(&n_name, format!("__{}", x.name())));
                    aux_states.insert(aux.clone());
                    transitions.push(PpdaTransition {
                        source: StateName::new(&n_name),
                        label: summand.label.clone(),
                        test: TransitionTest::Present(ident_symbol(x)),
                        payload: xi_bag.clone(),
                        target: aux.clone(),
                    });
                    transitions.push(PpdaTransition {
                        source: aux.clone(),
                        label: ActionLabel::tau(),
                        test: TransitionTest::Present(ident_symbol(x)),
                        payload: Bag::singleton(ident_symbol(x)),
                        target: StateName::new(&n_name),
                    });
                    let dropped: BTreeSet<Identifier> =
                        n.iter().filter(|i| *i != x).cloned().collect();
                    transitions.push(PpdaTransition {
                        source: aux,
                        label: ActionLabel::tau(),
                        test: TransitionTest::Absent(ident_symbol(x)),
                        payload: Bag::empty(),
                        target: StateName::new(names.subset(&dropped)),
                    });
                    reach(dropped, &mut seen, &mut queue);
                } else {
                    // the support keeps x and gains the new identifiers
                    let target: BTreeSet<Identifier> =
                        n.union(&xi_nonacc).cloned().collect();
                    transitions.push(PpdaTransition {
                        source: StateName::new(&n_name),
                        label: summand.label.clone(),
                        test: TransitionTest::Present(ident_symbol(x)),
                        payload: xi_bag.clone(),
                        target: StateName::new(names.subset(&target)),
                    });
                    reach(target, &mut seen, &mut queue);
                }
            }
        }

        for (rule_idx, rule) in comm_rules.iter().enumerate() {
            if (non_accepting.contains(&rule.sender) && !n.contains(&rule.sender))
                || (non_accepting.contains(&rule.receiver) && !n.contains(&rule.receiver))
            {
                continue;
            }
            let reached = emit_comm_chain(
                rule,
                rule_idx,
                &n,
                &non_accepting,
                &mut names,
                &mut transitions,
                &mut aux_states,
            );
            for target in reached {
                reach(target, &mut seen, &mut queue);
            }
        }
    }

    let mut states: BTreeSet<StateName> =
        seen.iter().map(|n| StateName::new(names.subset(n))).collect();
    states.insert(StateName::new(&init_name));
    states.extend(aux_states.iter().cloned());

    let mut accepting_states = vec![StateName::new(&empty_name)];
    if !respawning && accepting.contains(&initial_ident) {
        accepting_states.push(StateName::new(&init_name));
    }

    let ppda = Ppda::new(
        format!("{}_ppda", gnf.name),
        states,
        gnf.equations.keys().map(ident_symbol),
        transitions,
        StateName::new(&init_name),
        accepting_states,
    )?;

    Ok(CompiledPpda { ppda, gnf, aux_states, notes })
}

fn ident_symbol(x: &Identifier) -> DataSymbol {
    DataSymbol::new(x.name())
}

fn ident_bag(xi: &[Identifier]) -> Bag {
    xi.iter().map(ident_symbol).collect()
}

fn support_of(xi: &[Identifier], non_accepting: &BTreeSet<Identifier>) -> BTreeSet<Identifier> {
    xi.iter().filter(|i| non_accepting.contains(*i)).cloned().collect()
}

/// Identifier-safe state names with collision avoidance, so compiled
/// automata re-parse through the textual format.
struct StateNames {
    subsets: BTreeMap<BTreeSet<Identifier>, String>,
    used: BTreeSet<String>,
}

impl StateNames {
    fn new() -> Self {
        StateNames { subsets: BTreeMap::new(), used: BTreeSet::new() }
    }

    fn unique(&mut self, base: String) -> String {
        let mut candidate = base.clone();
        let mut counter = 0usize;
        while self.used.contains(&candidate) {
            counter += 1;
            candidate = format!("{}_u{}", base, counter);
        }
        self.used.insert(candidate.clone());
        candidate
    }

    fn subset(&mut self, n: &BTreeSet<Identifier>) -> String {
        if let Some(existing) = self.subsets.get(n) {
            return existing.clone();
        }
        let base = if n.is_empty() {
            "E".to_string()
        } else {
            let inner: Vec<&str> = n.iter().map(|i| i.name()).collect();
            format!("N_{}", inner.join("_"))
        };
        let name = self.unique(base);
        self.subsets.insert(n.clone(), name.clone());
        name
    }

    fn aux(&mut self, base: &str, suffix: String) -> String {
        self.unique(format!("{}{}", base, suffix))
    }
}

fn analyze_gate(
    gnf: &GnfSpec,
    owner: &Identifier,
    label: &ActionLabel,
    xi: &[Identifier],
    accepting: &BTreeSet<Identifier>,
    non_accepting: &BTreeSet<Identifier>,
) -> Result<Gate, ToPpdaError> {
    let Some(order) = &gnf.priority else {
        return Ok(Gate::Open);
    };
    // dominating labels actually offered by some equation
    let mut offerers: BTreeSet<Identifier> = BTreeSet::new();
    for (other, eq) in &gnf.equations {
        for (b, _) in &eq.summands {
            if order.less(label, b) {
                offerers.insert(other.clone());
            }
        }
    }
    if offerers.is_empty() {
        return Ok(Gate::Open);
    }
    // the dominating offers themselves must be unfiltered, otherwise the
    // gate cannot be expressed as a plain presence test
    for y in &offerers {
        let eq = &gnf.equations[y];
        for (b, _) in &eq.summands {
            if !order.less(label, b) {
                continue;
            }
            let dominated_further = gnf.equations.values().any(|other_eq| {
                other_eq.summands.iter().any(|(c, _)| order.less(b, c))
            });
            if dominated_further {
                return Err(ToPpdaError::UnsupportedPriority(format!(
                    "offer {} of {} dominating {} is itself filtered",
                    b, y, label
                )));
            }
        }
    }
    if offerers.iter().all(|y| non_accepting.contains(y)) {
        return Ok(Gate::State(offerers));
    }
    if offerers.len() == 1 {
        let y = offerers.first().expect("nonempty").clone();
        if accepting.contains(&y) && owner_invariant(gnf, owner) && xi.contains(owner) {
            return Ok(Gate::BagAbsent(y));
        }
    }
    Err(ToPpdaError::UnsupportedPriority(format!(
        "summand {} of {} is dominated by offers of {:?}",
        label,
        owner,
        offerers.iter().map(|i| i.name().to_string()).collect::<Vec<_>>()
    )))
}

/// The identifier is present exactly once in every reachable composition:
/// it is the initial identifier, every summand of its own equation re-spawns
/// it exactly once, and no other equation spawns it.
fn owner_invariant(gnf: &GnfSpec, owner: &Identifier) -> bool {
    if gnf.initial != *owner {
        return false;
    }
    gnf.equations.iter().all(|(x, eq)| {
        eq.summands.iter().all(|(_, xi)| {
            let count = xi.iter().filter(|i| *i == owner).count();
            if x == owner {
                count == 1
            } else {
                count == 0
            }
        })
    })
}

struct CommRule {
    sender: Identifier,
    receiver: Identifier,
    label: ActionLabel,
    payload: Vec<Identifier>,
}

fn communication_rules(
    gnf: &GnfSpec,
    summands: &[Summand],
) -> Result<Vec<CommRule>, ToPpdaError> {
    let mut rules = Vec::new();
    for s in summands {
        let ActionLabel::Send { port, arg } = &s.label else {
            continue;
        };
        for r in summands {
            let matches = match &r.label {
                ActionLabel::Receive { port: p2, arg: a2 } => p2 == port && a2 == arg,
                ActionLabel::Get { port: p2, datum } => {
                    p2 == port && *arg == crate::foundations::Arg::bare(datum.clone())
                }
                _ => false,
            };
            if !matches {
                continue;
            }
            if gnf.priority.is_some() && (s.gate != Gate::Open || r.gate != Gate::Open) {
                return Err(ToPpdaError::UnsupportedPriority(format!(
                    "communication {}!{} with a priority-filtered participant",
                    port, arg
                )));
            }
            let mut payload = s.xi.clone();
            payload.extend(r.xi.iter().cloned());
            payload.sort();
            rules.push(CommRule {
                sender: s.owner.clone(),
                receiver: r.owner.clone(),
                label: ActionLabel::comm(port.clone(), arg.clone()),
                payload,
            });
        }
    }
    Ok(rules)
}

/// One communication from control state `n`: the visible step consumes the
/// sender, tau hops consume the receiver and re-check the support of both,
/// and the final hop inserts the joint payload. Returns the subsets the
/// chain can end in.
#[allow(clippy::too_many_arguments)]
fn emit_comm_chain(
    rule: &CommRule,
    rule_idx: usize,
    n: &BTreeSet<Identifier>,
    non_accepting: &BTreeSet<Identifier>,
    names: &mut StateNames,
    transitions: &mut Vec<PpdaTransition>,
    aux_states: &mut BTreeSet<StateName>,
) -> Vec<BTreeSet<Identifier>> {
    #[derive(Clone)]
    enum Op {
        Consume(Identifier),
        SupportCheck(Identifier),
    }
    let mut ops = vec![Op::Consume(rule.sender.clone()), Op::Consume(rule.receiver.clone())];
    let mut checked: BTreeSet<Identifier> = BTreeSet::new();
    for z in [&rule.sender, &rule.receiver] {
        if non_accepting.contains(z) && checked.insert((*z).clone()) {
            ops.push(Op::SupportCheck((*z).clone()));
        }
    }

    let n_name = names.subset(n);
    let payload_bag = ident_bag(&rule.payload);
    let payload_support = support_of(&rule.payload, non_accepting);
    let mut reached: Vec<BTreeSet<Identifier>> = Vec::new();

    struct Frame {
        source: StateName,
        pending: BTreeSet<Identifier>,
        op: usize,
    }
    let mut frames = vec![Frame { source: StateName::new(&n_name), pending: n.clone(), op: 0 }];
    let mut branch_counter = 0usize;
    while let Some(frame) = frames.pop() {
        let last = frame.op + 1 == ops.len();
        let label = if frame.op == 0 { rule.label.clone() } else { ActionLabel::tau() };
        match &ops[frame.op] {
            Op::Consume(z) => {
                let (payload, target) = if last {
                    let t: BTreeSet<Identifier> =
                        frame.pending.union(&payload_support).cloned().collect();
                    let target_name = names.subset(&t);
                    reached.push(t);
                    (payload_bag.clone(), StateName::new(target_name))
                } else {
                    branch_counter += 1;
                    let aux = StateName::new(
                        names.aux(&n_name, format!("_c{}x{}", rule_idx, branch_counter)),
                    );
                    aux_states.insert(aux.clone());
                    frames.push(Frame {
                        source: aux.clone(),
                        pending: frame.pending.clone(),
                        op: frame.op + 1,
                    });
                    (Bag::empty(), aux)
                };
                transitions.push(PpdaTransition {
                    source: frame.source.clone(),
                    label,
                    test: TransitionTest::Present(ident_symbol(z)),
                    payload,
                    target,
                });
            }
            Op::SupportCheck(z) => {
                // keep branch: z still in the bag
                let (keep_payload, keep_target) = if last {
                    let t: BTreeSet<Identifier> =
                        frame.pending.union(&payload_support).cloned().collect();
                    let target_name = names.subset(&t);
                    reached.push(t);
                    (
                        Bag::singleton(ident_symbol(z)).union(&payload_bag),
                        StateName::new(target_name),
                    )
                } else {
                    branch_counter += 1;
                    let aux = StateName::new(
                        names.aux(&n_name, format!("_c{}x{}", rule_idx, branch_counter)),
                    );
                    aux_states.insert(aux.clone());
                    frames.push(Frame {
                        source: aux.clone(),
                        pending: frame.pending.clone(),
                        op: frame.op + 1,
                    });
                    (Bag::singleton(ident_symbol(z)), aux)
                };
                transitions.push(PpdaTransition {
                    source: frame.source.clone(),
                    label: label.clone(),
                    test: TransitionTest::Present(ident_symbol(z)),
                    payload: keep_payload,
                    target: keep_target,
                });
                // drop branch: that was the last z
                let mut dropped = frame.pending.clone();
                dropped.remove(z);
                let (drop_payload, drop_target) = if last {
                    let t: BTreeSet<Identifier> =
                        dropped.union(&payload_support).cloned().collect();
                    let target_name = names.subset(&t);
                    reached.push(t);
                    (payload_bag.clone(), StateName::new(target_name))
                } else {
                    branch_counter += 1;
                    let aux = StateName::new(
                        names.aux(&n_name, format!("_c{}x{}", rule_idx, branch_counter)),
                    );
                    aux_states.insert(aux.clone());
                    frames.push(Frame { source: aux.clone(), pending: dropped, op: frame.op + 1 });
                    (Bag::empty(), aux)
                };
                transitions.push(PpdaTransition {
                    source: frame.source.clone(),
                    label,
                    test: TransitionTest::Absent(ident_symbol(z)),
                    payload: drop_payload,
                    target: drop_target,
                });
            }
        }
    }
    reached
}
