//! Parallel pushdown automata: finite-state machines whose memory is a bag
//! (multiset) of data symbols. Transitions test presence (`+d`) or absence
//! (`-d`) of one symbol and insert a payload bag.

mod fixtures;
mod text;

pub use fixtures::{always_accepting_bag, fixtures};
pub use text::{parse_ppda_file, print_ppda, PpdaParseError};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::foundations::{ActionLabel, Bag, DataSymbol};
use crate::lts::{Expansion, GeneratorError, StateGenerator};

/// Name of a control state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateName(String);

impl StateName {
    pub fn new(name: impl Into<String>) -> Self {
        StateName(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The bag test of a transition: fires when the symbol is present (and
/// removes one occurrence) or when it is absent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionTest {
    Present(DataSymbol),
    Absent(DataSymbol),
}

impl TransitionTest {
    pub fn symbol(&self) -> &DataSymbol {
        match self {
            TransitionTest::Present(d) | TransitionTest::Absent(d) => d,
        }
    }
}

impl fmt::Display for TransitionTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionTest::Present(d) => write!(f, "+{}", d),
            TransitionTest::Absent(d) => write!(f, "-{}", d),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PpdaTransition {
    pub source: StateName,
    pub label: ActionLabel,
    pub test: TransitionTest,
    pub payload: Bag,
    pub target: StateName,
}

impl fmt::Display for PpdaTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -{}[{}/{}]-> {}",
            self.source, self.label, self.test, self.payload, self.target
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpdaError {
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("undeclared data symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("initial state `{0}` not declared")]
    UndeclaredInitial(String),
    #[error("tau is not a data symbol or state name")]
    ReservedName,
}

/// A parallel pushdown automaton: finite states, finite input and data
/// alphabets, finitely many transitions, an initial state (where the bag is
/// empty) and accepting states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ppda {
    name: String,
    states: BTreeSet<StateName>,
    data: BTreeSet<DataSymbol>,
    transitions: Vec<PpdaTransition>,
    initial: StateName,
    accepting: BTreeSet<StateName>,
}

impl Ppda {
    pub fn new(
        name: impl Into<String>,
        states: impl IntoIterator<Item = StateName>,
        data: impl IntoIterator<Item = DataSymbol>,
        transitions: impl IntoIterator<Item = PpdaTransition>,
        initial: StateName,
        accepting: impl IntoIterator<Item = StateName>,
    ) -> Result<Ppda, PpdaError> {
        let states: BTreeSet<StateName> = states.into_iter().collect();
        let data: BTreeSet<DataSymbol> = data.into_iter().collect();
        let mut transitions: Vec<PpdaTransition> = transitions.into_iter().collect();
        transitions.sort();
        transitions.dedup();
        let accepting: BTreeSet<StateName> = accepting.into_iter().collect();

        if !states.contains(&initial) {
            return Err(PpdaError::UndeclaredInitial(initial.0));
        }
        for s in &accepting {
            if !states.contains(s) {
                return Err(PpdaError::UndeclaredState(s.0.clone()));
            }
        }
        for t in &transitions {
            for endpoint in [&t.source, &t.target] {
                if !states.contains(endpoint) {
                    return Err(PpdaError::UndeclaredState(endpoint.0.clone()));
                }
            }
            if !data.contains(t.test.symbol()) {
                return Err(PpdaError::UndeclaredSymbol(t.test.symbol().name().to_string()));
            }
            for (d, _) in t.payload.iter() {
                if !data.contains(d) {
                    return Err(PpdaError::UndeclaredSymbol(d.name().to_string()));
                }
            }
        }
        Ok(Ppda { name: name.into(), states, data, transitions, initial, accepting })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &BTreeSet<StateName> {
        &self.states
    }

    pub fn data(&self) -> &BTreeSet<DataSymbol> {
        &self.data
    }

    pub fn transitions(&self) -> &[PpdaTransition] {
        &self.transitions
    }

    pub fn initial(&self) -> &StateName {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateName> {
        &self.accepting
    }

    /// The input alphabet actually used: visible labels of the transitions.
    pub fn inputs(&self) -> BTreeSet<ActionLabel> {
        self.transitions
            .iter()
            .map(|t| t.label.clone())
            .filter(|l| !l.is_tau())
            .collect()
    }

    /// One step of the process graph: `+d` transitions fire when `d` is in
    /// the bag (replacing one occurrence by the payload), `-d` transitions
    /// fire when it is not (adding the payload). Results are deduplicated
    /// since the transition relation of the graph is a set.
    pub fn step(&self, config: &Config) -> Vec<(ActionLabel, Config)> {
        let mut out = BTreeSet::new();
        for t in &self.transitions {
            if t.source != config.control {
                continue;
            }
            let next_bag = match &t.test {
                TransitionTest::Present(d) => match config.bag.remove_one(d) {
                    Some(rest) => rest.union(&t.payload),
                    None => continue,
                },
                TransitionTest::Absent(d) => {
                    if config.bag.contains(d) {
                        continue;
                    }
                    config.bag.union(&t.payload)
                }
            };
            out.insert((t.label.clone(), Config { control: t.target.clone(), bag: next_bag }));
        }
        out.into_iter().collect()
    }

    /// The process graph of the automaton as a state generator: root is the
    /// initial control state with an empty bag; acceptance depends only on
    /// the control state, irrespective of the bag contents.
    pub fn semantics(&self) -> PpdaSemantics<'_> {
        PpdaSemantics { ppda: self }
    }
}

/// A configuration of the process graph: control state plus bag contents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub control: StateName,
    pub bag: Bag,
}

impl Config {
    pub fn initial(ppda: &Ppda) -> Config {
        Config { control: ppda.initial.clone(), bag: Bag::empty() }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.control, self.bag)
    }
}

pub struct PpdaSemantics<'a> {
    ppda: &'a Ppda,
}

impl StateGenerator for PpdaSemantics<'_> {
    type State = Config;

    fn initial(&self) -> Config {
        Config::initial(self.ppda)
    }

    fn expand(&self, state: &Config) -> Result<Expansion<Config>, GeneratorError> {
        Ok(Expansion {
            accepting: self.ppda.accepting.contains(&state.control),
            steps: self.ppda.step(state),
        })
    }

    fn key(&self, state: &Config) -> String {
        state.to_string()
    }

    fn weight(&self, state: &Config) -> usize {
        state.bag.len()
    }
}

/// Convenience bag literal from symbol names.
pub fn bag_of(symbols: &[&str]) -> Bag {
    symbols.iter().map(|s| DataSymbol::new(*s)).collect()
}

/// Convenience transition constructor used by fixtures and tests.
pub fn trans(
    source: &str,
    label: ActionLabel,
    test: TransitionTest,
    payload: Bag,
    target: &str,
) -> PpdaTransition {
    PpdaTransition {
        source: StateName::new(source),
        label,
        test,
        payload,
        target: StateName::new(target),
    }
}
