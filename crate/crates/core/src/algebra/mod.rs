//! Parallel process expressions and recursive specifications, with their
//! structural operational semantics.
//!
//! The expression language covers deadlock `0`, acceptance `1`, action
//! prefixing, choice, parallel composition and identifiers, plus the
//! priority operator `theta`, renaming `rho`, encapsulation `encap` and
//! abstraction `hide`. A specification maps finitely many identifiers to
//! bodies and is interpreted as a labelled transition system by `sos_step`.

mod builtin;
mod canon;
mod gnf;
mod guard;
mod hnf;
mod sos;
mod text;

pub use builtin::{
    ab, ab_io, abag, abag_io, abag_io_in, ac, builtin_specs, ebag_io, ebag_io_in, ec,
    unguarded_example,
};
pub use canon::{canonical, canonical_key, component_weight, parallel_components};
pub use gnf::{to_gnf, GnfEquation, GnfError, GnfSpec};
pub use guard::{check_guardedness, Guardedness, OccurrenceWitness};
pub use hnf::{head_normal_form, Hnf};
pub use sos::{sos_step, sos_step_bounded, SosError, StepSet};
pub use text::{parse_spec_file, print_spec, SpecParseError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::foundations::{ActionLabel, DataSymbol, Port, PriorityOrder, Renaming};
use crate::lts::{Expansion, GeneratorError, StateGenerator};

/// A process identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identifier(String);

impl Identifier {
    pub fn new(name: impl Into<String>) -> Self {
        Identifier(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcessExpr {
    /// `0`: inactive and not accepting.
    Deadlock,
    /// `1`: inactive and accepting.
    Accept,
    Prefix(ActionLabel, Box<ProcessExpr>),
    Choice(Box<ProcessExpr>, Box<ProcessExpr>),
    Parallel(Box<ProcessExpr>, Box<ProcessExpr>),
    Ident(Identifier),
    /// `theta(p)`: keeps only the steps maximal under the specification's
    /// priority order.
    Priority(Box<ProcessExpr>),
    /// `rho[f](p)`: relabels by a function fixing tau.
    Rename(Renaming, Box<ProcessExpr>),
    /// `encap[C](p)`: blocks send/receive/get actions on the ports in `C`.
    Encapsulate(BTreeSet<Port>, Box<ProcessExpr>),
    /// `hide[C](p)`: hides completed and failed communications on the ports
    /// in `C` as tau.
    Hide(BTreeSet<Port>, Box<ProcessExpr>),
}

impl ProcessExpr {
    pub fn prefix(label: ActionLabel, p: ProcessExpr) -> ProcessExpr {
        ProcessExpr::Prefix(label, Box::new(p))
    }

    pub fn choice(p: ProcessExpr, q: ProcessExpr) -> ProcessExpr {
        ProcessExpr::Choice(Box::new(p), Box::new(q))
    }

    pub fn parallel(p: ProcessExpr, q: ProcessExpr) -> ProcessExpr {
        ProcessExpr::Parallel(Box::new(p), Box::new(q))
    }

    pub fn ident(name: impl Into<String>) -> ProcessExpr {
        ProcessExpr::Ident(Identifier::new(name))
    }

    pub fn theta(p: ProcessExpr) -> ProcessExpr {
        ProcessExpr::Priority(Box::new(p))
    }

    pub fn rename(f: Renaming, p: ProcessExpr) -> ProcessExpr {
        ProcessExpr::Rename(f, Box::new(p))
    }

    pub fn encap(ports: impl IntoIterator<Item = Port>, p: ProcessExpr) -> ProcessExpr {
        ProcessExpr::Encapsulate(ports.into_iter().collect(), Box::new(p))
    }

    pub fn hide(ports: impl IntoIterator<Item = Port>, p: ProcessExpr) -> ProcessExpr {
        ProcessExpr::Hide(ports.into_iter().collect(), Box::new(p))
    }

    /// Left-associated sum; `0` for the empty sequence.
    pub fn sum(summands: impl IntoIterator<Item = ProcessExpr>) -> ProcessExpr {
        let mut iter = summands.into_iter();
        match iter.next() {
            None => ProcessExpr::Deadlock,
            Some(first) => iter.fold(first, ProcessExpr::choice),
        }
    }

    /// Left-associated parallel composition; `1` for the empty sequence.
    pub fn par_all(components: impl IntoIterator<Item = ProcessExpr>) -> ProcessExpr {
        let mut iter = components.into_iter();
        match iter.next() {
            None => ProcessExpr::Accept,
            Some(first) => iter.fold(first, ProcessExpr::parallel),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ProcessExpr::Choice(..) => 0,
            ProcessExpr::Parallel(..) => 1,
            ProcessExpr::Prefix(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            ProcessExpr::Deadlock => f.write_str("0"),
            ProcessExpr::Accept => f.write_str("1"),
            ProcessExpr::Prefix(label, p) => {
                write!(f, "{} . ", label)?;
                p.fmt_prec(f, 2)
            }
            ProcessExpr::Choice(p, q) => {
                p.fmt_prec(f, 0)?;
                f.write_str(" + ")?;
                q.fmt_prec(f, 1)
            }
            ProcessExpr::Parallel(p, q) => {
                p.fmt_prec(f, 1)?;
                f.write_str(" || ")?;
                q.fmt_prec(f, 2)
            }
            ProcessExpr::Ident(x) => write!(f, "{}", x),
            ProcessExpr::Priority(p) => write!(f, "theta({})", p),
            ProcessExpr::Rename(renaming, p) => {
                f.write_str("rho[")?;
                let mut first = true;
                for (from, to) in renaming.pairs() {
                    if !first {
                        f.write_str(", ")?;
                    }
                    write!(f, "{} -> {}", from, to)?;
                    first = false;
                }
                write!(f, "]({})", p)
            }
            ProcessExpr::Encapsulate(ports, p) => {
                write!(f, "encap[{}]({})", port_list(ports), p)
            }
            ProcessExpr::Hide(ports, p) => write!(f, "hide[{}]({})", port_list(ports), p),
        }
    }

    /// All identifiers referenced anywhere in the expression.
    pub fn referenced_identifiers(&self) -> BTreeSet<Identifier> {
        let mut out = BTreeSet::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers(&self, out: &mut BTreeSet<Identifier>) {
        match self {
            ProcessExpr::Deadlock | ProcessExpr::Accept => {}
            ProcessExpr::Prefix(_, p)
            | ProcessExpr::Priority(p)
            | ProcessExpr::Rename(_, p)
            | ProcessExpr::Encapsulate(_, p)
            | ProcessExpr::Hide(_, p) => p.collect_identifiers(out),
            ProcessExpr::Choice(p, q) | ProcessExpr::Parallel(p, q) => {
                p.collect_identifiers(out);
                q.collect_identifiers(out);
            }
            ProcessExpr::Ident(x) => {
                out.insert(x.clone());
            }
        }
    }
}

fn port_list(ports: &BTreeSet<Port>) -> String {
    ports.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for ProcessExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// The algebra tier a specification lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlgebraTier {
    /// Actions, choice, parallel composition, recursion.
    Bpp,
    /// Plus the priority and renaming operators.
    BppTheta,
    /// Plus communication, encapsulation and abstraction.
    Bcp,
    /// Everything.
    BcpTheta,
}

impl fmt::Display for AlgebraTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraTier::Bpp => "BPP",
            AlgebraTier::BppTheta => "BPP_theta",
            AlgebraTier::Bcp => "BCP",
            AlgebraTier::BcpTheta => "BCP_theta",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("identifier `{identifier}` is referenced in `{context}` but never defined")]
    UndefinedIdentifier { identifier: String, context: String },
}

/// A finite recursive specification: one defining equation per identifier,
/// an initial identifier, and the declared data alphabet, communication
/// ports and optional priority order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecSpec {
    name: String,
    equations: BTreeMap<Identifier, ProcessExpr>,
    initial: Identifier,
    data: BTreeSet<DataSymbol>,
    ports: BTreeSet<Port>,
    priority: Option<PriorityOrder>,
}

impl RecSpec {
    pub fn new(
        name: impl Into<String>,
        equations: impl IntoIterator<Item = (Identifier, ProcessExpr)>,
        initial: Identifier,
        data: impl IntoIterator<Item = DataSymbol>,
        ports: impl IntoIterator<Item = Port>,
        priority: Option<PriorityOrder>,
    ) -> Result<RecSpec, SpecError> {
        let equations: BTreeMap<Identifier, ProcessExpr> = equations.into_iter().collect();
        if !equations.contains_key(&initial) {
            return Err(SpecError::UndefinedIdentifier {
                identifier: initial.0,
                context: "init".into(),
            });
        }
        for (x, body) in &equations {
            for y in body.referenced_identifiers() {
                if !equations.contains_key(&y) {
                    return Err(SpecError::UndefinedIdentifier {
                        identifier: y.0,
                        context: x.0.clone(),
                    });
                }
            }
        }
        Ok(RecSpec {
            name: name.into(),
            equations,
            initial,
            data: data.into_iter().collect(),
            ports: ports.into_iter().collect(),
            priority,
        })
    }

    /// Single-equation specification, a common test shape.
    pub fn single(
        name: impl Into<String>,
        identifier: impl Into<String>,
        body: ProcessExpr,
    ) -> RecSpec {
        let x = Identifier::new(identifier);
        RecSpec::new(name, [(x.clone(), body)], x, [], [], None)
            .expect("single-equation spec must be closed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn equations(&self) -> &BTreeMap<Identifier, ProcessExpr> {
        &self.equations
    }

    pub fn body(&self, x: &Identifier) -> Option<&ProcessExpr> {
        self.equations.get(x)
    }

    pub fn initial(&self) -> &Identifier {
        &self.initial
    }

    pub fn data(&self) -> &BTreeSet<DataSymbol> {
        &self.data
    }

    pub fn ports(&self) -> &BTreeSet<Port> {
        &self.ports
    }

    pub fn priority(&self) -> Option<&PriorityOrder> {
        self.priority.as_ref()
    }

    /// The smallest tier admitting every operator used by the specification.
    pub fn tier(&self) -> AlgebraTier {
        let mut theta = self.priority.is_some();
        let mut comm = false;
        for body in self.equations.values() {
            let (t, c) = operator_usage(body);
            theta |= t;
            comm |= c;
        }
        match (theta, comm) {
            (false, false) => AlgebraTier::Bpp,
            (true, false) => AlgebraTier::BppTheta,
            (false, true) => AlgebraTier::Bcp,
            (true, true) => AlgebraTier::BcpTheta,
        }
    }

    /// Generator of the specification's process graph rooted at `root`,
    /// evaluating identifiers strictly (unguarded cycles are errors).
    pub fn semantics(&self, root: ProcessExpr) -> AlgebraSemantics<'_> {
        AlgebraSemantics { spec: self, root, unfold_budget: None, weight_fn: None }
    }

    /// Generator with a lazy identifier-unfolding budget instead of the
    /// unguardedness error, used to explore unguarded specifications.
    pub fn semantics_bounded(&self, root: ProcessExpr, budget: usize) -> AlgebraSemantics<'_> {
        AlgebraSemantics { spec: self, root, unfold_budget: Some(budget), weight_fn: None }
    }

    pub fn initial_expr(&self) -> ProcessExpr {
        ProcessExpr::Ident(self.initial.clone())
    }
}

/// (uses theta or rename, uses communication operators or labels)
fn operator_usage(expr: &ProcessExpr) -> (bool, bool) {
    match expr {
        ProcessExpr::Deadlock | ProcessExpr::Accept | ProcessExpr::Ident(_) => (false, false),
        ProcessExpr::Prefix(label, p) => {
            let (t, c) = operator_usage(p);
            (t, c || label.port().is_some())
        }
        ProcessExpr::Choice(p, q) | ProcessExpr::Parallel(p, q) => {
            let (t1, c1) = operator_usage(p);
            let (t2, c2) = operator_usage(q);
            (t1 || t2, c1 || c2)
        }
        ProcessExpr::Priority(p) | ProcessExpr::Rename(_, p) => {
            let (_, c) = operator_usage(p);
            (true, c)
        }
        ProcessExpr::Encapsulate(_, p) | ProcessExpr::Hide(_, p) => {
            let (t, _) = operator_usage(p);
            (t, true)
        }
    }
}

/// State generator over process expressions: steps come from `sos_step`,
/// keys are canonical forms (sound for strong bisimilarity, used only for
/// deduplication), and the weight is the parallel width of the state unless
/// a custom measure is installed.
type WeightFn = Box<dyn Fn(&ProcessExpr) -> usize + Send + Sync>;

pub struct AlgebraSemantics<'a> {
    spec: &'a RecSpec,
    root: ProcessExpr,
    unfold_budget: Option<usize>,
    weight_fn: Option<WeightFn>,
}

impl AlgebraSemantics<'_> {
    /// Installs a custom truncation measure, e.g. a token count aligned
    /// with the bag size of a corresponding automaton.
    pub fn with_weight(
        mut self,
        f: impl Fn(&ProcessExpr) -> usize + Send + Sync + 'static,
    ) -> Self {
        self.weight_fn = Some(Box::new(f));
        self
    }
}

impl StateGenerator for AlgebraSemantics<'_> {
    type State = ProcessExpr;

    fn initial(&self) -> ProcessExpr {
        self.root.clone()
    }

    fn expand(&self, state: &ProcessExpr) -> Result<Expansion<ProcessExpr>, GeneratorError> {
        let steps = match self.unfold_budget {
            None => sos_step(self.spec, state).map_err(|e| GeneratorError(e.to_string()))?,
            Some(budget) => sos_step_bounded(self.spec, state, budget),
        };
        Ok(Expansion {
            accepting: steps.accepting,
            steps: steps.steps.into_iter().collect(),
        })
    }

    fn key(&self, state: &ProcessExpr) -> String {
        canonical_key(state)
    }

    fn weight(&self, state: &ProcessExpr) -> usize {
        match &self.weight_fn {
            Some(f) => f(state),
            None => component_weight(state),
        }
    }
}
