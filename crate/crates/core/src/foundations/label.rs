use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::bag::DataSymbol;

/// A communication port name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port(String);

impl Port {
    pub fn new(name: impl Into<String>) -> Self {
        Port(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Sign attached to a data argument: `d`, `+d` or `-d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Bare,
    Plus,
    Minus,
}

/// A data argument carried by a parametrised action.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arg {
    pub symbol: DataSymbol,
    pub polarity: Polarity,
}

impl Arg {
    pub fn bare(symbol: DataSymbol) -> Self {
        Arg { symbol, polarity: Polarity::Bare }
    }

    pub fn plus(symbol: DataSymbol) -> Self {
        Arg { symbol, polarity: Polarity::Plus }
    }

    pub fn minus(symbol: DataSymbol) -> Self {
        Arg { symbol, polarity: Polarity::Minus }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Bare => write!(f, "{}", self.symbol),
            Polarity::Plus => write!(f, "+{}", self.symbol),
            Polarity::Minus => write!(f, "-{}", self.symbol),
        }
    }
}

/// A transition label: a visible action or the silent step.
///
/// Equality is structural on (kind, name, port, datum); plain labels with
/// distinct data arguments are distinct actions.
///
/// Printed forms: `a`, `a(d)`, `tau`, `c!d`, `c?d`, `c(d)`, `c??+d`,
/// `c??-d`, `cxd`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionLabel {
    /// The unobservable step; distinct from every visible action.
    Tau,
    /// A named action, optionally parametrised with a data argument.
    Plain { name: String, arg: Option<Arg> },
    /// Send `c!d`.
    Send { port: Port, arg: Arg },
    /// Receive `c?d`.
    Receive { port: Port, arg: Arg },
    /// Completed communication `c(d)`.
    Comm { port: Port, arg: Arg },
    /// Get `c??+d`: receive-with-removal against a matching send.
    Get { port: Port, datum: DataSymbol },
    /// Failed get `c??-d`: observable only when no matching send exists.
    FailedGet { port: Port, datum: DataSymbol },
    /// Failed communication `cxd`, produced by a failed get firing.
    FailedComm { port: Port, datum: DataSymbol },
}

impl ActionLabel {
    pub fn tau() -> Self {
        ActionLabel::Tau
    }

    pub fn plain(name: impl Into<String>) -> Self {
        ActionLabel::Plain { name: name.into(), arg: None }
    }

    pub fn plain_arg(name: impl Into<String>, arg: Arg) -> Self {
        ActionLabel::Plain { name: name.into(), arg: Some(arg) }
    }

    pub fn send(port: Port, arg: Arg) -> Self {
        ActionLabel::Send { port, arg }
    }

    pub fn receive(port: Port, arg: Arg) -> Self {
        ActionLabel::Receive { port, arg }
    }

    pub fn comm(port: Port, arg: Arg) -> Self {
        ActionLabel::Comm { port, arg }
    }

    pub fn get(port: Port, datum: DataSymbol) -> Self {
        ActionLabel::Get { port, datum }
    }

    pub fn failed_get(port: Port, datum: DataSymbol) -> Self {
        ActionLabel::FailedGet { port, datum }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, ActionLabel::Tau)
    }

    /// The port this label communicates on, if any.
    pub fn port(&self) -> Option<&Port> {
        match self {
            ActionLabel::Send { port, .. }
            | ActionLabel::Receive { port, .. }
            | ActionLabel::Comm { port, .. }
            | ActionLabel::Get { port, .. }
            | ActionLabel::FailedGet { port, .. }
            | ActionLabel::FailedComm { port, .. } => Some(port),
            _ => None,
        }
    }

    /// True for the send/receive/get family blocked by encapsulation on `port`.
    pub fn is_com_on(&self, port: &Port) -> bool {
        match self {
            ActionLabel::Send { port: p, .. }
            | ActionLabel::Receive { port: p, .. }
            | ActionLabel::Get { port: p, .. }
            | ActionLabel::FailedGet { port: p, .. } => p == port,
            _ => false,
        }
    }

    /// True for completed or failed communications hidden by abstraction on `port`.
    pub fn is_hidden_on(&self, port: &Port) -> bool {
        match self {
            ActionLabel::Comm { port: p, .. } | ActionLabel::FailedComm { port: p, .. } => {
                p == port
            }
            _ => false,
        }
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionLabel::Tau => f.write_str("tau"),
            ActionLabel::Plain { name, arg: None } => f.write_str(name),
            ActionLabel::Plain { name, arg: Some(a) } => write!(f, "{}({})", name, a),
            ActionLabel::Send { port, arg } => write!(f, "{}!{}", port, arg),
            ActionLabel::Receive { port, arg } => write!(f, "{}?{}", port, arg),
            ActionLabel::Comm { port, arg } => write!(f, "{}({})", port, arg),
            ActionLabel::Get { port, datum } => write!(f, "{}??+{}", port, datum),
            ActionLabel::FailedGet { port, datum } => write!(f, "{}??-{}", port, datum),
            ActionLabel::FailedComm { port, datum } => write!(f, "{}x{}", port, datum),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenamingError {
    #[error("a renaming must fix tau, but tau is mapped to {0}")]
    TauNotFixed(ActionLabel),
}

/// A total function on labels fixing `tau`, represented by its non-identity
/// pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Renaming {
    map: BTreeMap<ActionLabel, ActionLabel>,
}

impl Renaming {
    pub fn new(
        pairs: impl IntoIterator<Item = (ActionLabel, ActionLabel)>,
    ) -> Result<Self, RenamingError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if from.is_tau() && !to.is_tau() {
                return Err(RenamingError::TauNotFixed(to));
            }
            if from != to {
                map.insert(from, to);
            }
        }
        Ok(Renaming { map })
    }

    pub fn identity() -> Self {
        Renaming::default()
    }

    pub fn apply(&self, label: &ActionLabel) -> ActionLabel {
        self.map.get(label).cloned().unwrap_or_else(|| label.clone())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&ActionLabel, &ActionLabel)> {
        self.map.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_forms() {
        let c = Port::new("c");
        let d = DataSymbol::new("d");
        assert_eq!(ActionLabel::plain("a").to_string(), "a");
        assert_eq!(ActionLabel::tau().to_string(), "tau");
        assert_eq!(ActionLabel::send(c.clone(), Arg::bare(d.clone())).to_string(), "c!d");
        assert_eq!(ActionLabel::receive(c.clone(), Arg::bare(d.clone())).to_string(), "c?d");
        assert_eq!(ActionLabel::comm(c.clone(), Arg::bare(d.clone())).to_string(), "c(d)");
        assert_eq!(ActionLabel::get(c.clone(), d.clone()).to_string(), "c??+d");
        assert_eq!(ActionLabel::failed_get(c.clone(), d.clone()).to_string(), "c??-d");
        assert_eq!(
            ActionLabel::FailedComm { port: c.clone(), datum: d.clone() }.to_string(),
            "cxd"
        );
        assert_eq!(
            ActionLabel::plain_arg("show", Arg::minus(d.clone())).to_string(),
            "show(-d)"
        );
        assert_eq!(ActionLabel::send(Port::new("o"), Arg::plus(d)).to_string(), "o!+d");
    }

    #[test]
    fn renaming_fixes_tau() {
        let bad = Renaming::new([(ActionLabel::tau(), ActionLabel::plain("a"))]);
        assert!(bad.is_err());
        // mapping a visible label to tau is allowed
        let f = Renaming::new([(ActionLabel::plain("exit"), ActionLabel::tau())]).unwrap();
        assert_eq!(f.apply(&ActionLabel::plain("exit")), ActionLabel::tau());
        assert_eq!(f.apply(&ActionLabel::tau()), ActionLabel::tau());
        assert_eq!(f.apply(&ActionLabel::plain("b")), ActionLabel::plain("b"));
    }
}
