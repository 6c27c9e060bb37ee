use std::fmt;

use crate::foundations::ActionLabel;

/// A distinguishing experiment: the attacker's action path to the point of
/// failure, plus the observation that fails there. Witnesses never traverse
/// horizon states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub steps: Vec<ActionLabel>,
    pub reason: WitnessReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessReason {
    /// One side accepts (up to inert tau steps) and the other cannot.
    AcceptanceMismatch,
    /// One side offers the action and the other has no matching response.
    MissingAction(ActionLabel),
    /// One side diverges within the candidate class and the other does not.
    DivergenceMismatch,
}

impl Witness {
    /// True when the experiment mentions `label`, either along the path or
    /// as the missing action.
    pub fn mentions(&self, label: &ActionLabel) -> bool {
        self.steps.contains(label)
            || matches!(&self.reason, WitnessReason::MissingAction(l) if l == label)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.steps.is_empty() {
            let path: Vec<String> = self.steps.iter().map(|l| l.to_string()).collect();
            write!(f, "after {}: ", path.join("."))?;
        }
        match &self.reason {
            WitnessReason::AcceptanceMismatch => f.write_str("acceptance differs"),
            WitnessReason::MissingAction(l) => write!(f, "only one side can do {}", l),
            WitnessReason::DivergenceMismatch => f.write_str("divergence differs"),
        }
    }
}
