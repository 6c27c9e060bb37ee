// Error values carry full action labels and label pairs for diagnostics;
// they only travel on cold paths.
#![allow(clippy::result_large_err)]

//! A workbench for parallel pushdown automata and basic parallel process
//! algebras.
//!
//! Both models are interpreted as labelled transition systems (`lts`): a
//! parallel pushdown automaton (`ppda`) steps a control state over a bag of
//! data symbols, and a recursive process specification (`algebra`) steps
//! expressions by structural operational rules. The `transforms` module
//! compiles between the two representations in both directions, and
//! `equivalence` decides strong, branching and divergence-preserving
//! branching bisimilarity on bounded explorations of the resulting graphs.

pub mod algebra;
pub mod equivalence;
pub mod foundations;
pub mod lts;
pub mod ppda;
pub mod transforms;

pub(crate) mod textutil;
