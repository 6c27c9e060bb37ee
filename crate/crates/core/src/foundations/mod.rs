//! Shared ground types: data symbols, bags (multisets), action labels,
//! renaming functions and priority orders.
//!
//! Everything here is immutable after construction and cheap to clone;
//! all operations are pure.

mod bag;
mod label;
mod priority;

pub use bag::{Bag, DataSymbol};
pub use label::{ActionLabel, Arg, Polarity, Port, Renaming, RenamingError};
pub use priority::{maximal_labels, PriorityError, PriorityOrder};
