//! Compilers between recursive specifications and parallel pushdown
//! automata, in both directions, plus the regular-process-with-bag
//! characterisation harness.

mod to_ppda;
mod to_spec;

pub use to_ppda::{bcp_spec_to_ppda, spec_to_ppda, CompiledPpda, ToPpdaError};
pub use to_spec::{
    one_state_ppda_to_bpp_theta, ppda_to_bcp_theta, regular_with_bag, BagFlavor, CompiledSpec,
    ToSpecError,
};
