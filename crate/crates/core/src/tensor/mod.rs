//! Dense and symmetric tensors with the contraction, product and lattice primitives
//! used throughout the crate.

mod dense;
mod sym;
pub mod vector;

pub use dense::DenseTensor;
pub use sym::{distinct_count, distinct_indices, SymTensor};
pub use vector::{entrywise_power, lattice_ops, Lattice};

