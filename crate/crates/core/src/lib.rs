//! Vertical tensor complementarity problems.
//!
//! Given two order-`m`, dimension-`n` tensors `A1`, `A2` and vectors `q1`, `q2`, the
//! problem asks for `x` with
//!
//! ```text
//! q1 + A1 x^(m-1) >= 0,   q2 + A2 x^(m-1) >= 0,   <q1 + A1 x^(m-1), q2 + A2 x^(m-1)> = 0
//! ```
//!
//! or equivalently `min(q1 + A1 x^(m-1), q2 + A2 x^(m-1)) = 0` componentwise.
//!
//! The crate is split into four layers:
//!
//! * [`tensor`]: dense and symmetric tensors, tensor-vector powers, the generalized
//!   tensor product and lattice operations on vectors.
//! * [`classes`]: certificate-based checks for the structured pair classes
//!   (VR0, VE, VP, VP-I, VP-II, strong VP, semi-positive) and for Z-, R- and
//!   strong M-tensors.
//! * [`solvers`]: the min-residual, a semismooth Newton method, a homotopy path
//!   follower, an active-set M-tensor solver and a brute-force grid oracle.
//! * [`workbench`]: instance files, reports, generators and the registry of worked
//!   examples used by the `vtcp` binary.

pub mod classes;
pub mod error;
mod numeric;
pub mod solvers;
pub mod tensor;
pub mod workbench;

pub use error::{Result, VtcpError};
pub use tensor::{DenseTensor, SymTensor};
