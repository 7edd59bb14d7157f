//! Special functions and adaptive quadrature underpinning the closed forms.
//!
//! Everything in this module is deterministic and table-free: the same
//! inputs produce bit-identical outputs on every platform, which the
//! regression suite relies on. The submodules are self-contained numeric
//! kernels; the network semantics live in [`crate::analytic`].

mod erf;
mod gamma;
mod hyp2f1;
mod quad;

pub use erf::{erf, erfc, erfcx};
pub use gamma::gamma_fn;
pub use hyp2f1::hyp2f1;
pub use quad::{integrate_1d, integrate_2d, QuadratureSpec};
