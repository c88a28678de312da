//! Truncated and Signed Square Root (TSSR) activation and company.
//!
//! The crate bundles four pieces:
//!
//! - [`activation`]: TSSR plus eleven comparison activations as scalar
//!   forward/gradient pairs, with exact branch semantics and kink flags.
//! - [`batch`]: elementwise kernels over [`Tensor`], including an
//!   approximate TSSR mode built on a bit-trick reciprocal square root.
//! - [`audit`]: numeric verification of five activation properties (odd,
//!   monotone, differentiable, unbounded, continuous gradient) on a
//!   configurable grid, with witnesses and a claimed-vs-measured diff.
//! - [`nn`]: a small deterministic MLP/conv training core with pluggable
//!   catalog activations and seeded synthetic datasets.
//!
//! The core is `no_std` (alloc required); every transcendental goes
//! through `libm`, so results are bit-reproducible across platforms.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod activation;
pub mod audit;
pub mod batch;
pub mod math;
pub mod nn;
pub mod rng;
pub mod tensor;

pub use activation::{
    sign, tssr_backward, tssr_forward, ActivationKind, ActivationSpec, Grad, ParamError,
};
pub use audit::{audit, audit_matrix, AuditConfig, PropertyReport, Verdict};
pub use batch::{eval_batch, grad_batch, BatchGrad};
pub use tensor::{ShapeError, Tensor};
