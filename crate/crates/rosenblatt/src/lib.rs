//! Cumulants κ₂..κ₅ of the Rosenblatt distribution.
//!
//! The closed forms in [`cumulants`] are built on generalized hypergeometric
//! series at unit argument ([`specfun`], [`thomae`]). Two independent routes
//! check them: the operator recursion ([`vt`]) and direct
//! Monte-Carlo / quadrature of the defining integrals ([`oracle`]).
//!
//! ```
//! use rosenblatt::cumulants::kappa;
//! use rosenblatt::specfun::EvalConfig;
//!
//! let k4 = kappa(4, 0.25, &EvalConfig::default()).unwrap();
//! assert!((k4.value - 9.192).abs() < 5e-4);
//! ```

// `!(a < b)` style guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cumulants;
mod error;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod thomae;
pub mod vt;

pub use error::{Error, Result};
