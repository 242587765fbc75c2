//! Exact computations for the quaternionic Dolbeault double complex on flat `H^n`.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`], [`poly`], [`form`]: rational linear algebra, polynomials and
//!   sparse exterior forms with polynomial coefficients.
//! - [`sp1`]: the `sp(1)` action of `I, J, K` on forms and the Casimir operator.
//! - [`decomposition`]: weight multiplicities, the `ε^n_{k,r}` coefficients and
//!   the Casimir eigenspaces `E_{k,r}` with their projectors.
//! - [`qk_forms`]: Kähler forms, the fundamental 4-form and the effective
//!   (Kraines–Bonan) decomposition.
//! - [`operators`]: `D'` and `D̄`, double complex checks and polynomial
//!   cohomology dimensions.
//! - [`symbol`]: principal symbols, the fine spaces `E^{l,m}_{k,r}`, lie-in
//!   conditions and ellipticity verdicts.
//! - [`real_dolbeault`]: the U(1) analogue on `C^2`.
//! - [`quaternion`]: the quaternion product and quaternion-valued forms.
//! - [`qholo`]: the diagonal `sp(1)` action on quaternion-valued forms and
//!   q-holomorphic functions.
//! - [`json`]: the Form / QFunction interchange formats.

pub mod cache;
pub mod decomposition;
pub mod error;
pub mod form;
pub mod json;
pub mod linalg;
pub mod operators;
pub mod poly;
pub mod qholo;
pub mod qk_forms;
pub mod quaternion;
pub mod real_dolbeault;
pub mod space;
pub mod sp1;
pub mod symbol;

pub use error::{Error, Result};
pub use form::{Form, MultiIndex};
pub use linalg::{Q, SparseVec};
pub use poly::{Monomial, Poly};
pub use sp1::Generator;
pub use space::{LinearMap, SpaceBasis};
