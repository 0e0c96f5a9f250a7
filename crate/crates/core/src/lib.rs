//! Exact verification of scattering matrices, traces, Plancherel measures and
//! Whittaker-space dimensions for reducible unitary genuine principal series
//! of odd-fold metaplectic covers of SL2 over a p-adic field, in the tame case.
//!
//! All identities are checked by exact equality in a cyclotomic number field
//! Q(ζ_N); no floating-point arithmetic enters any verdict.

pub mod cyclo;
pub mod error;
pub mod finite_field;
pub mod linalg;
pub mod local_field;
pub mod par;
pub mod report;
pub mod tate;
pub mod verify;
pub mod whittaker;

pub use cyclo::{CycloField, CycloNum, Rat};
pub use error::Error;
pub use finite_field::{FqDescriptor, FqElem};
pub use linalg::Matrix;
pub use local_field::{ClassModN, FStarElem, IsotropicPair, TameLocalDatum};
pub use tate::{AdditiveCharData, LaurentRat, TameMultChar};
pub use whittaker::ScatteringReport;
