//! Exact products of kappa classes on moduli of curves of compact type.
//!
//! Any monomial `κ_{a1}···κ_{ak}` is expanded in the additive basis
//! `{κ_p : p a partition of the degree with at most d parts}` with exact
//! rational coefficients. Positive genus is handled through the genus-zero
//! model with `n + 2g` markings.
//!
//! Layout:
//! - [`multiset`], [`partition`]: index multisets, labeled set partitions,
//!   the refinement order, Stirling and Bell counts.
//! - [`numeric`]: factorials, binomials, multinomials, falling factorials.
//! - [`kappa`]: Faber's expansion and its inverse, the `λ`, `N` and `C_k`
//!   coefficients, the product coefficient by three independent routes.
//! - [`oracle`]: genus-zero ψ-integrals, pairings against boundary strata and
//!   the exact linear solve that recovers coefficients from pairings alone.
//! - [`identities`]: brute-force checkers for the supporting combinatorial
//!   identities, including a Prüfer-code tree oracle.
//! - [`reconcile`], [`verify`]: cross-validation sweeps.
//! - [`exec`]: sequential / rayon execution of sweeps.

pub mod cache;
pub mod error;
pub mod exec;
pub mod identities;
pub mod kappa;
pub mod linalg;
pub mod multiset;
pub mod numeric;
pub mod oracle;
pub mod partition;
pub mod reconcile;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use kappa::{KappaMonomial, KappaPoly, Method, ModuliContext, PsiPoly, TruncationVariant};
pub use multiset::IntMultiSet;
pub use numeric::BigRational;
pub use partition::SetPartition;
