//! Torus-equivariant Schubert structure constants for finite Weyl groups.
//!
//! The [`recurrence`] engine computes `c_{wv}^u` by descent-cycling and a
//! Chern-class recurrence, bottoming out in restriction formulas from
//! [`billey`]. The [`oracle`] expands products of GKM classes ([`gkm`])
//! directly in the Schubert basis and serves as an independent check.

pub mod billey;
pub mod error;
pub mod gkm;
pub mod oracle;
pub mod polyring;
pub mod recurrence;
pub mod rootsys;

pub use error::{Error, Result};
pub use polyring::{Basis, LinearForm, Polynomial};
pub use rootsys::{ElementId, Root, RootSystem, WeylElement, WeylGroup};
