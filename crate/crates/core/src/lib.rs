//! hamforge: circuit-to-Hamiltonian constructions and exact-diagonalization
//! verification of their spectral claims at desk scale.
//!
//! The crate builds the parallel-query Hamiltonian, the Cook-Levin hardness
//! instance (plain and spatially sparse), analog-simulation reductions, and a
//! 1D chain of 8-dimensional qudits with sifter penalties, then checks the
//! quantitative statements about their spectra numerically.

pub mod apxsim;
pub mod circuit;
pub mod cooklevin;
pub mod error;
pub mod layout;
pub mod linalg;
pub mod onedim;
pub mod operator;
pub mod query;
pub mod report;
pub mod simulate;
pub mod spectral;
pub mod textio;

pub use error::{HamError, Result};
pub use layout::{RegisterLayout, SiteId};
pub use operator::{embed_local_term, Hamiltonian, LocalTerm, StateVector};
