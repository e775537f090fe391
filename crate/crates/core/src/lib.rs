//! Exact topological entropy and scale of continuous endomorphisms of
//! finite-rank locally compact abelian p-groups and of the Heisenberg groups
//! over `Z_p` and `Q_p`.
//!
//! Two independent routes are provided for every quantity: closed forms read
//! off the Newton polygon of a characteristic polynomial, and brute-force
//! limits over cotrajectories of compact open subgroups.

pub mod cli;
pub mod engine;
pub mod error;
pub mod group;
pub mod heisenberg;
pub mod lattice;
pub mod matrix;
pub mod newton;
pub mod padic;
pub mod periodic;
pub mod report;

pub use engine::{htop_oracle, min_scale_search, moeller_scale_oracle, DEFAULT_CAP, DEFAULT_WINDOW};
pub use error::{Error, Result};
pub use group::{BlockEndomorphism, Classification, Component, FiniteRankPGroup, MixedElement};
pub use lattice::{integral_preimage_lattice, Lattice};
pub use matrix::{charpoly, MonicPolynomial, RationalMatrix};
pub use newton::{newton_polygon, yuzvinski_entropy, yuzvinski_scale};
pub use padic::{pnorm, vp, EntropyValue, ExtendedValuation, Prime, Q};
pub use periodic::{PeriodicEndomorphism, PeriodicGroup};
