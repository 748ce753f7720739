//! Exact geodesic counting on compact Riemannian symmetric spaces.
//!
//! A space is described by its infinitesimal data (restricted roots with
//! multiplicities and an inner product on the maximal flat torus `t`) and its
//! unit lattice `Γ = { γ ∈ t : exp_p(γ) = p }`. From that data the crate
//! computes, with exact rational arithmetic:
//!
//! - the Weyl group `W`, the centralizer `W^q` of a point modulo `Γ` and its
//!   reflection subgroup `W^q_0`;
//! - the fundamental lattice `Γ_0`, the central lattice `Γ_1` and the
//!   fundamental group `Γ/Γ_0`;
//! - the decomposition of `exp_p^{-1}(q)` into focal orbits, with the
//!   dimension, number of connected components and homotopy label of each;
//! - Dirichlet domains, cut points and first conjugate points.
//!
//! All torus coordinates are stored in π-units: the vector stored for a
//! tangent vector `H` is `H/π`, so the diagram condition `α(H) ∈ πℤ` is an
//! integrality test.

pub mod catalog;
pub mod diagram;
pub mod error;
pub mod exact;
pub mod geodesics;
pub mod lattice;
pub mod oracle;
pub mod root_datum;
pub mod weyl;

pub use catalog::SpaceSpec;
pub use error::{Error, Result};
pub use exact::{Rational, RationalMatrix, RationalVector, SmithDecomposition};
pub use geodesics::{FocalOrbitDescriptor, PointClassification, SymmetricSpace};
pub use lattice::LatticeBasis;
pub use root_datum::{Root, RootDatum};
pub use weyl::{SubgroupDescriptor, WeylElement, WeylGroup};
