//! Exact and numeric workbench for toric quantum cohomology.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact_algebra`]: rationals, polynomials, Gröbner bases, finite-dimensional
//!   quotient algebras, exact matrix invariants and a complex eigensolver.
//! * [`lattice_fan`]: smooth fans, primitive collections and Batyrev relations.
//! * [`polytope`]: moment polytopes, reflexivity, monotone normalisation, chops.
//! * [`quantum_algebra`]: Batyrev presentations of `QH*`, `SH*` as a localisation,
//!   the change of Novikov parameter and eigenvalue transfer from a base to a bundle.
//! * [`superpotential`]: Landau–Ginzburg superpotentials, Jacobian rings and
//!   critical points.
//! * [`bundle_blowup`]: line-bundle total spaces and toric blow-ups.
//! * [`catalog`]: projective spaces, `P¹×P¹` and affine space with standard data.
//! * [`perturbation`]: eigenprojections and Grassmannian convergence for
//!   holomorphic matrix families.

pub mod bundle_blowup;
pub mod catalog;
pub mod error;
pub mod exact_algebra;
pub mod lattice_fan;
mod lp;
pub mod perturbation;
pub mod polytope;
pub mod quantum_algebra;
pub mod superpotential;

pub use error::{Error, Result};
pub use exact_algebra::{
    char_min_poly, complex_eigen, groebner_basis, jordan_profile, localize, normal_form,
    quotient_algebra, ComplexMatrix, GroebnerBasis, JordanProfile, Monomial, Polynomial,
    QuotientAlgebra, RationalMatrix, Ring, UniPoly,
};
pub use bundle_blowup::{LineBundleSpec, Surgery};
pub use lattice_fan::{CurveClass, Fan, FanReport, LatticeVector, PrimitiveRelation};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
pub use perturbation::{EigenPath, MatrixFamily, Projector, Subspace};
pub use polytope::{MomentPolytope, VertexSet};
pub use quantum_algebra::{EigenFamilyReport, PhiMap, Presentation, PresentationMode};
pub use superpotential::{CriticalPoint, JacAlgebra, Superpotential};
