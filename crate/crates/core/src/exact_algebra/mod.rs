//! Exact polynomial algebra over Q with a numeric companion layer.

pub mod groebner;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod quotient;
pub mod univariate;

pub use groebner::{groebner_basis, normal_form, GroebnerBasis};
pub use matrix::{integer_kernel, RationalMatrix};
pub use numeric::{complex_eigen, complex_schur, poly_roots, spectral_order, ComplexMatrix};
pub use poly::{format_rational, parse_rational, rat, ratio, Monomial, Polynomial, Ring};
pub use quotient::{localize, nilpotent_dimension, quotient_algebra, QuotientAlgebra};
pub use univariate::{
    char_min_poly, exact_spectrum, jordan_profile, JordanEntry, JordanProfile, UniPoly,
};
