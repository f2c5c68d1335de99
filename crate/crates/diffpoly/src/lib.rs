//! Exact differential polynomials in the curvature κ and torsion τ of a space curve.
//!
//! Coefficients are Gaussian rationals. Polynomials are graded by scaling weight,
//! where κ^{(j)} and τ^{(j)} have weight j + 1.

mod coeff;
mod hierarchy;
mod poly;
mod reduce;

pub use coeff::GaussRat;
pub use hierarchy::{
    filament_fields, filament_integrands, monodromy_integrals, monodromy_integrands, zn_series,
    FilamentIntegral, FrameField,
};
pub use poly::{DiffPoly, FactorRecord, Monomial, Sym, TermRecord, Var};
pub use reduce::{
    equal_mod_total_derivative, monomials_of_weight, normal_form, TotalDerivative,
    MAX_REDUCTION_WEIGHT,
};

/// Shorthand for the real constant n/d.
pub fn q(n: i64, d: i64) -> GaussRat {
    GaussRat::real(n, d)
}

/// Shorthand for the imaginary constant i·n/d.
pub fn qi(n: i64, d: i64) -> GaussRat {
    GaussRat::imag(n, d)
}
