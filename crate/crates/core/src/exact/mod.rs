//! The exact coefficient tower: rationals, polynomials, rational functions
//! and derivations.

pub mod deriv;
pub mod parse;
pub mod poly;
pub mod rat;
pub mod ratfunc;

pub use deriv::{derive, Derivation};
pub use parse::{parse_poly, parse_ratfunc};
pub use poly::{poly_gcd, MPoly, Var};
pub use rat::{int, parse_rat, rat, Rat};
pub use ratfunc::RatFunc;

/// `num / den` in canonical form.
pub fn ratfunc_normalize(num: MPoly, den: MPoly) -> crate::Result<RatFunc> {
    RatFunc::new(num, den)
}
