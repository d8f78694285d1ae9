//! Derivations on `Q(x, u, z, t)`.
//!
//! A derivation is fixed by its values on the generators. The `x`-derivation
//! sends `u` to `u/m`, so `u` stands for `e^{x/m}` and every rational
//! exponential `e^{a x}` with `a*m` integral is the monomial `u^{a m}`.

use std::fmt;

use super::poly::{MPoly, Var, NVARS};
use super::rat::{int, Rat};
use super::ratfunc::RatFunc;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    var: Var,
    images: [MPoly; NVARS],
}

impl Derivation {
    /// `d/dx` with `u' = u/m`.
    pub fn dx_with_exp_scale(m: u32) -> Self {
        assert!(m > 0, "exponent scale must be positive");
        let mut images: [MPoly; NVARS] = Default::default();
        images[Var::X.index()] = MPoly::one();
        images[Var::U.index()] = MPoly::var(Var::U).scale(&int(m as i64).recip());
        Derivation {
            var: Var::X,
            images,
        }
    }

    /// `d/dx` with `u' = u`, the canonical choice for `u`-free data.
    pub fn dx() -> Self {
        Self::dx_with_exp_scale(1)
    }

    pub fn dz() -> Self {
        Self::plain(Var::Z)
    }

    pub fn dt() -> Self {
        Self::plain(Var::T)
    }

    fn plain(v: Var) -> Self {
        let mut images: [MPoly; NVARS] = Default::default();
        images[v.index()] = MPoly::one();
        Derivation { var: v, images }
    }

    /// Derivation by variable name; `m` is the `u`-scale used for `x`.
    pub fn by_name(name: &str, m: u32) -> Result<Self> {
        Ok(match Var::from_name(name)? {
            Var::X => Self::dx_with_exp_scale(m),
            v => Self::plain(v),
        })
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn image(&self, v: Var) -> &MPoly {
        &self.images[v.index()]
    }

    /// Variables on which `self` and `other` act differently.
    pub fn disagreement(&self, other: &Derivation) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|v| self.images[v.index()] != other.images[v.index()])
            .collect()
    }

    pub fn apply_poly(&self, p: &MPoly) -> MPoly {
        let mut acc = MPoly::zero();
        for v in Var::ALL {
            let img = &self.images[v.index()];
            if img.is_zero() || !p.mentions(v) {
                continue;
            }
            acc = &acc + &(&p.partial(v) * img);
        }
        acc
    }

    /// Quotient rule, normalized.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let dn = self.apply_poly(f.num());
        if f.den().is_one() {
            return RatFunc::from_poly(dn);
        }
        let dd = self.apply_poly(f.den());
        if dd.is_zero() {
            return RatFunc::new(dn, f.den().clone()).expect("nonzero denominator");
        }
        let num = &(&dn * f.den()) - &(f.num() * &dd);
        RatFunc::new(num, f.den() * f.den()).expect("nonzero denominator")
    }

    pub fn apply_n(&self, f: &RatFunc, k: usize) -> RatFunc {
        let mut g = f.clone();
        for _ in 0..k {
            g = self.apply(&g);
        }
        g
    }

    /// `1/m` where `u' = (1/m) u`, or zero if `u` is a constant.
    pub fn exp_rate(&self) -> Rat {
        self.images[Var::U.index()]
            .terms()
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_default()
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d/d{}", self.var.name())
    }
}

/// Derivative of `f` under the derivation `d`.
pub fn derive(f: &RatFunc, d: &Derivation) -> RatFunc {
    d.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse::parse_ratfunc;
    use proptest::prelude::*;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(derive(&rf("1/x"), &Derivation::dx()), rf("-1/x^2"));
        assert_eq!(derive(&rf("u"), &Derivation::dx_with_exp_scale(2)), rf("u/2"));
        assert_eq!(derive(&rf("x*u^2"), &Derivation::dx()), rf("u^2 + 2*x*u^2"));
        assert_eq!(derive(&rf("x*z"), &Derivation::dz()), rf("x"));
        assert_eq!(derive(&rf("u"), &Derivation::dz()), RatFunc::zero());
        assert!(Derivation::by_name("w", 1).is_err());
    }

    #[test]
    fn negative_exponential_power() {
        // e^{-x} = u^{-1} with m = 1
        assert_eq!(derive(&rf("1/u"), &Derivation::dx()), rf("-1/u"));
        // e^{-x/2} = 1/u with m = 2
        assert_eq!(
            derive(&rf("x/u"), &Derivation::dx_with_exp_scale(2)),
            rf("(1 - x/2)/u")
        );
    }

    fn small_rf() -> impl Strategy<Value = RatFunc> {
        let atom = prop::sample::select(vec![
            "x", "u", "z", "x + 1", "x*u - 2", "1/2", "x^2 - u", "z*x + 3",
        ]);
        (atom.clone(), atom.clone(), atom).prop_map(|(a, b, c)| {
            let den = rf(c);
            let den = if den.is_zero() { RatFunc::one() } else { den };
            (&rf(a) * &rf(b)).div(&den).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn leibniz_and_linearity(f in small_rf(), g in small_rf(), m in 1u32..4) {
            let d = Derivation::dx_with_exp_scale(m);
            let lhs = derive(&(&f * &g), &d);
            let rhs = &(&derive(&f, &d) * &g) + &(&f * &derive(&g, &d));
            prop_assert_eq!(lhs, rhs);
            let sum = derive(&(&f + &g), &d);
            prop_assert_eq!(sum, &derive(&f, &d) + &derive(&g, &d));
        }

        #[test]
        fn normalization_idempotent(f in small_rf(), g in small_rf()) {
            let h = &f + &g;
            let again = RatFunc::new(h.num().clone(), h.den().clone()).unwrap();
            prop_assert_eq!(again, h);
        }
    }
}
