//! Normalized rational functions in `x, u, z, t`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{poly_gcd, MPoly, Var};
use super::rat::Rat;
use crate::error::{Error, Result};

/// `num / den` with `gcd(num, den) = 1` and `den` primitive over the integers
/// with a positive leading coefficient. Zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    /// Canonical form of `num / den`.
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: MPoly, den: MPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = poly_gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        Self::unit_fix(num, den)
    }

    fn unit_fix(num: MPoly, den: MPoly) -> Self {
        let (c, den) = den.unit_normal();
        let num = if c.is_one() { num } else { num.scale(&c.recip()) };
        RatFunc { num, den }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc {
            num: MPoly::constant(c),
            den: MPoly::one(),
        }
    }

    pub fn int(k: i64) -> Self {
        Self::constant(super::rat::int(k))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(MPoly::var(v))
    }

    pub fn from_poly(p: MPoly) -> Self {
        RatFunc {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.num.mentions(v) || self.den.mentions(v)
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::unit_fix(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, k: i32) -> Result<RatFunc> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Substitutes a rational value for `v`.
    pub fn eval_var(&self, v: Var, value: &Rat) -> Result<RatFunc> {
        RatFunc::new(self.num.eval_var(v, value), self.den.eval_var(v, value))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let simple_den = self.den.is_monomial() && self.den.vars().len() == 1;
        if simple_den {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return RatFunc::normalize(&self.num + &rhs.num, self.den.clone());
        }
        // Any common factor of the new numerator and denominator divides g.
        let g = poly_gcd(&self.den, &rhs.den);
        let b1 = self.den.exact_div(&g).expect("gcd divides");
        let d1 = rhs.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        let den = &self.den * &d1;
        if num.is_zero() {
            return RatFunc::zero();
        }
        let h = poly_gcd(&num, &g);
        if h.is_one() {
            RatFunc::unit_fix(num, den)
        } else {
            RatFunc::unit_fix(
                num.exact_div(&h).expect("gcd divides"),
                den.exact_div(&h).expect("gcd divides"),
            )
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        let g1 = poly_gcd(&self.num, &rhs.den);
        let g2 = poly_gcd(&rhs.num, &self.den);
        let a = self.num.exact_div(&g1).expect("gcd divides");
        let d = rhs.den.exact_div(&g1).expect("gcd divides");
        let c = rhs.num.exact_div(&g2).expect("gcd divides");
        let b = self.den.exact_div(&g2).expect("gcd divides");
        RatFunc::unit_fix(&a * &c, &b * &d)
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Rat> for RatFunc {
    fn from(c: Rat) -> Self {
        RatFunc::constant(c)
    }
}

impl From<MPoly> for RatFunc {
    fn from(p: MPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse::{parse_poly, parse_ratfunc};

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let p = |s| parse_poly(s).unwrap();
        assert_eq!(RatFunc::new(p("x^2 - 1"), p("x - 1")).unwrap(), rf("x + 1"));
        let half = RatFunc::new(p("2*x"), p("4")).unwrap();
        assert_eq!(half.num(), &p("1/2*x"));
        assert!(half.den().is_one());
        let q = RatFunc::new(p("x^2*u"), p("x*u^2")).unwrap();
        assert_eq!(q.num(), &p("x"));
        assert_eq!(q.den(), &p("u"));
        assert_eq!(RatFunc::new(p("x"), MPoly::zero()), Err(Error::ZeroDenominator));
    }

    #[test]
    fn denominator_sign_and_content() {
        let q = rf("x/(-2*x^2 - 2)");
        assert_eq!(q.den(), &parse_poly("x^2 + 1").unwrap());
        assert_eq!(q.num(), &parse_poly("-1/2*x").unwrap());
    }

    #[test]
    fn arithmetic_matches_unnormalized() {
        let a = rf("1/(x - 1)");
        let b = rf("x/(x^2 - 1)");
        // 1/(x-1) - x/(x^2-1) = 1/(x^2-1)
        assert_eq!(&a - &b, rf("1/(x^2 - 1)"));
        assert_eq!(&a * &b, rf("x/((x - 1)^2*(x + 1))"));
        assert_eq!(a.div(&b).unwrap(), rf("(x + 1)/x"));
        assert!(RatFunc::zero().inv().is_err());
    }

    #[test]
    fn display_parses_back() {
        for s in ["-x/(x + 1)", "3/2*x/(x^2*u)", "1/x^2", "(x*z - 1)/x", "-7/3"] {
            let f = rf(s);
            assert_eq!(rf(&f.to_string()), f, "{s} -> {f}");
        }
    }
}
