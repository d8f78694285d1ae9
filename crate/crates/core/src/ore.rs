//! Matrix differential operators `Σ A_k D^k` with coefficients to the left of
//! the powers of `D`, and their action on wave functions.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{rat::binomial, Derivation, MPoly, Rat, RatFunc, Var};
use crate::linalg::Mat;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OreOp {
    n: usize,
    deriv: Derivation,
    coeffs: Vec<Mat>,
}

impl OreOp {
    pub fn new(n: usize, deriv: Derivation, coeffs: Vec<Mat>) -> Result<Self> {
        for c in &coeffs {
            if c.rows() != n || c.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "operator coefficient is {}x{}, expected {n}x{n}",
                    c.rows(),
                    c.cols()
                )));
            }
        }
        let mut op = OreOp { n, deriv, coeffs };
        op.trim();
        Ok(op)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Mat::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero(n: usize, deriv: Derivation) -> Self {
        OreOp {
            n,
            deriv,
            coeffs: Vec::new(),
        }
    }

    pub fn identity(n: usize, deriv: Derivation) -> Self {
        Self::from_mat(Mat::identity(n), deriv)
    }

    /// Multiplication by the matrix function `a`.
    pub fn from_mat(a: Mat, deriv: Derivation) -> Self {
        Self::monomial(a, 0, deriv).expect("square coefficient")
    }

    /// `a * D^k`.
    pub fn monomial(a: Mat, k: usize, deriv: Derivation) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut coeffs = vec![Mat::zeros(n, n); k];
        coeffs.push(a);
        OreOp::new(n, deriv, coeffs)
    }

    /// `D * I_n`.
    pub fn d(n: usize, deriv: Derivation) -> Self {
        Self::monomial(Mat::identity(n), 1, deriv).expect("square identity")
    }

    /// `h(D) * I_n` for a scalar polynomial `h` given by ascending coefficients.
    pub fn scalar_poly(n: usize, deriv: Derivation, h: &[Rat]) -> Self {
        let coeffs = h
            .iter()
            .map(|c| Mat::scalar(n, RatFunc::constant(c.clone())))
            .collect();
        OreOp::new(n, deriv, coeffs).expect("square coefficients")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn derivation(&self) -> &Derivation {
        &self.deriv
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    /// Coefficient of `D^k`, zero beyond the order.
    pub fn coeff(&self, k: usize) -> Mat {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.n, self.n))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power of `D` present; zero for the zero operator.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Mat {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.n, self.n))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(Mat::is_identity)
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.coeffs.iter().any(|c| c.mentions(v))
    }

    pub fn is_constant_coefficient(&self) -> bool {
        self.coeffs.iter().all(Mat::is_constant)
    }

    pub fn has_polynomial_coefficients(&self) -> bool {
        self.coeffs.iter().all(Mat::is_polynomial)
    }

    /// Replaces the derivation; allowed only when the two derivations agree
    /// on every variable the coefficients mention.
    pub fn with_derivation(&self, deriv: Derivation) -> Result<Self> {
        if deriv.var() != self.deriv.var() {
            return Err(Error::ContextMismatch(format!(
                "operator in {} cannot be rebased to {}",
                self.deriv, deriv
            )));
        }
        for v in self.deriv.disagreement(&deriv) {
            if self.mentions(v) {
                return Err(Error::ContextMismatch(format!(
                    "coefficients mention {} on which the derivations differ",
                    v.name()
                )));
            }
        }
        Ok(OreOp {
            n: self.n,
            deriv,
            coeffs: self.coeffs.clone(),
        })
    }

    /// The derivation under which `self` and `other` can be combined.
    fn joint(&self, other: &OreOp) -> Result<Derivation> {
        if self.n != other.n {
            return Err(Error::ContextMismatch(format!(
                "operator sizes {} and {} differ",
                self.n, other.n
            )));
        }
        if self.deriv.var() != other.deriv.var() {
            return Err(Error::ContextMismatch(format!(
                "operators in {} and {}",
                self.deriv, other.deriv
            )));
        }
        let diff = self.deriv.disagreement(&other.deriv);
        if diff.is_empty() {
            return Ok(self.deriv.clone());
        }
        let a = diff.iter().any(|&v| self.mentions(v));
        let b = diff.iter().any(|&v| other.mentions(v));
        match (a, b) {
            (_, false) => Ok(self.deriv.clone()),
            (false, true) => Ok(other.deriv.clone()),
            (true, true) => Err(Error::ContextMismatch(
                "operators use incompatible derivations".into(),
            )),
        }
    }

    pub fn add(&self, other: &OreOp) -> Result<OreOp> {
        let deriv = self.joint(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        OreOp::new(self.n, deriv, coeffs)
    }

    pub fn sub(&self, other: &OreOp) -> Result<OreOp> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> OreOp {
        OreOp {
            n: self.n,
            deriv: self.deriv.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> OreOp {
        let coeffs = self.coeffs.iter().map(|m| m.scale_rat(c)).collect();
        OreOp::new(self.n, self.deriv.clone(), coeffs).expect("same shape")
    }

    /// `a ∘ self` for a matrix function `a`.
    pub fn left_mul(&self, a: &Mat) -> Result<OreOp> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| a.try_mul(c))
            .collect::<Result<_>>()?;
        OreOp::new(self.n, self.deriv.clone(), coeffs)
    }

    /// Ore product: `D^i ∘ B = Σ_r C(i, r) B^{(r)} D^{i-r}`.
    pub fn compose(&self, other: &OreOp) -> Result<OreOp> {
        let deriv = self.joint(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(OreOp::zero(self.n, deriv));
        }
        let n = self.n;
        let mut out = vec![Mat::zeros(n, n); self.order() + other.order() + 1];
        for (j, b) in other.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            // derivatives of B_j up to the order of self
            let mut ders = vec![b.clone()];
            for r in 1..=self.order() {
                let next = ders[r - 1].derive(&deriv);
                ders.push(next);
            }
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (r, br) in ders.iter().enumerate().take(i + 1) {
                    if br.is_zero() {
                        continue;
                    }
                    let c = binomial(i, r);
                    let term = (a * br).scale_rat(&c);
                    let k = i - r + j;
                    out[k] = &out[k] + &term;
                }
            }
        }
        OreOp::new(n, deriv, out)
    }

    pub fn pow(&self, e: usize) -> Result<OreOp> {
        let mut acc = OreOp::identity(self.n, self.deriv.clone());
        for _ in 0..e {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// `Σ A_k f^{(k)}` for an `n x c` matrix function `f`.
    pub fn apply(&self, f: &Mat) -> Result<Mat> {
        if f.rows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "operator of size {} applied to {} rows",
                self.n,
                f.rows()
            )));
        }
        let mut acc = Mat::zeros(f.rows(), f.cols());
        let mut der = f.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                der = der.derive(&self.deriv);
            }
            if !a.is_zero() {
                acc = &acc + &(a * &der);
            }
        }
        Ok(acc)
    }

    /// Right Euclidean division `self = Q ∘ p + R` with `order R < order p`.
    pub fn right_divide(&self, p: &OreOp) -> Result<(OreOp, OreOp)> {
        let deriv = self.joint(p)?;
        if p.is_zero() {
            return Err(Error::SingularLeadingCoefficient);
        }
        let m = p.order();
        let inv = p
            .leading()
            .inverse()
            .map_err(|_| Error::SingularLeadingCoefficient)?;
        let mut q = OreOp::zero(self.n, deriv.clone());
        let mut r = self.clone();
        while !r.is_zero() && r.order() >= m {
            let k = r.order() - m;
            let t = OreOp::monomial(&r.leading() * &inv, k, deriv.clone())?;
            q = q.add(&t)?;
            let before = r.order();
            r = r.sub(&t.compose(p)?)?;
            debug_assert!(r.is_zero() || r.order() < before);
        }
        Ok((q, r))
    }

    /// Monomials `(i, k, C)` meaning `Σ v^i D^k C` with constant `C`, where
    /// `v` is the differentiation variable. Sorted by descending `(i, k)`.
    pub fn normal_order(&self) -> Result<Vec<(usize, usize, Mat)>> {
        let v = self.deriv.var();
        let n = self.n;
        let mut monos: std::collections::BTreeMap<(usize, usize), Mat> = Default::default();
        for (k, a) in self.coeffs.iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    let e = a.get(r, c);
                    if e.is_zero() {
                        continue;
                    }
                    if !e.is_polynomial() || Var::ALL.iter().any(|&w| w != v && e.mentions(w)) {
                        return Err(Error::NonPolynomialCoefficients);
                    }
                    for (i, coef) in e.num().coeffs_in(v).into_iter().enumerate() {
                        let Some(cv) = coef.constant_value() else {
                            return Err(Error::NonPolynomialCoefficients);
                        };
                        if cv == Rat::default() {
                            continue;
                        }
                        let slot = monos.entry((i, k)).or_insert_with(|| Mat::zeros(n, n));
                        slot.set(r, c, RatFunc::constant(cv));
                    }
                }
            }
        }
        Ok(monos.into_iter().rev().map(|((i, k), c)| (i, k, c)).collect())
    }

    /// Reassembles `Σ v^i D^k C`.
    pub fn from_normal_order(
        n: usize,
        deriv: Derivation,
        monos: &[(usize, usize, Mat)],
    ) -> Result<OreOp> {
        let v = deriv.var();
        let mut acc = OreOp::zero(n, deriv.clone());
        for (i, k, c) in monos {
            let vi = RatFunc::from_poly(MPoly::var_pow(v, *i as u32));
            acc = acc.add(&OreOp::monomial(c.scale(&vi), *k, deriv.clone())?)?;
        }
        Ok(acc)
    }
}

/// `(P', g, Q', d)` with `P' = d P`, `Q' = Q ∘ d`, `g = d^2 I`, where `d` is
/// the least power of the radical of the common denominator making both
/// `P'` and `Q'` polynomial.
pub fn clear_denominators(p: &OreOp, q: &OreOp) -> Result<(OreOp, Mat, OreOp, RatFunc)> {
    let deriv = p.joint(q)?;
    let n = p.size();
    let mut e = MPoly::one();
    for c in p.coeffs().iter().chain(q.coeffs()) {
        for x in c.entries() {
            if !x.den().is_one() {
                e = lcm_poly(&e, x.den());
            }
        }
    }
    let finish = |d: RatFunc| -> Result<(OreOp, Mat, OreOp, RatFunc)> {
        let dm = Mat::scalar(n, d.clone());
        let p2 = p.left_mul(&dm)?;
        let q2 = q.compose(&OreOp::from_mat(dm, deriv.clone()))?;
        Ok((p2, Mat::scalar(n, &d * &d), q2, d))
    };
    if e.is_one() {
        return finish(RatFunc::one());
    }
    let de = deriv.apply_poly(&e);
    let g = crate::exact::poly_gcd(&e, &de);
    let radical = e.exact_div(&g).expect("gcd divides");
    let s = p.order().max(q.order()) + 1;
    let bound = e.total_degree() as usize * s + 1;
    let mut d = MPoly::one();
    for _ in 0..bound {
        d = &d * &radical;
        let (p2, g2, q2, dd) = finish(RatFunc::from_poly(d.clone()))?;
        if p2.has_polynomial_coefficients() && q2.has_polynomial_coefficients() {
            return Ok((p2, g2, q2, dd));
        }
    }
    finish(RatFunc::from_poly(e.pow(s as u32)))
}

fn lcm_poly(a: &MPoly, b: &MPoly) -> MPoly {
    let g = crate::exact::poly_gcd(a, b);
    (a * b).exact_div(&g).expect("gcd divides").unit_normal().1
}

impl fmt::Display for OreOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let d = format!("D{}", self.deriv.var().name());
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*{d}")?,
                _ => write!(f, "{c}*{d}^{k}")?,
            }
        }
        Ok(())
    }
}

/// A matrix-valued function of `x` and `z` on which operators in `x` act from
/// the left and operators in `z` act from the right.
pub trait Wave: Clone {
    /// `∂_x Ψ`.
    fn dx(&self) -> Self;
    /// `∂_z Ψ` (plain derivative, no sign).
    fn dz(&self) -> Self;
    /// `a(x) Ψ`.
    fn left_mul(&self, a: &Mat) -> Result<Self>;
    /// `Ψ a(z)`.
    fn right_mul(&self, a: &Mat) -> Result<Self>;
    fn plus(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
}

fn check_var(op: &OreOp, v: Var) -> Result<()> {
    if op.derivation().var() != v {
        return Err(Error::ContextMismatch(format!(
            "expected an operator in {}, got {}",
            v.name(),
            op.derivation()
        )));
    }
    Ok(())
}

/// `P Ψ = Σ A_k ∂_x^k Ψ`.
pub fn apply_left<W: Wave>(p: &OreOp, psi: &W) -> Result<W> {
    check_var(p, Var::X)?;
    let mut acc = psi.zero_like();
    let mut der = psi.clone();
    for (k, a) in p.coeffs().iter().enumerate() {
        if k > 0 {
            der = der.dx();
        }
        if !a.is_zero() {
            acc = acc.plus(&der.left_mul(a)?);
        }
    }
    Ok(acc)
}

/// `Ψ · S` with `Ψ · (a ∂_z^k) = (-1)^k ∂_z^k (Ψ a)`.
pub fn apply_right<W: Wave>(psi: &W, s: &OreOp) -> Result<W> {
    check_var(s, Var::Z)?;
    let mut acc = psi.zero_like();
    for (k, a) in s.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mut t = psi.right_mul(a)?;
        for _ in 0..k {
            t = t.dz();
        }
        if k % 2 == 1 {
            t = t.negated();
        }
        acc = acc.plus(&t);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_ratfunc;

    fn m(rows: &[&[&str]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_ratfunc(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn s(e: &str) -> Mat {
        m(&[&[e]])
    }

    fn op(cs: &[Mat]) -> OreOp {
        OreOp::new(cs[0].rows(), Derivation::dx(), cs.to_vec()).unwrap()
    }

    #[test]
    fn leibniz() {
        let d = OreOp::d(1, Derivation::dx());
        let x = op(&[s("x")]);
        assert_eq!(d.compose(&x).unwrap(), op(&[s("1"), s("x")]));
        let inv = op(&[s("1/x")]);
        assert_eq!(d.compose(&inv).unwrap(), op(&[s("-1/x^2"), s("1/x")]));
    }

    #[test]
    fn second_derivative_factorization() {
        let a = m(&[&["1/x", "-1/x^2"], &["0", "1/x"]]);
        let i2 = Mat::identity(2);
        let p = op(&[-&a, i2.clone()]);
        let q = op(&[a.clone(), i2.clone()]);
        let l = op(&[Mat::zeros(2, 2), Mat::zeros(2, 2), i2.clone()]);
        assert_eq!(q.compose(&p).unwrap(), l);
        let (qq, r) = l.right_divide(&p).unwrap();
        assert_eq!(qq, q);
        assert!(r.is_zero());
        let (p2, g, q2, d) = clear_denominators(&p, &q).unwrap();
        assert_eq!(d, parse_ratfunc("x^2").unwrap());
        assert_eq!(g, Mat::scalar(2, parse_ratfunc("x^4").unwrap()));
        let monos = p2.normal_order().unwrap();
        assert_eq!(
            monos,
            vec![
                (2, 1, i2.clone()),
                (1, 0, -&i2),
                (0, 0, m(&[&["0", "1"], &["0", "0"]])),
            ]
        );
        let ginv = OreOp::from_mat(g.inverse().unwrap(), Derivation::dx());
        assert_eq!(q2.compose(&ginv).unwrap().compose(&p2).unwrap(), l);
    }

    #[test]
    fn division_examples() {
        let l = op(&[s("1"), s("x")]);
        let p = OreOp::d(1, Derivation::dx());
        let (q, r) = l.right_divide(&p).unwrap();
        assert_eq!(q, op(&[s("x")]));
        assert_eq!(r, op(&[s("1")]));
        let (q, r) = p.right_divide(&p).unwrap();
        assert_eq!(q, OreOp::identity(1, Derivation::dx()));
        assert!(r.is_zero());
        let sing = op(&[s("1"), s("0")]);
        assert!(sing.is_zero() || sing.order() == 0);
        let lead_sing = op(&[Mat::identity(2), m(&[&["1", "0"], &["0", "0"]])]);
        assert_eq!(l.right_divide(&lead_sing).err(), Some(Error::ContextMismatch("operator sizes 1 and 2 differ".into())));
        let l2 = OreOp::d(2, Derivation::dx()).pow(2).unwrap();
        assert_eq!(l2.right_divide(&lead_sing).err(), Some(Error::SingularLeadingCoefficient));
    }

    #[test]
    fn normal_order_examples() {
        let d = OreOp::d(1, Derivation::dx());
        let x2 = op(&[s("x^2")]);
        let dx2 = d.compose(&x2).unwrap();
        let i = Mat::identity(1);
        assert_eq!(
            dx2.normal_order().unwrap(),
            vec![(2, 1, i.clone()), (1, 0, i.scale_rat(&crate::exact::int(2)))]
        );
        let back = OreOp::from_normal_order(1, Derivation::dx(), &dx2.normal_order().unwrap()).unwrap();
        assert_eq!(back, dx2);
        assert_eq!(op(&[s("1/x")]).normal_order(), Err(Error::NonPolynomialCoefficients));
    }

    #[test]
    fn polynomial_operators_need_no_clearing() {
        let p = op(&[s("x"), s("1")]);
        let q = op(&[s("x^2 + 1")]);
        let (p2, g, q2, d) = clear_denominators(&p, &q).unwrap();
        assert!(d.is_one());
        assert!(g.is_identity());
        assert_eq!((p2, q2), (p, q));
    }
}
