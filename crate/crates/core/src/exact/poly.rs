//! Sparse multivariate polynomials over the rationals.
//!
//! The variable set is fixed to `x < u < z < t`. Terms are kept sorted in
//! decreasing lexicographic order with `t` the most significant variable, so
//! two polynomials are equal iff their term lists are equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rat::{fmt_rat, Rat};
use crate::error::{Error, Result};

pub const NVARS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X = 0,
    U = 1,
    Z = 2,
    T = 3,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::X, Var::U, Var::Z, Var::T];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::U => "u",
            Var::Z => "z",
            Var::T => "t",
        }
    }

    pub fn from_name(s: &str) -> Result<Var> {
        match s {
            "x" => Ok(Var::X),
            "u" => Ok(Var::U),
            "z" => Ok(Var::Z),
            "t" => Ok(Var::T),
            other => Err(Error::UnknownVariable(other.to_string())),
        }
    }
}

pub type Exps = [u32; NVARS];

fn cmp_exps(a: &Exps, b: &Exps) -> Ordering {
    for i in (0..NVARS).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] += b[i];
    }
    r
}

fn divides_exps(a: &Exps, b: &Exps) -> bool {
    (0..NVARS).all(|i| a[i] <= b[i])
}

fn sub_exps(a: &Exps, b: &Exps) -> Exps {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] -= b[i];
    }
    r
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct MPoly {
    terms: Vec<(Exps, Rat)>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MPoly {
                terms: vec![([0; NVARS], c)],
            }
        }
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, k: u32) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = k;
        MPoly {
            terms: vec![(e, Rat::one())],
        }
    }

    pub fn monomial(e: Exps, c: Rat) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MPoly { terms: vec![(e, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms<I: IntoIterator<Item = (Exps, Rat)>>(it: I) -> Self {
        let mut v: Vec<(Exps, Rat)> = it.into_iter().collect();
        v.sort_by(|a, b| cmp_exps(&b.0, &a.0));
        let mut out: Vec<(Exps, Rat)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        MPoly { terms: out }
    }

    pub fn terms(&self) -> &[(Exps, Rat)] {
        &self.terms
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == [0; NVARS] && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == [0; NVARS])
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            Some(Rat::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Exps, Rat)> {
        self.terms.first()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| t.0[v.index()]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.0.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.terms.iter().any(|t| t.0[v.index()] > 0)
    }

    /// Variables that occur with a positive exponent.
    pub fn vars(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|v| self.mentions(*v)).collect()
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, e: &Exps, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(f, k)| (add_exps(e, f), k * c))
                .collect(),
        }
    }

    fn merge(&self, other: &MPoly, negate: bool) -> MPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match cmp_exps(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        MPoly { terms: out }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative.
    pub fn partial(&self, v: Var) -> MPoly {
        let i = v.index();
        MPoly::from_terms(self.terms.iter().filter(|t| t.0[i] > 0).map(|(e, c)| {
            let mut f = *e;
            f[i] -= 1;
            (f, c * Rat::from_integer(BigInt::from(e[i])))
        }))
    }

    /// Substitutes a rational value for `v`.
    pub fn eval_var(&self, v: Var, value: &Rat) -> MPoly {
        let i = v.index();
        MPoly::from_terms(self.terms.iter().map(|(e, c)| {
            let mut f = *e;
            let k = f[i];
            f[i] = 0;
            let mut p = c.clone();
            for _ in 0..k {
                p *= value;
            }
            (f, p)
        }))
    }

    /// Coefficients with respect to `v`: entry `k` multiplies `v^k`.
    pub fn coeffs_in(&self, v: Var) -> Vec<MPoly> {
        let i = v.index();
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Exps, Rat)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut f = *e;
            let k = f[i] as usize;
            f[i] = 0;
            buckets[k].push((f, c.clone()));
        }
        buckets.into_iter().map(MPoly::from_terms).collect()
    }

    pub fn from_coeffs_in(v: Var, coeffs: &[MPoly]) -> MPoly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (e, r) in &c.terms {
                let mut f = *e;
                f[v.index()] += k as u32;
                terms.push((f, r.clone()));
            }
        }
        MPoly::from_terms(terms)
    }

    /// Exact quotient, `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        let (de, dc) = d.leading()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let mut r = self.clone();
        let mut q = Vec::new();
        while let Some((re, rc)) = r.leading().cloned() {
            if !divides_exps(de, &re) {
                return None;
            }
            let e = sub_exps(&re, de);
            let c = rc / dc;
            r = r.merge(&d.mul_monomial(&e, &c), true);
            q.push((e, c));
        }
        Some(MPoly { terms: q })
    }

    /// Componentwise minimum exponent over all terms.
    fn monomial_content(&self) -> Exps {
        let mut m = match self.terms.first() {
            Some(t) => t.0,
            None => return [0; NVARS],
        };
        for (e, _) in &self.terms[1..] {
            for i in 0..NVARS {
                m[i] = m[i].min(e[i]);
            }
        }
        m
    }

    fn div_monomial(&self, m: &Exps) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (sub_exps(e, m), c.clone())).collect(),
        }
    }

    /// Splits `self = c * p` with `p` having coprime integer coefficients and
    /// a positive leading coefficient. Zero maps to `(1, 0)`.
    pub fn unit_normal(&self) -> (Rat, MPoly) {
        if self.is_zero() {
            return (Rat::one(), MPoly::zero());
        }
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            den = den.lcm(c.denom());
        }
        let mut num = BigInt::zero();
        for (_, c) in &self.terms {
            let k = c.numer() * (&den / c.denom());
            num = num.gcd(&k);
        }
        if self.terms[0].1.is_negative() {
            num = -num;
        }
        let c = Rat::new(num, den);
        let inv = c.recip();
        (c, self.scale(&inv))
    }

    pub fn primitive(&self) -> MPoly {
        self.unit_normal().1
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            let mono = fmt_monomial(e);
            if mono.is_empty() {
                write!(f, "{}", fmt_rat(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rat(&a))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn fmt_monomial(e: &Exps) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        match e[v.index()] {
            0 => {}
            1 => parts.push(v.name().to_string()),
            k => parts.push(format!("{}^{k}", v.name())),
        }
    }
    parts.join("*")
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.merge(rhs, false)
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.merge(rhs, true)
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        if self.is_zero() || rhs.is_zero() {
            return MPoly::zero();
        }
        if rhs.terms.len() == 1 {
            return self.mul_monomial(&rhs.terms[0].0, &rhs.terms[0].1);
        }
        if self.terms.len() == 1 {
            return rhs.mul_monomial(&self.terms[0].0, &self.terms[0].1);
        }
        let mut v = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, c) in &self.terms {
            for (b, d) in &rhs.terms {
                v.push((add_exps(a, b), c * d));
            }
        }
        MPoly::from_terms(v)
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

// ---------------------------------------------------------------------------
// gcd: subresultant remainder sequences on the recursive view D[v], where v is
// the most significant variable present and D = Q[remaining variables].
// ---------------------------------------------------------------------------

/// Normalized greatest common divisor: coprime integer coefficients and a
/// positive leading coefficient. `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mut m = [0; NVARS];
    for i in 0..NVARS {
        m[i] = ma[i].min(mb[i]);
    }
    let mono = MPoly::monomial(m, Rat::one());
    let a = a.div_monomial(&ma);
    let b = b.div_monomial(&mb);
    let rest = gcd_no_monomial(&a, &b);
    (&mono * &rest).primitive()
}

fn gcd_no_monomial(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    let pa = a.primitive();
    let pb = b.primitive();
    if pa == pb {
        return pa;
    }
    // a variable seen by one side only: the gcd divides every coefficient in it
    for w in Var::ALL {
        match (pa.mentions(w), pb.mentions(w)) {
            (true, false) => return content_with(pb, &pa.coeffs_in(w)),
            (false, true) => return content_with(pa, &pb.coeffs_in(w)),
            _ => {}
        }
    }
    let v = Var::ALL
        .into_iter()
        .rev()
        .find(|v| pa.mentions(*v))
        .expect("non-constant polynomial mentions a variable");
    let ac = pa.coeffs_in(v);
    let bc = pb.coeffs_in(v);
    let ca = content(&ac);
    let cb = content(&bc);
    let c = poly_gcd(&ca, &cb);
    let ac: Vec<MPoly> = ac.iter().map(|p| exact(p, &ca)).collect();
    let bc: Vec<MPoly> = bc.iter().map(|p| exact(p, &cb)).collect();
    if coprime_by_evaluation(v, &ac, &bc) {
        return c;
    }
    let h = subresultant(ac, bc);
    if h.len() <= 1 {
        return c;
    }
    let ch = content(&h);
    let h: Vec<MPoly> = h.iter().map(|p| exact(p, &ch)).collect();
    (&c * &MPoly::from_coeffs_in(v, &h)).primitive()
}

/// gcd of `start` and all of `cs`.
fn content_with(start: MPoly, cs: &[MPoly]) -> MPoly {
    let mut g = start;
    for c in cs {
        if c.is_zero() {
            continue;
        }
        g = poly_gcd(&g, c);
        if g.is_constant() {
            return MPoly::one();
        }
    }
    g
}

/// True when the images under a substitution of the other variables are
/// coprime in `v` while both leading coefficients survive it; then any common
/// factor has degree 0 in `v`. False means "unknown".
fn coprime_by_evaluation(v: Var, ac: &[MPoly], bc: &[MPoly]) -> bool {
    let others: Vec<Var> = Var::ALL
        .into_iter()
        .filter(|&w| w != v && (ac.iter().chain(bc).any(|c| c.mentions(w))))
        .collect();
    if others.is_empty() {
        return false;
    }
    let (la, lb) = (ac.last().expect("nonempty"), bc.last().expect("nonempty"));
    for attempt in 0..3i64 {
        let point: Vec<(Var, Rat)> = others
            .iter()
            .enumerate()
            .map(|(i, &w)| (w, Rat::from_integer(BigInt::from(2 + 5 * attempt + 3 * i as i64))))
            .collect();
        let at = |p: &MPoly| point.iter().fold(p.clone(), |acc, (w, r)| acc.eval_var(*w, r));
        if at(la).is_zero() || at(lb).is_zero() {
            continue;
        }
        let ia: Vec<MPoly> = ac.iter().map(at).collect();
        let ib: Vec<MPoly> = bc.iter().map(at).collect();
        let g = subresultant(ia, ib);
        return g.len() <= 1;
    }
    false
}

fn exact(p: &MPoly, d: &MPoly) -> MPoly {
    p.exact_div(d).expect("exact division in gcd")
}

/// gcd of a list of coefficients.
fn content(cs: &[MPoly]) -> MPoly {
    let mut g = MPoly::zero();
    for c in cs {
        if c.is_zero() {
            continue;
        }
        g = poly_gcd(&g, c);
        if g.is_constant() {
            return MPoly::one();
        }
    }
    g
}

fn trim(p: &mut Vec<MPoly>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn prem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let n = b.len() - 1;
    let lb = &b[n];
    let mut r = a.to_vec();
    trim(&mut r);
    let mut e = (a.len() - 1) as i64 - n as i64 + 1;
    while !r.is_empty() && r.len() > n {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - n;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[j + shift] = &r[j + shift] - &(&lr * bj);
        }
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

/// Last nonzero member of the subresultant PRS of two primitive polynomials.
fn subresultant(mut a: Vec<MPoly>, mut b: Vec<MPoly>) -> Vec<MPoly> {
    if b.len() > a.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = MPoly::one();
    let mut h = MPoly::one();
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            return b;
        }
        if r.len() == 1 {
            return vec![MPoly::one()];
        }
        let div = &g * &h.pow(delta);
        a = b;
        b = r.iter().map(|c| exact(c, &div)).collect();
        g = a.last().unwrap().clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            d => exact(&g.pow(d), &h.pow(d - 1)),
        };
    }
}
