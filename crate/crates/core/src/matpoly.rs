//! Monic matrix polynomials: determinant, companion matrix, rational roots and
//! Jordan chains.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::rat::{divisors, factorial, lcm_int};
use crate::exact::{MPoly, Rat, RatFunc, Var};
use crate::linalg::Mat;

/// `q(t) = Σ a_j t^j` with constant `a_j` and `a_d = I_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatPolynomial {
    n: usize,
    coeffs: Vec<Mat>,
}

impl MatPolynomial {
    pub fn new(coeffs: Vec<Mat>) -> Result<Self> {
        let Some(lead) = coeffs.last() else {
            return Err(Error::Schema("matrix polynomial has no coefficients".into()));
        };
        let n = lead.rows();
        if n == 0 || coeffs.len() < 2 {
            return Err(Error::Schema("matrix polynomial must have positive size and degree".into()));
        }
        for a in &coeffs {
            if a.rows() != n || a.cols() != n {
                return Err(Error::DimensionMismatch(format!("coefficients must all be {n}x{n}")));
            }
            if !a.is_constant() {
                return Err(Error::Schema("matrix polynomial coefficients must be constant".into()));
            }
        }
        if !lead.is_identity() {
            return Err(Error::InvalidOperator("matrix polynomial must be monic".into()));
        }
        Ok(MatPolynomial { n, coeffs })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    /// `q^{(r)}(lambda)`.
    pub fn eval_derivative(&self, r: usize, lambda: &Rat) -> Mat {
        let mut acc = Mat::zeros(self.n, self.n);
        for (j, a) in self.coeffs.iter().enumerate().skip(r) {
            let c = (factorial(j) / factorial(j - r)) * crate::exact::rat::pow(lambda, j - r);
            acc = &acc + &a.scale_rat(&c);
        }
        acc
    }

    pub fn eval(&self, lambda: &Rat) -> Mat {
        self.eval_derivative(0, lambda)
    }

    /// `q(t)` as a matrix over `Q(t)`.
    pub fn as_matrix(&self) -> Mat {
        let mut acc = Mat::zeros(self.n, self.n);
        for (j, a) in self.coeffs.iter().enumerate() {
            let tj = RatFunc::from_poly(MPoly::var_pow(Var::T, j as u32));
            acc = &acc + &a.scale(&tj);
        }
        acc
    }
}

/// `det q(t)`.
pub fn char_det(q: &MatPolynomial) -> MPoly {
    let d = q.as_matrix().det().expect("square");
    d.num().clone()
}

/// Identity superdiagonal blocks and last block row `-a_0, ..., -a_{d-1}`.
pub fn companion(q: &MatPolynomial) -> Mat {
    let n = q.size();
    let d = q.degree();
    let mut c = Mat::zeros(n * d, n * d);
    for b in 0..d.saturating_sub(1) {
        for i in 0..n {
            c.set(b * n + i, (b + 1) * n + i, RatFunc::one());
        }
    }
    for (j, a) in q.coeffs().iter().take(d).enumerate() {
        for r in 0..n {
            for s in 0..n {
                c.set((d - 1) * n + r, j * n + s, -a.get(r, s));
            }
        }
    }
    c
}

/// Ascending rational coefficients of a polynomial in `t` alone.
fn univariate(chi: &MPoly) -> Result<Vec<Rat>> {
    if [Var::X, Var::U, Var::Z].iter().any(|&v| chi.mentions(v)) {
        return Err(Error::Schema("expected a polynomial in t".into()));
    }
    Ok(chi
        .coeffs_in(Var::T)
        .iter()
        .map(|c| c.constant_value().unwrap_or_default())
        .collect())
}

/// Divides by `(t - r)` if it is a factor.
fn deflate(p: &[Rat], r: &Rat) -> Option<Vec<Rat>> {
    let deg = p.len() - 1;
    let mut out = vec![Rat::zero(); deg];
    let mut carry = Rat::zero();
    for i in (0..=deg).rev() {
        let v = &p[i] + &carry * r;
        if i == 0 {
            return v.is_zero().then_some(out);
        }
        out[i - 1] = v.clone();
        carry = v;
    }
    unreachable!()
}

/// All rational roots with multiplicities; the zero root first, then in the
/// order of the candidate list `±p/q`.
pub fn rational_roots(chi: &MPoly) -> Result<Vec<(Rat, usize)>> {
    let mut p = univariate(chi)?;
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        return Err(Error::Schema("the zero polynomial has no finite root set".into()));
    }
    let mut roots = Vec::new();
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push((Rat::zero(), zeros));
        p.drain(..zeros);
    }
    if p.len() > 1 {
        let mut den = BigInt::one();
        for c in &p {
            den = lcm_int(&den, c.denom());
        }
        let ints: Vec<BigInt> = p.iter().map(|c| (c * Rat::from(den.clone())).to_integer()).collect();
        let lead = ints.last().expect("nonempty").abs();
        let constant = ints[0].abs();
        'outer: for num in divisors(&constant) {
            for dd in divisors(&lead) {
                for sign in [1, -1] {
                    let cand = Rat::new(num.clone() * sign, dd.clone());
                    if roots.iter().any(|(r, _)| *r == cand) {
                        continue;
                    }
                    let mut m = 0;
                    while let Some(next) = deflate(&p, &cand) {
                        p = next;
                        m += 1;
                    }
                    if m > 0 {
                        roots.push((cand, m));
                    }
                    if p.len() == 1 {
                        break 'outer;
                    }
                }
            }
        }
    }
    if p.len() > 1 {
        return Err(Error::IrrationalSpectrum(format!(
            "a factor of degree {} has no rational roots",
            p.len() - 1
        )));
    }
    Ok(roots)
}

fn multiplicity(chi: &MPoly, lambda: &Rat) -> Result<usize> {
    let mut p = univariate(chi)?;
    let mut m = 0;
    while p.len() > 1 {
        match deflate(&p, lambda) {
            Some(next) => {
                p = next;
                m += 1;
            }
            None => break,
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanChainSet {
    pub lambda: Rat,
    pub multiplicity: usize,
    /// Each chain `v_0, ..., v_k` as `n x 1` columns, longest chains first.
    pub chains: Vec<Vec<Mat>>,
}

impl JordanChainSet {
    pub fn total_length(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }
}

fn in_span(basis: &[Mat], v: &Mat) -> bool {
    if basis.is_empty() {
        return v.is_zero();
    }
    let a = Mat::hstack(basis).expect("columns");
    let with = Mat::hstack(&[a.clone(), v.clone()]).expect("columns");
    with.rank() == a.rank()
}

/// Jordan chains at `lambda` from the generalized eigenspaces of the
/// companion matrix, projected to the first `n` coordinates.
pub fn jordan_chains(q: &MatPolynomial, lambda: &Rat) -> Result<JordanChainSet> {
    let n = q.size();
    let chi = char_det(q);
    let m = multiplicity(&chi, lambda)?;
    if m == 0 {
        return Err(Error::NotAnEigenvalue(format!(
            "{} is not a root of det q(t)",
            crate::exact::rat::fmt_rat(lambda)
        )));
    }
    let c = companion(q);
    let size = c.rows();
    let nmat = &c - &Mat::scalar(size, RatFunc::constant(lambda.clone()));

    // kernels of N^j until they stabilize
    let mut kernels: Vec<Vec<Mat>> = vec![Vec::new()];
    let mut power = Mat::identity(size);
    loop {
        power = &power * &nmat;
        let k = power.nullspace();
        if k.len() == kernels.last().map_or(0, Vec::len) {
            break;
        }
        kernels.push(k);
    }
    let top = kernels.len() - 1;
    if kernels[top].len() != m {
        return Err(Error::InternalMismatch(format!(
            "generalized eigenspace has dimension {}, multiplicity is {m}",
            kernels[top].len()
        )));
    }

    // tops[j] holds chain ends at level j
    let mut tops: Vec<(usize, Mat)> = Vec::new();
    for j in (1..=top).rev() {
        let mut span: Vec<Mat> = kernels[j - 1].clone();
        for (level, y) in &tops {
            let mut w = y.clone();
            for _ in 0..level - j {
                w = &nmat * &w;
            }
            span.push(w);
        }
        for w in &kernels[j] {
            if !in_span(&span, w) {
                span.push(w.clone());
                tops.push((j, w.clone()));
            }
        }
    }

    let mut chains = Vec::new();
    for (level, y) in &tops {
        let mut xs = vec![y.clone()];
        for _ in 1..*level {
            let next = &nmat * xs.last().expect("nonempty");
            xs.push(next);
        }
        xs.reverse();
        chains.push(xs.iter().map(|x| x.submatrix(0..n, 0..1)).collect::<Vec<_>>());
    }
    chains.sort_by_key(|c| std::cmp::Reverse(c.len()));
    Ok(JordanChainSet {
        lambda: lambda.clone(),
        multiplicity: m,
        chains,
    })
}

/// `Σ_{r ≤ j} q^{(r)}(λ) v_{j-r} / r!` for every `j`; all zero for a chain.
pub fn chain_residuals(q: &MatPolynomial, lambda: &Rat, chain: &[Mat]) -> Vec<Mat> {
    let ders: Vec<Mat> = (0..chain.len())
        .map(|r| q.eval_derivative(r, lambda).scale_rat(&factorial(r).recip()))
        .collect();
    (0..chain.len())
        .map(|j| {
            let mut acc = Mat::zeros(q.size(), 1);
            for r in 0..=j {
                acc = &acc + &(&ders[r] * &chain[j - r]);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, parse_poly, parse_ratfunc};

    fn m(rows: &[&[&str]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_ratfunc(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn jordan_block_q() -> MatPolynomial {
        let j = m(&[&["0", "1"], &["0", "0"]]);
        MatPolynomial::new(vec![Mat::zeros(2, 2), j.scale_rat(&int(-2)), Mat::identity(2)]).unwrap()
    }

    #[test]
    fn a1_determinant_and_companion() {
        let q = jordan_block_q();
        assert_eq!(char_det(&q), parse_poly("t^4").unwrap());
        let c = companion(&q);
        let expected = m(&[
            &["0", "0", "1", "0"],
            &["0", "0", "0", "1"],
            &["0", "0", "0", "2"],
            &["0", "0", "0", "0"],
        ]);
        assert_eq!(c, expected);
    }

    #[test]
    fn a1_chains() {
        let q = jordan_block_q();
        let set = jordan_chains(&q, &int(0)).unwrap();
        assert_eq!(set.multiplicity, 4);
        assert_eq!(set.total_length(), 4);
        let lens: Vec<usize> = set.chains.iter().map(Vec::len).collect();
        assert_eq!(lens, vec![3, 1]);
        for ch in &set.chains {
            for r in chain_residuals(&q, &int(0), ch) {
                assert!(r.is_zero());
            }
        }
        // a hand-computed chain satisfies the same equations
        let e1 = m(&[&["1"], &["0"]]);
        let e2 = m(&[&["0"], &["1"]]);
        let by_hand = vec![e1.clone(), e2.scale_rat(&crate::exact::rat(1, 2)), e1.clone()];
        assert!(chain_residuals(&q, &int(0), &by_hand).iter().all(Mat::is_zero));
        assert!(chain_residuals(&q, &int(0), &[e2]).iter().all(Mat::is_zero));
        assert_eq!(jordan_chains(&q, &int(1)).err().map(|e| e.kind()), Some("NotAnEigenvalue"));
    }

    #[test]
    fn roots() {
        assert_eq!(rational_roots(&parse_poly("t^4").unwrap()).unwrap(), vec![(int(0), 4)]);
        let p = parse_poly("(t - 1)*(t + 2)^2").unwrap();
        assert_eq!(rational_roots(&p).unwrap(), vec![(int(1), 1), (int(-2), 2)]);
        let p = parse_poly("(2*t - 1)*t*(3*t + 2)").unwrap();
        assert_eq!(
            rational_roots(&p).unwrap(),
            vec![(int(0), 1), (crate::exact::rat(1, 2), 1), (crate::exact::rat(-2, 3), 1)]
        );
        assert!(matches!(
            rational_roots(&parse_poly("t^2 - 2").unwrap()),
            Err(Error::IrrationalSpectrum(_))
        ));
    }

    #[test]
    fn scalar_shift() {
        let lam = crate::exact::rat(3, 2);
        let q = MatPolynomial::new(vec![Mat::scalar(2, RatFunc::constant(-lam.clone())), Mat::identity(2)]).unwrap();
        let set = jordan_chains(&q, &lam).unwrap();
        assert_eq!(set.chains, vec![vec![m(&[&["1"], &["0"]])], vec![m(&[&["0"], &["1"]])]]);
    }
}
