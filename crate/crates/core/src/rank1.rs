//! Bispectral Darboux transformations from quasipolynomial kernels.
//!
//! The wave function `e^{xz} I_n` and everything obtained from it by operators
//! is stored as the matrix `M(x, z)` with the exponential factor implicit.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, Derivation, MPoly, Rat, RatFunc, Var};
use crate::linalg::{quasideterminant, solve_left, BlockMat, Mat};
use crate::ore::{apply_left, apply_right, clear_denominators, OreOp, Wave};
use crate::report::VerificationReport;

/// One basis function `e^{alpha x} p(x)` with `p` a column of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiEntry {
    pub alpha: Rat,
    pub p: Vec<MPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiKernelSpec {
    pub n: usize,
    pub entries: Vec<QuasiEntry>,
}

impl QuasiKernelSpec {
    pub fn new(n: usize, entries: Vec<QuasiEntry>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Schema("matrix size must be positive".into()));
        }
        if !entries.len().is_multiple_of(n) {
            return Err(Error::Schema(format!(
                "kernel has {} basis functions, not a multiple of n = {n}",
                entries.len()
            )));
        }
        for (j, e) in entries.iter().enumerate() {
            if e.p.len() != n {
                return Err(Error::Schema(format!(
                    "basis function {} has {} components, expected {n}",
                    j + 1,
                    e.p.len()
                )));
            }
            if e.p.iter().any(|c| [Var::U, Var::Z, Var::T].iter().any(|&v| c.mentions(v))) {
                return Err(Error::Schema(format!(
                    "basis function {} is not polynomial in x alone",
                    j + 1
                )));
            }
        }
        Ok(QuasiKernelSpec { n, entries })
    }

    /// Number of blocks `k`, the order of the operator with this kernel.
    pub fn k(&self) -> usize {
        self.entries.len() / self.n
    }

    /// `m` such that every `e^{alpha x}` is an integral power of `u = e^{x/m}`.
    pub fn exp_scale(&self) -> u32 {
        let mut m = num_bigint::BigInt::one();
        for e in &self.entries {
            m = m.lcm(e.alpha.denom());
        }
        m.to_u32().expect("exponent denominators fit in u32")
    }

    pub fn derivation(&self) -> Derivation {
        Derivation::dx_with_exp_scale(self.exp_scale())
    }

    /// The `n x kn` matrix of basis functions in `Q(x, u)`.
    pub fn functions(&self) -> Mat {
        let m = int(self.exp_scale() as i64);
        let cols: Vec<Mat> = self
            .entries
            .iter()
            .map(|e| {
                let ex = (&e.alpha * &m).to_integer().to_i32().expect("small exponent");
                let w = RatFunc::var(Var::U).pow(ex).expect("u is nonzero");
                Mat::column(e.p.iter().map(|c| &RatFunc::from_poly(c.clone()) * &w).collect())
            })
            .collect();
        Mat::hstack(&cols).unwrap_or_else(|_| Mat::zeros(self.n, 0))
    }

    pub fn permuted(&self, order: &[usize]) -> QuasiKernelSpec {
        QuasiKernelSpec {
            n: self.n,
            entries: order.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }
}

/// Stacks `F, F', ..., F^{(blocks-1)}`.
pub fn wronski(f: &Mat, blocks: usize, d: &Derivation) -> Mat {
    let mut rows = Vec::with_capacity(blocks);
    let mut cur = f.clone();
    for b in 0..blocks {
        if b > 0 {
            cur = cur.derive(d);
        }
        rows.push(cur.clone());
    }
    Mat::vstack(&rows).unwrap_or_else(|_| Mat::zeros(0, f.cols()))
}

/// A column order in which every leading principal minor of the Wronski
/// matrix is nonzero, found by elimination with first-nonzero column pivoting.
pub fn nondegenerate_arrange(v: &QuasiKernelSpec) -> Result<Vec<usize>> {
    let w = wronski(&v.functions(), v.k(), &v.derivation());
    let size = w.rows();
    let mut a = w;
    let mut order: Vec<usize> = (0..size).collect();
    for r in 0..size {
        let Some(c) = (r..size).find(|&c| !a.get(r, c).is_zero()) else {
            return Err(Error::DegenerateKernel(
                "the Wronski matrix of the kernel basis is singular".into(),
            ));
        };
        if c != r {
            order.swap(r, c);
            for i in 0..size {
                let t = a.get(i, r).clone();
                a.set(i, r, a.get(i, c).clone());
                a.set(i, c, t);
            }
        }
        let inv = a.get(r, r).inv()?;
        for i in r + 1..size {
            if a.get(i, r).is_zero() {
                continue;
            }
            let f = a.get(i, r) * &inv;
            for j in r..size {
                if a.get(r, j).is_zero() {
                    continue;
                }
                let val = a.get(i, j) - &(&f * a.get(r, j));
                a.set(i, j, val);
            }
        }
    }
    Ok(order)
}

/// The monic operator of order `k` with vector kernel `V`, built twice: by a
/// linear solve on the Wronski matrix and as `(D - b_k) ... (D - b_1)` with
/// `b_j = W_j' W_j^{-1}`, `W_j` the last diagonal quasideterminant of
/// `W(F_1, ..., F_j)`. Returns the operator in `Q(x)` and the arrangement.
pub fn operator_from_kernel_rank1(v: &QuasiKernelSpec) -> Result<(OreOp, Vec<usize>)> {
    let n = v.n;
    let k = v.k();
    let order = nondegenerate_arrange(v)?;
    let d = v.derivation();
    if k == 0 {
        return Ok((OreOp::identity(n, Derivation::dx()), order));
    }
    let f = v.permuted(&order).functions();

    let w = wronski(&f, k, &d);
    let mut fk = f.clone();
    for _ in 0..k {
        fk = fk.derive(&d);
    }
    let a = solve_left(&w, &-&fk).map_err(|e| match e {
        Error::SingularMatrix => Error::DegenerateKernel("singular Wronski matrix".into()),
        other => other,
    })?;
    let mut coeffs: Vec<Mat> = (0..k).map(|i| a.submatrix(0..n, i * n..(i + 1) * n)).collect();
    coeffs.push(Mat::identity(n));
    let by_solve = OreOp::new(n, d.clone(), coeffs)?;

    let dop = OreOp::d(n, d.clone());
    let mut by_product = OreOp::identity(n, d.clone());
    for j in 1..=k {
        let wj = wronski(&f.submatrix(0..n, 0..j * n), j, &d);
        let qd = quasideterminant(&BlockMat::from_flat(&wj, n)?, j - 1, j - 1).map_err(|e| match e {
            Error::SingularSubmatrix => Error::DegenerateKernel("singular leading Wronski block".into()),
            other => other,
        })?;
        let bj = &qd.derive(&d) * &qd.inverse()?;
        let factor = dop.sub(&OreOp::from_mat(bj, d.clone()))?;
        by_product = factor.compose(&by_product)?;
    }
    if by_solve != by_product {
        return Err(Error::InternalMismatch(
            "Wronski solve and quasideterminant product disagree".into(),
        ));
    }
    if by_solve.mentions(Var::U) {
        return Err(Error::InternalMismatch(
            "operator built from a quasipolynomial kernel has exponential coefficients".into(),
        ));
    }
    Ok((by_solve.with_derivation(Derivation::dx())?, order))
}

/// `h(D) I_n` with `h = Π (T - alpha)^{1 + max deg}` over the exponents of `V`.
pub fn minimal_constant_annihilator(v: &QuasiKernelSpec) -> OreOp {
    let mut mult: BTreeMap<Rat, u32> = BTreeMap::new();
    for e in &v.entries {
        let deg = e.p.iter().map(|c| c.degree_in(Var::X)).max().unwrap_or(0);
        let slot = mult.entry(e.alpha.clone()).or_insert(0);
        *slot = (*slot).max(deg + 1);
    }
    let mut h = vec![Rat::one()];
    for (alpha, m) in mult {
        for _ in 0..m {
            // multiply by (T - alpha)
            let mut next = vec![Rat::zero(); h.len() + 1];
            for (i, c) in h.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * &alpha;
            }
            h = next;
        }
    }
    OreOp::scalar_poly(v.n, Derivation::dx(), &h)
}

/// `x^i D^k C ↦ (-∂_z)^i z^k C`.
pub fn b_map_rank1(p: &OreOp) -> Result<OreOp> {
    let n = p.size();
    let dz = Derivation::dz();
    let minus_dz = OreOp::d(n, dz.clone()).neg();
    let mut acc = OreOp::zero(n, dz.clone());
    for (i, k, c) in p.normal_order()? {
        let zk = Mat::scalar(n, RatFunc::from_poly(MPoly::var_pow(Var::Z, k as u32)));
        let term = minus_dz
            .pow(i)?
            .compose(&OreOp::from_mat(&zk * &c, dz.clone()))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `e^{xz} M(x, z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Wave(pub Mat);

impl Rank1Wave {
    /// `e^{xz} I_n`.
    pub fn base(n: usize) -> Self {
        Rank1Wave(Mat::identity(n))
    }
}

impl Wave for Rank1Wave {
    fn dx(&self) -> Self {
        let z = RatFunc::var(Var::Z);
        Rank1Wave(&self.0.scale(&z) + &self.0.derive(&Derivation::dx()))
    }

    fn dz(&self) -> Self {
        let x = RatFunc::var(Var::X);
        Rank1Wave(&self.0.scale(&x) + &self.0.derive(&Derivation::dz()))
    }

    fn left_mul(&self, a: &Mat) -> Result<Self> {
        Ok(Rank1Wave(a.try_mul(&self.0)?))
    }

    fn right_mul(&self, a: &Mat) -> Result<Self> {
        Ok(Rank1Wave(self.0.try_mul(a)?))
    }

    fn plus(&self, other: &Self) -> Self {
        Rank1Wave(&self.0 + &other.0)
    }

    fn negated(&self) -> Self {
        Rank1Wave(-&self.0)
    }

    fn zero_like(&self) -> Self {
        Rank1Wave(Mat::zeros(self.0.rows(), self.0.cols()))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct Rank1Bundle {
    pub kernel: QuasiKernelSpec,
    pub arrangement: Vec<usize>,
    pub p: OreOp,
    pub q: OreOp,
    pub l: OreOp,
    pub pq: OreOp,
    pub p_prime: OreOp,
    pub q_prime: OreOp,
    pub g: Mat,
    pub d: RatFunc,
    /// `P' ∘ Q' ∘ g^{-1}`.
    pub l_prime: OreOp,
    pub b_p_prime: OreOp,
    pub b_q_prime: OreOp,
    pub b_l: OreOp,
    pub dual: OreOp,
    /// `P (e^{xz} I_n)` without the exponential.
    pub phi: Mat,
    /// `P' (e^{xz} I_n)` without the exponential.
    pub phi_prime: Mat,
    pub report: VerificationReport,
}

fn validate_l(l: &OreOp, n: usize) -> Result<()> {
    if l.size() != n {
        return Err(Error::InvalidOperator(format!(
            "L has size {}, kernel has n = {n}",
            l.size()
        )));
    }
    if l.derivation().var() != Var::X {
        return Err(Error::InvalidOperator("L must be an operator in x".into()));
    }
    if !l.is_constant_coefficient() {
        return Err(Error::InvalidOperator("L must have constant coefficients".into()));
    }
    if l.is_zero() || l.leading().det()?.is_zero() {
        return Err(Error::SingularLeadingCoefficient);
    }
    Ok(())
}

/// The full rank-one pipeline. `l` defaults to `h(D) I_n`.
pub fn darboux_rank1(v: &QuasiKernelSpec, l: Option<&OreOp>) -> Result<Rank1Bundle> {
    let n = v.n;
    let (p, arrangement) = operator_from_kernel_rank1(v)?;
    let l = match l {
        Some(l) => {
            validate_l(l, n)?;
            l.with_derivation(Derivation::dx())?
        }
        None => minimal_constant_annihilator(v),
    };
    let (q, rem) = l.right_divide(&p)?;
    if !rem.is_zero() {
        return Err(Error::NonzeroRemainder);
    }
    let pq = p.compose(&q)?;
    let (p_prime, g, q_prime, d) = clear_denominators(&p, &q)?;
    let ginv = OreOp::from_mat(g.inverse()?, Derivation::dx());
    let l_prime = p_prime.compose(&q_prime)?.compose(&ginv)?;
    let b_p_prime = b_map_rank1(&p_prime)?;
    let b_q_prime = b_map_rank1(&q_prime)?;
    let b_l = b_map_rank1(&l)?;
    let dual = dual_operator(&b_l, &b_q_prime, &b_p_prime)?;
    let phi = apply_left(&p, &Rank1Wave::base(n))?.0;
    let phi_prime = apply_left(&p_prime, &Rank1Wave::base(n))?.0;
    let mut bundle = Rank1Bundle {
        kernel: v.permuted(&arrangement),
        arrangement,
        p,
        q,
        l,
        pq,
        p_prime,
        q_prime,
        g,
        d,
        l_prime,
        b_p_prime,
        b_q_prime,
        b_l,
        dual,
        phi,
        phi_prime,
        report: VerificationReport::new(),
    };
    bundle.report = verify_rank1(&bundle)?;
    Ok(bundle)
}

/// `(bL)^{-1} ∘ bQ' ∘ bP'` where `bL` has order zero.
fn dual_operator(b_l: &OreOp, b_q: &OreOp, b_p: &OreOp) -> Result<OreOp> {
    if b_l.order() != 0 {
        return Err(Error::InvalidOperator("b(L) must be a multiplication operator".into()));
    }
    let inv = b_l.coeff(0).inverse()?;
    OreOp::from_mat(inv, Derivation::dz())
        .compose(b_q)?
        .compose(b_p)
}

/// Checks the two spectral identities for `L = Q' g^{-1} P'` with constant `L`.
pub fn verify_factorization(l: &OreOp, p_prime: &OreOp, g: &Mat, q_prime: &OreOp) -> Result<VerificationReport> {
    let n = l.size();
    let mut report = VerificationReport::new();
    if g.det()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let ginv = OreOp::from_mat(g.inverse()?, Derivation::dx());
    let cleared = q_prime.compose(&ginv)?.compose(p_prime)?;
    report.push_op("cleared factorization", "Q' g^-1 P' - L = 0", &cleared.sub(l)?);

    let b_p = b_map_rank1(p_prime)?;
    let b_q = b_map_rank1(q_prime)?;
    let b_l = b_map_rank1(l)?;
    let phi = apply_left(p_prime, &Rank1Wave::base(n))?;

    let l_prime = p_prime.compose(q_prime)?.compose(&ginv)?;
    let lhs = apply_left(&l_prime, &phi)?;
    let rhs = apply_right(&phi, &b_l)?;
    report.push_mat(
        "first identity",
        "(P' Q' g^-1) Phi = Phi (bL)(z)",
        &(&lhs.0 - &rhs.0),
    );

    let dual = dual_operator(&b_l, &b_q, &b_p)?;
    let lhs = phi.left_mul(g)?;
    let rhs = apply_right(&phi, &dual)?;
    report.push_mat(
        "second identity",
        "g Phi = Phi ((bL)^-1 (bQ') (bP'))",
        &(&lhs.0 - &rhs.0),
    );
    Ok(report)
}

pub fn verify_rank1(b: &Rank1Bundle) -> Result<VerificationReport> {
    let n = b.p.size();
    let mut report = VerificationReport::new();
    let d = b.kernel.derivation();
    let killed = b.p.with_derivation(d)?.apply(&b.kernel.functions())?;
    report.push_mat("kernel", "P F = 0 for every basis function F", &killed);
    report.push_op("factorization", "L - Q P = 0", &b.l.sub(&b.q.compose(&b.p)?)?);
    let phi = apply_left(&b.p, &Rank1Wave::base(n))?;
    let lhs = apply_left(&b.pq, &phi)?;
    let rhs = apply_right(&phi, &b.b_l)?;
    report.push_mat("transformed eigenvalue", "(P Q) Phi = Phi (bL)(z)", &(&lhs.0 - &rhs.0));
    report.extend(verify_factorization(&b.l, &b.p_prime, &b.g, &b.q_prime)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_poly, parse_ratfunc, rat};

    fn m(rows: &[&[&str]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_ratfunc(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn entry(alpha: Rat, p: &[&str]) -> QuasiEntry {
        QuasiEntry {
            alpha,
            p: p.iter().map(|s| parse_poly(s).unwrap()).collect(),
        }
    }

    fn shifted_pair(a: &str) -> QuasiKernelSpec {
        QuasiKernelSpec::new(2, vec![entry(rat(0, 1), &["x", "0"]), entry(rat(0, 1), &[a, "x"])]).unwrap()
    }

    #[test]
    fn wronski_examples() {
        let v = shifted_pair("1");
        assert_eq!(wronski(&v.functions(), 1, &v.derivation()), m(&[&["x", "1"], &["0", "x"]]));
        let c = QuasiKernelSpec::new(2, vec![entry(rat(0, 1), &["1", "0"]), entry(rat(0, 1), &["0", "1"])]).unwrap();
        assert_eq!(wronski(&c.functions(), 1, &c.derivation()), Mat::identity(2));
    }

    #[test]
    fn two_by_two_pipeline() {
        let (p, order) = operator_from_kernel_rank1(&shifted_pair("1")).unwrap();
        assert_eq!(order, vec![0, 1]);
        let a = m(&[&["1/x", "-1/x^2"], &["0", "1/x"]]);
        let expected = OreOp::new(2, Derivation::dx(), vec![-&a, Mat::identity(2)]).unwrap();
        assert_eq!(p, expected);
        let b = darboux_rank1(&shifted_pair("1"), None).unwrap();
        assert!(b.report.all_pass, "{:?}", b.report);
        assert_eq!(b.l, OreOp::scalar_poly(2, Derivation::dx(), &[int(0), int(0), int(1)]));
        assert_eq!(b.g, Mat::scalar(2, parse_ratfunc("x^4").unwrap()));
        assert_eq!(b.phi, m(&[&["z - 1/x", "1/x^2"], &["0", "z - 1/x"]]));
    }

    #[test]
    fn degenerate_and_duplicate() {
        let dup = QuasiKernelSpec::new(1, vec![entry(rat(1, 1), &["1"]), entry(rat(1, 1), &["1"])]).unwrap();
        assert!(matches!(nondegenerate_arrange(&dup), Err(Error::DegenerateKernel(_))));
        assert!(matches!(
            QuasiKernelSpec::new(2, vec![entry(rat(0, 1), &["1", "0"])]),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn pivoting_repairs_singular_first_block() {
        let v = QuasiKernelSpec::new(2, vec![entry(rat(0, 1), &["0", "1"]), entry(rat(0, 1), &["1", "0"])]).unwrap();
        let order = nondegenerate_arrange(&v).unwrap();
        assert_eq!(order, vec![1, 0]);
        let (p, _) = operator_from_kernel_rank1(&v).unwrap();
        assert_eq!(p, OreOp::d(2, Derivation::dx()));
    }

    #[test]
    fn annihilator_examples() {
        let v = QuasiKernelSpec::new(1, vec![entry(rat(1, 1), &["1"])]).unwrap();
        assert_eq!(
            minimal_constant_annihilator(&v),
            OreOp::scalar_poly(1, Derivation::dx(), &[int(-1), int(1)])
        );
    }

    #[test]
    fn b_map_examples() {
        let n = 1;
        let x = OreOp::from_mat(Mat::scalar(n, RatFunc::var(Var::X)), Derivation::dx());
        let d = OreOp::d(n, Derivation::dx());
        assert_eq!(b_map_rank1(&d).unwrap(), OreOp::from_mat(Mat::scalar(1, RatFunc::var(Var::Z)), Derivation::dz()));
        assert_eq!(b_map_rank1(&x).unwrap(), OreOp::d(1, Derivation::dz()).neg());
        let comm = d.compose(&x).unwrap().sub(&x.compose(&d).unwrap()).unwrap();
        assert_eq!(b_map_rank1(&comm).unwrap(), OreOp::identity(1, Derivation::dz()));
    }

    #[test]
    fn right_action_sign() {
        let psi = Rank1Wave::base(1);
        let dz = OreOp::d(1, Derivation::dz());
        assert_eq!(apply_right(&psi, &dz).unwrap().0, m(&[&["-x"]]));
    }

    #[test]
    fn exponential_kernel_rational_operator() {
        // e^{x/2} and e^{-x} x: the operator is rational in x
        let v = QuasiKernelSpec::new(1, vec![entry(rat(1, 2), &["1"]), entry(rat(-1, 1), &["x"])]).unwrap();
        let b = darboux_rank1(&v, None).unwrap();
        assert!(!b.p.mentions(Var::U));
        assert!(b.report.all_pass);
    }
}
