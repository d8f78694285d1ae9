//! Darboux transformations of matrix Airy functions.
//!
//! A generic solution `ψ` of `M_Ai ψ = 0` is never evaluated. Expressions are
//! kept as `Σ_j ψ^{(j)}(x + s) B_j` and reduced with the Airy equation until
//! only `j < N` remain; in reduced form the coefficients are unique.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::rat::{factorial, fmt_rat, pow};
use crate::exact::{int, Derivation, MPoly, Rat, RatFunc, Var};
use crate::linalg::{solve_left, Mat};
use crate::matpoly::{char_det, jordan_chains, rational_roots, MatPolynomial};
use crate::ore::{apply_left, apply_right, clear_denominators, OreOp, Wave};
use crate::report::VerificationReport;

/// `M_Ai = ∂^N + Σ_{i=1}^{N-1} α_i ∂^{N-i} + α_0 x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AiryContext {
    order: usize,
    alphas: Vec<Rat>,
    alpha0: Rat,
}

impl AiryContext {
    /// `alphas` lists `α_1, ..., α_{N-1}`.
    pub fn new(order: usize, alphas: Vec<Rat>, alpha0: Rat) -> Result<Self> {
        if order == 0 {
            return Err(Error::Schema("Airy order N must be positive".into()));
        }
        if alphas.len() != order - 1 {
            return Err(Error::Schema(format!(
                "Airy operator of order {order} needs {} parameters alpha_1..alpha_{}, got {}",
                order - 1,
                order - 1,
                alphas.len()
            )));
        }
        if alpha0.is_zero() {
            return Err(Error::InvalidOperator("alpha_0 must be nonzero".into()));
        }
        Ok(AiryContext {
            order,
            alphas,
            alpha0,
        })
    }

    /// `∂^2 - x`.
    pub fn classical() -> Self {
        AiryContext::new(2, vec![Rat::zero()], int(-1)).expect("valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `α_i` for `1 ≤ i < N`.
    pub fn alpha(&self, i: usize) -> &Rat {
        &self.alphas[i - 1]
    }

    pub fn alphas(&self) -> &[Rat] {
        &self.alphas
    }

    pub fn alpha0(&self) -> &Rat {
        &self.alpha0
    }

    /// The argument shift `-λ/α_0` at which `M_Ai ψ(x + s) = λ ψ(x + s)`.
    pub fn shift(&self, lambda: &Rat) -> Rat {
        -(lambda / &self.alpha0)
    }

    /// `w(z) = -α_0 z`, the eigenvalue of `M_Ai(x, ∂_x)` on `ψ(x + z)`.
    pub fn w(&self) -> RatFunc {
        RatFunc::var(Var::Z).scale(&-self.alpha0.clone())
    }

    /// `M_Ai(x, ∂_x) I_n`.
    pub fn operator(&self, n: usize) -> OreOp {
        let dx = Derivation::dx();
        let mut coeffs = vec![Mat::zeros(n, n); self.order + 1];
        coeffs[self.order] = Mat::identity(n);
        for i in 1..self.order {
            coeffs[self.order - i] = Mat::scalar(n, RatFunc::constant(self.alpha(i).clone()));
        }
        let x = RatFunc::var(Var::X).scale(&self.alpha0);
        coeffs[0] = &coeffs[0] + &Mat::scalar(n, x);
        OreOp::new(n, dx, coeffs).expect("square coefficients")
    }

    /// `q(M_Ai)`.
    pub fn eval_poly(&self, q: &MatPolynomial) -> Result<OreOp> {
        let m = self.operator(q.size());
        let mut acc = OreOp::zero(q.size(), Derivation::dx());
        let mut power = OreOp::identity(q.size(), Derivation::dx());
        for (j, a) in q.coeffs().iter().enumerate() {
            if j > 0 {
                power = power.compose(&m)?;
            }
            acc = acc.add(&power.left_mul(a)?)?;
        }
        Ok(acc)
    }

    /// `q(w(z))` as a matrix over `Q(z)`.
    pub fn q_of_w(&self, q: &MatPolynomial) -> Mat {
        let w = self.w();
        let mut acc = Mat::zeros(q.size(), q.size());
        let mut wp = RatFunc::one();
        for (j, a) in q.coeffs().iter().enumerate() {
            if j > 0 {
                wp = &wp * &w;
            }
            acc = &acc + &a.scale(&wp);
        }
        acc
    }

    /// `M̃ = -(1/α_0)[(-∂_z)^N + Σ α_i (-∂_z)^{N-i}] - z`, the image of `x`.
    pub fn dual_generator(&self, n: usize) -> Result<OreOp> {
        let dz = Derivation::dz();
        let mdz = OreOp::d(n, dz.clone()).neg();
        let mut acc = mdz.pow(self.order)?;
        for i in 1..self.order {
            acc = acc.add(&mdz.pow(self.order - i)?.scale(self.alpha(i)))?;
        }
        let acc = acc.scale(&-self.alpha0.recip());
        acc.sub(&OreOp::from_mat(Mat::scalar(n, RatFunc::var(Var::Z)), dz))
    }
}

/// `Σ_j ψ^{(j)}(x + shift) B_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AiryExpr {
    ctx: AiryContext,
    shift: RatFunc,
    blocks: Vec<Mat>,
}

impl AiryExpr {
    /// Reduces on construction.
    pub fn new(ctx: &AiryContext, shift: RatFunc, blocks: Vec<Mat>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Schema("Airy expression needs at least one coefficient".into()));
        };
        let (r, c) = (first.rows(), first.cols());
        if blocks.iter().any(|b| b.rows() != r || b.cols() != c) {
            return Err(Error::DimensionMismatch("Airy coefficients differ in shape".into()));
        }
        let mut e = AiryExpr {
            ctx: ctx.clone(),
            shift,
            blocks,
        };
        e.reduce();
        Ok(e)
    }

    /// `ψ(x + z) I_n`.
    pub fn base(ctx: &AiryContext, n: usize) -> Self {
        AiryExpr::new(ctx, RatFunc::var(Var::Z), vec![Mat::identity(n)]).expect("nonempty")
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn shift(&self) -> &RatFunc {
        &self.shift
    }

    pub fn context(&self) -> &AiryContext {
        &self.ctx
    }

    /// `ψ^{(j)} = -Σ α_i ψ^{(j-i)} - α_0 y ψ^{(j-N)} - α_0 (j-N) ψ^{(j-N-1)}`
    /// for `j ≥ N`, `y = x + shift`, applied from the top index down.
    fn reduce(&mut self) {
        let big_n = self.ctx.order;
        let y = &RatFunc::var(Var::X) + &self.shift;
        let a0 = self.ctx.alpha0.clone();
        while self.blocks.len() > big_n {
            let j = self.blocks.len() - 1;
            let c = self.blocks.pop().expect("nonempty");
            if c.is_zero() {
                continue;
            }
            for i in 1..big_n {
                let a = self.ctx.alpha(i);
                if !a.is_zero() {
                    self.blocks[j - i] = &self.blocks[j - i] - &c.scale_rat(a);
                }
            }
            let t = c.scale(&y).scale_rat(&a0);
            self.blocks[j - big_n] = &self.blocks[j - big_n] - &t;
            if j > big_n {
                let k = int((j - big_n) as i64) * &a0;
                self.blocks[j - big_n - 1] = &self.blocks[j - big_n - 1] - &c.scale_rat(&k);
            }
        }
        let shape = (self.blocks[0].rows(), self.blocks[0].cols());
        while self.blocks.len() < big_n {
            self.blocks.push(Mat::zeros(shape.0, shape.1));
        }
    }

    fn shifted_derivative(&self, d: &Derivation) -> Self {
        let shape = (self.blocks[0].rows(), self.blocks[0].cols());
        let mut out = vec![Mat::zeros(shape.0, shape.1); self.blocks.len() + 1];
        for (j, b) in self.blocks.iter().enumerate() {
            out[j + 1] = &out[j + 1] + b;
            out[j] = &out[j] + &b.derive(d);
        }
        let mut e = AiryExpr {
            ctx: self.ctx.clone(),
            shift: self.shift.clone(),
            blocks: out,
        };
        e.reduce();
        e
    }

    fn map_blocks(&self, f: impl Fn(&Mat) -> Result<Mat>) -> Result<Self> {
        Ok(AiryExpr {
            ctx: self.ctx.clone(),
            shift: self.shift.clone(),
            blocks: self.blocks.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn residual_string(&self) -> String {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_zero())
            .map(|(j, b)| format!("psi^({j})*{b}"))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl Wave for AiryExpr {
    fn dx(&self) -> Self {
        self.shifted_derivative(&Derivation::dx())
    }

    /// Derivative in the shift variable.
    fn dz(&self) -> Self {
        self.shifted_derivative(&Derivation::dz())
    }

    fn left_mul(&self, a: &Mat) -> Result<Self> {
        self.map_blocks(|b| a.try_mul(b))
    }

    fn right_mul(&self, a: &Mat) -> Result<Self> {
        self.map_blocks(|b| b.try_mul(a))
    }

    fn plus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shift, other.shift);
        AiryExpr {
            ctx: self.ctx.clone(),
            shift: self.shift.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn negated(&self) -> Self {
        self.map_blocks(|b| Ok(-b)).expect("negation")
    }

    fn zero_like(&self) -> Self {
        self.map_blocks(|b| Ok(Mat::zeros(b.rows(), b.cols())))
            .expect("zero")
    }

    fn is_zero(&self) -> bool {
        self.blocks.iter().all(Mat::is_zero)
    }
}

/// The orbit of `Σ_j ψ_i^{(j)}(x, λ) p_j(x)` under the cyclic action on the
/// kernel index `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AiryOrbitSpec {
    pub lambda: Rat,
    /// `p_0, ..., p_{N-1}` after reduction, each a column of polynomials in `x`.
    pub ps: Vec<Vec<MPoly>>,
}

impl AiryOrbitSpec {
    /// Accepts any number of derivative columns and reduces them to `N`.
    pub fn new(ctx: &AiryContext, n: usize, lambda: Rat, ps: Vec<Vec<MPoly>>) -> Result<Self> {
        for (j, p) in ps.iter().enumerate() {
            if p.len() != n {
                return Err(Error::Schema(format!(
                    "coefficient of psi^({j}) has {} components, expected {n}",
                    p.len()
                )));
            }
            if p.iter().any(|c| [Var::U, Var::Z, Var::T].iter().any(|&v| c.mentions(v))) {
                return Err(Error::Schema(format!(
                    "coefficient of psi^({j}) is not polynomial in x alone"
                )));
            }
        }
        let blocks = ps
            .into_iter()
            .map(|p| Mat::column(p.into_iter().map(RatFunc::from_poly).collect()))
            .collect();
        let e = AiryExpr::new(ctx, RatFunc::constant(ctx.shift(&lambda)), blocks)?;
        Ok(AiryOrbitSpec::from_expr(lambda, &e))
    }

    fn from_expr(lambda: Rat, e: &AiryExpr) -> Self {
        AiryOrbitSpec {
            lambda,
            ps: e
                .blocks
                .iter()
                .map(|b| b.entries().iter().map(|x| x.num().clone()).collect())
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.ps.first().map_or(0, Vec::len)
    }

    pub fn expr(&self, ctx: &AiryContext) -> AiryExpr {
        let blocks = self
            .ps
            .iter()
            .map(|p| Mat::column(p.iter().cloned().map(RatFunc::from_poly).collect()))
            .collect();
        AiryExpr::new(ctx, RatFunc::constant(ctx.shift(&self.lambda)), blocks).expect("valid orbit")
    }
}

/// One kernel element: the orbit data with the index of `ψ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AiryElement {
    pub index: usize,
    pub expr: AiryExpr,
}

impl AiryElement {
    /// `ψ_i ↦ ψ_{i+1}`, indices modulo `N`.
    pub fn sigma(&self) -> AiryElement {
        let n = self.expr.ctx.order;
        AiryElement {
            index: self.index % n + 1,
            expr: self.expr.clone(),
        }
    }
}

pub fn sigma_orbit(spec: &AiryOrbitSpec, ctx: &AiryContext) -> Vec<AiryElement> {
    let mut out = vec![AiryElement {
        index: 1,
        expr: spec.expr(ctx),
    }];
    for _ in 1..ctx.order {
        let next = out.last().expect("nonempty").sigma();
        out.push(next);
    }
    out
}

/// `Σ_{r ≤ j} c^r/r! ψ^{(r)}(x + λ̂) v_{j-r}` with `c = -1/α_0`, for every
/// chain prefix of every rational eigenvalue of `q`.
pub fn airy_kernel_basis(q: &MatPolynomial, ctx: &AiryContext) -> Result<Vec<AiryOrbitSpec>> {
    let c = -ctx.alpha0.recip();
    let shift_of = |lam: &Rat| RatFunc::constant(ctx.shift(lam));
    let mut out = Vec::new();
    for (lambda, _) in rational_roots(&char_det(q))? {
        let set = jordan_chains(q, &lambda)?;
        for chain in &set.chains {
            for j in 0..chain.len() {
                let blocks: Vec<Mat> = (0..=j)
                    .map(|r| chain[j - r].scale_rat(&(pow(&c, r) / factorial(r))))
                    .collect();
                let e = AiryExpr::new(ctx, shift_of(&lambda), blocks)?;
                out.push(AiryOrbitSpec::from_expr(lambda.clone(), &e));
            }
        }
    }
    let l = ctx.eval_poly(q)?;
    for s in &out {
        let r = apply_left(&l, &s.expr(ctx))?;
        if !r.is_zero() {
            return Err(Error::InternalMismatch(format!(
                "chain element at {} is not annihilated by q(M_Ai)",
                fmt_rat(&s.lambda)
            )));
        }
    }
    Ok(out)
}

/// The monic operator of order `dN` annihilating every orbit, where `nd` is
/// the number of orbits, by an exact solve for its coefficients.
pub fn operator_from_kernel_airy(
    specs: &[AiryOrbitSpec],
    ctx: &AiryContext,
    q: &MatPolynomial,
) -> Result<OreOp> {
    let n = q.size();
    if specs.is_empty() || !specs.len().is_multiple_of(n) || specs.len() > n * q.degree() {
        return Err(Error::DegenerateKernel(format!(
            "need a positive multiple of n = {n} orbits, at most {}, got {}",
            n * q.degree(),
            specs.len()
        )));
    }
    let k = specs.len() / n * ctx.order;
    let l = ctx.eval_poly(q)?;
    for (idx, s) in specs.iter().enumerate() {
        if s.size() != n || s.ps.len() != ctx.order {
            return Err(Error::Schema(format!("orbit {} has the wrong shape", idx + 1)));
        }
        if !apply_left(&l, &s.expr(ctx))?.is_zero() {
            return Err(Error::KernelMismatch(format!(
                "orbit {} is not in the kernel of q(M_Ai)",
                idx + 1
            )));
        }
    }
    // column (s, j): stacked coefficients of ψ^{(j)} in f, f', ..., f^{(k-1)}
    let mut w_cols = Vec::new();
    let mut rhs_cols = Vec::new();
    for s in specs {
        let mut ders = vec![s.expr(ctx)];
        for _ in 0..k {
            let next = ders.last().expect("nonempty").dx();
            ders.push(next);
        }
        for j in 0..ctx.order {
            let stacked: Vec<Mat> = ders[..k].iter().map(|e| e.blocks[j].clone()).collect();
            w_cols.push(Mat::vstack(&stacked)?);
            rhs_cols.push(-&ders[k].blocks[j]);
        }
    }
    let w = Mat::hstack(&w_cols)?;
    let rhs = Mat::hstack(&rhs_cols)?;
    let a = solve_left(&w, &rhs).map_err(|e| match e {
        Error::SingularMatrix => Error::DegenerateKernel("the orbits do not determine a unique operator".into()),
        other => other,
    })?;
    let mut coeffs: Vec<Mat> = (0..k).map(|i| a.submatrix(0..n, i * n..(i + 1) * n)).collect();
    coeffs.push(Mat::identity(n));
    OreOp::new(n, Derivation::dx(), coeffs)
}

/// `x^i D^k C ↦ M̃^i (-∂_z)^k C`.
pub fn b_map_airy(p: &OreOp, ctx: &AiryContext) -> Result<OreOp> {
    let n = p.size();
    let dz = Derivation::dz();
    let mt = ctx.dual_generator(n)?;
    let mdz = OreOp::d(n, dz.clone()).neg();
    let mut acc = OreOp::zero(n, dz.clone());
    for (i, k, c) in p.normal_order()? {
        let term = mt
            .pow(i)?
            .compose(&mdz.pow(k)?)?
            .compose(&OreOp::from_mat(c, dz.clone()))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct AiryBundle {
    pub ctx: AiryContext,
    pub q_poly: MatPolynomial,
    pub specs: Vec<AiryOrbitSpec>,
    pub p: OreOp,
    pub q: OreOp,
    /// `q(M_Ai)`.
    pub l: OreOp,
    pub pq: OreOp,
    pub p_prime: OreOp,
    pub q_prime: OreOp,
    pub g: Mat,
    pub d: RatFunc,
    pub b_p_prime: OreOp,
    pub b_q_prime: OreOp,
    /// `q(w(z))`.
    pub q_w: Mat,
    pub dual: OreOp,
    pub phi: AiryExpr,
    pub phi_prime: AiryExpr,
    pub report: VerificationReport,
}

pub fn darboux_airy(q: &MatPolynomial, specs: &[AiryOrbitSpec], ctx: &AiryContext) -> Result<AiryBundle> {
    let n = q.size();
    let p = operator_from_kernel_airy(specs, ctx, q)?;
    let l = ctx.eval_poly(q)?;
    let (qq, rem) = l.right_divide(&p)?;
    if !rem.is_zero() {
        return Err(Error::NonzeroRemainder);
    }
    let pq = p.compose(&qq)?;
    let (p_prime, g, q_prime, d) = clear_denominators(&p, &qq)?;
    let b_p_prime = b_map_airy(&p_prime, ctx)?;
    let b_q_prime = b_map_airy(&q_prime, ctx)?;
    let q_w = ctx.q_of_w(q);
    let dual = OreOp::from_mat(q_w.inverse()?, Derivation::dz())
        .compose(&b_q_prime)?
        .compose(&b_p_prime)?;
    let base = AiryExpr::base(ctx, n);
    let phi = apply_left(&p, &base)?;
    let phi_prime = apply_left(&p_prime, &base)?;
    let mut bundle = AiryBundle {
        ctx: ctx.clone(),
        q_poly: q.clone(),
        specs: specs.to_vec(),
        p,
        q: qq,
        l,
        pq,
        p_prime,
        q_prime,
        g,
        d,
        b_p_prime,
        b_q_prime,
        q_w,
        dual,
        phi,
        phi_prime,
        report: VerificationReport::new(),
    };
    bundle.report = verify_airy(&bundle)?;
    Ok(bundle)
}

fn push_expr(report: &mut VerificationReport, name: &str, identity: &str, e: &AiryExpr) {
    report.push(name, identity, e.residual_string(), e.is_zero());
}

/// The two spectral identities for `q(M_Ai) = Q' g^{-1} P'`.
pub fn verify_airy_factorization(
    ctx: &AiryContext,
    q: &MatPolynomial,
    p_prime: &OreOp,
    g: &Mat,
    q_prime: &OreOp,
) -> Result<VerificationReport> {
    let n = q.size();
    let mut report = VerificationReport::new();
    if g.det()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let l = ctx.eval_poly(q)?;
    let ginv = OreOp::from_mat(g.inverse()?, Derivation::dx());
    let cleared = q_prime.compose(&ginv)?.compose(p_prime)?;
    report.push_op("cleared factorization", "Q' g^-1 P' - q(M_Ai) = 0", &cleared.sub(&l)?);

    let q_w = ctx.q_of_w(q);
    let phi = apply_left(p_prime, &AiryExpr::base(ctx, n))?;
    let l_prime = p_prime.compose(q_prime)?.compose(&ginv)?;
    let lhs = apply_left(&l_prime, &phi)?;
    let rhs = phi.right_mul(&q_w)?;
    push_expr(&mut report, "first identity", "(P' Q' g^-1) Phi = Phi q(w(z))", &lhs.plus(&rhs.negated()));

    let b_p = b_map_airy(p_prime, ctx)?;
    let b_q = b_map_airy(q_prime, ctx)?;
    let dual = OreOp::from_mat(q_w.inverse()?, Derivation::dz())
        .compose(&b_q)?
        .compose(&b_p)?;
    let lhs = phi.left_mul(g)?;
    let rhs = apply_right(&phi, &dual)?;
    push_expr(
        &mut report,
        "second identity",
        "g Phi = Phi (q(w(z))^-1 (bQ') (bP'))",
        &lhs.plus(&rhs.negated()),
    );
    Ok(report)
}

pub fn verify_airy(b: &AiryBundle) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    for (idx, s) in b.specs.iter().enumerate() {
        let r = apply_left(&b.p, &s.expr(&b.ctx))?;
        push_expr(&mut report, &format!("kernel {}", idx + 1), "P f = 0", &r);
    }
    report.push_op("factorization", "q(M_Ai) - Q P = 0", &b.l.sub(&b.q.compose(&b.p)?)?);
    let lhs = apply_left(&b.pq, &b.phi)?;
    let rhs = b.phi.right_mul(&b.q_w)?;
    push_expr(
        &mut report,
        "transformed eigenvalue",
        "(P Q) Phi = Phi q(w(z))",
        &lhs.plus(&rhs.negated()),
    );
    report.extend(verify_airy_factorization(&b.ctx, &b.q_poly, &b.p_prime, &b.g, &b.q_prime)?);
    Ok(report)
}
