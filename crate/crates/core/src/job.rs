//! JSON job documents: input schemas, the five run modes and result documents.
//!
//! Every exact value crosses the boundary as a string in the expression
//! grammar of [`crate::exact::parse`], so result documents can be read back by
//! the `verify` mode.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::airy::{
    airy_kernel_basis, darboux_airy, verify_airy_factorization, AiryContext, AiryExpr, AiryOrbitSpec,
};
use crate::error::{Error, Result};
use crate::exact::rat::fmt_rat;
use crate::exact::{parse_poly, parse_rat, parse_ratfunc, Derivation, MPoly, Rat, RatFunc, Var};
use crate::latex::{latex_mat, latex_op, latex_poly, latex_ratfunc, latex_document};
use crate::linalg::{quasideterminant, BlockMat, Mat};
use crate::matpoly::{chain_residuals, char_det, jordan_chains, rational_roots, MatPolynomial};
use crate::ore::OreOp;
use crate::rank1::{darboux_rank1, verify_factorization, QuasiEntry, QuasiKernelSpec};
use crate::report::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rank1,
    Airy,
    Jordan,
    Quasidet,
    Verify,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Rank1, Mode::Airy, Mode::Jordan, Mode::Quasidet, Mode::Verify];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Rank1 => "rank1",
            Mode::Airy => "airy",
            Mode::Jordan => "jordan",
            Mode::Quasidet => "quasidet",
            Mode::Verify => "verify",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown mode `{s}`")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct JobOptions {
    /// Overrides `alpha0` of Airy jobs.
    pub alpha0: Option<Rat>,
    /// Emit only the report.
    pub check_only: bool,
}

#[derive(Clone, Debug)]
pub struct JobOutput {
    pub document: Value,
    pub latex: String,
    pub all_pass: bool,
}

impl JobOutput {
    /// Pretty JSON with a trailing newline; byte-identical for identical input.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.document).expect("serializable");
        s.push('\n');
        s
    }
}

// ---------------------------------------------------------------- input

/// A rational or an expression: `"3/2"`, `"x^2 - 1/x"`, or a bare integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ScalarIn {
    Text(String),
    Int(i64),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermIn {
    pub coeff: ScalarIn,
    #[serde(default)]
    pub exponents: BTreeMap<String, u32>,
}

/// A polynomial (or, in matrix entries, a rational function) either as an
/// expression string or as a list of terms.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ExprIn {
    Scalar(ScalarIn),
    Terms(Vec<TermIn>),
}

pub type MatIn = Vec<Vec<ExprIn>>;

#[derive(Clone, Debug, Deserialize)]
pub struct OpIn {
    #[serde(default)]
    pub var: Option<String>,
    #[serde(default)]
    pub order: Option<usize>,
    pub coeffs: Vec<MatIn>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelEntryIn {
    #[serde(default)]
    pub alpha: Option<ScalarIn>,
    pub p: Vec<ExprIn>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rank1In {
    #[serde(default)]
    pub mode: Option<String>,
    pub n: usize,
    pub kernel: Vec<KernelEntryIn>,
    #[serde(default, rename = "L")]
    pub l: Option<OpIn>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitIn {
    pub lambda: ScalarIn,
    pub ps: Vec<Vec<ExprIn>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiryIn {
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default = "default_order", rename = "N")]
    pub order: usize,
    #[serde(default)]
    pub alphas: Option<Vec<ScalarIn>>,
    #[serde(default)]
    pub alpha0: Option<ScalarIn>,
    pub q: Vec<MatIn>,
    #[serde(default)]
    pub orbits: Option<Vec<OrbitIn>>,
}

fn default_order() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JordanIn {
    #[serde(default)]
    pub mode: Option<String>,
    pub q: Vec<MatIn>,
    #[serde(default)]
    pub lambda: Option<ScalarIn>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasidetIn {
    #[serde(default)]
    pub mode: Option<String>,
    pub block_size: usize,
    pub matrix: MatIn,
    /// 1-based block row.
    pub i: usize,
    /// 1-based block column.
    pub j: usize,
}

/// The fields of a rank-1 or Airy result document that `verify` reads.
#[derive(Clone, Debug, Deserialize)]
pub struct VerifyIn {
    pub mode: String,
    #[serde(default, rename = "L")]
    pub l: Option<OpIn>,
    #[serde(rename = "P_prime")]
    pub p_prime: OpIn,
    #[serde(rename = "Q_prime")]
    pub q_prime: OpIn,
    pub g: MatIn,
    #[serde(default, rename = "N")]
    pub order: Option<usize>,
    #[serde(default)]
    pub alphas: Option<Vec<ScalarIn>>,
    #[serde(default)]
    pub alpha0: Option<ScalarIn>,
    #[serde(default)]
    pub q: Option<Vec<MatIn>>,
}

fn scalar_rat(s: &ScalarIn, what: &str) -> Result<Rat> {
    match s {
        ScalarIn::Int(k) => Ok(Rat::from_integer((*k).into())),
        ScalarIn::Text(t) => parse_rat(t.trim()).map_err(|e| Error::Parse(format!("{what}: {e}"))),
    }
}

fn terms_poly(terms: &[TermIn]) -> Result<MPoly> {
    let mut acc = MPoly::zero();
    for t in terms {
        let c = scalar_rat(&t.coeff, "term coefficient")?;
        let mut e = [0u32; 4];
        for (name, &k) in &t.exponents {
            e[Var::from_name(name)?.index()] += k;
        }
        acc = &acc + &MPoly::monomial(e, c);
    }
    Ok(acc)
}

fn expr_poly(e: &ExprIn) -> Result<MPoly> {
    match e {
        ExprIn::Scalar(ScalarIn::Int(k)) => Ok(MPoly::constant(Rat::from_integer((*k).into()))),
        ExprIn::Scalar(ScalarIn::Text(t)) => parse_poly(t),
        ExprIn::Terms(ts) => terms_poly(ts),
    }
}

fn expr_ratfunc(e: &ExprIn) -> Result<RatFunc> {
    match e {
        ExprIn::Scalar(ScalarIn::Text(t)) => parse_ratfunc(t),
        other => expr_poly(other).map(RatFunc::from_poly),
    }
}

fn mat_in(m: &MatIn) -> Result<Mat> {
    if m.is_empty() || m[0].is_empty() {
        return Err(Error::Schema("matrix must have at least one row and column".into()));
    }
    let rows = m
        .iter()
        .map(|r| r.iter().map(expr_ratfunc).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Mat::from_rows(rows)
}

fn square_in(m: &MatIn, n: Option<usize>) -> Result<Mat> {
    let a = mat_in(m)?;
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if let Some(n) = n {
        if a.rows() != n {
            return Err(Error::DimensionMismatch(format!("expected {n}x{n}, got {}x{}", a.rows(), a.cols())));
        }
    }
    Ok(a)
}

fn op_in(o: &OpIn, var: Var, n: Option<usize>) -> Result<OreOp> {
    if let Some(v) = &o.var {
        if Var::from_name(v)? != var {
            return Err(Error::Schema(format!("operator in `{v}` where `{}` was expected", var.name())));
        }
    }
    if o.coeffs.is_empty() {
        return Err(Error::Schema("operator has no coefficients".into()));
    }
    let first = square_in(&o.coeffs[0], n)?;
    let size = first.rows();
    let mut coeffs = vec![first];
    for c in &o.coeffs[1..] {
        coeffs.push(square_in(c, Some(size))?);
    }
    let deriv = match var {
        Var::Z => Derivation::dz(),
        _ => Derivation::dx(),
    };
    let op = OreOp::new(size, deriv, coeffs)?;
    if let Some(k) = o.order {
        if k != op.order() {
            return Err(Error::Schema(format!("declared order {k}, coefficients give {}", op.order())));
        }
    }
    Ok(op)
}

fn matpoly_in(q: &[MatIn]) -> Result<MatPolynomial> {
    let first = square_in(q.first().ok_or_else(|| Error::Schema("q has no coefficients".into()))?, None)?;
    let n = first.rows();
    let mut coeffs = vec![first];
    for c in &q[1..] {
        coeffs.push(square_in(c, Some(n))?);
    }
    MatPolynomial::new(coeffs)
}

fn airy_context(order: usize, alphas: Option<&[ScalarIn]>, alpha0: Option<&ScalarIn>, opts: &JobOptions) -> Result<AiryContext> {
    let alphas = match alphas {
        Some(a) => a.iter().map(|s| scalar_rat(s, "alphas")).collect::<Result<Vec<_>>>()?,
        None => vec![Rat::zero(); order.saturating_sub(1)],
    };
    let alpha0 = match (&opts.alpha0, alpha0) {
        (Some(a), _) => a.clone(),
        (None, Some(s)) => scalar_rat(s, "alpha0")?,
        (None, None) => Rat::from_integer((-1).into()),
    };
    AiryContext::new(order, alphas, alpha0)
}

fn decode<T: DeserializeOwned>(v: Value, mode: Mode) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Schema(format!("{mode} job: {e}")))
}

fn check_mode(v: &Value, mode: Mode) -> Result<()> {
    match v.get("mode") {
        None => Ok(()),
        Some(Value::String(s)) if mode == Mode::Verify || s == mode.name() => Ok(()),
        Some(other) => Err(Error::Schema(format!("document mode {other} does not match `{mode}`"))),
    }
}

// ---------------------------------------------------------------- output

#[derive(Clone, Debug, Serialize)]
pub struct OpOut {
    pub var: &'static str,
    pub order: usize,
    pub coeffs: Vec<Vec<Vec<String>>>,
}

pub fn mat_out(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect()
}

pub fn op_out(op: &OreOp) -> OpOut {
    OpOut {
        var: op.derivation().var().name(),
        order: op.order(),
        coeffs: op.coeffs().iter().map(mat_out).collect(),
    }
}

fn column_out(m: &Mat) -> Vec<String> {
    m.entries().iter().map(ToString::to_string).collect()
}

#[derive(Serialize)]
struct ReportOnly<'a> {
    mode: &'static str,
    report: &'a VerificationReport,
}

#[derive(Serialize)]
struct ExpWaveOut {
    factor: &'static str,
    matrix: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct Rank1Out {
    mode: &'static str,
    n: usize,
    order: usize,
    arrangement: Vec<usize>,
    #[serde(rename = "P")]
    p: OpOut,
    #[serde(rename = "Q")]
    q: OpOut,
    #[serde(rename = "L")]
    l: OpOut,
    #[serde(rename = "PQ")]
    pq: OpOut,
    d: String,
    g: Vec<Vec<String>>,
    #[serde(rename = "P_prime")]
    p_prime: OpOut,
    #[serde(rename = "Q_prime")]
    q_prime: OpOut,
    #[serde(rename = "L_prime")]
    l_prime: OpOut,
    #[serde(rename = "bP_prime")]
    b_p_prime: OpOut,
    #[serde(rename = "bQ_prime")]
    b_q_prime: OpOut,
    #[serde(rename = "bL")]
    b_l: OpOut,
    dual: OpOut,
    #[serde(rename = "Phi")]
    phi: ExpWaveOut,
    #[serde(rename = "Phi_prime")]
    phi_prime: ExpWaveOut,
    report: VerificationReport,
}

#[derive(Serialize)]
struct AiryTermOut {
    derivative: usize,
    matrix: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct AiryWaveOut {
    argument: String,
    terms: Vec<AiryTermOut>,
}

fn airy_wave_out(e: &AiryExpr) -> AiryWaveOut {
    let arg = &RatFunc::var(Var::X) + e.shift();
    AiryWaveOut {
        argument: arg.to_string(),
        terms: e
            .blocks()
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_zero())
            .map(|(j, b)| AiryTermOut {
                derivative: j,
                matrix: mat_out(b),
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct OrbitOut {
    lambda: String,
    ps: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct AiryOut {
    mode: &'static str,
    n: usize,
    #[serde(rename = "N")]
    order: usize,
    alphas: Vec<String>,
    alpha0: String,
    q: Vec<Vec<Vec<String>>>,
    orbits: Vec<OrbitOut>,
    #[serde(rename = "P")]
    p: OpOut,
    #[serde(rename = "Q")]
    q_op: OpOut,
    #[serde(rename = "L")]
    l: OpOut,
    #[serde(rename = "PQ")]
    pq: OpOut,
    d: String,
    g: Vec<Vec<String>>,
    #[serde(rename = "P_prime")]
    p_prime: OpOut,
    #[serde(rename = "Q_prime")]
    q_prime: OpOut,
    #[serde(rename = "bP_prime")]
    b_p_prime: OpOut,
    #[serde(rename = "bQ_prime")]
    b_q_prime: OpOut,
    q_w: Vec<Vec<String>>,
    dual: OpOut,
    #[serde(rename = "Phi")]
    phi: AiryWaveOut,
    #[serde(rename = "Phi_prime")]
    phi_prime: AiryWaveOut,
    report: VerificationReport,
}

#[derive(Serialize)]
struct EigenOut {
    lambda: String,
    multiplicity: usize,
    chains: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct JordanOut {
    mode: &'static str,
    n: usize,
    degree: usize,
    det: String,
    eigenvalues: Vec<EigenOut>,
    report: VerificationReport,
}

#[derive(Serialize)]
struct QuasidetOut {
    mode: &'static str,
    block_size: usize,
    i: usize,
    j: usize,
    result: Vec<Vec<String>>,
    report: VerificationReport,
}

#[derive(Serialize)]
struct VerifyOut {
    mode: &'static str,
    of: String,
    report: VerificationReport,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn finish<T: Serialize>(
    mode: Mode,
    full: &T,
    report: &VerificationReport,
    items: Vec<(String, String)>,
    opts: &JobOptions,
) -> JobOutput {
    let document = if opts.check_only {
        to_value(&ReportOnly {
            mode: mode.name(),
            report,
        })
    } else {
        to_value(full)
    };
    JobOutput {
        document,
        latex: latex_document(&items, Some(report)),
        all_pass: report.all_pass,
    }
}

// ---------------------------------------------------------------- modes

/// Parses `input` as a `mode` document and runs it.
pub fn run_job(mode: Mode, input: &str, opts: &JobOptions) -> Result<JobOutput> {
    let v: Value = serde_json::from_str(input).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    if !v.is_object() {
        return Err(Error::Schema("job document must be a JSON object".into()));
    }
    check_mode(&v, mode)?;
    match mode {
        Mode::Rank1 => run_rank1(&decode(v, mode)?, opts),
        Mode::Airy => run_airy(&decode(v, mode)?, opts),
        Mode::Jordan => run_jordan(&decode(v, mode)?, opts),
        Mode::Quasidet => run_quasidet(&decode(v, mode)?, opts),
        Mode::Verify => run_verify(&decode(v, mode)?, opts),
    }
}

pub fn rank1_spec(input: &Rank1In) -> Result<QuasiKernelSpec> {
    let entries = input
        .kernel
        .iter()
        .map(|e| {
            Ok(QuasiEntry {
                alpha: match &e.alpha {
                    Some(a) => scalar_rat(a, "alpha")?,
                    None => Rat::zero(),
                },
                p: e.p.iter().map(expr_poly).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    QuasiKernelSpec::new(input.n, entries)
}

fn run_rank1(input: &Rank1In, opts: &JobOptions) -> Result<JobOutput> {
    let spec = rank1_spec(input)?;
    let l = input.l.as_ref().map(|o| op_in(o, Var::X, Some(input.n))).transpose()?;
    let b = darboux_rank1(&spec, l.as_ref())?;
    let full = Rank1Out {
        mode: "rank1",
        n: spec.n,
        order: b.p.order(),
        arrangement: b.arrangement.iter().map(|i| i + 1).collect(),
        p: op_out(&b.p),
        q: op_out(&b.q),
        l: op_out(&b.l),
        pq: op_out(&b.pq),
        d: b.d.to_string(),
        g: mat_out(&b.g),
        p_prime: op_out(&b.p_prime),
        q_prime: op_out(&b.q_prime),
        l_prime: op_out(&b.l_prime),
        b_p_prime: op_out(&b.b_p_prime),
        b_q_prime: op_out(&b.b_q_prime),
        b_l: op_out(&b.b_l),
        dual: op_out(&b.dual),
        phi: ExpWaveOut {
            factor: "exp(x*z)",
            matrix: mat_out(&b.phi),
        },
        phi_prime: ExpWaveOut {
            factor: "exp(x*z)",
            matrix: mat_out(&b.phi_prime),
        },
        report: b.report.clone(),
    };
    let items = vec![
        ("P".into(), format!("P = {}", latex_op(&b.p))),
        ("Q".into(), format!("Q = {}", latex_op(&b.q))),
        ("PQ".into(), format!("P Q = {}", latex_op(&b.pq))),
        ("g".into(), format!("g = {}", latex_mat(&b.g))),
        ("b(P')".into(), format!("b(P') = {}", latex_op(&b.b_p_prime))),
        ("Dual operator".into(), latex_op(&b.dual)),
        ("Phi".into(), format!("\\Phi = e^{{xz}} {}", latex_mat(&b.phi))),
    ];
    Ok(finish(Mode::Rank1, &full, &b.report, items, opts))
}

pub fn airy_inputs(input: &AiryIn, opts: &JobOptions) -> Result<(AiryContext, MatPolynomial, Vec<AiryOrbitSpec>)> {
    let ctx = airy_context(input.order, input.alphas.as_deref(), input.alpha0.as_ref(), opts)?;
    let q = matpoly_in(&input.q)?;
    let specs = match &input.orbits {
        None => airy_kernel_basis(&q, &ctx)?,
        Some(orbits) => orbits
            .iter()
            .map(|o| {
                let lambda = scalar_rat(&o.lambda, "lambda")?;
                let ps = o
                    .ps
                    .iter()
                    .map(|col| col.iter().map(expr_poly).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                AiryOrbitSpec::new(&ctx, q.size(), lambda, ps)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok((ctx, q, specs))
}

fn run_airy(input: &AiryIn, opts: &JobOptions) -> Result<JobOutput> {
    let (ctx, q, specs) = airy_inputs(input, opts)?;
    let b = darboux_airy(&q, &specs, &ctx)?;
    let full = AiryOut {
        mode: "airy",
        n: q.size(),
        order: ctx.order(),
        alphas: ctx.alphas().iter().map(fmt_rat).collect(),
        alpha0: fmt_rat(ctx.alpha0()),
        q: q.coeffs().iter().map(mat_out).collect(),
        orbits: b
            .specs
            .iter()
            .map(|s| OrbitOut {
                lambda: fmt_rat(&s.lambda),
                ps: s.ps.iter().map(|c| c.iter().map(ToString::to_string).collect()).collect(),
            })
            .collect(),
        p: op_out(&b.p),
        q_op: op_out(&b.q),
        l: op_out(&b.l),
        pq: op_out(&b.pq),
        d: b.d.to_string(),
        g: mat_out(&b.g),
        p_prime: op_out(&b.p_prime),
        q_prime: op_out(&b.q_prime),
        b_p_prime: op_out(&b.b_p_prime),
        b_q_prime: op_out(&b.b_q_prime),
        q_w: mat_out(&b.q_w),
        dual: op_out(&b.dual),
        phi: airy_wave_out(&b.phi),
        phi_prime: airy_wave_out(&b.phi_prime),
        report: b.report.clone(),
    };
    let items = vec![
        ("P".into(), format!("P = {}", latex_op(&b.p))),
        ("Q".into(), format!("Q = {}", latex_op(&b.q))),
        ("PQ".into(), format!("P Q = {}", latex_op(&b.pq))),
        ("g".into(), format!("g = {}", latex_mat(&b.g))),
        ("b(P')".into(), format!("b(P') = {}", latex_op(&b.b_p_prime))),
        ("q(w(z))".into(), latex_mat(&b.q_w)),
    ];
    Ok(finish(Mode::Airy, &full, &b.report, items, opts))
}

fn run_jordan(input: &JordanIn, opts: &JobOptions) -> Result<JobOutput> {
    let q = matpoly_in(&input.q)?;
    let chi = char_det(&q);
    let lambdas = match &input.lambda {
        Some(l) => vec![scalar_rat(l, "lambda")?],
        None => rational_roots(&chi)?.into_iter().map(|(l, _)| l).collect(),
    };
    let mut report = VerificationReport::new();
    let mut eigen = Vec::new();
    let mut items = vec![("det q(t)".to_string(), latex_poly(&chi))];
    for lambda in &lambdas {
        let set = jordan_chains(&q, lambda)?;
        let lam = fmt_rat(lambda);
        for (c, chain) in set.chains.iter().enumerate() {
            for (j, r) in chain_residuals(&q, lambda, chain).iter().enumerate() {
                report.push_mat(
                    &format!("chain {} at {lam}, v_{j}", c + 1),
                    "sum_r q^(r)(lambda) v_(j-r) / r! = 0",
                    r,
                );
            }
            items.push((
                format!("Chain {} at {lam}", c + 1),
                chain.iter().map(latex_mat).collect::<Vec<_>>().join(",\\ "),
            ));
        }
        let total = set.total_length();
        report.push(
            &format!("total length at {lam}"),
            "sum of chain lengths = multiplicity",
            format!("{}", total as i64 - set.multiplicity as i64),
            total == set.multiplicity,
        );
        let leading: Vec<Mat> = set.chains.iter().map(|c| c[0].clone()).collect();
        let rank = Mat::hstack(&leading)?.rank();
        report.push(
            &format!("leading vectors at {lam}"),
            "leading vectors are independent",
            format!("{}", leading.len() - rank),
            rank == leading.len(),
        );
        eigen.push(EigenOut {
            lambda: lam,
            multiplicity: set.multiplicity,
            chains: set.chains.iter().map(|c| c.iter().map(column_out).collect()).collect(),
        });
    }
    let full = JordanOut {
        mode: "jordan",
        n: q.size(),
        degree: q.degree(),
        det: chi.to_string(),
        eigenvalues: eigen,
        report: report.clone(),
    };
    Ok(finish(Mode::Jordan, &full, &report, items, opts))
}

fn run_quasidet(input: &QuasidetIn, opts: &JobOptions) -> Result<JobOutput> {
    let m = mat_in(&input.matrix)?;
    if input.block_size == 0 {
        return Err(Error::Schema("block_size must be positive".into()));
    }
    let x = BlockMat::from_flat(&m, input.block_size)?;
    if input.i == 0 || input.j == 0 {
        return Err(Error::Schema("block indices are 1-based".into()));
    }
    let r = quasideterminant(&x, input.i - 1, input.j - 1)?;
    let mut report = VerificationReport::new();
    // |X|_ij = ((X^-1)_ji)^-1 whenever both sides exist
    if m.is_square() && !m.det()?.is_zero() {
        let n = input.block_size;
        let inv = m.inverse()?;
        let (bi, bj) = (input.i - 1, input.j - 1);
        let block = inv.submatrix(bj * n..(bj + 1) * n, bi * n..(bi + 1) * n);
        if !block.det()?.is_zero() {
            report.push_mat(
                "inverse block",
                "|X|_ij - ((X^-1)_ji)^-1 = 0",
                &(&r - &block.inverse()?),
            );
        }
    }
    let full = QuasidetOut {
        mode: "quasidet",
        block_size: input.block_size,
        i: input.i,
        j: input.j,
        result: mat_out(&r),
        report: report.clone(),
    };
    let items = vec![(
        format!("Quasideterminant ({}, {})", input.i, input.j),
        latex_mat(&r),
    )];
    Ok(finish(Mode::Quasidet, &full, &report, items, opts))
}

fn run_verify(input: &VerifyIn, opts: &JobOptions) -> Result<JobOutput> {
    let p_prime = op_in(&input.p_prime, Var::X, None)?;
    let n = p_prime.size();
    let q_prime = op_in(&input.q_prime, Var::X, Some(n))?;
    let g = square_in(&input.g, Some(n))?;
    let report = match input.mode.as_str() {
        "rank1" => {
            let l = input
                .l
                .as_ref()
                .ok_or_else(|| Error::Schema("rank1 verification needs `L`".into()))?;
            verify_factorization(&op_in(l, Var::X, Some(n))?, &p_prime, &g, &q_prime)?
        }
        "airy" => {
            let ctx = airy_context(
                input.order.unwrap_or(2),
                input.alphas.as_deref(),
                input.alpha0.as_ref(),
                opts,
            )?;
            let q = matpoly_in(
                input
                    .q
                    .as_deref()
                    .ok_or_else(|| Error::Schema("airy verification needs `q`".into()))?,
            )?;
            verify_airy_factorization(&ctx, &q, &p_prime, &g, &q_prime)?
        }
        other => {
            return Err(Error::Schema(format!(
                "verify reads rank1 or airy result documents, got mode `{other}`"
            )))
        }
    };
    let full = VerifyOut {
        mode: "verify",
        of: input.mode.clone(),
        report: report.clone(),
    };
    let items = vec![
        ("P'".into(), latex_op(&p_prime)),
        ("Q'".into(), latex_op(&q_prime)),
        ("g".into(), latex_ratfunc_mat(&g)),
    ];
    Ok(finish(Mode::Verify, &full, &report, items, opts))
}

fn latex_ratfunc_mat(g: &Mat) -> String {
    if g.rows() == 1 {
        latex_ratfunc(g.get(0, 0))
    } else {
        latex_mat(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(mode: Mode, doc: &str) -> Result<JobOutput> {
        run_job(mode, doc, &JobOptions::default())
    }

    #[test]
    fn rank1_two_by_two() {
        let doc = r#"{"mode":"rank1","n":2,"kernel":[
            {"alpha":"0","p":["x","0"]},
            {"alpha":"0","p":[[{"coeff":"1","exponents":{}}],"x"]}]}"#;
        let out = run(Mode::Rank1, doc).unwrap();
        assert!(out.all_pass);
        let p = &out.document["P"]["coeffs"][0];
        assert_eq!(p, &serde_json::json!([["-1/x", "1/x^2"], ["0", "-1/x"]]));
        assert_eq!(out.document["g"], serde_json::json!([["x^4", "0"], ["0", "x^4"]]));
        assert!(out.latex.contains("\\frac{1}{x^{2}}"));
    }

    #[test]
    fn verify_reads_result_documents() {
        let doc = r#"{"n":1,"kernel":[{"alpha":"2","p":["1"]}]}"#;
        let out = run(Mode::Rank1, doc).unwrap();
        let again = run(Mode::Verify, &out.render()).unwrap();
        assert!(again.all_pass);
        assert_eq!(again.document["of"], "rank1");
    }

    #[test]
    fn check_only_keeps_report() {
        let doc = r#"{"n":1,"kernel":[{"p":["x"]}]}"#;
        let opts = JobOptions {
            check_only: true,
            ..JobOptions::default()
        };
        let out = run_job(Mode::Rank1, doc, &opts).unwrap();
        let keys: Vec<&String> = out.document.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 2);
        assert!(out.document.get("report").is_some());
    }

    #[test]
    fn schema_errors() {
        let bad = r#"{"n":2,"kernel":[{"p":["x","0"]}]}"#;
        assert!(matches!(run(Mode::Rank1, bad), Err(Error::Schema(_))));
        assert!(matches!(run(Mode::Rank1, "{"), Err(Error::Parse(_))));
        assert!(matches!(run(Mode::Airy, r#"{"mode":"rank1","q":[]}"#), Err(Error::Schema(_))));
        let unknown = r#"{"n":1,"kernel":[{"p":[[{"coeff":"1","exponents":{"y":1}}]]}]}"#;
        assert!(matches!(run(Mode::Rank1, unknown), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn quasidet_commutative() {
        let doc = r#"{"block_size":1,"matrix":[["1","2"],["3","4"]],"i":1,"j":1}"#;
        let out = run(Mode::Quasidet, doc).unwrap();
        assert_eq!(out.document["result"], serde_json::json!([["-1/2"]]));
        assert!(out.all_pass);
    }

    #[test]
    fn modes_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
        assert!("nope".parse::<Mode>().is_err());
    }
}
