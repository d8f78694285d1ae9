//! Builders, random generators and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use ncdx_core::exact::{int, parse_poly, parse_rat, parse_ratfunc, rat, Derivation, MPoly, Rat, RatFunc, Var};
use ncdx_core::linalg::Mat;
use ncdx_core::matpoly::MatPolynomial;
use ncdx_core::ore::OreOp;
use ncdx_core::rank1::{QuasiEntry, QuasiKernelSpec};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn m(rows: &[&[&str]]) -> Mat {
    Mat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|s| parse_ratfunc(s).unwrap()).collect())
            .collect(),
    )
    .unwrap()
}

pub fn spec(n: usize, entries: &[(&str, &[&str])]) -> QuasiKernelSpec {
    QuasiKernelSpec::new(
        n,
        entries
            .iter()
            .map(|(a, p)| QuasiEntry {
                alpha: parse_rat(a).unwrap(),
                p: p.iter().map(|s| parse_poly(s).unwrap()).collect(),
            })
            .collect(),
    )
    .unwrap()
}

pub fn x_op(coeffs: &[Mat]) -> OreOp {
    OreOp::new(coeffs[0].rows(), Derivation::dx(), coeffs.to_vec()).unwrap()
}

pub fn z_op(coeffs: &[Mat]) -> OreOp {
    OreOp::new(coeffs[0].rows(), Derivation::dz(), coeffs.to_vec()).unwrap()
}

/// The nilpotent shift with ones on the superdiagonal.
pub fn jmat(n: usize) -> Mat {
    Mat::from_fn(n, n, |i, j| if j == i + 1 { RatFunc::one() } else { RatFunc::zero() })
}

// ------------------------------------------------------------ oracles

/// Laplace expansion along the first row.
pub fn cofactor_det(a: &Mat) -> RatFunc {
    let n = a.rows();
    assert_eq!(n, a.cols());
    if n == 0 {
        return RatFunc::one();
    }
    if n == 1 {
        return a.get(0, 0).clone();
    }
    let mut acc = RatFunc::zero();
    for j in 0..n {
        if a.get(0, j).is_zero() {
            continue;
        }
        let minor = Mat::from_fn(n - 1, n - 1, |r, c| a.get(r + 1, if c < j { c } else { c + 1 }).clone());
        let term = a.get(0, j) * &cofactor_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Adjugate over determinant.
pub fn cofactor_inverse(a: &Mat) -> Mat {
    let n = a.rows();
    let det = cofactor_det(a);
    let inv_det = det.inv().expect("invertible");
    Mat::from_fn(n, n, |i, j| {
        // entry (i, j) is the (j, i) cofactor
        let minor = Mat::from_fn(n - 1, n - 1, |r, c| {
            a.get(if r < j { r } else { r + 1 }, if c < i { c } else { c + 1 }).clone()
        });
        let c = &cofactor_det(&minor) * &inv_det;
        if (i + j) % 2 == 0 {
            c
        } else {
            -&c
        }
    })
}

fn binom(n: usize, k: usize) -> Rat {
    let mut r = Rat::one();
    for i in 0..k {
        r = r * int((n - i) as i64) / int((i + 1) as i64);
    }
    r
}

/// `Σ_{r ≤ j} (q^{(r)}(λ)/r!) v_{j-r}` with `q^{(r)}(λ)/r! = Σ_i C(i, r) λ^{i-r} A_i`.
pub fn chain_residual_oracle(q: &MatPolynomial, lambda: &Rat, chain: &[Mat]) -> Vec<Mat> {
    let n = q.size();
    let taylor = |r: usize| -> Mat {
        let mut acc = Mat::zeros(n, n);
        for (i, a) in q.coeffs().iter().enumerate().skip(r) {
            let mut lp = Rat::one();
            for _ in 0..i - r {
                lp *= lambda;
            }
            acc = &acc + &a.scale_rat(&(binom(i, r) * lp));
        }
        acc
    };
    (0..chain.len())
        .map(|j| {
            let mut acc = Mat::zeros(n, 1);
            for r in 0..=j {
                acc = &acc + &(&taylor(r) * &chain[j - r]);
            }
            acc
        })
        .collect()
}

/// `Σ A_k f^{(k)}` with every derivative taken entry by entry.
pub fn apply_by_repeated_derivation(p: &OreOp, f: &Mat, d: &Derivation) -> Mat {
    let mut acc = Mat::zeros(p.size(), f.cols());
    for (k, a) in p.coeffs().iter().enumerate() {
        let fk = f.map(|e| d.apply_n(e, k));
        acc = &acc + &(a * &fk);
    }
    acc
}

/// Splits a column of `Σ_e c_e(x) u^e` entries into one column per exponent.
pub fn split_by_u_exponent(f: &Mat) -> Vec<Mat> {
    use std::collections::BTreeMap;
    let mut pieces: BTreeMap<i64, Vec<RatFunc>> = BTreeMap::new();
    for (idx, e) in f.entries().iter().enumerate() {
        let a = e.den().degree_in(Var::U);
        let rest = e.den().exact_div(&MPoly::var_pow(Var::U, a)).expect("u-monomial denominator");
        assert!(!rest.mentions(Var::U));
        let rest = RatFunc::from_poly(rest);
        for (k, c) in e.num().coeffs_in(Var::U).into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let expo = k as i64 - a as i64;
            let u = RatFunc::var(Var::U).pow(expo as i32).unwrap();
            let term = &RatFunc::from_poly(c).div(&rest).unwrap() * &u;
            let slot = pieces.entry(expo).or_insert_with(|| vec![RatFunc::zero(); f.entries().len()]);
            slot[idx] = &slot[idx] + &term;
        }
    }
    pieces
        .into_values()
        .map(|v| Mat::new(f.rows(), f.cols(), v).unwrap())
        .collect()
}

/// `h · (T - alpha)` on ascending coefficient lists.
pub fn poly_mul_linear(h: &[Rat], alpha: &Rat) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); h.len() + 1];
    for (i, c) in h.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * alpha;
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

// ------------------------------------------------------------ generators

const POOL: [(i64, i64); 7] = [(-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1), (1, 2), (-1, 3)];

pub fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    let (n, d) = POOL[rng.gen_range(0..POOL.len())];
    rat(n, d)
}

fn small_int(rng: &mut ChaCha8Rng) -> Rat {
    int(rng.gen_range(-2..=2))
}

/// A polynomial in `vars` with at most three terms and exponents at most 2.
pub fn random_poly(rng: &mut ChaCha8Rng, vars: &[Var]) -> MPoly {
    let mut acc = MPoly::zero();
    for _ in 0..rng.gen_range(0..=3) {
        let mut e = [0u32; 4];
        for v in vars {
            e[v.index()] = rng.gen_range(0..=2);
        }
        acc = &acc + &MPoly::monomial(e, small_rat(rng));
    }
    acc
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, vars: &[Var]) -> Mat {
    Mat::from_fn(rows, cols, |_, _| RatFunc::from_poly(random_poly(rng, vars)))
}

/// Order at most 2, polynomial coefficients in `var`.
pub fn random_poly_op(rng: &mut ChaCha8Rng, n: usize, var: Var) -> OreOp {
    let order = rng.gen_range(0..=2);
    let coeffs = (0..=order).map(|_| random_matrix(rng, n, n, &[var])).collect();
    let d = if var == Var::Z { Derivation::dz() } else { Derivation::dx() };
    OreOp::new(n, d, coeffs).unwrap()
}

/// `n ≤ 2`, `k ≤ 2`, exponents and coefficients from a small pool, redrawn
/// until the default annihilator `h(D) I` has order at most 4.
pub fn random_kernel(rng: &mut ChaCha8Rng) -> QuasiKernelSpec {
    const ALPHAS: [(i64, i64); 5] = [(0, 1), (0, 1), (1, 1), (-1, 1), (1, 2)];
    loop {
        let n = rng.gen_range(1..=2);
        let k = rng.gen_range(1..=2);
        let entries: Vec<QuasiEntry> = (0..n * k)
            .map(|_| {
                let (a, b) = ALPHAS[rng.gen_range(0..ALPHAS.len())];
                QuasiEntry {
                    alpha: rat(a, b),
                    p: (0..n).map(|_| random_poly(rng, &[Var::X])).collect(),
                }
            })
            .collect();
        let mut orders: std::collections::BTreeMap<Rat, u32> = Default::default();
        for e in &entries {
            let deg = e.p.iter().map(|c| c.degree_in(Var::X)).max().unwrap_or(0);
            let slot = orders.entry(e.alpha.clone()).or_insert(0);
            *slot = (*slot).max(deg + 1);
        }
        if orders.values().sum::<u32>() <= 4 {
            return QuasiKernelSpec::new(n, entries).unwrap();
        }
    }
}

/// `S T S^{-1}` with `T` upper triangular and `S` unimodular over the integers.
fn random_triangularizable(rng: &mut ChaCha8Rng) -> Mat {
    let t = Mat::from_rows(vec![
        vec![RatFunc::constant(small_int(rng)), RatFunc::constant(small_int(rng))],
        vec![RatFunc::zero(), RatFunc::constant(small_int(rng))],
    ])
    .unwrap();
    let (s, r) = (small_int(rng), small_int(rng));
    let upper = Mat::from_rows(vec![vec![RatFunc::one(), RatFunc::constant(s)], vec![RatFunc::zero(), RatFunc::one()]]).unwrap();
    let lower = Mat::from_rows(vec![vec![RatFunc::one(), RatFunc::zero()], vec![RatFunc::constant(r), RatFunc::one()]]).unwrap();
    let sm = &upper * &lower;
    &(&sm * &t) * &cofactor_inverse(&sm)
}

/// A monic 2x2 polynomial of degree 1 or 2 whose determinant splits over Q.
pub fn random_rational_spectrum_q(rng: &mut ChaCha8Rng, max_degree: usize) -> MatPolynomial {
    let a = random_triangularizable(rng);
    if max_degree == 1 || rng.gen_bool(0.3) {
        return MatPolynomial::new(vec![-&a, Mat::identity(2)]).unwrap();
    }
    let b = random_triangularizable(rng);
    MatPolynomial::new(vec![&a * &b, -&(&a + &b), Mat::identity(2)]).unwrap()
}
