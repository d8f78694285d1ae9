//! Dense exact linear algebra over `Q(x, u, z, t)` and quasideterminants of
//! block matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exact::{Derivation, Rat, RatFunc, Var};

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<RatFunc>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<RatFunc>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![RatFunc::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, RatFunc::one())
    }

    /// `f * I_n`.
    pub fn scalar(n: usize, f: RatFunc) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = f.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RatFunc) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Mat::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn column(entries: Vec<RatFunc>) -> Self {
        let n = entries.len();
        Mat {
            rows: n,
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[RatFunc] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFunc::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Mat::identity(self.rows)
    }

    pub fn is_constant(&self) -> bool {
        self.data.iter().all(RatFunc::is_constant)
    }

    pub fn is_polynomial(&self) -> bool {
        self.data.iter().all(RatFunc::is_polynomial)
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.data.iter().any(|e| e.mentions(v))
    }

    pub fn map(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&RatFunc) -> Result<RatFunc>) -> Result<Mat> {
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn derive(&self, d: &Derivation) -> Mat {
        self.map(|e| d.apply(e))
    }

    pub fn scale(&self, f: &RatFunc) -> Mat {
        self.map(|e| e * f)
    }

    pub fn scale_rat(&self, c: &Rat) -> Mat {
        self.map(|e| e.scale(c))
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn row(&self, i: usize) -> Mat {
        self.submatrix(i..i + 1, 0..self.cols)
    }

    pub fn col(&self, j: usize) -> Mat {
        self.submatrix(0..self.rows, j..j + 1)
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat {
        let c0 = cols.start;
        let r0 = rows.start;
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hstack(parts: &[Mat]) -> Result<Mat> {
        let rows = parts.first().map_or(0, |m| m.rows);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(rows, cols);
        let mut c0 = 0;
        for m in parts {
            for i in 0..rows {
                for j in 0..m.cols {
                    out.set(i, c0 + j, m.get(i, j).clone());
                }
            }
            c0 += m.cols;
        }
        Ok(out)
    }

    pub fn vstack(parts: &[Mat]) -> Result<Mat> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let rows: usize = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in parts {
            data.extend(m.data.iter().cloned());
        }
        Mat::new(rows, cols, data)
    }

    pub fn try_mul(&self, rhs: &Mat) -> Result<Mat> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Mat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = RatFunc::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let b = rhs.get(k, j);
                if b.is_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            acc
        }))
    }

    fn check_same(&self, rhs: &Mat) {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "matrix shapes differ: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
    }

    /// Determinant by Gaussian elimination, first nonzero pivot.
    pub fn det(&self) -> Result<RatFunc> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a: Vec<Vec<RatFunc>> = (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut det = RatFunc::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Ok(RatFunc::zero());
            };
            if p != c {
                a.swap(p, c);
                det = -&det;
            }
            let piv = a[c][c].clone();
            det = &det * &piv;
            let inv = piv.inv()?;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] * &inv;
                for k in c..n {
                    if a[c][k].is_zero() {
                        continue;
                    }
                    let t = &f * &a[c][k];
                    a[r][k] = &a[r][k] - &t;
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * X = b` for square invertible `self`.
    pub fn solve(&self, b: &Mat) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch("right-hand side row count".into()));
        }
        let n = self.rows;
        let m = b.cols;
        let mut a: Vec<Vec<RatFunc>> = (0..n)
            .map(|i| {
                let mut row = self.data[i * n..(i + 1) * n].to_vec();
                row.extend_from_slice(&b.data[i * m..(i + 1) * m]);
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .ok_or(Error::SingularMatrix)?;
            a.swap(p, c);
            let inv = a[c][c].inv()?;
            for k in c..n + m {
                if !a[c][k].is_zero() {
                    a[c][k] = &a[c][k] * &inv;
                }
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in c..n + m {
                    if a[c][k].is_zero() {
                        continue;
                    }
                    let t = &f * &a[c][k];
                    a[r][k] = &a[r][k] - &t;
                }
            }
        }
        Ok(Mat::from_fn(n, m, |i, j| a[i][n + j].clone()))
    }

    pub fn inverse(&self) -> Result<Mat> {
        self.solve(&Mat::identity(self.rows))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for k in 0..a.cols {
                    a.data.swap(p * a.cols + k, r * a.cols + k);
                }
            }
            let inv = a.get(r, c).inv().expect("nonzero pivot");
            for k in 0..a.cols {
                let v = a.get(r, k) * &inv;
                a.set(r, k, v);
            }
            for i in 0..a.rows {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for k in 0..a.cols {
                    if a.get(r, k).is_zero() {
                        continue;
                    }
                    let v = a.get(i, k) - &(&f * a.get(r, k));
                    a.set(i, k, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one column per free variable in
    /// increasing order.
    pub fn nullspace(&self) -> Vec<Mat> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![RatFunc::zero(); self.cols];
                v[f] = RatFunc::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f);
                }
                Mat::column(v)
            })
            .collect()
    }
}

/// Solves `A * w = b` for `A`.
pub fn solve_left(w: &Mat, b: &Mat) -> Result<Mat> {
    if b.cols != w.rows {
        return Err(Error::DimensionMismatch(format!(
            "B has {} columns, W has {} rows",
            b.cols, w.rows
        )));
    }
    Ok(w.transpose().solve(&b.transpose())?.transpose())
}

pub fn det(a: &Mat) -> Result<RatFunc> {
    a.det()
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.check_same(rhs);
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.check_same(rhs);
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|e| -e)
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matrix product shapes")
    }
}

/// A square-in-blocks arrangement of `n x n` matrices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockMat {
    block_rows: usize,
    block_cols: usize,
    n: usize,
    blocks: Vec<Mat>,
}

impl BlockMat {
    pub fn new(block_rows: usize, block_cols: usize, n: usize, blocks: Vec<Mat>) -> Result<Self> {
        if blocks.len() != block_rows * block_cols {
            return Err(Error::DimensionMismatch("block count".into()));
        }
        if blocks.iter().any(|b| b.rows != n || b.cols != n) {
            return Err(Error::DimensionMismatch(format!("every block must be {n}x{n}")));
        }
        Ok(BlockMat {
            block_rows,
            block_cols,
            n,
            blocks,
        })
    }

    /// Splits a scalar matrix into `n x n` blocks.
    pub fn from_flat(m: &Mat, n: usize) -> Result<Self> {
        if n == 0 || !m.rows.is_multiple_of(n) || !m.cols.is_multiple_of(n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not divisible into {n}x{n} blocks",
                m.rows, m.cols
            )));
        }
        let (br, bc) = (m.rows / n, m.cols / n);
        let mut blocks = Vec::with_capacity(br * bc);
        for i in 0..br {
            for j in 0..bc {
                blocks.push(m.submatrix(i * n..(i + 1) * n, j * n..(j + 1) * n));
            }
        }
        BlockMat::new(br, bc, n, blocks)
    }

    pub fn block(&self, i: usize, j: usize) -> &Mat {
        &self.blocks[i * self.block_cols + j]
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn flatten(&self) -> Mat {
        let n = self.n;
        Mat::from_fn(self.block_rows * n, self.block_cols * n, |i, j| {
            self.block(i / n, j / n).get(i % n, j % n).clone()
        })
    }

    fn assemble(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let n = self.n;
        Mat::from_fn(rows.len() * n, cols.len() * n, |i, j| {
            self.block(rows[i / n], cols[j / n]).get(i % n, j % n).clone()
        })
    }
}

/// `|X|_{ij} = x_ij - r_i^{(j)} (X^{ij})^{-1} c_j^{(i)}`, 0-based block indices.
/// The minor is inverted through its flattened scalar form.
pub fn quasideterminant(x: &BlockMat, i: usize, j: usize) -> Result<Mat> {
    if x.block_rows != x.block_cols {
        return Err(Error::NotSquare {
            rows: x.block_rows,
            cols: x.block_cols,
        });
    }
    let k = x.block_rows;
    if i >= k || j >= k {
        return Err(Error::DimensionMismatch(format!(
            "block index ({i}, {j}) out of range for {k}x{k}"
        )));
    }
    let xij = x.block(i, j).clone();
    if k == 1 {
        return Ok(xij);
    }
    let other_rows: Vec<usize> = (0..k).filter(|&r| r != i).collect();
    let other_cols: Vec<usize> = (0..k).filter(|&c| c != j).collect();
    let minor = x.assemble(&other_rows, &other_cols);
    let row = x.assemble(&[i], &other_cols);
    let col = x.assemble(&other_rows, &[j]);
    let s = minor.solve(&col).map_err(|e| match e {
        Error::SingularMatrix => Error::SingularSubmatrix,
        other => other,
    })?;
    Ok(&xij - &(&row * &s))
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

    #[test]
    fn det_examples() {
        assert_eq!(Mat::identity(3).det().unwrap(), RatFunc::one());
        assert_eq!(m(&[&["x", "3"], &["0", "x"]]).det().unwrap(), parse_ratfunc("x^2").unwrap());
        assert!(matches!(m(&[&["1", "2"]]).det(), Err(Error::NotSquare { .. })));
        assert!(m(&[&["x", "1"], &["x^2", "x"]]).det().unwrap().is_zero());
    }

    #[test]
    fn solve_left_example() {
        let w = m(&[&["x", "2"], &["0", "x"]]);
        let b = Mat::identity(2);
        let a = solve_left(&w, &b).unwrap();
        assert_eq!(a, m(&[&["1/x", "-2/x^2"], &["0", "1/x"]]));
        assert_eq!(&a * &w, b);
        let sing = m(&[&["x", "1"], &["x^2", "x"]]);
        assert_eq!(solve_left(&sing, &b), Err(Error::SingularMatrix));
    }

    #[test]
    fn quasideterminant_scalar_2x2() {
        let x = BlockMat::from_flat(&m(&[&["x", "2"], &["3", "x + 1"]]), 1).unwrap();
        let q = quasideterminant(&x, 0, 0).unwrap();
        assert_eq!(q, m(&[&["x - 6/(x + 1)"]]));
        let s = BlockMat::from_flat(&m(&[&["x", "2"], &["3", "0"]]), 1).unwrap();
        assert_eq!(quasideterminant(&s, 0, 0), Err(Error::SingularSubmatrix));
    }

    #[test]
    fn nullspace_and_rank() {
        let a = m(&[&["1", "2", "3"], &["2", "4", "6"]]);
        assert_eq!(a.rank(), 1);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&a * &v).is_zero());
        }
    }
}
