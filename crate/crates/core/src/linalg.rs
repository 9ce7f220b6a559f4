//! Small exact integer and rational linear algebra: Smith normal form,
//! integer kernels and solves, Bareiss determinants, rational rank, and the
//! multiplicative (character) solver built on top of them.
//!
//! Matrices here are tiny (rank at most 4, a handful of rows), so the
//! implementations favour clarity and determinism over asymptotics.

use num::{One, Signed, Zero};

use crate::scalar::{rat_pow, rational_nth_root, Int, Rat};
use crate::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        IMat { rows: r, cols: c, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &Int) {
        for j in 0..self.cols {
            let v = self.get(i, j) - q * self.get(t, j);
            self.set(i, j, v);
        }
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, j) - q * self.get(i, t);
            self.set(i, j, v);
        }
    }

    /// col_t += col_j
    fn col_add(&mut self, t: usize, j: usize) {
        for i in 0..self.rows {
            let v = self.get(i, t) + self.get(i, j);
            self.set(i, t, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Int::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::zero();
                for j in 0..self.cols {
                    acc += self.get(i, j) * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.snf().rank
    }

    /// Smith normal form: unimodular `u`, `v` with `u * self * v = d`,
    /// `d` diagonal with nonnegative entries in a divisibility chain.
    pub fn snf(&self) -> Snf {
        let mut d = self.clone();
        let mut u = IMat::identity(self.rows);
        let mut v = IMat::identity(self.cols);
        let limit = self.rows.min(self.cols);
        let mut t = 0;
        while t < limit {
            // deterministic pivot: least |value|, ties by position
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    if !d.get(i, j).is_zero() {
                        let better = match &pivot {
                            None => true,
                            Some((pi, pj)) => d.get(i, j).abs() < d.get(*pi, *pj).abs(),
                        };
                        if better {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            'reduce: loop {
                for i in 0..self.rows {
                    if i == t || d.get(i, t).is_zero() {
                        continue;
                    }
                    let q = div_trunc(d.get(i, t), d.get(t, t));
                    if !q.is_zero() {
                        d.row_sub(i, t, &q);
                        u.row_sub(i, t, &q);
                    }
                    if !d.get(i, t).is_zero() {
                        // strictly smaller remainder becomes the pivot
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        continue 'reduce;
                    }
                }
                for j in 0..self.cols {
                    if j == t || d.get(t, j).is_zero() {
                        continue;
                    }
                    let q = div_trunc(d.get(t, j), d.get(t, t));
                    if !q.is_zero() {
                        d.col_sub(j, t, &q);
                        v.col_sub(j, t, &q);
                    }
                    if !d.get(t, j).is_zero() {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        continue 'reduce;
                    }
                }
                let col_clean = (0..self.rows).all(|i| i == t || d.get(i, t).is_zero());
                let row_clean = (0..self.cols).all(|j| j == t || d.get(t, j).is_zero());
                if col_clean && row_clean {
                    break;
                }
            }

            // divisibility chain: the pivot must divide the rest of the block
            let mut fixed = true;
            'divis: for i in t + 1..self.rows {
                for j in t + 1..self.cols {
                    if !(d.get(i, j) % d.get(t, t)).is_zero() {
                        d.col_add(t, j);
                        v.col_add(t, j);
                        fixed = false;
                        break 'divis;
                    }
                }
            }
            if fixed {
                t += 1;
            }
        }
        let mut rank = 0;
        for i in 0..limit {
            if d.get(i, i).is_zero() {
                break;
            }
            if d.get(i, i).is_negative() {
                d.negate_row(i);
                u.negate_row(i);
            }
            rank += 1;
        }
        Snf { u, d, v, rank }
    }

    /// Basis of the integer kernel `{x : self * x = 0}`; the basis vectors
    /// are columns of a unimodular matrix, so the kernel lattice is saturated.
    pub fn kernel_basis(&self) -> Vec<Vec<Int>> {
        if self.rows == 0 {
            return (0..self.cols)
                .map(|j| {
                    let mut e = vec![Int::zero(); self.cols];
                    e[j] = Int::one();
                    e
                })
                .collect();
        }
        let snf = self.snf();
        (snf.rank..self.cols).map(|j| snf.v.col(j)).collect()
    }

    /// Solves `self * x = b` over the integers; any solution, deterministic.
    pub fn solve(&self, b: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(b.len(), self.rows);
        let snf = self.snf();
        let y = snf.u.mul_vec(b);
        let mut z = vec![Int::zero(); self.cols];
        for (i, yi) in y.iter().enumerate() {
            if i < snf.rank {
                let di = snf.d.get(i, i);
                if (yi % di).is_zero() {
                    z[i] = yi / di;
                } else {
                    return None;
                }
            } else if !yi.is_zero() {
                return None;
            }
        }
        Some(snf.v.mul_vec(&z))
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a: Vec<Vec<Int>> = (0..n).map(|i| self.row(i)).collect();
        let mut sign = 1i32;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let swap = (k + 1..n).find(|&i| !a[i][k].is_zero());
                match swap {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = Int::zero();
            }
            prev = a[k][k].clone();
        }
        if sign < 0 {
            -a[n - 1][n - 1].clone()
        } else {
            a[n - 1][n - 1].clone()
        }
    }
}

/// Result of `IMat::snf`.
pub struct Snf {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
    pub rank: usize,
}

fn div_trunc(a: &Int, b: &Int) -> Int {
    a / b
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rat_rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..nrows).find(|&i| !m[i][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for j in col..ncols {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for i in 0..nrows {
            if i != rank && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in col..ncols {
                    let v = &m[i][j] - &factor * &m[rank][j];
                    m[i][j] = v;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Solves the multiplicative system `prod_j x_j^{exps[i][j]} = rhs[i]` over
/// the nonzero rationals. All `rhs` values must be nonzero. Fails with a
/// field-extension error when a required root is irrational, and with an
/// inconsistency error when the system has no solution over any field
/// extension (the rhs violates the relations of the exponent lattice).
pub fn solve_multiplicative(exps: &IMat, rhs: &[Rat]) -> Result<Vec<Rat>> {
    assert_eq!(rhs.len(), exps.rows);
    for r in rhs {
        if r.is_zero() {
            return Err(Error::Domain("zero value in multiplicative system".into()));
        }
    }
    let snf = exps.snf();
    // w = rhs^U, equationwise
    let mut w = Vec::with_capacity(exps.rows);
    for i in 0..exps.rows {
        let mut acc = Rat::one();
        for (k, r) in rhs.iter().enumerate() {
            let e = int_to_i64(snf.u.get(i, k))?;
            acc *= rat_pow(r, e)?;
        }
        w.push(acc);
    }
    let mut y = vec![Rat::one(); exps.cols];
    for (i, wi) in w.iter().enumerate() {
        if i < snf.rank {
            let di = int_to_i64(snf.d.get(i, i))?;
            y[i] = rational_nth_root(wi, di as u64)?;
        } else if !wi.is_one() {
            return Err(Error::Inconsistency(
                "multiplicative system violates its exponent-lattice relations".into(),
            ));
        }
    }
    let mut x = Vec::with_capacity(exps.cols);
    for j in 0..exps.cols {
        let mut acc = Rat::one();
        for (l, yl) in y.iter().enumerate().take(snf.rank) {
            let e = int_to_i64(snf.v.get(j, l))?;
            acc *= rat_pow(yl, e)?;
        }
        x.push(acc);
    }
    Ok(x)
}

pub fn int_to_i64(n: &Int) -> Result<i64> {
    use num::ToPrimitive;
    n.to_i64()
        .ok_or_else(|| Error::Capability(format!("integer {n} exceeds machine range")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat_int};

    fn m(rows: &[&[i64]]) -> IMat {
        IMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn snf_reconstructs_input() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let snf = a.snf();
        assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d);
        // divisibility chain
        for i in 1..snf.rank {
            assert!((snf.d.get(i, i) % snf.d.get(i - 1, i - 1)).is_zero());
        }
        assert_eq!(snf.u.det().abs(), int(1));
        assert_eq!(snf.v.det().abs(), int(1));
    }

    #[test]
    fn snf_known_divisors() {
        let a = m(&[&[1, 0], &[1, 2]]);
        let snf = a.snf();
        assert_eq!(snf.d.get(0, 0), &int(1));
        assert_eq!(snf.d.get(1, 1), &int(2));
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(&[&[1, 2, 3]]);
        let ker = a.kernel_basis();
        assert_eq!(ker.len(), 2);
        for k in &ker {
            let prod: Int = k
                .iter()
                .zip([1i64, 2, 3])
                .map(|(x, c)| x * int(c))
                .sum();
            assert!(prod.is_zero());
        }
        let b = vec![int(7)];
        let x = a.solve(&b).unwrap();
        let lhs: Int = x.iter().zip([1i64, 2, 3]).map(|(x, c)| x * int(c)).sum();
        assert_eq!(lhs, int(7));
        // unsolvable: 2x = 1
        let a2 = m(&[&[2]]);
        assert!(a2.solve(&[int(1)]).is_none());
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[1, 0], &[1, 2]]).det(), int(2));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), int(-1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), int(0));
    }

    #[test]
    fn multiplicative_solve() {
        // x^1 y^0 = 6, x^1 y^2 = 24  =>  y^2 = 4, y = 2, x = 6
        let exps = m(&[&[1, 0], &[1, 2]]);
        let rhs = vec![rat_int(6), rat_int(24)];
        let x = solve_multiplicative(&exps, &rhs).unwrap();
        assert_eq!(x[0], rat_int(6));
        assert_eq!(x[1], rat_int(2));
        // irrational root
        let rhs = vec![rat_int(6), rat_int(12)];
        assert!(matches!(
            solve_multiplicative(&exps, &rhs),
            Err(Error::FieldExtension(_))
        ));
    }
}
