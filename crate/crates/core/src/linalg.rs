//! Dense exact matrices over the Gaussian rationals.

use crate::scalar::C;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<C>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![vec![C::zero(); cols]; rows] }
    }
    pub fn identity(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| if i == j { C::one() } else { C::zero() })
    }
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C) -> Matrix {
        Matrix { rows, cols, data: (0..rows).map(|i| (0..cols).map(|j| f(i, j)).collect()).collect() }
    }
    /// `E_{ij}` with 0-based indices.
    pub fn unit(n: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        m.data[i][j] = C::one();
        m
    }
    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i][j]
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(C::is_zero)
    }
    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    if !o.data[k][j].is_zero() {
                        out.data[i][j] += &(a * &o.data[k][j]);
                    }
                }
            }
        }
        out
    }
    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| &self.data[i][j] + &o.data[i][j])
    }
    pub fn sub(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| &self.data[i][j] - &o.data[i][j])
    }
    pub fn scale(&self, c: &C) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| &self.data[i][j] * c)
    }
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.data[j][i].conj())
    }
    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.data[j][i].clone())
    }
    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.data[i][j].clone()
            } else if i >= self.rows && j >= self.cols {
                o.data[i - self.rows][j - self.cols].clone()
            } else {
                C::zero()
            }
        })
    }
    pub fn kron(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            &self.data[i / o.rows][j / o.cols] * &o.data[i % o.rows][j % o.cols]
        })
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.data[i][c].is_zero()) else {
            continue;
        };
        a.data.swap(r, p);
        let inv = a.data[r][c].recip();
        for j in c..a.cols {
            a.data[r][j] = &a.data[r][j] * &inv;
        }
        for i in 0..a.rows {
            if i != r && !a.data[i][c].is_zero() {
                let f = a.data[i][c].clone();
                for j in c..a.cols {
                    let t = &f * &a.data[r][j];
                    a.data[i][j] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn nullspace(m: &Matrix) -> Vec<Vec<C>> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![C::zero(); m.cols];
            v[f] = C::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.data[row][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = b`; `None` when inconsistent. Free variables are set to zero.
pub fn solve(m: &Matrix, b: &[C]) -> Option<Vec<C>> {
    let aug = Matrix::from_fn(m.rows, m.cols + 1, |i, j| if j < m.cols { m.data[i][j].clone() } else { b[i].clone() });
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![C::zero(); m.cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.data[row][m.cols].clone();
    }
    Some(x)
}

/// Positive definiteness of a Hermitian matrix via exact LDL* pivots.
pub fn is_positive_definite(m: &Matrix) -> bool {
    let n = m.rows;
    let mut a = m.clone();
    for k in 0..n {
        let d = a.data[k][k].clone();
        if !d.is_real() || !d.re.is_positive() {
            return false;
        }
        for i in k + 1..n {
            let f = &a.data[i][k] / &d;
            for j in k..n {
                let t = &f * &a.data[k][j];
                a.data[i][j] -= &t;
            }
        }
    }
    true
}

/// Positive semidefiniteness via principal pivoting; zero pivots require a zero row.
pub fn is_positive_semidefinite(m: &Matrix) -> bool {
    let n = m.rows;
    let mut a = m.clone();
    for k in 0..n {
        let d = a.data[k][k].clone();
        if !d.is_real() || d.re.is_negative() {
            return false;
        }
        if d.is_zero() {
            if (k..n).any(|j| !a.data[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = &a.data[i][k] / &d;
            for j in k..n {
                let t = &f * &a.data[k][j];
                a.data[i][j] -= &t;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_nullspace() {
        let m = Matrix::from_fn(2, 3, |i, j| C::int((i * 3 + j) as i64));
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        for i in 0..2 {
            let s = (0..3).fold(C::zero(), |a, j| &a + &(&m.data[i][j] * &v[j]));
            assert!(s.is_zero());
        }
        let x = solve(&m, &[C::int(1), C::int(4)]).unwrap();
        assert_eq!(&(&C::int(3) * &x[0]) + &(&C::int(4) * &x[1]), C::int(4) - &(&C::int(5) * &x[2]));
        assert!(solve(&Matrix::zeros(1, 1), &[C::one()]).is_none());
    }

    #[test]
    fn definiteness() {
        assert!(is_positive_definite(&Matrix::identity(3)));
        let m = Matrix::from_fn(2, 2, |_, _| C::one());
        assert!(!is_positive_definite(&m));
        assert!(is_positive_semidefinite(&m));
        assert!(!is_positive_semidefinite(&m.scale(&C::int(-1))));
    }
}
