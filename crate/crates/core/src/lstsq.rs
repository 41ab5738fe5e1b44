//! Dense least squares by column-scaled Householder QR.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.rows + r] = v;
    }

    fn col(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    fn col_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDeficient {
    pub rank: usize,
}

/// Relative size below which a scaled pivot counts as zero.
const RANK_TOL: f64 = 1e-10;

/// Minimise `||A X - B||` column by column; returns `X` (`A.cols x B.cols`).
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix, RankDeficient> {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.rows, m, "row count mismatch");
    if m < n {
        return Err(RankDeficient { rank: m });
    }

    let mut q = a.clone();
    let mut rhs = b.clone();
    let mut scale = vec![1.0; n];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = sqrt(q.col(j).iter().map(|x| x * x).sum());
        if norm > 0.0 {
            *s = norm;
            q.col_mut(j).iter_mut().for_each(|x| *x /= norm);
        }
    }

    let mut diag = vec![0.0; n];
    for j in 0..n {
        let alpha = {
            let col = &q.col(j)[j..];
            let norm = sqrt(col.iter().map(|x| x * x).sum());
            if col[0] > 0.0 { -norm } else { norm }
        };
        diag[j] = alpha;
        if alpha == 0.0 {
            continue;
        }
        // v = x - alpha e1, stored in place of the column.
        {
            let col = &mut q.col_mut(j)[j..];
            col[0] -= alpha;
        }
        let v: Vec<f64> = q.col(j)[j..].to_vec();
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |target: &mut [f64]| {
            let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            target.iter_mut().zip(&v).for_each(|(t, vi)| *t -= f * vi);
        };
        for k in j + 1..n {
            reflect(&mut q.col_mut(k)[j..]);
        }
        for k in 0..rhs.cols {
            reflect(&mut rhs.col_mut(k)[j..]);
        }
    }

    let largest = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let rank = diag.iter().filter(|d| d.abs() > RANK_TOL * largest).count();
    if rank < n || largest == 0.0 {
        return Err(RankDeficient { rank });
    }

    let mut x = Matrix::zeros(n, rhs.cols);
    for k in 0..rhs.cols {
        for i in (0..n).rev() {
            let mut acc = rhs.get(i, k);
            for j in i + 1..n {
                acc -= q.get(i, j) * x.get(j, k);
            }
            x.set(i, k, acc / diag[i]);
        }
        for (i, s) in scale.iter().enumerate() {
            x.set(i, k, x.get(i, k) / s);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_fit() {
        // y = 2 x + 1
        let mut a = Matrix::zeros(4, 2);
        let mut b = Matrix::zeros(4, 1);
        for i in 0..4 {
            a.set(i, 0, i as f64);
            a.set(i, 1, 1.0);
            b.set(i, 0, 2.0 * i as f64 + 1.0);
        }
        let x = solve(&a, &b).unwrap();
        assert!((x.get(0, 0) - 2.0).abs() < 1e-14);
        assert!((x.get(1, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn overdetermined_mean() {
        let mut a = Matrix::zeros(3, 1);
        let mut b = Matrix::zeros(3, 1);
        for (i, v) in [1.0, 2.0, 6.0].into_iter().enumerate() {
            a.set(i, 0, 1.0);
            b.set(i, 0, v);
        }
        assert!((solve(&a, &b).unwrap().get(0, 0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn collinear_columns_are_rank_deficient() {
        let mut a = Matrix::zeros(5, 2);
        for i in 0..5 {
            a.set(i, 0, i as f64);
            a.set(i, 1, 3.0 * i as f64);
        }
        assert_eq!(solve(&a, &Matrix::zeros(5, 1)), Err(RankDeficient { rank: 1 }));
        assert!(solve(&Matrix::zeros(1, 2), &Matrix::zeros(1, 1)).is_err());
    }
}
