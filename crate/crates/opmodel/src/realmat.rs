//! Internal dense real-matrix helpers: rank decisions, minimum-norm least
//! squares, and kernel vectors, all routed through the Hermitian
//! eigendecomposition of the Gram matrix.  Sizes stay tiny (≤ a few hundred
//! rows, ≤ ~40 columns), so robustness beats speed here too.

use crate::operators::{eigh, ComplexMatrix, C64};

/// Dense row-major real matrix (not necessarily square).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RealMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec length mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }

    /// xᵀ·M for a row vector x.
    pub fn tmatvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "tmatvec length mismatch");
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| x[r] * self.get(r, c)).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let v = self.get(r, k);
                if v == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.set(r, c, out.get(r, c) + v * other.get(k, c));
                }
            }
        }
        out
    }

    /// Embeds the matrix as a complex one (imaginary parts zero).
    fn to_complex(&self) -> ComplexMatrix {
        assert_eq!(self.rows, self.cols, "complex embedding needs square");
        ComplexMatrix::from_fn(self.rows, |i, j| C64::new(self.get(i, j), 0.0))
    }
}

/// Singular values of A (descending), from the spectrum of the smaller of
/// AᵀA and AAᵀ (their nonzero spectra agree, and very wide or very tall
/// matrices stay cheap this way).
pub(crate) fn singular_values(a: &RealMatrix) -> Vec<f64> {
    let gram = if a.rows < a.cols {
        a.matmul(&a.transpose())
    } else {
        a.transpose().matmul(a)
    };
    let eig = eigh(&gram.to_complex()).expect("gram eigh");
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    s.reverse();
    s
}

/// Numerical rank with the relative threshold `max(rows, cols) · 1e-12 · σ₁`
/// (absolute floor 1e-12 for the all-zero case).
pub(crate) fn rank(a: &RealMatrix) -> usize {
    let s = singular_values(a);
    let thresh = rank_threshold(a, &s);
    s.iter().filter(|&&x| x > thresh).count()
}

fn rank_threshold(a: &RealMatrix, s: &[f64]) -> f64 {
    let top = s.first().copied().unwrap_or(0.0);
    (a.rows.max(a.cols) as f64 * 1e-12 * top).max(1e-12)
}

/// A unit vector v with ‖A·v‖ ≈ 0, when the rank is deficient: the Gram
/// eigenvector of the smallest eigenvalue.
pub(crate) fn kernel_vector(a: &RealMatrix) -> Option<Vec<f64>> {
    if rank(a) >= a.cols {
        return None;
    }
    let gram = a.transpose().matmul(a);
    let eig = eigh(&gram.to_complex()).expect("gram eigh");
    let v: Vec<f64> = (0..a.cols).map(|i| eig.eigenvectors.get(i, 0).re).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Some(v.into_iter().map(|x| x / n).collect())
}

/// Inverse of a square matrix by Gauss–Jordan elimination with partial
/// pivoting; `None` when a pivot falls below the rank threshold.
pub(crate) fn inverse(a: &RealMatrix) -> Option<RealMatrix> {
    assert_eq!(a.rows, a.cols, "inverse needs a square matrix");
    let n = a.rows;
    let mut work = a.clone();
    let mut inv = RealMatrix::identity(n);
    let scale = a.data.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, work.get(r, col)))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))?;
        if pivot.abs() < 1e-12 * scale * n as f64 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                let (a1, a2) = (work.get(col, j), work.get(pivot_row, j));
                work.set(col, j, a2);
                work.set(pivot_row, j, a1);
                let (b1, b2) = (inv.get(col, j), inv.get(pivot_row, j));
                inv.set(col, j, b2);
                inv.set(pivot_row, j, b1);
            }
        }
        let p = work.get(col, col);
        for j in 0..n {
            work.set(col, j, work.get(col, j) / p);
            inv.set(col, j, inv.get(col, j) / p);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = work.get(r, col);
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                work.set(r, j, work.get(r, j) - f * work.get(col, j));
                inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
            }
        }
    }
    Some(inv)
}

/// Minimum-norm least-squares solution of A·x ≈ b through the spectral
/// pseudoinverse of AᵀA.  Returns (x, max-abs residual of A·x − b, rank).
pub(crate) fn lstsq(a: &RealMatrix, b: &[f64]) -> (Vec<f64>, f64, usize) {
    assert_eq!(b.len(), a.rows, "lstsq rhs length mismatch");
    let at = a.transpose();
    let gram = at.matmul(a);
    let eig = eigh(&gram.to_complex()).expect("gram eigh");
    let evs = &eig.eigenvalues;
    let top = evs.last().copied().unwrap_or(0.0).max(0.0);
    let thresh = (a.rows.max(a.cols) as f64 * 1e-12 * top.sqrt()).max(1e-12);
    let thresh2 = thresh * thresh;

    let atb = at.matvec(b);
    // x = V f(Λ) Vᵀ Aᵀ b with f(λ) = 1/λ above the threshold, 0 below.
    let n = a.cols;
    let mut y = vec![0.0; n];
    for (k, &ev) in evs.iter().enumerate() {
        if ev <= thresh2 {
            continue;
        }
        let vk: Vec<f64> = (0..n).map(|i| eig.eigenvectors.get(i, k).re).collect();
        let proj: f64 = vk.iter().zip(&atb).map(|(u, w)| u * w).sum();
        let coef = proj / ev;
        for (yi, &vki) in y.iter_mut().zip(&vk) {
            *yi += coef * vki;
        }
    }
    let resid = a
        .matvec(&y)
        .iter()
        .zip(b)
        .map(|(u, w)| (u - w).abs())
        .fold(0.0, f64::max);
    let rank = evs.iter().filter(|&&l| l > thresh2).count();
    (y, resid, rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_obvious_cases() {
        let id = RealMatrix::identity(4);
        assert_eq!(rank(&id), 4);
        let mut deficient = RealMatrix::zeros(3, 3);
        deficient.set(0, 0, 1.0);
        deficient.set(1, 1, 2.0);
        assert_eq!(rank(&deficient), 2);
        assert_eq!(rank(&RealMatrix::zeros(2, 5)), 0);
    }

    #[test]
    fn kernel_vector_annihilates() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]);
        let v = kernel_vector(&a).expect("rank 1 of 3 columns");
        let img = a.matvec(&v);
        assert!(img.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn lstsq_solves_exact_systems() {
        let a = RealMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0], vec![0.0, 1.0]]);
        let x_true = [0.7, -0.4];
        let b = a.matvec(&x_true);
        let (x, resid, rank) = lstsq(&a, &b);
        assert_eq!(rank, 2);
        assert!(resid < 1e-12);
        assert!((x[0] - 0.7).abs() < 1e-12 && (x[1] + 0.4).abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trips_and_rejects_singular() {
        let a = RealMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![0.0, -1.0, 3.0],
            vec![1.0, 0.0, 1.0],
        ]);
        let inv = inverse(&a).expect("invertible");
        let prod = a.matmul(&inv);
        let id = RealMatrix::identity(3);
        for i in 0..3 {
            for j in 0..3 {
                assert!((prod.get(i, j) - id.get(i, j)).abs() < 1e-12);
            }
        }
        let singular = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(inverse(&singular).is_none());
    }

    #[test]
    fn lstsq_flags_inconsistent_systems() {
        // Overdetermined and inconsistent: residual must be visible.
        let a = RealMatrix::from_rows(&[vec![1.0], vec![1.0]]);
        let (x, resid, _) = lstsq(&a, &[0.0, 1.0]);
        assert!((x[0] - 0.5).abs() < 1e-12);
        assert!((resid - 0.5).abs() < 1e-12);
    }
}
