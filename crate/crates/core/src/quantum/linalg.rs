//! Small dense complex linear algebra: orthonormalization and null spaces.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Rank tolerance used by orthonormalization and elimination.
pub const EPS_RANK: f64 = 1e-10;
/// Slack for orthonormality and unitarity checks.
pub const EPS_ORTH: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `⟨a, b⟩`, antilinear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = c(1.0, 0.0);
    v
}

pub fn conjugate(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Vectors whose
/// residual falls below `eps_rank` (relative to their own norm, floored at 1)
/// are dropped as dependent.
pub fn orthonormalize(vectors: &[CVector], eps_rank: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm().max(1.0);
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let coeff = inner(b, &w);
                w -= b * coeff;
            }
        }
        let n = w.norm();
        if n > eps_rank * scale {
            basis.push(w.unscale(n));
        }
    }
    basis
}

/// Orthonormal basis of `{v : m v = 0}`, by Gaussian elimination with
/// partial pivoting. Pivots of modulus at most `eps_rank` count as zero.
pub fn null_space(m: &CMatrix, eps_rank: f64) -> Vec<CVector> {
    let (rows, cols) = m.shape();
    let mut r = m.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (best, modulus) = (row..rows)
            .map(|i| (i, r[(i, col)].norm()))
            .fold((row, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if modulus <= eps_rank {
            continue;
        }
        r.swap_rows(row, best);
        let p = r[(row, col)];
        for j in 0..cols {
            r[(row, j)] /= p;
        }
        for i in 0..rows {
            if i != row {
                let factor = r[(i, col)];
                if factor.norm() > 0.0 {
                    for j in 0..cols {
                        let sub = factor * r[(row, j)];
                        r[(i, j)] -= sub;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|j| !pivots.contains(j)).collect();
    let raw: Vec<CVector> = free
        .iter()
        .map(|&f| {
            let mut v = CVector::zeros(cols);
            v[f] = c(1.0, 0.0);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[(i, f)];
            }
            v
        })
        .collect();
    orthonormalize(&raw, eps_rank)
}

/// `max |(m† m − I)_{ij}|`.
pub fn isometry_defect(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    let id = CMatrix::identity(g.nrows(), g.ncols());
    (g - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let a = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let b = a.scale(2.0);
        let e = basis_vector(3, 2);
        let basis = orthonormalize(&[a, b, e], EPS_RANK);
        assert_eq!(basis.len(), 2);
        assert!(inner(&basis[0], &basis[1]).norm() < 1e-12);
        assert!((basis[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_one_matrix() {
        // rows are multiples of (1, i, 0)
        let m = CMatrix::from_row_slice(
            2,
            3,
            &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)],
        );
        let ns = null_space(&m, EPS_RANK);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_invertible_matrix_is_trivial() {
        let m = CMatrix::identity(3, 3);
        assert!(null_space(&m, EPS_RANK).is_empty());
        let z = CMatrix::zeros(2, 2);
        assert_eq!(null_space(&z, EPS_RANK).len(), 2);
    }
}
