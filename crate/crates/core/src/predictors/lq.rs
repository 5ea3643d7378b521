use crate::signals::HankelMatrix;
use crate::{DpcError, Mat, Result};

/// `Z = L · Q_orth` with `L` lower triangular and `Q_orth` having orthonormal rows.
#[derive(Debug, Clone)]
pub struct LqFactors {
    pub l: Mat,
    pub q_orth: Mat,
    /// Diagonal entries of `L` above `1e-10 · max |L_ii|`.
    pub rank: usize,
}

/// LQ decomposition via Householder QR of `Zᵀ`; `L` has a nonnegative diagonal.
pub fn lq_decompose(z: &HankelMatrix) -> Result<LqFactors> {
    lq_decompose_mat(&z.values)
}

pub(crate) fn lq_decompose_mat(z: &Mat) -> Result<LqFactors> {
    let (n_row, n_col) = z.shape();
    if n_row > n_col {
        return Err(DpcError::InsufficientData {
            needed: n_row,
            available: n_col,
        });
    }
    let qr = z.transpose().qr();
    let mut r = qr.r();
    let mut q = qr.q();
    for i in 0..n_row {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    let l = r.transpose();
    let rank = numerical_rank(&l);
    Ok(LqFactors {
        l,
        q_orth: q.transpose(),
        rank,
    })
}

fn numerical_rank(l: &Mat) -> usize {
    let diag = l.diagonal();
    let max = diag.amax();
    diag.iter().filter(|d| d.abs() > 1e-10 * max).count()
}

/// Lower factor of `[Z  ridge·I]`, i.e. the Cholesky factor of `Z Zᵀ + ridge² I`
/// computed without forming the Gram matrix.
pub fn lq_lower_factor(z: &Mat, ridge: f64) -> Mat {
    let (n_row, n_col) = z.shape();
    let mut aug = Mat::zeros(n_col + n_row, n_row);
    aug.rows_mut(0, n_col).copy_from(&z.transpose());
    for i in 0..n_row {
        aug[(n_col + i, i)] = ridge;
    }
    let mut r = aug.qr().r();
    for i in 0..n_row {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
        }
    }
    r.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random(rows: usize, cols: usize, seed: u64) -> Mat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
    }

    fn check_invariants(z: &Mat, f: &LqFactors) {
        let rec = &f.l * &f.q_orth;
        assert!((rec - z).norm() <= 1e-10 * z.norm().max(1.0));
        let n = z.nrows();
        assert!((&f.q_orth * f.q_orth.transpose() - Mat::identity(n, n)).amax() <= 1e-10);
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(f.l[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn random_tall_data() {
        let z = random(6, 50, 1);
        let f = lq_decompose_mat(&z).unwrap();
        check_invariants(&z, &f);
        assert_eq!(f.rank, 6);
    }

    #[test]
    fn already_lower_triangular() {
        let mut z = Mat::zeros(3, 5);
        z[(0, 0)] = 2.0;
        z[(1, 0)] = 1.0;
        z[(1, 1)] = 3.0;
        z[(2, 0)] = -1.0;
        z[(2, 1)] = 0.5;
        z[(2, 2)] = 4.0;
        let f = lq_decompose_mat(&z).unwrap();
        assert!((&f.l - z.columns(0, 3)).amax() < 1e-14);
        let mut eye = Mat::zeros(3, 5);
        eye.fill_diagonal(1.0);
        assert!((&f.q_orth - eye).amax() < 1e-14);
    }

    #[test]
    fn row_permutation_keeps_reconstruction() {
        let z = random(4, 20, 2);
        let mut perm = z.clone();
        perm.swap_rows(0, 3);
        let a = lq_decompose_mat(&z).unwrap();
        let b = lq_decompose_mat(&perm).unwrap();
        check_invariants(&perm, &b);
        assert!((&a.l - &b.l).amax() > 1e-3);
    }

    #[test]
    fn rank_deficiency_is_reported_not_fatal() {
        let mut z = random(5, 30, 3);
        let dup = z.row(1).into_owned() * 2.0;
        z.row_mut(4).copy_from(&dup);
        let f = lq_decompose_mat(&z).unwrap();
        check_invariants(&z, &f);
        assert_eq!(f.rank, 4);
    }

    #[test]
    fn wide_only() {
        assert!(lq_decompose_mat(&random(5, 4, 4)).is_err());
    }

    #[test]
    fn ridge_factor_is_gram_cholesky() {
        let z = random(5, 40, 5);
        let l = lq_lower_factor(&z, 0.3);
        let gram = &z * z.transpose() + Mat::identity(5, 5) * 0.09;
        assert!((&l * l.transpose() - gram).amax() < 1e-12);
    }
}
