use super::admm::{QpSolver, SpdFactor};
use crate::{Mat, Vector};

/// Factor of the regularized reduced KKT system for one active set.
#[derive(Debug, Clone)]
pub(crate) struct PolishCache {
    signature: Vec<i8>,
    active: Vec<usize>,
    /// Active rows of the scaled constraint matrix.
    a: Mat,
    factor: SpdFactor,
    pub factorizations: usize,
}

/// `-1` lower active, `1` upper active, `2` equality, `0` inactive.
fn active_signature(z: &Vector, y: &Vector, l: &Vector, u: &Vector) -> Vec<i8> {
    (0..z.len())
        .map(|i| {
            if (u[i] - l[i]).abs() <= 1e-12 * (1.0 + l[i].abs()) {
                2
            } else if z[i] - l[i] < -y[i] {
                -1
            } else if u[i] - z[i] < y[i] {
                1
            } else {
                0
            }
        })
        .collect()
}

/// Solves the equality-constrained QP on the active set detected from the
/// current (scaled) ADMM iterates and returns scaled `(x, y)`.
///
/// Rejects the result when a multiplier has the wrong sign or an inactive
/// row ends up violated.
pub(crate) fn polish(solver: &mut QpSolver) -> Option<(Vector, Vector)> {
    let delta = solver.settings().polish_delta;
    let refine = solver.settings().polish_refine_iter;
    let signature = {
        let (_, _, _, l, u) = solver.scaled();
        let (_, z, y) = solver.iterates();
        active_signature(z, y, l, u)
    };

    let reuse = solver.polish_cache.as_ref().is_some_and(|c| c.signature == signature);
    if !reuse {
        let (p, _, m, _, _) = solver.scaled();
        let active: Vec<usize> = (0..signature.len()).filter(|&i| signature[i] != 0).collect();
        let a = Mat::from_fn(active.len(), m.ncols(), |r, c| m[(active[r], c)]);
        let mut k = p.clone();
        for i in 0..k.nrows() {
            k[(i, i)] += delta;
        }
        k.gemm(1.0 / delta, &a.transpose(), &a, 1.0);
        let k = (&k + k.transpose()) * 0.5;
        let factor = SpdFactor::new(k)?;
        let count = solver.polish_cache.as_ref().map_or(0, |c| c.factorizations);
        solver.polish_cache = Some(PolishCache {
            signature: signature.clone(),
            active,
            a,
            factor,
            factorizations: count + 1,
        });
    }
    let cache = solver.polish_cache.as_ref()?;
    let (p, q, m, l, u) = solver.scaled();
    let (active, a) = (&cache.active, &cache.a);
    let b = Vector::from_fn(active.len(), |r, _| {
        let i = active[r];
        if signature[i] == -1 {
            l[i]
        } else {
            u[i]
        }
    });

    // regularized solve, then refinement against the exact KKT system
    let mut x = Vector::zeros(p.nrows());
    let mut lam = Vector::zeros(active.len());
    for _ in 0..=refine {
        let r1 = -q - p * &x - a.tr_mul(&lam);
        let r2 = &b - a * &x;
        let mut dx = &r1 + a.tr_mul(&r2) / delta;
        cache.factor.solve_mut(&mut dx);
        let dlam = (a * &dx - &r2) / delta;
        x += dx;
        lam += dlam;
    }

    let mut y_full = Vector::zeros(m.nrows());
    for (r, &i) in active.iter().enumerate() {
        let v = lam[r];
        let tol = 1e-9 * (1.0 + lam.amax());
        match signature[i] {
            -1 if v > tol => return None,
            1 if v < -tol => return None,
            _ => {}
        }
        y_full[i] = v;
    }
    let mx = m * &x;
    let scale = 1.0 + mx.amax();
    let violated = (0..mx.len()).any(|i| mx[i] < l[i] - 1e-9 * scale || mx[i] > u[i] + 1e-9 * scale);
    if violated {
        return None;
    }
    Some((x, y_full))
}
