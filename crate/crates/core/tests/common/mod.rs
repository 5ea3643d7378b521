//! Shared oracles for the integration tests.
#![allow(dead_code)]

use dpc_core::plant::PlantModel;
use dpc_core::signals::{white_excitation, Trajectory};
use dpc_core::{Mat, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn randn(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
    Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Random stable LTI system with `D = 0`: real 2×2 rotation blocks with
/// radii in `[0.6, 0.95]`, mixed by a well-conditioned similarity.
pub fn random_lti(n: usize, m: usize, p: usize, seed: u64) -> PlantModel {
    assert!(n.is_multiple_of(2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Mat::zeros(n, n);
    for k in 0..n / 2 {
        let r: f64 = rng.random_range(0.6..0.95);
        let th: f64 = rng.random_range(0.1..2.5);
        let i = 2 * k;
        a[(i, i)] = r * th.cos();
        a[(i, i + 1)] = r * th.sin();
        a[(i + 1, i)] = -r * th.sin();
        a[(i + 1, i + 1)] = r * th.cos();
    }
    let t = Mat::identity(n, n) + 0.3 * randn(n, n, &mut rng);
    let t_inv = t.clone().try_inverse().expect("similarity is invertible");
    PlantModel {
        a: &t * a * &t_inv,
        b: randn(n, m, &mut rng),
        bd: Mat::zeros(n, 0),
        c: randn(p, n, &mut rng),
        d: Mat::zeros(p, m),
        ts: 0.1,
        saturation_limit: None,
    }
}

/// Unit-variance white input and the noiseless response.
pub fn excite(plant: &PlantModel, n: usize, seed: u64) -> (Trajectory, Trajectory) {
    let u = white_excitation(plant.inputs(), n, 1.0, 10.0, seed).unwrap();
    let y = plant.simulate(&u, None).unwrap();
    (u, y)
}

/// Interleaved `[y; u]` samples `t0..t0 + tau_p`, oldest first.
pub fn stacked_past(u: &Trajectory, y: &Trajectory, t0: usize, tau_p: usize) -> Vector {
    let (p, m) = (y.channels(), u.channels());
    let mut z = Vector::zeros((p + m) * tau_p);
    for s in 0..tau_p {
        let base = s * (p + m);
        z.rows_mut(base, p).copy_from(&y.sample(t0 + s));
        z.rows_mut(base + p, m).copy_from(&u.sample(t0 + s));
    }
    z
}

/// Samples `t0..t0 + len` of one trajectory stacked into a vector.
pub fn stacked(traj: &Trajectory, t0: usize, len: usize) -> Vector {
    let c = traj.channels();
    let mut v = Vector::zeros(c * len);
    for s in 0..len {
        v.rows_mut(s * c, c).copy_from(&traj.sample(t0 + s));
    }
    v
}

pub fn rel_err(got: &Vector, want: &Vector) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

/// Random strictly convex QP `l ≤ M x ≤ u` with a known feasible point.
/// Row kinds: two-sided, one-sided, or (at most `n − 1` of them) equality.
pub fn random_qp(rng: &mut ChaCha8Rng) -> dpc_core::ocp::QpProblem {
    let n = rng.random_range(1..=6usize);
    let k = rng.random_range(0..=6usize);
    let b = randn(n, n, rng);
    let p = &b * b.transpose() + Mat::identity(n, n) * 0.1;
    let q = randn(n, 1, rng).column(0).into_owned() * 2.0;
    let m = randn(k, n, rng);
    let x0 = randn(n, 1, rng).column(0).into_owned() * 0.5;
    let mx0 = &m * &x0;
    let mut l = Vector::zeros(k);
    let mut u = Vector::zeros(k);
    let mut equalities = 0;
    for i in 0..k {
        let kind = rng.random_range(0..4u8);
        let (a, c): (f64, f64) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        match kind {
            0 if equalities + 1 < n => {
                equalities += 1;
                l[i] = mx0[i];
                u[i] = mx0[i];
            }
            1 => {
                l[i] = f64::NEG_INFINITY;
                u[i] = mx0[i] + c;
            }
            2 => {
                l[i] = mx0[i] - a;
                u[i] = f64::INFINITY;
            }
            _ => {
                l[i] = mx0[i] - a;
                u[i] = mx0[i] + c;
            }
        }
    }
    dpc_core::ocp::QpProblem::from_parts(
        p,
        q,
        Mat::zeros(0, n),
        Vector::zeros(0),
        m,
        l,
        u,
        Vector::from_element(n, f64::NEG_INFINITY),
        Vector::from_element(n, f64::INFINITY),
    )
    .unwrap()
}

/// Brute-force optimum of `min ½ xᵀPx + qᵀx, l ≤ M x ≤ u` by enumerating
/// every assignment of rows to {inactive, at lower, at upper}, solving the
/// equality-constrained KKT system, and keeping the best point that is
/// primal feasible with correctly signed multipliers.
pub fn active_set_oracle(p: &Mat, q: &Vector, m: &Mat, l: &Vector, u: &Vector) -> Option<Vector> {
    let (n, k) = (p.nrows(), m.nrows());
    let mut best: Option<(f64, Vector)> = None;
    let total = 3usize.pow(k as u32);
    'assign: for code in 0..total {
        let mut c = code;
        let mut rows = Vec::new();
        for i in 0..k {
            let state = c % 3;
            c /= 3;
            match state {
                1 if l[i].is_finite() => rows.push((i, l[i], -1.0)),
                2 if u[i].is_finite() && u[i] != l[i] => rows.push((i, u[i], 1.0)),
                0 if l[i] != u[i] => {}
                _ => continue 'assign,
            }
        }
        let na = rows.len();
        if na > n {
            continue;
        }
        let mut kkt = Mat::zeros(n + na, n + na);
        let mut rhs = Vector::zeros(n + na);
        kkt.view_mut((0, 0), (n, n)).copy_from(p);
        rhs.rows_mut(0, n).copy_from(&-q);
        for (r, &(i, b, _)) in rows.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = m[(i, j)];
                kkt[(j, n + r)] = m[(i, j)];
            }
            rhs[n + r] = b;
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        let x = sol.rows(0, n).into_owned();
        let mx = m * &x;
        let scale = 1.0 + mx.amax();
        if (0..k).any(|i| mx[i] < l[i] - 1e-9 * scale || mx[i] > u[i] + 1e-9 * scale) {
            continue;
        }
        for (r, &(i, _, sign)) in rows.iter().enumerate() {
            let lam = sol[n + r];
            if l[i] != u[i] && sign * lam < -1e-9 {
                continue 'assign;
            }
        }
        let obj = 0.5 * x.dot(&(p * &x)) + q.dot(&x);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, x));
        }
    }
    best.map(|(_, x)| x)
}
