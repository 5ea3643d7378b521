use crate::{Mat, Vector};

/// Ruiz equilibration `P̄ = c D P D`, `M̄ = E M D`, `q̄ = c D q`.
#[derive(Debug, Clone)]
pub(crate) struct Scaling {
    pub d: Vector,
    pub e: Vector,
    pub c: f64,
}

const MIN_SCALE: f64 = 1e-4;
const MAX_SCALE: f64 = 1e4;

fn clamp_norm(v: f64) -> f64 {
    if v < MIN_SCALE {
        1.0
    } else {
        v.min(MAX_SCALE)
    }
}

/// Scales `p`, `q`, `m` in place and returns the factors.
pub(crate) fn ruiz(p: &mut Mat, q: &mut Vector, m: &mut Mat, iters: usize) -> Scaling {
    let (n, rows) = (p.nrows(), m.nrows());
    let mut d = Vector::from_element(n, 1.0);
    let mut e = Vector::from_element(rows, 1.0);
    let mut c = 1.0;
    for _ in 0..iters {
        let mut dk = Vector::zeros(n);
        for j in 0..n {
            let col = p.column(j).amax().max(if rows > 0 { m.column(j).amax() } else { 0.0 });
            dk[j] = 1.0 / clamp_norm(col).sqrt();
        }
        let mut ek = Vector::zeros(rows);
        for i in 0..rows {
            ek[i] = 1.0 / clamp_norm(m.row(i).amax()).sqrt();
        }
        for j in 0..n {
            for i in 0..n {
                p[(i, j)] *= dk[i] * dk[j];
            }
            for i in 0..rows {
                m[(i, j)] *= ek[i] * dk[j];
            }
            q[j] *= dk[j];
        }
        d.component_mul_assign(&dk);
        e.component_mul_assign(&ek);

        let mean_col = if n > 0 {
            (0..n).map(|j| p.column(j).amax()).sum::<f64>() / n as f64
        } else {
            1.0
        };
        let gamma = 1.0 / clamp_norm(mean_col.max(q.amax()));
        *p *= gamma;
        *q *= gamma;
        c *= gamma;
    }
    Scaling { d, e, c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_data_reconstructs() {
        let p0 = Mat::from_row_slice(2, 2, &[400.0, 1.0, 1.0, 0.01]);
        let q0 = Vector::from_vec(vec![3.0, -0.2]);
        let m0 = Mat::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 50.0, 2.0, 2.0]);
        let (mut p, mut q, mut m) = (p0.clone(), q0.clone(), m0.clone());
        let s = ruiz(&mut p, &mut q, &mut m, 15);
        let d = Mat::from_diagonal(&s.d);
        let e = Mat::from_diagonal(&s.e);
        assert!((&p - s.c * &d * &p0 * &d).amax() < 1e-12);
        assert!((&m - &e * &m0 * &d).amax() < 1e-12);
        assert!((&q - s.c * &d * &q0).amax() < 1e-12);
        let spread = |v: &Vector| v.max() / v.min();
        let cols = Vector::from_fn(2, |j, _| p.column(j).amax().max(m.column(j).amax()));
        assert!(spread(&cols) < 10.0);
    }
}
