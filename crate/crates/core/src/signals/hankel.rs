use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::{DpcError, Mat, Result};

/// Horizons and training length shared by every predictor.
///
/// Windows span `tau_p + tau_f` samples: the past occupies relative steps
/// `0..tau_p`, the future `tau_p..tau_p + tau_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HankelConfig {
    pub tau_p: usize,
    pub tau_f: usize,
    pub n_samples: usize,
}

impl HankelConfig {
    pub fn new(tau_p: usize, tau_f: usize, n_samples: usize) -> Result<Self> {
        let cfg = Self {
            tau_p,
            tau_f,
            n_samples,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_p == 0 || self.tau_f == 0 {
            return Err(DpcError::Config(format!(
                "horizons must be positive (tau_p = {}, tau_f = {})",
                self.tau_p, self.tau_f
            )));
        }
        if self.n_samples < self.window() {
            return Err(DpcError::InsufficientData {
                needed: self.window(),
                available: self.n_samples,
            });
        }
        Ok(())
    }

    /// Window length `tau_p + tau_f`.
    pub fn window(&self) -> usize {
        self.tau_p + self.tau_f
    }

    /// Number of Hankel columns, `n_samples - (tau_p + tau_f) + 1`.
    pub fn n_col(&self) -> usize {
        self.n_samples + 1 - self.window()
    }
}

/// A Hankel matrix scaled by `1/sqrt(n_col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    pub values: Mat,
    /// Channels per block row.
    pub channels: usize,
}

impl HankelMatrix {
    pub fn n_row(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_col(&self) -> usize {
        self.values.ncols()
    }

    /// Number of block rows (window length).
    pub fn block_rows(&self) -> usize {
        self.n_row() / self.channels
    }
}

/// Builds the scaled Hankel matrix over relative steps `t0..=t1` with `n_col` columns.
///
/// Entry `(i·c + ch, j)` equals `w_ch(t0 + i + j) / sqrt(n_col)`.
pub fn build_hankel(traj: &Trajectory, t0: usize, t1: usize, n_col: usize) -> Result<HankelMatrix> {
    if t1 < t0 {
        return Err(DpcError::OutOfRange(format!("window end {t1} precedes start {t0}")));
    }
    if n_col == 0 {
        return Err(DpcError::OutOfRange("Hankel matrix needs at least one column".into()));
    }
    if t1 + n_col > traj.len() {
        return Err(DpcError::OutOfRange(format!(
            "window [{t0}, {t1}] with {n_col} columns needs {} samples, trajectory has {}",
            t1 + n_col,
            traj.len()
        )));
    }
    let c = traj.channels();
    let blocks = t1 - t0 + 1;
    let scale = 1.0 / (n_col as f64).sqrt();
    let src = traj.as_matrix();
    let mut values = Mat::zeros(c * blocks, n_col);
    for j in 0..n_col {
        for i in 0..blocks {
            let t = t0 + i + j;
            for ch in 0..c {
                values[(i * c + ch, j)] = src[(ch, t)] * scale;
            }
        }
    }
    Ok(HankelMatrix { values, channels: c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalar(values: &[f64]) -> Trajectory {
        Trajectory::from_matrix(Mat::from_row_slice(1, values.len(), values), 0.1).unwrap()
    }

    #[test]
    fn hand_expanded_example() {
        let h = build_hankel(&scalar(&[1.0, 2.0, 3.0, 4.0]), 0, 1, 3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let expected = Mat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 3.0, 4.0]) * s;
        assert!((h.values - expected).abs().max() < 1e-15);
    }

    #[test]
    fn constant_signal() {
        let traj = Trajectory::from_matrix(Mat::from_element(2, 20, 0.7), 0.1).unwrap();
        let h = build_hankel(&traj, 2, 5, 9).unwrap();
        assert_eq!(h.n_row(), 8);
        let expected = 0.7 / 3.0;
        assert!(h.values.iter().all(|v| (v - expected).abs() < 1e-15));
    }

    #[test]
    fn table_column_counts() {
        let cfg = HankelConfig::new(30, 60, 2000).unwrap();
        assert_eq!(cfg.n_col(), 1911);
        let cfg = HankelConfig::new(60, 60, 500).unwrap();
        assert_eq!(cfg.n_col(), 381);
        assert!(HankelConfig::new(30, 60, 89).is_err());
        assert!(HankelConfig::new(0, 60, 500).is_err());
    }

    #[test]
    fn out_of_range_window() {
        let traj = scalar(&[1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(build_hankel(&traj, 0, 1, 4), Err(DpcError::OutOfRange(_))));
        assert!(matches!(build_hankel(&traj, 2, 1, 1), Err(DpcError::OutOfRange(_))));
    }

    proptest! {
        #[test]
        fn shift_structure_and_row_energy(
            values in proptest::collection::vec(-5.0f64..5.0, 24..60),
            t0 in 0usize..4,
            span in 0usize..5,
        ) {
            let len = values.len() / 2;
            let traj = Trajectory::from_matrix(Mat::from_column_slice(2, len, &values[..2 * len]), 0.1).unwrap();
            let t1 = t0 + span;
            let n_col = len - t1;
            let h = build_hankel(&traj, t0, t1, n_col).unwrap();
            let c = 2;
            for i in 0..span {
                for j in 0..n_col - 1 {
                    for ch in 0..c {
                        prop_assert_eq!(h.values[(i * c + ch, j + 1)], h.values[((i + 1) * c + ch, j)]);
                    }
                }
            }
            for r in 0..h.n_row() {
                let (i, ch) = (r / c, r % c);
                let direct: f64 = (0..n_col).map(|j| traj.get(ch, t0 + i + j).powi(2)).sum::<f64>() / n_col as f64;
                let row: f64 = h.values.row(r).iter().map(|v| v * v).sum();
                prop_assert!((row - direct).abs() <= 1e-12 * (1.0 + direct));
            }
        }
    }
}
