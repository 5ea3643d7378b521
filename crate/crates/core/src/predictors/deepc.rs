use crate::signals::{build_hankel, HankelConfig, Trajectory};
use crate::{DpcError, Mat, Result};

/// Past/future input and output Hankel blocks over the last `n_samples` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DeePCData {
    pub u_p: Mat,
    pub y_p: Mat,
    pub u_f: Mat,
    pub y_f: Mat,
    pub config: HankelConfig,
    pub outputs: usize,
    pub inputs: usize,
}

impl DeePCData {
    pub fn n_col(&self) -> usize {
        self.u_p.ncols()
    }

    /// `[U_p; Y_p]`, the rows constrained by the measured past.
    pub fn z_p(&self) -> Mat {
        let mut z = Mat::zeros(self.u_p.nrows() + self.y_p.nrows(), self.n_col());
        z.rows_mut(0, self.u_p.nrows()).copy_from(&self.u_p);
        z.rows_mut(self.u_p.nrows(), self.y_p.nrows()).copy_from(&self.y_p);
        z
    }
}

pub fn build_deepc_data(u: &Trajectory, y: &Trajectory, cfg: HankelConfig) -> Result<DeePCData> {
    cfg.validate()?;
    if u.len() != y.len() {
        return Err(DpcError::dim("deepc training length", u.len(), y.len()));
    }
    if u.len() < cfg.n_samples {
        return Err(DpcError::InsufficientData {
            needed: cfg.n_samples,
            available: u.len(),
        });
    }
    let start = u.len() - cfg.n_samples;
    let u = u.slice(start, cfg.n_samples)?;
    let y = y.slice(start, cfg.n_samples)?;
    let n_col = cfg.n_col();
    let tau_p = cfg.tau_p;
    let last = cfg.window() - 1;
    Ok(DeePCData {
        u_p: build_hankel(&u, 0, tau_p - 1, n_col)?.values,
        y_p: build_hankel(&y, 0, tau_p - 1, n_col)?.values,
        u_f: build_hankel(&u, tau_p, last, n_col)?.values,
        y_f: build_hankel(&y, tau_p, last, n_col)?.values,
        config: cfg,
        outputs: y.channels(),
        inputs: u.channels(),
    })
}
