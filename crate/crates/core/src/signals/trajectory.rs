use crate::{DpcError, Mat, Result, Vector};

/// Sampling interval of the whole control loop, seconds.
pub const DEFAULT_SAMPLE_PERIOD: f64 = 0.1;

/// A uniformly sampled multi-channel signal in per-unit.
///
/// Samples are stored column-wise: column `t` holds the vector `w(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    data: Mat,
    sample_period: f64,
}

impl Trajectory {
    /// Wraps a `channels × length` matrix.
    pub fn from_matrix(data: Mat, sample_period: f64) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(DpcError::Config("trajectory needs at least one sample".into()));
        }
        if data.nrows() == 0 {
            return Err(DpcError::Config("trajectory needs at least one channel".into()));
        }
        if !(sample_period > 0.0 && sample_period.is_finite()) {
            return Err(DpcError::Config(format!(
                "sample period must be positive, got {sample_period}"
            )));
        }
        Ok(Self { data, sample_period })
    }

    pub fn from_samples(samples: &[Vector], sample_period: f64) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(DpcError::Config("trajectory needs at least one sample".into()));
        };
        let channels = first.len();
        let mut data = Mat::zeros(channels, samples.len());
        for (t, s) in samples.iter().enumerate() {
            if s.len() != channels {
                return Err(DpcError::dim("trajectory sample", channels, s.len()));
            }
            data.set_column(t, s);
        }
        Self::from_matrix(data, sample_period)
    }

    pub fn zeros(channels: usize, length: usize, sample_period: f64) -> Result<Self> {
        Self::from_matrix(Mat::zeros(channels, length), sample_period)
    }

    pub fn channels(&self) -> usize {
        self.data.nrows()
    }

    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    /// Always `false`; a trajectory holds at least one sample.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.sample_period
    }

    pub fn sample(&self, t: usize) -> Vector {
        self.data.column(t).into_owned()
    }

    pub fn get(&self, channel: usize, t: usize) -> f64 {
        self.data[(channel, t)]
    }

    pub fn set_sample(&mut self, t: usize, value: &Vector) {
        self.data.set_column(t, value);
    }

    pub fn channel(&self, channel: usize) -> Vec<f64> {
        self.data.row(channel).iter().copied().collect()
    }

    pub fn as_matrix(&self) -> &Mat {
        &self.data
    }

    /// Samples `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.len() {
            return Err(DpcError::OutOfRange(format!(
                "slice [{start}, {}) of a {}-sample trajectory",
                start + len,
                self.len()
            )));
        }
        Self::from_matrix(self.data.columns(start, len).into_owned(), self.sample_period)
    }

    /// Time stamp of sample `t` in seconds.
    pub fn time(&self, t: usize) -> f64 {
        t as f64 * self.sample_period
    }
}

/// Stacks `z(t) = [y(t); u(t)]`.
pub fn interleave(y: &Trajectory, u: &Trajectory) -> Result<Trajectory> {
    if y.len() != u.len() {
        return Err(DpcError::dim("interleave length", y.len(), u.len()));
    }
    if (y.sample_period - u.sample_period).abs() > 1e-12 {
        return Err(DpcError::Config(format!(
            "interleave: sample periods differ ({} vs {})",
            y.sample_period, u.sample_period
        )));
    }
    let p = y.channels();
    let m = u.channels();
    let mut data = Mat::zeros(p + m, y.len());
    data.rows_mut(0, p).copy_from(&y.data);
    data.rows_mut(p, m).copy_from(&u.data);
    Trajectory::from_matrix(data, y.sample_period)
}

/// Splits an interleaved trajectory back into `(y, u)`, `y` taking the first `p` channels.
pub fn deinterleave(z: &Trajectory, p: usize) -> Result<(Trajectory, Trajectory)> {
    if p == 0 || p >= z.channels() {
        return Err(DpcError::OutOfRange(format!(
            "cannot split {} channels with p = {p}",
            z.channels()
        )));
    }
    let m = z.channels() - p;
    let y = Trajectory::from_matrix(z.data.rows(0, p).into_owned(), z.sample_period)?;
    let u = Trajectory::from_matrix(z.data.rows(p, m).into_owned(), z.sample_period)?;
    Ok((y, u))
}
