use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::signals::Trajectory;
use crate::{DpcError, Mat, Result, Vector};

/// One oscillatory mode of the surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    /// Undamped natural frequency, Hz.
    pub freq_hz: f64,
    #[serde(rename = "zeta")]
    pub damping_ratio: f64,
    pub input_residues: Vec<f64>,
    pub output_residues: Vec<f64>,
    #[serde(default)]
    pub disturbance_residues: Vec<f64>,
}

impl ModeSpec {
    fn omega(&self) -> f64 {
        2.0 * PI * self.freq_hz
    }
}

/// Discrete LTI plant `x⁺ = A x + B sat(u) + Bd d`, `y = C x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    pub a: Mat,
    pub b: Mat,
    pub bd: Mat,
    pub c: Mat,
    /// Always zero: inputs reach the outputs one sample later.
    pub d: Mat,
    pub ts: f64,
    pub saturation_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub x: Vector,
    pub t: usize,
}

impl PlantModel {
    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn disturbances(&self) -> usize {
        self.bd.ncols()
    }

    pub fn initial_state(&self) -> PlantState {
        PlantState {
            x: Vector::zeros(self.states()),
            t: 0,
        }
    }

    pub fn with_saturation(mut self, limit: Option<f64>) -> Self {
        self.saturation_limit = limit;
        self
    }

    pub fn output(&self, state: &PlantState) -> Vector {
        &self.c * &state.x
    }

    pub fn saturate(&self, u: &Vector) -> Vector {
        match self.saturation_limit {
            Some(lim) => u.map(|v| v.clamp(-lim, lim)),
            None => u.clone(),
        }
    }

    /// Advances one sample. The returned output is `C x(t)`, measured before
    /// the update, so `u(t)` first shows up in the output of the next call.
    pub fn step(&self, state: &PlantState, u: &Vector, d: &Vector) -> Result<(PlantState, Vector)> {
        if u.len() != self.inputs() {
            return Err(DpcError::dim("plant input", self.inputs(), u.len()));
        }
        if d.len() != self.disturbances() {
            return Err(DpcError::dim("plant disturbance", self.disturbances(), d.len()));
        }
        let y = self.output(state);
        let x = &self.a * &state.x + &self.b * self.saturate(u) + &self.bd * d;
        Ok((PlantState { x, t: state.t + 1 }, y))
    }

    /// Simulates from rest; returns the outputs `y(0..n)`.
    pub fn simulate(&self, u: &Trajectory, d: Option<&Trajectory>) -> Result<Trajectory> {
        let n = u.len();
        if let Some(d) = d {
            if d.len() != n {
                return Err(DpcError::dim("disturbance length", n, d.len()));
            }
        }
        let zero_d = Vector::zeros(self.disturbances());
        let mut state = self.initial_state();
        let mut out = Mat::zeros(self.outputs(), n);
        for t in 0..n {
            let dt = d.map(|d| d.sample(t)).unwrap_or_else(|| zero_d.clone());
            let (next, y) = self.step(&state, &u.sample(t), &dt)?;
            out.set_column(t, &y);
            state = next;
        }
        Trajectory::from_matrix(out, self.ts)
    }
}

/// Assembles the block-diagonal modal plant.
pub fn build_modal_plant(modes: &[ModeSpec], ts: f64) -> Result<PlantModel> {
    let Some(first) = modes.first() else {
        return Err(DpcError::Config("plant needs at least one mode".into()));
    };
    if !(ts > 0.0) {
        return Err(DpcError::Config(format!("sample period must be positive, got {ts}")));
    }
    let m = first.input_residues.len();
    let p = first.output_residues.len();
    let nd = first.disturbance_residues.len();
    let n = 2 * modes.len();
    let nyquist = 0.5 / ts;
    let mut a = Mat::zeros(n, n);
    let mut b = Mat::zeros(n, m);
    let mut bd = Mat::zeros(n, nd);
    let mut c = Mat::zeros(p, n);
    for (k, mode) in modes.iter().enumerate() {
        if !(mode.freq_hz > 0.0) || mode.freq_hz >= nyquist {
            return Err(DpcError::Config(format!(
                "mode {k}: frequency {} Hz outside (0, {nyquist}) Hz",
                mode.freq_hz
            )));
        }
        if !(mode.damping_ratio > -1.0 && mode.damping_ratio < 1.0) {
            return Err(DpcError::Config(format!(
                "mode {k}: damping ratio {} outside (-1, 1)",
                mode.damping_ratio
            )));
        }
        if mode.input_residues.len() != m || mode.output_residues.len() != p || mode.disturbance_residues.len() != nd {
            return Err(DpcError::Config(format!(
                "mode {k}: residue vector lengths differ from mode 0"
            )));
        }
        let all = mode
            .input_residues
            .iter()
            .chain(&mode.output_residues)
            .chain(&mode.disturbance_residues);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(DpcError::Config(format!("mode {k}: non-finite residue")));
        }
        let w = mode.omega();
        let sigma = -mode.damping_ratio * w;
        let wd = w * (1.0 - mode.damping_ratio.powi(2)).sqrt();
        let decay = (sigma * ts).exp();
        let (s, co) = (wd * ts).sin_cos();
        let phi = nalgebra::Matrix2::new(decay * co, decay * s, -decay * s, decay * co);
        // Γ = A_c⁻¹ (Φ − I); the residues drive the second state only
        let ac_inv = nalgebra::Matrix2::new(sigma, -wd, wd, sigma) / (sigma * sigma + wd * wd);
        let gamma = ac_inv * (phi - nalgebra::Matrix2::identity());
        let r = 2 * k;
        a.fixed_view_mut::<2, 2>(r, r).copy_from(&phi);
        for (j, &res) in mode.input_residues.iter().enumerate() {
            b[(r, j)] = gamma[(0, 1)] * res;
            b[(r + 1, j)] = gamma[(1, 1)] * res;
        }
        for (j, &res) in mode.disturbance_residues.iter().enumerate() {
            bd[(r, j)] = gamma[(0, 1)] * res;
            bd[(r + 1, j)] = gamma[(1, 1)] * res;
        }
        for (i, &res) in mode.output_residues.iter().enumerate() {
            c[(i, r)] = res;
        }
    }
    Ok(PlantModel {
        a,
        b,
        bd,
        d: Mat::zeros(p, m),
        c,
        ts,
        saturation_limit: None,
    })
}

/// Frequency and damping of one complex eigenvalue pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalDamping {
    /// Undamped natural frequency `|s| / 2π`, Hz.
    pub freq_hz: f64,
    /// Damped frequency `|Im s| / 2π`, Hz.
    pub damped_freq_hz: f64,
    pub damping_ratio: f64,
}

/// Maps the complex discrete eigenvalues back to continuous `(f, ζ)` pairs, sorted by frequency.
pub fn eigen_damping(plant: &PlantModel) -> Vec<ModalDamping> {
    let eig = plant.a.complex_eigenvalues();
    let mut out: Vec<ModalDamping> = eig
        .iter()
        .filter(|l| l.im > 1e-12)
        .map(|l| {
            let s = l.ln() / plant.ts;
            let mag = s.norm();
            ModalDamping {
                freq_hz: mag / (2.0 * PI),
                damped_freq_hz: s.im.abs() / (2.0 * PI),
                damping_ratio: -s.re / mag,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.freq_hz
            .total_cmp(&b.freq_hz)
            .then(a.damping_ratio.total_cmp(&b.damping_ratio))
    });
    out
}

/// Single-excitation doublet: `+amplitude` for `duration`, `-amplitude` for
/// `duration`, then zero until `total` seconds, on one of `inputs` channels.
pub fn doublet(
    inputs: usize,
    input_index: usize,
    amplitude: f64,
    duration: f64,
    total: f64,
    ts: f64,
) -> Result<Trajectory> {
    if input_index >= inputs {
        return Err(DpcError::OutOfRange(format!(
            "doublet channel {input_index} of {inputs} inputs"
        )));
    }
    if !(amplitude > 0.0) || !(duration > 0.0) {
        return Err(DpcError::Config("doublet needs positive amplitude and duration".into()));
    }
    let half = (duration / ts).round() as usize;
    let n = ((total / ts).round() as usize).max(2 * half);
    let mut data = Mat::zeros(inputs, n);
    for t in 0..half {
        data[(input_index, t)] = amplitude;
        data[(input_index, half + t)] = -amplitude;
    }
    Trajectory::from_matrix(data, ts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(f: f64, z: f64) -> ModeSpec {
        ModeSpec {
            freq_hz: f,
            damping_ratio: z,
            input_residues: vec![1.0, -0.5],
            output_residues: vec![0.3, 0.7, -0.2],
            disturbance_residues: vec![0.4],
        }
    }

    #[test]
    fn eigenvalues_carry_the_mode() {
        let plant = build_modal_plant(&[mode(0.44, 0.002)], 0.1).unwrap();
        let w = 2.0 * PI * 0.44;
        let eig = plant.a.complex_eigenvalues();
        for l in eig.iter() {
            assert!((l.norm() - (-0.002 * w * 0.1f64).exp()).abs() < 1e-14);
            let angle = w * (1.0 - 0.002f64.powi(2)).sqrt() * 0.1;
            assert!((l.im.abs().atan2(l.re) - angle).abs() < 1e-13);
        }
    }

    #[test]
    fn lossless_mode_sits_on_the_unit_circle() {
        let plant = build_modal_plant(&[mode(1.3, 0.0)], 0.1).unwrap();
        for l in plant.a.complex_eigenvalues().iter() {
            assert!((l.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_damping_inverts_construction() {
        let modes = [
            mode(0.44, 0.002),
            mode(0.77, 0.03),
            mode(0.77, 0.035),
            mode(1.3, 0.08),
            mode(0.2, -0.01),
        ];
        let plant = build_modal_plant(&modes, 0.1).unwrap();
        let got = eigen_damping(&plant);
        let mut expected: Vec<(f64, f64)> = modes.iter().map(|m| (m.freq_hz, m.damping_ratio)).collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        assert_eq!(got.len(), expected.len());
        for (g, (f, z)) in got.iter().zip(&expected) {
            assert!((g.freq_hz - f).abs() < 1e-9, "{g:?} vs {f}");
            assert!((g.damping_ratio - z).abs() < 1e-9, "{g:?} vs {z}");
            assert!((g.damped_freq_hz - f * (1.0 - z * z).sqrt()).abs() < 1e-9);
        }
        assert!(got[0].damping_ratio < 0.0);
    }

    #[test]
    fn rejects_bad_modes() {
        assert!(build_modal_plant(&[], 0.1).is_err());
        assert!(build_modal_plant(&[mode(5.0, 0.1)], 0.1).is_err());
        assert!(build_modal_plant(&[mode(1.0, 1.0)], 0.1).is_err());
        let mut bad = mode(1.0, 0.1);
        bad.output_residues.push(f64::NAN);
        assert!(build_modal_plant(&[mode(0.5, 0.1), bad], 0.1).is_err());
    }

    #[test]
    fn one_step_input_delay() {
        let plant = build_modal_plant(&[mode(0.44, 0.05), mode(1.3, 0.08)], 0.1).unwrap();
        let zero_d = Vector::zeros(1);
        let s0 = plant.initial_state();
        let e1 = Vector::from_vec(vec![1.0, 0.0]);
        let (s1, y0) = plant.step(&s0, &e1, &zero_d).unwrap();
        assert!(y0.iter().all(|&v| v == 0.0));
        let (_, y1) = plant.step(&s1, &Vector::zeros(2), &zero_d).unwrap();
        let cb = &plant.c * plant.b.column(0);
        assert!((y1 - cb).amax() < 1e-15);
        assert!(plant.d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn equilibrium_stays_at_rest() {
        let plant = build_modal_plant(&[mode(0.44, 0.05)], 0.1).unwrap();
        let u = Trajectory::zeros(2, 100, 0.1).unwrap();
        let y = plant.simulate(&u, None).unwrap();
        assert!(y.as_matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn saturation_clips_the_input() {
        let plant = build_modal_plant(&[mode(0.44, 0.05)], 0.1)
            .unwrap()
            .with_saturation(Some(0.1));
        let zero_d = Vector::zeros(1);
        let s0 = plant.initial_state();
        let (a, _) = plant.step(&s0, &Vector::from_vec(vec![0.5, 0.0]), &zero_d).unwrap();
        let (b, _) = plant.step(&s0, &Vector::from_vec(vec![0.1, 0.0]), &zero_d).unwrap();
        assert_eq!(a.x, b.x);
    }

    #[test]
    fn doublet_shape() {
        let d = doublet(3, 1, 0.01, 1.0, 5.0, 0.1).unwrap();
        assert_eq!(d.len(), 50);
        let ch = d.channel(1);
        assert!(ch[..10].iter().all(|&v| v == 0.01));
        assert!(ch[10..20].iter().all(|&v| v == -0.01));
        assert!(ch[20..].iter().all(|&v| v == 0.0));
        assert!(d.channel(0).iter().chain(d.channel(2).iter()).all(|&v| v == 0.0));
        assert!(ch.iter().sum::<f64>().abs() < 1e-15);
        assert!(doublet(3, 3, 0.01, 1.0, 5.0, 0.1).is_err());
    }
}
