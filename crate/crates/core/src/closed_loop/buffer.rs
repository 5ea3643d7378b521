use std::collections::VecDeque;

use crate::{DpcError, Result, Vector};

/// The last `tau_p` samples of `(y_f, u)`.
#[derive(Debug, Clone)]
pub struct PastBuffer {
    tau_p: usize,
    outputs: usize,
    inputs: usize,
    samples: VecDeque<(Vector, Vector)>,
}

impl PastBuffer {
    pub fn new(tau_p: usize, outputs: usize, inputs: usize) -> Self {
        Self {
            tau_p,
            outputs,
            inputs,
            samples: VecDeque::with_capacity(tau_p + 1),
        }
    }

    pub fn tau_p(&self) -> usize {
        self.tau_p
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.samples.len() == self.tau_p
    }

    pub fn push(&mut self, y: &Vector, u: &Vector) -> Result<()> {
        if y.len() != self.outputs {
            return Err(DpcError::dim("buffer output", self.outputs, y.len()));
        }
        if u.len() != self.inputs {
            return Err(DpcError::dim("buffer input", self.inputs, u.len()));
        }
        if self.samples.len() == self.tau_p {
            self.samples.pop_front();
        }
        self.samples.push_back((y.clone(), u.clone()));
        Ok(())
    }

    /// Interleaved `[y; u]` per step, oldest first; zero-padded at the front
    /// while the buffer is filling.
    pub fn z_p(&self) -> Vector {
        let c = self.outputs + self.inputs;
        let mut z = Vector::zeros(c * self.tau_p);
        let offset = self.tau_p - self.samples.len();
        for (k, (y, u)) in self.samples.iter().enumerate() {
            let base = (offset + k) * c;
            z.rows_mut(base, self.outputs).copy_from(y);
            z.rows_mut(base + self.outputs, self.inputs).copy_from(u);
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_last_samples_oldest_first() {
        let mut b = PastBuffer::new(2, 1, 1);
        for t in 0..4 {
            b.push(
                &Vector::from_element(1, t as f64),
                &Vector::from_element(1, 10.0 + t as f64),
            )
            .unwrap();
        }
        assert!(b.is_full());
        assert_eq!(b.z_p().as_slice(), &[2.0, 12.0, 3.0, 13.0]);
    }

    #[test]
    fn pads_while_filling() {
        let mut b = PastBuffer::new(3, 1, 1);
        b.push(&Vector::from_element(1, 1.0), &Vector::from_element(1, 2.0))
            .unwrap();
        assert!(!b.is_full());
        assert_eq!(b.z_p().as_slice(), &[0.0, 0.0, 0.0, 0.0, 1.0, 2.0]);
        assert!(b.push(&Vector::zeros(2), &Vector::zeros(1)).is_err());
    }
}
