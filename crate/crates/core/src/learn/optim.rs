//! Stochastic gradient descent with momentum.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sgd {
    pub lr: f64,
    pub momentum: f64,
    /// Rescale gradients whose L2 norm exceeds this.
    pub clip_norm: Option<f64>,
    velocity: Vec<f64>,
}

impl Sgd {
    pub fn new(num_params: usize, lr: f64, momentum: f64, clip_norm: Option<f64>) -> Self {
        Sgd {
            lr,
            momentum,
            clip_norm,
            velocity: vec![0.0; num_params],
        }
    }

    /// `v <- mu v - lr g; p <- p + v`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        let scale = match self.clip_norm {
            Some(c) => {
                let n = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if n > c {
                    c / n
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        for ((p, v), g) in params.iter_mut().zip(&mut self.velocity).zip(grad) {
            *v = self.momentum * *v - self.lr * g * scale;
            *p += *v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn momentum_accumulates() {
        let mut o = Sgd::new(1, 0.1, 0.9, None);
        let mut p = [0.0];
        o.step(&mut p, &[1.0]);
        assert!((p[0] + 0.1).abs() < 1e-15);
        o.step(&mut p, &[1.0]);
        assert!((p[0] + 0.1 + 0.19).abs() < 1e-15);
    }

    #[test]
    fn clipping_bounds_the_step() {
        let mut o = Sgd::new(2, 1.0, 0.0, Some(1.0));
        let mut p = [0.0, 0.0];
        o.step(&mut p, &[3.0, 4.0]);
        assert!((p[0] + 0.6).abs() < 1e-12 && (p[1] + 0.8).abs() < 1e-12);
    }
}
