//! Small fully connected network over a flat parameter vector, with exact
//! reverse-mode gradients for parameters and inputs.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlpError {
    #[error("expected input of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputActivation {
    Identity,
    Tanh,
}

/// Layer `l` stores its `out x in` weights row-major, then its biases.
/// Hidden layers use ReLU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    output: OutputActivation,
    params: Vec<f64>,
}

/// Activations recorded by [`Mlp::forward_cached`]; `acts[0]` is the
/// input and `acts[l+1]` the output of layer `l`.
#[derive(Debug, Clone, Default)]
pub struct Cache {
    acts: Vec<Vec<f64>>,
}

impl Cache {
    pub fn output(&self) -> &[f64] {
        self.acts.last().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

impl Mlp {
    pub fn zeros(sizes: &[usize], output: OutputActivation) -> Self {
        assert!(sizes.len() >= 2 && sizes.iter().all(|&s| s > 0), "bad layer sizes {sizes:?}");
        let n = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        Mlp {
            sizes: sizes.to_vec(),
            output,
            params: vec![0.0; n],
        }
    }

    /// Weights and biases uniform in `±1/sqrt(fan_in)`.
    pub fn new(sizes: &[usize], output: OutputActivation, rng: &mut impl Rng) -> Self {
        let mut m = Mlp::zeros(sizes, output);
        let mut off = 0;
        for w in sizes.windows(2) {
            let k = 1.0 / (w[0] as f64).sqrt();
            for p in &mut m.params[off..off + w[0] * w[1] + w[1]] {
                *p = rng.random_range(-k..k);
            }
            off += w[0] * w[1] + w[1];
        }
        m
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, MlpError> {
        Ok(self.forward_cached(x)?.acts.pop().unwrap())
    }

    pub fn forward_cached(&self, x: &[f64]) -> Result<Cache, MlpError> {
        if x.len() != self.sizes[0] {
            return Err(MlpError::DimensionMismatch {
                expected: self.sizes[0],
                got: x.len(),
            });
        }
        let layers = self.sizes.len() - 1;
        let mut acts = Vec::with_capacity(layers + 1);
        acts.push(x.to_vec());
        let mut off = 0;
        for l in 0..layers {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            let w = &self.params[off..off + i * o];
            let b = &self.params[off + i * o..off + i * o + o];
            let input = &acts[l];
            let mut out: Vec<f64> = (0..o)
                .map(|r| b[r] + w[r * i..(r + 1) * i].iter().zip(input).map(|(a, x)| a * x).sum::<f64>())
                .collect();
            if l + 1 < layers {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            } else if self.output == OutputActivation::Tanh {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
            acts.push(out);
            off += i * o + o;
        }
        Ok(Cache { acts })
    }

    /// Adds `d(upstream . output)/d(params)` into `grad` and returns the
    /// gradient with respect to the input.
    pub fn backward(&self, cache: &Cache, upstream: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let layers = self.sizes.len() - 1;
        let mut delta: Vec<f64> = upstream.to_vec();
        if self.output == OutputActivation::Tanh {
            for (d, y) in delta.iter_mut().zip(&cache.acts[layers]) {
                *d *= 1.0 - y * y;
            }
        }
        let mut off = self.params.len();
        for l in (0..layers).rev() {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            off -= i * o + o;
            let input = &cache.acts[l];
            let w = &self.params[off..off + i * o];
            for r in 0..o {
                let d = delta[r];
                if d == 0.0 {
                    continue;
                }
                let g = &mut grad[off + r * i..off + (r + 1) * i];
                for (gk, xk) in g.iter_mut().zip(input) {
                    *gk += d * xk;
                }
                grad[off + i * o + r] += d;
            }
            let mut prev = vec![0.0; i];
            for r in 0..o {
                let d = delta[r];
                if d == 0.0 {
                    continue;
                }
                for (p, wk) in prev.iter_mut().zip(&w[r * i..(r + 1) * i]) {
                    *p += d * wk;
                }
            }
            if l > 0 {
                for (p, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
            }
            delta = prev;
        }
        delta
    }

    /// `self <- tau * other + (1 - tau) * self`.
    pub fn soft_update(&mut self, other: &Mlp, tau: f64) {
        for (a, b) in self.params.iter_mut().zip(&other.params) {
            *a = tau * b + (1.0 - tau) * *a;
        }
    }
}
