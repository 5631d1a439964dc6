//! Adadelta, Adam and the cosine learning-rate schedule.

use std::f64::consts::PI;

use super::params::{Gradients, ParamStore};
use super::scalar::Scalar;
use super::NeuralError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    Adadelta { rho: f64, eps: f64 },
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl OptimizerKind {
    pub fn adadelta() -> Self {
        OptimizerKind::Adadelta { rho: 0.95, eps: 1e-6 }
    }

    pub fn adam() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::Adadelta { .. } => "adadelta",
            OptimizerKind::Adam { .. } => "adam",
        }
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = NeuralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "adadelta" => Ok(Self::adadelta()),
            "adam" => Ok(Self::adam()),
            _ => Err(NeuralError::Config(format!("unknown optimizer {s:?}"))),
        }
    }
}

/// Per-parameter optimizer state, kept in `f64` whatever the model precision.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    steps: u64,
}

impl Optimizer {
    pub fn new<F: Scalar>(kind: OptimizerKind, store: &ParamStore<F>) -> Self {
        let zeros: Vec<Vec<f64>> = store.values().iter().map(|t| vec![0.0; t.len()]).collect();
        Optimizer {
            kind,
            first: zeros.clone(),
            second: zeros,
            steps: 0,
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One update with learning rate `lr`.
    pub fn step<F: Scalar>(&mut self, store: &mut ParamStore<F>, grads: &Gradients<F>, lr: f64) {
        self.steps += 1;
        let t = self.steps as i32;
        for (p, (param, grad)) in store.values_mut().iter_mut().zip(grads.tensors()).enumerate() {
            let (m, v) = (&mut self.first[p], &mut self.second[p]);
            for (i, (w, &g)) in param.data_mut().iter_mut().zip(grad.data()).enumerate() {
                let g = g.f64();
                let delta = match self.kind {
                    OptimizerKind::Adadelta { rho, eps } => {
                        // m accumulates squared updates, v squared gradients
                        v[i] = rho * v[i] + (1.0 - rho) * g * g;
                        let d = ((m[i] + eps).sqrt() / (v[i] + eps).sqrt()) * g;
                        m[i] = rho * m[i] + (1.0 - rho) * d * d;
                        lr * d
                    }
                    OptimizerKind::Adam { beta1, beta2, eps } => {
                        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                        let mh = m[i] / (1.0 - beta1.powi(t));
                        let vh = v[i] / (1.0 - beta2.powi(t));
                        lr * mh / (vh.sqrt() + eps)
                    }
                };
                *w = F::of(w.f64() - delta);
            }
        }
    }
}

/// Cosine annealing from `initial` to `initial * floor_ratio` over `total` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineSchedule {
    pub initial: f64,
    pub floor_ratio: f64,
    pub total: u64,
}

impl CosineSchedule {
    pub fn new(initial: f64, total: u64) -> Self {
        CosineSchedule {
            initial,
            floor_ratio: 1e-4,
            total,
        }
    }

    pub fn rate(&self, step: u64) -> f64 {
        let floor = self.initial * self.floor_ratio;
        if self.total == 0 {
            return self.initial;
        }
        let frac = (step.min(self.total) as f64) / self.total as f64;
        floor + 0.5 * (self.initial - floor) * (1.0 + (PI * frac).cos())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::tensor::Tensor;

    fn quadratic_descent(kind: OptimizerKind, lr: f64, steps: usize) -> f64 {
        let mut store = ParamStore::<f64>::new();
        let id = store.add("w", Tensor::from_f64(1, 2, &[3.0, -2.0]));
        let mut opt = Optimizer::new(kind, &store);
        let mut grads = Gradients::zeros_like(&store);
        for _ in 0..steps {
            grads.zero();
            let w = store.get(id).data().to_vec();
            grads.get_mut(id).data_mut().copy_from_slice(&[2.0 * w[0], 2.0 * w[1]]);
            opt.step(&mut store, &grads, lr);
        }
        store.get(id).data().iter().map(|x| x * x).sum()
    }

    #[test]
    fn both_optimizers_descend() {
        assert!(quadratic_descent(OptimizerKind::adam(), 0.1, 300) < 1e-3);
        assert!(quadratic_descent(OptimizerKind::adadelta(), 1.0, 300) < 13.0);
    }

    #[test]
    fn first_adadelta_step_size() {
        // with empty accumulators the step is lr * sqrt(eps) / sqrt((1 - rho) g^2 + eps) * g
        let mut store = ParamStore::<f64>::new();
        let id = store.add("w", Tensor::from_f64(1, 1, &[1.0]));
        let mut opt = Optimizer::new(OptimizerKind::adadelta(), &store);
        let mut grads = Gradients::zeros_like(&store);
        grads.get_mut(id).data_mut()[0] = 2.0;
        opt.step(&mut store, &grads, 0.01);
        let expect = 1.0 - 0.01 * (1e-6f64).sqrt() / (0.05 * 4.0 + 1e-6f64).sqrt() * 2.0;
        assert!((store.get(id).data()[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn cosine_endpoints() {
        let s = CosineSchedule::new(0.01, 100);
        assert_eq!(s.rate(0), 0.01);
        assert!((s.rate(100) - 1e-6).abs() < 1e-18);
        assert!((s.rate(50) - (1e-6 + 0.5 * (0.01 - 1e-6))).abs() < 1e-15);
        assert!(s.rate(30) > s.rate(31));
    }
}
