//! Adam with bias correction.

use super::{ProbeError, ProbeParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment accumulators for one tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> AdamState<T> {
    pub fn zeros(len: usize) -> Self {
        AdamState {
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
        }
    }
}

/// One Adam update at step `t` (1-based). Fails before touching anything if
/// a gradient entry is not finite.
pub fn adam_step<T: Scalar>(
    params: &mut [T],
    grads: &[T],
    state: &mut AdamState<T>,
    t: u64,
    cfg: &AdamConfig,
) -> Result<(), ProbeError> {
    if t == 0 {
        return Err(ProbeError::Config("adam step index starts at 1".into()));
    }
    let n = params.len();
    if grads.len() != n || state.m.len() != n || state.v.len() != n {
        return Err(ProbeError::Shape {
            expected: n,
            found: grads.len(),
        });
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(ProbeError::Divergence { step: t });
    }
    let b1 = T::of(cfg.beta1);
    let b2 = T::of(cfg.beta2);
    let one = T::one();
    let exp = i32::try_from(t).unwrap_or(i32::MAX);
    let c1 = one - b1.powi(exp);
    let c2 = one - b2.powi(exp);
    let lr = T::of(cfg.lr);
    let eps = T::of(cfg.eps);
    for i in 0..n {
        let g = grads[i];
        state.m[i] = b1 * state.m[i] + (one - b1) * g;
        state.v[i] = b2 * state.v[i] + (one - b2) * g * g;
        let m_hat = state.m[i] / c1;
        let v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}

/// Adam over every tensor of a probe model, sharing one step counter.
#[derive(Debug, Clone)]
pub struct ProbeOptimizer<T> {
    cfg: AdamConfig,
    states: Vec<AdamState<T>>,
    step: u64,
}

impl<T: Scalar> ProbeOptimizer<T> {
    pub fn new(params: &ProbeParams<T>, cfg: AdamConfig) -> Self {
        ProbeOptimizer {
            cfg,
            states: params.tensors().iter().map(|t| AdamState::zeros(t.len())).collect(),
            step: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut ProbeParams<T>, grads: &ProbeParams<T>) -> Result<(), ProbeError> {
        let t = self.step + 1;
        if !grads.all_finite() {
            return Err(ProbeError::Divergence { step: t });
        }
        for ((p, g), s) in params.tensors_mut().into_iter().zip(grads.tensors()).zip(&mut self.states) {
            adam_step(p, g, s, t, &self.cfg)?;
        }
        self.step = t;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = [0.0f64];
        let mut s = AdamState::zeros(1);
        adam_step(&mut p, &[1.0], &mut s, 1, &AdamConfig::default()).unwrap();
        assert!((p[0] - (-0.001 / (1.0 + 1e-8))).abs() < 1e-18);
    }

    #[test]
    fn zero_gradient_is_identity() {
        let start = [0.5f64, -3.0, 1e-7];
        let mut p = start;
        let mut s = AdamState::zeros(3);
        for t in 1..=1000 {
            adam_step(&mut p, &[0.0; 3], &mut s, t, &AdamConfig::default()).unwrap();
        }
        assert_eq!(p, start);
    }

    #[test]
    fn quadratic_bowl() {
        // f(x) = |x|^2, gradient 2x
        let cfg = AdamConfig {
            lr: 0.02,
            ..AdamConfig::default()
        };
        let mut x = [0.05f64, -0.1];
        let norm = |x: &[f64; 2]| 2.0 * (x[0] * x[0] + x[1] * x[1]).sqrt();
        let start = norm(&x);
        let mut s = AdamState::zeros(2);
        let mut best = start;
        for t in 1..=100 {
            let g = [2.0 * x[0], 2.0 * x[1]];
            adam_step(&mut x, &g, &mut s, t, &cfg).unwrap();
            best = best.min(norm(&x));
        }
        assert!(best < 1e-3 * start, "best {best} start {start}");
        assert!(norm(&x) < 1e-2 * start);
    }

    #[test]
    fn non_finite_gradient_leaves_params_alone() {
        let mut p = [1.0f64, 2.0];
        let mut s = AdamState::zeros(2);
        let err = adam_step(&mut p, &[0.1, f64::NAN], &mut s, 1, &AdamConfig::default());
        assert!(matches!(err, Err(ProbeError::Divergence { step: 1 })));
        assert_eq!(p, [1.0, 2.0]);
        assert_eq!(s.m, [0.0, 0.0]);
    }

    #[test]
    fn step_zero_rejected() {
        let mut p = [1.0f64];
        let mut s = AdamState::zeros(1);
        assert!(adam_step(&mut p, &[1.0], &mut s, 0, &AdamConfig::default()).is_err());
    }
}
