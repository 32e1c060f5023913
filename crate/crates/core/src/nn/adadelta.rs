use super::params::ParamStore;
use super::tensor::Real;
use crate::error::{Error, Result};

/// ADADELTA with an optional L2 penalty folded into the gradient.
///
/// Per coordinate with gradient `g`:
///
/// ```text
/// E[g²]  ← ρ E[g²] + (1 - ρ) g²
/// Δx     = -(√(E[Δx²] + ε) / √(E[g²] + ε)) g
/// E[Δx²] ← ρ E[Δx²] + (1 - ρ) Δx²
/// x      ← x + Δx
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Adadelta {
    pub rho: f64,
    pub eps: f64,
    pub l2: f64,
}

impl Default for Adadelta {
    fn default() -> Self {
        Adadelta {
            rho: 0.99,
            eps: 1e-7,
            l2: 0.0,
        }
    }
}

impl Adadelta {
    pub fn new(rho: f64, eps: f64, l2: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Config(format!("ADADELTA rho {rho} outside (0, 1)")));
        }
        if eps <= 0.0 {
            return Err(Error::Config(format!("ADADELTA epsilon {eps} must be positive")));
        }
        if l2 < 0.0 {
            return Err(Error::Config(format!("L2 penalty {l2} must be non-negative")));
        }
        Ok(Adadelta { rho, eps, l2 })
    }

    /// Updates every parameter from its accumulated gradient, then clears
    /// the gradients.
    pub fn step<R: Real>(&self, store: &mut ParamStore<R>) -> Result<()> {
        let rho = R::c(self.rho);
        let one_minus = R::c(1.0 - self.rho);
        let eps = R::c(self.eps);
        let l2 = R::c(self.l2);
        for p in store.iter_mut() {
            let n = p.value.len();
            if p.grad.len() != n || p.sq_grad.len() != n || p.sq_delta.len() != n {
                return Err(Error::Dimension {
                    context: "optimizer state",
                    expected: n,
                    actual: p.grad.len(),
                });
            }
            let x = p.value.data_mut();
            let g = p.grad.data_mut();
            let eg = p.sq_grad.data_mut();
            let ed = p.sq_delta.data_mut();
            for k in 0..n {
                let gk = g[k] + l2 * x[k];
                eg[k] = rho * eg[k] + one_minus * gk * gk;
                let delta = -((ed[k] + eps).sqrt() / (eg[k] + eps).sqrt()) * gk;
                ed[k] = rho * ed[k] + one_minus * delta * delta;
                x[k] += delta;
                g[k] = R::zero();
            }
            debug_assert!(p.value.is_finite(), "non-finite value in {}", p.name);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::tensor::Tensor;

    fn scalar_store(x: f64) -> ParamStore<f64> {
        let mut s = ParamStore::new();
        s.add("x", Tensor::from_vec(&[1], vec![x]).unwrap()).unwrap();
        s
    }

    #[test]
    fn zero_gradient_only_decays_state() {
        let mut s = scalar_store(1.5);
        let id = s.id("x").unwrap();
        s.param_mut(id).sq_grad.fill(0.4);
        s.param_mut(id).sq_delta.fill(0.2);
        Adadelta::default().step(&mut s).unwrap();
        let p = s.param(id);
        assert_eq!(p.value.data()[0], 1.5);
        assert!((p.sq_grad.data()[0] - 0.99 * 0.4).abs() < 1e-15);
        assert!((p.sq_delta.data()[0] - 0.99 * 0.2).abs() < 1e-15);
    }

    #[test]
    fn l2_adds_scaled_value() {
        // with g = 0 and l2 = λ the effective gradient is λx
        let mut a = scalar_store(2.0);
        let mut b = scalar_store(2.0);
        let id = b.id("x").unwrap();
        Adadelta::new(0.99, 1e-7, 1e-8).unwrap().step(&mut a).unwrap();
        b.grad_mut(id).fill(2e-8);
        Adadelta::new(0.99, 1e-7, 0.0).unwrap().step(&mut b).unwrap();
        assert_eq!(a.value(id).data(), b.value(id).data());
        assert!(a.value(id).data()[0] < 2.0);
    }

    #[test]
    fn invalid_hyperparameters() {
        assert!(Adadelta::new(1.0, 1e-7, 0.0).is_err());
        assert!(Adadelta::new(0.9, 0.0, 0.0).is_err());
        assert!(Adadelta::new(0.9, 1e-6, -1.0).is_err());
    }
}
