use rand::Rng;

use super::params::{xavier, ParamId, ParamStore};
use super::tensor::{add_assign, matvec, matvec_t_acc, outer_acc, Real, Tensor};
use crate::error::{Error, Result};

/// Affine map `y = W x + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linear {
    pub input: usize,
    pub output: usize,
    pub weights: ParamId,
    pub bias: ParamId,
}

impl Linear {
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        name: &str,
        input: usize,
        output: usize,
    ) -> Result<Self> {
        Ok(Linear {
            input,
            output,
            weights: store.add(format!("{name}.w"), xavier(rng, output, input))?,
            bias: store.add(format!("{name}.b"), Tensor::zeros(&[output]))?,
        })
    }

    pub fn forward<R: Real>(&self, store: &ParamStore<R>, x: &[R]) -> Result<Vec<R>> {
        if x.len() != self.input {
            return Err(Error::Dimension {
                context: "linear input",
                expected: self.input,
                actual: x.len(),
            });
        }
        let mut y = vec![R::zero(); self.output];
        matvec(store.value(self.weights).data(), self.input, x, &mut y);
        add_assign(&mut y, store.value(self.bias).data());
        Ok(y)
    }

    /// Accumulates parameter gradients and returns the input gradient.
    pub fn backward<R: Real>(&self, store: &mut ParamStore<R>, x: &[R], dy: &[R]) -> Vec<R> {
        let mut dx = vec![R::zero(); self.input];
        {
            let (w, dw) = store.value_and_grad(self.weights);
            matvec_t_acc(w.data(), self.input, dy, &mut dx);
            outer_acc(dw.data_mut(), dy, x);
        }
        add_assign(store.grad_mut(self.bias).data_mut(), dy);
        dx
    }
}

/// One ReLU hidden layer followed by a linear scorer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReluMlp {
    pub hidden: Linear,
    pub output: Linear,
}

#[derive(Clone, Debug)]
pub struct MlpCache<R> {
    input: Vec<R>,
    activation: Vec<R>,
}

impl ReluMlp {
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        name: &str,
        input: usize,
        hidden: usize,
        output: usize,
    ) -> Result<Self> {
        Ok(ReluMlp {
            hidden: Linear::new(store, rng, &format!("{name}.hidden"), input, hidden)?,
            output: Linear::new(store, rng, &format!("{name}.out"), hidden, output)?,
        })
    }

    pub fn forward<R: Real>(&self, store: &ParamStore<R>, x: &[R]) -> Result<(Vec<R>, MlpCache<R>)> {
        let mut a = self.hidden.forward(store, x)?;
        a.iter_mut().for_each(|v| *v = v.max(R::zero()));
        let scores = self.output.forward(store, &a)?;
        Ok((
            scores,
            MlpCache {
                input: x.to_vec(),
                activation: a,
            },
        ))
    }

    pub fn backward<R: Real>(&self, store: &mut ParamStore<R>, cache: &MlpCache<R>, dscores: &[R]) -> Vec<R> {
        let mut da = self.output.backward(store, &cache.activation, dscores);
        for (g, &a) in da.iter_mut().zip(&cache.activation) {
            if a <= R::zero() {
                *g = R::zero();
            }
        }
        self.hidden.backward(store, &cache.input, &da)
    }
}
