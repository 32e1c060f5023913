use std::collections::HashMap;

use rand::Rng;

use super::tensor::{Real, Tensor};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A trainable tensor with its gradient accumulator and ADADELTA state.
#[derive(Clone, Debug, PartialEq)]
pub struct Param<R> {
    pub name: String,
    pub value: Tensor<R>,
    pub grad: Tensor<R>,
    /// Running average of squared gradients.
    pub sq_grad: Tensor<R>,
    /// Running average of squared updates.
    pub sq_delta: Tensor<R>,
}

/// Named collection of parameters, kept in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore<R> {
    params: Vec<Param<R>>,
    index: HashMap<String, ParamId>,
}

impl<R: Real> ParamStore<R> {
    pub fn new() -> Self {
        ParamStore {
            params: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor<R>) -> Result<ParamId> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Config(format!("duplicate parameter name {name}")));
        }
        let id = ParamId(self.params.len());
        let zeros = Tensor::zeros(value.shape());
        self.params.push(Param {
            name: name.clone(),
            grad: zeros.clone(),
            sq_grad: zeros.clone(),
            sq_delta: zeros,
            value,
        });
        self.index.insert(name, id);
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn param(&self, id: ParamId) -> &Param<R> {
        &self.params[id.0]
    }

    pub fn param_mut(&mut self, id: ParamId) -> &mut Param<R> {
        &mut self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Tensor<R> {
        &self.params[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor<R> {
        &mut self.params[id.0].value
    }

    pub fn grad_mut(&mut self, id: ParamId) -> &mut Tensor<R> {
        &mut self.params[id.0].grad
    }

    /// Parameter value and gradient accumulator borrowed together.
    pub fn value_and_grad(&mut self, id: ParamId) -> (&Tensor<R>, &mut Tensor<R>) {
        let p = &mut self.params[id.0];
        (&p.value, &mut p.grad)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Param<R>)> {
        self.params.iter().enumerate().map(|(i, p)| (ParamId(i), p))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Param<R>> {
        self.params.iter_mut()
    }

    pub fn zero_grads(&mut self) {
        self.params.iter_mut().for_each(|p| p.grad.fill(R::zero()));
    }

    pub fn num_scalars(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    /// Copies values (not optimizer state) from a store with the same layout.
    pub fn copy_values_from(&mut self, other: &ParamStore<R>) -> Result<()> {
        if self.params.len() != other.params.len() {
            return Err(Error::Config("parameter stores differ in size".into()));
        }
        for (a, b) in self.params.iter_mut().zip(&other.params) {
            if a.name != b.name || a.value.shape() != b.value.shape() {
                return Err(Error::Config(format!("parameter {} differs in layout", a.name)));
            }
            a.value = b.value.clone();
        }
        Ok(())
    }
}

/// Uniform in `±sqrt(6 / (rows + cols))`.
pub fn xavier<R: Real, G: Rng + ?Sized>(rng: &mut G, rows: usize, cols: usize) -> Tensor<R> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    uniform(rng, &[rows, cols], bound)
}

pub fn uniform<R: Real, G: Rng + ?Sized>(rng: &mut G, shape: &[usize], bound: f64) -> Tensor<R> {
    let n = shape.iter().product();
    let data = (0..n).map(|_| R::c(rng.gen_range(-bound..=bound))).collect();
    Tensor::from_vec(shape, data).expect("shape matches")
}
