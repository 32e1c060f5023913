use rand::Rng;

use super::params::{uniform, ParamId, ParamStore};
use super::tensor::{add_assign, Real};
use crate::error::Result;

/// Bound of the uniform initialization of embedding tables.
pub const EMBEDDING_INIT: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rows: usize,
    pub dim: usize,
    pub table: ParamId,
}

impl Embedding {
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        name: &str,
        rows: usize,
        dim: usize,
    ) -> Result<Self> {
        let table = store.add(name, uniform(rng, &[rows, dim], EMBEDDING_INIT))?;
        Ok(Embedding { rows, dim, table })
    }

    pub fn lookup<'a, R: Real>(&self, store: &'a ParamStore<R>, id: usize) -> &'a [R] {
        store.value(self.table).row(id)
    }

    pub fn backward<R: Real>(&self, store: &mut ParamStore<R>, id: usize, grad: &[R]) {
        add_assign(store.grad_mut(self.table).row_mut(id), grad);
    }
}
