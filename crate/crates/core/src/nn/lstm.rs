//! LSTM without peephole connections, with exact backpropagation through
//! time.
//!
//! Gates are stacked in one `4H x (I + H)` matrix in the order input,
//! forget, output, candidate:
//!
//! ```text
//! i, f, o = σ(W[x; h_prev] + b)    g = tanh(W[x; h_prev] + b)
//! c = f ⊙ c_prev + i ⊙ g           h = o ⊙ tanh(c)
//! ```

use rand::Rng;

use super::params::{xavier, ParamId, ParamStore};
use super::tensor::{add_assign, matvec, matvec_t_acc, outer_acc, sigmoid, Real, Tensor};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LstmLayer {
    pub input: usize,
    pub hidden: usize,
    pub weights: ParamId,
    pub bias: ParamId,
}

/// Values kept from one forward step for the backward pass.
#[derive(Clone, Debug)]
pub struct StepCache<R> {
    /// `[x; h_prev]`
    z: Vec<R>,
    /// Post-activation gates `[i; f; o; g]`.
    gates: Vec<R>,
    c_prev: Vec<R>,
    tanh_c: Vec<R>,
}

/// Forward results over a sequence, kept in sentence order.
#[derive(Clone, Debug)]
pub struct SeqCache<R> {
    pub outputs: Vec<Vec<R>>,
    steps: Vec<StepCache<R>>,
    reverse: bool,
}

impl LstmLayer {
    /// Registers `{name}.w` and `{name}.b`. The forget-gate bias starts at 1.
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        name: &str,
        input: usize,
        hidden: usize,
    ) -> Result<Self> {
        let weights = store.add(format!("{name}.w"), xavier(rng, 4 * hidden, input + hidden))?;
        let mut b = Tensor::zeros(&[4 * hidden]);
        b.data_mut()[hidden..2 * hidden].iter_mut().for_each(|x| *x = R::one());
        let bias = store.add(format!("{name}.b"), b)?;
        Ok(LstmLayer {
            input,
            hidden,
            weights,
            bias,
        })
    }

    pub fn step<R: Real>(
        &self,
        store: &ParamStore<R>,
        x: &[R],
        h_prev: &[R],
        c_prev: &[R],
    ) -> Result<(Vec<R>, Vec<R>, StepCache<R>)> {
        let hd = self.hidden;
        if x.len() != self.input {
            return Err(Error::Dimension {
                context: "lstm input",
                expected: self.input,
                actual: x.len(),
            });
        }
        if h_prev.len() != hd || c_prev.len() != hd {
            return Err(Error::Dimension {
                context: "lstm state",
                expected: hd,
                actual: h_prev.len().max(c_prev.len()),
            });
        }
        let mut z = Vec::with_capacity(self.input + hd);
        z.extend_from_slice(x);
        z.extend_from_slice(h_prev);
        let mut gates = store.value(self.bias).data().to_vec();
        let mut pre = vec![R::zero(); 4 * hd];
        matvec(store.value(self.weights).data(), self.input + hd, &z, &mut pre);
        add_assign(&mut gates, &pre);
        for v in &mut gates[..3 * hd] {
            *v = sigmoid(*v);
        }
        for v in &mut gates[3 * hd..] {
            *v = v.tanh();
        }
        let mut c = vec![R::zero(); hd];
        let mut h = vec![R::zero(); hd];
        let mut tanh_c = vec![R::zero(); hd];
        for k in 0..hd {
            let (i, f, o, g) = (gates[k], gates[hd + k], gates[2 * hd + k], gates[3 * hd + k]);
            c[k] = f * c_prev[k] + i * g;
            tanh_c[k] = c[k].tanh();
            h[k] = o * tanh_c[k];
        }
        let cache = StepCache {
            z,
            gates,
            c_prev: c_prev.to_vec(),
            tanh_c,
        };
        Ok((h, c, cache))
    }

    /// Backward through one step given gradients on `h` and `c`. Returns
    /// gradients on `x`, `h_prev` and `c_prev`.
    pub fn step_backward<R: Real>(
        &self,
        store: &mut ParamStore<R>,
        cache: &StepCache<R>,
        dh: &[R],
        dc: &[R],
    ) -> (Vec<R>, Vec<R>, Vec<R>) {
        let hd = self.hidden;
        let g = &cache.gates;
        let mut da = vec![R::zero(); 4 * hd];
        let mut dc_prev = vec![R::zero(); hd];
        for k in 0..hd {
            let (i, f, o, gg) = (g[k], g[hd + k], g[2 * hd + k], g[3 * hd + k]);
            let tc = cache.tanh_c[k];
            let d_o = dh[k] * tc;
            let d_c = dc[k] + dh[k] * o * (R::one() - tc * tc);
            let d_i = d_c * gg;
            let d_f = d_c * cache.c_prev[k];
            let d_g = d_c * i;
            dc_prev[k] = d_c * f;
            da[k] = d_i * i * (R::one() - i);
            da[hd + k] = d_f * f * (R::one() - f);
            da[2 * hd + k] = d_o * o * (R::one() - o);
            da[3 * hd + k] = d_g * (R::one() - gg * gg);
        }
        let cols = self.input + hd;
        let mut dz = vec![R::zero(); cols];
        {
            let (w, dw) = store.value_and_grad(self.weights);
            matvec_t_acc(w.data(), cols, &da, &mut dz);
            outer_acc(dw.data_mut(), &da, &cache.z);
        }
        add_assign(store.grad_mut(self.bias).data_mut(), &da);
        let dh_prev = dz.split_off(self.input);
        (dz, dh_prev, dc_prev)
    }

    /// Runs over `xs` from zero state, right to left when `reverse`.
    pub fn forward_seq<R: Real>(&self, store: &ParamStore<R>, xs: &[Vec<R>], reverse: bool) -> Result<SeqCache<R>> {
        let n = xs.len();
        let mut h = vec![R::zero(); self.hidden];
        let mut c = vec![R::zero(); self.hidden];
        let mut outputs = vec![Vec::new(); n];
        let mut steps = Vec::with_capacity(n);
        for t in 0..n {
            let pos = if reverse { n - 1 - t } else { t };
            let (h2, c2, cache) = self.step(store, &xs[pos], &h, &c)?;
            outputs[pos] = h2.clone();
            steps.push(cache);
            h = h2;
            c = c2;
        }
        Ok(SeqCache {
            outputs,
            steps,
            reverse,
        })
    }

    /// Backpropagates output gradients `dhs` (sentence order) through the
    /// whole sequence. Returns input gradients in sentence order.
    pub fn backward_seq<R: Real>(&self, store: &mut ParamStore<R>, cache: &SeqCache<R>, dhs: &[Vec<R>]) -> Vec<Vec<R>> {
        let n = cache.steps.len();
        let mut dxs = vec![Vec::new(); n];
        let mut dh_next = vec![R::zero(); self.hidden];
        let mut dc_next = vec![R::zero(); self.hidden];
        for t in (0..n).rev() {
            let pos = if cache.reverse { n - 1 - t } else { t };
            let mut dh = dhs[pos].clone();
            add_assign(&mut dh, &dh_next);
            let (dx, dh_prev, dc_prev) = self.step_backward(store, &cache.steps[t], &dh, &dc_next);
            dxs[pos] = dx;
            dh_next = dh_prev;
            dc_next = dc_prev;
        }
        dxs
    }
}
