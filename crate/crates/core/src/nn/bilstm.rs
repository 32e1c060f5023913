//! Stacked bidirectional LSTM encoder.
//!
//! Each layer runs a forward LSTM left to right and a backward LSTM right
//! to left over the same inputs. The position vector returned for word `i`
//! is the concatenation of every layer's output at `i`, so a two-layer
//! encoder yields `4H` components. Dropout on a layer's output uses one
//! mask for the copy entering the position vector and an independent mask
//! for the copy feeding the next layer.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::dropout::{apply_mask, Dropout};
use super::lstm::{LstmLayer, SeqCache};
use super::params::ParamStore;
use super::tensor::{add_assign, Real};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Directions {
    #[default]
    Both,
    ForwardOnly,
    BackwardOnly,
}

impl Directions {
    pub fn count(self) -> usize {
        match self {
            Directions::Both => 2,
            _ => 1,
        }
    }

    fn forward(self) -> bool {
        self != Directions::BackwardOnly
    }

    fn backward(self) -> bool {
        self != Directions::ForwardOnly
    }
}

impl std::str::FromStr for Directions {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Directions::Both),
            "forward-only" | "forward" => Ok(Directions::ForwardOnly),
            "backward-only" | "backward" => Ok(Directions::BackwardOnly),
            _ => Err(Error::Config(format!("unknown encoder directions {s:?}"))),
        }
    }
}

impl std::fmt::Display for Directions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Directions::Both => "both",
            Directions::ForwardOnly => "forward-only",
            Directions::BackwardOnly => "backward-only",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiLstmLayer {
    pub forward: Option<LstmLayer>,
    pub backward: Option<LstmLayer>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiLstm {
    pub input: usize,
    pub hidden: usize,
    pub directions: Directions,
    pub layers: Vec<BiLstmLayer>,
}

#[derive(Clone, Debug)]
struct LayerCache<R> {
    forward: Option<SeqCache<R>>,
    backward: Option<SeqCache<R>>,
    /// Per position, the mask on this layer's copy in the position vector.
    feature_masks: Vec<Option<Vec<R>>>,
    /// Per position, the mask on the copy feeding the next layer.
    next_masks: Vec<Option<Vec<R>>>,
}

#[derive(Clone, Debug)]
pub struct EncoderCache<R> {
    layers: Vec<LayerCache<R>>,
}

impl BiLstm {
    pub fn new<R: Real, G: Rng + ?Sized>(
        store: &mut ParamStore<R>,
        rng: &mut G,
        name: &str,
        input: usize,
        hidden: usize,
        layers: usize,
        directions: Directions,
    ) -> Result<Self> {
        if layers == 0 {
            return Err(Error::Config("encoder needs at least one layer".into()));
        }
        let mut out = Vec::with_capacity(layers);
        let mut width = input;
        for l in 0..layers {
            let forward = if directions.forward() {
                Some(LstmLayer::new(
                    store,
                    rng,
                    &format!("{name}.l{}.fwd", l + 1),
                    width,
                    hidden,
                )?)
            } else {
                None
            };
            let backward = if directions.backward() {
                Some(LstmLayer::new(
                    store,
                    rng,
                    &format!("{name}.l{}.bwd", l + 1),
                    width,
                    hidden,
                )?)
            } else {
                None
            };
            out.push(BiLstmLayer { forward, backward });
            width = hidden * directions.count();
        }
        Ok(BiLstm {
            input,
            hidden,
            directions,
            layers: out,
        })
    }

    /// Width of one layer's output.
    pub fn layer_width(&self) -> usize {
        self.hidden * self.directions.count()
    }

    /// Width of each position vector.
    pub fn output_width(&self) -> usize {
        self.layer_width() * self.layers.len()
    }

    /// Encodes a sentence. With `dropout`, masks are drawn from the given
    /// generator.
    pub fn forward<R: Real>(
        &self,
        store: &ParamStore<R>,
        xs: &[Vec<R>],
        mut dropout: Option<(Dropout, &mut dyn RngCore)>,
    ) -> Result<(Vec<Vec<R>>, EncoderCache<R>)> {
        if xs.is_empty() {
            return Err(Error::Config("cannot encode an empty sentence".into()));
        }
        let n = xs.len();
        let lw = self.layer_width();
        let mut outputs: Vec<Vec<R>> = vec![Vec::with_capacity(self.output_width()); n];
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut inputs: Vec<Vec<R>> = xs.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            let fwd = layer
                .forward
                .as_ref()
                .map(|f| f.forward_seq(store, &inputs, false))
                .transpose()?;
            let bwd = layer
                .backward
                .as_ref()
                .map(|b| b.forward_seq(store, &inputs, true))
                .transpose()?;
            let layer_out: Vec<Vec<R>> = (0..n)
                .map(|i| {
                    let mut v = Vec::with_capacity(lw);
                    if let Some(c) = &fwd {
                        v.extend_from_slice(&c.outputs[i]);
                    }
                    if let Some(c) = &bwd {
                        v.extend_from_slice(&c.outputs[i]);
                    }
                    v
                })
                .collect();
            let mut draw = || match &mut dropout {
                Some((d, rng)) => d.mask::<R, dyn RngCore>(lw, *rng),
                None => None,
            };
            let feature_masks: Vec<_> = (0..n).map(|_| draw()).collect();
            let last = l + 1 == self.layers.len();
            let next_masks: Vec<_> = if last {
                vec![None; n]
            } else {
                (0..n).map(|_| draw()).collect()
            };
            for i in 0..n {
                let start = outputs[i].len();
                outputs[i].extend_from_slice(&layer_out[i]);
                apply_mask(&mut outputs[i][start..], feature_masks[i].as_deref());
            }
            if !last {
                inputs = layer_out;
                for (x, m) in inputs.iter_mut().zip(&next_masks) {
                    apply_mask(x, m.as_deref());
                }
            }
            caches.push(LayerCache {
                forward: fwd,
                backward: bwd,
                feature_masks,
                next_masks,
            });
        }
        Ok((outputs, EncoderCache { layers: caches }))
    }

    /// Backpropagates gradients on the position vectors. Returns gradients
    /// on the input vectors.
    pub fn backward<R: Real>(
        &self,
        store: &mut ParamStore<R>,
        cache: &EncoderCache<R>,
        douts: &[Vec<R>],
    ) -> Vec<Vec<R>> {
        let n = douts.len();
        let lw = self.layer_width();
        let h = self.hidden;
        // gradient arriving at the (masked) input of the layer above
        let mut from_above: Option<Vec<Vec<R>>> = None;
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let lc = &cache.layers[l];
            let mut d_layer: Vec<Vec<R>> = (0..n)
                .map(|i| {
                    let mut g = douts[i][l * lw..(l + 1) * lw].to_vec();
                    apply_mask(&mut g, lc.feature_masks[i].as_deref());
                    if let Some(above) = &from_above {
                        let mut a = above[i].clone();
                        apply_mask(&mut a, lc.next_masks[i].as_deref());
                        add_assign(&mut g, &a);
                    }
                    g
                })
                .collect();
            let mut offset = 0;
            let mut dx: Option<Vec<Vec<R>>> = None;
            for (lstm, seq) in [(&layer.forward, &lc.forward), (&layer.backward, &lc.backward)] {
                let (Some(lstm), Some(seq)) = (lstm, seq) else { continue };
                let dh: Vec<Vec<R>> = d_layer.iter().map(|g| g[offset..offset + h].to_vec()).collect();
                let part = lstm.backward_seq(store, seq, &dh);
                match &mut dx {
                    None => dx = Some(part),
                    Some(acc) => acc.iter_mut().zip(&part).for_each(|(a, p)| add_assign(a, p)),
                }
                offset += h;
            }
            d_layer.clear();
            from_above = dx;
        }
        from_above.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inputs(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn widths() {
        let mut store = ParamStore::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = BiLstm::new(&mut store, &mut rng, "enc", 5, 4, 2, Directions::Both).unwrap();
        assert_eq!(e.output_width(), 16);
        let xs = inputs(&mut rng, 3, 5);
        let (out, _) = e.forward(&store, &xs, None).unwrap();
        assert!(out.iter().all(|v| v.len() == 16));
        let e1 = BiLstm::new(&mut store, &mut rng, "one", 5, 4, 1, Directions::ForwardOnly).unwrap();
        assert_eq!(e1.output_width(), 4);
    }

    #[test]
    fn empty_sentence_rejected() {
        let mut store = ParamStore::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = BiLstm::new(&mut store, &mut rng, "enc", 2, 2, 1, Directions::Both).unwrap();
        assert!(e.forward(&store, &[], None).is_err());
    }

    #[test]
    fn tied_weights_mirror_under_reversal() {
        let mut store = ParamStore::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = BiLstm::new(&mut store, &mut rng, "enc", 3, 4, 1, Directions::Both).unwrap();
        let (f, b) = (
            e.layers[0].forward.clone().unwrap(),
            e.layers[0].backward.clone().unwrap(),
        );
        *store.value_mut(b.weights) = store.value(f.weights).clone();
        *store.value_mut(b.bias) = store.value(f.bias).clone();
        let xs = inputs(&mut rng, 5, 3);
        let rev: Vec<_> = xs.iter().rev().cloned().collect();
        let (a, _) = e.forward(&store, &xs, None).unwrap();
        let (r, _) = e.forward(&store, &rev, None).unwrap();
        for i in 0..5 {
            assert_eq!(&a[i][..4], &r[4 - i][4..]);
            assert_eq!(&a[i][4..], &r[4 - i][..4]);
        }
    }

    #[test]
    fn single_token_sees_only_itself() {
        let mut store = ParamStore::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = BiLstm::new(&mut store, &mut rng, "enc", 3, 2, 2, Directions::Both).unwrap();
        let x = vec![vec![0.1, 0.2, 0.3]];
        let (a, _) = e.forward(&store, &x, None).unwrap();
        let (b, _) = e.forward(&store, &x, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1);
    }
}
