use rand::Rng;

use super::tensor::Real;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Inverted dropout: survivors are scaled by `1 / (1 - p)` so the
/// expectation of every component is unchanged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dropout {
    p: f64,
}

impl Dropout {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Config(format!("dropout probability {p} outside [0, 1)")));
        }
        Ok(Dropout { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// A multiplicative mask, or `None` when dropout is a no-op.
    pub fn mask<R: Real, G: Rng + ?Sized>(&self, len: usize, rng: &mut G) -> Option<Vec<R>> {
        if self.p == 0.0 {
            return None;
        }
        let keep = R::c(1.0 / (1.0 - self.p));
        Some(
            (0..len)
                .map(|_| if rng.gen::<f64>() < self.p { R::zero() } else { keep })
                .collect(),
        )
    }
}

pub fn apply_mask<R: Real>(x: &mut [R], mask: Option<&[R]>) {
    if let Some(m) = mask {
        for (v, &k) in x.iter_mut().zip(m) {
            *v *= k;
        }
    }
}

pub fn dropout<R: Real, G: Rng + ?Sized>(x: &[R], p: f64, mode: Mode, rng: &mut G) -> Result<Vec<R>> {
    let d = Dropout::new(p)?;
    let mut out = x.to_vec();
    if mode == Mode::Train {
        apply_mask(&mut out, d.mask(x.len(), rng).as_deref());
    }
    Ok(out)
}
