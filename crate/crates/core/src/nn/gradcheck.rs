//! Central finite-difference checks of analytic gradients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::ParamStore;
use super::tensor::Real;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckOptions {
    /// Perturbation `h` of the central difference.
    pub step: f64,
    /// Largest acceptable relative error.
    pub tolerance: f64,
    /// Total coordinates to sample; every tensor gets at least
    /// `min_per_param` of them.
    pub coordinates: usize,
    pub min_per_param: usize,
    /// Relative errors are `|a - n| / max(|a|, |n|, floor)`, so
    /// coordinates with tiny or zero gradients are judged absolutely.
    /// The floor is at least `denom_floor`.
    pub denom_floor: f64,
    /// Raises the floor to the round-off level of the central difference:
    /// `noise_margin * ε * max(|L|, 1) / (step * tolerance)`, with `ε` the
    /// machine epsilon and `L` the loss. An error the size of that noise
    /// then counts as `1 / noise_margin` of the tolerance. Zero disables it.
    pub noise_margin: f64,
    pub seed: u64,
    /// Adds this much to the analytic gradient of the first sampled
    /// coordinate of the named parameter. Used to demonstrate that faults
    /// are caught.
    pub corrupt: Option<(String, f64)>,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        GradCheckOptions {
            step: 1e-5,
            tolerance: 1e-4,
            coordinates: 500,
            min_per_param: 2,
            denom_floor: 1e-8,
            noise_margin: 10.0,
            seed: 0,
            corrupt: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordCheck {
    pub param: String,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
    /// The two one-sided differences disagree and the analytic value
    /// matches one of them: a ReLU boundary lies within the step, and
    /// `rel_error` is measured against the matching side.
    pub kink: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSummary {
    pub name: String,
    pub checked: usize,
    pub max_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub tolerance: f64,
    /// Denominator floor actually used.
    pub floor: f64,
    pub checked: usize,
    pub max_rel_error: f64,
    pub worst: Option<CoordCheck>,
    /// Coordinates judged by a one-sided difference.
    pub kinks: usize,
    /// Every coordinate above tolerance.
    pub failures: Vec<CoordCheck>,
    pub per_param: Vec<ParamSummary>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for GradCheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "checked={} kinks={} max_rel_error={:.3e} tolerance={:.1e} floor={:.1e} status={}",
            self.checked,
            self.kinks,
            self.max_rel_error,
            self.tolerance,
            self.floor,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for p in &self.per_param {
            writeln!(
                f,
                "param={} checked={} max_rel_error={:.3e}",
                p.name, p.checked, p.max_rel_error
            )?;
        }
        for c in &self.failures {
            writeln!(
                f,
                "failure param={} index={} analytic={:.6e} numeric={:.6e} rel_error={:.3e}",
                c.param, c.index, c.analytic, c.numeric, c.rel_error
            )?;
        }
        Ok(())
    }
}

pub fn rel_error(a: f64, n: f64, floor: f64) -> f64 {
    let d = a.abs().max(n.abs()).max(floor);
    if d == 0.0 {
        0.0
    } else {
        (a - n).abs() / d
    }
}

/// Compares analytic gradients with central differences.
///
/// `loss_and_grad` must compute the loss and accumulate its gradient into
/// the (zeroed) store; `loss` computes the same loss without gradients.
/// Both must be deterministic functions of the parameter values.
pub fn grad_check<R, L, G>(
    store: &mut ParamStore<R>,
    mut loss: L,
    mut loss_and_grad: G,
    opts: &GradCheckOptions,
) -> Result<GradCheckReport>
where
    R: Real,
    L: FnMut(&ParamStore<R>) -> Result<R>,
    G: FnMut(&mut ParamStore<R>) -> Result<R>,
{
    if store.is_empty() {
        return Err(Error::Config("gradient check on an empty parameter store".into()));
    }
    store.zero_grads();
    let base = loss_and_grad(store)?.f64();
    let eps = R::epsilon().f64();
    let floor = opts
        .denom_floor
        .max(opts.noise_margin * eps * base.abs().max(1.0) / (opts.step * opts.tolerance));
    let analytic: Vec<Vec<f64>> = store
        .iter()
        .map(|(_, p)| p.grad.data().iter().map(|g| g.f64()).collect())
        .collect();
    store.zero_grads();

    let total = store.num_scalars().max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let plan: Vec<(usize, Vec<usize>)> = store
        .iter()
        .map(|(id, p)| {
            let len = p.value.len();
            let share = (opts.coordinates * len).div_ceil(total);
            let k = share.max(opts.min_per_param).min(len);
            // half the sample comes from coordinates the loss actually touches
            let grads = &analytic[id.index()];
            let mut live: Vec<usize> = (0..len).filter(|&i| grads[i] != 0.0).collect();
            let mut all: Vec<usize> = (0..len).collect();
            live.shuffle(&mut rng);
            all.shuffle(&mut rng);
            let mut picked: Vec<usize> = live.into_iter().take(k.div_ceil(2)).collect();
            for i in all {
                if picked.len() >= k {
                    break;
                }
                if !picked.contains(&i) {
                    picked.push(i);
                }
            }
            (id.index(), picked)
        })
        .collect();

    let center = loss(store)?.f64();
    let ids: Vec<_> = store.iter().map(|(id, _)| id).collect();
    let h = R::c(opts.step);
    let mut checks = Vec::new();
    let mut per_param = Vec::new();
    for (pi, coords) in plan {
        let id = ids[pi];
        let name = store.param(id).name.clone();
        let mut max_rel: f64 = 0.0;
        for (k, &i) in coords.iter().enumerate() {
            let orig = store.value(id).data()[i];
            store.value_mut(id).data_mut()[i] = orig + h;
            let plus = loss(store)?;
            store.value_mut(id).data_mut()[i] = orig - h;
            let minus = loss(store)?;
            store.value_mut(id).data_mut()[i] = orig;
            let numeric = (plus.f64() - minus.f64()) / (2.0 * opts.step);
            let mut a = analytic[pi][i];
            if k == 0 {
                if let Some((target, amount)) = &opts.corrupt {
                    if *target == name {
                        a += amount;
                    }
                }
            }
            let mut rel = rel_error(a, numeric, floor);
            let mut kink = false;
            if !(rel < opts.tolerance) {
                let right = (plus.f64() - center) / opts.step;
                let left = (center - minus.f64()) / opts.step;
                let side = rel_error(a, right, floor).min(rel_error(a, left, floor));
                if !(rel_error(right, left, floor) < opts.tolerance) && side < opts.tolerance {
                    rel = side;
                    kink = true;
                }
            }
            max_rel = max_rel.max(rel);
            checks.push(CoordCheck {
                param: name.clone(),
                index: i,
                analytic: a,
                numeric,
                rel_error: rel,
                kink,
            });
        }
        per_param.push(ParamSummary {
            name,
            checked: coords.len(),
            max_rel_error: max_rel,
        });
    }
    if let Some((target, _)) = &opts.corrupt {
        if store.id(target).is_none() {
            return Err(Error::Config(format!("no parameter named {target}")));
        }
    }

    let worst = checks
        .iter()
        .max_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
        .cloned();
    let failures: Vec<_> = checks
        .iter()
        .filter(|c| !(c.rel_error < opts.tolerance))
        .cloned()
        .collect();
    Ok(GradCheckReport {
        tolerance: opts.tolerance,
        floor,
        checked: checks.len(),
        max_rel_error: worst.as_ref().map_or(0.0, |w| w.rel_error),
        worst,
        kinks: checks.iter().filter(|c| c.kink).count(),
        failures,
        per_param,
    })
}
