//! Quenched spatial disorder and seeded ensemble experiments.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{variance_series, VarianceSeries};
use crate::error::{Result, WalkError};
use crate::evolution::WalkSpec;
use crate::scalar::Real;
use crate::state::Site;

/// Position-dependent coupling `phi(x)` drawn uniformly from `[-1, 1]`.
///
/// A seeded field derives each value from `(seed, site)` alone, so values do
/// not depend on the order in which sites are first visited. Explicit values
/// take precedence over the seeded draw; a field without a seed is defined
/// only at its explicit sites.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomField<T> {
    seed: Option<u64>,
    values: BTreeMap<Site, T>,
}

impl<T: Real> RandomField<T> {
    pub fn seeded(seed: u64) -> Self {
        Self { seed: Some(seed), values: BTreeMap::new() }
    }

    /// Field fixed to the given values; never reseeded.
    pub fn fixed(values: BTreeMap<Site, T>) -> Self {
        Self { seed: None, values }
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Switches a seeded field to `seed`; fixed fields are unaffected.
    pub fn reseed(&mut self, seed: u64) {
        if self.seed.is_some() {
            self.seed = Some(seed);
        }
    }

    pub fn value(&self, site: Site) -> Result<T> {
        if let Some(v) = self.values.get(&site) {
            return Ok(*v);
        }
        match self.seed {
            Some(seed) => Ok(T::lit(draw(seed, site))),
            None => Err(WalkError::MissingField(site.to_string())),
        }
    }
}

pub fn make_field<T: Real>(seed: u64) -> RandomField<T> {
    RandomField::seeded(seed)
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn stream_id(site: Site) -> u64 {
    match site {
        Site::Line(x) => zigzag(x),
        Site::Plane(x, y) => (1 << 63) | (zigzag(x) & 0x7fff_ffff) << 32 | (zigzag(y) & 0xffff_ffff),
    }
}

fn draw(seed: u64, site: Site) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(site));
    rng.random_range(-1.0..=1.0)
}

/// Per-time mean and sample standard deviation of `sigma^2(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleResult<T> {
    pub realizations: usize,
    pub mean: Vec<T>,
    pub std: Vec<T>,
    pub seeds: Vec<u64>,
}

impl<T: Real> EnsembleResult<T> {
    /// Standard error of the mean at time `t`.
    pub fn standard_error(&self, t: usize) -> T {
        self.std[t] / T::lit(self.realizations as f64).sqrt()
    }

    pub fn series(&self) -> VarianceSeries<T> {
        VarianceSeries {
            times: (0..self.mean.len()).collect(),
            values: self.mean.clone(),
            std: Some(self.std.clone()),
        }
    }
}

/// Runs `realizations` disorder realizations of `spec`, the `r`-th with field
/// seed `base_seed + r`, and aggregates their variance series. Realizations
/// run in parallel; aggregation is in seed order.
pub fn run_ensemble<T: Real>(
    spec: &WalkSpec<T>,
    realizations: usize,
    base_seed: u64,
    horizon: usize,
) -> Result<EnsembleResult<T>> {
    if realizations < 2 {
        return Err(WalkError::Domain(format!(
            "an ensemble needs at least 2 realizations, got {realizations}"
        )));
    }
    let seeds: Vec<u64> = (0..realizations as u64).map(|r| base_seed.wrapping_add(r)).collect();
    let runs: Vec<VarianceSeries<T>> = seeds
        .par_iter()
        .map(|&seed| variance_series(&spec.with_field_seed(seed), horizon))
        .collect::<Result<_>>()?;

    let n = T::lit(realizations as f64);
    let len = horizon + 1;
    let mut mean = vec![T::zero(); len];
    let mut std = vec![T::zero(); len];
    for t in 0..len {
        let m = runs.iter().map(|r| r.values[t]).sum::<T>() / n;
        let ss: T = runs.iter().map(|r| (r.values[t] - m) * (r.values[t] - m)).sum();
        mean[t] = m;
        std[t] = (ss / (n - T::one())).sqrt();
    }
    Ok(EnsembleResult { realizations, mean, std, seeds })
}
