//! Projective measurement of memory registers and mixed-state ensembles.
//!
//! Registers are 1-based: index `i` names slot `c_i` at measurement time, so
//! after a walk has run, registers `1..=k` hold the coin values of the last
//! `k` steps (most recent first).

use std::collections::BTreeMap;

use crate::analysis::{site_weights, Distribution};
use crate::error::{Result, WalkError};
use crate::scalar::Real;
use crate::state::{CoinValue, StateVector, NORM_TOLERANCE};

/// Probability below which an outcome is treated as impossible.
pub const IMPOSSIBLE_BELOW: f64 = 1e-24;

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome<T: Real> {
    pub registers: Vec<usize>,
    pub outcomes: Vec<CoinValue>,
    pub probability: T,
    pub conditional_state: StateVector<T>,
}

/// Pure-state decomposition `sum_k w_k |psi_k><psi_k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedEnsemble<T: Real> {
    branches: Vec<(T, StateVector<T>)>,
}

impl<T: Real> MixedEnsemble<T> {
    pub fn new(branches: Vec<(T, StateVector<T>)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(WalkError::Domain("ensemble has no branches".into()));
        }
        if let Some((w, _)) = branches.iter().find(|(w, _)| !(*w >= T::zero())) {
            return Err(WalkError::Domain(format!("negative branch weight {w}")));
        }
        for (_, s) in &branches[1..] {
            branches[0].1.check_compatible(s)?;
        }
        let total: T = branches.iter().map(|(w, _)| *w).sum();
        if (total.as_f64() - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::Domain(format!("branch weights sum to {total}")));
        }
        Ok(Self { branches })
    }

    pub fn pure(state: StateVector<T>) -> Self {
        Self { branches: vec![(T::one(), state)] }
    }

    pub fn branches(&self) -> &[(T, StateVector<T>)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }
}

/// Anything with a position marginal.
pub trait PositionMarginal<T: Real> {
    fn position_distribution(&self) -> Distribution<T>;
}

impl<T: Real> PositionMarginal<T> for StateVector<T> {
    fn position_distribution(&self) -> Distribution<T> {
        let mut w = BTreeMap::new();
        site_weights(self, T::one(), &mut w);
        Distribution::from_site_weights(self.dims(), &w)
    }
}

impl<T: Real> PositionMarginal<T> for MixedEnsemble<T> {
    fn position_distribution(&self) -> Distribution<T> {
        let mut w = BTreeMap::new();
        for (weight, state) in &self.branches {
            site_weights(state, *weight, &mut w);
        }
        Distribution::from_site_weights(self.branches[0].1.dims(), &w)
    }
}

/// `p(x) = sum over memory of |a|^2`, weight-averaged over ensemble branches.
pub fn position_distribution<T: Real, S: PositionMarginal<T>>(s: &S) -> Distribution<T> {
    s.position_distribution()
}

fn check_registers<T: Real>(s: &StateVector<T>, registers: &[usize]) -> Result<()> {
    let n = s.memory_len();
    for (i, &r) in registers.iter().enumerate() {
        if r == 0 || r > n {
            return Err(WalkError::Domain(format!("register {r} outside 1..={n}")));
        }
        if registers[..i].contains(&r) {
            return Err(WalkError::Domain(format!("register {r} listed twice")));
        }
    }
    Ok(())
}

/// Projects onto kets whose measured registers satisfy `accept` and
/// renormalizes. Returns the projection probability with the conditional state.
pub fn project_memory<T: Real>(
    s: &StateVector<T>,
    registers: &[usize],
    mut accept: impl FnMut(&[CoinValue]) -> bool,
) -> Result<(T, StateVector<T>)> {
    check_registers(s, registers)?;
    let mut kept = BTreeMap::new();
    let mut probability = T::zero();
    let mut read = Vec::with_capacity(registers.len());
    for (ket, a) in s.iter() {
        read.clear();
        read.extend(registers.iter().map(|&r| ket.memory[r - 1]));
        if accept(&read) {
            probability += a.norm_sqr();
            kept.insert(ket.clone(), *a);
        }
    }
    if !(probability.as_f64() > IMPOSSIBLE_BELOW) {
        return Err(WalkError::ImpossibleOutcome { probability: probability.as_f64() });
    }
    let scale = T::one() / probability.sqrt();
    for a in kept.values_mut() {
        *a *= scale;
    }
    Ok((probability, s.with_entries(kept)?))
}

/// Projective measurement of `registers` post-selected on `outcomes`.
pub fn measure_memory<T: Real>(
    s: &StateVector<T>,
    registers: &[usize],
    outcomes: &[CoinValue],
) -> Result<MeasurementOutcome<T>> {
    if registers.len() != outcomes.len() {
        return Err(WalkError::Dimension(format!(
            "{} registers but {} outcomes",
            registers.len(),
            outcomes.len()
        )));
    }
    if let Some(c) = outcomes.iter().find(|c| c.dims() != s.dims()) {
        return Err(WalkError::Dimension(format!("outcome {c} does not match the walk")));
    }
    let (probability, conditional_state) = project_memory(s, registers, |read| read == outcomes)?;
    Ok(MeasurementOutcome {
        registers: registers.to_vec(),
        outcomes: outcomes.to_vec(),
        probability,
        conditional_state,
    })
}

/// Every outcome tuple of `registers`, in lexicographic order (`+1` first),
/// with its probability; impossible tuples are included with probability 0
/// and no state.
pub fn outcome_table<T: Real>(
    s: &StateVector<T>,
    registers: &[usize],
) -> Result<Vec<(Vec<CoinValue>, T, Option<StateVector<T>>)>> {
    check_registers(s, registers)?;
    let mut groups: BTreeMap<Vec<CoinValue>, BTreeMap<_, _>> = BTreeMap::new();
    for (ket, a) in s.iter() {
        let read: Vec<CoinValue> = registers.iter().map(|&r| ket.memory[r - 1]).collect();
        groups.entry(read).or_default().insert(ket.clone(), *a);
    }
    let basis: Vec<CoinValue> = CoinValue::basis(s.dims()).collect();
    cartesian_power(&basis, registers.len())
        .into_iter()
        .map(|tuple| {
            let Some(mut kept) = groups.remove(&tuple) else {
                return Ok((tuple, T::zero(), None));
            };
            let probability: T = kept.values().map(|a: &num_complex::Complex<T>| a.norm_sqr()).sum();
            if !(probability.as_f64() > IMPOSSIBLE_BELOW) {
                return Ok((tuple, T::zero(), None));
            }
            let scale = T::one() / probability.sqrt();
            for a in kept.values_mut() {
                *a *= scale;
            }
            Ok((tuple, probability, Some(s.with_entries(kept)?)))
        })
        .collect()
}

/// Measurement by an environment that does not report the result: the
/// mixture over all outcome tuples with non-zero probability.
pub fn measure_all_branches<T: Real>(s: &StateVector<T>, registers: &[usize]) -> Result<MixedEnsemble<T>> {
    let branches = outcome_table(s, registers)?
        .into_iter()
        .filter_map(|(_, p, state)| state.map(|st| (p, st)))
        .collect();
    MixedEnsemble::new(branches)
}

/// `items^k` in lexicographic order.
fn cartesian_power<C: Copy>(items: &[C], k: usize) -> Vec<Vec<C>> {
    let mut out = vec![Vec::with_capacity(k)];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out
}
