//! Memory functions: the map from stored coin history to the coin angle.

use std::collections::BTreeMap;

use crate::disorder::RandomField;
use crate::error::{Result, WalkError};
use crate::scalar::Real;
use crate::state::{CoinValue, Site};

#[derive(Clone, Debug, PartialEq)]
pub enum MemoryFunction<T> {
    /// Constant `pi/4`, independent of history.
    Trivial,
    /// `pi/4 + phi pi/4 s/(N-1)`.
    Linear { phi: T },
    /// `pi/4 + phi pi/4 |s|/(N-1)`.
    Absolute { phi: T },
    /// `pi/4 - phi pi/4 |s|/(N-1)`.
    NegativeAbsolute { phi: T },
    /// Linear rule with a quenched, position-dependent `phi(x)`.
    RandomField(RandomField<T>),
    /// Lookup table keyed by `(s, site)`.
    Custom(BTreeMap<(i64, Site), T>),
}

impl<T: Real> MemoryFunction<T> {
    /// Whether the function reads the history at all; everything but
    /// `Trivial` needs `N >= 2`.
    pub fn uses_history(&self) -> bool {
        !matches!(self, MemoryFunction::Trivial)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MemoryFunction::Trivial => "trivial",
            MemoryFunction::Linear { .. } => "linear",
            MemoryFunction::Absolute { .. } => "abs",
            MemoryFunction::NegativeAbsolute { .. } => "negabs",
            MemoryFunction::RandomField(_) => "random",
            MemoryFunction::Custom(_) => "custom",
        }
    }

    /// Coupling `phi(x)` for the linear-type variants.
    pub fn linear_phi(&self, site: Site) -> Result<Option<T>> {
        match self {
            MemoryFunction::Linear { phi } => Ok(Some(*phi)),
            MemoryFunction::RandomField(field) => field.value(site).map(Some),
            _ => Ok(None),
        }
    }
}

/// Sum of the remembered history `c_1 + ... + c_{N-1}`; `c_N` is excluded.
/// Only defined for 1D coin values.
pub fn history_sum(memory: &[CoinValue]) -> Result<i64> {
    let (_, history) = memory.split_last().ok_or_else(|| WalkError::InvalidSpec("empty memory".into()))?;
    history
        .iter()
        .map(|c| match c {
            CoinValue::Line(s) => Ok(s.value()),
            CoinValue::Plane(..) => {
                Err(WalkError::Dimension("memory functions are defined for 1D walks only".into()))
            }
        })
        .sum()
}

/// Coin angle for the given history and position.
pub fn memory_angle<T: Real>(memory: &[CoinValue], site: Site, f: &MemoryFunction<T>) -> Result<T> {
    let quarter = T::FRAC_PI_4();
    if !f.uses_history() {
        return Ok(quarter);
    }
    let n = memory.len();
    if n < 2 {
        return Err(WalkError::InvalidSpec(format!(
            "memory function '{}' needs N >= 2, got N = {n}",
            f.name()
        )));
    }
    let s = history_sum(memory)?;
    let frac = T::lit(s as f64) / T::lit((n - 1) as f64);
    let theta = match f {
        MemoryFunction::Trivial => quarter,
        MemoryFunction::Linear { phi } => quarter + *phi * quarter * frac,
        MemoryFunction::Absolute { phi } => quarter + *phi * quarter * frac.abs(),
        MemoryFunction::NegativeAbsolute { phi } => quarter - *phi * quarter * frac.abs(),
        MemoryFunction::RandomField(field) => quarter + field.value(site)? * quarter * frac,
        MemoryFunction::Custom(table) => *table.get(&(s, site)).ok_or_else(|| {
            WalkError::MissingField(format!("custom table has no entry for sum {s} at {site}"))
        })?,
    };
    if !theta.is_finite() {
        return Err(WalkError::Domain(format!("memory angle is not finite at {site}")));
    }
    Ok(theta)
}
