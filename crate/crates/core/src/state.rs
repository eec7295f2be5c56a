//! Basis states, sparse state vectors and canonical input states.
//!
//! A walker with `N` memory registers lives in the span of kets
//! `|site, c_1, ..., c_N>`, where `c_1` holds the most recent coin value and
//! `c_N` is the register the next coin operation rewrites. Only occupied
//! kets are stored; every other amplitude is implicitly zero.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Result, WalkError};
use crate::scalar::Real;

/// Tolerance on `sum |a|^2 = 1` for any state handed to or returned by the crate.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest fraction of probability that [`StateVector::prune`] may discard.
pub const PRUNE_LOSS_LIMIT: f64 = 1e-9;

/// Spatial dimensionality of a walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dims {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Dims {
    pub fn from_count(count: u8) -> Result<Self> {
        match count {
            1 => Ok(Dims::One),
            2 => Ok(Dims::Two),
            other => Err(WalkError::InvalidSpec(format!("dims must be 1 or 2, got {other}"))),
        }
    }

    pub fn count(self) -> usize {
        match self {
            Dims::One => 1,
            Dims::Two => 2,
        }
    }

    /// Number of distinct coin values, `|c|`.
    pub fn coin_dim(self) -> usize {
        match self {
            Dims::One => 2,
            Dims::Two => 4,
        }
    }
}

/// One coin component. `Plus` sorts first, so `+1` precedes `-1` in every
/// ordering derived from coin values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(value: i64) -> Option<Self> {
        match value {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Row/column index in a 2x2 coin matrix.
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Value of a single memory register: a sign in 1D, a sign pair in 2D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoinValue {
    Line(Sign),
    Plane(Sign, Sign),
}

impl CoinValue {
    pub const PLUS: CoinValue = CoinValue::Line(Sign::Plus);
    pub const MINUS: CoinValue = CoinValue::Line(Sign::Minus);

    pub fn dims(self) -> Dims {
        match self {
            CoinValue::Line(_) => Dims::One,
            CoinValue::Plane(..) => Dims::Two,
        }
    }

    /// Index in the coin basis. 2D order is `(+,+), (+,-), (-,+), (-,-)`,
    /// which makes `A (x) B` the literal Kronecker product on `(cx, cy)`.
    pub fn index(self) -> usize {
        match self {
            CoinValue::Line(s) => s.index(),
            CoinValue::Plane(x, y) => 2 * x.index() + y.index(),
        }
    }

    pub fn from_index(dims: Dims, index: usize) -> Self {
        match dims {
            Dims::One => CoinValue::Line(Sign::from_index(index)),
            Dims::Two => CoinValue::Plane(Sign::from_index(index / 2), Sign::from_index(index % 2)),
        }
    }

    /// All basis coin values of the given dimensionality in index order.
    pub fn basis(dims: Dims) -> impl Iterator<Item = CoinValue> {
        (0..dims.coin_dim()).map(move |i| CoinValue::from_index(dims, i))
    }

    /// Value with every component set to `sign`.
    pub fn uniform(dims: Dims, sign: Sign) -> Self {
        match dims {
            Dims::One => CoinValue::Line(sign),
            Dims::Two => CoinValue::Plane(sign, sign),
        }
    }

    /// Displacement this coin value produces under the step operator.
    pub fn shift(self) -> (i64, i64) {
        match self {
            CoinValue::Line(s) => (s.value(), 0),
            CoinValue::Plane(x, y) => (x.value(), y.value()),
        }
    }
}

impl fmt::Display for CoinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinValue::Line(s) => write!(f, "{:+}", s.value()),
            CoinValue::Plane(x, y) => write!(f, "({:+},{:+})", x.value(), y.value()),
        }
    }
}

/// Lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    Line(i64),
    Plane(i64, i64),
}

impl Site {
    pub fn origin(dims: Dims) -> Self {
        match dims {
            Dims::One => Site::Line(0),
            Dims::Two => Site::Plane(0, 0),
        }
    }

    pub fn dims(self) -> Dims {
        match self {
            Site::Line(_) => Dims::One,
            Site::Plane(..) => Dims::Two,
        }
    }

    pub fn coords(self) -> (i64, i64) {
        match self {
            Site::Line(x) => (x, 0),
            Site::Plane(x, y) => (x, y),
        }
    }

    /// Site displaced by `direction * shift(coin)`.
    pub fn shifted(self, coin: CoinValue, direction: i64) -> Self {
        let (dx, dy) = coin.shift();
        match self {
            Site::Line(x) => Site::Line(x + direction * dx),
            Site::Plane(x, y) => Site::Plane(x + direction * dx, y + direction * dy),
        }
    }

    /// Reduces every coordinate into `0..period`.
    pub fn wrapped(self, period: i64) -> Self {
        match self {
            Site::Line(x) => Site::Line(x.rem_euclid(period)),
            Site::Plane(x, y) => Site::Plane(x.rem_euclid(period), y.rem_euclid(period)),
        }
    }

    /// Max-norm distance from the origin.
    pub fn radius(self) -> i64 {
        let (x, y) = self.coords();
        x.abs().max(y.abs())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Line(x) => write!(f, "{x}"),
            Site::Plane(x, y) => write!(f, "({x},{y})"),
        }
    }
}

/// Memory register contents `(c_1, ..., c_N)`.
pub type Memory = SmallVec<[CoinValue; 12]>;

/// A ket `|site, c_1, ..., c_N>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub site: Site,
    pub memory: Memory,
}

impl BasisState {
    pub fn new(site: Site, memory: impl IntoIterator<Item = CoinValue>) -> Result<Self> {
        let memory: Memory = memory.into_iter().collect();
        if memory.is_empty() {
            return Err(WalkError::InvalidSpec("memory length must be at least 1".into()));
        }
        let dims = site.dims();
        if let Some(bad) = memory.iter().find(|c| c.dims() != dims) {
            return Err(WalkError::Dimension(format!(
                "coin value {bad} does not match {}D site {site}",
                dims.count()
            )));
        }
        Ok(Self { site, memory })
    }

    pub fn dims(&self) -> Dims {
        self.site.dims()
    }

    pub fn memory_len(&self) -> usize {
        self.memory.len()
    }

    /// The register the coin acts on, `c_N`.
    pub fn last(&self) -> CoinValue {
        *self.memory.last().expect("memory is never empty")
    }

    /// Copy with `c_N` replaced.
    pub fn with_last(&self, coin: CoinValue) -> Self {
        let mut next = self.clone();
        *next.memory.last_mut().expect("memory is never empty") = coin;
        next
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}", self.site)?;
        for c in &self.memory {
            write!(f, ",{c}")?;
        }
        write!(f, ">")
    }
}

/// Sparse pure state over basis kets sharing one `N` and one dimensionality.
///
/// Entries are kept in an ordered map so iteration (and therefore every
/// floating-point summation downstream) is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    dims: Dims,
    memory_len: usize,
    prune_threshold: T,
    entries: BTreeMap<BasisState, Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Builds a normalized state from `(ket, amplitude)` pairs. Repeated kets
    /// are summed.
    pub fn from_amplitudes(
        dims: Dims,
        memory_len: usize,
        amplitudes: impl IntoIterator<Item = (BasisState, Complex<T>)>,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (ket, amp) in amplitudes {
            check_ket(&ket, dims, memory_len)?;
            *entries.entry(ket).or_insert_with(Complex::default) += amp;
        }
        entries.retain(|_, a: &mut Complex<T>| !is_zero(*a));
        let state = Self { dims, memory_len, prune_threshold: T::zero(), entries };
        let norm = state.norm_sqr().as_f64();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::Domain(format!("state is not normalized: sum |a|^2 = {norm}")));
        }
        Ok(state)
    }

    /// Single ket with amplitude 1.
    pub fn basis(ket: BasisState) -> Self {
        let dims = ket.dims();
        let memory_len = ket.memory_len();
        let mut entries = BTreeMap::new();
        entries.insert(ket, Complex::new(T::one(), T::zero()));
        Self { dims, memory_len, prune_threshold: T::zero(), entries }
    }

    /// Assembles a state produced by a unitary map; exact zeros are dropped and
    /// the configured prune threshold applied.
    pub(crate) fn from_parts(
        dims: Dims,
        memory_len: usize,
        prune_threshold: T,
        mut entries: BTreeMap<BasisState, Complex<T>>,
    ) -> Result<Self> {
        entries.retain(|_, a| !is_zero(*a));
        let state = Self { dims, memory_len, prune_threshold, entries };
        if prune_threshold > T::zero() {
            state.prune(prune_threshold)
        } else {
            Ok(state)
        }
    }

    pub(crate) fn with_entries(&self, entries: BTreeMap<BasisState, Complex<T>>) -> Result<Self> {
        Self::from_parts(self.dims, self.memory_len, self.prune_threshold, entries)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn memory_len(&self) -> usize {
        self.memory_len
    }

    pub fn prune_threshold(&self) -> T {
        self.prune_threshold
    }

    /// Sets the magnitude below which later operations drop entries.
    pub fn with_prune_threshold(mut self, eps: T) -> Result<Self> {
        check_eps(eps)?;
        self.prune_threshold = eps;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisState, &Complex<T>)> {
        self.entries.iter()
    }

    pub fn amplitude(&self, ket: &BasisState) -> Complex<T> {
        self.entries.get(ket).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> T {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    /// Errors unless `other` shares this state's `N` and dimensionality.
    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims || self.memory_len != other.memory_len {
            return Err(WalkError::Dimension(format!(
                "states differ: ({}D, N={}) vs ({}D, N={})",
                self.dims.count(),
                self.memory_len,
                other.dims.count(),
                other.memory_len
            )));
        }
        Ok(())
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        self.check_compatible(other)?;
        let (small, large, conj_small) =
            if self.len() <= other.len() { (self, other, true) } else { (other, self, false) };
        let mut acc = Complex::new(T::zero(), T::zero());
        for (ket, a) in small.iter() {
            if let Some(b) = large.entries.get(ket) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Drops entries with `|a| < eps` and renormalizes.
    ///
    /// Fails if the dropped entries carried more than [`PRUNE_LOSS_LIMIT`] of
    /// the total probability.
    pub fn prune(&self, eps: T) -> Result<Self> {
        check_eps(eps)?;
        let mut kept = BTreeMap::new();
        let mut discarded = T::zero();
        for (ket, a) in &self.entries {
            if a.norm() < eps {
                discarded += a.norm_sqr();
            } else {
                kept.insert(ket.clone(), *a);
            }
        }
        if discarded.as_f64() > PRUNE_LOSS_LIMIT {
            return Err(WalkError::Precision { discarded: discarded.as_f64() });
        }
        if kept.len() != self.entries.len() {
            let scale = T::one() / kept.values().map(|a| a.norm_sqr()).sum::<T>().sqrt();
            for a in kept.values_mut() {
                *a *= scale;
            }
        }
        Ok(Self {
            dims: self.dims,
            memory_len: self.memory_len,
            prune_threshold: self.prune_threshold,
            entries: kept,
        })
    }
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if !(eps >= T::zero() && eps.as_f64() < 1e-6) {
        return Err(WalkError::Domain(format!("prune threshold {eps} outside [0, 1e-6)")));
    }
    Ok(())
}

fn check_ket(ket: &BasisState, dims: Dims, memory_len: usize) -> Result<()> {
    if ket.dims() != dims || ket.memory_len() != memory_len {
        return Err(WalkError::Dimension(format!(
            "ket {ket} does not belong to a {}D walk with N={memory_len}",
            dims.count()
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn is_zero<T: Real>(a: Complex<T>) -> bool {
    a.re == T::zero() && a.im == T::zero()
}

/// Walk input, resolved against a dimensionality and memory length by
/// [`InputSpec::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind<T> {
    /// `(|o, -1..-1> + |o, +1..+1>) / sqrt 2`.
    Symmetrized,
    /// `|o, c..c>`.
    Product(CoinValue),
    /// Explicit `(ket, (re, im))` list; must already be normalized.
    Explicit(Vec<(BasisState, (T, T))>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSpec<T> {
    pub kind: InputKind<T>,
    #[serde(default)]
    pub origin: Option<Site>,
}

impl<T: Real> InputSpec<T> {
    pub fn symmetrized() -> Self {
        Self { kind: InputKind::Symmetrized, origin: None }
    }

    pub fn product(coin: CoinValue) -> Self {
        Self { kind: InputKind::Product(coin), origin: None }
    }

    pub fn at(mut self, origin: Site) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn build(&self, dims: Dims, memory_len: usize) -> Result<StateVector<T>> {
        let origin = self.origin.unwrap_or_else(|| Site::origin(dims));
        match &self.kind {
            InputKind::Symmetrized => make_symmetrized_input(memory_len, dims, origin),
            InputKind::Product(coin) => make_product_input(memory_len, dims, *coin, origin),
            InputKind::Explicit(list) => StateVector::from_amplitudes(
                dims,
                memory_len,
                list.iter().map(|(ket, (re, im))| (ket.clone(), Complex::new(*re, *im))),
            ),
        }
    }
}

fn check_origin(memory_len: usize, dims: Dims, origin: Site) -> Result<()> {
    if memory_len == 0 {
        return Err(WalkError::InvalidSpec("memory length must be at least 1".into()));
    }
    if origin.dims() != dims {
        return Err(WalkError::Dimension(format!("origin {origin} is not a {}D site", dims.count())));
    }
    Ok(())
}

/// `(|origin, -1, ..., -1> + |origin, +1, ..., +1>) / sqrt 2`; in 2D the two
/// terms use `(-1,-1)` and `(+1,+1)` in every register.
pub fn make_symmetrized_input<T: Real>(
    memory_len: usize,
    dims: Dims,
    origin: Site,
) -> Result<StateVector<T>> {
    check_origin(memory_len, dims, origin)?;
    let amp = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let term =
        |sign| BasisState::new(origin, std::iter::repeat_n(CoinValue::uniform(dims, sign), memory_len));
    let mut entries = BTreeMap::new();
    entries.insert(term(Sign::Minus)?, amp);
    entries.insert(term(Sign::Plus)?, amp);
    Ok(StateVector { dims, memory_len, prune_threshold: T::zero(), entries })
}

/// `|origin, c, ..., c>` with amplitude 1.
pub fn make_product_input<T: Real>(
    memory_len: usize,
    dims: Dims,
    coin: CoinValue,
    origin: Site,
) -> Result<StateVector<T>> {
    check_origin(memory_len, dims, origin)?;
    if coin.dims() != dims {
        return Err(WalkError::Dimension(format!("coin value {coin} is not a {}D coin", dims.count())));
    }
    Ok(StateVector::basis(BasisState::new(origin, std::iter::repeat_n(coin, memory_len))?))
}
