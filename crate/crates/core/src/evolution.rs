//! Walk operators and time evolution.
//!
//! One direct-mode step is `M S A`, where `A` is the coin selected per ket
//! (position override, else the coin family, which for biased coins folds in
//! the memory function). One physical-mode step is `M S U(phi) C` with a
//! balanced `C` and the Ising-type conditional unitary `U(phi)`.

use std::borrow::Cow;
use std::collections::BTreeMap;

use num_complex::Complex;

use crate::coin::{balanced_coin, biased_coin, coin_2d, conditional_block, Coin2d, CoinMatrix};
use crate::disorder::RandomField;
use crate::error::{Result, WalkError};
use crate::memory::{history_sum, memory_angle, MemoryFunction};
use crate::scalar::Real;
use crate::state::{is_zero, BasisState, CoinValue, Dims, InputSpec, Site, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub enum CoinFamily<T> {
    /// `exp(-i pi/4 sigma_x)` everywhere.
    Balanced,
    /// `A(theta)` with `theta` from a memory function.
    Biased(MemoryFunction<T>),
    /// `A(pi/4 + phi(x) pi/4)` with quenched `phi(x)`, ignoring history.
    RandomAngle(RandomField<T>),
    Separable2d,
    Entangling2d,
}

impl<T: Real> CoinFamily<T> {
    pub fn dims(&self) -> Dims {
        match self {
            CoinFamily::Separable2d | CoinFamily::Entangling2d => Dims::Two,
            _ => Dims::One,
        }
    }

    fn random_field_mut(&mut self) -> Option<&mut RandomField<T>> {
        match self {
            CoinFamily::Biased(MemoryFunction::RandomField(f)) | CoinFamily::RandomAngle(f) => Some(f),
            _ => None,
        }
    }
}

/// Coin family plus per-position matrix overrides. An override replaces the
/// family's coin at its site, memory function included.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinSpec<T> {
    pub family: CoinFamily<T>,
    overrides: BTreeMap<Site, CoinMatrix<T>>,
    default_block: Option<CoinMatrix<T>>,
}

impl<T: Real> CoinSpec<T> {
    pub fn new(family: CoinFamily<T>) -> Self {
        let default_block = match family {
            CoinFamily::Balanced => Some(balanced_coin()),
            CoinFamily::Separable2d => Some(coin_2d(Coin2d::Separable)),
            CoinFamily::Entangling2d => Some(coin_2d(Coin2d::Entangling)),
            _ => None,
        };
        Self { family, overrides: BTreeMap::new(), default_block }
    }

    pub fn balanced() -> Self {
        Self::new(CoinFamily::Balanced)
    }

    pub fn biased(f: MemoryFunction<T>) -> Self {
        Self::new(CoinFamily::Biased(f))
    }

    pub fn random_angle(field: RandomField<T>) -> Self {
        Self::new(CoinFamily::RandomAngle(field))
    }

    pub fn two_dim(kind: Coin2d) -> Self {
        Self::new(match kind {
            Coin2d::Separable => CoinFamily::Separable2d,
            Coin2d::Entangling => CoinFamily::Entangling2d,
        })
    }

    pub fn dims(&self) -> Dims {
        self.family.dims()
    }

    /// Installs a coin matrix at `site`; rejects non-unitary or mis-sized matrices.
    pub fn with_override(mut self, site: Site, matrix: CoinMatrix<T>) -> Result<Self> {
        if site.dims() != self.dims() || matrix.dim() != self.dims().coin_dim() {
            return Err(WalkError::Dimension(format!(
                "override at {site} has size {} but the coin is {}-dimensional",
                matrix.dim(),
                self.dims().coin_dim()
            )));
        }
        matrix.check_unitary()?;
        self.overrides.insert(site, matrix);
        Ok(self)
    }

    pub fn overrides(&self) -> &BTreeMap<Site, CoinMatrix<T>> {
        &self.overrides
    }

    /// Coin block acting on `c_N` of `ket`, row-indexed by the input value.
    pub fn block(&self, ket: &BasisState) -> Result<Cow<'_, CoinMatrix<T>>> {
        if let Some(m) = self.overrides.get(&ket.site) {
            return Ok(Cow::Borrowed(m));
        }
        if let Some(m) = &self.default_block {
            return Ok(Cow::Borrowed(m));
        }
        let theta = match &self.family {
            CoinFamily::Biased(f) => memory_angle(&ket.memory, ket.site, f)?,
            CoinFamily::RandomAngle(field) => {
                let q = T::FRAC_PI_4();
                q + field.value(ket.site)? * q
            }
            _ => unreachable!("families with a fixed block are cached"),
        };
        Ok(Cow::Owned(biased_coin(theta)))
    }

    fn validate(&self, memory_len: usize) -> Result<()> {
        if let CoinFamily::Biased(f) = &self.family {
            if f.uses_history() && memory_len < 2 {
                return Err(WalkError::InvalidSpec(format!(
                    "memory function '{}' requires N >= 2",
                    f.name()
                )));
            }
        }
        for m in self.overrides.values() {
            m.check_unitary()?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EvolutionMode {
    /// `M S A(theta)`.
    #[default]
    Direct,
    /// `M S U(phi) C`; linear-type memory functions only.
    Physical,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Boundary {
    #[default]
    Unbounded,
    /// Periodic lattice with `d` sites per axis.
    Cyclic(u32),
}

impl Boundary {
    fn wrap(self, site: Site) -> Site {
        match self {
            Boundary::Unbounded => site,
            Boundary::Cyclic(d) => site.wrapped(i64::from(d)),
        }
    }
}

/// Complete description of one walk experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkSpec<T> {
    pub dims: Dims,
    pub memory_len: usize,
    pub steps: usize,
    pub coin: CoinSpec<T>,
    pub mode: EvolutionMode,
    pub input: InputSpec<T>,
    pub boundary: Boundary,
}

impl<T: Real> WalkSpec<T> {
    /// Direct-mode, unbounded walk from the symmetrized input; dimensionality
    /// follows the coin.
    pub fn new(memory_len: usize, steps: usize, coin: CoinSpec<T>) -> Self {
        Self {
            dims: coin.dims(),
            memory_len,
            steps,
            coin,
            mode: EvolutionMode::Direct,
            input: InputSpec::symmetrized(),
            boundary: Boundary::Unbounded,
        }
    }

    pub fn with_input(mut self, input: InputSpec<T>) -> Self {
        self.input = input;
        self
    }

    pub fn with_mode(mut self, mode: EvolutionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    /// Copy whose random field(s) draw from `seed`. Fields without a seed
    /// (fully specified maps) are left as they are.
    pub fn with_field_seed(&self, seed: u64) -> Self {
        let mut next = self.clone();
        if let Some(field) = next.coin.family.random_field_mut() {
            field.reseed(seed);
        }
        next
    }

    pub fn validate(&self) -> Result<()> {
        if self.memory_len == 0 {
            return Err(WalkError::InvalidSpec("memory length must be at least 1".into()));
        }
        if self.coin.dims() != self.dims {
            return Err(WalkError::InvalidSpec(format!(
                "{}D walk cannot use a {}D coin",
                self.dims.count(),
                self.coin.dims().count()
            )));
        }
        if let Boundary::Cyclic(d) = self.boundary {
            if d < 2 {
                return Err(WalkError::InvalidSpec(format!("cyclic boundary needs d >= 2, got {d}")));
            }
        }
        self.coin.validate(self.memory_len)?;
        if self.mode == EvolutionMode::Physical {
            self.physical_function()?;
        }
        Ok(())
    }

    pub(crate) fn physical_function(&self) -> Result<&MemoryFunction<T>> {
        match &self.coin.family {
            CoinFamily::Biased(f @ (MemoryFunction::Linear { .. } | MemoryFunction::RandomField(_)))
                if self.memory_len >= 2 =>
            {
                Ok(f)
            }
            _ => Err(WalkError::InvalidSpec(
                "physical mode needs a linear (or random-field) memory function and N >= 2".into(),
            )),
        }
    }

    /// Builds and checks the input state.
    pub fn input_state(&self) -> Result<StateVector<T>> {
        self.validate()?;
        let state = self.input.build(self.dims, self.memory_len)?;
        self.check_state(&state)?;
        Ok(state)
    }

    pub fn check_state(&self, state: &StateVector<T>) -> Result<()> {
        if state.dims() != self.dims || state.memory_len() != self.memory_len {
            return Err(WalkError::Dimension(format!(
                "state is ({}D, N={}) but the walk is ({}D, N={})",
                state.dims().count(),
                state.memory_len(),
                self.dims.count(),
                self.memory_len
            )));
        }
        if let Boundary::Cyclic(_) = self.boundary {
            if let Some((ket, _)) = state.iter().find(|(k, _)| self.boundary.wrap(k.site) != k.site) {
                return Err(WalkError::InvalidSpec(format!("ket {ket} lies outside the cyclic lattice")));
            }
        }
        Ok(())
    }
}

fn accumulate<T: Real>(out: &mut BTreeMap<BasisState, Complex<T>>, ket: BasisState, amp: Complex<T>) {
    let e = out.entry(ket).or_default();
    *e += amp;
}

/// Rewrites `c_N` of every ket through a per-ket block. With `adjoint` set the
/// block's conjugate transpose is used, which inverts the map.
fn map_last_register<'a, T: Real, F>(
    state: &StateVector<T>,
    mut block_for: F,
    adjoint: bool,
) -> Result<StateVector<T>>
where
    F: FnMut(&BasisState) -> Result<Cow<'a, CoinMatrix<T>>>,
    T: 'a,
{
    let dims = state.dims();
    let mut out = BTreeMap::new();
    for (ket, &amp) in state.iter() {
        let block = block_for(ket)?;
        if block.dim() != dims.coin_dim() {
            return Err(WalkError::Dimension(format!(
                "{}x{} coin applied to a {}D walk",
                block.dim(),
                block.dim(),
                dims.count()
            )));
        }
        let c = ket.last().index();
        for j in 0..block.dim() {
            let entry = if adjoint { block.get(j, c).conj() } else { block.get(c, j) };
            if is_zero(entry) {
                continue;
            }
            accumulate(&mut out, ket.with_last(CoinValue::from_index(dims, j)), amp * entry);
        }
    }
    state.with_entries(out)
}

fn check_coin_dims<T: Real>(state: &StateVector<T>, coin: &CoinSpec<T>) -> Result<()> {
    if coin.dims() != state.dims() {
        return Err(WalkError::Dimension(format!(
            "{}D coin applied to a {}D state",
            coin.dims().count(),
            state.dims().count()
        )));
    }
    Ok(())
}

/// Coin operator `C`: `|x, .., c_N> -> sum_j A(x)[c_N][j] |x, .., j>`.
pub fn apply_coin<T: Real>(state: &StateVector<T>, coin: &CoinSpec<T>) -> Result<StateVector<T>> {
    check_coin_dims(state, coin)?;
    coin.validate(state.memory_len())?;
    map_last_register(state, |ket| coin.block(ket), false)
}

/// Inverse of [`apply_coin`].
pub fn apply_coin_inverse<T: Real>(state: &StateVector<T>, coin: &CoinSpec<T>) -> Result<StateVector<T>> {
    check_coin_dims(state, coin)?;
    coin.validate(state.memory_len())?;
    map_last_register(state, |ket| coin.block(ket), true)
}

fn shift<T: Real>(state: &StateVector<T>, boundary: Boundary, direction: i64) -> Result<StateVector<T>> {
    let mut out = BTreeMap::new();
    for (ket, &amp) in state.iter() {
        let site = boundary.wrap(ket.site.shifted(ket.last(), direction));
        accumulate(&mut out, BasisState { site, memory: ket.memory.clone() }, amp);
    }
    state.with_entries(out)
}

/// Step operator `S`: moves each ket by its `c_N`.
pub fn apply_step<T: Real>(state: &StateVector<T>, boundary: Boundary) -> Result<StateVector<T>> {
    shift(state, boundary, 1)
}

pub fn apply_step_inverse<T: Real>(state: &StateVector<T>, boundary: Boundary) -> Result<StateVector<T>> {
    shift(state, boundary, -1)
}

fn rotate_memory<T: Real>(state: &StateVector<T>, forward: bool) -> Result<StateVector<T>> {
    let mut out = BTreeMap::new();
    for (ket, &amp) in state.iter() {
        let mut memory = ket.memory.clone();
        if forward {
            memory.rotate_right(1);
        } else {
            memory.rotate_left(1);
        }
        accumulate(&mut out, BasisState { site: ket.site, memory }, amp);
    }
    state.with_entries(out)
}

/// Memory update `M`: `|x, c_1, .., c_N> -> |x, c_N, c_1, .., c_{N-1}>`.
pub fn apply_memory_update<T: Real>(state: &StateVector<T>) -> Result<StateVector<T>> {
    rotate_memory(state, true)
}

pub fn apply_memory_update_inverse<T: Real>(state: &StateVector<T>) -> Result<StateVector<T>> {
    rotate_memory(state, false)
}

/// Rotation angle `pi phi(x) s / (4 (N-1))` of the conditional unitary in
/// sector `s = c_1 + .. + c_{N-1}`.
pub fn conditional_angle<T: Real>(phi: T, sector: i64, memory_len: usize) -> T {
    T::PI() * phi * T::lit(sector as f64) / T::lit(4.0 * (memory_len - 1) as f64)
}

fn conditional<T: Real>(
    state: &StateVector<T>,
    f: &MemoryFunction<T>,
    adjoint: bool,
) -> Result<StateVector<T>> {
    let n = state.memory_len();
    if n < 2 {
        return Err(WalkError::InvalidSpec("conditional unitary needs N >= 2".into()));
    }
    if state.dims() != Dims::One {
        return Err(WalkError::Dimension("conditional unitary is defined for 1D walks".into()));
    }
    map_last_register(
        state,
        |ket| {
            let phi = f.linear_phi(ket.site)?.ok_or_else(|| {
                WalkError::InvalidSpec(format!(
                    "conditional unitary needs a linear-type memory function, got '{}'",
                    f.name()
                ))
            })?;
            let angle = conditional_angle(phi, history_sum(&ket.memory)?, n);
            Ok(Cow::Owned(conditional_block(angle)))
        },
        adjoint,
    )
}

/// Conditional unitary `U(phi)` acting on `c_N` per memory sector; `phi`
/// comes from a linear or random-field memory function.
pub fn apply_conditional_unitary<T: Real>(
    state: &StateVector<T>,
    f: &MemoryFunction<T>,
) -> Result<StateVector<T>> {
    conditional(state, f, false)
}

pub fn apply_conditional_unitary_inverse<T: Real>(
    state: &StateVector<T>,
    f: &MemoryFunction<T>,
) -> Result<StateVector<T>> {
    conditional(state, f, true)
}

/// Physical-mode coin: overrides if present, else the balanced coin.
pub(crate) fn physical_coin<T: Real>(spec: &WalkSpec<T>) -> CoinSpec<T> {
    let mut c = CoinSpec::balanced();
    c.overrides = spec.coin.overrides.clone();
    c
}

/// One time step of `spec` (no validation of `state` against `spec`).
pub fn step<T: Real>(state: &StateVector<T>, spec: &WalkSpec<T>) -> Result<StateVector<T>> {
    let coined = match spec.mode {
        EvolutionMode::Direct => apply_coin(state, &spec.coin)?,
        EvolutionMode::Physical => {
            let f = spec.physical_function()?;
            let c = apply_coin(state, &physical_coin(spec))?;
            apply_conditional_unitary(&c, f)?
        }
    };
    apply_memory_update(&apply_step(&coined, spec.boundary)?)
}

/// Exact inverse of [`step`].
pub fn step_reverse<T: Real>(state: &StateVector<T>, spec: &WalkSpec<T>) -> Result<StateVector<T>> {
    let shifted = apply_step_inverse(&apply_memory_update_inverse(state)?, spec.boundary)?;
    match spec.mode {
        EvolutionMode::Direct => apply_coin_inverse(&shifted, &spec.coin),
        EvolutionMode::Physical => {
            let f = spec.physical_function()?;
            let u = apply_conditional_unitary_inverse(&shifted, f)?;
            apply_coin_inverse(&u, &physical_coin(spec))
        }
    }
}

/// Applies `spec.steps` steps to `input`.
pub fn evolve<T: Real>(input: &StateVector<T>, spec: &WalkSpec<T>) -> Result<StateVector<T>> {
    spec.validate()?;
    spec.check_state(input)?;
    let mut state = input.clone();
    for _ in 0..spec.steps {
        state = step(&state, spec)?;
    }
    Ok(state)
}

/// Undoes [`evolve`]: applies the inverse step `spec.steps` times.
pub fn evolve_reverse<T: Real>(output: &StateVector<T>, spec: &WalkSpec<T>) -> Result<StateVector<T>> {
    spec.validate()?;
    spec.check_state(output)?;
    let mut state = output.clone();
    for _ in 0..spec.steps {
        state = step_reverse(&state, spec)?;
    }
    Ok(state)
}

/// Iterator over the states at `t = 0, 1, ..., spec.steps`.
pub struct Trajectory<'a, T: Real> {
    spec: &'a WalkSpec<T>,
    state: Option<StateVector<T>>,
    remaining: usize,
}

impl<'a, T: Real> Trajectory<'a, T> {
    pub fn new(spec: &'a WalkSpec<T>) -> Result<Self> {
        let state = spec.input_state()?;
        Ok(Self::from_state(spec, state))
    }

    pub fn from_state(spec: &'a WalkSpec<T>, state: StateVector<T>) -> Self {
        Self { spec, state: Some(state), remaining: spec.steps + 1 }
    }
}

impl<T: Real> Iterator for Trajectory<'_, T> {
    type Item = Result<StateVector<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let current = self.state.take()?;
        if self.remaining > 0 {
            match step(&current, self.spec) {
                Ok(next) => self.state = Some(next),
                Err(e) => {
                    self.remaining = 0;
                    return Some(Err(e));
                }
            }
        }
        Some(Ok(current))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    use super::*;
    use crate::state::{make_product_input, make_symmetrized_input, Sign};

    type C = Complex<f64>;

    fn ket(x: i64, mem: &[i64]) -> BasisState {
        BasisState::new(Site::Line(x), mem.iter().map(|&v| CoinValue::Line(Sign::from_value(v).unwrap())))
            .unwrap()
    }

    fn product(n: usize, v: i64) -> StateVector<f64> {
        let c = CoinValue::Line(Sign::from_value(v).unwrap());
        make_product_input(n, Dims::One, c, Site::Line(0)).unwrap()
    }

    fn close(a: C, b: C) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn balanced_coin_on_plus() {
        let out = apply_coin(&product(1, 1), &CoinSpec::balanced()).unwrap();
        assert!(close(out.amplitude(&ket(0, &[1])), C::new(H, 0.0)));
        assert!(close(out.amplitude(&ket(0, &[-1])), C::new(0.0, -H)));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn identity_overrides_leave_state_unchanged() {
        let s = make_symmetrized_input::<f64>(3, Dims::One, Site::Line(0)).unwrap();
        let coin = CoinSpec::balanced().with_override(Site::Line(0), CoinMatrix::identity(2)).unwrap();
        assert_eq!(apply_coin(&s, &coin).unwrap(), s);
    }

    #[test]
    fn non_unitary_override_is_rejected() {
        let bad = CoinMatrix::from_real_rows([[1.0, 0.5], [0.0, 1.0]]);
        assert!(matches!(
            CoinSpec::<f64>::balanced().with_override(Site::Line(0), bad),
            Err(WalkError::NonUnitary { .. })
        ));
    }

    #[test]
    fn biased_linear_coin_flips_long_rightward_history() {
        let coin = CoinSpec::biased(MemoryFunction::Linear { phi: 1.0 });
        let out = apply_coin(&product(5, 1), &coin).unwrap();
        // row +1 of [[0, 1], [-1, 0]] sends c_5 = +1 to +|.., -1>
        assert!(close(out.amplitude(&ket(0, &[1, 1, 1, 1, -1])), C::new(1.0, 0.0)));
        assert!(out.amplitude(&ket(0, &[1, 1, 1, 1, 1])).norm() < 1e-15);
    }

    #[test]
    fn step_moves_by_last_register() {
        let s = StateVector::basis(ket(0, &[1]));
        let out = apply_step(&s, Boundary::Unbounded).unwrap();
        assert_eq!(out.amplitude(&ket(1, &[1])), C::new(1.0, 0.0));

        let pp = CoinValue::Plane(Sign::Plus, Sign::Plus);
        let mp = CoinValue::Plane(Sign::Minus, Sign::Plus);
        let s = StateVector::<f64>::basis(BasisState::new(Site::Plane(0, 0), [pp, mp]).unwrap());
        let out = apply_step(&s, Boundary::Unbounded).unwrap();
        let expected = BasisState::new(Site::Plane(-1, 1), [pp, mp]).unwrap();
        assert_eq!(out.amplitude(&expected), C::new(1.0, 0.0));
    }

    #[test]
    fn cyclic_step_wraps() {
        let s = StateVector::<f64>::basis(ket(1, &[1]));
        let out = apply_step(&s, Boundary::Cyclic(2)).unwrap();
        assert_eq!(out.amplitude(&ket(0, &[1])), C::new(1.0, 0.0));
        let s = StateVector::<f64>::basis(ket(0, &[-1]));
        let out = apply_step(&s, Boundary::Cyclic(5)).unwrap();
        assert_eq!(out.amplitude(&ket(4, &[-1])), C::new(1.0, 0.0));
    }

    #[test]
    fn memory_update_cycles_registers() {
        let s = StateVector::<f64>::basis(ket(2, &[1, 1, -1]));
        let out = apply_memory_update(&s).unwrap();
        assert_eq!(out.amplitude(&ket(2, &[-1, 1, 1])), C::new(1.0, 0.0));

        let single = StateVector::<f64>::basis(ket(0, &[-1]));
        assert_eq!(apply_memory_update(&single).unwrap(), single);

        let mut state = StateVector::<f64>::basis(ket(0, &[1, -1, -1, 1, -1]));
        let original = state.clone();
        for _ in 0..5 {
            state = apply_memory_update(&state).unwrap();
        }
        assert_eq!(state, original);
        let back = apply_memory_update_inverse(&apply_memory_update(&original).unwrap()).unwrap();
        assert_eq!(back, original);
    }

    #[test]
    fn conditional_unitary_trivial_cases() {
        let s = make_symmetrized_input::<f64>(4, Dims::One, Site::Line(0)).unwrap();
        let zero = MemoryFunction::Linear { phi: 0.0 };
        let out = apply_conditional_unitary(&s, &zero).unwrap();
        for (k, a) in s.iter() {
            assert!(close(out.amplitude(k), *a));
        }
        // balanced history s = 0 (N = 3): identity on c_N
        let balanced = StateVector::<f64>::basis(ket(0, &[1, -1, 1]));
        let out = apply_conditional_unitary(&balanced, &MemoryFunction::Linear { phi: 1.0 }).unwrap();
        assert!(close(out.amplitude(&ket(0, &[1, -1, 1])), C::new(1.0, 0.0)));
        assert!(out.amplitude(&ket(0, &[1, -1, -1])).norm() < 1e-15);
    }

    #[test]
    fn conditional_unitary_rejects_single_register() {
        let s = product(1, 1);
        assert!(matches!(
            apply_conditional_unitary(&s, &MemoryFunction::Linear { phi: 1.0 }),
            Err(WalkError::InvalidSpec(_))
        ));
    }

    #[test]
    fn conditional_unitary_full_sector() {
        // N=5, phi=1, s=+4: angle pi/4, block exp(-i pi/4 sigma_y) = [[h, -h], [h, h]]
        let s = StateVector::<f64>::basis(ket(0, &[1, 1, 1, 1, 1]));
        let out = apply_conditional_unitary(&s, &MemoryFunction::Linear { phi: 1.0 }).unwrap();
        assert!(close(out.amplitude(&ket(0, &[1, 1, 1, 1, 1])), C::new(H, 0.0)));
        assert!(close(out.amplitude(&ket(0, &[1, 1, 1, 1, -1])), C::new(-H, 0.0)));
    }

    #[test]
    fn single_goldfish_step() {
        let spec = WalkSpec::new(1, 1, CoinSpec::balanced()).with_input(InputSpec::product(CoinValue::PLUS));
        let out = evolve(&spec.input_state().unwrap(), &spec).unwrap();
        assert!(close(out.amplitude(&ket(1, &[1])), C::new(H, 0.0)));
        assert!(close(out.amplitude(&ket(-1, &[-1])), C::new(0.0, -H)));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn zero_steps_is_identity() {
        let spec = WalkSpec::<f64>::new(3, 0, CoinSpec::balanced());
        let input = spec.input_state().unwrap();
        assert_eq!(evolve(&input, &spec).unwrap(), input);
        assert_eq!(evolve_reverse(&input, &spec).unwrap(), input);
    }

    #[test]
    fn reverse_recovers_input_in_both_modes() {
        for mode in [EvolutionMode::Direct, EvolutionMode::Physical] {
            let spec = WalkSpec::new(4, 9, CoinSpec::biased(MemoryFunction::Linear { phi: 0.6 }))
                .with_mode(mode)
                .with_input(InputSpec::product(CoinValue::PLUS));
            let input = spec.input_state().unwrap();
            let back = evolve_reverse(&evolve(&input, &spec).unwrap(), &spec).unwrap();
            let overlap = input.inner_product(&back).unwrap().norm_sqr();
            assert!(overlap > 1.0 - 1e-12, "{mode:?}: {overlap}");
        }
    }

    #[test]
    fn physical_mode_requires_linear_function() {
        let spec = WalkSpec::<f64>::new(3, 2, CoinSpec::biased(MemoryFunction::Absolute { phi: 1.0 }))
            .with_mode(EvolutionMode::Physical);
        assert!(matches!(spec.validate(), Err(WalkError::InvalidSpec(_))));
        let spec = WalkSpec::<f64>::new(3, 2, CoinSpec::balanced()).with_mode(EvolutionMode::Physical);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_validation() {
        let spec = WalkSpec::<f64>::new(1, 2, CoinSpec::biased(MemoryFunction::Linear { phi: 1.0 }));
        assert!(matches!(spec.validate(), Err(WalkError::InvalidSpec(_))));
        let spec = WalkSpec::<f64>::new(1, 2, CoinSpec::balanced()).with_boundary(Boundary::Cyclic(1));
        assert!(spec.validate().is_err());
        let spec = WalkSpec::<f64>::new(2, 3, CoinSpec::biased(MemoryFunction::Trivial));
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn evolve_rejects_mismatched_input() {
        let spec = WalkSpec::<f64>::new(2, 3, CoinSpec::balanced());
        let wrong = make_symmetrized_input(3, Dims::One, Site::Line(0)).unwrap();
        assert!(matches!(evolve(&wrong, &spec), Err(WalkError::Dimension(_))));
        assert!(matches!(evolve_reverse(&wrong, &spec), Err(WalkError::Dimension(_))));
    }

    #[test]
    fn trajectory_yields_every_time() {
        let spec = WalkSpec::<f64>::new(2, 4, CoinSpec::balanced());
        let states: Vec<_> = Trajectory::new(&spec).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(states.len(), 5);
        assert_eq!(states[4], evolve(&states[0], &spec).unwrap());
    }
}
