//! Lowering of finite (cyclic) walks to passive linear-optics mode networks.
//!
//! Every basis ket `|site, c_1, .., c_N>` is one optical mode. The step and
//! memory-update operators become mode permutations; the coin becomes a
//! layer of 2x2 blocks, one per `(site, c_1, .., c_{N-1})` sector. History
//! dependence costs nothing extra: the memory prefix is part of the mode
//! label, so each sector simply receives its own static block. 4x4 coins of
//! 2D walks are split into Givens rotations on adjacent modes plus phases.
//!
//! Layer semantics on a mode amplitude vector `v`:
//! * `Permutation(p)`: the amplitude in mode `i` moves to mode `p[i]`.
//! * `Beamsplitters`: `(v_i, v_j) <- B (v_i, v_j)` for each block.
//! * `Phases`: `v_m <- exp(i phase) v_m`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::CoinMatrix;
use crate::error::{Result, WalkError};
use crate::evolution::{self, Boundary, CoinSpec, EvolutionMode, WalkSpec};
use crate::memory::{history_sum, MemoryFunction};
use crate::scalar::Real;
use crate::state::{BasisState, CoinValue, Dims, Memory, Site, StateVector};

/// Default ceiling on the number of modes.
pub const DEFAULT_MODE_CAP: usize = 1 << 16;

/// Circuit-versus-simulator tolerance.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

/// Largest mode count for which the dense step unitary is formed to check
/// unitarity.
const DENSE_UNITARITY_LIMIT: usize = 1024;

pub const CIRCUIT_FORMAT: &str = "memwalk-circuit/1";

/// Bijection `(site index, memory tuple) <-> mode`, site-major, then memory
/// lexicographic with `c_1` most significant and `+1` before `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeIndex {
    sites: usize,
    memory_len: usize,
    coin_dim: usize,
    per_site: usize,
}

impl ModeIndex {
    pub fn mode_count(&self) -> usize {
        self.sites * self.per_site
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn memory_len(&self) -> usize {
        self.memory_len
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// Mode for `site` and per-register coin indices `memory`.
    pub fn index(&self, site: usize, memory: &[usize]) -> usize {
        debug_assert!(site < self.sites && memory.len() == self.memory_len);
        memory.iter().fold(site, |acc, &c| acc * self.coin_dim + c)
    }

    pub fn label(&self, mode: usize) -> (usize, Vec<usize>) {
        let mut memory = vec![0; self.memory_len];
        let mut rest = mode;
        for slot in memory.iter_mut().rev() {
            *slot = rest % self.coin_dim;
            rest /= self.coin_dim;
        }
        (rest, memory)
    }
}

/// Mode enumeration for `sites` lattice sites and `N` registers of
/// `coin_dim` values: `sites * coin_dim^N` modes.
pub fn enumerate_modes(sites: usize, memory_len: usize, coin_dim: usize) -> Result<ModeIndex> {
    enumerate_modes_with_cap(sites, memory_len, coin_dim, DEFAULT_MODE_CAP)
}

pub fn enumerate_modes_with_cap(
    sites: usize,
    memory_len: usize,
    coin_dim: usize,
    cap: usize,
) -> Result<ModeIndex> {
    if sites < 2 || memory_len < 1 || coin_dim < 2 {
        return Err(WalkError::InvalidSpec(format!(
            "mode enumeration needs d >= 2, N >= 1 and coin_dim >= 2 (got {sites}, {memory_len}, {coin_dim})"
        )));
    }
    let per_site = u32::try_from(memory_len)
        .ok()
        .and_then(|n| coin_dim.checked_pow(n))
        .ok_or_else(|| WalkError::Resource("memory space overflows".into()))?;
    let count =
        per_site.checked_mul(sites).ok_or_else(|| WalkError::Resource("mode count overflows".into()))?;
    if count > cap {
        return Err(WalkError::Resource(format!("{count} modes exceed the cap of {cap}")));
    }
    Ok(ModeIndex { sites, memory_len, coin_dim, per_site })
}

/// Mode numbering of the kets of one cyclic walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeMap {
    pub index: ModeIndex,
    pub dims: Dims,
    /// Sites per axis.
    pub period: i64,
}

impl ModeMap {
    pub fn for_spec<T: Real>(spec: &WalkSpec<T>, cap: usize) -> Result<Self> {
        let Boundary::Cyclic(d) = spec.boundary else {
            return Err(WalkError::MustBeCyclic);
        };
        let period = d as usize;
        let sites = match spec.dims {
            Dims::One => period,
            Dims::Two => period * period,
        };
        let index = enumerate_modes_with_cap(sites, spec.memory_len, spec.dims.coin_dim(), cap)?;
        Ok(Self { index, dims: spec.dims, period: i64::from(d) })
    }

    pub fn mode_count(&self) -> usize {
        self.index.mode_count()
    }

    fn site_index(&self, site: Site) -> usize {
        let w = site.wrapped(self.period);
        match w {
            Site::Line(x) => x as usize,
            Site::Plane(x, y) => (x * self.period + y) as usize,
        }
    }

    fn site(&self, index: usize) -> Site {
        match self.dims {
            Dims::One => Site::Line(index as i64),
            Dims::Two => Site::Plane(index as i64 / self.period, index as i64 % self.period),
        }
    }

    pub fn mode(&self, ket: &BasisState) -> usize {
        let memory: Vec<usize> = ket.memory.iter().map(|c| c.index()).collect();
        self.index.index(self.site_index(ket.site), &memory)
    }

    pub fn ket(&self, mode: usize) -> BasisState {
        let (site, memory) = self.index.label(mode);
        BasisState {
            site: self.site(site),
            memory: memory.into_iter().map(|c| CoinValue::from_index(self.dims, c)).collect(),
        }
    }

    pub fn to_vector<T: Real>(&self, state: &StateVector<T>) -> Vec<Complex<T>> {
        let mut v = vec![Complex::default(); self.mode_count()];
        for (ket, a) in state.iter() {
            v[self.mode(ket)] = *a;
        }
        v
    }

    pub fn to_state<T: Real>(&self, v: &[Complex<T>]) -> Result<StateVector<T>> {
        StateVector::from_amplitudes(
            self.dims,
            self.index.memory_len(),
            v.iter().enumerate().filter(|(_, a)| a.norm_sqr() > T::zero()).map(|(m, a)| (self.ket(m), *a)),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Beamsplitter<T> {
    pub modes: (usize, usize),
    /// Acts on the column vector `(v_i, v_j)`.
    pub matrix: CoinMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Layer<T> {
    Permutation(Vec<usize>),
    Beamsplitters(Vec<Beamsplitter<T>>),
    Phases(Vec<(usize, T)>),
}

impl<T: Real> Layer<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Layer::Permutation(_) => "permutation",
            Layer::Beamsplitters(_) => "beamsplitter",
            Layer::Phases(_) => "phase",
        }
    }

    pub fn apply(&self, v: &mut [Complex<T>]) {
        match self {
            Layer::Permutation(p) => {
                let mut out = vec![Complex::default(); v.len()];
                for (i, &target) in p.iter().enumerate() {
                    out[target] = v[i];
                }
                v.copy_from_slice(&out);
            }
            Layer::Beamsplitters(blocks) => {
                for b in blocks {
                    let (i, j) = b.modes;
                    let (a, c) = (v[i], v[j]);
                    v[i] = b.matrix.get(0, 0) * a + b.matrix.get(0, 1) * c;
                    v[j] = b.matrix.get(1, 0) * a + b.matrix.get(1, 1) * c;
                }
            }
            Layer::Phases(phases) => {
                for &(m, phase) in phases {
                    v[m] *= Complex::from_polar(T::one(), phase);
                }
            }
        }
    }

    fn validate(&self, mode_count: usize) -> Result<()> {
        match self {
            Layer::Permutation(p) => {
                let mut seen = vec![false; mode_count];
                if p.len() != mode_count {
                    return Err(WalkError::InvalidSpec("permutation has the wrong length".into()));
                }
                for &t in p {
                    if t >= mode_count || std::mem::replace(&mut seen[t], true) {
                        return Err(WalkError::InvalidSpec("permutation is not a bijection".into()));
                    }
                }
            }
            Layer::Beamsplitters(blocks) => {
                let mut used = vec![false; mode_count];
                for b in blocks {
                    let (i, j) = b.modes;
                    if i == j || i >= mode_count || j >= mode_count || used[i] || used[j] {
                        return Err(WalkError::InvalidSpec(format!(
                            "beamsplitter on modes ({i}, {j}) overlaps or is out of range"
                        )));
                    }
                    used[i] = true;
                    used[j] = true;
                    if b.matrix.dim() != 2 {
                        return Err(WalkError::Dimension("beamsplitter block must be 2x2".into()));
                    }
                    b.matrix.check_unitary()?;
                }
            }
            Layer::Phases(phases) => {
                if phases.iter().any(|&(m, p)| m >= mode_count || !p.is_finite()) {
                    return Err(WalkError::InvalidSpec("invalid phase entry".into()));
                }
            }
        }
        Ok(())
    }
}

/// Layered optics program for one walk step, repeated `repetitions` times.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitDescription<T> {
    pub mode_count: usize,
    pub basis_labels: Vec<String>,
    pub layers: Vec<Layer<T>>,
    pub repetitions: usize,
}

impl<T: Real> CircuitDescription<T> {
    /// Checks the structural invariants of every layer.
    pub fn validate(&self) -> Result<()> {
        if self.basis_labels.len() != self.mode_count {
            return Err(WalkError::InvalidSpec("one basis label per mode is required".into()));
        }
        self.layers.iter().try_for_each(|l| l.validate(self.mode_count))
    }

    /// Applies one step (all layers once).
    pub fn apply_step(&self, v: &mut [Complex<T>]) {
        for layer in &self.layers {
            layer.apply(v);
        }
    }

    /// Applies the full program.
    pub fn run(&self, v: &mut [Complex<T>]) {
        for _ in 0..self.repetitions {
            self.apply_step(v);
        }
    }

    /// Column `mode` of the one-step mode unitary.
    pub fn step_column(&self, mode: usize) -> Vec<Complex<T>> {
        let mut v = vec![Complex::default(); self.mode_count];
        v[mode] = Complex::new(T::one(), T::zero());
        self.apply_step(&mut v);
        v
    }
}

/// Lowers `spec` (cyclic boundary required) to a mode network.
pub fn compile_layers<T: Real>(spec: &WalkSpec<T>) -> Result<CircuitDescription<T>> {
    compile_layers_with_cap(spec, DEFAULT_MODE_CAP)
}

pub fn compile_layers_with_cap<T: Real>(spec: &WalkSpec<T>, cap: usize) -> Result<CircuitDescription<T>> {
    spec.validate()?;
    let map = ModeMap::for_spec(spec, cap)?;
    let count = map.mode_count();
    let kets: Vec<BasisState> = (0..count).map(|m| map.ket(m)).collect();
    let coin_dim = spec.dims.coin_dim();

    let mut layers = Vec::new();
    let physical = evolution::physical_coin(spec);
    let coin_stages = match spec.mode {
        EvolutionMode::Direct => vec![CoinStage::Coin(&spec.coin)],
        EvolutionMode::Physical => {
            vec![CoinStage::Coin(&physical), CoinStage::Conditional(spec.physical_function()?)]
        }
    };
    for stage in &coin_stages {
        // sectors are runs of coin_dim consecutive modes sharing (site, c_1..c_{N-1})
        let blocks: Vec<(usize, CoinMatrix<T>)> = (0..count)
            .step_by(coin_dim)
            .map(|first| Ok((first, stage.block(&kets[first], spec)?.transpose())))
            .collect::<Result<_>>()?;
        if coin_dim == 2 {
            layers.push(Layer::Beamsplitters(
                blocks
                    .into_iter()
                    .map(|(first, matrix)| Beamsplitter { modes: (first, first + 1), matrix })
                    .collect(),
            ));
        } else {
            layers.extend(decomposed_layers(&blocks));
        }
    }

    let shift: Vec<usize> = kets
        .iter()
        .map(|k| map.mode(&BasisState { site: k.site.shifted(k.last(), 1), memory: k.memory.clone() }))
        .collect();
    layers.push(Layer::Permutation(shift));

    let cycle: Vec<usize> = kets
        .iter()
        .map(|k| {
            let mut memory: Memory = k.memory.clone();
            memory.rotate_right(1);
            map.mode(&BasisState { site: k.site, memory })
        })
        .collect();
    layers.push(Layer::Permutation(cycle));

    let circuit = CircuitDescription {
        mode_count: count,
        basis_labels: kets.iter().map(|k| k.to_string()).collect(),
        layers,
        repetitions: spec.steps,
    };
    circuit.validate()?;
    Ok(circuit)
}

enum CoinStage<'a, T> {
    Coin(&'a CoinSpec<T>),
    Conditional(&'a MemoryFunction<T>),
}

impl<T: Real> CoinStage<'_, T> {
    /// Ket-rule block for the sector containing `ket`.
    fn block(&self, ket: &BasisState, spec: &WalkSpec<T>) -> Result<CoinMatrix<T>> {
        match self {
            CoinStage::Coin(c) => Ok(c.block(ket)?.into_owned()),
            CoinStage::Conditional(f) => {
                let phi = f.linear_phi(ket.site)?.ok_or_else(|| {
                    WalkError::InvalidSpec("physical mode needs a linear memory function".into())
                })?;
                let angle = evolution::conditional_angle(phi, history_sum(&ket.memory)?, spec.memory_len);
                Ok(crate::coin::conditional_block(angle))
            }
        }
    }
}

/// Givens factorization `B = G_1^dagger .. G_K^dagger D` of a unitary, with
/// each `G_k` acting on adjacent rows `(r - 1, r)`. Returns the rotations in
/// the order they must be applied to a vector (after the phases) and `D`'s
/// phases.
pub fn givens_decomposition<T: Real>(block: &CoinMatrix<T>) -> (Vec<(usize, CoinMatrix<T>)>, Vec<T>) {
    let d = block.dim();
    let mut m = block.clone();
    let mut rotations = Vec::new();
    for col in 0..d {
        for row in (col + 1..d).rev() {
            let a = m.get(row - 1, col);
            let b = m.get(row, col);
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if b.norm() == T::zero() || n == T::zero() {
                continue;
            }
            let g =
                CoinMatrix::from_rows(&[vec![a.conj() / n, b.conj() / n], vec![-b / n, a / n]]).expect("2x2");
            for c in 0..d {
                let (x, y) = (m.get(row - 1, c), m.get(row, c));
                m.set(row - 1, c, g.get(0, 0) * x + g.get(0, 1) * y);
                m.set(row, c, g.get(1, 0) * x + g.get(1, 1) * y);
            }
            rotations.push((row - 1, g));
        }
    }
    let phases = (0..d).map(|i| m.get(i, i).arg()).collect();
    rotations.reverse();
    (rotations.into_iter().map(|(r, g)| (r, g.adjoint())).collect(), phases)
}

/// Phase layer followed by one beamsplitter layer per Givens slot.
fn decomposed_layers<T: Real>(blocks: &[(usize, CoinMatrix<T>)]) -> Vec<Layer<T>> {
    let mut phases = Vec::new();
    let mut slots: BTreeMap<usize, Vec<Beamsplitter<T>>> = BTreeMap::new();
    for (first, block) in blocks {
        let (rotations, diag) = givens_decomposition(block);
        phases.extend(
            diag.into_iter().enumerate().filter(|(_, p)| *p != T::zero()).map(|(i, p)| (first + i, p)),
        );
        // slot k holds the k-th rotation to apply; order within a sector is fixed
        for (k, (row, g)) in rotations.into_iter().enumerate() {
            slots
                .entry(k)
                .or_default()
                .push(Beamsplitter { modes: (first + row, first + row + 1), matrix: g });
        }
    }
    std::iter::once(Layer::Phases(phases)).chain(slots.into_values().map(Layer::Beamsplitters)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub mode_count: usize,
    pub max_deviation: f64,
    /// `max |U^dagger U - I|`, when the dense step unitary was formed.
    pub unitarity_deviation: Option<f64>,
}

/// Compares one circuit step against one simulator step on every basis mode.
pub fn verify_circuit<T: Real>(
    circuit: &CircuitDescription<T>,
    spec: &WalkSpec<T>,
) -> Result<VerificationReport> {
    circuit.validate()?;
    let map = ModeMap::for_spec(spec, circuit.mode_count.max(DEFAULT_MODE_CAP))?;
    if map.mode_count() != circuit.mode_count {
        return Err(WalkError::Dimension(format!(
            "circuit has {} modes, the walk needs {}",
            circuit.mode_count,
            map.mode_count()
        )));
    }
    let columns: Vec<(Vec<Complex<T>>, f64, usize)> = (0..circuit.mode_count)
        .into_par_iter()
        .map(|col| {
            let got = circuit.step_column(col);
            let reference = evolution::step(&StateVector::basis(map.ket(col)), spec)?;
            let want = map.to_vector(&reference);
            let (row, dev) = got
                .iter()
                .zip(&want)
                .map(|(g, w)| (*g - *w).norm().as_f64())
                .enumerate()
                .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
            Ok((got, dev, row))
        })
        .collect::<Result<_>>()?;

    let (mut worst, mut at) = (0.0f64, (0, 0));
    for (col, (_, dev, row)) in columns.iter().enumerate() {
        if *dev > worst {
            worst = *dev;
            at = (*row, col);
        }
    }
    if !(worst < VERIFY_TOLERANCE) {
        return Err(WalkError::Verification { deviation: worst, row: at.0, col: at.1 });
    }
    let unitarity_deviation = (circuit.mode_count <= DENSE_UNITARITY_LIMIT).then(|| {
        let n = circuit.mode_count;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dot: Complex<T> = columns[i]
                    .0
                    .iter()
                    .zip(&columns[j].0)
                    .fold(Complex::default(), |acc, (a, b)| acc + a.conj() * b);
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((dot - Complex::new(T::lit(target), T::zero())).norm().as_f64());
            }
        }
        dev
    });
    Ok(VerificationReport { mode_count: circuit.mode_count, max_deviation: worst, unitarity_deviation })
}

#[derive(Serialize, Deserialize)]
struct CircuitDocument {
    format: String,
    mode_count: usize,
    basis_labels: Vec<String>,
    layers: Vec<LayerDocument>,
    repetitions: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum LayerDocument {
    Permutation { map: Vec<usize> },
    Beamsplitter { blocks: Vec<BlockDocument> },
    Phase { phases: Vec<(usize, f64)> },
}

#[derive(Serialize, Deserialize)]
struct BlockDocument {
    modes: [usize; 2],
    /// Row-major `[re, im]` pairs.
    matrix: [[f64; 2]; 4],
}

impl<T: Real> CircuitDescription<T> {
    pub fn to_json(&self) -> String {
        let layers = self
            .layers
            .iter()
            .map(|l| match l {
                Layer::Permutation(p) => LayerDocument::Permutation { map: p.clone() },
                Layer::Beamsplitters(bs) => LayerDocument::Beamsplitter {
                    blocks: bs
                        .iter()
                        .map(|b| BlockDocument {
                            modes: [b.modes.0, b.modes.1],
                            matrix: [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(r, c)| {
                                let z = b.matrix.get(r, c);
                                [z.re.as_f64(), z.im.as_f64()]
                            }),
                        })
                        .collect(),
                },
                Layer::Phases(ps) => {
                    LayerDocument::Phase { phases: ps.iter().map(|&(m, p)| (m, p.as_f64())).collect() }
                }
            })
            .collect();
        let doc = CircuitDocument {
            format: CIRCUIT_FORMAT.to_string(),
            mode_count: self.mode_count,
            basis_labels: self.basis_labels.clone(),
            layers,
            repetitions: self.repetitions,
        };
        serde_json::to_string_pretty(&doc).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CircuitDocument =
            serde_json::from_str(text).map_err(|e| WalkError::InvalidSpec(e.to_string()))?;
        if doc.format != CIRCUIT_FORMAT {
            return Err(WalkError::InvalidSpec(format!("unsupported circuit format '{}'", doc.format)));
        }
        let layers = doc
            .layers
            .into_iter()
            .map(|l| match l {
                LayerDocument::Permutation { map } => Layer::Permutation(map),
                LayerDocument::Beamsplitter { blocks } => Layer::Beamsplitters(
                    blocks
                        .into_iter()
                        .map(|b| {
                            let z = b.matrix.map(|[re, im]| Complex::new(T::lit(re), T::lit(im)));
                            Beamsplitter {
                                modes: (b.modes[0], b.modes[1]),
                                matrix: CoinMatrix::from_rows(&[vec![z[0], z[1]], vec![z[2], z[3]]])
                                    .expect("2x2"),
                            }
                        })
                        .collect(),
                ),
                LayerDocument::Phase { phases } => {
                    Layer::Phases(phases.into_iter().map(|(m, p)| (m, T::lit(p))).collect())
                }
            })
            .collect();
        let circuit = Self {
            mode_count: doc.mode_count,
            basis_labels: doc.basis_labels,
            layers,
            repetitions: doc.repetitions,
        };
        circuit.validate()?;
        Ok(circuit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{balanced_coin, coin_2d, Coin2d};

    fn cyclic(n: usize, d: u32, coin: CoinSpec<f64>) -> WalkSpec<f64> {
        WalkSpec::new(n, 1, coin).with_boundary(Boundary::Cyclic(d))
    }

    #[test]
    fn mode_counts() {
        assert_eq!(enumerate_modes(2, 2, 2).unwrap().mode_count(), 8);
        assert_eq!(enumerate_modes(2, 1, 2).unwrap().mode_count(), 4);
        assert_eq!(enumerate_modes(3, 2, 4).unwrap().mode_count(), 48);
        assert!(matches!(enumerate_modes(2, 20, 2), Err(WalkError::Resource(_))));
        assert!(enumerate_modes(1, 2, 2).is_err());
    }

    #[test]
    fn mode_labels_round_trip() {
        let idx = enumerate_modes(3, 3, 2).unwrap();
        for m in 0..idx.mode_count() {
            let (s, mem) = idx.label(m);
            assert_eq!(idx.index(s, &mem), m);
        }
        // site-major, +1 (index 0) first
        assert_eq!(idx.label(0), (0, vec![0, 0, 0]));
        assert_eq!(idx.label(1), (0, vec![0, 0, 1]));
        assert_eq!(idx.label(8), (1, vec![0, 0, 0]));
    }

    #[test]
    fn goldfish_coin_layer_matches_balanced_coin() {
        let c = compile_layers(&cyclic(1, 2, CoinSpec::balanced())).unwrap();
        let Layer::Beamsplitters(blocks) = &c.layers[0] else { panic!("coin layer first") };
        assert_eq!(blocks.len(), 2);
        for b in blocks {
            // balanced coin is symmetric, so the mode block equals the coin
            assert!(b.matrix.max_deviation(&balanced_coin()) < 1e-15);
        }
        let Layer::Permutation(m) = &c.layers[2] else { panic!("memory layer last") };
        assert_eq!(m, &(0..4).collect::<Vec<_>>());
    }

    #[test]
    fn two_site_shift_is_an_involution() {
        let c = compile_layers(&cyclic(2, 2, CoinSpec::balanced())).unwrap();
        let Layer::Permutation(s) = &c.layers[1] else { panic!("shift layer") };
        let map = ModeMap::for_spec(&cyclic(2, 2, CoinSpec::balanced()), DEFAULT_MODE_CAP).unwrap();
        for m in 0..c.mode_count {
            assert_eq!(s[s[m]], m);
            let k = map.ket(m);
            if k.last() == CoinValue::PLUS {
                assert_ne!(map.ket(s[m]).site, k.site);
            }
        }
    }

    #[test]
    fn figure_instance_verifies() {
        let spec = cyclic(2, 2, CoinSpec::balanced());
        let c = compile_layers(&spec).unwrap();
        assert_eq!(c.mode_count, 8);
        let r = verify_circuit(&c, &spec).unwrap();
        assert!(r.max_deviation < 1e-10);
        assert!(r.unitarity_deviation.unwrap() < 1e-10);
    }

    #[test]
    fn identity_coin_gives_pure_permutation() {
        let coin = (0..2).fold(CoinSpec::balanced(), |c, x| {
            c.with_override(Site::Line(x), CoinMatrix::identity(2)).unwrap()
        });
        let spec = cyclic(2, 2, coin);
        let c = compile_layers(&spec).unwrap();
        for col in 0..c.mode_count {
            let v = c.step_column(col);
            assert_eq!(v.iter().filter(|a| a.norm() > 0.0).count(), 1);
            assert!(v.iter().all(|a| a.norm() == 0.0 || (a.re - 1.0).abs() < 1e-15));
        }
        verify_circuit(&c, &spec).unwrap();
    }

    #[test]
    fn corrupted_block_fails_verification() {
        let spec = cyclic(2, 2, CoinSpec::balanced());
        let mut c = compile_layers(&spec).unwrap();
        let Layer::Beamsplitters(blocks) = &mut c.layers[0] else { panic!() };
        blocks[1].matrix = crate::coin::biased_coin(0.3);
        assert!(matches!(verify_circuit(&c, &spec), Err(WalkError::Verification { .. })));
    }

    #[test]
    fn history_dependent_and_physical_coins_compile() {
        for mode in [EvolutionMode::Direct, EvolutionMode::Physical] {
            let spec = cyclic(3, 4, CoinSpec::biased(MemoryFunction::Linear { phi: 0.8 })).with_mode(mode);
            let c = compile_layers(&spec).unwrap();
            verify_circuit(&c, &spec).unwrap();
        }
    }

    #[test]
    fn two_dimensional_coins_decompose() {
        for kind in [Coin2d::Separable, Coin2d::Entangling] {
            let block = coin_2d::<f64>(kind).transpose();
            let (rotations, phases) = givens_decomposition(&block);
            assert!(rotations.len() <= 6);
            // rebuild: apply phases then rotations to each basis vector
            for col in 0..4 {
                let mut v = [Complex::default(); 4];
                v[col] = Complex::new(1.0, 0.0);
                for (i, p) in phases.iter().enumerate() {
                    v[i] *= Complex::from_polar(1.0, *p);
                }
                for (row, g) in &rotations {
                    let (a, b) = (v[*row], v[row + 1]);
                    v[*row] = g.get(0, 0) * a + g.get(0, 1) * b;
                    v[row + 1] = g.get(1, 0) * a + g.get(1, 1) * b;
                }
                for r in 0..4 {
                    assert!((v[r] - block.get(r, col)).norm() < 1e-14);
                }
            }
            let spec = WalkSpec::<f64>::new(1, 1, CoinSpec::two_dim(kind)).with_boundary(Boundary::Cyclic(3));
            let c = compile_layers(&spec).unwrap();
            assert_eq!(c.mode_count, 9 * 4);
            verify_circuit(&c, &spec).unwrap();
        }
    }

    #[test]
    fn unbounded_walks_do_not_compile() {
        let spec = WalkSpec::<f64>::new(2, 1, CoinSpec::balanced());
        assert!(matches!(compile_layers(&spec), Err(WalkError::MustBeCyclic)));
    }

    #[test]
    fn json_round_trip() {
        let spec =
            WalkSpec::new(2, 3, CoinSpec::two_dim(Coin2d::Entangling)).with_boundary(Boundary::Cyclic(2));
        let c: CircuitDescription<f64> = compile_layers(&spec).unwrap();
        let text = c.to_json();
        assert!(text.contains("\"format\": \"memwalk-circuit/1\""));
        let back = CircuitDescription::<f64>::from_json(&text).unwrap();
        assert_eq!(back.mode_count, c.mode_count);
        assert_eq!(back.layers.len(), c.layers.len());
        verify_circuit(&back, &spec).unwrap();
        assert!(CircuitDescription::<f64>::from_json(&text.replace("circuit/1", "circuit/9")).is_err());
    }
}
