//! Statistics over position distributions.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, WalkError};
use crate::evolution::{Trajectory, WalkSpec};
use crate::scalar::Real;
use crate::state::{Dims, Site, StateVector};

/// Tolerance on `sum p = 1`.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

/// 1D position distribution, support sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct LineDistribution<T> {
    support: Vec<i64>,
    probabilities: Vec<T>,
}

impl<T: Real> LineDistribution<T> {
    /// Validated constructor: probabilities must be non-negative and sum to 1.
    pub fn new(pairs: impl IntoIterator<Item = (i64, T)>) -> Result<Self> {
        let mut acc = BTreeMap::new();
        for (x, p) in pairs {
            if !(p >= T::zero()) {
                return Err(WalkError::Domain(format!("negative probability {p} at {x}")));
            }
            let e = acc.entry(x).or_insert_with(T::zero);
            *e += p;
        }
        let d = Self::from_sorted(acc);
        check_total(d.total())?;
        Ok(d)
    }

    fn from_sorted(map: BTreeMap<i64, T>) -> Self {
        let (support, probabilities) = map.into_iter().unzip();
        Self { support, probabilities }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.support.iter().copied().zip(self.probabilities.iter().copied())
    }

    pub fn get(&self, x: i64) -> T {
        self.support.binary_search(&x).map(|i| self.probabilities[i]).unwrap_or_else(|_| T::zero())
    }

    pub fn total(&self) -> T {
        self.probabilities.iter().copied().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Distribution of `x + offset`.
    pub fn shifted(&self, offset: i64) -> Self {
        Self {
            support: self.support.iter().map(|x| x + offset).collect(),
            probabilities: self.probabilities.clone(),
        }
    }
}

/// 2D distribution as a dense `p(x, y)` matrix over the occupied bounding box.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneDistribution<T> {
    x_min: i64,
    y_min: i64,
    width: usize,
    height: usize,
    /// Row-major with rows indexed by `x`.
    probabilities: Vec<T>,
}

impl<T: Real> PlaneDistribution<T> {
    pub fn new(pairs: impl IntoIterator<Item = ((i64, i64), T)>) -> Result<Self> {
        let mut acc: BTreeMap<(i64, i64), T> = BTreeMap::new();
        for (xy, p) in pairs {
            if !(p >= T::zero()) {
                return Err(WalkError::Domain(format!("negative probability {p} at {xy:?}")));
            }
            let e = acc.entry(xy).or_insert_with(T::zero);
            *e += p;
        }
        let d = Self::from_map(&acc);
        check_total(d.total())?;
        Ok(d)
    }

    fn from_map(map: &BTreeMap<(i64, i64), T>) -> Self {
        if map.is_empty() {
            return Self { x_min: 0, y_min: 0, width: 0, height: 0, probabilities: Vec::new() };
        }
        let x_min = map.keys().map(|k| k.0).min().unwrap_or(0);
        let x_max = map.keys().map(|k| k.0).max().unwrap_or(0);
        let y_min = map.keys().map(|k| k.1).min().unwrap_or(0);
        let y_max = map.keys().map(|k| k.1).max().unwrap_or(0);
        let width = (x_max - x_min + 1) as usize;
        let height = (y_max - y_min + 1) as usize;
        let mut probabilities = vec![T::zero(); width * height];
        for (&(x, y), &p) in map {
            probabilities[(x - x_min) as usize * height + (y - y_min) as usize] = p;
        }
        Self { x_min, y_min, width, height, probabilities }
    }

    /// Number of `x` values (matrix rows).
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of `y` values (matrix columns).
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> (i64, i64) {
        (self.x_min, self.y_min)
    }

    pub fn get(&self, x: i64, y: i64) -> T {
        let (i, j) = (x - self.x_min, y - self.y_min);
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.height {
            return T::zero();
        }
        self.probabilities[i as usize * self.height + j as usize]
    }

    /// Non-zero cells in `(x, y)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), T)> + '_ {
        self.probabilities.iter().enumerate().filter(|(_, p)| **p > T::zero()).map(|(k, &p)| {
            let (i, j) = (k / self.height, k % self.height);
            ((self.x_min + i as i64, self.y_min + j as i64), p)
        })
    }

    pub fn total(&self) -> T {
        self.probabilities.iter().copied().sum()
    }

    pub fn marginal_x(&self) -> LineDistribution<T> {
        let mut m = BTreeMap::new();
        for ((x, _), p) in self.iter() {
            let e = m.entry(x).or_insert_with(T::zero);
            *e += p;
        }
        LineDistribution::from_sorted(m)
    }

    pub fn marginal_y(&self) -> LineDistribution<T> {
        let mut m = BTreeMap::new();
        for ((_, y), p) in self.iter() {
            let e = m.entry(y).or_insert_with(T::zero);
            *e += p;
        }
        LineDistribution::from_sorted(m)
    }

    fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.width, self.height, |i, j| self.probabilities[i * self.height + j].as_f64())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Distribution<T> {
    Line(LineDistribution<T>),
    Plane(PlaneDistribution<T>),
}

impl<T: Real> Distribution<T> {
    /// Builds the distribution from accumulated per-site weights.
    pub fn from_site_weights(dims: Dims, weights: &BTreeMap<Site, T>) -> Self {
        match dims {
            Dims::One => Distribution::Line(LineDistribution::from_sorted(
                weights.iter().map(|(s, &p)| (s.coords().0, p)).collect(),
            )),
            Dims::Two => Distribution::Plane(PlaneDistribution::from_map(
                &weights.iter().map(|(s, &p)| (s.coords(), p)).collect(),
            )),
        }
    }

    pub fn dims(&self) -> Dims {
        match self {
            Distribution::Line(_) => Dims::One,
            Distribution::Plane(_) => Dims::Two,
        }
    }

    pub fn total(&self) -> T {
        match self {
            Distribution::Line(d) => d.total(),
            Distribution::Plane(d) => d.total(),
        }
    }

    pub fn as_line(&self) -> Result<&LineDistribution<T>> {
        match self {
            Distribution::Line(d) => Ok(d),
            Distribution::Plane(_) => Err(WalkError::Dimension("expected a 1D distribution".into())),
        }
    }

    pub fn as_plane(&self) -> Result<&PlaneDistribution<T>> {
        match self {
            Distribution::Plane(d) => Ok(d),
            Distribution::Line(_) => Err(WalkError::Dimension("expected a 2D distribution".into())),
        }
    }

    /// `(site, p)` pairs with `p > 0`.
    pub fn cells(&self) -> Vec<(Site, T)> {
        match self {
            Distribution::Line(d) => {
                d.iter().filter(|(_, p)| *p > T::zero()).map(|(x, p)| (Site::Line(x), p)).collect()
            }
            Distribution::Plane(d) => d.iter().map(|((x, y), p)| (Site::Plane(x, y), p)).collect(),
        }
    }
}

fn check_total<T: Real>(total: T) -> Result<()> {
    if (total.as_f64() - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(WalkError::Domain(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Site marginal `p(site) = sum over memory of |a|^2`.
pub(crate) fn site_weights<T: Real>(state: &StateVector<T>, scale: T, into: &mut BTreeMap<Site, T>) {
    for (ket, a) in state.iter() {
        let e = into.entry(ket.site).or_insert_with(T::zero);
        *e += scale * a.norm_sqr();
    }
}

/// Mean and variance `sum p_i (i - mu)^2` of a 1D distribution.
pub fn mean_and_variance<T: Real>(d: &LineDistribution<T>) -> Result<(T, T)> {
    if d.is_empty() {
        return Err(WalkError::Domain("empty distribution".into()));
    }
    let mu: T = d.iter().map(|(x, p)| p * T::lit(x as f64)).sum();
    let var = d
        .iter()
        .map(|(x, p)| {
            let dx = T::lit(x as f64) - mu;
            p * dx * dx
        })
        .sum();
    Ok((mu, var))
}

/// `sigma^2(t)` for `t = 0..=T`, optionally with a per-time ensemble spread.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceSeries<T> {
    pub times: Vec<usize>,
    pub values: Vec<T>,
    pub std: Option<Vec<T>>,
}

impl<T: Real> VarianceSeries<T> {
    pub fn from_values(values: Vec<T>) -> Self {
        Self { times: (0..values.len()).collect(), values, std: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, t: usize) -> Option<T> {
        self.times.iter().position(|&s| s == t).map(|i| self.values[i])
    }
}

/// Runs the 1D walk of `spec` for `horizon` steps, recording the variance of
/// the position marginal after each one.
pub fn variance_series<T: Real>(spec: &WalkSpec<T>, horizon: usize) -> Result<VarianceSeries<T>> {
    if horizon < 1 {
        return Err(WalkError::Domain("variance series needs at least one step".into()));
    }
    if spec.dims != Dims::One {
        return Err(WalkError::Dimension("variance series is defined for 1D walks".into()));
    }
    let spec = spec.clone().with_steps(horizon);
    let mut values = Vec::with_capacity(horizon + 1);
    for state in Trajectory::new(&spec)? {
        let state = state?;
        let mut w = BTreeMap::new();
        site_weights(&state, T::one(), &mut w);
        let d = Distribution::from_site_weights(Dims::One, &w);
        values.push(mean_and_variance(d.as_line()?)?.1);
    }
    Ok(VarianceSeries::from_values(values))
}

/// Least-squares polynomial fit result; `coefficients[k]` multiplies `t^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialFit {
    pub coefficients: Vec<f64>,
    pub r2: f64,
}

/// Quadratic fit `a t^2 + b t + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r2: f64,
}

/// Straight-line fit `slope t + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `values` against `times` with a polynomial of
/// the given degree.
pub fn polynomial_fit(times: &[f64], values: &[f64], degree: usize) -> Result<PolynomialFit> {
    let n = values.len();
    if times.len() != n {
        return Err(WalkError::Dimension("times and values differ in length".into()));
    }
    if n < degree + 2 {
        return Err(WalkError::DegenerateFit(format!("{n} points are too few for a degree-{degree} fit")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(WalkError::DegenerateFit("series is constant".into()));
    }
    let design = DMatrix::from_fn(n, degree + 1, |i, k| times[i].powi(k as i32));
    let rhs = DVector::from_column_slice(values);
    let coefficients = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| WalkError::DegenerateFit(e.to_string()))?;
    let residual = &design * &coefficients - rhs;
    let r2 = 1.0 - residual.norm_squared() / ss_tot;
    Ok(PolynomialFit { coefficients: coefficients.iter().copied().collect(), r2 })
}

fn series_points<T: Real>(series: &VarianceSeries<T>) -> (Vec<f64>, Vec<f64>) {
    (series.times.iter().map(|&t| t as f64).collect(), series.values.iter().map(|v| v.as_f64()).collect())
}

pub fn quadratic_fit<T: Real>(series: &VarianceSeries<T>) -> Result<QuadraticFit> {
    let (t, v) = series_points(series);
    let fit = polynomial_fit(&t, &v, 2)?;
    let k = &fit.coefficients;
    Ok(QuadraticFit { a: k[2], b: k[1], c: k[0], r2: fit.r2 })
}

pub fn linear_fit<T: Real>(series: &VarianceSeries<T>) -> Result<LinearFit> {
    let (t, v) = series_points(series);
    let fit = polynomial_fit(&t, &v, 1)?;
    Ok(LinearFit { slope: fit.coefficients[1], intercept: fit.coefficients[0], r2: fit.r2 })
}

/// Shannon entropy (bits) of the normalized singular values of `p(x, y)`.
/// Zero exactly when the distribution factorizes as `p(x) p(y)`.
pub fn spatial_entanglement<T: Real>(d: &PlaneDistribution<T>) -> Result<T> {
    if d.width == 0 || d.height == 0 || d.probabilities.iter().all(|p| *p == T::zero()) {
        return Err(WalkError::Domain("all-zero probability matrix".into()));
    }
    let singular = d.to_matrix().singular_values();
    let total: f64 = singular.iter().sum();
    let entropy = singular.iter().map(|s| s / total).filter(|l| *l > 0.0).map(|l| -l * l.log2()).sum::<f64>();
    Ok(T::lit(entropy.max(0.0)))
}

/// `1/2 sum |a_i - b_i|` over the union of supports.
pub fn total_variation<T: Real>(a: &Distribution<T>, b: &Distribution<T>) -> Result<T> {
    if a.dims() != b.dims() {
        return Err(WalkError::Dimension("distributions differ in dimensionality".into()));
    }
    let mut diff: BTreeMap<Site, T> = BTreeMap::new();
    for (s, p) in a.cells() {
        diff.insert(s, p);
    }
    for (s, p) in b.cells() {
        let e = diff.entry(s).or_insert_with(T::zero);
        *e -= p;
    }
    let sum: T = diff.values().map(|v| v.abs()).sum();
    Ok(sum / T::lit(2.0))
}

/// `|<a|b>|^2`.
pub fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    Ok(a.inner_product(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_product_input, BasisState, CoinValue};

    fn line(pairs: &[(i64, f64)]) -> LineDistribution<f64> {
        LineDistribution::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn two_point_variance() {
        let (mu, var) = mean_and_variance(&line(&[(1, 0.5), (-1, 0.5)])).unwrap();
        assert_eq!(mu, 0.0);
        assert_eq!(var, 1.0);
    }

    #[test]
    fn binomial_variance_matches_step_count() {
        // 12 independent +-1 steps: variance 12
        let total = 4096.0;
        let d =
            line(&(0..=12).map(|m| (2 * m as i64 - 12, binomial(12, m) as f64 / total)).collect::<Vec<_>>());
        let (mu, var) = mean_and_variance(&d).unwrap();
        assert!(mu.abs() < 1e-14);
        assert!((var - 12.0).abs() < 1e-12);
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn point_mass_and_empty() {
        assert_eq!(mean_and_variance(&line(&[(3, 1.0)])).unwrap(), (3.0, 0.0));
        let empty = LineDistribution::<f64>::from_sorted(BTreeMap::new());
        assert!(matches!(mean_and_variance(&empty), Err(WalkError::Domain(_))));
    }

    #[test]
    fn distributions_must_be_normalized() {
        assert!(LineDistribution::new([(0, 0.5f64)]).is_err());
        assert!(LineDistribution::new([(0, 1.5f64), (1, -0.5)]).is_err());
    }

    #[test]
    fn exact_quadratic_and_linear_series() {
        let sq = VarianceSeries::from_values((0..10).map(|t| (t * t) as f64).collect());
        let fit = quadratic_fit(&sq).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-10 && fit.b.abs() < 1e-9 && fit.c.abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-12);

        let lin = VarianceSeries::from_values((0..10).map(|t| t as f64).collect());
        let fit = quadratic_fit(&lin).unwrap();
        assert!(fit.a.abs() < 1e-10 && (fit.b - 1.0).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        let lfit = linear_fit(&lin).unwrap();
        assert!((lfit.slope - 1.0).abs() < 1e-12 && (lfit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fits() {
        let flat = VarianceSeries::from_values(vec![2.0; 6]);
        assert!(matches!(quadratic_fit(&flat), Err(WalkError::DegenerateFit(_))));
        let short = VarianceSeries::from_values(vec![0.0, 1.0, 4.0]);
        assert!(matches!(quadratic_fit(&short), Err(WalkError::DegenerateFit(_))));
    }

    #[test]
    fn product_distribution_has_zero_entropy() {
        let px = [0.2, 0.5, 0.3];
        let py = [0.1, 0.6, 0.2, 0.1];
        let d =
            PlaneDistribution::new(px.iter().enumerate().flat_map(|(i, a)| {
                py.iter().enumerate().map(move |(j, b)| ((i as i64, j as i64 - 1), a * b))
            }))
            .unwrap();
        assert!(spatial_entanglement(&d).unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_pair_has_one_bit() {
        let d = PlaneDistribution::new([((0, 0), 0.5f64), ((1, 1), 0.5)]).unwrap();
        assert!((spatial_entanglement(&d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_zero_matrix_is_a_domain_error() {
        let d = PlaneDistribution::<f64>::from_map(&BTreeMap::new());
        assert!(matches!(spatial_entanglement(&d), Err(WalkError::Domain(_))));
    }

    #[test]
    fn total_variation_extremes() {
        let a = Distribution::Line(line(&[(0, 0.25), (2, 0.75)]));
        assert_eq!(total_variation(&a, &a).unwrap(), 0.0);
        let p = Distribution::Line(line(&[(0, 1.0)]));
        let q = Distribution::Line(line(&[(5, 1.0)]));
        assert_eq!(total_variation(&p, &q).unwrap(), 1.0);
        let plane = Distribution::Plane(PlaneDistribution::new([((0, 0), 1.0)]).unwrap());
        assert!(total_variation(&p, &plane).is_err());
    }

    #[test]
    fn fidelity_of_basis_states() {
        let a: StateVector<f64> = make_product_input(2, Dims::One, CoinValue::PLUS, Site::Line(0)).unwrap();
        let b: StateVector<f64> = make_product_input(2, Dims::One, CoinValue::MINUS, Site::Line(0)).unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let c = StateVector::basis(BasisState::new(Site::Line(0), [CoinValue::PLUS]).unwrap());
        assert!(fidelity(&a, &c).is_err());
    }

    #[test]
    fn plane_marginals() {
        let d = PlaneDistribution::new([((0, 0), 0.5f64), ((1, 1), 0.25), ((1, -1), 0.25)]).unwrap();
        assert_eq!(d.marginal_x().get(1), 0.5);
        assert_eq!(d.marginal_y().get(-1), 0.25);
        assert_eq!((d.width(), d.height()), (2, 3));
        assert_eq!(d.get(1, -1), 0.25);
        assert_eq!(d.get(7, 7), 0.0);
    }
}
