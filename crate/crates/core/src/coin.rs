//! Small dense complex matrices for coin operators.
//!
//! Coin matrices act through the ket rule `|.., c> -> sum_j A[c][j] |.., j>`,
//! i.e. row `c` lists the amplitudes produced from input value `c`. Row and
//! column indices follow [`CoinValue::index`](crate::state::CoinValue::index):
//! `+1` is index 0 in 1D.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Result, WalkError};
use crate::scalar::Real;

/// Unitarity tolerance for coin matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CoinMatrix<T> {
    dim: usize,
    entries: SmallVec<[Complex<T>; 16]>,
}

impl<T: Real> CoinMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: SmallVec::from_elem(Complex::default(), dim * dim) }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same length as the
    /// row count.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(WalkError::Dimension("coin matrix must be square and non-empty".into()));
        }
        Ok(Self { dim, entries: rows.iter().flatten().copied().collect() })
    }

    pub fn from_real_rows<const D: usize>(rows: [[T; D]; D]) -> Self {
        Self { dim: D, entries: rows.iter().flatten().map(|&v| Complex::new(v, T::zero())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.dim).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.set(c, r, self.get(r, c).conj());
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.set(c, r, self.get(r, c));
            }
        }
        m
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&e| e * factor).collect() }
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let d = self.dim * other.dim;
        let mut m = Self::zeros(d);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.get(r1, c1);
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        m.set(r1 * other.dim + r2, c1 * other.dim + c2, a * other.get(r2, c2));
                    }
                }
            }
        }
        m
    }

    /// Largest elementwise deviation `|A A^dagger - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self * &self.adjoint();
        let id = Self::identity(self.dim);
        prod.max_deviation(&id)
    }

    pub fn check_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation.is_nan() || deviation > UNITARY_TOLERANCE {
            return Err(WalkError::NonUnitary { deviation });
        }
        Ok(())
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (*a - *b).norm().as_f64()).fold(0.0, f64::max)
    }
}

impl<T: Real> Mul for &CoinMatrix<T> {
    type Output = CoinMatrix<T>;

    fn mul(self, rhs: Self) -> CoinMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let d = self.dim;
        let mut m = CoinMatrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = Complex::default();
                for k in 0..d {
                    acc += self.get(r, k) * rhs.get(k, c);
                }
                m.set(r, c, acc);
            }
        }
        m
    }
}

impl<T: fmt::Debug> fmt::Debug for CoinMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.chunks(self.dim.max(1))).finish()
    }
}

/// Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

pub fn pauli<T: Real>(axis: Pauli) -> CoinMatrix<T> {
    let (o, z, i) =
        (Complex::new(T::one(), T::zero()), Complex::default(), Complex::new(T::zero(), T::one()));
    let rows = match axis {
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    };
    CoinMatrix::from_rows(&rows.map(|r| r.to_vec())).expect("2x2")
}

/// `exp(i angle sigma) = cos(angle) I + i sin(angle) sigma`.
pub fn pauli_exp<T: Real>(axis: Pauli, angle: T) -> CoinMatrix<T> {
    let id = CoinMatrix::identity(2).scale(Complex::new(angle.cos(), T::zero()));
    let rot = pauli(axis).scale(Complex::new(T::zero(), angle.sin()));
    let mut m = id;
    for r in 0..2 {
        for c in 0..2 {
            m.set(r, c, m.get(r, c) + rot.get(r, c));
        }
    }
    m
}

/// The balanced coin `exp(-i pi/4 sigma_x) = [[1, -i], [-i, 1]] / sqrt 2`.
pub fn balanced_coin<T: Real>() -> CoinMatrix<T> {
    pauli_exp(Pauli::X, -T::FRAC_PI_4())
}

/// History-dependent coin `[[cos t, sin t], [-sin t, cos t]]`.
pub fn biased_coin<T: Real>(theta: T) -> CoinMatrix<T> {
    let (s, c) = theta.sin_cos();
    CoinMatrix::from_real_rows([[c, s], [-s, c]])
}

/// Two-dimensional coin families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coin2d {
    /// Balanced coin applied to each axis independently.
    Separable,
    /// Separable coin right-multiplied by the permutation swapping `(-,+)` and `(-,-)`.
    Entangling,
}

pub fn coin_2d<T: Real>(kind: Coin2d) -> CoinMatrix<T> {
    let a = balanced_coin::<T>();
    let separable = a.kron(&a);
    match kind {
        Coin2d::Separable => separable,
        Coin2d::Entangling => {
            let (o, z) = (T::one(), T::zero());
            let swap = CoinMatrix::from_real_rows([[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]]);
            &separable * &swap
        }
    }
}

/// Block `exp(i pi/4 sx) exp(-i angle sz) exp(-i pi/4 sx)` that the conditional
/// unitary applies to `c_N` inside one memory sector.
pub fn conditional_block<T: Real>(angle: T) -> CoinMatrix<T> {
    let left = pauli_exp(Pauli::X, T::FRAC_PI_4());
    let mid = pauli_exp(Pauli::Z, -angle);
    let right = pauli_exp(Pauli::X, -T::FRAC_PI_4());
    &(&left * &mid) * &right
}
