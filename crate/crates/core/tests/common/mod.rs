//! Independent reference walk: literal coin matrices, a plain map of kets and
//! the step rules written out by hand. Shares no code with the library.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

pub type C = Complex64;

/// `(x, y, memory)`; 1D kets keep `y = 0` and memory entries in `{0, 1}`
/// (`0` = `+1`), 2D memory entries index `((+,+), (+,-), (-,+), (-,-))`.
pub type Ket = (i64, i64, Vec<usize>);
pub type State = BTreeMap<Ket, C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn balanced() -> [[C; 2]; 2] {
    let h = FRAC_1_SQRT_2;
    [[c(h, 0.0), c(0.0, -h)], [c(0.0, -h), c(h, 0.0)]]
}

pub fn biased(theta: f64) -> [[C; 2]; 2] {
    let (s, co) = theta.sin_cos();
    [[c(co, 0.0), c(s, 0.0)], [c(-s, 0.0), c(co, 0.0)]]
}

pub fn separable() -> Vec<Vec<C>> {
    let a = balanced();
    let mut m = vec![vec![C::default(); 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            m[r][col] = a[r / 2][col / 2] * a[r % 2][col % 2];
        }
    }
    m
}

pub fn entangling() -> Vec<Vec<C>> {
    let s = separable();
    let swap = [0, 1, 3, 2];
    (0..4).map(|r| (0..4).map(|col| s[r][swap[col]]).collect()).collect()
}

pub fn sign(i: usize) -> i64 {
    if i == 0 {
        1
    } else {
        -1
    }
}

pub fn shift2(i: usize) -> (i64, i64) {
    (sign(i / 2), sign(i % 2))
}

/// Angle rule for the 1D history-dependent coins.
#[derive(Clone, Copy, Debug)]
pub enum Rule {
    Balanced,
    Trivial,
    Linear(f64),
    Abs(f64),
    NegAbs(f64),
}

pub fn theta(rule: Rule, memory: &[usize]) -> f64 {
    let n = memory.len();
    let s: i64 = memory[..n - 1].iter().map(|&i| sign(i)).sum();
    let frac = if n > 1 { s as f64 / (n - 1) as f64 } else { 0.0 };
    match rule {
        Rule::Balanced | Rule::Trivial => FRAC_PI_4,
        Rule::Linear(phi) => FRAC_PI_4 + phi * FRAC_PI_4 * frac,
        Rule::Abs(phi) => FRAC_PI_4 + phi * FRAC_PI_4 * frac.abs(),
        Rule::NegAbs(phi) => FRAC_PI_4 - phi * FRAC_PI_4 * frac.abs(),
    }
}

pub fn step_1d(state: &State, rule: Rule) -> State {
    let mut out = State::new();
    for ((x, _, mem), a) in state {
        let coin = match rule {
            Rule::Balanced => balanced(),
            r => biased(theta(r, mem)),
        };
        let last = *mem.last().unwrap();
        for j in 0..2 {
            let amp = a * coin[last][j];
            let mut m = mem.clone();
            *m.last_mut().unwrap() = j;
            m.rotate_right(1);
            *out.entry((x + sign(j), 0, m)).or_default() += amp;
        }
    }
    out
}

pub fn step_2d(state: &State, coin: &[Vec<C>]) -> State {
    let mut out = State::new();
    for ((x, y, mem), a) in state {
        let last = *mem.last().unwrap();
        for j in 0..4 {
            let amp = a * coin[last][j];
            let mut m = mem.clone();
            *m.last_mut().unwrap() = j;
            m.rotate_right(1);
            let (dx, dy) = shift2(j);
            *out.entry((x + dx, y + dy, m)).or_default() += amp;
        }
    }
    out
}

pub fn symmetrized(n: usize, dims: usize) -> State {
    let minus = if dims == 1 { 1 } else { 3 };
    let mut s = State::new();
    s.insert((0, 0, vec![0; n]), c(FRAC_1_SQRT_2, 0.0));
    s.insert((0, 0, vec![minus; n]), c(FRAC_1_SQRT_2, 0.0));
    s
}

pub fn product(n: usize, index: usize) -> State {
    let mut s = State::new();
    s.insert((0, 0, vec![index; n]), c(1.0, 0.0));
    s
}

pub fn marginal(state: &State) -> BTreeMap<(i64, i64), f64> {
    let mut p = BTreeMap::new();
    for ((x, y, _), a) in state {
        *p.entry((*x, *y)).or_insert(0.0) += a.norm_sqr();
    }
    p
}

pub fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
