mod common;

use common::{Rule, State};
use memwalk::*;

fn to_library(state: &State, n: usize, dims: Dims) -> StateVector64 {
    let amps = state.iter().map(|((x, y, mem), a)| {
        let site = match dims {
            Dims::One => Site::Line(*x),
            Dims::Two => Site::Plane(*x, *y),
        };
        let memory = mem.iter().map(|&i| CoinValue::from_index(dims, i));
        (BasisState::new(site, memory).unwrap(), *a)
    });
    StateVector::from_amplitudes(dims, n, amps).unwrap()
}

fn max_amplitude_gap(lib: &StateVector64, reference: &State, dims: Dims) -> f64 {
    let n = lib.memory_len();
    let expected = to_library(reference, n, dims);
    let mut gap: f64 = 0.0;
    for (ket, a) in expected.iter() {
        gap = gap.max((lib.amplitude(ket) - a).norm());
    }
    for (ket, a) in lib.iter() {
        gap = gap.max((expected.amplitude(ket) - a).norm());
    }
    gap
}

fn library_coin(rule: Rule) -> CoinSpec<f64> {
    match rule {
        Rule::Balanced => CoinSpec::balanced(),
        Rule::Trivial => CoinSpec::biased(MemoryFunction::Trivial),
        Rule::Linear(phi) => CoinSpec::biased(MemoryFunction::Linear { phi }),
        Rule::Abs(phi) => CoinSpec::biased(MemoryFunction::Absolute { phi }),
        Rule::NegAbs(phi) => CoinSpec::biased(MemoryFunction::NegativeAbsolute { phi }),
    }
}

#[test]
fn one_dimensional_walks_match_reference() {
    let rules = [
        Rule::Balanced,
        Rule::Trivial,
        Rule::Linear(0.7),
        Rule::Linear(-1.0),
        Rule::Abs(0.4),
        Rule::NegAbs(1.0),
    ];
    for n in 1..=5 {
        for rule in rules {
            if n == 1 && !matches!(rule, Rule::Balanced | Rule::Trivial) {
                continue;
            }
            for (input, reference_input) in [
                (InputSpec::symmetrized(), common::symmetrized(n, 1)),
                (InputSpec::product(CoinValue::PLUS), common::product(n, 0)),
            ] {
                let spec = WalkSpec64::new(n, 9, library_coin(rule)).with_input(input);
                let mut reference = reference_input;
                let mut state = spec.input_state().unwrap();
                for _ in 0..spec.steps {
                    reference = common::step_1d(&reference, rule);
                    state = step(&state, &spec).unwrap();
                    let gap = max_amplitude_gap(&state, &reference, Dims::One);
                    assert!(gap < 1e-13, "N={n} {rule:?}: gap {gap}");
                }
            }
        }
    }
}

#[test]
fn two_dimensional_walks_match_reference() {
    for (kind, coin) in [(Coin2d::Separable, common::separable()), (Coin2d::Entangling, common::entangling())]
    {
        for n in [1, 2, 4] {
            let spec = WalkSpec64::new(n, 5, CoinSpec::two_dim(kind));
            let mut reference = common::symmetrized(n, 2);
            let out = evolve(&spec.input_state().unwrap(), &spec).unwrap();
            for _ in 0..spec.steps {
                reference = common::step_2d(&reference, &coin);
            }
            let gap = max_amplitude_gap(&out, &reference, Dims::Two);
            assert!(gap < 1e-13, "{kind:?} N={n}: gap {gap}");
        }
    }
}

#[test]
fn library_coins_equal_literal_matrices() {
    let lit = common::separable();
    let sep = coin_2d::<f64>(Coin2d::Separable);
    let ent = coin_2d::<f64>(Coin2d::Entangling);
    let lit_ent = common::entangling();
    for r in 0..4 {
        for col in 0..4 {
            assert!((sep.get(r, col) - lit[r][col]).norm() < 1e-15);
            assert!((ent.get(r, col) - lit_ent[r][col]).norm() < 1e-15);
        }
    }
    let b = balanced_coin::<f64>();
    let lit = common::balanced();
    for r in 0..2 {
        for col in 0..2 {
            assert!((b.get(r, col) - lit[r][col]).norm() < 1e-15);
        }
    }
}

#[test]
fn product_elephant_is_binomial() {
    for t in [4usize, 8, 12] {
        let spec =
            WalkSpec64::new(t, t, CoinSpec::balanced()).with_input(InputSpec::product(CoinValue::PLUS));
        let d = position_distribution(&evolve(&spec.input_state().unwrap(), &spec).unwrap());
        let line = d.as_line().unwrap();
        for m in 0..=t {
            let x = 2 * m as i64 - t as i64;
            let want = common::binomial(t as u64, m as u64) / 2f64.powi(t as i32);
            assert!((line.get(x) - want).abs() < 1e-13, "t={t} x={x}");
        }
    }
}

/// With the two-term input both branches reach the same kets once every
/// register has been rewritten, so the amplitude on `x = 2m - t` carries a
/// factor `1 + (-1)^(t-m) u^t` (|u| = 1): alternate sites double or vanish.
#[test]
fn symmetrized_elephant_interferes() {
    let t = 12usize;
    let spec = WalkSpec64::new(t, t, CoinSpec::balanced());
    let d = position_distribution(&evolve(&spec.input_state().unwrap(), &spec).unwrap());
    let line = d.as_line().unwrap();
    let mut reference = common::symmetrized(t, 1);
    for _ in 0..t {
        reference = common::step_1d(&reference, Rule::Balanced);
    }
    let reference = common::marginal(&reference);
    for m in 0..=t {
        let x = 2 * m as i64 - t as i64;
        let want = if m % 2 == 0 { 2.0 * common::binomial(12, m as u64) / 4096.0 } else { 0.0 };
        assert!((line.get(x) - want).abs() < 1e-13, "x={x}: {} vs {want}", line.get(x));
        assert!((reference.get(&(x, 0)).copied().unwrap_or(0.0) - want).abs() < 1e-13);
    }
}

#[test]
fn classical_regime_before_registers_repeat() {
    let n = 12;
    let spec = WalkSpec64::new(n, 11, CoinSpec::balanced());
    let series = variance_series(&spec, 11).unwrap();
    for t in 1..=11 {
        assert!((series.values[t] - t as f64).abs() < 1e-9, "t={t}: {}", series.values[t]);
    }
}

#[test]
fn single_step_from_plus_splits_evenly() {
    let spec = WalkSpec64::new(1, 1, CoinSpec::balanced()).with_input(InputSpec::product(CoinValue::PLUS));
    let d = position_distribution(&evolve(&spec.input_state().unwrap(), &spec).unwrap());
    let line = d.as_line().unwrap();
    assert!((line.get(1) - 0.5).abs() < 1e-15);
    assert!((line.get(-1) - 0.5).abs() < 1e-15);
}

#[test]
fn single_precision_tracks_double() {
    let s64 = WalkSpec64::new(3, 10, CoinSpec::biased(MemoryFunction::Linear { phi: 0.5 }));
    let s32 = WalkSpec32::new(3, 10, CoinSpec::biased(MemoryFunction::Linear { phi: 0.5 }));
    let d64 = position_distribution(&evolve(&s64.input_state().unwrap(), &s64).unwrap());
    let d32 = position_distribution(&evolve(&s32.input_state().unwrap(), &s32).unwrap());
    for (x, p) in d64.as_line().unwrap().iter() {
        assert!((f64::from(d32.as_line().unwrap().get(x)) - p).abs() < 1e-5);
    }
}
