use memwalk::*;

#[test]
fn single_coin_disorder_localizes() {
    let spec = WalkSpec64::new(1, 50, CoinSpec::random_angle(make_field(0)));
    let r = run_ensemble(&spec, 30, 11, 50).unwrap();
    // sigma^2(t)/t keeps falling over the second half
    let ratio: Vec<f64> = (25..=50).map(|t| r.mean[t] / t as f64).collect();
    let head = ratio[..5].iter().sum::<f64>() / 5.0;
    let tail = ratio[ratio.len() - 5..].iter().sum::<f64>() / 5.0;
    assert!(tail < head, "{head} -> {tail}");
}

#[test]
fn trivial_memory_with_disorder_spreads_linearly() {
    let spec = WalkSpec64::new(5, 50, CoinSpec::random_angle(make_field(0)));
    let r = run_ensemble(&spec, 30, 11, 50).unwrap();
    let lin = linear_fit(&r.series()).unwrap();
    let quad = quadratic_fit(&r.series()).unwrap();
    assert!(lin.r2 > 0.95);
    // over t <= 50 the linear term carries more variance than the quadratic one
    assert!(quad.b * 50.0 > quad.a * 2500.0);
}

#[test]
fn reruns_are_bit_identical() {
    let spec = WalkSpec64::new(3, 20, CoinSpec::biased(MemoryFunction::RandomField(make_field(0))));
    let a = run_ensemble(&spec, 5, 99, 20).unwrap();
    let b = run_ensemble(&spec, 5, 99, 20).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seeds, (99..104).collect::<Vec<_>>());
    let c = run_ensemble(&spec, 5, 100, 20).unwrap();
    assert_ne!(a.mean, c.mean);
}
