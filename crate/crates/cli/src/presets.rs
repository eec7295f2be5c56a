//! Figure-reproduction presets.

use crate::config::{CoinKind, Emit, ExperimentConfig, InputChoice, Measure, MemoryFnKind, Record};
use memwalk::CoinValue;

pub struct Preset {
    pub name: &'static str,
    pub figure: &'static str,
    pub summary: &'static str,
}

pub const CATALOG: &[Preset] = &[
    Preset { name: "goldfish-12", figure: "plots_3d", summary: "N=1, t=12, symmetrized input, every step" },
    Preset {
        name: "elephant-12",
        figure: "plots_3d",
        summary: "N=t=12, product input |0,+1..+1>, every step",
    },
    Preset {
        name: "outputs-memory",
        figure: "outputs_memory",
        summary: "t=12 distributions for N in {1,3,10,12}",
    },
    Preset {
        name: "postselect",
        figure: "outputs_postselect",
        summary: "N=t=12, last four registers unmeasured, all +1, all -1",
    },
    Preset {
        name: "two-dimensions",
        figure: "two_dimensions",
        summary: "2D t=6, separable and entangling coins, N in {1,6}",
    },
    Preset {
        name: "ent-dyn",
        figure: "ent_dyn",
        summary: "2D spatial entanglement S(t) for the same four walks",
    },
    Preset {
        name: "wise-phi",
        figure: "wise_phi",
        summary: "N=5, t=12, linear memory, phi in {0,0.5,1}, input |0,+1..+1>",
    },
    Preset {
        name: "wise-spread",
        figure: "wise_spread",
        summary: "variance series for the linear memory function",
    },
    Preset {
        name: "second-diff",
        figure: "second_diff",
        summary: "N=5, t=12, absolute memory function, phi=1",
    },
    Preset {
        name: "enhanced-diff",
        figure: "enhanced_diff",
        summary: "N=5, t=12, negative absolute memory, phi in {0.5,1}",
    },
    Preset {
        name: "wise-spread-enh",
        figure: "wise_spread_enh",
        summary: "variance series for the negative absolute memory function",
    },
    Preset {
        name: "fig-randomfig",
        figure: "Randomfig",
        summary: "mean and std of sigma^2(t) over seeded disorder, six walks",
    },
    Preset { name: "lo-const", figure: "lo_const", summary: "optical circuit for d=2, N=2, balanced coin" },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    CATALOG.iter().find(|p| p.name == name)
}

const SWEEP: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn phi_label(phi: f64) -> String {
    format!("phi{phi}")
}

impl Preset {
    /// Run-level defaults plus one walk per series.
    pub fn expand(&self) -> (ExperimentConfig, Vec<(String, ExperimentConfig)>) {
        let cfg = ExperimentConfig::default;
        let one = |label: &str| vec![(label.to_string(), cfg())];
        let product = Some(InputChoice::ProductPlus);
        match self.name {
            "goldfish-12" => (
                ExperimentConfig {
                    memory: Some(1),
                    steps: Some(12),
                    input: Some(InputChoice::Sym),
                    emit: Some(Emit::Dist),
                    record: Some(Record::All),
                    ..cfg()
                },
                one("goldfish"),
            ),
            "elephant-12" => (
                ExperimentConfig {
                    memory: Some(12),
                    steps: Some(12),
                    input: product,
                    emit: Some(Emit::Dist),
                    record: Some(Record::All),
                    ..cfg()
                },
                one("elephant"),
            ),
            "outputs-memory" => (
                ExperimentConfig { steps: Some(12), input: product, emit: Some(Emit::Dist), ..cfg() },
                [1, 3, 10, 12]
                    .iter()
                    .map(|&n| (format!("N{n}"), ExperimentConfig { memory: Some(n), ..cfg() }))
                    .collect(),
            ),
            "postselect" => {
                let four = |c: CoinValue| Some(Measure::last(4, Some(vec![c; 4])));
                (
                    ExperimentConfig {
                        memory: Some(12),
                        steps: Some(12),
                        input: product,
                        emit: Some(Emit::Dist),
                        ..cfg()
                    },
                    vec![
                        ("none".to_string(), cfg()),
                        ("plus".to_string(), ExperimentConfig { measure: four(CoinValue::PLUS), ..cfg() }),
                        ("minus".to_string(), ExperimentConfig { measure: four(CoinValue::MINUS), ..cfg() }),
                    ],
                )
            }
            "two-dimensions" | "ent-dyn" => {
                let (emit, record) = if self.name == "ent-dyn" {
                    (Emit::Entanglement, Record::All)
                } else {
                    (Emit::Dist, Record::Final)
                };
                let series = [("sep", CoinKind::Sep2d), ("ent", CoinKind::Ent2d)]
                    .iter()
                    .flat_map(|&(tag, coin)| {
                        [1usize, 6].map(|n| {
                            (
                                format!("{tag}-N{n}"),
                                ExperimentConfig { coin: Some(coin), memory: Some(n), ..cfg() },
                            )
                        })
                    })
                    .collect();
                (
                    ExperimentConfig {
                        dims: Some(2),
                        steps: Some(6),
                        input: product,
                        emit: Some(emit),
                        record: Some(record),
                        ..cfg()
                    },
                    series,
                )
            }
            "wise-phi" | "wise-spread" => {
                let (emit, phis): (Emit, &[f64]) = if self.name == "wise-phi" {
                    (Emit::Dist, &[0.0, 0.5, 1.0])
                } else {
                    (Emit::Variance, &SWEEP)
                };
                (
                    ExperimentConfig {
                        memory: Some(5),
                        steps: Some(12),
                        memory_fn: Some(MemoryFnKind::Linear),
                        input: product,
                        emit: Some(emit),
                        record: Some(Record::All),
                        ..cfg()
                    },
                    phis.iter()
                        .map(|&phi| (phi_label(phi), ExperimentConfig { phi: Some(phi), ..cfg() }))
                        .collect(),
                )
            }
            "second-diff" => (
                ExperimentConfig {
                    memory: Some(5),
                    steps: Some(12),
                    memory_fn: Some(MemoryFnKind::Abs),
                    phi: Some(1.0),
                    input: Some(InputChoice::Sym),
                    emit: Some(Emit::Dist),
                    record: Some(Record::All),
                    ..cfg()
                },
                one("abs-phi1"),
            ),
            "enhanced-diff" | "wise-spread-enh" => {
                let (emit, phis): (Emit, &[f64]) = if self.name == "enhanced-diff" {
                    (Emit::Dist, &[0.5, 1.0])
                } else {
                    (Emit::Variance, &SWEEP)
                };
                (
                    ExperimentConfig {
                        memory: Some(5),
                        steps: Some(12),
                        memory_fn: Some(MemoryFnKind::Negabs),
                        input: Some(InputChoice::Sym),
                        emit: Some(emit),
                        record: Some(Record::All),
                        ..cfg()
                    },
                    phis.iter()
                        .map(|&phi| (phi_label(phi), ExperimentConfig { phi: Some(phi), ..cfg() }))
                        .collect(),
                )
            }
            "fig-randomfig" => {
                let walk = |n: usize, f: Option<MemoryFnKind>, phi: Option<f64>| ExperimentConfig {
                    memory: Some(n),
                    memory_fn: f,
                    phi,
                    ..cfg()
                };
                (
                    ExperimentConfig {
                        steps: Some(50),
                        input: Some(InputChoice::Sym),
                        realizations: Some(30),
                        seed: Some(1),
                        emit: Some(Emit::Ensemble),
                        ..cfg()
                    },
                    vec![
                        ("N5-linear".into(), walk(5, Some(MemoryFnKind::Linear), Some(1.0))),
                        ("N1".into(), walk(1, None, None)),
                        ("N5-trivial".into(), walk(5, Some(MemoryFnKind::Trivial), None)),
                        ("N5-linear-random".into(), walk(5, Some(MemoryFnKind::Random), None)),
                        ("N5-trivial-random".into(), walk(5, Some(MemoryFnKind::RandomCoin), None)),
                        ("N1-random".into(), walk(1, Some(MemoryFnKind::RandomCoin), None)),
                    ],
                )
            }
            "lo-const" => (
                ExperimentConfig {
                    memory: Some(2),
                    steps: Some(1),
                    coin: Some(CoinKind::Balanced),
                    cyclic: Some(2),
                    emit: Some(Emit::Circuit),
                    ..cfg()
                },
                one("lo-const"),
            ),
            other => unreachable!("preset '{other}' has no definition"),
        }
    }
}
