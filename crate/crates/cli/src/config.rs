use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use memwalk::{
    Boundary, CoinFamily, CoinSpec, CoinValue, Dims, EvolutionMode, InputSpec, MemoryFunction, Sign,
    WalkSpec64,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_FORMAT: &str = "memwalk-config/1";

/// Upper bound on `sites * |c|^N` accepted before a run starts.
pub const KET_CAP: u128 = 1 << 26;

macro_rules! string_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [&'static str] = &[$($text),+];
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok(Self::$variant),)+
                    _ => Err(format!("unknown value '{s}', expected one of {}", Self::ALL.join("|"))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$variant => $text),+ })
            }
        }

        impl TryFrom<String> for $name {
            type Error = String;

            fn try_from(s: String) -> Result<Self, String> {
                s.parse()
            }
        }

        impl From<$name> for String {
            fn from(v: $name) -> String {
                v.to_string()
            }
        }
    };
}

string_enum!(MemoryFnKind {
    Trivial => "trivial",
    Linear => "linear",
    Abs => "abs",
    Negabs => "negabs",
    Random => "random",
    RandomCoin => "random-coin",
});

string_enum!(ModeKind { Direct => "direct", Physical => "physical" });

string_enum!(CoinKind { Balanced => "balanced", Sep2d => "sep2d", Ent2d => "ent2d" });

string_enum!(Emit {
    Dist => "dist",
    Variance => "variance",
    Ensemble => "ensemble",
    Entanglement => "entanglement",
    Circuit => "circuit",
});

string_enum!(InputChoice { Sym => "sym", ProductPlus => "product:+1", ProductMinus => "product:-1" });

/// Which time steps a dump includes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Record {
    All,
    Final,
    At(Vec<usize>),
}

impl Record {
    pub fn includes(&self, t: usize, steps: usize) -> bool {
        match self {
            Record::All => true,
            Record::Final => t == steps,
            Record::At(ts) => ts.contains(&t),
        }
    }
}

impl FromStr for Record {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "all" => Ok(Record::All),
            "final" => Ok(Record::Final),
            list => {
                let mut ts = list
                    .split(',')
                    .map(|v| v.trim().parse::<usize>().map_err(|_| format!("bad record time '{v}'")))
                    .collect::<Result<Vec<_>, _>>()?;
                ts.sort_unstable();
                ts.dedup();
                Ok(Record::At(ts))
            }
        }
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Record::All => f.write_str("all"),
            Record::Final => f.write_str("final"),
            Record::At(ts) => {
                let parts: Vec<String> = ts.iter().map(usize::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl TryFrom<String> for Record {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Record> for String {
    fn from(r: Record) -> String {
        r.to_string()
    }
}

/// Register measurement applied to each recorded state.
///
/// Syntax: `last:k=K,outcomes=o1,...`, `last:k=K,all-branches`,
/// `registers:r1,r2,outcomes=o1,o2` or `registers:r1,r2,all-branches`.
/// A 1D outcome is `+1` or `-1`; a 2D outcome is `+1/-1`. Register `i` is
/// memory slot `c_i`, which holds the coin from `i - 1` steps ago.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Measure {
    pub registers: Vec<usize>,
    pub outcomes: Option<Vec<CoinValue>>,
    text: String,
}

impl Measure {
    pub fn last(k: usize, outcomes: Option<Vec<CoinValue>>) -> Self {
        let text = match &outcomes {
            Some(o) => {
                let parts: Vec<String> = o.iter().map(|c| outcome_text(*c)).collect();
                format!("last:k={k},outcomes={}", parts.join(","))
            }
            None => format!("last:k={k},all-branches"),
        };
        Self { registers: (1..=k).collect(), outcomes, text }
    }

    pub fn check_dims(&self, dims: Dims) -> Result<(), CliError> {
        if let Some(o) = self.outcomes.iter().flatten().find(|c| c.dims() != dims) {
            return Err(CliError::Usage(format!("outcome {o} does not match a {}D walk", dims.count())));
        }
        Ok(())
    }
}

fn outcome_text(c: CoinValue) -> String {
    match c {
        CoinValue::Line(s) => format!("{:+}", s.value()),
        CoinValue::Plane(x, y) => format!("{:+}/{:+}", x.value(), y.value()),
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+1" | "1" | "+" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        _ => Err(format!("bad coin outcome '{s}'")),
    }
}

fn parse_outcome(s: &str) -> Result<CoinValue, String> {
    match s.split_once('/') {
        Some((x, y)) => Ok(CoinValue::Plane(parse_sign(x)?, parse_sign(y)?)),
        None => Ok(CoinValue::Line(parse_sign(s)?)),
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (form, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("measurement '{s}' must start with 'last:' or 'registers:'"))?;
        let mut registers = Vec::new();
        let mut k = None;
        let mut outcomes: Option<Vec<CoinValue>> = None;
        let mut all_branches = false;
        for token in rest.split(',').map(str::trim) {
            if let Some(v) = token.strip_prefix("k=") {
                k = Some(v.parse::<usize>().map_err(|_| format!("bad k '{v}'"))?);
            } else if let Some(v) = token.strip_prefix("outcomes=") {
                outcomes = Some(vec![parse_outcome(v)?]);
            } else if token == "all-branches" {
                all_branches = true;
            } else if let Some(o) = outcomes.as_mut() {
                o.push(parse_outcome(token)?);
            } else if form == "registers" {
                registers.push(token.parse::<usize>().map_err(|_| format!("bad register '{token}'"))?);
            } else {
                return Err(format!("unexpected token '{token}' in measurement"));
            }
        }
        match form {
            "last" => {
                let k = k.ok_or("'last' measurement needs k=K")?;
                registers = (1..=k).collect();
            }
            "registers" if k.is_none() => {}
            _ => return Err(format!("unknown measurement form '{form}'")),
        }
        if registers.is_empty() {
            return Err("measurement names no registers".into());
        }
        if all_branches == outcomes.is_some() {
            return Err("measurement needs exactly one of outcomes=... or all-branches".into());
        }
        if let Some(o) = &outcomes {
            if o.len() != registers.len() {
                return Err(format!("{} registers but {} outcomes", registers.len(), o.len()));
            }
        }
        Ok(Self { registers, outcomes, text: s.to_string() })
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl TryFrom<String> for Measure {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Measure> for String {
    fn from(m: Measure) -> String {
        m.text
    }
}

/// One experiment, as read from a config document, from flags, or from a
/// preset. Every field is optional so that layers can be overlaid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_fn: Option<MemoryFnKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin: Option<CoinKind>,
    /// Sites per axis of a periodic lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<Emit>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
        match cfg.format.as_deref() {
            Some(CONFIG_FORMAT) => {}
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unsupported config format '{other}', expected '{CONFIG_FORMAT}'"
                )))
            }
            None => return Err(CliError::Usage(format!("config lacks \"format\": \"{CONFIG_FORMAT}\""))),
        }
        if cfg.preset.is_some() && cfg.has_spec() {
            return Err(CliError::Usage(
                "a config names either a preset or an explicit walk, not both".into(),
            ));
        }
        Ok(cfg)
    }

    /// Whether any walk-defining key is set.
    pub fn has_spec(&self) -> bool {
        self.dims.is_some()
            || self.memory.is_some()
            || self.steps.is_some()
            || self.memory_fn.is_some()
            || self.phi.is_some()
            || self.mode.is_some()
            || self.input.is_some()
            || self.coin.is_some()
            || self.cyclic.is_some()
    }

    /// `self` with every key set in `top` replaced.
    pub fn overlay(self, top: &ExperimentConfig) -> ExperimentConfig {
        let top = top.clone();
        ExperimentConfig {
            format: top.format.or(self.format),
            preset: top.preset.or(self.preset),
            dims: top.dims.or(self.dims),
            memory: top.memory.or(self.memory),
            steps: top.steps.or(self.steps),
            memory_fn: top.memory_fn.or(self.memory_fn),
            phi: top.phi.or(self.phi),
            mode: top.mode.or(self.mode),
            input: top.input.or(self.input),
            coin: top.coin.or(self.coin),
            cyclic: top.cyclic.or(self.cyclic),
            measure: top.measure.or(self.measure),
            record: top.record.or(self.record),
            realizations: top.realizations.or(self.realizations),
            seed: top.seed.or(self.seed),
            out: top.out.or(self.out),
            emit: top.emit.or(self.emit),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn dims(&self) -> Result<Dims, CliError> {
        let from_coin = match self.coin {
            Some(CoinKind::Sep2d | CoinKind::Ent2d) => Some(Dims::Two),
            Some(CoinKind::Balanced) => Some(Dims::One),
            None => None,
        };
        let dims = match self.dims {
            Some(n) => Dims::from_count(n).map_err(|e| CliError::Usage(e.to_string()))?,
            None => from_coin.unwrap_or(Dims::One),
        };
        if from_coin.is_some_and(|d| d != dims) {
            return Err(CliError::Usage(format!(
                "coin '{}' does not fit a {}D walk",
                self.coin.unwrap(),
                dims.count()
            )));
        }
        Ok(dims)
    }

    /// Resolves the walk keys into a validated simulator spec.
    pub fn walk_spec(&self) -> Result<WalkSpec64, CliError> {
        let memory = self.memory.ok_or_else(|| CliError::Usage("memory length N is not set".into()))?;
        let steps = self.steps.ok_or_else(|| CliError::Usage("step count T is not set".into()))?;
        let dims = self.dims()?;
        let seed = self.seed();
        let phi = || self.phi.ok_or_else(|| CliError::Usage("this memory function needs --phi".into()));
        let family = match dims {
            Dims::Two => {
                if !matches!(self.memory_fn, None | Some(MemoryFnKind::Trivial)) {
                    return Err(CliError::Usage("2D walks support only the trivial memory function".into()));
                }
                match self.coin {
                    Some(CoinKind::Ent2d) => CoinFamily::Entangling2d,
                    _ => CoinFamily::Separable2d,
                }
            }
            Dims::One => match self.memory_fn {
                None => CoinFamily::Balanced,
                Some(MemoryFnKind::Trivial) => CoinFamily::Biased(MemoryFunction::Trivial),
                Some(MemoryFnKind::Linear) => CoinFamily::Biased(MemoryFunction::Linear { phi: phi()? }),
                Some(MemoryFnKind::Abs) => CoinFamily::Biased(MemoryFunction::Absolute { phi: phi()? }),
                Some(MemoryFnKind::Negabs) => {
                    CoinFamily::Biased(MemoryFunction::NegativeAbsolute { phi: phi()? })
                }
                Some(MemoryFnKind::Random) => {
                    CoinFamily::Biased(MemoryFunction::RandomField(memwalk::make_field(seed)))
                }
                Some(MemoryFnKind::RandomCoin) => CoinFamily::RandomAngle(memwalk::make_field(seed)),
            },
        };
        let input = match self.input.unwrap_or(InputChoice::Sym) {
            InputChoice::Sym => InputSpec::symmetrized(),
            InputChoice::ProductPlus => InputSpec::product(CoinValue::uniform(dims, Sign::Plus)),
            InputChoice::ProductMinus => InputSpec::product(CoinValue::uniform(dims, Sign::Minus)),
        };
        let mode = match self.mode.unwrap_or(ModeKind::Direct) {
            ModeKind::Direct => EvolutionMode::Direct,
            ModeKind::Physical => EvolutionMode::Physical,
        };
        let boundary = match self.cyclic {
            Some(0) => return Err(CliError::Usage("a cyclic lattice needs at least one site".into())),
            Some(d) => Boundary::Cyclic(d),
            None => Boundary::Unbounded,
        };
        let mut spec = WalkSpec64::new(memory, steps, CoinSpec::new(family))
            .with_input(input)
            .with_mode(mode)
            .with_boundary(boundary);
        spec.dims = dims;
        spec.validate()?;
        check_size(&spec)?;
        if let Some(m) = &self.measure {
            m.check_dims(dims)?;
            if let Some(&r) = m.registers.iter().find(|&&r| r == 0 || r > memory) {
                return Err(CliError::Usage(format!("register {r} is outside 1..={memory}")));
            }
        }
        Ok(spec)
    }

    pub fn has_randomness(&self) -> bool {
        matches!(self.memory_fn, Some(MemoryFnKind::Random | MemoryFnKind::RandomCoin))
    }
}

fn check_size(spec: &WalkSpec64) -> Result<(), CliError> {
    let per_axis = match spec.boundary {
        Boundary::Cyclic(d) => u128::from(d),
        Boundary::Unbounded => 2 * spec.steps as u128 + 1,
    };
    let sites = per_axis.saturating_pow(spec.dims.count() as u32);
    let kets = u32::try_from(spec.memory_len)
        .ok()
        .and_then(|n| (spec.dims.coin_dim() as u128).checked_pow(n))
        .and_then(|c| c.checked_mul(sites));
    match kets {
        Some(k) if k <= KET_CAP => Ok(()),
        _ => Err(CliError::Resource(format!(
            "N={} with T={} may need more than {KET_CAP} basis states",
            spec.memory_len, spec.steps
        ))),
    }
}
