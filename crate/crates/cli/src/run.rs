use std::path::{Path, PathBuf};

use memwalk::{
    compile_layers, measure_all_branches, measure_memory, position_distribution, run_ensemble,
    spatial_entanglement, variance_series, verify_circuit, Dims, Distribution, StateVector, Trajectory,
    WalkSpec64,
};

use crate::config::{Emit, ExperimentConfig, Measure, Record};
use crate::error::CliError;
use crate::presets;

pub const DEFAULT_REALIZATIONS: usize = 30;

pub struct Series {
    pub label: String,
    pub config: ExperimentConfig,
    pub spec: WalkSpec64,
}

/// A fully resolved invocation: run-level settings plus one walk per series.
pub struct Plan {
    pub name: String,
    pub run: ExperimentConfig,
    pub series: Vec<Series>,
}

pub struct Report {
    pub out: PathBuf,
    pub rows: usize,
    pub note: Option<String>,
}

impl Plan {
    /// Layers the config document under the flags, expands a preset if one
    /// is named, and validates every series.
    pub fn resolve(file: Option<ExperimentConfig>, flags: &ExperimentConfig) -> Result<Plan, CliError> {
        let merged = file.unwrap_or_default().overlay(flags);
        let (name, base, deltas) = match merged.preset.as_deref() {
            Some(name) => {
                let preset = presets::find(name)
                    .ok_or_else(|| CliError::Usage(format!("unknown preset '{name}' (see list-presets)")))?;
                let (base, deltas) = preset.expand();
                (name.to_string(), base, deltas)
            }
            None => {
                if merged.memory.is_none() || merged.steps.is_none() {
                    return Err(CliError::Usage(
                        "give a preset, or an explicit walk with at least --memory and --steps".into(),
                    ));
                }
                (
                    "custom".to_string(),
                    ExperimentConfig::default(),
                    vec![("run".to_string(), ExperimentConfig::default())],
                )
            }
        };
        let run = base.clone().overlay(&merged);
        let series = deltas
            .into_iter()
            .map(|(label, delta)| {
                let config = base.clone().overlay(&delta).overlay(&merged);
                let spec = config.walk_spec()?;
                Ok(Series { label, config, spec })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Plan { name, run, series })
    }

    pub fn emit(&self) -> Emit {
        self.run.emit.unwrap_or(Emit::Dist)
    }

    pub fn output_path(&self) -> PathBuf {
        self.run.out.clone().unwrap_or_else(|| {
            let ext = if self.emit() == Emit::Circuit { "json" } else { "csv" };
            PathBuf::from(format!("{}-{}.{ext}", self.name, self.emit()))
        })
    }

    pub fn execute(&self) -> Result<Report, CliError> {
        let out = self.output_path();
        let emit = self.emit();
        if emit != Emit::Dist && self.series.iter().any(|s| s.config.measure.is_some()) {
            return Err(CliError::Usage(format!("measurements apply to dist output, not {emit}")));
        }
        let dims = self.series[0].spec.dims;
        if self.series.iter().any(|s| s.spec.dims != dims) {
            return Err(CliError::Usage("all series must share one dimensionality".into()));
        }
        let (bytes, rows, note) = match emit {
            Emit::Dist => self.distributions(dims)?,
            Emit::Variance => self.variances(dims)?,
            Emit::Ensemble => self.ensemble(dims)?,
            Emit::Entanglement => self.entanglement(dims)?,
            Emit::Circuit => self.circuit()?,
        };
        write_file(&out, &bytes)?;
        Ok(Report { out, rows, note })
    }

    fn multi(&self) -> bool {
        self.series.len() > 1
    }

    fn header(&self, cols: &[&str]) -> Vec<String> {
        let lead = self.multi().then(|| "series".to_string());
        lead.into_iter().chain(cols.iter().map(|c| c.to_string())).collect()
    }

    fn row(&self, s: &Series, cells: Vec<String>) -> Vec<String> {
        let lead = self.multi().then(|| s.label.clone());
        lead.into_iter().chain(cells).collect()
    }

    fn realizations(&self) -> usize {
        self.run.realizations.unwrap_or(DEFAULT_REALIZATIONS)
    }

    fn distributions(&self, dims: Dims) -> Result<(Vec<u8>, usize, Option<String>), CliError> {
        let cols: &[&str] = match dims {
            Dims::One => &["t", "x", "p"],
            Dims::Two => &["t", "x", "y", "p"],
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header(cols))?;
        let mut rows = 0;
        for s in &self.series {
            let record = recorded(s, Record::Final)?;
            for (t, state) in Trajectory::new(&s.spec)?.enumerate() {
                let state = state?;
                if !record.includes(t, s.spec.steps) {
                    continue;
                }
                let dist = match &s.config.measure {
                    None => position_distribution(&state),
                    Some(m) => measured(&state, m)?,
                };
                for (site, p) in dist.cells() {
                    if p <= 0.0 {
                        continue;
                    }
                    let (x, y) = site.coords();
                    let mut cells = vec![t.to_string(), x.to_string()];
                    if dims == Dims::Two {
                        cells.push(y.to_string());
                    }
                    cells.push(num(p));
                    w.write_record(self.row(s, cells))?;
                    rows += 1;
                }
            }
        }
        Ok((finish(w)?, rows, None))
    }

    fn variance_of(&self, s: &Series) -> Result<(Vec<f64>, Option<Vec<f64>>), CliError> {
        let steps = s.spec.steps;
        let r = self.realizations();
        if s.config.has_randomness() && r > 1 {
            let e = run_ensemble(&s.spec, r, s.config.seed(), steps)?;
            Ok((e.mean, Some(e.std)))
        } else {
            Ok((variance_series(&s.spec, steps)?.values, None))
        }
    }

    fn variances(&self, dims: Dims) -> Result<(Vec<u8>, usize, Option<String>), CliError> {
        require_line(dims, "variance")?;
        let computed = self.series.iter().map(|s| self.variance_of(s)).collect::<Result<Vec<_>, _>>()?;
        let with_std = computed.iter().any(|(_, std)| std.is_some());
        let cols: &[&str] = if with_std { &["t", "var", "std"] } else { &["t", "var"] };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header(cols))?;
        let mut rows = 0;
        for (s, (var, std)) in self.series.iter().zip(&computed) {
            for (t, v) in var.iter().enumerate() {
                let mut cells = vec![t.to_string(), num(*v)];
                if with_std {
                    cells.push(num(std.as_ref().map_or(0.0, |sd| sd[t])));
                }
                w.write_record(self.row(s, cells))?;
                rows += 1;
            }
        }
        Ok((finish(w)?, rows, None))
    }

    /// Wide table: `t` then `<label>_mean,<label>_std` per series.
    fn ensemble(&self, dims: Dims) -> Result<(Vec<u8>, usize, Option<String>), CliError> {
        require_line(dims, "ensemble")?;
        if self.series.iter().any(|s| s.config.has_randomness()) && self.realizations() < 2 {
            return Err(CliError::Usage("an ensemble needs at least 2 realizations".into()));
        }
        let computed = self.series.iter().map(|s| self.variance_of(s)).collect::<Result<Vec<_>, _>>()?;
        let len = computed.iter().map(|(v, _)| v.len()).min().unwrap_or(0);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_string()];
        for s in &self.series {
            header.push(format!("{}_mean", s.label));
            header.push(format!("{}_std", s.label));
        }
        w.write_record(&header)?;
        for t in 0..len {
            let mut cells = vec![t.to_string()];
            for (mean, std) in &computed {
                cells.push(num(mean[t]));
                cells.push(num(std.as_ref().map_or(0.0, |sd| sd[t])));
            }
            w.write_record(&cells)?;
        }
        let note = format!("realizations={} seed={}", self.realizations(), self.run.seed());
        Ok((finish(w)?, len, Some(note)))
    }

    fn entanglement(&self, dims: Dims) -> Result<(Vec<u8>, usize, Option<String>), CliError> {
        if dims != Dims::Two {
            return Err(CliError::Usage("entanglement output needs a 2D walk".into()));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header(&["t", "S"]))?;
        let mut rows = 0;
        for s in &self.series {
            let record = recorded(s, Record::All)?;
            for (t, state) in Trajectory::new(&s.spec)?.enumerate() {
                let state = state?;
                if !record.includes(t, s.spec.steps) {
                    continue;
                }
                let dist = position_distribution(&state);
                let e = spatial_entanglement(dist.as_plane()?)?;
                w.write_record(self.row(s, vec![t.to_string(), num(e)]))?;
                rows += 1;
            }
        }
        Ok((finish(w)?, rows, None))
    }

    fn circuit(&self) -> Result<(Vec<u8>, usize, Option<String>), CliError> {
        let [s] = self.series.as_slice() else {
            return Err(CliError::Usage("circuit output takes a single walk".into()));
        };
        let circuit = compile_layers(&s.spec)?;
        let report = verify_circuit(&circuit, &s.spec)?;
        eprintln!(
            "verified {} modes, max deviation {:e}{}",
            report.mode_count,
            report.max_deviation,
            report.unitarity_deviation.map(|u| format!(", unitarity {u:e}")).unwrap_or_default()
        );
        let mut json = circuit.to_json();
        json.push('\n');
        let note = format!("modes={} layers={}", circuit.mode_count, circuit.layers.len());
        Ok((json.into_bytes(), circuit.layers.len(), Some(note)))
    }
}

/// Plain decimal in the usual range, exponent form outside it.
fn num(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn require_line(dims: Dims, what: &str) -> Result<(), CliError> {
    match dims {
        Dims::One => Ok(()),
        Dims::Two => Err(CliError::Usage(format!("{what} output needs a 1D walk"))),
    }
}

fn recorded(s: &Series, default: Record) -> Result<Record, CliError> {
    let record = s.config.record.clone().unwrap_or(default);
    if let Record::At(ts) = &record {
        if let Some(t) = ts.iter().find(|&&t| t > s.spec.steps) {
            return Err(CliError::Usage(format!("record time {t} is past the last step {}", s.spec.steps)));
        }
    }
    Ok(record)
}

fn measured(state: &StateVector<f64>, m: &Measure) -> Result<Distribution<f64>, CliError> {
    Ok(match &m.outcomes {
        Some(outcomes) => {
            position_distribution(&measure_memory(state, &m.registers, outcomes)?.conditional_state)
        }
        None => position_distribution(&measure_all_branches(state, &m.registers)?),
    })
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}
