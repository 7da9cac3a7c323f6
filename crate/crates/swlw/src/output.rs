//! Diagnostics CSV and the sink that drives file output during a run.
//!
//! `diagnostics.csv` has the fixed header [`HEADER`], one row per
//! diagnostic record. Floats are written in the shortest decimal form that
//! parses back to the same `f64`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use swlw_core::diagnostics::{collect, EnergyTracker, StepDiagnostics};
use swlw_core::stepper::{Physics, PicardReport, SimState, Sink};

use crate::snapshot::{self, SnapshotError};

pub const HEADER: [&str; 36] = [
    "step",
    "t",
    "energy",
    "dissipation_cum",
    "residual",
    "kinetic",
    "internal",
    "magnetic",
    "wave_gradient",
    "wave_quartic",
    "coupling",
    "mass_rho",
    "mass_psi",
    "rho_min",
    "rho_max",
    "jrho_min",
    "jrho_max",
    "div_h_inf",
    "psi_max",
    "e_inf",
    "jrho_error",
    "inverse_identity_error",
    "inverse_tensor_error",
    "liouville_gap",
    "flux_mean",
    "flux_min",
    "flux_max",
    "flux_l2",
    "vorticity_l2",
    "big_lambda_min",
    "big_lambda_max",
    "picard_iterations",
    "picard_max_ratio",
    "picard_first_ratio",
    "inner_iterations",
    "max_u",
];

/// One CSV row; field order matches [`HEADER`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub dissipation_cum: f64,
    pub residual: f64,
    pub kinetic: f64,
    pub internal: f64,
    pub magnetic: f64,
    pub wave_gradient: f64,
    pub wave_quartic: f64,
    pub coupling: f64,
    pub mass_rho: f64,
    pub mass_psi: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub jrho_min: f64,
    pub jrho_max: f64,
    pub div_h_inf: f64,
    pub psi_max: f64,
    pub e_inf: f64,
    pub jrho_error: f64,
    pub inverse_identity_error: f64,
    pub inverse_tensor_error: f64,
    pub liouville_gap: f64,
    pub flux_mean: f64,
    pub flux_min: f64,
    pub flux_max: f64,
    pub flux_l2: f64,
    pub vorticity_l2: f64,
    pub big_lambda_min: f64,
    pub big_lambda_max: f64,
    pub picard_iterations: usize,
    pub picard_max_ratio: f64,
    pub picard_first_ratio: f64,
    pub inner_iterations: usize,
    pub max_u: f64,
}

impl Row {
    pub fn new(step: usize, state: &SimState, d: &StepDiagnostics, report: Option<&PicardReport>) -> Self {
        let c = &d.ledger.components;
        let b = &d.bounds;
        let (iterations, max_ratio, first_ratio, inner) = match report {
            Some(r) => (
                r.iterations,
                r.max_ratio(),
                r.contraction_ratios.first().copied().unwrap_or(0.0),
                r.inner_iterations,
            ),
            None => (0, 0.0, 0.0, 0),
        };
        Self {
            step,
            t: state.t,
            energy: d.ledger.energy,
            dissipation_cum: d.ledger.dissipation_cum,
            residual: d.ledger.residual,
            kinetic: c.kinetic,
            internal: c.internal,
            magnetic: c.magnetic,
            wave_gradient: c.wave_gradient,
            wave_quartic: c.wave_quartic,
            coupling: c.coupling,
            mass_rho: d.mass_rho,
            mass_psi: d.mass_psi,
            rho_min: b.rho_min,
            rho_max: b.rho_max,
            jrho_min: b.jrho_min,
            jrho_max: b.jrho_max,
            div_h_inf: b.div_h_inf,
            psi_max: b.psi_max,
            e_inf: b.e_inf,
            jrho_error: d.jrho_error,
            inverse_identity_error: state.map.inverse_identity_error(),
            inverse_tensor_error: state.map.inverse_tensor_error(),
            liouville_gap: state.map.liouville_gap(),
            flux_mean: d.flux.flux.mean,
            flux_min: d.flux.flux.min,
            flux_max: d.flux.flux.max,
            flux_l2: d.flux.flux.l2,
            vorticity_l2: d.flux.vorticity.l2,
            big_lambda_min: d.flux.big_lambda.min,
            big_lambda_max: d.flux.big_lambda.max,
            picard_iterations: iterations,
            picard_max_ratio: max_ratio,
            picard_first_ratio: first_ratio,
            inner_iterations: inner,
            max_u: state.u.max_norm(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("snapshot error: {0}")]
    Snapshot(#[from] SnapshotError),
    #[error("diagnostics failed: {0}")]
    Solver(#[from] swlw_core::Error),
    #[error("J/rho = {value} outside [{lo}, {hi}] at t = {t}")]
    JrhoBounds { value: f64, lo: f64, hi: f64, t: f64 },
}

/// Writes CSV rows to any writer.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
    physics: Physics,
    pub tracker: EnergyTracker,
    pub rows: Vec<Row>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(out: W, physics: Physics) -> Self {
        Self {
            writer: csv::WriterBuilder::new().has_headers(true).from_writer(out),
            physics,
            tracker: EnergyTracker::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, step: usize, state: &SimState, report: Option<&PicardReport>) -> Result<Row, OutputError> {
        let d = collect(state, &self.physics, &mut self.tracker)?;
        let row = Row::new(step, state, &d, report);
        self.writer.serialize(&row)?;
        self.writer.flush()?;
        self.rows.push(row.clone());
        Ok(row)
    }

    pub fn into_inner(self) -> Result<W, OutputError> {
        self.writer.into_inner().map_err(|e| OutputError::Io(e.into_error()))
    }
}

/// Relative slack allowed on the `J/ρ` bounds, for interpolation error.
pub const JRHO_SLACK: f64 = 1e-3;

/// Full run output: CSV rows, periodic snapshots and the `J/ρ` bounds check.
pub struct RunSink {
    csv: CsvSink<io::BufWriter<fs::File>>,
    dir: PathBuf,
    snapshot_interval: usize,
    jrho_range: (f64, f64),
}

impl RunSink {
    pub fn create(dir: &Path, physics: Physics, initial: &SimState, snapshot_interval: usize) -> Result<Self, OutputError> {
        fs::create_dir_all(dir)?;
        let file = io::BufWriter::new(fs::File::create(dir.join("diagnostics.csv"))?);
        Ok(Self {
            csv: CsvSink::new(file, physics),
            dir: dir.to_path_buf(),
            snapshot_interval,
            jrho_range: (1.0 / initial.rho0.max(), 1.0 / initial.rho0.min()),
        })
    }

    pub fn rows(&self) -> &[Row] {
        &self.csv.rows
    }

    pub fn snapshot_path(&self, step: usize) -> PathBuf {
        self.dir.join(format!("snapshot_{step:06}.bin"))
    }

    pub fn dump(&self, name: &str, state: &SimState, step: usize) -> Result<PathBuf, OutputError> {
        let path = self.dir.join(name);
        snapshot::write_file(&path, state, step)?;
        Ok(path)
    }
}

impl Sink for RunSink {
    type Error = OutputError;

    fn record(&mut self, step: usize, state: &SimState, report: Option<&PicardReport>) -> Result<(), OutputError> {
        let row = self.csv.push(step, state, report)?;
        let (lo, hi) = self.jrho_range;
        for value in [row.jrho_min, row.jrho_max] {
            if value < lo * (1.0 - JRHO_SLACK) || value > hi * (1.0 + JRHO_SLACK) {
                return Err(OutputError::JrhoBounds { value, lo, hi, t: state.t });
            }
        }
        if self.snapshot_interval > 0 && step % self.snapshot_interval == 0 {
            snapshot::write_file(&self.snapshot_path(step), state, step)?;
        }
        Ok(())
    }
}
