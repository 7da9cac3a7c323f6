//! Verification suites with machine-readable reports.
//!
//! Runs shared between suites (for instance the smooth-random runs used by
//! the energy, conservation and contraction suites) are computed once per
//! [`Verifier`] and cached. Independent runs are spread over up to
//! [`thread_cap`] threads.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;
use swlw_core::diagnostics::{jrho_check, EnergyLedger, EnergyTracker, RelativeEnergy, RelativeEnergyTracker};
use swlw_core::magnetics::divergence_sup;
use swlw_core::schrodinger::mass;
use swlw_core::stepper::{advance, run, Physics, PicardReport, SimState, Sink, StepConfig};
use swlw_core::{Complex64, ComplexField, ScalarField, VectorField};

use crate::mms;
use crate::oracle::{split_step_nls, FluidState, NavierStokes};
use crate::scenario::{build, RandomSpec, Scenario};

pub const SUITES: [&str; 10] = [
    "equilibrium",
    "energy",
    "conservation",
    "solenoidal",
    "lagrangian",
    "contraction",
    "dependence",
    "vacuum",
    "decoupling",
    "mms",
];

/// Parallelism cap from `SWLW_THREADS`, defaulting to the available cores.
pub fn thread_cap() -> usize {
    let default = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    std::env::var("SWLW_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map(|n| n.min(default.max(1)))
        .unwrap_or(default)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `<= 1e-8`.
    pub condition: String,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("<= {limit:e}"),
            passed: value <= limit,
        }
    }

    fn below(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("< {limit}"),
            passed: value < limit,
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!(">= {limit}"),
            passed: value >= limit,
        }
    }

    fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<mms::Study>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        Self {
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            tables: Vec::new(),
        }
    }

    /// One line: suite, verdict and every check value.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| format!("{}={:.3e} ({})", c.name, c.value, c.condition))
            .collect();
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.suite, parts.join(", "))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}; available: {list}", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("run {label} failed: {error}")]
    Run { label: String, error: swlw_core::Error },
}

/// Per-step record of a run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub label: String,
    pub initial: SimState,
    pub state: SimState,
    pub reports: Vec<PicardReport>,
    pub energy: Vec<EnergyLedger>,
    pub mass_rho: Vec<f64>,
    pub mass_psi: Vec<f64>,
    pub div_h: Vec<f64>,
    pub rho_min: f64,
    pub rho_max: f64,
    pub elapsed: Duration,
}

impl RunRecord {
    pub fn energy_residuals(&self) -> Vec<f64> {
        swlw_core::diagnostics::energy_identity_check(&self.energy)
    }

    pub fn max_div_h(&self) -> f64 {
        self.div_h.iter().copied().fold(0.0, f64::max)
    }

    /// Largest change of `∫ρ` between consecutive steps.
    pub fn mass_step_drift(&self) -> f64 {
        self.mass_rho.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }

    /// Largest deviation of `∫|ψ|²` from its initial value.
    pub fn wave_mass_drift(&self) -> f64 {
        let m0 = self.mass_psi[0];
        self.mass_psi.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max)
    }
}

struct Recorder {
    physics: Physics,
    energy: Option<EnergyTracker>,
    mass_rho: Vec<f64>,
    mass_psi: Vec<f64>,
    div_h: Vec<f64>,
    rho_min: f64,
    rho_max: f64,
}

impl Sink for Recorder {
    type Error = swlw_core::Error;
    fn record(&mut self, _: usize, state: &SimState, _: Option<&PicardReport>) -> Result<(), Self::Error> {
        if let Some(t) = self.energy.as_mut() {
            t.record(state, &self.physics)?;
        }
        self.mass_rho.push(state.rho.integral());
        self.mass_psi.push(mass(&state.psi));
        self.div_h.push(divergence_sup(&state.h));
        self.rho_min = self.rho_min.min(state.rho.min());
        self.rho_max = self.rho_max.max(state.rho.max());
        Ok(())
    }
}

/// A run to be cached under `label`.
#[derive(Clone, Debug)]
pub struct RunJob {
    pub label: String,
    pub scenario: Scenario,
    pub n: usize,
    pub physics: Physics,
    pub config: StepConfig,
    pub t_end: f64,
    pub track_energy: bool,
}

impl RunJob {
    pub fn execute(&self) -> Result<RunRecord, VerifyError> {
        let fail = |error| VerifyError::Run {
            label: self.label.clone(),
            error,
        };
        let initial = build(&self.scenario, self.n).map_err(fail)?.primary;
        let mut rec = Recorder {
            physics: self.physics.clone(),
            energy: self.track_energy.then(EnergyTracker::new),
            mass_rho: Vec::new(),
            mass_psi: Vec::new(),
            div_h: Vec::new(),
            rho_min: f64::INFINITY,
            rho_max: f64::NEG_INFINITY,
        };
        let config = StepConfig {
            diagnostic_interval: 1,
            ..self.config
        };
        let start = Instant::now();
        let out = run(initial.clone(), self.t_end, &self.physics, &config, &mut rec).map_err(|e| match e {
            swlw_core::stepper::RunError::Solver { error, .. } => fail(error),
            swlw_core::stepper::RunError::Sink(error) => fail(error),
        })?;
        let elapsed = start.elapsed();
        Ok(RunRecord {
            label: self.label.clone(),
            initial,
            state: out.state,
            reports: out.reports,
            energy: rec.energy.map(|t| t.history).unwrap_or_default(),
            mass_rho: rec.mass_rho,
            mass_psi: rec.mass_psi,
            div_h: rec.div_h,
            rho_min: rec.rho_min,
            rho_max: rec.rho_max,
            elapsed,
        })
    }
}

fn smooth_random(n: usize, dt: f64, t_end: f64) -> RunJob {
    RunJob {
        label: format!("smooth-random n={n} dt={dt:e} t={t_end}"),
        scenario: Scenario::SmoothRandom(RandomSpec::default()),
        n,
        physics: Physics::default(),
        config: StepConfig { dt, ..Default::default() },
        t_end,
        track_energy: true,
    }
}

fn shear(n: usize) -> RunJob {
    RunJob {
        label: format!("shear n={n}"),
        scenario: Scenario::shear(),
        n,
        physics: Physics::default(),
        config: StepConfig {
            dt: 2.5e-3,
            ..Default::default()
        },
        t_end: 0.5,
        track_energy: false,
    }
}

fn equilibrium() -> RunJob {
    RunJob {
        label: "equilibrium n=64".into(),
        scenario: Scenario::equilibrium(),
        n: 64,
        physics: Physics::default(),
        config: StepConfig::default(),
        t_end: 0.1,
        track_energy: true,
    }
}

fn vacuum() -> RunJob {
    let mut physics = Physics::default();
    physics.fluid.beta = 2.0;
    RunJob {
        label: "smooth-random beta=2 n=32 t=0.5".into(),
        physics,
        ..smooth_random(32, 1e-3, 0.5)
    }
}

/// Runs suites, caching shared runs.
pub struct Verifier {
    threads: usize,
    cache: Mutex<BTreeMap<String, Arc<RunRecord>>>,
    /// `(label, max ‖div H‖∞)` for runs not kept in the cache.
    extra_div_h: Mutex<Vec<(String, f64)>>,
}

impl Default for Verifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Verifier {
    pub fn new() -> Self {
        Self::with_threads(thread_cap())
    }

    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: threads.max(1),
            cache: Mutex::new(BTreeMap::new()),
            extra_div_h: Mutex::new(Vec::new()),
        }
    }

    /// Records for `jobs`, computing missing ones concurrently.
    pub fn records(&self, jobs: &[RunJob]) -> Result<Vec<Arc<RunRecord>>, VerifyError> {
        let missing: Vec<&RunJob> = {
            let cache = self.cache.lock().expect("cache lock");
            jobs.iter().filter(|j| !cache.contains_key(&j.label)).collect()
        };
        let results = parallel(self.threads, missing.iter().map(|j| move || j.execute()).collect());
        {
            let mut cache = self.cache.lock().expect("cache lock");
            for r in results {
                let r = r?;
                cache.insert(r.label.clone(), Arc::new(r));
            }
        }
        let cache = self.cache.lock().expect("cache lock");
        Ok(jobs.iter().map(|j| cache[&j.label].clone()).collect())
    }

    pub fn suite(&self, name: &str) -> Result<SuiteReport, VerifyError> {
        match name {
            "equilibrium" => self.equilibrium(),
            "energy" => self.energy(),
            "conservation" => self.conservation(),
            "solenoidal" => self.solenoidal(),
            "lagrangian" => self.lagrangian(),
            "contraction" => self.contraction(),
            "dependence" => self.dependence(),
            "vacuum" => self.vacuum(),
            "decoupling" => self.decoupling(),
            "mms" => self.mms(),
            other => Err(VerifyError::UnknownSuite(other.to_string())),
        }
    }

    fn equilibrium(&self) -> Result<SuiteReport, VerifyError> {
        let job = equilibrium();
        let rec = &self.records(std::slice::from_ref(&job))?[0];
        let s = &rec.state;
        let Scenario::Equilibrium { amplitude: a, k, .. } = job.scenario else {
            unreachable!()
        };
        let spec = &job.physics.coupling;
        let tp = 2.0 * std::f64::consts::PI;
        let kk = tp * tp * ((k[0] * k[0] + k[1] * k[1]) as f64);
        let omega = kk + a * a + spec.alpha * spec.g(1.0).expect("positive") * spec.h_prime(a * a).expect("positive");
        let g = s.psi.grid();
        let phase = s
            .psi
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let y = g.node(i);
                let exact = Complex64::from_polar(a, tp * (k[0] as f64 * y[0] + k[1] as f64 * y[1]) - omega * s.t);
                (z / exact).arg().abs()
            })
            .fold(0.0, f64::max);
        Ok(SuiteReport::new(
            "equilibrium",
            vec![
                Check::at_most("max_u", s.u.max_abs(), 1e-8),
                Check::at_most("max_rho_dev", s.rho.map(|r| r - 1.0).max_abs(), 1e-10),
                Check::at_most("phase_error", phase, 1e-6),
                Check::at_most("runtime_s", rec.elapsed.as_secs_f64(), 30.0),
            ],
        ))
    }

    fn smooth_pair(&self) -> Result<(Arc<RunRecord>, Arc<RunRecord>), VerifyError> {
        let r = self.records(&[smooth_random(64, 1e-3, 0.2), smooth_random(64, 5e-4, 0.2)])?;
        Ok((r[0].clone(), r[1].clone()))
    }

    fn energy(&self) -> Result<SuiteReport, VerifyError> {
        let (coarse, fine) = self.smooth_pair()?;
        let max = |r: &RunRecord| r.energy_residuals().into_iter().fold(0.0, f64::max);
        let (ec, ef) = (max(&coarse), max(&fine));
        Ok(SuiteReport::new(
            "energy",
            vec![
                Check::at_most("residual_dt1e-3", ec, 5e-4),
                Check::at_least("halving_ratio", ec / ef, 1.8),
            ],
        ))
    }

    fn conservation(&self) -> Result<SuiteReport, VerifyError> {
        let (coarse, fine) = self.smooth_pair()?;
        let runs = [coarse, fine];
        let rho = runs.iter().map(|r| r.mass_step_drift()).fold(0.0, f64::max);
        let psi = runs.iter().map(|r| r.wave_mass_drift()).fold(0.0, f64::max);
        Ok(SuiteReport::new(
            "conservation",
            vec![
                Check::at_most("mass_drift_per_step", rho, 1e-12),
                Check::at_most("wave_mass_drift", psi, 1e-11),
            ],
        ))
    }

    /// Covers every run made so far by this verifier, plus the standard runs.
    fn solenoidal(&self) -> Result<SuiteReport, VerifyError> {
        self.smooth_pair()?;
        let mut checks: Vec<Check> = self
            .cache
            .lock()
            .expect("cache lock")
            .values()
            .map(|r| Check::at_most(&format!("div_h[{}]", r.label), r.max_div_h(), 1e-10))
            .collect();
        for (label, v) in self.extra_div_h.lock().expect("lock").iter() {
            checks.push(Check::at_most(&format!("div_h[{label}]"), *v, 1e-10));
        }
        let worst = checks.iter().map(|c| c.value).fold(0.0, f64::max);
        checks.insert(0, Check::at_most("div_h_max", worst, 1e-10));
        Ok(SuiteReport::new("solenoidal", checks))
    }

    fn lagrangian(&self) -> Result<SuiteReport, VerifyError> {
        let r = self.records(&[shear(64), shear(128)])?;
        let measure = |s: &SimState| -> Result<[f64; 4], VerifyError> {
            let j = jrho_check(s).map_err(|error| VerifyError::Run {
                label: "shear".into(),
                error,
            })?;
            Ok([j, s.map.inverse_identity_error(), s.map.inverse_tensor_error(), s.map.liouville_gap()])
        };
        let coarse = measure(&r[0].state)?;
        let fine = measure(&r[1].state)?;
        let names = ["jrho", "inverse_identity", "inverse_tensor", "liouville_gap"];
        let mut checks = Vec::new();
        for i in 0..4 {
            checks.push(Check::at_most(&format!("{}_n64", names[i]), coarse[i], 1e-4));
            checks.push(Check::at_most(&format!("{}_n128_over_n64", names[i]), fine[i] / coarse[i], 0.5));
        }
        Ok(SuiteReport::new("lagrangian", checks))
    }

    fn contraction(&self) -> Result<SuiteReport, VerifyError> {
        let (coarse, fine) = self.smooth_pair()?;
        let iters = coarse.reports.iter().map(|r| r.iterations).max().unwrap_or(0);
        let ratio = coarse.reports.iter().map(|r| r.max_ratio()).fold(0.0, f64::max);
        let first = |r: &RunRecord| r.reports[0].contraction_ratios.first().copied().unwrap_or(0.0);
        let (fc, ff) = (first(&coarse), first(&fine));
        Ok(SuiteReport::new(
            "contraction",
            vec![
                Check::at_most("max_iterations", iters as f64, 8.0),
                Check::below("max_ratio", ratio, 0.5),
                Check::below("first_ratio_halved_over_full", ff / fc, 1.0),
            ],
        ))
    }

    fn dependence(&self) -> Result<SuiteReport, VerifyError> {
        let delta = 1e-3;
        let (d1, d2) = self.pair_distances(32, 1e-3, 0.2, delta)?;
        Ok(SuiteReport::new(
            "dependence",
            vec![
                Check::within("composite_ratio", d1.composite() / d2.composite(), 3.4, 4.6),
                Check::within("quadratic_ratio", d1.quadratic() / d2.quadratic(), 3.4, 4.6),
            ],
        ))
    }

    /// Relative energies at `t_end` for perturbations `delta` and `delta/2`.
    pub fn pair_distances(&self, n: usize, dt: f64, t_end: f64, delta: f64) -> Result<(RelativeEnergy, RelativeEnergy), VerifyError> {
        let base = RandomSpec::default();
        let fail = |error| VerifyError::Run {
            label: "perturbed-pair".into(),
            error,
        };
        let a = build(&Scenario::PerturbedPair { base, delta }, n).map_err(fail)?;
        let b = build(&Scenario::PerturbedPair { base, delta: delta / 2.0 }, n).map_err(fail)?;
        let physics = Physics::default();
        let config = StepConfig { dt, ..Default::default() };
        let mut states = [a.primary, a.partner.expect("pair"), b.partner.expect("pair")];
        let mut trackers = [RelativeEnergyTracker::new(), RelativeEnergyTracker::new()];
        let mut out = [trackers[0].record(&states[0], &states[1]), trackers[1].record(&states[0], &states[2])];
        let mut div: f64 = 0.0;
        let steps = swlw_core::stepper::step_count(t_end, dt);
        for _ in 0..steps {
            let next = parallel(
                self.threads,
                states.iter().map(|s| { let (p, c) = (&physics, &config); move || advance(s, p, c).map(|x| x.0) }).collect(),
            );
            for (slot, s) in states.iter_mut().zip(next) {
                *slot = s.map_err(fail)?;
                div = div.max(divergence_sup(&slot.h));
            }
            out = [trackers[0].record(&states[0], &states[1]), trackers[1].record(&states[0], &states[2])];
        }
        self.extra_div_h.lock().expect("lock").push((format!("perturbed-pair n={n}"), div));
        Ok((out[0], out[1]))
    }

    fn vacuum(&self) -> Result<SuiteReport, VerifyError> {
        let r = &self.records(&[vacuum()])?[0];
        Ok(SuiteReport::new(
            "vacuum",
            vec![
                Check::at_least("rho_min", r.rho_min, 0.4),
                Check::at_most("rho_max", r.rho_max, 2.4),
            ],
        ))
    }

    fn decoupling(&self) -> Result<SuiteReport, VerifyError> {
        let n = 32;
        let dt = 1e-3;
        let t_end = 0.1;
        let fail = |error| VerifyError::Run {
            label: "decoupling".into(),
            error,
        };

        // Fluid only: no wave coupling, no magnetic field.
        let spec = RandomSpec {
            h_amp: 0.0,
            ..Default::default()
        };
        let mut physics = Physics::default();
        physics.coupling = physics.coupling.with_alpha(0.0).map_err(fail)?;
        let config = StepConfig { dt, ..Default::default() };
        let mut s = build(&Scenario::SmoothRandom(spec), n).map_err(fail)?.primary;
        let ns = NavierStokes::new(n, physics.fluid, dt);
        let mut f = FluidState {
            rho: s.rho.values.clone(),
            u: [s.u.0[0].values.clone(), s.u.0[1].values.clone()],
        };
        let mut fluid_gap: f64 = 0.0;
        let mut div: f64 = 0.0;
        for _ in 0..swlw_core::stepper::step_count(t_end, dt) {
            s = advance(&s, &physics, &config).map_err(fail)?.0;
            f = ns.step(&f).0;
            div = div.max(divergence_sup(&s.h));
            let gap = |a: &ScalarField, b: &[f64]| a.values.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            fluid_gap = fluid_gap.max(gap(&s.rho, &f.rho)).max(gap(&s.u.0[0], &f.u[0])).max(gap(&s.u.0[1], &f.u[1]));
        }
        self.extra_div_h.lock().expect("lock").push((format!("decoupled fluid n={n}"), div));

        // Fluid held at rest: the wave sees a frozen specific volume.
        let spec = RandomSpec {
            u_amp: 0.0,
            ..Default::default()
        };
        let physics = Physics::default();
        let config = StepConfig {
            dt,
            freeze_velocity: true,
            ..Default::default()
        };
        let s0 = build(&Scenario::SmoothRandom(spec), n).map_err(fail)?.primary;
        let out = run(s0.clone(), t_end, &physics, &config, &mut swlw_core::stepper::NullSink).map_err(|e| match e {
            swlw_core::stepper::RunError::Solver { error, .. } => fail(error),
            swlw_core::stepper::RunError::Sink(never) => match never {},
        })?;
        self.extra_div_h
            .lock()
            .expect("lock")
            .push((format!("frozen fluid n={n}"), divergence_sup(&out.state.h)));
        let v: Vec<f64> = s0.rho.values.iter().map(|r| 1.0 / r).collect();
        let reference = split_step_nls(&s0.psi.values, &v, &physics.coupling, n, dt, out.steps);
        let reference = ComplexField::from_values(s0.psi.grid(), reference).map_err(fail)?;
        let wave_gap = out.state.psi.sub(&reference).max_abs();
        let rest = out.state.u.max_abs().max(VectorField::zeros(s0.u.grid()).max_abs());
        Ok(SuiteReport::new(
            "decoupling",
            vec![
                Check::at_most("fluid_vs_reference", fluid_gap, 1e-8),
                Check::at_most("wave_vs_reference", wave_gap, 1e-10),
                Check::at_most("frozen_velocity", rest, 0.0),
            ],
        ))
    }

    fn mms(&self) -> Result<SuiteReport, VerifyError> {
        let fail = |error| VerifyError::Run {
            label: "mms".into(),
            error,
        };
        let physics = Physics::default();
        let s32 = build(&Scenario::SmoothRandom(RandomSpec::default()), 32).map_err(fail)?.primary;
        let s16 = build(&Scenario::SmoothRandom(RandomSpec::default()), 16).map_err(fail)?.primary;
        let config = StepConfig {
            dt: 4e-3,
            ..Default::default()
        };
        let jobs: Vec<Box<dyn FnOnce() -> swlw_core::Result<mms::Study> + Send + '_>> = vec![
            Box::new(|| mms::spatial_study(16, 3)),
            Box::new(|| mms::nls_study(&s32, &physics, 1e-2, 0.1, 3)),
            Box::new(|| mms::momentum_study(&s32, &physics, 2e-2, 0.2, 4)),
            Box::new(|| mms::coupled_study(&s16, &physics, &config, 0.04, 3)),
        ];
        let studies = parallel(self.threads, jobs)
            .into_iter()
            .collect::<swlw_core::Result<Vec<_>>>()
            .map_err(fail)?;
        let mut report = SuiteReport::new(
            "mms",
            vec![
                Check::at_most("spatial_error", studies[0].max_error(), 1e-10),
                Check::at_least("nls_order", studies[1].min_order(), 1.9),
                Check::at_least("momentum_order", studies[2].min_order(), 0.9),
                Check::at_least("coupled_order", studies[3].min_order(), 0.9),
            ],
        );
        report.tables = studies;
        Ok(report)
    }
}

/// Runs closures on up to `threads` threads, preserving order.
pub fn parallel<T: Send, F: FnOnce() -> T + Send>(threads: usize, jobs: Vec<F>) -> Vec<T> {
    if threads <= 1 || jobs.len() <= 1 {
        return jobs.into_iter().map(|f| f()).collect();
    }
    let mut out = Vec::with_capacity(jobs.len());
    let mut jobs = jobs.into_iter().peekable();
    while jobs.peek().is_some() {
        let batch: Vec<F> = jobs.by_ref().take(threads).collect();
        let results: Vec<T> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch.into_iter().map(|f| scope.spawn(f)).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        out.extend(results);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_lists_available() {
        let v = Verifier::with_threads(1);
        let e = v.suite("nope").unwrap_err().to_string();
        assert!(e.contains("nope") && e.contains("decoupling"));
    }

    #[test]
    fn parallel_keeps_order() {
        let jobs: Vec<_> = (0..5).map(|i| move || i * i).collect();
        assert_eq!(parallel(2, jobs), vec![0, 1, 4, 9, 16]);
    }
}
