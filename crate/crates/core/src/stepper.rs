//! Coupled time stepping by Picard iteration on the velocity.
//!
//! `K` maps a trial end-of-step velocity `w` to a new one: density, flow
//! map, wave field and magnetic field are advanced along the velocity path
//! from `u_n` to `w`, and the momentum equation linearized about `w` is then
//! solved for `v = K(w)`. A step is accepted once `K(w) ≈ w`.

use alloc::vec::Vec;

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::fluid::{check_positive, continuity_step_characteristics, continuity_step_spectral, FluidParams};
use crate::grid::{ComplexField, ScalarField, VectorField};
use crate::lagrangian::{compose_to_euler, compose_to_euler_complex, compose_to_lagr, FlowMapState};
use crate::magnetics::{divergence_sup, induction_step, MagneticParams};
use crate::momentum::{assemble_rhs, interaction_force, solve_linear_momentum, InnerOptions, MomentumRhs};
use crate::schrodinger::nls_step_coupled;
use crate::velocity::VelocityPath;

/// Largest `‖div H‖∞` accepted at the end of a step.
pub const DIV_H_LIMIT: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub rho: ScalarField,
    pub u: VectorField,
    pub h: VectorField,
    /// Wave field on the Lagrangian grid.
    pub psi: ComplexField,
    pub map: FlowMapState,
    /// Initial density, read as a function of the label `y`.
    pub rho0: ScalarField,
    pub t: f64,
}

impl SimState {
    /// State at `t = 0` with the identity flow map.
    pub fn new(rho: ScalarField, u: VectorField, h: VectorField, psi: ComplexField) -> Result<Self> {
        let g = rho.grid().clone();
        for other in [u.grid(), h.grid(), psi.grid()] {
            if other != &g {
                return Err(Error::SizeMismatch {
                    expected: g.len(),
                    found: other.len(),
                });
            }
        }
        check_positive(&rho)?;
        if !(rho.is_finite() && u.is_finite() && h.is_finite() && psi.is_finite()) {
            return Err(Error::NonFinite("initial data"));
        }
        let div = divergence_sup(&h);
        if div > DIV_H_LIMIT {
            return Err(Error::InvariantViolated {
                what: "div H",
                value: div,
            });
        }
        Ok(Self {
            rho0: rho.clone(),
            map: FlowMapState::identity(&g),
            rho,
            u,
            h,
            psi,
            t: 0.0,
        })
    }

    /// Specific volume on the Lagrangian grid, `1/ρ(x(t,y))`.
    pub fn specific_volume(&self) -> Result<ScalarField> {
        specific_volume(&self.rho, &self.map)
    }

    /// `J/ρ` from the transported initial density, `1/ρ₀(y(t,x))`.
    pub fn j_over_rho(&self) -> ScalarField {
        compose_to_euler(&self.rho0.map(|r| 1.0 / r), &self.map)
    }

    /// `ψ(y(t,x))`.
    pub fn psi_on_euler(&self) -> ComplexField {
        compose_to_euler_complex(&self.psi, &self.map)
    }
}

fn specific_volume(rho: &ScalarField, map: &FlowMapState) -> Result<ScalarField> {
    check_positive(rho)?;
    let v = compose_to_lagr(&rho.map(|r| 1.0 / r), map);
    match v.values.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        Some((index, &value)) => Err(Error::NonPositiveVolume { index, value }),
        None => Ok(v),
    }
}

#[derive(Clone, Debug)]
pub struct Physics {
    pub fluid: FluidParams,
    pub magnetic: MagneticParams,
    pub coupling: CouplingSpec,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            fluid: FluidParams::default(),
            magnetic: MagneticParams::default(),
            coupling: CouplingSpec::default(),
        }
    }
}

impl Physics {
    pub fn validate(&self) -> Result<()> {
        self.fluid.validate()?;
        self.magnetic.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ContinuityScheme {
    #[default]
    Spectral,
    Characteristics,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    /// Relative Picard update (composite norm) accepted as converged.
    pub picard_tol: f64,
    /// Absolute floor for the Picard update, for states at rest.
    pub picard_abs_tol: f64,
    pub max_picard: usize,
    pub cfl_max: f64,
    /// Steps between diagnostic records.
    pub diagnostic_interval: usize,
    pub inner: InnerOptions,
    pub continuity: ContinuityScheme,
    /// Forces `K(w) = 0`, which keeps the fluid at rest.
    pub freeze_velocity: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            picard_tol: 1e-8,
            picard_abs_tol: 1e-13,
            max_picard: 25,
            cfl_max: 0.5,
            diagnostic_interval: 1,
            inner: InnerOptions::default(),
            continuity: ContinuityScheme::Spectral,
            freeze_velocity: false,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "time step must be positive");
        }
        if !(self.picard_tol > 0.0) {
            return bad("picard_tol", "tolerance must be positive");
        }
        if !(self.picard_abs_tol >= 0.0) {
            return bad("picard_abs_tol", "tolerance must be non-negative");
        }
        if self.max_picard == 0 {
            return bad("max_picard", "at least one iteration is needed");
        }
        if !(self.cfl_max > 0.0) {
            return bad("cfl_max", "CFL limit must be positive");
        }
        if self.diagnostic_interval == 0 {
            return bad("diagnostic_interval", "interval must be at least 1");
        }
        if !(self.inner.tol > 0.0) || self.inner.max_inner == 0 {
            return bad("inner_tol", "inner solver settings must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PicardReport {
    pub iterations: usize,
    /// `‖K(w_k) − w_k‖` in the composite norm.
    pub update_norms: Vec<f64>,
    /// `update_norms[k+1] / update_norms[k]`.
    pub contraction_ratios: Vec<f64>,
    /// Inner momentum iterations summed over the step.
    pub inner_iterations: usize,
}

impl PicardReport {
    pub fn max_ratio(&self) -> f64 {
        self.contraction_ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Everything one application of `K` produces.
#[derive(Clone, Debug)]
pub struct KOutput {
    pub v: VectorField,
    pub rho: ScalarField,
    pub map: FlowMapState,
    pub psi: ComplexField,
    pub h: VectorField,
    pub rhs: MomentumRhs,
    pub inner_iterations: usize,
}

/// Discrete `‖w‖₂ + √dt ‖∇w‖₂`.
pub fn composite_norm(w: &VectorField, dt: f64) -> f64 {
    let g = w.grid();
    let s = g.forward_vector(w);
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for c in &s {
        for (i, z) in c.coeffs.iter().enumerate() {
            let e = z.norm_sqr();
            l2 += e;
            h1 += g.k_squared(i) * e;
        }
    }
    libm::sqrt(l2) + libm::sqrt(dt) * libm::sqrt(h1)
}

/// One application of `K` with trial end-of-step velocity `u_guess`.
pub fn k_apply(state: &SimState, u_guess: &VectorField, physics: &Physics, config: &StepConfig) -> Result<KOutput> {
    let dt = config.dt;
    let path = VelocityPath::new(&state.u, u_guess);
    path.check_cfl(dt, config.cfl_max)?;

    let rho = match config.continuity {
        ContinuityScheme::Spectral => continuity_step_spectral(&state.rho, path, dt, config.cfl_max)?,
        ContinuityScheme::Characteristics => continuity_step_characteristics(&state.rho, path, dt, config.cfl_max)?,
    };
    check_positive(&rho)?;

    let map = state.map.advance(path, dt, config.cfl_max)?;

    let v_start = specific_volume(&state.rho, &state.map)?;
    let v_end = specific_volume(&rho, &map)?;
    let v_mid = v_start.zip_map(&v_end, |a, b| 0.5 * (a + b));
    let psi = nls_step_coupled(&state.psi, &v_mid, &physics.coupling, dt)?;

    let h = induction_step(&state.h, path, dt, &physics.magnetic, config.cfl_max)?;

    let psi_e = compose_to_euler_complex(&psi, &map);
    let j_over_rho = compose_to_euler(&state.rho0.map(|r| 1.0 / r), &map);
    let rhs = assemble_rhs(&rho, &h, &psi_e, &j_over_rho, &physics.fluid, &physics.coupling)?;

    let (v, inner_iterations) = if config.freeze_velocity {
        (VectorField::zeros(rho.grid()), 0)
    } else {
        let sol = solve_linear_momentum(
            &rho,
            u_guess,
            &rhs.total,
            &state.u,
            dt,
            &physics.fluid,
            &config.inner,
            Some(u_guess),
        )?;
        (sol.v, sol.iterations)
    };
    Ok(KOutput {
        v,
        rho,
        map,
        psi,
        h,
        rhs,
        inner_iterations,
    })
}

/// Picard iteration for one step; returns the accepted state.
pub fn advance(state: &SimState, physics: &Physics, config: &StepConfig) -> Result<(SimState, PicardReport)> {
    let dt = config.dt;
    let mut report = PicardReport::default();
    let mut w = state.u.clone();
    let mut growth_run = 0;
    for k in 1..=config.max_picard {
        let out = k_apply(state, &w, physics, config)?;
        report.inner_iterations += out.inner_iterations;
        let diff = composite_norm(&out.v.sub(&w), dt);
        let size = composite_norm(&out.v, dt);
        if !diff.is_finite() {
            return Err(Error::NonFinite("velocity"));
        }
        if let Some(&prev) = report.update_norms.last() {
            let ratio = if prev > 0.0 { diff / prev } else { 0.0 };
            report.contraction_ratios.push(ratio);
            growth_run = if ratio >= 1.0 { growth_run + 1 } else { 0 };
        }
        report.update_norms.push(diff);
        report.iterations = k;
        if diff <= config.picard_tol * size || diff <= config.picard_abs_tol {
            let next = SimState {
                rho: out.rho,
                u: out.v,
                h: out.h,
                psi: out.psi,
                map: out.map,
                rho0: state.rho0.clone(),
                t: state.t + dt,
            };
            check_invariants(&next)?;
            return Ok((next, report));
        }
        if growth_run >= 3 {
            return Err(Error::PicardDiverged {
                iterations: k,
                ratios: report.contraction_ratios,
            });
        }
        w = out.v;
    }
    Err(Error::PicardNotConverged {
        iterations: config.max_picard,
        update: report.update_norms.last().copied().unwrap_or(f64::NAN),
    })
}

/// Positivity, solenoidality, non-degenerate map and finiteness.
pub fn check_invariants(state: &SimState) -> Result<()> {
    check_positive(&state.rho)?;
    let jmin = state.map.jacobian.min();
    if !(jmin > crate::lagrangian::J_MIN) {
        return Err(Error::DegenerateMap {
            min_jacobian: jmin,
            threshold: crate::lagrangian::J_MIN,
        });
    }
    let div = divergence_sup(&state.h);
    if !(div <= DIV_H_LIMIT) {
        return Err(Error::InvariantViolated {
            what: "div H",
            value: div,
        });
    }
    if !(state.u.is_finite() && state.h.is_finite() && state.psi.is_finite() && state.rho.is_finite()) {
        return Err(Error::NonFinite("state"));
    }
    Ok(())
}

/// Receives the state at the diagnostic cadence.
pub trait Sink {
    type Error;
    fn record(&mut self, step: usize, state: &SimState, report: Option<&PicardReport>) -> core::result::Result<(), Self::Error>;
}

/// A sink that ignores everything.
pub struct NullSink;

impl Sink for NullSink {
    type Error = core::convert::Infallible;
    fn record(&mut self, _: usize, _: &SimState, _: Option<&PicardReport>) -> core::result::Result<(), Self::Error> {
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub state: SimState,
    pub steps: usize,
    pub reports: Vec<PicardReport>,
}

#[derive(Debug)]
pub enum RunError<E> {
    /// The solver failed; `state` is the last accepted state.
    Solver {
        error: Error,
        step: usize,
        state: alloc::boxed::Box<SimState>,
    },
    Sink(E),
}

/// Number of steps of size at most `dt` needed to reach `t_end`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    if t_end <= 0.0 {
        return 0;
    }
    let n = t_end / dt;
    let r = libm::round(n);
    if (n - r).abs() <= 1e-9 * n.max(1.0) {
        r as usize
    } else {
        libm::ceil(n) as usize
    }
}

/// Advances `initial` to `t_end`, recording at step 0, every
/// `diagnostic_interval` steps and at the final step. The last step is
/// shortened if `t_end` is not a multiple of `dt`.
pub fn run<S: Sink>(
    initial: SimState,
    t_end: f64,
    physics: &Physics,
    config: &StepConfig,
    sink: &mut S,
) -> core::result::Result<RunSummary, RunError<S::Error>> {
    let t0 = initial.t;
    let steps = step_count(t_end - t0, config.dt);
    sink.record(0, &initial, None).map_err(RunError::Sink)?;
    let mut state = initial;
    let mut reports = Vec::with_capacity(steps);
    for step in 1..=steps {
        let mut cfg = *config;
        let remaining = t_end - state.t;
        if step == steps {
            cfg.dt = remaining;
        }
        let (next, report) = match advance(&state, physics, &cfg) {
            Ok(x) => x,
            Err(error) => {
                return Err(RunError::Solver {
                    error,
                    step,
                    state: alloc::boxed::Box::new(state),
                })
            }
        };
        state = next;
        if step == steps {
            state.t = t_end;
        }
        if step % config.diagnostic_interval == 0 || step == steps {
            sink.record(step, &state, Some(&report)).map_err(RunError::Sink)?;
        }
        reports.push(report);
    }
    Ok(RunSummary { state, steps, reports })
}

/// Interaction pressure `f` of a state, using `J/ρ = 1/ρ₀∘y`.
pub fn interaction_pressure(state: &SimState, spec: &CouplingSpec) -> Result<ScalarField> {
    Ok(interaction_force(&state.rho, &state.psi_on_euler(), &state.j_over_rho(), spec)?.f)
}
