//! Energy bookkeeping, bounds and comparison of runs.

use alloc::vec::Vec;

use crate::coupling::CouplingSpec;
use crate::error::Result;
use crate::fluid::FluidParams;
use crate::grid::{divergence, jacobian, ScalarField, VectorField};
use crate::magnetics::divergence_sup;
use crate::momentum::{j_over_rho_quotient, FluxFields};
use crate::schrodinger::{gradient_energy, interaction_energy};
use crate::stepper::{Physics, SimState};

/// The six non-negative parts of the total energy.
///
/// The wave parts are those of the functional conserved by the wave
/// equation, `∫|∇ψ|² + ½|ψ|⁴ + αg(v)h(|ψ|²)`; with these weights the
/// exchange with the fluid through `f div u` cancels exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyComponents {
    pub kinetic: f64,
    pub internal: f64,
    pub magnetic: f64,
    pub wave_gradient: f64,
    pub wave_quartic: f64,
    pub coupling: f64,
}

impl EnergyComponents {
    pub fn total(&self) -> f64 {
        self.kinetic + self.internal + self.magnetic + self.wave_gradient + self.wave_quartic + self.coupling
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLedger {
    pub t: f64,
    pub energy: f64,
    /// `∫₀ᵗ D ds`, trapezoidal at the recording cadence.
    pub dissipation_cum: f64,
    /// `E(t) + ∫₀ᵗ D − E(0)`.
    pub residual: f64,
    pub components: EnergyComponents,
}

pub fn total_energy(state: &SimState, physics: &Physics) -> Result<EnergyComponents> {
    let p = &physics.fluid;
    let rho = &state.rho;
    let kinetic = (rho * &state.u.norm_sqr()).integral() * 0.5;
    let internal = rho.map(|r| r * p.internal_energy_at(r)).integral();
    let magnetic = 0.5 * state.h.norm_sqr().integral();
    let v = state.specific_volume()?;
    let s = state.psi.intensity();
    Ok(EnergyComponents {
        kinetic,
        internal,
        magnetic,
        wave_gradient: gradient_energy(&state.psi),
        wave_quartic: s.map(|x| 0.5 * x * x).integral(),
        coupling: interaction_energy(&state.psi, &v, &physics.coupling)?,
    })
}

/// `∫(μ|∇u|² + (λ(ρ)+μ)(div u)² + ν|∇H|²)`.
pub fn dissipation(state: &SimState, physics: &Physics) -> f64 {
    let p = &physics.fluid;
    let frob = |w: &VectorField| {
        let m = jacobian(w);
        let mut acc = ScalarField::zeros(w.grid());
        for row in &m {
            for d in row {
                acc.axpy(1.0, &(d * d));
            }
        }
        acc.integral()
    };
    let div = divergence(&state.u);
    let bulk = state
        .rho
        .zip_map(&div, |r, d| (p.lambda_at(r) + p.mu) * d * d)
        .integral();
    p.mu * frob(&state.u) + bulk + physics.magnetic.nu * frob(&state.h)
}

/// Accumulates the energy identity along a run.
#[derive(Clone, Debug, Default)]
pub struct EnergyTracker {
    e0: Option<f64>,
    last: Option<(f64, f64)>,
    cum: f64,
    pub history: Vec<EnergyLedger>,
}

impl EnergyTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, state: &SimState, physics: &Physics) -> Result<EnergyLedger> {
        let components = total_energy(state, physics)?;
        let energy = components.total();
        let d = dissipation(state, physics);
        if let Some((t_prev, d_prev)) = self.last {
            self.cum += 0.5 * (state.t - t_prev) * (d + d_prev);
        }
        self.last = Some((state.t, d));
        let e0 = *self.e0.get_or_insert(energy);
        let entry = EnergyLedger {
            t: state.t,
            energy,
            dissipation_cum: self.cum,
            residual: energy + self.cum - e0,
            components,
        };
        self.history.push(entry);
        Ok(entry)
    }
}

/// `|residual| / E(0)` for every entry.
pub fn energy_identity_check(history: &[EnergyLedger]) -> Vec<f64> {
    let e0 = match history.first() {
        Some(first) => first.energy,
        None => return Vec::new(),
    };
    history.iter().map(|h| (h.residual / e0).abs()).collect()
}

/// Observed order `log₂(coarse / fine)` for a halving of the step.
pub fn convergence_slope(coarse: f64, fine: f64) -> f64 {
    libm::log2(coarse / fine)
}

/// `max |J/ρ − 1/ρ₀(y)| / (1/ρ₀(y))` with `J` the evolved `det E`.
pub fn jrho_check(state: &SimState) -> Result<f64> {
    let quotient = j_over_rho_quotient(&state.map.jacobian, &state.rho)?;
    let transported = state.j_over_rho();
    Ok(quotient
        .values
        .iter()
        .zip(&transported.values)
        .map(|(q, t)| ((q - t) / t).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundsReport {
    pub rho_min: f64,
    pub rho_max: f64,
    pub jrho_min: f64,
    pub jrho_max: f64,
    pub div_h_inf: f64,
    pub psi_max: f64,
    /// `max ‖E‖₂`.
    pub e_inf: f64,
}

pub fn bounds_report(state: &SimState) -> Result<BoundsReport> {
    let jr = j_over_rho_quotient(&state.map.jacobian, &state.rho)?;
    Ok(BoundsReport {
        rho_min: state.rho.min(),
        rho_max: state.rho.max(),
        jrho_min: jr.min(),
        jrho_max: jr.max(),
        div_h_inf: divergence_sup(&state.h),
        psi_max: state.psi.max_abs(),
        e_inf: state.map.deformation_sup(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub l2: f64,
}

impl FieldStats {
    pub fn of(f: &ScalarField) -> Self {
        Self {
            mean: f.mean(),
            min: f.min(),
            max: f.max(),
            l2: f.l2_norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxStats {
    pub flux: FieldStats,
    pub vorticity: FieldStats,
    pub big_lambda: FieldStats,
}

pub fn flux_stats(f: &FluxFields) -> FluxStats {
    FluxStats {
        flux: FieldStats::of(&f.flux),
        vorticity: FieldStats::of(&f.vorticity),
        big_lambda: FieldStats::of(&f.big_lambda),
    }
}

/// Terms of the relative energy between two runs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RelativeEnergy {
    pub density: f64,
    pub momentum: f64,
    pub magnetic: f64,
    pub wave: f64,
    /// `∫₀ᵗ ∫|∇(u_A − u_B)|²`.
    pub velocity_gradient_cum: f64,
    /// `∫₀ᵗ ∫|∇(H_A − H_B)|²`.
    pub magnetic_gradient_cum: f64,
}

impl RelativeEnergy {
    /// Sum of the instantaneous quadratic terms.
    pub fn quadratic(&self) -> f64 {
        self.density + self.momentum + self.magnetic + self.wave
    }

    pub fn composite(&self) -> f64 {
        self.quadratic() + self.velocity_gradient_cum + self.magnetic_gradient_cum
    }
}

fn gradient_sq(w: &VectorField) -> f64 {
    jacobian(w).iter().flatten().map(|d| (d * d).integral()).sum()
}

/// Instantaneous terms; the cumulative ones are left at zero.
pub fn relative_energy(a: &SimState, b: &SimState) -> RelativeEnergy {
    a.rho.grid().check(b.rho.grid());
    let drho = &a.rho - &b.rho;
    let du = a.u.sub(&b.u);
    let dh = a.h.sub(&b.h);
    let dpsi = a.psi.sub(&b.psi);
    RelativeEnergy {
        density: (&drho * &drho).integral(),
        momentum: (&a.rho * &du.norm_sqr()).integral(),
        magnetic: dh.norm_sqr().integral(),
        wave: dpsi.intensity().integral(),
        velocity_gradient_cum: 0.0,
        magnetic_gradient_cum: 0.0,
    }
}

/// Relative energy with trapezoidal accumulation of the gradient terms.
#[derive(Clone, Debug, Default)]
pub struct RelativeEnergyTracker {
    last: Option<(f64, f64, f64)>,
    du_cum: f64,
    dh_cum: f64,
}

impl RelativeEnergyTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Both states must be at the same time.
    pub fn record(&mut self, a: &SimState, b: &SimState) -> RelativeEnergy {
        let gu = gradient_sq(&a.u.sub(&b.u));
        let gh = gradient_sq(&a.h.sub(&b.h));
        if let Some((t, pu, ph)) = self.last {
            let dt = a.t - t;
            self.du_cum += 0.5 * dt * (gu + pu);
            self.dh_cum += 0.5 * dt * (gh + ph);
        }
        self.last = Some((a.t, gu, gh));
        RelativeEnergy {
            velocity_gradient_cum: self.du_cum,
            magnetic_gradient_cum: self.dh_cum,
            ..relative_energy(a, b)
        }
    }
}

/// Quantities written once per diagnostic record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub ledger: EnergyLedger,
    pub bounds: BoundsReport,
    pub mass_rho: f64,
    pub mass_psi: f64,
    pub jrho_error: f64,
    pub flux: FluxStats,
}

/// Collects everything a sink writes per record.
pub fn collect(state: &SimState, physics: &Physics, tracker: &mut EnergyTracker) -> Result<StepDiagnostics> {
    let ledger = tracker.record(state, physics)?;
    let f = crate::stepper::interaction_pressure(state, &physics.coupling)?;
    let flux = crate::momentum::effective_flux(&state.u, &state.rho, &state.h, &f, &physics.fluid)?;
    Ok(StepDiagnostics {
        ledger,
        bounds: bounds_report(state)?,
        mass_rho: state.rho.integral(),
        mass_psi: crate::schrodinger::mass(&state.psi),
        jrho_error: jrho_check(state)?,
        flux: flux_stats(&flux),
    })
}

/// Energy with the `½|∇ψ|² + ¼|ψ|⁴` wave weights, kept for
/// comparison with the ledger.
pub fn textbook_energy(state: &SimState, fluid: &FluidParams, spec: &CouplingSpec) -> Result<f64> {
    let v = state.specific_volume()?;
    let rho = &state.rho;
    let fluid_part = 0.5 * (rho * &state.u.norm_sqr()).integral()
        + rho.map(|r| r * fluid.internal_energy_at(r)).integral()
        + 0.5 * state.h.norm_sqr().integral();
    Ok(fluid_part + crate::schrodinger::nls_energy(&state.psi, &v, spec)?)
}
