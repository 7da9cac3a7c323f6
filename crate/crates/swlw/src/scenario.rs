//! Named initial conditions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swlw_core::{Complex64, ComplexField, Grid, Result, ScalarField, VectorField};
use swlw_core::stepper::SimState;

pub const NAMES: [&str; 4] = ["equilibrium", "smooth-random", "shear", "perturbed-pair"];

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    /// Constant density, fluid at rest, plane-wave `ψ = A e^{i2πk·y}`.
    Equilibrium { rho: f64, amplitude: f64, k: [i64; 2] },
    /// Band-limited random fields.
    SmoothRandom(RandomSpec),
    /// `u = (0, U sin 2πx₁)`, `ρ = 1 + r sin 2πx₂`, plane-wave `ψ`, `H = (0, h cos 2πx₁)`.
    Shear { velocity: f64, rho_mod: f64, amplitude: f64, field: f64 },
    /// Two random states a distance of order `delta` apart.
    PerturbedPair { base: RandomSpec, delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub seed: u64,
    /// Largest wavenumber per axis.
    pub modes: i64,
    pub rho_mean: f64,
    /// Density lies in `rho_mean ± rho_spread`.
    pub rho_spread: f64,
    pub u_amp: f64,
    pub h_amp: f64,
    pub psi_amp: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            seed: 7,
            modes: 2,
            rho_mean: 1.0,
            rho_spread: 0.2,
            u_amp: 0.5,
            h_amp: 0.3,
            psi_amp: 1.0,
        }
    }
}

impl Scenario {
    pub fn equilibrium() -> Self {
        Scenario::Equilibrium {
            rho: 1.0,
            amplitude: 1.0,
            k: [1, 0],
        }
    }

    pub fn shear() -> Self {
        Scenario::Shear {
            velocity: 1.0,
            rho_mod: 0.1,
            amplitude: 1.0,
            field: 0.2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Equilibrium { .. } => "equilibrium",
            Scenario::SmoothRandom(_) => "smooth-random",
            Scenario::Shear { .. } => "shear",
            Scenario::PerturbedPair { .. } => "perturbed-pair",
        }
    }
}

/// Initial data; `partner` is set only for paired scenarios.
#[derive(Clone, Debug)]
pub struct Initial {
    pub primary: SimState,
    pub partner: Option<SimState>,
}

pub fn build(scenario: &Scenario, n: usize) -> Result<Initial> {
    let g = Grid::new(n)?;
    match scenario {
        Scenario::Equilibrium { rho, amplitude, k } => {
            let (a, k) = (*amplitude, [k[0] as f64, k[1] as f64]);
            let psi = ComplexField::from_fn(&g, |y| Complex64::from_polar(a, 2.0 * PI * (k[0] * y[0] + k[1] * y[1])));
            let s = SimState::new(ScalarField::constant(&g, *rho), VectorField::zeros(&g), VectorField::zeros(&g), psi)?;
            Ok(Initial {
                primary: s,
                partner: None,
            })
        }
        Scenario::SmoothRandom(spec) => Ok(Initial {
            primary: random_state(&g, spec, 0.0)?,
            partner: None,
        }),
        Scenario::Shear {
            velocity,
            rho_mod,
            amplitude,
            field,
        } => {
            let (v, r, a, h) = (*velocity, *rho_mod, *amplitude, *field);
            let rho = ScalarField::from_fn(&g, |x| 1.0 + r * (2.0 * PI * x[1]).sin());
            let u = VectorField::from_fn(&g, |x| [0.0, v * (2.0 * PI * x[0]).sin()]);
            let hf = VectorField::from_fn(&g, |x| [0.0, h * (2.0 * PI * x[0]).cos()]);
            let psi = ComplexField::from_fn(&g, |y| Complex64::from_polar(a, 2.0 * PI * y[0]));
            Ok(Initial {
                primary: SimState::new(rho, u, hf, psi)?,
                partner: None,
            })
        }
        Scenario::PerturbedPair { base, delta } => Ok(Initial {
            primary: random_state(&g, base, 0.0)?,
            partner: Some(random_state(&g, base, *delta)?),
        }),
    }
}

/// Random trigonometric polynomial with `|k_i| ≤ modes`, normalized so its
/// maximum modulus on a fixed 128² sampling is one. The normalization does
/// not depend on the simulation grid, so every resolution sees the same
/// continuous field.
struct RandomField {
    terms: Vec<([f64; 2], f64, f64)>,
    scale: f64,
}

impl RandomField {
    fn new(rng: &mut ChaCha8Rng, modes: i64) -> Self {
        let mut terms = Vec::new();
        for k1 in -modes..=modes {
            for k2 in 0..=modes {
                if k2 == 0 && k1 <= 0 {
                    continue;
                }
                let w = 1.0 / (1.0 + (k1 * k1 + k2 * k2) as f64);
                let a = rng.gen_range(-1.0..1.0) * w;
                let b = rng.gen_range(-1.0..1.0) * w;
                terms.push(([2.0 * PI * k1 as f64, 2.0 * PI * k2 as f64], a, b));
            }
        }
        let mut f = Self { terms, scale: 1.0 };
        let m = 128;
        let mut max: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                max = max.max(f.eval([i as f64 / m as f64, j as f64 / m as f64]).abs());
            }
        }
        f.scale = 1.0 / max;
        f
    }

    fn eval(&self, x: [f64; 2]) -> f64 {
        let mut acc = 0.0;
        for (k, a, b) in &self.terms {
            let ph = k[0] * x[0] + k[1] * x[1];
            acc += a * ph.cos() + b * ph.sin();
        }
        acc * self.scale
    }

    /// `(∂₂f, −∂₁f)`, unnormalized amplitude.
    fn perp_gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let mut d = [0.0; 2];
        for (k, a, b) in &self.terms {
            let ph = k[0] * x[0] + k[1] * x[1];
            let s = -a * ph.sin() + b * ph.cos();
            d[0] += k[1] * s;
            d[1] -= k[0] * s;
        }
        [d[0] * self.scale, d[1] * self.scale]
    }
}

fn random_state(g: &Grid, spec: &RandomSpec, delta: f64) -> Result<SimState> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fields: Vec<RandomField> = (0..6).map(|_| RandomField::new(&mut rng, spec.modes)).collect();
    let mut prng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let pert: Vec<RandomField> = (0..6).map(|_| RandomField::new(&mut prng, spec.modes)).collect();

    let rho = ScalarField::from_fn(g, |x| {
        spec.rho_mean + spec.rho_spread * fields[0].eval(x) + delta * pert[0].eval(x)
    });
    let u = VectorField::from_fn(g, |x| {
        [
            spec.u_amp * fields[1].eval(x) + delta * pert[1].eval(x),
            spec.u_amp * fields[2].eval(x) + delta * pert[2].eval(x),
        ]
    });
    // Stream-function fields are divergence-free at every resolution.
    let hmax = stream_max(&fields[3]);
    let pmax = stream_max(&pert[3]);
    let h = VectorField::from_fn(g, |x| {
        let a = fields[3].perp_gradient(x);
        let b = pert[3].perp_gradient(x);
        [
            spec.h_amp * a[0] / hmax + delta * b[0] / pmax,
            spec.h_amp * a[1] / hmax + delta * b[1] / pmax,
        ]
    });
    let psi = ComplexField::from_fn(g, |y| {
        Complex64::new(
            spec.psi_amp * (1.0 + 0.3 * fields[4].eval(y)) + delta * pert[4].eval(y),
            spec.psi_amp * 0.3 * fields[5].eval(y) + delta * pert[5].eval(y),
        )
    });
    SimState::new(rho, u, h, psi)
}

fn stream_max(f: &RandomField) -> f64 {
    let m = 128;
    let mut max: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let d = f.perp_gradient([i as f64 / m as f64, j as f64 / m as f64]);
            max = max.max(d[0].hypot(d[1]));
        }
    }
    max
}
