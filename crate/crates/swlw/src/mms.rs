//! Convergence studies.
//!
//! * Spatial: band-limited analytic fields pushed through the spectral
//!   operators, compared against closed forms on several grids.
//! * Wave equation: self-convergence of the split-step integrator under
//!   step halving with a frozen, non-uniform specific volume.
//! * Momentum: a manufactured velocity `u*(t,x) = cos(2πt) U(x)` whose
//!   forcing is built from the discrete operator, so the measured error is
//!   purely temporal.
//! * Coupled step: self-convergence of the full Picard step.

use std::f64::consts::PI;

use serde::Serialize;
use swlw_core::grid::{dealias, dealias_vector, divergence, gradient, jacobian, laplacian};
use swlw_core::magnetics::project_divfree;
use swlw_core::momentum::{lame_apply, lorentz_force, solve_linear_momentum, InnerOptions};
use swlw_core::schrodinger::{linear_step, nls_step_coupled};
use swlw_core::stepper::{advance, Physics, SimState, StepConfig};
use swlw_core::{Complex64, ComplexField, Grid, Result, ScalarField, VectorField};

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    /// Grid size for spatial studies, time step otherwise.
    pub h: f64,
    pub error: f64,
    /// `log₂` of the error ratio to the previous row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Study {
    pub name: String,
    pub levels: Vec<Level>,
}

impl Study {
    fn from_errors(name: &str, hs: &[f64], errors: &[f64]) -> Self {
        let levels = hs
            .iter()
            .zip(errors)
            .enumerate()
            .map(|(i, (&h, &error))| Level {
                h,
                error,
                order: (i > 0).then(|| (errors[i - 1] / error).log2()),
            })
            .collect();
        Self {
            name: name.to_string(),
            levels,
        }
    }

    /// Smallest observed order.
    pub fn min_order(&self) -> f64 {
        self.levels.iter().filter_map(|l| l.order).fold(f64::INFINITY, f64::min)
    }

    pub fn max_error(&self) -> f64 {
        self.levels.iter().map(|l| l.error).fold(0.0, f64::max)
    }

    pub fn table(&self) -> String {
        let mut s = format!("{}\n{:>12} {:>14} {:>8}\n", self.name, "h", "error", "order");
        for l in &self.levels {
            let order = l.order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!("{:>12.4e} {:>14.6e} {:>8}\n", l.h, l.error, order));
        }
        s
    }
}

fn trig(k: [f64; 2], a: f64, b: f64) -> impl Fn([f64; 2]) -> f64 {
    move |x| {
        let ph = 2.0 * PI * (k[0] * x[0] + k[1] * x[1]);
        a * ph.cos() + b * ph.sin()
    }
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    (a - b).max_abs()
}

/// Largest deviation of the spectral operators from closed forms on an
/// `n × n` grid, for fields whose modes satisfy `|k_i| ≤ 2`.
pub fn spatial_error(n: usize) -> Result<f64> {
    let g = Grid::new(n)?;
    let tp = 2.0 * PI;
    // f = cos 2π(x₁+2x₂) + 0.5 sin 2π(2x₁−x₂)
    let f = ScalarField::from_fn(&g, |x| trig([1.0, 2.0], 1.0, 0.0)(x) + trig([2.0, -1.0], 0.0, 0.5)(x));
    let fx = ScalarField::from_fn(&g, |x| -tp * trig([1.0, 2.0], 0.0, 1.0)(x) + 2.0 * tp * trig([2.0, -1.0], 0.5, 0.0)(x));
    let fy = ScalarField::from_fn(&g, |x| -2.0 * tp * trig([1.0, 2.0], 0.0, 1.0)(x) - tp * trig([2.0, -1.0], 0.5, 0.0)(x));
    let lap = f.scale(-5.0 * tp * tp);
    let mut err: f64 = 0.0;
    let gr = gradient(&f);
    err = err.max(max_diff(&gr.0[0], &fx)).max(max_diff(&gr.0[1], &fy));
    err = err.max(max_diff(&laplacian(&f), &lap));

    // Product of two fields with |k| ≤ 1 stays inside the 2/3 band for n ≥ 8.
    let a = ScalarField::from_fn(&g, trig([1.0, 0.0], 1.0, 0.0));
    let b = ScalarField::from_fn(&g, trig([0.0, 1.0], 0.0, 1.0));
    let ab = ScalarField::from_fn(&g, |x| (tp * x[0]).cos() * (tp * x[1]).sin());
    err = err.max(max_diff(&dealias(&(&a * &b)), &ab));

    // u = (sin 2πx₂, cos 2πx₁) + ∇φ with φ = cos 2π(x₁+x₂): projection
    // removes the gradient part exactly, divergence of the rest is −2(2π)²φ.
    let phi = trig([1.0, 1.0], 1.0, 0.0);
    let sol_at = |x: [f64; 2]| [(tp * x[1]).sin(), (tp * x[0]).cos()];
    let grad_phi_at = |x: [f64; 2]| {
        let s = -tp * trig([1.0, 1.0], 0.0, 1.0)(x);
        [s, s]
    };
    let sol = VectorField::from_fn(&g, sol_at);
    let grad_phi = VectorField::from_fn(&g, grad_phi_at);
    let u = sol.add(&grad_phi);
    let p = project_divfree(&u);
    err = err.max(p.sub(&sol).max_abs());
    let div = divergence(&u);
    err = err.max(max_diff(&div, &ScalarField::from_fn(&g, |x| -2.0 * tp * tp * phi(x))));
    let j = jacobian(&sol);
    err = err.max(max_diff(&j[0][1], &ScalarField::from_fn(&g, |x| tp * (tp * x[1]).cos())));
    err = err.max(dealias_vector(&sol).sub(&sol).max_abs());

    // Lamé operator at constant density: −μΔu − (μ+λ)∇div u.
    let params = Physics::default().fluid;
    let rho = ScalarField::constant(&g, 1.0);
    let lame = lame_apply(&u, &rho, &params)?;
    let lam = params.lambda_at(1.0);
    let expect = VectorField::from_fn(&g, |x| {
        let s = sol_at(x);
        let gp = grad_phi_at(x);
        let c = params.mu * tp * tp;
        let d = (params.mu + lam) * 2.0 * tp * tp;
        [c * s[0] + 2.0 * c * gp[0] + d * gp[0], c * s[1] + 2.0 * c * gp[1] + d * gp[1]]
    });
    err = err.max(lame.sub(&expect).max_abs());

    // Uniform field exerts no Lorentz force.
    let h = VectorField::from_fn(&g, |_| [0.3, -0.2]);
    err = err.max(lorentz_force(&h).max_abs());

    // Exact free Schrödinger flow of a two-mode wave.
    let psi = ComplexField::from_fn(&g, |y| {
        Complex64::from_polar(1.0, tp * y[0]) + Complex64::from_polar(0.5, tp * (2.0 * y[0] - y[1]))
    });
    let tau = 0.013;
    let w1 = tp * tp;
    let w2 = 5.0 * tp * tp;
    let exact = ComplexField::from_fn(&g, |y| {
        Complex64::from_polar(1.0, tp * y[0] - w1 * tau) + Complex64::from_polar(0.5, tp * (2.0 * y[0] - y[1]) - w2 * tau)
    });
    err = err.max(linear_step(&psi, tau).sub(&exact).max_abs());
    Ok(err)
}

pub fn spatial_study(n0: usize, levels: usize) -> Result<Study> {
    let ns: Vec<usize> = (0..levels).map(|k| n0 << k).collect();
    let errors = ns.iter().map(|&n| spatial_error(n)).collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    Ok(Study::from_errors("spatial (band-limited operators)", &hs, &errors))
}

/// Split-step self-convergence: errors between successive halvings of
/// `dt0` over `t_end`, with `ψ` and `v = 1/ρ` from `state`.
pub fn nls_study(state: &SimState, physics: &Physics, dt0: f64, t_end: f64, levels: usize) -> Result<Study> {
    let v = state.rho.map(|r| 1.0 / r);
    let solve = |dt: f64| -> Result<ComplexField> {
        let steps = (t_end / dt).round() as usize;
        let mut psi = state.psi.clone();
        for _ in 0..steps {
            psi = nls_step_coupled(&psi, &v, &physics.coupling, dt)?;
        }
        Ok(psi)
    };
    let dts: Vec<f64> = (0..=levels).map(|k| dt0 / (1u64 << k) as f64).collect();
    let sols = dts.iter().map(|&dt| solve(dt)).collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = sols.windows(2).map(|w| w[0].sub(&w[1]).l2_norm()).collect();
    Ok(Study::from_errors("wave split-step (self-convergence)", &dts[..levels], &errors))
}

/// Backward-Euler momentum solve against `u*(t) = cos(2πt) U` with
/// density and advecting velocity taken from `state`.
pub fn momentum_study(state: &SimState, physics: &Physics, dt0: f64, t_end: f64, levels: usize) -> Result<Study> {
    let g = state.rho.grid().clone();
    let rho = &state.rho;
    let params = &physics.fluid;
    let shape = VectorField::from_fn(&g, |x| {
        [
            (2.0 * PI * x[1]).sin() + 0.5 * (2.0 * PI * (x[0] + x[1])).cos(),
            0.7 * (2.0 * PI * x[0]).cos(),
        ]
    });
    let exact = |t: f64| shape.scale((2.0 * PI * t).cos());
    let opts = InnerOptions::default();
    let solve = |dt: f64| -> Result<VectorField> {
        let steps = (t_end / dt).round() as usize;
        let mut u = exact(0.0);
        for k in 1..=steps {
            let t = k as f64 * dt;
            let ue = exact(t);
            // ρ ∂_t u* + ρ(u*·∇)u* + L u*, all in discrete form.
            let j = jacobian(&ue);
            let adv = VectorField::new(
                rho * &(&(&ue.0[0] * &j[0][0]) + &(&ue.0[1] * &j[0][1])),
                rho * &(&(&ue.0[0] * &j[1][0]) + &(&ue.0[1] * &j[1][1])),
            );
            let mut rhs = dealias_vector(&adv);
            rhs.axpy(1.0, &lame_apply(&ue, rho, params)?);
            rhs.axpy(1.0, &shape.mul_scalar(rho).scale(-2.0 * PI * (2.0 * PI * t).sin()));
            u = solve_linear_momentum(rho, &ue, &rhs, &u, dt, params, &opts, None)?.v;
        }
        Ok(u)
    };
    let dts: Vec<f64> = (0..levels).map(|k| dt0 / (1u64 << k) as f64).collect();
    let errors = dts
        .iter()
        .map(|&dt| Ok(solve(dt)?.sub(&exact(t_end)).l2_norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Study::from_errors("momentum backward Euler (manufactured)", &dts, &errors))
}

fn state_distance(a: &SimState, b: &SimState) -> f64 {
    let d = (&a.rho - &b.rho).l2_norm().powi(2)
        + a.u.sub(&b.u).l2_norm().powi(2)
        + a.h.sub(&b.h).l2_norm().powi(2)
        + a.psi.sub(&b.psi).l2_norm().powi(2);
    d.sqrt()
}

/// Self-convergence of the full coupled step under `dt` halving.
pub fn coupled_study(state: &SimState, physics: &Physics, config: &StepConfig, t_end: f64, levels: usize) -> Result<Study> {
    let solve = |dt: f64| -> Result<SimState> {
        let steps = (t_end / dt).round() as usize;
        let cfg = StepConfig { dt, ..*config };
        let mut s = state.clone();
        for _ in 0..steps {
            s = advance(&s, physics, &cfg)?.0;
        }
        Ok(s)
    };
    let dts: Vec<f64> = (0..=levels).map(|k| config.dt / (1u64 << k) as f64).collect();
    let sols = dts.iter().map(|&dt| solve(dt)).collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = sols.windows(2).map(|w| state_distance(&w[0], &w[1])).collect();
    Ok(Study::from_errors("coupled step (self-convergence)", &dts[..levels], &errors))
}
