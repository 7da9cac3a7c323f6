//! Forces, the Lamé operator and the linear momentum solve.
//!
//! The momentum balance is used in non-conservative form
//!
//! ```text
//! ρ(v_t + a·∇v) + L_ρ v = H·∇H − ½∇|H|² − ∇p(ρ) + ∇f
//! L_ρ v = −div(λ(ρ) div v Id + μ(∇v + ∇vᵀ)) = −μΔv − ∇((μ + λ(ρ)) div v)
//! ```
//!
//! with the interaction pressure `f = α g'(1/ρ) h(|ψ∘y|²) J/ρ` (the
//! coefficient `α` lives inside `f`).

use alloc::vec::Vec;

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::fluid::{check_positive, FluidParams};
use crate::grid::{
    dealias, dealias_vector, divergence, gradient, curl_z, ComplexField, Grid, ScalarField, Spectrum, VectorField,
};

#[derive(Clone, Debug, PartialEq)]
pub struct MomentumRhs {
    /// `H·∇H − ½∇|H|²`.
    pub lorentz: VectorField,
    pub pressure_grad: VectorField,
    /// `∇f`.
    pub interaction_grad: VectorField,
    /// `lorentz − pressure_grad + interaction_grad`.
    pub total: VectorField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InteractionForce {
    pub f: ScalarField,
    pub grad_f: VectorField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluxFields {
    /// Effective viscous flux `(2μ+λ)div u − p − ½|H|² + f`.
    pub flux: ScalarField,
    /// `∂₂u₁ − ∂₁u₂`.
    pub vorticity: ScalarField,
    /// `Λ(ρ)`.
    pub big_lambda: ScalarField,
}

/// Mean viscosity split: `λ̄` is the midpoint of the range of `λ(ρ)`.
fn lambda_bar(params: &FluidParams, rho: &ScalarField) -> f64 {
    0.5 * (params.lambda_at(rho.min()) + params.lambda_at(rho.max()))
}

fn vector_spectrum_zero(g: &Grid) -> [Spectrum; 2] {
    [Spectrum::zeros(g), Spectrum::zeros(g)]
}

/// Spectral `L_ρ v` given `v̂`, with `λ(ρ) − λ̄` as the variable part.
fn lame_spectral(g: &Grid, vh: &[Spectrum; 2], lam_var: &ScalarField, mu: f64, lam_bar: f64) -> [Spectrum; 2] {
    let mut div = vh[0].derivative(0);
    div.axpy(1.0, &vh[1].derivative(1));
    let div_phys = g.inverse_real(&div);
    let mut var = g.forward(&(lam_var * &div_phys));
    var.dealias();
    var.axpy(mu + lam_bar, &div);
    let mut out = vector_spectrum_zero(g);
    for c in 0..2 {
        out[c] = vh[c].laplacian();
        for z in out[c].coeffs.iter_mut() {
            *z *= -mu;
        }
        out[c].axpy(-1.0, &var.derivative(c));
    }
    out
}

/// `L_ρ u`, the variable-coefficient Lamé operator.
pub fn lame_apply(u: &VectorField, rho: &ScalarField, params: &FluidParams) -> Result<VectorField> {
    check_positive(rho)?;
    let g = u.grid().clone();
    g.check(rho.grid());
    let lb = lambda_bar(params, rho);
    let lam_var = rho.map(|r| params.lambda_at(r) - lb);
    let vh = g.forward_vector(u);
    Ok(g.inverse_vector(&lame_spectral(&g, &vh, &lam_var, params.mu, lb)))
}

/// `J/ρ` as the quotient of the two evolved fields.
pub fn j_over_rho_quotient(jacobian: &ScalarField, rho: &ScalarField) -> Result<ScalarField> {
    check_positive(rho)?;
    Ok(jacobian.zip_map(rho, |j, r| j / r))
}

/// `f = α g'(1/ρ) h(|ψ∘y|²) (J/ρ)` and its spectral gradient.
pub fn interaction_force(
    rho: &ScalarField,
    psi_on_euler: &ComplexField,
    j_over_rho: &ScalarField,
    spec: &CouplingSpec,
) -> Result<InteractionForce> {
    check_positive(rho)?;
    let g = rho.grid();
    if let Some(&value) = j_over_rho.values.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::DegenerateMap {
            min_jacobian: value,
            threshold: 0.0,
        });
    }
    if spec.alpha == 0.0 {
        return Ok(InteractionForce {
            f: ScalarField::zeros(g),
            grad_f: VectorField::zeros(g),
        });
    }
    let s = psi_on_euler.intensity();
    let values: Vec<f64> = (0..g.len())
        .map(|i| {
            spec.alpha
                * spec.g_prime_unchecked(1.0 / rho.values[i])
                * spec.h_unchecked(s.values[i])
                * j_over_rho.values[i]
        })
        .collect();
    let f = ScalarField::from_values(g, values)?;
    let grad_f = gradient(&f);
    Ok(InteractionForce { f, grad_f })
}

/// `H·∇H − ½∇|H|²`, products dealiased.
pub fn lorentz_force(h: &VectorField) -> VectorField {
    let g = h.grid();
    let [s1, s2] = g.forward_vector(h);
    let (d11, d12) = g.inverse_pair(&s1.derivative(0), &s1.derivative(1));
    let (d21, d22) = g.inverse_pair(&s2.derivative(0), &s2.derivative(1));
    let (h1, h2) = (&h.0[0], &h.0[1]);
    let t1 = &(h1 * &d11) + &(h2 * &d12);
    let t2 = &(h1 * &d21) + &(h2 * &d22);
    let mut out = dealias_vector(&VectorField([t1, t2]));
    let half_mag = dealias(&h.norm_sqr().scale(0.5));
    out.axpy(-1.0, &gradient(&half_mag));
    out
}

pub fn assemble_rhs(
    rho: &ScalarField,
    h: &VectorField,
    psi_on_euler: &ComplexField,
    j_over_rho: &ScalarField,
    params: &FluidParams,
    spec: &CouplingSpec,
) -> Result<MomentumRhs> {
    let lorentz = lorentz_force(h);
    let pressure_grad = gradient(&params.pressure(rho)?);
    let interaction_grad = interaction_force(rho, psi_on_euler, j_over_rho, spec)?.grad_f;
    let mut total = lorentz.sub(&pressure_grad);
    total.axpy(1.0, &interaction_grad);
    if !total.is_finite() {
        return Err(Error::NonFinite("momentum right-hand side"));
    }
    Ok(MomentumRhs {
        lorentz,
        pressure_grad,
        interaction_grad,
        total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerOptions {
    /// Relative update at which the inner iteration stops.
    pub tol: f64,
    pub max_inner: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_inner: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolve {
    pub v: VectorField,
    pub iterations: usize,
    /// Relative size of the last correction.
    pub update: f64,
}

/// Discrete momentum operator `A v = ρv/dt + ρ(a·∇)v + L_ρ v` in spectral form.
struct MomentumOperator<'a> {
    grid: Grid,
    rho: &'a ScalarField,
    adv: &'a VectorField,
    lam_var: ScalarField,
    mu: f64,
    lam_bar: f64,
    rho_bar: f64,
    inv_dt: f64,
    advect: bool,
}

impl<'a> MomentumOperator<'a> {
    fn new(rho: &'a ScalarField, adv: &'a VectorField, dt: f64, params: &FluidParams) -> Self {
        let lam_bar = lambda_bar(params, rho);
        Self {
            grid: rho.grid().clone(),
            rho,
            adv,
            lam_var: rho.map(|r| params.lambda_at(r) - lam_bar),
            mu: params.mu,
            lam_bar,
            rho_bar: 0.5 * (rho.min() + rho.max()),
            inv_dt: 1.0 / dt,
            advect: adv.max_abs() > 0.0,
        }
    }

    /// Returns `A v̂` given `v̂` and `v` in physical space.
    fn apply(&self, vh: &[Spectrum; 2], v: &VectorField) -> [Spectrum; 2] {
        let g = &self.grid;
        let mut out = lame_spectral(g, vh, &self.lam_var, self.mu, self.lam_bar);
        let mut mass = v.mul_scalar(self.rho);
        if self.advect {
            let (d11, d12) = g.inverse_pair(&vh[0].derivative(0), &vh[0].derivative(1));
            let (d21, d22) = g.inverse_pair(&vh[1].derivative(0), &vh[1].derivative(1));
            let (a1, a2) = (&self.adv.0[0], &self.adv.0[1]);
            let adv1 = &(&(a1 * &d11) + &(a2 * &d12)) * self.rho;
            let adv2 = &(&(a1 * &d21) + &(a2 * &d22)) * self.rho;
            let [mut s1, mut s2] = g.forward_vector(&VectorField([adv1, adv2]));
            s1.dealias();
            s2.dealias();
            out[0].axpy(1.0, &s1);
            out[1].axpy(1.0, &s2);
        }
        for c in mass.0.iter_mut() {
            for x in c.values.iter_mut() {
                *x *= self.inv_dt;
            }
        }
        let m = g.forward_vector(&mass);
        out[0].axpy(1.0, &m[0]);
        out[1].axpy(1.0, &m[1]);
        out
    }

    /// Exact inverse of the constant-coefficient part
    /// `ρ̄/dt − μΔ − (μ+λ̄)∇div`, applied in place.
    fn precondition(&self, r: &mut [Spectrum; 2]) {
        let g = &self.grid;
        let c = self.mu + self.lam_bar;
        for i in 0..g.len() {
            let a = self.rho_bar * self.inv_dt + self.mu * g.k_squared(i);
            let d = g.derivative_symbol(i);
            let d2 = d[0] * d[0] + d[1] * d[1];
            let (r1, r2) = (r[0].coeffs[i], r[1].coeffs[i]);
            let dot = r1 * d[0] + r2 * d[1];
            let w = dot * (c / (a + c * d2));
            r[0].coeffs[i] = (r1 - w * d[0]) / a;
            r[1].coeffs[i] = (r2 - w * d[1]) / a;
        }
    }
}

fn vector_energy(s: &[Spectrum; 2]) -> f64 {
    s[0].energy() + s[1].energy()
}

#[allow(clippy::too_many_arguments)]
/// Backward-Euler step of `ρ(v_t + a·∇v) + L_ρ v = rhs` from `u_n`.
///
/// The constant-coefficient part is inverted exactly per mode (solenoidal
/// and compressive parts separately); the remainder is iterated to a fixed
/// point starting from `guess` (or `u_n`).
pub fn solve_linear_momentum(
    rho: &ScalarField,
    u_adv: &VectorField,
    rhs: &VectorField,
    u_n: &VectorField,
    dt: f64,
    params: &FluidParams,
    opts: &InnerOptions,
    guess: Option<&VectorField>,
) -> Result<LinearSolve> {
    check_positive(rho)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: "time step must be positive",
        });
    }
    let g = rho.grid().clone();
    g.check(u_adv.grid());
    g.check(rhs.grid());
    g.check(u_n.grid());
    let op = MomentumOperator::new(rho, u_adv, dt, params);

    let mut b = g.forward_vector(&u_n.mul_scalar(rho).scale(1.0 / dt));
    let rh = g.forward_vector(rhs);
    b[0].axpy(1.0, &rh[0]);
    b[1].axpy(1.0, &rh[1]);

    let mut v = guess.unwrap_or(u_n).clone();
    let mut vh = g.forward_vector(&v);
    let mut update = f64::INFINITY;
    for it in 1..=opts.max_inner {
        let av = op.apply(&vh, &v);
        let mut r = b.clone();
        r[0].axpy(-1.0, &av[0]);
        r[1].axpy(-1.0, &av[1]);
        op.precondition(&mut r);
        vh[0].axpy(1.0, &r[0]);
        vh[1].axpy(1.0, &r[1]);
        v = g.inverse_vector(&vh);
        let size = libm::sqrt(vector_energy(&vh));
        let step = libm::sqrt(vector_energy(&r));
        update = if size > 0.0 { step / size } else { step };
        if !update.is_finite() {
            return Err(Error::NonFinite("momentum solve"));
        }
        if update <= opts.tol || step == 0.0 {
            return Ok(LinearSolve {
                v,
                iterations: it,
                update,
            });
        }
    }
    Err(Error::InnerNotConverged {
        iterations: opts.max_inner,
        update,
    })
}

/// Relative L² residual `‖b − A v‖ / ‖b‖` of the discrete momentum equation.
pub fn momentum_residual(
    v: &VectorField,
    rho: &ScalarField,
    u_adv: &VectorField,
    rhs: &VectorField,
    u_n: &VectorField,
    dt: f64,
    params: &FluidParams,
) -> f64 {
    let g = rho.grid().clone();
    let op = MomentumOperator::new(rho, u_adv, dt, params);
    let mut b = g.forward_vector(&u_n.mul_scalar(rho).scale(1.0 / dt));
    let rh = g.forward_vector(rhs);
    b[0].axpy(1.0, &rh[0]);
    b[1].axpy(1.0, &rh[1]);
    let av = op.apply(&g.forward_vector(v), v);
    let norm_b = libm::sqrt(vector_energy(&b));
    b[0].axpy(-1.0, &av[0]);
    b[1].axpy(-1.0, &av[1]);
    let r = libm::sqrt(vector_energy(&b));
    if norm_b > 0.0 {
        r / norm_b
    } else {
        r
    }
}

pub fn effective_flux(
    u: &VectorField,
    rho: &ScalarField,
    h: &VectorField,
    f: &ScalarField,
    params: &FluidParams,
) -> Result<FluxFields> {
    check_positive(rho)?;
    let div = divergence(u);
    let g = rho.grid();
    let values: Vec<f64> = (0..g.len())
        .map(|i| {
            let r = rho.values[i];
            let hh = h.0[0].values[i] * h.0[0].values[i] + h.0[1].values[i] * h.0[1].values[i];
            (2.0 * params.mu + params.lambda_at(r)) * div.values[i] - params.pressure_at(r) - 0.5 * hh + f.values[i]
        })
        .collect();
    Ok(FluxFields {
        flux: ScalarField::from_values(g, values)?,
        vorticity: curl_z(u),
        big_lambda: rho.map(|r| params.big_lambda_at(r)),
    })
}

/// `D_tΛ(ρ) + F + p + ½|H|² − f` between two consecutive states, with the
/// material derivative discretized by a backward difference at the later
/// state. By the continuity equation it vanishes up to `O(dt)`.
pub fn lambda_transport_residual(
    rho_prev: &ScalarField,
    rho: &ScalarField,
    u: &VectorField,
    h: &VectorField,
    f: &ScalarField,
    params: &FluidParams,
    dt: f64,
) -> Result<ScalarField> {
    check_positive(rho_prev)?;
    let flux = effective_flux(u, rho, h, f, params)?;
    let lam_prev = rho_prev.map(|r| params.big_lambda_at(r));
    let transport = dealias(&u.dot(&gradient(&flux.big_lambda)));
    let mut out = (&flux.big_lambda - &lam_prev).scale(1.0 / dt);
    out.axpy(1.0, &transport);
    out.axpy(1.0, &flux.flux);
    for i in 0..out.values.len() {
        let r = rho.values[i];
        let hh = h.0[0].values[i] * h.0[0].values[i] + h.0[1].values[i] * h.0[1].values[i];
        out.values[i] += params.pressure_at(r) + 0.5 * hh - f.values[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use num_complex::Complex64;

    fn tp() -> f64 {
        2.0 * PI
    }

    #[test]
    fn lame_of_shear_mode() {
        let g = Grid::new(32).unwrap();
        let p = FluidParams::default();
        let rho = ScalarField::from_fn(&g, |x| 1.0 + 0.2 * libm::sin(tp() * x[0]));
        let u = VectorField::from_fn(&g, |x| [libm::sin(tp() * x[1]), 0.0]);
        let lu = lame_apply(&u, &rho, &p).unwrap();
        let expected = u.scale(p.mu * tp() * tp());
        assert!(lu.sub(&expected).max_abs() < 1e-10);
        assert_eq!(lame_apply(&VectorField::zeros(&g), &rho, &p).unwrap().max_abs(), 0.0);
        let c = VectorField::from_fn(&g, |_| [0.4, -1.0]);
        assert!(lame_apply(&c, &rho, &p).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn lame_matches_finite_differences() {
        let g = Grid::new(64).unwrap();
        let p = FluidParams { b: 0.3, ..Default::default() };
        let rho = ScalarField::from_fn(&g, |x| 1.0 + 0.1 * libm::cos(tp() * x[1]));
        let u = VectorField::from_fn(&g, |x| {
            [libm::sin(tp() * x[0]) * libm::cos(tp() * x[1]), 0.5 * libm::cos(tp() * x[0])]
        });
        let lu = lame_apply(&u, &rho, &p).unwrap();
        // Closed-form divergence of the stress at a few points, via nested
        // central differences of the analytic fields.
        let h = 1e-4;
        let uf = |x: [f64; 2]| [libm::sin(tp() * x[0]) * libm::cos(tp() * x[1]), 0.5 * libm::cos(tp() * x[0])];
        let rf = |x: [f64; 2]| 1.0 + 0.1 * libm::cos(tp() * x[1]);
        let grad = |x: [f64; 2]| {
            let mut m = [[0.0; 2]; 2];
            for j in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[j] += h;
                xm[j] -= h;
                let (a, b) = (uf(xp), uf(xm));
                for i in 0..2 {
                    m[i][j] = (a[i] - b[i]) / (2.0 * h);
                }
            }
            m
        };
        let stress = |x: [f64; 2]| {
            let m = grad(x);
            let div = m[0][0] + m[1][1];
            let lam = p.lambda_at(rf(x));
            let mut s = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] = p.mu * (m[i][j] + m[j][i]) + if i == j { lam * div } else { 0.0 };
                }
            }
            s
        };
        for idx in [0usize, 77, 1000, 2222, 4000] {
            let x = g.node(idx);
            let mut out = [0.0; 2];
            for j in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[j] += h;
                xm[j] -= h;
                let (a, b) = (stress(xp), stress(xm));
                for i in 0..2 {
                    out[i] -= (a[i][j] - b[i][j]) / (2.0 * h);
                }
            }
            for i in 0..2 {
                assert!((lu.0[i].values[idx] - out[i]).abs() < 1e-5, "{} vs {}", lu.0[i].values[idx], out[i]);
            }
        }
    }

    #[test]
    fn constant_density_eigenmode_closed_form() {
        let g = Grid::new(32).unwrap();
        let p = FluidParams::default();
        let rho0 = 1.3;
        let rho = ScalarField::constant(&g, rho0);
        let zero = VectorField::zeros(&g);
        let dt = 0.01;
        // Solenoidal mode: eigenvalue μ|2πk|².
        let shape = |x: [f64; 2]| [libm::sin(tp() * x[1]), 0.0];
        let u_n = VectorField::from_fn(&g, shape).scale(0.7);
        let rhs = VectorField::from_fn(&g, shape).scale(0.2);
        let eig = p.mu * tp() * tp();
        let sol = solve_linear_momentum(&rho, &zero, &rhs, &u_n, dt, &p, &InnerOptions::default(), None).unwrap();
        let amp = (0.7 + dt * 0.2 / rho0) / (1.0 + dt * eig / rho0);
        assert!(sol.v.sub(&VectorField::from_fn(&g, shape).scale(amp)).max_abs() < 1e-10);
        // Compressive mode: eigenvalue (2μ+λ)|2πk|².
        let shape = |x: [f64; 2]| [libm::sin(tp() * x[0]), 0.0];
        let u_n = VectorField::from_fn(&g, shape);
        let eig = (2.0 * p.mu + p.lambda_at(rho0)) * tp() * tp();
        let sol = solve_linear_momentum(&rho, &zero, &zero, &u_n, dt, &p, &InnerOptions::default(), None).unwrap();
        let amp = 1.0 / (1.0 + dt * eig / rho0);
        assert!(sol.v.sub(&u_n.scale(amp)).max_abs() < 1e-10);
        let z = solve_linear_momentum(&rho, &zero, &zero, &zero, dt, &p, &InnerOptions::default(), None).unwrap();
        assert_eq!(z.v.max_abs(), 0.0);
    }

    #[test]
    fn variable_coefficients_converge_with_small_residual() {
        let g = Grid::new(32).unwrap();
        let p = FluidParams::default();
        let rho = ScalarField::from_fn(&g, |x| 1.0 + 0.2 * libm::sin(tp() * x[0]) * libm::cos(tp() * x[1]));
        let adv = VectorField::from_fn(&g, |x| [0.3 * libm::cos(tp() * x[1]), 0.2 * libm::sin(tp() * x[0])]);
        let rhs = VectorField::from_fn(&g, |x| [libm::cos(tp() * (x[0] + x[1])), libm::sin(2.0 * tp() * x[0])]);
        let u_n = VectorField::from_fn(&g, |x| [libm::sin(tp() * x[1]), libm::cos(tp() * x[0])]);
        let dt = 1e-3;
        let opts = InnerOptions { tol: 1e-11, max_inner: 200 };
        let sol = solve_linear_momentum(&rho, &adv, &rhs, &u_n, dt, &p, &opts, None).unwrap();
        assert!(sol.iterations < 60, "{} iterations", sol.iterations);
        let r = momentum_residual(&sol.v, &rho, &adv, &rhs, &u_n, dt, &p);
        assert!(r <= 10.0 * opts.tol, "residual {r}");
    }

    #[test]
    fn lorentz_vanishes_for_constant_field() {
        let g = Grid::new(16).unwrap();
        let h = VectorField::from_fn(&g, |_| [0.3, 0.8]);
        assert!(lorentz_force(&h).max_abs() < 1e-14);
    }

    #[test]
    fn interaction_force_cases() {
        let g = Grid::new(16).unwrap();
        let spec = CouplingSpec::default();
        let rho = ScalarField::constant(&g, 1.0);
        let psi = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, tp() * x[0]));
        let jr = ScalarField::constant(&g, 1.0);
        let force = interaction_force(&rho, &psi, &jr, &spec).unwrap();
        let expected = spec.g_prime(1.0).unwrap() * spec.h(1.0).unwrap();
        assert!(force.f.values.iter().all(|&x| (x - expected).abs() < 1e-14));
        assert!(force.grad_f.max_abs() < 1e-12);
        let off = interaction_force(&rho, &psi, &jr, &spec.with_alpha(0.0).unwrap()).unwrap();
        assert_eq!(off.f.max_abs(), 0.0);
        // 1/ρ = 0.25 lies outside the support of g'.
        let dense = ScalarField::from_fn(&g, |x| 4.0 + 0.1 * libm::sin(tp() * x[0]));
        let outside = interaction_force(&dense, &psi, &jr, &spec).unwrap();
        assert_eq!(outside.f.max_abs(), 0.0);
    }

    #[test]
    fn flux_identities() {
        let g = Grid::new(16).unwrap();
        let p = FluidParams::default();
        let rho = ScalarField::constant(&g, 1.2);
        let f = ScalarField::constant(&g, 0.3);
        let z = VectorField::zeros(&g);
        let fl = effective_flux(&z, &rho, &z, &f, &p).unwrap();
        assert!(fl.flux.values.iter().all(|&x| (x - (0.3 - p.pressure_at(1.2))).abs() < 1e-14));
        assert_eq!(p.big_lambda_at(1.0), 0.0);
        for r in [0.6, 1.0, 1.9] {
            let d = 1e-6;
            let fd = (p.big_lambda_at(r + d) - p.big_lambda_at(r - d)) / (2.0 * d);
            assert!((fd * r - (2.0 * p.mu + p.lambda_at(r))).abs() < 1e-7);
        }
        let res = lambda_transport_residual(&rho, &rho, &z, &z, &f, &p, 0.01).unwrap();
        assert!(res.max_abs() < 1e-13);
    }
}
