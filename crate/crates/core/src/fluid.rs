//! Density transport and the constitutive laws of the fluid.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{dealias_vector, divergence, ScalarField, Stencil};
use crate::velocity::{rk4, ssp_rk3, VelocityPath};

/// Pressure `p = aρ^γ`, bulk viscosity `λ = bρ^β`, constant shear viscosity `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    pub a: f64,
    pub gamma: f64,
    pub mu: f64,
    pub b: f64,
    pub beta: f64,
}

pub const BETA_WARNING: &str = "β ≤ 4/3: no-vacuum guarantee void";

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            gamma: 1.4,
            mu: 0.05,
            b: 0.05,
            beta: 2.0,
        }
    }
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad("a", "pressure coefficient must be positive");
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return bad("gamma", "adiabatic exponent must exceed 1");
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu", "shear viscosity must be positive");
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return bad("b", "bulk viscosity coefficient must be positive");
        }
        if !self.beta.is_finite() {
            return bad("beta", "must be finite");
        }
        Ok(())
    }

    /// Parameter combinations that are legal but fall outside the regime
    /// where densities are guaranteed to stay bounded.
    pub fn warnings(&self) -> Vec<&'static str> {
        let mut w = Vec::new();
        if self.beta <= 4.0 / 3.0 {
            w.push(BETA_WARNING);
        }
        w
    }

    #[inline]
    pub fn pressure_at(&self, rho: f64) -> f64 {
        self.a * libm::pow(rho, self.gamma)
    }

    #[inline]
    pub fn lambda_at(&self, rho: f64) -> f64 {
        self.b * libm::pow(rho, self.beta)
    }

    /// `e(ρ) = aρ^{γ−1}/(γ−1)`, the antiderivative of `p/ρ²` vanishing at 0.
    #[inline]
    pub fn internal_energy_at(&self, rho: f64) -> f64 {
        self.a * libm::pow(rho, self.gamma - 1.0) / (self.gamma - 1.0)
    }

    /// `Λ(ρ) = ∫₁^ρ (2μ + λ(s))/s ds = 2μ log ρ + b(ρ^β − 1)/β`.
    #[inline]
    pub fn big_lambda_at(&self, rho: f64) -> f64 {
        2.0 * self.mu * libm::log(rho) + self.b * (libm::pow(rho, self.beta) - 1.0) / self.beta
    }

    pub fn pressure(&self, rho: &ScalarField) -> Result<ScalarField> {
        check_positive(rho)?;
        Ok(rho.map(|r| self.pressure_at(r)))
    }

    pub fn lambda_visc(&self, rho: &ScalarField) -> Result<ScalarField> {
        check_positive(rho)?;
        Ok(rho.map(|r| self.lambda_at(r)))
    }

    pub fn internal_energy(&self, rho: &ScalarField) -> Result<ScalarField> {
        check_positive(rho)?;
        Ok(rho.map(|r| self.internal_energy_at(r)))
    }
}

pub fn check_positive(rho: &ScalarField) -> Result<()> {
    match rho.values.iter().enumerate().find(|(_, &r)| !(r > 0.0)) {
        Some((index, &value)) => Err(Error::NonPositiveDensity { index, value }),
        None => Ok(()),
    }
}

/// Pointwise extrema.
pub fn density_bounds(rho: &ScalarField) -> (f64, f64) {
    (rho.min(), rho.max())
}

/// One SSP-RK3 step of `ρ_t = −div(ρu)` with dealiased flux.
///
/// The zero mode of a spectral divergence vanishes identically, so the mean
/// density is preserved to round-off.
pub fn continuity_step_spectral(rho: &ScalarField, path: VelocityPath<'_>, dt: f64, cfl_max: f64) -> Result<ScalarField> {
    continuity_step_forced(rho, path, dt, cfl_max, |_| None)
}

/// As [`continuity_step_spectral`] with an additional source `S(s)` given at
/// step fraction `s`; used for manufactured-solution studies.
pub fn continuity_step_forced(
    rho: &ScalarField,
    path: VelocityPath<'_>,
    dt: f64,
    cfl_max: f64,
    source: impl Fn(f64) -> Option<ScalarField>,
) -> Result<ScalarField> {
    rho.grid().check(path.start.grid());
    check_positive(rho)?;
    path.check_cfl(dt, cfl_max)?;
    ssp_rk3(rho, dt, |r, s| {
        let u = path.at(s);
        let flux = dealias_vector(&u.mul_scalar(r));
        let mut out = divergence(&flux).scale(-1.0);
        if let Some(src) = source(s) {
            out.axpy(1.0, &src);
        }
        Ok(out)
    })
}

/// Semi-Lagrangian step: every node traces its characteristic back over the
/// step with RK4 and picks up `ρ(x_d) · exp(−∫ div u)` along the way. The
/// exponential form keeps the result strictly positive.
pub fn continuity_step_characteristics(
    rho: &ScalarField,
    path: VelocityPath<'_>,
    dt: f64,
    cfl_max: f64,
) -> Result<ScalarField> {
    let grid = rho.grid().clone();
    grid.check(path.start.grid());
    check_positive(rho)?;
    path.check_cfl(dt, cfl_max)?;
    let div_start = divergence(path.start);
    let div_end = divergence(path.end);
    let (u0, u1) = (path.start, path.end);
    let mut out = ScalarField::zeros(&grid);
    for (idx, slot) in out.values.iter_mut().enumerate() {
        let x = grid.node(idx);
        // State: position and accumulated divergence, integrated backwards.
        let y = rk4([x[0], x[1], 0.0], dt, |y, c| {
            let s = 1.0 - c;
            let st = Stencil::new(&grid, [y[0], y[1]]);
            let u1v = [st.apply(&u0.0[0].values), st.apply(&u0.0[1].values)];
            let u2v = [st.apply(&u1.0[0].values), st.apply(&u1.0[1].values)];
            let d = (1.0 - s) * st.apply(&div_start.values) + s * st.apply(&div_end.values);
            [
                -((1.0 - s) * u1v[0] + s * u2v[0]),
                -((1.0 - s) * u1v[1] + s * u2v[1]),
                d,
            ]
        });
        *slot = rho.interp_at([y[0], y[1]]) * libm::exp(-y[2]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, VectorField};
    use core::f64::consts::PI;

    #[test]
    fn constitutive_laws() {
        let g = Grid::new(8).unwrap();
        let p = FluidParams {
            a: 1.0,
            gamma: 2.0,
            mu: 0.1,
            b: 1.0,
            beta: 2.0,
        };
        let two = ScalarField::constant(&g, 2.0);
        assert!(p.pressure(&two).unwrap().values.iter().all(|&x| (x - 4.0).abs() < 1e-15));
        assert!(p.internal_energy(&two).unwrap().values.iter().all(|&x| (x - 2.0).abs() < 1e-15));
        let three = ScalarField::constant(&g, 3.0);
        assert!(p.lambda_visc(&three).unwrap().values.iter().all(|&x| (x - 9.0).abs() < 1e-14));
        let one = ScalarField::constant(&g, 1.0);
        assert!(p.pressure(&one).unwrap().values.iter().all(|&x| x == p.a));
        assert!(p.lambda_visc(&one).unwrap().values.iter().all(|&x| x == p.b));
        assert!((p.big_lambda_at(1.0)).abs() < 1e-15);
        let mut bad = one.clone();
        bad.values[5] = -0.1;
        assert!(matches!(p.pressure(&bad), Err(Error::NonPositiveDensity { index: 5, .. })));
    }

    #[test]
    fn internal_energy_derivative_is_p_over_rho_squared() {
        let p = FluidParams::default();
        for rho in [0.5, 1.0, 1.7] {
            let d = 1e-5;
            let fd = (p.internal_energy_at(rho + d) - p.internal_energy_at(rho - d)) / (2.0 * d);
            assert!((fd - p.pressure_at(rho) / (rho * rho)).abs() < 1e-6);
        }
    }

    #[test]
    fn beta_warning() {
        let p = FluidParams { beta: 1.0, ..Default::default() };
        assert!(p.validate().is_ok());
        assert_eq!(p.warnings(), alloc::vec![BETA_WARNING]);
        assert!(FluidParams::default().warnings().is_empty());
    }

    #[test]
    fn zero_velocity_leaves_density() {
        let g = Grid::new(16).unwrap();
        let rho = ScalarField::from_fn(&g, |x| 1.0 + 0.2 * libm::sin(2.0 * PI * x[0]));
        let u = VectorField::zeros(&g);
        let a = continuity_step_spectral(&rho, VelocityPath::frozen(&u), 1e-2, 0.5).unwrap();
        let b = continuity_step_characteristics(&rho, VelocityPath::frozen(&u), 1e-2, 0.5).unwrap();
        for i in 0..g.len() {
            assert!((a.values[i] - rho.values[i]).abs() < 1e-15);
            assert!((b.values[i] - rho.values[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn density_bounds_of_sine() {
        let g = Grid::new(16).unwrap();
        let rho = ScalarField::from_fn(&g, |x| 1.0 + 0.5 * libm::sin(2.0 * PI * x[0]));
        let (lo, hi) = density_bounds(&rho);
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 1.5).abs() < 1e-12);
        let (lo2, hi2) = density_bounds(&rho.scale(2.0));
        assert!(lo2 == 2.0 * lo && hi2 == 2.0 * hi);
    }
}
