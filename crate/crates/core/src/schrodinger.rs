//! Defocusing cubic Schrödinger equation in Lagrangian coordinates with the
//! flow-dependent potential `αg(v)h'(|ψ|²)`.

use num_complex::Complex64;

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, ScalarField};

#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub psi: ComplexField,
    pub time: f64,
}

fn check_volume(v: &ScalarField) -> Result<()> {
    match v.values.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        Some((index, &value)) => Err(Error::NonPositiveVolume { index, value }),
        None => Ok(()),
    }
}

/// `V = |ψ|² + α g(v) h'(|ψ|²)`, evaluated pointwise.
pub fn potential(psi: &ComplexField, v_y: &ScalarField, spec: &CouplingSpec) -> Result<ScalarField> {
    psi.grid().check(v_y.grid());
    check_volume(v_y)?;
    let mut out = psi.intensity();
    if spec.alpha != 0.0 {
        for (x, &v) in out.values.iter_mut().zip(&v_y.values) {
            *x += spec.alpha * spec.g_unchecked(v) * spec.h_prime_unchecked(*x);
        }
    }
    Ok(out)
}

/// `ψ ← ψ e^{−iVτ}` pointwise.
fn rotate(psi: &mut ComplexField, v: &ScalarField, tau: f64) {
    for (z, &p) in psi.values.iter_mut().zip(&v.values) {
        let (s, c) = libm::sincos(-p * tau);
        *z *= Complex64::new(c, s);
    }
}

/// Exact flow of `iψ_t + Δψ = 0` over `tau`.
pub fn linear_step(psi: &ComplexField, tau: f64) -> ComplexField {
    let g = psi.grid();
    let s = g.forward_complex(psi).map_modes(|i| {
        let (s, c) = libm::sincos(-g.k_squared(i) * tau);
        Complex64::new(c, s)
    });
    g.inverse_complex(&s)
}

/// One Strang step: half rotation by `V`, exact linear flow, half rotation.
///
/// `potential_of` maps the current wave field to the real potential. Since
/// each rotation leaves `|ψ|` unchanged, evaluating the potential at the
/// start of a rotation makes that sub-step exact.
pub fn nls_step(
    psi: &ComplexField,
    dt: f64,
    mut potential_of: impl FnMut(&ComplexField) -> Result<ScalarField>,
) -> Result<ComplexField> {
    let mut a = psi.clone();
    let v = potential_of(&a)?;
    rotate(&mut a, &v, 0.5 * dt);
    let mut b = linear_step(&a, dt);
    let v = potential_of(&b)?;
    rotate(&mut b, &v, 0.5 * dt);
    if !b.is_finite() {
        return Err(Error::NonFinite("wave field"));
    }
    Ok(b)
}

/// Strang step with the potential built from a frozen specific volume.
pub fn nls_step_coupled(psi: &ComplexField, v_y: &ScalarField, spec: &CouplingSpec, dt: f64) -> Result<ComplexField> {
    nls_step(psi, dt, |p| potential(p, v_y, spec))
}

/// `∫|ψ|²`.
pub fn mass(psi: &ComplexField) -> f64 {
    psi.intensity().integral()
}

/// `∫|∇ψ|²`, evaluated spectrally.
pub fn gradient_energy(psi: &ComplexField) -> f64 {
    let g = psi.grid();
    let s = g.forward_complex(psi);
    s.coeffs.iter().enumerate().map(|(i, c)| g.k_squared(i) * c.norm_sqr()).sum()
}

/// `∫(½|∇ψ|² + ¼|ψ|⁴ + αg(v)h(|ψ|²))`.
pub fn nls_energy(psi: &ComplexField, v_y: &ScalarField, spec: &CouplingSpec) -> Result<f64> {
    check_volume(v_y)?;
    let quartic = psi.intensity().map(|s| 0.25 * s * s).integral();
    Ok(0.5 * gradient_energy(psi) + quartic + interaction_energy(psi, v_y, spec)?)
}

/// `∫(|∇ψ|² + ½|ψ|⁴ + αg(v)h(|ψ|²))`, the functional conserved by the wave
/// equation when `v` is frozen.
pub fn wave_hamiltonian(psi: &ComplexField, v_y: &ScalarField, spec: &CouplingSpec) -> Result<f64> {
    check_volume(v_y)?;
    let quartic = psi.intensity().map(|s| 0.5 * s * s).integral();
    Ok(gradient_energy(psi) + quartic + interaction_energy(psi, v_y, spec)?)
}

/// `∫ αg(v)h(|ψ|²)`.
pub fn interaction_energy(psi: &ComplexField, v_y: &ScalarField, spec: &CouplingSpec) -> Result<f64> {
    psi.grid().check(v_y.grid());
    check_volume(v_y)?;
    if spec.alpha == 0.0 {
        return Ok(0.0);
    }
    let f = psi
        .intensity()
        .zip_map(v_y, |s, v| spec.alpha * spec.g_unchecked(v) * spec.h_unchecked(s));
    Ok(f.integral())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use core::f64::consts::PI;

    fn plane(g: &Grid, amp: f64, k: [f64; 2]) -> ComplexField {
        ComplexField::from_fn(g, |x| {
            let (s, c) = libm::sincos(2.0 * PI * (k[0] * x[0] + k[1] * x[1]));
            Complex64::new(amp * c, amp * s)
        })
    }

    #[test]
    fn potential_formula() {
        let g = Grid::new(8).unwrap();
        let spec = CouplingSpec::default();
        let v = ScalarField::constant(&g, 1.2);
        let z = potential(&ComplexField::zeros(&g), &v, &spec).unwrap();
        let expected = spec.g(1.2).unwrap() * spec.h_amp;
        assert!(z.values.iter().all(|&x| (x - expected).abs() < 1e-15));
        let psi = plane(&g, 0.8, [1.0, 0.0]);
        let decoupled = potential(&psi, &v, &spec.with_alpha(0.0).unwrap()).unwrap();
        assert!(decoupled.values.iter().all(|&x| (x - 0.64).abs() < 1e-14));
        let mut bad = v.clone();
        bad.values[2] = 0.0;
        assert!(matches!(potential(&psi, &bad, &spec), Err(Error::NonPositiveVolume { index: 2, .. })));
    }

    #[test]
    fn plane_wave_phase_is_exact() {
        let g = Grid::new(16).unwrap();
        let spec = CouplingSpec::default();
        let (amp, k) = (0.7, [1.0, 2.0]);
        let psi0 = plane(&g, amp, k);
        let v0 = 1.3;
        let v = ScalarField::constant(&g, v0);
        let dt = 1e-3;
        let psi1 = nls_step_coupled(&psi0, &v, &spec, dt).unwrap();
        let omega = 4.0 * PI * PI * (k[0] * k[0] + k[1] * k[1])
            + amp * amp
            + spec.alpha * spec.g(v0).unwrap() * spec.h_prime(amp * amp).unwrap();
        let (s, c) = libm::sincos(-omega * dt);
        for (a, b) in psi1.values.iter().zip(&psi0.values) {
            assert!((a - b * Complex64::new(c, s)).norm() < 1e-12);
        }
    }

    #[test]
    fn mass_is_conserved_and_energy_closed_form() {
        let g = Grid::new(32).unwrap();
        let spec = CouplingSpec::default();
        let amp = 0.9;
        let psi = plane(&g, amp, [1.0, 0.0]);
        let v = ScalarField::constant(&g, 1.1);
        assert!((mass(&psi) - amp * amp).abs() < 1e-13);
        let e = nls_energy(&psi, &v, &spec).unwrap();
        let expected = 0.5 * 4.0 * PI * PI * amp * amp
            + 0.25 * amp.powi(4)
            + spec.g(1.1).unwrap() * spec.h(amp * amp).unwrap();
        assert!((e - expected).abs() < 1e-12);
        assert_eq!(mass(&ComplexField::zeros(&g)), 0.0);
        assert_eq!(nls_energy(&ComplexField::zeros(&g), &v, &spec).unwrap(), 0.0);

        let bumpy = ComplexField::from_fn(&g, |x| {
            Complex64::new(1.0 + 0.3 * libm::cos(2.0 * PI * x[0]), 0.2 * libm::sin(2.0 * PI * (x[0] + x[1])))
        });
        let mut p = bumpy.clone();
        for _ in 0..50 {
            p = nls_step_coupled(&p, &v, &spec, 1e-3).unwrap();
        }
        assert!((mass(&p) - mass(&bumpy)).abs() < 1e-12);
    }

    #[test]
    fn linear_flow_is_exact_per_mode() {
        let g = Grid::new(16).unwrap();
        let psi = plane(&g, 1.0, [3.0, -2.0]);
        let tau = 0.37;
        let out = linear_step(&psi, tau);
        let (s, c) = libm::sincos(-4.0 * PI * PI * 13.0 * tau);
        for (a, b) in out.values.iter().zip(&psi.values) {
            assert!((a - b * Complex64::new(c, s)).norm() < 1e-12);
        }
    }
}
