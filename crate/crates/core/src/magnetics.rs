//! Resistive induction equation for the magnetic field.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{divergence, Grid, Spectrum, VectorField};
use crate::velocity::VelocityPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticParams {
    pub nu: f64,
}

impl Default for MagneticParams {
    fn default() -> Self {
        Self { nu: 0.05 }
    }
}

impl MagneticParams {
    pub fn validate(&self) -> Result<()> {
        if self.nu > 0.0 && self.nu.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "nu",
                reason: "magnetic diffusivity must be positive",
            })
        }
    }
}

fn project_spectra(s: &mut [Spectrum; 2]) {
    let g = s[0].grid().clone();
    for i in 0..g.len() {
        let d = g.derivative_symbol(i);
        let d2 = d[0] * d[0] + d[1] * d[1];
        if d2 == 0.0 {
            continue;
        }
        let dot = s[0].coeffs[i] * d[0] + s[1].coeffs[i] * d[1];
        s[0].coeffs[i] -= dot * (d[0] / d2);
        s[1].coeffs[i] -= dot * (d[1] / d2);
    }
}

/// Removes the gradient part of `h`, leaving the mean untouched.
pub fn project_divfree(h: &VectorField) -> VectorField {
    let g = h.grid();
    let mut s = g.forward_vector(h);
    project_spectra(&mut s);
    g.inverse_vector(&s)
}

/// `max |div H|` evaluated spectrally.
pub fn divergence_sup(h: &VectorField) -> f64 {
    divergence(h).max_abs()
}

/// `curl(u × H)` in spectral form, dealiased. For divergence-free `H` this
/// equals `H·∇u − u·∇H − H div u`.
fn stretch(grid: &Grid, h: &[Spectrum; 2], u: &VectorField) -> [Spectrum; 2] {
    let hp = grid.inverse_vector(h);
    let a = u.0[0].zip_map(&hp.0[1], |x, y| x * y).zip_map(
        &u.0[1].zip_map(&hp.0[0], |x, y| x * y),
        |p, q| p - q,
    );
    let mut sa = grid.forward(&a);
    sa.dealias();
    let mut b = sa.derivative(0);
    for c in b.coeffs.iter_mut() {
        *c = -*c;
    }
    [sa.derivative(1), b]
}

/// One step of `H_t + u·∇H − H·∇u + H div u = νΔH`.
///
/// Diffusion is absorbed exactly by a per-mode integrating factor; the
/// transport and stretching terms use SSP-RK3 along `path`. The field is
/// projected back onto divergence-free fields after every stage.
pub fn induction_step(
    h: &VectorField,
    path: VelocityPath<'_>,
    dt: f64,
    params: &MagneticParams,
    cfl_max: f64,
) -> Result<VectorField> {
    let g = h.grid().clone();
    g.check(path.start.grid());
    path.check_cfl(dt, cfl_max)?;
    let nu = params.nu;
    let apply = |s: &[Spectrum; 2], tau: f64| -> [Spectrum; 2] {
        let f = |i: usize| Complex64::new(libm::exp(-nu * g.k_squared(i) * tau), 0.0);
        [s[0].map_modes(f), s[1].map_modes(f)]
    };
    let scale = |a: &[Spectrum; 2], w: f64| -> [Spectrum; 2] {
        let mut out = a.clone();
        for s in out.iter_mut() {
            for c in s.coeffs.iter_mut() {
                *c *= w;
            }
        }
        out
    };
    let add = |a: &[Spectrum; 2], b: &[Spectrum; 2], w: f64| -> [Spectrum; 2] {
        let mut out = a.clone();
        out[0].axpy(w, &b[0]);
        out[1].axpy(w, &b[1]);
        out
    };

    let mut h0 = g.forward_vector(h);
    project_spectra(&mut h0);

    let n0 = stretch(&g, &h0, &path.at(0.0));
    let w0 = add(&h0, &n0, dt);
    let mut h1 = apply(&w0, dt);
    project_spectra(&mut h1);

    let n1 = stretch(&g, &h1, &path.at(1.0));
    // ¾ e^{νΔdt/2} H0 + ¼ e^{νΔdt/2} (H0 + dt N0) + ¼ e^{−νΔdt/2} dt N1
    let mut h2 = add(&apply(&h0, 0.5 * dt), &apply(&w0, 0.5 * dt), 1.0 / 3.0);
    h2 = add(&scale(&h2, 0.75), &apply(&n1, -0.5 * dt), 0.25 * dt);
    project_spectra(&mut h2);

    let n2 = stretch(&g, &h2, &path.at(0.5));
    let mut h3 = scale(&apply(&h0, dt), 1.0 / 3.0);
    let tail = apply(&add(&h2, &n2, dt), 0.5 * dt);
    h3 = add(&h3, &tail, 2.0 / 3.0);
    project_spectra(&mut h3);

    let out = g.inverse_vector(&h3);
    if !out.is_finite() {
        return Err(Error::NonFinite("magnetic field"));
    }
    Ok(out)
}
