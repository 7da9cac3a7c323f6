//! Velocity over one time step and the explicit integrators that consume it.
//!
//! Within a step the trial velocity is taken to vary linearly between the
//! velocity at the start of the step and the end-of-step guess. Every
//! transport-type sub-problem (density, flow map, magnetic field) samples
//! the same path, so they all see one and the same velocity history.

use crate::error::{Error, Result};
use crate::grid::{ScalarField, VectorField};

#[derive(Clone, Copy, Debug)]
pub struct VelocityPath<'a> {
    pub start: &'a VectorField,
    pub end: &'a VectorField,
}

impl<'a> VelocityPath<'a> {
    pub fn new(start: &'a VectorField, end: &'a VectorField) -> Self {
        start.grid().check(end.grid());
        Self { start, end }
    }

    pub fn frozen(u: &'a VectorField) -> Self {
        Self { start: u, end: u }
    }

    /// Velocity at fraction `s ∈ [0, 1]` of the step.
    pub fn at(&self, s: f64) -> VectorField {
        if core::ptr::eq(self.start, self.end) || s == 0.0 {
            return self.start.clone();
        }
        if s == 1.0 {
            return self.end.clone();
        }
        VectorField::lerp(self.start, self.end, s)
    }

    pub fn max_speed(&self) -> f64 {
        self.start.max_norm().max(self.end.max_norm())
    }

    /// Fails when `max|u| dt / h` exceeds `limit`.
    pub fn check_cfl(&self, dt: f64, limit: f64) -> Result<f64> {
        let courant = self.max_speed() * dt / self.start.grid().spacing();
        if courant > limit {
            Err(Error::Cfl { courant, limit })
        } else {
            Ok(courant)
        }
    }
}

/// States that can be linearly combined by the Runge–Kutta drivers.
pub trait Combine: Clone {
    /// `self ← a·self + b·other`.
    fn combine(&mut self, a: f64, b: f64, other: &Self);
}

impl Combine for ScalarField {
    fn combine(&mut self, a: f64, b: f64, other: &Self) {
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x = a * *x + b * y;
        }
    }
}

impl Combine for VectorField {
    fn combine(&mut self, a: f64, b: f64, other: &Self) {
        self.0[0].combine(a, b, &other.0[0]);
        self.0[1].combine(a, b, &other.0[1]);
    }
}

impl<T: Combine, const N: usize> Combine for [T; N] {
    fn combine(&mut self, a: f64, b: f64, other: &Self) {
        for (x, y) in self.iter_mut().zip(other) {
            x.combine(a, b, y);
        }
    }
}

/// Three-stage strong-stability-preserving Runge–Kutta step. `rhs` receives
/// the stage state and the stage time as a fraction of the step.
pub fn ssp_rk3<T: Combine>(y0: &T, dt: f64, mut rhs: impl FnMut(&T, f64) -> Result<T>) -> Result<T> {
    let mut y1 = y0.clone();
    y1.combine(1.0, dt, &rhs(y0, 0.0)?);

    let mut y2 = y1.clone();
    y2.combine(1.0, dt, &rhs(&y1, 1.0)?);
    y2.combine(0.25, 0.75, y0);

    let mut y3 = y2.clone();
    y3.combine(1.0, dt, &rhs(&y2, 0.5)?);
    y3.combine(2.0 / 3.0, 1.0 / 3.0, y0);
    Ok(y3)
}

/// Classical RK4 for small per-point ODE systems.
pub fn rk4<const N: usize>(y0: [f64; N], dt: f64, mut f: impl FnMut(&[f64; N], f64) -> [f64; N]) -> [f64; N] {
    let shift = |y: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = f(&y0, 0.0);
    let k2 = f(&shift(&y0, &k1, 0.5 * dt), 0.5);
    let k3 = f(&shift(&y0, &k2, 0.5 * dt), 0.5);
    let k4 = f(&shift(&y0, &k3, dt), 1.0);
    let mut out = y0;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}
