//! Standalone reference solvers used to cross-check the coupled stepper.
//!
//! Both are written from scratch on top of `rustfft` and share nothing with
//! the solver core beyond the constitutive laws and the coupling profiles:
//!
//! * [`NavierStokes`] integrates the barotropic compressible Navier–Stokes
//!   system with the same time discretization as the coupled solver when
//!   the wave field and the magnetic field are switched off. Each step is a
//!   fixed-point iteration on the end-of-step velocity; the linear momentum
//!   problem is solved with unpreconditioned BiCGStab.
//! * [`split_step_nls`] is a Strang split-step Fourier integrator for the
//!   wave equation with a frozen specific volume.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use swlw_core::coupling::CouplingSpec;
use swlw_core::fluid::FluidParams;
use swlw_core::Complex64;

type C = Complex64;

/// Periodic `n × n` spectral toolbox, row-major with the first index along `x₁`.
#[derive(Clone)]
pub struct Spectral {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Signed wavenumbers by index.
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Spectral({})", self.n)
    }
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let k = (0..n)
            .map(|j| if j <= n / 2 { j as f64 } else { j as f64 - n as f64 })
            .collect();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            k,
        }
    }

    fn fft2(&self, data: &mut [C], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        plan.process(data);
        let mut t = vec![C::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = data[i * n + j];
            }
        }
        plan.process(&mut t);
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = t[j * n + i];
            }
        }
    }

    /// Coefficients normalized so a constant maps to the zero mode.
    pub fn forward(&self, f: &[f64]) -> Vec<C> {
        let mut d: Vec<C> = f.iter().map(|&x| C::new(x, 0.0)).collect();
        self.forward_c(&mut d);
        d
    }

    pub fn forward_c(&self, d: &mut [C]) {
        self.fft2(d, &self.fwd);
        let s = 1.0 / (self.n * self.n) as f64;
        d.iter_mut().for_each(|z| *z *= s);
    }

    pub fn inverse_c(&self, s: &[C]) -> Vec<C> {
        let mut d = s.to_vec();
        self.fft2(&mut d, &self.inv);
        d
    }

    pub fn inverse(&self, s: &[C]) -> Vec<f64> {
        self.inverse_c(s).into_iter().map(|z| z.re).collect()
    }

    fn kk(&self, idx: usize) -> (f64, f64) {
        (self.k[idx / self.n], self.k[idx % self.n])
    }

    /// `i·2πk` along `axis`, zero on the Nyquist row.
    pub fn deriv(&self, s: &[C], axis: usize) -> Vec<C> {
        let half = (self.n / 2) as f64;
        s.iter()
            .enumerate()
            .map(|(i, &z)| {
                let (a, b) = self.kk(i);
                let k = if axis == 0 { a } else { b };
                if k == half {
                    C::new(0.0, 0.0)
                } else {
                    z * C::new(0.0, 2.0 * PI * k)
                }
            })
            .collect()
    }

    /// `|2πk|²`.
    pub fn k2(&self, idx: usize) -> f64 {
        let (a, b) = self.kk(idx);
        4.0 * PI * PI * (a * a + b * b)
    }

    /// Zeroes modes with `3|k_i| > n` on either axis.
    pub fn truncate(&self, s: &mut [C]) {
        let n = self.n as f64;
        for (i, z) in s.iter_mut().enumerate() {
            let (a, b) = self.kk(i);
            if 3.0 * a.abs() > n || 3.0 * b.abs() > n {
                *z = C::new(0.0, 0.0);
            }
        }
    }

    pub fn grad(&self, f: &[f64]) -> [Vec<f64>; 2] {
        let s = self.forward(f);
        [self.inverse(&self.deriv(&s, 0)), self.inverse(&self.deriv(&s, 1))]
    }

    pub fn smooth(&self, f: &[f64]) -> Vec<f64> {
        let mut s = self.forward(f);
        self.truncate(&mut s);
        self.inverse(&s)
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Density and velocity on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FluidState {
    pub rho: Vec<f64>,
    pub u: [Vec<f64>; 2],
}

#[derive(Clone, Debug)]
pub struct NavierStokes {
    pub sp: Spectral,
    pub params: FluidParams,
    pub dt: f64,
    /// Relative tolerance on the velocity fixed point.
    pub tol: f64,
    /// Relative residual for BiCGStab.
    pub linear_tol: f64,
}

impl NavierStokes {
    pub fn new(n: usize, params: FluidParams, dt: f64) -> Self {
        Self {
            sp: Spectral::new(n),
            params,
            dt,
            tol: 1e-12,
            linear_tol: 1e-14,
        }
    }

    /// `−div(P(ρu))` with `P` the 2/3-rule truncation.
    fn mass_flux(&self, rho: &[f64], u: &[Vec<f64>; 2]) -> Vec<f64> {
        let sp = &self.sp;
        let mut acc = vec![C::new(0.0, 0.0); rho.len()];
        for (c, uc) in u.iter().enumerate() {
            let m: Vec<f64> = rho.iter().zip(uc).map(|(r, v)| r * v).collect();
            let mut s = sp.forward(&m);
            sp.truncate(&mut s);
            let d = sp.deriv(&s, c);
            acc.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
        }
        sp.inverse(&acc).into_iter().map(|x| -x).collect()
    }

    /// Density after one step along `u(s) = (1−s)u₀ + s u₁`.
    pub fn density_step(&self, rho: &[f64], u0: &[Vec<f64>; 2], u1: &[Vec<f64>; 2]) -> Vec<f64> {
        let dt = self.dt;
        let at = |s: f64| -> [Vec<f64>; 2] {
            if s == 0.0 {
                return u0.clone();
            }
            if s == 1.0 {
                return u1.clone();
            }
            [0, 1].map(|c| u0[c].iter().zip(&u1[c]).map(|(a, b)| a + s * (b - a)).collect())
        };
        let k1 = self.mass_flux(rho, &at(0.0));
        let r1: Vec<f64> = rho.iter().zip(&k1).map(|(r, k)| r + dt * k).collect();
        let k2 = self.mass_flux(&r1, &at(1.0));
        let r2: Vec<f64> = (0..rho.len())
            .map(|i| 0.75 * rho[i] + 0.25 * (r1[i] + dt * k2[i]))
            .collect();
        let k3 = self.mass_flux(&r2, &at(0.5));
        (0..rho.len())
            .map(|i| rho[i] / 3.0 + 2.0 / 3.0 * (r2[i] + dt * k3[i]))
            .collect()
    }

    /// `ρv/dt + P(ρ(a·∇)v) − μΔv − ∇((μ+λ̄)div v + P((λ−λ̄)div v))`.
    fn operator(&self, rho: &[f64], a: &[Vec<f64>; 2], v: &[f64]) -> Vec<f64> {
        let sp = &self.sp;
        let m = rho.len();
        let p = &self.params;
        let (lo, hi) = rho.iter().fold((f64::MAX, f64::MIN), |(l, h), &r| (l.min(r), h.max(r)));
        let lam_bar = 0.5 * (p.lambda_at(lo) + p.lambda_at(hi));
        let vs = [sp.forward(&v[..m]), sp.forward(&v[m..])];
        let mut divs = sp.deriv(&vs[0], 0);
        divs.iter_mut().zip(sp.deriv(&vs[1], 1)).for_each(|(a, b)| *a += b);
        let div = sp.inverse(&divs);
        let var: Vec<f64> = rho.iter().zip(&div).map(|(&r, d)| (p.lambda_at(r) - lam_bar) * d).collect();
        let mut pot = sp.forward(&var);
        sp.truncate(&mut pot);
        pot.iter_mut().zip(&divs).for_each(|(a, b)| *a += (p.mu + lam_bar) * b);
        let moving = a.iter().any(|c| c.iter().any(|&x| x != 0.0));
        let mut out = Vec::with_capacity(2 * m);
        for c in 0..2 {
            let mut s: Vec<C> = vs[c].iter().enumerate().map(|(i, z)| z * (p.mu * sp.k2(i))).collect();
            s.iter_mut().zip(sp.deriv(&pot, c)).for_each(|(a, b)| *a -= b);
            if moving {
                let g0 = sp.inverse(&sp.deriv(&vs[c], 0));
                let g1 = sp.inverse(&sp.deriv(&vs[c], 1));
                let adv: Vec<f64> = (0..m).map(|i| rho[i] * (a[0][i] * g0[i] + a[1][i] * g1[i])).collect();
                let mut t = sp.forward(&adv);
                sp.truncate(&mut t);
                s.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
            }
            let phys = sp.inverse(&s);
            let vc = &v[c * m..(c + 1) * m];
            out.extend((0..m).map(|i| phys[i] + rho[i] * vc[i] / self.dt));
        }
        out
    }

    fn bicgstab(&self, rho: &[f64], a: &[Vec<f64>; 2], b: &[f64], x0: Vec<f64>) -> Vec<f64> {
        let apply = |x: &[f64]| self.operator(rho, a, x);
        let mut x = x0;
        let ax = apply(&x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let r_hat = r.clone();
        let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
        let (mut rho_prev, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; b.len()];
        let mut p = vec![0.0; b.len()];
        for _ in 0..1000 {
            if dot(&r, &r).sqrt() <= self.linear_tol * bnorm {
                break;
            }
            let rho_k = dot(&r_hat, &r);
            let beta = (rho_k / rho_prev) * (alpha / omega);
            for i in 0..p.len() {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            v = apply(&p);
            alpha = rho_k / dot(&r_hat, &v);
            let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
            let t = apply(&s);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            axpy(&mut x, alpha, &p);
            axpy(&mut x, omega, &s);
            r = s.iter().zip(&t).map(|(s, t)| s - omega * t).collect();
            rho_prev = rho_k;
            if omega == 0.0 {
                break;
            }
        }
        x
    }

    /// One step; returns the new state and the number of fixed-point sweeps.
    pub fn step(&self, s: &FluidState) -> (FluidState, usize) {
        let m = s.rho.len();
        let p = &self.params;
        let mut w = s.u.clone();
        let mut x: Vec<f64> = s.u.iter().flatten().copied().collect();
        for it in 1..=100 {
            let rho = self.density_step(&s.rho, &s.u, &w);
            let pressure: Vec<f64> = rho.iter().map(|&r| p.pressure_at(r)).collect();
            let gp = self.sp.grad(&pressure);
            let mut b = Vec::with_capacity(2 * m);
            for c in 0..2 {
                b.extend((0..m).map(|i| rho[i] * s.u[c][i] / self.dt - gp[c][i]));
            }
            x = self.bicgstab(&rho, &w, &b, x);
            let v = [x[..m].to_vec(), x[m..].to_vec()];
            let diff: f64 = (0..2).map(|c| v[c].iter().zip(&w[c]).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sum();
            let size: f64 = v.iter().flatten().map(|a| a * a).sum();
            w = v;
            if diff.sqrt() <= self.tol * size.sqrt() || diff == 0.0 {
                return (FluidState { rho, u: w }, it);
            }
        }
        panic!("reference Navier-Stokes iteration did not converge");
    }
}

/// Strang split-step Fourier integration of
/// `iψ_t + Δψ = (|ψ|² + αg(v)h'(|ψ|²))ψ` with frozen `v`, over `steps` steps.
pub fn split_step_nls(psi: &[C], v: &[f64], spec: &CouplingSpec, n: usize, dt: f64, steps: usize) -> Vec<C> {
    let sp = Spectral::new(n);
    let kick = |psi: &mut [C]| {
        for (z, &vol) in psi.iter_mut().zip(v) {
            let s = z.norm_sqr();
            let mut pot = s;
            if spec.alpha != 0.0 {
                pot += spec.alpha * spec.g(vol).expect("volume positive") * spec.h_prime(s).expect("intensity");
            }
            *z *= C::from_polar(1.0, -0.5 * dt * pot);
        }
    };
    let phase: Vec<C> = (0..n * n).map(|i| C::from_polar(1.0, -sp.k2(i) * dt)).collect();
    let mut psi = psi.to_vec();
    for _ in 0..steps {
        kick(&mut psi);
        sp.forward_c(&mut psi);
        psi.iter_mut().zip(&phase).for_each(|(z, p)| *z *= p);
        psi = sp.inverse_c(&psi);
        kick(&mut psi);
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let n = 16;
        let sp = Spectral::new(n);
        let f: Vec<f64> = (0..n * n).map(|i| (2.0 * PI * 3.0 * (i / n) as f64 / n as f64).sin()).collect();
        let g = sp.grad(&f);
        for i in 0..n * n {
            let x = (i / n) as f64 / n as f64;
            assert!((g[0][i] - 6.0 * PI * (6.0 * PI * x).cos()).abs() < 1e-11);
            assert!(g[1][i].abs() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_nls_rotates() {
        let n = 8;
        let spec = CouplingSpec::default().with_alpha(0.0).unwrap();
        let psi: Vec<C> = (0..n * n).map(|i| C::from_polar(1.0, 2.0 * PI * (i % n) as f64 / n as f64)).collect();
        let out = split_step_nls(&psi, &vec![1.0; n * n], &spec, n, 0.01, 10);
        let omega = 4.0 * PI * PI + 1.0;
        for (a, b) in out.iter().zip(&psi) {
            assert!((a - b * C::from_polar(1.0, -omega * 0.1)).norm() < 1e-12);
        }
    }

    #[test]
    fn fluid_at_rest_stays() {
        let n = 8;
        let ns = NavierStokes::new(n, FluidParams::default(), 1e-3);
        let s = FluidState {
            rho: vec![1.3; n * n],
            u: [vec![0.0; n * n], vec![0.0; n * n]],
        };
        let (next, _) = ns.step(&s);
        assert!(next.rho.iter().all(|&r| (r - 1.3).abs() < 1e-15));
        assert!(next.u.iter().flatten().all(|&v| v.abs() < 1e-14));
    }
}
