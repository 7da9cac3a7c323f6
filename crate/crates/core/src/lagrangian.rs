//! Lagrangian coordinates of the flow.
//!
//! With the initial labelling `y₀(x) = x`, the Lagrangian map `y(t,x)` is
//! transported by the flow (`y_t + u·∇y = 0`) and its inverse `x(t,y)` is the
//! particle trajectory started at `y`. The state keeps several redundant
//! representations so they can be checked against one another:
//!
//! * `displacement`: `y − x` on the Eulerian grid (periodic, so spectral
//!   transport applies even though `y` itself is not periodic);
//! * `particles`: `x(t,y)` for every Lagrangian grid node, from the particle ODE;
//! * `deformation`: `E = ∇ₓy`, evolved by its own transport-stretch equation;
//! * `inverse_deformation`: `B = ∂x/∂y` per particle, from `dB/dt = ∇u(x)·B`;
//! * `jacobian`: `det E`, plus `liouville`, the per-particle solution of
//!   `dJ̃/dt = −(div u) J̃`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    dealias, gradient, jacobian as velocity_gradient, periodic_delta, sobolev_norm, wrap_unit, ComplexField, Grid,
    ScalarField, Stencil, VectorField,
};
use crate::velocity::{rk4, ssp_rk3, VelocityPath};

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// Jacobians at or below this value abort the step.
pub const J_MIN: f64 = 1e-6;

#[inline]
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

#[inline]
pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Spectral (operator 2-) norm.
#[inline]
pub fn spectral_norm(a: &Mat2) -> f64 {
    let fro2 = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
    let d = det(a);
    let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0);
    libm::sqrt(0.5 * (fro2 + libm::sqrt(disc)))
}

/// A 2×2 tensor field on the Eulerian grid, `[i][j]` component-wise.
pub type TensorField = [[ScalarField; 2]; 2];

fn tensor_at(t: &TensorField, st: &Stencil) -> Mat2 {
    [
        [st.apply(&t[0][0].values), st.apply(&t[0][1].values)],
        [st.apply(&t[1][0].values), st.apply(&t[1][1].values)],
    ]
}

fn tensor_identity(grid: &Grid) -> TensorField {
    let one = ScalarField::constant(grid, 1.0);
    let zero = ScalarField::zeros(grid);
    [[one.clone(), zero.clone()], [zero, one]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowMapState {
    pub displacement: VectorField,
    pub particles: Vec<[f64; 2]>,
    pub deformation: TensorField,
    pub inverse_deformation: Vec<Mat2>,
    pub jacobian: ScalarField,
    pub liouville: Vec<f64>,
    pub time: f64,
}

/// Trajectory data integrated per Lagrangian node.
#[derive(Clone, Debug)]
pub struct ParticleUpdate {
    pub particles: Vec<[f64; 2]>,
    pub inverse_deformation: Vec<Mat2>,
    pub liouville: Vec<f64>,
}

impl FlowMapState {
    /// The identity map at time zero.
    pub fn identity(grid: &Grid) -> Self {
        Self {
            displacement: VectorField::zeros(grid),
            particles: grid.nodes(),
            deformation: tensor_identity(grid),
            inverse_deformation: alloc::vec![IDENTITY; grid.len()],
            jacobian: ScalarField::constant(grid, 1.0),
            liouville: alloc::vec![1.0; grid.len()],
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.displacement.grid()
    }

    /// Positions `y(t,x)` of the Eulerian nodes in label space, wrapped.
    pub fn labels(&self) -> Vec<[f64; 2]> {
        let g = self.grid();
        (0..g.len())
            .map(|i| {
                let x = g.node(i);
                [
                    wrap_unit(x[0] + self.displacement.0[0].values[i]),
                    wrap_unit(x[1] + self.displacement.0[1].values[i]),
                ]
            })
            .collect()
    }

    /// Advances every representation of the map along `path` over `dt`.
    pub fn advance(&self, path: VelocityPath<'_>, dt: f64, cfl_max: f64) -> Result<Self> {
        path.check_cfl(dt, cfl_max)?;
        let displacement = advance_y(self, path, dt)?;
        let deformation = advance_e(self, path, dt)?;
        let ParticleUpdate {
            particles,
            inverse_deformation,
            liouville,
        } = advance_particles(self, path, dt);
        let jacobian = jacobian_of(&deformation)?;
        Ok(Self {
            displacement,
            particles,
            deformation,
            inverse_deformation,
            jacobian,
            liouville,
            time: self.time + dt,
        })
    }

    /// `max_y |y(t, x(t,y)) − y|` over Lagrangian nodes (periodic distance).
    pub fn inverse_identity_error(&self) -> f64 {
        let g = self.grid();
        self.particles
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let d = self.displacement.interp_at(p);
                let label = g.node(i);
                let e0 = periodic_delta(p[0] + d[0], label[0]).abs();
                let e1 = periodic_delta(p[1] + d[1], label[1]).abs();
                e0.max(e1)
            })
            .fold(0.0, f64::max)
    }

    /// `max |E(x(t,y)) B(t,y) − Id|` entrywise.
    pub fn inverse_tensor_error(&self) -> f64 {
        let g = self.grid();
        self.particles
            .iter()
            .zip(&self.inverse_deformation)
            .map(|(&p, b)| {
                let e = tensor_at(&self.deformation, &Stencil::new(g, p));
                let eb = mat_mul(&e, b);
                let mut m: f64 = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        m = m.max((eb[i][j] - IDENTITY[i][j]).abs());
                    }
                }
                m
            })
            .fold(0.0, f64::max)
    }

    /// `max |det E(x(t,y)) − J̃(y)| / J̃(y)`.
    pub fn liouville_gap(&self) -> f64 {
        self.particles
            .iter()
            .zip(&self.liouville)
            .map(|(&p, &jl)| (self.jacobian.interp_at(p) - jl).abs() / jl)
            .fold(0.0, f64::max)
    }

    /// `I + ∇(y − x)` computed spectrally from the displacement.
    pub fn deformation_from_displacement(&self) -> TensorField {
        let [[d11, d12], [d21, d22]] = velocity_gradient(&self.displacement);
        [[d11.map(|x| x + 1.0), d12], [d21, d22.map(|x| x + 1.0)]]
    }

    /// `max_x ‖E(t,x)‖₂`.
    pub fn deformation_sup(&self) -> f64 {
        sup_norm(&self.deformation)
    }

    pub fn inverse_deformation_sup(&self) -> f64 {
        self.inverse_deformation.iter().map(spectral_norm).fold(0.0, f64::max)
    }
}

/// Pointwise maximum of the spectral norm of a tensor field.
pub fn sup_norm(t: &TensorField) -> f64 {
    (0..t[0][0].values.len())
        .map(|i| {
            spectral_norm(&[
                [t[0][0].values[i], t[0][1].values[i]],
                [t[1][0].values[i], t[1][1].values[i]],
            ])
        })
        .fold(0.0, f64::max)
}

/// Transport of the displacement: `d_t = −u − u·∇d`.
pub fn advance_y(state: &FlowMapState, path: VelocityPath<'_>, dt: f64) -> Result<VectorField> {
    ssp_rk3(&state.displacement, dt, |d, s| {
        let u = path.at(s);
        let mut out = u.scale(-1.0);
        for c in 0..2 {
            let gd = gradient(&d.0[c]);
            let adv = dealias(&u.dot(&gd));
            out.0[c].axpy(-1.0, &adv);
        }
        Ok(out)
    })
}

/// Transport-plus-stretch of the deformation gradient:
/// `∂_t E_ij + u_k ∂_k E_ij + E_ik ∂_j u_k = 0`.
pub fn advance_e(state: &FlowMapState, path: VelocityPath<'_>, dt: f64) -> Result<TensorField> {
    let grad_start = velocity_gradient(path.start);
    let grad_end = if core::ptr::eq(path.start, path.end) {
        grad_start.clone()
    } else {
        velocity_gradient(path.end)
    };
    ssp_rk3(&state.deformation, dt, |e, s| {
        let u = path.at(s);
        let du = |k: usize, j: usize| {
            let mut f = grad_start[k][j].scale(1.0 - s);
            f.axpy(s, &grad_end[k][j]);
            f
        };
        let du = [[du(0, 0), du(0, 1)], [du(1, 0), du(1, 1)]];
        let mut out = e.clone();
        for i in 0..2 {
            for j in 0..2 {
                let ge = gradient(&e[i][j]);
                let mut acc = u.dot(&ge);
                for k in 0..2 {
                    acc.axpy(1.0, &(&e[i][k] * &du[k][j]));
                }
                out[i][j] = dealias(&acc).scale(-1.0);
            }
        }
        Ok(out)
    })
}

/// RK4 on `dx/dt = u(t,x)`, `dB/dt = ∇u(t,x)·B`, `dJ̃/dt = −div u(t,x) J̃` for
/// every Lagrangian node, with bicubic velocity interpolation.
pub fn advance_particles(state: &FlowMapState, path: VelocityPath<'_>, dt: f64) -> ParticleUpdate {
    let g = state.grid().clone();
    let frozen = core::ptr::eq(path.start, path.end);
    let ga = velocity_gradient(path.start);
    let gb = if frozen { ga.clone() } else { velocity_gradient(path.end) };
    let (ua, ub) = (path.start, path.end);

    let sample = |p: [f64; 2], s: f64| -> ([f64; 2], Mat2) {
        let st = Stencil::new(&g, p);
        let va = [st.apply(&ua.0[0].values), st.apply(&ua.0[1].values)];
        let ma = tensor_at(&ga, &st);
        if frozen {
            return (va, ma);
        }
        let vb = [st.apply(&ub.0[0].values), st.apply(&ub.0[1].values)];
        let mb = tensor_at(&gb, &st);
        let l = |a: f64, b: f64| (1.0 - s) * a + s * b;
        (
            [l(va[0], vb[0]), l(va[1], vb[1])],
            [
                [l(ma[0][0], mb[0][0]), l(ma[0][1], mb[0][1])],
                [l(ma[1][0], mb[1][0]), l(ma[1][1], mb[1][1])],
            ],
        )
    };

    let n = state.particles.len();
    let mut particles = Vec::with_capacity(n);
    let mut inverse_deformation = Vec::with_capacity(n);
    let mut liouville = Vec::with_capacity(n);
    for i in 0..n {
        let p = state.particles[i];
        let b = state.inverse_deformation[i];
        let y0 = [p[0], p[1], b[0][0], b[0][1], b[1][0], b[1][1], state.liouville[i]];
        let y = rk4(y0, dt, |y, s| {
            let (v, m) = sample([y[0], y[1]], s);
            let bb = [[y[2], y[3]], [y[4], y[5]]];
            let mb = mat_mul(&m, &bb);
            let div = m[0][0] + m[1][1];
            [v[0], v[1], mb[0][0], mb[0][1], mb[1][0], mb[1][1], -div * y[6]]
        });
        particles.push([wrap_unit(y[0]), wrap_unit(y[1])]);
        inverse_deformation.push([[y[2], y[3]], [y[4], y[5]]]);
        liouville.push(y[6]);
    }
    ParticleUpdate {
        particles,
        inverse_deformation,
        liouville,
    }
}

/// Positions only; see [`advance_particles`].
pub fn advance_positions(state: &FlowMapState, path: VelocityPath<'_>, dt: f64) -> Vec<[f64; 2]> {
    advance_particles(state, path, dt).particles
}

/// `B` only; see [`advance_particles`].
pub fn advance_b(state: &FlowMapState, path: VelocityPath<'_>, dt: f64) -> Vec<Mat2> {
    advance_particles(state, path, dt).inverse_deformation
}

/// `det E`, failing if the map degenerates anywhere.
pub fn jacobian_of(e: &TensorField) -> Result<ScalarField> {
    let j = e[0][0].zip_map(&e[1][1], |a, d| a * d).zip_map(
        &e[0][1].zip_map(&e[1][0], |b, c| b * c),
        |ad, bc| ad - bc,
    );
    let min = j.min();
    if !(min > J_MIN) {
        return Err(Error::DegenerateMap {
            min_jacobian: min,
            threshold: J_MIN,
        });
    }
    Ok(j)
}

/// `f(y(t,x))` for a field given on the Lagrangian grid.
pub fn compose_to_euler(f_y: &ScalarField, state: &FlowMapState) -> ScalarField {
    let values = state.labels().into_iter().map(|p| f_y.interp_at(p)).collect();
    ScalarField::from_values(state.grid(), values).expect("same grid")
}

pub fn compose_to_euler_complex(f_y: &ComplexField, state: &FlowMapState) -> ComplexField {
    let values: Vec<Complex64> = state.labels().into_iter().map(|p| f_y.interp_at(p)).collect();
    ComplexField::from_values(state.grid(), values).expect("same grid")
}

/// `f(x(t,y))` for a field given on the Eulerian grid.
pub fn compose_to_lagr(f_x: &ScalarField, state: &FlowMapState) -> ScalarField {
    let values = state.particles.iter().map(|&p| f_x.interp_at(p)).collect();
    ScalarField::from_values(state.grid(), values).expect("same grid")
}

pub fn compose_to_lagr_complex(f_x: &ComplexField, state: &FlowMapState) -> ComplexField {
    let values = state.particles.iter().map(|&p| f_x.interp_at(p)).collect();
    ComplexField::from_values(state.grid(), values).expect("same grid")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEquivalence {
    pub eulerian: f64,
    pub lagrangian: f64,
    /// `lagrangian / eulerian`.
    pub ratio: f64,
    /// Constant `C ≥ 1` from the measured tensor norms with `1/C ≤ ratio ≤ C`.
    pub bound: f64,
}

/// Compares the discrete `H^m` norms (`m ∈ {0,1}`) of `f` and `f∘x`.
///
/// Change of variables gives `‖f∘x‖²_{L²_y} = ∫|f|² J dx` and
/// `∇_y(f∘x) = Bᵀ ∇f`, so the ratio is bracketed using `sup J`, `sup 1/J`,
/// `sup ‖B‖` and `sup ‖E‖`.
pub fn norm_equivalence_report(f: &ScalarField, state: &FlowMapState, order: u32) -> Result<NormEquivalence> {
    if order > 1 {
        return Err(Error::InvalidParameter {
            name: "order",
            reason: "only m = 0 and m = 1 are supported",
        });
    }
    let jmin = state.jacobian.min();
    if !(jmin > J_MIN) {
        return Err(Error::DegenerateMap {
            min_jacobian: jmin,
            threshold: J_MIN,
        });
    }
    let jmax = state.jacobian.max();
    let eulerian = sobolev_norm(f, order);
    let lagrangian = sobolev_norm(&compose_to_lagr(f, state), order);
    let c0 = libm::sqrt(jmax).max(libm::sqrt(1.0 / jmin));
    let bound = if order == 0 {
        c0
    } else {
        let b = state.inverse_deformation_sup().max(1.0);
        let e = state.deformation_sup().max(1.0);
        (b * libm::sqrt(jmax)).max(e * libm::sqrt(1.0 / jmin)).max(c0)
    };
    Ok(NormEquivalence {
        eulerian,
        lagrangian,
        ratio: lagrangian / eulerian,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn shear(g: &Grid) -> VectorField {
        VectorField::from_fn(g, |x| [0.0, libm::sin(2.0 * PI * x[0])])
    }

    fn run(state: &FlowMapState, u: &VectorField, dt: f64, steps: usize) -> FlowMapState {
        let mut s = state.clone();
        for _ in 0..steps {
            s = s.advance(VelocityPath::frozen(u), dt, 0.5).unwrap();
        }
        s
    }

    #[test]
    fn zero_velocity_keeps_identity() {
        let g = Grid::new(16).unwrap();
        let s0 = FlowMapState::identity(&g);
        let s = run(&s0, &VectorField::zeros(&g), 0.01, 5);
        assert_eq!(s.displacement, s0.displacement);
        assert_eq!(s.particles, s0.particles);
        assert_eq!(s.deformation, s0.deformation);
        assert!(s.inverse_deformation.iter().all(|b| *b == IDENTITY));
        assert!(s.jacobian.values.iter().all(|&j| j == 1.0));
        assert!((s.time - 0.05).abs() < 1e-15);
    }

    #[test]
    fn translation_is_exact() {
        let g = Grid::new(16).unwrap();
        let c = 0.3;
        let u = VectorField::from_fn(&g, |_| [c, 0.0]);
        let s = run(&FlowMapState::identity(&g), &u, 0.01, 50);
        let t = 0.5;
        for (i, p) in s.particles.iter().enumerate() {
            let y = g.node(i);
            assert!(periodic_delta(p[0], y[0] + c * t).abs() < 1e-13);
            assert!(periodic_delta(p[1], y[1]).abs() < 1e-13);
        }
        for v in &s.displacement.0[0].values {
            assert!((v + c * t).abs() < 1e-12);
        }
        assert!(s.inverse_deformation.iter().all(|b| (b[0][0] - 1.0).abs() < 1e-14 && b[0][1].abs() < 1e-14));
    }

    #[test]
    fn shear_matches_closed_form() {
        let g = Grid::new(32).unwrap();
        let u = shear(&g);
        let dt = 0.01;
        let s = run(&FlowMapState::identity(&g), &u, dt, 25);
        let t = 0.25;
        for i in 0..g.len() {
            let x = g.node(i);
            let d2 = -t * libm::sin(2.0 * PI * x[0]);
            assert!((s.displacement.0[1].values[i] - d2).abs() < 1e-12);
            assert!(s.displacement.0[0].values[i].abs() < 1e-14);
            let e21 = -2.0 * PI * t * libm::cos(2.0 * PI * x[0]);
            assert!((s.deformation[1][0].values[i] - e21).abs() < 1e-10);
            assert!((s.deformation[0][0].values[i] - 1.0).abs() < 1e-12);
            assert!((s.jacobian.values[i] - 1.0).abs() < 1e-8);
        }
        let from_y = s.deformation_from_displacement();
        for i in 0..2 {
            for j in 0..2 {
                assert!((&from_y[i][j] - &s.deformation[i][j]).max_abs() < 1e-6);
            }
        }
        assert!(s.inverse_identity_error() < 1e-5);
        assert!(s.inverse_tensor_error() < 1e-5);
        assert!(s.liouville_gap() < 1e-8);
    }

    #[test]
    fn degenerate_jacobian_rejected() {
        let g = Grid::new(8).unwrap();
        let mut e = tensor_identity(&g);
        e[0][0].values[3] = 0.0;
        assert!(matches!(jacobian_of(&e), Err(Error::DegenerateMap { .. })));
    }

    #[test]
    fn spectral_norm_of_simple_matrices() {
        assert!((spectral_norm(&IDENTITY) - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&[[3.0, 0.0], [0.0, -2.0]]) - 3.0).abs() < 1e-14);
        // [[1, t], [0, 1]] has norm (t + sqrt(t² + 4)) / 2.
        let t = 1.5;
        assert!((spectral_norm(&[[1.0, t], [0.0, 1.0]]) - (t + libm::sqrt(t * t + 4.0)) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn identity_map_norm_ratio() {
        let g = Grid::new(16).unwrap();
        let s = FlowMapState::identity(&g);
        let f = ScalarField::from_fn(&g, |x| libm::sin(2.0 * PI * x[0]) + 0.3 * libm::cos(4.0 * PI * x[1]));
        for m in [0, 1] {
            let r = norm_equivalence_report(&f, &s, m).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-10);
            assert!((r.bound - 1.0).abs() < 1e-12);
        }
        assert!(norm_equivalence_report(&f, &s, 2).is_err());
    }
}
