//! Uniform periodic grid on the unit torus `[0,1)²`, sampled fields, and the
//! spectral machinery built on top of them.
//!
//! Physical samples are stored row-major with the first coordinate as the
//! slow index: sample `(i1, i2)` sits at `x = (i1 h, i2 h)` and lives at
//! `values[i1 * n + i2]`. Spectral coefficients use the same layout, indexed
//! by the signed wavenumbers returned by [`Grid::wavenumber`].
//!
//! Coefficients are normalized so that `f(x) = Σ_k f̂_k exp(2πi k·x)`; a
//! constant field therefore has a single zero-mode coefficient equal to the
//! constant, and Parseval reads `‖f‖²_{L²} = Σ |f̂_k|²`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftPlan;

const TWO_PI: f64 = 2.0 * PI;

/// Reduces a coordinate to `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - libm::floor(x);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Signed periodic difference `a - b` reduced to `[-1/2, 1/2)`.
#[inline]
pub fn periodic_delta(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - libm::floor(d + 0.5)
}

#[derive(Clone)]
pub struct Grid {
    n: usize,
    plan: Arc<FftPlan>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for Grid {}

impl Grid {
    /// `n` must be a power of two and at least 8.
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "grid size must be a power of two and at least 8",
            });
        }
        Ok(Self {
            n,
            plan: Arc::new(FftPlan::new(n)),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Number of samples, `n²`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n + i2
    }

    /// Physical position of the sample stored at `idx`.
    #[inline]
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        [(idx / self.n) as f64 * h, (idx % self.n) as f64 * h]
    }

    pub fn nodes(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Signed integer wavenumber of spectral row/column `j`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Angular wavenumber `2πk` of spectral index `idx`.
    #[inline]
    pub fn angular(&self, idx: usize) -> [f64; 2] {
        [
            TWO_PI * self.wavenumber(idx / self.n) as f64,
            TWO_PI * self.wavenumber(idx % self.n) as f64,
        ]
    }

    /// Wavevector used for first derivatives: as [`Grid::angular`] but with
    /// the Nyquist component zeroed so odd derivatives of real fields stay real.
    #[inline]
    pub fn derivative_symbol(&self, idx: usize) -> [f64; 2] {
        let half = (self.n / 2) as i64;
        let k1 = self.wavenumber(idx / self.n);
        let k2 = self.wavenumber(idx % self.n);
        [
            if k1 == half { 0.0 } else { TWO_PI * k1 as f64 },
            if k2 == half { 0.0 } else { TWO_PI * k2 as f64 },
        ]
    }

    /// Squared angular wavenumber `|2πk|²`.
    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.angular(idx);
        k[0] * k[0] + k[1] * k[1]
    }

    /// Whether mode `idx` survives the 2/3 rule (`3|k_i| ≤ n` on both axes).
    #[inline]
    pub fn is_resolved(&self, idx: usize) -> bool {
        let k1 = self.wavenumber(idx / self.n).unsigned_abs() as usize;
        let k2 = self.wavenumber(idx % self.n).unsigned_abs() as usize;
        3 * k1 <= self.n && 3 * k2 <= self.n
    }

    /// Index of the mode `-k` for the mode stored at `idx`.
    #[inline]
    fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (j1, j2) = (idx / n, idx % n);
        ((n - j1) % n) * n + (n - j2) % n
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        self.plan.process_2d(data, inverse);
        if !inverse {
            let scale = 1.0 / self.len() as f64;
            for c in data.iter_mut() {
                *c *= scale;
            }
        }
    }

    pub fn forward(&self, f: &ScalarField) -> Spectrum {
        self.check(&f.grid);
        let mut data: Vec<Complex64> = f.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut data, false);
        Spectrum {
            grid: self.clone(),
            coeffs: data,
        }
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, s: &Spectrum) -> ScalarField {
        self.check(&s.grid);
        let mut data = s.coeffs.clone();
        self.transform(&mut data, true);
        ScalarField {
            grid: self.clone(),
            values: data.into_iter().map(|c| c.re).collect(),
        }
    }

    /// Transforms two real fields with a single complex FFT.
    pub fn forward_pair(&self, a: &ScalarField, b: &ScalarField) -> (Spectrum, Spectrum) {
        self.check(&a.grid);
        self.check(&b.grid);
        let mut data: Vec<Complex64> = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.transform(&mut data, false);
        let mut sa = vec![Complex64::new(0.0, 0.0); self.len()];
        let mut sb = sa.clone();
        for idx in 0..self.len() {
            let z = data[idx];
            let zc = data[self.conjugate_index(idx)].conj();
            sa[idx] = (z + zc) * 0.5;
            sb[idx] = (z - zc) * Complex64::new(0.0, -0.5);
        }
        (
            Spectrum {
                grid: self.clone(),
                coeffs: sa,
            },
            Spectrum {
                grid: self.clone(),
                coeffs: sb,
            },
        )
    }

    /// Inverse of two spectra of real fields with a single complex FFT.
    pub fn inverse_pair(&self, a: &Spectrum, b: &Spectrum) -> (ScalarField, ScalarField) {
        self.check(&a.grid);
        self.check(&b.grid);
        let mut data: Vec<Complex64> = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
            .collect();
        self.transform(&mut data, true);
        let (re, im) = data.into_iter().map(|c| (c.re, c.im)).unzip();
        (
            ScalarField {
                grid: self.clone(),
                values: re,
            },
            ScalarField {
                grid: self.clone(),
                values: im,
            },
        )
    }

    pub fn forward_complex(&self, f: &ComplexField) -> Spectrum {
        self.check(&f.grid);
        let mut data = f.values.clone();
        self.transform(&mut data, false);
        Spectrum {
            grid: self.clone(),
            coeffs: data,
        }
    }

    pub fn inverse_complex(&self, s: &Spectrum) -> ComplexField {
        self.check(&s.grid);
        let mut data = s.coeffs.clone();
        self.transform(&mut data, true);
        ComplexField {
            grid: self.clone(),
            values: data,
        }
    }

    pub fn forward_vector(&self, v: &VectorField) -> [Spectrum; 2] {
        let (a, b) = self.forward_pair(&v.0[0], &v.0[1]);
        [a, b]
    }

    pub fn inverse_vector(&self, s: &[Spectrum; 2]) -> VectorField {
        let (a, b) = self.inverse_pair(&s[0], &s[1]);
        VectorField([a, b])
    }

    #[inline]
    pub(crate) fn check(&self, other: &Grid) {
        assert_eq!(self.n, other.n, "fields live on different grids");
    }
}

/// Normalized Fourier coefficients of a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Coefficient of the mode with signed wavenumbers `(k1, k2)`.
    pub fn mode(&self, k1: i64, k2: i64) -> Complex64 {
        let n = self.grid.n as i64;
        let j1 = k1.rem_euclid(n) as usize;
        let j2 = k2.rem_euclid(n) as usize;
        self.coeffs[self.grid.index(j1, j2)]
    }

    /// Multiplies each coefficient by `symbol(idx)`.
    pub fn map_modes(&self, mut symbol: impl FnMut(usize) -> Complex64) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().enumerate().map(|(i, &c)| c * symbol(i)).collect(),
        }
    }

    /// `∂/∂x_axis`.
    pub fn derivative(&self, axis: usize) -> Spectrum {
        let g = self.grid.clone();
        self.map_modes(|i| Complex64::new(0.0, g.derivative_symbol(i)[axis]))
    }

    pub fn laplacian(&self) -> Spectrum {
        let g = self.grid.clone();
        self.map_modes(|i| Complex64::new(-g.k_squared(i), 0.0))
    }

    /// Zeroes every mode outside the 2/3-rule band.
    pub fn dealias(&mut self) {
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !self.grid.is_resolved(i) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// `Σ |c_k|²`, equal to the squared L² norm of the physical field.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn axpy(&mut self, a: f64, other: &Spectrum) {
        self.grid.check(&other.grid);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        Self {
            grid: grid.clone(),
            values: (0..grid.len()).map(|i| f(grid.node(i))).collect(),
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        self.grid.check(&other.grid);
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|x| a * x)
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        self.grid.check(&other.grid);
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    /// Domain average, which on the unit torus is also the integral.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn integral(&self) -> f64 {
        self.mean()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|x| x * x).sum::<f64>() / self.values.len() as f64)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    pub fn interp_at(&self, p: [f64; 2]) -> f64 {
        Stencil::new(&self.grid, p).apply(&self.values)
    }

    /// Periodic bicubic (4-point Lagrange) interpolation at arbitrary points.
    pub fn interp(&self, points: &[[f64; 2]]) -> Vec<f64> {
        points.iter().map(|&p| self.interp_at(p)).collect()
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

/// Pointwise product.
impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// A pair of scalar fields on the same grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField(pub [ScalarField; 2]);

impl VectorField {
    pub fn new(c1: ScalarField, c2: ScalarField) -> Self {
        c1.grid.check(&c2.grid);
        Self([c1, c2])
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self([ScalarField::zeros(grid), ScalarField::zeros(grid)])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        Self([
            ScalarField::from_fn(grid, |x| f(x)[0]),
            ScalarField::from_fn(grid, |x| f(x)[1]),
        ])
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.0[0].grid
    }

    pub fn scale(&self, a: f64) -> Self {
        Self([self.0[0].scale(a), self.0[1].scale(a)])
    }

    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        self.0[0].axpy(a, &other.0[0]);
        self.0[1].axpy(a, &other.0[1]);
    }

    pub fn add(&self, other: &VectorField) -> Self {
        Self([&self.0[0] + &other.0[0], &self.0[1] + &other.0[1]])
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        Self([&self.0[0] - &other.0[0], &self.0[1] - &other.0[1]])
    }

    /// Multiplies both components by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField) -> Self {
        Self([&self.0[0] * s, &self.0[1] * s])
    }

    /// Linear blend `(1-s) a + s b`.
    pub fn lerp(a: &VectorField, b: &VectorField, s: f64) -> Self {
        let mut out = a.scale(1.0 - s);
        out.axpy(s, b);
        out
    }

    /// Pointwise `|v|²`.
    pub fn norm_sqr(&self) -> ScalarField {
        self.0[0].zip_map(&self.0[1], |a, b| a * a + b * b)
    }

    pub fn dot(&self, other: &VectorField) -> ScalarField {
        let mut out = &self.0[0] * &other.0[0];
        for (o, (a, b)) in out.values.iter_mut().zip(self.0[1].values.iter().zip(&other.0[1].values)) {
            *o += a * b;
        }
        out
    }

    /// `sqrt(∫|v|²)`.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr().mean())
    }

    /// Largest pointwise Euclidean magnitude.
    pub fn max_norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr().max())
    }

    pub fn max_abs(&self) -> f64 {
        self.0[0].max_abs().max(self.0[1].max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }

    pub fn interp_at(&self, p: [f64; 2]) -> [f64; 2] {
        let st = Stencil::new(self.grid(), p);
        [st.apply(&self.0[0].values), st.apply(&self.0[1].values)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: (0..grid.len()).map(|i| f(grid.node(i))).collect(),
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Pointwise `|ψ|²`.
    pub fn intensity(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn sub(&self, other: &ComplexField) -> Self {
        self.grid.check(&other.grid);
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// `sqrt(∫|ψ|²)`.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.intensity().mean())
    }

    pub fn interp_at(&self, p: [f64; 2]) -> Complex64 {
        Stencil::new(&self.grid, p).apply_complex(&self.values)
    }
}

/// Tensor-product 4-point Lagrange stencil around an off-grid point.
///
/// The one-dimensional weights reproduce cubics exactly, so the stencil is
/// fourth-order accurate, exact at grid nodes, and sums to one.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    rows: [usize; 4],
    cols: [usize; 4],
    w1: [f64; 4],
    w2: [f64; 4],
    n: usize,
}

#[inline]
fn lagrange_weights(t: f64) -> [f64; 4] {
    let tm1 = t - 1.0;
    let tm2 = t - 2.0;
    let tp1 = t + 1.0;
    [
        -t * tm1 * tm2 / 6.0,
        tp1 * tm1 * tm2 / 2.0,
        -tp1 * t * tm2 / 2.0,
        tp1 * t * tm1 / 6.0,
    ]
}

impl Stencil {
    pub fn new(grid: &Grid, p: [f64; 2]) -> Self {
        let n = grid.n;
        let nf = n as f64;
        let axis = |x: f64| {
            let s = wrap_unit(x) * nf;
            let base = libm::floor(s);
            let t = s - base;
            let b = base as usize % n;
            let idx = [(b + n - 1) % n, b, (b + 1) % n, (b + 2) % n];
            (idx, lagrange_weights(t))
        };
        let (rows, w1) = axis(p[0]);
        let (cols, w2) = axis(p[1]);
        Self {
            rows,
            cols,
            w1,
            w2,
            n,
        }
    }

    #[inline]
    pub fn apply(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            let row = self.rows[a] * self.n;
            let mut inner = 0.0;
            for b in 0..4 {
                inner += self.w2[b] * values[row + self.cols[b]];
            }
            acc += self.w1[a] * inner;
        }
        acc
    }

    #[inline]
    pub fn apply_complex(&self, values: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let row = self.rows[a] * self.n;
            let mut inner = Complex64::new(0.0, 0.0);
            for b in 0..4 {
                inner += values[row + self.cols[b]] * self.w2[b];
            }
            acc += inner * self.w1[a];
        }
        acc
    }
}

// Differential operators on physical fields.

pub fn gradient(f: &ScalarField) -> VectorField {
    let g = f.grid();
    let s = g.forward(f);
    let (a, b) = g.inverse_pair(&s.derivative(0), &s.derivative(1));
    VectorField([a, b])
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let g = u.grid();
    let [s1, s2] = g.forward_vector(u);
    let mut d = s1.derivative(0);
    d.axpy(1.0, &s2.derivative(1));
    g.inverse_real(&d)
}

/// Scalar vorticity `∂₂u₁ − ∂₁u₂`.
pub fn curl_z(u: &VectorField) -> ScalarField {
    let g = u.grid();
    let [s1, s2] = g.forward_vector(u);
    let mut d = s1.derivative(1);
    d.axpy(-1.0, &s2.derivative(0));
    g.inverse_real(&d)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    g.inverse_real(&g.forward(f).laplacian())
}

pub fn vector_laplacian(u: &VectorField) -> VectorField {
    let g = u.grid();
    let [a, b] = g.forward_vector(u);
    g.inverse_vector(&[a.laplacian(), b.laplacian()])
}

/// Velocity gradient `[i][j] = ∂_j u_i`.
pub fn jacobian(u: &VectorField) -> [[ScalarField; 2]; 2] {
    let g = u.grid();
    let [s1, s2] = g.forward_vector(u);
    let (d11, d12) = g.inverse_pair(&s1.derivative(0), &s1.derivative(1));
    let (d21, d22) = g.inverse_pair(&s2.derivative(0), &s2.derivative(1));
    [[d11, d12], [d21, d22]]
}

/// Projects onto the 2/3-rule band.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let mut s = g.forward(f);
    s.dealias();
    g.inverse_real(&s)
}

pub fn dealias_vector(v: &VectorField) -> VectorField {
    let g = v.grid();
    let [mut a, mut b] = g.forward_vector(v);
    a.dealias();
    b.dealias();
    g.inverse_vector(&[a, b])
}

/// Discrete `H^m` norm, `m ∈ {0, 1}`, evaluated spectrally.
pub fn sobolev_norm(f: &ScalarField, order: u32) -> f64 {
    let g = f.grid();
    let s = g.forward(f);
    let sum: f64 = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let w = if order == 0 { 1.0 } else { 1.0 + g.k_squared(i) };
            w * c.norm_sqr()
        })
        .sum();
    libm::sqrt(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(4).is_err());
        assert!(Grid::new(24).is_err());
        assert!(Grid::new(16).is_ok());
        let g = grid(16);
        assert!((g.spacing() * g.n() as f64 - 1.0).abs() == 0.0);
        assert!(matches!(
            ScalarField::from_values(&g, vec![0.0; 10]),
            Err(Error::SizeMismatch { expected: 256, found: 10 })
        ));
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let g = grid(16);
        let s = g.forward(&ScalarField::constant(&g, 3.5));
        assert!((s.coeffs[0].re - 3.5).abs() < 1e-15);
        assert!(s.coeffs.iter().skip(1).all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn sine_has_conjugate_pair() {
        let g = grid(16);
        let f = ScalarField::from_fn(&g, |x| libm::sin(TWO_PI * x[0]));
        let s = g.forward(&f);
        assert!((s.mode(1, 0) - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((s.mode(-1, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        let others: f64 = s.energy() - 0.5;
        assert!(others.abs() < 1e-14);
    }

    #[test]
    fn pair_transform_matches_single() {
        let g = grid(16);
        let a = ScalarField::from_fn(&g, |x| libm::sin(TWO_PI * x[0]) + libm::cos(4.0 * PI * x[1]));
        let b = ScalarField::from_fn(&g, |x| libm::exp(libm::sin(TWO_PI * (x[0] + x[1]))));
        let (sa, sb) = g.forward_pair(&a, &b);
        let (ra, rb) = (g.forward(&a), g.forward(&b));
        for i in 0..g.len() {
            assert!((sa.coeffs[i] - ra.coeffs[i]).norm() < 1e-14);
            assert!((sb.coeffs[i] - rb.coeffs[i]).norm() < 1e-14);
        }
        let (a2, b2) = g.inverse_pair(&sa, &sb);
        for i in 0..g.len() {
            assert!((a2.values[i] - a.values[i]).abs() < 1e-13);
            assert!((b2.values[i] - b.values[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn derivatives_of_single_modes() {
        let g = grid(32);
        let f = ScalarField::from_fn(&g, |x| libm::sin(TWO_PI * x[0]));
        let grad = gradient(&f);
        for i in 0..g.len() {
            let x = g.node(i);
            assert!((grad.0[0].values[i] - TWO_PI * libm::cos(TWO_PI * x[0])).abs() < 1e-12);
            assert!(grad.0[1].values[i].abs() < 1e-12);
        }
        let u = VectorField::from_fn(&g, |x| [libm::sin(TWO_PI * x[1]), 0.0]);
        assert!(divergence(&u).max_abs() < 1e-12);
        let w = curl_z(&u);
        // Centered finite differences of u₁ along x₂ as the independent check.
        let h = g.spacing();
        for i1 in 0..g.n() {
            for i2 in 0..g.n() {
                let up = u.0[0].values[g.index(i1, (i2 + 1) % g.n())];
                let dn = u.0[0].values[g.index(i1, (i2 + g.n() - 1) % g.n())];
                let fd = (up - dn) / (2.0 * h);
                assert!((w.values[g.index(i1, i2)] - fd).abs() < 0.05);
                let exact = TWO_PI * libm::cos(TWO_PI * g.node(g.index(i1, i2))[1]);
                assert!((w.values[g.index(i1, i2)] - exact).abs() < 1e-12);
            }
        }
        let lap = laplacian(&f);
        for i in 0..g.len() {
            assert!((lap.values[i] + TWO_PI * TWO_PI * f.values[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn dealias_cuts_upper_third() {
        let g = grid(32);
        let low = ScalarField::from_fn(&g, |x| libm::cos(TWO_PI * 3.0 * x[0]) * libm::sin(TWO_PI * 10.0 * x[1]));
        let d = dealias(&low);
        for i in 0..g.len() {
            assert!((d.values[i] - low.values[i]).abs() < 1e-13);
        }
        let high = ScalarField::from_fn(&g, |x| libm::cos(TWO_PI * 15.0 * x[0]));
        assert!(dealias(&high).max_abs() < 1e-14);
    }

    #[test]
    fn stencil_exact_at_nodes_and_constants() {
        let g = grid(16);
        let f = ScalarField::from_fn(&g, |x| libm::sin(TWO_PI * x[0]) * libm::cos(TWO_PI * 2.0 * x[1]));
        for i in (0..g.len()).step_by(7) {
            assert_eq!(f.interp_at(g.node(i)), f.values[i]);
        }
        let c = ScalarField::constant(&g, 2.25);
        for p in [[0.013, 0.77], [0.999, 0.5], [-0.3, 1.7]] {
            assert!((c.interp_at(p) - 2.25).abs() < 1e-14);
        }
    }

    #[test]
    fn periodic_helpers() {
        assert_eq!(wrap_unit(1.25), 0.25);
        assert_eq!(wrap_unit(-0.25), 0.75);
        assert!(wrap_unit(-1e-18) < 1.0);
        assert!((periodic_delta(0.99, 0.01) + 0.02).abs() < 1e-15);
    }
}
