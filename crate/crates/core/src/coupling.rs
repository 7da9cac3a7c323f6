//! Interaction coefficient and the coupling functions `g` (of specific
//! volume) and `h` (of wave intensity).
//!
//! Both functions are built from C∞ profiles with compact support:
//!
//! * `g'(v) = g_amp · bump((v − v_lo)/(v_hi − v_lo))`, where
//!   `bump(t) = exp(−1/(t(1−t)))` on `(0,1)` and zero elsewhere;
//! * `h'(s) = h_amp · cutoff(s / s_max)`, equal to `h_amp` on `[0, s_max/2]`,
//!   decreasing smoothly to zero at `s_max`.
//!
//! `g` and `h` are the antiderivatives vanishing at zero. Neither has a closed
//! form, so they are read from cumulative quadrature tables with cubic
//! Hermite interpolation; the profile itself supplies the exact slope at
//! every node.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const GAUSS_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const TABLE_INTERVALS: usize = 2048;

/// 8-point Gauss–Legendre rule on `[a, b]`.
fn gauss8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

/// Smooth bump `exp(−1/(t(1−t)))` on `(0,1)`.
pub fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        libm::exp(-1.0 / (t * (1.0 - t)))
    }
}

pub fn bump_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let q = t * (1.0 - t);
        bump(t) * (1.0 - 2.0 * t) / (q * q)
    }
}

/// Smooth step from 1 (at `τ ≤ 1/2`) down to 0 (at `τ ≥ 1`).
pub fn cutoff(tau: f64) -> f64 {
    if tau <= 0.5 {
        1.0
    } else if tau >= 1.0 {
        0.0
    } else {
        let on = libm::exp(-1.0 / (1.0 - tau));
        let off = libm::exp(-1.0 / (tau - 0.5));
        on / (on + off)
    }
}

/// Cumulative integral of a smooth profile on `[lo, hi]`.
#[derive(Debug, Clone)]
struct CumulativeTable {
    lo: f64,
    step: f64,
    integral: Vec<f64>,
    slope: Vec<f64>,
}

impl CumulativeTable {
    fn new(profile: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Self {
        let step = (hi - lo) / TABLE_INTERVALS as f64;
        let mut integral = Vec::with_capacity(TABLE_INTERVALS + 1);
        let mut slope = Vec::with_capacity(TABLE_INTERVALS + 1);
        let mut acc = 0.0;
        integral.push(0.0);
        slope.push(profile(lo));
        for i in 0..TABLE_INTERVALS {
            let a = lo + i as f64 * step;
            acc += gauss8(&profile, a, a + step);
            integral.push(acc);
            slope.push(profile(a + step));
        }
        Self {
            lo,
            step,
            integral,
            slope,
        }
    }

    fn total(&self) -> f64 {
        self.integral[TABLE_INTERVALS]
    }

    /// `∫_lo^t profile`, clamped to the table range.
    fn eval(&self, t: f64) -> f64 {
        let s = (t - self.lo) / self.step;
        if s <= 0.0 {
            return 0.0;
        }
        if s >= TABLE_INTERVALS as f64 {
            return self.total();
        }
        let i = (libm::floor(s) as usize).min(TABLE_INTERVALS - 1);
        let x = s - i as f64;
        let x2 = x * x;
        let x3 = x2 * x;
        let h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
        let h10 = x3 - 2.0 * x2 + x;
        let h01 = -2.0 * x3 + 3.0 * x2;
        let h11 = x3 - x2;
        let v = h00 * self.integral[i]
            + h10 * self.step * self.slope[i]
            + h01 * self.integral[i + 1]
            + h11 * self.step * self.slope[i + 1];
        // The profiles are non-negative, so the integral is monotone; the
        // cubic can overshoot where the profile grows super-exponentially.
        v.clamp(self.integral[i], self.integral[i + 1])
    }
}

#[derive(Debug, Clone)]
pub struct CouplingSpec {
    pub alpha: f64,
    pub v_lo: f64,
    pub v_hi: f64,
    pub g_amp: f64,
    pub s_max: f64,
    pub h_amp: f64,
    bump_table: CumulativeTable,
    cutoff_table: CumulativeTable,
}

impl Default for CouplingSpec {
    fn default() -> Self {
        Self::new(1.0, 0.5, 2.0, 1.0, 4.0, 1.0).expect("default coupling parameters are valid")
    }
}

impl CouplingSpec {
    /// `alpha = 0` is accepted and switches the interaction off.
    pub fn new(alpha: f64, v_lo: f64, v_hi: f64, g_amp: f64, s_max: f64, h_amp: f64) -> Result<Self> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return bad("alpha", "must be finite and non-negative");
        }
        if !(v_lo > 0.0 && v_hi > v_lo && v_hi.is_finite()) {
            return bad("v_lo", "g' support must satisfy 0 < v_lo < v_hi");
        }
        if !(g_amp > 0.0 && g_amp.is_finite()) {
            return bad("g_amp", "must be positive");
        }
        if !(s_max > 0.0 && s_max.is_finite()) {
            return bad("s_max", "must be positive");
        }
        if !(h_amp > 0.0 && h_amp.is_finite()) {
            return bad("h_amp", "must be positive");
        }
        Ok(Self {
            alpha,
            v_lo,
            v_hi,
            g_amp,
            s_max,
            h_amp,
            bump_table: CumulativeTable::new(bump, 0.0, 1.0),
            cutoff_table: CumulativeTable::new(cutoff, 0.5, 1.0),
        })
    }

    /// Same profiles with a different interaction coefficient.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.v_lo, self.v_hi, self.g_amp, self.s_max, self.h_amp)
    }

    fn nonneg(what: &'static str, x: f64) -> Result<()> {
        if x >= 0.0 {
            Ok(())
        } else {
            Err(Error::NegativeArgument { what, value: x })
        }
    }

    #[inline]
    fn g_width(&self) -> f64 {
        self.v_hi - self.v_lo
    }

    pub fn g(&self, v: f64) -> Result<f64> {
        Self::nonneg("specific volume", v)?;
        Ok(self.g_unchecked(v))
    }

    pub fn g_prime(&self, v: f64) -> Result<f64> {
        Self::nonneg("specific volume", v)?;
        Ok(self.g_prime_unchecked(v))
    }

    pub fn g_second(&self, v: f64) -> Result<f64> {
        Self::nonneg("specific volume", v)?;
        let w = self.g_width();
        Ok(self.g_amp * bump_prime((v - self.v_lo) / w) / w)
    }

    pub fn h(&self, s: f64) -> Result<f64> {
        Self::nonneg("intensity", s)?;
        Ok(self.h_unchecked(s))
    }

    pub fn h_prime(&self, s: f64) -> Result<f64> {
        Self::nonneg("intensity", s)?;
        Ok(self.h_prime_unchecked(s))
    }

    #[inline]
    pub(crate) fn g_unchecked(&self, v: f64) -> f64 {
        let w = self.g_width();
        self.g_amp * w * self.bump_table.eval((v - self.v_lo) / w)
    }

    #[inline]
    pub(crate) fn g_prime_unchecked(&self, v: f64) -> f64 {
        self.g_amp * bump((v - self.v_lo) / self.g_width())
    }

    #[inline]
    pub(crate) fn h_unchecked(&self, s: f64) -> f64 {
        let tau = s / self.s_max;
        if tau <= 0.5 {
            self.h_amp * s
        } else {
            self.h_amp * self.s_max * (0.5 + self.cutoff_table.eval(tau))
        }
    }

    #[inline]
    pub(crate) fn h_prime_unchecked(&self, s: f64) -> f64 {
        self.h_amp * cutoff(s / self.s_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature, independent of the Gauss tables.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    #[test]
    fn g_vanishes_at_zero_and_saturates() {
        let c = CouplingSpec::default();
        assert_eq!(c.g(0.0).unwrap(), 0.0);
        assert_eq!(c.g_prime(0.3).unwrap(), 0.0);
        assert_eq!(c.g_prime(c.v_lo).unwrap(), 0.0);
        assert_eq!(c.g_prime(c.v_hi).unwrap(), 0.0);
        assert_eq!(c.g(c.v_hi + 1.0).unwrap(), c.g(c.v_hi).unwrap());
        let gp = |v: f64| c.g_prime(v).unwrap();
        let oracle = simpson(&gp, c.v_lo, c.v_hi, 1e-14);
        assert!((c.g(c.v_hi + 1.0).unwrap() - oracle).abs() < 1e-10);
        for v in [0.6, 0.9, 1.0, 1.3, 1.77] {
            let o = simpson(&gp, c.v_lo, v, 1e-14);
            assert!((c.g(v).unwrap() - o).abs() < 1e-10, "v={v}");
        }
    }

    #[test]
    fn h_vanishes_at_zero_and_saturates() {
        let c = CouplingSpec::default();
        assert_eq!(c.h(0.0).unwrap(), 0.0);
        assert_eq!(c.h(c.s_max).unwrap(), c.h(c.s_max + 3.0).unwrap());
        assert_eq!(c.h_prime(c.s_max).unwrap(), 0.0);
        let hp = |s: f64| c.h_prime(s).unwrap();
        for s in [0.5 * c.s_max, 0.6 * c.s_max, 0.8 * c.s_max, 0.95 * c.s_max] {
            let o = simpson(&hp, 0.0, s, 1e-14);
            assert!((c.h(s).unwrap() - o).abs() < 1e-10, "s={s}");
        }
        // Symmetry of the cutoff about 3/4 puts the saturated value at 3/4 s_max.
        assert!((c.h(10.0).unwrap() - 0.75 * c.s_max * c.h_amp).abs() < 1e-10);
    }

    #[test]
    fn negative_arguments_rejected() {
        let c = CouplingSpec::default();
        assert!(matches!(c.g(-0.1), Err(Error::NegativeArgument { .. })));
        assert!(matches!(c.h_prime(-1.0), Err(Error::NegativeArgument { .. })));
    }

    #[test]
    fn derivatives_consistent_with_finite_differences() {
        let c = CouplingSpec::default();
        let d = 1e-3;
        let mut errs = [0.0f64; 2];
        for (k, step) in [d, d / 2.0].iter().enumerate() {
            for v in [0.7, 1.0, 1.25, 1.6] {
                let fd = (-c.g(v + 2.0 * step).unwrap() + 8.0 * c.g(v + step).unwrap() - 8.0 * c.g(v - step).unwrap()
                    + c.g(v - 2.0 * step).unwrap())
                    / (12.0 * step);
                errs[k] = errs[k].max((fd - c.g_prime(v).unwrap()).abs());
                let fd2 = (c.g_prime(v + step).unwrap() - c.g_prime(v - step).unwrap()) / (2.0 * step);
                assert!((fd2 - c.g_second(v).unwrap()).abs() < 1e-4);
            }
        }
        assert!(errs[0] < 1e-8);
    }

    #[test]
    fn supports_hold_on_dense_scan() {
        let c = CouplingSpec::default();
        for i in 0..10_000 {
            let v = 3.0 * i as f64 / 10_000.0;
            let gp = c.g_prime(v).unwrap();
            if v <= c.v_lo || v >= c.v_hi {
                assert_eq!(gp, 0.0);
            }
            assert!(gp >= 0.0 && c.g(v).unwrap() >= 0.0);
            let s = 2.0 * c.s_max * i as f64 / 10_000.0;
            if s >= c.s_max {
                assert_eq!(c.h_prime(s).unwrap(), 0.0);
            }
            assert!(c.h(s).unwrap() >= 0.0);
        }
    }
}
