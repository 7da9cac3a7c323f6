//! Radix-2 complex FFT used by the periodic grid.
//!
//! Only power-of-two lengths are supported. The 2-D transform runs the 1-D
//! kernel over rows and then over columns of a row-major `n × n` buffer.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    log2n: u32,
    /// `exp(-2πi k / n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
    /// Conjugates of `twiddles`.
    inverse_twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 2, "FFT length must be a power of two");
        let log2n = n.trailing_zeros();
        let twiddles: Vec<Complex64> = (0..n / 2)
            .map(|k| {
                let ang = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(ang), libm::sin(ang))
            })
            .collect();
        let inverse_twiddles = twiddles.iter().map(|w| w.conj()).collect();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - log2n))
            .collect();
        Self {
            n,
            log2n,
            twiddles,
            inverse_twiddles,
            bitrev,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn table(&self, inverse: bool) -> &[Complex64] {
        if inverse {
            &self.inverse_twiddles
        } else {
            &self.twiddles
        }
    }

    /// Unnormalized in-place transform. `inverse` flips the sign of the exponent.
    pub fn process(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.n);
        for i in 0..self.n {
            let j = self.bitrev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let tw = self.table(inverse);
        // The first stage needs no multiplications.
        for pair in data.chunks_exact_mut(2) {
            let (a, b) = (pair[0], pair[1]);
            pair[0] = a + b;
            pair[1] = a - b;
        }
        let mut half = 2;
        for stage in 1..self.log2n {
            let stride = self.n >> (stage + 1);
            for block in data.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = *b * tw[k * stride];
                    *b = *a - t;
                    *a += t;
                }
            }
            half *= 2;
        }
    }

    /// Transforms every column of a row-major `n × n` buffer at once, so the
    /// butterflies run along contiguous rows.
    fn process_columns(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                let (a, b) = data.split_at_mut(j * n);
                a[i * n..i * n + n].swap_with_slice(&mut b[..n]);
            }
        }
        let tw = self.table(inverse);
        let mut half = 1;
        for stage in 0..self.log2n {
            let stride = n >> (stage + 1);
            for block in data.chunks_exact_mut(2 * half * n) {
                let (lo, hi) = block.split_at_mut(half * n);
                for k in 0..half {
                    let w = tw[k * stride];
                    let ra = &mut lo[k * n..k * n + n];
                    let rb = &mut hi[k * n..k * n + n];
                    if k == 0 {
                        for (a, b) in ra.iter_mut().zip(rb.iter_mut()) {
                            let t = *b;
                            *b = *a - t;
                            *a += t;
                        }
                    } else {
                        for (a, b) in ra.iter_mut().zip(rb.iter_mut()) {
                            let t = *b * w;
                            *b = *a - t;
                            *a += t;
                        }
                    }
                }
            }
            half *= 2;
        }
    }

    /// Unnormalized 2-D transform of a row-major `n × n` buffer.
    pub fn process_2d(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n);
        for row in data.chunks_exact_mut(n) {
            self.process(row, inverse);
        }
        self.process_columns(data, inverse);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(input: &[Complex64]) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        let ang = -2.0 * PI * (j * k) as f64 / n as f64;
                        x * Complex64::new(libm::cos(ang), libm::sin(ang))
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for &n in &[2usize, 4, 8, 32, 64] {
            let input: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new(libm::sin(j as f64 * 0.37) + 0.1 * j as f64, libm::cos(j as f64 * 1.3)))
                .collect();
            let mut fast = input.clone();
            FftPlan::new(n).process(&mut fast, false);
            let slow = naive_dft(&input);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-11 * n as f64, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let n = 16;
        let plan = FftPlan::new(n);
        let input: Vec<Complex64> = (0..n * n)
            .map(|j| Complex64::new(libm::sin(j as f64), libm::cos(0.5 * j as f64)))
            .collect();
        let mut data = input.clone();
        plan.process_2d(&mut data, false);
        plan.process_2d(&mut data, true);
        for (a, b) in data.iter().zip(&input) {
            assert!((a / (n * n) as f64 - b).norm() < 1e-13);
        }
    }
}
