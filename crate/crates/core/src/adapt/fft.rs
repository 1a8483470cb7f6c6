//! Forward and inverse DFT. Power-of-two lengths use an in-place iterative
//! radix-2 FFT; other lengths fall back to the direct O(L²) sum.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The `L` bins of a block's DFT.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    bins: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn new(bins: Vec<Complex64>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::invalid("spectrum must have at least one bin"));
        }
        Ok(ComplexSpectrum { bins })
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }
}

/// `X(k) = Σₙ x(n)·e^{−j2πkn/L}`.
pub fn dft<T>(block: &[T]) -> Result<ComplexSpectrum>
where
    T: Copy + Into<Complex64>,
{
    if block.is_empty() {
        return Err(Error::invalid("DFT block length must be at least 1"));
    }
    let mut data: Vec<Complex64> = block.iter().map(|&v| v.into()).collect();
    transform(&mut data, false);
    Ok(ComplexSpectrum { bins: data })
}

/// `x(n) = (1/L)·Σₖ X(k)·e^{+j2πkn/L}`.
pub fn idft(spectrum: &ComplexSpectrum) -> Result<Vec<Complex64>> {
    if spectrum.bins.is_empty() {
        return Err(Error::invalid("inverse DFT needs at least one bin"));
    }
    let mut data = spectrum.bins.clone();
    transform(&mut data, true);
    let scale = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    Ok(data)
}

/// Unnormalized transform in place; `inverse` flips the exponent sign.
fn transform(data: &mut [Complex64], inverse: bool) {
    if data.len().is_power_of_two() {
        radix2(data, inverse);
    } else {
        let out = direct(data, inverse);
        data.copy_from_slice(&out);
    }
}

fn twiddle(k: usize, len: usize, inverse: bool) -> Complex64 {
    let sign = if inverse { 1.0 } else { -1.0 };
    let (s, c) = (sign * 2.0 * PI * k as f64 / len as f64).sin_cos();
    Complex64::new(c, s)
}

fn direct(data: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let len = data.len();
    (0..len)
        .map(|k| {
            data.iter()
                .enumerate()
                .map(|(n, v)| v * twiddle((k * n) % len, len, inverse))
                .sum()
        })
        .collect()
}

fn radix2(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex64> = (0..half).map(|k| twiddle(k, len, inverse)).collect();
        for start in (0..n).step_by(len) {
            for (k, w) in twiddles.iter().enumerate() {
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sum_oracle(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let l = x.len() as f64;
        (0..x.len())
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (n, v) in x.iter().enumerate() {
                    let ang = sign * 2.0 * PI * (k as f64) * (n as f64) / l;
                    acc += v * Complex64::new(ang.cos(), ang.sin());
                }
                acc
            })
            .collect()
    }

    fn random_block(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn impulse_and_dc() {
        let s = dft(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(s.bins().iter().all(|b| *b == Complex64::new(1.0, 0.0)));
        let s = dft(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let want = [4.0, 0.0, 0.0, 0.0];
        for (b, w) in s.bins().iter().zip(want) {
            assert!((b - Complex64::new(w, 0.0)).norm() < 1e-12);
        }
        assert!(dft::<f64>(&[]).is_err());
        assert!(ComplexSpectrum::new(vec![]).is_err());
    }

    #[test]
    fn matches_sum_oracle_pow2_and_odd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in [1, 2, 5, 8, 12, 16, 64] {
            let x = random_block(&mut rng, len);
            let got = dft(&x).unwrap();
            for (a, b) in got.bins().iter().zip(sum_oracle(&x, -1.0)) {
                assert!((a - b).norm() < 1e-10, "len {len}");
            }
        }
    }

    #[test]
    fn inverse_matches_sum_oracle_non_pow2() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bins = random_block(&mut rng, 5);
        let got = idft(&ComplexSpectrum::new(bins.clone()).unwrap()).unwrap();
        for (a, b) in got.iter().zip(sum_oracle(&bins, 1.0)) {
            assert!((a - b / 5.0).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_of_dc_spectrum() {
        let mut bins = vec![Complex64::new(0.0, 0.0); 8];
        bins[0] = Complex64::new(8.0, 0.0);
        let x = idft(&ComplexSpectrum::new(bins).unwrap()).unwrap();
        assert!(x.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn real_input_is_conjugate_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for len in [8usize, 7] {
            let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = dft(&x).unwrap();
            for k in 1..len {
                assert!((s.bins()[k] - s.bins()[len - k].conj()).norm() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(seed in 0u64..10_000, len in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..len).map(|_| rng.random_range(-5.0..5.0)).collect();
            let s = dft(&x).unwrap();
            let back = idft(&s).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a.re - b).abs() < 1e-10 && a.im.abs() < 1e-10);
            }
            let time: f64 = x.iter().map(|v| v * v).sum();
            let freq: f64 = s.bins().iter().map(|b| b.norm_sqr()).sum::<f64>() / len as f64;
            prop_assert!((time - freq).abs() <= 1e-9 * time.max(1e-300));
        }
    }
}
