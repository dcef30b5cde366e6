//! Orthonormal DCT-II and its inverse (DCT-III), computed through one
//! complex FFT of the same length with Makhoul's even/odd reordering.
//!
//! `X[k] = a(k) * sum_n x[n] cos(pi (2n+1) k / 2N)`, `a(0) = sqrt(1/N)`,
//! `a(k>0) = sqrt(2/N)`. Works for every `N >= 1`, odd lengths included.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::AudioError;

fn scale(k: usize, n: usize) -> f64 {
    if k == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

fn twiddle(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, -std::f64::consts::PI * k as f64 / (2.0 * n as f64))
}

pub fn dct(x: &[f64]) -> Result<Vec<f64>, AudioError> {
    let n = x.len();
    if n == 0 {
        return Err(AudioError::EmptySignal);
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for (m, pair) in x.chunks(2).enumerate() {
        v[m] = Complex64::new(pair[0], 0.0);
        if let Some(&odd) = pair.get(1) {
            v[n - 1 - m] = Complex64::new(odd, 0.0);
        }
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut v);
    Ok(v.iter().enumerate().map(|(k, vk)| scale(k, n) * (twiddle(k, n) * vk).re).collect())
}

pub fn idct(coefficients: &[f64]) -> Result<Vec<f64>, AudioError> {
    let n = coefficients.len();
    if n == 0 {
        return Err(AudioError::EmptySignal);
    }
    let c: Vec<f64> = coefficients.iter().enumerate().map(|(k, &xk)| xk / scale(k, n)).collect();
    let mut v: Vec<Complex64> = (0..n)
        .map(|k| {
            let mirror = if k == 0 { 0.0 } else { c[n - k] };
            twiddle(k, n).conj() * Complex64::new(c[k], -mirror)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut v);
    let inv_n = 1.0 / n as f64;
    let mut x = vec![0.0; n];
    for (m, pair) in x.chunks_mut(2).enumerate() {
        pair[0] = v[m].re * inv_n;
        if pair.len() == 2 {
            pair[1] = v[n - 1 - m].re * inv_n;
        }
    }
    Ok(x)
}
