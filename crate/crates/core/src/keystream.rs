//! Pseudo-noise generation.
//!
//! A 64-bit linear congruential generator with Knuth's MMIX constants:
//! `state <- a*state + c (mod 2^64)`, and each step emits the most significant
//! byte of the new state. The recurrence has full period (c odd, a = 1 mod 4)
//! and is bit-exact on every platform.
//!
//! This generator is **not** cryptographically secure. It is a reproducible
//! stand-in for a pseudorandom generator: deterministic, balanced, fast.

use thiserror::Error;

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KeystreamError {
    #[error("pn amplitude must lie in (0, 1], got {0}")]
    BadAmplitude(f64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnGenerator {
    state: u64,
}

impl PnGenerator {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_byte(&mut self) -> u8 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        (self.state >> 56) as u8
    }

    /// Eight consecutive output bytes, big-endian.
    pub fn next_u64(&mut self) -> u64 {
        (0..8).fold(0u64, |acc, _| (acc << 8) | self.next_byte() as u64)
    }

    /// Uniform draw in `(0, 1]` with 53 bits of resolution.
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        for b in out {
            *b = self.next_byte();
        }
    }
}

impl Iterator for PnGenerator {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_byte())
    }
}

pub fn keystream_bytes(seed: u64, length: usize) -> Vec<u8> {
    PnGenerator::new(seed).take(length).collect()
}

/// XORs `data` with the keystream for `seed`. Applying it twice is the identity.
pub fn xor_apply(data: &[u8], seed: u64) -> Vec<u8> {
    let mut out = data.to_vec();
    xor_in_place(&mut out, seed);
    out
}

pub fn xor_in_place(data: &mut [u8], seed: u64) {
    for (b, k) in data.iter_mut().zip(PnGenerator::new(seed)) {
        *b ^= k;
    }
}

/// Additive audio noise: each sample is `amplitude * (u/2^15 - 1)` where `u`
/// is a big-endian 16-bit word of keystream, so values lie in
/// `[-amplitude, amplitude)` on a grid of `amplitude * 2^-15`.
pub fn pn_audio_sequence(seed: u64, length: usize, amplitude: f64) -> Result<Vec<f64>, KeystreamError> {
    check_amplitude(amplitude)?;
    let mut gen = PnGenerator::new(seed);
    Ok((0..length)
        .map(|_| {
            let hi = gen.next_byte() as u16;
            let lo = gen.next_byte() as u16;
            word_to_sample((hi << 8) | lo, amplitude)
        })
        .collect())
}

fn word_to_sample(u: u16, amplitude: f64) -> f64 {
    amplitude * ((u as f64 - 32768.0) / 32768.0)
}

pub fn check_amplitude(amplitude: f64) -> Result<(), KeystreamError> {
    if amplitude > 0.0 && amplitude <= 1.0 {
        Ok(())
    } else {
        Err(KeystreamError::BadAmplitude(amplitude))
    }
}

/// Keyed seed for the PRF-style construction: `key ^ rotl(r, 32)`.
pub fn mix(key: u64, r: u64) -> u64 {
    key ^ r.rotate_left(32)
}

/// `Enc(K, M) = (r, F_K(r) xor M)` with `F_K(r)` the keystream seeded by
/// `mix(K, r)`. The caller supplies the nonce `r`.
pub fn prf_encrypt(key: u64, message: &[u8], r: u64) -> (u64, Vec<u8>) {
    (r, xor_apply(message, mix(key, r)))
}

pub fn prf_decrypt(key: u64, (r, body): (u64, &[u8])) -> Vec<u8> {
    xor_apply(body, mix(key, r))
}
