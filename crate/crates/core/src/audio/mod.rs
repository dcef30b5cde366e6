//! Three-level audio scrambling.
//!
//! The password yields two state keys. Encryption superimposes pseudo-noise
//! seeded by key 1 on the carrier, takes the orthonormal DCT, superimposes
//! noise seeded by key 2 on the coefficients, optionally passes the result
//! through an AWGN channel, and normalises it to unit peak. Decryption undoes
//! each step in reverse order.

mod awgn;
mod dct;

use std::fmt;

use thiserror::Error;

use crate::container::AudioTrack;
use crate::keystream::{pn_audio_sequence, KeystreamError};

pub use awgn::{awgn_channel, mean_power, Awgn};
pub use dct::{dct, idct};

/// Default pseudo-noise amplitude relative to full-scale PCM.
pub const DEFAULT_PN_AMPLITUDE: f64 = 0.5;
pub const PASSWORD_LEN: usize = 8;
const CAESAR_SHIFT: u32 = 4;
const PCM_SCALE: f64 = 32768.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PasswordRule {
    Length,
    PrintableAscii,
    Uppercase,
    Digit,
    Special,
}

impl fmt::Display for PasswordRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PasswordRule::Length => "must be exactly 8 characters",
            PasswordRule::PrintableAscii => "must contain only printable ASCII",
            PasswordRule::Uppercase => "needs at least one capital letter",
            PasswordRule::Digit => "needs at least one numeral",
            PasswordRule::Special => "needs at least one special character",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AudioError {
    #[error("password {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))]
    Password(Vec<PasswordRule>),
    #[error("signal is empty")]
    EmptySignal,
    #[error("signal has zero power")]
    ZeroPower,
    #[error("snr {0} dB is not finite")]
    BadSnr(f64),
    #[error("corrupt header: normalisation scale {0} must be positive and finite")]
    BadNormScale(f64),
    #[error(transparent)]
    Keystream(#[from] KeystreamError),
}

/// Checks the password policy; returns every unmet rule.
pub fn validate_password(s: &str) -> Result<(), Vec<PasswordRule>> {
    let mut broken = Vec::new();
    if s.chars().count() != PASSWORD_LEN {
        broken.push(PasswordRule::Length);
    }
    if !s.chars().all(|c| (' '..='~').contains(&c)) {
        broken.push(PasswordRule::PrintableAscii);
    }
    if !s.chars().any(|c| c.is_ascii_uppercase()) {
        broken.push(PasswordRule::Uppercase);
    }
    if !s.chars().any(|c| c.is_ascii_digit()) {
        broken.push(PasswordRule::Digit);
    }
    if !s.chars().any(|c| !c.is_ascii_alphanumeric()) {
        broken.push(PasswordRule::Special);
    }
    if broken.is_empty() {
        Ok(())
    } else {
        Err(broken)
    }
}

/// The two decimal-digit keys derived from a password.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateKeys {
    key1: String,
    key2: String,
}

impl StateKeys {
    /// Splits a shifted-digit string; for odd lengths key 1 gets the extra
    /// digit.
    pub fn from_digits(z: &str) -> Self {
        let split = z.len().div_ceil(2);
        Self { key1: z[..split].to_string(), key2: z[split..].to_string() }
    }

    pub fn key1(&self) -> &str {
        &self.key1
    }

    pub fn key2(&self) -> &str {
        &self.key2
    }

    pub fn seed1(&self) -> u64 {
        digits_mod_2_64(&self.key1)
    }

    pub fn seed2(&self) -> u64 {
        digits_mod_2_64(&self.key2)
    }
}

fn digits_mod_2_64(digits: &str) -> u64 {
    digits.bytes().fold(0u64, |acc, d| acc.wrapping_mul(10).wrapping_add((d - b'0') as u64))
}

/// Shift each ASCII code by 4, concatenate the decimal renderings, and split
/// the digit string in two; for odd lengths key 1 gets the extra digit.
pub fn derive_state_keys(password: &str) -> Result<StateKeys, AudioError> {
    validate_password(password).map_err(AudioError::Password)?;
    Ok(StateKeys::from_digits(&shifted_digits(password)))
}

fn shifted_digits(password: &str) -> String {
    password.chars().map(|c| (c as u32 + CAESAR_SHIFT).to_string()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncryptedAudio {
    pub samples: Vec<f64>,
    pub norm_scale: f64,
}

pub fn encrypt_audio(track: &AudioTrack, keys: &StateKeys, pn_amplitude: f64) -> Result<EncryptedAudio, AudioError> {
    encrypt_audio_over(track, keys, pn_amplitude, None)
}

/// Encrypts, optionally passing the level-3 signal through an AWGN channel
/// before normalisation.
pub fn encrypt_audio_over(
    track: &AudioTrack,
    keys: &StateKeys,
    pn_amplitude: f64,
    channel: Option<Awgn>,
) -> Result<EncryptedAudio, AudioError> {
    crate::keystream::check_amplitude(pn_amplitude)?;
    let n = track.samples.len();
    if n == 0 {
        return Ok(EncryptedAudio { samples: Vec::new(), norm_scale: 1.0 });
    }
    let level1 = pn_audio_sequence(keys.seed1(), n, pn_amplitude)?;
    let noisy: Vec<f64> = track.samples.iter().zip(&level1).map(|(&s, pn)| s as f64 / PCM_SCALE + pn).collect();
    let mut z = dct(&noisy)?;
    let level3 = pn_audio_sequence(keys.seed2(), n, pn_amplitude)?;
    for (c, pn) in z.iter_mut().zip(&level3) {
        *c += pn;
    }
    if let Some(ch) = channel {
        z = awgn_channel(&z, ch.snr_db, ch.noise_seed)?;
    }
    let peak = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let norm_scale = if peak > 0.0 { peak } else { 1.0 };
    for v in &mut z {
        *v /= norm_scale;
    }
    Ok(EncryptedAudio { samples: z, norm_scale })
}

pub fn decrypt_audio(
    encrypted: &EncryptedAudio,
    keys: &StateKeys,
    pn_amplitude: f64,
    sample_rate: u32,
) -> Result<AudioTrack, AudioError> {
    crate::keystream::check_amplitude(pn_amplitude)?;
    let scale = encrypted.norm_scale;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(AudioError::BadNormScale(scale));
    }
    let n = encrypted.samples.len();
    if n == 0 {
        return Ok(AudioTrack::new(Vec::new(), sample_rate));
    }
    let level3 = pn_audio_sequence(keys.seed2(), n, pn_amplitude)?;
    let coefficients: Vec<f64> = encrypted.samples.iter().zip(&level3).map(|(v, pn)| v * scale - pn).collect();
    let noisy = idct(&coefficients)?;
    let level1 = pn_audio_sequence(keys.seed1(), n, pn_amplitude)?;
    let samples = noisy.iter().zip(&level1).map(|(x, pn)| requantize(x - pn)).collect();
    Ok(AudioTrack::new(samples, sample_rate))
}

/// Nearest 16-bit PCM value, ties away from zero, saturating.
pub fn requantize(v: f64) -> i16 {
    (v * PCM_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16
}
