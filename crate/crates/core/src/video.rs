//! Frame encryption: optional pseudo-noise XOR (level 1) followed by RSA on
//! every byte (level 2), and the exact inverse.

use std::fmt;

use thiserror::Error;

use crate::audio::{self, AudioError, Awgn, EncryptedAudio, PasswordRule, DEFAULT_PN_AMPLITUDE};
use crate::container::{CipherFrame, CipherVolume, ContainerError, FramePlanes, Mode, VideoAsset, VolumeHeader};
use crate::exec::Exec;
use crate::keystream::{keystream_bytes, xor_in_place};
use crate::rsa::{self, KeyPair, RsaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Red,
    Green,
    Blue,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Red, Channel::Green, Channel::Blue];

    fn tag(self) -> u64 {
        match self {
            Channel::Red => 1,
            Channel::Green => 2,
            Channel::Blue => 3,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Red => "R",
            Channel::Green => "G",
            Channel::Blue => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VideoError {
    #[error(transparent)]
    Rsa(#[from] RsaError),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error("modulus {0} is too small: every byte value must be a valid plaintext (need n > 510)")]
    ModulusTooSmall(u64),
    #[error("modulus {0} does not fit in 32 bits")]
    ModulusTooLarge(u64),
    #[error("corrupt input: frame {frame}, channel {channel}, position {position}: value {value} is not below modulus {modulus}")]
    CorruptInput { frame: usize, channel: Channel, position: usize, value: u32, modulus: u64 },
    #[error("frame {frame} has {actual} values per plane, expected {expected}")]
    FrameShape { frame: usize, expected: usize, actual: usize },
}

impl From<Vec<PasswordRule>> for VideoError {
    fn from(rules: Vec<PasswordRule>) -> Self {
        VideoError::Audio(AudioError::Password(rules))
    }
}

/// Everything needed to encrypt or decrypt frames. Immutable once built.
#[derive(Debug, Clone)]
pub struct VideoEncryptionContext {
    key: KeyPair,
    pn_seed: u64,
    mode: Mode,
    forward: [u32; 256],
    /// `(residue, byte)` sorted by residue.
    inverse: Vec<(u32, u8)>,
}

impl VideoEncryptionContext {
    pub fn new(key: KeyPair, pn_seed: u64, mode: Mode) -> Result<Self, VideoError> {
        let n = key.modulus();
        if n <= 2 * 255 {
            return Err(VideoError::ModulusTooSmall(n));
        }
        if n > u32::MAX as u64 {
            return Err(VideoError::ModulusTooLarge(n));
        }
        let mut forward = [0u32; 256];
        for (m, slot) in forward.iter_mut().enumerate() {
            *slot = rsa::encrypt_value(m as u64, &key)?.value() as u32;
        }
        let mut inverse: Vec<(u32, u8)> = forward.iter().enumerate().map(|(m, &c)| (c, m as u8)).collect();
        inverse.sort_unstable();
        Ok(Self { key, pn_seed, mode, forward, inverse })
    }

    /// Keys from a password: RSA primes and the PN seed both come from the
    /// ASCII sum of the password.
    pub fn from_password(password: &str, mode: Mode, e: Option<u64>) -> Result<Self, VideoError> {
        let key = rsa::keypair_from_password(password, e)?;
        Self::new(key, pn_seed_for(password)?, mode)
    }

    pub fn key(&self) -> &KeyPair {
        &self.key
    }

    pub fn pn_seed(&self) -> u64 {
        self.pn_seed
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Keystream seed for one plane of one frame.
    pub fn plane_seed(&self, channel: Channel, frame_index: usize) -> u64 {
        self.pn_seed ^ (channel.tag() << 40) ^ frame_index as u64
    }

    fn decrypt_residue(&self, c: u32) -> u8 {
        match self.inverse.binary_search_by_key(&c, |&(r, _)| r) {
            Ok(i) => self.inverse[i].1,
            // Only reachable with the wrong key: keep the low byte.
            Err(_) => rsa::mod_pow(c as u64, self.key.private_exponent(), self.key.modulus()).unwrap_or(0) as u8,
        }
    }
}

/// First eight keystream bytes (little-endian) seeded by the ASCII sum.
pub fn pn_seed_for(password: &str) -> Result<u64, RsaError> {
    let x = rsa::ascii_sum(password)?;
    let bytes: [u8; 8] = keystream_bytes(x, 8).try_into().expect("eight bytes");
    Ok(u64::from_le_bytes(bytes))
}

pub fn encrypt_frame(frame: &FramePlanes, ctx: &VideoEncryptionContext, frame_index: usize) -> CipherFrame {
    let encrypt_plane = |plane: &[u8], channel: Channel| -> Vec<u32> {
        let mut bytes = plane.to_vec();
        if ctx.mode == Mode::Dual {
            xor_in_place(&mut bytes, ctx.plane_seed(channel, frame_index));
        }
        bytes.iter().map(|&b| ctx.forward[b as usize]).collect()
    };
    CipherFrame {
        r: encrypt_plane(&frame.r, Channel::Red),
        g: encrypt_plane(&frame.g, Channel::Green),
        b: encrypt_plane(&frame.b, Channel::Blue),
    }
}

pub fn decrypt_frame(
    cipher: &CipherFrame,
    ctx: &VideoEncryptionContext,
    frame_index: usize,
    width: u32,
    height: u32,
) -> Result<FramePlanes, VideoError> {
    let expected = width as usize * height as usize;
    let modulus = ctx.key.modulus();
    let decrypt_plane = |plane: &[u32], channel: Channel| -> Result<Vec<u8>, VideoError> {
        if plane.len() != expected {
            return Err(VideoError::FrameShape { frame: frame_index, expected, actual: plane.len() });
        }
        let mut bytes = plane
            .iter()
            .enumerate()
            .map(|(position, &c)| {
                if c as u64 >= modulus {
                    Err(VideoError::CorruptInput { frame: frame_index, channel, position, value: c, modulus })
                } else {
                    Ok(ctx.decrypt_residue(c))
                }
            })
            .collect::<Result<Vec<u8>, _>>()?;
        if ctx.mode == Mode::Dual {
            xor_in_place(&mut bytes, ctx.plane_seed(channel, frame_index));
        }
        Ok(bytes)
    };
    let r = decrypt_plane(&cipher.r, Channel::Red)?;
    let g = decrypt_plane(&cipher.g, Channel::Green)?;
    let b = decrypt_plane(&cipher.b, Channel::Blue)?;
    Ok(FramePlanes::new(width, height, r, g, b)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncryptOptions {
    pub mode: Mode,
    pub pn_amplitude: f64,
    pub awgn: Option<Awgn>,
    /// Overrides the default public exponent.
    pub exponent: Option<u64>,
    pub exec: Exec,
}

impl Default for EncryptOptions {
    fn default() -> Self {
        Self { mode: Mode::Dual, pn_amplitude: DEFAULT_PN_AMPLITUDE, awgn: None, exponent: None, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecryptOptions {
    pub pn_amplitude: f64,
    pub exponent: Option<u64>,
    pub exec: Exec,
}

impl Default for DecryptOptions {
    fn default() -> Self {
        Self { pn_amplitude: DEFAULT_PN_AMPLITUDE, exponent: None, exec: Exec::default() }
    }
}

/// Encrypts every frame and the audio track. There is no authentication: a
/// wrong password on decryption yields garbage, not an error.
pub fn encrypt_video(asset: &VideoAsset, password: &str, opts: &EncryptOptions) -> Result<CipherVolume, VideoError> {
    audio::validate_password(password)?;
    let ctx = VideoEncryptionContext::from_password(password, opts.mode, opts.exponent)?;
    let frames = opts.exec.map_indexed(asset.frames(), |i, frame| encrypt_frame(frame, &ctx, i));

    let (audio, sample_rate) = match asset.audio() {
        Some(track) => {
            let keys = audio::derive_state_keys(password)?;
            let channel = opts.awgn.filter(|_| !track.samples.is_empty());
            (audio::encrypt_audio_over(track, &keys, opts.pn_amplitude, channel)?, track.sample_rate)
        }
        None => (EncryptedAudio { samples: Vec::new(), norm_scale: 1.0 }, 0),
    };

    Ok(CipherVolume {
        header: VolumeHeader {
            mode: opts.mode,
            awgn: opts.awgn.is_some(),
            width: asset.width(),
            height: asset.height(),
            fps: asset.fps(),
            modulus: ctx.key().modulus() as u32,
            sample_rate,
            norm_scale: audio.norm_scale,
        },
        frames,
        audio: audio.samples,
    })
}

pub fn decrypt_video(volume: &CipherVolume, password: &str, opts: &DecryptOptions) -> Result<VideoAsset, VideoError> {
    audio::validate_password(password)?;
    let h = &volume.header;
    let ctx = VideoEncryptionContext::from_password(password, h.mode, opts.exponent)?;
    let frames = opts.exec.try_map_indexed(&volume.frames, |i, c| decrypt_frame(c, &ctx, i, h.width, h.height))?;
    let audio = if volume.has_audio() {
        let keys = audio::derive_state_keys(password)?;
        let encrypted = EncryptedAudio { samples: volume.audio.clone(), norm_scale: h.norm_scale };
        Some(audio::decrypt_audio(&encrypted, &keys, opts.pn_amplitude, h.sample_rate)?)
    } else {
        None
    };
    Ok(VideoAsset::new(h.fps, frames, audio)?)
}
