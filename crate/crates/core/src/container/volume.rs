//! `EVC1`: lossless storage for encrypted media.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "EVC1"
//!      4     2  version (1)
//!      6     1  mode (0 = rsa-only, 1 = dual)
//!      7     1  awgn (0 / 1)
//!      8     4  width
//!     12     4  height
//!     16     4  fps numerator
//!     20     4  fps denominator
//!     24     4  frame count
//!     28     4  modulus n
//!     32     8  audio sample count
//!     40     4  sample rate (0 = no audio track)
//!     44     8  normalisation scale (f64)
//!     52        frames: R, G, B planes, row-major
//!               audio: f64 per sample
//! ```
//!
//! All fields are little-endian. Plane values are u16 when `n <= 65536` and
//! u32 otherwise, so every residue below `n` is representable.

use std::fmt;

use super::reader::Reader;
use super::{ContainerError, FourCc, Fps};

const MAGIC: FourCc = FourCc::new(b"EVC1");
const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 52;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// RSA on every byte; equal pixels stay equal.
    RsaOnly,
    /// Pseudo-noise XOR first, then RSA.
    Dual,
}

impl Mode {
    fn to_byte(self) -> u8 {
        match self {
            Mode::RsaOnly => 0,
            Mode::Dual => 1,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Mode::RsaOnly),
            1 => Some(Mode::Dual),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::RsaOnly => "rsa-only",
            Mode::Dual => "dual",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeHeader {
    pub mode: Mode,
    pub awgn: bool,
    pub width: u32,
    pub height: u32,
    pub fps: Fps,
    pub modulus: u32,
    /// Zero when the clip has no audio track.
    pub sample_rate: u32,
    pub norm_scale: f64,
}

impl VolumeHeader {
    /// Bytes per stored cipher value.
    pub fn value_width(&self) -> usize {
        if self.modulus <= 1 << 16 {
            2
        } else {
            4
        }
    }

    fn pixels(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherFrame {
    pub r: Vec<u32>,
    pub g: Vec<u32>,
    pub b: Vec<u32>,
}

impl CipherFrame {
    pub fn planes(&self) -> [&[u32]; 3] {
        [&self.r, &self.g, &self.b]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CipherVolume {
    pub header: VolumeHeader,
    pub frames: Vec<CipherFrame>,
    pub audio: Vec<f64>,
}

impl CipherVolume {
    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn has_audio(&self) -> bool {
        self.header.sample_rate != 0
    }

    fn validate(&self) -> Result<(), ContainerError> {
        let h = &self.header;
        if h.width == 0 || h.height == 0 {
            return Err(ContainerError::InvalidAsset("volume dimensions must be non-zero".into()));
        }
        if h.modulus < 2 {
            return Err(ContainerError::InvalidAsset(format!("modulus {} is too small", h.modulus)));
        }
        if self.frames.is_empty() {
            return Err(ContainerError::NoFrames);
        }
        if !self.has_audio() && !self.audio.is_empty() {
            return Err(ContainerError::InvalidAsset("audio samples without a sample rate".into()));
        }
        let pixels = h.pixels();
        for (fi, frame) in self.frames.iter().enumerate() {
            for plane in frame.planes() {
                if plane.len() != pixels {
                    return Err(ContainerError::InvalidAsset(format!(
                        "frame {fi} plane has {} values, expected {pixels}",
                        plane.len()
                    )));
                }
            }
            check_range(frame, fi, h.modulus)?;
        }
        Ok(())
    }
}

fn check_range(frame: &CipherFrame, fi: usize, modulus: u32) -> Result<(), ContainerError> {
    let pixels = frame.r.len();
    for (ci, plane) in frame.planes().into_iter().enumerate() {
        if let Some(i) = plane.iter().position(|&v| v >= modulus) {
            return Err(ContainerError::CipherOutOfRange {
                frame: fi,
                index: ci * pixels + i,
                value: plane[i],
                modulus,
            });
        }
    }
    Ok(())
}

pub fn write_cipher_volume(v: &CipherVolume) -> Result<Vec<u8>, ContainerError> {
    v.validate()?;
    let h = &v.header;
    let frame_count =
        u32::try_from(v.frames.len()).map_err(|_| ContainerError::InvalidAsset("too many frames".into()))?;
    let width = h.value_width();
    let mut out = Vec::with_capacity(HEADER_LEN + v.frames.len() * 3 * h.pixels() * width + v.audio.len() * 8);
    out.extend_from_slice(&MAGIC.0);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(h.mode.to_byte());
    out.push(h.awgn as u8);
    for field in [h.width, h.height, h.fps.num, h.fps.den, frame_count, h.modulus] {
        out.extend_from_slice(&field.to_le_bytes());
    }
    out.extend_from_slice(&(v.audio.len() as u64).to_le_bytes());
    out.extend_from_slice(&h.sample_rate.to_le_bytes());
    out.extend_from_slice(&h.norm_scale.to_le_bytes());
    debug_assert_eq!(out.len(), HEADER_LEN);
    for frame in &v.frames {
        for plane in frame.planes() {
            if width == 2 {
                out.extend(plane.iter().flat_map(|&x| (x as u16).to_le_bytes()));
            } else {
                out.extend(plane.iter().flat_map(|&x| x.to_le_bytes()));
            }
        }
    }
    out.extend(v.audio.iter().flat_map(|s| s.to_le_bytes()));
    Ok(out)
}

pub fn parse_cipher_volume(bytes: &[u8]) -> Result<CipherVolume, ContainerError> {
    let mut r = Reader::new(bytes, 0, MAGIC);
    if bytes.len() < HEADER_LEN {
        return Err(r.truncated(HEADER_LEN));
    }
    let magic = r.fourcc()?;
    if magic != MAGIC {
        return Err(ContainerError::BadMagic { offset: 0, expected: MAGIC, found: magic });
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(ContainerError::VersionMismatch(version));
    }
    let malformed = |offset: u64, reason: String| ContainerError::Malformed { offset, fourcc: MAGIC, reason };
    let mode_byte = r.u8()?;
    let mode = Mode::from_byte(mode_byte).ok_or_else(|| malformed(6, format!("unknown mode {mode_byte}")))?;
    let awgn = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(malformed(7, format!("awgn flag {other}"))),
    };
    let width = r.u32()?;
    let height = r.u32()?;
    let fps = Fps::new(r.u32()?, r.u32()?);
    let frame_count = r.u32()?;
    let modulus = r.u32()?;
    let sample_count = r.u64()?;
    let sample_rate = r.u32()?;
    let norm_scale = r.f64()?;
    if width == 0 || height == 0 {
        return Err(malformed(8, format!("frame size {width}x{height}")));
    }
    if frame_count == 0 {
        return Err(ContainerError::NoFrames);
    }
    if modulus < 2 {
        return Err(malformed(28, format!("modulus {modulus}")));
    }
    if sample_rate == 0 && sample_count != 0 {
        return Err(malformed(40, "audio samples without a sample rate".into()));
    }
    let header = VolumeHeader { mode, awgn, width, height, fps, modulus, sample_rate, norm_scale };

    let value_width = header.value_width() as u128;
    let plane_bytes = header.pixels() as u128 * value_width;
    let expected = HEADER_LEN as u128 + frame_count as u128 * 3 * plane_bytes + sample_count as u128 * 8;
    if expected != bytes.len() as u128 {
        return Err(ContainerError::LengthMismatch {
            expected: u64::try_from(expected).unwrap_or(u64::MAX),
            actual: bytes.len() as u64,
        });
    }

    let pixels = header.pixels();
    let mut frames = Vec::with_capacity(frame_count as usize);
    for fi in 0..frame_count as usize {
        let mut read_plane = || -> Result<Vec<u32>, ContainerError> {
            let raw = r.bytes(pixels * value_width as usize)?;
            Ok(if value_width == 2 {
                raw.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as u32).collect()
            } else {
                raw.chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect()
            })
        };
        let frame = CipherFrame { r: read_plane()?, g: read_plane()?, b: read_plane()? };
        check_range(&frame, fi, modulus)?;
        frames.push(frame);
    }
    let audio = (0..sample_count).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    Ok(CipherVolume { header, frames, audio })
}
