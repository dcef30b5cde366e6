//! Media containers: the uncompressed AVI subset the pipeline reads and
//! writes, and the lossless `EVC1` volume that stores encrypted media.

mod avi;
mod reader;
mod volume;

use std::fmt;

use thiserror::Error;

pub use avi::{parse_avi, write_avi};
pub use volume::{parse_cipher_volume, write_cipher_volume, CipherFrame, CipherVolume, Mode, VolumeHeader, HEADER_LEN};

/// A RIFF four-character code.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FourCc(pub [u8; 4]);

impl FourCc {
    pub const fn new(code: &[u8; 4]) -> Self {
        Self(*code)
    }
}

impl fmt::Display for FourCc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            if b.is_ascii_graphic() || b == b' ' {
                write!(f, "{}", b as char)?;
            } else {
                write!(f, "\\x{b:02x}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FourCc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{self}'")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("bad magic at offset {offset}: expected {expected}, found {found}")]
    BadMagic { offset: u64, expected: FourCc, found: FourCc },
    #[error("truncated {fourcc} at offset {offset}: need {needed} bytes, {available} available")]
    Truncated { offset: u64, fourcc: FourCc, needed: u64, available: u64 },
    #[error("unsupported {what} in {fourcc} at offset {offset}")]
    Unsupported { offset: u64, fourcc: FourCc, what: String },
    #[error("malformed {fourcc} at offset {offset}: {reason}")]
    Malformed { offset: u64, fourcc: FourCc, reason: String },
    #[error("container holds no video frames")]
    NoFrames,
    #[error("invalid asset: {0}")]
    InvalidAsset(String),
    #[error("unsupported volume version {0}")]
    VersionMismatch(u16),
    #[error("volume length mismatch: header implies {expected} bytes, file has {actual}")]
    LengthMismatch { expected: u64, actual: u64 },
    #[error("cipher value {value} at frame {frame}, index {index} is not below modulus {modulus}")]
    CipherOutOfRange { frame: usize, index: usize, value: u32, modulus: u32 },
}

/// Frame rate as a rational `num / den` frames per second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Fps {
    pub num: u32,
    pub den: u32,
}

impl Fps {
    pub fn new(num: u32, den: u32) -> Self {
        Self { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// One decoded frame as three row-major, top-down byte planes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePlanes {
    width: u32,
    height: u32,
    pub r: Vec<u8>,
    pub g: Vec<u8>,
    pub b: Vec<u8>,
}

impl FramePlanes {
    pub fn new(width: u32, height: u32, r: Vec<u8>, g: Vec<u8>, b: Vec<u8>) -> Result<Self, ContainerError> {
        let len = width as usize * height as usize;
        if width == 0 || height == 0 {
            return Err(ContainerError::InvalidAsset("frame dimensions must be non-zero".into()));
        }
        if r.len() != len || g.len() != len || b.len() != len {
            return Err(ContainerError::InvalidAsset(format!(
                "plane lengths {}/{}/{} do not match {width}x{height}",
                r.len(),
                g.len(),
                b.len()
            )));
        }
        Ok(Self { width, height, r, g, b })
    }

    /// A frame filled with one colour.
    pub fn solid(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let len = width as usize * height as usize;
        Self { width, height, r: vec![rgb[0]; len], g: vec![rgb[1]; len], b: vec![rgb[2]; len] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn planes(&self) -> [&[u8]; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = (y * self.width + x) as usize;
        self.r[i] = rgb[0];
        self.g[i] = rgb[1];
        self.b[i] = rgb[2];
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y * self.width + x) as usize;
        [self.r[i], self.g[i], self.b[i]]
    }
}

/// Mono 16-bit PCM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioTrack {
    pub samples: Vec<i16>,
    pub sample_rate: u32,
}

impl AudioTrack {
    pub fn new(samples: Vec<i16>, sample_rate: u32) -> Self {
        Self { samples, sample_rate }
    }
}

/// A decoded clip: equally sized frames plus an optional audio track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoAsset {
    width: u32,
    height: u32,
    fps: Fps,
    frames: Vec<FramePlanes>,
    audio: Option<AudioTrack>,
}

impl VideoAsset {
    pub fn new(fps: Fps, frames: Vec<FramePlanes>, audio: Option<AudioTrack>) -> Result<Self, ContainerError> {
        let first = frames.first().ok_or(ContainerError::NoFrames)?;
        let (width, height) = (first.width, first.height);
        if let Some(i) = frames.iter().position(|f| f.width != width || f.height != height) {
            return Err(ContainerError::InvalidAsset(format!(
                "frame {i} is {}x{}, expected {width}x{height}",
                frames[i].width, frames[i].height
            )));
        }
        if fps.num == 0 || fps.den == 0 {
            return Err(ContainerError::InvalidAsset(format!("frame rate {fps} is degenerate")));
        }
        if let Some(track) = &audio {
            if track.sample_rate == 0 {
                return Err(ContainerError::InvalidAsset("audio sample rate is zero".into()));
            }
        }
        Ok(Self { width, height, fps, frames, audio })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn fps(&self) -> Fps {
        self.fps
    }

    pub fn frames(&self) -> &[FramePlanes] {
        &self.frames
    }

    pub fn audio(&self) -> Option<&AudioTrack> {
        self.audio.as_ref()
    }

    pub fn into_parts(self) -> (Fps, Vec<FramePlanes>, Option<AudioTrack>) {
        (self.fps, self.frames, self.audio)
    }
}
