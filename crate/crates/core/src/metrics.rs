//! Evaluation quantities: per-frame speed, encryption and decryption ratios,
//! and a measurable visual-degradation score (mean absolute Pearson
//! correlation and PSNR between plaintext planes and scaled cipher planes).

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::container::{CipherFrame, VideoAsset};
use crate::exec::Exec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("encrypted size must be positive")]
    ZeroEncryptedSize,
    #[error("decrypted size must be positive")]
    ZeroDecryptedSize,
    #[error("frame count must be at least one")]
    ZeroFrames,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// `100 * original / encrypted`.
pub fn encryption_ratio(original_bytes: f64, encrypted_bytes: f64) -> Result<f64, MetricsError> {
    if encrypted_bytes.is_nan() || encrypted_bytes <= 0.0 {
        return Err(MetricsError::ZeroEncryptedSize);
    }
    Ok(100.0 * original_bytes / encrypted_bytes)
}

/// `100 * original / decrypted`.
pub fn decryption_ratio(original_bytes: f64, decrypted_bytes: f64) -> Result<f64, MetricsError> {
    if decrypted_bytes.is_nan() || decrypted_bytes <= 0.0 {
        return Err(MetricsError::ZeroDecryptedSize);
    }
    Ok(100.0 * original_bytes / decrypted_bytes)
}

/// Total time divided by the number of frames.
pub fn per_frame_speed(total_seconds: f64, frame_count: usize) -> Result<f64, MetricsError> {
    if frame_count == 0 {
        return Err(MetricsError::ZeroFrames);
    }
    Ok(total_seconds / frame_count as f64)
}

/// Pearson correlation. When either side is constant the coefficient is
/// undefined; we report 1.0 if both are constant and 0.0 otherwise.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "pearson needs equal lengths");
    let n = a.len() as f64;
    if a.is_empty() {
        return 0.0;
    }
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    match (var_a > 0.0, var_b > 0.0) {
        (true, true) => cov / (var_a * var_b).sqrt(),
        (false, false) => 1.0,
        _ => 0.0,
    }
}

/// PSNR in dB against an 8-bit reference; `f64::INFINITY` when identical.
pub fn psnr(reference: &[u8], other: &[f64]) -> f64 {
    assert_eq!(reference.len(), other.len(), "psnr needs equal lengths");
    let mse =
        reference.iter().zip(other).map(|(&r, o)| (r as f64 - o).powi(2)).sum::<f64>() / reference.len().max(1) as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneDegradation {
    pub correlation: f64,
    pub psnr_db: f64,
}

pub fn plane_degradation(original: &[u8], scaled_cipher: &[f64]) -> PlaneDegradation {
    let as_f64: Vec<f64> = original.iter().map(|&v| v as f64).collect();
    PlaneDegradation { correlation: pearson(&as_f64, scaled_cipher), psnr_db: psnr(original, scaled_cipher) }
}

/// Maps a residue in `[0, n)` onto the 8-bit range: `value / n * 255`.
pub fn scale_cipher(plane: &[u32], modulus: u32) -> Vec<f64> {
    plane.iter().map(|&v| v as f64 / modulus as f64 * 255.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisualDegradation {
    pub mean_abs_correlation: f64,
    /// Infinite if any plane was reproduced exactly.
    pub mean_psnr_db: f64,
}

pub fn visual_degradation(
    original: &VideoAsset,
    cipher_frames: &[CipherFrame],
    modulus: u32,
    exec: Exec,
) -> Result<VisualDegradation, MetricsError> {
    if original.frames().len() != cipher_frames.len() {
        return Err(MetricsError::DimensionMismatch(format!(
            "{} original frames vs {} cipher frames",
            original.frames().len(),
            cipher_frames.len()
        )));
    }
    if cipher_frames.is_empty() {
        return Err(MetricsError::ZeroFrames);
    }
    let pixels = original.width() as usize * original.height() as usize;
    let per_frame = exec.try_map_indexed(original.frames(), |i, frame| {
        let cipher = &cipher_frames[i];
        frame
            .planes()
            .into_iter()
            .zip(cipher.planes())
            .map(|(plain, enc)| {
                if enc.len() != pixels {
                    return Err(MetricsError::DimensionMismatch(format!(
                        "frame {i}: cipher plane has {} values, expected {pixels}",
                        enc.len()
                    )));
                }
                Ok(plane_degradation(plain, &scale_cipher(enc, modulus)))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let all: Vec<PlaneDegradation> = per_frame.into_iter().flatten().collect();
    let count = all.len() as f64;
    Ok(VisualDegradation {
        mean_abs_correlation: all.iter().map(|p| p.correlation.abs()).sum::<f64>() / count,
        mean_psnr_db: all.iter().map(|p| p.psnr_db).sum::<f64>() / count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub frame_count: usize,
    pub original_bytes: u64,
    pub encrypted_bytes: u64,
    pub decrypted_bytes: u64,
    pub er_percent: f64,
    pub dr_percent: f64,
    pub vd_mean_abs_correlation: f64,
    /// Serialised as `null` when infinite.
    pub vd_psnr_db: f64,
    pub encrypt_seconds: Option<f64>,
    pub decrypt_seconds: Option<f64>,
    pub cs_seconds_per_frame: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Timings {
    pub encrypt_seconds: f64,
    pub decrypt_seconds: f64,
}

impl MetricsReport {
    pub fn new(
        sizes: [u64; 3],
        frame_count: usize,
        vd: VisualDegradation,
        timings: Option<Timings>,
    ) -> Result<Self, MetricsError> {
        let [original, encrypted, decrypted] = sizes;
        let cs = timings.map(|t| per_frame_speed(t.encrypt_seconds, frame_count)).transpose()?;
        Ok(Self {
            frame_count,
            original_bytes: original,
            encrypted_bytes: encrypted,
            decrypted_bytes: decrypted,
            er_percent: encryption_ratio(original as f64, encrypted as f64)?,
            dr_percent: decryption_ratio(original as f64, decrypted as f64)?,
            vd_mean_abs_correlation: vd.mean_abs_correlation,
            vd_psnr_db: vd.mean_psnr_db,
            encrypt_seconds: timings.map(|t| t.encrypt_seconds),
            decrypt_seconds: timings.map(|t| t.decrypt_seconds),
            cs_seconds_per_frame: cs,
        })
    }

    /// Deterministic `key = value` lines (everything except timings).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "frame_count = {}", self.frame_count);
        let _ = writeln!(s, "original_bytes = {}", self.original_bytes);
        let _ = writeln!(s, "encrypted_bytes = {}", self.encrypted_bytes);
        let _ = writeln!(s, "decrypted_bytes = {}", self.decrypted_bytes);
        let _ = writeln!(s, "er_percent = {:.1}", self.er_percent);
        let _ = writeln!(s, "dr_percent = {:.1}", self.dr_percent);
        let _ = writeln!(s, "vd_mean_abs_correlation = {:.4}", self.vd_mean_abs_correlation);
        if self.vd_psnr_db.is_finite() {
            let _ = writeln!(s, "vd_psnr_db = {:.2}", self.vd_psnr_db);
        } else {
            let _ = writeln!(s, "vd_psnr_db = inf");
        }
        s
    }

    /// Timing lines, kept apart from [`MetricsReport::to_text`] because they
    /// vary run to run.
    pub fn timing_text(&self) -> String {
        let mut s = String::new();
        if let (Some(e), Some(d), Some(cs)) = (self.encrypt_seconds, self.decrypt_seconds, self.cs_seconds_per_frame) {
            let _ = writeln!(s, "encrypt_seconds = {e:.3}");
            let _ = writeln!(s, "decrypt_seconds = {d:.3}");
            let _ = writeln!(s, "cs_seconds_per_frame = {cs:.4}");
        }
        s
    }
}
