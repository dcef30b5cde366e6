use crate::keystream::PnGenerator;

use super::AudioError;

/// Channel parameters for [`awgn_channel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Awgn {
    pub snr_db: f64,
    pub noise_seed: u64,
}

pub fn mean_power(signal: &[f64]) -> f64 {
    if signal.is_empty() {
        return 0.0;
    }
    signal.iter().map(|v| v * v).sum::<f64>() / signal.len() as f64
}

/// Adds white Gaussian noise with variance `P_signal / 10^(snr_db / 10)`.
/// Normals come from Box-Muller over uniforms drawn from the keystream
/// seeded with `noise_seed`, so the noise is reproducible.
pub fn awgn_channel(signal: &[f64], snr_db: f64, noise_seed: u64) -> Result<Vec<f64>, AudioError> {
    let power = mean_power(signal);
    if power <= 0.0 || !power.is_finite() {
        return Err(AudioError::ZeroPower);
    }
    if !snr_db.is_finite() {
        return Err(AudioError::BadSnr(snr_db));
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut gen = PnGenerator::new(noise_seed);
    let mut spare = None;
    Ok(signal
        .iter()
        .map(|&s| {
            let z = spare.take().unwrap_or_else(|| {
                let radius = (-2.0 * gen.next_unit().ln()).sqrt();
                let angle = std::f64::consts::TAU * gen.next_unit();
                spare = Some(radius * angle.sin());
                radius * angle.cos()
            });
            s + sigma * z
        })
        .collect())
}
