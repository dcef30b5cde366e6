//! Synthetic clips for tests, benchmarks and demos.

use crate::container::{AudioTrack, Fps, FramePlanes, VideoAsset};

/// A sine tone as 16-bit PCM. `amplitude` is a fraction of full scale.
pub fn tone(seconds: f64, sample_rate: u32, frequency: f64, amplitude: f64) -> AudioTrack {
    let count = (seconds * sample_rate as f64).round() as usize;
    let samples = (0..count)
        .map(|i| {
            let t = i as f64 / sample_rate as f64;
            (amplitude * 32767.0 * (std::f64::consts::TAU * frequency * t).sin()).round() as i16
        })
        .collect();
    AudioTrack::new(samples, sample_rate)
}

/// One frame of the test scene: a black background, a fixed colour bar along
/// the top, and a shaded square that moves with `index`.
pub fn scene_frame(width: u32, height: u32, index: usize) -> FramePlanes {
    let mut frame = FramePlanes::solid(width, height, [0, 0, 0]);
    let bar = (height / 8).max(1);
    for y in 0..bar.min(height) {
        for x in 0..width {
            let band = (x * 4 / width.max(1)) as u8;
            frame.set_pixel(x, y, [60 * band + 30, 200 - 40 * band, 90]);
        }
    }
    let side = (width.min(height) / 4).max(1);
    let x0 = (index as u32 * 3) % width.saturating_sub(side).max(1);
    let y0 = (height / 2 + index as u32) % height.saturating_sub(side).max(1);
    for dy in 0..side {
        for dx in 0..side {
            let (x, y) = (x0 + dx, y0 + dy);
            if x < width && y < height {
                let shade = (dx * 255 / side) as u8;
                frame.set_pixel(x, y, [255, shade, 255 - shade]);
            }
        }
    }
    frame
}

/// A clip of `frames` scene frames at 10 fps with `audio_seconds` of a
/// half-scale 440 Hz tone at `sample_rate` (no audio when zero seconds).
pub fn clip(frames: usize, width: u32, height: u32, audio_seconds: f64, sample_rate: u32) -> VideoAsset {
    let frames = (0..frames).map(|i| scene_frame(width, height, i)).collect();
    let audio = (audio_seconds > 0.0).then(|| tone(audio_seconds, sample_rate, 440.0, 0.5));
    VideoAsset::new(Fps::new(10, 1), frames, audio).expect("fixture is well formed")
}

/// The standard desk-scale fixture: 10 frames of 64x64 with 1 s of 8 kHz audio.
pub fn desk_clip() -> VideoAsset {
    clip(10, 64, 64, 1.0, 8000)
}
