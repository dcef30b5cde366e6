//! Dual-layer media encryption.
//!
//! Video frames are split into R, G and B planes; each byte is optionally
//! XORed with a per-frame pseudo-noise keystream and then encrypted with
//! textbook RSA over a small password-derived modulus. Audio goes through a
//! pseudo-noise / DCT / pseudo-noise chain keyed by two state keys derived
//! from the same password. Encrypted media is stored in the lossless `EVC1`
//! container; plaintext media is uncompressed AVI.
//!
//! None of this is secure cryptography. The RSA keys are tiny and unpadded
//! and the keystream is a linear congruential generator.

pub mod audio;
pub mod container;
pub mod exec;
pub mod fixture;
pub mod keystream;
pub mod metrics;
pub mod rsa;
pub mod video;

pub use container::{AudioTrack, CipherFrame, CipherVolume, Fps, FramePlanes, Mode, VideoAsset};
pub use exec::Exec;
pub use video::{decrypt_video, encrypt_video, DecryptOptions, EncryptOptions, VideoError};
