//! `avcrypt` command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use avcrypt::audio::{self, Awgn, DEFAULT_PN_AMPLITUDE};
use avcrypt::container::{self, ContainerError, Mode};
use avcrypt::metrics::{self, MetricsError, MetricsReport, Timings};
use avcrypt::rsa::{self, RsaError};
use avcrypt::{decrypt_video, encrypt_video, fixture, DecryptOptions, EncryptOptions, Exec, VideoAsset, VideoError};
use clap::{Args, Parser, Subcommand, ValueEnum};

const PASSWORD_ENV: &str = "AVCRYPT_PASSWORD";

#[derive(Parser)]
#[command(name = "avcrypt", version, about = "Dual-layer RSA + pseudo-noise encryption for uncompressed AVI")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt an uncompressed AVI into an EVC1 volume.
    Encrypt(EncryptArgs),
    /// Decrypt an EVC1 volume back to AVI.
    Decrypt(DecryptArgs),
    /// Print the RSA key derived from a password.
    Keygen(KeygenArgs),
    /// Compare an original, an encrypted and a decrypted file.
    Metrics(MetricsArgs),
    /// Print the headers of an AVI or EVC1 file.
    Inspect { file: PathBuf },
    /// Write the synthetic test clip as an AVI.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct PasswordArg {
    /// Password (8 printable ASCII characters with an uppercase letter, a
    /// digit and a special character).
    #[arg(long, short, env = PASSWORD_ENV, hide_env_values = true)]
    password: String,
}

#[derive(Args)]
struct KeyArgs {
    /// Amplitude of the audio pseudo-noise; must match between encrypt and decrypt.
    #[arg(long, default_value_t = DEFAULT_PN_AMPLITUDE)]
    pn_amplitude: f64,
    /// Public exponent instead of the smallest one coprime with phi.
    #[arg(long = "e", value_name = "E")]
    exponent: Option<u64>,
    /// Process frames on one thread.
    #[arg(long)]
    sequential: bool,
}

impl KeyArgs {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dual,
    RsaOnly,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Dual => Mode::Dual,
            ModeArg::RsaOnly => Mode::RsaOnly,
        }
    }
}

#[derive(Args)]
struct EncryptArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    password: PasswordArg,
    #[arg(long, value_enum, default_value = "dual")]
    mode: ModeArg,
    /// Pass the keyed audio through an AWGN channel (needs --snr).
    #[arg(long, requires = "snr")]
    awgn: bool,
    /// Channel SNR in dB.
    #[arg(long, value_name = "DB", requires = "awgn")]
    snr: Option<f64>,
    /// Seed for the channel noise.
    #[arg(long, default_value_t = 0, requires = "awgn")]
    noise_seed: u64,
    #[command(flatten)]
    key: KeyArgs,
}

#[derive(Args)]
struct DecryptArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    password: PasswordArg,
    #[command(flatten)]
    key: KeyArgs,
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    password: PasswordArg,
    #[arg(long = "e", value_name = "E")]
    exponent: Option<u64>,
}

#[derive(Args)]
struct MetricsArgs {
    original: PathBuf,
    encrypted: PathBuf,
    decrypted: PathBuf,
    /// With a password the original is encrypted and decrypted again to
    /// measure timings; without one the timing fields are left out.
    #[arg(long, short, env = PASSWORD_ENV, hide_env_values = true)]
    password: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PN_AMPLITUDE)]
    pn_amplitude: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FixtureArgs {
    output: PathBuf,
    #[arg(long, default_value_t = 10)]
    frames: usize,
    #[arg(long, default_value_t = 64)]
    width: u32,
    #[arg(long, default_value_t = 64)]
    height: u32,
    #[arg(long, default_value_t = 1.0)]
    audio_seconds: f64,
    #[arg(long, default_value_t = 8000)]
    sample_rate: u32,
}

/// Either a bad request (exit 1) or a bad file (exit 2).
#[derive(Debug)]
enum Failure {
    Validation(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Data(m) => m,
        }
    }
}

impl From<VideoError> for Failure {
    fn from(e: VideoError) -> Self {
        match e {
            VideoError::Container(e) => e.into(),
            VideoError::CorruptInput { .. } | VideoError::FrameShape { .. } => Failure::Data(e.to_string()),
            VideoError::Audio(audio::AudioError::BadNormScale(_)) => Failure::Data(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<ContainerError> for Failure {
    fn from(e: ContainerError) -> Self {
        match e {
            ContainerError::InvalidAsset(_) => Failure::Validation(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<RsaError> for Failure {
    fn from(e: RsaError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        Failure::Data(e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))
}

fn in_file(path: &Path, e: impl Into<Failure>) -> Failure {
    match e.into() {
        Failure::Data(m) => Failure::Data(format!("{}: {m}", path.display())),
        v => v,
    }
}

fn load_avi(path: &Path) -> Result<VideoAsset, Failure> {
    container::parse_avi(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_volume(path: &Path) -> Result<avcrypt::CipherVolume, Failure> {
    container::parse_cipher_volume(&read(path)?).map_err(|e| in_file(path, e))
}

fn check_amplitude(a: f64) -> Result<(), Failure> {
    avcrypt::keystream::check_amplitude(a).map_err(|e| Failure::Validation(e.to_string()))
}

fn encrypt(args: EncryptArgs) -> Result<(), Failure> {
    check_amplitude(args.key.pn_amplitude)?;
    let asset = load_avi(&args.input)?;
    let opts = EncryptOptions {
        mode: args.mode.into(),
        pn_amplitude: args.key.pn_amplitude,
        awgn: args.snr.map(|snr_db| Awgn { snr_db, noise_seed: args.noise_seed }),
        exponent: args.key.exponent,
        exec: args.key.exec(),
    };
    let volume = encrypt_video(&asset, &args.password.password, &opts)?;
    write(&args.output, &container::write_cipher_volume(&volume)?)
}

fn decrypt(args: DecryptArgs) -> Result<(), Failure> {
    check_amplitude(args.key.pn_amplitude)?;
    let volume = load_volume(&args.input)?;
    let opts =
        DecryptOptions { pn_amplitude: args.key.pn_amplitude, exponent: args.key.exponent, exec: args.key.exec() };
    let asset = decrypt_video(&volume, &args.password.password, &opts).map_err(|e| in_file(&args.input, e))?;
    write(&args.output, &container::write_avi(&asset)?)
}

fn keygen(args: KeygenArgs) -> Result<String, Failure> {
    let key = rsa::keypair_from_password(&args.password.password, args.exponent)?;
    Ok(format!(
        "p = {}\nq = {}\nn = {}\nphi = {}\ne = {}\nd = {}\n",
        key.p(),
        key.q(),
        key.modulus(),
        key.phi(),
        key.public_exponent(),
        key.private_exponent()
    ))
}

fn retime(
    asset: &VideoAsset,
    volume: &avcrypt::CipherVolume,
    password: &str,
    pn_amplitude: f64,
) -> Result<Timings, Failure> {
    let opts = EncryptOptions { mode: volume.header.mode, pn_amplitude, ..Default::default() };
    let start = Instant::now();
    let encrypted = encrypt_video(asset, password, &opts)?;
    let encrypt_seconds = start.elapsed().as_secs_f64();
    let opts = DecryptOptions { pn_amplitude, ..Default::default() };
    let start = Instant::now();
    decrypt_video(&encrypted, password, &opts)?;
    Ok(Timings { encrypt_seconds, decrypt_seconds: start.elapsed().as_secs_f64() })
}

fn metrics_cmd(args: MetricsArgs) -> Result<(String, String), Failure> {
    check_amplitude(args.pn_amplitude)?;
    let original_bytes = read(&args.original)?;
    let encrypted_bytes = read(&args.encrypted)?;
    let decrypted_bytes = read(&args.decrypted)?;
    let original = container::parse_avi(&original_bytes).map_err(|e| in_file(&args.original, e))?;
    let volume = container::parse_cipher_volume(&encrypted_bytes).map_err(|e| in_file(&args.encrypted, e))?;
    container::parse_avi(&decrypted_bytes).map_err(|e| in_file(&args.decrypted, e))?;

    let vd = metrics::visual_degradation(&original, &volume.frames, volume.header.modulus, Exec::Parallel)?;
    let timings = args.password.as_deref().map(|p| retime(&original, &volume, p, args.pn_amplitude)).transpose()?;
    let sizes = [original_bytes.len() as u64, encrypted_bytes.len() as u64, decrypted_bytes.len() as u64];
    let report = MetricsReport::new(sizes, original.frames().len(), vd, timings)?;
    if args.json {
        let stable = MetricsReport {
            encrypt_seconds: None,
            decrypt_seconds: None,
            cs_seconds_per_frame: None,
            ..report.clone()
        };
        let timing = serde_json::json!({
            "encrypt_seconds": report.encrypt_seconds,
            "decrypt_seconds": report.decrypt_seconds,
            "cs_seconds_per_frame": report.cs_seconds_per_frame,
        });
        let out = serde_json::to_string_pretty(&stable).expect("report serialises") + "\n";
        let err = if timings.is_some() { format!("{timing}\n") } else { String::new() };
        Ok((out, err))
    } else {
        Ok((report.to_text(), report.timing_text()))
    }
}

fn inspect(path: &Path) -> Result<String, Failure> {
    let bytes = read(path)?;
    let mut s = String::new();
    if bytes.starts_with(b"RIFF") {
        let asset = container::parse_avi(&bytes).map_err(|e| in_file(path, e))?;
        let _ = writeln!(s, "format = avi");
        let _ = writeln!(s, "width = {}", asset.width());
        let _ = writeln!(s, "height = {}", asset.height());
        let _ = writeln!(s, "fps = {}", asset.fps());
        let _ = writeln!(s, "frame_count = {}", asset.frames().len());
        match asset.audio() {
            Some(a) => {
                let _ = writeln!(s, "sample_rate = {}", a.sample_rate);
                let _ = writeln!(s, "sample_count = {}", a.samples.len());
            }
            None => {
                let _ = writeln!(s, "audio = none");
            }
        }
    } else if bytes.starts_with(b"EVC1") {
        let v = container::parse_cipher_volume(&bytes).map_err(|e| in_file(path, e))?;
        let h = &v.header;
        let _ = writeln!(s, "format = evc1");
        let _ = writeln!(s, "mode = {}", h.mode);
        let _ = writeln!(s, "awgn = {}", h.awgn);
        let _ = writeln!(s, "width = {}", h.width);
        let _ = writeln!(s, "height = {}", h.height);
        let _ = writeln!(s, "fps = {}", h.fps);
        let _ = writeln!(s, "frame_count = {}", v.frame_count());
        let _ = writeln!(s, "modulus = {}", h.modulus);
        let _ = writeln!(s, "value_bytes = {}", h.value_width());
        let _ = writeln!(s, "sample_rate = {}", h.sample_rate);
        let _ = writeln!(s, "sample_count = {}", v.audio.len());
        let _ = writeln!(s, "norm_scale = {}", h.norm_scale);
    } else {
        return Err(Failure::Data(format!("{}: not an AVI (RIFF) or EVC1 file", path.display())));
    }
    Ok(s)
}

fn make_fixture(args: FixtureArgs) -> Result<(), Failure> {
    if args.frames == 0 || args.width == 0 || args.height == 0 {
        return Err(Failure::Validation("frames, width and height must be positive".into()));
    }
    if !(args.audio_seconds >= 0.0 && args.audio_seconds.is_finite()) || args.sample_rate == 0 {
        return Err(Failure::Validation("audio length must be finite and non-negative, sample rate positive".into()));
    }
    let asset = fixture::clip(args.frames, args.width, args.height, args.audio_seconds, args.sample_rate);
    write(&args.output, &container::write_avi(&asset)?)
}

fn run(cli: Cli) -> Result<(String, String), Failure> {
    let quiet = |r: Result<(), Failure>| r.map(|()| (String::new(), String::new()));
    match cli.command {
        Command::Encrypt(a) => quiet(encrypt(a)),
        Command::Decrypt(a) => quiet(decrypt(a)),
        Command::Keygen(a) => keygen(a).map(|s| (s, String::new())),
        Command::Metrics(a) => metrics_cmd(a),
        Command::Inspect { file } => inspect(&file).map(|s| (s, String::new())),
        Command::Fixture(a) => quiet(make_fixture(a)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((out, err)) => {
            print!("{out}");
            eprint!("{err}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
