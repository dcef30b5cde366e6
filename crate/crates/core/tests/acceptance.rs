//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use avcrypt::audio::{self, Awgn, StateKeys};
use avcrypt::container::{self, CipherFrame, CipherVolume, Mode, VolumeHeader};
use avcrypt::metrics::{self, visual_degradation};
use avcrypt::rsa::{self, CipherValue, KeyPair};
use avcrypt::video::{self, encrypt_frame, VideoEncryptionContext};
use avcrypt::{fixture, AudioTrack, DecryptOptions, EncryptOptions, Exec, Fps, FramePlanes, VideoAsset};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn under(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

// ---------------------------------------------------------------- 1

const PLAIN: [u64; 11] = [114, 97, 118, 115, 117, 115, 104, 97, 109, 97, 110];
const CIPHER: [u64; 11] = [6369, 6208, 3903, 3077, 3040, 3077, 5756, 6208, 3926, 6208, 1330];

fn worked_example() -> Outcome {
    let start = Instant::now();
    let key = rsa::generate_keypair(73, 89, Some(113)).map_err(|e| e.to_string())?;
    let cipher: Vec<u64> = PLAIN
        .iter()
        .map(|&m| rsa::encrypt_value(m, &key).map(CipherValue::value))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let back: Vec<u64> = cipher
        .iter()
        .map(|&c| rsa::decrypt_value(CipherValue::new(c, &key)?, &key))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure((key.modulus(), key.phi(), key.private_exponent()) == (6497, 6336, 785), || format!("key {key}"))?;
    ensure(cipher == CIPHER, || format!("cipher {cipher:?}"))?;
    ensure(back == PLAIN, || format!("decrypted {back:?}"))?;
    under(elapsed, Duration::from_millis(1), "keygen + 11 values")?;
    Ok(format!("n=6497 phi=6336 d=785, 11/11 cipher values exact ({elapsed:?})"))
}

// ---------------------------------------------------------------- 2

fn example_key() -> KeyPair {
    rsa::generate_keypair(73, 89, Some(113)).expect("example key")
}

fn exhaustive_round_trip() -> Outcome {
    let key = example_key();
    let start = Instant::now();
    let mut bad = Vec::new();
    for m in 0..key.modulus() {
        let c = rsa::encrypt_value(m, &key).map_err(|e| e.to_string())?;
        if rsa::decrypt_value(c, &key).map_err(|e| e.to_string())? != m {
            bad.push(m);
        }
    }
    let elapsed = start.elapsed();
    ensure(bad.is_empty(), || format!("{} failures, first {:?}", bad.len(), &bad[..bad.len().min(5)]))?;
    under(elapsed, Duration::from_secs(1), "sweep")?;
    Ok(format!("all 6497 values round-trip ({elapsed:?})"))
}

// ---------------------------------------------------------------- 3

fn naive_pow(base: u64, exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    for _ in 0..exp {
        acc = acc * (base % modulus) % modulus;
    }
    acc
}

fn euclid_inverse(a: i64, m: i64) -> Option<i64> {
    fn ext(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (g, x, y) = ext(b, a % b);
            (g, y, x - (a / b) * y)
        }
    }
    let (g, x, _) = ext(a, m);
    (g == 1).then(|| x.rem_euclid(m))
}

fn trial_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..10_000 {
        let modulus = rng.random_range(2..=10_000u64);
        let base = rng.random_range(0..=10_000u64);
        let exp = rng.random_range(0..=10_000u64);
        let got = rsa::mod_pow(base, exp, modulus).map_err(|e| e.to_string())?;
        ensure(got == naive_pow(base, exp, modulus), || format!("mod_pow({base}, {exp}, {modulus}) = {got}"))?;
    }

    let phi = 6336u64;
    let mut valid = 0;
    for e in 1..=phi {
        let want = euclid_inverse(e as i64, phi as i64).map(|v| v as u64);
        let got = rsa::mod_inverse(e, phi);
        ensure(got == want, || format!("mod_inverse({e}, {phi}) = {got:?}, oracle {want:?}"))?;
        if let Some(d) = got {
            ensure(e * d % phi == 1, || format!("{e}*{d} mod {phi} != 1"))?;
            valid += 1;
        }
    }

    let limit = 100_000u64;
    let primes: Vec<u64> = (0..=limit + 100).filter(|&n| trial_prime(n)).collect();
    let mut idx = 0;
    for x in 0..=limit {
        while primes[idx] <= x {
            idx += 1;
        }
        let got = rsa::next_prime(x).map_err(|e| e.to_string())?;
        ensure(got == primes[idx], || format!("next_prime({x}) = {got}, expected {}", primes[idx]))?;
    }
    Ok(format!("10^4 mod_pow triples, {valid} inverses mod 6336, next_prime for x <= 10^5 all match"))
}

// ---------------------------------------------------------------- 4

fn table_arithmetic() -> Outcome {
    const KB: f64 = 1024.0;
    const MB: f64 = 1024.0 * 1024.0;
    let er = metrics::encryption_ratio(244.0 * KB, 1.54 * MB).map_err(|e| e.to_string())?;
    let dr = metrics::decryption_ratio(244.0 * KB, 677.0 * KB).map_err(|e| e.to_string())?;
    let cs1 = metrics::per_frame_speed(204.3, 90).map_err(|e| e.to_string())?;
    let cs2 = metrics::per_frame_speed(287.1, 90).map_err(|e| e.to_string())?;
    let er1 = format!("{er:.1}");
    ensure(er1 == "15.5", || format!("ER {er1}"))?;
    ensure(er1.parse::<f64>().unwrap().round() == 16.0, || format!("ER {er1} does not round to 16"))?;
    ensure(format!("{dr:.1}") == "36.0", || format!("DR {dr:.1}"))?;
    ensure(format!("{cs1:.2}") == "2.27", || format!("CS {cs1:.2}"))?;
    ensure(format!("{cs2:.2}") == "3.19", || format!("CS {cs2:.2}"))?;
    Ok(format!("ER {er1}% (~16%), DR {dr:.1}%, CS {cs1:.2} and {cs2:.2} s/frame"))
}

// ---------------------------------------------------------------- 5

const PASSWORD: &str = "Pass@12!";

fn pipeline_round_trip() -> Outcome {
    let asset = fixture::desk_clip();
    let start = Instant::now();
    for mode in [Mode::Dual, Mode::RsaOnly] {
        let opts = EncryptOptions { mode, ..EncryptOptions::default() };
        let volume = video::encrypt_video(&asset, PASSWORD, &opts).map_err(|e| e.to_string())?;
        let bytes = container::write_cipher_volume(&volume).map_err(|e| e.to_string())?;
        let parsed = container::parse_cipher_volume(&bytes).map_err(|e| e.to_string())?;
        let back = video::decrypt_video(&parsed, PASSWORD, &DecryptOptions::default()).map_err(|e| e.to_string())?;
        ensure(back.frames() == asset.frames(), || format!("{mode}: frames differ"))?;
        ensure(back.audio() == asset.audio(), || format!("{mode}: audio differs"))?;
        ensure(back.fps() == asset.fps(), || format!("{mode}: fps differs"))?;
    }
    let elapsed = start.elapsed();
    under(elapsed, Duration::from_secs(30), "both modes")?;
    Ok(format!("10x64x64 + 8000 samples bit-identical in dual and rsa-only ({elapsed:.2?})"))
}

// ---------------------------------------------------------------- 6

fn equality_pattern_kept(plain: &[u8], cipher: &[u32]) -> bool {
    let mut forward = [None::<u32>; 256];
    let mut seen = std::collections::HashMap::new();
    for (&p, &c) in plain.iter().zip(cipher) {
        match forward[p as usize] {
            Some(prev) if prev != c => return false,
            Some(_) => {}
            None => {
                if seen.insert(c, p).is_some() {
                    return false;
                }
                forward[p as usize] = Some(c);
            }
        }
    }
    true
}

fn visual_degradation_ordering() -> Outcome {
    let asset = fixture::desk_clip();
    let mut corr = Vec::new();
    for mode in [Mode::Dual, Mode::RsaOnly] {
        let opts = EncryptOptions { mode, ..EncryptOptions::default() };
        let volume = video::encrypt_video(&asset, PASSWORD, &opts).map_err(|e| e.to_string())?;
        let vd = visual_degradation(&asset, &volume.frames, volume.header.modulus, Exec::default())
            .map_err(|e| e.to_string())?;
        corr.push(vd.mean_abs_correlation);
    }
    let (dual, rsa_only) = (corr[0], corr[1]);
    ensure(dual < 0.1, || format!("dual mean |r| = {dual:.4}"))?;
    ensure(rsa_only > dual, || format!("rsa-only {rsa_only:.4} <= dual {dual:.4}"))?;

    let frame = fixture::scene_frame(64, 64, 0);
    let distinct: std::collections::HashSet<u8> = frame.r.iter().copied().collect();
    ensure(distinct.len() < frame.r.len(), || "frame has no repeated values".into())?;
    let ctx = VideoEncryptionContext::from_password(PASSWORD, Mode::RsaOnly, None).map_err(|e| e.to_string())?;
    let cipher = encrypt_frame(&frame, &ctx, 0);
    for (plain, enc) in frame.planes().into_iter().zip(cipher.planes()) {
        ensure(equality_pattern_kept(plain, enc), || "rsa-only broke the equality pattern".into())?;
    }
    Ok(format!("dual mean |r| {dual:.4} < 0.1, rsa-only {rsa_only:.4} > dual, equality pattern exact"))
}

// ---------------------------------------------------------------- 7

fn recovered_snr_db(original: &[i16], recovered: &[i16]) -> f64 {
    let signal: f64 = original.iter().map(|&s| (s as f64).powi(2)).sum();
    let error: f64 = original.iter().zip(recovered).map(|(&a, &b)| (a as f64 - b as f64).powi(2)).sum();
    10.0 * (signal / error).log10()
}

/// PN amplitude for the channel check. The noise is scaled to the power of
/// the keyed signal, which includes both PN layers, so the amplitude sets how
/// much of it lands on the carrier.
const AWGN_PN_AMPLITUDE: f64 = 0.25;

fn audio_numerics() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_inverse = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for n in 1..=4096usize {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let coefficients = audio::dct(&x).map_err(|e| e.to_string())?;
        let back = audio::idct(&coefficients).map_err(|e| e.to_string())?;
        let err = x.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst_inverse = worst_inverse.max(err);
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let ec: f64 = coefficients.iter().map(|v| v * v).sum();
        worst_parseval = worst_parseval.max((ex - ec).abs() / ex.max(f64::MIN_POSITIVE));
    }
    ensure(worst_inverse <= 1e-9, || format!("idct(dct(x)) error {worst_inverse:e}"))?;
    ensure(worst_parseval <= 1e-9, || format!("Parseval error {worst_parseval:e}"))?;

    let track = fixture::tone(1.0, 8000, 440.0, 0.5);
    let keys = audio::derive_state_keys(PASSWORD).map_err(|e| e.to_string())?;
    let channel = Awgn { snr_db: 40.0, noise_seed: 0 };
    let enc = audio::encrypt_audio_over(&track, &keys, AWGN_PN_AMPLITUDE, Some(channel)).map_err(|e| e.to_string())?;
    let dec = audio::decrypt_audio(&enc, &keys, AWGN_PN_AMPLITUDE, track.sample_rate).map_err(|e| e.to_string())?;
    let snr = recovered_snr_db(&track.samples, &dec.samples);
    ensure((snr - 40.0).abs() <= 3.0, || format!("recovered SNR {snr:.2} dB"))?;
    Ok(format!(
        "lengths 1..=4096: inverse {worst_inverse:.1e}, Parseval {worst_parseval:.1e}; \
         40 dB channel -> {snr:.2} dB recovered (pn amplitude {AWGN_PN_AMPLITUDE})"
    ))
}

// ---------------------------------------------------------------- 8

fn state_keys() -> Outcome {
    use avcrypt::audio::PasswordRule as R;
    let keys = audio::derive_state_keys(PASSWORD).map_err(|e| e.to_string())?;
    ensure(keys.key1() == "8410111911" && keys.key2() == "968535437", || format!("{} / {}", keys.key1(), keys.key2()))?;
    let even = StateKeys::from_digits("101102103104105106107108");
    ensure(even.key1() == "101102103104" && even.key2() == "105106107108", || {
        format!("24-digit split {} / {}", even.key1(), even.key2())
    })?;
    let valid_even = audio::derive_state_keys("AB12!@#$").map_err(|e| e.to_string())?;
    ensure(valid_even.key1().len() == 8 && valid_even.key2().len() == 8, || {
        format!("16-digit split {} / {}", valid_even.key1(), valid_even.key2())
    })?;
    ensure(audio::validate_password("Pass@12!").is_ok(), || "Pass@12! rejected".into())?;
    let weak = audio::validate_password("password");
    ensure(weak == Err(vec![R::Uppercase, R::Digit, R::Special]), || format!("password -> {weak:?}"))?;
    let long = audio::validate_password("Pass@1234");
    ensure(long == Err(vec![R::Length]), || format!("Pass@1234 -> {long:?}"))?;
    Ok("Pass@12! -> 8410111911 / 968535437, even splits halve, validation examples hold".into())
}

// ---------------------------------------------------------------- 9

fn random_asset(rng: &mut StdRng) -> VideoAsset {
    let (w, h) = (rng.random_range(1..=24u32), rng.random_range(1..=24u32));
    let frames = (0..rng.random_range(1..=4))
        .map(|_| {
            let mut plane = || (0..w * h).map(|_| rng.random::<u8>()).collect::<Vec<_>>();
            let (r, g, b) = (plane(), plane(), plane());
            FramePlanes::new(w, h, r, g, b).expect("valid frame")
        })
        .collect();
    let audio = rng.random_bool(0.7).then(|| {
        let n = rng.random_range(0..500);
        AudioTrack::new((0..n).map(|_| rng.random::<i16>()).collect(), rng.random_range(1000..=48_000))
    });
    let fps = Fps::new(rng.random_range(1..=60), rng.random_range(1..=4));
    VideoAsset::new(fps, frames, audio).expect("valid asset")
}

fn random_volume(rng: &mut StdRng) -> CipherVolume {
    let (w, h) = (rng.random_range(1..=16u32), rng.random_range(1..=16u32));
    let modulus =
        if rng.random_bool(0.5) { rng.random_range(511..=65_536u32) } else { rng.random_range(65_537..=u32::MAX) };
    let frames = (0..rng.random_range(1..=3))
        .map(|_| {
            let mut plane = || (0..w * h).map(|_| rng.random_range(0..modulus)).collect::<Vec<_>>();
            CipherFrame { r: plane(), g: plane(), b: plane() }
        })
        .collect();
    let has_audio = rng.random_bool(0.6);
    let audio = if has_audio {
        (0..rng.random_range(0..300)).map(|_| rng.random_range(-1.0..=1.0)).collect()
    } else {
        Vec::new()
    };
    CipherVolume {
        header: VolumeHeader {
            mode: if rng.random_bool(0.5) { Mode::Dual } else { Mode::RsaOnly },
            awgn: rng.random_bool(0.5),
            width: w,
            height: h,
            fps: Fps::new(rng.random_range(1..=60), rng.random_range(1..=4)),
            modulus,
            sample_rate: if has_audio { rng.random_range(1000..=48_000) } else { 0 },
            norm_scale: rng.random_range(0.01..100.0),
        },
        frames,
        audio,
    }
}

fn mutate_all<T>(
    rng: &mut StdRng,
    bytes: &[u8],
    count: usize,
    parse: impl Fn(&[u8]) -> Result<T, container::ContainerError>,
) -> Result<(usize, usize), String> {
    let mut errors = 0;
    let mut buf = bytes.to_vec();
    for i in 0..count {
        let pos = rng.random_range(0..buf.len());
        let original = buf[pos];
        buf[pos] = original ^ rng.random_range(1..=255u8);
        let result = catch_unwind(AssertUnwindSafe(|| parse(&buf)));
        buf[pos] = original;
        match result {
            Ok(Ok(_)) => {}
            Ok(Err(e)) => {
                errors += 1;
                ensure(!e.to_string().is_empty(), || format!("mutation {i}: empty error"))?;
            }
            Err(_) => return Err(format!("mutation {i} at byte {pos} panicked")),
        }
    }
    Ok((count, errors))
}

fn container_robustness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    for i in 0..100 {
        let asset = random_asset(&mut rng);
        let bytes = container::write_avi(&asset).map_err(|e| e.to_string())?;
        let parsed = container::parse_avi(&bytes).map_err(|e| format!("asset {i}: {e}"))?;
        ensure(parsed == asset, || format!("asset {i} changed"))?;
        let volume = random_volume(&mut rng);
        let bytes = container::write_cipher_volume(&volume).map_err(|e| e.to_string())?;
        let parsed = container::parse_cipher_volume(&bytes).map_err(|e| format!("volume {i}: {e}"))?;
        ensure(parsed == volume, || format!("volume {i} changed"))?;
    }

    let asset = fixture::clip(3, 16, 12, 0.1, 8000);
    let avi = container::write_avi(&asset).map_err(|e| e.to_string())?;
    let volume = video::encrypt_video(&asset, PASSWORD, &EncryptOptions::default()).map_err(|e| e.to_string())?;
    let evc = container::write_cipher_volume(&volume).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (n_avi, e_avi) = mutate_all(&mut rng, &avi, 5_000, container::parse_avi)?;
    let (n_evc, e_evc) = mutate_all(&mut rng, &evc, 5_000, container::parse_cipher_volume)?;
    let elapsed = start.elapsed();
    under(elapsed, Duration::from_secs(60), "mutation run")?;
    Ok(format!(
        "100 assets + 100 volumes identical; {} mutations without panic ({} errors, rest parsed as \
         payload changes) in {elapsed:.2?}",
        n_avi + n_evc,
        e_avi + e_evc
    ))
}

// ----------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("worked-example fidelity", worked_example),
        ("exhaustive round trip", exhaustive_round_trip),
        ("oracle equivalence", oracle_equivalence),
        ("table arithmetic", table_arithmetic),
        ("pipeline round trip at desk scale", pipeline_round_trip),
        ("visual-degradation ordering", visual_degradation_ordering),
        ("audio chain numerics", audio_numerics),
        ("state-key derivation", state_keys),
        ("container robustness", container_robustness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
