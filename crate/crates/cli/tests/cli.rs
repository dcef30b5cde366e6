use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use avcrypt::container;

const PASSWORD: &str = "Pass@12!";

fn avcrypt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avcrypt")).args(args).env_remove("AVCRYPT_PASSWORD").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Self { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn fixture(&self, name: &str, extra: &[&str]) -> PathBuf {
        let path = self.path(name);
        let mut args = vec!["fixture", s(&path)];
        args.extend_from_slice(extra);
        let o = avcrypt(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        path
    }
}

#[test]
fn keygen_follows_the_seed_rule() {
    // 'a' + 'b' = 195; the next primes above are 197 and 199.
    let o = avcrypt(&["keygen", "--password", "ab"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("p = 197\n"), "{out}");
    assert!(out.contains("q = 199\n"), "{out}");
    assert!(out.contains("n = 39203\n"), "{out}");
    assert!(out.contains("phi = 38808\n"), "{out}");
    // 3 divides 38808 = 2^3 * 3^2 * 7^2 * 11, so e is 5.
    assert!(out.contains("e = 5\n"), "{out}");
    let d: u64 = out.lines().find_map(|l| l.strip_prefix("d = ")).unwrap().parse().unwrap();
    assert_eq!(5 * d % 38808, 1);
}

#[test]
fn keygen_reads_the_environment() {
    let o =
        Command::new(env!("CARGO_BIN_EXE_avcrypt")).args(["keygen"]).env("AVCRYPT_PASSWORD", "ab").output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("p = 197"));
}

#[test]
fn encrypt_decrypt_round_trip_is_bit_identical() {
    let ws = Workspace::new();
    let input = ws.fixture("in.avi", &["--frames", "4", "--width", "24", "--height", "16", "--audio-seconds", "0.5"]);
    for mode in ["dual", "rsa-only"] {
        let enc = ws.path(&format!("{mode}.evc"));
        let dec = ws.path(&format!("{mode}.avi"));
        let o = avcrypt(&["encrypt", s(&input), s(&enc), "--password", PASSWORD, "--mode", mode]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = avcrypt(&["decrypt", s(&enc), s(&dec), "--password", PASSWORD]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(std::fs::read(&dec).unwrap(), std::fs::read(&input).unwrap(), "{mode}");
        let volume = container::parse_cipher_volume(&std::fs::read(&enc).unwrap()).unwrap();
        assert_eq!(volume.header.mode.to_string(), mode);
    }
}

#[test]
fn outputs_are_deterministic() {
    let ws = Workspace::new();
    let input = ws.fixture("in.avi", &["--frames", "3", "--width", "8", "--height", "8", "--audio-seconds", "0.2"]);
    let (a, b) = (ws.path("a.evc"), ws.path("b.evc"));
    for out in [&a, &b] {
        let o = avcrypt(&["encrypt", s(&input), s(out), "-p", PASSWORD, "--awgn", "--snr", "30", "--noise-seed", "4"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let seq = ws.path("seq.evc");
    let o = avcrypt(&[
        "encrypt",
        s(&input),
        s(&seq),
        "-p",
        PASSWORD,
        "--awgn",
        "--snr",
        "30",
        "--noise-seed",
        "4",
        "--sequential",
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&seq).unwrap());
}

#[test]
fn metrics_reports_ratios_and_speed() {
    let ws = Workspace::new();
    let input = ws.fixture("in.avi", &["--frames", "90", "--width", "16", "--height", "16", "--audio-seconds", "1"]);
    let (enc, dec) = (ws.path("x.evc"), ws.path("x.avi"));
    assert!(avcrypt(&["encrypt", s(&input), s(&enc), "-p", PASSWORD]).status.success());
    assert!(avcrypt(&["decrypt", s(&enc), s(&dec), "-p", PASSWORD]).status.success());

    let o = avcrypt(&["metrics", s(&input), s(&enc), s(&dec), "-p", PASSWORD]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("frame_count = 90\n"), "{text}");
    assert!(text.contains("dr_percent = 100.0\n"), "{text}");
    assert!(text.contains("er_percent = "), "{text}");
    assert!(stderr(&o).contains("cs_seconds_per_frame = "));
    assert!(!text.contains("seconds"));

    let again = avcrypt(&["metrics", s(&input), s(&enc), s(&dec), "-p", PASSWORD]);
    assert_eq!(again.stdout, o.stdout);

    let o = avcrypt(&["metrics", s(&input), s(&enc), s(&dec), "--json", "-p", PASSWORD]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["frame_count"], 90);
    assert_eq!(json["dr_percent"], 100.0);
    let avi_len = std::fs::metadata(&input).unwrap().len() as f64;
    let evc_len = std::fs::metadata(&enc).unwrap().len() as f64;
    assert!((json["er_percent"].as_f64().unwrap() - 100.0 * avi_len / evc_len).abs() < 1e-9);
    let timing: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert!(timing["cs_seconds_per_frame"].as_f64().unwrap() >= 0.0);

    let o = avcrypt(&["metrics", s(&input), s(&enc), s(&dec)]);
    assert!(o.status.success());
    assert!(stderr(&o).is_empty());
}

#[test]
fn inspect_prints_headers() {
    let ws = Workspace::new();
    let input = ws.fixture("in.avi", &["--frames", "2", "--width", "4", "--height", "4", "--audio-seconds", "0"]);
    let o = avcrypt(&["inspect", s(&input)]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("format = avi") && text.contains("frame_count = 2") && text.contains("audio = none"),
        "{text}"
    );

    let enc = ws.path("x.evc");
    assert!(avcrypt(&["encrypt", s(&input), s(&enc), "-p", PASSWORD]).status.success());
    let text = stdout(&avcrypt(&["inspect", s(&enc)]));
    assert!(
        text.contains("format = evc1") && text.contains("modulus = 372091") && text.contains("value_bytes = 4"),
        "{text}"
    );
}

#[test]
fn invalid_password_is_a_validation_error() {
    let ws = Workspace::new();
    let input = ws.fixture("in.avi", &["--frames", "1", "--width", "4", "--height", "4"]);
    let secret = "hunter22";
    let o = avcrypt(&["encrypt", s(&input), s(&ws.path("x.evc")), "-p", secret]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("capital") && err.contains("special"), "{err}");
    assert!(!err.contains(secret));
    assert!(!ws.path("x.evc").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(avcrypt(&["encrypt", "--bogus"]).status.code(), Some(1));
    assert_eq!(avcrypt(&["frobnicate"]).status.code(), Some(1));
    // --awgn without --snr
    assert_eq!(avcrypt(&["encrypt", "a", "b", "-p", PASSWORD, "--awgn"]).status.code(), Some(1));
    assert_eq!(avcrypt(&["encrypt", "a", "b", "-p", PASSWORD, "--snr", "10"]).status.code(), Some(1));
    assert_eq!(avcrypt(&["encrypt", "a", "b"]).status.code(), Some(1));
    assert_eq!(avcrypt(&["--help"]).status.code(), Some(0));
    assert_eq!(avcrypt(&["--version"]).status.code(), Some(0));
}

#[test]
fn bad_files_exit_with_two() {
    let ws = Workspace::new();
    let missing = ws.path("missing.avi");
    let o = avcrypt(&["encrypt", s(&missing), s(&ws.path("x.evc")), "-p", PASSWORD]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.avi"));

    let junk = ws.path("junk.avi");
    std::fs::write(&junk, b"RIFF\x04\x00\x00\x00WAVE").unwrap();
    assert_eq!(avcrypt(&["encrypt", s(&junk), s(&ws.path("x.evc")), "-p", PASSWORD]).status.code(), Some(2));
    assert_eq!(avcrypt(&["inspect", s(&junk)]).status.code(), Some(2));
    std::fs::write(&junk, b"hello").unwrap();
    assert_eq!(avcrypt(&["inspect", s(&junk)]).status.code(), Some(2));
}

#[test]
fn smaller_wrong_modulus_is_reported_as_corrupt() {
    let ws = Workspace::new();
    let input = ws.fixture("in.avi", &["--frames", "1", "--width", "8", "--height", "8"]);
    let enc = ws.path("x.evc");
    assert!(avcrypt(&["encrypt", s(&input), s(&enc), "-p", PASSWORD]).status.success());
    let o = avcrypt(&["decrypt", s(&enc), s(&ws.path("y.avi")), "-p", "A0!!!!!!"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
