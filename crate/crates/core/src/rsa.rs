//! Textbook RSA over small moduli.
//!
//! Keys are derived from a user string: the ASCII sum `x` of the string seeds
//! two consecutive primes `p = next_prime(x)`, `q = next_prime(p)`. Every
//! value fits in `u64`; modular products go through `u128`.
//!
//! This is deliberately *not* secure RSA: no padding, tiny keys, variable-time
//! arithmetic. It exists to encrypt media one byte at a time.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsaError {
    #[error("no prime above {0} fits in 64 bits")]
    PrimeOverflow(u64),
    #[error("password is empty")]
    EmptyPassword,
    #[error("character at position {position} is not printable ASCII")]
    NonAscii { position: usize, found: char },
    #[error("p and q must be distinct (both are {0})")]
    EqualPrimes(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus p*q overflows 64 bits")]
    ModulusOverflow,
    #[error("exponent {e} is not coprime with phi = {phi}")]
    NotCoprime { e: u64, phi: u64 },
    #[error("exponent {e} must satisfy 1 < e < phi = {phi}")]
    ExponentOutOfRange { e: u64, phi: u64 },
    #[error("no encryption exponent exists for phi = {0}")]
    NoExponent(u64),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("value {value} is not below the modulus {modulus}")]
    ValueTooLarge { value: u64, modulus: u64 },
}

/// RSA key material. Construct with [`generate_keypair`]; the fields are
/// read-only so the invariants `n = pq`, `phi = (p-1)(q-1)` and
/// `e*d = 1 (mod phi)` always hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeyPair {
    p: u64,
    q: u64,
    n: u64,
    phi: u64,
    e: u64,
    d: u64,
}

impl KeyPair {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> u64 {
        self.n
    }
    pub fn phi(&self) -> u64 {
        self.phi
    }
    pub fn public_exponent(&self) -> u64 {
        self.e
    }
    pub fn private_exponent(&self) -> u64 {
        self.d
    }
}

impl fmt::Display for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} q={} n={} phi={} e={} d={}", self.p, self.q, self.n, self.phi, self.e, self.d)
    }
}

/// A ciphertext residue, always below the modulus of the key that made it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CipherValue(u64);

impl CipherValue {
    /// Wraps a raw residue, checking it against the key's modulus.
    pub fn new(value: u64, key: &KeyPair) -> Result<Self, RsaError> {
        if value >= key.n {
            return Err(RsaError::ValueTooLarge { value, modulus: key.n });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for CipherValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_unchecked(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut result = 1 % modulus;
    let mut base = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    result
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn mod_pow(base: u64, exp: u64, modulus: u64) -> Result<u64, RsaError> {
    if modulus < 2 {
        return Err(RsaError::BadModulus(modulus));
    }
    Ok(pow_mod_unchecked(base, exp, modulus))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Multiplicative inverse of `a` modulo `m`, or `None` when they share a factor.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m < 2 {
        return None;
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

// Deterministic for every 64-bit input with these witnesses.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Primality for the full `u64` range (deterministic Miller-Rabin).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &MR_WITNESSES {
        if n == w {
            return true;
        }
        if n.is_multiple_of(w) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &MR_WITNESSES {
        let mut x = pow_mod_unchecked(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime(x: u64) -> Result<u64, RsaError> {
    let mut candidate = x;
    loop {
        candidate = candidate.checked_add(1).ok_or(RsaError::PrimeOverflow(x))?;
        if is_prime(candidate) {
            return Ok(candidate);
        }
    }
}

/// Sum of the ASCII codes of `s`, rejecting anything outside 0x20..=0x7E.
pub fn ascii_sum(s: &str) -> Result<u64, RsaError> {
    if s.is_empty() {
        return Err(RsaError::EmptyPassword);
    }
    s.chars().enumerate().try_fold(0u64, |acc, (position, ch)| {
        if (' '..='~').contains(&ch) {
            Ok(acc + ch as u64)
        } else {
            Err(RsaError::NonAscii { position, found: ch })
        }
    })
}

/// The two consecutive primes immediately above the ASCII sum of `s`.
pub fn seed_primes_from_password(s: &str) -> Result<(u64, u64), RsaError> {
    let p = next_prime(ascii_sum(s)?)?;
    let q = next_prime(p)?;
    Ok((p, q))
}

/// Builds a key pair from two distinct primes. Without an explicit `e` the
/// smallest integer `>= 3` coprime with phi is used.
pub fn generate_keypair(p: u64, q: u64, e: Option<u64>) -> Result<KeyPair, RsaError> {
    if p == q {
        return Err(RsaError::EqualPrimes(p));
    }
    for x in [p, q] {
        if !is_prime(x) {
            return Err(RsaError::NotPrime(x));
        }
    }
    let n = p.checked_mul(q).ok_or(RsaError::ModulusOverflow)?;
    let phi = (p - 1) * (q - 1);
    let e = match e {
        Some(e) => {
            if e <= 1 || e >= phi {
                return Err(RsaError::ExponentOutOfRange { e, phi });
            }
            if gcd(e, phi) != 1 {
                return Err(RsaError::NotCoprime { e, phi });
            }
            e
        }
        None => (3..phi).find(|&e| gcd(e, phi) == 1).ok_or(RsaError::NoExponent(phi))?,
    };
    let d = mod_inverse(e, phi).ok_or(RsaError::NotCoprime { e, phi })?;
    Ok(KeyPair { p, q, n, phi, e, d })
}

/// Key pair for a password: consecutive primes above its ASCII sum.
pub fn keypair_from_password(password: &str, e: Option<u64>) -> Result<KeyPair, RsaError> {
    let (p, q) = seed_primes_from_password(password)?;
    generate_keypair(p, q, e)
}

pub fn encrypt_value(m: u64, key: &KeyPair) -> Result<CipherValue, RsaError> {
    if m >= key.n {
        return Err(RsaError::ValueTooLarge { value: m, modulus: key.n });
    }
    Ok(CipherValue(pow_mod_unchecked(m, key.e, key.n)))
}

pub fn decrypt_value(c: CipherValue, key: &KeyPair) -> Result<u64, RsaError> {
    if c.0 >= key.n {
        return Err(RsaError::ValueTooLarge { value: c.0, modulus: key.n });
    }
    Ok(pow_mod_unchecked(c.0, key.d, key.n))
}

/// Maps text to per-character ASCII codes, the "numeric form" used when
/// encrypting a message one character at a time.
pub fn text_to_codes(text: &str) -> Result<Vec<u64>, RsaError> {
    text.chars()
        .enumerate()
        .map(
            |(position, ch)| {
                if ch.is_ascii() {
                    Ok(ch as u64)
                } else {
                    Err(RsaError::NonAscii { position, found: ch })
                }
            },
        )
        .collect()
}

/// Renders codes as space-separated, zero-padded three-digit decimals.
pub fn format_codes(codes: &[u64]) -> String {
    codes.iter().map(|c| format!("{c:03}")).collect::<Vec<_>>().join(" ")
}

pub fn encrypt_text(text: &str, key: &KeyPair) -> Result<Vec<CipherValue>, RsaError> {
    text_to_codes(text)?.into_iter().map(|m| encrypt_value(m, key)).collect()
}

pub fn decrypt_text(cipher: &[CipherValue], key: &KeyPair) -> Result<String, RsaError> {
    cipher
        .iter()
        .map(|&c| {
            let m = decrypt_value(c, key)?;
            char::from_u32(m as u32)
                .filter(|ch| ch.is_ascii())
                .ok_or(RsaError::ValueTooLarge { value: m, modulus: 128 })
        })
        .collect()
}
