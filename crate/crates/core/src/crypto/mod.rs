//! Signature suites over P-256, key handling, nonce management and marker
//! pattern hashing.
//!
//! Two suites are registered: EC-Schnorr (suite 0x01, the preferred scheme)
//! and ECDSA (suite 0x02). Both use SHA-256 and emit fixed-width 64-byte
//! signatures, keeping every signed ticket well inside the 131-byte field the
//! payload reserves. Schemes that cannot meet the size or strength floor
//! (RSA, short curves, weak hashes) are representable only as registry
//! rejections, never as working suites.

pub mod ecdsa;
pub mod schnorr;

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

use crate::arith::{U256, ORDER};
use crate::codec::MarkerPattern;
use crate::curve::{self, AffinePoint};

pub const SUITE_EC_SCHNORR: u8 = 0x01;
pub const SUITE_ECDSA: u8 = 0x02;

/// Both registered suites emit fixed-width 64-byte signatures.
pub const SIGNATURE_LEN: usize = 64;

/// Largest signature the payload's signature field can carry.
pub const MAX_ENCODABLE_SIGNATURE: usize = 131;

/// Strength floor for registered suites.
pub const MIN_KEY_BITS: u16 = 224;
pub const MIN_HASH_BITS: u16 = 224;

/// Upper bound on nonce redraws before a signing attempt gives up.
pub(crate) const MAX_NONCE_DRAWS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CryptoError {
    UnknownSuite(u8),
    WrongSuite { expected: u8, got: u8 },
    NonceFailure,
    RangeError { value: usize, min: usize, max: usize },
    InvalidPrivateKey,
    InvalidPublicKey,
}

impl fmt::Display for CryptoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CryptoError::UnknownSuite(id) => write!(f, "unknown crypto suite 0x{id:02x}"),
            CryptoError::WrongSuite { expected, got } => {
                write!(f, "operation requires suite 0x{expected:02x}, key is 0x{got:02x}")
            }
            CryptoError::NonceFailure => write!(f, "nonce source exhausted"),
            CryptoError::RangeError { value, min, max } => {
                write!(f, "value {value} outside range {min}..={max}")
            }
            CryptoError::InvalidPrivateKey => write!(f, "private scalar outside [1, q-1]"),
            CryptoError::InvalidPublicKey => write!(f, "public key not a valid curve point"),
        }
    }
}

impl core::error::Error for CryptoError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureAlgorithm {
    EcSchnorr,
    Ecdsa,
}

/// A registered signature suite: algorithm, curve/hash strength and the
/// fixed signature encoding size.
#[derive(Debug, Clone, Copy)]
pub struct CryptoSuite {
    pub suite_id: u8,
    pub name: &'static str,
    pub algorithm: SignatureAlgorithm,
    pub key_bits: u16,
    pub hash_bits: u16,
    pub signature_len: usize,
}

/// Why a proposed suite cannot be registered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteRejection {
    KeyTooShort { bits: u16 },
    HashTooShort { bits: u16 },
    SignatureTooLarge { len: usize },
}

impl fmt::Display for SuiteRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteRejection::KeyTooShort { bits } => {
                write!(f, "key length {bits} bits below the {MIN_KEY_BITS}-bit floor")
            }
            SuiteRejection::HashTooShort { bits } => {
                write!(f, "hash output {bits} bits below the {MIN_HASH_BITS}-bit floor")
            }
            SuiteRejection::SignatureTooLarge { len } => {
                write!(
                    f,
                    "signature of {len} bytes does not fit the {MAX_ENCODABLE_SIGNATURE}-byte field"
                )
            }
        }
    }
}

impl CryptoSuite {
    /// The selection rule every registered suite must satisfy: at least
    /// 224-bit keys and hash output, and a signature that fits the payload.
    pub fn check(&self) -> Result<(), SuiteRejection> {
        if self.key_bits < MIN_KEY_BITS {
            return Err(SuiteRejection::KeyTooShort { bits: self.key_bits });
        }
        if self.hash_bits < MIN_HASH_BITS {
            return Err(SuiteRejection::HashTooShort { bits: self.hash_bits });
        }
        if self.signature_len > MAX_ENCODABLE_SIGNATURE {
            return Err(SuiteRejection::SignatureTooLarge {
                len: self.signature_len,
            });
        }
        Ok(())
    }
}

pub const SUITES: [CryptoSuite; 2] = [
    CryptoSuite {
        suite_id: SUITE_EC_SCHNORR,
        name: "ec-schnorr-p256-sha256",
        algorithm: SignatureAlgorithm::EcSchnorr,
        key_bits: 256,
        hash_bits: 256,
        signature_len: SIGNATURE_LEN,
    },
    CryptoSuite {
        suite_id: SUITE_ECDSA,
        name: "ecdsa-p256-sha256",
        algorithm: SignatureAlgorithm::Ecdsa,
        key_bits: 256,
        hash_bits: 256,
        signature_len: SIGNATURE_LEN,
    },
];

pub fn suite_by_id(suite_id: u8) -> Option<&'static CryptoSuite> {
    SUITES.iter().find(|s| s.suite_id == suite_id)
}

/// Signing key: a scalar in [1, q-1] tagged with its suite.
#[derive(Clone, PartialEq, Eq)]
pub struct PrivateKey {
    suite_id: u8,
    scalar: U256,
}

impl fmt::Debug for PrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrivateKey(suite=0x{:02x}, <redacted>)", self.suite_id)
    }
}

impl PrivateKey {
    pub fn from_be_bytes(suite_id: u8, bytes: &[u8; 32]) -> Result<Self, CryptoError> {
        suite_by_id(suite_id).ok_or(CryptoError::UnknownSuite(suite_id))?;
        let scalar = U256::from_be_bytes(bytes);
        if scalar.is_zero() || scalar >= curve::group_order() {
            return Err(CryptoError::InvalidPrivateKey);
        }
        Ok(PrivateKey { suite_id, scalar })
    }

    pub fn to_be_bytes(&self) -> [u8; 32] {
        self.scalar.to_be_bytes()
    }

    pub fn suite_id(&self) -> u8 {
        self.suite_id
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey {
            suite_id: self.suite_id,
            point: curve::base_mul(self.scalar),
        }
    }

    pub(crate) fn scalar(&self) -> U256 {
        self.scalar
    }
}

/// Verification key: an on-curve, non-identity point tagged with its suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublicKey {
    suite_id: u8,
    point: AffinePoint,
}

impl PublicKey {
    /// Decode an uncompressed x||y encoding; range and on-curve checked.
    pub fn from_xy_bytes(suite_id: u8, bytes: &[u8; 64]) -> Result<Self, CryptoError> {
        suite_by_id(suite_id).ok_or(CryptoError::UnknownSuite(suite_id))?;
        let point =
            AffinePoint::from_xy_bytes(bytes).ok_or(CryptoError::InvalidPublicKey)?;
        Ok(PublicKey { suite_id, point })
    }

    pub fn to_xy_bytes(&self) -> [u8; 64] {
        // a constructed key is never the identity
        self.point.to_xy_bytes().expect("public key is a real point")
    }

    pub fn suite_id(&self) -> u8 {
        self.suite_id
    }

    /// Same point under a different suite tag. Key-list documents carry bare
    /// points; the suite that interprets them comes from the ticket metadata.
    pub fn with_suite(&self, suite_id: u8) -> Result<Self, CryptoError> {
        suite_by_id(suite_id).ok_or(CryptoError::UnknownSuite(suite_id))?;
        Ok(PublicKey {
            suite_id,
            point: self.point,
        })
    }

    pub(crate) fn point(&self) -> AffinePoint {
        self.point
    }
}

enum NonceMode {
    Random(Box<ChaCha20Rng>),
    Derived { seed: u64, counter: u64 },
    Fixed { values: Vec<U256>, next: usize },
}

/// Where signing nonces and generated key scalars come from.
///
/// `random_from_entropy` wraps a ChaCha20 stream and is the production mode;
/// seed it from operating-system entropy. `deterministic` derives nonces as
/// SHA-256(seed || private scalar || message digest || counter) reduced into
/// [1, q-1], so distinct messages under one key can never share a nonce.
/// `fixed` replays a given nonce sequence and exists for test vectors.
pub struct NonceSource {
    mode: NonceMode,
}

impl NonceSource {
    pub fn random_from_entropy(entropy: [u8; 32]) -> Self {
        NonceSource {
            mode: NonceMode::Random(Box::new(ChaCha20Rng::from_seed(entropy))),
        }
    }

    pub fn deterministic(seed: u64) -> Self {
        NonceSource {
            mode: NonceMode::Derived { seed, counter: 0 },
        }
    }

    pub fn fixed<I: IntoIterator<Item = [u8; 32]>>(values: I) -> Self {
        NonceSource {
            mode: NonceMode::Fixed {
                values: values.into_iter().map(|b| U256::from_be_bytes(&b)).collect(),
                next: 0,
            },
        }
    }

    /// Draw a value in [1, q-1]. `scalar` and `digest` feed the derivation in
    /// deterministic mode and are ignored in random mode.
    pub(crate) fn draw(&mut self, scalar: U256, digest: &[u8; 32]) -> Result<U256, CryptoError> {
        let q = curve::group_order();
        match &mut self.mode {
            NonceMode::Random(rng) => loop {
                let mut buf = [0u8; 32];
                rng.fill_bytes(&mut buf);
                let v = U256::from_be_bytes(&buf);
                if !v.is_zero() && v < q {
                    return Ok(v);
                }
            },
            NonceMode::Derived { seed, counter } => {
                for _ in 0..MAX_NONCE_DRAWS {
                    let mut h = Sha256::new();
                    h.update(seed.to_be_bytes());
                    h.update(scalar.to_be_bytes());
                    h.update(digest);
                    h.update(counter.to_be_bytes());
                    *counter = counter.wrapping_add(1);
                    let v = ORDER.reduce_once(U256::from_be_bytes(&h.finalize().into()));
                    if !v.is_zero() {
                        return Ok(v);
                    }
                }
                Err(CryptoError::NonceFailure)
            }
            NonceMode::Fixed { values, next } => {
                let v = *values.get(*next).ok_or(CryptoError::NonceFailure)?;
                *next += 1;
                if v.is_zero() || v >= q {
                    return Err(CryptoError::NonceFailure);
                }
                Ok(v)
            }
        }
    }
}

const KEYGEN_DOMAIN: &[u8] = b"keygen.v1";

/// Generate a keypair for a registered suite; the scalar is drawn uniformly
/// from [1, q-1] and the public point is scalar * G.
pub fn keypair_generate(
    suite_id: u8,
    nonce: &mut NonceSource,
) -> Result<(PrivateKey, PublicKey), CryptoError> {
    suite_by_id(suite_id).ok_or(CryptoError::UnknownSuite(suite_id))?;
    let digest: [u8; 32] = Sha256::digest(KEYGEN_DOMAIN).into();
    let scalar = nonce.draw(U256::ZERO, &digest)?;
    let key = PrivateKey { suite_id, scalar };
    let public = key.public_key();
    Ok((key, public))
}

/// Sign with whatever algorithm the key's suite selects.
pub fn suite_sign(
    key: &PrivateKey,
    message: &[u8],
    nonce: &mut NonceSource,
) -> Result<[u8; SIGNATURE_LEN], CryptoError> {
    let suite = suite_by_id(key.suite_id).ok_or(CryptoError::UnknownSuite(key.suite_id))?;
    match suite.algorithm {
        SignatureAlgorithm::EcSchnorr => schnorr::sign(key, message, nonce),
        SignatureAlgorithm::Ecdsa => ecdsa::sign(key, message, nonce),
    }
}

/// Verify with whatever algorithm the key's suite selects. Any malformed
/// input is a rejection, never an error.
pub fn suite_verify(key: &PublicKey, message: &[u8], signature: &[u8]) -> bool {
    let Ok(sig) = <&[u8; SIGNATURE_LEN]>::try_from(signature) else {
        return false;
    };
    match suite_by_id(key.suite_id).map(|s| s.algorithm) {
        Some(SignatureAlgorithm::EcSchnorr) => schnorr::verify(key, message, sig),
        Some(SignatureAlgorithm::Ecdsa) => ecdsa::verify(key, message, sig),
        None => false,
    }
}

/// First `truncation` bytes of SHA-256 over the raw pattern.
pub fn pattern_hash(pattern: &MarkerPattern, truncation: usize) -> Result<Vec<u8>, CryptoError> {
    if !(1..=32).contains(&truncation) {
        return Err(CryptoError::RangeError {
            value: truncation,
            min: 1,
            max: 32,
        });
    }
    Ok(pattern_hash_full(pattern)[..truncation].to_vec())
}

/// Full 32-byte SHA-256 of the pattern.
pub fn pattern_hash_full(pattern: &MarkerPattern) -> [u8; 32] {
    Sha256::digest(pattern.as_bytes()).into()
}

/// `a * b mod q` on plain (non-Montgomery) scalars.
pub(crate) fn mul_mod_order(a: U256, b: U256) -> U256 {
    ORDER.mont_decode(ORDER.mont_mul(ORDER.mont_encode(a), ORDER.mont_encode(b)))
}

/// `a^-1 mod q` on a plain scalar.
pub(crate) fn inv_mod_order(a: U256) -> U256 {
    ORDER.mont_decode(ORDER.mont_inv(ORDER.mont_encode(a)))
}
