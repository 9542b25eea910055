//! ECDSA over SHA-256 with fixed-width r || s encoding (32 bytes each,
//! big-endian). No DER, no low-s normalization; verification applies the
//! full range and on-curve checks.

use sha2::{Digest, Sha256};

use super::{
    inv_mod_order, mul_mod_order, CryptoError, NonceSource, PrivateKey, PublicKey,
    MAX_NONCE_DRAWS, SIGNATURE_LEN, SUITE_ECDSA,
};
use crate::arith::{U256, ORDER};
use crate::curve;

fn message_scalar(message: &[u8]) -> U256 {
    let digest: [u8; 32] = Sha256::digest(message).into();
    ORDER.reduce_once(U256::from_be_bytes(&digest))
}

pub fn sign(
    key: &PrivateKey,
    message: &[u8],
    nonce: &mut NonceSource,
) -> Result<[u8; SIGNATURE_LEN], CryptoError> {
    if key.suite_id() != SUITE_ECDSA {
        return Err(CryptoError::WrongSuite {
            expected: SUITE_ECDSA,
            got: key.suite_id(),
        });
    }
    let msg_digest: [u8; 32] = Sha256::digest(message).into();
    let z = message_scalar(message);
    for _ in 0..MAX_NONCE_DRAWS {
        let k = nonce.draw(key.scalar(), &msg_digest)?;
        let Some(r_x) = curve::base_mul(k).x_bytes() else {
            continue;
        };
        let r = ORDER.reduce_once(U256::from_be_bytes(&r_x));
        if r.is_zero() {
            continue;
        }
        // s = k^-1 (z + r*d) mod q
        let s = mul_mod_order(inv_mod_order(k), ORDER.add(z, mul_mod_order(r, key.scalar())));
        if s.is_zero() {
            continue;
        }
        let mut sig = [0u8; SIGNATURE_LEN];
        sig[..32].copy_from_slice(&r.to_be_bytes());
        sig[32..].copy_from_slice(&s.to_be_bytes());
        return Ok(sig);
    }
    Err(CryptoError::NonceFailure)
}

pub fn verify(key: &PublicKey, message: &[u8], signature: &[u8; SIGNATURE_LEN]) -> bool {
    if key.suite_id() != SUITE_ECDSA {
        return false;
    }
    let mut rb = [0u8; 32];
    let mut sb = [0u8; 32];
    rb.copy_from_slice(&signature[..32]);
    sb.copy_from_slice(&signature[32..]);
    let r = U256::from_be_bytes(&rb);
    let s = U256::from_be_bytes(&sb);
    let q = curve::group_order();
    if r.is_zero() || r >= q || s.is_zero() || s >= q {
        return false;
    }
    let z = message_scalar(message);
    let w = inv_mod_order(s);
    let u1 = mul_mod_order(z, w);
    let u2 = mul_mod_order(r, w);
    let point = curve::base_mul(u1).add(curve::scalar_mul(u2, key.point()));
    let Some(x) = point.x_bytes() else {
        return false;
    };
    ORDER.reduce_once(U256::from_be_bytes(&x)) == r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_key(v: u64) -> PrivateKey {
        let bytes = U256::new([v, 0, 0, 0]).to_be_bytes();
        PrivateKey::from_be_bytes(SUITE_ECDSA, &bytes).unwrap()
    }

    #[test]
    fn round_trip_and_cross_key_rejection() {
        let key = test_key(271828);
        let other = test_key(314159);
        let mut src = NonceSource::deterministic(11);
        let sig = sign(&key, b"payload bytes", &mut src).unwrap();
        assert!(verify(&key.public_key(), b"payload bytes", &sig));
        assert!(!verify(&other.public_key(), b"payload bytes", &sig));
    }

    #[test]
    fn rejects_zero_and_order_components() {
        let key = test_key(17);
        let mut src = NonceSource::deterministic(12);
        let sig = sign(&key, b"m", &mut src).unwrap();
        let public = key.public_key();
        for half in [0usize, 32] {
            let mut zeroed = sig;
            zeroed[half..half + 32].fill(0);
            assert!(!verify(&public, b"m", &zeroed));
            let mut at_order = sig;
            at_order[half..half + 32].copy_from_slice(&curve::group_order().to_be_bytes());
            assert!(!verify(&public, b"m", &at_order));
        }
    }

    #[test]
    fn rejects_tampered_signature_bits() {
        let key = test_key(23);
        let mut src = NonceSource::deterministic(13);
        let sig = sign(&key, b"m", &mut src).unwrap();
        let public = key.public_key();
        for i in [0usize, 15, 31, 32, 47, 63] {
            let mut bad = sig;
            bad[i] ^= 0x40;
            assert!(!verify(&public, b"m", &bad), "flip at byte {i}");
        }
    }
}
