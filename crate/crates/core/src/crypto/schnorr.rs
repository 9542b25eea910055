//! EC-Schnorr in the optimized EC-SDSA shape: the challenge hashes only the
//! nonce point's x-coordinate, so e = SHA-256(R.x || m) mod q and
//! s = (k + e*d) mod q. The signature is e || s, each 32 bytes big-endian.

use sha2::{Digest, Sha256};

use super::{
    mul_mod_order, CryptoError, NonceSource, PrivateKey, PublicKey, MAX_NONCE_DRAWS,
    SIGNATURE_LEN, SUITE_EC_SCHNORR,
};
use crate::arith::{U256, ORDER};
use crate::curve;

fn challenge(r_x: &[u8; 32], message: &[u8]) -> U256 {
    let mut h = Sha256::new();
    h.update(r_x);
    h.update(message);
    let digest: [u8; 32] = h.finalize().into();
    ORDER.reduce_once(U256::from_be_bytes(&digest))
}

pub fn sign(
    key: &PrivateKey,
    message: &[u8],
    nonce: &mut NonceSource,
) -> Result<[u8; SIGNATURE_LEN], CryptoError> {
    if key.suite_id() != SUITE_EC_SCHNORR {
        return Err(CryptoError::WrongSuite {
            expected: SUITE_EC_SCHNORR,
            got: key.suite_id(),
        });
    }
    let msg_digest: [u8; 32] = Sha256::digest(message).into();
    for _ in 0..MAX_NONCE_DRAWS {
        let k = nonce.draw(key.scalar(), &msg_digest)?;
        let r = curve::base_mul(k);
        // k in [1, q-1] never lands on infinity; defensive redraw regardless
        let Some(r_x) = r.x_bytes() else { continue };
        let e = challenge(&r_x, message);
        if e.is_zero() {
            continue;
        }
        let s = ORDER.add(k, mul_mod_order(e, key.scalar()));
        if s.is_zero() {
            continue;
        }
        let mut sig = [0u8; SIGNATURE_LEN];
        sig[..32].copy_from_slice(&e.to_be_bytes());
        sig[32..].copy_from_slice(&s.to_be_bytes());
        return Ok(sig);
    }
    Err(CryptoError::NonceFailure)
}

pub fn verify(key: &PublicKey, message: &[u8], signature: &[u8; SIGNATURE_LEN]) -> bool {
    if key.suite_id() != SUITE_EC_SCHNORR {
        return false;
    }
    let mut eb = [0u8; 32];
    let mut sb = [0u8; 32];
    eb.copy_from_slice(&signature[..32]);
    sb.copy_from_slice(&signature[32..]);
    let e = U256::from_be_bytes(&eb);
    let s = U256::from_be_bytes(&sb);
    let q = curve::group_order();
    if e.is_zero() || e >= q || s.is_zero() || s >= q {
        return false;
    }
    // R' = s*G - e*Y, rejecting the identity
    let recovered = curve::base_mul(s).add(curve::scalar_mul(e, key.point()).neg());
    let Some(r_x) = recovered.x_bytes() else {
        return false;
    };
    challenge(&r_x, message) == e
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn test_key(v: u64) -> PrivateKey {
        let bytes = U256::new([v, 0, 0, 0]).to_be_bytes();
        PrivateKey::from_be_bytes(SUITE_EC_SCHNORR, &bytes).unwrap()
    }

    #[test]
    fn rejects_flipped_message_bit() {
        let key = test_key(1234);
        let mut src = NonceSource::deterministic(5);
        let sig = sign(&key, b"original", &mut src).unwrap();
        assert!(verify(&key.public_key(), b"original", &sig));
        assert!(!verify(&key.public_key(), b"originam", &sig));
    }

    #[test]
    fn rejects_out_of_range_components() {
        let key = test_key(77);
        let mut src = NonceSource::deterministic(6);
        let sig = sign(&key, b"msg", &mut src).unwrap();
        let public = key.public_key();

        let mut s_zero = sig;
        s_zero[32..].fill(0);
        assert!(!verify(&public, b"msg", &s_zero));

        let mut e_zero = sig;
        e_zero[..32].fill(0);
        assert!(!verify(&public, b"msg", &e_zero));

        let mut s_order = sig;
        s_order[32..].copy_from_slice(&curve::group_order().to_be_bytes());
        assert!(!verify(&public, b"msg", &s_order));
    }

    #[test]
    fn rejects_signature_under_different_key() {
        let key = test_key(31337);
        let other = test_key(31338);
        let mut src = NonceSource::deterministic(8);
        let sig = sign(&key, b"msg", &mut src).unwrap();
        assert!(!verify(&other.public_key(), b"msg", &sig));
    }

    #[test]
    fn signing_algebra_holds() {
        // s*G must equal R + e*Y for an honest signature
        let key = test_key(99);
        let k_bytes = U256::new([4242, 0, 0, 0]).to_be_bytes();
        let mut src = NonceSource::fixed(vec![k_bytes]);
        let sig = sign(&key, b"algebra", &mut src).unwrap();
        let mut eb = [0u8; 32];
        let mut sb = [0u8; 32];
        eb.copy_from_slice(&sig[..32]);
        sb.copy_from_slice(&sig[32..]);
        let e = U256::from_be_bytes(&eb);
        let s = U256::from_be_bytes(&sb);
        let r = curve::base_mul(U256::new([4242, 0, 0, 0]));
        let lhs = curve::base_mul(s);
        let rhs = r.add(curve::scalar_mul(e, key.public_key().point()));
        assert_eq!(lhs, rhs);
    }
}
