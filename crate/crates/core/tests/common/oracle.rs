//! Independent reference arithmetic for cross-checking the library.
//!
//! Everything here deliberately avoids the implementation's code paths:
//! `num-bigint` instead of fixed limbs and Montgomery form, affine
//! coordinates with Fermat inversion instead of Jacobian formulas, MSB-first
//! double-and-add, and a hand-written SHA-256 compression loop.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Affine point; `None` is the point at infinity.
pub type Point = Option<(BigUint, BigUint)>;

pub struct Curve {
    pub p: BigUint,
    pub a: BigUint,
    pub b: BigUint,
    pub gx: BigUint,
    pub gy: BigUint,
    pub q: BigUint,
}

fn hexu(s: &str) -> BigUint {
    BigUint::parse_bytes(s.as_bytes(), 16).unwrap()
}

pub fn p256() -> Curve {
    let p = hexu("ffffffff00000001000000000000000000000000ffffffffffffffffffffffff");
    Curve {
        a: &p - 3u32,
        b: hexu("5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"),
        gx: hexu("6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
        gy: hexu("4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"),
        q: hexu("ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"),
        p,
    }
}

pub fn to_be32(x: &BigUint) -> [u8; 32] {
    let bytes = x.to_bytes_be();
    assert!(bytes.len() <= 32, "value exceeds 256 bits");
    let mut out = [0u8; 32];
    out[32 - bytes.len()..].copy_from_slice(&bytes);
    out
}

pub fn from_be(bytes: &[u8]) -> BigUint {
    BigUint::from_bytes_be(bytes)
}

impl Curve {
    fn inv_p(&self, x: &BigUint) -> BigUint {
        x.modpow(&(&self.p - 2u32), &self.p)
    }

    pub fn inv_q(&self, x: &BigUint) -> BigUint {
        x.modpow(&(&self.q - 2u32), &self.q)
    }

    fn sub_p(&self, a: &BigUint, b: &BigUint) -> BigUint {
        ((a + &self.p) - (b % &self.p)) % &self.p
    }

    pub fn generator(&self) -> Point {
        Some((self.gx.clone(), self.gy.clone()))
    }

    pub fn on_curve(&self, point: &Point) -> bool {
        match point {
            None => true,
            Some((x, y)) => {
                let lhs = (y * y) % &self.p;
                let rhs = (x * x * x + &self.a * x + &self.b) % &self.p;
                lhs == rhs
            }
        }
    }

    pub fn add(&self, lhs: &Point, rhs: &Point) -> Point {
        let (x1, y1) = match lhs {
            None => return rhs.clone(),
            Some(v) => v,
        };
        let (x2, y2) = match rhs {
            None => return lhs.clone(),
            Some(v) => v,
        };
        if x1 == x2 && (y1 + y2) % &self.p == BigUint::zero() {
            return None;
        }
        let lambda = if x1 == x2 {
            // tangent
            let num = (3u32 * x1 * x1 + &self.a) % &self.p;
            (num * self.inv_p(&((2u32 * y1) % &self.p))) % &self.p
        } else {
            let num = self.sub_p(y2, y1);
            let den = self.sub_p(x2, x1);
            (num * self.inv_p(&den)) % &self.p
        };
        let x3 = self.sub_p(&self.sub_p(&((&lambda * &lambda) % &self.p), x1), x2);
        let y3 = self.sub_p(&((lambda * self.sub_p(x1, &x3)) % &self.p), y1);
        Some((x3, y3))
    }

    /// Plain MSB-first double-and-add.
    pub fn mul(&self, k: &BigUint, point: &Point) -> Point {
        let mut acc: Point = None;
        for i in (0..k.bits()).rev() {
            acc = self.add(&acc, &acc);
            if k.bit(i) {
                acc = self.add(&acc, point);
            }
        }
        acc
    }

    pub fn base_mul(&self, k: &BigUint) -> Point {
        self.mul(k, &self.generator())
    }

    /// EC-Schnorr in the optimized shape: e = H(R.x || m) mod q,
    /// s = (k + e*d) mod q.
    pub fn schnorr_sign(&self, d: &BigUint, k: &BigUint, msg: &[u8]) -> ([u8; 32], [u8; 32]) {
        let r = self.base_mul(k).expect("nonce in range");
        let mut input = to_be32(&r.0).to_vec();
        input.extend_from_slice(msg);
        let e = from_be(&ref_sha256(&input)) % &self.q;
        assert!(!e.is_zero(), "oracle challenge collapsed to zero");
        let s = (k + &e * d) % &self.q;
        assert!(!s.is_zero(), "oracle s collapsed to zero");
        (to_be32(&e), to_be32(&s))
    }

    pub fn schnorr_verify(&self, public: &Point, msg: &[u8], e: &[u8; 32], s: &[u8; 32]) -> bool {
        let e = from_be(e);
        let s = from_be(s);
        let one = BigUint::one();
        if e < one || e >= self.q || s < one || s >= self.q {
            return false;
        }
        let neg_e = &self.q - &e;
        let recovered = self.add(&self.base_mul(&s), &self.mul(&neg_e, public));
        let Some((rx, _)) = recovered else {
            return false;
        };
        let mut input = to_be32(&rx).to_vec();
        input.extend_from_slice(msg);
        from_be(&ref_sha256(&input)) % &self.q == e
    }

    pub fn ecdsa_sign(&self, d: &BigUint, k: &BigUint, msg: &[u8]) -> ([u8; 32], [u8; 32]) {
        let z = from_be(&ref_sha256(msg)) % &self.q;
        let rp = self.base_mul(k).expect("nonce in range");
        let r = rp.0 % &self.q;
        assert!(!r.is_zero(), "oracle r collapsed to zero");
        let s = (self.inv_q(k) * (z + &r * d)) % &self.q;
        assert!(!s.is_zero(), "oracle s collapsed to zero");
        (to_be32(&r), to_be32(&s))
    }

    pub fn ecdsa_verify(&self, public: &Point, msg: &[u8], r: &[u8; 32], s: &[u8; 32]) -> bool {
        let r = from_be(r);
        let s = from_be(s);
        let one = BigUint::one();
        if r < one || r >= self.q || s < one || s >= self.q {
            return false;
        }
        let z = from_be(&ref_sha256(msg)) % &self.q;
        let w = self.inv_q(&s);
        let u1 = (z * &w) % &self.q;
        let u2 = (&r * &w) % &self.q;
        let point = self.add(&self.base_mul(&u1), &self.mul(&u2, public));
        match point {
            None => false,
            Some((x, _)) => x % &self.q == r,
        }
    }
}

/// Reference SHA-256 (FIPS 180-4), written independently of the sha2 crate.
pub fn ref_sha256(data: &[u8]) -> [u8; 32] {
    const K: [u32; 64] = [
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2,
    ];
    let mut state: [u32; 8] = [
        0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab,
        0x5be0cd19,
    ];
    let mut msg = data.to_vec();
    let bit_len = (data.len() as u64) * 8;
    msg.push(0x80);
    while msg.len() % 64 != 56 {
        msg.push(0);
    }
    msg.extend_from_slice(&bit_len.to_be_bytes());

    for chunk in msg.chunks_exact(64) {
        let mut w = [0u32; 64];
        for (i, word) in chunk.chunks_exact(4).enumerate() {
            w[i] = u32::from_be_bytes(word.try_into().unwrap());
        }
        for i in 16..64 {
            let s0 = w[i - 15].rotate_right(7) ^ w[i - 15].rotate_right(18) ^ (w[i - 15] >> 3);
            let s1 = w[i - 2].rotate_right(17) ^ w[i - 2].rotate_right(19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16]
                .wrapping_add(s0)
                .wrapping_add(w[i - 7])
                .wrapping_add(s1);
        }
        let [mut a, mut b, mut c, mut d, mut e, mut f, mut g, mut h] = state;
        for i in 0..64 {
            let s1 = e.rotate_right(6) ^ e.rotate_right(11) ^ e.rotate_right(25);
            let ch = (e & f) ^ (!e & g);
            let t1 = h
                .wrapping_add(s1)
                .wrapping_add(ch)
                .wrapping_add(K[i])
                .wrapping_add(w[i]);
            let s0 = a.rotate_right(2) ^ a.rotate_right(13) ^ a.rotate_right(22);
            let maj = (a & b) ^ (a & c) ^ (b & c);
            let t2 = s0.wrapping_add(maj);
            h = g;
            g = f;
            f = e;
            e = d.wrapping_add(t1);
            d = c;
            c = b;
            b = a;
            a = t1.wrapping_add(t2);
        }
        for (dst, src) in state.iter_mut().zip([a, b, c, d, e, f, g, h]) {
            *dst = dst.wrapping_add(src);
        }
    }

    let mut out = [0u8; 32];
    for (i, word) in state.iter().enumerate() {
        out[4 * i..4 * i + 4].copy_from_slice(&word.to_be_bytes());
    }
    out
}

/// Reduce arbitrary bytes into a usable private scalar in [1, q-1].
pub fn scalar_in_range(curve: &Curve, bytes: &[u8; 32]) -> [u8; 32] {
    let mut v = from_be(bytes) % &curve.q;
    if v.is_zero() {
        v = BigUint::one();
    }
    to_be32(&v)
}
