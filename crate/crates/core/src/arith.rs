//! Fixed-width 256-bit integers and Montgomery modular arithmetic.
//!
//! Plain schoolbook/CIOS arithmetic sized for the two 256-bit moduli the
//! curve layer needs (the field prime and the group order). None of this is
//! constant time; side-channel hardening is out of scope.

use core::cmp::Ordering;
use core::fmt;

/// 256-bit unsigned integer as four little-endian 64-bit limbs.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct U256(pub [u64; 4]);

impl U256 {
    pub const ZERO: U256 = U256([0; 4]);
    pub const ONE: U256 = U256([1, 0, 0, 0]);

    pub const fn new(limbs: [u64; 4]) -> Self {
        U256(limbs)
    }

    pub fn from_be_bytes(bytes: &[u8; 32]) -> Self {
        let mut limbs = [0u64; 4];
        for (i, limb) in limbs.iter_mut().enumerate() {
            let mut chunk = [0u8; 8];
            chunk.copy_from_slice(&bytes[8 * (3 - i)..8 * (4 - i)]);
            *limb = u64::from_be_bytes(chunk);
        }
        U256(limbs)
    }

    pub fn to_be_bytes(self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (i, limb) in self.0.iter().enumerate() {
            out[8 * (3 - i)..8 * (4 - i)].copy_from_slice(&limb.to_be_bytes());
        }
        out
    }

    pub fn is_zero(self) -> bool {
        self.0 == [0; 4]
    }

    /// Bit `i` counted from the least significant end.
    pub fn bit(self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn overflowing_add(self, rhs: U256) -> (U256, bool) {
        let mut out = [0u64; 4];
        let mut carry = 0u128;
        for (i, slot) in out.iter_mut().enumerate() {
            let t = self.0[i] as u128 + rhs.0[i] as u128 + carry;
            *slot = t as u64;
            carry = t >> 64;
        }
        (U256(out), carry != 0)
    }

    pub fn overflowing_sub(self, rhs: U256) -> (U256, bool) {
        let mut out = [0u64; 4];
        let mut borrow = 0u64;
        for (i, slot) in out.iter_mut().enumerate() {
            let (d, b1) = self.0[i].overflowing_sub(rhs.0[i]);
            let (d, b2) = d.overflowing_sub(borrow);
            *slot = d;
            borrow = (b1 | b2) as u64;
        }
        (U256(out), borrow != 0)
    }
}

impl Ord for U256 {
    fn cmp(&self, other: &Self) -> Ordering {
        for i in (0..4).rev() {
            match self.0[i].cmp(&other.0[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for U256 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for U256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x")?;
        for i in (0..4).rev() {
            write!(f, "{:016x}", self.0[i])?;
        }
        Ok(())
    }
}

/// A fixed prime modulus with precomputed Montgomery constants (R = 2^256).
pub struct Modulus {
    /// The modulus itself.
    pub m: U256,
    /// `-m^-1 mod 2^64`.
    pub n0: u64,
    /// `R mod m`, i.e. one in Montgomery form.
    pub r1: U256,
    /// `R^2 mod m`, the to-Montgomery conversion factor.
    pub r2: U256,
}

/// NIST P-256 field prime p = 2^256 - 2^224 + 2^192 + 2^96 - 1.
pub const FIELD: Modulus = Modulus {
    m: U256::new([
        0xffffffffffffffff,
        0x00000000ffffffff,
        0x0000000000000000,
        0xffffffff00000001,
    ]),
    n0: 0x0000000000000001,
    r1: U256::new([
        0x0000000000000001,
        0xffffffff00000000,
        0xffffffffffffffff,
        0x00000000fffffffe,
    ]),
    r2: U256::new([
        0x0000000000000003,
        0xfffffffbffffffff,
        0xfffffffffffffffe,
        0x00000004fffffffd,
    ]),
};

/// NIST P-256 group order q.
pub const ORDER: Modulus = Modulus {
    m: U256::new([
        0xf3b9cac2fc632551,
        0xbce6faada7179e84,
        0xffffffffffffffff,
        0xffffffff00000000,
    ]),
    n0: 0xccd1c8aaee00bc4f,
    r1: U256::new([
        0x0c46353d039cdaaf,
        0x4319055258e8617b,
        0x0000000000000000,
        0x00000000ffffffff,
    ]),
    r2: U256::new([
        0x83244c95be79eea2,
        0x4699799c49bd6fa6,
        0x2845b2392b6bec59,
        0x66e12d94f3d95620,
    ]),
};

impl Modulus {
    /// Modular addition; works in either domain.
    pub fn add(&self, a: U256, b: U256) -> U256 {
        let (sum, carry) = a.overflowing_add(b);
        if carry || sum >= self.m {
            sum.overflowing_sub(self.m).0
        } else {
            sum
        }
    }

    /// Modular subtraction; works in either domain.
    pub fn sub(&self, a: U256, b: U256) -> U256 {
        let (d, borrow) = a.overflowing_sub(b);
        if borrow {
            d.overflowing_add(self.m).0
        } else {
            d
        }
    }

    pub fn neg(&self, a: U256) -> U256 {
        self.sub(U256::ZERO, a)
    }

    /// Reduce a value known to be below 2m (e.g. a 256-bit hash) into [0, m).
    pub fn reduce_once(&self, a: U256) -> U256 {
        if a >= self.m {
            a.overflowing_sub(self.m).0
        } else {
            a
        }
    }

    /// Montgomery product `a * b * R^-1 mod m` (CIOS).
    #[allow(clippy::needless_range_loop)] // the word shifts read better indexed
    pub fn mont_mul(&self, a: U256, b: U256) -> U256 {
        let mut t = [0u64; 6];
        for i in 0..4 {
            // t += a[i] * b
            let mut carry = 0u128;
            for j in 0..4 {
                let acc = t[j] as u128 + a.0[i] as u128 * b.0[j] as u128 + carry;
                t[j] = acc as u64;
                carry = acc >> 64;
            }
            let acc = t[4] as u128 + carry;
            t[4] = acc as u64;
            t[5] = (acc >> 64) as u64;

            // t += (t[0] * n0 mod 2^64) * m, then drop the low limb
            let k = t[0].wrapping_mul(self.n0);
            let acc = t[0] as u128 + k as u128 * self.m.0[0] as u128;
            let mut carry = acc >> 64;
            for j in 1..4 {
                let acc = t[j] as u128 + k as u128 * self.m.0[j] as u128 + carry;
                t[j - 1] = acc as u64;
                carry = acc >> 64;
            }
            let acc = t[4] as u128 + carry;
            t[3] = acc as u64;
            t[4] = t[5] + (acc >> 64) as u64;
            t[5] = 0;
        }
        let r = U256([t[0], t[1], t[2], t[3]]);
        if t[4] != 0 || r >= self.m {
            r.overflowing_sub(self.m).0
        } else {
            r
        }
    }

    pub fn mont_encode(&self, a: U256) -> U256 {
        self.mont_mul(a, self.r2)
    }

    pub fn mont_decode(&self, a: U256) -> U256 {
        self.mont_mul(a, U256::ONE)
    }

    /// `base^exp mod m` with base and result in Montgomery form.
    pub fn mont_pow(&self, base: U256, exp: U256) -> U256 {
        let mut acc = self.r1;
        let mut started = false;
        for i in (0..256).rev() {
            if started {
                acc = self.mont_mul(acc, acc);
            }
            if exp.bit(i) {
                if started {
                    acc = self.mont_mul(acc, base);
                } else {
                    acc = base;
                    started = true;
                }
            }
        }
        if started {
            acc
        } else {
            self.r1
        }
    }

    /// Modular inverse via Fermat (m prime); input and output in Montgomery form.
    pub fn mont_inv(&self, a: U256) -> U256 {
        let exp = self.m.overflowing_sub(U256::new([2, 0, 0, 0])).0;
        self.mont_pow(a, exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn be_bytes_round_trip() {
        let mut bytes = [0u8; 32];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = i as u8;
        }
        assert_eq!(U256::from_be_bytes(&bytes).to_be_bytes(), bytes);
    }

    #[test]
    fn add_sub_carries() {
        let max = U256([u64::MAX; 4]);
        let (sum, carry) = max.overflowing_add(U256::ONE);
        assert!(carry);
        assert!(sum.is_zero());
        let (d, borrow) = U256::ZERO.overflowing_sub(U256::ONE);
        assert!(borrow);
        assert_eq!(d, max);
    }

    #[test]
    fn ordering() {
        assert!(FIELD.m > ORDER.m);
        assert!(U256::ZERO < U256::ONE);
    }

    #[test]
    fn mont_round_trip() {
        for modulus in [&FIELD, &ORDER] {
            let x = U256::new([0x1234567890abcdef, 0xfedcba0987654321, 7, 0x42]);
            assert_eq!(modulus.mont_decode(modulus.mont_encode(x)), x);
            assert_eq!(modulus.mont_decode(modulus.r1), U256::ONE);
        }
    }

    #[test]
    fn mont_mul_matches_known_square() {
        // 2^128 squared is 2^256 = R, whose residue mod m is r1.
        let two_128 = U256::new([0, 0, 1, 0]);
        for modulus in [&FIELD, &ORDER] {
            let a = modulus.mont_encode(two_128);
            let sq = modulus.mont_decode(modulus.mont_mul(a, a));
            assert_eq!(sq, modulus.r1);
        }
    }

    #[test]
    fn inversion() {
        for modulus in [&FIELD, &ORDER] {
            let x = modulus.mont_encode(U256::new([99, 1234, 0, 77]));
            let xi = modulus.mont_inv(x);
            assert_eq!(modulus.mont_mul(x, xi), modulus.r1);
        }
    }

    #[test]
    fn reduce_once_boundaries() {
        assert_eq!(FIELD.reduce_once(FIELD.m), U256::ZERO);
        let below = FIELD.m.overflowing_sub(U256::ONE).0;
        assert_eq!(FIELD.reduce_once(below), below);
    }
}
