//! NIST P-256 group arithmetic: field elements, affine/Jacobian points and
//! double-and-add scalar multiplication.
//!
//! The curve is y^2 = x^3 - 3x + b over the prime field; cofactor 1, so every
//! on-curve point other than infinity has prime order.

use crate::arith::{U256, FIELD, ORDER};

/// Field element modulo the curve prime, kept in Montgomery form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fe(U256);

/// 3 in Montgomery form; the curve `a` is -3.
const THREE: Fe = Fe(U256::new([
    0x0000000000000003,
    0xfffffffd00000000,
    0xffffffffffffffff,
    0x00000002fffffffc,
]));

/// Curve coefficient b in Montgomery form.
const B: Fe = Fe(U256::new([
    0xd89cdf6229c4bddf,
    0xacf005cd78843090,
    0xe5a220abf7212ed6,
    0xdc30061d04874834,
]));

impl Fe {
    pub const ZERO: Fe = Fe(U256::ZERO);
    pub const ONE: Fe = Fe(FIELD.r1);

    pub fn from_int(v: U256) -> Fe {
        Fe(FIELD.mont_encode(v))
    }

    pub fn to_int(self) -> U256 {
        FIELD.mont_decode(self.0)
    }

    /// Rejects encodings that are not canonical residues (>= p).
    pub fn from_be_bytes(bytes: &[u8; 32]) -> Option<Fe> {
        let v = U256::from_be_bytes(bytes);
        if v < FIELD.m {
            Some(Fe::from_int(v))
        } else {
            None
        }
    }

    pub fn to_be_bytes(self) -> [u8; 32] {
        self.to_int().to_be_bytes()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    fn add(self, o: Fe) -> Fe {
        Fe(FIELD.add(self.0, o.0))
    }

    fn sub(self, o: Fe) -> Fe {
        Fe(FIELD.sub(self.0, o.0))
    }

    fn neg(self) -> Fe {
        Fe(FIELD.neg(self.0))
    }

    fn dbl(self) -> Fe {
        self.add(self)
    }

    fn mul(self, o: Fe) -> Fe {
        Fe(FIELD.mont_mul(self.0, o.0))
    }

    fn sqr(self) -> Fe {
        self.mul(self)
    }

    fn inv(self) -> Fe {
        Fe(FIELD.mont_inv(self.0))
    }
}

/// A point in affine coordinates, or the point at infinity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AffinePoint {
    Infinity,
    Point { x: Fe, y: Fe },
}

/// The standard base point G.
pub const GENERATOR: AffinePoint = AffinePoint::Point {
    x: Fe(U256::new([
        0x79e730d418a9143c,
        0x75ba95fc5fedb601,
        0x79fb732b77622510,
        0x18905f76a53755c6,
    ])),
    y: Fe(U256::new([
        0xddf25357ce95560a,
        0x8b4ab8e4ba19e45c,
        0xd2e88688dd21f325,
        0x8571ff1825885d85,
    ])),
};

impl AffinePoint {
    pub fn on_curve(self) -> bool {
        match self {
            AffinePoint::Infinity => true,
            AffinePoint::Point { x, y } => {
                let lhs = y.sqr();
                let rhs = x.sqr().mul(x).sub(THREE.mul(x)).add(B);
                lhs == rhs
            }
        }
    }

    pub fn neg(self) -> AffinePoint {
        match self {
            AffinePoint::Infinity => AffinePoint::Infinity,
            AffinePoint::Point { x, y } => AffinePoint::Point { x, y: y.neg() },
        }
    }

    /// General affine addition, all special cases handled by branching.
    pub fn add(self, other: AffinePoint) -> AffinePoint {
        let (x1, y1) = match self {
            AffinePoint::Infinity => return other,
            AffinePoint::Point { x, y } => (x, y),
        };
        let (x2, y2) = match other {
            AffinePoint::Infinity => return self,
            AffinePoint::Point { x, y } => (x, y),
        };
        if x1 == x2 {
            if y1 == y2.neg() {
                return AffinePoint::Infinity;
            }
            return self.double();
        }
        let lambda = y2.sub(y1).mul(x2.sub(x1).inv());
        let x3 = lambda.sqr().sub(x1).sub(x2);
        let y3 = lambda.mul(x1.sub(x3)).sub(y1);
        AffinePoint::Point { x: x3, y: y3 }
    }

    pub fn double(self) -> AffinePoint {
        let (x, y) = match self {
            AffinePoint::Infinity => return AffinePoint::Infinity,
            AffinePoint::Point { x, y } => (x, y),
        };
        if y.is_zero() {
            return AffinePoint::Infinity;
        }
        // lambda = (3x^2 + a) / 2y with a = -3
        let lambda = THREE.mul(x.sqr()).sub(THREE).mul(y.dbl().inv());
        let x3 = lambda.sqr().sub(x.dbl());
        let y3 = lambda.mul(x.sub(x3)).sub(y);
        AffinePoint::Point { x: x3, y: y3 }
    }

    /// Decode an uncompressed x||y encoding; on-curve and range checked.
    /// The identity has no encoding, so the result is always a real point.
    pub fn from_xy_bytes(bytes: &[u8; 64]) -> Option<AffinePoint> {
        let mut xb = [0u8; 32];
        let mut yb = [0u8; 32];
        xb.copy_from_slice(&bytes[..32]);
        yb.copy_from_slice(&bytes[32..]);
        let x = Fe::from_be_bytes(&xb)?;
        let y = Fe::from_be_bytes(&yb)?;
        let point = AffinePoint::Point { x, y };
        if point.on_curve() {
            Some(point)
        } else {
            None
        }
    }

    pub fn to_xy_bytes(self) -> Option<[u8; 64]> {
        match self {
            AffinePoint::Infinity => None,
            AffinePoint::Point { x, y } => {
                let mut out = [0u8; 64];
                out[..32].copy_from_slice(&x.to_be_bytes());
                out[32..].copy_from_slice(&y.to_be_bytes());
                Some(out)
            }
        }
    }

    /// x-coordinate as canonical big-endian bytes; None for infinity.
    pub fn x_bytes(self) -> Option<[u8; 32]> {
        match self {
            AffinePoint::Infinity => None,
            AffinePoint::Point { x, .. } => Some(x.to_be_bytes()),
        }
    }
}

/// Jacobian projective point; z == 0 encodes infinity.
#[derive(Clone, Copy)]
struct Jacobian {
    x: Fe,
    y: Fe,
    z: Fe,
}

impl Jacobian {
    const INFINITY: Jacobian = Jacobian {
        x: Fe::ONE,
        y: Fe::ONE,
        z: Fe::ZERO,
    };

    fn from_affine(p: AffinePoint) -> Jacobian {
        match p {
            AffinePoint::Infinity => Jacobian::INFINITY,
            AffinePoint::Point { x, y } => Jacobian { x, y, z: Fe::ONE },
        }
    }

    fn to_affine(self) -> AffinePoint {
        if self.z.is_zero() {
            return AffinePoint::Infinity;
        }
        let zi = self.z.inv();
        let zi2 = zi.sqr();
        AffinePoint::Point {
            x: self.x.mul(zi2),
            y: self.y.mul(zi2).mul(zi),
        }
    }

    /// dbl-2001-b style doubling for a = -3; also correct for infinity
    /// and 2-torsion inputs (both collapse to z3 = 0).
    fn double(self) -> Jacobian {
        let delta = self.z.sqr();
        let gamma = self.y.sqr();
        let beta = self.x.mul(gamma);
        let alpha = THREE.mul(self.x.sub(delta)).mul(self.x.add(delta));
        let x3 = alpha.sqr().sub(beta.dbl().dbl().dbl());
        let z3 = self.y.add(self.z).sqr().sub(gamma).sub(delta);
        let y3 = alpha
            .mul(beta.dbl().dbl().sub(x3))
            .sub(gamma.sqr().dbl().dbl().dbl());
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }

    /// Mixed Jacobian + affine addition.
    fn add_affine(self, p: AffinePoint) -> Jacobian {
        let (x2, y2) = match p {
            AffinePoint::Infinity => return self,
            AffinePoint::Point { x, y } => (x, y),
        };
        if self.z.is_zero() {
            return Jacobian::from_affine(p);
        }
        let z1z1 = self.z.sqr();
        let u2 = x2.mul(z1z1);
        let s2 = y2.mul(self.z).mul(z1z1);
        let h = u2.sub(self.x);
        let r = s2.sub(self.y);
        if h.is_zero() {
            if r.is_zero() {
                return self.double();
            }
            return Jacobian::INFINITY;
        }
        let hh = h.sqr();
        let hhh = h.mul(hh);
        let v = self.x.mul(hh);
        let x3 = r.sqr().sub(hhh).sub(v.dbl());
        let y3 = r.mul(v.sub(x3)).sub(self.y.mul(hhh));
        let z3 = self.z.mul(h);
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }
}

/// `k * p` by plain left-to-right double-and-add.
pub fn scalar_mul(k: U256, p: AffinePoint) -> AffinePoint {
    let mut acc = Jacobian::INFINITY;
    for i in (0..256).rev() {
        acc = acc.double();
        if k.bit(i) {
            acc = acc.add_affine(p);
        }
    }
    acc.to_affine()
}

/// `k * G`.
pub fn base_mul(k: U256) -> AffinePoint {
    scalar_mul(k, GENERATOR)
}

/// The group order as an integer.
pub fn group_order() -> U256 {
    ORDER.m
}
