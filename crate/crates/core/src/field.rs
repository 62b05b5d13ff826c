//! Arithmetic in GF(2^8).
//!
//! Elements are bytes interpreted as polynomials over GF(2) modulo
//! x^8 + x^4 + x^3 + x^2 + 1 (0x11D), with generator 2, the conventional
//! Reed-Solomon field. Addition is XOR; multiplication goes through
//! compile-time log/exp tables.

use crate::error::{Error, Result};
use std::ops::{Add, AddAssign, Mul, MulAssign};

/// Reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.
pub const REDUCTION_POLY: u16 = 0x11D;

/// Generator of the multiplicative group.
pub const GENERATOR: u8 = 0x02;

/// Stored in `log[0]`; the discrete log of zero is undefined.
pub const LOG_ZERO_SENTINEL: u8 = 255;

/// Exponential and logarithm tables.
///
/// `exp[i] = GENERATOR^i` for `i` in `[0, 254]`, and `exp[255] = exp[0] = 1`
/// (the multiplicative group has order 255). `log[exp[i]] = i`, with
/// `log[0]` set to [`LOG_ZERO_SENTINEL`]. Immutable after construction and
/// safe to share across threads.
pub struct FieldTables {
    pub exp: [u8; 256],
    pub log: [u8; 256],
}

const fn build_tables_const() -> FieldTables {
    let mut exp = [0u8; 256];
    let mut log = [0u8; 256];
    log[0] = LOG_ZERO_SENTINEL;
    let mut x: u16 = 1;
    let mut i = 0usize;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= REDUCTION_POLY;
        }
        i += 1;
    }
    exp[255] = exp[0]; // period 255 wrap-around
    FieldTables { exp, log }
}

/// The shared tables; all field operations read these.
pub static TABLES: FieldTables = build_tables_const();

impl FieldTables {
    /// Builds a fresh copy of the tables. Deterministic; equal to [`TABLES`].
    pub fn build() -> FieldTables {
        build_tables_const()
    }
}

/// An element of GF(2^8).
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(transparent)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    #[inline]
    pub const fn new(v: u8) -> Gf256 {
        Gf256(v)
    }

    #[inline]
    pub const fn raw(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; zero is a domain error.
    #[inline]
    pub fn inv(self) -> Result<Gf256> {
        if self.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let log_a = TABLES.log[self.0 as usize] as usize;
        Ok(Gf256(TABLES.exp[255 - log_a]))
    }
}

// field addition in characteristic 2 is XOR
impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        // log[0] is a sentinel, so zero operands must short-circuit.
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256::ZERO;
        }
        let sum =
            TABLES.log[self.0 as usize] as usize + TABLES.log[rhs.0 as usize] as usize;
        Gf256(TABLES.exp[sum % 255])
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

/// `dst[i] ^= src[i]`, eight bytes at a time.
///
/// This is the hot loop of the cascade codec, so it works on `u64` words
/// with a scalar tail.
///
/// # Panics
///
/// Panics if the lengths differ.
pub fn xor_slice(dst: &mut [u8], src: &[u8]) {
    assert_eq!(dst.len(), src.len(), "slice length mismatch");
    let mut d = dst.chunks_exact_mut(8);
    let mut s = src.chunks_exact(8);
    for (dc, sc) in d.by_ref().zip(s.by_ref()) {
        let v = u64::from_ne_bytes(dc[..].try_into().unwrap())
            ^ u64::from_ne_bytes(sc[..].try_into().unwrap());
        dc.copy_from_slice(&v.to_ne_bytes());
    }
    for (db, sb) in d.into_remainder().iter_mut().zip(s.remainder()) {
        *db ^= *sb;
    }
}

/// Threshold above which a per-coefficient 256-entry product table beats
/// per-byte log/exp lookups.
const MUL_TABLE_THRESHOLD: usize = 64;

/// `dst[i] ^= coeff * src[i]` in GF(2^8).
///
/// # Panics
///
/// Panics if the lengths differ.
pub fn addmul_slice(dst: &mut [u8], src: &[u8], coeff: Gf256) {
    assert_eq!(dst.len(), src.len(), "slice length mismatch");
    if coeff.is_zero() {
        return;
    }
    if coeff == Gf256::ONE {
        xor_slice(dst, src);
        return;
    }
    if src.len() >= MUL_TABLE_THRESHOLD {
        let mut row = [0u8; 256];
        for (x, r) in row.iter_mut().enumerate() {
            *r = (coeff * Gf256(x as u8)).0;
        }
        for (d, s) in dst.iter_mut().zip(src) {
            *d ^= row[*s as usize];
        }
        return;
    }
    let log_c = TABLES.log[coeff.0 as usize] as usize;
    for (d, s) in dst.iter_mut().zip(src) {
        if *s != 0 {
            *d ^= TABLES.exp[(TABLES.log[*s as usize] as usize + log_c) % 255];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    /// Independent multiplication oracle: carry-less multiply, then reduce
    /// modulo 0x11D bit by bit. No tables.
    fn mul_oracle(a: u8, b: u8) -> u8 {
        let mut acc: u32 = 0;
        for bit in 0..8 {
            if b & (1 << bit) != 0 {
                acc ^= (a as u32) << bit;
            }
        }
        for bit in (8..16).rev() {
            if acc & (1 << bit) != 0 {
                acc ^= (REDUCTION_POLY as u32) << (bit - 8);
            }
        }
        acc as u8
    }

    #[test]
    fn exp_table_anchors() {
        assert_eq!(TABLES.exp[0], 0x01);
        assert_eq!(TABLES.exp[1], 0x02);
        assert_eq!(TABLES.log[0x02], 1);
        // generator^8 by repeated doubling through the oracle
        let mut v = 1u8;
        for _ in 0..8 {
            v = mul_oracle(v, GENERATOR);
        }
        assert_eq!(v, 0x1D);
        assert_eq!(TABLES.exp[8], 0x1D);
        assert_eq!(TABLES.exp[255], TABLES.exp[0]);
        assert_eq!(TABLES.log[0], LOG_ZERO_SENTINEL);
    }

    #[test]
    fn exp_enumerates_all_nonzero() {
        let mut seen = [false; 256];
        for i in 0..255 {
            let v = TABLES.exp[i] as usize;
            assert!(!seen[v], "duplicate exp[{i}]");
            seen[v] = true;
        }
        assert!(!seen[0]);
    }

    #[test]
    fn built_tables_match_static() {
        let t = FieldTables::build();
        assert_eq!(t.exp, TABLES.exp);
        assert_eq!(t.log, TABLES.log);
    }

    #[test]
    fn add_examples() {
        let x = Gf256(0xB7);
        assert_eq!(x + Gf256::ZERO, x);
        assert_eq!(x + x, Gf256::ZERO);
        assert_eq!(Gf256(0x57) + Gf256(0xA3), Gf256(0xF4));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(Gf256(0x00) * Gf256(0xAB), Gf256::ZERO);
        assert_eq!(Gf256(0x02) * Gf256(0x02), Gf256(0x04));
        assert_eq!(mul_oracle(0x02, 0x80), 0x1D);
        assert_eq!(Gf256(0x02) * Gf256(0x80), Gf256(0x1D));
    }

    #[test]
    fn mul_matches_oracle_exhaustively() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(
                    (Gf256(a) * Gf256(b)).0,
                    mul_oracle(a, b),
                    "a={a:#04x} b={b:#04x}"
                );
            }
        }
    }

    #[test]
    fn inv_examples() {
        assert_eq!(Gf256(0x01).inv().unwrap(), Gf256(0x01));
        // exhaustive-search oracle for the inverse of 2
        let inv2 = (1..=255u8)
            .find(|&y| mul_oracle(0x02, y) == 1)
            .unwrap();
        assert_eq!(inv2, 0x8E);
        assert_eq!(Gf256(0x02).inv().unwrap(), Gf256(0x8E));
        assert!(matches!(Gf256::ZERO.inv(), Err(Error::ZeroInverse)));
    }

    #[test]
    fn inv_exhaustive() {
        for a in 1..=255u8 {
            let inv = Gf256(a).inv().unwrap();
            assert_eq!(Gf256(a) * inv, Gf256::ONE, "a={a:#04x}");
        }
    }

    #[test]
    fn commutativity_exhaustive() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(Gf256(a) * Gf256(b), Gf256(b) * Gf256(a));
            }
        }
    }

    #[test]
    fn associativity_and_distributivity_sampled() {
        let mut rng = crate::rng::single(0xF1E1D);
        for _ in 0..10_000 {
            let a = Gf256(rng.next_u32() as u8);
            let b = Gf256(rng.next_u32() as u8);
            let c = Gf256(rng.next_u32() as u8);
            assert_eq!(a * (b * c), (a * b) * c);
            assert_eq!(a * (b + c), a * b + a * c);
        }
    }

    #[test]
    fn log_exp_consistency() {
        for a in 1..=255u8 {
            assert_eq!(TABLES.exp[TABLES.log[a as usize] as usize], a);
            for b in 1..=255u8 {
                let via_logs = TABLES.exp
                    [(TABLES.log[a as usize] as usize + TABLES.log[b as usize] as usize) % 255];
                assert_eq!((Gf256(a) * Gf256(b)).0, via_logs);
            }
        }
    }

    #[test]
    fn slice_ops_match_scalar() {
        let mut rng = crate::rng::single(0x51);
        for len in [0usize, 1, 7, 8, 9, 63, 64, 65, 321] {
            let mut src = vec![0u8; len];
            let mut dst = vec![0u8; len];
            rng.fill_bytes(&mut src);
            rng.fill_bytes(&mut dst);
            let coeff = Gf256((rng.next_u32() as u8) | 1);

            let mut expected = dst.clone();
            for (d, s) in expected.iter_mut().zip(&src) {
                *d = (Gf256(*d) + coeff * Gf256(*s)).0;
            }
            addmul_slice(&mut dst, &src, coeff);
            assert_eq!(dst, expected, "len={len}");

            let mut x = dst.clone();
            xor_slice(&mut x, &src);
            for ((a, b), s) in x.iter().zip(&dst).zip(&src) {
                assert_eq!(*a, b ^ s);
            }
        }
    }

    #[test]
    fn addmul_zero_and_one() {
        let src = [1u8, 2, 3, 4];
        let mut dst = [9u8, 9, 9, 9];
        addmul_slice(&mut dst, &src, Gf256::ZERO);
        assert_eq!(dst, [9, 9, 9, 9]);
        addmul_slice(&mut dst, &src, Gf256::ONE);
        assert_eq!(dst, [8, 11, 10, 13]);
    }
}
