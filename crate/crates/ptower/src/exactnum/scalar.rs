//! Precision-tracked scalars: elements of Z/p^n viewed as approximations to
//! p-adic integers known to `n` digits.
//!
//! A scalar carries its own prime and precision. Ring operations meet at the
//! minimum precision of the operands; exact division by p is the only
//! operation that *consumes* a digit, dropping the precision by one. This is
//! what lets a computation report honestly how many digits of its output are
//! reliable.

use crate::error::{Error, Result};

/// p^k as a u64, panicking on overflow (validated configs keep p^n small).
pub(crate) fn pow_u64(p: u64, k: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p).expect("p^k overflows u64");
    }
    acc
}

/// An element of Z/p^prec with its precision (number of reliable digits).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PAdicScalar {
    p: u64,
    prec: u32,
    residue: u64, // canonical representative in [0, p^prec)
}

impl PAdicScalar {
    /// Builds a scalar from a (possibly negative) integer, reduced mod p^prec.
    pub fn new(p: u64, value: i128, prec: u32) -> Self {
        assert!(prec > 0, "precision must be at least 1");
        let m = pow_u64(p, prec) as i128;
        let residue = value.rem_euclid(m) as u64;
        PAdicScalar { p, prec, residue }
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        Self::new(p, 0, prec)
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::new(p, 1, prec)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Canonical representative in [0, p^prec).
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    fn modulus(&self) -> u64 {
        pow_u64(self.p, self.prec)
    }

    fn check_same_p(&self, other: &Self) {
        assert_eq!(self.p, other.p, "scalars from different primes combined");
    }

    /// Drops to the given precision (no-op if already at or below it).
    pub fn truncate(&self, prec: u32) -> Self {
        assert!(prec > 0);
        if prec >= self.prec {
            return *self;
        }
        PAdicScalar {
            p: self.p,
            prec,
            residue: self.residue % pow_u64(self.p, prec),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_p(other);
        let prec = self.prec.min(other.prec);
        let m = pow_u64(self.p, prec);
        PAdicScalar {
            p: self.p,
            prec,
            residue: (self.residue % m + other.residue % m) % m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PAdicScalar {
            p: self.p,
            prec: self.prec,
            residue: if self.residue == 0 { 0 } else { m - self.residue },
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_p(other);
        let prec = self.prec.min(other.prec);
        let m = pow_u64(self.p, prec) as u128;
        let prod = (self.residue as u128 % m) * (other.residue as u128 % m) % m;
        PAdicScalar {
            p: self.p,
            prec,
            residue: prod as u64,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p, self.prec);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// p-adic valuation of the residue, capped at the precision (so the zero
    /// residue reports its precision: "divisible by p at least `prec` times").
    pub fn valuation(&self) -> u32 {
        if self.residue == 0 {
            return self.prec;
        }
        let mut v = 0;
        let mut r = self.residue;
        while r.is_multiple_of(self.p) {
            r /= self.p;
            v += 1;
        }
        v
    }

    /// Exact division by p. Consumes one digit of precision: the result is an
    /// element of Z/p^(prec-1).
    pub fn exact_divide_by_p(&self) -> Result<Self> {
        if self.prec < 2 {
            return Err(Error::PrecisionExhausted {
                needed: 2,
                have: self.prec,
            });
        }
        if !self.residue.is_multiple_of(self.p) {
            return Err(Error::NotDivisible {
                p: self.p,
                residue: self.residue,
            });
        }
        Ok(PAdicScalar {
            p: self.p,
            prec: self.prec - 1,
            residue: (self.residue / self.p) % pow_u64(self.p, self.prec - 1),
        })
    }

    /// Multiplies by p^k without losing precision (residue arithmetic).
    pub fn mul_pow_p(&self, k: u32) -> Self {
        let m = self.modulus() as u128;
        let mut r = self.residue as u128;
        for _ in 0..k {
            r = r * self.p as u128 % m;
        }
        PAdicScalar {
            p: self.p,
            prec: self.prec,
            residue: r as u64,
        }
    }

    /// Inverse of a unit (valuation 0). Returns None for non-units.
    pub fn inverse(&self) -> Option<Self> {
        if self.residue.is_multiple_of(self.p) {
            return None;
        }
        Some(PAdicScalar {
            p: self.p,
            prec: self.prec,
            residue: inv_mod(self.residue, self.modulus()),
        })
    }
}

/// Inverse of `a` modulo `m` for `a` coprime to `m`, by extended Euclid.
pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inv_mod called on a non-unit");
    old_s.rem_euclid(m as i128) as u64
}
