//! Exponent keys for sparse polynomials with p-power-denominator exponents.
//!
//! A key stores exponent *numerators* at the owning polynomial's level `h`:
//! numerator `k` in position `j` means the variable `x_j` carries exponent
//! `k / p^h`. The extra `slot` coordinate plays one of two roles, chosen by
//! the owning type: the exponent numerator of the ramified uniformizer
//! `p^(1/p^h)` (mixed characteristic) or of the tilt variable `t^(1/p^h)`
//! (characteristic p). Keys are ordered graded-lexicographically so that
//! iteration, display, and matrix layouts are deterministic.

use std::cmp::Ordering;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExpKey {
    /// Numerator of the slot exponent (uniformizer or tilt variable).
    pub slot: u32,
    /// Numerators of the base-variable exponents, one per variable.
    pub base: Box<[u32]>,
}

impl ExpKey {
    pub fn unit(nvars: usize) -> Self {
        ExpKey {
            slot: 0,
            base: vec![0; nvars].into_boxed_slice(),
        }
    }

    pub fn from_base(base: &[u32]) -> Self {
        ExpKey {
            slot: 0,
            base: base.to_vec().into_boxed_slice(),
        }
    }

    /// Total base-variable degree numerator (the quantity the cap bounds).
    pub fn degree_num(&self) -> u32 {
        self.base.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.slot == 0 && self.base.iter().all(|&e| e == 0)
    }

    /// Componentwise sum (exponents add under multiplication). The slot is
    /// added too; the owning type applies its own wrap/cap rule afterwards.
    pub fn mul(&self, other: &ExpKey) -> ExpKey {
        debug_assert_eq!(self.base.len(), other.base.len());
        ExpKey {
            slot: self.slot + other.slot,
            base: self
                .base
                .iter()
                .zip(other.base.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise divisibility (slot included): does `self` divide `other`?
    pub fn divides(&self, other: &ExpKey) -> bool {
        self.slot <= other.slot
            && self
                .base
                .iter()
                .zip(other.base.iter())
                .all(|(a, b)| a <= b)
    }

    /// Divisibility of the base part only, ignoring slots.
    pub fn base_divides(&self, other: &ExpKey) -> bool {
        self.base
            .iter()
            .zip(other.base.iter())
            .all(|(a, b)| a <= b)
    }

    /// Exact quotient of exponents; caller guarantees `self.divides(other)`.
    pub fn quotient_of(&self, other: &ExpKey) -> ExpKey {
        debug_assert!(self.divides(other));
        ExpKey {
            slot: other.slot - self.slot,
            base: other
                .base
                .iter()
                .zip(self.base.iter())
                .map(|(b, a)| b - a)
                .collect(),
        }
    }

    /// Componentwise least common multiple (max of exponents).
    pub fn lcm(&self, other: &ExpKey) -> ExpKey {
        ExpKey {
            slot: self.slot.max(other.slot),
            base: self
                .base
                .iter()
                .zip(other.base.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    /// True if the two keys share a variable or both touch the slot —
    /// i.e. their supports overlap (used to skip trivial critical pairs).
    pub fn overlaps(&self, other: &ExpKey) -> bool {
        (self.slot > 0 && other.slot > 0)
            || self
                .base
                .iter()
                .zip(other.base.iter())
                .any(|(a, b)| *a > 0 && *b > 0)
    }

    /// Rescales all numerators by p^k (lifting the key to level + k).
    pub fn scale(&self, factor: u32) -> ExpKey {
        ExpKey {
            slot: self.slot * factor,
            base: self.base.iter().map(|&e| e * factor).collect(),
        }
    }

    /// All numerators divided by `factor`; None unless all are divisible.
    pub fn unscale(&self, factor: u32) -> Option<ExpKey> {
        if !self.slot.is_multiple_of(factor) || self.base.iter().any(|&e| e % factor != 0) {
            return None;
        }
        Some(ExpKey {
            slot: self.slot / factor,
            base: self.base.iter().map(|&e| e / factor).collect(),
        })
    }
}

impl Ord for ExpKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // Graded lex: total base degree first, then the base exponent vector
        // (earlier variables dominate), then the slot.
        self.degree_num()
            .cmp(&other.degree_num())
            .then_with(|| self.base.cmp(&other.base))
            .then_with(|| self.slot.cmp(&other.slot))
    }
}

impl PartialOrd for ExpKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(slot: u32, base: &[u32]) -> ExpKey {
        ExpKey {
            slot,
            base: base.to_vec().into_boxed_slice(),
        }
    }

    #[test]
    fn graded_lex_order() {
        // Degree dominates.
        assert!(key(0, &[2, 0]) > key(0, &[0, 1]));
        // Same degree: earlier variable wins.
        assert!(key(0, &[1, 1, 0, 0]) > key(0, &[0, 0, 1, 1]));
        assert!(key(0, &[2, 0, 0]) > key(0, &[0, 2, 0]));
        // Slot breaks remaining ties.
        assert!(key(1, &[1, 0]) > key(0, &[1, 0]));
    }

    #[test]
    fn divisibility_and_quotient() {
        let a = key(1, &[1, 0]);
        let b = key(2, &[3, 1]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert_eq!(a.quotient_of(&b), key(1, &[2, 1]));
        assert_eq!(a.lcm(&key(0, &[0, 2])), key(1, &[1, 2]));
    }

    #[test]
    fn scaling_round_trips() {
        let a = key(1, &[2, 3]);
        assert_eq!(a.scale(3).unscale(3), Some(a.clone()));
        assert_eq!(key(1, &[2, 3]).unscale(2), None);
    }
}
