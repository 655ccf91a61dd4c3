//! Sparse polynomials over Z/p^n with p-power-denominator exponents and a
//! ramified uniformizer.
//!
//! A [`FracPoly`] at level `h` is a finite sum of terms
//! `c · p^(s/p^h) · x_1^(k_1/p^h) ⋯ x_d^(k_d/p^h)` with `c ∈ Z/p^n`. The
//! uniformizer exponent is kept in normal form `s ∈ [0, p^h)`: whenever a
//! product pushes `s` past `p^h`, the relation `(p^(1/p^h))^(p^h) = p` folds
//! the integer part into the coefficient. Total base degree is capped at `D`
//! (numerator ≤ D·p^h); products that overflow the cap drop the offending
//! terms and set the `truncated` flag so downstream checks know the value is
//! a window approximation rather than the exact element.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactnum::pow_u64;
use crate::fracpoly::charp::CharPPoly;
use crate::fracpoly::key::ExpKey;
use crate::fracpoly::render::render_terms;

#[derive(Clone, Debug)]
pub struct FracPoly {
    p: u64,
    nvars: usize,
    /// Exponent level `h`: all exponents are numerators over p^h.
    level: u32,
    /// Coefficient precision: coefficients live in Z/p^prec.
    prec: u32,
    /// Degree cap D in whole units of base degree.
    cap: u32,
    /// Nonzero coefficients (mod p^prec), keyed by exponent.
    terms: BTreeMap<ExpKey, u64>,
    /// Set when a cap overflow discarded at least one product term.
    truncated: bool,
}

impl FracPoly {
    // ---- constructors -------------------------------------------------

    pub fn zero(p: u64, nvars: usize, prec: u32, cap: u32) -> Self {
        assert!(prec >= 1, "precision must be at least 1");
        FracPoly {
            p,
            nvars,
            level: 0,
            prec,
            cap,
            terms: BTreeMap::new(),
            truncated: false,
        }
    }

    pub fn constant(c: i128, p: u64, nvars: usize, prec: u32, cap: u32) -> Self {
        let mut f = Self::zero(p, nvars, prec, cap);
        let m = f.modulus() as i128;
        let c = c.rem_euclid(m) as u64;
        if c != 0 {
            f.terms.insert(ExpKey::unit(nvars), c);
        }
        f
    }

    /// The variable `x_j` (0-based index).
    pub fn variable(j: usize, p: u64, nvars: usize, prec: u32, cap: u32) -> Self {
        assert!(j < nvars);
        let mut base = vec![0u32; nvars];
        base[j] = 1;
        Self::monomial(1, &base, 0, 0, p, nvars, prec, cap)
    }

    /// The uniformizer root p^(1/p^level).
    pub fn uniformizer_root(level: u32, p: u64, nvars: usize, prec: u32, cap: u32) -> Self {
        if level == 0 {
            return Self::constant(p as i128, p, nvars, prec, cap);
        }
        let mut f = Self::zero(p, nvars, prec, cap);
        f.level = level;
        f.terms.insert(
            ExpKey {
                slot: 1,
                base: vec![0; nvars].into_boxed_slice(),
            },
            1,
        );
        f
    }

    /// A single term `c · p^(slot/p^level) · Π x_j^(base_j/p^level)`.
    ///
    /// The slot is reduced to its normal form in `[0, p^level)` with the
    /// integer part folded into the coefficient; terms over the cap panic
    /// (constructors build in-window data; only products may overflow).
    #[allow(clippy::too_many_arguments)]
    pub fn monomial(
        c: i128,
        base: &[u32],
        slot: u32,
        level: u32,
        p: u64,
        nvars: usize,
        prec: u32,
        cap: u32,
    ) -> Self {
        assert_eq!(base.len(), nvars);
        let mut f = Self::zero(p, nvars, prec, cap);
        f.level = level;
        let m = f.modulus();
        let mut coeff = (c.rem_euclid(m as i128)) as u64;
        let unit = pow_u32(p, level);
        let (wraps, slot) = (slot / unit, slot % unit);
        for _ in 0..wraps {
            coeff = mul_mod(coeff, p, m);
        }
        let key = ExpKey {
            slot,
            base: base.to_vec().into_boxed_slice(),
        };
        assert!(
            key.degree_num() <= cap * unit,
            "monomial constructor exceeds the degree cap"
        );
        if coeff != 0 {
            f.terms.insert(key, coeff);
        }
        f
    }

    // ---- accessors -----------------------------------------------------

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// True when some operation discarded terms past the degree cap.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn modulus(&self) -> u64 {
        pow_u64(self.p, self.prec)
    }

    /// p^level — the common exponent denominator.
    pub fn level_unit(&self) -> u32 {
        pow_u32(self.p, self.level)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpKey, u64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coefficient(&self, key: &ExpKey) -> u64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    /// The graded-lex-largest term, if any.
    pub fn leading_term(&self) -> Option<(&ExpKey, u64)> {
        self.terms.iter().next_back().map(|(k, &c)| (k, c))
    }

    // ---- level and precision plumbing ---------------------------------

    /// Rewrites the element at level `target ≥ self.level` (numerators scale
    /// by p^(target − level); the represented element is unchanged).
    pub fn at_level(&self, target: u32) -> FracPoly {
        assert!(target >= self.level);
        if target == self.level {
            return self.clone();
        }
        let factor = pow_u32(self.p, target - self.level);
        let mut out = self.clone();
        out.level = target;
        out.terms = self
            .terms
            .iter()
            .map(|(k, &c)| (k.scale(factor), c))
            .collect();
        out
    }

    /// Drops the level to the smallest one representing the same element.
    pub fn normalized(&self) -> FracPoly {
        let mut out = self.clone();
        while out.level > 0 {
            let reduced: Option<BTreeMap<ExpKey, u64>> = out
                .terms
                .iter()
                .map(|(k, &c)| k.unscale(out.p as u32).map(|k2| (k2, c)))
                .collect();
            match reduced {
                Some(t) => {
                    out.terms = t;
                    out.level -= 1;
                }
                None => break,
            }
        }
        out
    }

    /// Re-hosts the element under a different degree cap. Every present
    /// term must fit the new cap; nothing is dropped.
    pub fn with_cap(&self, cap: u32) -> FracPoly {
        let bound = cap * self.level_unit();
        assert!(
            self.terms.keys().all(|k| k.degree_num() <= bound),
            "with_cap would drop terms"
        );
        let mut out = self.clone();
        out.cap = cap;
        out
    }

    /// Reduces every coefficient to the lower precision `n ≤ self.prec`.
    pub fn truncate_prec(&self, n: u32) -> FracPoly {
        assert!(n >= 1 && n <= self.prec);
        let mut out = self.clone();
        out.prec = n;
        let m = out.modulus();
        out.terms = self
            .terms
            .iter()
            .filter_map(|(k, &c)| {
                let c = c % m;
                (c != 0).then(|| (k.clone(), c))
            })
            .collect();
        out
    }

    fn compatible(&self, other: &FracPoly) -> (FracPoly, FracPoly) {
        assert_eq!(self.p, other.p, "mixed primes");
        assert_eq!(self.nvars, other.nvars, "mixed variable sets");
        let level = self.level.max(other.level);
        let prec = self.prec.min(other.prec);
        let cap = self.cap.min(other.cap);
        let mut a = self.at_level(level).truncate_prec(prec);
        let mut b = other.at_level(level).truncate_prec(prec);
        a.enforce_cap(cap);
        b.enforce_cap(cap);
        (a, b)
    }

    fn enforce_cap(&mut self, cap: u32) {
        self.cap = cap;
        let bound = cap * self.level_unit();
        if self.terms.keys().any(|k| k.degree_num() > bound) {
            self.truncated = true;
            self.terms.retain(|k, _| k.degree_num() <= bound);
        }
    }

    fn insert_term(&mut self, key: ExpKey, c: u64) {
        let m = self.modulus();
        let c = c % m;
        if c == 0 {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing = (*existing + c) % m;
                if *existing == 0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    // ---- ring operations ------------------------------------------------

    pub fn add(&self, other: &FracPoly) -> FracPoly {
        let (mut a, b) = self.compatible(other);
        a.truncated |= b.truncated;
        for (k, c) in b.terms {
            a.insert_term(k, c);
        }
        a
    }

    pub fn neg(&self) -> FracPoly {
        let m = self.modulus();
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = m - *c;
        }
        out
    }

    pub fn sub(&self, other: &FracPoly) -> FracPoly {
        self.add(&other.neg())
    }

    pub fn mul_scalar(&self, c: i128) -> FracPoly {
        let m = self.modulus();
        let c = c.rem_euclid(m as i128) as u64;
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .filter_map(|(k, &a)| {
                let v = mul_mod(a, c, m);
                (v != 0).then(|| (k.clone(), v))
            })
            .collect();
        out
    }

    pub fn mul(&self, other: &FracPoly) -> FracPoly {
        let (a, b) = self.compatible(other);
        let mut out = FracPoly {
            terms: BTreeMap::new(),
            ..a.clone()
        };
        out.truncated = a.truncated || b.truncated;
        let m = out.modulus();
        let unit = out.level_unit();
        let deg_bound = out.cap * unit;
        for (ka, &ca) in &a.terms {
            for (kb, &cb) in &b.terms {
                let mut key = ka.mul(kb);
                if key.degree_num() > deg_bound {
                    out.truncated = true;
                    continue;
                }
                let mut c = mul_mod(ca, cb, m);
                // Fold the uniformizer relation (p^(1/p^h))^(p^h) = p.
                while key.slot >= unit {
                    key.slot -= unit;
                    c = mul_mod(c, out.p, m);
                }
                out.insert_term(key, c);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> FracPoly {
        let mut acc = FracPoly::constant(1, self.p, self.nvars, self.prec, self.cap);
        // Keep the base's level so powers of level-h elements stay at level h.
        acc = acc.at_level(self.level);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplies by the scalar p^k.
    pub fn mul_pow_p(&self, k: u32) -> FracPoly {
        self.mul_scalar(pow_u64(self.p, k.min(self.prec)) as i128 % self.modulus() as i128)
    }

    /// Divides every coefficient exactly by p, dropping one digit of
    /// precision. Fails unless every coefficient is divisible by p.
    pub fn exact_divide_by_p(&self) -> Result<FracPoly> {
        if self.prec < 2 {
            return Err(Error::PrecisionExhausted {
                needed: 2,
                have: self.prec,
            });
        }
        let mut out = self.clone();
        out.prec = self.prec - 1;
        let m = out.modulus();
        let mut terms = BTreeMap::new();
        for (k, &c) in &self.terms {
            if c % self.p != 0 {
                return Err(Error::NotDivisible {
                    p: self.p,
                    residue: c,
                });
            }
            let q = (c / self.p) % m;
            if q != 0 {
                terms.insert(k.clone(), q);
            }
        }
        out.terms = terms;
        Ok(out)
    }

    // ---- Frobenius and reduction ---------------------------------------

    /// The Frobenius-lift substitution x^e ↦ x^(pe) with coefficients fixed.
    /// Only defined away from the ramified uniformizer.
    pub fn frobenius_substitute(&self) -> Result<FracPoly> {
        if self.terms.keys().any(|k| k.slot != 0) {
            return Err(Error::RamifiedInput);
        }
        let mut out = self.clone();
        out.terms = BTreeMap::new();
        if self.level > 0 {
            // Numerators over p^h scale by p: same numerators over p^(h−1).
            out.level = self.level - 1;
        }
        let deg_bound = out.cap * pow_u32(out.p, out.level);
        for (k, &c) in &self.terms {
            let key = if self.level > 0 {
                k.clone()
            } else {
                k.scale(self.p as u32)
            };
            if key.degree_num() > deg_bound {
                out.truncated = true;
                continue;
            }
            out.insert_term(key, c);
        }
        Ok(out)
    }

    /// Reduction mod p. With `tilt` enabled the uniformizer class survives
    /// as the tilt variable (p^(s/p^h) ↦ t^(s/p^h)); otherwise every term
    /// with a ramified factor maps to 0.
    pub fn reduce_mod_p(&self, tilt: bool) -> CharPPoly {
        let mut out = CharPPoly::zero(self.p, self.nvars, self.cap, tilt);
        out.set_level(self.level);
        out.set_truncated(self.truncated);
        for (k, &c) in &self.terms {
            let c = c % self.p;
            if c == 0 {
                continue;
            }
            if k.slot > 0 && !tilt {
                continue;
            }
            out.insert_term(k.clone(), c);
        }
        out
    }

    /// Substitutes `images[j]` for `x_j`. Defined for integer exponents
    /// only; the element is level-normalized first.
    pub fn substitute(&self, images: &[FracPoly]) -> Result<FracPoly> {
        assert_eq!(images.len(), self.nvars);
        let f = self.normalized();
        if f.level != 0 {
            return Err(Error::Validation(
                "substitution requires integer exponents".into(),
            ));
        }
        let mut out = FracPoly::zero(self.p, self.nvars, self.prec, self.cap);
        for (k, &c) in &f.terms {
            let mut term = FracPoly::constant(c as i128, self.p, self.nvars, self.prec, self.cap);
            if k.slot > 0 {
                // At level 0 a residual slot is a whole power of p.
                term = term.mul_pow_p(k.slot);
            }
            for (j, &e) in k.base.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[j].pow(e));
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Canonical text rendering; `names` supplies the base-variable names.
    pub fn render(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.nvars);
        render_terms(
            self.modulus(),
            self.p,
            self.level,
            "p",
            names,
            self.terms.iter().rev().map(|(k, &c)| (k, c)),
        )
    }
}

impl PartialEq for FracPoly {
    /// Equality of the represented elements: same prime, variable count,
    /// precision, and terms after level normalization. The cap and the
    /// truncation flag are bookkeeping, not part of the value.
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.nvars != other.nvars || self.prec != other.prec {
            return false;
        }
        let a = self.normalized();
        let b = other.normalized();
        a.level == b.level && a.terms == b.terms
    }
}

impl Eq for FracPoly {}

pub(crate) fn pow_u32(p: u64, e: u32) -> u32 {
    let v = pow_u64(p, e);
    u32::try_from(v).expect("exponent denominator overflows u32")
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}
