//! Sparse polynomials over F_p with p-power-denominator exponents and an
//! optional tilt variable.
//!
//! [`CharPPoly`] mirrors the mixed-characteristic type after reduction mod
//! p. The slot coordinate, when the tilt context is enabled, is the exponent
//! numerator of the tilt variable `t` — the element that replaces the
//! p-power roots of p on the characteristic-p side. Unlike the uniformizer,
//! `t` satisfies no folding relation; its degree is simply capped at `p`
//! (numerator ≤ p·p^level), which is as far as any kernel or Frobenius check
//! here ever looks. Products past the t-cap or the base-degree cap are
//! dropped with the `truncated` flag set.

use std::collections::BTreeMap;

use crate::fracpoly::key::ExpKey;
use crate::fracpoly::mixed::pow_u32;
use crate::fracpoly::render::render_terms;

#[derive(Clone, Debug)]
pub struct CharPPoly {
    p: u64,
    nvars: usize,
    level: u32,
    cap: u32,
    /// Whether the tilt variable t is in play (slot ≠ 0 allowed).
    tilt: bool,
    /// Nonzero coefficients mod p.
    terms: BTreeMap<ExpKey, u64>,
    truncated: bool,
}

impl CharPPoly {
    // ---- constructors -------------------------------------------------

    pub fn zero(p: u64, nvars: usize, cap: u32, tilt: bool) -> Self {
        CharPPoly {
            p,
            nvars,
            level: 0,
            cap,
            tilt,
            terms: BTreeMap::new(),
            truncated: false,
        }
    }

    pub fn constant(c: i128, p: u64, nvars: usize, cap: u32, tilt: bool) -> Self {
        let mut f = Self::zero(p, nvars, cap, tilt);
        let c = c.rem_euclid(p as i128) as u64;
        if c != 0 {
            f.terms.insert(ExpKey::unit(nvars), c);
        }
        f
    }

    pub fn variable(j: usize, p: u64, nvars: usize, cap: u32, tilt: bool) -> Self {
        assert!(j < nvars);
        let mut base = vec![0u32; nvars];
        base[j] = 1;
        Self::monomial(1, &base, 0, 0, p, nvars, cap, tilt)
    }

    /// The tilt-variable root t^(1/p^level).
    pub fn tilt_root(level: u32, p: u64, nvars: usize, cap: u32) -> Self {
        let mut f = Self::zero(p, nvars, cap, true);
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

    #[allow(clippy::too_many_arguments)]
    pub fn monomial(
        c: i128,
        base: &[u32],
        slot: u32,
        level: u32,
        p: u64,
        nvars: usize,
        cap: u32,
        tilt: bool,
    ) -> Self {
        assert_eq!(base.len(), nvars);
        assert!(tilt || slot == 0, "tilt variable used without tilt context");
        let mut f = Self::zero(p, nvars, cap, tilt);
        f.level = level;
        let unit = pow_u32(p, level);
        let key = ExpKey {
            slot,
            base: base.to_vec().into_boxed_slice(),
        };
        assert!(key.degree_num() <= cap * unit, "monomial exceeds degree cap");
        assert!(slot <= p as u32 * unit, "tilt exponent exceeds degree p");
        let c = c.rem_euclid(p as i128) as u64;
        if c != 0 {
            f.terms.insert(key, c);
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

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn tilt(&self) -> bool {
        self.tilt
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn level_unit(&self) -> u32 {
        pow_u32(self.p, self.level)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpKey, u64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coefficient(&self, key: &ExpKey) -> u64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&ExpKey, u64)> {
        self.terms.iter().next_back().map(|(k, &c)| (k, c))
    }

    pub(crate) fn set_level(&mut self, level: u32) {
        debug_assert!(self.terms.is_empty());
        self.level = level;
    }

    pub(crate) fn set_truncated(&mut self, truncated: bool) {
        self.truncated = truncated;
    }

    pub(crate) fn insert_term(&mut self, key: ExpKey, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        debug_assert!(self.tilt || key.slot == 0);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing = (*existing + c) % self.p;
                if *existing == 0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    // ---- level plumbing -------------------------------------------------

    pub fn at_level(&self, target: u32) -> CharPPoly {
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

    pub fn normalized(&self) -> CharPPoly {
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

    fn compatible(&self, other: &CharPPoly) -> (CharPPoly, CharPPoly) {
        assert_eq!(self.p, other.p, "mixed primes");
        assert_eq!(self.nvars, other.nvars, "mixed variable sets");
        let level = self.level.max(other.level);
        let cap = self.cap.min(other.cap);
        let tilt = self.tilt || other.tilt;
        let mut a = self.at_level(level);
        let mut b = other.at_level(level);
        a.tilt = tilt;
        b.tilt = tilt;
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

    // ---- ring operations ------------------------------------------------

    pub fn add(&self, other: &CharPPoly) -> CharPPoly {
        let (mut a, b) = self.compatible(other);
        a.truncated |= b.truncated;
        for (k, c) in b.terms {
            a.insert_term(k, c);
        }
        a
    }

    pub fn neg(&self) -> CharPPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.p - *c;
        }
        out
    }

    pub fn sub(&self, other: &CharPPoly) -> CharPPoly {
        self.add(&other.neg())
    }

    pub fn mul_scalar(&self, c: i128) -> CharPPoly {
        let c = c.rem_euclid(self.p as i128) as u64;
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .filter_map(|(k, &a)| {
                let v = (a * c) % self.p;
                (v != 0).then(|| (k.clone(), v))
            })
            .collect();
        out
    }

    pub fn mul(&self, other: &CharPPoly) -> CharPPoly {
        let (a, b) = self.compatible(other);
        let mut out = CharPPoly {
            terms: BTreeMap::new(),
            ..a.clone()
        };
        out.truncated = a.truncated || b.truncated;
        let unit = out.level_unit();
        let deg_bound = out.cap * unit;
        let slot_bound = out.p as u32 * unit;
        for (ka, &ca) in &a.terms {
            for (kb, &cb) in &b.terms {
                let key = ka.mul(kb);
                if key.degree_num() > deg_bound || key.slot > slot_bound {
                    out.truncated = true;
                    continue;
                }
                out.insert_term(key, (ca * cb) % out.p);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> CharPPoly {
        let mut acc = CharPPoly::constant(1, self.p, self.nvars, self.cap, self.tilt);
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

    // ---- Frobenius and roots ---------------------------------------------

    /// The Frobenius endomorphism f ↦ f^p, computed exponentwise (exact in
    /// characteristic p: coefficients are fixed, exponents multiply by p).
    pub fn frobenius(&self) -> CharPPoly {
        let mut out = self.clone();
        out.terms = BTreeMap::new();
        if self.level > 0 {
            out.level = self.level - 1;
        }
        let unit = out.level_unit();
        let deg_bound = out.cap * unit;
        let slot_bound = out.p as u32 * unit;
        for (k, &c) in &self.terms {
            let key = if self.level > 0 {
                k.clone()
            } else {
                k.scale(self.p as u32)
            };
            if key.degree_num() > deg_bound || key.slot > slot_bound {
                out.truncated = true;
                continue;
            }
            out.insert_term(key, c);
        }
        out
    }

    /// The exact p-th root taken monomial by monomial: exponents divide by
    /// p (level rises by one), coefficients are their own p-th roots in F_p.
    /// Frobenius ∘ pth_root is the identity.
    pub fn pth_root_monomialwise(&self) -> CharPPoly {
        let mut out = self.clone();
        out.level = self.level + 1;
        // Same numerators over p^(h+1): every exponent is divided by p.
        out
    }

    pub fn render(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.nvars);
        render_terms(
            self.p,
            self.p,
            self.level,
            "t",
            names,
            self.terms.iter().rev().map(|(k, &c)| (k, c)),
        )
    }
}

impl PartialEq for CharPPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.nvars != other.nvars {
            return false;
        }
        let a = self.normalized();
        let b = other.normalized();
        a.level == b.level && a.terms == b.terms
    }
}

impl Eq for CharPPoly {}
