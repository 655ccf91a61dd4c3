//! Reduction engine for ideals generated by p-power multiples of monomials.
//!
//! When every generator is a single term p^v·m, the window span decomposes
//! monomial by monomial: the coefficients reachable at a window monomial w
//! form exactly p^K(w)·Z/p^n, where K(w) is the minimum, over generators
//! whose key divides w, of the generator's coefficient valuation plus a
//! borrow for the uniformizer slot. All verdicts from this engine are exact,
//! not merely window-qualified: divisibility is a local condition.

use crate::fracpoly::ExpKey;
use crate::window::{SlotRule, WindowSpec};

pub(crate) struct MonomialEngine {
    /// (key, coefficient valuation) per generator, keys in slot normal form.
    gens: Vec<(ExpKey, u32)>,
}

impl MonomialEngine {
    /// Accepts the generators if every one is a single term.
    pub(crate) fn try_new(spec: &WindowSpec, gens: &[Vec<(ExpKey, u64)>]) -> Option<Self> {
        let mut out = Vec::with_capacity(gens.len());
        for g in gens {
            match g.as_slice() {
                [(key, coeff)] => {
                    let mut v = 0u32;
                    let mut c = *coeff;
                    while v < spec.prec && c % spec.p == 0 {
                        c /= spec.p;
                        v += 1;
                    }
                    out.push((key.clone(), v));
                }
                _ => return None,
            }
        }
        Some(MonomialEngine { gens: out })
    }

    /// K(w): the minimal p-valuation a coefficient must have at w to lie in
    /// the span, or None when no generator divides w at all.
    pub(crate) fn key_valuation(&self, spec: &WindowSpec, w: &ExpKey) -> Option<u32> {
        let mut best: Option<u32> = None;
        for (k, v) in &self.gens {
            if !k.base_divides(w) {
                continue;
            }
            let need = match spec.slot_rule {
                SlotRule::None | SlotRule::Tilt => {
                    if k.slot > w.slot {
                        continue;
                    }
                    *v
                }
                SlotRule::Uniformizer => {
                    // A multiplier slot of w.slot − k.slot + unit wraps the
                    // uniformizer relation once, costing one power of p.
                    if k.slot > w.slot {
                        v + 1
                    } else {
                        *v
                    }
                }
            };
            best = Some(best.map_or(need, |b: u32| b.min(need)));
        }
        best
    }

    /// The additive order exponent of the class of w in the quotient:
    /// the class generates Z/p^a with a = min(K(w), n).
    pub(crate) fn class_modulus(&self, spec: &WindowSpec, w: &ExpKey) -> u32 {
        self.key_valuation(spec, w)
            .map_or(spec.prec, |k| k.min(spec.prec))
    }

    /// Canonical normal form of a single term: coefficient reduced mod p^a.
    pub(crate) fn nf_term(&self, spec: &WindowSpec, key: &ExpKey, coeff: u64) -> Option<(ExpKey, u64)> {
        let a = self.class_modulus(spec, key);
        let c = coeff % crate::exactnum::pow_u64(spec.p, a);
        (c != 0).then(|| (key.clone(), c))
    }
}
