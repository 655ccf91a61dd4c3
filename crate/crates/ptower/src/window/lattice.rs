//! Enumeration of window monomials: the exponent lattice of a truncated
//! ring at a fixed level, visited in a deterministic order.

use crate::fracpoly::ExpKey;
use crate::window::WindowSpec;

/// Visits every composition of `total` into `parts` nonnegative summands in
/// lexicographic order (first part largest last).
pub(crate) fn visit_compositions(total: u32, parts: usize, mut f: impl FnMut(&[u32])) {
    let mut buf = vec![0u32; parts];
    if parts == 0 {
        if total == 0 {
            f(&buf);
        }
        return;
    }
    fn rec(buf: &mut [u32], pos: usize, remaining: u32, f: &mut impl FnMut(&[u32])) {
        if pos + 1 == buf.len() {
            buf[pos] = remaining;
            let frozen: &[u32] = buf;
            f(frozen);
            return;
        }
        for v in 0..=remaining {
            buf[pos] = v;
            rec(buf, pos + 1, remaining - v, f);
        }
    }
    rec(&mut buf, 0, total, &mut f);
}

/// Visits all window monomials of exact base-degree numerator `d`, every
/// admissible slot value, ascending slot inside each base pattern.
pub(crate) fn visit_degree(spec: &WindowSpec, d: u32, mut f: impl FnMut(&ExpKey)) {
    let slot_bound = spec.slot_bound();
    visit_compositions(d, spec.nvars, |base| {
        for slot in 0..=slot_bound {
            let key = ExpKey {
                slot,
                base: base.to_vec().into_boxed_slice(),
            };
            f(&key);
        }
    });
}

/// Visits the whole window, degree by degree.
pub(crate) fn visit_window(spec: &WindowSpec, mut f: impl FnMut(&ExpKey)) {
    for d in 0..=spec.degree_bound() {
        visit_degree(spec, d, &mut f);
    }
}

/// Number of compositions of `total` into `parts` parts: C(total+parts−1, parts−1),
/// saturating at u64::MAX.
pub(crate) fn compositions_count(total: u32, parts: usize) -> u64 {
    if parts == 0 {
        return (total == 0) as u64;
    }
    binomial(total as u64 + parts as u64 - 1, parts as u64 - 1)
}

/// Total number of window monomials (all degrees, all slots), saturating.
pub(crate) fn window_size(spec: &WindowSpec) -> u64 {
    // Σ_{d ≤ bound} C(d+v−1, v−1) = C(bound+v, v).
    let per_slot = binomial(
        spec.degree_bound() as u64 + spec.nvars as u64,
        spec.nvars as u64,
    );
    per_slot.saturating_mul(spec.slot_bound() as u64 + 1)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}
