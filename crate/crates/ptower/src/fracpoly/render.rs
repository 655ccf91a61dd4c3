//! Canonical text rendering of sparse terms, e.g. `p^(1/2) * x^(3/4) * y`.
//!
//! The format is bit-exact so witnesses and reports are reproducible:
//! terms in descending graded-lex order joined by ` + `/` - `, coefficients
//! as balanced representatives in (−m/2, m/2], the slot factor first, base
//! variables in index order, exponents as reduced fractions.

use crate::fracpoly::key::ExpKey;

pub(crate) fn render_terms<'a>(
    modulus: u64,
    p: u64,
    level: u32,
    slot_name: &str,
    names: &[&str],
    terms: impl Iterator<Item = (&'a ExpKey, u64)>,
) -> String {
    let mut out = String::new();
    for (key, coeff) in terms {
        debug_assert!(coeff != 0 && coeff < modulus);
        let negative = coeff > modulus / 2;
        let magnitude = if negative { modulus - coeff } else { coeff };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&render_monomial(magnitude, key, p, level, slot_name, names));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn render_monomial(
    magnitude: u64,
    key: &ExpKey,
    p: u64,
    level: u32,
    slot_name: &str,
    names: &[&str],
) -> String {
    let mut factors: Vec<String> = Vec::new();
    if key.slot > 0 {
        factors.push(format!("{}{}", slot_name, exponent_suffix(key.slot, p, level)));
    }
    for (j, &e) in key.base.iter().enumerate() {
        if e > 0 {
            factors.push(format!("{}{}", names[j], exponent_suffix(e, p, level)));
        }
    }
    if factors.is_empty() {
        return magnitude.to_string();
    }
    let body = factors.join(" * ");
    if magnitude == 1 {
        body
    } else {
        format!("{} * {}", magnitude, body)
    }
}

/// Renders `^(num/p^level)` as a reduced fraction: empty for exponent 1,
/// `^k` for integers, `^(a/b)` otherwise.
fn exponent_suffix(num: u32, p: u64, level: u32) -> String {
    let mut num = num as u64;
    let mut den = 1u64;
    for _ in 0..level {
        den *= p;
    }
    while den > 1 && num.is_multiple_of(p) {
        num /= p;
        den /= p;
    }
    if den == 1 {
        if num == 1 {
            String::new()
        } else {
            format!("^{}", num)
        }
    } else {
        format!("^({}/{})", num, den)
    }
}
