//! Sparse polynomials with p-power-denominator exponents: the carrier type
//! for every ring element in this crate.
//!
//! [`FracPoly`] works over Z/p^n with a ramified uniformizer slot;
//! [`CharPPoly`] is its reduction mod p with an optional tilt variable.
//! Exponents are stored as numerators over a shared denominator p^h (the
//! *level* h), so level arithmetic is explicit and exact. Total base degree
//! is truncated at a cap D; operations that discard terms flag the result.

mod charp;
mod key;
mod mixed;
mod render;

pub use charp::CharPPoly;
pub use key::ExpKey;
pub use mixed::FracPoly;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PRIMES: [u64; 3] = [2, 3, 5];

    fn var(j: usize, p: u64, nvars: usize, prec: u32, cap: u32) -> FracPoly {
        FracPoly::variable(j, p, nvars, prec, cap)
    }

    /// Random polynomial whose every term has base degree ≤ max_term_deg
    /// (numerator at the given level), so products of a few factors stay
    /// inside the cap when max_term_deg is chosen small enough.
    #[allow(clippy::too_many_arguments)]
    fn random_poly(
        rng: &mut ChaCha8Rng,
        p: u64,
        nvars: usize,
        prec: u32,
        cap: u32,
        level: u32,
        max_term_deg: u32,
        with_slot: bool,
    ) -> FracPoly {
        let unit = (p as u32).pow(level);
        let modulus = p.pow(prec);
        let mut f = FracPoly::zero(p, nvars, prec, cap);
        for _ in 0..rng.gen_range(1..=4u32) {
            let c = rng.gen_range(0..modulus) as i128;
            let mut budget = max_term_deg;
            let mut base = vec![0u32; nvars];
            for e in base.iter_mut() {
                *e = rng.gen_range(0..=budget);
                budget -= *e;
            }
            let slot = if with_slot && unit > 1 {
                rng.gen_range(0..unit)
            } else {
                0
            };
            f = f.add(&FracPoly::monomial(
                c, &base, slot, level, p, nvars, prec, cap,
            ));
        }
        f
    }

    // ---- multiplication ------------------------------------------------

    #[test]
    fn uniformizer_relation_folds_to_p() {
        for p in PRIMES {
            // (p^(1/p)) · (p^(1/p))^(p−1) = p as a scalar.
            let u = FracPoly::uniformizer_root(1, p, 1, 4, 6);
            let prod = u.mul(&u.pow(p as u32 - 1));
            assert_eq!(prod, FracPoly::constant(p as i128, p, 1, 4, 6), "p={p}");
        }
    }

    #[test]
    fn fractional_exponents_add() {
        for p in PRIMES {
            // x^(1/p) · x^(1/p²) = x^((p+1)/p²).
            let a = FracPoly::monomial(1, &[1], 0, 1, p, 1, 4, 6);
            let b = FracPoly::monomial(1, &[1], 0, 2, p, 1, 4, 6);
            let expect = FracPoly::monomial(1, &[p as u32 + 1], 0, 2, p, 1, 4, 6);
            assert_eq!(a.mul(&b), expect, "p={p}");
        }
    }

    #[test]
    fn difference_of_squares() {
        for p in PRIMES {
            let x = var(0, p, 2, 4, 6);
            let y = var(1, p, 2, 4, 6);
            let lhs = x.sub(&y).mul(&x.add(&y));
            let expect = x.pow(2).sub(&y.pow(2));
            assert_eq!(lhs, expect, "p={p}");
        }
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in PRIMES {
            for _ in 0..40 {
                // Degree ≤ cap/3 per term keeps triple products cap-exact.
                let mk = |rng: &mut ChaCha8Rng| random_poly(rng, p, 3, 3, 9, 1, 3, true);
                let (f, g, h) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
                assert_eq!(f.mul(&g), g.mul(&f));
                assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
                assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
                assert_eq!(f.add(&g).add(&h), f.add(&g.add(&h)));
                assert_eq!(f.sub(&f), FracPoly::zero(p, 3, 3, 9));
            }
        }
    }

    #[test]
    fn cap_overflow_discards_and_flags() {
        let p = 2;
        let x = var(0, p, 1, 3, 4);
        let big = x.pow(3); // degree 3 of cap 4
        let prod = big.mul(&big); // degree 6 > 4: dropped
        assert!(prod.is_zero());
        assert!(prod.is_truncated());
        // In-cap products stay exact and unflagged.
        assert!(!x.pow(4).is_truncated());
    }

    #[test]
    fn precision_meets_at_minimum() {
        let p = 3;
        let a = FracPoly::constant(7, p, 1, 4, 6);
        let b = FracPoly::constant(5, p, 1, 2, 6);
        assert_eq!(a.add(&b).precision(), 2);
        assert_eq!(a.mul(&b).precision(), 2);
        // 7·5 = 35 ≡ 8 mod 9.
        assert_eq!(a.mul(&b), FracPoly::constant(8, p, 1, 2, 6));
    }

    #[test]
    fn levels_unify_to_max() {
        let p = 2;
        let x = var(0, p, 1, 4, 6);
        let xr = FracPoly::monomial(1, &[1], 0, 1, p, 1, 4, 6); // x^(1/2)
        let sum = x.add(&xr);
        assert_eq!(sum.level(), 1);
        assert_eq!(sum.num_terms(), 2);
        // Level normalization makes representations at different levels equal.
        assert_eq!(x.at_level(3), x);
    }

    #[test]
    fn exact_division_by_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in PRIMES {
            let f = random_poly(&mut rng, p, 2, 4, 6, 1, 4, true);
            let quot = f.mul_pow_p(1).exact_divide_by_p().unwrap();
            assert_eq!(quot.precision(), 3);
            assert_eq!(quot, f.truncate_prec(3));
        }
        // A unit coefficient is not divisible.
        let one = FracPoly::constant(1, 2, 1, 4, 6);
        assert!(one.exact_divide_by_p().is_err());
    }

    // ---- Frobenius ------------------------------------------------------

    #[test]
    fn frobenius_on_monomials() {
        for p in PRIMES {
            // x^(1/p) ↦ x.
            let xr = FracPoly::monomial(1, &[1, 0], 0, 1, p, 2, 4, 6);
            assert_eq!(xr.frobenius_substitute().unwrap(), var(0, p, 2, 4, 6));
            // 2x + 3y² ↦ 2x^p + 3y^(2p).
            let f = var(0, p, 2, 4, 2 * p as u32 + 1)
                .mul_scalar(2)
                .add(&var(1, p, 2, 4, 2 * p as u32 + 1).pow(2).mul_scalar(3));
            let expect = FracPoly::monomial(2, &[p as u32, 0], 0, 0, p, 2, 4, 2 * p as u32 + 1)
                .add(&FracPoly::monomial(
                    3,
                    &[0, 2 * p as u32],
                    0,
                    0,
                    p,
                    2,
                    4,
                    2 * p as u32 + 1,
                ));
            assert_eq!(f.frobenius_substitute().unwrap(), expect, "p={p}");
        }
    }

    #[test]
    fn frobenius_rejects_ramified_input() {
        let u = FracPoly::uniformizer_root(1, 2, 1, 4, 6);
        assert!(matches!(
            u.frobenius_substitute(),
            Err(crate::Error::RamifiedInput)
        ));
    }

    #[test]
    fn frobenius_is_ring_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for p in PRIMES {
            for _ in 0..25 {
                let cap = 4 * p as u32;
                let f = random_poly(&mut rng, p, 2, 3, cap, 1, 2, false);
                let g = random_poly(&mut rng, p, 2, 3, cap, 1, 2, false);
                let phi = |h: &FracPoly| h.frobenius_substitute().unwrap();
                assert_eq!(phi(&f.mul(&g)), phi(&f).mul(&phi(&g)));
                assert_eq!(phi(&f.add(&g)), phi(&f).add(&phi(&g)));
            }
        }
    }

    #[test]
    fn frobenius_lifts_the_p_power_map() {
        // φ(f) − f^p is divisible by p: 500 random polynomials across primes.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 500 {
            for p in PRIMES {
                let cap = 2 * p as u32;
                let f = random_poly(&mut rng, p, 2, 3, cap, 0, 2, false);
                let diff = f.frobenius_substitute().unwrap().sub(&f.pow(p as u32));
                assert!(
                    diff.exact_divide_by_p().is_ok(),
                    "φ(f) ≢ f^p mod {p} for f = {}",
                    f.render(&["x", "y"])
                );
                checked += 1;
            }
        }
    }

    // ---- reduction mod p and the tilt ------------------------------------

    #[test]
    fn reduce_mod_p_examples() {
        for p in PRIMES {
            let x = var(0, p, 2, 4, 6);
            let y = var(1, p, 2, 4, 6);
            // p·x ↦ 0.
            assert!(x.mul_pow_p(1).reduce_mod_p(false).is_zero());
            // x + p·y ↦ x.
            let f = x.add(&y.mul_pow_p(1));
            assert_eq!(f.reduce_mod_p(false), CharPPoly::variable(0, p, 2, 6, false));
            // Without tilt context the uniformizer class maps to 0.
            let ux = FracPoly::uniformizer_root(1, p, 2, 4, 6).mul(&x);
            assert!(ux.reduce_mod_p(false).is_zero());
            // With tilt context p^(1/p)·x ↦ t^(1/p)·x.
            let expect = CharPPoly::tilt_root(1, p, 2, 6).mul(&CharPPoly::variable(0, p, 2, 6, true));
            assert_eq!(ux.reduce_mod_p(true), expect, "p={p}");
        }
    }

    #[test]
    fn reduce_mod_p_is_a_ring_homomorphism_on_unramified_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for p in PRIMES {
            for _ in 0..25 {
                let f = random_poly(&mut rng, p, 2, 3, 9, 1, 3, false);
                let g = random_poly(&mut rng, p, 2, 3, 9, 1, 3, false);
                let red = |h: &FracPoly| h.reduce_mod_p(false);
                assert_eq!(red(&f.add(&g)), red(&f).add(&red(&g)));
                assert_eq!(red(&f.mul(&g)), red(&f).mul(&red(&g)));
                // Kernel contains (p).
                assert!(red(&f.mul_pow_p(1)).is_zero());
            }
        }
    }

    #[test]
    fn tilt_reduction_matches_products_below_the_wrap() {
        // Multiplicativity holds as long as uniformizer exponents do not
        // wrap past 1; at the wrap the mixed side becomes divisible by p
        // while the tilt side keeps t — the quotient by (t) reconciles them.
        let p = 3;
        let u = FracPoly::uniformizer_root(1, p, 1, 4, 6); // p^(1/3)
        let red = |h: &FracPoly| h.reduce_mod_p(true);
        assert_eq!(red(&u.pow(2)), red(&u).mul(&red(&u)));
        // The wrap itself: (p^(1/3))^3 = p ↦ 0, while t^(1/3)·t^(2/3) = t.
        assert!(red(&u.pow(3)).is_zero());
        let t = CharPPoly::tilt_root(1, p, 1, 6);
        assert_eq!(t.mul(&t.pow(2)), CharPPoly::monomial(1, &[0], 3, 1, p, 1, 6, true));
    }

    // ---- characteristic-p operations --------------------------------------

    #[test]
    fn pth_root_examples() {
        for p in PRIMES {
            // x ↦ x^(1/p).
            let x = CharPPoly::variable(0, p, 2, 6, true);
            assert_eq!(
                x.pth_root_monomialwise(),
                CharPPoly::monomial(1, &[1, 0], 0, 1, p, 2, 6, true)
            );
            // t·x² ↦ t^(1/p)·x^(2/p).
            let tx2 = CharPPoly::monomial(1, &[2, 0], p as u32, 1, p, 2, 6, true);
            let root = tx2.pth_root_monomialwise();
            assert_eq!(
                root,
                CharPPoly::monomial(1, &[2, 0], p as u32, 2, p, 2, 6, true)
            );
            assert_eq!(root.frobenius(), tx2, "p={p}");
        }
    }

    #[test]
    fn frobenius_after_pth_root_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let mut checked = 0;
        while checked < 100 {
            for p in PRIMES {
                let f = random_poly(&mut rng, p, 2, 1, 8, 1, 4, true).reduce_mod_p(true);
                assert_eq!(f.pth_root_monomialwise().frobenius(), f);
                checked += 1;
            }
        }
    }

    #[test]
    fn charp_frobenius_multiplies_exponents() {
        let p = 2;
        // t^(1/2)·x^(3/2) ↦ t·x^3 at level 0.
        let f = CharPPoly::monomial(1, &[3], 1, 1, p, 1, 6, true);
        let img = f.frobenius();
        assert_eq!(img, CharPPoly::monomial(1, &[3], 1, 0, p, 1, 6, true));
        assert_eq!(img.normalized().level(), 0);
    }

    // ---- rendering --------------------------------------------------------

    #[test]
    fn canonical_rendering() {
        // p = 2, level 2: slot 2/4 = 1/2, base (3, 4)/4 → the documented form.
        let m = FracPoly::monomial(1, &[3, 4], 2, 2, 2, 2, 4, 6);
        assert_eq!(m.render(&["x", "y"]), "p^(1/2) * x^(3/4) * y");

        // Balanced signs across terms, descending graded-lex order.
        let p = 2u64;
        let pos = FracPoly::monomial(1, &[1, 1, 0, 0], 0, 1, p, 4, 4, 6);
        let neg = FracPoly::monomial(-1, &[0, 0, 1, 1], 0, 1, p, 4, 4, 6);
        assert_eq!(
            pos.add(&neg).render(&["x", "y", "z", "w"]),
            "x^(1/2) * y^(1/2) - z^(1/2) * w^(1/2)"
        );

        // Coefficients, integer exponents, constants, zero.
        let f = FracPoly::monomial(2, &[2], 0, 0, 3, 1, 4, 6);
        assert_eq!(f.render(&["x"]), "2 * x^2");
        assert_eq!(FracPoly::constant(-3, 2, 1, 3, 6).render(&["x"]), "-3");
        assert_eq!(FracPoly::zero(5, 1, 2, 6).render(&["x"]), "0");

        // Char-p side uses the tilt variable's name.
        let t = CharPPoly::tilt_root(2, 3, 1, 6);
        assert_eq!(t.render(&["x"]), "t^(1/9)");
        // 2 ≡ −1 mod 3 renders with the balanced sign.
        let tx = CharPPoly::monomial(2, &[1], 9, 2, 3, 1, 6, true);
        assert_eq!(tx.render(&["x"]), "-t * x^(1/9)");
    }

    #[test]
    fn equality_ignores_representation_level() {
        let p = 2;
        let x0 = var(0, p, 1, 4, 6);
        let x_hi = FracPoly::monomial(1, &[4], 0, 2, p, 1, 4, 6);
        assert_eq!(x0, x_hi);
        assert_ne!(x0, x0.truncate_prec(3));
    }
}
