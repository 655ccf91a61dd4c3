//! Exact arithmetic over Z/p^n with precision tracking, and the linear
//! algebra (Howell forms, membership, kernels, lengths) built on it.

mod matrix;
mod scalar;

pub use matrix::ZpNMatrix;
pub use scalar::PAdicScalar;

pub(crate) use scalar::{inv_mod, pow_u64};

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Visits every tuple in (Z/modulus)^len. Brute-force oracle helper.
    fn for_each_tuple(len: usize, modulus: u64, mut f: impl FnMut(&[u64])) {
        let mut v = vec![0u64; len];
        loop {
            f(&v);
            let mut k = 0;
            while k < len {
                v[k] += 1;
                if v[k] < modulus {
                    break;
                }
                v[k] = 0;
                k += 1;
            }
            if k == len {
                return;
            }
        }
    }

    fn mat_apply(m: &ZpNMatrix, c: &[u64], modulus: u64) -> Vec<u64> {
        let mut acc = vec![0u64; m.cols()];
        for (i, &ci) in c.iter().enumerate() {
            for (j, x) in acc.iter_mut().enumerate() {
                *x = (*x + ci * m.at(i, j)) % modulus;
            }
        }
        acc
    }

    /// Brute-force oracle: the full row span of `m` as a set of vectors.
    /// Independent of the Howell code by construction.
    fn span_by_enumeration(m: &ZpNMatrix) -> BTreeSet<Vec<u64>> {
        let modulus = pow_u64(m.p(), m.precision());
        let mut out = BTreeSet::new();
        for_each_tuple(m.rows(), modulus, |c| {
            out.insert(mat_apply(m, c, modulus));
        });
        out
    }

    fn small_test_matrices(p: u64, prec: u32) -> Vec<ZpNMatrix> {
        let m = pow_u64(p, prec) as i128;
        let samples: Vec<Vec<Vec<i128>>> = vec![
            vec![vec![2, 0], vec![0, 2]],
            vec![vec![1, 2, 3], vec![0, p as i128, 1], vec![p as i128, 0, 0]],
            vec![vec![p as i128, 1], vec![0, p as i128]],
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![m - 1, p as i128], vec![p as i128 * 2, 4]],
            vec![vec![2, 4, 6], vec![1, 2, 3]],
            vec![
                vec![p as i128, p as i128, 0],
                vec![0, p as i128, p as i128],
                vec![1, 0, 1],
            ],
        ];
        samples
            .into_iter()
            .map(|s| ZpNMatrix::from_rows(p, prec, &s))
            .collect()
    }

    #[test]
    fn howell_preserves_span_and_is_canonical() {
        for (p, prec) in [(2u64, 2u32), (2, 3), (3, 2)] {
            for m in small_test_matrices(p, prec) {
                let h = m.howell_form();
                assert_eq!(
                    span_by_enumeration(&m),
                    span_by_enumeration(&h),
                    "span changed under Howell, p={p} prec={prec}"
                );
                // Canonicity: Howell of the Howell form is itself.
                assert_eq!(h.howell_form(), h);
                // Canonicity across presentations: reordered plus duplicated
                // rows present the same span, so the form must not change.
                let mut doubled: Vec<Vec<i128>> = Vec::new();
                for i in (0..m.rows()).rev() {
                    doubled.push(m.row(i).iter().map(|&x| x as i128).collect());
                }
                for i in 0..m.rows() {
                    doubled.push(m.row(i).iter().map(|&x| x as i128).collect());
                }
                let m2 = ZpNMatrix::from_rows(p, prec, &doubled);
                assert_eq!(m2.howell_form(), h);
            }
        }
    }

    #[test]
    fn frozen_span_size_over_z4() {
        // diag(2, 2) over Z/4 spans exactly {0, (2,0), (0,2), (2,2)}.
        let m = ZpNMatrix::from_rows(2, 2, &[vec![2, 0], vec![0, 2]]);
        assert_eq!(span_by_enumeration(&m).len(), 4);
    }

    #[test]
    fn membership_matches_enumeration() {
        for (p, prec) in [(2u64, 3u32), (3, 2)] {
            let modulus = pow_u64(p, prec);
            for m in small_test_matrices(p, prec) {
                let span = span_by_enumeration(&m);
                for_each_tuple(m.cols(), modulus, |v| {
                    let got = m.solve_membership(v);
                    assert_eq!(
                        got.is_some(),
                        span.contains(v),
                        "membership mismatch at {v:?}"
                    );
                    if let Some(c) = got {
                        assert_eq!(
                            mat_apply(&m, &c, modulus),
                            v,
                            "certificate does not reproduce v"
                        );
                    }
                });
            }
        }
    }

    #[test]
    fn left_kernel_matches_enumeration() {
        for (p, prec) in [(2u64, 3u32), (3, 2)] {
            let modulus = pow_u64(p, prec);
            for m in small_test_matrices(p, prec) {
                let k = m.left_kernel();
                for i in 0..k.rows() {
                    let prod = mat_apply(&m, k.row(i), modulus);
                    assert!(prod.iter().all(|&x| x == 0), "kernel row fails");
                }
                let mut brute = BTreeSet::new();
                for_each_tuple(m.rows(), modulus, |c| {
                    if mat_apply(&m, c, modulus).iter().all(|&x| x == 0) {
                        brute.insert(c.to_vec());
                    }
                });
                assert_eq!(span_by_enumeration(&k), brute, "kernel span mismatch");
            }
        }
    }

    #[test]
    fn module_length_frozen_values() {
        // Z/p^2 as a quotient of Z/p^N, N >= 2: length 2.
        let m = ZpNMatrix::from_rows(3, 4, &[vec![9]]);
        assert_eq!(m.module_length().unwrap(), 2);
        // Zero module: length 0.
        let m = ZpNMatrix::from_rows(3, 4, &[vec![1]]);
        assert_eq!(m.module_length().unwrap(), 0);
        // Z/2 + Z/4 inside Z/8-modules: length 3.
        let m = ZpNMatrix::from_rows(2, 3, &[vec![2, 0], vec![0, 4]]);
        assert_eq!(m.module_length().unwrap(), 3);
        // A full-window summand is indistinguishable from a free one.
        let m = ZpNMatrix::zero(2, 3, 0, 1);
        assert!(matches!(
            m.module_length(),
            Err(crate::error::Error::NotFinite { .. })
        ));
    }

    #[test]
    fn module_length_matches_cardinality_oracle() {
        // Independent oracle: length = log_p(|ambient| / |span|).
        for (p, prec) in [(2u64, 3u32), (3, 2)] {
            for m in small_test_matrices(p, prec) {
                if let Ok(len) = m.module_length() {
                    let ambient = (pow_u64(p, prec) as f64).powi(m.cols() as i32);
                    let span = span_by_enumeration(&m).len() as f64;
                    let expect = (ambient / span).log(p as f64).round() as u64;
                    assert_eq!(len, expect, "length disagrees with cardinality");
                }
            }
        }
    }

    #[test]
    fn module_length_is_dimension_at_precision_one() {
        let m = ZpNMatrix::from_rows(2, 1, &[vec![1, 1, 0]]);
        assert_eq!(m.module_length().unwrap(), 2);
        let z = ZpNMatrix::zero(2, 1, 0, 3);
        assert_eq!(z.module_length().unwrap(), 3);
    }

    #[test]
    fn smith_valuations_examples() {
        let m = ZpNMatrix::from_rows(2, 3, &[vec![2, 0], vec![0, 4]]);
        assert_eq!(m.smith_valuations(), vec![1, 2]);
        let m = ZpNMatrix::from_rows(2, 3, &[vec![1, 1], vec![1, 3]]);
        assert_eq!(m.smith_valuations(), vec![0, 1]);
    }
}
