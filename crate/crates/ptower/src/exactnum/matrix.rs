//! Dense matrices over Z/p^n and the row-space algorithms the rest of the
//! crate leans on: Howell normal form (canonical row spans over a chain
//! ring), membership solving, left kernels, and diagonalization for module
//! lengths.
//!
//! Over Z/p^n a row-echelon form does not determine the row span: the span of
//! a row with pivot p^v also contains p^(n-v) times its tail, which echelon
//! reduction never exposes. The Howell form adds those "shadow" rows during
//! elimination, giving a canonical form with the property that elements of
//! the span supported past column j are spanned by the rows with pivots past
//! column j. That property is what makes greedy membership solving exact.

use super::scalar::{inv_mod, pow_u64};
use crate::error::{Error, Result};

/// A rows x cols matrix over Z/p^prec, row-major, canonical residues.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZpNMatrix {
    p: u64,
    prec: u32,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZpNMatrix {
    pub fn zero(p: u64, prec: u32, rows: usize, cols: usize) -> Self {
        ZpNMatrix {
            p,
            prec,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, prec: u32, n: usize) -> Self {
        let mut m = Self::zero(p, prec, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from rows of i128 values, reducing each mod p^prec.
    pub fn from_rows(p: u64, prec: u32, rows: &[Vec<i128>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let modulus = pow_u64(p, prec) as i128;
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            for &v in r {
                data.push(v.rem_euclid(modulus) as u64);
            }
        }
        ZpNMatrix {
            p,
            prec,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        let m = pow_u64(self.p, self.prec);
        self.data[r * self.cols + c] = v % m;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn modulus(&self) -> u64 {
        pow_u64(self.p, self.prec)
    }

    /// Howell normal form of the row span.
    pub fn howell_form(&self) -> ZpNMatrix {
        self.howell_with_transform().0
    }

    /// Howell normal form H together with a transform T such that H = T * self.
    ///
    /// T records every row operation including the shadow rows, so membership
    /// certificates can be expressed in terms of the original rows.
    pub fn howell_with_transform(&self) -> (ZpNMatrix, ZpNMatrix) {
        let m = self.modulus();
        let p = self.p;
        let n = self.prec;
        // Work rows carry (entries, transform-entries).
        let mut work: Vec<(Vec<u64>, Vec<u64>)> = (0..self.rows)
            .map(|i| {
                let mut t = vec![0u64; self.rows];
                t[i] = 1;
                (self.row(i).to_vec(), t)
            })
            .filter(|(r, _)| r.iter().any(|&x| x != 0))
            .collect();
        let mut out: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();

        for col in 0..self.cols {
            // Rows in `work` all have zeros before `col` (maintained below).
            // Pick the candidate with minimal valuation at this column.
            let mut best: Option<(usize, u32)> = None;
            for (i, (r, _)) in work.iter().enumerate() {
                if r[col] == 0 {
                    continue;
                }
                let v = val_p(r[col], p);
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let Some((idx, v)) = best else { continue };
            let (mut pivot, mut tpivot) = work.swap_remove(idx);
            // Normalize the pivot entry to exactly p^v.
            let unit = pivot[col] / pow_u64(p, v);
            let uinv = inv_mod(unit % m, m);
            scale_row(&mut pivot, uinv, m);
            scale_row(&mut tpivot, uinv, m);
            // Eliminate the column from every other work row.
            let pv = pow_u64(p, v);
            let mut next_work = Vec::with_capacity(work.len() + 1);
            for (mut r, mut t) in work {
                if r[col] != 0 {
                    let q = r[col] / pv; // exact: v was minimal
                    sub_scaled(&mut r, &pivot, q, m);
                    sub_scaled(&mut t, &tpivot, q, m);
                }
                if r.iter().any(|&x| x != 0) {
                    next_work.push((r, t));
                }
            }
            // Shadow row: p^(n-v) * pivot has a zero at `col` but its tail is
            // still in the span and must be available for later columns.
            if v > 0 {
                let shadow_scale = pow_u64(p, n - v);
                let mut srow = pivot.clone();
                let mut strow = tpivot.clone();
                scale_row(&mut srow, shadow_scale, m);
                scale_row(&mut strow, shadow_scale, m);
                debug_assert_eq!(srow[col], 0);
                if srow.iter().any(|&x| x != 0) {
                    next_work.push((srow, strow));
                }
            }
            work = next_work;
            out.push((pivot, tpivot));
        }

        // Back-reduction: entries above a pivot p^v are reduced mod p^v.
        for j in 0..out.len() {
            let (pcol, pval) = {
                let r = &out[j].0;
                let c = r.iter().position(|&x| x != 0).unwrap();
                (c, r[c])
            };
            for i in 0..j {
                let e = out[i].0[pcol];
                let q = e / pval;
                if q != 0 {
                    let (pivot_row, pivot_t) = (out[j].0.clone(), out[j].1.clone());
                    sub_scaled(&mut out[i].0, &pivot_row, q, m);
                    sub_scaled(&mut out[i].1, &pivot_t, q, m);
                }
            }
        }

        let h = ZpNMatrix {
            p,
            prec: n,
            rows: out.len(),
            cols: self.cols,
            data: out.iter().flat_map(|(r, _)| r.iter().copied()).collect(),
        };
        let t = ZpNMatrix {
            p,
            prec: n,
            rows: out.len(),
            cols: self.rows,
            data: out.iter().flat_map(|(_, t)| t.iter().copied()).collect(),
        };
        (h, t)
    }

    /// Decides whether v lies in the row span; on success returns
    /// coefficients c with c * self = v (an explicit membership certificate).
    pub fn solve_membership(&self, v: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(v.len(), self.cols);
        let m = self.modulus();
        let p = self.p;
        let (h, t) = self.howell_with_transform();
        let mut residual: Vec<u64> = v.iter().map(|&x| x % m).collect();
        let mut hcoef = vec![0u64; h.rows];
        for (i, coef) in hcoef.iter_mut().enumerate() {
            let row = h.row(i);
            let pcol = row.iter().position(|&x| x != 0).unwrap();
            if residual[pcol] == 0 {
                continue;
            }
            let pval = row[pcol]; // p^v by construction
            if !residual[pcol].is_multiple_of(pval) {
                return None;
            }
            let q = residual[pcol] / pval;
            sub_scaled(&mut residual, row, q, m);
            *coef = q;
        }
        if residual.iter().any(|&x| x != 0) {
            return None;
        }
        // Pull coefficients back to the original rows through the transform.
        let mut c = vec![0u64; self.rows];
        for (i, &hc) in hcoef.iter().enumerate() {
            if hc == 0 {
                continue;
            }
            for (j, slot) in c.iter_mut().enumerate() {
                let add = hc as u128 * t.at(i, j) as u128 % m as u128;
                *slot = ((*slot as u128 + add) % m as u128) as u64;
            }
        }
        debug_assert!({
            let mut check = vec![0u64; self.cols];
            for (j, &cj) in c.iter().enumerate() {
                for (k, x) in check.iter_mut().enumerate() {
                    let add = cj as u128 * self.at(j, k) as u128 % m as u128;
                    *x = ((*x as u128 + add) % m as u128) as u64;
                }
            }
            check == v.iter().map(|&x| x % m).collect::<Vec<_>>()
        });
        let _ = p;
        Some(c)
    }

    /// Generators of the left kernel {c : c * self = 0}.
    ///
    /// Computed by running Howell on [self | I]: rows of the result whose
    /// matrix part vanished have kernel vectors in the identity part, and the
    /// Howell property guarantees those rows span the whole kernel.
    pub fn left_kernel(&self) -> ZpNMatrix {
        let aug_cols = self.cols + self.rows;
        let mut aug = ZpNMatrix::zero(self.p, self.prec, self.rows, aug_cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j));
            }
            aug.set(i, self.cols + i, 1);
        }
        let h = aug.howell_form();
        let mut rows: Vec<Vec<i128>> = Vec::new();
        for i in 0..h.rows {
            let r = h.row(i);
            if r[..self.cols].iter().all(|&x| x == 0) {
                rows.push(r[self.cols..].iter().map(|&x| x as i128).collect());
            }
        }
        if rows.is_empty() {
            return ZpNMatrix::zero(self.p, self.prec, 0, self.rows);
        }
        ZpNMatrix::from_rows(self.p, self.prec, &rows)
    }

    /// Valuations of the diagonal in a Smith-style decomposition: the row
    /// span equals that of a diagonal matrix diag(p^v1, ..., p^vr) after
    /// invertible row and column operations. Entries are sorted ascending.
    pub fn smith_valuations(&self) -> Vec<u32> {
        let m = self.modulus();
        let p = self.p;
        let mut a: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut vals = Vec::new();
        let mut top = 0usize;
        let mut left = 0usize;
        while top < a.len() && left < self.cols {
            // Find a global minimal-valuation entry in the remaining block.
            let mut best: Option<(usize, usize, u32)> = None;
            for (i, arow) in a.iter().enumerate().skip(top) {
                for (j, &aij) in arow.iter().enumerate().skip(left) {
                    if aij == 0 {
                        continue;
                    }
                    let v = val_p(aij, p);
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((bi, bj, v)) = best else { break };
            a.swap(top, bi);
            for row in a.iter_mut() {
                row.swap(left, bj);
            }
            // Normalize pivot to p^v, then clear its row and column; every
            // other entry is divisible by p^v because v is globally minimal.
            let unit = a[top][left] / pow_u64(p, v);
            let uinv = inv_mod(unit % m, m);
            scale_row(&mut a[top], uinv, m);
            let pv = pow_u64(p, v);
            for i in (top + 1)..a.len() {
                if a[i][left] != 0 {
                    let q = a[i][left] / pv;
                    let pivot = a[top].clone();
                    sub_scaled(&mut a[i], &pivot, q, m);
                }
            }
            for j in (left + 1)..self.cols {
                if a[top][j] != 0 {
                    let q = a[top][j] / pv;
                    // Column operation: subtract q * (column left) from column j.
                    for row in a.iter_mut().skip(top) {
                        let sub = (row[left] as u128 * q as u128) % m as u128;
                        row[j] = ((row[j] as u128 + m as u128 - sub) % m as u128) as u64;
                    }
                }
            }
            vals.push(v);
            top += 1;
            left += 1;
        }
        vals.sort_unstable();
        vals
    }

    /// Length of the quotient module (Z/p^prec)^cols / (row span), as a sum
    /// of cyclic-summand lengths.
    ///
    /// At precision 1 the quotient is an honest F_p vector space and the
    /// length is its dimension. At higher precision a summand filling the
    /// whole window (a diagonal zero) cannot be told apart from a free
    /// summand of the untruncated module, so it reports `NotFinite`.
    pub fn module_length(&self) -> Result<u64> {
        let vals = self.smith_valuations();
        let n = self.prec;
        let full_summands = self.cols - vals.len();
        if n == 1 {
            // F_p: the quotient is a vector space of dimension cols - rank,
            // and every nonzero entry mod p is a unit, so rank = vals.len().
            return Ok(full_summands as u64);
        }
        if full_summands > 0 || vals.iter().any(|&v| v >= n) {
            return Err(Error::NotFinite { prec: n });
        }
        Ok(vals.iter().map(|&v| v as u64).sum())
    }
}

fn val_p(x: u64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    let mut r = x;
    while r.is_multiple_of(p) {
        r /= p;
        v += 1;
    }
    v
}

fn scale_row(row: &mut [u64], s: u64, m: u64) {
    for x in row.iter_mut() {
        *x = (*x as u128 * s as u128 % m as u128) as u64;
    }
}

/// row -= q * other (mod m).
fn sub_scaled(row: &mut [u64], other: &[u64], q: u64, m: u64) {
    for (x, &o) in row.iter_mut().zip(other) {
        let sub = o as u128 * q as u128 % m as u128;
        *x = ((*x as u128 + m as u128 - sub % m as u128) % m as u128) as u64;
    }
}
