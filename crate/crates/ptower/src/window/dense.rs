//! Linear-algebra reduction engines: per-degree (for homogeneous ideals) and
//! whole-window (last resort, size-guarded).
//!
//! Both express the ideal window as the row span of full in-window products
//! generator × window monomial and reduce elements to canonical residuals
//! against the Howell normal form of that span. For homogeneous slot-free
//! generators the span decomposes by degree and every membership verdict is
//! exact; the whole-window engine admits arbitrary generators but its
//! negative verdicts are only window-qualified (a membership witness might
//! need multipliers past the cap).

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::exactnum::{pow_u64, ZpNMatrix};
use crate::fracpoly::ExpKey;
use crate::window::lattice::{compositions_count, visit_degree, visit_window, window_size};
use crate::window::{SlotRule, WindowSpec};

/// Hard bounds on any single Howell computation; beyond them the engine
/// reports WindowTooLarge instead of grinding.
pub(crate) const MAX_HOWELL_COLS: u64 = 600;
pub(crate) const MAX_HOWELL_ROWS: u64 = 8000;

/// A column-indexed Howell basis of one span, with canonical reduction.
pub(crate) struct LinearData {
    pub(crate) cols: Vec<ExpKey>,
    pub(crate) index: BTreeMap<ExpKey, usize>,
    pub(crate) howell: ZpNMatrix,
    /// (row, pivot column, pivot valuation), in row order.
    pub(crate) pivots: Vec<(usize, usize, u32)>,
    /// Pivot valuation per column; None for pivot-free columns.
    pub(crate) col_pivot: Vec<Option<u32>>,
}

impl LinearData {
    pub(crate) fn build(spec: &WindowSpec, cols: Vec<ExpKey>, rows: &[Vec<u64>]) -> Self {
        let mut mat = ZpNMatrix::zero(spec.p, spec.prec, rows.len(), cols.len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    mat.set(i, j, v);
                }
            }
        }
        let howell = mat.howell_form();
        let mut pivots = Vec::with_capacity(howell.rows());
        let mut col_pivot = vec![None; cols.len()];
        for r in 0..howell.rows() {
            let c = (0..howell.cols())
                .find(|&c| howell.at(r, c) != 0)
                .expect("howell form stores no zero rows");
            let val = val_p(howell.at(r, c), spec.p);
            debug_assert_eq!(howell.at(r, c), pow_u64(spec.p, val));
            pivots.push((r, c, val));
            col_pivot[c] = Some(val);
        }
        let index = cols
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        LinearData {
            cols,
            index,
            howell,
            pivots,
            col_pivot,
        }
    }

    /// Reduces `vec` to the canonical residual of its coset: at every pivot
    /// column with pivot p^v the residual entry is < p^v.
    pub(crate) fn reduce(&self, spec: &WindowSpec, vec: &mut [u64]) {
        let m = pow_u64(spec.p, spec.prec);
        for &(r, c, v) in &self.pivots {
            let q = vec[c] / pow_u64(spec.p, v);
            if q != 0 {
                for (j, slot) in vec.iter_mut().enumerate().skip(c) {
                    let e = self.howell.at(r, j);
                    if e != 0 {
                        let sub = (q as u128 * e as u128 % m as u128) as u64;
                        *slot = (*slot + m - sub) % m;
                    }
                }
            }
        }
    }

    /// The additive order exponent of column j's class in the quotient.
    pub(crate) fn col_modulus(&self, spec: &WindowSpec, j: usize) -> u32 {
        self.col_pivot[j].map_or(spec.prec, |v| v.min(spec.prec))
    }

    /// Generators of the genuine p-torsion of the cokernel: solutions of
    /// p·x ∈ span that do not lie in span + p^(prec−1)·W (the latter being
    /// the precision artifact present in any truncated model).
    pub(crate) fn torsion_generators(&self, spec: &WindowSpec) -> Vec<Vec<(ExpKey, u64)>> {
        let w = self.cols.len();
        let h = self.howell.rows();
        let mut stacked = ZpNMatrix::zero(spec.p, spec.prec, w + h, w);
        for i in 0..w {
            stacked.set(i, i, spec.p % pow_u64(spec.p, spec.prec));
        }
        for r in 0..h {
            for c in 0..w {
                stacked.set(w + r, c, self.howell.at(r, c));
            }
        }
        let kernel = stacked.left_kernel();

        // Membership matrix for the artifact filter: span + p^(prec−1)·W.
        let artifact_scale = pow_u64(spec.p, spec.prec - 1);
        let mut aug = ZpNMatrix::zero(spec.p, spec.prec, h + w, w);
        for r in 0..h {
            for c in 0..w {
                aug.set(r, c, self.howell.at(r, c));
            }
        }
        for i in 0..w {
            aug.set(h + i, i, artifact_scale);
        }
        let aug = aug.howell_form();

        let mut out = Vec::new();
        for r in 0..kernel.rows() {
            let x: Vec<u64> = (0..w).map(|c| kernel.at(r, c)).collect();
            if x.iter().all(|&v| v == 0) {
                continue;
            }
            if aug.solve_membership(&x).is_some() {
                continue;
            }
            let terms: Vec<(ExpKey, u64)> = x
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0)
                .map(|(j, &v)| (self.cols[j].clone(), v))
                .collect();
            out.push(terms);
        }
        out
    }

    /// Σ over columns of the class modulus exponent; NotFinite when any
    /// class is indistinguishable from free at this precision.
    pub(crate) fn length(&self, spec: &WindowSpec) -> Result<u64> {
        let mut total = 0u64;
        for j in 0..self.cols.len() {
            let a = self.col_modulus(spec, j);
            if spec.prec >= 2 && a >= spec.prec {
                return Err(Error::NotFinite { prec: spec.prec });
            }
            total += a as u64;
        }
        Ok(total)
    }
}

// ---- homogeneous per-degree engine --------------------------------------

pub(crate) struct GradedEngine {
    gens: Vec<Vec<(ExpKey, u64)>>,
    degrees: Vec<u32>,
    cache: RefCell<BTreeMap<u32, Rc<LinearData>>>,
}

impl GradedEngine {
    /// Accepts slot-free generators that are homogeneous in base degree.
    pub(crate) fn try_new(_spec: &WindowSpec, gens: &[Vec<(ExpKey, u64)>]) -> Option<Self> {
        let mut degrees = Vec::with_capacity(gens.len());
        for g in gens {
            if g.iter().any(|(k, _)| k.slot != 0) {
                return None;
            }
            let d = g[0].0.degree_num();
            if g.iter().any(|(k, _)| k.degree_num() != d) {
                return None;
            }
            degrees.push(d);
        }
        Some(GradedEngine {
            gens: gens.to_vec(),
            degrees,
            cache: RefCell::new(BTreeMap::new()),
        })
    }

    pub(crate) fn degree_data(&self, spec: &WindowSpec, d: u32) -> Result<Rc<LinearData>> {
        if let Some(data) = self.cache.borrow().get(&d) {
            return Ok(Rc::clone(data));
        }
        let ncols = compositions_count(d, spec.nvars).saturating_mul(spec.slot_bound() as u64 + 1);
        let mut nrows = 0u64;
        for &e in &self.degrees {
            if e <= d {
                nrows = nrows.saturating_add(
                    compositions_count(d - e, spec.nvars)
                        .saturating_mul(spec.slot_bound() as u64 + 1),
                );
            }
        }
        if ncols > MAX_HOWELL_COLS || nrows > MAX_HOWELL_ROWS {
            return Err(Error::WindowTooLarge(format!(
                "degree-{d} piece needs a {nrows}×{ncols} reduction (bounds {MAX_HOWELL_ROWS}×{MAX_HOWELL_COLS})"
            )));
        }

        let mut cols = Vec::new();
        visit_degree(spec, d, |k| cols.push(k.clone()));
        let index: BTreeMap<ExpKey, usize> = cols
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (g, &e) in self.gens.iter().zip(&self.degrees) {
            if e > d {
                continue;
            }
            visit_degree(spec, d - e, |mult| {
                let mut row = vec![0u64; cols.len()];
                let m = pow_u64(spec.p, spec.prec);
                for (k, c) in g {
                    // Generators are slot-free, so products keep the
                    // multiplier's slot and never wrap or escape.
                    let key = mult.mul(k);
                    let j = index[&key];
                    row[j] = (row[j] + c) % m;
                }
                rows.push(row);
            });
        }
        let data = Rc::new(LinearData::build(spec, cols, &rows));
        self.cache.borrow_mut().insert(d, Rc::clone(&data));
        Ok(data)
    }

    /// Canonical normal form: reduce each homogeneous piece independently.
    pub(crate) fn nf(
        &self,
        spec: &WindowSpec,
        terms: &[(ExpKey, u64)],
    ) -> Result<Vec<(ExpKey, u64)>> {
        let mut by_degree: BTreeMap<u32, Vec<(ExpKey, u64)>> = BTreeMap::new();
        for (k, c) in terms {
            by_degree
                .entry(k.degree_num())
                .or_default()
                .push((k.clone(), *c));
        }
        let mut out = Vec::new();
        for (d, piece) in by_degree {
            let data = self.degree_data(spec, d)?;
            let mut vec = vec![0u64; data.cols.len()];
            let m = pow_u64(spec.p, spec.prec);
            for (k, c) in piece {
                let j = *data
                    .index
                    .get(&k)
                    .ok_or_else(|| Error::Validation(format!("term outside window: slot {} degree {}", k.slot, d)))?;
                vec[j] = (vec[j] + c) % m;
            }
            data.reduce(spec, &mut vec);
            for (j, &v) in vec.iter().enumerate() {
                if v != 0 {
                    out.push((data.cols[j].clone(), v));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }
}

// ---- whole-window engine --------------------------------------------------

pub(crate) struct DenseEngine {
    data: LinearData,
}

impl DenseEngine {
    pub(crate) fn try_new(spec: &WindowSpec, gens: &[Vec<(ExpKey, u64)>]) -> Result<Self> {
        let size = window_size(spec);
        let nrows = size.saturating_mul(gens.len() as u64);
        if size > MAX_HOWELL_COLS || nrows > MAX_HOWELL_ROWS {
            return Err(Error::WindowTooLarge(format!(
                "window has {size} monomials and {nrows} product rows (bounds {MAX_HOWELL_COLS} and {MAX_HOWELL_ROWS})"
            )));
        }
        let mut cols = Vec::with_capacity(size as usize);
        visit_window(spec, |k| cols.push(k.clone()));
        let index: BTreeMap<ExpKey, usize> = cols
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let m = pow_u64(spec.p, spec.prec);
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for g in gens {
            visit_window(spec, |mult| {
                let mut row = vec![0u64; cols.len()];
                for (k, c) in g {
                    match product_term(spec, mult, k, *c, m) {
                        Some((key, coeff)) => {
                            let j = index[&key];
                            row[j] = (row[j] + coeff) % m;
                        }
                        None => return, // partial product: row unusable
                    }
                }
                if row.iter().any(|&v| v != 0) {
                    rows.push(row);
                }
            });
        }
        Ok(DenseEngine {
            data: LinearData::build(spec, cols, &rows),
        })
    }

    pub(crate) fn data(&self) -> &LinearData {
        &self.data
    }

    pub(crate) fn nf(
        &self,
        spec: &WindowSpec,
        terms: &[(ExpKey, u64)],
    ) -> Result<Vec<(ExpKey, u64)>> {
        let mut vec = vec![0u64; self.data.cols.len()];
        let m = pow_u64(spec.p, spec.prec);
        for (k, c) in terms {
            let j = *self
                .data
                .index
                .get(k)
                .ok_or_else(|| Error::Validation("term outside window".into()))?;
            vec[j] = (vec[j] + c) % m;
        }
        self.data.reduce(spec, &mut vec);
        Ok(vec
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0)
            .map(|(j, &v)| (self.data.cols[j].clone(), v))
            .collect())
    }
}

/// One full product term under the window's slot rule; None when the product
/// leaves the window (the caller must then discard the whole row).
fn product_term(
    spec: &WindowSpec,
    a: &ExpKey,
    b: &ExpKey,
    coeff: u64,
    m: u64,
) -> Option<(ExpKey, u64)> {
    let mut key = a.mul(b);
    if key.degree_num() > spec.degree_bound() {
        return None;
    }
    let mut coeff = coeff;
    match spec.slot_rule {
        SlotRule::None => debug_assert_eq!(key.slot, 0),
        SlotRule::Uniformizer => {
            let unit = spec.level_unit();
            while key.slot >= unit {
                key.slot -= unit;
                coeff = (coeff as u128 * spec.p as u128 % m as u128) as u64;
            }
        }
        SlotRule::Tilt => {
            if key.slot > spec.slot_bound() {
                return None;
            }
        }
    }
    Some((key, coeff))
}

fn val_p(mut v: u64, p: u64) -> u32 {
    debug_assert!(v != 0);
    let mut out = 0;
    while v.is_multiple_of(p) {
        v /= p;
        out += 1;
    }
    out
}
