//! The delta-ring layer: a p-derivation paired with the Frobenius lift that
//! fixes every variable, plus window-scale checks of its structural
//! consequences on a quotient presentation.
//!
//! Throughout, the ambient ring is `Z/p^N[x_1..x_d]` truncated at a degree
//! cap, with the Frobenius lift `phi` sending each variable to its p-th
//! power and fixing scalars. The attached p-derivation is
//! `delta(f) = (phi(f) - f^p) / p`, which costs one digit of precision.
//! Quotient-level questions (injectivity of the induced lift, existence of
//! a linear retraction, existence of an induced p-derivation) are answered
//! on finite windows and every verdict is window-qualified: it speaks about
//! the truncation actually computed, never the untruncated ring.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::exactnum::{pow_u64, ZpNMatrix};
use crate::fracpoly::{ExpKey, FracPoly};
use crate::window::{
    visit_window, QuotientWindow, SlotRule, VerdictQuality, WindowSpec, MAX_HOWELL_COLS,
    MAX_HOWELL_ROWS,
};

/// A quotient presentation `Z/p^N[x_1..x_d] / (f_1..f_r)` with a degree cap.
///
/// The two boolean flags are *claims* recorded with the presentation; the
/// checks in this module verify what they can on the window and warn when a
/// claim is unverified or contradicted, but never assume a claim silently.
#[derive(Clone, Debug)]
pub struct RingPresentation {
    p: u64,
    precision: u32,
    cap: u32,
    variables: Vec<String>,
    ideal: Vec<FracPoly>,
    p_torsion_free: bool,
    reduced_mod_p: bool,
}

impl RingPresentation {
    pub fn new(
        p: u64,
        precision: u32,
        cap: u32,
        variables: Vec<String>,
        ideal: Vec<FracPoly>,
        p_torsion_free: bool,
        reduced_mod_p: bool,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Validation(format!("{p} is not prime")));
        }
        if precision == 0 || cap == 0 {
            return Err(Error::Validation(
                "precision and cap must be at least 1".into(),
            ));
        }
        if (p as u128).pow(precision) > u64::MAX as u128 {
            return Err(Error::Validation(format!(
                "p^precision = {p}^{precision} exceeds the scalar range"
            )));
        }
        if variables.is_empty() {
            return Err(Error::Validation("at least one variable is required".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &variables {
            if v.is_empty() || v == "p" || v == "t" {
                return Err(Error::Validation(format!(
                    "variable name {v:?} is empty or reserved"
                )));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::Validation(format!("duplicate variable name {v:?}")));
            }
        }
        let mut gens = Vec::with_capacity(ideal.len());
        for g in ideal {
            if g.p() != p || g.nvars() != variables.len() {
                return Err(Error::Incompatible(
                    "generator does not match the presentation's p or variables".into(),
                ));
            }
            if g.level() != 0 || g.terms().any(|(k, _)| k.slot != 0) {
                return Err(Error::Validation(
                    "generators must be level-0 polynomials without fractional p-powers".into(),
                ));
            }
            if g.precision() < precision {
                return Err(Error::PrecisionExhausted {
                    needed: precision,
                    have: g.precision(),
                });
            }
            if g.terms().any(|(k, _)| k.degree_num() > cap) {
                return Err(Error::Validation(
                    "generator degree exceeds the presentation cap".into(),
                ));
            }
            let g = recap(&g.truncate_prec(precision), cap);
            if g.is_zero() {
                return Err(Error::Validation("generators must be nonzero".into()));
            }
            gens.push(g);
        }
        Ok(RingPresentation {
            p,
            precision,
            cap,
            variables,
            ideal: gens,
            p_torsion_free,
            reduced_mod_p,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn ideal(&self) -> &[FracPoly] {
        &self.ideal
    }

    pub fn p_torsion_free(&self) -> bool {
        self.p_torsion_free
    }

    pub fn reduced_mod_p(&self) -> bool {
        self.reduced_mod_p
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(|s| s.as_str()).collect()
    }

    /// The quotient window at the given precision and cap (the ideal's
    /// generators are truncated to fit).
    pub fn quotient_window(&self, prec: u32, cap: u32) -> Result<QuotientWindow> {
        let spec = WindowSpec {
            p: self.p,
            nvars: self.variables.len(),
            prec,
            level: 0,
            cap,
            slot_rule: SlotRule::None,
        };
        QuotientWindow::from_fracpolys(spec, &self.ideal)
    }

    fn rendered_ideal(&self) -> String {
        let names = self.names();
        self.ideal
            .iter()
            .map(|g| g.render(&names))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// The Frobenius lift on the ambient ring: variables go to their p-th
/// powers, scalars are fixed. Exact; errors on ramified input.
pub fn phi(f: &FracPoly) -> Result<FracPoly> {
    f.frobenius_substitute()
}

/// The p-derivation attached to `phi`: `delta(f) = (phi(f) - f^p) / p`.
/// The result carries one digit of precision less than the input.
pub fn delta(f: &FracPoly) -> Result<FracPoly> {
    let lift = f.frobenius_substitute()?;
    let power = f.pow(f.p() as u32);
    lift.sub(&power).exact_divide_by_p()
}

/// Evaluates `delta(f)` purely through the delta-ring axioms, given a value
/// for `delta` of each variable: constants get the forced value
/// `(c - c^p)/p`, products fold through the Leibniz-type rule, and sums fold
/// through the sum rule. Independent of the closed formula in [`delta`];
/// the two agree whenever every variable value is zero.
fn delta_eval(f: &FracPoly, values: &[FracPoly]) -> Result<FracPoly> {
    assert_eq!(values.len(), f.nvars());
    if f.precision() < 2 {
        return Err(Error::PrecisionExhausted {
            needed: 2,
            have: f.precision(),
        });
    }
    let p = f.p();
    let make_const = |c: u64| FracPoly::constant(c as i128, p, f.nvars(), f.precision(), f.cap());
    let mut acc: Option<(FracPoly, FracPoly)> = None;
    for (key, coeff) in f.terms() {
        if key.slot != 0 {
            return Err(Error::RamifiedInput);
        }
        // delta of one term c * x^beta, one variable factor at a time.
        let mut g = make_const(coeff);
        let mut dg = delta(&g)?;
        for (i, &e) in key.base.iter().enumerate() {
            for _ in 0..e {
                let x = FracPoly::variable(i, p, f.nvars(), f.precision(), f.cap());
                let dx = &values[i];
                let next = g
                    .pow(p as u32)
                    .mul(dx)
                    .add(&x.pow(p as u32).mul(&dg))
                    .add(&dg.mul(dx).mul_scalar(p as i128));
                g = g.mul(&x);
                dg = next;
            }
        }
        acc = Some(match acc {
            None => (g, dg),
            Some((h, dh)) => {
                let sum = h.add(&g);
                let corr = h
                    .pow(p as u32)
                    .add(&g.pow(p as u32))
                    .sub(&sum.pow(p as u32))
                    .exact_divide_by_p()?;
                (sum, dh.add(&dg).add(&corr))
            }
        });
    }
    Ok(match acc {
        None => FracPoly::zero(p, f.nvars(), f.precision() - 1, f.cap()),
        Some((_, dg)) => dg,
    })
}

/// Outcome of checking the two delta-ring identities on a pair of elements.
#[derive(Clone, Debug)]
pub enum AxiomVerdict {
    Holds,
    Violated {
        identity: &'static str,
        residual: FracPoly,
    },
}

/// Verifies `delta(fg) = f^p delta(g) + g^p delta(f) + p delta(f) delta(g)`
/// and the sum identity on the pair, one digit below the input precision.
/// A violation is a result, not an error: it indicates an implementation
/// bug, never a property of the inputs.
pub fn check_delta_axioms(f: &FracPoly, g: &FracPoly) -> Result<AxiomVerdict> {
    if f.p() != g.p() || f.nvars() != g.nvars() {
        return Err(Error::Incompatible(
            "delta axioms need operands over the same ring".into(),
        ));
    }
    let p = f.p() as u32;
    let df = delta(f)?;
    let dg = delta(g)?;

    let product_lhs = delta(&f.mul(g))?;
    let product_rhs = f
        .pow(p)
        .mul(&dg)
        .add(&g.pow(p).mul(&df))
        .add(&df.mul(&dg).mul_scalar(f.p() as i128));
    let residual = product_lhs.sub(&product_rhs);
    if !residual.is_zero() {
        return Ok(AxiomVerdict::Violated {
            identity: "product rule",
            residual,
        });
    }

    let sum_lhs = delta(&f.add(g))?;
    let corr = f
        .pow(p)
        .add(&g.pow(p))
        .sub(&f.add(g).pow(p))
        .exact_divide_by_p()?;
    let sum_rhs = df.add(&dg).add(&corr);
    let residual = sum_lhs.sub(&sum_rhs);
    if !residual.is_zero() {
        return Ok(AxiomVerdict::Violated {
            identity: "sum rule",
            residual,
        });
    }
    Ok(AxiomVerdict::Holds)
}

#[derive(Clone, Debug)]
pub enum InjectivityVerdict {
    /// No kernel on source elements of degree up to the stated bound.
    InjectiveUpTo(u32),
    /// A nonzero class of the quotient window killed by the lift.
    KernelWitness(FracPoly),
}

#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub verdict: InjectivityVerdict,
    pub warnings: Vec<String>,
}

/// Computes the kernel of the induced Frobenius lift on the truncated
/// quotient. Images of degree-e monomials have degree pe, so the trusted
/// source window is degree <= cap/p.
pub fn check_phi_injective(ring: &RingPresentation) -> Result<InjectivityReport> {
    let p = ring.p;
    let d_small = ring.cap / p as u32;
    let w = ring.quotient_window(ring.precision, ring.cap)?;
    let spec = w.spec().clone();

    let mut cols: Vec<ExpKey> = Vec::new();
    visit_window(&spec, |k| cols.push(k.clone()));
    if cols.len() as u64 > MAX_HOWELL_COLS {
        return Err(Error::WindowTooLarge(format!(
            "injectivity window has {} monomials (bound {MAX_HOWELL_COLS})",
            cols.len()
        )));
    }
    let index: BTreeMap<ExpKey, usize> = cols
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let source: Vec<ExpKey> = cols
        .iter()
        .filter(|k| k.degree_num() <= d_small)
        .cloned()
        .collect();

    let mut mat = ZpNMatrix::zero(p, ring.precision, source.len(), cols.len());
    for (bi, b) in source.iter().enumerate() {
        for (k, c) in w.nf_terms(&[(b.scale(p as u32), 1)])? {
            mat.set(bi, index[&k], c);
        }
    }
    let kernel = mat.left_kernel();
    let mut verdict = InjectivityVerdict::InjectiveUpTo(d_small);
    'rows: for r in 0..kernel.rows() {
        let witness_terms: Vec<(ExpKey, u64)> = source
            .iter()
            .enumerate()
            .filter_map(|(bi, b)| {
                let c = kernel.at(r, bi);
                (c != 0).then(|| (b.clone(), c))
            })
            .collect();
        if witness_terms.is_empty() || w.nf_terms(&witness_terms)?.is_empty() {
            continue;
        }
        let mut witness = FracPoly::zero(p, spec.nvars, ring.precision, ring.cap);
        for (k, c) in witness_terms {
            witness = witness.add(&FracPoly::monomial(
                c as i128,
                &k.base,
                0,
                0,
                p,
                spec.nvars,
                ring.precision,
                ring.cap,
            ));
        }
        verdict = InjectivityVerdict::KernelWitness(witness);
        break 'rows;
    }

    let mut warnings = Vec::new();
    let w1 = ring.quotient_window(1, ring.cap)?;
    let names = ring.names();
    for b in &source {
        if b.is_unit() {
            continue;
        }
        let class = w1.nf_terms(&[(b.clone(), 1)])?;
        let power = w1.nf_terms(&[(b.scale(p as u32), 1)])?;
        if !class.is_empty() && power.is_empty() {
            let shown = FracPoly::monomial(1, &b.base, 0, 0, p, spec.nvars, 1, ring.cap);
            let mut msg = format!(
                "the mod-p quotient is not reduced on this window: {} is nonzero with a vanishing p-th power (the injectivity lemma needs a reduced mod-p quotient)",
                shown.render(&names)
            );
            if ring.reduced_mod_p {
                msg.push_str(" -- contradicting the presentation's claim");
            }
            warnings.push(msg);
            break;
        }
    }
    if !ring.reduced_mod_p && warnings.is_empty() {
        warnings.push(
            "the presentation does not claim a reduced mod-p quotient; the verdict is reported unconditionally".into(),
        );
    }
    Ok(InjectivityReport { verdict, warnings })
}

/// An explicit linear retraction of the Frobenius lift on the window:
/// a value for sigma on each monomial it touches, extended by zero and by
/// linearity elsewhere.
#[derive(Clone, Debug)]
pub struct RetractionTable {
    degree: u32,
    entries: BTreeMap<ExpKey, Vec<(ExpKey, u64)>>,
}

impl RetractionTable {
    /// Largest source degree on which sigma(phi(.)) = id was solved.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ExpKey, &[(ExpKey, u64)])> + '_ {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Linear extension: applies the table to a term list, dropping
    /// monomials the table does not mention.
    pub fn apply(&self, terms: &[(ExpKey, u64)], p: u64, prec: u32) -> Vec<(ExpKey, u64)> {
        let m = pow_u64(p, prec);
        let mut out: BTreeMap<ExpKey, u64> = BTreeMap::new();
        for (k, c) in terms {
            if let Some(value) = self.entries.get(k) {
                for (vk, vc) in value {
                    let add = (*c as u128 * *vc as u128 % m as u128) as u64;
                    let entry = out.entry(vk.clone()).or_insert(0);
                    *entry = (*entry + add) % m;
                }
            }
        }
        out.into_iter().filter(|&(_, c)| c != 0).collect()
    }
}

#[derive(Clone, Debug)]
pub enum SplittingVerdict {
    SplitsUpTo {
        degree: u32,
        retraction: RetractionTable,
    },
    NoSplittingUpTo(u32),
}

#[derive(Clone, Debug)]
pub struct SplittingReport {
    pub verdict: SplittingVerdict,
    pub warnings: Vec<String>,
}

/// Solves the linear system sigma(phi(b)) = b over Z/p^N for all window
/// monomials b of degree <= cap/p, with sigma an unknown linear map given
/// by its values on window monomials. A solution is re-verified
/// independently before it is returned.
pub fn check_phi_splits(ring: &RingPresentation) -> Result<SplittingReport> {
    let mut warnings = Vec::new();
    if !ring.p_torsion_free {
        warnings.push(
            "the presentation does not claim p-torsion-freeness; the splitting lemma assumes it"
                .into(),
        );
    }
    if !gorenstein_recognized(ring) {
        warnings.push(
            "the Gorenstein hypothesis for the mod-p quotient is not verified (the generators are not a recognized complete intersection)".into(),
        );
    }
    if solve_retraction(ring, 1)?.is_none() {
        warnings.push(
            "the mod-p quotient admits no Frobenius splitting on this window; the F-split hypothesis fails here".into(),
        );
    }
    let d_small = ring.cap / ring.p as u32;
    let verdict = match solve_retraction(ring, ring.precision)? {
        Some(retraction) => SplittingVerdict::SplitsUpTo {
            degree: d_small,
            retraction,
        },
        None => SplittingVerdict::NoSplittingUpTo(d_small),
    };
    Ok(SplittingReport { verdict, warnings })
}

/// Complete intersections are Gorenstein; the recognizer accepts exactly
/// the generators whose mod-p reductions are nonzero in pairwise disjoint
/// sets of variables (each factor a hypersurface). Anything else is
/// unverified, not refuted.
fn gorenstein_recognized(ring: &RingPresentation) -> bool {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for g in &ring.ideal {
        let mut support = BTreeSet::new();
        for (k, c) in g.terms() {
            if c % ring.p != 0 {
                for (i, &e) in k.base.iter().enumerate() {
                    if e > 0 {
                        support.insert(i);
                    }
                }
            }
        }
        if g.terms().all(|(_, c)| c % ring.p == 0) {
            continue; // vanishes mod p
        }
        if support.is_empty() {
            return false; // a unit constant mod p: degenerate quotient
        }
        if support.iter().any(|i| seen.contains(i)) {
            return false;
        }
        seen.extend(support);
    }
    true
}

fn solve_retraction(ring: &RingPresentation, prec: u32) -> Result<Option<RetractionTable>> {
    let p = ring.p;
    let w = ring.quotient_window(prec, ring.cap)?;
    let spec = w.spec().clone();
    let m = pow_u64(p, prec);

    let mut cols: Vec<ExpKey> = Vec::new();
    visit_window(&spec, |k| cols.push(k.clone()));
    let t = cols.len();
    let index: BTreeMap<ExpKey, usize> = cols
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let d_small = ring.cap / p as u32;
    let source: Vec<ExpKey> = cols
        .iter()
        .filter(|k| k.degree_num() <= d_small)
        .cloned()
        .collect();
    let s = source.len();

    // Reduced Frobenius images of the source monomials, and the monomials
    // sigma must actually assign values to.
    let mut images: Vec<Vec<(usize, u64)>> = Vec::with_capacity(s);
    let mut support: BTreeSet<usize> = BTreeSet::new();
    for b in &source {
        let img = w.nf_terms(&[(b.scale(p as u32), 1)])?;
        let sparse: Vec<(usize, u64)> = img.iter().map(|(k, c)| (index[k], *c)).collect();
        support.extend(sparse.iter().map(|&(j, _)| j));
        images.push(sparse);
    }
    let support: Vec<usize> = support.into_iter().collect();

    // The normal form of each window monomial, as the linear map the
    // equations are composed with.
    let mut nf_of: Vec<Vec<(usize, u64)>> = Vec::with_capacity(t);
    for k in &cols {
        let r = w.nf_terms(&[(k.clone(), 1)])?;
        nf_of.push(r.iter().map(|(kk, c)| (index[kk], *c)).collect());
    }

    let u_rows = support.len() * t;
    let sys_cols = s * t;
    if sys_cols as u64 > MAX_HOWELL_COLS || u_rows as u64 > MAX_HOWELL_ROWS {
        return Err(Error::WindowTooLarge(format!(
            "retraction system needs {u_rows} x {sys_cols} (bounds {MAX_HOWELL_ROWS} x {MAX_HOWELL_COLS})"
        )));
    }

    // Unknown sigma(m)[j] contributes a * NF(e_j) to the equation of every
    // source monomial whose image carries m with coefficient a.
    let mut mat = ZpNMatrix::zero(p, prec, u_rows, sys_cols);
    for (mi, &mcol) in support.iter().enumerate() {
        for (j, nf_j) in nf_of.iter().enumerate().take(t) {
            let row = mi * t + j;
            for (bi, img) in images.iter().enumerate() {
                let Some(&(_, a)) = img.iter().find(|&&(jj, _)| jj == mcol) else {
                    continue;
                };
                for &(jj, c) in nf_j {
                    let v = (a as u128 * c as u128 % m as u128) as u64;
                    if v != 0 {
                        mat.set(row, bi * t + jj, v);
                    }
                }
            }
        }
    }
    let mut target = vec![0u64; sys_cols];
    for (bi, b) in source.iter().enumerate() {
        for (k, c) in w.nf_terms(&[(b.clone(), 1)])? {
            target[bi * t + index[&k]] = c;
        }
    }

    let Some(coeffs) = mat.solve_membership(&target) else {
        return Ok(None);
    };
    let mut entries: BTreeMap<ExpKey, Vec<(ExpKey, u64)>> = BTreeMap::new();
    for (mi, &mcol) in support.iter().enumerate() {
        let value: Vec<(ExpKey, u64)> = (0..t)
            .filter_map(|j| {
                let c = coeffs[mi * t + j];
                (c != 0).then(|| (cols[j].clone(), c))
            })
            .collect();
        if !value.is_empty() {
            entries.insert(cols[mcol].clone(), value);
        }
    }
    let table = RetractionTable {
        degree: d_small,
        entries,
    };

    // Independent re-verification on every source monomial.
    for (bi, b) in source.iter().enumerate() {
        let img_terms: Vec<(ExpKey, u64)> = images[bi]
            .iter()
            .map(|&(j, c)| (cols[j].clone(), c))
            .collect();
        let mut diff = table.apply(&img_terms, p, prec);
        match diff.iter_mut().find(|(k, _)| k == b) {
            Some((_, c)) => *c = (*c + m - 1) % m,
            None => diff.push((b.clone(), m - 1)),
        }
        let diff: Vec<(ExpKey, u64)> = diff.into_iter().filter(|&(_, c)| c != 0).collect();
        if !w.nf_terms(&diff)?.is_empty() {
            return Err(Error::Validation(
                "internal: retraction failed re-verification".into(),
            ));
        }
    }
    Ok(Some(table))
}

/// Whether the quotient carries a p-derivation compatible with its ring
/// structure, decided as far as the window allows.
#[derive(Clone, Debug)]
pub enum DeltaAdmissibility {
    /// The ambient delta maps every generator into the ideal window, so the
    /// quotient inherits the structure with delta = 0 on the variables.
    ConsistentUpTo(u32),
    /// No assignment of delta-values can work: a forced membership fails.
    Obstruction {
        witness: FracPoly,
        explanation: String,
    },
    /// The window is too small, or the constraints depend on the unknown
    /// values in a way the bounded search does not decide.
    Inconclusive(String),
}

/// Searches for a p-derivation on the quotient. The zero assignment on the
/// variables is tried first (the values forced on scalars are unique); if
/// it fails, the generator constraints are expanded formally in unknowns
/// and reduced mod p — when every unknown-dependent coefficient vanishes
/// there but a constant part escapes `(p) + ideal`, no assignment at all
/// can satisfy the constraint, which is a sound obstruction.
pub fn admits_delta_on_quotient(ring: &RingPresentation) -> Result<DeltaAdmissibility> {
    let p = ring.p;
    if ring.precision < 2 {
        return Err(Error::PrecisionExhausted {
            needed: 2,
            have: ring.precision,
        });
    }
    let names = ring.names();
    let wide_cap = ring.cap.saturating_mul(p as u32);
    let wide_gens: Vec<FracPoly> = ring.ideal.iter().map(|g| recap(g, wide_cap)).collect();

    // Precondition: the ideal is phi-stable on the window.
    let w_full = ring.quotient_window(ring.precision, wide_cap)?;
    for g in &wide_gens {
        let image = phi(g)?;
        if !w_full.contains(&image)? {
            return Err(Error::HypothesisFailed(format!(
                "the ideal is not phi-stable on this window: phi({}) reduces to {}",
                g.render(&names),
                w_full.nf(&image)?.render(&names)
            )));
        }
    }

    // Zero assignment: the ambient delta itself.
    let w_delta = ring.quotient_window(ring.precision - 1, wide_cap)?;
    let mut all_contained = true;
    for g in &wide_gens {
        if !w_delta.contains(&delta(g)?)? {
            all_contained = false;
            break;
        }
    }
    if all_contained {
        return Ok(DeltaAdmissibility::ConsistentUpTo(ring.cap));
    }

    // Formal expansion in one unknown per variable.
    let d = ring.variables.len();
    let maxdeg = ring
        .ideal
        .iter()
        .flat_map(|g| g.terms().map(|(k, _)| k.degree_num()))
        .max()
        .unwrap_or(0);
    let cap_formal = (p as u32 + 1) * maxdeg + 2;
    let nv2 = 2 * d;
    let values: Vec<FracPoly> = (0..nv2)
        .map(|i| {
            if i < d {
                FracPoly::variable(d + i, p, nv2, ring.precision, cap_formal)
            } else {
                FracPoly::zero(p, nv2, ring.precision, cap_formal)
            }
        })
        .collect();
    let wp = ring.quotient_window(1, wide_cap)?;
    if wp.quality() != VerdictQuality::Exact {
        return Ok(DeltaAdmissibility::Inconclusive(
            "mod-p memberships at this cap are only window-qualified; the obstruction analysis needs exact verdicts".into(),
        ));
    }

    let reduce_mod_p = |terms: &[(ExpKey, u64)]| -> Vec<(ExpKey, u64)> {
        terms
            .iter()
            .filter_map(|(k, c)| {
                let c = c % p;
                (c != 0).then(|| (k.clone(), c))
            })
            .collect()
    };

    let mut nonlinear = false;
    for g in &ring.ideal {
        let lifted = extend_vars(g, nv2, cap_formal);
        let formal = delta_eval(&lifted, &values)?;
        if formal.is_truncated() {
            return Ok(DeltaAdmissibility::Inconclusive(
                "the formal delta expansion exceeded its degree window".into(),
            ));
        }
        let mut constant: Vec<(ExpKey, u64)> = Vec::new();
        let mut unknown_parts: BTreeMap<Box<[u32]>, Vec<(ExpKey, u64)>> = BTreeMap::new();
        for (k, c) in formal.terms() {
            let (xpart, vpart) = k.base.split_at(d);
            let xkey = ExpKey {
                slot: 0,
                base: xpart.to_vec().into_boxed_slice(),
            };
            if vpart.iter().all(|&e| e == 0) {
                constant.push((xkey, c));
            } else {
                unknown_parts
                    .entry(vpart.to_vec().into_boxed_slice())
                    .or_default()
                    .push((xkey, c));
            }
        }
        let mut unknowns_vanish = true;
        for bucket in unknown_parts.values() {
            if !wp.nf_terms(&reduce_mod_p(bucket))?.is_empty() {
                unknowns_vanish = false;
                break;
            }
        }
        let constant_reduced = wp.nf_terms(&reduce_mod_p(&constant))?;
        if unknowns_vanish && !constant_reduced.is_empty() {
            let mut witness = FracPoly::zero(p, d, 1, wide_cap);
            for (k, c) in &constant_reduced {
                witness = witness.add(&FracPoly::monomial(
                    *c as i128,
                    &k.base,
                    0,
                    0,
                    p,
                    d,
                    1,
                    wide_cap,
                ));
            }
            let explanation = format!(
                "delta({}) must vanish in the quotient, which forces {} to lie in (p, {}); the membership fails at cap {}",
                g.render(&names),
                witness.render(&names),
                ring.rendered_ideal(),
                wide_cap
            );
            return Ok(DeltaAdmissibility::Obstruction {
                witness,
                explanation,
            });
        }
        if !unknowns_vanish {
            nonlinear = true;
        }
    }
    Ok(DeltaAdmissibility::Inconclusive(if nonlinear {
        "the generator constraints depend on the unknown delta-values mod p; only the zero assignment and unknown-independent obstructions are decided at this cap".into()
    } else {
        "the zero assignment fails at full precision but every mod-p constraint is satisfiable; deciding needs deeper digit lifting".into()
    }))
}

/// Rebuilds a polynomial with a larger degree cap (contents unchanged).
fn recap(f: &FracPoly, cap: u32) -> FracPoly {
    extend_vars(f, f.nvars(), cap)
}

/// Re-embeds a level-0 polynomial into a ring with extra trailing
/// variables and the given cap.
fn extend_vars(f: &FracPoly, nvars: usize, cap: u32) -> FracPoly {
    assert!(nvars >= f.nvars());
    assert_eq!(f.level(), 0);
    let mut out = FracPoly::zero(f.p(), nvars, f.precision(), cap);
    for (k, c) in f.terms() {
        let mut base = vec![0u32; nvars];
        base[..k.base.len()].copy_from_slice(&k.base);
        out = out.add(&FracPoly::monomial(
            c as i128,
            &base,
            0,
            0,
            f.p(),
            nvars,
            f.precision(),
            cap,
        ));
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
