//! Truncated quotient rings as finitely presented windows.
//!
//! A [`QuotientWindow`] models A/I where A is the exponent lattice of a
//! fixed level and degree cap and I is spanned by the given generators. It
//! answers membership, normal-form, basis, torsion, and length questions.
//! Four reduction engines back the same interface, picked automatically:
//!
//! - **monomial** — every generator a single term p^v·m; verdicts exact.
//! - **rewrite** — unit-leading one/two-term generators forming a confluent
//!   rewriting system; verdicts exact, quotient free (torsion-free).
//! - **graded** — homogeneous slot-free generators, reduced degree by
//!   degree; verdicts exact, degree pieces size-guarded.
//! - **dense** — anything else, one whole-window reduction; size-guarded
//!   and only window-qualified (membership may need multipliers past the
//!   cap, so negative verdicts hold for the window, not the full ring).

mod dense;
mod lattice;
mod monomial;
mod rewrite;

use crate::error::{Error, Result};
use crate::exactnum::pow_u64;
use crate::fracpoly::{CharPPoly, ExpKey, FracPoly};
use dense::{DenseEngine, GradedEngine};
use monomial::MonomialEngine;
use rewrite::RewriteEngine;

pub(crate) use dense::{MAX_HOWELL_COLS, MAX_HOWELL_ROWS};
pub(crate) use lattice::{visit_degree, visit_window};

/// How the slot coordinate of exponent keys behaves in this window.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SlotRule {
    /// No slot: the unramified lattice.
    None,
    /// Uniformizer p^(1/p^level): slots fold into coefficient powers of p.
    Uniformizer,
    /// Tilt variable t^(1/p^level): slots accumulate up to degree p.
    Tilt,
}

/// Whether a verdict from this window binds the full ring or only the window.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerdictQuality {
    Exact,
    WindowQualified,
}

#[derive(Clone, Debug)]
pub struct WindowSpec {
    pub p: u64,
    pub nvars: usize,
    /// Coefficients live in Z/p^prec (1 on the characteristic-p side).
    pub prec: u32,
    /// Exponent level h: keys are numerators over p^h.
    pub level: u32,
    /// Degree cap D in whole units of base degree.
    pub cap: u32,
    pub slot_rule: SlotRule,
}

impl WindowSpec {
    pub fn level_unit(&self) -> u32 {
        (self.p as u32).pow(self.level)
    }

    /// Largest admissible base-degree numerator.
    pub fn degree_bound(&self) -> u32 {
        self.cap * self.level_unit()
    }

    /// Largest admissible slot numerator.
    pub fn slot_bound(&self) -> u32 {
        match self.slot_rule {
            SlotRule::None => 0,
            SlotRule::Uniformizer => self.level_unit() - 1,
            SlotRule::Tilt => self.p as u32 * self.level_unit(),
        }
    }

    fn check_key(&self, key: &ExpKey) -> Result<()> {
        if key.base.len() != self.nvars {
            return Err(Error::Validation("wrong variable count for window".into()));
        }
        if key.degree_num() > self.degree_bound() || key.slot > self.slot_bound() {
            return Err(Error::Validation(format!(
                "term outside window: slot {} base degree {}",
                key.slot,
                key.degree_num()
            )));
        }
        Ok(())
    }
}

enum Engine {
    Monomial(MonomialEngine),
    Rewrite(RewriteEngine),
    Graded(GradedEngine),
    Dense(DenseEngine),
}

pub struct QuotientWindow {
    spec: WindowSpec,
    engine: Engine,
}

impl QuotientWindow {
    /// Builds the window, selecting the strongest applicable engine.
    pub fn new(spec: WindowSpec, gens: Vec<Vec<(ExpKey, u64)>>) -> Result<Self> {
        let m = pow_u64(spec.p, spec.prec);
        let mut cleaned: Vec<Vec<(ExpKey, u64)>> = Vec::with_capacity(gens.len());
        for g in gens {
            let mut terms: Vec<(ExpKey, u64)> = g
                .into_iter()
                .filter_map(|(k, c)| {
                    let c = c % m;
                    (c != 0).then_some((k, c))
                })
                .collect();
            terms.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, _) in &terms {
                spec.check_key(k)?;
            }
            if !terms.is_empty() {
                cleaned.push(terms);
            }
        }

        let engine = if let Some(e) = MonomialEngine::try_new(&spec, &cleaned) {
            Engine::Monomial(e)
        } else if let Some(e) = RewriteEngine::try_new(&spec, &cleaned) {
            Engine::Rewrite(e)
        } else if let Some(e) = GradedEngine::try_new(&spec, &cleaned) {
            Engine::Graded(e)
        } else {
            Engine::Dense(DenseEngine::try_new(&spec, &cleaned)?)
        };
        Ok(QuotientWindow { spec, engine })
    }

    /// Window over Z/p^prec from mixed-characteristic generators.
    pub fn from_fracpolys(spec: WindowSpec, gens: &[FracPoly]) -> Result<Self> {
        assert_ne!(
            spec.slot_rule,
            SlotRule::Tilt,
            "tilt windows take characteristic-p generators"
        );
        let mut lists = Vec::with_capacity(gens.len());
        for g in gens {
            if g.level() > spec.level {
                return Err(Error::Incompatible(format!(
                    "generator at level {} exceeds window level {}",
                    g.level(),
                    spec.level
                )));
            }
            if g.precision() < spec.prec {
                return Err(Error::PrecisionExhausted {
                    needed: spec.prec,
                    have: g.precision(),
                });
            }
            let g = g.at_level(spec.level).truncate_prec(spec.prec);
            lists.push(g.terms().map(|(k, c)| (k.clone(), c)).collect());
        }
        Self::new(spec, lists)
    }

    /// Window over F_p from characteristic-p generators (prec must be 1).
    pub fn from_charpolys(spec: WindowSpec, gens: &[CharPPoly]) -> Result<Self> {
        assert_eq!(spec.prec, 1, "characteristic-p windows have precision 1");
        assert_ne!(
            spec.slot_rule,
            SlotRule::Uniformizer,
            "uniformizer windows take mixed-characteristic generators"
        );
        let mut lists = Vec::with_capacity(gens.len());
        for g in gens {
            if g.level() > spec.level {
                return Err(Error::Incompatible(format!(
                    "generator at level {} exceeds window level {}",
                    g.level(),
                    spec.level
                )));
            }
            let g = g.at_level(spec.level);
            lists.push(g.terms().map(|(k, c)| (k.clone(), c)).collect());
        }
        Self::new(spec, lists)
    }

    pub fn spec(&self) -> &WindowSpec {
        &self.spec
    }

    pub fn engine_name(&self) -> &'static str {
        match &self.engine {
            Engine::Monomial(_) => "monomial",
            Engine::Rewrite(_) => "rewrite",
            Engine::Graded(_) => "graded",
            Engine::Dense(_) => "dense",
        }
    }

    pub fn quality(&self) -> VerdictQuality {
        match &self.engine {
            Engine::Dense(_) => VerdictQuality::WindowQualified,
            _ => VerdictQuality::Exact,
        }
    }

    /// Canonical normal form of a term list modulo the ideal window.
    pub fn nf_terms(&self, terms: &[(ExpKey, u64)]) -> Result<Vec<(ExpKey, u64)>> {
        for (k, _) in terms {
            self.spec.check_key(k)?;
        }
        match &self.engine {
            Engine::Monomial(e) => {
                let mut out: Vec<(ExpKey, u64)> = terms
                    .iter()
                    .filter_map(|(k, c)| e.nf_term(&self.spec, k, *c))
                    .collect();
                out.sort_by(|a, b| a.0.cmp(&b.0));
                Ok(out)
            }
            Engine::Rewrite(e) => {
                // Rewriting is linear term by term; merge the results.
                let m = pow_u64(self.spec.p, self.spec.prec);
                let mut acc: std::collections::BTreeMap<ExpKey, u64> = Default::default();
                for (k, c) in terms {
                    if let Some((key, coeff)) = e.nf_term(&self.spec, k, *c) {
                        let entry = acc.entry(key).or_insert(0);
                        *entry = (*entry + coeff) % m;
                    }
                }
                Ok(acc.into_iter().filter(|&(_, c)| c != 0).collect())
            }
            Engine::Graded(e) => e.nf(&self.spec, terms),
            Engine::Dense(e) => e.nf(&self.spec, terms),
        }
    }

    pub fn nf(&self, f: &FracPoly) -> Result<FracPoly> {
        let g = f
            .at_level(self.spec.level)
            .truncate_prec(self.spec.prec.min(f.precision()));
        if g.precision() < self.spec.prec {
            return Err(Error::PrecisionExhausted {
                needed: self.spec.prec,
                have: g.precision(),
            });
        }
        let terms: Vec<(ExpKey, u64)> = g.terms().map(|(k, c)| (k.clone(), c)).collect();
        let reduced = self.nf_terms(&terms)?;
        let mut out = FracPoly::zero(self.spec.p, self.spec.nvars, self.spec.prec, self.spec.cap);
        for (k, c) in reduced {
            let mono = FracPoly::monomial(
                c as i128,
                &k.base,
                k.slot,
                self.spec.level,
                self.spec.p,
                self.spec.nvars,
                self.spec.prec,
                self.spec.cap,
            );
            out = out.add(&mono);
        }
        Ok(out)
    }

    pub fn nf_charp(&self, f: &CharPPoly) -> Result<CharPPoly> {
        assert_eq!(self.spec.prec, 1);
        let g = f.at_level(self.spec.level);
        let terms: Vec<(ExpKey, u64)> = g.terms().map(|(k, c)| (k.clone(), c)).collect();
        let reduced = self.nf_terms(&terms)?;
        let tilt = self.spec.slot_rule == SlotRule::Tilt;
        let mut out = CharPPoly::zero(self.spec.p, self.spec.nvars, self.spec.cap, tilt);
        for (k, c) in reduced {
            out = out.add(&CharPPoly::monomial(
                c as i128,
                &k.base,
                k.slot,
                self.spec.level,
                self.spec.p,
                self.spec.nvars,
                self.spec.cap,
                tilt,
            ));
        }
        Ok(out)
    }

    pub fn contains(&self, f: &FracPoly) -> Result<bool> {
        Ok(self.nf(f)?.is_zero())
    }

    pub fn contains_charp(&self, f: &CharPPoly) -> Result<bool> {
        Ok(self.nf_charp(f)?.is_zero())
    }

    /// The smallest k with p^k·(key) in the ideal window — the class of the
    /// monomial generates Z/p^k in the quotient. Engine-independent
    /// definition, evaluated by membership tests.
    pub fn class_modulus(&self, key: &ExpKey) -> Result<u32> {
        self.spec.check_key(key)?;
        if let Engine::Monomial(e) = &self.engine {
            return Ok(e.class_modulus(&self.spec, key));
        }
        for k in 0..self.spec.prec {
            let c = pow_u64(self.spec.p, k);
            if self.nf_terms(&[(key.clone(), c)])?.is_empty() {
                return Ok(k);
            }
        }
        Ok(self.spec.prec)
    }

    /// Visits the quotient-basis monomials of exact base-degree numerator d:
    /// for single-term and rewrite engines these are the monomials whose
    /// class is nonzero (resp. irreducible); the linear engines enumerate
    /// pivot-free columns and are restricted to precision 1, where that is
    /// an honest basis.
    pub fn visit_basis_at_degree(&self, d: u32, mut f: impl FnMut(&ExpKey)) -> Result<()> {
        if d > self.spec.degree_bound() {
            return Ok(());
        }
        match &self.engine {
            Engine::Monomial(e) => {
                visit_degree(&self.spec, d, |k| {
                    if e.class_modulus(&self.spec, k) >= 1 {
                        f(k);
                    }
                });
                Ok(())
            }
            Engine::Rewrite(e) => {
                visit_degree(&self.spec, d, |k| {
                    if e.is_irreducible(k) {
                        f(k);
                    }
                });
                Ok(())
            }
            Engine::Graded(e) => {
                if self.spec.prec != 1 {
                    return Err(Error::Incompatible(
                        "basis enumeration on a linear engine needs precision 1".into(),
                    ));
                }
                let data = e.degree_data(&self.spec, d)?;
                for (j, k) in data.cols.iter().enumerate() {
                    if data.col_pivot[j].is_none() {
                        f(k);
                    }
                }
                Ok(())
            }
            Engine::Dense(e) => {
                if self.spec.prec != 1 {
                    return Err(Error::Incompatible(
                        "basis enumeration on a linear engine needs precision 1".into(),
                    ));
                }
                let data = e.data();
                for (j, k) in data.cols.iter().enumerate() {
                    if k.degree_num() == d && data.col_pivot[j].is_none() {
                        f(k);
                    }
                }
                Ok(())
            }
        }
    }

    pub fn basis_at_degree(&self, d: u32) -> Result<Vec<ExpKey>> {
        let mut out = Vec::new();
        self.visit_basis_at_degree(d, |k| out.push(k.clone()))?;
        Ok(out)
    }

    /// Length of the quotient as a Z/p^prec-module over the window, when it
    /// is finite and distinguishable from free at this precision.
    pub fn module_length(&self) -> Result<u64> {
        let n = self.spec.prec;
        match &self.engine {
            Engine::Monomial(e) => {
                let mut total = 0u64;
                let mut not_finite = false;
                visit_window(&self.spec, |k| {
                    let a = e.class_modulus(&self.spec, k);
                    if n >= 2 && a >= n {
                        not_finite = true;
                    }
                    total += a as u64;
                });
                if not_finite {
                    return Err(Error::NotFinite { prec: n });
                }
                Ok(total)
            }
            Engine::Rewrite(e) => {
                let mut total = 0u64;
                let mut not_finite = false;
                visit_window(&self.spec, |k| {
                    if e.is_irreducible(k) {
                        if n >= 2 {
                            not_finite = true;
                        }
                        total += n as u64;
                    }
                });
                if not_finite {
                    return Err(Error::NotFinite { prec: n });
                }
                Ok(total)
            }
            Engine::Graded(e) => {
                let mut total = 0u64;
                for d in 0..=self.spec.degree_bound() {
                    total += e.degree_data(&self.spec, d)?.length(&self.spec)?;
                }
                Ok(total)
            }
            Engine::Dense(e) => e.data().length(&self.spec),
        }
    }

    /// Generators of the genuine p-torsion of the quotient, as term lists.
    /// Genuine means: killed by p but outside span + p^(prec−1)·(window),
    /// the unavoidable artifact of finite precision.
    pub fn torsion_generators(&self) -> Result<Vec<Vec<(ExpKey, u64)>>> {
        match &self.engine {
            Engine::Monomial(e) => {
                let n = self.spec.prec;
                let mut out = Vec::new();
                visit_window(&self.spec, |k| {
                    let a = e.class_modulus(&self.spec, k);
                    if a >= 1 && a <= n.saturating_sub(1) {
                        out.push(vec![(k.clone(), pow_u64(self.spec.p, a - 1))]);
                    }
                });
                Ok(out)
            }
            Engine::Rewrite(_) => Ok(Vec::new()),
            Engine::Graded(e) => {
                let mut out = Vec::new();
                for d in 0..=self.spec.degree_bound() {
                    let data = e.degree_data(&self.spec, d)?;
                    out.extend(data.torsion_generators(&self.spec));
                }
                Ok(out)
            }
            Engine::Dense(e) => Ok(e.data().torsion_generators(&self.spec)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn key(slot: u32, base: &[u32]) -> ExpKey {
        ExpKey {
            slot,
            base: base.to_vec().into_boxed_slice(),
        }
    }

    fn spec(p: u64, nvars: usize, prec: u32, level: u32, cap: u32, rule: SlotRule) -> WindowSpec {
        WindowSpec {
            p,
            nvars,
            prec,
            level,
            cap,
            slot_rule: rule,
        }
    }

    /// Same generators forced through the whole-window engine, as the
    /// brute-force reference all faster engines are checked against.
    fn dense_reference(spec: &WindowSpec, gens: &[Vec<(ExpKey, u64)>]) -> QuotientWindow {
        QuotientWindow {
            spec: spec.clone(),
            engine: Engine::Dense(dense::DenseEngine::try_new(spec, gens).unwrap()),
        }
    }

    fn random_terms(
        rng: &mut ChaCha8Rng,
        spec: &WindowSpec,
        nterms: usize,
    ) -> Vec<(ExpKey, u64)> {
        let m = pow_u64(spec.p, spec.prec);
        let mut acc: std::collections::BTreeMap<ExpKey, u64> = Default::default();
        for _ in 0..nterms {
            let mut budget = spec.degree_bound();
            let mut base = vec![0u32; spec.nvars];
            for e in base.iter_mut() {
                *e = rng.gen_range(0..=budget);
                budget -= *e;
            }
            let slot = rng.gen_range(0..=spec.slot_bound());
            let c = rng.gen_range(0..m);
            let entry = acc.entry(key(slot, &base)).or_insert(0);
            *entry = (*entry + c) % m;
        }
        acc.into_iter().filter(|&(_, c)| c != 0).collect()
    }

    #[test]
    fn engine_selection_by_generator_shape() {
        let s = spec(2, 2, 2, 0, 3, SlotRule::None);
        // Single terms → monomial.
        let w = QuotientWindow::new(s.clone(), vec![vec![(key(0, &[1, 0]), 2)]]).unwrap();
        assert_eq!(w.engine_name(), "monomial");
        // Unit-leading binomial → rewrite.
        let g = vec![(key(0, &[0, 2]), 1), (key(0, &[1, 1]), 1)];
        let w = QuotientWindow::new(s.clone(), vec![g]).unwrap();
        assert_eq!(w.engine_name(), "rewrite");
        // Homogeneous but non-confluent pair → graded.
        let s3 = spec(3, 3, 2, 0, 3, SlotRule::None);
        let g1 = vec![(key(0, &[0, 0, 2]), 8), (key(0, &[1, 1, 0]), 1)]; // xy − z²
        let g2 = vec![(key(0, &[0, 2, 0]), 8), (key(0, &[2, 0, 0]), 1)]; // x² − y²
        let w = QuotientWindow::new(s3, vec![g1, g2]).unwrap();
        assert_eq!(w.engine_name(), "graded");
        // Three terms, inhomogeneous → dense.
        let g = vec![
            (key(0, &[0, 0]), 1),
            (key(0, &[1, 0]), 1),
            (key(0, &[2, 0]), 1),
        ];
        let w = QuotientWindow::new(s, vec![g]).unwrap();
        assert_eq!(w.engine_name(), "dense");
    }

    #[test]
    fn monomial_window_frozen_structure() {
        // Z/8[x]/(p², px, x²) with cap 2: classes 1 (mod p²), x (mod p), x² (0).
        let s = spec(2, 1, 3, 0, 2, SlotRule::None);
        let gens = vec![
            vec![(key(0, &[0]), 4)],
            vec![(key(0, &[1]), 2)],
            vec![(key(0, &[2]), 1)],
        ];
        let w = QuotientWindow::new(s.clone(), gens.clone()).unwrap();
        assert_eq!(w.engine_name(), "monomial");
        assert_eq!(w.class_modulus(&key(0, &[0])).unwrap(), 2);
        assert_eq!(w.class_modulus(&key(0, &[1])).unwrap(), 1);
        assert_eq!(w.class_modulus(&key(0, &[2])).unwrap(), 0);
        assert_eq!(w.module_length().unwrap(), 3);
        // Genuine torsion: p·1 (order p) and x (order p).
        let tors = w.torsion_generators().unwrap();
        assert_eq!(
            tors,
            vec![vec![(key(0, &[0]), 2)], vec![(key(0, &[1]), 1)]]
        );
        // The dense reference agrees on every verdict.
        let d = dense_reference(&s, &gens);
        for k in [key(0, &[0]), key(0, &[1]), key(0, &[2])] {
            assert_eq!(
                w.class_modulus(&k).unwrap(),
                d.class_modulus(&k).unwrap()
            );
        }
        assert_eq!(d.module_length().unwrap(), 3);
        assert_eq!(d.torsion_generators().unwrap().len(), 2);
    }

    #[test]
    fn length_is_not_finite_with_a_free_class() {
        let s = spec(2, 1, 2, 0, 2, SlotRule::None);
        let w = QuotientWindow::new(s, vec![vec![(key(0, &[1]), 2)]]).unwrap();
        assert!(matches!(
            w.module_length(),
            Err(Error::NotFinite { prec: 2 })
        ));
    }

    #[test]
    fn rewrite_window_substitutes_the_tail() {
        // (x + p) over Z/8: x rewrites to −p, so x² − p² lies in the ideal.
        let s = spec(2, 1, 3, 0, 4, SlotRule::None);
        let gens = vec![vec![(key(0, &[0]), 2), (key(0, &[1]), 1)]];
        let w = QuotientWindow::new(s.clone(), gens.clone()).unwrap();
        assert_eq!(w.engine_name(), "rewrite");
        assert_eq!(w.nf_terms(&[(key(0, &[1]), 1)]).unwrap(), vec![(key(0, &[0]), 6)]);
        let x2_minus_p2 = vec![(key(0, &[0]), 4), (key(0, &[2]), 1)];
        // x² + 4 = x² − p² mod 8.
        assert!(w.nf_terms(&x2_minus_p2).unwrap().is_empty());
        // Dense agreement on membership for random elements.
        let d = dense_reference(&s, &gens);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let f = random_terms(&mut rng, &s, 3);
            assert_eq!(
                w.nf_terms(&f).unwrap().is_empty(),
                d.nf_terms(&f).unwrap().is_empty(),
                "membership disagreement on {f:?}"
            );
        }
    }

    #[test]
    fn rewrite_vs_dense_membership_on_binomial_ideal() {
        // (xy − zw) over Z/4, four variables.
        let s = spec(2, 4, 2, 0, 4, SlotRule::None);
        let gens = vec![vec![
            (key(0, &[0, 0, 1, 1]), 3),
            (key(0, &[1, 1, 0, 0]), 1),
        ]];
        let w = QuotientWindow::new(s.clone(), gens.clone()).unwrap();
        assert_eq!(w.engine_name(), "rewrite");
        let d = dense_reference(&s, &gens);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let f = random_terms(&mut rng, &s, 3);
            assert_eq!(
                w.nf_terms(&f).unwrap().is_empty(),
                d.nf_terms(&f).unwrap().is_empty(),
                "membership disagreement on {f:?}"
            );
        }
        // xy·zw − z²w² = zw·(xy − zw) is a product multiple inside the window.
        let f = vec![(key(0, &[1, 1, 1, 1]), 1), (key(0, &[0, 0, 2, 2]), 3)];
        assert!(w.nf_terms(&f).unwrap().is_empty());
    }

    #[test]
    fn graded_vs_dense_on_nonconfluent_pair() {
        // (xy − z², x² − y²) over Z/9.
        let s = spec(3, 3, 2, 0, 3, SlotRule::None);
        let g1 = vec![(key(0, &[0, 0, 2]), 8), (key(0, &[1, 1, 0]), 1)];
        let g2 = vec![(key(0, &[0, 2, 0]), 8), (key(0, &[2, 0, 0]), 1)];
        let gens = vec![g1, g2];
        let w = QuotientWindow::new(s.clone(), gens.clone()).unwrap();
        assert_eq!(w.engine_name(), "graded");
        let d = dense_reference(&s, &gens);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let f = random_terms(&mut rng, &s, 3);
            assert_eq!(
                w.nf_terms(&f).unwrap().is_empty(),
                d.nf_terms(&f).unwrap().is_empty(),
                "membership disagreement on {f:?}"
            );
        }
        // z² and xy fall in the same class; their difference is in the ideal.
        let diff = vec![(key(0, &[0, 0, 2]), 1), (key(0, &[1, 1, 0]), 8)];
        assert!(w.nf_terms(&diff).unwrap().is_empty());
        assert_eq!(
            w.nf_terms(&[(key(0, &[0, 0, 2]), 1)]).unwrap(),
            w.nf_terms(&[(key(0, &[1, 1, 0]), 1)]).unwrap()
        );
        // The non-joinable critical pair really is joined by linear algebra:
        // x·z² − y³ = x(xy − z²)·(−1) + y(x² − y²) lies in the ideal.
        let spair = vec![(key(0, &[1, 0, 2]), 1), (key(0, &[0, 3, 0]), 8)];
        assert!(w.nf_terms(&spair).unwrap().is_empty());
    }

    #[test]
    fn uniformizer_window_detects_borrowed_divisibility() {
        // Level-1 layer of the torsion quotient family: (p^(1/2)x^(1/2), p^(1/2)y^(1/2))
        // over Z/8. Multiplying x^(1/2) by p^(1/2) twice wraps into p·x^(1/2),
        // so the class of x^(1/2) is killed by p: genuine torsion.
        let s = spec(2, 2, 3, 1, 2, SlotRule::Uniformizer);
        let gens = vec![
            vec![(key(1, &[1, 0]), 1)],
            vec![(key(1, &[0, 1]), 1)],
        ];
        let w = QuotientWindow::new(s.clone(), gens.clone()).unwrap();
        assert_eq!(w.engine_name(), "monomial");
        // p·x^(1/2) is in the ideal window (one slot borrow).
        assert!(w.nf_terms(&[(key(0, &[1, 0]), 2)]).unwrap().is_empty());
        assert_eq!(w.class_modulus(&key(0, &[1, 0])).unwrap(), 1);
        // p^(1/2)x^(1/2) itself is a generator.
        assert_eq!(w.class_modulus(&key(1, &[1, 0])).unwrap(), 0);
        // The unit class is free.
        assert_eq!(w.class_modulus(&key(0, &[0, 0])).unwrap(), 3);
        // Torsion generators include the class of x^(1/2).
        let tors = w.torsion_generators().unwrap();
        assert!(tors.contains(&vec![(key(0, &[1, 0]), 1)]));
        // Dense agreement across the whole 30-monomial window.
        let d = dense_reference(&s, &gens);
        visit_window(&s, |k| {
            assert_eq!(
                w.class_modulus(k).unwrap(),
                d.class_modulus(k).unwrap(),
                "class modulus disagreement at {k:?}"
            );
        });
    }

    #[test]
    fn tilt_window_kills_whole_powers_only() {
        // F_2[t^(1/2), x^(1/2), y^(1/2)]/(t, t^(1/2)x^(1/2), t^(1/2)y^(1/2)).
        let s = spec(2, 2, 1, 1, 2, SlotRule::Tilt);
        let gens = vec![
            vec![(key(2, &[0, 0]), 1)],
            vec![(key(1, &[1, 0]), 1)],
            vec![(key(1, &[0, 1]), 1)],
        ];
        let w = QuotientWindow::new(s, gens).unwrap();
        assert_eq!(w.engine_name(), "monomial");
        // Degree 0: the unit and t^(1/2) survive.
        assert_eq!(
            w.basis_at_degree(0).unwrap(),
            vec![key(0, &[0, 0]), key(1, &[0, 0])]
        );
        // Degree 1 (numerator 1 at level 1): x^(1/2), y^(1/2) survive; their
        // t^(1/2)-multiples are killed.
        assert_eq!(
            w.basis_at_degree(1).unwrap(),
            vec![key(0, &[0, 1]), key(0, &[1, 0])]
        );
    }

    #[test]
    fn window_too_large_is_reported() {
        let s = spec(2, 6, 2, 1, 6, SlotRule::None);
        let g = vec![
            (key(0, &[0, 0, 0, 0, 0, 0]), 1),
            (key(0, &[1, 0, 0, 0, 0, 0]), 1),
            (key(0, &[2, 0, 0, 0, 0, 0]), 1),
        ];
        match QuotientWindow::new(s, vec![g]) {
            Err(Error::WindowTooLarge(_)) => {}
            Err(other) => panic!("expected WindowTooLarge, got {other:?}"),
            Ok(w) => panic!("expected WindowTooLarge, got {} engine", w.engine_name()),
        }
    }

    #[test]
    fn monomial_vs_dense_on_mixed_valuation_generators() {
        // (4, 2x, x³) over Z/8 in two variables with y free.
        let s = spec(2, 2, 3, 0, 3, SlotRule::None);
        let gens = vec![
            vec![(key(0, &[0, 0]), 4)],
            vec![(key(0, &[1, 0]), 2)],
            vec![(key(0, &[3, 0]), 1)],
        ];
        let w = QuotientWindow::new(s.clone(), gens.clone()).unwrap();
        let d = dense_reference(&s, &gens);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..80 {
            let f = random_terms(&mut rng, &s, 2);
            assert_eq!(
                w.nf_terms(&f).unwrap().is_empty(),
                d.nf_terms(&f).unwrap().is_empty(),
                "membership disagreement on {f:?}"
            );
        }
        visit_window(&s, |k| {
            assert_eq!(w.class_modulus(k).unwrap(), d.class_modulus(k).unwrap());
        });
    }
}
