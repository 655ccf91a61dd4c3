//! Ideal arithmetic under the Frobenius lift: images of ideals under phi,
//! phi-stability decisions with witnesses, sums, products, intersections,
//! the monomial radical, prime decomposition of squarefree monomial ideals,
//! and p-torsion of the rooted quotients they present.
//!
//! Monomial questions are decided exactly by exponent-vector arithmetic
//! (divisibility is a local condition, no truncation is involved). Anything
//! else runs through the quotient-window machinery and the verdicts carry
//! the window they were computed on.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exactnum::ZpNMatrix;
use crate::fracpoly::{ExpKey, FracPoly};
use crate::window::{
    visit_window, QuotientWindow, SlotRule, VerdictQuality, WindowSpec, MAX_HOWELL_COLS,
    MAX_HOWELL_ROWS,
};

/// Shape of a generating set, detected at construction. The shape decides
/// which decision procedures apply exactly: monomial questions never
/// truncate, binomial and general ones are window-bound.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IdealClass {
    Monomial,
    SquarefreeMonomial,
    Binomial,
    General,
}

/// An ideal of `Z/p^N[x_1..x_d]` (level 0) or of the level-h ring with
/// p^(1/p^h) adjoined, given by generators. The class tag is recomputed
/// whenever the generators change.
#[derive(Clone, Debug)]
pub struct IdealPresentation {
    p: u64,
    nvars: usize,
    prec: u32,
    level: u32,
    generators: Vec<FracPoly>,
    class: IdealClass,
    /// Set when the generators were produced by window-truncated linear
    /// algebra and therefore only present the ideal up to that cap.
    windowed: Option<u32>,
}

impl IdealPresentation {
    pub fn new(
        p: u64,
        nvars: usize,
        prec: u32,
        level: u32,
        generators: Vec<FracPoly>,
    ) -> Result<Self> {
        if prec == 0 || nvars == 0 {
            return Err(Error::Validation(
                "an ideal needs at least one variable and one digit of precision".into(),
            ));
        }
        let mut gens: Vec<FracPoly> = Vec::with_capacity(generators.len());
        for g in generators {
            if g.p() != p || g.nvars() != nvars {
                return Err(Error::Incompatible(
                    "generator does not match the ideal's p or variables".into(),
                ));
            }
            if g.level() > level {
                return Err(Error::Incompatible(format!(
                    "generator at level {} exceeds the ideal's level {}",
                    g.level(),
                    level
                )));
            }
            if g.precision() < prec {
                return Err(Error::PrecisionExhausted {
                    needed: prec,
                    have: g.precision(),
                });
            }
            let g = g.at_level(level).truncate_prec(prec);
            if g.is_zero() {
                continue;
            }
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        let class = detect_class(p, prec, level, &gens);
        Ok(IdealPresentation {
            p,
            nvars,
            prec,
            level,
            generators: gens,
            class,
            windowed: None,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn generators(&self) -> &[FracPoly] {
        &self.generators
    }

    pub fn class(&self) -> IdealClass {
        self.class
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// The window cap this presentation was truncated at, if any.
    pub fn windowed(&self) -> Option<u32> {
        self.windowed
    }

    /// p^level — exponent numerators are counted in units of 1/p^level.
    pub fn level_unit(&self) -> u32 {
        (self.p as u32).pow(self.level)
    }

    /// Largest exponent numerator among the generators' terms.
    pub fn max_degree_num(&self) -> u32 {
        self.generators
            .iter()
            .flat_map(|g| g.terms().map(|(k, _)| k.degree_num()))
            .max()
            .unwrap_or(0)
    }

    pub fn render(&self, names: &[&str]) -> String {
        if self.generators.is_empty() {
            return "(0)".into();
        }
        let body = self
            .generators
            .iter()
            .map(|g| g.render(names))
            .collect::<Vec<_>>()
            .join(", ");
        format!("({body})")
    }

    fn window_spec(&self, cap: u32) -> WindowSpec {
        WindowSpec {
            p: self.p,
            nvars: self.nvars,
            prec: self.prec,
            level: self.level,
            cap,
            slot_rule: if self.level == 0 {
                SlotRule::None
            } else {
                SlotRule::Uniformizer
            },
        }
    }

    /// The quotient window modulo this ideal at the given cap.
    pub fn window(&self, cap: u32) -> Result<QuotientWindow> {
        QuotientWindow::from_fracpolys(self.window_spec(cap), &self.generators)
    }

    /// Replaces the generators with an equivalent minimal monomial set:
    /// monic p-power times monomial, divisible generators pruned, sorted.
    pub fn minimalized(&self) -> Result<IdealPresentation> {
        let data = self.monomial_data()?;
        let gens = emit_monomials(&minimalize(data), self);
        IdealPresentation::new(self.p, self.nvars, self.prec, self.level, gens)
    }

    /// (total p-exponent numerator, base numerators) per generator;
    /// errors unless the class is monomial.
    fn monomial_data(&self) -> Result<Vec<MonoExp>> {
        if !matches!(
            self.class,
            IdealClass::Monomial | IdealClass::SquarefreeMonomial
        ) {
            return Err(Error::NotMonomial(format!(
                "the ideal has a {:?}-class generator",
                self.class
            )));
        }
        let unit = self.level_unit();
        Ok(self
            .generators
            .iter()
            .map(|g| {
                let (k, c) = g.terms().next().expect("generators are nonzero");
                MonoExp {
                    p_num: valuation(c, self.p, self.prec) * unit + k.slot,
                    base: k.base.to_vec(),
                }
            })
            .collect())
    }
}

/// Exponent vector of a monomial with the p-exponent unified into numerator
/// units of 1/p^level, coefficient unit part dropped.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct MonoExp {
    p_num: u32,
    base: Vec<u32>,
}

impl MonoExp {
    fn divides(&self, other: &MonoExp) -> bool {
        self.p_num <= other.p_num
            && self
                .base
                .iter()
                .zip(&other.base)
                .all(|(a, b)| a <= b)
    }

    fn lcm(&self, other: &MonoExp) -> MonoExp {
        MonoExp {
            p_num: self.p_num.max(other.p_num),
            base: self
                .base
                .iter()
                .zip(&other.base)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    fn support(&self) -> BTreeSet<usize> {
        // 0 encodes the p-exponent, j+1 the j-th variable.
        let mut s = BTreeSet::new();
        if self.p_num > 0 {
            s.insert(0);
        }
        for (j, &e) in self.base.iter().enumerate() {
            if e > 0 {
                s.insert(j + 1);
            }
        }
        s
    }
}

fn valuation(c: u64, p: u64, prec: u32) -> u32 {
    let mut c = c;
    let mut v = 0;
    while v < prec && c.is_multiple_of(p) {
        c /= p;
        v += 1;
    }
    v
}

fn detect_class(p: u64, prec: u32, level: u32, gens: &[FracPoly]) -> IdealClass {
    let unit = (p as u32).pow(level);
    let modulus = crate::exactnum::pow_u64(p, prec);
    let mut monomial = true;
    let mut squarefree = true;
    let mut binomial = true;
    for g in gens {
        let terms: Vec<(&ExpKey, u64)> = g.terms().collect();
        match terms.as_slice() {
            [(k, c)] => {
                let p_num = valuation(*c, p, prec) * unit + k.slot;
                if p_num > 1 || k.base.iter().any(|&e| e > 1) {
                    squarefree = false;
                }
            }
            [(_, c1), (_, c2)] => {
                monomial = false;
                squarefree = false;
                // A difference of two monomials, up to a scalar.
                if !(*c1 as u128 + *c2 as u128).is_multiple_of(modulus as u128) {
                    binomial = false;
                }
            }
            _ => {
                monomial = false;
                squarefree = false;
                binomial = false;
            }
        }
    }
    if monomial {
        if squarefree {
            IdealClass::SquarefreeMonomial
        } else {
            IdealClass::Monomial
        }
    } else if binomial {
        IdealClass::Binomial
    } else {
        IdealClass::General
    }
}

/// Divisibility pruning in a deterministic order: p-exponent, then total
/// degree, then earlier variables first. Divisors sort before multiples,
/// so one forward pass suffices.
fn minimalize(mut data: Vec<MonoExp>) -> Vec<MonoExp> {
    data.sort_by(|a, b| {
        a.p_num
            .cmp(&b.p_num)
            .then_with(|| {
                a.base
                    .iter()
                    .sum::<u32>()
                    .cmp(&b.base.iter().sum::<u32>())
            })
            .then_with(|| b.base.cmp(&a.base))
    });
    data.dedup();
    let mut kept: Vec<MonoExp> = Vec::with_capacity(data.len());
    for m in data {
        if !kept.iter().any(|k| k.divides(&m)) {
            kept.push(m);
        }
    }
    kept
}

/// Builds monic generators from exponent vectors at the template's level.
fn emit_monomials(data: &[MonoExp], template: &IdealPresentation) -> Vec<FracPoly> {
    let unit = template.level_unit();
    data.iter()
        .map(|m| {
            let cap = m.base.iter().sum::<u32>().div_ceil(unit).max(1);
            FracPoly::monomial(
                1,
                &m.base,
                m.p_num,
                template.level,
                template.p,
                template.nvars,
                template.prec,
                cap,
            )
        })
        .collect()
}

/// The image ideal under the Frobenius lift: generated by the phi-images
/// of the generators. Wants whole exponents; fractional data is refused.
pub fn phi_power(ideal: &IdealPresentation) -> Result<IdealPresentation> {
    if ideal.level != 0 {
        return Err(Error::RamifiedInput);
    }
    let p32 = ideal.p as u32;
    let gens = ideal
        .generators
        .iter()
        .map(|g| {
            let deg = g.terms().map(|(k, _)| k.degree_num()).max().unwrap_or(0);
            g.with_cap(g.cap().max(deg * p32)).frobenius_substitute()
        })
        .collect::<Result<Vec<_>>>()?;
    IdealPresentation::new(ideal.p, ideal.nvars, ideal.prec, 0, gens)
}

/// Outcome of a phi-stability check.
#[derive(Clone, Debug)]
pub enum PhiStability {
    Stable,
    NotStable {
        /// The phi-image of a generator that escapes the ideal.
        witness: FracPoly,
        /// Its nonzero normal form modulo the ideal window.
        residual: FracPoly,
    },
    /// Stability verified only for generators of exponent numerator up to
    /// the stated bound; at least one generator lies beyond it, or a
    /// window-qualified engine could not certify a nonzero residual.
    UnknownBeyond(u32),
}

/// Decides whether the ideal contains the phi-image of each generator
/// (equivalently, of each element). Monomial classes are decided exactly;
/// binomial and general classes by membership on the window at `cap`.
pub fn is_phi_stable(ideal: &IdealPresentation, cap: u32) -> Result<PhiStability> {
    match ideal.class {
        IdealClass::Monomial | IdealClass::SquarefreeMonomial => {
            // phi multiplies every exponent by p, so each generator divides
            // its own image; checked literally on the exponent vectors.
            let p32 = ideal.p as u32;
            for m in ideal.monomial_data()? {
                let image = MonoExp {
                    p_num: m.p_num * p32,
                    base: m.base.iter().map(|e| e * p32).collect(),
                };
                assert!(m.divides(&image));
            }
            Ok(PhiStability::Stable)
        }
        IdealClass::Binomial | IdealClass::General => {
            let unit = ideal.level_unit();
            let p32 = ideal.p as u32;
            let bound = cap * unit;
            let w = ideal.window(cap)?;
            let mut unknown = false;
            for g in &ideal.generators {
                let deg = g.terms().map(|(k, _)| k.degree_num()).max().unwrap_or(0);
                if deg * p32 > bound {
                    unknown = true;
                    continue;
                }
                let image = g.with_cap(cap).frobenius_substitute()?;
                let residual = w.nf(&image)?;
                if residual.is_zero() {
                    continue;
                }
                if w.quality() == VerdictQuality::Exact {
                    return Ok(PhiStability::NotStable {
                        witness: image.at_level(ideal.level),
                        residual,
                    });
                }
                unknown = true;
            }
            Ok(if unknown {
                PhiStability::UnknownBeyond(bound / p32)
            } else {
                PhiStability::Stable
            })
        }
    }
}

fn common_frame(a: &IdealPresentation, b: &IdealPresentation) -> Result<(u64, usize, u32, u32)> {
    if a.p != b.p || a.nvars != b.nvars {
        return Err(Error::Incompatible(
            "ideal operands live over different rings".into(),
        ));
    }
    Ok((a.p, a.nvars, a.prec.min(b.prec), a.level.max(b.level)))
}

pub fn ideal_sum(a: &IdealPresentation, b: &IdealPresentation) -> Result<IdealPresentation> {
    let (p, nvars, prec, level) = common_frame(a, b)?;
    let gens = a
        .generators
        .iter()
        .chain(&b.generators)
        .cloned()
        .collect();
    IdealPresentation::new(p, nvars, prec, level, gens)
}

pub fn ideal_product(a: &IdealPresentation, b: &IdealPresentation) -> Result<IdealPresentation> {
    let (p, nvars, prec, level) = common_frame(a, b)?;
    let unit = (p as u32).pow(level);
    let mut gens = Vec::with_capacity(a.generators.len() * b.generators.len());
    for f in &a.generators {
        for g in &b.generators {
            let f = f.at_level(level);
            let g = g.at_level(level);
            let deg = |h: &FracPoly| h.terms().map(|(k, _)| k.degree_num()).max().unwrap_or(0);
            // Degrees add; host both factors under a cap that fits the product.
            let cap = (deg(&f) + deg(&g)).div_ceil(unit).max(1);
            gens.push(f.with_cap(cap).mul(&g.with_cap(cap)));
        }
    }
    IdealPresentation::new(p, nvars, prec, level, gens)
}

/// Intersection. Exact for two monomial-class ideals (pairwise lcm of
/// generators); otherwise computed by syzygy linear algebra on the window
/// at `cap` and flagged as window-truncated on the result.
pub fn ideal_intersection(
    a: &IdealPresentation,
    b: &IdealPresentation,
    cap: u32,
) -> Result<IdealPresentation> {
    let (p, nvars, prec, level) = common_frame(a, b)?;
    let monomial = |c: IdealClass| {
        matches!(c, IdealClass::Monomial | IdealClass::SquarefreeMonomial)
    };
    if monomial(a.class) && monomial(b.class) {
        let da = a.monomial_data()?;
        let db = b.monomial_data()?;
        let mut lcms = Vec::with_capacity(da.len() * db.len());
        for x in &da {
            for y in &db {
                lcms.push(x.lcm(y));
            }
        }
        let template = IdealPresentation {
            p,
            nvars,
            prec,
            level,
            generators: Vec::new(),
            class: IdealClass::Monomial,
            windowed: None,
        };
        let gens = emit_monomials(&minimalize(lcms), &template);
        return IdealPresentation::new(p, nvars, prec, level, gens);
    }

    // Window path: the row space of all in-window generator multiples, for
    // each side; kernel vectors of the stacked matrix describe elements of
    // the intersection.
    let unit = (p as u32).pow(level);
    let bound = cap * unit;
    let spec = WindowSpec {
        p,
        nvars,
        prec,
        level,
        cap,
        slot_rule: if level == 0 {
            SlotRule::None
        } else {
            SlotRule::Uniformizer
        },
    };
    let mut cols: Vec<ExpKey> = Vec::new();
    visit_window(&spec, |k| cols.push(k.clone()));
    if cols.len() as u64 > MAX_HOWELL_COLS {
        return Err(Error::WindowTooLarge(format!(
            "intersection window has {} monomials (bound {MAX_HOWELL_COLS})",
            cols.len()
        )));
    }
    let index: std::collections::BTreeMap<ExpKey, usize> = cols
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();

    let row_block = |gens: &[FracPoly]| -> Result<Vec<Vec<u64>>> {
        let mut rows = Vec::new();
        for g in gens {
            let g = g.at_level(level);
            let deg = g.terms().map(|(k, _)| k.degree_num()).max().unwrap_or(0);
            if deg > bound {
                return Err(Error::WindowTooSmall(format!(
                    "generator degree {deg} exceeds the window bound {bound}"
                )));
            }
            let g = g.with_cap(cap);
            for m in &cols {
                if deg + m.degree_num() > bound {
                    continue;
                }
                let mono = FracPoly::monomial(
                    1, &m.base, m.slot, level, p, nvars, prec, cap,
                );
                let prod = g.mul(&mono);
                let mut row = vec![0u64; cols.len()];
                for (k, c) in prod.terms() {
                    row[index[k]] = c;
                }
                rows.push(row);
            }
        }
        Ok(rows)
    };
    let rows_a = row_block(&a.generators)?;
    let rows_b = row_block(&b.generators)?;
    let (sa, total) = (rows_a.len(), rows_a.len() + rows_b.len());
    if total as u64 > MAX_HOWELL_ROWS {
        return Err(Error::WindowTooLarge(format!(
            "intersection system needs {total} rows (bound {MAX_HOWELL_ROWS})"
        )));
    }
    let mut mat = ZpNMatrix::zero(p, prec, total, cols.len());
    for (r, row) in rows_a.iter().chain(&rows_b).enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v != 0 {
                mat.set(r, c, v);
            }
        }
    }
    let kernel = mat.left_kernel();
    let m = crate::exactnum::pow_u64(p, prec);
    let mut candidates = ZpNMatrix::zero(p, prec, kernel.rows(), cols.len());
    for r in 0..kernel.rows() {
        // The A-side partial sum of a kernel row lies in both row spaces.
        for (i, row_a) in rows_a.iter().enumerate().take(sa) {
            let c = kernel.at(r, i);
            if c == 0 {
                continue;
            }
            for (j, &v) in row_a.iter().enumerate() {
                let add = (c as u128 * v as u128 % m as u128) as u64;
                let cur = candidates.at(r, j);
                candidates.set(r, j, (cur + add) % m);
            }
        }
    }
    let canon = candidates.howell_form();
    let mut gens = Vec::new();
    for r in 0..canon.rows() {
        let mut f = FracPoly::zero(p, nvars, prec, cap);
        for (j, k) in cols.iter().enumerate() {
            let c = canon.at(r, j);
            if c != 0 {
                f = f.add(&FracPoly::monomial(
                    c as i128, &k.base, k.slot, level, p, nvars, prec, cap,
                ));
            }
        }
        if !f.is_zero() {
            gens.push(f);
        }
    }
    let mut out = IdealPresentation::new(p, nvars, prec, level, gens)?;
    out.windowed = Some(cap);
    Ok(out)
}

/// The radical of a monomial ideal: each generator is replaced by the
/// product of its support variables (the p-exponent counts as a variable),
/// then the set is minimalized.
pub fn radical_monomial(ideal: &IdealPresentation) -> Result<IdealPresentation> {
    let data = ideal.monomial_data()?;
    let rad: Vec<MonoExp> = data
        .iter()
        .map(|m| MonoExp {
            p_num: m.p_num.min(1),
            base: m.base.iter().map(|&e| e.min(1)).collect(),
        })
        .collect();
    let gens = emit_monomials(&minimalize(rad), ideal);
    IdealPresentation::new(ideal.p, ideal.nvars, ideal.prec, ideal.level, gens)
}

/// A monomial prime: the ideal generated by a set of parameters, where the
/// p-exponent (at the presentation's level scale) may be one of them.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PrimeComponent {
    pub includes_p: bool,
    pub vars: Vec<usize>,
}

impl PrimeComponent {
    fn from_set(s: &BTreeSet<usize>) -> PrimeComponent {
        PrimeComponent {
            includes_p: s.contains(&0),
            vars: s.iter().filter(|&&i| i > 0).map(|&i| i - 1).collect(),
        }
    }

    pub fn render(&self, names: &[&str]) -> String {
        let mut parts = Vec::new();
        if self.includes_p {
            parts.push("p".to_string());
        }
        parts.extend(self.vars.iter().map(|&j| names[j].to_string()));
        format!("({})", parts.join(", "))
    }

    /// The component as an ideal at the template's level scale.
    pub fn to_ideal(&self, template: &IdealPresentation) -> Result<IdealPresentation> {
        let mut data = Vec::new();
        if self.includes_p {
            data.push(MonoExp {
                p_num: 1,
                base: vec![0; template.nvars],
            });
        }
        for &j in &self.vars {
            let mut base = vec![0; template.nvars];
            base[j] = 1;
            data.push(MonoExp { p_num: 0, base });
        }
        let gens = emit_monomials(&data, template);
        IdealPresentation::new(
            template.p,
            template.nvars,
            template.prec,
            template.level,
            gens,
        )
    }
}

#[derive(Clone, Debug)]
pub struct PrimeDecomposition {
    pub level: u32,
    pub components: Vec<PrimeComponent>,
}

impl PrimeDecomposition {
    pub fn render(&self, names: &[&str]) -> String {
        self.components
            .iter()
            .map(|c| c.render(names))
            .collect::<Vec<_>>()
            .join(" cap ")
    }
}

/// Writes a squarefree monomial ideal as the intersection of its minimal
/// monomial primes, by recursive splitting on a variable of a non-prime
/// generator. The result is re-verified: a squarefree monomial lies in the
/// ideal exactly when it lies in every component.
pub fn prime_decomposition(ideal: &IdealPresentation) -> Result<PrimeDecomposition> {
    if ideal.class != IdealClass::SquarefreeMonomial {
        return Err(Error::NotSquarefree(format!(
            "the ideal has class {:?}",
            ideal.class
        )));
    }
    let supports: Vec<BTreeSet<usize>> = minimalize(ideal.monomial_data()?)
        .iter()
        .map(MonoExp::support)
        .collect();
    if supports.iter().any(|s| s.is_empty()) {
        return Err(Error::Validation(
            "a unit generator makes the quotient zero; no prime decomposition".into(),
        ));
    }
    let mut primes: Vec<BTreeSet<usize>> = Vec::new();
    split(&supports, &mut primes);
    // Keep minimal components only; deterministic order.
    primes.sort();
    primes.dedup();
    let minimal: Vec<BTreeSet<usize>> = primes
        .iter()
        .filter(|p| !primes.iter().any(|q| q.len() < p.len() && q.is_subset(p)))
        .cloned()
        .collect();

    // Re-verification on every squarefree monomial when the variable count
    // permits exhaustion; squarefree membership depends only on supports,
    // so this is a complete check of the ideal equality.
    let slots = ideal.nvars + 1;
    if slots <= 16 {
        for mask in 0u32..(1 << slots) {
            let t: BTreeSet<usize> = (0..slots).filter(|i| mask >> i & 1 == 1).collect();
            let in_ideal = supports.iter().any(|s| s.is_subset(&t));
            let in_primes = minimal.iter().all(|p| !p.is_disjoint(&t));
            if in_ideal != in_primes {
                return Err(Error::Validation(
                    "internal: prime decomposition failed re-verification".into(),
                ));
            }
        }
    }
    Ok(PrimeDecomposition {
        level: ideal.level,
        components: minimal.iter().map(PrimeComponent::from_set).collect(),
    })
}

fn split(gens: &[BTreeSet<usize>], out: &mut Vec<BTreeSet<usize>>) {
    // Prune generators containing another generator.
    let kept: Vec<&BTreeSet<usize>> = gens
        .iter()
        .filter(|g| !gens.iter().any(|h| h.len() < g.len() && h.is_subset(g)))
        .collect();
    match kept.iter().find(|g| g.len() >= 2) {
        None => {
            // Every generator is a single parameter: a monomial prime.
            out.push(kept.into_iter().flatten().copied().collect());
        }
        Some(g) => {
            let x = *g.iter().next().expect("nonempty");
            let mut left: Vec<BTreeSet<usize>> =
                kept.iter().map(|s| (*s).clone()).collect();
            left.push([x].into());
            let mut right: Vec<BTreeSet<usize>> = Vec::new();
            for s in &kept {
                let mut s = (*s).clone();
                s.remove(&x);
                if s.is_empty() {
                    // The split variable was this whole generator; the
                    // right branch would contain a unit: no component.
                    return split(&left, out);
                }
                right.push(s);
            }
            split(&left, out);
            split(&right, out);
        }
    }
}

/// p-torsion of the level-`level` rooted quotient of a squarefree monomial
/// ideal, together with its numeric confirmation.
#[derive(Clone, Debug)]
pub struct TorsionReport {
    /// Generators of the torsion ideal: base parts of the p-divisible
    /// generators, at the level's exponent scale.
    pub symbolic: IdealPresentation,
    /// Number of numeric torsion generators found on the window.
    pub numeric_count: usize,
    /// The window cap both computations were compared on.
    pub cap: u32,
}

/// Generators of the rooted layer presentation: every exponent of every
/// generator divided by p^level, the p-exponent included.
pub(crate) fn rooted_generators(
    ideal: &IdealPresentation,
    level: u32,
    cap: u32,
) -> Result<Vec<FracPoly>> {
    if ideal.level != 0 || ideal.class != IdealClass::SquarefreeMonomial {
        return Err(Error::ModeMismatch(
            "rooted layers need a level-0 squarefree monomial ideal".into(),
        ));
    }
    let data = minimalize(ideal.monomial_data()?);
    Ok(data
        .iter()
        .map(|m| {
            FracPoly::monomial(
                1,
                &m.base,
                m.p_num,
                level,
                ideal.p,
                ideal.nvars,
                ideal.prec,
                cap,
            )
        })
        .collect())
}

/// Computes the p-torsion of the rooted quotient two ways and insists they
/// agree: symbolically (base parts of the p-divisible generators) and
/// numerically (torsion generators of the truncated module). The numeric
/// side is an independent kernel-of-multiplication-by-p computation.
pub fn p_torsion(
    ideal: &IdealPresentation,
    level: u32,
    cap: u32,
) -> Result<TorsionReport> {
    let layer_gens = rooted_generators(ideal, level, cap)?;
    let data = minimalize(ideal.monomial_data()?);
    let torsion_data: Vec<MonoExp> = data
        .iter()
        .filter(|m| m.p_num > 0)
        .map(|m| MonoExp {
            p_num: 0,
            base: m.base.clone(),
        })
        .collect();
    let template = IdealPresentation {
        p: ideal.p,
        nvars: ideal.nvars,
        prec: ideal.prec,
        level,
        generators: Vec::new(),
        class: IdealClass::Monomial,
        windowed: None,
    };
    let symbolic_gens = emit_monomials(&torsion_data, &template);
    let symbolic =
        IdealPresentation::new(ideal.p, ideal.nvars, ideal.prec, level, symbolic_gens.clone())?;

    let spec = WindowSpec {
        p: ideal.p,
        nvars: ideal.nvars,
        prec: ideal.prec,
        level,
        cap,
        slot_rule: if level == 0 {
            SlotRule::None
        } else {
            SlotRule::Uniformizer
        },
    };
    let w = QuotientWindow::from_fracpolys(spec.clone(), &layer_gens)?;

    // Each symbolic generator is killed by exactly one factor of p and is
    // itself nonzero in the quotient.
    for y in &symbolic_gens {
        let (k, _) = y.terms().next().expect("nonzero");
        let cm = w.class_modulus(k)?;
        if cm != 1 {
            return Err(Error::TorsionMismatch(format!(
                "symbolic torsion generator has class modulus {cm}, expected 1"
            )));
        }
    }

    // Every numeric torsion generator must lie in (symbolic) + (layer).
    let numeric = w.torsion_generators()?;
    let mut combined = symbolic_gens;
    combined.extend(layer_gens);
    let w2 = QuotientWindow::from_fracpolys(spec, &combined)?;
    let m = crate::exactnum::pow_u64(ideal.p, ideal.prec);
    for t in &numeric {
        if !w2.nf_terms(t)?.is_empty() {
            return Err(Error::TorsionMismatch(
                "a numeric torsion generator escapes the symbolic torsion ideal".into(),
            ));
        }
        // Independent re-check that one factor of p annihilates it.
        let p_mult: Vec<(ExpKey, u64)> = t
            .iter()
            .filter_map(|(k, c)| {
                let c = (*c as u128 * ideal.p as u128 % m as u128) as u64;
                (c != 0).then(|| (k.clone(), c))
            })
            .collect();
        if !w.nf_terms(&p_mult)?.is_empty() {
            return Err(Error::TorsionMismatch(
                "a numeric torsion generator is not annihilated by p".into(),
            ));
        }
    }
    Ok(TorsionReport {
        symbolic,
        numeric_count: numeric.len(),
        cap,
    })
}
