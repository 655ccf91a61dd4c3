//! Koszul homology lengths and minimal-generator counts for tower stages
//! over the prime field, assembled into the lim Cohen-Macaulay diagnostic.
//!
//! Everything runs on the mod-p stage of a tower: a degree-windowed
//! quotient at coefficient precision 1, where lengths are F_p-dimensions
//! because the residue field is F_p.  The Koszul complex of a parameter
//! system is sliced degreewise -- with the wedge generator over a subset S
//! weighted by the total parameter degree of S, every differential
//! preserves the internal degree, so each slice is a finite F_p linear
//! map whose rank comes from the Howell form.
//!
//! Trust discipline: a slice at internal degree tau only involves basis
//! degrees at most tau, so computed slices are exact; what the window
//! cannot see is the tail above the cap.  Lengths are therefore summed
//! over degrees at most D - c * maxdeg(sop) and every computation runs
//! twice, at caps D and D + p.  Disagreement, or homology persisting in
//! the top trusted band at both caps (the signature of a non-parameter
//! system, whose homology has infinite length), aborts; homology in the
//! unseen gap only clears the length's trusted flag.
//!
//! The diagnostic itself is a finite-level, finite-cap consistency check
//! of the ratio trend l(H_i)/nu -- never a proof of the asymptotic
//! vanishing, which is a limit statement out of reach of any window.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactnum::ZpNMatrix;
use crate::fracpoly::{ExpKey, FracPoly};
use crate::idealkit::{self, IdealClass};
use crate::tower::{build_layer, TowerMode, TowerSpec};
use crate::window::{QuotientWindow, SlotRule, WindowSpec};

// ---- char-p stage fibers ----------------------------------------------------

/// The mod-p stage of a tower at the given level and cap: torsion-free
/// stages drop their uniformizer root entirely (p generates it, and p is
/// now zero), reduced stages keep the uniformizer as a nilpotent whose
/// p^level-th power vanishes.
pub fn mod_p_fiber(spec: &TowerSpec, level: u32, cap: u32) -> Result<QuotientWindow> {
    let (wspec, gens) = fiber_data(spec, level, cap)?;
    QuotientWindow::from_fracpolys(wspec, &gens)
}

fn fiber_data(spec: &TowerSpec, level: u32, cap: u32) -> Result<(WindowSpec, Vec<FracPoly>)> {
    let layer = build_layer(spec, level)?;
    let slot_rule = match spec.mode() {
        TowerMode::TorsionFree => SlotRule::None,
        TowerMode::TorsionReduced => SlotRule::Uniformizer,
    };
    let wspec = WindowSpec {
        p: spec.p(),
        nvars: spec.base().variables().len(),
        prec: 1,
        level,
        cap,
        slot_rule,
    };
    Ok((wspec, layer.generators().to_vec()))
}

// ---- degreewise slice tables ------------------------------------------------

/// Basis keys of a window, tabulated per degree with index maps.
struct SliceTables {
    w: QuotientWindow,
    basis: Vec<Vec<ExpKey>>,
    index: Vec<BTreeMap<ExpKey, usize>>,
}

impl SliceTables {
    fn build(spec: WindowSpec, gens: &[FracPoly]) -> Result<SliceTables> {
        let w = QuotientWindow::from_fracpolys(spec, gens)?;
        let bound = w.spec().degree_bound();
        let mut basis = Vec::with_capacity(bound as usize + 1);
        let mut index = Vec::with_capacity(bound as usize + 1);
        for d in 0..=bound {
            let b = w.basis_at_degree(d)?;
            let ix: BTreeMap<ExpKey, usize> =
                b.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
            basis.push(b);
            index.push(ix);
        }
        Ok(SliceTables { w, basis, index })
    }

    fn bound(&self) -> i64 {
        self.basis.len() as i64 - 1
    }

    fn dim(&self, tau: i64) -> usize {
        if tau < 0 || tau > self.bound() {
            0
        } else {
            self.basis[tau as usize].len()
        }
    }

    /// Normal-form columns of multiplication by `terms` from the degree-
    /// `src` basis into the degree-`dst` basis; `(row, coeff)` pairs.
    fn mult_columns(
        &self,
        terms: &[(ExpKey, u64)],
        src: u32,
        dst: u32,
    ) -> Result<Vec<Vec<(usize, u64)>>> {
        let mut cols = Vec::with_capacity(self.basis[src as usize].len());
        for m in &self.basis[src as usize] {
            let prod: Vec<(ExpKey, u64)> =
                terms.iter().map(|(k, c)| (k.mul(m), *c)).collect();
            let nf = self.w.nf_terms(&prod)?;
            let mut col = Vec::with_capacity(nf.len());
            for (k, c) in nf {
                let row = self.index[dst as usize].get(&k).ok_or_else(|| {
                    Error::Validation(
                        "a normal form left its degree slice; the generators are not homogeneous"
                            .into(),
                    )
                })?;
                col.push((*row, c));
            }
            cols.push(col);
        }
        Ok(cols)
    }
}

/// Normal-form columns of one multiplication map: per source basis index,
/// the image's (row, coeff) pairs in the target degree's basis.
type MultColumns = Vec<Vec<(usize, u64)>>;

fn matrix_rank(m: &ZpNMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let h = m.howell_form();
    (0..h.rows())
        .filter(|&r| h.row(r).iter().any(|&x| x != 0))
        .count()
}

fn combinations(c: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, c: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..c {
            cur.push(i);
            rec(i + 1, c, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, c, k, &mut Vec::new(), &mut out);
    out
}

// ---- the Koszul complex -----------------------------------------------------

/// A char-p quotient window together with a candidate parameter system:
/// the input to the Koszul homology computation.  Generators and
/// parameters must be homogeneous so the degreewise slicing is exact.
#[derive(Clone, Debug)]
pub struct KoszulInput {
    spec: WindowSpec,
    generators: Vec<FracPoly>,
    sop: Vec<FracPoly>,
    deltas: Vec<u32>,
}

impl KoszulInput {
    pub fn new(spec: WindowSpec, generators: Vec<FracPoly>, sop: Vec<FracPoly>) -> Result<Self> {
        if spec.prec != 1 {
            return Err(Error::Validation(
                "Koszul homology is computed mod p; the window needs precision 1".into(),
            ));
        }
        if sop.is_empty() {
            return Err(Error::Validation(
                "a parameter system needs at least one element".into(),
            ));
        }
        // Validate the presentation eagerly (engine selection, key checks).
        QuotientWindow::from_fracpolys(spec.clone(), &generators)?;
        for g in &generators {
            if !is_homogeneous(g) {
                return Err(Error::Validation(
                    "Koszul slicing needs homogeneous generators".into(),
                ));
            }
        }
        let mut lifted = Vec::with_capacity(sop.len());
        let mut deltas = Vec::with_capacity(sop.len());
        for u in &sop {
            if u.level() > spec.level {
                return Err(Error::Incompatible(format!(
                    "parameter at level {} does not live in the level-{} stage",
                    u.level(),
                    spec.level
                )));
            }
            let v = u.at_level(spec.level).truncate_prec(1);
            if v.is_zero() {
                return Err(Error::Validation(
                    "a parameter vanishes mod p".into(),
                ));
            }
            if !is_homogeneous(&v) {
                return Err(Error::Validation(
                    "Koszul slicing needs homogeneous parameters".into(),
                ));
            }
            deltas.push(v.terms().next().expect("nonzero").0.degree_num());
            lifted.push(v);
        }
        let c = lifted.len() as u32;
        let maxdeg = deltas
            .iter()
            .map(|d| d.div_ceil(spec.level_unit()))
            .max()
            .unwrap_or(1)
            .max(1);
        if c * maxdeg >= spec.cap {
            return Err(Error::WindowTooSmall(format!(
                "cap {} leaves no trusted degrees for {} parameters of degree {}",
                spec.cap, c, maxdeg
            )));
        }
        Ok(KoszulInput {
            spec,
            generators,
            sop: lifted,
            deltas,
        })
    }

    pub fn dim(&self) -> usize {
        self.sop.len()
    }

    /// Largest absolute parameter degree, the unit of trusted-window loss.
    fn max_sop_degree_abs(&self) -> u32 {
        self.deltas
            .iter()
            .map(|d| d.div_ceil(self.spec.level_unit()))
            .max()
            .unwrap_or(1)
            .max(1)
    }

    /// Absolute degree below which every homology slice is summed.
    pub fn trusted_to(&self) -> u32 {
        self.spec.cap - self.dim() as u32 * self.max_sop_degree_abs()
    }
}

fn is_homogeneous(f: &FracPoly) -> bool {
    let mut degs = f.terms().map(|(k, _)| k.degree_num());
    match degs.next() {
        None => true,
        Some(d) => degs.all(|e| e == d),
    }
}

/// Homology dimensions per internal degree: `slices[i][tau]` for i = 0..=c.
fn homology_slices(input: &KoszulInput, cap: u32) -> Result<Vec<Vec<u64>>> {
    let mut spec = input.spec.clone();
    spec.cap = cap;
    let tables = SliceTables::build(spec, &input.generators)?;
    let p = input.spec.p;
    let c = input.sop.len();
    let bound = tables.bound() as u32;
    let sop_terms: Vec<Vec<(ExpKey, u64)>> = input
        .sop
        .iter()
        .map(|u| u.terms().map(|(k, cf)| (k.clone(), cf)).collect())
        .collect();

    // Multiplication columns, computed once per (parameter, source degree).
    let mut cache: BTreeMap<(usize, u32), MultColumns> = BTreeMap::new();

    let subsets: Vec<Vec<Vec<usize>>> = (0..=c).map(|k| combinations(c, k)).collect();
    let shift = |s: &[usize]| -> i64 { s.iter().map(|&j| input.deltas[j] as i64).sum() };

    // ranks[k][tau] = rank of d_k at internal degree tau (k = 1..=c).
    let mut ranks = vec![vec![0usize; bound as usize + 1]; c + 2];
    for k in 1..=c {
        let sources = &subsets[k];
        let targets = &subsets[k - 1];
        let target_pos: BTreeMap<&[usize], usize> = targets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        for tau in 0..=bound {
            let t = tau as i64;
            let col_dims: Vec<usize> = sources.iter().map(|s| tables.dim(t - shift(s))).collect();
            let row_dims: Vec<usize> = targets.iter().map(|s| tables.dim(t - shift(s))).collect();
            let cols: usize = col_dims.iter().sum();
            let rows: usize = row_dims.iter().sum();
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut col_off = vec![0usize; sources.len()];
            for i in 1..sources.len() {
                col_off[i] = col_off[i - 1] + col_dims[i - 1];
            }
            let mut row_off = vec![0usize; targets.len()];
            for i in 1..targets.len() {
                row_off[i] = row_off[i - 1] + row_dims[i - 1];
            }
            let mut mat = ZpNMatrix::zero(p, 1, rows, cols);
            for (si, s) in sources.iter().enumerate() {
                let src = t - shift(s);
                if src < 0 || tables.dim(src) == 0 {
                    continue;
                }
                for (pos, &j) in s.iter().enumerate() {
                    let rest: Vec<usize> =
                        s.iter().copied().filter(|&x| x != j).collect();
                    let ti = target_pos[rest.as_slice()];
                    let dst = src + input.deltas[j] as i64;
                    let colset = match cache.entry((j, src as u32)) {
                        std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                        std::collections::btree_map::Entry::Vacant(e) => e.insert(
                            tables.mult_columns(&sop_terms[j], src as u32, dst as u32)?,
                        ),
                    };
                    for (mi, col) in colset.iter().enumerate() {
                        for &(row, v) in col {
                            let signed = if pos % 2 == 0 { v } else { (p - v % p) % p };
                            if signed != 0 {
                                mat.set(row_off[ti] + row, col_off[si] + mi, signed);
                            }
                        }
                    }
                }
            }
            ranks[k][tau as usize] = matrix_rank(&mat);
        }
    }

    let mut slices = vec![vec![0u64; bound as usize + 1]; c + 1];
    for k in 0..=c {
        for tau in 0..=bound {
            let t = tau as i64;
            let dim_k: usize = subsets[k].iter().map(|s| tables.dim(t - shift(s))).sum();
            let h = dim_k - ranks[k][tau as usize] - ranks[k + 1][tau as usize];
            slices[k][tau as usize] = h as u64;
        }
    }
    Ok(slices)
}

/// Koszul homology lengths, each with a trusted flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulLengths {
    /// `lengths[i]` is (l(H_i), trusted) for i = 0..=c.
    pub lengths: Vec<(u64, bool)>,
    /// Absolute degree up to which the sums ran.
    pub trusted_to: u32,
}

/// Sums the homology slices over the trusted window, running the whole
/// computation at caps D and D + p.  The runs must agree on the shared
/// window; homology persisting in the top trusted band at both caps means
/// the lengths are not finite (the elements are not a parameter system)
/// and aborts with DimensionMismatch.  Homology visible only in the gap
/// between the two trusted windows clears the trusted flag instead.
pub fn koszul_homology_lengths(input: &KoszulInput) -> Result<KoszulLengths> {
    let p32 = input.spec.p as u32;
    let unit = input.spec.level_unit();
    let c = input.dim() as u32;
    let maxdeg = input.max_sop_degree_abs();
    let low = homology_slices(input, input.spec.cap)?;
    let high = homology_slices(input, input.spec.cap + p32)?;
    let t_low = (input.spec.cap - c * maxdeg) * unit;
    let t_high = (input.spec.cap + p32 - c * maxdeg) * unit;
    let band = maxdeg * unit;
    let bound_low = (low[0].len() - 1) as u32;
    let bound_high = (high[0].len() - 1) as u32;

    let mut lengths = Vec::with_capacity(low.len());
    for i in 0..low.len() {
        let sum_low: u64 = (0..=t_low).map(|t| low[i][t as usize]).sum();
        let sum_high_window: u64 = (0..=t_low).map(|t| high[i][t as usize]).sum();
        if sum_low != sum_high_window {
            return Err(Error::DimensionMismatch(format!(
                "l(H_{i}) differs between caps {} and {} on the shared window: {} vs {}",
                input.spec.cap,
                input.spec.cap + p32,
                sum_low,
                sum_high_window
            )));
        }
        let top_low = (t_low.saturating_sub(band) + 1..=t_low).any(|t| low[i][t as usize] != 0);
        let top_high =
            (t_high.saturating_sub(band) + 1..=t_high).any(|t| high[i][t as usize] != 0);
        if top_low && top_high {
            return Err(Error::DimensionMismatch(format!(
                "H_{i} persists in the top trusted degrees at caps {} and {}; \
                 the elements are not a parameter system on this window",
                input.spec.cap,
                input.spec.cap + p32
            )));
        }
        let tail_low = (t_low + 1..=bound_low).any(|t| low[i][t as usize] != 0);
        let tail_high = (t_low + 1..=bound_high).any(|t| high[i][t as usize] != 0);
        lengths.push((sum_low, !tail_low && !tail_high));
    }
    Ok(KoszulLengths {
        lengths,
        trusted_to: input.trusted_to(),
    })
}

// ---- minimal generators -----------------------------------------------------

/// Minimal generators of a stage fiber as a module over the level-0 ring:
/// the F_p-dimension of M / (x_1, ..., x_m) M, where the x_j are the
/// level-0 variables acting through the stage inclusion.  Exact once the
/// top slice of the cokernel vanishes, because a standard graded algebra
/// whose cokernel dies in one degree keeps it dead in all higher ones.
pub fn nu_minimal_generators(window: &QuotientWindow) -> Result<u64> {
    let spec = window.spec().clone();
    let unit = spec.level_unit();
    let bound = spec.degree_bound();
    let p = spec.p;
    let tables = SliceTablesRef::tabulate(window)?;
    let mut var_keys = Vec::with_capacity(spec.nvars);
    for j in 0..spec.nvars {
        let mut base = vec![0u32; spec.nvars];
        base[j] = unit;
        var_keys.push(ExpKey {
            slot: 0,
            base: base.into(),
        });
    }
    let mut total = 0u64;
    let mut top = 0u64;
    for tau in 0..=bound {
        let dim = tables.basis[tau as usize].len();
        let coker = if tau < unit || dim == 0 {
            dim
        } else {
            let src = (tau - unit) as usize;
            let src_dim = tables.basis[src].len();
            if src_dim == 0 {
                dim
            } else {
                let mut mat = ZpNMatrix::zero(p, 1, dim, src_dim * var_keys.len());
                for (j, vk) in var_keys.iter().enumerate() {
                    for (mi, m) in tables.basis[src].iter().enumerate() {
                        let nf = window.nf_terms(&[(vk.mul(m), 1)])?;
                        for (k, cf) in nf {
                            let row = tables.index[tau as usize].get(&k).ok_or_else(|| {
                                Error::Validation(
                                    "a normal form left its degree slice; \
                                     the generators are not homogeneous"
                                        .into(),
                                )
                            })?;
                            mat.set(*row, j * src_dim + mi, cf);
                        }
                    }
                }
                dim - matrix_rank(&mat)
            }
        };
        total += coker as u64;
        if tau == bound {
            top = coker as u64;
        }
    }
    if top != 0 {
        return Err(Error::WindowTooSmall(format!(
            "module generators persist at the top degree {}; raise the cap",
            bound / unit
        )));
    }
    Ok(total)
}

/// Borrowed variant of the slice tables for an existing window.
struct SliceTablesRef {
    basis: Vec<Vec<ExpKey>>,
    index: Vec<BTreeMap<ExpKey, usize>>,
}

impl SliceTablesRef {
    fn tabulate(w: &QuotientWindow) -> Result<SliceTablesRef> {
        let bound = w.spec().degree_bound();
        let mut basis = Vec::with_capacity(bound as usize + 1);
        let mut index = Vec::with_capacity(bound as usize + 1);
        for d in 0..=bound {
            let b = w.basis_at_degree(d)?;
            let ix: BTreeMap<ExpKey, usize> =
                b.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
            basis.push(b);
            index.push(ix);
        }
        Ok(SliceTablesRef { basis, index })
    }
}

// ---- the diagnostic table ---------------------------------------------------

/// Verdict of the lim Cohen-Macaulay consistency check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LimCMVerdict {
    /// Every ratio l(H_i)/nu with i >= 1 decreases strictly (or is
    /// identically zero) across the computed levels, and the Euler
    /// characteristic scales as p^(level * dim).
    ConsistentWithLimCM,
    /// A ratio fails to decrease, or the Euler scaling breaks.
    Inconsistent,
    /// The data cannot support a verdict: reduced mode (whose stages
    /// carry p-torsion outside the torsion-free hypotheses), or lengths
    /// whose trusted flags are cleared by the window.
    Exploratory,
}

impl LimCMVerdict {
    pub fn render(&self) -> &'static str {
        match self {
            LimCMVerdict::ConsistentWithLimCM => "ConsistentWithLimCM",
            LimCMVerdict::Inconsistent => "Inconsistent",
            LimCMVerdict::Exploratory => "Exploratory",
        }
    }
}

/// One level of the diagnostic: minimal generators, homology lengths with
/// flags, and the trusted Euler characteristic.
#[derive(Clone, Debug)]
pub struct LimCMRow {
    pub level: u32,
    pub nu: u64,
    /// (l(H_i), trusted) for i = 0..=dim.
    pub lengths: Vec<(u64, bool)>,
    /// Alternating sum of the lengths; None when a flag is cleared.
    pub euler: Option<i64>,
    /// Absolute degree up to which the length sums ran.
    pub trusted_to: u32,
}

/// The assembled diagnostic across levels 0..=n_max.
#[derive(Clone, Debug)]
pub struct LimCMTable {
    pub dim: u32,
    /// The parameter system, rendered at level 0.
    pub sop: Vec<String>,
    pub rows: Vec<LimCMRow>,
    /// Whether chi_n = p^(n*dim) * chi_0 held; None when not applicable.
    pub euler_scaling: Option<bool>,
    pub verdict: LimCMVerdict,
    pub notes: Vec<String>,
}

impl LimCMTable {
    /// The ratio l(H_i)/nu at a row, reduced; None when untrusted or nu=0.
    pub fn ratio(&self, row: usize, i: usize) -> Option<(u64, u64)> {
        let r = &self.rows[row];
        let (l, trusted) = r.lengths[i];
        if !trusted || r.nu == 0 {
            return None;
        }
        if l == 0 {
            return Some((0, 1));
        }
        let g = gcd(l, r.nu);
        Some((l / g, r.nu / g))
    }

    /// CSV rows (n, i, l, nu, ratio) for i >= 1; untrusted ratios print
    /// empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,i,l,nu,ratio\n");
        for (ri, row) in self.rows.iter().enumerate() {
            for i in 1..row.lengths.len() {
                let ratio = match self.ratio(ri, i) {
                    Some((a, b)) => render_ratio(a, b),
                    None => String::new(),
                };
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.level, i, row.lengths[i].0, row.nu, ratio
                ));
            }
        }
        out
    }

    /// Human-readable block used by the report format.
    pub fn render(&self) -> String {
        let mut out = format!("dim = {}, sop = [{}]", self.dim, self.sop.join(", "));
        for (ri, row) in self.rows.iter().enumerate() {
            let ls: Vec<String> = row
                .lengths
                .iter()
                .map(|(l, t)| if *t { l.to_string() } else { format!("{l}~") })
                .collect();
            let rs: Vec<String> = (1..row.lengths.len())
                .map(|i| match self.ratio(ri, i) {
                    Some((a, b)) => render_ratio(a, b),
                    None => "-".into(),
                })
                .collect();
            let chi = match row.euler {
                Some(e) => e.to_string(),
                None => "-".into(),
            };
            out.push_str(&format!(
                "\nlevel {}: nu = {}, l = [{}], ratios = [{}], chi = {} (to degree {})",
                row.level,
                row.nu,
                ls.join(", "),
                rs.join(", "),
                chi,
                row.trusted_to
            ));
        }
        if let Some(ok) = self.euler_scaling {
            out.push_str(&format!(
                "\neuler scaling chi_n = p^({} n) * chi_0: {}",
                self.dim,
                if ok { "holds" } else { "fails" }
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("\nnote: {n}"));
        }
        out.push_str(&format!("\nverdict: {}", self.verdict.render()));
        out
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn render_ratio(a: u64, b: u64) -> String {
    if a == 0 {
        "0".into()
    } else if b == 1 {
        a.to_string()
    } else {
        format!("{a}/{b}")
    }
}

/// Runs the full diagnostic on a tower: parameter system (given, or drawn
/// as seeded generic linear forms), then nu and the Koszul lengths on the
/// mod-p stages for levels 0..=n_max, the Euler scaling cross-check, and
/// the ratio-trend verdict.
pub fn limcm_diagnostic(
    spec: &TowerSpec,
    n_max: u32,
    seed: u64,
    sop: Option<&[FracPoly]>,
) -> Result<LimCMTable> {
    if n_max > spec.levels() {
        return Err(Error::Validation(format!(
            "level {n_max} beyond the configured height {}",
            spec.levels()
        )));
    }
    let names_owned = spec.base().variables().to_vec();
    let names: Vec<&str> = names_owned.iter().map(|s| s.as_str()).collect();
    let mut notes = Vec::new();
    let sop_polys: Vec<FracPoly> = match sop {
        Some(s) => {
            let mut out = Vec::with_capacity(s.len());
            for u in s {
                if u.level() != 0 {
                    return Err(Error::Validation(
                        "the parameter system is given at the base level".into(),
                    ));
                }
                let v = u.truncate_prec(1);
                if v.is_zero() {
                    return Err(Error::Validation("a parameter vanishes mod p".into()));
                }
                out.push(v);
            }
            out
        }
        None => {
            let c = fiber_dimension(spec)?;
            let (drawn, attempt) = draw_parameter_system(spec, c, seed)?;
            notes.push(format!("generic parameter system accepted on draw {attempt}"));
            drawn
        }
    };
    let c = sop_polys.len() as u32;

    let mut rows = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let (wspec, gens) = fiber_data(spec, n, spec.cap())?;
        let window = QuotientWindow::from_fracpolys(wspec.clone(), &gens)?;
        let nu = nu_minimal_generators(&window)?;
        let input = KoszulInput::new(wspec, gens, sop_polys.clone())?;
        let kl = koszul_homology_lengths(&input)?;
        let euler = if kl.lengths.iter().all(|(_, t)| *t) {
            let mut e = 0i64;
            for (i, (l, _)) in kl.lengths.iter().enumerate() {
                let s = *l as i64;
                e += if i % 2 == 0 { s } else { -s };
            }
            Some(e)
        } else {
            None
        };
        rows.push(LimCMRow {
            level: n,
            nu,
            lengths: kl.lengths,
            euler,
            trusted_to: kl.trusted_to,
        });
    }

    let euler_scaling = match spec.mode() {
        TowerMode::TorsionReduced => None,
        TowerMode::TorsionFree => {
            if rows.iter().any(|r| r.euler.is_none()) {
                None
            } else {
                let chi0 = rows[0].euler.unwrap() as i128;
                Some(rows.iter().all(|r| {
                    let scale = (spec.p() as i128).pow(r.level * c);
                    r.euler.unwrap() as i128 == scale * chi0
                }))
            }
        }
    };

    let any_untrusted = rows
        .iter()
        .any(|r| r.lengths.iter().skip(1).any(|(_, t)| !t));
    let ratios_ok = (1..=c as usize).all(|i| {
        rows.windows(2).all(|w| {
            let (a1, n1) = (w[0].lengths[i].0, w[0].nu);
            let (a2, n2) = (w[1].lengths[i].0, w[1].nu);
            a1 == 0 && a2 == 0 || (a2 as u128) * (n1 as u128) < (a1 as u128) * (n2 as u128)
        })
    });

    let verdict = if spec.mode() == TowerMode::TorsionReduced {
        notes.push(
            "verdict forced to Exploratory: reduced-mode stages carry p-torsion outside \
             the torsion-free hypotheses"
                .into(),
        );
        LimCMVerdict::Exploratory
    } else if any_untrusted {
        notes.push("window-limited homology lengths leave the trend undecided".into());
        LimCMVerdict::Exploratory
    } else if euler_scaling == Some(false) {
        notes.push("the Euler characteristic does not scale by p^(level * dim)".into());
        LimCMVerdict::Inconsistent
    } else if !ratios_ok {
        notes.push("a ratio l(H_i)/nu fails to decrease strictly".into());
        LimCMVerdict::Inconsistent
    } else {
        LimCMVerdict::ConsistentWithLimCM
    };

    Ok(LimCMTable {
        dim: c,
        sop: sop_polys.iter().map(|u| u.render(&names)).collect(),
        rows,
        euler_scaling,
        verdict,
        notes,
    })
}

/// Fiber dimension of the mod-p base, read off the minimal primes of a
/// squarefree monomial ideal: the variable count minus the smallest
/// variable support of a component (the p-part of a component is already
/// zero in the fiber).  Other ideal classes need a user-supplied system.
fn fiber_dimension(spec: &TowerSpec) -> Result<usize> {
    let nvars = spec.base().variables().len();
    if spec.ideal().is_zero() {
        return Ok(nvars);
    }
    if spec.ideal().class() != IdealClass::SquarefreeMonomial {
        return Err(Error::Validation(
            "the fiber dimension is certified only for squarefree monomial ideals; \
             supply a parameter system"
                .into(),
        ));
    }
    let dec = idealkit::prime_decomposition(spec.ideal())?;
    let min_height = dec
        .components
        .iter()
        .map(|comp| comp.vars.len())
        .min()
        .unwrap_or(0);
    Ok(nvars - min_height)
}

/// Draws a parameter system of generic F_p-linear forms: the first
/// candidate is the deterministic stride pattern u_j = sum of every c-th
/// variable starting at j, then up to four seeded random draws.  Each
/// candidate must pass the finite-length check on the level-0 fiber.
fn draw_parameter_system(
    spec: &TowerSpec,
    c: usize,
    seed: u64,
) -> Result<(Vec<FracPoly>, usize)> {
    use rand::{Rng, SeedableRng};
    if c == 0 {
        return Err(Error::Validation(
            "the fiber has dimension 0; there is no parameter system to draw".into(),
        ));
    }
    let p = spec.p();
    let nvars = spec.base().variables().len();
    if c > nvars {
        return Err(Error::Validation(format!(
            "dimension {c} exceeds the variable count {nvars}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (wspec, gens) = fiber_data(spec, 0, spec.cap())?;
    for attempt in 0..5usize {
        let mut candidate = Vec::with_capacity(c);
        let mut degenerate = false;
        for j in 0..c {
            let mut u = FracPoly::zero(p, nvars, 1, spec.cap());
            for m in 0..nvars {
                let coeff: u64 = if attempt == 0 {
                    u64::from(m % c == j)
                } else {
                    rng.gen_range(0..p)
                };
                if coeff != 0 {
                    let mut base = vec![0u32; nvars];
                    base[m] = 1;
                    u = u.add(&FracPoly::monomial(
                        coeff as i128,
                        &base,
                        0,
                        0,
                        p,
                        nvars,
                        1,
                        spec.cap(),
                    ));
                }
            }
            if u.is_zero() {
                degenerate = true;
            }
            candidate.push(u);
        }
        if degenerate {
            continue;
        }
        let input = KoszulInput::new(wspec.clone(), gens.clone(), candidate.clone())?;
        match koszul_homology_lengths(&input) {
            Ok(kl) if kl.lengths.iter().all(|(_, t)| *t) => return Ok((candidate, attempt)),
            Ok(_) => continue,
            Err(Error::DimensionMismatch(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Validation(
        "no parameter system found in 5 seeded draws; supply one".into(),
    ))
}
