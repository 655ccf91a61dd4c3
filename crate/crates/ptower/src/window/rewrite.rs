//! Reduction engine for unit-leading one- and two-term generators forming a
//! confluent rewriting system.
//!
//! Each generator is oriented into a rule lead → rhs (rhs empty for a
//! single-term generator), with the lead the graded-lex-largest term and its
//! coefficient a unit. Rewriting strictly decreases the graded-lex order, so
//! it terminates; local confluence is checked on every overlapping pair at
//! construction, which by Newman's lemma makes normal forms canonical. With
//! unit leads the rules behave as over a field, so a confluent system decides
//! ideal membership exactly and presents the quotient as a free module on
//! the irreducible monomials — in particular torsion-free.

use crate::exactnum::{inv_mod, pow_u64};
use crate::fracpoly::ExpKey;
use crate::window::{SlotRule, WindowSpec};

pub(crate) struct Rule {
    pub(crate) lead: ExpKey,
    /// None: lead rewrites to 0. Some((c, key)): lead rewrites to c·key.
    pub(crate) rhs: Option<(u64, ExpKey)>,
}

pub(crate) struct RewriteEngine {
    rules: Vec<Rule>,
}

impl RewriteEngine {
    /// Accepts the generators if each has at most two terms with a unit
    /// leading coefficient, the slot is compatible with the rewrite model,
    /// and all critical pairs are joinable inside the window.
    pub(crate) fn try_new(spec: &WindowSpec, gens: &[Vec<(ExpKey, u64)>]) -> Option<Self> {
        let m = pow_u64(spec.p, spec.prec);
        let mut rules = Vec::with_capacity(gens.len());
        for g in gens {
            // The uniformizer's folding relation breaks the divisibility
            // monotonicity rewriting relies on; only slot-free generators
            // are eligible under that rule.
            if spec.slot_rule == SlotRule::Uniformizer && g.iter().any(|(k, _)| k.slot > 0) {
                return None;
            }
            match g.as_slice() {
                [(key, coeff)] => {
                    if coeff % spec.p != 0 {
                        rules.push(Rule {
                            lead: key.clone(),
                            rhs: None,
                        });
                    } else {
                        return None;
                    }
                }
                [(k1, c1), (k2, c2)] => {
                    // Term lists arrive in ascending graded-lex order.
                    let (tail_k, tail_c, lead_k, lead_c) = (k1, c1, k2, c2);
                    if lead_c % spec.p != 0 {
                        let inv = inv_mod(lead_c % m, m);
                        let c = ((m - tail_c) as u128 * inv as u128 % m as u128) as u64;
                        rules.push(Rule {
                            lead: lead_k.clone(),
                            rhs: Some((c, tail_k.clone())),
                        });
                    } else {
                        return None;
                    }
                }
                _ => return None,
            }
        }
        let engine = RewriteEngine { rules };
        engine.is_confluent(spec).then_some(engine)
    }

    /// Rewrites a single term to its irreducible form (None when it reduces
    /// to zero). Rewriting never raises the graded-lex order, so the term
    /// stays inside the window.
    pub(crate) fn nf_term(
        &self,
        spec: &WindowSpec,
        key: &ExpKey,
        coeff: u64,
    ) -> Option<(ExpKey, u64)> {
        let m = pow_u64(spec.p, spec.prec);
        let mut key = key.clone();
        let mut coeff = coeff % m;
        'outer: while coeff != 0 {
            for rule in &self.rules {
                if rule.lead.divides(&key) {
                    match &rule.rhs {
                        None => return None,
                        Some((c, rhs_key)) => {
                            let cofactor = rule.lead.quotient_of(&key);
                            debug_assert!(*rhs_key < rule.lead);
                            key = cofactor.mul(rhs_key);
                            coeff = (coeff as u128 * *c as u128 % m as u128) as u64;
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
        (coeff != 0).then_some((key, coeff))
    }

    pub(crate) fn is_irreducible(&self, key: &ExpKey) -> bool {
        self.rules.iter().all(|r| !r.lead.divides(key))
    }

    /// Local confluence on all critical pairs whose overlap monomial fits in
    /// the window (larger overlaps can never arise while rewriting
    /// window-bounded input). Leads with disjoint support commute trivially.
    fn is_confluent(&self, spec: &WindowSpec) -> bool {
        let deg_bound = spec.degree_bound();
        let slot_bound = spec.slot_bound();
        for (i, a) in self.rules.iter().enumerate() {
            for b in &self.rules[i + 1..] {
                if !a.lead.overlaps(&b.lead) {
                    continue;
                }
                let lcm = a.lead.lcm(&b.lead);
                if lcm.degree_num() > deg_bound || lcm.slot > slot_bound {
                    continue;
                }
                let via = |rule: &Rule| -> Option<(ExpKey, u64)> {
                    let cof = rule.lead.quotient_of(&lcm);
                    match &rule.rhs {
                        None => None,
                        Some((c, rhs_key)) => self.nf_term(spec, &cof.mul(rhs_key), *c),
                    }
                };
                if via(a) != via(b) {
                    return false;
                }
            }
        }
        true
    }
}
