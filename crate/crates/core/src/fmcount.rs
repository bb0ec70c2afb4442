//! Partner counts: closed form against orbit enumeration.
//!
//! Closed form: `(p^σ0 + 1)/(p^m + 1) · (p^(σ0−1) − 1)`, plus one for the
//! surface itself when `σ0 ≤ 10`. The brute-force count enumerates isotropic
//! vectors of `V` and takes orbits under the orthogonal group of `(K, V)`.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::charsub::{ogus_basis, CharDatum};
use crate::error::{Error, Result};
use crate::orthogroup::{m_invariant, m_invariant_from_pattern, ortho_group_elements};
use crate::quadspace::MAX_SIGMA0;
use crate::Budget;

/// Above this Artin invariant the surface itself is not counted.
pub const SELF_COUNT_MAX_SIGMA0: usize = 10;

fn check_m(p: u64, sigma0: usize, m: usize) -> Result<()> {
    if !(1..=MAX_SIGMA0).contains(&sigma0) {
        return Err(Error::InvalidInput(format!("sigma0 = {sigma0} outside 1..={MAX_SIGMA0}")));
    }
    if m != 0 && (m > sigma0 || !sigma0.is_multiple_of(m) || (sigma0 / m).is_multiple_of(2)) {
        return Err(Error::InvalidM { p, sigma0, m });
    }
    Ok(())
}

pub fn count_fm_formula(p: u64, sigma0: usize, m: usize) -> Result<BigUint> {
    check_m(p, sigma0, m)?;
    let big_p = BigUint::from(p);
    let top = big_p.pow(sigma0 as u32) + 1u32;
    let bottom = big_p.pow(m as u32) + 1u32;
    if &top % &bottom != BigUint::from(0u32) {
        return Err(Error::InvalidM { p, sigma0, m });
    }
    let mut count = top / bottom * (big_p.pow(sigma0 as u32 - 1) - 1u32);
    if sigma0 <= SELF_COUNT_MAX_SIGMA0 {
        count += 1u32;
    }
    Ok(count)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller index as the root.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCount {
    pub isotropic_vectors: usize,
    pub group_order: usize,
    pub orbits: usize,
    /// No non-identity element fixes an isotropic vector.
    pub action_free: bool,
    /// Lexicographically least vector of each orbit.
    pub representatives: Vec<Vec<u64>>,
}

fn encode(v: &[u64], p: u64) -> u64 {
    v.iter().fold(0, |acc, &x| acc * p + x)
}

/// Orbits of the orthogonal group of `(K, V)` on the non-zero isotropic vectors of `V`.
pub fn orbit_count(d: &CharDatum, budget: &Budget) -> Result<OrbitCount> {
    let p = d.p();
    let iso = d.space().enumerate_isotropic(budget)?;
    let group = ortho_group_elements(d, budget)?;
    let index: HashMap<u64, usize> = iso.iter().enumerate().map(|(i, v)| (encode(v, p), i)).collect();
    let mut uf = UnionFind::new(iso.len());
    let mut action_free = true;
    for g in group.iter().filter(|g| !g.is_identity()) {
        for (i, v) in iso.iter().enumerate() {
            let j = *index
                .get(&encode(&g.apply(v, p), p))
                .ok_or_else(|| Error::ModelInconsistent("group element does not preserve isotropy".into()))?;
            if j == i {
                action_free = false;
            }
            uf.union(i, j);
        }
    }
    let representatives: Vec<Vec<u64>> = (0..iso.len()).filter(|&i| uf.find(i) == i).map(|i| iso[i].clone()).collect();
    Ok(OrbitCount {
        isotropic_vectors: iso.len(),
        group_order: group.len(),
        orbits: representatives.len(),
        action_free,
        representatives,
    })
}

pub fn verify_free_action(d: &CharDatum, budget: &Budget) -> Result<bool> {
    Ok(orbit_count(d, budget)?.action_free)
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

fn as_decimal_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => as_decimal(v, s),
        None => s.serialize_none(),
    }
}

/// Big integers are written as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartnerCountReport {
    pub p: u64,
    pub sigma0: usize,
    pub m: usize,
    #[serde(serialize_with = "as_decimal")]
    pub formula_count: BigUint,
    #[serde(serialize_with = "as_decimal_opt")]
    pub bruteforce_count: Option<BigUint>,
    #[serde(serialize_with = "as_decimal")]
    pub isotropic_count: BigUint,
    pub group_order: Option<usize>,
    pub action_free: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartnerCountOptions {
    /// Attempt enumeration; skipped silently when it exceeds the budget.
    pub brute_force: bool,
    pub budget: Budget,
}

impl Default for PartnerCountOptions {
    fn default() -> Self {
        PartnerCountOptions { brute_force: true, budget: Budget::default() }
    }
}

pub fn count_fm_partners(d: &CharDatum, opts: &PartnerCountOptions) -> Result<PartnerCountReport> {
    let sigma0 = d.sigma0();
    let ob = ogus_basis(d)?;
    let m = m_invariant(&ob.a, sigma0);
    let mut report = formula_report(d.p(), sigma0, m)?;
    if opts.brute_force {
        match orbit_count(d, &opts.budget) {
            Ok(orbits) => {
                let mut count = BigUint::from(orbits.orbits);
                if sigma0 <= SELF_COUNT_MAX_SIGMA0 {
                    count += 1u32;
                }
                report.bruteforce_count = Some(count);
                report.isotropic_count = BigUint::from(orbits.isotropic_vectors);
                report.group_order = Some(orbits.group_order);
                report.action_free = Some(orbits.action_free);
            }
            Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Formula-only report; `isotropic_count` is the closed form.
pub fn formula_report(p: u64, sigma0: usize, m: usize) -> Result<PartnerCountReport> {
    Ok(PartnerCountReport {
        p,
        sigma0,
        m,
        formula_count: count_fm_formula(p, sigma0, m)?,
        bruteforce_count: None,
        isotropic_count: crate::quadspace::isotropic_count_formula(p, sigma0),
        group_order: None,
        action_free: None,
    })
}

/// Formula-only report computed from the vanishing pattern of the constants, without building a datum.
pub fn formula_report_from_pattern(p: u64, sigma0: usize, nonzero: &[bool]) -> Result<PartnerCountReport> {
    if nonzero.len() + 1 != sigma0 {
        return Err(Error::InvalidInput(format!("expected {} structure constants, got {}", sigma0.saturating_sub(1), nonzero.len())));
    }
    formula_report(p, sigma0, m_invariant_from_pattern(nonzero, sigma0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charsub::from_prime_constants;

    #[test]
    fn formula_values() {
        assert_eq!(count_fm_formula(3, 2, 0).unwrap(), BigUint::from(11u32));
        assert_eq!(count_fm_formula(3, 3, 3).unwrap(), BigUint::from(9u32));
        assert_eq!(count_fm_formula(3, 3, 0).unwrap(), BigUint::from(113u32));
        for p in [3u64, 5, 7, 101] {
            assert_eq!(count_fm_formula(p, 1, 1).unwrap(), BigUint::from(1u32));
        }
        let big = count_fm_formula(3, 11, 0).unwrap();
        assert_eq!(big, BigUint::from(88574u64) * BigUint::from(59048u64));
    }

    #[test]
    fn invalid_m() {
        assert!(matches!(count_fm_formula(3, 2, 1), Err(Error::InvalidM { .. })));
        assert!(matches!(count_fm_formula(3, 3, 2), Err(Error::InvalidM { .. })));
        assert!(matches!(count_fm_formula(3, 4, 2), Err(Error::InvalidM { .. })));
    }

    #[test]
    fn orbit_counts_p3() {
        let budget = Budget::default();
        let d = from_prime_constants(3, 2, &[1]).unwrap();
        let oc = orbit_count(&d, &budget).unwrap();
        assert_eq!(oc.isotropic_vectors, 20);
        assert_eq!(oc.orbits, 10);
        assert!(oc.action_free);
        let d = from_prime_constants(3, 3, &[1, 1]).unwrap();
        let oc = orbit_count(&d, &budget).unwrap();
        assert_eq!(oc.isotropic_vectors, 224);
        assert_eq!(oc.orbits, 112);
        assert!(oc.action_free);
    }

    #[test]
    fn report_paths() {
        let d = from_prime_constants(3, 3, &[0, 0]).unwrap();
        let r = count_fm_partners(&d, &PartnerCountOptions::default()).unwrap();
        assert_eq!(r.m, 3);
        assert_eq!(r.bruteforce_count, Some(r.formula_count.clone()));
        let tiny = PartnerCountOptions { brute_force: true, budget: Budget { enumeration: 10, group: 10 } };
        let r = count_fm_partners(&d, &tiny).unwrap();
        assert_eq!(r.bruteforce_count, None);
        let json = serde_json::to_string(&formula_report_from_pattern(3, 11, &[true; 10]).unwrap()).unwrap();
        assert!(json.contains("\"formula_count\":\"5230117552\""), "{json}");
    }
}
