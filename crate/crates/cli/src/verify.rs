//! Verification suites over the standard test matrix.
//!
//! Every check records the computed and expected values as strings. The report
//! carries no timings or addresses, so identical invocations serialize identically.

use std::collections::BTreeSet;
use std::fmt::Display;

use crystal_core::bfield::{valid_bfield_space, BFieldClass};
use crystal_core::charsub::{find_rescaling, from_structure_constants, validate};
use crystal_core::fmcount::{count_fm_formula, formula_report_from_pattern, orbit_count, SELF_COUNT_MAX_SIGMA0};
use crystal_core::orthogroup::{compose, m_invariant, ortho_group_order};
use crystal_core::semilinear::enumerate_subspaces;
use crystal_core::{
    extend_by_bfield, isotropic_count_formula, make_extension, ogus_basis, ortho_group_elements, power_twist,
    restrict, Budget, CharDatum, DescentOptions, Error, ExtendedDatum, FieldElement, QuadraticSpace, Subspace,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Isotropic,
    Ortho,
    Fm,
    Bfield,
    Roundtrip,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Isotropic => "isotropic",
            Suite::Ortho => "ortho",
            Suite::Fm => "fm",
            Suite::Bfield => "bfield",
            Suite::Roundtrip => "roundtrip",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        [Suite::Isotropic, Suite::Ortho, Suite::Fm, Suite::Bfield, Suite::Roundtrip, Suite::All]
            .into_iter()
            .find(|x| x.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIPPED")]
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub status: Status,
    pub computed: String,
    pub expected: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn success(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub struct VerifyOptions {
    pub budget: Budget,
    /// Restrict the matrix to one characteristic.
    pub p: Option<u64>,
    /// Restrict the matrix to one Artin invariant.
    pub sigma0: Option<usize>,
    /// Dev fixture: perturb one Gram entry of every space the suites build.
    pub corrupt_gram: bool,
}


/// One entry of the standard matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub p: u64,
    pub sigma0: usize,
    pub pattern: &'static str,
    pub a: Vec<u64>,
}

impl Case {
    fn label(&self) -> String {
        format!("p={} sigma0={} a={:?} ({})", self.p, self.sigma0, self.a, self.pattern)
    }
}

/// `p ∈ {3, 5}`, `σ0 ∈ {1, 2, 3}`, constants all-zero, generic (all ones) and mixed `(0, 1)`.
pub fn standard_matrix() -> Vec<Case> {
    let mut out = Vec::new();
    for p in [3u64, 5] {
        out.push(Case { p, sigma0: 1, pattern: "empty", a: vec![] });
        out.push(Case { p, sigma0: 2, pattern: "all-zero", a: vec![0] });
        out.push(Case { p, sigma0: 2, pattern: "generic", a: vec![1] });
        out.push(Case { p, sigma0: 3, pattern: "all-zero", a: vec![0, 0] });
        out.push(Case { p, sigma0: 3, pattern: "generic", a: vec![1, 1] });
        out.push(Case { p, sigma0: 3, pattern: "mixed", a: vec![0, 1] });
    }
    out
}

pub const ISOTROPIC_PAIRS: [(u64, usize); 5] = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)];

struct Ctx {
    opts: VerifyOptions,
    checks: Vec<Check>,
}

impl Ctx {
    fn wanted(&self, p: u64, sigma0: usize) -> bool {
        self.opts.p.is_none_or(|q| q == p) && self.opts.sigma0.is_none_or(|s| s == sigma0)
    }

    fn push(&mut self, suite: Suite, name: String, status: Status, computed: String, expected: String, note: Option<String>) {
        self.checks.push(Check { suite: suite.name(), name, status, computed, expected, note });
    }

    fn compare<T: Display + PartialEq>(&mut self, suite: Suite, name: String, computed: T, expected: T, invariant: &str) {
        let ok = computed == expected;
        let note = (!ok).then(|| format!("violated: {invariant}"));
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(suite, name, status, computed.to_string(), expected.to_string(), note);
    }

    fn holds(&mut self, suite: Suite, name: String, ok: bool, invariant: &str) {
        let note = (!ok).then(|| format!("violated: {invariant}"));
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(suite, name, status, ok.to_string(), "true".into(), note);
    }

    fn error(&mut self, suite: Suite, name: String, err: &Error) {
        match err {
            Error::BudgetExceeded { .. } => {
                self.push(suite, name, Status::Skipped, "-".into(), "-".into(), Some(format!("formula only: {err}")))
            }
            _ => self.push(suite, name, Status::Fail, "error".into(), "-".into(), Some(err.to_string())),
        }
    }

    fn corrupt(&self, space: QuadraticSpace) -> crystal_core::Result<QuadraticSpace> {
        if !self.opts.corrupt_gram {
            return Ok(space);
        }
        let p = space.p();
        let mut gram = space.gram().to_vec();
        gram[0][0] = (gram[0][0] + 1) % p;
        QuadraticSpace::new(p, gram)
    }

    fn datum(&self, case: &Case) -> crystal_core::Result<CharDatum> {
        let base = make_extension(case.p, 1)?;
        let a: Vec<FieldElement> = case.a.iter().map(|&x| base.from_u64(x)).collect();
        let d = from_structure_constants(case.sigma0, &a, &base, &DescentOptions::default())?;
        if !self.opts.corrupt_gram {
            return Ok(d);
        }
        let space = self.corrupt(d.space().clone())?;
        let k = Subspace::new(space.clone(), d.field(), d.k().vectors())?;
        CharDatum::new(space, k)
    }
}

pub fn run_verify(suite: Suite, opts: &VerifyOptions) -> Report {
    let mut ctx = Ctx { opts: *opts, checks: Vec::new() };
    let suites = match suite {
        Suite::All => vec![Suite::Isotropic, Suite::Ortho, Suite::Fm, Suite::Bfield, Suite::Roundtrip],
        s => vec![s],
    };
    for s in suites {
        match s {
            Suite::Isotropic => isotropic(&mut ctx),
            Suite::Ortho => ortho(&mut ctx),
            Suite::Fm => fm(&mut ctx),
            Suite::Bfield => bfield(&mut ctx),
            Suite::Roundtrip => roundtrip(&mut ctx),
            Suite::All => unreachable!(),
        }
    }
    let count = |st: Status| ctx.checks.iter().filter(|c| c.status == st).count();
    Report {
        suite: suite.name(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        checks: ctx.checks,
    }
}

fn isotropic(ctx: &mut Ctx) {
    let s = Suite::Isotropic;
    for (p, sigma0) in ISOTROPIC_PAIRS {
        if !ctx.wanted(p, sigma0) {
            continue;
        }
        let name = format!("isotropic count p={p} sigma0={sigma0}");
        let listed = QuadraticSpace::standard(p, sigma0)
            .and_then(|v| ctx.corrupt(v))
            .and_then(|v| v.enumerate_isotropic(&ctx.opts.budget));
        match listed {
            Ok(vs) => ctx.compare(s, name, BigUint::from(vs.len()), isotropic_count_formula(p, sigma0), "isotropic count = (p^σ0+1)(p^(σ0−1)−1)"),
            Err(e) => ctx.error(s, name, &e),
        }
    }
}

fn ortho(ctx: &mut Ctx) {
    let s = Suite::Ortho;
    for case in standard_matrix() {
        if !ctx.wanted(case.p, case.sigma0) {
            continue;
        }
        let label = case.label();
        let d = match ctx.datum(&case) {
            Ok(d) => d,
            Err(e) => {
                ctx.error(s, format!("datum {label}"), &e);
                continue;
            }
        };
        let els = match ortho_group_elements(&d, &ctx.opts.budget) {
            Ok(els) => els,
            Err(e) => {
                ctx.error(s, format!("group order {label}"), &e);
                continue;
            }
        };
        match ortho_group_order(&d) {
            Ok(order) => ctx.compare(s, format!("group order {label}"), BigUint::from(els.len()), order, "group order = p^m + 1"),
            Err(e) => ctx.error(s, format!("group order {label}"), &e),
        }
        let matrices: BTreeSet<&Vec<Vec<u64>>> = els.iter().map(|e| &e.matrix).collect();
        let closed = els
            .iter()
            .all(|x| els.iter().all(|y| matrices.contains(&compose(&x.matrix, &y.matrix, case.p))));
        ctx.holds(s, format!("closure {label}"), closed, "product of two elements is an element");
        let zetas: BTreeSet<&FieldElement> = els.iter().map(|e| &e.zeta).collect();
        ctx.holds(
            s,
            format!("zeta injective {label}"),
            zetas.len() == els.len() && matrices.len() == els.len(),
            "distinct elements have distinct zeta",
        );
        match orbit_count(&d, &ctx.opts.budget) {
            Ok(oc) => ctx.holds(s, format!("free action {label}"), oc.action_free, "no non-identity element fixes an isotropic vector"),
            Err(e) => ctx.error(s, format!("free action {label}"), &e),
        }
    }
}

fn fm(ctx: &mut Ctx) {
    let s = Suite::Fm;
    for case in standard_matrix() {
        if !ctx.wanted(case.p, case.sigma0) {
            continue;
        }
        let name = format!("partners {}", case.label());
        let result = ctx.datum(&case).and_then(|d| {
            let m = m_invariant(&ogus_basis(&d)?.a, case.sigma0);
            let formula = count_fm_formula(case.p, case.sigma0, m)?;
            let oc = orbit_count(&d, &ctx.opts.budget)?;
            let mut brute = BigUint::from(oc.orbits);
            if case.sigma0 <= SELF_COUNT_MAX_SIGMA0 {
                brute += 1u32;
            }
            Ok((brute, formula))
        });
        match result {
            Ok((brute, formula)) => ctx.compare(s, name, brute, formula, "orbit count (+1 if σ0 ≤ 10) = closed-form count"),
            Err(e) => ctx.error(s, name, &e),
        }
    }
    for p in [3u64, 5, 7, 11, 13] {
        if ctx.wanted(p, 1) {
            match count_fm_formula(p, 1, 1) {
                Ok(c) => ctx.compare(s, format!("formula p={p} sigma0=1"), c, BigUint::from(1u32), "σ0 = 1 has one partner"),
                Err(e) => ctx.error(s, format!("formula p={p} sigma0=1"), &e),
            }
        }
    }
    if ctx.wanted(3, 11) {
        // m = 0: no self-count above σ0 = 10
        let expected = BigUint::from(88574u64) * BigUint::from(59048u64);
        match formula_report_from_pattern(3, 11, &[true; 10]) {
            Ok(r) => {
                ctx.compare(s, "formula p=3 sigma0=11 generic".into(), r.formula_count, expected, "no self-count above σ0 = 10");
                ctx.push(
                    s,
                    "partners p=3 sigma0=11 generic".into(),
                    Status::Skipped,
                    "-".into(),
                    "-".into(),
                    Some("formula only: enumeration over F_3^22 exceeds any budget".into()),
                );
            }
            Err(e) => ctx.error(s, "formula p=3 sigma0=11 generic".into(), &e),
        }
    }
}

fn sample_bfield(d: &CharDatum, basis: &[Vec<FieldElement>], rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    let f = d.field();
    let mut b = vec![f.zero(); d.space().dim()];
    for v in basis {
        let c = f.from_u64(rng.gen_range(0..f.p()));
        for (x, y) in b.iter_mut().zip(v) {
            *x += &(&c * y);
        }
    }
    b
}

/// Result of the exhaustive B-field check over `GF(9)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GF9Census {
    pub classes: usize,
    pub distinct_extensions: usize,
    pub all_in_range: bool,
    pub restrict_after_extend: bool,
    pub extend_after_restrict: bool,
    pub planes: usize,
    pub planes_in_range: usize,
}

/// The datum `K = ⟨(1, t)⟩ ⊂ GF(9)^2` on the form `x² + y²`, optionally corrupted.
pub fn gf9_example(corrupt: bool) -> crystal_core::Result<CharDatum> {
    let f = make_extension(3, 2)?;
    let v = QuadraticSpace::standard(3, 1)?;
    let v = if corrupt { QuadraticSpace::new(3, vec![vec![2, 0], vec![0, 1]])? } else { v };
    let k = Subspace::new(v.clone(), &f, vec![vec![f.one(), f.gen()]])?;
    CharDatum::new(v, k)
}

/// Every B-class over the `GF(9)` datum, its extension, and a scan of all planes in `GF(9)^4`.
pub fn gf9_census(d: &CharDatum, budget: &Budget) -> crystal_core::Result<GF9Census> {
    let f = d.field().clone();
    let elements = f.elements().ok_or_else(|| Error::Unsupported("field too large".into()))?;
    let mut classes: Vec<BFieldClass> = Vec::new();
    for x in &elements {
        for y in &elements {
            let b = BFieldClass::new(d.clone(), vec![x.clone(), y.clone()])?;
            if !classes.contains(&b) {
                classes.push(b);
            }
        }
    }
    let extended: Vec<ExtendedDatum> = classes.iter().map(extend_by_bfield).collect::<crystal_core::Result<_>>()?;
    let distinct: BTreeSet<String> =
        extended.iter().map(|e| serde_json::to_string(e.ktilde()).expect("serializable")).collect();
    let mut all_in_range = true;
    let mut restrict_after_extend = true;
    for (b, e) in classes.iter().zip(&extended) {
        all_in_range &= e.in_range_of(d)?;
        restrict_after_extend &= restrict(e)? == *b;
    }
    let ext = d.space().hyperbolic_extend();
    let planes = enumerate_subspaces(&ext.extended, &f, 2, budget)?;
    let mut planes_in_range = 0;
    let mut extend_after_restrict = true;
    for plane in &planes {
        if !validate(plane, &ext.extended)?.is_characteristic {
            continue;
        }
        let ed = ExtendedDatum::new(ext.clone(), plane.clone())?;
        if ed.in_range_of(d)? {
            planes_in_range += 1;
            extend_after_restrict &= extend_by_bfield(&restrict(&ed)?)? == ed;
        }
    }
    Ok(GF9Census {
        classes: classes.len(),
        distinct_extensions: distinct.len(),
        all_in_range,
        restrict_after_extend,
        extend_after_restrict,
        planes: planes.len(),
        planes_in_range,
    })
}

fn bfield(ctx: &mut Ctx) {
    let s = Suite::Bfield;
    if ctx.wanted(3, 1) {
        match gf9_example(ctx.opts.corrupt_gram).and_then(|d| gf9_census(&d, &ctx.opts.budget)) {
            Ok(c) => {
                ctx.compare(s, "GF(9) B-classes".into(), c.classes, 9, "GF(9)^2 / K has 9 classes");
                ctx.compare(s, "GF(9) distinct extensions".into(), c.distinct_extensions, c.classes, "extension is injective on classes");
                ctx.holds(s, "GF(9) range conditions".into(), c.all_in_range, "v not in K~ and K~ ∩ v^⊥ projects onto K");
                ctx.holds(s, "GF(9) restrict after extend".into(), c.restrict_after_extend, "restrict(extend(B)) = B");
                ctx.holds(s, "GF(9) extend after restrict".into(), c.extend_after_restrict, "extend(restrict(K~)) = K~");
                ctx.compare(s, "GF(9) planes scanned".into(), c.planes, 7462, "GF(9)^4 has 7462 planes");
                ctx.compare(s, "GF(9) planes in range".into(), c.planes_in_range, c.classes, "image of extension = planes meeting the range conditions");
            }
            Err(e) => ctx.error(s, "GF(9) census".into(), &e),
        }
    }
    for case in standard_matrix().into_iter().filter(|c| c.p == 3 && c.sigma0 <= 2) {
        if !ctx.wanted(case.p, case.sigma0) {
            continue;
        }
        let label = case.label();
        let mut rng = ChaCha8Rng::seed_from_u64(case.sigma0 as u64 * 1000 + case.a.iter().sum::<u64>());
        let result = ctx.datum(&case).and_then(|d| {
            let basis = valid_bfield_space(&d)?;
            let mut round = true;
            let mut twist = true;
            for _ in 0..10 {
                let b = BFieldClass::new(d.clone(), sample_bfield(&d, &basis, &mut rng))?;
                let ed = extend_by_bfield(&b)?;
                round &= ed.in_range_of(&d)? && restrict(&ed)? == b;
                for l in 1..case.p {
                    twist &= power_twist(&ed, l)? == extend_by_bfield(&b.scale(l)?)?;
                }
            }
            Ok((round, twist))
        });
        match result {
            Ok((round, twist)) => {
                ctx.holds(s, format!("round trip {label}"), round, "restrict(extend(B)) = B");
                ctx.holds(s, format!("power twist {label}"), twist, "m_λ(extend(B)) = extend(λB)");
            }
            Err(e) => ctx.error(s, format!("sampled B-fields {label}"), &e),
        }
    }
}

fn roundtrip(ctx: &mut Ctx) {
    let s = Suite::Roundtrip;
    for case in standard_matrix() {
        if !ctx.wanted(case.p, case.sigma0) {
            continue;
        }
        let label = case.label();
        let result = ctx.datum(&case).and_then(|d| {
            let ob = ogus_basis(&d)?;
            let f = d.field();
            let orig: Vec<FieldElement> = case.a.iter().map(|&x| f.from_u64(x)).collect();
            let pattern = ob.a.iter().zip(&orig).all(|(x, y)| x.is_zero() == y.is_zero());
            let rescaled = find_rescaling(f, &ob.a, &orig, case.sigma0)?.is_some();
            let m_stable = m_invariant(&ob.a, case.sigma0) == m_invariant(&orig, case.sigma0);
            Ok((pattern, rescaled, m_stable))
        });
        match result {
            Ok((pattern, rescaled, m_stable)) => {
                ctx.holds(s, format!("zero pattern {label}"), pattern, "a_i = 0 exactly where the input vanishes");
                ctx.holds(s, format!("rescaling {label}"), rescaled, "a_i = ζ^(1+p^(σ0+i)) a_i' for one ζ");
                ctx.holds(s, format!("m invariant {label}"), m_stable, "m depends only on the vanishing pattern");
            }
            Err(e) => ctx.error(s, format!("round trip {label}"), &e),
        }
    }
}
