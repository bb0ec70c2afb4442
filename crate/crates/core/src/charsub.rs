//! Characteristic subspace data `(K, V)`.
//!
//! `K ⊂ V ⊗ GF(p^N)` is characteristic when it is totally isotropic of dimension
//! `σ0 = dim V / 2` and `K + φ(K)` has dimension `σ0 + 1`; strictly characteristic
//! when the iterates `φ^i(K)` span everything. For strict data this module computes
//! the normalized basis `e_i = φ^(i−1)(e)` and the structure constants
//! `a_i = e_1·e_(σ0+i+1)`, and conversely rebuilds a datum from prescribed constants.

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{make_extension, Embedding, FieldElement, GaloisField};
use crate::linalg::{solve_linear, Matrix};
use crate::quadspace::{QuadraticSpace, MAX_SIGMA0};
use crate::semilinear::{fixed_points, phi_vector, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub is_characteristic: bool,
    pub is_strict: bool,
    pub sigma0: usize,
}

/// Checks the defining conditions of a (strictly) characteristic subspace.
pub fn validate(k: &Subspace, v: &QuadraticSpace) -> Result<Validation> {
    if k.ambient() != v {
        return Err(Error::AmbientMismatch);
    }
    let sigma0 = v.sigma0();
    let is_characteristic =
        k.dim() == sigma0 && k.is_totally_isotropic() && k.sum(&k.apply_phi())?.dim() == sigma0 + 1;
    let mut span = k.clone();
    // the ascending chain stabilizes within dim V steps
    for _ in 0..v.dim() {
        let next = span.sum(&span.apply_phi())?;
        if next.dim() == span.dim() {
            break;
        }
        span = next;
    }
    Ok(Validation { is_characteristic, is_strict: is_characteristic && span.is_full(), sigma0 })
}

/// A non-degenerate non-neutral `V` with a characteristic `K ⊂ V ⊗ GF(p^N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDatum", into = "RawDatum")]
pub struct CharDatum {
    space: QuadraticSpace,
    k: Subspace,
    strict: bool,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct RawDatum {
    V: QuadraticSpace,
    #[serde(rename = "fieldN")]
    field_n: usize,
    K: Subspace,
}

impl TryFrom<RawDatum> for CharDatum {
    type Error = Error;
    fn try_from(raw: RawDatum) -> Result<Self> {
        if raw.K.field().degree() != raw.field_n {
            return Err(Error::AmbientMismatch);
        }
        CharDatum::new(raw.V, raw.K)
    }
}

impl From<CharDatum> for RawDatum {
    fn from(d: CharDatum) -> Self {
        RawDatum { field_n: d.k.field().degree(), V: d.space, K: d.k }
    }
}

impl CharDatum {
    /// Accepts any characteristic `K`; strictness is recorded, not required.
    pub fn new(space: QuadraticSpace, k: Subspace) -> Result<Self> {
        let check = validate(&k, &space)?;
        if !check.is_characteristic {
            return Err(Error::NotCharacteristic);
        }
        if !space.is_non_neutral() {
            return Err(Error::NeutralForm);
        }
        Ok(CharDatum { space, k, strict: check.is_strict })
    }

    pub fn space(&self) -> &QuadraticSpace {
        &self.space
    }

    pub fn k(&self) -> &Subspace {
        &self.k
    }

    pub fn field(&self) -> &GaloisField {
        self.k.field()
    }

    pub fn p(&self) -> u64 {
        self.space.p()
    }

    pub fn sigma0(&self) -> usize {
        self.space.sigma0()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn artin_invariant(&self) -> usize {
        self.k.dim()
    }
}

/// `l_K = K ∩ φ(K) ∩ … ∩ φ^(σ0−1)(K)`, a line for strictly characteristic `K`.
pub fn canonical_line(d: &CharDatum) -> Result<Subspace> {
    if !d.is_strict() {
        return Err(Error::NotStrict);
    }
    let mut line = d.k().clone();
    for j in 1..d.sigma0() {
        line = line.intersect(&d.k().apply_phi_pow(j as i64))?;
    }
    if line.dim() != 1 {
        return Err(Error::NotStrict);
    }
    Ok(line)
}

/// The basis `e_1, …, e_2σ0` (in `V`-coordinates) with `e_1·e_(σ0+1) = 1`, the
/// structure constants, and the coefficients of `φ(e_2σ0) = Σ λ_i e_i + Σ μ_i e_(σ0+i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OgusBasis {
    pub e: Vec<Vec<FieldElement>>,
    pub a: Vec<FieldElement>,
    pub lambda: Vec<FieldElement>,
    pub mu: Vec<FieldElement>,
}

impl OgusBasis {
    /// Columns are the `e_i`; maps normalized coordinates to `V`-coordinates.
    pub fn change_of_basis(&self) -> Matrix {
        let field = self.e[0][0].field();
        Matrix::from_columns(field, self.e.len(), &self.e)
    }
}

/// The Gram matrix `[[0, A], [Aᵀ, 0]]`, with `A` upper unitriangular and
/// `A[r][c] = F^r(a_(c−r))` above the diagonal (0-based `r`, `c`).
pub fn structure_gram(field: &GaloisField, sigma0: usize, a: &[FieldElement]) -> Matrix {
    let upper = |r: usize, c: usize| -> FieldElement {
        match c.cmp(&r) {
            std::cmp::Ordering::Less => field.zero(),
            std::cmp::Ordering::Equal => field.one(),
            std::cmp::Ordering::Greater => a[c - r - 1].frobenius_pow(r as i64),
        }
    };
    Matrix::from_fn(field, 2 * sigma0, 2 * sigma0, |i, j| {
        if i < sigma0 && j >= sigma0 {
            upper(i, j - sigma0)
        } else if i >= sigma0 && j < sigma0 {
            upper(j, i - sigma0)
        } else {
            field.zero()
        }
    })
}

/// Computes the normalized basis of a strict datum.
///
/// The generator of `l_K` is the echelon generator rescaled by the smallest `c`
/// (canonical element order) solving `c^(1+p^σ0) · (g·φ^σ0(g)) = 1`.
pub fn ogus_basis(d: &CharDatum) -> Result<OgusBasis> {
    let line = canonical_line(d)?;
    let field = d.field().clone();
    let sigma0 = d.sigma0();
    let v = d.space();
    let gen = line.vectors().remove(0);
    let s = v.pair(&gen, &phi_vector(&gen, sigma0 as i64));
    let s_inv = s.inv().ok_or_else(|| Error::ModelInconsistent("e·φ^σ0(e) vanishes".into()))?;
    let exponent = BigUint::from(d.p()).pow(sigma0 as u32) + 1u32;
    let c = field
        .nth_roots(&s_inv, &exponent)
        .into_iter()
        .next()
        .ok_or(Error::RootUnavailable { p: d.p(), degree: field.degree() })?;
    let e1: Vec<FieldElement> = gen.iter().map(|x| &c * x).collect();
    let e: Vec<Vec<FieldElement>> = (0..2 * sigma0).map(|i| phi_vector(&e1, i as i64)).collect();
    let basis = Matrix::from_columns(&field, 2 * sigma0, &e);
    if basis.inverse().is_none() {
        return Err(Error::NotStrict);
    }
    let a: Vec<FieldElement> = (1..sigma0).map(|i| v.pair(&e1, &e[sigma0 + i])).collect();
    let image = phi_vector(&e[2 * sigma0 - 1], 1);
    let coeffs = solve_linear(&basis, &image)?
        .unique()
        .map(<[FieldElement]>::to_vec)
        .ok_or_else(|| Error::ModelInconsistent("φ(e_2σ0) has no unique expansion".into()))?;
    let (lambda, mu) = coeffs.split_at(sigma0);
    if !lambda[0].is_one() || !mu[0].is_zero() {
        return Err(Error::ModelInconsistent("λ_1 = 1, μ_1 = 0 violated".into()));
    }
    let gram_e = basis.transpose().mul(&v.gram_over(&field)).mul(&basis);
    if gram_e != structure_gram(&field, sigma0, &a) {
        return Err(Error::ModelInconsistent("Gram matrix in the normalized basis has the wrong shape".into()));
    }
    Ok(OgusBasis { e, a, lambda: lambda.to_vec(), mu: mu.to_vec() })
}

/// Limits for [`from_structure_constants`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescentOptions {
    /// The working degree may be at most `cap_factor · n`, `n` the degree of the constants' field.
    pub cap_factor: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { cap_factor: 64 }
    }
}

/// A datum rebuilt from structure constants, with the abstract model it came from.
#[derive(Clone, Debug)]
pub struct StructureModel {
    pub datum: CharDatum,
    /// The prescribed constants, embedded into the working field.
    pub a: Vec<FieldElement>,
    pub lambda: Vec<FieldElement>,
    pub mu: Vec<FieldElement>,
    /// Columns are the model basis `e_i` in `V`-coordinates.
    pub model_basis: Matrix,
    /// Degree at which `φ` first became split (before adjoining roots of unity).
    pub descent_degree: usize,
}

pub fn from_structure_constants(
    sigma0: usize,
    a: &[FieldElement],
    base: &GaloisField,
    opts: &DescentOptions,
) -> Result<CharDatum> {
    Ok(construct_model(sigma0, a, base, opts)?.datum)
}

/// Constants given as prime-field residues.
pub fn from_prime_constants(p: u64, sigma0: usize, a: &[u64]) -> Result<CharDatum> {
    let base = make_extension(p, 1)?;
    let a: Vec<FieldElement> = a.iter().map(|&x| base.from_u64(x)).collect();
    from_structure_constants(sigma0, &a, &base, &DescentOptions::default())
}

/// Builds the model `(Gram, φ)` on symbols `e_1..e_2σ0`, descends it to `F_p` and
/// returns `(K, V)` in `V`-coordinates.
///
/// `φ(e_2σ0)` is pinned down by `φ(e_2σ0)·e_k = σ(e_2σ0·e_(k−1))` for `2 ≤ k ≤ 2σ0`
/// together with `μ_1 = 0`; `λ_1 = 1` and isotropy of `φ(e_2σ0)` are then checked.
/// The working field is `GF(p^N)` with `N` the least multiple of `n` for which the
/// semilinear operator splits, further enlarged so that `2σ0 | N`.
pub fn construct_model(
    sigma0: usize,
    a: &[FieldElement],
    base: &GaloisField,
    opts: &DescentOptions,
) -> Result<StructureModel> {
    let p = base.p();
    if !(1..=MAX_SIGMA0).contains(&sigma0) {
        return Err(Error::InvalidInput(format!("sigma0 = {sigma0} outside 1..={MAX_SIGMA0}")));
    }
    if a.len() != sigma0 - 1 {
        return Err(Error::InvalidInput(format!("expected {} structure constants, got {}", sigma0 - 1, a.len())));
    }
    if a.iter().any(|x| x.field() != base) {
        return Err(Error::FieldMismatch);
    }
    let dim = 2 * sigma0;
    let gram = structure_gram(base, sigma0, a);

    let mut rows = Vec::with_capacity(dim);
    let mut rhs = Vec::with_capacity(dim);
    for k in 1..dim {
        rows.push(gram.row(k).to_vec());
        rhs.push(gram.get(dim - 1, k - 1).frobenius());
    }
    let mut mu1 = vec![base.zero(); dim];
    mu1[sigma0] = base.one();
    rows.push(mu1);
    rhs.push(base.zero());
    let system = Matrix::from_rows(base, dim, rows)?;
    let x = solve_linear(&system, &rhs)?
        .unique()
        .map(<[FieldElement]>::to_vec)
        .ok_or_else(|| Error::ModelInconsistent("φ(e_2σ0) is not determined".into()))?;
    if !x[0].is_one() {
        return Err(Error::ModelInconsistent("λ_1 ≠ 1".into()));
    }
    if !crate::linalg::dot(&x, &gram.mul_vec(&x)).is_zero() {
        return Err(Error::ModelInconsistent("φ(e_2σ0) is not isotropic".into()));
    }
    let op = Matrix::from_fn(base, dim, dim, |r, c| {
        if c == dim - 1 {
            x[r].clone()
        } else if r == c + 1 {
            base.one()
        } else {
            base.zero()
        }
    });

    // Φ^n = P σ^n with P = M σ(M) … σ^(n−1)(M), so Φ^(nk) = P^k on GF(p^(nk))
    let n = base.degree();
    let cap = opts.cap_factor * n;
    let mut period = Matrix::identity(base, dim);
    for j in 0..n {
        period = period.mul(&op.frobenius_pow(j as i64));
    }
    let identity = Matrix::identity(base, dim);
    let mut power = period.clone();
    let mut k = 1;
    while power != identity {
        if n * k > cap {
            return Err(Error::DescentFailed { cap });
        }
        power = power.mul(&period);
        k += 1;
    }
    let descent_degree = n * k;
    let big_n = descent_degree.lcm(&dim);
    if big_n > cap {
        return Err(Error::DescentFailed { cap });
    }

    let big = make_extension(p, big_n)?;
    let emb = Embedding::new(base, &big)?;
    let lift = |m: &Matrix| m.map(|x| emb.apply(x));
    let gram_big = lift(&gram);
    let op_big = lift(&op);
    let fixed = fixed_points(&op_big)?;
    if fixed.len() != dim {
        return Err(Error::DescentFailed { cap });
    }
    let v_basis = Matrix::from_columns(&big, dim, &fixed);
    let gram_v = v_basis
        .transpose()
        .mul(&gram_big)
        .mul(&v_basis)
        .to_prime()
        .ok_or_else(|| Error::ModelInconsistent("form on the fixed space is not F_p-rational".into()))?;
    let space = QuadraticSpace::new(p, gram_v).map_err(|e| Error::ModelInconsistent(format!("descended form: {e}")))?;
    if !space.is_non_neutral() {
        return Err(Error::ModelInconsistent("descended form is neutral".into()));
    }
    let model_basis = v_basis.inverse().ok_or_else(|| Error::ModelInconsistent("fixed space is not a basis".into()))?;
    let shift = -(sigma0 as i64 - 1);
    let k_rows: Vec<Vec<FieldElement>> = (0..sigma0).map(|i| phi_vector(&model_basis.column(i), shift)).collect();
    let k_space = Subspace::new(space.clone(), &big, k_rows)?;
    let datum = CharDatum::new(space, k_space).map_err(|e| Error::ModelInconsistent(format!("rebuilt K: {e}")))?;
    if !datum.is_strict() {
        return Err(Error::ModelInconsistent("rebuilt K is not strictly characteristic".into()));
    }
    Ok(StructureModel {
        datum,
        a: a.iter().map(|x| emb.apply(x)).collect(),
        lambda: x[..sigma0].iter().map(|v| emb.apply(v)).collect(),
        mu: x[sigma0..].iter().map(|v| emb.apply(v)).collect(),
        model_basis,
        descent_degree,
    })
}

/// Finds `ζ ∈ μ_(p^σ0+1)` with `found_i = ζ^(1+p^(σ0+i)) · original_i` for every `i`.
pub fn find_rescaling(
    field: &GaloisField,
    found: &[FieldElement],
    original: &[FieldElement],
    sigma0: usize,
) -> Result<Option<FieldElement>> {
    if found.iter().chain(original).any(|x| x.field() != field) {
        return Err(Error::FieldMismatch);
    }
    if found.len() != original.len() {
        return Err(Error::InvalidInput("constant lists differ in length".into()));
    }
    let p = field.p();
    let order = p.pow(sigma0 as u32) + 1;
    let omega = field.primitive_root_of_unity(order)?;
    let mut zeta = field.one();
    for _ in 0..order {
        let matches = found.iter().zip(original).enumerate().all(|(idx, (f, o))| {
            let i = idx + 1;
            let twist = &zeta * &zeta.frobenius_pow((sigma0 + i) as i64);
            *f == &twist * o
        });
        if matches {
            return Ok(Some(zeta));
        }
        zeta = &zeta * &omega;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9_example() -> CharDatum {
        let f = make_extension(3, 2).unwrap();
        let v = QuadraticSpace::standard(3, 1).unwrap();
        let k = Subspace::new(v.clone(), &f, vec![vec![f.one(), f.gen()]]).unwrap();
        CharDatum::new(v, k).unwrap()
    }

    #[test]
    fn validate_gf9_example() {
        let d = gf9_example();
        let check = validate(d.k(), d.space()).unwrap();
        assert_eq!(check, Validation { is_characteristic: true, is_strict: true, sigma0: 1 });
        assert_eq!(d.artin_invariant(), 1);
    }

    #[test]
    fn rational_line_is_not_characteristic() {
        let f = make_extension(3, 2).unwrap();
        let v = QuadraticSpace::standard(3, 1).unwrap();
        for t in 0..3 {
            let k = Subspace::new(v.clone(), &f, vec![vec![f.one(), f.from_u64(t)]]).unwrap();
            assert_eq!(k.apply_phi(), k);
            assert!(!validate(&k, &v).unwrap().is_characteristic);
        }
        let zero = Subspace::zero(&v, &f);
        assert!(!validate(&zero, &v).unwrap().is_characteristic);
        assert_eq!(CharDatum::new(v.clone(), zero).unwrap_err(), Error::NotCharacteristic);
        let other = QuadraticSpace::standard(3, 2).unwrap();
        assert_eq!(validate(&Subspace::zero(&v, &f), &other).unwrap_err(), Error::AmbientMismatch);
    }

    #[test]
    fn sigma0_one_line_is_k() {
        let d = gf9_example();
        assert_eq!(canonical_line(&d).unwrap(), *d.k());
    }

    #[test]
    fn gf9_normalization() {
        let d = gf9_example();
        let ob = ogus_basis(&d).unwrap();
        assert!(ob.a.is_empty());
        let v = d.space();
        assert!(v.pair(&ob.e[0], &ob.e[1]).is_one());
        // e = c·(1, t) with c^4 = 2 and c the smallest such root
        let f = d.field();
        let c = &ob.e[0][0];
        assert_eq!(c.pow(4), f.from_u64(2));
        let smallest = f.elements().unwrap().into_iter().find(|x| x.pow(4) == f.from_u64(2)).unwrap();
        assert_eq!(*c, smallest);
    }

    #[test]
    fn structure_gram_shape() {
        let f = make_extension(3, 2).unwrap();
        let t = f.gen();
        let g = structure_gram(&f, 3, &[t.clone(), f.one()]);
        assert_eq!(*g.get(0, 3), f.one());
        assert_eq!(*g.get(0, 4), t);
        assert_eq!(*g.get(0, 5), f.one());
        assert_eq!(*g.get(1, 5), t.frobenius());
        assert_eq!(*g.get(2, 4), f.zero());
        assert_eq!(g.transpose(), g);
    }

    #[test]
    fn model_from_constants_small() {
        for (s, a) in [(1usize, vec![]), (2, vec![0u64]), (2, vec![1]), (3, vec![0, 0]), (3, vec![1, 2])] {
            let d = from_prime_constants(3, s, &a).unwrap();
            assert!(d.is_strict());
            assert_eq!(d.artin_invariant(), s);
            assert_eq!(d.field().degree() % (2 * s), 0);
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(from_prime_constants(3, 2, &[]), Err(Error::InvalidInput(_))));
        assert!(matches!(from_prime_constants(3, 12, &[0; 11]), Err(Error::InvalidInput(_))));
        let base = make_extension(3, 1).unwrap();
        let tight = DescentOptions { cap_factor: 2 };
        assert!(matches!(
            from_structure_constants(3, &[base.zero(), base.one()], &base, &tight),
            Err(Error::DescentFailed { .. })
        ));
    }

    #[test]
    fn non_strict_datum_rejected_by_line() {
        // K ⊕ <w> inside V ⊕ U: characteristic, φ-iterates miss v
        let d = gf9_example();
        let ext = d.space().hyperbolic_extend();
        let f = d.field();
        let mut rows: Vec<Vec<FieldElement>> = d
            .k()
            .vectors()
            .into_iter()
            .map(|mut x| {
                x.extend([f.zero(), f.zero()]);
                x
            })
            .collect();
        rows.push(vec![f.zero(), f.zero(), f.zero(), f.one()]);
        let kt = Subspace::new(ext.extended.clone(), f, rows).unwrap();
        let dt = CharDatum::new(ext.extended, kt).unwrap();
        assert!(!dt.is_strict());
        assert_eq!(canonical_line(&dt).unwrap_err(), Error::NotStrict);
        assert_eq!(ogus_basis(&dt).unwrap_err(), Error::NotStrict);
    }

    #[test]
    fn constants_round_trip() {
        let base = make_extension(3, 1).unwrap();
        for (s, a) in [(2usize, vec![0u64]), (2, vec![1]), (2, vec![2]), (3, vec![0, 0]), (3, vec![0, 1]), (3, vec![1, 1]), (3, vec![2, 1])] {
            let a: Vec<FieldElement> = a.iter().map(|&x| base.from_u64(x)).collect();
            let model = construct_model(s, &a, &base, &DescentOptions::default()).unwrap();
            let ob = ogus_basis(&model.datum).unwrap();
            for (found, orig) in ob.a.iter().zip(&model.a) {
                assert_eq!(found.is_zero(), orig.is_zero());
            }
            assert!(find_rescaling(model.datum.field(), &ob.a, &model.a, s).unwrap().is_some(), "sigma0={s}");
        }
    }

    #[test]
    fn constants_over_extension() {
        let base = make_extension(3, 2).unwrap();
        let a = vec![base.gen()];
        let model = construct_model(2, &a, &base, &DescentOptions::default()).unwrap();
        assert_eq!(model.datum.field().degree() % 2, 0);
        let ob = ogus_basis(&model.datum).unwrap();
        assert!(find_rescaling(model.datum.field(), &ob.a, &model.a, 2).unwrap().is_some());
    }

    #[test]
    fn empty_constants_rescale_trivially() {
        let f = make_extension(3, 2).unwrap();
        assert_eq!(find_rescaling(&f, &[], &[], 1).unwrap(), Some(f.one()));
    }
}
