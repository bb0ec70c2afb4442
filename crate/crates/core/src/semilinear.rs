//! Subspaces of `V ⊗ GF(p^N)` and the Frobenius-semilinear operator `φ = id ⊗ σ`.
//!
//! A [`Subspace`] always stores its basis in reduced row echelon form, so two
//! values are equal exactly when they describe the same subspace.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{make_extension, FieldElement, GaloisField};
use crate::linalg::{canonical_rows, kernel_mod_p, Matrix};
use crate::quadspace::QuadraticSpace;
use crate::Budget;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSubspace", into = "RawSubspace")]
pub struct Subspace {
    ambient: QuadraticSpace,
    field: GaloisField,
    basis: Matrix,
}

#[derive(Serialize, Deserialize)]
struct RawSubspace {
    ambient: QuadraticSpace,
    #[serde(rename = "fieldN")]
    field_n: usize,
    basis: Vec<Vec<Vec<u64>>>,
}

impl TryFrom<RawSubspace> for Subspace {
    type Error = Error;
    fn try_from(raw: RawSubspace) -> Result<Self> {
        let field = make_extension(raw.ambient.p(), raw.field_n)?;
        let vectors = decode_vectors(&field, &raw.basis)?;
        Subspace::new(raw.ambient, &field, vectors)
    }
}

impl From<Subspace> for RawSubspace {
    fn from(s: Subspace) -> Self {
        RawSubspace {
            field_n: s.field.degree(),
            basis: s.vectors().iter().map(|v| encode_vector(v)).collect(),
            ambient: s.ambient,
        }
    }
}

/// Vector of field elements as nested coefficient arrays.
pub fn encode_vector(v: &[FieldElement]) -> Vec<Vec<u64>> {
    v.iter().map(|x| x.coeffs().to_vec()).collect()
}

pub fn decode_vector(field: &GaloisField, raw: &[Vec<u64>]) -> Result<Vec<FieldElement>> {
    raw.iter().map(|c| field.from_coeffs(c)).collect()
}

pub fn decode_vectors(field: &GaloisField, raw: &[Vec<Vec<u64>>]) -> Result<Vec<Vec<FieldElement>>> {
    raw.iter().map(|v| decode_vector(field, v)).collect()
}

/// Entrywise Frobenius power of a vector.
pub fn phi_vector(v: &[FieldElement], k: i64) -> Vec<FieldElement> {
    v.iter().map(|x| x.frobenius_pow(k)).collect()
}

impl Subspace {
    pub fn new(ambient: QuadraticSpace, field: &GaloisField, vectors: Vec<Vec<FieldElement>>) -> Result<Self> {
        if field.p() != ambient.p() {
            return Err(Error::FieldMismatch);
        }
        let n = ambient.dim();
        let basis = Matrix::from_rows(field, n, vectors)?.rref().0;
        Ok(Subspace { ambient, field: field.clone(), basis })
    }

    pub fn zero(ambient: &QuadraticSpace, field: &GaloisField) -> Self {
        Subspace { ambient: ambient.clone(), field: field.clone(), basis: Matrix::zeros(field, 0, ambient.dim()) }
    }

    pub fn full(ambient: &QuadraticSpace, field: &GaloisField) -> Self {
        Subspace { ambient: ambient.clone(), field: field.clone(), basis: Matrix::identity(field, ambient.dim()) }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> &QuadraticSpace {
        &self.ambient
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<FieldElement>> {
        self.basis.row_vecs()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient.dim()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient || self.field != other.field {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    /// Remainder of `v` after eliminating the pivot coordinates; zero iff `v` lies in the subspace.
    /// Two vectors have the same remainder iff they agree modulo the subspace.
    pub fn reduce(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = v.to_vec();
        for r in 0..self.dim() {
            let row = self.basis.row(r);
            let pc = row.iter().position(|x| !x.is_zero()).expect("echelon rows are nonzero");
            let c = out[pc].clone();
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o -= &(&c * x);
            }
        }
        out
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.reduce(v).iter().all(FieldElement::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.vectors().iter().all(|v| self.contains(v))
    }

    /// `φ^k(S)`; negative `k` uses `σ^(N+k)` since `σ^N` is the identity.
    pub fn apply_phi_pow(&self, k: i64) -> Subspace {
        Subspace {
            ambient: self.ambient.clone(),
            field: self.field.clone(),
            basis: self.basis.frobenius_pow(k).rref().0,
        }
    }

    pub fn apply_phi(&self) -> Subspace {
        self.apply_phi_pow(1)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Subspace {
            ambient: self.ambient.clone(),
            field: self.field.clone(),
            basis: self.basis.vstack(&other.basis).rref().0,
        })
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(&self.ambient, &self.field));
        }
        // (α, β) with α·S + β·T = 0 gives α·S in the intersection
        let stacked = self.basis.vstack(&other.basis).transpose();
        let s = self.dim();
        let rows: Vec<Vec<FieldElement>> =
            stacked.kernel().into_iter().map(|k| self.basis.vec_mul(&k[..s])).collect();
        Subspace::new(self.ambient.clone(), &self.field, rows)
    }

    /// Image under the linear map `x ↦ g x`.
    pub fn image_under(&self, g: &Matrix) -> Result<Subspace> {
        if g.rows() != self.ambient.dim() || g.cols() != self.ambient.dim() || g.field() != &self.field {
            return Err(Error::AmbientMismatch);
        }
        let rows = self.vectors().iter().map(|v| g.mul_vec(v)).collect();
        Subspace::new(self.ambient.clone(), &self.field, rows)
    }

    pub fn is_totally_isotropic(&self) -> bool {
        let vs = self.vectors();
        vs.iter().enumerate().all(|(i, x)| vs[i..].iter().all(|y| self.ambient.pair(x, y).is_zero()))
    }

    /// `{x : x·s = 0 for all s in S}`.
    pub fn orthogonal_complement(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(&self.ambient, &self.field);
        }
        let g = self.ambient.gram_over(&self.field);
        let rows = self.basis.mul(&g).kernel();
        Subspace::new(self.ambient.clone(), &self.field, rows).expect("kernel rows have ambient length")
    }
}

/// `x ↦ M·σ(x)` on `GF(p^N)^n`.
pub fn apply_semilinear(m: &Matrix, x: &[FieldElement]) -> Vec<FieldElement> {
    m.mul_vec(&phi_vector(x, 1))
}

/// Fixed points of `x ↦ M·σ(x)`, an `F_p`-subspace of `GF(p^N)^n`.
///
/// Flattens `GF(p^N)^n` to `F_p^(nN)` and solves the `F_p`-linear system
/// `M·σ(x) − x = 0`. The basis returned is the reduced echelon basis of the
/// flattened kernel, so it is deterministic.
pub fn fixed_points(m: &Matrix) -> Result<Vec<Vec<FieldElement>>> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::InvalidInput("semilinear operator must be square".into()));
    }
    if m.inverse().is_none() {
        return Err(Error::SingularOperator);
    }
    let field = m.field();
    let big_n = field.degree();
    let p = field.p();
    let dim = n * big_n;
    let mut rows = vec![vec![0u64; dim]; dim];
    let mut t_pow = field.one();
    for j in 0..big_n {
        let image = t_pow.frobenius();
        for i in 0..n {
            let col = i * big_n + j;
            for r in 0..n {
                let mut val = m.get(r, i) * &image;
                if r == i {
                    val -= &t_pow;
                }
                for (k, &c) in val.coeffs().iter().enumerate() {
                    rows[r * big_n + k][col] = c;
                }
            }
        }
        t_pow = &t_pow * &field.gen();
    }
    let kernel = kernel_mod_p(&rows, dim, p);
    Ok(kernel
        .into_iter()
        .map(|flat| {
            (0..n).map(|i| field.from_coeffs(&flat[i * big_n..(i + 1) * big_n]).expect("degree matches")).collect()
        })
        .collect())
}

/// Number of `k`-dimensional subspaces of `GF(q)^n`.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let q = BigUint::from(q);
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// Every `k`-dimensional subspace of `ambient ⊗ GF(q)`, ordered by pivot set and
/// then by free entries in canonical element order.
pub fn enumerate_subspaces(
    ambient: &QuadraticSpace,
    field: &GaloisField,
    k: usize,
    budget: &Budget,
) -> Result<Vec<Subspace>> {
    let n = ambient.dim();
    let q = field.size().ok_or_else(|| Error::Unsupported("field too large to enumerate".into()))?;
    let count = gaussian_binomial(q, n, k);
    if count > BigUint::from(budget.enumeration) {
        return Err(Error::BudgetExceeded { required: count.to_string(), budget: budget.enumeration });
    }
    let elements = field.elements().expect("small field");
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| (pc + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let mut digits = vec![0usize; free.len()];
        loop {
            let mut rows = vec![vec![field.zero(); n]; k];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = field.one();
            }
            for (&(r, c), &d) in free.iter().zip(&digits) {
                rows[r][c] = elements[d].clone();
            }
            let basis = Matrix::from_rows(field, n, rows)?;
            out.push(Subspace { ambient: ambient.clone(), field: field.clone(), basis });
            let mut i = free.len();
            let done = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < elements.len() {
                    break false;
                }
                digits[i] = 0;
            };
            if done {
                break;
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Reduced echelon basis for the span of a list of vectors.
pub fn span_basis(field: &GaloisField, n: usize, vectors: Vec<Vec<FieldElement>>) -> Vec<Vec<FieldElement>> {
    canonical_rows(field, n, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> GaloisField {
        make_extension(3, 2).unwrap()
    }

    fn plane() -> QuadraticSpace {
        QuadraticSpace::standard(3, 1).unwrap()
    }

    #[test]
    fn phi_of_rational_subspace_is_itself() {
        let f = gf9();
        let s = Subspace::new(plane(), &f, vec![vec![f.one(), f.from_u64(2)]]).unwrap();
        assert_eq!(s.apply_phi(), s);
        let z = Subspace::zero(&plane(), &f);
        assert_eq!(z.apply_phi(), z);
    }

    #[test]
    fn phi_conjugates_t() {
        let f = gf9();
        let t = f.gen();
        let s = Subspace::new(plane(), &f, vec![vec![f.one(), t.clone()]]).unwrap();
        let expected = Subspace::new(plane(), &f, vec![vec![f.one(), -&t]]).unwrap();
        assert_eq!(s.apply_phi(), expected);
        assert_eq!(s.apply_phi().apply_phi(), s);
        assert!(s.sum(&s.apply_phi()).unwrap().is_full());
        assert_eq!(s.intersect(&s.apply_phi()).unwrap().dim(), 0);
    }

    #[test]
    fn sum_and_intersection_basics() {
        let f = make_extension(3, 1).unwrap();
        let v = QuadraticSpace::standard(3, 2).unwrap();
        let unit = |i: usize| (0..4).map(|j| f.from_u64((i == j) as u64)).collect::<Vec<_>>();
        let a = Subspace::new(v.clone(), &f, vec![unit(0), unit(1)]).unwrap();
        let b = Subspace::new(v.clone(), &f, vec![unit(2), unit(3)]).unwrap();
        assert!(a.sum(&b).unwrap().is_full());
        assert_eq!(a.intersect(&b).unwrap().dim(), 0);
        assert_eq!(a.sum(&a).unwrap(), a);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let other = Subspace::zero(&QuadraticSpace::standard(3, 1).unwrap(), &f);
        assert_eq!(a.sum(&other).unwrap_err(), Error::AmbientMismatch);
    }

    #[test]
    fn fixed_points_of_identity_are_rational_vectors() {
        let f = gf9();
        let fixed = fixed_points(&Matrix::identity(&f, 2)).unwrap();
        assert_eq!(fixed.len(), 2);
        assert!(fixed.iter().flatten().all(|x| x.as_prime().is_some()));
    }

    #[test]
    fn fixed_points_of_t_times_frobenius() {
        let f = gf9();
        let t = f.gen();
        let m = Matrix::from_rows(&f, 1, vec![vec![t.clone()]]).unwrap();
        let fixed = fixed_points(&m).unwrap();
        let brute: Vec<FieldElement> =
            f.elements().unwrap().into_iter().filter(|x| &t * &x.pow(3) == *x).collect();
        // an F_3-space with |brute| elements
        assert_eq!(3usize.pow(fixed.len() as u32), brute.len());
        for v in &fixed {
            assert!(brute.contains(&v[0]));
        }
        let singular = Matrix::zeros(&f, 1, 1);
        assert_eq!(fixed_points(&singular).unwrap_err(), Error::SingularOperator);
    }

    #[test]
    fn grassmannian_counts() {
        let f = gf9();
        let v = QuadraticSpace::standard(3, 1).unwrap();
        for k in 0..=2 {
            let all = enumerate_subspaces(&v, &f, k, &Budget::default()).unwrap();
            assert_eq!(BigUint::from(all.len()), gaussian_binomial(9, 2, k));
        }
        assert_eq!(gaussian_binomial(9, 4, 2), BigUint::from(7462u32));
    }

    #[test]
    fn json_round_trip() {
        let f = gf9();
        let s = Subspace::new(plane(), &f, vec![vec![f.one(), f.gen()]]).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"ambient":{"p":3,"dim":2,"gram":[[1,0],[0,1]]},"fieldN":2,"basis":[[[1,0],[0,1]]]}"#);
        let back: Subspace = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }
}
