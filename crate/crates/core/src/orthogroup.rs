//! The group of `F_p`-isometries of `V` preserving `K`.
//!
//! Every such element is diagonal in the normalized basis, `e_i ↦ ζ^(p^(i−1)) e_i`
//! for some `ζ ∈ μ_(p^σ0+1)`, so the group is cyclic of order `p^m + 1` where
//! `m` is read off from the vanishing pattern of the structure constants.

use num_bigint::BigUint;
use serde::Serialize;

use crate::charsub::{ogus_basis, CharDatum};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::Matrix;
use crate::Budget;

/// Largest `m | σ0` with `σ0/m` odd and `a_i = 0` whenever `2m ∤ i`; `0` if none.
pub fn m_invariant(a: &[FieldElement], sigma0: usize) -> usize {
    let pattern: Vec<bool> = a.iter().map(|x| !x.is_zero()).collect();
    m_invariant_from_pattern(&pattern, sigma0)
}

/// Same as [`m_invariant`], from `nonzero[i−1] = (a_i ≠ 0)`.
pub fn m_invariant_from_pattern(nonzero: &[bool], sigma0: usize) -> usize {
    (1..=sigma0)
        .rev()
        .filter(|m| sigma0.is_multiple_of(*m) && (sigma0 / m) % 2 == 1)
        .find(|&m| nonzero.iter().enumerate().all(|(idx, &nz)| !nz || (idx + 1) % (2 * m) == 0))
        .unwrap_or(0)
}

pub fn ortho_group_order(d: &CharDatum) -> Result<BigUint> {
    let ob = ogus_basis(d)?;
    let m = m_invariant(&ob.a, d.sigma0());
    Ok(BigUint::from(d.p()).pow(m as u32) + 1u32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthoElement {
    pub zeta: FieldElement,
    /// Eigenvalues `ζ^(p^i)` on the normalized basis.
    pub diagonal: Vec<FieldElement>,
    /// The element in `V`-coordinates, entries in `F_p`.
    pub matrix: Vec<Vec<u64>>,
}

impl OrthoElement {
    pub fn is_identity(&self) -> bool {
        self.zeta.is_one()
    }

    pub fn apply(&self, x: &[u64], p: u64) -> Vec<u64> {
        self.matrix.iter().map(|row| row.iter().zip(x).fold(0, |acc, (&g, &v)| (acc + g * v) % p)).collect()
    }
}

/// Product of two `F_p` matrices.
pub fn compose(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).fold(0, |acc, (&x, brow)| (acc + x * brow[j]) % p)).collect())
        .collect()
}

struct GroupContext<'a> {
    datum: &'a CharDatum,
    basis: Matrix,
    basis_inv: Matrix,
}

impl<'a> GroupContext<'a> {
    fn new(datum: &'a CharDatum) -> Result<Self> {
        let sigma0 = datum.sigma0();
        let n = datum.field().degree();
        if !n.is_multiple_of(2 * sigma0) {
            return Err(Error::RootFieldTooSmall { p: datum.p(), degree: n, order: datum.p().pow(sigma0 as u32) + 1 });
        }
        let basis = ogus_basis(datum)?.change_of_basis();
        let basis_inv = basis.inverse().ok_or(Error::NotStrict)?;
        Ok(GroupContext { datum, basis, basis_inv })
    }

    /// The conjugate of `diag(ζ^(p^i))`, if it is an `F_p`-rational isometry preserving `K`.
    fn element_for(&self, zeta: &FieldElement) -> Result<Option<OrthoElement>> {
        let field = self.datum.field();
        let dim = self.basis.rows();
        let diagonal: Vec<FieldElement> = (0..dim).map(|i| zeta.frobenius_pow(i as i64)).collect();
        let scaled = Matrix::from_fn(field, dim, dim, |r, c| self.basis.get(r, c) * &diagonal[c]);
        let g = scaled.mul(&self.basis_inv);
        let Some(matrix) = g.to_prime() else {
            return Ok(None);
        };
        let p = self.datum.p();
        let gram = self.datum.space().gram();
        let gt: Vec<Vec<u64>> = (0..dim).map(|c| (0..dim).map(|r| matrix[r][c]).collect()).collect();
        if compose(&compose(&gt, gram, p), &matrix, p) != gram {
            return Ok(None);
        }
        if self.datum.k().image_under(&g)? != *self.datum.k() {
            return Ok(None);
        }
        Ok(Some(OrthoElement { zeta: zeta.clone(), diagonal, matrix }))
    }
}

/// All group elements, sorted by `ζ` in the canonical element order.
///
/// Every `ζ ∈ μ_(p^σ0+1)` is tested, so the closed form for the order is not used.
pub fn ortho_group_elements(d: &CharDatum, budget: &Budget) -> Result<Vec<OrthoElement>> {
    let order = d.p().pow(d.sigma0() as u32) + 1;
    if order > budget.group {
        return Err(Error::BudgetExceeded { required: order.to_string(), budget: budget.group });
    }
    let ctx = GroupContext::new(d)?;
    let omega = d.field().primitive_root_of_unity(order)?;
    let mut zeta = d.field().one();
    let mut out = Vec::new();
    for _ in 0..order {
        if let Some(el) = ctx.element_for(&zeta)? {
            out.push(el);
        }
        zeta = &zeta * &omega;
    }
    out.sort_by(|a, b| a.zeta.cmp(&b.zeta));
    Ok(out)
}

/// Whether `ζ ∈ μ_(p^σ0+1)` gives an element of the group.
///
/// `ζ = ±1` always does. Otherwise the order of `ζ` must be `p^m' + 1` for an
/// admissible `m'` whose vanishing condition the constants satisfy; any other
/// order is settled by constructing the candidate directly.
pub fn zeta_in_image(zeta: &FieldElement, d: &CharDatum) -> Result<bool> {
    if zeta.field() != d.field() {
        return Err(Error::FieldMismatch);
    }
    let p = d.p();
    let sigma0 = d.sigma0();
    let order = p.pow(sigma0 as u32) + 1;
    if !zeta.pow(order).is_one() {
        return Err(Error::InvalidInput("zeta is not a (p^sigma0 + 1)-th root of unity".into()));
    }
    if zeta.is_one() || (-zeta).is_one() {
        return Ok(true);
    }
    let ob = ogus_basis(d)?;
    let ord = d.field().order_dividing(zeta, order);
    let admissible = (1..=sigma0).find(|&m| sigma0.is_multiple_of(m) && (sigma0 / m) % 2 == 1 && p.pow(m as u32) + 1 == ord);
    match admissible {
        Some(m) => Ok(ob.a.iter().enumerate().all(|(idx, x)| x.is_zero() || (idx + 1) % (2 * m) == 0)),
        None => Ok(GroupContext::new(d)?.element_for(zeta)?.is_some()),
    }
}
