//! B-fields: extending a characteristic datum `(K, V)` across a hyperbolic plane.
//!
//! A vector `B ∈ V ⊗ GF(p^N)` is a valid B-field when `B − φ(B) ∈ K + φ(K)`; its
//! class modulo `K` determines the characteristic subspace
//! `K̃ = ⟨(x, x·B, 0) : x ∈ K⟩ + ⟨(B, B·B/2, 1)⟩` of `Ṽ = V ⊕ U`, in coordinates
//! `(V; v; w)` with `v·w = −1`.

use serde::{Deserialize, Serialize};

use crate::charsub::CharDatum;
use crate::error::{Error, Result};
use crate::field::{FieldElement, GaloisField};
use crate::linalg::kernel_mod_p;
use crate::quadspace::HyperbolicExtension;
use crate::semilinear::{decode_vector, encode_vector, phi_vector, Subspace};

fn check_vector(b: &[FieldElement], d: &CharDatum) -> Result<()> {
    if b.len() != d.space().dim() {
        return Err(Error::AmbientMismatch);
    }
    if b.iter().any(|x| x.field() != d.field()) {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

fn defect(b: &[FieldElement]) -> Vec<FieldElement> {
    b.iter().zip(phi_vector(b, 1)).map(|(x, y)| x - &y).collect()
}

pub fn valid_bfield(b: &[FieldElement], d: &CharDatum) -> Result<bool> {
    check_vector(b, d)?;
    Ok(d.k().sum(&d.k().apply_phi())?.contains(&defect(b)))
}

/// An `F_p`-basis of the valid B-fields (they form an `F_p`-subspace of `V ⊗ GF(p^N)`).
pub fn valid_bfield_space(d: &CharDatum) -> Result<Vec<Vec<FieldElement>>> {
    let field = d.field();
    let (p, big_n, n) = (field.p(), field.degree(), d.space().dim());
    let w = d.k().sum(&d.k().apply_phi())?;
    let unknowns = n * big_n;
    let mut rows = vec![vec![0u64; unknowns]; unknowns];
    let mut t_pow = field.one();
    for j in 0..big_n {
        for i in 0..n {
            let mut unit = vec![field.zero(); n];
            unit[i] = t_pow.clone();
            let image = w.reduce(&defect(&unit));
            for (r, x) in image.iter().enumerate() {
                for (k, &c) in x.coeffs().iter().enumerate() {
                    rows[r * big_n + k][i * big_n + j] = c;
                }
            }
        }
        t_pow = &t_pow * &field.gen();
    }
    kernel_mod_p(&rows, unknowns, p)
        .into_iter()
        .map(|flat| (0..n).map(|i| field.from_coeffs(&flat[i * big_n..(i + 1) * big_n])).collect())
        .collect()
}

/// A valid B-field up to `K`. Equality is equality of classes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawClass", into = "RawClass")]
pub struct BFieldClass {
    base: CharDatum,
    b: Vec<FieldElement>,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct RawClass {
    base: CharDatum,
    B: Vec<Vec<u64>>,
}

impl TryFrom<RawClass> for BFieldClass {
    type Error = Error;
    fn try_from(raw: RawClass) -> Result<Self> {
        let b = decode_vector(raw.base.field(), &raw.B)?;
        BFieldClass::new(raw.base, b)
    }
}

impl From<BFieldClass> for RawClass {
    fn from(c: BFieldClass) -> Self {
        RawClass { B: encode_vector(&c.b), base: c.base }
    }
}

impl PartialEq for BFieldClass {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.b.len() == other.b.len()
            && self.base.k().contains(&self.b.iter().zip(&other.b).map(|(x, y)| x - y).collect::<Vec<_>>())
    }
}

impl Eq for BFieldClass {}

impl BFieldClass {
    pub fn new(base: CharDatum, b: Vec<FieldElement>) -> Result<Self> {
        if !valid_bfield(&b, &base)? {
            return Err(Error::InvalidBField);
        }
        Ok(BFieldClass { base, b })
    }

    pub fn base(&self) -> &CharDatum {
        &self.base
    }

    pub fn representative(&self) -> &[FieldElement] {
        &self.b
    }

    /// The remainder of `B` modulo `K`; equal classes give equal vectors.
    pub fn canonical(&self) -> Vec<FieldElement> {
        self.base.k().reduce(&self.b)
    }

    /// `λ·B` for `λ ∈ F_p`.
    pub fn scale(&self, lambda: u64) -> Result<Self> {
        let l = self.base.field().from_u64(lambda);
        BFieldClass::new(self.base.clone(), self.b.iter().map(|x| &l * x).collect())
    }
}

/// `(K̃, Ṽ)` together with the splitting `Ṽ = V ⊕ U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawExtended", into = "RawExtended")]
pub struct ExtendedDatum {
    extension: HyperbolicExtension,
    datum: CharDatum,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct RawExtended {
    extension: HyperbolicExtension,
    Ktilde: Subspace,
}

impl TryFrom<RawExtended> for ExtendedDatum {
    type Error = Error;
    fn try_from(raw: RawExtended) -> Result<Self> {
        ExtendedDatum::new(raw.extension, raw.Ktilde)
    }
}

impl From<ExtendedDatum> for RawExtended {
    fn from(e: ExtendedDatum) -> Self {
        RawExtended { Ktilde: e.datum.k().clone(), extension: e.extension }
    }
}

impl ExtendedDatum {
    pub fn new(extension: HyperbolicExtension, ktilde: Subspace) -> Result<Self> {
        if ktilde.ambient() != &extension.extended {
            return Err(Error::AmbientMismatch);
        }
        let datum = CharDatum::new(extension.extended.clone(), ktilde)?;
        Ok(ExtendedDatum { extension, datum })
    }

    pub fn extension(&self) -> &HyperbolicExtension {
        &self.extension
    }

    pub fn datum(&self) -> &CharDatum {
        &self.datum
    }

    pub fn ktilde(&self) -> &Subspace {
        self.datum.k()
    }

    pub fn field(&self) -> &GaloisField {
        self.datum.field()
    }

    /// The distinguished isotropic vector `v` of `U`.
    pub fn v(&self) -> Vec<FieldElement> {
        let field = self.field();
        let mut out = vec![field.zero(); self.extension.extended.dim()];
        out[self.extension.v_index] = field.one();
        out
    }

    /// `K̃ ∩ v^⊥` projected to `V` along `v`.
    pub fn projected(&self) -> Result<Subspace> {
        let field = self.field();
        let v_line = Subspace::new(self.extension.extended.clone(), field, vec![self.v()])?;
        let inter = self.ktilde().intersect(&v_line.orthogonal_complement())?;
        let n = self.extension.base.dim();
        let rows = inter.vectors().into_iter().map(|mut y| {
            y.truncate(n);
            y
        });
        Subspace::new(self.extension.base.clone(), field, rows.collect())
    }

    /// Whether `K̃` arises from a B-field over `(K, V)`: `v ∉ K̃` and `K̃ ∩ v^⊥` projects onto `K`.
    pub fn in_range_of(&self, base: &CharDatum) -> Result<bool> {
        if base.space() != &self.extension.base || base.field() != self.field() {
            return Err(Error::AmbientMismatch);
        }
        Ok(!self.ktilde().contains(&self.v()) && self.projected()? == *base.k())
    }
}

pub fn extend_by_bfield(b: &BFieldClass) -> Result<ExtendedDatum> {
    let d = b.base();
    let space = d.space();
    let field = d.field();
    let extension = space.hyperbolic_extend();
    let bv = b.representative();
    let mut rows: Vec<Vec<FieldElement>> = d
        .k()
        .vectors()
        .into_iter()
        .map(|mut x| {
            let xb = space.pair(&x, bv);
            x.extend([xb, field.zero()]);
            x
        })
        .collect();
    let half = field.from_u64(2).inv().expect("p is odd");
    let mut last = bv.to_vec();
    last.extend([&space.pair(bv, bv) * &half, field.one()]);
    rows.push(last);
    let ktilde = Subspace::new(extension.extended.clone(), field, rows)?;
    ExtendedDatum::new(extension, ktilde)
        .map_err(|e| Error::ModelInconsistent(format!("extension is not characteristic: {e}")))
}

/// Recovers `(K, V)` and the class of `B` from an extended datum.
pub fn restrict(ed: &ExtendedDatum) -> Result<BFieldClass> {
    if ed.ktilde().contains(&ed.v()) {
        return Err(Error::DistinguishedVectorInside);
    }
    let base = CharDatum::new(ed.extension.base.clone(), ed.projected()?)?;
    let w_idx = ed.extension.w_index;
    let gen = ed
        .ktilde()
        .vectors()
        .into_iter()
        .find(|y| !y[w_idx].is_zero())
        .ok_or_else(|| Error::ModelInconsistent("K̃ lies in v^⊥".into()))?;
    let scale = gen[w_idx].inv().expect("non-zero");
    let n = ed.extension.base.dim();
    let b: Vec<FieldElement> = gen[..n].iter().map(|x| x * &scale).collect();
    BFieldClass::new(base, b)
}

/// The isometry `m_λ` of `Ṽ`: identity on `V`, `v ↦ λv`, `w ↦ λ⁻¹w`.
pub fn power_twist(ed: &ExtendedDatum, lambda: u64) -> Result<ExtendedDatum> {
    let field = ed.field();
    let l = field.from_u64(lambda);
    let l_inv = l.inv().ok_or(Error::ZeroLambda)?;
    let (vi, wi) = (ed.extension.v_index, ed.extension.w_index);
    let rows = ed
        .ktilde()
        .vectors()
        .into_iter()
        .map(|mut y| {
            y[vi] = &y[vi] * &l;
            y[wi] = &y[wi] * &l_inv;
            y
        })
        .collect();
    let ktilde = Subspace::new(ed.extension.extended.clone(), field, rows)?;
    ExtendedDatum::new(ed.extension.clone(), ktilde)
}
