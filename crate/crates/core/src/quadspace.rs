//! Quadratic spaces over `F_p`: the standard non-neutral forms, isotropic vectors,
//! Witt index and the hyperbolic extension `V ⊕ U`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{make_extension, FieldElement, GaloisField};
use crate::linalg::{det_mod_p, kernel_mod_p, Matrix};
use crate::poly::{inv_mod_p, pow_mod};
use crate::Budget;

pub const MAX_SIGMA0: usize = 11;

/// A finite-dimensional `F_p`-space with a non-degenerate symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct QuadraticSpace {
    p: u64,
    gram: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    p: u64,
    dim: usize,
    gram: Vec<Vec<u64>>,
}

impl TryFrom<RawSpace> for QuadraticSpace {
    type Error = Error;
    fn try_from(raw: RawSpace) -> Result<Self> {
        if raw.gram.len() != raw.dim {
            return Err(Error::InvalidInput("gram size does not match dim".into()));
        }
        QuadraticSpace::new(raw.p, raw.gram)
    }
}

impl From<QuadraticSpace> for RawSpace {
    fn from(v: QuadraticSpace) -> Self {
        RawSpace { p: v.p, dim: v.gram.len(), gram: v.gram }
    }
}

/// `V ⊕ U` with `U` spanned by `v, w`, `v² = w² = 0`, `v·w = −1`, adjoined as the
/// last two coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicExtension {
    pub base: QuadraticSpace,
    pub extended: QuadraticSpace,
    pub v_index: usize,
    pub w_index: usize,
}

impl QuadraticSpace {
    /// Validates symmetry, even dimension and non-degeneracy. Entries are reduced mod `p`.
    pub fn new(p: u64, gram: Vec<Vec<u64>>) -> Result<Self> {
        make_extension(p, 1)?;
        let n = gram.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("dimension {n} is not a positive even number")));
        }
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("gram matrix is not square".into()));
        }
        let gram: Vec<Vec<u64>> = gram.into_iter().map(|row| row.into_iter().map(|x| x % p).collect()).collect();
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidInput("gram matrix is not symmetric".into()));
                }
            }
        }
        if det_mod_p(&gram, p) == 0 {
            return Err(Error::Degenerate);
        }
        Ok(QuadraticSpace { p, gram })
    }

    /// Hyperbolic planes `⊥` one anisotropic plane `diag(1, −ε)`, `ε` the smallest non-square.
    pub fn standard(p: u64, sigma0: usize) -> Result<Self> {
        make_extension(p, 1)?;
        if !(1..=MAX_SIGMA0).contains(&sigma0) {
            return Err(Error::InvalidInput(format!("sigma0 = {sigma0} outside 1..={MAX_SIGMA0}")));
        }
        let n = 2 * sigma0;
        let mut gram = vec![vec![0u64; n]; n];
        for h in 0..sigma0 - 1 {
            gram[2 * h][2 * h + 1] = p - 1;
            gram[2 * h + 1][2 * h] = p - 1;
        }
        gram[n - 2][n - 2] = 1;
        gram[n - 1][n - 1] = p - smallest_nonsquare(p);
        QuadraticSpace::new(p, gram)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn sigma0(&self) -> usize {
        self.dim() / 2
    }

    pub fn gram(&self) -> &[Vec<u64>] {
        &self.gram
    }

    pub fn gram_over(&self, field: &GaloisField) -> Matrix {
        Matrix::from_prime(field, &self.gram)
    }

    pub fn pair_fp(&self, x: &[u64], y: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let mut row = 0u64;
            for (j, &yj) in y.iter().enumerate() {
                row = (row + self.gram[i][j] * yj) % p;
            }
            acc = (acc + xi * row) % p;
        }
        acc
    }

    /// The form extended `k`-bilinearly to `V ⊗ GF(p^N)`.
    pub fn pair(&self, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
        let field = x[0].field();
        let mut acc = field.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                let g = self.gram[i][j];
                if g == 0 || yj.is_zero() {
                    continue;
                }
                acc += &(&(xi * yj) * &field.from_u64(g));
            }
        }
        acc
    }

    pub fn determinant(&self) -> u64 {
        det_mod_p(&self.gram, self.p)
    }

    /// Non-neutral iff `(−1)^σ0 · det` is a non-square mod `p`.
    pub fn non_neutral_by_discriminant(&self) -> bool {
        let p = self.p;
        let mut d = self.determinant();
        if self.sigma0() % 2 == 1 {
            d = (p - d) % p;
        }
        !is_square_mod(d, p)
    }

    /// Witt index by exhaustive search: find an isotropic vector, split off a
    /// hyperbolic plane, recurse on its orthogonal complement.
    pub fn witt_index(&self) -> usize {
        witt_index_of(self.p, self.gram.clone())
    }

    /// Exhaustive for `dim ≤ 6, p ≤ 7`, discriminant criterion otherwise.
    pub fn is_non_neutral(&self) -> bool {
        if self.dim() <= 6 && self.p <= 7 {
            self.witt_index() == self.sigma0() - 1
        } else {
            self.non_neutral_by_discriminant()
        }
    }

    /// Number of candidate vectors `p^dim`.
    pub fn search_space(&self) -> BigUint {
        BigUint::from(self.p).pow(self.dim() as u32)
    }

    /// Non-zero isotropic vectors in lexicographic order (first coordinate most significant).
    pub fn enumerate_isotropic(&self, budget: &Budget) -> Result<Vec<Vec<u64>>> {
        let total = self.search_space();
        if total > BigUint::from(budget.enumeration) {
            return Err(Error::BudgetExceeded { required: total.to_string(), budget: budget.enumeration });
        }
        let n = self.dim();
        let p = self.p;
        let mut out = Vec::new();
        let mut v = vec![0u64; n];
        loop {
            // odometer, last coordinate fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                v[i] += 1;
                if v[i] < p {
                    break;
                }
                v[i] = 0;
            }
            if self.pair_fp(&v, &v) == 0 {
                out.push(v.clone());
            }
        }
    }

    pub fn hyperbolic_extend(&self) -> HyperbolicExtension {
        let n = self.dim();
        let p = self.p;
        let mut gram = vec![vec![0u64; n + 2]; n + 2];
        for i in 0..n {
            gram[i][..n].copy_from_slice(&self.gram[i]);
        }
        gram[n][n + 1] = p - 1;
        gram[n + 1][n] = p - 1;
        let extended = QuadraticSpace { p, gram };
        HyperbolicExtension { base: self.clone(), extended, v_index: n, w_index: n + 1 }
    }
}

/// `(p^σ0 + 1)(p^(σ0−1) − 1)`, the number of non-zero isotropic vectors of a
/// non-neutral space of dimension `2σ0`.
pub fn isotropic_count_formula(p: u64, sigma0: usize) -> BigUint {
    let p = BigUint::from(p);
    (p.pow(sigma0 as u32) + 1u32) * (p.pow(sigma0 as u32 - 1) - 1u32)
}

pub fn is_square_mod(a: u64, p: u64) -> bool {
    a.is_multiple_of(p) || pow_mod(a, (p - 1) / 2, p) == 1
}

pub fn smallest_nonsquare(p: u64) -> u64 {
    (2..p).find(|&a| !is_square_mod(a, p)).expect("odd primes have non-squares")
}

fn witt_index_of(p: u64, gram: Vec<Vec<u64>>) -> usize {
    let n = gram.len();
    if n == 0 {
        return 0;
    }
    let pair = |x: &[u64], y: &[u64]| -> u64 {
        let mut acc = 0;
        for i in 0..n {
            for j in 0..n {
                acc = (acc + x[i] * gram[i][j] % p * y[j]) % p;
            }
        }
        acc
    };
    let mut v = vec![0u64; n];
    let found = loop {
        let mut i = n;
        let wrapped = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < p {
                break false;
            }
            v[i] = 0;
        };
        if wrapped {
            break false;
        }
        if pair(&v, &v) == 0 {
            break true;
        }
    };
    if !found {
        return 0;
    }
    // a partner u with v·u = 1, then w = u − (u·u / 2) v is isotropic with v·w = 1
    let gv: Vec<u64> = (0..n).map(|j| (0..n).map(|i| v[i] * gram[i][j]).sum::<u64>() % p).collect();
    let j = gv.iter().position(|&c| c != 0).expect("non-degenerate");
    let mut u = vec![0u64; n];
    u[j] = inv_mod_p(gv[j], p);
    let half_uu = pair(&u, &u) * inv_mod_p(2, p) % p;
    let w: Vec<u64> = (0..n).map(|i| (u[i] + (p - half_uu) * v[i]) % p).collect();
    let gw: Vec<u64> = (0..n).map(|j| (0..n).map(|i| w[i] * gram[i][j]).sum::<u64>() % p).collect();
    let complement = kernel_mod_p(&[gv, gw], n, p);
    let sub: Vec<Vec<u64>> =
        complement.iter().map(|a| complement.iter().map(|b| pair(a, b)).collect()).collect();
    1 + witt_index_of(p, sub)
}
