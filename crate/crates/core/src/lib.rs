pub mod bfield;
pub mod charsub;
pub mod error;
pub mod field;
pub mod fmcount;
pub mod linalg;
pub mod orthogroup;
mod poly;
pub mod quadspace;
pub mod semilinear;

use serde::{Deserialize, Serialize};

pub use bfield::{extend_by_bfield, power_twist, restrict, valid_bfield, BFieldClass, ExtendedDatum};
pub use charsub::{from_structure_constants, ogus_basis, validate, CharDatum, DescentOptions, OgusBasis};
pub use error::{Error, Result};
pub use field::{make_extension, Embedding, FieldDescriptor, FieldElement, GaloisField};
pub use fmcount::{count_fm_formula, count_fm_partners, PartnerCountOptions, PartnerCountReport};
pub use linalg::{solve_linear, LinearSolution, Matrix};
pub use orthogroup::{m_invariant, ortho_group_elements, OrthoElement};
pub use quadspace::{isotropic_count_formula, HyperbolicExtension, QuadraticSpace};
pub use semilinear::{fixed_points, Subspace};

/// Limits on exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum number of candidate vectors (or subspaces) scanned.
    pub enumeration: u64,
    /// Maximum number of candidate roots of unity tested for group membership.
    pub group: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { enumeration: 100_000_000, group: 1_000_000 }
    }
}
