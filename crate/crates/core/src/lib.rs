//! Exact symbolic computation of effective existence bounds for invariant
//! jet differentials on smooth projective hypersurfaces.
//!
//! The library builds the Chern-class model of the tower of projectivized
//! jet bundles over a hypersurface, evaluates the algebraic holomorphic
//! Morse inequality criterion as an exact polynomial in the hypersurface
//! degree `d`, and extracts the least degree from which the criterion is
//! positive. An independent combinatorial side implements the Pieri rule
//! and the Brückmann–Rackwitz vanishing test for Schur powers of the
//! cotangent bundle, which certifies the absence of jet differentials of
//! order below the dimension.
//!
//! All arithmetic is exact: sparse multivariate polynomials over
//! arbitrary-precision integers, no rationals, no floating point.
//!
//! ```
//! let result = jetbounds::morse::compute_bound(2, 2).unwrap();
//! assert_eq!(result.bound, Some(18));
//! ```

pub mod error;
pub mod hypersurface;
mod packed;
pub mod morse;
pub mod polyring;
pub mod schur;
pub mod tower;

pub use error::Error;
pub use hypersurface::DegreePolynomial;
pub use polyring::{IntersectionPolynomial, Monomial, Polynomial, Variable};
pub use tower::TowerModel;

/// Default ceiling on the number of polynomial terms (and on enumeration
/// sizes in the combinatorial verifier) before a computation is aborted
/// with [`Error::TooLarge`].
pub const DEFAULT_MAX_TERMS: usize = 10_000_000;

/// Resource ceiling for the heavy pipeline steps. Exceeding it yields an
/// explicit [`Error::TooLarge`], never a silently truncated answer.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}
