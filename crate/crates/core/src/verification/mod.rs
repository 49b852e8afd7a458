//! Certified Diophantine measurements of constructed points.

use num_bigint::BigInt;
use thiserror::Error;

use crate::construction::ConstructionError;
use crate::ifs::InsufficientDepth;
use crate::Rational;

mod bounds;
mod checks;
mod distance;
mod fit;
mod lattice;
mod relations;
mod scan;

pub use bounds::{
    exponent_lower_bound, liouville_witnesses, lower_bound_scan, upper_bound_check, upper_samples, upper_witness,
    witness_hints, LiouvilleWitness, LowerBoundReport, UpperBoundReport, UpperSample,
};
pub use checks::{
    check_ab1, check_ap_chain, check_intrinsic, check_jo, check_lemur, check_ppp, check_pro, check_roc, check_wicht,
    intrinsic_check, run_exact_checks, CheckResult, PPP_CASES, PPP_SEED, PRO_TMAX,
};
pub use fit::{critical_grid, omega_hat_fit, OmegaFit};
pub use relations::{diagonal_demo, diagonal_ifs, relation_search, DiagonalAddress, DiagonalSample};

pub use distance::{certify_distance, dist_exact, dist_to_integers, enclose_best, theta_bracket};
pub use lattice::{enumerate, lll, scan_lattice};
pub use scan::{scan_exhaustive, scan_min, ScanConfig, ScanMethod, ScanResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("enclosure too wide to bracket the distance at q = {q}")]
    TooWide { q: BigInt },
    #[error("enclosure width {got} exceeds the required {need}")]
    InsufficientPrecision { need: Rational, got: Rational },
    #[error("budget exceeded in {what} after {verified} steps")]
    BudgetExceeded { what: String, verified: u64 },
    #[error("point is rational with denominator {q}")]
    ExactRationalPoint { q: BigInt },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Depth(#[from] InsufficientDepth),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}
