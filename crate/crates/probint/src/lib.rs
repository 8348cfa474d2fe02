//! Set families over small ground sets: compression operators, exact counts of
//! intersecting subfamilies, and exhaustive optimality experiments.
//!
//! The central object is a [`Family`] of subsets of `[n] = {1, …, n}` with
//! `n ≤ 24`, stored as bitmasks. On top of that sit three layers:
//!
//! * [`compress`] — the ij-, UV- and (U,v,f)-compression operators, the
//!   predicates that go with them, and two drivers (`left_compress`,
//!   `layerize`) that push a family towards a canonical form while a
//!   potential function moves monotonically.
//! * [`count`] — the profile `(N_0, …, N_m)` of a family, where `N_k` is the
//!   exact number of intersecting subfamilies of order `k`, computed either by
//!   brute-force enumeration or by branch-and-reduce on the disjointness
//!   graph; plus the evaluation `Σ N_k p^k (1−p)^(m−k)`.
//! * [`inject`] / [`verify`] — an explicit order-preserving injection from the
//!   intersecting subfamilies of a family into those of its compression
//!   (checked exhaustively), and a set of finite search experiments over all
//!   families of a given order.
//!
//! Everything is deterministic: randomized searches take explicit seeds, and
//! equal inputs produce byte-identical output.

pub mod cli;
pub mod compress;
pub mod count;
pub mod family;
pub mod inject;
pub mod verify;

pub use compress::{PairingFn, UvfSpec};
pub use count::{Dominance, Profile};
pub use family::{ElemSet, Family, GroundSet, LayerMode};

/// Scalar used for the public profile counts. Arbitrary precision so that no
/// family size silently overflows a fixed-width tally.
pub type Count = num_bigint::BigUint;

/// Errors shared across the crate. Parse errors carry the 1-based line the
/// problem was found on; budget errors mark inputs that are structurally fine
/// but too large for the requested computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Parse { line: usize, message: String },
    InvalidArgument(String),
    BudgetExceeded(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::InvalidArgument(message) => write!(f, "invalid argument: {message}"),
            Error::BudgetExceeded(message) => write!(f, "budget exceeded: {message}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
