//! Exact counts of intersecting subfamilies.
//!
//! For a family F of order m, the profile is the vector `(N_0, …, N_m)` where
//! `N_k` is the number of intersecting subfamilies of F of order k. Counting
//! reduces to counting independent sets by size in the disjointness graph of
//! F (vertices = members, edges = disjoint pairs, ∅ flagged as
//! self-conflicting). Two independent routes are kept deliberately:
//! [`profile_bruteforce`] walks all 2^m subfamilies, [`profile`] runs
//! branch-and-reduce with connected-component factorization. Tests hold them
//! against each other.

use crate::family::Family;
use crate::{Count, Error, Result};
use num_traits::{One, ToPrimitive, Zero};

/// Size cap for the branch-and-reduce route.
pub const MAX_PROFILE_MEMBERS: usize = 40;
/// Size cap for the brute-force route.
pub const MAX_BRUTEFORCE_MEMBERS: usize = 20;

// ============================================================================
// Disjointness graph
// ============================================================================

/// Graph on the member indices of a family, with an edge where two members
/// are disjoint. A member equal to ∅ conflicts with everything including
/// itself and is flagged rather than given a self-loop.
#[derive(Debug, Clone)]
pub struct DisjointnessGraph {
    m: usize,
    adj: Vec<u64>,
    flagged: u64,
}

impl DisjointnessGraph {
    pub fn new(family: &Family) -> Result<DisjointnessGraph> {
        let m = family.len();
        if m > 64 {
            return Err(Error::BudgetExceeded(format!(
                "disjointness graph capped at 64 members, got {m}"
            )));
        }
        let sets = family.members();
        let mut adj = vec![0u64; m];
        let mut flagged = 0u64;
        for u in 0..m {
            if sets[u].is_empty() {
                flagged |= 1 << u;
            }
            for v in u + 1..m {
                if sets[u].is_disjoint(&sets[v]) {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
            }
        }
        Ok(DisjointnessGraph { m, adj, flagged })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.m
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.m && v < self.m && self.adj[u] & (1 << v) != 0
    }

    /// Members flagged as self-conflicting (the empty set).
    pub fn flagged(&self) -> u64 {
        self.flagged
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> u64 {
        self.adj[u]
    }
}

// ============================================================================
// Size-indexed independent-set counting kernel
// ============================================================================

/// Scalar the counting kernel works in. `u64` for the enumeration sweeps
/// (family orders there keep every count below 2^40), `BigUint` for the
/// public profile.
pub trait PolyCount:
    Clone + Zero + One + std::ops::AddAssign<Self> + std::ops::Mul<Output = Self>
{
}
impl<T> PolyCount for T where
    T: Clone + Zero + One + std::ops::AddAssign<T> + std::ops::Mul<Output = T>
{
}

fn convolve<T: PolyCount>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x.clone() * y.clone();
        }
    }
    out
}

fn add_shifted<T: PolyCount>(acc: &mut Vec<T>, add: &[T], shift: usize) {
    if acc.len() < add.len() + shift {
        acc.resize(add.len() + shift, T::zero());
    }
    for (i, x) in add.iter().enumerate() {
        acc[i + shift] += x.clone();
    }
}

/// Coefficients of the independence polynomial of the subgraph induced by
/// `active`: entry k counts independent subsets of `active` of size k.
/// Branch-and-reduce: split into connected components, else branch on a
/// maximum-degree vertex v (ties to the lowest index) via
/// `P(G) = P(G−v) + x·P(G−N[v])`.
pub(crate) fn independent_set_counts<T: PolyCount>(adj: &[u64], active: u64) -> Vec<T> {
    if active == 0 {
        return vec![T::one()];
    }
    // Peel off the connected component of the lowest active vertex.
    let first = active.trailing_zeros() as usize;
    let mut comp = 1u64 << first;
    loop {
        let mut grown = comp;
        let mut rest = comp;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            grown |= adj[v] & active;
        }
        if grown == comp {
            break;
        }
        comp = grown;
    }
    if comp != active {
        let a = independent_set_counts::<T>(adj, comp);
        let b = independent_set_counts::<T>(adj, active & !comp);
        return convolve(&a, &b);
    }
    // Connected. Single vertex → 1 + x.
    if comp.count_ones() == 1 {
        return vec![T::one(), T::one()];
    }
    // Branch on a maximum-degree vertex.
    let mut pick = first;
    let mut best = 0;
    let mut rest = comp;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (adj[v] & comp).count_ones();
        if deg > best {
            best = deg;
            pick = v;
        }
    }
    let without = independent_set_counts::<T>(adj, comp & !(1 << pick));
    let closed = comp & !(adj[pick] | (1 << pick));
    let with = independent_set_counts::<T>(adj, closed);
    let mut acc = without;
    add_shifted(&mut acc, &with, 1);
    acc
}

/// Kernel entry for the sweep drivers: counts on a prebuilt adjacency with the
/// flagged vertices already excluded from `active`, padded to `m + 1`.
pub(crate) fn counts_from_adjacency(adj: &[u64], active: u64, m: usize) -> Vec<u64> {
    let mut counts = independent_set_counts::<u64>(adj, active);
    counts.resize(m + 1, 0);
    counts
}

// ============================================================================
// Profile
// ============================================================================

/// Exact intersecting-subfamily counts `(N_0, …, N_m)` of a family of order m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    counts: Vec<Count>,
}

impl Profile {
    /// Wrap raw counts; `counts[k]` is `N_k`, so the vector has length m+1.
    pub fn from_counts(counts: Vec<Count>) -> Profile {
        assert!(!counts.is_empty(), "profile needs at least N_0");
        Profile { counts }
    }

    pub fn from_u64_counts(counts: &[u64]) -> Profile {
        Profile::from_counts(counts.iter().map(|&c| Count::from(c)).collect())
    }

    /// Order of the profiled family (= length − 1).
    pub fn family_order(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[Count] {
        &self.counts
    }

    /// Total number of intersecting subfamilies, Σ N_k.
    pub fn total(&self) -> Count {
        let mut acc = Count::zero();
        for c in &self.counts {
            acc += c.clone();
        }
        acc
    }

    /// Textual form `m=<int>; N=<c0>,<c1>,...,<cm>`.
    pub fn to_text(&self) -> String {
        let joined: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        format!("m={}; N={}", self.family_order(), joined.join(","))
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Componentwise comparison of two profiles of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Equal,
    /// Left ≥ right everywhere, strict somewhere.
    Dominates,
    /// Left ≤ right everywhere, strict somewhere.
    Dominated,
    Incomparable,
}

/// Compare `left` against `right` componentwise.
pub fn dominates(left: &Profile, right: &Profile) -> Result<Dominance> {
    if left.counts.len() != right.counts.len() {
        return Err(Error::InvalidArgument(format!(
            "profiles of different lengths: {} vs {}",
            left.counts.len(),
            right.counts.len()
        )));
    }
    let mut some_greater = false;
    let mut some_less = false;
    for (a, b) in left.counts.iter().zip(&right.counts) {
        match a.cmp(b) {
            std::cmp::Ordering::Greater => some_greater = true,
            std::cmp::Ordering::Less => some_less = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    Ok(match (some_greater, some_less) {
        (false, false) => Dominance::Equal,
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::Dominated,
        (true, true) => Dominance::Incomparable,
    })
}

/// Profile by full 2^m enumeration. The oracle route: no graph reduction, no
/// factorization; each subfamily's verdict extends a smaller one by a direct
/// pairwise-disjointness test.
pub fn profile_bruteforce(family: &Family) -> Result<Profile> {
    let m = family.len();
    if m > MAX_BRUTEFORCE_MEMBERS {
        return Err(Error::BudgetExceeded(format!(
            "brute-force profile capped at {MAX_BRUTEFORCE_MEMBERS} members, got {m}"
        )));
    }
    let sets = family.members();
    // conflicts[u] = members that clash with u (disjoint from it), plus u
    // itself when u = ∅.
    let mut conflicts = vec![0u32; m];
    for u in 0..m {
        if sets[u].is_empty() {
            conflicts[u] |= 1 << u;
        }
        for v in 0..m {
            if v != u && sets[u].is_disjoint(&sets[v]) {
                conflicts[u] |= 1 << v;
            }
        }
    }
    let mut counts = vec![0u64; m + 1];
    counts[0] = 1; // the empty subfamily
    let mut ok = vec![false; 1usize << m];
    ok[0] = true;
    for mask in 1..(1u32 << m) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let good = ok[rest as usize]
            && conflicts[low] & rest == 0
            && conflicts[low] & (1 << low) == 0;
        ok[mask as usize] = good;
        if good {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    Ok(Profile::from_u64_counts(&counts))
}

/// Profile via branch-and-reduce on the disjointness graph.
pub fn profile(family: &Family) -> Result<Profile> {
    let m = family.len();
    if m > MAX_PROFILE_MEMBERS {
        return Err(Error::BudgetExceeded(format!(
            "profile capped at {MAX_PROFILE_MEMBERS} members, got {m}"
        )));
    }
    let graph = DisjointnessGraph::new(family)?;
    let active = if m == 64 { !0u64 } else { (1u64 << m) - 1 } & !graph.flagged;
    let mut counts = independent_set_counts::<Count>(&graph.adj, active);
    counts.resize(m + 1, Count::zero());
    Ok(Profile::from_counts(counts))
}

/// `Σ_k N_k p^k (1−p)^(m−k)`: the probability that the p-random subfamily
/// (each member kept independently with probability p) is intersecting.
/// Exact integer counts until the final evaluation; terms added smallest
/// magnitude first.
pub fn prob_intersecting(family: &Family, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p must lie strictly in (0,1), got {p}")));
    }
    let prof = profile(family)?;
    let m = prof.family_order();
    let q = 1.0 - p;
    let mut terms: Vec<f64> = Vec::with_capacity(m + 1);
    for (k, count) in prof.counts().iter().enumerate() {
        if count.is_zero() {
            continue;
        }
        let c = count.to_f64().unwrap_or(f64::INFINITY);
        terms.push(c * p.powi(k as i32) * q.powi((m - k) as i32));
    }
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(terms.iter().sum())
}
