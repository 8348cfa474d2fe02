//! Ground sets, element sets, and families.
//!
//! Elements are labeled `1..=n` with `n ≤ 24`; a set is a bitmask with bit
//! `k-1` standing for element `k`. A [`Family`] keeps its members sorted by
//! (order, bitmask value), which fixes textual output and equality.

use crate::{Error, Result};

/// Hard cap on the ground-set size. Everything in scope fits; beyond this the
/// enumeration spaces stop being desk-scale.
pub const MAX_GROUND_SET: u32 = 24;

// ============================================================================
// GroundSet
// ============================================================================

/// The ground set `[n] = {1, …, n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: u32,
}

impl GroundSet {
    pub fn new(n: u32) -> Result<GroundSet> {
        if n == 0 || n > MAX_GROUND_SET {
            return Err(Error::InvalidArgument(format!(
                "ground set size must be in 1..={MAX_GROUND_SET}, got {n}"
            )));
        }
        Ok(GroundSet { n })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Bitmask with all of `1..=n` present.
    #[inline]
    pub fn full_mask(&self) -> u32 {
        (1u32 << self.n) - 1
    }
}

// ============================================================================
// ElemSet
// ============================================================================

/// A subset of `[n]`. Carries its ground-set size so that operations can
/// guard against mixing universes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElemSet {
    bits: u32,
    n: u32,
}

impl ElemSet {
    pub fn empty(ground: GroundSet) -> ElemSet {
        ElemSet { bits: 0, n: ground.n }
    }

    pub fn full(ground: GroundSet) -> ElemSet {
        ElemSet { bits: ground.full_mask(), n: ground.n }
    }

    /// Build from a raw bitmask. Errors if a bit above position n is set.
    pub fn from_bits(ground: GroundSet, bits: u32) -> Result<ElemSet> {
        if bits & !ground.full_mask() != 0 {
            return Err(Error::InvalidArgument(format!(
                "bitmask {bits:#b} has elements above n={}",
                ground.n
            )));
        }
        Ok(ElemSet { bits, n: ground.n })
    }

    pub fn from_elements(ground: GroundSet, elements: &[u32]) -> Result<ElemSet> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > ground.n {
                return Err(Error::InvalidArgument(format!(
                    "element {e} out of range 1..={}",
                    ground.n
                )));
            }
            bits |= 1 << (e - 1);
        }
        Ok(ElemSet { bits, n: ground.n })
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn ground(&self) -> GroundSet {
        GroundSet { n: self.n }
    }

    /// Number of elements.
    #[inline]
    pub fn order(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(&self, element: u32) -> bool {
        element >= 1 && element <= self.n && self.bits & (1 << (element - 1)) != 0
    }

    #[inline]
    pub fn with(&self, element: u32) -> ElemSet {
        debug_assert!(element >= 1 && element <= self.n);
        ElemSet { bits: self.bits | (1 << (element - 1)), n: self.n }
    }

    #[inline]
    pub fn without(&self, element: u32) -> ElemSet {
        debug_assert!(element >= 1 && element <= self.n);
        ElemSet { bits: self.bits & !(1 << (element - 1)), n: self.n }
    }

    #[inline]
    pub fn union(&self, other: &ElemSet) -> ElemSet {
        debug_assert_eq!(self.n, other.n);
        ElemSet { bits: self.bits | other.bits, n: self.n }
    }

    #[inline]
    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        debug_assert_eq!(self.n, other.n);
        ElemSet { bits: self.bits & other.bits, n: self.n }
    }

    #[inline]
    pub fn difference(&self, other: &ElemSet) -> ElemSet {
        debug_assert_eq!(self.n, other.n);
        ElemSet { bits: self.bits & !other.bits, n: self.n }
    }

    #[inline]
    pub fn complement(&self) -> ElemSet {
        ElemSet { bits: !self.bits & ((1u32 << self.n) - 1), n: self.n }
    }

    #[inline]
    pub fn is_subset_of(&self, other: &ElemSet) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn is_disjoint(&self, other: &ElemSet) -> bool {
        self.bits & other.bits == 0
    }

    #[inline]
    pub fn intersects(&self, other: &ElemSet) -> bool {
        self.bits & other.bits != 0
    }

    /// Elements in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let e = rest.trailing_zeros() + 1;
                rest &= rest - 1;
                Some(e)
            }
        })
    }

    /// Canonical sort key: order first, then bitmask value.
    #[inline]
    pub fn canonical_key(&self) -> (u32, u32) {
        (self.order(), self.bits)
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_key()
            .cmp(&other.canonical_key())
            .then(self.n.cmp(&other.n))
    }
}

impl std::fmt::Display for ElemSet {
    /// Comma-separated elements, `-` for the empty set. Used inline in
    /// reports and in the (U,v,f) textual form; the family file format
    /// spells members differently (space-separated).
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.bits == 0 {
            return write!(f, "-");
        }
        let mut first = true;
        for e in self.elements() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

// ============================================================================
// Family
// ============================================================================

/// A family of subsets of `[n]`: no duplicates, members sorted by
/// (order, bitmask value).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: u32,
    sets: Vec<ElemSet>,
}

impl Family {
    pub fn empty(ground: GroundSet) -> Family {
        Family { n: ground.n, sets: Vec::new() }
    }

    /// Canonicalize: sort and drop duplicates. All members must share the
    /// ground set.
    pub fn from_sets(ground: GroundSet, sets: impl IntoIterator<Item = ElemSet>) -> Family {
        let mut sets: Vec<ElemSet> = sets.into_iter().collect();
        for s in &sets {
            assert_eq!(s.n, ground.n, "family member from a different ground set");
        }
        sets.sort();
        sets.dedup();
        Family { n: ground.n, sets }
    }

    /// Build from raw member bitmasks.
    pub fn from_bits(ground: GroundSet, masks: impl IntoIterator<Item = u32>) -> Result<Family> {
        let sets = masks
            .into_iter()
            .map(|bits| ElemSet::from_bits(ground, bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(Family::from_sets(ground, sets))
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn ground(&self) -> GroundSet {
        GroundSet { n: self.n }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    #[inline]
    pub fn members(&self) -> &[ElemSet] {
        &self.sets
    }

    pub fn contains(&self, set: &ElemSet) -> bool {
        debug_assert_eq!(set.n, self.n);
        self.sets.binary_search(set).is_ok()
    }

    /// Index of a member in canonical order, if present.
    pub fn position(&self, set: &ElemSet) -> Option<usize> {
        self.sets.binary_search(set).ok()
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.n == other.n && self.sets.iter().all(|s| other.contains(s))
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", format_family(self))
    }
}

// ============================================================================
// Predicates
// ============================================================================

/// True iff every pair of members (including A = B) intersects. A family
/// containing ∅ is never intersecting; the empty family vacuously is.
pub fn is_intersecting(family: &Family) -> bool {
    let sets = family.members();
    for (idx, a) in sets.iter().enumerate() {
        if a.is_empty() {
            return false;
        }
        for b in &sets[idx + 1..] {
            if a.is_disjoint(b) {
                return false;
            }
        }
    }
    true
}

/// True iff |A ∩ B| ≥ t for every pair of members, including A = B (so every
/// member needs at least t elements of its own).
pub fn is_t_intersecting(family: &Family, t: u32) -> bool {
    let sets = family.members();
    for (idx, a) in sets.iter().enumerate() {
        if a.order() < t {
            return false;
        }
        for b in &sets[idx + 1..] {
            if a.intersection(b).order() < t {
                return false;
            }
        }
    }
    true
}

/// Which slice of the cube a layer family covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerMode {
    /// `[n]^(r)`: exactly order r.
    Exact,
    /// `[n]^(≥r)`: order r and above.
    AtLeast,
}

/// The layer `[n]^(r)` or up-set `[n]^(≥r)`.
pub fn layer_family(ground: GroundSet, r: u32, mode: LayerMode) -> Result<Family> {
    let n = ground.n;
    if r > n {
        return Err(Error::InvalidArgument(format!("layer {r} out of range 0..={n}")));
    }
    let keep = |order: u32| match mode {
        LayerMode::Exact => order == r,
        LayerMode::AtLeast => order >= r,
    };
    let mut sets = Vec::new();
    for bits in 0..=ground.full_mask() {
        if keep(bits.count_ones()) {
            sets.push(ElemSet { bits, n });
        }
    }
    Ok(Family::from_sets(ground, sets))
}

// ============================================================================
// Parsing / formatting
// ============================================================================

/// Parse the family file format: header `n=<integer>`, then one member per
/// line (`-` for ∅, else space-separated elements). `#` starts a comment;
/// blank lines are skipped. Member order in the input is irrelevant.
pub fn parse_family(text: &str) -> Result<Family> {
    let mut ground: Option<GroundSet> = None;
    let mut sets: Vec<ElemSet> = Vec::new();
    let mut seen: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(g) = ground else {
            // First significant line must be the header.
            let Some(value) = line.strip_prefix("n=") else {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected header \"n=<integer>\", got \"{line}\""),
                });
            };
            let n: u32 = value.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad ground set size \"{value}\""),
            })?;
            ground = Some(GroundSet::new(n).map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?);
            continue;
        };

        let set = if line == "-" {
            ElemSet::empty(g)
        } else {
            let mut bits = 0u32;
            for token in line.split_whitespace() {
                let e: u32 = token.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("malformed member element \"{token}\""),
                })?;
                if e == 0 || e > g.n() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("element {e} out of range 1..={}", g.n()),
                    });
                }
                let bit = 1u32 << (e - 1);
                if bits & bit != 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("element {e} repeated within a member"),
                    });
                }
                bits |= bit;
            }
            ElemSet { bits, n: g.n() }
        };
        if let Some(first) = seen.insert(set.bits, lineno) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate member (first seen at line {first})"),
            });
        }
        sets.push(set);
    }

    let Some(g) = ground else {
        return Err(Error::Parse { line: 1, message: "missing header \"n=<integer>\"".into() });
    };
    Ok(Family::from_sets(g, sets))
}

/// Inverse of [`parse_family`]: header line, then members in canonical order.
pub fn format_family(family: &Family) -> String {
    let mut out = format!("n={}\n", family.n);
    for set in family.members() {
        if set.is_empty() {
            out.push_str("-\n");
        } else {
            let mut first = true;
            for e in set.elements() {
                if !first {
                    out.push(' ');
                }
                out.push_str(&e.to_string());
                first = false;
            }
            out.push('\n');
        }
    }
    out
}
