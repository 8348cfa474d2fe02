//! Compression operators on sets and families.
//!
//! Three operators, in increasing generality:
//!
//! * `C_ij`: replace j by i in a set (if i is absent and j present).
//! * `C_UV`: replace the block V by U (if V ⊆ A and U ∩ A = ∅); the ij case
//!   is `U = {i}, V = {j}`.
//! * `C_{U,v,f}`: for a pairing function f on U and a pivot v ∉ U, send A with
//!   v ∉ A to `f(A∩U) ∪ {v} ∪ (A−U)`. Unlike UV-compression this preserves
//!   the intersecting property unconditionally.
//!
//! At family level a member only moves when its image is not already present
//! ("blocked"), so family order is always preserved.
//!
//! Two drivers: [`left_compress`] applies ij-compressions until the family is
//! left-compressed (the member-weight sum Σ_A Σ_{a∈A} a strictly decreases at
//! each recorded step), and [`layerize`] applies (U,v,f)-compressions until
//! the family is sandwiched between two consecutive layers `[n]^(≥r+1) ⊆ F ⊆
//! [n]^(≥r)` (the order sum Σ_A |A| strictly increases).

use crate::family::{ElemSet, Family, GroundSet};
use crate::{Error, Result};

// ============================================================================
// PairingFn and UvfSpec
// ============================================================================

/// A fixed-point-free involution on a set U (necessarily of even order),
/// given as a perfect pairing of its elements. The empty pairing on U = ∅ is
/// allowed; [`layerize`] needs it for witnesses with |V| = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingFn {
    domain: ElemSet,
    // partner[e-1] = f(e) for e ∈ U, 0 elsewhere
    partner: [u32; 24],
}

impl PairingFn {
    pub fn new(domain: ElemSet, pairs: &[(u32, u32)]) -> Result<PairingFn> {
        let mut partner = [0u32; 24];
        let mut covered = ElemSet::empty(domain.ground());
        for &(a, b) in pairs {
            if a == b {
                return Err(Error::InvalidArgument(format!("pairing fixes {a}")));
            }
            for e in [a, b] {
                if !domain.contains(e) {
                    return Err(Error::InvalidArgument(format!(
                        "pairing element {e} outside the domain {domain}"
                    )));
                }
                if covered.contains(e) {
                    return Err(Error::InvalidArgument(format!("pairing repeats element {e}")));
                }
                covered = covered.with(e);
            }
            partner[(a - 1) as usize] = b;
            partner[(b - 1) as usize] = a;
        }
        if covered != domain {
            return Err(Error::InvalidArgument(format!(
                "pairing covers {covered} but the domain is {domain}"
            )));
        }
        Ok(PairingFn { domain, partner })
    }

    /// Pair the k-th smallest element of `a` with the k-th smallest of `b`.
    pub fn matching(a: ElemSet, b: ElemSet) -> Result<PairingFn> {
        if a.order() != b.order() {
            return Err(Error::InvalidArgument(format!(
                "cannot match {a} against {b}: different orders"
            )));
        }
        if !a.is_disjoint(&b) {
            return Err(Error::InvalidArgument(format!("matching halves {a} and {b} overlap")));
        }
        let pairs: Vec<(u32, u32)> = a.elements().zip(b.elements()).collect();
        PairingFn::new(a.union(&b), &pairs)
    }

    #[inline]
    pub fn domain(&self) -> ElemSet {
        self.domain
    }

    #[inline]
    pub fn map(&self, element: u32) -> u32 {
        debug_assert!(self.domain.contains(element));
        self.partner[(element - 1) as usize]
    }

    /// Image of a subset of the domain.
    pub fn map_set(&self, s: ElemSet) -> ElemSet {
        debug_assert!(s.is_subset_of(&self.domain));
        let mut out = ElemSet::empty(s.ground());
        for e in s.elements() {
            out = out.with(self.map(e));
        }
        out
    }

    /// The pairs (a, b) with a < b, ascending.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for e in self.domain.elements() {
            let p = self.map(e);
            if e < p {
                out.push((e, p));
            }
        }
        out
    }
}

/// Parameters of a (U,v,f)-compression: an even-order set U, a pivot
/// v ∉ U, and a pairing function f on U.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UvfSpec {
    u: ElemSet,
    v: u32,
    f: PairingFn,
}

impl UvfSpec {
    pub fn new(u: ElemSet, v: u32, f: PairingFn) -> Result<UvfSpec> {
        if v == 0 || v > u.n() {
            return Err(Error::InvalidArgument(format!("pivot {v} out of range 1..={}", u.n())));
        }
        if u.contains(v) {
            return Err(Error::InvalidArgument(format!("pivot {v} lies inside U={u}")));
        }
        if f.domain() != u {
            return Err(Error::InvalidArgument(format!(
                "pairing domain {} does not equal U={u}",
                f.domain()
            )));
        }
        Ok(UvfSpec { u, v, f })
    }

    #[inline]
    pub fn u(&self) -> ElemSet {
        self.u
    }

    #[inline]
    pub fn v(&self) -> u32 {
        self.v
    }

    #[inline]
    pub fn f(&self) -> &PairingFn {
        &self.f
    }

    /// Parse the textual form `U=2,3,4,5; v=1; f=2-4,3-5` (`-` or an empty
    /// list for U = ∅).
    pub fn parse(text: &str, ground: GroundSet) -> Result<UvfSpec> {
        let mut u: Option<ElemSet> = None;
        let mut v: Option<u32> = None;
        let mut f_pairs: Option<Vec<(u32, u32)>> = None;
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let Some((key, value)) = part.split_once('=') else {
                return Err(Error::InvalidArgument(format!(
                    "bad (U,v,f) component \"{part}\": expected key=value"
                )));
            };
            let value = value.trim();
            match key.trim() {
                "U" => {
                    let mut set = ElemSet::empty(ground);
                    if !(value == "-" || value.is_empty()) {
                        for token in value.split(',') {
                            let e: u32 = token.trim().parse().map_err(|_| {
                                Error::InvalidArgument(format!("bad element \"{token}\" in U"))
                            })?;
                            set = ElemSet::from_elements(ground, &[e])?.union(&set);
                        }
                    }
                    u = Some(set);
                }
                "v" => {
                    v = Some(value.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad pivot \"{value}\""))
                    })?);
                }
                "f" => {
                    let mut pairs = Vec::new();
                    if !(value == "-" || value.is_empty()) {
                        for token in value.split(',') {
                            let Some((a, b)) = token.trim().split_once('-') else {
                                return Err(Error::InvalidArgument(format!(
                                    "bad pair \"{token}\" in f: expected a-b"
                                )));
                            };
                            let a: u32 = a.trim().parse().map_err(|_| {
                                Error::InvalidArgument(format!("bad pair \"{token}\" in f"))
                            })?;
                            let b: u32 = b.trim().parse().map_err(|_| {
                                Error::InvalidArgument(format!("bad pair \"{token}\" in f"))
                            })?;
                            pairs.push((a, b));
                        }
                    }
                    f_pairs = Some(pairs);
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown (U,v,f) component \"{other}\""
                    )));
                }
            }
        }
        let (Some(u), Some(v), Some(pairs)) = (u, v, f_pairs) else {
            return Err(Error::InvalidArgument(
                "a (U,v,f) spec needs all of U=, v=, f=".into(),
            ));
        };
        UvfSpec::new(u, v, PairingFn::new(u, &pairs)?)
    }
}

impl std::fmt::Display for UvfSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "U={}; v={}; f=", self.u, self.v)?;
        let pairs = self.f.pairs();
        if pairs.is_empty() {
            return write!(f, "-");
        }
        let mut first = true;
        for (a, b) in pairs {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{a}-{b}")?;
            first = false;
        }
        Ok(())
    }
}

// ============================================================================
// ij-compression
// ============================================================================

fn check_ij(ground: GroundSet, i: u32, j: u32) -> Result<()> {
    if i == 0 || j == 0 || i > ground.n() || j > ground.n() {
        return Err(Error::InvalidArgument(format!(
            "elements must lie in 1..={}, got i={i}, j={j}",
            ground.n()
        )));
    }
    if i >= j {
        return Err(Error::InvalidArgument(format!("need i < j, got i={i}, j={j}")));
    }
    Ok(())
}

/// Set-level replacement of j by i, without the i < j restriction. The
/// injection machinery uses the general form; the public operators validate
/// i < j first.
#[inline]
pub(crate) fn replace_in_set(a: ElemSet, i: u32, j: u32) -> ElemSet {
    if a.contains(j) && !a.contains(i) {
        a.without(j).with(i)
    } else {
        a
    }
}

pub(crate) fn replace_in_family(family: &Family, i: u32, j: u32) -> Family {
    let moved = family.members().iter().map(|&a| {
        let c = replace_in_set(a, i, j);
        if c != a && !family.contains(&c) {
            c
        } else {
            a
        }
    });
    let out = Family::from_sets(family.ground(), moved);
    debug_assert_eq!(out.len(), family.len());
    out
}

/// `(A ∪ {i}) − {j}` if j ∈ A and i ∉ A, else A. Requires i < j.
pub fn compress_set_ij(a: ElemSet, i: u32, j: u32) -> Result<ElemSet> {
    check_ij(a.ground(), i, j)?;
    Ok(replace_in_set(a, i, j))
}

/// Apply C_ij to every member, keeping a member in place when its image is
/// already in the family. Preserves family order.
pub fn compress_family_ij(family: &Family, i: u32, j: u32) -> Result<Family> {
    check_ij(family.ground(), i, j)?;
    Ok(replace_in_family(family, i, j))
}

pub fn is_ij_compressed(family: &Family, i: u32, j: u32) -> Result<bool> {
    Ok(&compress_family_ij(family, i, j)? == family)
}

/// True iff F is ij-compressed for every pair i < j.
pub fn is_left_compressed(family: &Family) -> bool {
    let n = family.n();
    for i in 1..n {
        for j in i + 1..=n {
            if !is_ij_compressed(family, i, j).expect("i<j by construction") {
                return false;
            }
        }
    }
    true
}

/// Σ_A Σ_{a∈A} a — strictly decreases at every recorded left-compression
/// step, which is why [`left_compress`] terminates.
pub fn element_weight_sum(family: &Family) -> u64 {
    family
        .members()
        .iter()
        .map(|s| s.elements().map(|e| e as u64).sum::<u64>())
        .sum()
}

/// Σ_A |A| — strictly increases at every recorded layerize step.
pub fn order_sum(family: &Family) -> u64 {
    family.members().iter().map(|s| s.order() as u64).sum()
}

/// Apply ij-compressions, scanning pairs (i,j) with i < j in lexicographic
/// order and restarting after every change, until the family is
/// left-compressed. Returns the result and the (i,j) trace of the non-trivial
/// steps.
pub fn left_compress(family: &Family) -> (Family, Vec<(u32, u32)>) {
    let n = family.n();
    let mut current = family.clone();
    let mut trace = Vec::new();
    'restart: loop {
        for i in 1..n {
            for j in i + 1..=n {
                let next = compress_family_ij(&current, i, j).expect("i<j by construction");
                if next != current {
                    debug_assert!(element_weight_sum(&next) < element_weight_sum(&current));
                    trace.push((i, j));
                    current = next;
                    continue 'restart;
                }
            }
        }
        return (current, trace);
    }
}

// ============================================================================
// UV-compression
// ============================================================================

fn check_uv(u: &ElemSet, v: &ElemSet) -> Result<()> {
    if !u.is_disjoint(v) {
        return Err(Error::InvalidArgument(format!("U={u} and V={v} overlap")));
    }
    Ok(())
}

/// `(A ∪ U) − V` if V ⊆ A and U ∩ A = ∅, else A.
pub fn compress_set_uv(a: ElemSet, u: ElemSet, v: ElemSet) -> Result<ElemSet> {
    check_uv(&u, &v)?;
    Ok(if v.is_subset_of(&a) && u.is_disjoint(&a) {
        a.union(&u).difference(&v)
    } else {
        a
    })
}

/// Family-level UV-compression with the same blocking semantics as the ij
/// case.
pub fn compress_family_uv(family: &Family, u: ElemSet, v: ElemSet) -> Result<Family> {
    check_uv(&u, &v)?;
    let moved = family.members().iter().map(|&a| {
        let c = if v.is_subset_of(&a) && u.is_disjoint(&a) {
            a.union(&u).difference(&v)
        } else {
            a
        };
        if c != a && !family.contains(&c) {
            c
        } else {
            a
        }
    });
    let out = Family::from_sets(family.ground(), moved);
    debug_assert_eq!(out.len(), family.len());
    Ok(out)
}

pub fn is_uv_compressed(family: &Family, u: ElemSet, v: ElemSet) -> Result<bool> {
    Ok(&compress_family_uv(family, u, v)? == family)
}

/// True iff F is U′V′-compressed for every U′ ⊆ U, V′ ⊆ V with |U′| > |V′|
/// and (U′, V′) ≠ (U, V).
pub fn is_simpler_uv_compressed(family: &Family, u: ElemSet, v: ElemSet) -> Result<bool> {
    check_uv(&u, &v)?;
    let ground = family.ground();
    // enumerate subsets of a bitmask, ascending
    let subsets = |mask: u32| {
        let mut subs: Vec<u32> = Vec::new();
        let mut sub = 0u32;
        loop {
            subs.push(sub);
            if sub == mask {
                break;
            }
            sub = (sub.wrapping_sub(mask)) & mask;
        }
        subs
    };
    for &ub in &subsets(u.bits()) {
        for &vb in &subsets(v.bits()) {
            if ub == u.bits() && vb == v.bits() {
                continue;
            }
            let u_sub = ElemSet::from_bits(ground, ub)?;
            let v_sub = ElemSet::from_bits(ground, vb)?;
            if u_sub.order() <= v_sub.order() {
                continue;
            }
            if !is_uv_compressed(family, u_sub, v_sub)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ============================================================================
// (U,v,f)-compression
// ============================================================================

/// A if v ∈ A; else `f(A∩U) ∪ {v} ∪ (A−U)`. Since f is a bijection on U,
/// the image has order |A| + 1 exactly when v ∉ A.
pub fn compress_set_uvf(a: ElemSet, spec: &UvfSpec) -> ElemSet {
    debug_assert_eq!(a.n(), spec.u.n());
    if a.contains(spec.v) {
        return a;
    }
    let inside = a.intersection(&spec.u);
    spec.f.map_set(inside).with(spec.v).union(&a.difference(&spec.u))
}

/// Family-level (U,v,f)-compression with blocking semantics. If the input is
/// intersecting, so is the result — unconditionally, unlike UV-compression.
pub fn compress_family_uvf(family: &Family, spec: &UvfSpec) -> Family {
    let moved = family.members().iter().map(|&a| {
        let c = compress_set_uvf(a, spec);
        if c != a && !family.contains(&c) {
            c
        } else {
            a
        }
    });
    let out = Family::from_sets(family.ground(), moved);
    debug_assert_eq!(out.len(), family.len());
    out
}

pub fn is_uvf_compressed(family: &Family, spec: &UvfSpec) -> bool {
    &compress_family_uvf(family, spec) == family
}

/// The UV-compression sequence whose composition realizes `C_{U,v,f}` on any
/// family that is already U′V′-compressed for all the strictly simpler pairs:
/// V_1…V_k are the subsets of U of order |U|/2 (ascending by bitmask) and
/// U_i = (U − V_i) ∪ {v}.
pub fn uvf_as_uv_composition(spec: &UvfSpec) -> Vec<(ElemSet, ElemSet)> {
    let ground = spec.u.ground();
    let half = spec.u.order() / 2;
    let mut out = Vec::new();
    let mask = spec.u.bits();
    let mut sub = 0u32;
    loop {
        if sub.count_ones() == half {
            let v_i = ElemSet::from_bits(ground, sub).expect("subset of U");
            let u_i = spec.u.difference(&v_i).with(spec.v);
            out.push((u_i, v_i));
        }
        if sub == mask {
            break;
        }
        sub = (sub.wrapping_sub(mask)) & mask;
    }
    out
}

// ============================================================================
// layerize
// ============================================================================

/// If `[n]^(≥r+1) ⊆ F ⊆ [n]^(≥r)` for some r, return the tight such r. The
/// upper containment forces r ≤ min member order, and whenever any r works,
/// r = min member order does (n for the empty family), so only that one needs
/// checking.
pub fn sandwich_layer(family: &Family) -> Option<u32> {
    let n = family.n();
    let binom = |k: u32| -> u64 {
        let mut acc = 1u64;
        for i in 0..k {
            acc = acc * (n - i) as u64 / (i + 1) as u64;
        }
        acc
    };
    let r = family.members().iter().map(|s| s.order()).min().unwrap_or(n);
    let above = family.members().iter().filter(|s| s.order() > r).count() as u64;
    let expect: u64 = (r + 1..=n).map(binom).sum();
    (above == expect).then_some(r)
}

/// Lexicographically least (by |V|, then V bits, then W bits) pair of
/// disjoint sets with |W| = |V| + 1 such that F is not WV-compressed.
fn layerize_witness(family: &Family) -> Option<(ElemSet, ElemSet)> {
    let ground = family.ground();
    let n = family.n();
    let full = ground.full_mask();
    for v_size in 0..=(n - 1) / 2 {
        for v_bits in 0..=full {
            if v_bits.count_ones() != v_size {
                continue;
            }
            for w_bits in 0..=full {
                if w_bits.count_ones() != v_size + 1 || w_bits & v_bits != 0 {
                    continue;
                }
                let v = ElemSet::from_bits(ground, v_bits).expect("in range");
                let w = ElemSet::from_bits(ground, w_bits).expect("in range");
                if !is_uv_compressed(family, w, v).expect("disjoint") {
                    return Some((w, v));
                }
            }
        }
    }
    None
}

/// Apply (U,v,f)-compressions until the family is sandwiched between two
/// consecutive layers. Each step takes the least witness (W, V) with
/// |W| = |V| + 1 and F not WV-compressed, and compresses with v = min W,
/// U = (W − {v}) ∪ V, f matching W − {v} against V elementwise.
pub fn layerize(family: &Family) -> (Family, Vec<UvfSpec>) {
    let mut current = family.clone();
    let mut trace = Vec::new();
    let max_steps = (family.n() as u64 + 1) * (1u64 << family.n());
    loop {
        if sandwich_layer(&current).is_some() {
            return (current, trace);
        }
        let (w, v) = layerize_witness(&current)
            .expect("a family that is not sandwiched has a witness");
        let pivot = w.elements().next().expect("|W| = |V| + 1 ≥ 1");
        let w_rest = w.without(pivot);
        let f = PairingFn::matching(w_rest, v).expect("equal orders, disjoint");
        let spec = UvfSpec::new(w_rest.union(&v), pivot, f).expect("pivot outside U");
        let next = compress_family_uvf(&current, &spec);
        debug_assert!(order_sum(&next) > order_sum(&current));
        trace.push(spec);
        current = next;
        assert!(trace.len() as u64 <= max_steps, "layerize failed to make progress");
    }
}
