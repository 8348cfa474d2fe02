//! Constructive injections from the intersecting subfamilies of F into the
//! intersecting subfamilies of a compression of F.
//!
//! Both the ij case and the (U,v,f) case decompose F into *slots*: positions
//! where the compression might replace one set ("two", the j-side or WX-side)
//! by another ("one", the i-side or vf(W)X-side). A slot is in A1 if only the
//! one-set belongs to F, A2 if only the two-set does, A12 if both do; members
//! the ij operator cannot touch (i, j both present or both absent) stand
//! alone in A0.
//!
//! A subfamily B ⊆ F has a *signature*: which A1/A2/A0 positions it occupies
//! and, per A12 slot, whether it holds neither, exactly one, or both sides.
//! Subfamilies sharing a signature form a class, and all members of a class
//! have the same order. The forced set 𝒴 collects the exactly-one slots
//! where every intersecting member of the class holds the two-side; the map
//!
//!   φ(B) = (B ∪ {one : slot ∈ X2 ∪ 𝒴}) − {two : slot ∈ X2 ∪ 𝒴}
//!
//! is injective on each class, preserves order and the intersecting
//! property, and lands inside the compressed family — which is why the
//! compressed family has at least as many intersecting subfamilies of every
//! order. [`verify_injection_ij`] / [`verify_injection_uvf`] check all of
//! that exhaustively.

use std::collections::{HashMap, HashSet};

use crate::compress::{compress_family_uvf, replace_in_family, UvfSpec};
use crate::count::{profile, Profile};
use crate::family::{is_intersecting, ElemSet, Family};
use crate::{Count, Error, Result};

/// verify_injection materializes all 2^|F| subfamilies.
pub const MAX_INJECTION_MEMBERS: usize = 20;

// ============================================================================
// slot decomposition (shared by both cases)
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlotKind {
    OneOnly,    // A1
    TwoOnly,    // A2
    Both,       // A12
    Standalone, // A0 (ij case only)
}

#[derive(Debug, Clone, Copy)]
enum Side {
    One,
    Two,
    Lone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum SlotLabel {
    X(ElemSet),
    // an A0 member is its own slot; a plain X label would collide with the
    // slot of X ∪ {i} when the member avoids both i and j
    Lone(ElemSet),
    Wx(ElemSet, ElemSet),
}

#[derive(Debug, Clone)]
struct Slot {
    label: SlotLabel,
    one_set: ElemSet,
    two_set: ElemSet,
    kind: SlotKind,
    one_member: Option<usize>,
    two_member: Option<usize>,
}

/// F cut into slots, plus the compressed family the images live in.
#[derive(Debug, Clone)]
struct SlotCore {
    family: Family,
    compressed: Family,
    slots: Vec<Slot>,
    // per family member: (slot index, side)
    member_slot: Vec<(usize, Side)>,
}

impl SlotCore {
    fn build_ij(family: &Family, i: u32, j: u32) -> Result<SlotCore> {
        let n = family.n();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::InvalidArgument(format!(
                "elements must lie in 1..={n}, got i={i}, j={j}"
            )));
        }
        if i == j {
            return Err(Error::InvalidArgument(format!("need i ≠ j, got i=j={i}")));
        }
        let decompose = |m: ElemSet| -> (SlotLabel, ElemSet, ElemSet, Side) {
            if m.contains(i) && !m.contains(j) {
                let x = m.without(i);
                (SlotLabel::X(x), m, x.with(j), Side::One)
            } else if m.contains(j) && !m.contains(i) {
                let x = m.without(j);
                (SlotLabel::X(x), x.with(i), m, Side::Two)
            } else {
                (SlotLabel::Lone(m), m, m, Side::Lone)
            }
        };
        let compressed = replace_in_family(family, i, j);
        Ok(SlotCore::assemble(family, compressed, decompose))
    }

    fn build_uvf(family: &Family, spec: &UvfSpec) -> Result<SlotCore> {
        if spec.u().n() != family.n() {
            return Err(Error::InvalidArgument(format!(
                "spec over [{}] does not fit a family over [{}]",
                spec.u().n(),
                family.n()
            )));
        }
        let u = spec.u();
        let v = spec.v();
        let f = spec.f().clone();
        let decompose = move |m: ElemSet| -> (SlotLabel, ElemSet, ElemSet, Side) {
            if m.contains(v) {
                let w = f.map_set(m.intersection(&u));
                let x = m.difference(&u).without(v);
                (SlotLabel::Wx(w, x), m, w.union(&x), Side::One)
            } else {
                let w = m.intersection(&u);
                let x = m.difference(&u);
                let one = f.map_set(w).union(&x).with(v);
                (SlotLabel::Wx(w, x), one, m, Side::Two)
            }
        };
        let compressed = compress_family_uvf(family, spec);
        Ok(SlotCore::assemble(family, compressed, decompose))
    }

    fn assemble(
        family: &Family,
        compressed: Family,
        decompose: impl Fn(ElemSet) -> (SlotLabel, ElemSet, ElemSet, Side),
    ) -> SlotCore {
        let mut slots: Vec<Slot> = Vec::new();
        let mut index: HashMap<SlotLabel, usize> = HashMap::new();
        let mut member_slot = Vec::with_capacity(family.len());
        for (t, &m) in family.members().iter().enumerate() {
            let (label, one_set, two_set, side) = decompose(m);
            let s = *index.entry(label).or_insert_with(|| {
                slots.push(Slot {
                    label,
                    one_set,
                    two_set,
                    kind: SlotKind::Standalone,
                    one_member: None,
                    two_member: None,
                });
                slots.len() - 1
            });
            match side {
                Side::One => slots[s].one_member = Some(t),
                Side::Two => slots[s].two_member = Some(t),
                Side::Lone => slots[s].one_member = Some(t),
            }
            member_slot.push((s, side));
        }
        for slot in &mut slots {
            slot.kind = match (slot.one_member, slot.two_member) {
                (Some(_), Some(_)) => SlotKind::Both,
                (Some(_), None) => {
                    if slot.one_set == slot.two_set {
                        SlotKind::Standalone
                    } else {
                        SlotKind::OneOnly
                    }
                }
                (None, Some(_)) => SlotKind::TwoOnly,
                (None, None) => unreachable!("slot created without a member"),
            };
        }
        SlotCore {
            family: family.clone(),
            compressed,
            slots,
            member_slot,
        }
    }

    fn labels_of(&self, kind: SlotKind) -> Vec<SlotLabel> {
        let mut out: Vec<SlotLabel> = self
            .slots
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.label)
            .collect();
        out.sort();
        out
    }

    /// 2-bit signature code per slot, packed little-endian by slot index.
    /// A12 slots: 0 = neither side in B, 1 = exactly one, 2 = both.
    /// Other slots: 0 = absent from B, 1 = present.
    fn signature_key(&self, b_mask: u32) -> u64 {
        let mut key = 0u64;
        for (s, slot) in self.slots.iter().enumerate() {
            let one_in = slot.one_member.is_some_and(|t| b_mask >> t & 1 == 1);
            let two_in = slot.two_member.is_some_and(|t| b_mask >> t & 1 == 1);
            let code = one_in as u64 + two_in as u64;
            key |= code << (2 * s);
        }
        key
    }

    /// Member indices fixed by a signature, and the free (exactly-one) A12
    /// slot indices.
    fn class_shape(&self, key: u64) -> (Vec<usize>, Vec<usize>) {
        let mut fixed = Vec::new();
        let mut free = Vec::new();
        for (s, slot) in self.slots.iter().enumerate() {
            let code = (key >> (2 * s)) & 3;
            match slot.kind {
                SlotKind::Both => match code {
                    0 => {}
                    1 => free.push(s),
                    _ => {
                        fixed.push(slot.one_member.unwrap());
                        fixed.push(slot.two_member.unwrap());
                    }
                },
                _ => {
                    if code == 1 {
                        fixed.push(slot.one_member.or(slot.two_member).unwrap());
                    }
                }
            }
        }
        (fixed, free)
    }

    /// Is there an intersecting family consisting of `chosen` plus one side
    /// from every slot in `free[at..]`, where slot `force` (if hit) may only
    /// use its one-side?
    fn completion_exists(
        &self,
        chosen: &mut Vec<ElemSet>,
        free: &[usize],
        at: usize,
        force: Option<usize>,
    ) -> bool {
        if at == free.len() {
            return true;
        }
        let s = free[at];
        let slot = &self.slots[s];
        let pair = [slot.one_set, slot.two_set];
        let candidates = if force == Some(s) { &pair[..1] } else { &pair[..] };
        for &c in candidates {
            if !c.is_empty() && chosen.iter().all(|t| t.intersects(&c)) {
                chosen.push(c);
                if self.completion_exists(chosen, free, at + 1, force) {
                    chosen.pop();
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    /// The forced slot indices 𝒴 for a signature class: free slots where no
    /// intersecting completion uses the one-side. Errors if the class is
    /// empty.
    fn forced_slots(&self, key: u64) -> Result<Vec<usize>> {
        let (fixed, free) = self.class_shape(key);
        let base: Vec<ElemSet> = fixed.iter().map(|&t| self.family.members()[t]).collect();
        let base_ok = base.iter().all(|s| !s.is_empty())
            && base
                .iter()
                .enumerate()
                .all(|(a, s)| base[..a].iter().all(|t| t.intersects(s)));
        let mut chosen = base;
        if !base_ok || !self.completion_exists(&mut chosen, &free, 0, None) {
            return Err(Error::InvalidArgument(
                "the signature class has no intersecting member".into(),
            ));
        }
        let mut forced = Vec::new();
        for &s in &free {
            if !self.completion_exists(&mut chosen, &free, 0, Some(s)) {
                forced.push(s);
            }
        }
        Ok(forced)
    }

    /// φ applied to the subfamily with member mask `b_mask`, with the forced
    /// slots already known. Returns the image as explicit sets.
    fn phi_sets(&self, b_mask: u32, forced: &[usize]) -> Vec<ElemSet> {
        let mut replace = vec![false; self.slots.len()];
        for (s, slot) in self.slots.iter().enumerate() {
            if slot.kind == SlotKind::TwoOnly {
                replace[s] = true;
            }
        }
        for &s in forced {
            replace[s] = true;
        }
        let mut out = Vec::new();
        for (t, &m) in self.family.members().iter().enumerate() {
            if b_mask >> t & 1 == 0 {
                continue;
            }
            let (s, side) = self.member_slot[t];
            let moved = matches!(side, Side::Two) && replace[s];
            out.push(if moved { self.slots[s].one_set } else { m });
        }
        out
    }
}

// ============================================================================
// ij case
// ============================================================================

/// F decomposed for the replace-j-by-i compression. Any i ≠ j is accepted;
/// the compression with i < j is the interesting direction.
#[derive(Debug, Clone)]
pub struct IjContext {
    i: u32,
    j: u32,
    core: SlotCore,
}

impl IjContext {
    pub fn new(family: &Family, i: u32, j: u32) -> Result<IjContext> {
        Ok(IjContext {
            i,
            j,
            core: SlotCore::build_ij(family, i, j)?,
        })
    }

    pub fn family(&self) -> &Family {
        &self.core.family
    }

    /// The compressed family the injection maps into.
    pub fn compressed(&self) -> &Family {
        &self.core.compressed
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    fn xs_of(&self, kind: SlotKind) -> Vec<ElemSet> {
        self.core
            .labels_of(kind)
            .into_iter()
            .map(|l| match l {
                SlotLabel::X(x) | SlotLabel::Lone(x) => x,
                SlotLabel::Wx(..) => unreachable!("ij slots carry X labels"),
            })
            .collect()
    }

    /// X with iX ∈ F, jX ∉ F.
    pub fn a1(&self) -> Vec<ElemSet> {
        self.xs_of(SlotKind::OneOnly)
    }

    /// X with iX ∉ F, jX ∈ F.
    pub fn a2(&self) -> Vec<ElemSet> {
        self.xs_of(SlotKind::TwoOnly)
    }

    /// X with both iX, jX ∈ F.
    pub fn a12(&self) -> Vec<ElemSet> {
        self.xs_of(SlotKind::Both)
    }

    /// Members containing both or neither of i, j.
    pub fn a0(&self) -> Vec<ElemSet> {
        self.xs_of(SlotKind::Standalone)
    }
}

/// Where a subfamily sits inside each partition class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IjSignature {
    pub x1: Vec<ElemSet>,
    pub x2: Vec<ElemSet>,
    pub x12_0: Vec<ElemSet>,
    pub x12_1: Vec<ElemSet>,
    pub x12_2: Vec<ElemSet>,
    pub x0: Vec<ElemSet>,
    key: u64,
}

fn subfamily_mask(b: &Family, family: &Family) -> Result<u32> {
    let mut mask = 0u32;
    for &m in b.members() {
        let Some(t) = family.position(&m) else {
            return Err(Error::InvalidArgument(format!(
                "{{{m}}} is not a member of the base family"
            )));
        };
        mask |= 1 << t;
    }
    Ok(mask)
}

fn check_subfamily(b: &Family, family: &Family) -> Result<u32> {
    if b.n() != family.n() {
        return Err(Error::InvalidArgument(
            "subfamily and family live over different ground sets".into(),
        ));
    }
    if !is_intersecting(b) {
        return Err(Error::InvalidArgument("the subfamily is not intersecting".into()));
    }
    subfamily_mask(b, family)
}

pub fn signature_of_ij(b: &Family, ctx: &IjContext) -> Result<IjSignature> {
    let mask = check_subfamily(b, ctx.family())?;
    let key = ctx.core.signature_key(mask);
    let mut sig = IjSignature {
        x1: vec![],
        x2: vec![],
        x12_0: vec![],
        x12_1: vec![],
        x12_2: vec![],
        x0: vec![],
        key,
    };
    for (s, slot) in ctx.core.slots.iter().enumerate() {
        let code = (key >> (2 * s)) & 3;
        let (SlotLabel::X(x) | SlotLabel::Lone(x)) = slot.label else { unreachable!() };
        match slot.kind {
            SlotKind::OneOnly if code == 1 => sig.x1.push(x),
            SlotKind::TwoOnly if code == 1 => sig.x2.push(x),
            SlotKind::Standalone if code == 1 => sig.x0.push(x),
            SlotKind::Both => match code {
                0 => sig.x12_0.push(x),
                1 => sig.x12_1.push(x),
                _ => sig.x12_2.push(x),
            },
            _ => {}
        }
    }
    for bucket in [
        &mut sig.x1,
        &mut sig.x2,
        &mut sig.x12_0,
        &mut sig.x12_1,
        &mut sig.x12_2,
        &mut sig.x0,
    ] {
        bucket.sort();
    }
    Ok(sig)
}

/// The forced X ∈ X12_1: those where every intersecting subfamily in the
/// class holds jX (so none holds iX).
pub fn forced_set_ij(ctx: &IjContext, sig: &IjSignature) -> Result<Vec<ElemSet>> {
    let forced = ctx.core.forced_slots(sig.key)?;
    let mut out: Vec<ElemSet> = forced
        .into_iter()
        .map(|s| match ctx.core.slots[s].label {
            SlotLabel::X(x) => x,
            _ => unreachable!("forced slots are two-sided"),
        })
        .collect();
    out.sort();
    Ok(out)
}

/// The injection: replace jX by iX at every X ∈ X2 ∪ 𝒴.
pub fn phi_ij(b: &Family, ctx: &IjContext) -> Result<Family> {
    let mask = check_subfamily(b, ctx.family())?;
    let forced = ctx.core.forced_slots(ctx.core.signature_key(mask))?;
    let sets = ctx.core.phi_sets(mask, &forced);
    Ok(Family::from_sets(b.ground(), sets))
}

// ============================================================================
// (U,v,f) case
// ============================================================================

/// F decomposed for a (U,v,f)-compression: one slot per (W, X) with W ⊆ U
/// and X ⊆ [n] − (U ∪ {v}), pairing WX against vf(W)X.
#[derive(Debug, Clone)]
pub struct UvfContext {
    spec: UvfSpec,
    core: SlotCore,
}

impl UvfContext {
    pub fn new(family: &Family, spec: &UvfSpec) -> Result<UvfContext> {
        Ok(UvfContext {
            spec: spec.clone(),
            core: SlotCore::build_uvf(family, spec)?,
        })
    }

    pub fn family(&self) -> &Family {
        &self.core.family
    }

    pub fn compressed(&self) -> &Family {
        &self.core.compressed
    }

    pub fn spec(&self) -> &UvfSpec {
        &self.spec
    }

    fn wxs_of(&self, kind: SlotKind) -> Vec<(ElemSet, ElemSet)> {
        self.core
            .labels_of(kind)
            .into_iter()
            .map(|l| match l {
                SlotLabel::Wx(w, x) => (w, x),
                _ => unreachable!("uvf slots carry (W, X) labels"),
            })
            .collect()
    }

    /// (W, X) with vf(W)X ∈ F, WX ∉ F.
    pub fn a1(&self) -> Vec<(ElemSet, ElemSet)> {
        self.wxs_of(SlotKind::OneOnly)
    }

    /// (W, X) with vf(W)X ∉ F, WX ∈ F.
    pub fn a2(&self) -> Vec<(ElemSet, ElemSet)> {
        self.wxs_of(SlotKind::TwoOnly)
    }

    /// (W, X) with both in F.
    pub fn a12(&self) -> Vec<(ElemSet, ElemSet)> {
        self.wxs_of(SlotKind::Both)
    }
}

/// Signature for the (U,v,f) case; entries are (W, X) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UvfSignature {
    pub x1: Vec<(ElemSet, ElemSet)>,
    pub x2: Vec<(ElemSet, ElemSet)>,
    pub x12_0: Vec<(ElemSet, ElemSet)>,
    pub x12_1: Vec<(ElemSet, ElemSet)>,
    pub x12_2: Vec<(ElemSet, ElemSet)>,
    key: u64,
}

pub fn signature_of_uvf(b: &Family, ctx: &UvfContext) -> Result<UvfSignature> {
    let mask = check_subfamily(b, ctx.family())?;
    let key = ctx.core.signature_key(mask);
    let mut sig = UvfSignature {
        x1: vec![],
        x2: vec![],
        x12_0: vec![],
        x12_1: vec![],
        x12_2: vec![],
        key,
    };
    for (s, slot) in ctx.core.slots.iter().enumerate() {
        let code = (key >> (2 * s)) & 3;
        let SlotLabel::Wx(w, x) = slot.label else { unreachable!() };
        match slot.kind {
            SlotKind::OneOnly if code == 1 => sig.x1.push((w, x)),
            SlotKind::TwoOnly if code == 1 => sig.x2.push((w, x)),
            SlotKind::Both => match code {
                0 => sig.x12_0.push((w, x)),
                1 => sig.x12_1.push((w, x)),
                _ => sig.x12_2.push((w, x)),
            },
            _ => {}
        }
    }
    for bucket in [
        &mut sig.x1,
        &mut sig.x2,
        &mut sig.x12_0,
        &mut sig.x12_1,
        &mut sig.x12_2,
    ] {
        bucket.sort();
    }
    Ok(sig)
}

/// The forced (W, X) ∈ X12_1: the backtracking ranges over all exactly-one
/// choices jointly across every W.
pub fn forced_sets_uvf(ctx: &UvfContext, sig: &UvfSignature) -> Result<Vec<(ElemSet, ElemSet)>> {
    let forced = ctx.core.forced_slots(sig.key)?;
    let mut out: Vec<(ElemSet, ElemSet)> = forced
        .into_iter()
        .map(|s| match ctx.core.slots[s].label {
            SlotLabel::Wx(w, x) => (w, x),
            _ => unreachable!("uvf slots carry (W, X) labels"),
        })
        .collect();
    out.sort();
    Ok(out)
}

/// The injection: replace WX by vf(W)X at every (W, X) ∈ X2^W ∪ 𝒴^W.
pub fn phi_uvf(b: &Family, ctx: &UvfContext) -> Result<Family> {
    let mask = check_subfamily(b, ctx.family())?;
    let forced = ctx.core.forced_slots(ctx.core.signature_key(mask))?;
    let sets = ctx.core.phi_sets(mask, &forced);
    Ok(Family::from_sets(b.ground(), sets))
}

// ============================================================================
// exhaustive verification
// ============================================================================

/// Outcome of checking φ over every intersecting subfamily of F.
#[derive(Debug, Clone)]
pub struct InjectionReport {
    pub family_order: usize,
    pub intersecting_subfamilies: u64,
    pub signature_classes: u64,
    pub injective: bool,
    pub size_preserving: bool,
    pub image_intersecting: bool,
    pub image_in_compressed: bool,
    /// N_k(compressed) ≥ N_k(F) for every k, with the left side computed by
    /// the counting module rather than this enumeration.
    pub profile_dominates: bool,
    /// First offending subfamily, if any check failed.
    pub counterexample: Option<(String, Family)>,
}

impl InjectionReport {
    pub fn passed(&self) -> bool {
        self.injective
            && self.size_preserving
            && self.image_intersecting
            && self.image_in_compressed
            && self.profile_dominates
    }
}

impl std::fmt::Display for InjectionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        writeln!(f, "family_order={}", self.family_order)?;
        writeln!(f, "intersecting_subfamilies={}", self.intersecting_subfamilies)?;
        writeln!(f, "signature_classes={}", self.signature_classes)?;
        writeln!(f, "injective={}", flag(self.injective))?;
        writeln!(f, "size_preserving={}", flag(self.size_preserving))?;
        writeln!(f, "image_intersecting={}", flag(self.image_intersecting))?;
        writeln!(f, "image_in_compressed={}", flag(self.image_in_compressed))?;
        write!(f, "profile_dominates={}", flag(self.profile_dominates))
    }
}

pub fn verify_injection_ij(family: &Family, i: u32, j: u32) -> Result<InjectionReport> {
    let core = SlotCore::build_ij(family, i, j)?;
    verify_core(&core)
}

pub fn verify_injection_uvf(family: &Family, spec: &UvfSpec) -> Result<InjectionReport> {
    let core = SlotCore::build_uvf(family, spec)?;
    verify_core(&core)
}

fn verify_core(core: &SlotCore) -> Result<InjectionReport> {
    let family = &core.family;
    let m = family.len();
    if m > MAX_INJECTION_MEMBERS {
        return Err(Error::BudgetExceeded(format!(
            "verify_injection enumerates 2^|F| subfamilies; |F| = {m} exceeds {MAX_INJECTION_MEMBERS}"
        )));
    }

    // conflicts[t]: members disjoint from member t, with t itself included
    // when the member is ∅ (a family containing ∅ is never intersecting)
    let members = family.members();
    let mut conflicts = vec![0u32; m];
    for (a, &sa) in members.iter().enumerate() {
        if sa.is_empty() {
            conflicts[a] |= 1 << a;
        }
        for (b, &sb) in members.iter().enumerate() {
            if a != b && !sa.intersects(&sb) {
                conflicts[a] |= 1 << b;
            }
        }
    }

    // the compressed family's conflict masks, for fast intersecting checks
    let cf = &core.compressed;
    let cm = cf.len();
    let mut cf_conflicts = vec![0u32; cm];
    for (a, &sa) in cf.members().iter().enumerate() {
        if sa.is_empty() {
            cf_conflicts[a] |= 1 << a;
        }
        for (b, &sb) in cf.members().iter().enumerate() {
            if a != b && !sa.intersects(&sb) {
                cf_conflicts[a] |= 1 << b;
            }
        }
    }

    // member translation tables into the compressed family
    let kept_to_cf: Vec<Option<usize>> = members.iter().map(|s| cf.position(s)).collect();
    let one_to_cf: Vec<Option<usize>> = core.slots.iter().map(|s| cf.position(&s.one_set)).collect();

    let mut report = InjectionReport {
        family_order: m,
        intersecting_subfamilies: 0,
        signature_classes: 0,
        injective: true,
        size_preserving: true,
        image_intersecting: true,
        image_in_compressed: true,
        profile_dominates: true,
        counterexample: None,
    };

    // class cache: signature key → (forced slots, member order of the class)
    let mut classes: HashMap<u64, (Vec<usize>, u32)> = HashMap::new();
    let mut images: HashSet<u32> = HashSet::new();
    let mut counts_before = vec![0u64; m + 1];
    let mut replaced = vec![false; core.slots.len()];

    let mut ok = vec![false; 1usize << m];
    ok[0] = true;
    report.intersecting_subfamilies = 1;
    counts_before[0] = 1;
    images.insert(0);

    for b_mask in 1..(1u32 << m) {
        let low = b_mask.trailing_zeros() as usize;
        let rest = b_mask & (b_mask - 1);
        let good = ok[rest as usize] && conflicts[low] & b_mask == 0;
        ok[b_mask as usize] = good;
        if !good {
            continue;
        }
        report.intersecting_subfamilies += 1;
        let size = b_mask.count_ones();
        counts_before[size as usize] += 1;

        let key = core.signature_key(b_mask);
        let (forced, class_size) = {
            let e = classes.entry(key).or_insert_with(|| {
                let forced = core
                    .forced_slots(key)
                    .expect("class inhabited by the subfamily at hand");
                (forced, size)
            });
            (e.0.clone(), e.1)
        };
        // every subfamily in a class has the same order
        debug_assert_eq!(class_size, size);

        // build the image as a mask over the compressed family
        for (s, slot) in core.slots.iter().enumerate() {
            replaced[s] = slot.kind == SlotKind::TwoOnly;
        }
        for &s in &forced {
            replaced[s] = true;
        }
        let mut image_mask = 0u32;
        let mut in_cf = true;
        for t in 0..m {
            if b_mask >> t & 1 == 0 {
                continue;
            }
            let (s, side) = core.member_slot[t];
            let target = if matches!(side, Side::Two) && replaced[s] {
                one_to_cf[s]
            } else {
                kept_to_cf[t]
            };
            match target {
                Some(c) => image_mask |= 1 << c,
                None => {
                    in_cf = false;
                    break;
                }
            }
        }
        if !in_cf {
            report.image_in_compressed = false;
            fail_into(&mut report, family, b_mask, "image leaves the compressed family");
            continue;
        }
        if image_mask.count_ones() != size {
            report.size_preserving = false;
            fail_into(&mut report, family, b_mask, "size not preserved");
            continue;
        }
        let mut inter = true;
        let mut probe = image_mask;
        while probe != 0 {
            let t = probe.trailing_zeros() as usize;
            probe &= probe - 1;
            if cf_conflicts[t] & image_mask != 0 {
                inter = false;
                break;
            }
        }
        if !inter {
            report.image_intersecting = false;
            fail_into(&mut report, family, b_mask, "image not intersecting");
            continue;
        }
        if !images.insert(image_mask) {
            report.injective = false;
            fail_into(&mut report, family, b_mask, "image collides with an earlier one");
        }
    }

    report.signature_classes = classes.len() as u64 + 1; // + the empty class

    // independent count of the compressed side
    let cf_profile: Profile = profile(cf)?;
    for (k, &before) in counts_before.iter().enumerate() {
        if Count::from(before) > cf_profile.counts()[k] {
            report.profile_dominates = false;
            break;
        }
    }
    Ok(report)
}

fn fail_into(report: &mut InjectionReport, family: &Family, mask: u32, label: &str) {
    if report.counterexample.is_some() {
        return;
    }
    let b = Family::from_sets(
        family.ground(),
        family
            .members()
            .iter()
            .enumerate()
            .filter(|(t, _)| mask >> t & 1 == 1)
            .map(|(_, &s)| s),
    );
    report.counterexample = Some((label.to_string(), b));
}
