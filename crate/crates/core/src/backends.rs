//! Large scale resemblance backends and the constructions between structures.
//!
//! Explicit backends (a family table, a partition coming from a finite coarse
//! structure, or an asymptotic resemblance) answer every query exactly. The
//! line backends live on ℕ: `MetricLine` is the structure induced by the
//! standard metric (families with pairwise bounded Hausdorff distance) and
//! `TopoTrace` the trace of the one-point compactification (all members finite
//! or all infinite).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::famtable::{self, FamCode, FamilySet};
use crate::lineset::{hausdorff_distance, LineSet};
use crate::setcore::{Family, Subset, Universe};
use crate::structures::{
    self, check_coarse, AxiomReport, ClosureOp, ExplicitASR, ExplicitCoarse, ExplicitLSR, ExplicitNearness,
    ExplicitProximity, Relation,
};
use crate::verdict::{Budget, ExtendedDistance, ScaleWitness, TriVerdict, Witness};

pub const DEFAULT_BUDGET: Budget = Budget { window: 1_000_000, scale: 64 };

/// A family of sets over one space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetFamily {
    Explicit(Family),
    Line(Vec<LineSet>),
}

/// A single set over one space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetItem {
    Explicit(Subset),
    Line(LineSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LsrBackend {
    Explicit(ExplicitLSR),
    /// Structure of a coarse structure on a finite set: the down-set of the
    /// equivalence `maximum`.
    Partition { universe: Universe, maximum: Relation },
    /// Families of pairwise alike sets.
    FromAsr(ExplicitASR),
    MetricLine { budget: Budget },
    TopoTrace,
    /// A line backend restricted to the subsets of `to`.
    Restricted { base: Box<LsrBackend>, to: LineSet },
}

impl LsrBackend {
    pub fn metric_line() -> Self {
        LsrBackend::MetricLine { budget: DEFAULT_BUDGET }
    }

    /// Partition backend from the generators of a coarse structure.
    pub fn from_coarse(universe: Universe, generators: Vec<(usize, usize)>) -> Result<Self> {
        let report = check_coarse(&ExplicitCoarse { universe: universe.clone(), generators })?;
        Ok(LsrBackend::Partition { universe, maximum: report.maximum })
    }

    /// Partition backend with the given point classes (masks).
    pub fn partition(universe: Universe, classes: &[u32]) -> Result<Self> {
        let maximum = Relation::from_partition(universe.size(), classes)?;
        if !maximum.is_equivalence() {
            return Err(Error::Precondition("classes do not partition the universe".into()));
        }
        Ok(LsrBackend::Partition { universe, maximum })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LsrBackend::Explicit(_) => "explicit",
            LsrBackend::Partition { .. } => "partition",
            LsrBackend::FromAsr(_) => "from-asr",
            LsrBackend::MetricLine { .. } => "metric-line",
            LsrBackend::TopoTrace => "topo-trace",
            LsrBackend::Restricted { .. } => "restricted",
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, LsrBackend::Explicit(_) | LsrBackend::Partition { .. } | LsrBackend::FromAsr(_))
    }

    pub fn universe(&self) -> Option<&Universe> {
        match self {
            LsrBackend::Explicit(c) => Some(c.universe()),
            LsrBackend::Partition { universe, .. } => Some(universe),
            LsrBackend::FromAsr(l) => Some(l.universe()),
            _ => None,
        }
    }

    fn budget(&self) -> Budget {
        match self {
            LsrBackend::MetricLine { budget } => *budget,
            LsrBackend::Restricted { base, .. } => base.budget(),
            _ => DEFAULT_BUDGET,
        }
    }

    /// The table of an explicit backend.
    pub fn to_explicit(&self) -> Result<ExplicitLSR> {
        match self {
            LsrBackend::Explicit(c) => Ok(c.clone()),
            LsrBackend::Partition { universe, maximum } => c_e(universe, maximum),
            LsrBackend::FromAsr(l) => c_lambda(l),
            _ => Err(Error::Unsupported(format!("{} backend has no finite table", self.name()))),
        }
    }

    /// Is the family a member?
    pub fn member(&self, fam: &SetFamily) -> Result<TriVerdict> {
        match (self, fam) {
            (LsrBackend::Explicit(c), SetFamily::Explicit(f)) => {
                check_width(c.universe(), f)?;
                Ok(TriVerdict::from_bool(c.contains(f), format!("table lookup of {}", c.universe().fmt_family(f))))
            }
            (LsrBackend::Partition { universe, maximum }, SetFamily::Explicit(f)) => {
                check_width(universe, f)?;
                Ok(match partition_violation(maximum, famtable::code_of(f)) {
                    None => TriVerdict::yes(Witness::Explicit {
                        detail: "every member lies inside the class-neighbourhood of every other".into(),
                    }),
                    Some((a, b)) => TriVerdict::no(Witness::Explicit {
                        detail: format!(
                            "{} is not inside M({})",
                            universe.fmt_subset(Subset(a)),
                            universe.fmt_subset(Subset(b))
                        ),
                    }),
                })
            }
            (LsrBackend::FromAsr(l), SetFamily::Explicit(f)) => {
                check_width(l.universe(), f)?;
                let ms = f.members();
                for (i, a) in ms.iter().enumerate() {
                    for b in &ms[i + 1..] {
                        if !l.alike(a.mask(), b.mask()) {
                            return Ok(TriVerdict::no(Witness::Explicit {
                                detail: format!(
                                    "{} and {} are not alike",
                                    l.universe().fmt_subset(*a),
                                    l.universe().fmt_subset(*b)
                                ),
                            }));
                        }
                    }
                }
                Ok(TriVerdict::yes(Witness::Explicit { detail: "all members pairwise alike".into() }))
            }
            (LsrBackend::MetricLine { budget }, SetFamily::Line(sets)) => Ok(metric_member(sets, *budget)),
            (LsrBackend::TopoTrace, SetFamily::Line(sets)) => Ok(topo_member(sets)),
            (LsrBackend::Restricted { base, to }, SetFamily::Line(sets)) => {
                for (i, s) in sets.iter().enumerate() {
                    if !line_subset(s, to, base.budget().window)? {
                        return Err(Error::Precondition(format!("member {i} is not inside the subspace")));
                    }
                }
                base.member(fam)
            }
            (b, _) => Err(Error::MixedRepresentations(if b.is_explicit() {
                "explicit backend queried with line sets"
            } else {
                "line backend queried with explicit subsets"
            })),
        }
    }

    /// Is `s` bounded, i.e. `{s, {x}}` a member for some point `x`?
    pub fn bounded(&self, s: &SetItem) -> Result<TriVerdict> {
        match (self, s) {
            (LsrBackend::MetricLine { .. }, SetItem::Line(l))
            | (LsrBackend::TopoTrace, SetItem::Line(l)) => Ok(if l.is_finite() {
                let diam = match (l.next_from(0), l.max_element()) {
                    (Some(lo), Some(hi)) => hi - lo,
                    _ => 0,
                };
                TriVerdict::yes(Witness::Scale { k: diam })
            } else {
                TriVerdict::no(Witness::Explicit { detail: "infinite set".into() })
            }),
            (LsrBackend::Restricted { base, .. }, _) => base.bounded(s),
            (b, SetItem::Explicit(sub)) if b.is_explicit() => {
                let c = self.to_explicit()?;
                if !sub.fits(c.width()) {
                    return Err(Error::UniverseMismatch { left: c.width(), right: 32 - sub.mask().leading_zeros() as usize });
                }
                Ok(match c.bounded_witness(*sub) {
                    Some(Some(x)) => TriVerdict::yes(Witness::Explicit {
                        detail: format!("{{{}, {{{}}}}} is a member", c.universe().fmt_subset(*sub), c.universe().labels()[x]),
                    }),
                    Some(None) => TriVerdict::yes(Witness::Explicit { detail: "empty set".into() }),
                    None => TriVerdict::no(Witness::Explicit {
                        detail: format!("no point x makes {{{}, {{x}}}} a member", c.universe().fmt_subset(*sub)),
                    }),
                })
            }
            _ => Err(Error::MixedRepresentations("set does not live on the backend's space")),
        }
    }

    pub fn is_connected(&self) -> Result<TriVerdict> {
        match self {
            LsrBackend::MetricLine { .. } | LsrBackend::TopoTrace | LsrBackend::Restricted { .. } => {
                Ok(TriVerdict::yes(Witness::Explicit { detail: "any two points are at finite distance".into() }))
            }
            _ => {
                let c = self.to_explicit()?;
                Ok(match c.connected() {
                    Ok(()) => TriVerdict::yes(Witness::Explicit { detail: "all point pairs are members".into() }),
                    Err((x, y)) => TriVerdict::no(Witness::Explicit {
                        detail: format!(
                            "{{{{{}}}, {{{}}}}} is not a member",
                            c.universe().labels()[x],
                            c.universe().labels()[y]
                        ),
                    }),
                })
            }
        }
    }
}

fn check_width(u: &Universe, f: &Family) -> Result<()> {
    if f.width() != u.size() {
        return Err(Error::UniverseMismatch { left: u.size(), right: f.width() });
    }
    Ok(())
}

fn line_subset(s: &LineSet, to: &LineSet, window: u64) -> Result<bool> {
    if s.is_exact_tier() && to.is_exact_tier() {
        return s.is_subset_of(to);
    }
    Ok(s.window(window).into_iter().all(|x| to.member(x)))
}

fn partition_violation(m: &Relation, code: FamCode) -> Option<(u32, u32)> {
    let ms: Vec<u32> = famtable::members_of(code).collect();
    for &a in &ms {
        for &b in &ms {
            if a & !m.image(b) != 0 {
                return Some((a, b));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// line backends

fn topo_member(sets: &[LineSet]) -> TriVerdict {
    let fin = sets.iter().position(|s| s.is_finite());
    let inf = sets.iter().position(|s| !s.is_finite());
    match (fin, inf) {
        (Some(i), Some(j)) => TriVerdict::no(Witness::Pair { i, j, distance: ExtendedDistance::Infinite }),
        _ => TriVerdict::yes(Witness::Explicit {
            detail: if fin.is_some() { "all members finite".into() } else { "all members infinite".into() },
        }),
    }
}

/// Directed distance profile: `(x, d(x, to))` for `x ∈ from ∩ [0, hi]`.
fn profile(from: &LineSet, to: &LineSet, hi: u64) -> Vec<(u64, u64)> {
    from.window(hi).into_iter().map(|x| (x, to.distance_to(x).unwrap_or(u64::MAX))).collect()
}

fn metric_member(sets: &[LineSet], budget: Budget) -> TriVerdict {
    if sets.len() <= 1 {
        return TriVerdict::yes(Witness::Scale { k: 0 });
    }
    let empties: Vec<bool> = sets.iter().map(|s| s.is_empty()).collect();
    if empties.iter().all(|e| *e) {
        return TriVerdict::yes(Witness::Scale { k: 0 });
    }
    if let Some(i) = empties.iter().position(|e| *e) {
        let j = empties.iter().position(|e| !*e).expect("some nonempty member");
        return TriVerdict::no(Witness::Pair { i, j, distance: ExtendedDistance::Infinite });
    }
    if let TriVerdict::No { witness } = topo_member(sets) {
        return TriVerdict::no(witness);
    }
    // finite members of any tier can be materialized
    let exact: Vec<LineSet> = sets
        .iter()
        .map(|s| match s {
            s if s.is_exact_tier() => s.clone(),
            s if s.is_finite() => LineSet::finite(s.window(s.max_element().unwrap_or(0))),
            s => s.clone(),
        })
        .collect();
    if exact.iter().all(LineSet::is_exact_tier) {
        let mut k = 0;
        for i in 0..exact.len() {
            for j in i + 1..exact.len() {
                match hausdorff_distance(&exact[i], &exact[j]) {
                    Ok(ExtendedDistance::Finite(d)) => k = k.max(d),
                    Ok(ExtendedDistance::Infinite) => {
                        return TriVerdict::no(Witness::Pair { i, j, distance: ExtendedDistance::Infinite })
                    }
                    Err(_) => return TriVerdict::unknown(budget.window, budget.scale),
                }
            }
        }
        return TriVerdict::yes(Witness::Scale { k });
    }
    if sets.windows(2).all(|w| w[0] == w[1]) {
        return TriVerdict::yes(Witness::Scale { k: 0 });
    }
    // scale-bounded refutation: at each k some ordered pair has a point
    // farther than k from the other member
    let hi = budget.window;
    let mut profiles = Vec::new();
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            if i != j && sets[i] != sets[j] {
                profiles.push((i, j, profile(&sets[i], &sets[j], hi)));
            }
        }
    }
    let mut scales = Vec::new();
    for k in 0..=budget.scale {
        let limit = hi.saturating_sub(k);
        let found = profiles.iter().find_map(|(i, j, p)| {
            p.iter().take_while(|(x, _)| *x <= limit).find(|(_, d)| *d > k).map(|&(x, d)| ScaleWitness {
                k,
                point: x,
                member: *i,
                other: *j,
                distance: dist(d),
            })
        });
        match found {
            Some(w) => scales.push(w),
            None => return TriVerdict::unknown(hi, budget.scale),
        }
    }
    TriVerdict::no(Witness::WindowRefuted { window: hi, scales })
}

fn dist(d: u64) -> ExtendedDistance {
    if d == u64::MAX {
        ExtendedDistance::Infinite
    } else {
        ExtendedDistance::Finite(d)
    }
}

// ---------------------------------------------------------------------------
// induced structures on explicit spaces

/// `𝒜 ∈ 𝔠_ℰ` iff `A ⊆ M(B)` for all members `A, B`, where `M` is the largest
/// controlled set of the finite coarse structure.
pub fn c_e(universe: &Universe, maximum: &Relation) -> Result<ExplicitLSR> {
    let m = *maximum;
    ExplicitLSR::from_predicate(universe.clone(), move |code| partition_violation(&m, code).is_none())
}

/// `𝒜 ∈ 𝔠̃_ℰ` iff every pair of members is `E`-close in both directions for
/// some controlled `E` (on finite sets, `E = M` always works).
pub fn c_tilde_e(universe: &Universe, maximum: &Relation) -> Result<ExplicitLSR> {
    let m = *maximum;
    ExplicitLSR::from_predicate(universe.clone(), move |code| {
        let ms: Vec<u32> = famtable::members_of(code).collect();
        ms.iter().all(|&a| ms.iter().all(|&b| a & !m.image(b) == 0 && b & !m.image(a) == 0))
    })
}

/// `𝒜 ∈ 𝔠_λ` iff all members are pairwise alike.
pub fn c_lambda(l: &ExplicitASR) -> Result<ExplicitLSR> {
    ExplicitLSR::from_predicate(l.universe().clone(), |code| {
        let ms: Vec<u32> = famtable::members_of(code).collect();
        ms.windows(2).all(|w| l.alike(w[0], w[1]))
    })
}

/// `⊗_𝒰 = ⋃ U × U`.
pub fn otimes(width: usize, cover: &[u32]) -> Result<Relation> {
    let mut r = Relation::empty(width)?;
    for &u in cover {
        for x in Subset(u).iter() {
            for y in Subset(u).iter() {
                r.insert(x, y);
            }
        }
    }
    Ok(r)
}

/// Uniform boundedness of a family of subsets in an asymptotic resemblance:
/// `A ⊆ ⊗(B)` and `B ⊆ ⊗(A)` force `A λ B`. Returns the offending pair.
pub fn asr_ub_violation(l: &ExplicitASR, cover: &[u32]) -> Result<Option<(u32, u32)>> {
    let r = otimes(l.width(), cover)?;
    let n = famtable::subset_count(l.width()) as u32;
    for a in 0..n {
        for b in 0..n {
            if a & !r.image(b) == 0 && b & !r.image(a) == 0 && !l.alike(a, b) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// `𝒜 ∈ 𝔠̃_λ` iff some uniformly bounded `𝒰` has `A ⊆ ⊗_𝒰(B)` for all members.
/// On a finite set the union of all uniformly bounded singletons `{U}` is the
/// largest uniformly bounded family, so that one family decides membership.
pub fn c_tilde_lambda(l: &ExplicitASR) -> Result<ExplicitLSR> {
    let n = famtable::subset_count(l.width()) as u32;
    let mut cover = Vec::new();
    for u in 1..n {
        if asr_ub_violation(l, &[u])?.is_none() {
            cover.push(u);
        }
    }
    if let Some((a, b)) = asr_ub_violation(l, &cover)? {
        return Err(Error::Precondition(format!(
            "union of uniformly bounded sets is not uniformly bounded ({a:#b}, {b:#b})"
        )));
    }
    let r = otimes(l.width(), &cover)?;
    ExplicitLSR::from_predicate(l.universe().clone(), |code| {
        let ms: Vec<u32> = famtable::members_of(code).collect();
        ms.iter().all(|&a| ms.iter().all(|&b| a & !r.image(b) == 0))
    })
}

/// `𝒩_E(L)`: all `L'` with `L ⊆ E(L')` and `L' ⊆ E(L)`.
pub fn n_e_of_l(e: &Relation, l: Subset) -> Family {
    let n = e.size();
    let members = (0..famtable::subset_count(n) as u32)
        .filter(|&lp| l.mask() & !e.image(lp) == 0 && lp & !e.image(l.mask()) == 0)
        .map(Subset)
        .collect::<Vec<_>>();
    Family::new(n, members).expect("masks fit")
}

/// The asymptotic resemblance `λ_𝔠` of an LS-regular structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InducedAsr {
    Explicit(ExplicitASR),
    /// `A λ B` iff `d_H(A, B) < ∞`.
    FiniteHausdorff,
    /// `A λ B` iff both finite or both infinite.
    FiniteOrInfinite,
}

pub fn lambda_of(b: &LsrBackend) -> Result<InducedAsr> {
    match b {
        LsrBackend::FromAsr(l) => Ok(InducedAsr::Explicit(l.clone())),
        LsrBackend::Partition { universe, maximum } => {
            let m = *maximum;
            Ok(InducedAsr::Explicit(ExplicitASR::from_relation(universe.clone(), |a, c| {
                a & !m.image(c) == 0 && c & !m.image(a) == 0
            })?))
        }
        LsrBackend::Explicit(c) => lambda_explicit(c).map(InducedAsr::Explicit),
        LsrBackend::MetricLine { .. } => Ok(InducedAsr::FiniteHausdorff),
        LsrBackend::TopoTrace => Ok(InducedAsr::FiniteOrInfinite),
        LsrBackend::Restricted { base, .. } => lambda_of(base),
    }
}

/// `A λ B` iff `{A, B}` is a member; only for LS-regular structures.
pub fn lambda_explicit(c: &ExplicitLSR) -> Result<ExplicitASR> {
    if let Err(w) = structures::ls_regularity(c) {
        return Err(Error::NotLsRegular(w.describe(c.universe())));
    }
    ExplicitASR::from_relation(c.universe().clone(), |a, b| c.alike(a, b))
}

/// `𝔠̃`: all families whose pairs are members. Output is an A-LS.R.
pub fn regularize(c: &ExplicitLSR) -> Result<ExplicitLSR> {
    if let Err(w) = structures::ls_regularity(c) {
        return Err(Error::NotLsRegular(w.describe(c.universe())));
    }
    ExplicitLSR::new(c.universe().clone(), structures::pairwise_table(c)?)
}

/// Place the bits of a mask over `points.len()` positions onto `points`.
fn deposit(mask: u32, points: &[usize]) -> u32 {
    points.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |acc, (_, p)| acc | 1 << p)
}

/// Subspace structure on `y`, relabelled as its own universe.
pub fn restrict_explicit(c: &ExplicitLSR, y: Subset) -> Result<ExplicitLSR> {
    if y.is_empty() {
        return Err(Error::EmptySet);
    }
    let points: Vec<usize> = y.iter().collect();
    let labels: Vec<String> = points.iter().map(|p| c.universe().labels()[*p].clone()).collect();
    let sub = Universe::new(labels)?;
    ExplicitLSR::from_predicate(sub, |code| {
        let big = famtable::members_of(code).fold(0, |acc, s| acc | 1 << deposit(s, &points));
        c.contains_code(big)
    })
}

/// Subspace backend. Explicit backends are relabelled onto `y`; line
/// backends keep ℕ and only admit families inside `y`.
pub fn restrict(b: &LsrBackend, y: &SetItem) -> Result<LsrBackend> {
    match (b, y) {
        (b, SetItem::Explicit(s)) if b.is_explicit() => Ok(LsrBackend::Explicit(restrict_explicit(&b.to_explicit()?, *s)?)),
        (b, SetItem::Line(l)) if !b.is_explicit() => {
            if l.is_empty() {
                return Err(Error::EmptySet);
            }
            Ok(LsrBackend::Restricted { base: Box::new(b.clone()), to: l.clone() })
        }
        _ => Err(Error::MixedRepresentations("subspace does not live on the backend's space")),
    }
}

// ---------------------------------------------------------------------------
// induced nearness

/// `𝒜 ∈ 𝔑_𝔠` iff the closures of its members share a point, or some nonempty
/// member `ℬ` of `𝔠` with only unbounded sets satisfies `ℬ ≪ 𝒜`.
pub fn induced_nearness(c: &ExplicitLSR, closure: &ClosureOp) -> Result<ExplicitNearness> {
    let w = c.width();
    let far = unbounded_code(c);
    let mut clause2 = FamilySet::empty(w)?;
    for m in c.maximal() {
        let b = m & far;
        if b != 0 {
            clause2.insert(famtable::up_code(b, w));
        }
    }
    clause2.close_downward();
    let table = FamilySet::from_predicate(w, |code| closure.meet_of_closures(code) != 0 || clause2.contains(code))?;
    ExplicitNearness::new(c.universe().clone(), table, closure.clone())
}

/// Family code of all unbounded subsets.
fn unbounded_code(c: &ExplicitLSR) -> FamCode {
    !c.bounded_mask() & (((1u64 << famtable::subset_count(c.width())) - 1) as FamCode)
}

/// The clause-2 witness `ℬ` for an explicit family, if any.
pub fn explicit_unbounded_witness(c: &ExplicitLSR, fam: FamCode) -> Option<FamCode> {
    let w = c.width();
    let far = unbounded_code(c);
    c.maximal()
        .into_iter()
        .map(|m| m & far)
        .find(|&b| b != 0 && famtable::is_subcode(fam, famtable::up_code(b, w)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearnessQuery {
    pub backend: LsrBackend,
    /// Closure on an explicit universe; discrete when absent.
    pub closure: Option<ClosureOp>,
    pub family: SetFamily,
}

pub fn nearness_of(q: &NearnessQuery) -> Result<TriVerdict> {
    match (&q.backend, &q.family) {
        (b, SetFamily::Explicit(f)) if b.is_explicit() => {
            let c = b.to_explicit()?;
            check_width(c.universe(), f)?;
            let closure = match &q.closure {
                Some(cl) => cl.clone(),
                None => ClosureOp::discrete(c.width())?,
            };
            let code = famtable::code_of(f);
            let meet = closure.meet_of_closures(code);
            if meet != 0 {
                return Ok(TriVerdict::yes(Witness::CommonPoint { x: meet.trailing_zeros() as u64 }));
            }
            Ok(match explicit_unbounded_witness(&c, code) {
                Some(bcode) => TriVerdict::yes(Witness::Explicit {
                    detail: format!(
                        "{} is a member with only unbounded sets and refines the family",
                        c.universe().fmt_family(&famtable::family_of(bcode, c.width()))
                    ),
                }),
                None => TriVerdict::no(Witness::Explicit {
                    detail: "closures share no point and no member with only unbounded sets refines the family"
                        .into(),
                }),
            })
        }
        (LsrBackend::MetricLine { budget }, SetFamily::Line(sets)) => Ok(metric_nearness(sets, *budget)),
        (LsrBackend::TopoTrace, SetFamily::Line(sets)) => Ok(topo_nearness(sets, DEFAULT_BUDGET)),
        (LsrBackend::Restricted { base, .. }, SetFamily::Line(_)) => nearness_of(&NearnessQuery {
            backend: (**base).clone(),
            closure: None,
            family: q.family.clone(),
        }),
        _ => Err(Error::MixedRepresentations("family does not live on the backend's space")),
    }
}

/// Clause 1 with the discrete closure.
fn common_point(sets: &[LineSet], hi: u64) -> Option<std::result::Result<u64, ()>> {
    if sets.iter().all(LineSet::is_exact_tier) {
        return match LineSet::common_point(sets) {
            Ok(Some(x)) => Some(Ok(x)),
            Ok(None) => None,
            Err(_) => Some(Err(())),
        };
    }
    let first = sets.iter().position(|s| s.is_finite()).unwrap_or(0);
    let scan = if sets[first].is_finite() { sets[first].max_element().unwrap_or(0) } else { hi };
    sets[first].window(scan).into_iter().find(|x| sets.iter().all(|s| s.member(*x))).map(Ok)
}

fn topo_nearness(sets: &[LineSet], budget: Budget) -> TriVerdict {
    if sets.is_empty() {
        return TriVerdict::yes(Witness::CommonPoint { x: 0 });
    }
    if let Some(Ok(x)) = common_point(sets, budget.window) {
        return TriVerdict::yes(Witness::CommonPoint { x });
    }
    if let Some(i) = sets.iter().position(|s| s.is_finite()) {
        let exact_clause1 = sets.iter().any(|s| s.is_finite()) || sets.iter().all(LineSet::is_exact_tier);
        return if exact_clause1 {
            TriVerdict::no(Witness::Member { index: i, note: "finite member with no common point".into() })
        } else {
            TriVerdict::unknown(budget.window, budget.scale)
        };
    }
    TriVerdict::yes(Witness::Explicit { detail: "all members infinite".into() })
}

fn metric_nearness(sets: &[LineSet], budget: Budget) -> TriVerdict {
    if sets.is_empty() {
        return TriVerdict::yes(Witness::CommonPoint { x: 0 });
    }
    if let Some(Ok(x)) = common_point(sets, budget.window) {
        return TriVerdict::yes(Witness::CommonPoint { x });
    }
    // a finite member makes the common-point search exhaustive
    if let Some(i) = sets.iter().position(|s| s.is_finite()) {
        return TriVerdict::no(Witness::Member {
            index: i,
            note: "finite member: no unbounded subset and no common point".into(),
        });
    }
    if sets.iter().all(LineSet::is_exact_tier) {
        let mut k = 0;
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                match hausdorff_distance(&sets[i], &sets[j]) {
                    Ok(ExtendedDistance::Finite(d)) => k = k.max(d),
                    _ => return TriVerdict::unknown(budget.window, budget.scale),
                }
            }
        }
        return TriVerdict::yes(Witness::Scale { k });
    }
    near_scale_scan(sets, budget)
}

/// Scale-bounded refutation of the unbounded-refinement clause.
///
/// At scale `k` the candidate `{x ∈ A_0 : d(x, A_i) ≤ k for all i}` is the
/// largest set that can carry a refinement at that scale. It is refuted when
/// the tail `(hi/4, hi − k]` of the window holds points of `A_0` but
/// none of the candidate; each scale records the last such point and the
/// member it is farthest from.
fn near_scale_scan(sets: &[LineSet], budget: Budget) -> TriVerdict {
    let hi = budget.window;
    let base = &sets[0];
    let pts = base.window(hi);
    let worst: Vec<(u64, usize, u64)> = pts
        .iter()
        .map(|&x| {
            let (i, d) = sets
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, s)| (i, s.distance_to(x).unwrap_or(u64::MAX)))
                .max_by_key(|(_, d)| *d)
                .unwrap_or((0, 0));
            (x, i, d)
        })
        .collect();
    let mut scales = Vec::new();
    for k in 0..=budget.scale {
        // a quarter rather than a half keeps a point of every dyadic set
        let lo = hi / 4;
        let upper = hi.saturating_sub(k);
        let tail: Vec<&(u64, usize, u64)> = worst.iter().filter(|(x, _, _)| *x > lo && *x <= upper).collect();
        if tail.is_empty() || tail.iter().any(|(_, _, d)| *d <= k) {
            return TriVerdict::unknown(hi, budget.scale);
        }
        let &&(x, i, d) = tail.last().expect("nonempty");
        scales.push(ScaleWitness { k, point: x, member: 0, other: i, distance: dist(d) });
    }
    TriVerdict::no(Witness::WindowRefuted { window: hi, scales })
}

// ---------------------------------------------------------------------------
// induced proximity

/// `A δ B` iff the closures meet or `A`, `B` are not asymptotically disjoint.
pub fn proximity_of_asr(l: &ExplicitASR, closure: &ClosureOp) -> Result<ExplicitProximity> {
    ExplicitProximity::from_predicate(l.universe().clone(), |a, b| {
        closure.close(a) & closure.close(b) != 0 || !l.asymptotically_disjoint(a, b)
    })
}

/// Asymptotic normality: every asymptotically disjoint pair is separated by
/// a cover `X = X1 ∪ X2` with `X1` disjoint from `A` and `X2` from `B`.
pub fn asymptotic_normality_witness(l: &ExplicitASR) -> Option<(u32, u32)> {
    let n = famtable::subset_count(l.width()) as u32;
    let full = n - 1;
    for a in 0..n {
        for b in 0..n {
            if !l.asymptotically_disjoint(a, b) {
                continue;
            }
            let ok = (0..n).any(|x1| {
                let x2_min = full & !x1;
                l.asymptotically_disjoint(x1, a)
                    && Subset(x1).subsets().any(|extra| l.asymptotically_disjoint(x2_min | extra.mask(), b))
            });
            if !ok {
                return Some((a, b));
            }
        }
    }
    None
}

/// On the metric line: `A δ B` iff they meet or both are infinite.
pub fn line_proximity(a: &LineSet, b: &LineSet, budget: Budget) -> TriVerdict {
    if let Some(Ok(x)) = common_point(&[a.clone(), b.clone()], budget.window) {
        return TriVerdict::yes(Witness::CommonPoint { x });
    }
    if a.is_finite() || b.is_finite() {
        let exhaustive = a.is_finite() || b.is_finite();
        return if exhaustive {
            TriVerdict::no(Witness::Explicit { detail: "disjoint and one side finite".into() })
        } else {
            TriVerdict::unknown(budget.window, budget.scale)
        };
    }
    if a.is_exact_tier() && b.is_exact_tier() {
        return TriVerdict::yes(Witness::Explicit {
            detail: "two infinite periodic sets are at finite Hausdorff distance".into(),
        });
    }
    TriVerdict::unknown(budget.window, budget.scale)
}

/// Seeded sampling of line families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub seed: u64,
    pub families: usize,
    pub scale: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { seed: 0, families: 200, scale: 64 }
    }
}

/// Arithmetic progressions, shifted evens and odds, and small finite sets.
pub fn pool(rng: &mut ChaCha8Rng) -> Vec<LineSet> {
    let mut out = Vec::new();
    for start in 0..6 {
        for step in 1..5 {
            out.push(LineSet::progression(start, step).expect("valid progression"));
        }
    }
    out.push(LineSet::naturals());
    for _ in 0..8 {
        let n = rng.gen_range(1..6);
        out.push(LineSet::finite((0..n).map(|_| rng.gen_range(0..100))));
    }
    out
}

/// Families of one to four pool sets, deterministic in the seed.
pub fn sample_families(sampling: Sampling) -> Vec<Vec<LineSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let pool = pool(&mut rng);
    (0..sampling.families)
        .map(|_| {
            let k = rng.gen_range(1..=4);
            pool.choose_multiple(&mut rng, k).cloned().collect()
        })
        .collect()
}

fn line_family(v: &[LineSet]) -> SetFamily {
    SetFamily::Line(v.to_vec())
}

fn describe(v: &[LineSet]) -> String {
    let parts: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Outcome of a sampled axiom: `None` skipped (undecided), `Some(None)` pass.
type Outcome = Option<Option<String>>;

fn first_failure<I: IntoIterator<Item = Result<Outcome>>>(checks: I) -> Result<Outcome> {
    let mut decided = false;
    for c in checks {
        match c? {
            Some(Some(w)) => return Ok(Some(Some(w))),
            Some(None) => decided = true,
            None => {}
        }
    }
    Ok(if decided { Some(None) } else { None })
}

fn yes(v: TriVerdict) -> Option<bool> {
    match v {
        TriVerdict::Yes { .. } => Some(true),
        TriVerdict::No { .. } => Some(false),
        TriVerdict::Unknown { .. } => None,
    }
}

/// LS.R axioms of a line backend on seeded families from the pool.
pub fn sampled_lsr_axioms(b: &LsrBackend, sampling: Sampling) -> Result<AxiomReport> {
    let mut r = AxiomReport::new(&format!("{} structure on ℕ (sampled, seed {})", b.name(), sampling.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let sets = pool(&mut rng);
    let fams = sample_families(sampling);
    let member = |v: &[LineSet]| -> Result<Option<bool>> { Ok(yes(b.member(&line_family(v))?)) };
    let members: Vec<&Vec<LineSet>> = fams.iter().filter(|f| matches!(member(f), Ok(Some(true)))).collect();

    r.push(
        "i",
        "{A} is a member for every A",
        first_failure(sets.iter().map(|s| {
            let v = std::slice::from_ref(s);
            Ok(member(v)?.map(|ok| (!ok).then(|| describe(v))))
        }))?,
    );
    r.push(
        "ii",
        "subfamilies of members are members",
        first_failure(members.iter().flat_map(|f| {
            (0..f.len()).map(move |i| {
                let mut sub = (*f).clone();
                sub.remove(i);
                Ok(member(&sub)?.map(|ok| (!ok).then(|| describe(&sub))))
            })
        }))?,
    );
    let pairs: Vec<(&Vec<LineSet>, &Vec<LineSet>)> =
        members.iter().flat_map(|a| members.iter().map(move |c| (*a, *c))).take(4 * sampling.families).collect();
    r.push(
        "iii",
        "members sharing a set have a member union",
        first_failure(pairs.iter().map(|(x, y)| {
            if !x.iter().any(|s| y.contains(s)) {
                return Ok(None);
            }
            let both: Vec<LineSet> = x.iter().chain(y.iter()).cloned().collect();
            Ok(member(&both)?.map(|ok| (!ok).then(|| describe(&both))))
        }))?,
    );
    r.push(
        "iv",
        "the join {A ∪ B} of two members is a member",
        first_failure(pairs.iter().map(|(x, y)| {
            let join = x.iter().flat_map(|a| y.iter().map(move |c| a.union(c))).collect::<Result<Vec<_>>>()?;
            Ok(member(&join)?.map(|ok| (!ok).then(|| describe(&join))))
        }))?,
    );
    Ok(r)
}

/// Nearness axioms of the structure induced by a line backend, on seeded
/// families; axiom iv is checked on `sampling.families` pairs.
pub fn sampled_nearness_axioms(b: &LsrBackend, sampling: Sampling) -> Result<AxiomReport> {
    let mut r = AxiomReport::new(&format!("nearness induced by {} (sampled, seed {})", b.name(), sampling.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed ^ 0x6e65_6172);
    let sets = pool(&mut rng);
    let fams = sample_families(sampling);
    let near = |v: &[LineSet]| -> Result<Option<bool>> {
        Ok(yes(nearness_of(&NearnessQuery { backend: b.clone(), closure: None, family: line_family(v) })?))
    };
    r.push(
        "i",
        "families with a common point are near",
        first_failure(fams.iter().map(|f| {
            if !matches!(LineSet::common_point(f), Ok(Some(_))) {
                return Ok(None);
            }
            Ok(near(f)?.map(|ok| (!ok).then(|| describe(f))))
        }))?,
    );
    r.push(
        "ii",
        "families refined by a near family are near",
        first_failure(fams.iter().map(|f| {
            if near(f)? != Some(true) {
                return Ok(None);
            }
            let bigger = f
                .iter()
                .map(|a| a.union(sets.choose(&mut ChaCha8Rng::seed_from_u64(a.window(64).len() as u64)).expect("pool")))
                .collect::<Result<Vec<_>>>()?;
            Ok(near(&bigger)?.map(|ok| (!ok).then(|| describe(&bigger))))
        }))?,
    );
    r.push(
        "iii",
        "near families do not contain the empty set",
        first_failure(fams.iter().map(|f| {
            let mut with_empty = f.clone();
            with_empty.push(LineSet::finite([]));
            Ok(near(&with_empty)?.map(|ok| ok.then(|| describe(&with_empty))))
        }))?,
    );
    let mut prng = ChaCha8Rng::seed_from_u64(sampling.seed.wrapping_add(1));
    r.push(
        "iv",
        "if the join of two families is near, one of them is",
        first_failure((0..sampling.families).map(|_| {
            let x = &fams[prng.gen_range(0..fams.len())];
            let y = &fams[prng.gen_range(0..fams.len())];
            let join = x.iter().flat_map(|a| y.iter().map(move |c| a.union(c))).collect::<Result<Vec<_>>>()?;
            let outcome = match (near(&join)?, near(x)?, near(y)?) {
                (Some(true), Some(false), Some(false)) => {
                    Some(Some(format!("{} ∨ {} is near", describe(x), describe(y))))
                }
                (Some(_), Some(_), Some(_)) => Some(None),
                _ => None,
            };
            Ok(outcome)
        }))?,
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Universe {
        Universe::letters(3).unwrap()
    }

    fn ab_c() -> LsrBackend {
        LsrBackend::partition(abc(), &[0b011, 0b100]).unwrap()
    }

    fn fam(u: &Universe, sets: &[&[&str]]) -> SetFamily {
        let v: Vec<Vec<&str>> = sets.iter().map(|s| s.to_vec()).collect();
        SetFamily::Explicit(u.family(&v).unwrap())
    }

    #[test]
    fn member_examples() {
        let u = abc();
        let b = ab_c();
        assert!(b.member(&fam(&u, &[&["a"], &["b"]])).unwrap().is_yes());
        assert!(b.member(&fam(&u, &[&["a"], &["c"]])).unwrap().is_no());

        let topo = LsrBackend::TopoTrace;
        let fam3 = SetFamily::Line(vec![LineSet::evens(), LineSet::odds(), LineSet::naturals()]);
        assert!(topo.member(&fam3).unwrap().is_yes());
        let mixed = SetFamily::Line(vec![LineSet::evens(), LineSet::finite([1])]);
        assert!(topo.member(&mixed).unwrap().is_no());

        let m = LsrBackend::metric_line();
        let v = m.member(&SetFamily::Line(vec![LineSet::evens(), LineSet::odds()])).unwrap();
        assert_eq!(v, TriVerdict::yes(Witness::Scale { k: 1 }));
        assert!(matches!(m.member(&fam(&u, &[&["a"]])), Err(Error::MixedRepresentations(_))));
    }

    #[test]
    fn bounded_examples() {
        let u = abc();
        let b = ab_c();
        assert!(b.bounded(&SetItem::Explicit(u.subset(&["a", "c"]).unwrap())).unwrap().is_no());
        assert!(b.bounded(&SetItem::Explicit(u.subset(&["a", "b"]).unwrap())).unwrap().is_yes());
        let m = LsrBackend::metric_line();
        assert!(m.bounded(&SetItem::Line(LineSet::evens())).unwrap().is_no());
        assert_eq!(m.bounded(&SetItem::Line(LineSet::finite([1, 5]))).unwrap(), TriVerdict::yes(Witness::Scale { k: 4 }));
        let singles = LsrBackend::Explicit(ExplicitLSR::singletons_only(abc()).unwrap());
        assert!(singles.is_connected().unwrap().is_no());
    }

    #[test]
    fn n_e_examples() {
        let d = Relation::diagonal(3).unwrap();
        let l = Subset(0b101);
        assert_eq!(n_e_of_l(&d, l), Family::single(3, l));
        let full = Relation::full(3).unwrap();
        assert_eq!(n_e_of_l(&full, l).len(), 7);
        let blocks = Relation::from_partition(3, &[0b011, 0b100]).unwrap();
        assert_eq!(n_e_of_l(&blocks, Subset(0b001)).members(), &[Subset(1), Subset(2), Subset(3)]);
    }

    #[test]
    fn lambda_examples() {
        let l = ExplicitASR::from_relation(abc(), |a, b| a.count_ones() == b.count_ones()).unwrap();
        let roundtrip = lambda_of(&LsrBackend::Explicit(c_lambda(&l).unwrap())).unwrap();
        assert_eq!(roundtrip, InducedAsr::Explicit(l));
        assert_eq!(lambda_of(&LsrBackend::TopoTrace).unwrap(), InducedAsr::FiniteOrInfinite);
        let u = abc();
        let g1 = u.family(&[vec!["a"], vec!["a", "b"]]).unwrap();
        let g2 = u.family(&[vec!["a", "c"], vec!["a", "b", "c"]]).unwrap();
        let c = ExplicitLSR::with_singletons(u, &[g1, g2]).unwrap();
        assert!(matches!(lambda_of(&LsrBackend::Explicit(c.clone())), Err(Error::NotLsRegular(_))));
        assert!(matches!(regularize(&c), Err(Error::NotLsRegular(_))));
    }

    #[test]
    fn nearness_examples() {
        let m = LsrBackend::metric_line();
        let q = |family| NearnessQuery { backend: m.clone(), closure: None, family };
        let v = nearness_of(&q(SetFamily::Line(vec![LineSet::evens(), LineSet::odds()]))).unwrap();
        assert_eq!(v, TriVerdict::yes(Witness::Scale { k: 1 }));

        let u = abc();
        let qn = NearnessQuery { backend: ab_c(), closure: None, family: fam(&u, &[&["a"], &["b"]]) };
        assert!(nearness_of(&qn).unwrap().is_no());

        let powers: Vec<LineSet> = (1..=8).map(|n| LineSet::geometric(1, 1 << n, 1).unwrap()).collect();
        match nearness_of(&q(SetFamily::Line(powers))).unwrap() {
            TriVerdict::No { witness: Witness::WindowRefuted { scales, .. } } => assert_eq!(scales.len(), 65),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn regularize_partition_structure() {
        let c = ab_c().to_explicit().unwrap();
        let r = regularize(&c).unwrap();
        assert!(c.table().is_subset_of(r.table()));
        assert!(structures::is_a_lsr(&r).unwrap());
        assert_eq!(regularize(&r).unwrap(), r);
    }

    #[test]
    fn restrict_examples() {
        let m = LsrBackend::metric_line();
        let r = restrict(&m, &SetItem::Line(LineSet::evens())).unwrap();
        let lines = SetFamily::Line(vec![LineSet::evens(), LineSet::progression(0, 4).unwrap()]);
        assert_eq!(r.member(&lines).unwrap(), TriVerdict::yes(Witness::Scale { k: 2 }));
        let u = abc();
        let g1 = u.family(&[vec!["a"], vec!["a", "b"]]).unwrap();
        let g2 = u.family(&[vec!["a", "c"], vec!["a", "b", "c"]]).unwrap();
        let c = ExplicitLSR::with_singletons(u.clone(), &[g1, g2]).unwrap();
        let sub = restrict(&LsrBackend::Explicit(c), &SetItem::Explicit(u.subset(&["a", "b"]).unwrap())).unwrap();
        let su = sub.universe().unwrap().clone();
        assert!(sub.member(&fam(&su, &[&["a"], &["a", "b"]])).unwrap().is_yes());
    }

    #[test]
    fn proximity_examples() {
        let b = DEFAULT_BUDGET;
        assert!(line_proximity(&LineSet::evens(), &LineSet::odds(), b).is_yes());
        assert!(line_proximity(&LineSet::finite([1]), &LineSet::finite([2]), b).is_no());
        assert!(line_proximity(&LineSet::finite([3]), &LineSet::finite([3]), b).is_yes());
    }

    #[test]
    fn sampled_suites_pass_on_line_backends() {
        let s = Sampling { families: 60, ..Default::default() };
        for b in [LsrBackend::metric_line(), LsrBackend::TopoTrace] {
            let r = sampled_lsr_axioms(&b, s).unwrap();
            assert!(r.all_pass(), "{r}");
            let n = sampled_nearness_axioms(&b, s).unwrap();
            assert!(n.all_pass(), "{n}");
        }
    }

    #[test]
    fn tilde_constructions() {
        let m = Relation::from_partition(3, &[0b011, 0b100]).unwrap();
        assert_eq!(c_e(&abc(), &m).unwrap(), c_tilde_e(&abc(), &m).unwrap());
        let l = ExplicitASR::identity(abc()).unwrap();
        let t = c_tilde_lambda(&l).unwrap();
        assert!(t.table().is_subset_of(c_lambda(&l).unwrap().table()));
    }
}
