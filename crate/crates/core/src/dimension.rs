//! Uniform boundedness, cover refinement and multiplicity, greedy interval
//! coarsening and asymptotic dimension.
//!
//! A family `𝒰` is uniformly bounded when for every nonempty `𝒱 ⊆ 𝒰` the
//! transversal family `𝒜_𝒱 = {A ⊆ ⋃𝒱 : A meets every U ∈ 𝒱}` is a member of
//! the structure.

use serde::{Deserialize, Serialize};

use crate::backends::LsrBackend;
use crate::error::{Error, Result};
use crate::famtable::{self, FamCode, FamilySet};
use crate::lineset::LineSet;
use crate::setcore::{Family, Subset};
use crate::structures::ExplicitLSR;
use crate::verdict::{TriVerdict, Witness};

pub const TRANSVERSAL_CAP: usize = 12;

/// `U_i = {lo_a·i + lo_b, …, hi_a·i + hi_b}` for `i ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRule {
    pub lo_a: u64,
    pub lo_b: u64,
    pub hi_a: u64,
    pub hi_b: u64,
}

impl IntervalRule {
    pub fn new(lo_a: u64, lo_b: u64, hi_a: u64, hi_b: u64) -> Result<Self> {
        if hi_a < lo_a || hi_b < lo_b {
            return Err(Error::Precondition("interval rule must have lo(i) ≤ hi(i) for every i".into()));
        }
        Ok(IntervalRule { lo_a, lo_b, hi_a, hi_b })
    }

    /// `{{n, n+1} : n ∈ ℕ}`.
    pub fn adjacent_pairs() -> Self {
        IntervalRule { lo_a: 1, lo_b: 0, hi_a: 1, hi_b: 1 }
    }

    /// `U_i = {i, …, 2i}`.
    pub fn i_to_2i() -> Self {
        IntervalRule { lo_a: 1, lo_b: 0, hi_a: 2, hi_b: 0 }
    }

    pub fn singletons() -> Self {
        IntervalRule { lo_a: 1, lo_b: 0, hi_a: 1, hi_b: 0 }
    }

    pub fn member(&self, i: u64) -> (u64, u64) {
        (self.lo_a * i + self.lo_b, self.hi_a * i + self.hi_b)
    }

    /// Each point lies in finitely many distinct members. With `hi_a = 0`
    /// every index gives the same interval.
    pub fn star_finite(&self) -> bool {
        self.lo_a >= 1 || self.hi_a == 0
    }

    /// Members meeting `[1, n]`, clipped to it.
    pub fn instantiate(&self, n: u64) -> Result<WindowCover> {
        let mut members = Vec::new();
        let mut i = 0u64;
        loop {
            let (lo, hi) = self.member(i);
            if lo > n {
                break;
            }
            if hi >= 1 {
                members.push((lo.max(1)..=hi.min(n)).collect());
            }
            if self.lo_a == 0 && i > n {
                break;
            }
            i += 1;
        }
        WindowCover::new(n, members)
    }
}

/// A cover of the window `[1, n]` by finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCover {
    pub n: u64,
    pub members: Vec<Vec<u64>>,
}

impl WindowCover {
    pub fn new(n: u64, members: Vec<Vec<u64>>) -> Result<Self> {
        let members: Vec<Vec<u64>> = members
            .into_iter()
            .map(|mut m| {
                m.retain(|x| (1..=n).contains(x));
                m.sort_unstable();
                m.dedup();
                m
            })
            .collect();
        if members.iter().any(Vec::is_empty) {
            return Err(Error::EmptySet);
        }
        let c = WindowCover { n, members };
        if let Some(x) = (1..=n).zip(c.incidence()).find(|(_, k)| *k == 0).map(|(x, _)| x) {
            return Err(Error::NotACover(x));
        }
        Ok(c)
    }

    /// Number of members containing each point of `[1, n]`.
    pub fn incidence(&self) -> Vec<usize> {
        let mut inc = vec![0usize; self.n as usize];
        for m in &self.members {
            for &x in m {
                inc[x as usize - 1] += 1;
            }
        }
        inc
    }

    pub fn multiplicity(&self) -> usize {
        self.incidence().into_iter().max().unwrap_or(0)
    }

    /// Map each member of `self` to a member of `other` containing it, or
    /// return the first member that fits nowhere.
    pub fn refines(&self, other: &WindowCover) -> std::result::Result<Vec<usize>, usize> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, u)| {
                other.members.iter().position(|v| u.iter().all(|x| v.binary_search(x).is_ok())).ok_or(i)
            })
            .collect()
    }

    /// Connected components of the "share a member" graph: the finest
    /// partition this cover refines.
    pub fn components(&self) -> Vec<Vec<u64>> {
        let n = self.n as usize;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for m in &self.members {
            let first = m[0] as usize - 1;
            for &x in &m[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, x as usize - 1));
                parent[a] = b;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<u64>> = Default::default();
        for x in 0..n {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(x as u64 + 1);
        }
        let mut out: Vec<Vec<u64>> = groups.into_values().collect();
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cover {
    /// Subsets of an explicit universe, as masks.
    Explicit { width: usize, members: Vec<u32> },
    Window(WindowCover),
    /// A finite list of subsets of ℕ.
    Lines(Vec<LineSet>),
    Rule(IntervalRule),
}

// ---------------------------------------------------------------------------
// explicit universes

/// `𝒜_𝒱` as a family.
pub fn transversal_family(width: usize, v: &[Subset]) -> Result<Family> {
    if v.is_empty() {
        return Err(Error::Precondition("transversal family needs a nonempty subfamily".into()));
    }
    let union = v.iter().fold(Subset(0), |acc, s| acc.union(*s));
    if union.len() > TRANSVERSAL_CAP {
        return Err(Error::CapExceeded { what: "points in the union of the subfamily", limit: TRANSVERSAL_CAP });
    }
    let members: Vec<Subset> = union.subsets().filter(|a| v.iter().all(|u| a.meets(*u))).collect();
    Family::new(width, members)
}

/// `𝒜_𝒱` for a family code over at most four points.
pub fn transversal_code(v: FamCode, width: usize) -> FamCode {
    let us: Vec<u32> = famtable::members_of(v).collect();
    let union = us.iter().fold(0, |a, u| a | u);
    Subset(union)
        .subsets()
        .map(|a| a.mask())
        .filter(|a| us.iter().all(|u| a & u != 0))
        .fold(0, |acc, a| acc | 1 << a)
        & full_code(width)
}

fn full_code(width: usize) -> FamCode {
    ((1u64 << famtable::subset_count(width)) - 1) as FamCode
}

/// Uniformly bounded families of nonempty subsets, as a down-closed table.
pub fn ub_table(c: &ExplicitLSR) -> Result<FamilySet> {
    let w = c.width();
    let mut t = FamilySet::empty(w)?;
    t.insert(0);
    for code in 1..famtable::family_count(w) as FamCode {
        if code & 1 == 1 {
            continue;
        }
        let subs_ok = famtable::members_of(code).all(|m| t.contains(code & !(1 << m)));
        if subs_ok && c.contains_code(transversal_code(code, w)) {
            t.insert(code);
        }
    }
    Ok(t)
}

/// Exhaustive check; returns the first failing subfamily `𝒱` as a code.
pub fn explicit_ub_violation(c: &ExplicitLSR, members: &[u32]) -> Result<Option<FamCode>> {
    let w = c.width();
    if members.iter().any(|m| *m == 0 || !Subset(*m).fits(w)) {
        return Err(Error::Precondition("cover members must be nonempty subsets of the universe".into()));
    }
    let code = members.iter().fold(0 as FamCode, |a, m| a | 1 << m);
    let ms: Vec<u32> = famtable::members_of(code).collect();
    for pick in 1u32..(1 << ms.len()) {
        let v = ms.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).fold(0 as FamCode, |a, (_, m)| a | 1 << m);
        if !c.contains_code(transversal_code(v, w)) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

pub fn is_uniformly_bounded(u: &Cover, b: &LsrBackend) -> Result<TriVerdict> {
    match (u, b) {
        (Cover::Explicit { width, members }, b) if b.is_explicit() => {
            let c = b.to_explicit()?;
            if *width != c.width() {
                return Err(Error::UniverseMismatch { left: c.width(), right: *width });
            }
            Ok(match explicit_ub_violation(&c, members)? {
                None => TriVerdict::yes(Witness::Explicit { detail: "every transversal family is a member".into() }),
                Some(v) => TriVerdict::no(Witness::Explicit {
                    detail: format!(
                        "transversal family of {} is not a member",
                        c.universe().fmt_family(&famtable::family_of(v, c.width()))
                    ),
                }),
            })
        }
        (Cover::Rule(r), LsrBackend::MetricLine { .. }) => Ok(if r.hi_a == r.lo_a {
            TriVerdict::yes(Witness::Scale { k: r.hi_b - r.lo_b })
        } else {
            TriVerdict::no(Witness::Explicit {
                detail: format!("diam U_i = {}·i + {} is unbounded", r.hi_a - r.lo_a, r.hi_b - r.lo_b),
            })
        }),
        (Cover::Rule(r), LsrBackend::TopoTrace) => Ok(if r.star_finite() {
            TriVerdict::yes(Witness::Explicit { detail: "all members finite and every point in finitely many".into() })
        } else {
            TriVerdict::no(Witness::Member {
                index: 0,
                note: format!("point {} lies in every member", r.lo_b),
            })
        }),
        (Cover::Lines(sets), LsrBackend::MetricLine { .. } | LsrBackend::TopoTrace) => {
            if let Some(i) = sets.iter().position(|s| !s.is_finite()) {
                return Ok(TriVerdict::no(Witness::Member { index: i, note: "unbounded member".into() }));
            }
            let k = sets
                .iter()
                .filter_map(|s| Some(s.max_element()? - s.next_from(0)?))
                .max()
                .unwrap_or(0);
            Ok(match b {
                LsrBackend::MetricLine { .. } => TriVerdict::yes(Witness::Scale { k }),
                _ => TriVerdict::yes(Witness::Explicit { detail: "finitely many finite members".into() }),
            })
        }
        (Cover::Window(w), LsrBackend::MetricLine { .. }) => {
            let k = w.members.iter().map(|m| m[m.len() - 1] - m[0]).max().unwrap_or(0);
            Ok(TriVerdict::yes(Witness::Scale { k }))
        }
        (Cover::Window(_), LsrBackend::TopoTrace) => {
            Ok(TriVerdict::yes(Witness::Explicit { detail: "finitely many finite members".into() }))
        }
        (_, b) => Err(Error::Unsupported(format!("cover kind on {} backend", b.name()))),
    }
}

pub fn explicit_multiplicity(width: usize, members: &[u32]) -> usize {
    (0..width).map(|x| members.iter().filter(|m| *m >> x & 1 == 1).count()).max().unwrap_or(0)
}

pub fn multiplicity(u: &Cover) -> Result<usize> {
    match u {
        Cover::Explicit { width, members } => {
            let union = members.iter().fold(0, |a, m| a | m);
            if let Some(x) = (0..*width).find(|x| union >> x & 1 == 0) {
                return Err(Error::NotACover(x as u64));
            }
            Ok(explicit_multiplicity(*width, members))
        }
        Cover::Window(w) => Ok(w.multiplicity()),
        _ => Err(Error::Unsupported("multiplicity needs a finite domain or a window".into())),
    }
}

pub fn refines(u: &Cover, v: &Cover) -> Result<std::result::Result<Vec<usize>, usize>> {
    match (u, v) {
        (Cover::Explicit { width: a, members: um }, Cover::Explicit { width: b, members: vm }) => {
            if a != b {
                return Err(Error::UniverseMismatch { left: *a, right: *b });
            }
            Ok(um
                .iter()
                .enumerate()
                .map(|(i, x)| vm.iter().position(|y| x & !y == 0).ok_or(i))
                .collect())
        }
        (Cover::Window(a), Cover::Window(b)) => Ok(a.refines(b)),
        _ => Err(Error::Unsupported("refinement needs two explicit or two window covers".into())),
    }
}

// ---------------------------------------------------------------------------
// greedy interval coarsening

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseningCertificate {
    /// The breakpoints `a_1 = 1, a_2, …`.
    pub breakpoints: Vec<u64>,
    /// Member of the input → interval containing it.
    pub refinement: Vec<usize>,
    /// Point → number of intervals containing it.
    pub incidence: Vec<usize>,
    pub multiplicity: usize,
    pub uniformly_bounded: String,
}

/// `a_1 = 1`; `a_{k+1}` is the largest `x` sharing a member with some
/// `l ≤ a_k + 1`. The intervals are `V_1 = [1, a_2]` and
/// `V_{k+1} = [a_k + 1, a_{k+2}]`, stopping once `[1, n]` is covered.
pub fn greedy_interval_coarsen(u: &WindowCover) -> Result<(WindowCover, CoarseningCertificate)> {
    let n = u.n;
    // reach[l] = largest point sharing a member with l
    let mut reach = vec![0u64; n as usize + 2];
    for m in &u.members {
        let top = m[m.len() - 1];
        for &x in m {
            reach[x as usize] = reach[x as usize].max(top);
        }
    }
    let mut best_upto = vec![0u64; n as usize + 2];
    for l in 1..=n as usize + 1 {
        best_upto[l] = best_upto[l - 1].max(reach.get(l).copied().unwrap_or(0));
    }
    let next = |a: u64| best_upto[((a + 1).min(n + 1)) as usize].max(a + 1).min(n);
    let mut a = vec![1u64];
    if n == 1 {
        a.push(1);
    }
    while *a.last().expect("nonempty") < n {
        let last = *a.last().expect("nonempty");
        a.push(next(last));
    }
    let mut intervals: Vec<Vec<u64>> = Vec::new();
    intervals.push((1..=a[1]).collect());
    let mut k = 0;
    while a.get(k + 2).is_some() && a[k + 1] < n {
        intervals.push((a[k] + 1..=a[k + 2]).collect());
        k += 1;
    }
    let v = WindowCover::new(n, intervals)?;
    let refinement = u.refines(&v).map_err(|i| {
        Error::Precondition(format!("member {i} of the input lies in no interval of the coarsening"))
    })?;
    let incidence = v.incidence();
    let multiplicity = incidence.iter().copied().max().unwrap_or(0);
    Ok((
        v,
        CoarseningCertificate {
            breakpoints: a,
            refinement,
            incidence,
            multiplicity,
            uniformly_bounded: "finitely many finite intervals, each point in at most two".into(),
        },
    ))
}

// ---------------------------------------------------------------------------
// asymptotic dimension

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub cover: Vec<u32>,
    pub coarsening: Vec<u32>,
    pub refinement: Vec<usize>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsdimReport {
    pub asdim: usize,
    pub uniformly_bounded_covers: usize,
    /// One entry per maximal uniformly bounded cover, with its best coarsening.
    pub certificates: Vec<CoverCertificate>,
}

fn code_members(code: FamCode) -> Vec<u32> {
    famtable::members_of(code).collect()
}

/// Least `n` such that every uniformly bounded cover refines a uniformly
/// bounded cover of multiplicity at most `n + 1`. Covers contained in a
/// larger uniformly bounded cover inherit its coarsenings, so only maximal
/// ones are searched.
pub fn asdim_explicit(c: &ExplicitLSR) -> Result<AsdimReport> {
    let w = c.width();
    let full = (1u32 << w) - 1;
    let ub = ub_table(c)?;
    let covers: Vec<FamCode> = ub
        .iter()
        .filter(|&code| code != 0 && famtable::members_of(code).fold(0, |a, m| a | m) == full)
        .collect();
    if covers.is_empty() {
        return Err(Error::Precondition("no uniformly bounded cover exists".into()));
    }
    let nsub = famtable::subset_count(w) as u32;
    let maximal: Vec<FamCode> = covers
        .iter()
        .copied()
        .filter(|&code| (1..nsub).all(|s| code >> s & 1 == 1 || !ub.contains(code | 1 << s)))
        .collect();
    let mut by_mult: Vec<(usize, FamCode, FamCode)> = covers
        .iter()
        .map(|&v| (explicit_multiplicity(w, &code_members(v)), v, famtable::down_code(v, w)))
        .collect();
    by_mult.sort_unstable();
    let mut certificates = Vec::new();
    let mut worst = 0;
    for u in maximal {
        let &(m, v, _) = by_mult
            .iter()
            .find(|(_, _, down)| famtable::is_subcode(u, *down))
            .expect("a cover refines itself");
        let (um, vm) = (code_members(u), code_members(v));
        let refinement = um.iter().map(|x| vm.iter().position(|y| x & !y == 0).expect("refines")).collect();
        worst = worst.max(m);
        certificates.push(CoverCertificate { cover: um, coarsening: vm, refinement, multiplicity: m });
    }
    Ok(AsdimReport { asdim: worst.saturating_sub(1), uniformly_bounded_covers: covers.len(), certificates })
}

// ---------------------------------------------------------------------------
// the line with the one-point compactification trace

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoWindowRow {
    pub n: u64,
    pub intervals: usize,
    pub multiplicity: usize,
    pub uniformly_bounded: bool,
    /// Size of the member of any multiplicity-one coarsening that contains 1.
    pub forced_member: u64,
    pub chain_forces_window: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoLineReport {
    pub rows: Vec<TopoWindowRow>,
    pub certified: bool,
    pub conclusion: String,
}

/// Upper bound: the greedy coarsening of `{{n, n+1}}` has multiplicity 2 and
/// is uniformly bounded. Lower bound: any multiplicity-one coarsening is a
/// partition that `{{n, n+1}}` refines, so `n` and `n+1` share a block and the
/// block of 1 is the whole window; its size grows with the window.
pub fn asdim_topo_line_report(windows: &[u64]) -> Result<TopoLineReport> {
    let rule = IntervalRule::adjacent_pairs();
    let mut rows = Vec::new();
    for &n in windows {
        let u = rule.instantiate(n)?;
        let (v, cert) = greedy_interval_coarsen(&u)?;
        let ub = is_uniformly_bounded(&Cover::Window(v.clone()), &LsrBackend::TopoTrace)?.is_yes();
        let comps = u.components();
        let forced = comps.iter().find(|c| c[0] == 1).map(|c| c.len() as u64).unwrap_or(0);
        rows.push(TopoWindowRow {
            n,
            intervals: v.members.len(),
            multiplicity: cert.multiplicity,
            uniformly_bounded: ub,
            forced_member: forced,
            chain_forces_window: forced == n,
        });
    }
    let certified = !rows.is_empty()
        && rows.iter().all(|r| r.multiplicity == 2 && r.uniformly_bounded && r.chain_forces_window);
    let list: Vec<String> = rows.iter().map(|r| r.n.to_string()).collect();
    let conclusion = if certified {
        format!("asdim = 1 certified at windows {{{}}}", list.join(","))
    } else {
        format!("asdim = 1 not certified at windows {{{}}}", list.join(","))
    };
    Ok(TopoLineReport { rows, certified, conclusion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends;
    use crate::setcore::Universe;

    #[test]
    fn transversal_examples() {
        let a = Subset(0b01);
        let b = Subset(0b10);
        assert_eq!(transversal_family(2, &[a]).unwrap().members(), &[a]);
        assert_eq!(transversal_family(2, &[a, b]).unwrap().members(), &[Subset(0b11)]);
        assert_eq!(transversal_family(2, &[Subset(0b11)]).unwrap().members(), &[a, b, Subset(0b11)]);
        for v in [&[a][..], &[a, b], &[Subset(0b11)]] {
            let code = v.iter().fold(0, |acc, s| acc | 1 << s.mask());
            assert_eq!(famtable::family_of(transversal_code(code, 2), 2), transversal_family(2, v).unwrap());
        }
    }

    #[test]
    fn ub_examples() {
        let m = LsrBackend::metric_line();
        assert_eq!(
            is_uniformly_bounded(&Cover::Rule(IntervalRule::adjacent_pairs()), &m).unwrap(),
            TriVerdict::yes(Witness::Scale { k: 1 })
        );
        assert!(is_uniformly_bounded(&Cover::Rule(IntervalRule::i_to_2i()), &LsrBackend::TopoTrace).unwrap().is_yes());
        assert!(is_uniformly_bounded(&Cover::Rule(IntervalRule::i_to_2i()), &m).unwrap().is_no());
        for b in [m, LsrBackend::TopoTrace] {
            assert!(is_uniformly_bounded(&Cover::Rule(IntervalRule::singletons()), &b).unwrap().is_yes());
        }
        let u = Universe::letters(3).unwrap();
        let p = LsrBackend::partition(u, &[0b011, 0b100]).unwrap();
        let singles = Cover::Explicit { width: 3, members: vec![1, 2, 4] };
        assert!(is_uniformly_bounded(&singles, &p).unwrap().is_yes());
        let across = Cover::Explicit { width: 3, members: vec![0b101] };
        assert!(is_uniformly_bounded(&across, &p).unwrap().is_no());
    }

    #[test]
    fn multiplicity_and_refinement() {
        let part = Cover::Explicit { width: 3, members: vec![0b011, 0b100] };
        assert_eq!(multiplicity(&part).unwrap(), 1);
        let v = WindowCover::new(16, (0..8).map(|k| (2 * k..=2 * k + 3).collect()).collect()).unwrap();
        assert_eq!(v.multiplicity(), 2);
        let o = IntervalRule::adjacent_pairs().instantiate(16).unwrap();
        let map = o.refines(&v).unwrap();
        for (i, j) in map.iter().enumerate() {
            assert!(o.members[i].iter().all(|x| v.members[*j].contains(x)));
        }
        assert!(matches!(WindowCover::new(3, vec![vec![1], vec![3]]), Err(Error::NotACover(2))));
    }

    #[test]
    fn greedy_examples() {
        let o = IntervalRule::adjacent_pairs().instantiate(16).unwrap();
        let (v, cert) = greedy_interval_coarsen(&o).unwrap();
        assert_eq!(&cert.breakpoints[..4], &[1, 3, 5, 7]);
        assert_eq!(v.members[0], vec![1, 2, 3]);
        assert_eq!(v.members[1], vec![2, 3, 4, 5]);
        assert_eq!(v.members[2], vec![4, 5, 6, 7]);
        assert_eq!(v.members.len(), 8);
        assert_eq!(cert.multiplicity, 2);

        let s = IntervalRule::singletons().instantiate(10).unwrap();
        let (v, cert) = greedy_interval_coarsen(&s).unwrap();
        assert_eq!(&cert.breakpoints[..4], &[1, 2, 3, 4]);
        assert_eq!(v.members[0], vec![1, 2]);
        assert!(v.members[1..].iter().all(|m| m.len() == 2));
        assert!(cert.multiplicity <= 2);
    }

    #[test]
    fn asdim_examples() {
        let u = Universe::letters(3).unwrap();
        let one = backends::LsrBackend::partition(u.clone(), &[0b111]).unwrap().to_explicit().unwrap();
        assert_eq!(asdim_explicit(&one).unwrap().asdim, 0);
        let two = backends::LsrBackend::partition(u.clone(), &[0b011, 0b100]).unwrap().to_explicit().unwrap();
        let r = asdim_explicit(&two).unwrap();
        assert_eq!(r.asdim, 0);
        assert!(r.certificates.iter().all(|c| c.multiplicity == 1));
        let singles = ExplicitLSR::singletons_only(u).unwrap();
        assert_eq!(asdim_explicit(&singles).unwrap().asdim, 0);
    }

    #[test]
    fn topo_line_report() {
        let r = asdim_topo_line_report(&[16]).unwrap();
        assert_eq!(r.rows[0].intervals, 8);
        assert_eq!(r.rows[0].multiplicity, 2);
        assert_eq!(r.rows[0].forced_member, 16);
        assert!(r.certified);
        assert_eq!(r.conclusion, "asdim = 1 certified at windows {16}");
    }
}
