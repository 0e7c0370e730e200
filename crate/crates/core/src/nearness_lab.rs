//! Near families on the metric line that no bunch contains, and the finite
//! contrast where every near pair extends to a bunch.
//!
//! For a near family `𝒜` of infinite sets with no common point, take
//! `L = A_0`, split it into unbounded asymptotically disjoint `L1, L2 ⊆ L`,
//! and cover ℕ by `X1` (asymptotically disjoint from `L1`) and `X2` (from
//! `L2`). A bunch containing `𝒜` would contain ℕ, hence `X1` or `X2`, and so
//! a set at finite Hausdorff distance from `L` inside `X1` or `X2`.
//!
//! At scale `k` the only candidate inside `X1` is `C_k = {x ∈ X1 : d(x, L) ≤ k}`:
//! any `S ⊆ X1` with `d_H(S, L) ≤ k` lies in `C_k` and has `L` within `k` of
//! it, so `d_H(C_k, L) ≤ k` as well. A point of `L` farther than `k` from
//! `C_k` therefore refutes every subset of `X1` at that scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backends::{nearness_of, LsrBackend, NearnessQuery, SetFamily};
use crate::error::{Error, Result};
use crate::famtable::{self, FamCode};
use crate::lineset::{hausdorff_at_scale, hausdorff_distance, nearest_distances, normality_split, sparsify_split, LineSet, NormalitySplit};
use crate::setcore::Family;
use crate::structures::{enumerate_bunch_codes, ExplicitNearness, ExplicitProximity};
use crate::verdict::{Budget, ExtendedDistance, TriVerdict, Witness};

/// A point of `L1` (or of `L2` when `in_l1` is false) farther than `k`
/// from the other part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessCheck {
    pub k: u64,
    pub point: u64,
    pub in_l1: bool,
    pub distance: ExtendedDistance,
}

/// `point ∈ L` has no point of the canonical candidate within `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCheck {
    pub k: u64,
    pub x1_point: Option<u64>,
    pub x2_point: Option<u64>,
}

impl CandidateCheck {
    pub fn passed(&self) -> bool {
        self.x1_point.is_some() && self.x2_point.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BunchObstruction {
    pub family: Vec<LineSet>,
    /// Largest pairwise Hausdorff distance: `ℬ = 𝒜` is a member with only unbounded sets.
    pub refinement_scale: u64,
    pub chosen: LineSet,
    pub l1: LineSet,
    pub l2: LineSet,
    pub disjointness: Vec<DisjointnessCheck>,
    pub split: NormalitySplit,
    pub candidates: Vec<CandidateCheck>,
    pub budget: Budget,
    pub verdict: TriVerdict,
}

/// Largest point of `L_i ∩ [0, hi − k]` with nothing of the candidate
/// `{x ∈ cover : d(x, L) ≤ k}` within `k`.
fn candidate_refutation(l_part: &[u64], in_cover: &[bool], dist_to_l: &[u64], k: u64, hi: u64) -> Option<u64> {
    let near: Vec<u64> = (0..=hi).filter(|&x| in_cover[x as usize] && dist_to_l[x as usize] <= k).collect();
    l_part.iter().rev().copied().filter(|&p| p + k <= hi).find(|&p| {
        let lo = p.saturating_sub(k);
        let idx = near.partition_point(|&x| x < lo);
        near.get(idx).is_none_or(|&x| x > p + k)
    })
}

pub fn bunch_obstruction(a: &[LineSet], budget: Budget) -> Result<BunchObstruction> {
    if a.is_empty() {
        return Err(Error::Precondition("empty family".into()));
    }
    let q = NearnessQuery { backend: LsrBackend::MetricLine { budget }, closure: None, family: SetFamily::Line(a.to_vec()) };
    match nearness_of(&q)? {
        TriVerdict::Yes { witness: Witness::CommonPoint { x } } => {
            return Err(Error::Precondition(format!("closures meet at {x}")))
        }
        TriVerdict::Yes { .. } => {}
        TriVerdict::No { .. } => return Err(Error::Precondition("family is not near".into())),
        TriVerdict::Unknown { .. } => {
            return Err(Error::Precondition("nearness undecided within the budget".into()))
        }
    }
    if !a.iter().all(LineSet::is_exact_tier) {
        return Err(Error::NotExactTier);
    }
    let mut refinement_scale = 0;
    for (i, x) in a.iter().enumerate() {
        for y in &a[i + 1..] {
            match hausdorff_distance(x, y)? {
                ExtendedDistance::Finite(d) => refinement_scale = refinement_scale.max(d),
                ExtendedDistance::Infinite => return Err(Error::Precondition("members at infinite distance".into())),
            }
        }
    }
    let hi = budget.window;
    let chosen = a[0].clone();
    let (l1, l2) = sparsify_split(&chosen)?;
    let disjointness = (0..=budget.scale)
        .map(|k| match hausdorff_at_scale(&l1, &l2, k, hi) {
            TriVerdict::No { witness: Witness::Point { x, in_first, distance } } => {
                DisjointnessCheck { k, point: x, in_l1: in_first, distance }
            }
            _ => DisjointnessCheck { k, point: u64::MAX, in_l1: true, distance: ExtendedDistance::Finite(0) },
        })
        .collect::<Vec<_>>();
    let split = normality_split(&l1, &l2, hi, budget.scale)?;
    let candidates = scale_candidates(&chosen, &l1, &l2, &split, budget);
    let ok = disjointness.iter().all(|d| d.point != u64::MAX) && candidates.iter().all(CandidateCheck::passed);
    let verdict = if ok {
        TriVerdict::no(Witness::Explicit {
            detail: format!(
                "no subset of X1 or X2 lies within Hausdorff distance k of L for any k ≤ {}",
                budget.scale
            ),
        })
    } else {
        TriVerdict::unknown(hi, budget.scale)
    };
    Ok(BunchObstruction {
        family: a.to_vec(),
        refinement_scale,
        chosen,
        l1,
        l2,
        disjointness,
        split,
        candidates,
        budget,
        verdict,
    })
}

fn scale_candidates(l: &LineSet, l1: &LineSet, l2: &LineSet, split: &NormalitySplit, budget: Budget) -> Vec<CandidateCheck> {
    let hi = budget.window;
    let dist = nearest_distances(l, hi);
    let (p1, p2) = (l1.window(hi), l2.window(hi));
    let in_x1 = membership(&split.x1, hi);
    let in_x2 = membership(&split.x2, hi);
    (0..=budget.scale)
        .map(|k| CandidateCheck {
            k,
            x1_point: candidate_refutation(&p1, &in_x1, &dist, k, hi),
            x2_point: candidate_refutation(&p2, &in_x2, &dist, k, hi),
        })
        .collect()
}

fn membership(s: &LineSet, hi: u64) -> Vec<bool> {
    let mut v = vec![false; hi as usize + 1];
    for x in s.window(hi) {
        v[x as usize] = true;
    }
    v
}

impl BunchObstruction {
    /// Recompute every check from the stored sets; returns the failures.
    pub fn revalidate(&self) -> Result<Vec<String>> {
        let mut errs = Vec::new();
        let hi = self.budget.window;
        if self.family.first() != Some(&self.chosen) {
            errs.push("chosen set is not the first member".into());
        }
        let (l1, l2) = sparsify_split(&self.chosen)?;
        if l1 != self.l1 || l2 != self.l2 {
            errs.push("split does not match the chosen set".into());
        }
        let within = |s: &LineSet| s.window(hi).into_iter().all(|x| self.chosen.member(x));
        if !within(&self.l1) || !within(&self.l2) {
            errs.push("split parts leave the chosen set".into());
        }
        if self.l1.is_finite() || self.l2.is_finite() {
            errs.push("split parts must be infinite".into());
        }
        for d in &self.disjointness {
            let (own, other) = if d.in_l1 { (&self.l1, &self.l2) } else { (&self.l2, &self.l1) };
            let far = other.distance_to(d.point).is_none_or(|x| x > d.k);
            if !own.member(d.point) || !far {
                errs.push(format!("disjointness witness at k = {} does not hold", d.k));
            }
        }
        if let Some(x) = (0..=hi).find(|&x| !self.split.x1.member(x) && !self.split.x2.member(x)) {
            errs.push(format!("{x} is in neither half of the split"));
        }
        let fresh = scale_candidates(&self.chosen, &self.l1, &self.l2, &self.split, self.budget);
        for (c, f) in self.candidates.iter().zip(&fresh) {
            let holds = |p: Option<u64>, part: &LineSet, cover: &LineSet| {
                p.is_some_and(|p| {
                    part.member(p)
                        && (p.saturating_sub(c.k)..=p + c.k)
                            .all(|x| !cover.member(x) || self.chosen.distance_to(x).is_none_or(|d| d > c.k))
                })
            };
            if !holds(c.x1_point, &self.l1, &self.split.x1) || !holds(c.x2_point, &self.l2, &self.split.x2) {
                errs.push(format!("candidate refutation at k = {} does not hold", c.k));
            }
            if c.passed() != f.passed() {
                errs.push(format!("candidate check at k = {} disagrees with recomputation", c.k));
            }
        }
        Ok(errs)
    }
}

/// Seeded near families of two to four infinite periodic sets with no
/// common point.
pub fn random_near_families(seed: u64, count: usize) -> Vec<Vec<LineSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let size = rng.gen_range(2..=4);
        let fam: Vec<LineSet> = (0..size)
            .map(|_| {
                let step = rng.gen_range(1..=12u64);
                let start = rng.gen_range(0..step + 8);
                let extra: Vec<u64> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..40)).collect();
                LineSet::periodic(extra, vec![(start, step)], vec![]).expect("valid")
            })
            .collect();
        if matches!(LineSet::common_point(&fam), Ok(None)) {
            out.push(fam);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// explicit bunches

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum BunchSearch {
    Found { bunch: Family },
    Exhausted { bunches_checked: usize },
}

/// A bunch containing `a`, or the count of bunches searched without one.
pub fn bunch_exists_explicit(a: &Family, n: &ExplicitNearness) -> Result<BunchSearch> {
    if a.width() != n.width() {
        return Err(Error::UniverseMismatch { left: n.width(), right: a.width() });
    }
    if !n.contains(a) {
        return Err(Error::Precondition(format!("{} is not near", n.universe().fmt_family(a))));
    }
    let code = famtable::code_of(a);
    let bunches = enumerate_bunch_codes(n);
    Ok(match bunches.iter().find(|b| famtable::is_subcode(code, **b)) {
        Some(b) => BunchSearch::Found { bunch: famtable::family_of(*b, n.width()) },
        None => BunchSearch::Exhausted { bunches_checked: bunches.len() },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub near_pairs: usize,
    pub extended: usize,
    /// Near pairs with no bunch, as `(A, B)` masks.
    pub failures: Vec<(u32, u32)>,
}

/// Every proximal pair `A δ B` of a finite proximity against the bunches of
/// its nearness.
pub fn cluster_contrast(p: &ExplicitProximity) -> Result<ContrastReport> {
    let n = ExplicitNearness::from_proximity(p)?;
    let bunches = enumerate_bunch_codes(&n);
    let full = (1u32 << p.width()) - 1;
    let mut report = ContrastReport { near_pairs: 0, extended: 0, failures: vec![] };
    for a in 0..=full {
        for b in a..=full {
            if !p.near(a, b) {
                continue;
            }
            report.near_pairs += 1;
            let code: FamCode = famtable::pair(a, b);
            if bunches.iter().any(|c| famtable::is_subcode(code, *c)) {
                report.extended += 1;
            } else {
                report.failures.push((a, b));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::Universe;
    use crate::structures::{ClosureOp, Relation};

    const SMALL: Budget = Budget { window: 100_000, scale: 32 };

    #[test]
    fn evens_odds_obstruction() {
        let ob = bunch_obstruction(&[LineSet::evens(), LineSet::odds()], SMALL).unwrap();
        assert!(ob.verdict.is_no(), "{:?}", ob.candidates.iter().find(|c| !c.passed()));
        assert_eq!(ob.refinement_scale, 1);
        assert_eq!(ob.candidates.len(), 33);
        assert!(ob.revalidate().unwrap().is_empty());
        let json = serde_json::to_string(&ob).unwrap();
        let back: BunchObstruction = serde_json::from_str(&json).unwrap();
        assert!(back.revalidate().unwrap().is_empty());
    }

    #[test]
    fn rejections() {
        let same = bunch_obstruction(&[LineSet::evens(), LineSet::evens()], SMALL);
        assert!(matches!(same, Err(Error::Precondition(_))));
        let mixed = bunch_obstruction(&[LineSet::finite([1]), LineSet::evens()], SMALL);
        assert!(matches!(mixed, Err(Error::Precondition(_))));
    }

    #[test]
    fn discrete_topological_bunch() {
        let u = Universe::letters(3).unwrap();
        let n = ExplicitNearness::topological(u.clone(), ClosureOp::discrete(3).unwrap()).unwrap();
        let a = u.family(&[vec!["a"]]).unwrap();
        match bunch_exists_explicit(&a, &n).unwrap() {
            BunchSearch::Found { bunch } => {
                let expected: Vec<_> = u.subsets().filter(|s| s.contains(0)).collect();
                assert_eq!(bunch.members(), &expected[..]);
            }
            other => panic!("{other:?}"),
        }
        let apart = u.family(&[vec!["a"], vec!["b"]]).unwrap();
        assert!(matches!(bunch_exists_explicit(&apart, &n), Err(Error::Precondition(_))));
    }

    #[test]
    fn proximity_contrast_on_three_points() {
        let u = Universe::letters(3).unwrap();
        let rel = Relation::from_partition(3, &[0b011, 0b100]).unwrap();
        let p = ExplicitProximity::from_point_relation(u, &rel).unwrap();
        let r = cluster_contrast(&p).unwrap();
        assert!(r.near_pairs > 0);
        assert_eq!(r.extended, r.near_pairs, "{:?}", r.failures);
    }
}
