//! Large scale resemblance mappings and large scale equivalences.
//!
//! Explicit maps are checked exhaustively. Maps on ℕ are limited to affine
//! rules `n ↦ an + b` and floor division `n ↦ ⌊n/d⌋`, which keep periodic
//! sets periodic; their family conditions are checked on seeded families
//! drawn from a pool of structured sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backends::{pool, sample_families, LsrBackend, Sampling, SetFamily};
use crate::error::{Error, Result};
use crate::famtable::{self, FamCode};
use crate::lineset::{hausdorff_distance, LineSet};
use crate::structures::ExplicitLSR;
use crate::verdict::{ExtendedDistance, TriVerdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum MapRule {
    /// Point `i` of the domain goes to point `table[i]` of the codomain.
    Table { table: Vec<usize> },
    Affine { a: u64, b: u64 },
    FloorDiv { d: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceMap {
    pub domain: LsrBackend,
    pub codomain: LsrBackend,
    pub rule: MapRule,
}

impl SpaceMap {
    pub fn new(domain: LsrBackend, codomain: LsrBackend, rule: MapRule) -> Result<Self> {
        match &rule {
            MapRule::Table { table } => {
                let (dx, dy) = match (domain.universe(), codomain.universe()) {
                    (Some(x), Some(y)) => (x.size(), y.size()),
                    _ => return Err(Error::MixedRepresentations("table maps need explicit spaces")),
                };
                if table.len() != dx {
                    return Err(Error::UniverseMismatch { left: dx, right: table.len() });
                }
                if let Some(bad) = table.iter().find(|t| **t >= dy) {
                    return Err(Error::Precondition(format!("table sends a point to {bad}, outside the codomain")));
                }
            }
            MapRule::FloorDiv { d: 0 } => return Err(Error::Precondition("division by zero".into())),
            _ => {
                if domain.is_explicit() || codomain.is_explicit() {
                    return Err(Error::MixedRepresentations("rule maps need spaces on ℕ"));
                }
            }
        }
        Ok(SpaceMap { domain, codomain, rule })
    }

    pub fn identity(b: LsrBackend) -> Result<Self> {
        let rule = match b.universe() {
            Some(u) => MapRule::Table { table: (0..u.size()).collect() },
            None => MapRule::Affine { a: 1, b: 0 },
        };
        SpaceMap::new(b.clone(), b, rule)
    }

    fn table(&self) -> Result<&[usize]> {
        match &self.rule {
            MapRule::Table { table } => Ok(table),
            _ => Err(Error::Unsupported("explicit operation on a rule map".into())),
        }
    }

    pub fn image_mask(&self, s: u32) -> Result<u32> {
        let t = self.table()?;
        Ok((0..t.len()).filter(|i| s >> i & 1 == 1).fold(0, |acc, i| acc | 1 << t[i]))
    }

    pub fn preimage_mask(&self, s: u32) -> Result<u32> {
        let t = self.table()?;
        Ok((0..t.len()).filter(|i| s >> t[*i] & 1 == 1).fold(0, |acc, i| acc | 1 << i))
    }

    pub fn image_code(&self, code: FamCode) -> Result<FamCode> {
        famtable::members_of(code).try_fold(0 as FamCode, |acc, s| Ok(acc | 1 << self.image_mask(s)?))
    }

    pub fn image_line(&self, s: &LineSet) -> Result<LineSet> {
        match self.rule {
            MapRule::Affine { a, b } => s.affine_image(a, b),
            MapRule::FloorDiv { d } => s.floor_div_image(d),
            MapRule::Table { .. } => Err(Error::Unsupported("line image through a table map".into())),
        }
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &SpaceMap) -> Result<SpaceMap> {
        match (&self.rule, &g.rule) {
            (MapRule::Table { table: f }, MapRule::Table { table: h }) => SpaceMap::new(
                self.domain.clone(),
                g.codomain.clone(),
                MapRule::Table { table: f.iter().map(|i| h[*i]).collect() },
            ),
            (MapRule::Affine { a, b }, MapRule::Affine { a: c, b: e }) => SpaceMap::new(
                self.domain.clone(),
                g.codomain.clone(),
                MapRule::Affine { a: a * c, b: c * b + e },
            ),
            _ => Err(Error::Unsupported("composition outside tables and affine rules".into())),
        }
    }
}

fn explicit_pair(f: &SpaceMap) -> Result<(ExplicitLSR, ExplicitLSR)> {
    Ok((f.domain.to_explicit()?, f.codomain.to_explicit()?))
}

/// Bounded sets pull back to bounded sets and member families push forward
/// to member families.
pub fn is_lsr_map(f: &SpaceMap, sampling: Sampling) -> Result<TriVerdict> {
    if let MapRule::Table { .. } = f.rule {
        let (c, d) = explicit_pair(f)?;
        let full = (1u32 << d.width()) - 1;
        for b in 0..=full {
            if d.is_bounded(crate::Subset(b)) {
                let pre = f.preimage_mask(b)?;
                if !c.is_bounded(crate::Subset(pre)) {
                    return Ok(TriVerdict::no(Witness::Explicit {
                        detail: format!(
                            "preimage {} of bounded {} is unbounded",
                            c.universe().fmt_subset(crate::Subset(pre)),
                            d.universe().fmt_subset(crate::Subset(b))
                        ),
                    }));
                }
            }
        }
        for m in c.maximal() {
            let img = f.image_code(m)?;
            if !d.contains_code(img) {
                return Ok(TriVerdict::no(Witness::Explicit {
                    detail: format!(
                        "image of member {} is {}, not a member",
                        c.universe().fmt_family(&famtable::family_of(m, c.width())),
                        d.universe().fmt_family(&famtable::family_of(img, d.width()))
                    ),
                }));
            }
        }
        return Ok(TriVerdict::yes(Witness::Explicit { detail: "all bounded sets and maximal members checked".into() }));
    }
    if let MapRule::Affine { a: 0, b } = f.rule {
        return Ok(TriVerdict::no(Witness::Explicit { detail: format!("preimage of bounded {{{b}}} is all of ℕ") }));
    }
    let fams = sample_families(sampling);
    let mut checked = 0;
    for fam in &fams {
        if !f.domain.member(&SetFamily::Line(fam.clone()))?.is_yes() {
            continue;
        }
        let img = fam.iter().map(|s| f.image_line(s)).collect::<Result<Vec<_>>>()?;
        match f.codomain.member(&SetFamily::Line(img.clone()))? {
            TriVerdict::Yes { .. } => checked += 1,
            TriVerdict::No { .. } => {
                return Ok(TriVerdict::no(Witness::Explicit {
                    detail: format!("member family {fam:?} has image {img:?} outside the codomain structure"),
                }))
            }
            TriVerdict::Unknown { budget } => return Ok(TriVerdict::Unknown { budget }),
        }
    }
    Ok(TriVerdict::yes(Witness::Sampled { checked, max_scale: sampling.scale }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub f_is_map: TriVerdict,
    pub g_is_map: TriVerdict,
    /// "if g∘f(𝒜) is a member then g∘f(𝒜) ∪ 𝒜 is", and the same for f∘g.
    pub conditional: TriVerdict,
    /// "if 𝒜 is a member then g∘f(𝒜) ∪ 𝒜 is", and the same for f∘g.
    pub member_form: TriVerdict,
    pub verdict: TriVerdict,
}

fn round_trip_violation(c: &ExplicitLSR, there: &SpaceMap, back: &SpaceMap, conditional: bool) -> Result<Option<FamCode>> {
    for code in 0..famtable::family_count(c.width()) as FamCode {
        let img = back.image_code(there.image_code(code)?)?;
        let premise = if conditional { c.contains_code(img) } else { c.contains_code(code) };
        if premise && !c.contains_code(img | code) {
            return Ok(Some(code));
        }
    }
    Ok(None)
}

fn combine(parts: &[&TriVerdict]) -> TriVerdict {
    if let Some(no) = parts.iter().find(|v| v.is_no()) {
        return (*no).clone();
    }
    if let Some(u) = parts.iter().find(|v| v.is_unknown()) {
        return (*u).clone();
    }
    parts.last().map(|v| (*v).clone()).expect("nonempty")
}

pub fn is_ls_equivalence(f: &SpaceMap, g: &SpaceMap, sampling: Sampling) -> Result<EquivalenceReport> {
    let f_is_map = is_lsr_map(f, sampling)?;
    let g_is_map = is_lsr_map(g, sampling)?;
    let (conditional, member_form) = match (&f.rule, &g.rule) {
        (MapRule::Table { .. }, MapRule::Table { .. }) => {
            let (c, d) = explicit_pair(f)?;
            let check = |conditional: bool| -> Result<TriVerdict> {
                if let Some(a) = round_trip_violation(&c, f, g, conditional)? {
                    return Ok(TriVerdict::no(Witness::Explicit {
                        detail: format!("g∘f fails on {}", c.universe().fmt_family(&famtable::family_of(a, c.width()))),
                    }));
                }
                if let Some(b) = round_trip_violation(&d, g, f, conditional)? {
                    return Ok(TriVerdict::no(Witness::Explicit {
                        detail: format!("f∘g fails on {}", d.universe().fmt_family(&famtable::family_of(b, d.width()))),
                    }));
                }
                Ok(TriVerdict::yes(Witness::Explicit { detail: "all families of both spaces checked".into() }))
            };
            (check(true)?, check(false)?)
        }
        (MapRule::Table { .. }, _) | (_, MapRule::Table { .. }) => {
            return Err(Error::MixedRepresentations("table and rule maps cannot be paired"))
        }
        _ if [&f.domain, &f.codomain, &g.domain, &g.codomain].iter().all(|b| matches!(b, LsrBackend::MetricLine { .. })) => {
            let v = metric_round_trips(f, g, sampling)?;
            (v.clone(), v)
        }
        _ => (line_round_trips(f, g, sampling, true)?, line_round_trips(f, g, sampling, false)?),
    };
    let verdict = combine(&[&f_is_map, &g_is_map, &conditional]);
    Ok(EquivalenceReport { f_is_map, g_is_map, conditional, member_form, verdict })
}

fn line_round_trips(f: &SpaceMap, g: &SpaceMap, sampling: Sampling, conditional: bool) -> Result<TriVerdict> {
    let fams = sample_families(sampling);
    let mut checked = 0;
    for (there, back, space) in [(f, g, &f.domain), (g, f, &g.domain)] {
        for fam in &fams {
            let rt = fam
                .iter()
                .map(|s| back.image_line(&there.image_line(s)?))
                .collect::<Result<Vec<_>>>()?;
            let premise = if conditional {
                space.member(&SetFamily::Line(rt.clone()))?
            } else {
                space.member(&SetFamily::Line(fam.clone()))?
            };
            match premise {
                TriVerdict::No { .. } => continue,
                TriVerdict::Unknown { budget } => return Ok(TriVerdict::Unknown { budget }),
                TriVerdict::Yes { .. } => {}
            }
            let mut union = rt.clone();
            union.extend(fam.iter().cloned());
            match space.member(&SetFamily::Line(union))? {
                TriVerdict::Yes { .. } => checked += 1,
                TriVerdict::No { .. } => {
                    return Ok(TriVerdict::no(Witness::Explicit {
                        detail: format!("round trip of {fam:?} is {rt:?}; together they are not a member"),
                    }))
                }
                TriVerdict::Unknown { budget } => return Ok(TriVerdict::Unknown { budget }),
            }
        }
    }
    Ok(TriVerdict::yes(Witness::Sampled { checked, max_scale: sampling.scale }))
}

/// On the metric line both forms reduce to the same test: every round trip
/// moves points a bounded distance. A singleton family `{A}` is always a
/// member, and along a sparse enough `A` on which the displacement grows,
/// `d_H(h(A), A)` is infinite.
fn metric_round_trips(f: &SpaceMap, g: &SpaceMap, sampling: Sampling) -> Result<TriVerdict> {
    let mut bounds = vec![];
    for (there, back, name) in [(f, g, "g∘f"), (g, f, "f∘g")] {
        match round_trip_displacement(there, back)? {
            ExtendedDistance::Finite(r) => bounds.push(r),
            ExtendedDistance::Infinite => {
                let far = sampling.scale.max(1);
                let (n, moved) = (0..63)
                    .map(|j| 1u64 << j)
                    .filter_map(|n| Some((n, displacement_at(there, back, n)?)))
                    .find(|(_, d)| *d > far)
                    .unwrap_or((0, 0));
                return Ok(TriVerdict::no(Witness::Explicit {
                    detail: format!("{name} moves {n} by {moved}, and the displacement is unbounded"),
                }));
            }
        }
    }
    Ok(TriVerdict::yes(Witness::Explicit {
        detail: format!("g∘f moves points by at most {}, f∘g by at most {}", bounds[0], bounds[1]),
    }))
}

fn apply_rule(rule: &MapRule, n: u64) -> Option<u64> {
    match *rule {
        MapRule::Affine { a, b } => a.checked_mul(n)?.checked_add(b),
        MapRule::FloorDiv { d } => Some(n / d),
        MapRule::Table { .. } => None,
    }
}

fn displacement_at(there: &SpaceMap, back: &SpaceMap, n: u64) -> Option<u64> {
    Some(apply_rule(&back.rule, apply_rule(&there.rule, n)?)?.abs_diff(n))
}

/// `sup |back(there(n)) − n|` over ℕ, exactly. The round trip has slope
/// `a/d`; when that is not 1 the displacement grows linearly, otherwise
/// it is periodic with period dividing the product of the divisors.
pub fn round_trip_displacement(there: &SpaceMap, back: &SpaceMap) -> Result<ExtendedDistance> {
    let slope = |r: &MapRule| match *r {
        MapRule::Affine { a, .. } => Ok((a, 1)),
        MapRule::FloorDiv { d } => Ok((1, d)),
        MapRule::Table { .. } => Err(Error::Unsupported("displacement of a table map".into())),
    };
    let ((p, q), (r, s)) = (slope(&there.rule)?, slope(&back.rule)?);
    if p as u128 * r as u128 != q as u128 * s as u128 {
        return Ok(ExtendedDistance::Infinite);
    }
    let period = q.checked_mul(s).ok_or_else(|| Error::Unsupported("divisor product overflows".into()))?;
    (0..period)
        .map(|n| displacement_at(there, back, n).ok_or_else(|| Error::Unsupported("round trip overflows".into())))
        .try_fold(ExtendedDistance::Finite(0), |w, d| Ok(w.max(ExtendedDistance::Finite(d?))))
}

/// Largest `d_H(h(A), A)` over the pool for the round trip `h = g∘f`.
pub fn max_round_trip_distance(f: &SpaceMap, g: &SpaceMap, sampling: Sampling) -> Result<ExtendedDistance> {
    let mut worst = ExtendedDistance::Finite(0);
    for s in pool(&mut ChaCha8Rng::seed_from_u64(sampling.seed)) {
        let rt = g.image_line(&f.image_line(&s)?)?;
        worst = worst.max(hausdorff_distance(&rt, &s)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::Universe;

    fn abc_blocks() -> LsrBackend {
        LsrBackend::partition(Universe::letters(3).unwrap(), &[0b011, 0b100]).unwrap()
    }

    #[test]
    fn identity_is_a_map() {
        let s = Sampling { families: 40, ..Default::default() };
        for b in [abc_blocks(), LsrBackend::metric_line(), LsrBackend::TopoTrace] {
            assert!(is_lsr_map(&SpaceMap::identity(b.clone()).unwrap(), s).unwrap().is_yes());
            let id = SpaceMap::identity(b).unwrap();
            assert!(is_ls_equivalence(&id, &id, s).unwrap().verdict.is_yes());
        }
    }

    #[test]
    fn doubling_on_the_line() {
        let m = LsrBackend::metric_line();
        let s = Sampling { families: 60, ..Default::default() };
        let f = SpaceMap::new(m.clone(), m.clone(), MapRule::Affine { a: 2, b: 0 }).unwrap();
        let g = SpaceMap::new(m.clone(), m.clone(), MapRule::FloorDiv { d: 2 }).unwrap();
        assert!(is_lsr_map(&f, s).unwrap().is_yes());
        let r = is_ls_equivalence(&f, &g, s).unwrap();
        assert!(r.verdict.is_yes(), "{r:?}");
        assert!(r.member_form.is_yes());
        assert_eq!(max_round_trip_distance(&g, &f, s).unwrap(), ExtendedDistance::Finite(1));
        assert_eq!(max_round_trip_distance(&f, &g, s).unwrap(), ExtendedDistance::Finite(0));
        assert_eq!(round_trip_displacement(&g, &f).unwrap(), ExtendedDistance::Finite(1));
        assert_eq!(round_trip_displacement(&f, &g).unwrap(), ExtendedDistance::Finite(0));
    }

    #[test]
    fn mismatched_slopes_are_not_equivalences() {
        let m = LsrBackend::metric_line();
        let s = Sampling { families: 60, ..Default::default() };
        let f = SpaceMap::new(m.clone(), m.clone(), MapRule::Affine { a: 3, b: 1 }).unwrap();
        let g = SpaceMap::new(m.clone(), m.clone(), MapRule::FloorDiv { d: 2 }).unwrap();
        assert_eq!(round_trip_displacement(&f, &g).unwrap(), ExtendedDistance::Infinite);
        let r = is_ls_equivalence(&f, &g, s).unwrap();
        assert!(r.f_is_map.is_yes());
        assert!(r.verdict.is_no(), "{r:?}");
        // shifts are equivalences, with displacement the shift
        let up = SpaceMap::new(m.clone(), m.clone(), MapRule::Affine { a: 3, b: 7 }).unwrap();
        let down = SpaceMap::new(m.clone(), m, MapRule::FloorDiv { d: 3 }).unwrap();
        assert_eq!(round_trip_displacement(&up, &down).unwrap(), ExtendedDistance::Finite(2));
        assert_eq!(round_trip_displacement(&down, &up).unwrap(), ExtendedDistance::Finite(7));
        assert!(is_ls_equivalence(&up, &down, s).unwrap().verdict.is_yes());
    }

    #[test]
    fn constant_map_is_not_a_map() {
        let point = LsrBackend::Explicit(ExplicitLSR::singletons_only(Universe::letters(1).unwrap()).unwrap());
        let x = LsrBackend::Explicit(ExplicitLSR::singletons_only(Universe::letters(2).unwrap()).unwrap());
        let f = SpaceMap::new(x, point, MapRule::Table { table: vec![0, 0] }).unwrap();
        assert!(is_lsr_map(&f, Sampling::default()).unwrap().is_no());
        let m = LsrBackend::metric_line();
        let c = SpaceMap::new(m.clone(), m, MapRule::Affine { a: 0, b: 3 }).unwrap();
        assert!(is_lsr_map(&c, Sampling::default()).unwrap().is_no());
    }

    #[test]
    fn collapsing_blocks() {
        let point = LsrBackend::partition(Universe::letters(1).unwrap(), &[0b1]).unwrap();
        let f = SpaceMap::new(abc_blocks(), point.clone(), MapRule::Table { table: vec![0, 0, 0] }).unwrap();
        let g = SpaceMap::new(point, abc_blocks(), MapRule::Table { table: vec![0] }).unwrap();
        let r = is_ls_equivalence(&f, &g, Sampling::default()).unwrap();
        // {c} is bounded in the point but its preimage {a,b,c} is not bounded
        assert!(r.f_is_map.is_no());
        assert!(r.verdict.is_no());
    }

    #[test]
    fn composition_of_tables() {
        let b = abc_blocks();
        let swap = SpaceMap::new(b.clone(), b.clone(), MapRule::Table { table: vec![1, 0, 2] }).unwrap();
        let both = swap.then(&swap).unwrap();
        assert_eq!(both.rule, MapRule::Table { table: vec![0, 1, 2] });
        assert!(is_lsr_map(&both, Sampling::default()).unwrap().is_yes());
    }
}
