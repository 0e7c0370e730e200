//! Finite universes, subsets as bit masks, and canonical families of subsets.
//!
//! A [`Subset`] is a mask over the element indices of a [`Universe`]. A
//! [`Family`] is a sorted, deduplicated list of subsets tagged with the width
//! of the universe it lives in, so that combining families from different
//! universes is caught instead of silently producing garbage.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on universe size for explicit workflows.
pub const UNIVERSE_CAP: usize = 16;

/// Default cap on the number of families a closure may materialize.
pub const CLOSURE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_cap(labels, UNIVERSE_CAP)
    }

    pub fn with_cap<I, S>(labels: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > cap.min(32) {
            return Err(Error::UniverseSize { got: labels.len(), cap: cap.min(32) });
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Universe { labels })
    }

    /// `a, b, c, ...` for small test universes.
    pub fn letters(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("x{i}")
            }
        }))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.size())
    }

    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset> {
        let mut mask = 0u32;
        for l in labels {
            mask |= 1 << self.index_of(l.as_ref())?;
        }
        Ok(Subset(mask))
    }

    pub fn family<S: AsRef<str>>(&self, members: &[Vec<S>]) -> Result<Family> {
        let subsets = members
            .iter()
            .map(|m| self.subset(m))
            .collect::<Result<Vec<_>>>()?;
        Family::new(self.size(), subsets)
    }

    pub fn point(&self, i: usize) -> Subset {
        debug_assert!(i < self.size());
        Subset(1 << i)
    }

    /// All `2^n` subsets in mask order.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        (0u32..(1u32 << self.size())).map(Subset)
    }

    pub fn fmt_subset(&self, s: Subset) -> String {
        let parts: Vec<&str> = s.iter().map(|i| self.labels[i].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn fmt_family(&self, f: &Family) -> String {
        let parts: Vec<String> = f.members().iter().map(|s| self.fmt_subset(*s)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn labels_of(&self, s: Subset) -> Vec<String> {
        s.iter().map(|i| self.labels[i].clone()).collect()
    }
}

/// A subset of a finite universe, stored as an element mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn meets(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..32).filter(move |i| m >> i & 1 == 1)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let m = self.0;
        let mut cur = Some(m);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == 0 { None } else { Some((c - 1) & m) };
            Some(Subset(c))
        })
    }

    pub fn fits(self, width: usize) -> bool {
        self.is_subset_of(Subset::full(width))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A canonical family of subsets: sorted by mask, no duplicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Family {
    width: usize,
    members: Vec<Subset>,
}

impl Family {
    pub fn new<I: IntoIterator<Item = Subset>>(width: usize, members: I) -> Result<Self> {
        let mut members: Vec<Subset> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| !s.fits(width)) {
            return Err(Error::Precondition(format!(
                "subset {bad} does not fit a universe of {width} elements"
            )));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { width, members })
    }

    /// Construction for callers that already know every mask fits.
    pub(crate) fn from_sorted(width: usize, members: Vec<Subset>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Family { width, members }
    }

    pub fn empty(width: usize) -> Self {
        Family { width, members: Vec::new() }
    }

    pub fn single(width: usize, s: Subset) -> Self {
        Family { width, members: vec![s] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.width == other.width && self.members.iter().all(|s| other.contains(*s))
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        same_width(self, other)?;
        let all = self.members.iter().chain(other.members.iter()).copied();
        Family::new(self.width, all)
    }

    /// Intersection of all members; the empty family intersects to the whole universe.
    pub fn intersection(&self) -> Subset {
        self.members
            .iter()
            .fold(Subset::full(self.width), |acc, s| acc.intersection(*s))
    }

    /// Union of all members.
    pub fn carrier(&self) -> Subset {
        self.members.iter().fold(Subset::EMPTY, |acc, s| acc.union(*s))
    }

    /// All subfamilies, the empty family first.
    pub fn subfamilies(&self) -> impl Iterator<Item = Family> + '_ {
        let k = self.members.len();
        (0u64..(1u64 << k)).map(move |pick| {
            let members = (0..k)
                .filter(|i| pick >> i & 1 == 1)
                .map(|i| self.members[i])
                .collect();
            Family::from_sorted(self.width, members)
        })
    }

    pub fn map<F: Fn(Subset) -> Subset>(&self, width: usize, f: F) -> Result<Family> {
        Family::new(width, self.members.iter().map(|s| f(*s)))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn same_width(a: &Family, b: &Family) -> Result<()> {
    if a.width != b.width {
        return Err(Error::UniverseMismatch { left: a.width, right: b.width });
    }
    Ok(())
}

/// `a ∨ b`: every pairwise union `A ∪ B`.
pub fn vee(a: &Family, b: &Family) -> Result<Family> {
    same_width(a, b)?;
    let unions = a
        .members
        .iter()
        .flat_map(|x| b.members.iter().map(move |y| x.union(*y)));
    Family::new(a.width, unions)
}

/// `b ≪ a`: every member of `a` contains some member of `b`.
pub fn ll_refines(b: &Family, a: &Family) -> Result<bool> {
    same_width(a, b)?;
    Ok(a
        .members
        .iter()
        .all(|big| b.members.iter().any(|small| small.is_subset_of(*big))))
}

/// Smallest set of families containing `fams` and closed under subfamilies.
pub fn downward_closure(fams: &[Family], cap: usize) -> Result<Vec<Family>> {
    let mut out = BTreeSet::new();
    if let Some(w) = fams.first().map(Family::width) {
        if let Some(bad) = fams.iter().find(|f| f.width != w) {
            return Err(Error::UniverseMismatch { left: w, right: bad.width });
        }
    }
    for f in fams {
        if f.len() >= 63 {
            return Err(Error::CapExceeded { what: "family size in downward closure", limit: 62 });
        }
        for sub in f.subfamilies() {
            out.insert(sub);
            if out.len() > cap {
                return Err(Error::CapExceeded { what: "downward closure size", limit: cap });
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u3() -> Universe {
        Universe::letters(3).unwrap()
    }

    #[test]
    fn vee_examples() {
        let u = u3();
        let a = u.family(&[vec!["a"]]).unwrap();
        let b = u.family(&[vec!["b"]]).unwrap();
        assert_eq!(vee(&a, &b).unwrap(), u.family(&[vec!["a", "b"]]).unwrap());

        let unit = Family::single(3, Subset::EMPTY);
        let f = u.family(&[vec!["a"], vec!["b", "c"]]).unwrap();
        assert_eq!(vee(&f, &unit).unwrap(), f);

        let x = u.family(&[vec!["a"], vec!["b"]]).unwrap();
        let y = u.family(&[vec!["b"], vec!["c"]]).unwrap();
        let expect = u
            .family(&[vec!["a", "b"], vec!["a", "c"], vec!["b"], vec!["b", "c"]])
            .unwrap();
        assert_eq!(vee(&x, &y).unwrap(), expect);
    }

    #[test]
    fn vee_rejects_mismatch() {
        let a = Family::single(3, Subset(1));
        let b = Family::single(4, Subset(1));
        assert!(matches!(vee(&a, &b), Err(Error::UniverseMismatch { .. })));
        assert!(ll_refines(&a, &b).is_err());
    }

    #[test]
    fn ll_refines_examples() {
        let u = u3();
        let a = u.family(&[vec!["a"]]).unwrap();
        let ab = u.family(&[vec!["a", "b"]]).unwrap();
        assert!(ll_refines(&a, &ab).unwrap());
        assert!(ll_refines(&ab, &ab).unwrap());
        let split = u.family(&[vec!["a"], vec!["b"]]).unwrap();
        assert!(!ll_refines(&ab, &split).unwrap());
        // member-wise inclusion does not give ≪
        assert!(!ll_refines(&a, &split).unwrap());
        assert!(a.is_subfamily_of(&split));
    }

    #[test]
    fn closure_examples() {
        let u = u3();
        let g = u.family(&[vec!["a"], vec!["a", "b"]]).unwrap();
        let c = downward_closure(std::slice::from_ref(&g), CLOSURE_CAP).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.contains(&Family::empty(3)));
        assert!(downward_closure(&[], CLOSURE_CAP).unwrap().is_empty());

        // the two generators of the three-point example share only the empty subfamily
        let g2 = u.family(&[vec!["a", "c"], vec!["a", "b", "c"]]).unwrap();
        let c = downward_closure(&[g, g2], CLOSURE_CAP).unwrap();
        assert_eq!(c.len(), 7);
    }

    #[test]
    fn closure_cap() {
        let f = Family::new(4, (0..16).map(Subset)).unwrap();
        let err = downward_closure(&[f], 100).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn universe_validation() {
        assert!(Universe::new(Vec::<String>::new()).is_err());
        assert!(matches!(Universe::new(["a", "a"]), Err(Error::DuplicateLabel(_))));
        assert!(Universe::letters(17).is_err());
        let u = u3();
        assert_eq!(u.fmt_subset(u.full()), "{a,b,c}");
        assert_eq!(Subset(0b101).subsets().count(), 4);
    }
}
