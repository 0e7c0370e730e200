//! Symbolic subsets of ℕ = {0, 1, 2, ...} and the Hausdorff distance engine.
//!
//! Sets come in two tiers. Finite and eventually periodic sets are the exact
//! tier: membership, rank, gaps and Hausdorff distance are all decidable.
//! Geometric and block sets have divergent gaps; they support exact membership
//! and nearest-point queries, but statements quantifying over the whole set are
//! only checked up to a window and answered with a [`TriVerdict`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verdict::{ExtendedDistance, TriVerdict, Witness};

/// Upper bound on `threshold + period` of a normalized periodic set.
pub const PERIODIC_CAP: u64 = 1 << 24;

/// Upper bound on the scan length of the exact Hausdorff engine.
pub const EXACT_SCAN_CAP: u64 = 1 << 27;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLineSet", into = "RawLineSet")]
pub enum LineSet {
    Finite(Vec<u64>),
    Periodic(Box<Periodic>),
    Blocks { rule: BlockRule, gaps: GapBehavior },
    Geometric { coefficient: u64, base: u64, start: u32 },
}

/// Which half of the power-of-four index blocks a sparsified set keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparsePart {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum BlockRule {
    /// Elements of `source` whose enumeration index `i ≥ 1` lies in
    /// `[4^j, 2·4^j)` for `j` of the given parity.
    Sparsified { source: Box<LineSet>, part: SparsePart },
    /// Runs of `width` consecutive naturals separated by gaps `2^(j+1)`.
    DoublingGaps { width: u64 },
    /// Points at least as close to `target` as to `other`.
    CloserTo { target: Box<LineSet>, other: Box<LineSet> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapBehavior {
    Bounded(u64),
    Divergent,
    Undeclared,
}

/// Eventually periodic set `(finite ∪ progressions) ∖ removals`, normalized
/// into a membership pattern on `[0, threshold + period)` that repeats with
/// `period` from `threshold` on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Periodic {
    finite: Vec<u64>,
    progressions: Vec<(u64, u64)>,
    removals: Vec<u64>,
    threshold: u64,
    period: u64,
    prefix: Vec<u64>,
}

impl Periodic {
    pub fn new(mut finite: Vec<u64>, mut progressions: Vec<(u64, u64)>, mut removals: Vec<u64>) -> Result<Self> {
        finite.sort_unstable();
        finite.dedup();
        removals.sort_unstable();
        removals.dedup();
        progressions.sort_unstable();
        progressions.dedup();
        if let Some(&(s, p)) = progressions.iter().find(|(_, p)| *p == 0) {
            return Err(Error::InvalidLineSet(format!("progression ({s}, {p}) has step 0")));
        }
        let mut period = 1u64;
        for &(_, p) in &progressions {
            period = lcm(period, p).filter(|l| *l <= PERIODIC_CAP).ok_or(Error::CapExceeded {
                what: "periodic set period",
                limit: PERIODIC_CAP as usize,
            })?;
        }
        let threshold = progressions
            .iter()
            .map(|(s, _)| *s)
            .chain(finite.last().map(|m| m + 1))
            .chain(removals.last().map(|m| m + 1))
            .max()
            .unwrap_or(0);
        let span = threshold + period;
        if span > PERIODIC_CAP {
            return Err(Error::CapExceeded { what: "periodic set threshold + period", limit: PERIODIC_CAP as usize });
        }
        let raw_member = |n: u64| {
            finite.binary_search(&n).is_ok() || progressions.iter().any(|&(s, p)| n >= s && (n - s) % p == 0)
        };
        if let Some(r) = removals.iter().find(|r| !raw_member(**r)) {
            return Err(Error::InvalidLineSet(format!("removal {r} is not an element of the set")));
        }
        let mut prefix = Vec::with_capacity(span as usize + 1);
        prefix.push(0);
        let mut count = 0;
        for n in 0..span {
            if raw_member(n) && removals.binary_search(&n).is_err() {
                count += 1;
            }
            prefix.push(count);
        }
        Ok(Periodic { finite, progressions, removals, threshold, period, prefix })
    }

    pub fn finite_part(&self) -> &[u64] {
        &self.finite
    }

    pub fn progressions(&self) -> &[(u64, u64)] {
        &self.progressions
    }

    pub fn removals(&self) -> &[u64] {
        &self.removals
    }

    /// Beyond this point membership repeats with [`Periodic::period`].
    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    fn span(&self) -> u64 {
        self.threshold + self.period
    }

    fn per_period(&self) -> u64 {
        self.prefix[self.span() as usize] - self.prefix[self.threshold as usize]
    }

    pub fn is_finite(&self) -> bool {
        self.progressions.is_empty()
    }

    pub fn member(&self, n: u64) -> bool {
        let i = if n < self.span() { n } else { self.threshold + (n - self.threshold) % self.period };
        self.prefix[i as usize + 1] > self.prefix[i as usize]
    }

    /// Number of elements `< n`.
    pub fn rank(&self, n: u64) -> u64 {
        let span = self.span();
        if n <= span {
            return self.prefix[n as usize];
        }
        let base = self.prefix[self.threshold as usize];
        let q = (n - self.threshold) / self.period;
        let r = (n - self.threshold) % self.period;
        base + q * self.per_period() + (self.prefix[(self.threshold + r) as usize] - base)
    }

    /// The `i`-th element, 0-based.
    pub fn select(&self, i: u64) -> Option<u64> {
        let span = self.span();
        let total_head = self.prefix[span as usize];
        let locate = |rank: u64| -> u64 {
            // first position whose prefix exceeds rank
            self.prefix.partition_point(|c| *c <= rank) as u64 - 1
        };
        if i < total_head {
            return Some(locate(i));
        }
        let c = self.per_period();
        if c == 0 {
            return None;
        }
        let base = self.prefix[self.threshold as usize];
        let j = i - base;
        let q = j / c;
        let r = j % c;
        let pos = locate(base + r);
        pos.checked_add(q.checked_mul(self.period)?)
    }

    /// Residues `r ∈ [threshold, threshold + period)` in the repeating pattern.
    pub fn tail_residues(&self) -> Vec<u64> {
        (self.threshold..self.span()).filter(|n| self.member(*n)).collect()
    }
}

impl LineSet {
    pub fn finite<I: IntoIterator<Item = u64>>(elements: I) -> LineSet {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        LineSet::Finite(v)
    }

    pub fn periodic(finite: Vec<u64>, progressions: Vec<(u64, u64)>, removals: Vec<u64>) -> Result<LineSet> {
        Ok(LineSet::Periodic(Box::new(Periodic::new(finite, progressions, removals)?)))
    }

    pub fn progression(start: u64, step: u64) -> Result<LineSet> {
        Self::periodic(vec![], vec![(start, step)], vec![])
    }

    pub fn naturals() -> LineSet {
        Self::progression(0, 1).expect("valid")
    }

    pub fn evens() -> LineSet {
        Self::progression(0, 2).expect("valid")
    }

    pub fn odds() -> LineSet {
        Self::progression(1, 2).expect("valid")
    }

    pub fn geometric(coefficient: u64, base: u64, start: u32) -> Result<LineSet> {
        if coefficient == 0 || base < 2 {
            return Err(Error::InvalidLineSet(format!(
                "geometric set needs coefficient ≥ 1 and base ≥ 2, got {coefficient}, {base}"
            )));
        }
        Ok(LineSet::Geometric { coefficient, base, start })
    }

    pub fn doubling_gaps(width: u64) -> Result<LineSet> {
        if width == 0 {
            return Err(Error::InvalidLineSet("doubling-gap blocks need width ≥ 1".into()));
        }
        Ok(LineSet::Blocks { rule: BlockRule::DoublingGaps { width }, gaps: GapBehavior::Divergent })
    }

    pub fn closer_to(target: LineSet, other: LineSet) -> Result<LineSet> {
        if target.is_empty() || other.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(LineSet::Blocks {
            rule: BlockRule::CloserTo { target: Box::new(target), other: Box::new(other) },
            gaps: GapBehavior::Undeclared,
        })
    }

    /// Finite or periodic.
    pub fn is_exact_tier(&self) -> bool {
        matches!(self, LineSet::Finite(_) | LineSet::Periodic(_))
    }

    pub fn member(&self, n: u64) -> bool {
        match self {
            LineSet::Finite(v) => v.binary_search(&n).is_ok(),
            LineSet::Periodic(p) => p.member(n),
            LineSet::Geometric { coefficient, base, start } => geometric_exponent(*coefficient, *base, n)
                .is_some_and(|k| k >= *start),
            LineSet::Blocks { rule, .. } => match rule {
                BlockRule::Sparsified { source, part } => {
                    source.member(n) && sparse_assigned(source.rank(n), *part)
                }
                BlockRule::DoublingGaps { width } => {
                    let j = doubling_block_at(*width, n);
                    n < doubling_start(*width, j) + width
                }
                BlockRule::CloserTo { target, other } => closer_member(target, other, n),
            },
        }
    }

    /// Number of elements `< n`.
    pub fn rank(&self, n: u64) -> u64 {
        match self {
            LineSet::Finite(v) => v.partition_point(|x| *x < n) as u64,
            LineSet::Periodic(p) => p.rank(n),
            LineSet::Geometric { coefficient, base, start } => {
                let mut count = 0;
                let mut x = geometric_first(*coefficient, *base, *start);
                while let Some(v) = x {
                    if v >= n {
                        break;
                    }
                    count += 1;
                    x = v.checked_mul(*base);
                }
                count
            }
            LineSet::Blocks { rule, .. } => match rule {
                BlockRule::Sparsified { source, part } => sparse_count_below(source.rank(n), *part),
                BlockRule::DoublingGaps { width } => {
                    if n == 0 {
                        return 0;
                    }
                    let j = doubling_block_at(*width, n - 1);
                    let s = doubling_start(*width, j);
                    j * width + (n - s).min(*width)
                }
                BlockRule::CloserTo { .. } => self.window(n.saturating_sub(1)).len() as u64 * u64::from(n > 0),
            },
        }
    }

    /// The `i`-th element, 0-based.
    pub fn select(&self, i: u64) -> Option<u64> {
        match self {
            LineSet::Finite(v) => v.get(i as usize).copied(),
            LineSet::Periodic(p) => p.select(i),
            LineSet::Geometric { coefficient, base, start } => {
                let mut x = geometric_first(*coefficient, *base, *start)?;
                for _ in 0..i {
                    x = x.checked_mul(*base)?;
                }
                Some(x)
            }
            LineSet::Blocks { rule, .. } => match rule {
                BlockRule::Sparsified { source, part } => source.select(sparse_select(i, *part)?),
                BlockRule::DoublingGaps { width } => {
                    let j = i / width;
                    Some(doubling_start(*width, j) + i % width)
                }
                BlockRule::CloserTo { .. } => {
                    let mut x = self.next_from(0)?;
                    for _ in 0..i {
                        x = self.next_from(x + 1)?;
                    }
                    Some(x)
                }
            },
        }
    }

    /// Smallest element `≥ n`.
    pub fn next_from(&self, n: u64) -> Option<u64> {
        match self {
            LineSet::Blocks { rule: BlockRule::Sparsified { source, part }, .. } => {
                let idx = sparse_next_assigned(source.rank(n), *part)?;
                source.select(idx)
            }
            LineSet::Blocks { rule: BlockRule::CloserTo { target, other }, .. } => {
                let bound = closer_upper_bound(target, other);
                let mut x = n;
                loop {
                    if bound.is_some_and(|b| x > b) {
                        return None;
                    }
                    if closer_member(target, other, x) {
                        return Some(x);
                    }
                    x = x.checked_add(1)?;
                }
            }
            _ => self.select(self.rank(n)),
        }
    }

    /// Largest element `≤ n`.
    pub fn prev_to(&self, n: u64) -> Option<u64> {
        match self {
            LineSet::Blocks { rule: BlockRule::Sparsified { source, part }, .. } => {
                let below = source.rank(n.checked_add(1)?);
                let idx = sparse_prev_assigned(below.checked_sub(1)?, *part)?;
                source.select(idx)
            }
            LineSet::Blocks { rule: BlockRule::CloserTo { target, other }, .. } => {
                (0..=n).rev().find(|x| closer_member(target, other, *x))
            }
            _ => {
                let r = self.rank(n.checked_add(1)?);
                self.select(r.checked_sub(1)?)
            }
        }
    }

    /// `d(n, self)`, `None` for the empty set.
    pub fn distance_to(&self, n: u64) -> Option<u64> {
        let up = self.next_from(n).map(|x| x - n);
        let down = self.prev_to(n).map(|x| n - x);
        match (up, down) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// All elements `≤ hi`, ascending.
    pub fn window(&self, hi: u64) -> Vec<u64> {
        match self {
            LineSet::Finite(v) => v.iter().copied().take_while(|x| *x <= hi).collect(),
            LineSet::Blocks { rule: BlockRule::CloserTo { target, other }, .. } => {
                let dt = nearest_distances(target, hi);
                let dothers = nearest_distances(other, hi);
                (0..=hi).filter(|n| dt[*n as usize] <= dothers[*n as usize]).collect()
            }
            LineSet::Blocks { rule: BlockRule::Sparsified { source, part }, .. } => source
                .window(hi)
                .into_iter()
                .enumerate()
                .filter(|(i, _)| sparse_assigned(*i as u64, *part))
                .map(|(_, x)| x)
                .collect(),
            _ => {
                let mut out = Vec::new();
                let mut i = 0;
                while let Some(x) = self.select(i) {
                    if x > hi {
                        break;
                    }
                    out.push(x);
                    i += 1;
                }
                out
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.next_from(0).is_none()
    }

    pub fn is_finite(&self) -> bool {
        match self {
            LineSet::Finite(_) => true,
            LineSet::Periodic(p) => p.is_finite(),
            LineSet::Geometric { .. } => false,
            LineSet::Blocks { rule, .. } => match rule {
                BlockRule::Sparsified { source, .. } => source.is_finite(),
                BlockRule::DoublingGaps { .. } => false,
                BlockRule::CloserTo { target, other } => closer_upper_bound(target, other).is_some(),
            },
        }
    }

    /// Largest element of a finite set.
    pub fn max_element(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        match self {
            LineSet::Finite(v) => v.last().copied(),
            LineSet::Periodic(p) => p.prefix.last().filter(|c| **c > 0).and_then(|c| p.select(c - 1)),
            _ => {
                let hi = self.finite_bound()?;
                self.prev_to(hi)
            }
        }
    }

    fn finite_bound(&self) -> Option<u64> {
        match self {
            LineSet::Finite(v) => v.last().copied(),
            LineSet::Periodic(p) if p.is_finite() => Some(p.threshold),
            LineSet::Blocks { rule: BlockRule::Sparsified { source, .. }, .. } => source.finite_bound(),
            LineSet::Blocks { rule: BlockRule::CloserTo { target, other }, .. } => {
                closer_upper_bound(target, other)
            }
            _ => None,
        }
    }

    /// Membership repeats with the period from the threshold on.
    fn threshold_period(&self) -> Option<(u64, u64)> {
        match self {
            LineSet::Finite(v) => Some((v.last().map_or(0, |m| m + 1), 1)),
            LineSet::Periodic(p) => Some((p.threshold, p.period)),
            _ => None,
        }
    }

    /// Union on the exact tier.
    pub fn union(&self, other: &LineSet) -> Result<LineSet> {
        let ((ta, la), (tb, lb)) = match (self.threshold_period(), other.threshold_period()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::NotExactTier),
        };
        if let (LineSet::Finite(a), LineSet::Finite(b)) = (self, other) {
            return Ok(LineSet::finite(a.iter().chain(b).copied()));
        }
        let t = ta.max(tb);
        let l = lcm(la, lb)
            .filter(|l| *l <= PERIODIC_CAP)
            .ok_or(Error::CapExceeded { what: "periodic set period", limit: PERIODIC_CAP as usize })?;
        let both = |n: u64| self.member(n) || other.member(n);
        let finite = (0..t).filter(|n| both(*n)).collect();
        let progressions = (t..t + l).filter(|n| both(*n)).map(|r| (r, l)).collect();
        LineSet::periodic(finite, progressions, vec![])
    }

    /// Exact subset test on the exact tier.
    pub fn is_subset_of(&self, other: &LineSet) -> Result<bool> {
        if !self.is_exact_tier() || !other.is_exact_tier() {
            return Err(Error::NotExactTier);
        }
        let limit = scan_limit(&[self, other])?;
        Ok(self.window(limit).into_iter().all(|x| other.member(x)))
    }

    /// First common element of all sets, exact on the exact tier.
    pub fn common_point(sets: &[LineSet]) -> Result<Option<u64>> {
        if sets.is_empty() {
            return Ok(Some(0));
        }
        if sets.iter().any(|s| !s.is_exact_tier()) {
            return Err(Error::NotExactTier);
        }
        let refs: Vec<&LineSet> = sets.iter().collect();
        let limit = scan_limit(&refs)?;
        Ok(sets[0].window(limit).into_iter().find(|x| sets[1..].iter().all(|s| s.member(*x))))
    }

    /// Image under `n ↦ a·n + b`; periodic stays periodic.
    pub fn affine_image(&self, a: u64, b: u64) -> Result<LineSet> {
        let f = |x: u64| x.checked_mul(a).and_then(|y| y.checked_add(b));
        let overflow = || Error::InvalidLineSet("affine image overflows".into());
        match self {
            LineSet::Finite(v) => Ok(LineSet::finite(v.iter().map(|x| f(*x)).collect::<Option<Vec<_>>>().ok_or_else(overflow)?)),
            LineSet::Periodic(p) if a == 0 => Ok(if p.rank(u64::MAX) > 0 || !p.is_finite() {
                LineSet::finite([b])
            } else {
                LineSet::finite([])
            }),
            LineSet::Periodic(p) => {
                let head: Vec<u64> = (0..p.threshold).filter(|n| p.member(*n)).collect();
                let finite = head.iter().map(|x| f(*x)).collect::<Option<Vec<_>>>().ok_or_else(overflow)?;
                let progs = p
                    .tail_residues()
                    .into_iter()
                    .map(|r| Some((f(r)?, p.period.checked_mul(a)?)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(overflow)?;
                LineSet::periodic(finite, progs, vec![])
            }
            LineSet::Geometric { .. } | LineSet::Blocks { .. } => Err(Error::NotExactTier),
        }
    }

    /// Image under `n ↦ ⌊n / d⌋`.
    pub fn floor_div_image(&self, d: u64) -> Result<LineSet> {
        if d == 0 {
            return Err(Error::InvalidLineSet("division by zero".into()));
        }
        match self {
            LineSet::Finite(v) => Ok(LineSet::finite(v.iter().map(|x| x / d))),
            LineSet::Periodic(p) => {
                let finite: Vec<u64> = (0..p.threshold).filter(|n| p.member(*n)).map(|n| n / d).collect();
                let mut progs = Vec::new();
                for r in p.tail_residues() {
                    for q in 0..d {
                        let s = r + q * p.period;
                        progs.push((s / d, p.period));
                    }
                }
                LineSet::periodic(finite, progs, vec![])
            }
            LineSet::Geometric { .. } | LineSet::Blocks { .. } => Err(Error::NotExactTier),
        }
    }
}

impl fmt::Display for LineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineSet::Finite(v) => write!(f, "finite{v:?}"),
            LineSet::Periodic(p) => {
                write!(f, "periodic(")?;
                if !p.finite.is_empty() {
                    write!(f, "{:?} ∪ ", p.finite)?;
                }
                let progs: Vec<String> = p.progressions.iter().map(|(s, q)| format!("{s}+{q}ℕ")).collect();
                write!(f, "{}", progs.join(" ∪ "))?;
                if !p.removals.is_empty() {
                    write!(f, " ∖ {:?}", p.removals)?;
                }
                write!(f, ")")
            }
            LineSet::Geometric { coefficient, base, start } => {
                write!(f, "{{{coefficient}·{base}^k : k ≥ {start}}}")
            }
            LineSet::Blocks { rule, .. } => match rule {
                BlockRule::Sparsified { source, part } => write!(f, "sparsified[{part:?}]({source})"),
                BlockRule::DoublingGaps { width } => write!(f, "doubling-gaps(width {width})"),
                BlockRule::CloserTo { target, other } => write!(f, "closer-to({target} vs {other})"),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// serialization

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
enum RawLineSet {
    Finite {
        elements: Vec<u64>,
    },
    Periodic {
        #[serde(default)]
        finite: Vec<u64>,
        progressions: Vec<(u64, u64)>,
        #[serde(default)]
        removals: Vec<u64>,
    },
    Blocks {
        #[serde(flatten)]
        rule: BlockRule,
        gaps: GapBehavior,
    },
    Geometric {
        coefficient: u64,
        base: u64,
        start: u32,
    },
}

impl TryFrom<RawLineSet> for LineSet {
    type Error = Error;

    fn try_from(raw: RawLineSet) -> Result<Self> {
        match raw {
            RawLineSet::Finite { elements } => Ok(LineSet::finite(elements)),
            RawLineSet::Periodic { finite, progressions, removals } => {
                LineSet::periodic(finite, progressions, removals)
            }
            RawLineSet::Blocks { rule, gaps } => {
                if let BlockRule::DoublingGaps { width: 0 } = rule {
                    return Err(Error::InvalidLineSet("doubling-gap blocks need width ≥ 1".into()));
                }
                Ok(LineSet::Blocks { rule, gaps })
            }
            RawLineSet::Geometric { coefficient, base, start } => LineSet::geometric(coefficient, base, start),
        }
    }
}

impl From<LineSet> for RawLineSet {
    fn from(s: LineSet) -> Self {
        match s {
            LineSet::Finite(elements) => RawLineSet::Finite { elements },
            LineSet::Periodic(p) => RawLineSet::Periodic {
                finite: p.finite,
                progressions: p.progressions,
                removals: p.removals,
            },
            LineSet::Blocks { rule, gaps } => RawLineSet::Blocks { rule, gaps },
            LineSet::Geometric { coefficient, base, start } => RawLineSet::Geometric { coefficient, base, start },
        }
    }
}

// ---------------------------------------------------------------------------
// helpers per variant

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

fn geometric_first(m: u64, b: u64, start: u32) -> Option<u64> {
    b.checked_pow(start).and_then(|p| p.checked_mul(m))
}

/// `k` with `n = m·b^k`, if any.
fn geometric_exponent(m: u64, b: u64, n: u64) -> Option<u32> {
    if n == 0 || n % m != 0 {
        return None;
    }
    let mut q = n / m;
    let mut k = 0;
    while q % b == 0 {
        q /= b;
        k += 1;
    }
    (q == 1).then_some(k)
}

fn pow4(j: u32) -> Option<u64> {
    4u64.checked_pow(j)
}

fn parity_ok(j: u32, part: SparsePart) -> bool {
    (j % 2 == 0) == (part == SparsePart::Even)
}

fn log4(i: u64) -> u32 {
    (63 - i.leading_zeros()) / 2
}

fn sparse_assigned(i: u64, part: SparsePart) -> bool {
    if i == 0 {
        return false;
    }
    let j = log4(i);
    parity_ok(j, part) && i < 2 * pow4(j).expect("j ≤ 31")
}

fn sparse_next_assigned(i: u64, part: SparsePart) -> Option<u64> {
    let i = i.max(1);
    let mut j = log4(i);
    loop {
        if parity_ok(j, part) {
            let lo = pow4(j)?;
            let start = lo.max(i);
            if start < lo.checked_mul(2)? {
                return Some(start);
            }
        }
        j += 1;
    }
}

fn sparse_prev_assigned(i: u64, part: SparsePart) -> Option<u64> {
    if i == 0 {
        return None;
    }
    let mut j = log4(i) as i64;
    while j >= 0 {
        let jj = j as u32;
        if parity_ok(jj, part) {
            let lo = pow4(jj)?;
            let end = (2 * lo - 1).min(i);
            if end >= lo {
                return Some(end);
            }
        }
        j -= 1;
    }
    None
}

/// Assigned indices `< m`.
fn sparse_count_below(m: u64, part: SparsePart) -> u64 {
    let mut count = 0;
    let mut j = 0u32;
    while let Some(lo) = pow4(j) {
        if lo >= m {
            break;
        }
        if parity_ok(j, part) {
            count += (2 * lo).min(m) - lo;
        }
        j += 1;
    }
    count
}

fn sparse_select(i: u64, part: SparsePart) -> Option<u64> {
    let mut rest = i;
    let mut j = 0u32;
    loop {
        let lo = pow4(j)?;
        if parity_ok(j, part) {
            if rest < lo {
                return Some(lo + rest);
            }
            rest -= lo;
        }
        j += 1;
    }
}

fn doubling_start(width: u64, j: u64) -> u64 {
    // s_j = j·w + 2^(j+1) − 2
    j.saturating_mul(width)
        .saturating_add(1u64.checked_shl((j + 1) as u32).unwrap_or(u64::MAX))
        .saturating_sub(2)
}

fn doubling_block_at(width: u64, n: u64) -> u64 {
    let mut j = 0;
    while doubling_start(width, j + 1) <= n {
        j += 1;
    }
    j
}

fn closer_member(target: &LineSet, other: &LineSet, n: u64) -> bool {
    let dt = target.distance_to(n).unwrap_or(u64::MAX);
    let dothers = other.distance_to(n).unwrap_or(u64::MAX);
    dt <= dothers
}

/// Every element of `closer-to(target, other)` is `≤` the bound; `None` when
/// the set is infinite.
fn closer_upper_bound(target: &LineSet, other: &LineSet) -> Option<u64> {
    if !target.is_finite() {
        return None;
    }
    let max_t = target.max_element()?;
    if other.is_finite() {
        let max_o = other.max_element()?;
        if max_o <= max_t {
            None
        } else {
            Some(max_o)
        }
    } else {
        other.next_from(max_t + 1)
    }
}

/// `d(n, s)` for every `n ∈ [0, hi]`, `u64::MAX` when `s` is empty.
pub fn nearest_distances(s: &LineSet, hi: u64) -> Vec<u64> {
    let mut pts = s.window(hi);
    if let Some(nx) = hi.checked_add(1).and_then(|h| s.next_from(h)) {
        pts.push(nx);
    }
    let mut out = Vec::with_capacity(hi as usize + 1);
    let mut idx = 0;
    for n in 0..=hi {
        while idx < pts.len() && pts[idx] < n {
            idx += 1;
        }
        let up = pts.get(idx).map(|x| x - n);
        let down = idx.checked_sub(1).map(|i| n - pts[i]);
        out.push(match (up, down) {
            (Some(a), Some(b)) => a.min(b),
            (a, b) => a.or(b).unwrap_or(u64::MAX),
        });
    }
    out
}

/// Scan length after which the joint behaviour of exact-tier sets repeats.
fn scan_limit(sets: &[&LineSet]) -> Result<u64> {
    let mut threshold = 0u64;
    let mut max_period = 1u64;
    let mut joint = 1u64;
    for s in sets {
        match s {
            LineSet::Finite(v) => threshold = threshold.max(v.last().map_or(0, |m| m + 1)),
            LineSet::Periodic(p) => {
                threshold = threshold.max(p.threshold);
                max_period = max_period.max(p.period);
                joint = lcm(joint, p.period).ok_or(Error::CapExceeded {
                    what: "joint period",
                    limit: EXACT_SCAN_CAP as usize,
                })?;
            }
            _ => return Err(Error::NotExactTier),
        }
    }
    let limit = threshold
        .checked_add(max_period)
        .and_then(|x| x.checked_add(joint.checked_mul(2)?))
        .filter(|l| *l <= EXACT_SCAN_CAP)
        .ok_or(Error::CapExceeded { what: "exact scan length", limit: EXACT_SCAN_CAP as usize })?;
    Ok(limit)
}

// ---------------------------------------------------------------------------
// Hausdorff engine

/// Largest `d(x, to)` over `x ∈ from ∩ [0, limit]`, with the maximizing point.
fn directed_sup(from: &LineSet, to: &LineSet, limit: u64) -> (u64, Option<u64>) {
    let mut best = (0, None);
    for x in from.window(limit) {
        let d = to.distance_to(x).unwrap_or(u64::MAX);
        if best.1.is_none() || d > best.0 {
            best = (d, Some(x));
        }
    }
    best
}

/// Exact extended Hausdorff distance between nonempty exact-tier sets.
pub fn hausdorff_distance(a: &LineSet, b: &LineSet) -> Result<ExtendedDistance> {
    if !a.is_exact_tier() || !b.is_exact_tier() {
        return Err(Error::NotExactTier);
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.is_finite() != b.is_finite() {
        return Ok(ExtendedDistance::Infinite);
    }
    let limit = scan_limit(&[a, b])?;
    let (ab, _) = directed_sup(a, b, limit);
    let (ba, _) = directed_sup(b, a, limit);
    Ok(ExtendedDistance::Finite(ab.max(ba)))
}

/// First point of `from` in `[0, limit]` farther than `k` from `to`.
fn first_far_point(from: &LineSet, to: &LineSet, k: u64, limit: u64) -> Option<(u64, u64)> {
    from.window(limit)
        .into_iter()
        .map(|x| (x, to.distance_to(x).unwrap_or(u64::MAX)))
        .find(|(_, d)| *d > k)
}

fn far_witness(a: &LineSet, b: &LineSet, k: u64, limit: u64) -> Option<Witness> {
    let wa = first_far_point(a, b, k, limit).map(|(x, d)| (x, true, d));
    let wb = first_far_point(b, a, k, limit).map(|(x, d)| (x, false, d));
    let pick = match (wa, wb) {
        (Some(p), Some(q)) => Some(if q.0 < p.0 { q } else { p }),
        (p, q) => p.or(q),
    };
    pick.map(|(x, in_first, d)| Witness::Point {
        x,
        in_first,
        distance: if d == u64::MAX { ExtendedDistance::Infinite } else { ExtendedDistance::Finite(d) },
    })
}

/// Is `d_H(a, b) ≤ k`? Exact for the exact tier and for finite-versus-infinite
/// pairs; otherwise a refutation is searched among points `≤ hi − k`.
pub fn hausdorff_at_scale(a: &LineSet, b: &LineSet, k: u64, hi: u64) -> TriVerdict {
    if a.is_empty() || b.is_empty() {
        return TriVerdict::unknown(hi, k);
    }
    if a.is_exact_tier() && b.is_exact_tier() {
        if let Ok(d) = hausdorff_distance(a, b) {
            if d.at_most(k) {
                return TriVerdict::yes(Witness::Scale { k: d.finite().unwrap_or(k) });
            }
            let limit = match d {
                ExtendedDistance::Infinite => {
                    let (fin, inf) = if a.is_finite() { (a, b) } else { (b, a) };
                    let m = fin.max_element().unwrap_or(0);
                    inf.next_from(m + k + 1).unwrap_or(m + k + 1)
                }
                ExtendedDistance::Finite(_) => scan_limit(&[a, b]).unwrap_or(hi),
            };
            if let Some(w) = far_witness(a, b, k, limit) {
                return TriVerdict::no(w);
            }
        }
    }
    if a == b {
        return TriVerdict::yes(Witness::Scale { k: 0 });
    }
    if a.is_finite() != b.is_finite() {
        let (fin, inf) = if a.is_finite() { (a, b) } else { (b, a) };
        let m = fin.max_element().unwrap_or(0);
        if let Some(x) = inf.next_from(m.saturating_add(k).saturating_add(1)) {
            let d = fin.distance_to(x).unwrap_or(u64::MAX);
            return TriVerdict::no(Witness::Point {
                x,
                in_first: std::ptr::eq(inf, a),
                distance: ExtendedDistance::Finite(d),
            });
        }
    }
    let limit = hi.saturating_sub(k);
    match far_witness(a, b, k, limit) {
        Some(w) => TriVerdict::no(w),
        None => TriVerdict::unknown(hi, k),
    }
}

/// Look for consecutive elements with a gap larger than `g`.
pub fn verify_gap_certificate(s: &LineSet, g: u64, hi: u64) -> TriVerdict {
    let exact_limit = if s.is_exact_tier() { scan_limit(&[s]).ok() } else { None };
    let limit = exact_limit.unwrap_or(hi);
    let pts = s.window(limit);
    let mut max_gap = 0;
    for w in pts.windows(2) {
        let gap = w[1] - w[0];
        if gap > g {
            return TriVerdict::yes(Witness::Gap { lo: w[0], hi: w[1] });
        }
        max_gap = max_gap.max(gap);
    }
    if exact_limit.is_some() {
        TriVerdict::no(Witness::MaxGap { gap: max_gap })
    } else {
        TriVerdict::unknown(hi, g)
    }
}

/// Two infinite subsets of `l` whose mutual distances diverge: the elements
/// whose enumeration index lies in `[4^j, 2·4^j)` for even `j`, and for odd `j`.
pub fn sparsify_split(l: &LineSet) -> Result<(LineSet, LineSet)> {
    if l.is_finite() {
        return Err(Error::NotInfinite);
    }
    let part = |p| LineSet::Blocks {
        rule: BlockRule::Sparsified { source: Box::new(l.clone()), part: p },
        gaps: GapBehavior::Divergent,
    };
    Ok((part(SparsePart::Even), part(SparsePart::Odd)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleAudit {
    pub k: u64,
    /// Largest point of `x1` within `k` of `a` (window-restricted).
    pub last_near_a_in_x1: Option<u64>,
    /// Largest point of `x2` within `k` of `b`.
    pub last_near_b_in_x2: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalitySplit {
    /// Points at least as close to `b` as to `a`.
    pub x1: LineSet,
    /// Points at least as close to `a` as to `b`.
    pub x2: LineSet,
    pub window: u64,
    pub scales: Vec<ScaleAudit>,
    pub verdict: TriVerdict,
}

/// Cover ℕ by `x1 ∪ x2` with `x1` far from `a` and `x2` far from `b`.
///
/// The verdict is `Yes` when `x1 ∪ x2 ⊇ [0, hi]` and, at every scale
/// `k ≤ max_scale`, the points of `x1` within `k` of `a` (and of `x2` within
/// `k` of `b`) all sit in the lower half of the window.
pub fn normality_split(a: &LineSet, b: &LineSet, hi: u64, max_scale: u64) -> Result<NormalitySplit> {
    let x1 = LineSet::closer_to(b.clone(), a.clone())?;
    let x2 = LineSet::closer_to(a.clone(), b.clone())?;
    let da = nearest_distances(a, hi);
    let db = nearest_distances(b, hi);
    let mut near1 = vec![None; max_scale as usize + 1];
    let mut near2 = vec![None; max_scale as usize + 1];
    let mut covered = true;
    for n in 0..=hi {
        let (p, q) = (da[n as usize], db[n as usize]);
        let in1 = q <= p;
        let in2 = p <= q;
        covered &= in1 || in2;
        if in1 && p <= max_scale {
            for k in p..=max_scale {
                if n + k <= hi {
                    near1[k as usize] = Some(n);
                }
            }
        }
        if in2 && q <= max_scale {
            for k in q..=max_scale {
                if n + k <= hi {
                    near2[k as usize] = Some(n);
                }
            }
        }
    }
    let scales: Vec<ScaleAudit> = (0..=max_scale)
        .map(|k| ScaleAudit {
            k,
            last_near_a_in_x1: near1[k as usize],
            last_near_b_in_x2: near2[k as usize],
        })
        .collect();
    let half = hi / 2;
    let clear = scales
        .iter()
        .all(|s| s.last_near_a_in_x1.is_none_or(|x| x < half) && s.last_near_b_in_x2.is_none_or(|x| x < half));
    let verdict = if !covered {
        // ties go to both sides, so this cannot happen
        TriVerdict::no(Witness::Explicit { detail: "x1 ∪ x2 misses a point".into() })
    } else if clear {
        TriVerdict::yes(Witness::Explicit {
            detail: format!(
                "x1 ∪ x2 = [0,{hi}]; near-candidates confined below {half} at every scale ≤ {max_scale}"
            ),
        })
    } else {
        TriVerdict::unknown(hi, max_scale)
    };
    Ok(NormalitySplit { x1, x2, window: hi, scales, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> LineSet {
        LineSet::naturals()
    }

    #[test]
    fn membership_examples() {
        assert!(LineSet::evens().member(4));
        let pow2 = LineSet::geometric(1, 2, 1).unwrap();
        assert!(!pow2.member(12));
        assert!(pow2.member(16));
        assert!(!pow2.member(1));
        let s = LineSet::periodic(vec![], vec![(1, 3)], vec![7]).unwrap();
        assert!(!s.member(7));
        assert!(s.member(10));
    }

    #[test]
    fn window_examples() {
        assert_eq!(LineSet::evens().window(5), vec![0, 2, 4]);
        assert_eq!(LineSet::geometric(1, 2, 1).unwrap().window(20), vec![2, 4, 8, 16]);
        assert_eq!(nat().window(3), vec![0, 1, 2, 3]);
    }

    #[test]
    fn finiteness_examples() {
        assert!(LineSet::finite([1, 5, 9]).is_finite());
        assert!(!LineSet::evens().is_finite());
        assert!(LineSet::periodic(vec![3], vec![], vec![]).unwrap().is_finite());
        assert!(!LineSet::geometric(3, 2, 0).unwrap().is_finite());
    }

    #[test]
    fn invalid_periodic_rejected() {
        assert!(LineSet::periodic(vec![], vec![(0, 2)], vec![3]).is_err());
        assert!(LineSet::periodic(vec![], vec![(0, 0)], vec![]).is_err());
        assert!(LineSet::geometric(1, 1, 0).is_err());
    }

    #[test]
    fn rank_select_agree_with_window() {
        let sets = vec![
            LineSet::periodic(vec![2, 9], vec![(5, 4), (3, 6)], vec![9, 15]).unwrap(),
            LineSet::geometric(3, 2, 1).unwrap(),
            LineSet::doubling_gaps(3).unwrap(),
            sparsify_split(&LineSet::odds()).unwrap().0,
            sparsify_split(&nat()).unwrap().1,
        ];
        for s in &sets {
            let w = s.window(400);
            for (i, x) in w.iter().enumerate() {
                assert_eq!(s.select(i as u64), Some(*x), "{s}");
                assert_eq!(s.rank(*x), i as u64, "{s}");
            }
            for n in 0..400u64 {
                assert_eq!(s.member(n), w.contains(&n), "{s} at {n}");
                let next = w.iter().copied().find(|x| *x >= n);
                if next.is_some() {
                    assert_eq!(s.next_from(n), next, "{s} next {n}");
                }
                assert_eq!(s.prev_to(n), w.iter().copied().rev().find(|x| *x <= n), "{s} prev {n}");
            }
        }
    }

    #[test]
    fn hausdorff_examples() {
        let e = LineSet::evens();
        assert_eq!(hausdorff_distance(&e, &e).unwrap(), ExtendedDistance::Finite(0));
        assert_eq!(hausdorff_distance(&e, &LineSet::odds()).unwrap(), ExtendedDistance::Finite(1));
        assert_eq!(hausdorff_distance(&LineSet::finite([0]), &e).unwrap(), ExtendedDistance::Infinite);
        assert_eq!(
            hausdorff_distance(&LineSet::finite([1, 10]), &LineSet::finite([4])).unwrap(),
            ExtendedDistance::Finite(6)
        );
        assert!(matches!(hausdorff_distance(&LineSet::finite([]), &e), Err(Error::EmptySet)));
        let g = LineSet::geometric(1, 2, 1).unwrap();
        assert!(matches!(hausdorff_distance(&g, &e), Err(Error::NotExactTier)));
    }

    #[test]
    fn scale_check_examples() {
        let a1 = LineSet::geometric(1, 2, 1).unwrap();
        let a2 = LineSet::geometric(1, 4, 1).unwrap();
        match hausdorff_at_scale(&a1, &a2, 10, 1_000_000) {
            TriVerdict::No { witness: Witness::Point { x, in_first, distance } } => {
                // 32 is the first power of two more than 10 away from every power of four
                assert_eq!((x, in_first), (32, true));
                assert_eq!(distance, ExtendedDistance::Finite(16));
            }
            other => panic!("unexpected {other:?}"),
        }
        let v = hausdorff_at_scale(&LineSet::evens(), &LineSet::odds(), 1, 100);
        assert_eq!(v, TriVerdict::yes(Witness::Scale { k: 1 }));

        let blocks = LineSet::doubling_gaps(2).unwrap();
        match hausdorff_at_scale(&blocks, &nat(), 5, 10_000) {
            TriVerdict::No { witness: Witness::Point { x, in_first: false, distance } } => {
                assert!(distance.finite().unwrap() > 5);
                assert!(!blocks.member(x));
            }
            other => panic!("unexpected {other:?}"),
        }
        // identical non-exact descriptors
        assert!(hausdorff_at_scale(&a1, &a1, 0, 10).is_yes());
        // same set, different descriptor: no refutation exists
        assert!(hausdorff_at_scale(&a1, &LineSet::geometric(2, 2, 0).unwrap(), 0, 100).is_unknown());
    }

    #[test]
    fn gap_certificates() {
        let e = LineSet::evens();
        assert_eq!(verify_gap_certificate(&e, 1, 10), TriVerdict::yes(Witness::Gap { lo: 0, hi: 2 }));
        assert_eq!(verify_gap_certificate(&e, 2, 10), TriVerdict::no(Witness::MaxGap { gap: 2 }));
        let g = LineSet::geometric(1, 2, 1).unwrap();
        assert_eq!(verify_gap_certificate(&g, 100, 1000), TriVerdict::yes(Witness::Gap { lo: 128, hi: 256 }));
        assert!(verify_gap_certificate(&g, 1000, 1000).is_unknown());
    }

    #[test]
    fn sparsify_naturals() {
        let (l1, l2) = sparsify_split(&nat()).unwrap();
        let mut expect1 = vec![1];
        expect1.extend(16..=20);
        assert_eq!(l1.window(20), expect1);
        assert_eq!(l2.window(20), vec![4, 5, 6, 7]);
        assert!(!l1.is_finite() && !l2.is_finite());
        for k in [0, 1, 8, 64] {
            assert!(hausdorff_at_scale(&l1, &l2, k, 1_000_000).is_no(), "k = {k}");
        }
        assert!(matches!(sparsify_split(&LineSet::finite([1, 2])), Err(Error::NotInfinite)));
    }

    #[test]
    fn normality_split_examples() {
        let a = LineSet::geometric(1, 2, 1).unwrap();
        let b = LineSet::finite([0]);
        let split = normality_split(&a, &b, 1000, 8).unwrap();
        // x1 holds the points with d(n, a) ≥ n
        assert_eq!(split.x1.window(1000), vec![0, 1]);
        assert_eq!(split.x2.window(1000), (1..=1000).collect::<Vec<_>>());
        assert!(split.x1.is_finite());
        assert!(!split.x2.is_finite());
        assert!(split.verdict.is_yes());

        let (l1, l2) = sparsify_split(&nat()).unwrap();
        let split = normality_split(&l1, &l2, 100_000, 32).unwrap();
        assert!(split.verdict.is_yes(), "{:?}", split.verdict);
    }

    #[test]
    fn serde_roundtrip_and_schema() {
        let s: LineSet = serde_json::from_str(r#"{"kind":"periodic","progressions":[[1,3]],"removals":[7]}"#).unwrap();
        assert!(!s.member(7));
        let (l1, _) = sparsify_split(&s).unwrap();
        let json = serde_json::to_string(&l1).unwrap();
        assert!(json.contains(r#""rule":"sparsified""#));
        let back: LineSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l1);
        assert!(serde_json::from_str::<LineSet>(r#"{"kind":"geometric","coefficient":1,"base":1,"start":0}"#).is_err());
    }

    #[test]
    fn affine_and_floor_images() {
        let e = LineSet::periodic(vec![1], vec![(3, 4)], vec![7]).unwrap();
        let img = e.affine_image(2, 1).unwrap();
        for n in 0..200 {
            assert_eq!(img.member(2 * n + 1), e.member(n));
        }
        let half = e.floor_div_image(2).unwrap();
        for m in 0..200 {
            assert_eq!(half.member(m), e.member(2 * m) || e.member(2 * m + 1), "m = {m}");
        }
    }
}
