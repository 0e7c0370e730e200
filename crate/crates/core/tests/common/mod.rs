//! Independent oracles shared by the integration suites. Nothing here calls
//! the library's own decision procedures; it recomputes from definitions.
#![allow(dead_code)]

use std::collections::BTreeSet;

use coarselab::famtable::FamCode;
use coarselab::structures::{ExplicitASR, ExplicitLSR};
use coarselab::{Family, LineSet, Subset, Universe};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// family codes, by hand

pub fn members(code: FamCode) -> Vec<u32> {
    (0..32).filter(|s| code >> s & 1 == 1).collect()
}

pub fn code(ms: &[u32]) -> FamCode {
    ms.iter().fold(0, |c, s| c | 1 << s)
}

pub fn vee(a: FamCode, b: FamCode) -> FamCode {
    let mut out = 0;
    for s in members(a) {
        for t in members(b) {
            out |= 1 << (s | t);
        }
    }
    out
}

/// Every code that is a member of the structure, by scanning all codes.
pub fn table(c: &ExplicitLSR) -> Vec<FamCode> {
    let subsets = 1u64 << c.width();
    (0..(1u64 << subsets)).map(|x| x as FamCode).filter(|x| c.contains_code(*x)).collect()
}

pub fn is_bounded(c: &ExplicitLSR, b: u32) -> bool {
    (0..c.width()).any(|x| c.contains_code(1 << b | 1 << (1u32 << x)))
}

pub fn alike(c: &ExplicitLSR, a: u32, b: u32) -> bool {
    c.contains_code(1 << a | 1 << b)
}

pub fn connected(c: &ExplicitLSR) -> bool {
    (0..c.width()).all(|x| (0..c.width()).all(|y| alike(c, 1 << x, 1 << y)))
}

/// LS-regularity straight from the definition, over all members and splits.
pub fn ls_regular(c: &ExplicitLSR) -> bool {
    let t = table(c);
    t.iter().all(|&fam| split_ok_everywhere(c, &t, fam))
}

fn split_ok_everywhere(c: &ExplicitLSR, t: &[FamCode], fam: FamCode) -> bool {
    members(fam).into_iter().all(|a| {
        (1..=a).filter(|a1| a1 & !a == 0).all(|a1| {
            (1..=a).filter(|a2| a2 & !a == 0 && a1 | a2 == a).all(|a2| split_ok(c, t, fam, a1, a2))
        })
    })
}

pub fn split_ok(_c: &ExplicitLSR, t: &[FamCode], fam: FamCode, a1: u32, a2: u32) -> bool {
    let with = |s: u32| t.iter().copied().filter(move |f| f >> s & 1 == 1);
    with(a1).any(|f1| with(a2).any(|f2| fam & !vee(f1, f2) == 0))
}

/// Transversal-family uniform boundedness: every subfamily `𝒲` has
/// `{A ⊆ ⋃𝒲 : A meets every W}` as a member.
pub fn uniformly_bounded(c: &ExplicitLSR, cover: &[u32]) -> bool {
    let n = cover.len();
    (0..1u32 << n).all(|pick| {
        let w: Vec<u32> = (0..n).filter(|i| pick >> i & 1 == 1).map(|i| cover[i]).collect();
        let top = w.iter().fold(0, |u, s| u | s);
        let fam: Vec<u32> = (0..=top).filter(|a| a & !top == 0 && w.iter().all(|m| m & a != 0)).collect();
        c.contains_code(code(&fam))
    })
}

pub fn asr_uniformly_bounded(l: &ExplicitASR, cover: &[u32]) -> bool {
    let image = |b: u32| cover.iter().filter(|u| *u & b != 0).fold(0, |acc, u| acc | u);
    let n = 1u32 << l.width();
    (0..n).all(|a| (0..n).all(|b| !(a & !image(b) == 0 && b & !image(a) == 0) || l.alike(a, b)))
}

pub fn multiplicity(width: usize, cover: &[u32]) -> usize {
    (0..width).map(|x| cover.iter().filter(|u| *u >> x & 1 == 1).count()).max().unwrap_or(0)
}

pub fn refines(u: &[u32], v: &[u32]) -> bool {
    u.iter().all(|a| v.iter().any(|b| a & !b == 0))
}

/// Least `n` such that every uniformly bounded cover refines a uniformly
/// bounded cover of multiplicity `≤ n + 1`, over covers by nonempty sets
/// without repeated members.
pub fn asdim(c: &ExplicitLSR) -> usize {
    let w = c.width();
    let full = (1u32 << w) - 1;
    let nonempty: Vec<u32> = (1..=full).collect();
    let mut covers = vec![];
    for pick in 1u64..(1u64 << nonempty.len()) {
        let cv: Vec<u32> = (0..nonempty.len()).filter(|i| pick >> i & 1 == 1).map(|i| nonempty[i]).collect();
        if cv.iter().fold(0, |a, s| a | s) == full && uniformly_bounded(c, &cv) {
            covers.push(cv);
        }
    }
    covers
        .iter()
        .map(|u| covers.iter().filter(|v| refines(u, v)).map(|v| multiplicity(w, v)).min().unwrap())
        .max()
        .map_or(0, |m| m.saturating_sub(1))
}

// ---------------------------------------------------------------------------
// enumeration

/// Set partitions of `0..n` as class masks.
pub fn partitions(n: usize) -> Vec<Vec<u32>> {
    fn go(i: usize, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..cur.len() {
            cur[k] |= 1 << i;
            go(i + 1, n, cur, out);
            cur[k] &= !(1 << i);
        }
        cur.push(1 << i);
        go(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = vec![];
    go(0, n, &mut vec![], &mut out);
    out
}

fn fam(n: usize, ms: &[u32]) -> Family {
    Family::new(n, ms.iter().map(|m| Subset(*m))).unwrap()
}

/// LS.Rs generated by one family of two or three subsets, or by two
/// two-set families, deduplicated.
pub fn lsr_pool(n: usize) -> Vec<ExplicitLSR> {
    let u = Universe::letters(n).unwrap();
    let subs: Vec<u32> = (0..1u32 << n).collect();
    let mut pairs = vec![];
    let mut gens: Vec<Vec<Family>> = vec![vec![]];
    for i in 0..subs.len() {
        for j in i + 1..subs.len() {
            pairs.push(fam(n, &[subs[i], subs[j]]));
            for k in j + 1..subs.len() {
                gens.push(vec![fam(n, &[subs[i], subs[j], subs[k]])]);
            }
        }
    }
    for i in 0..pairs.len() {
        gens.push(vec![pairs[i].clone()]);
        for j in i + 1..pairs.len() {
            gens.push(vec![pairs[i].clone(), pairs[j].clone()]);
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for g in gens {
        let c = ExplicitLSR::generated_by(u.clone(), &g).unwrap();
        if seen.insert(c.maximal()) {
            out.push(c);
        }
    }
    out
}

pub fn random_lsr(n: usize, rng: &mut ChaCha8Rng) -> ExplicitLSR {
    let u = Universe::letters(n).unwrap();
    let count = rng.gen_range(1..=2);
    let gens: Vec<Family> = (0..count)
        .map(|_| {
            let size = rng.gen_range(2..=3);
            let ms: BTreeSet<u32> = (0..size).map(|_| rng.gen_range(0..1u32 << n)).collect();
            fam(n, &ms.into_iter().collect::<Vec<_>>())
        })
        .collect();
    ExplicitLSR::generated_by(u, &gens).unwrap()
}

pub fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut classes: Vec<u32> = vec![0; n];
    for (i, l) in labels.iter().enumerate() {
        classes[*l] |= 1 << i;
    }
    classes.retain(|c| *c != 0);
    classes
}

// ---------------------------------------------------------------------------
// line sets

/// A random eventually periodic set plus the oracle's own window bound
/// `N₀ + 2L` from the generating parameters.
pub struct RandomPeriodic {
    pub set: LineSet,
    pub settle: u64,
    pub period: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn random_periodic(rng: &mut ChaCha8Rng, finite_chance: f64) -> RandomPeriodic {
    let finite: Vec<u64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..40)).collect();
    if rng.gen_bool(finite_chance) {
        let mut f = finite;
        f.push(rng.gen_range(0..40));
        let settle = f.iter().max().unwrap() + 1;
        return RandomPeriodic { set: LineSet::finite(f), settle, period: 1 };
    }
    let progs: Vec<(u64, u64)> = (0..rng.gen_range(1..=2)).map(|_| (rng.gen_range(0..25), rng.gen_range(1..=12))).collect();
    let base = LineSet::periodic(finite.clone(), progs.clone(), vec![]).unwrap();
    let early = window(&base, 50);
    let mut removals: Vec<u64> = (0..rng.gen_range(0..3)).map(|_| early[rng.gen_range(0..early.len())]).collect();
    removals.sort_unstable();
    removals.dedup();
    let settle = finite.iter().chain(&removals).chain(progs.iter().map(|p| &p.0)).max().unwrap() + 1;
    let period = progs.iter().fold(1, |l, p| lcm(l, p.1));
    let set = LineSet::periodic(finite, progs, removals).unwrap();
    RandomPeriodic { set, settle, period }
}

/// Membership by the generating description on `[0, hi]`.
pub fn window(s: &LineSet, hi: u64) -> Vec<u64> {
    (0..=hi).filter(|n| s.member(*n)).collect()
}

/// Distance from `x` to the sorted set `b`, scanning both neighbours.
pub fn dist(x: u64, b: &[u64]) -> Option<u64> {
    let i = b.partition_point(|y| *y < x);
    let right = b.get(i).map(|y| y - x);
    let left = i.checked_sub(1).map(|j| x - b[j]);
    match (left, right) {
        (Some(l), Some(r)) => Some(l.min(r)),
        (l, r) => l.or(r),
    }
}

/// Brute-force Hausdorff distance on a window: `None` means infinite.
/// Points above `interior` only serve as neighbours.
pub fn brute_hausdorff(a: &[u64], b: &[u64], interior: u64, a_finite: bool, b_finite: bool) -> Option<u64> {
    if a_finite != b_finite || a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { Some(0) } else { None };
    }
    let side = |p: &[u64], q: &[u64]| p.iter().filter(|x| **x <= interior).map(|x| dist(*x, q).unwrap()).max().unwrap_or(0);
    Some(side(a, b).max(side(b, a)))
}
