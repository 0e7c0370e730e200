//! Dense tables over *all* families of subsets of a tiny universe.
//!
//! For a universe of `n ≤ 4` points there are `2^n ≤ 16` subsets, so a family
//! is a 16-bit code (bit `s` set iff subset mask `s` is a member) and a set of
//! families is a bit table with `2^(2^n)` entries. Every exhaustive checker in
//! the crate runs on these tables.

use crate::error::{Error, Result};
use crate::setcore::{Family, Subset};

/// Largest universe for which family tables are materialized.
pub const EXPLICIT_CAP: usize = 4;

pub type FamCode = u32;

pub fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > EXPLICIT_CAP {
        return Err(Error::CapExceeded { what: "explicit structure universe size", limit: EXPLICIT_CAP });
    }
    Ok(())
}

pub fn subset_count(width: usize) -> usize {
    1 << width
}

pub fn family_count(width: usize) -> usize {
    1 << subset_count(width)
}

pub fn code_of(f: &Family) -> FamCode {
    f.members().iter().fold(0, |acc, s| acc | 1 << s.mask())
}

pub fn family_of(code: FamCode, width: usize) -> Family {
    let members = members_of(code).map(Subset).collect();
    Family::from_sorted(width, members)
}

pub fn members_of(code: FamCode) -> impl Iterator<Item = u32> {
    (0..32u32).filter(move |s| code >> s & 1 == 1)
}

pub fn single(s: u32) -> FamCode {
    1 << s
}

pub fn pair(a: u32, b: u32) -> FamCode {
    1 << a | 1 << b
}

pub fn vee_code(a: FamCode, b: FamCode) -> FamCode {
    let mut out = 0;
    for x in members_of(a) {
        for y in members_of(b) {
            out |= 1 << (x | y);
        }
    }
    out
}

/// Every subset that contains some member of `code`.
pub fn up_code(code: FamCode, width: usize) -> FamCode {
    let mut out = 0;
    for s in 0..subset_count(width) as u32 {
        if members_of(code).any(|m| m & !s == 0) {
            out |= 1 << s;
        }
    }
    out
}

/// Every subset of some member of `code`.
pub fn down_code(code: FamCode, width: usize) -> FamCode {
    let mut out = 0;
    for s in 0..subset_count(width) as u32 {
        if members_of(code).any(|m| s & !m == 0) {
            out |= 1 << s;
        }
    }
    out
}

/// Intersection of all members (the whole universe for the empty family).
pub fn meet_of(code: FamCode, width: usize) -> u32 {
    members_of(code).fold(Subset::full(width).mask(), |acc, m| acc & m)
}

pub fn is_subcode(a: FamCode, b: FamCode) -> bool {
    a & !b == 0
}

/// A set of families over a fixed tiny universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilySet {
    width: usize,
    bits: Vec<u64>,
}

impl FamilySet {
    pub fn empty(width: usize) -> Result<Self> {
        check_width(width)?;
        let words = family_count(width).div_ceil(64);
        Ok(FamilySet { width, bits: vec![0; words] })
    }

    pub fn from_predicate<F: FnMut(FamCode) -> bool>(width: usize, mut pred: F) -> Result<Self> {
        let mut set = Self::empty(width)?;
        for code in 0..family_count(width) as FamCode {
            if pred(code) {
                set.insert(code);
            }
        }
        Ok(set)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn contains(&self, code: FamCode) -> bool {
        let c = code as usize;
        self.bits[c / 64] >> (c % 64) & 1 == 1
    }

    pub fn insert(&mut self, code: FamCode) {
        let c = code as usize;
        self.bits[c / 64] |= 1 << (c % 64);
    }

    pub fn remove(&mut self, code: FamCode) {
        let c = code as usize;
        self.bits[c / 64] &= !(1 << (c % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = FamCode> + '_ {
        (0..family_count(self.width) as FamCode).filter(move |c| self.contains(*c))
    }

    pub fn is_subset_of(&self, other: &FamilySet) -> bool {
        self.width == other.width && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Close under taking subfamilies (OR-zeta transform over family codes).
    pub fn close_downward(&mut self) {
        let nsub = subset_count(self.width);
        for bit in 0..nsub {
            for code in 0..family_count(self.width) as FamCode {
                if code >> bit & 1 == 1 && self.contains(code) {
                    self.insert(code & !(1 << bit));
                }
            }
        }
    }

    pub fn is_downward_closed(&self) -> Option<(FamCode, FamCode)> {
        for code in self.iter() {
            for m in members_of(code) {
                let sub = code & !(1 << m);
                if !self.contains(sub) {
                    return Some((code, sub));
                }
            }
        }
        None
    }

    /// Members not strictly contained in another member.
    pub fn maximal(&self) -> Vec<FamCode> {
        let nsub = subset_count(self.width) as u32;
        self.iter()
            .filter(|&c| (0..nsub).all(|s| c >> s & 1 == 1 || !self.contains(c | 1 << s)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_roundtrip() {
        let f = Family::new(3, [Subset(1), Subset(3)]).unwrap();
        let c = code_of(&f);
        assert_eq!(c, 0b1010);
        assert_eq!(family_of(c, 3), f);
    }

    #[test]
    fn downward_closure_matches_enumeration() {
        let mut t = FamilySet::empty(2).unwrap();
        t.insert(0b1110);
        t.close_downward();
        assert_eq!(t.len(), 8);
        assert!(t.is_downward_closed().is_none());
        assert_eq!(t.maximal(), vec![0b1110]);
    }

    #[test]
    fn up_and_vee() {
        // {{a}} over {a,b}: supersets of {a} are {a} and {a,b}
        assert_eq!(up_code(single(0b01), 2), 1 << 0b01 | 1 << 0b11);
        assert_eq!(vee_code(single(0b01), single(0b10)), single(0b11));
        assert_eq!(meet_of(0, 3), 0b111);
        assert!(check_width(5).is_err());
    }
}
