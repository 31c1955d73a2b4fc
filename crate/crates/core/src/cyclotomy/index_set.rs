use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::inv_mod;

/// A subset of Z_M, stored sorted and without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSet {
    modulus: u64,
    residues: Vec<u64>,
}

impl IndexSet {
    pub fn new<I: IntoIterator<Item = u64>>(modulus: u64, residues: I) -> IndexSet {
        assert!(modulus > 0, "modulus must be positive");
        let set: BTreeSet<u64> = residues.into_iter().map(|r| r % modulus).collect();
        IndexSet {
            modulus,
            residues: set.into_iter().collect(),
        }
    }

    pub fn from_signed<I: IntoIterator<Item = i64>>(modulus: u64, residues: I) -> IndexSet {
        IndexSet::new(
            modulus,
            residues
                .into_iter()
                .map(|r| r.rem_euclid(modulus as i64) as u64),
        )
    }

    pub fn empty(modulus: u64) -> IndexSet {
        IndexSet::new(modulus, [])
    }

    pub fn full(modulus: u64) -> IndexSet {
        IndexSet::new(modulus, 0..modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, r: u64) -> bool {
        self.residues.binary_search(&(r % self.modulus)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.residues.iter().copied()
    }

    /// Membership bitmap of length M.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.modulus as usize];
        for &r in &self.residues {
            m[r as usize] = true;
        }
        m
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        IndexSet::new(self.modulus, self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        IndexSet::new(self.modulus, self.iter().filter(|&r| other.contains(r)))
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        IndexSet::new(self.modulus, self.iter().filter(|&r| !other.contains(r)))
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet::new(self.modulus, (0..self.modulus).filter(|&r| !self.contains(r)))
    }

    pub fn translate(&self, t: i64) -> IndexSet {
        let m = self.modulus as i128;
        IndexSet::new(
            self.modulus,
            self.iter()
                .map(|r| ((r as i128 + t as i128).rem_euclid(m)) as u64),
        )
    }

    pub fn scale(&self, s: u64) -> IndexSet {
        let m = self.modulus as u128;
        IndexSet::new(
            self.modulus,
            self.iter().map(|r| ((r as u128 * s as u128) % m) as u64),
        )
    }

    /// Multiplication by the inverse of `s`, if it exists mod M.
    pub fn divide(&self, s: u64) -> Option<IndexSet> {
        inv_mod(s % self.modulus, self.modulus).map(|inv| self.scale(inv))
    }

    /// Residues reduced to a divisor of the modulus (as a set).
    pub fn reduce(&self, modulus: u64) -> IndexSet {
        assert_eq!(self.modulus % modulus, 0, "{modulus} must divide {}", self.modulus);
        IndexSet::new(modulus, self.iter())
    }

    /// All residues of Z_{k M} lying over this set.
    pub fn lift(&self, modulus: u64) -> IndexSet {
        assert_eq!(modulus % self.modulus, 0, "{} must divide {modulus}", self.modulus);
        let k = modulus / self.modulus;
        IndexSet::new(
            modulus,
            self.iter()
                .flat_map(|r| (0..k).map(move |t| r + t * self.modulus)),
        )
    }

    /// Multiplicity of each difference a - b, a != b, indexed by residue.
    pub fn difference_counts(&self) -> Vec<u64> {
        let m = self.modulus;
        let mut counts = vec![0u64; m as usize];
        for &a in &self.residues {
            for &b in &self.residues {
                if a != b {
                    counts[((a + m - b) % m) as usize] += 1;
                }
            }
        }
        counts
    }

    /// lambda when every nonzero residue is a difference exactly lambda times.
    pub fn difference_set_lambda(&self) -> Option<u64> {
        let counts = self.difference_counts();
        let lambda = *counts.get(1)?;
        counts[1..].iter().all(|&c| c == lambda).then_some(lambda)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}} mod {}", self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_combines() {
        let a = IndexSet::new(10, [12, 3, 3, 0]);
        assert_eq!(a.residues(), &[0, 2, 3]);
        assert_eq!(a.translate(-3).residues(), &[0, 7, 9]);
        assert_eq!(a.scale(3).residues(), &[0, 6, 9]);
        assert_eq!(a.complement().len(), 7);
        assert_eq!(a.reduce(5).residues(), &[0, 2, 3]);
        assert_eq!(IndexSet::new(5, [1]).lift(15).residues(), &[1, 6, 11]);
        assert!(a.divide(2).is_none());
    }

    #[test]
    fn fano_plane_difference_set() {
        let d = IndexSet::new(7, [1, 2, 4]);
        assert_eq!(d.difference_set_lambda(), Some(1));
        assert_eq!(IndexSet::new(7, [0, 1, 2]).difference_set_lambda(), None);
    }
}
