//! Connection sets: lifts of cyclotomic strongly regular graphs and their halvings.
//!
//! A halving starts from a partition (P1, P2) of either the subdifference set
//! I or its complement in Z_N (N odd). With P'' = 4^{-1} P mod N, the index
//! sets are
//!
//! X = 2 P1'' cup (2 P2'' + N)  (mod 2N),
//! Y = { N i + 4 j : (i, j) in ({0,3} x P1'') cup ({1,2} x P2'') }  (mod 4N).

pub mod catalog;
pub mod conic;
pub mod connection;
pub mod quadric;

use serde::{Deserialize, Serialize};

use crate::arith::{in_cyclic_subgroup, inv_mod, semiprimitive_exponent};
use crate::cyclotomy::{FamilyTag, IndexSet};
use crate::error::{Error, Result};

pub use catalog::*;
pub use conic::*;
pub use connection::*;
pub use quadric::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Partition of the subdifference set I.
    Subdiff,
    /// Partition of Z_N minus I.
    Complement,
}

impl Side {
    /// The set being partitioned.
    pub fn target(self, i: &IndexSet) -> IndexSet {
        match self {
            Side::Subdiff => i.clone(),
            Side::Complement => i.complement(),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "subdiff" => Ok(Side::Subdiff),
            "complement" => Ok(Side::Complement),
            _ => Err(Error::Parse(format!("unknown side {s:?} (subdiff|complement)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub side: Side,
    pub p1: IndexSet,
    pub p2: IndexSet,
}

impl PartitionSpec {
    pub fn new(side: Side, p1: IndexSet, p2: IndexSet) -> Result<PartitionSpec> {
        if p1.modulus() != p2.modulus() {
            return Err(Error::NotAPartition("parts have different moduli".into()));
        }
        if !p1.is_disjoint(&p2) {
            return Err(Error::NotAPartition(format!("{p1} and {p2} overlap")));
        }
        Ok(PartitionSpec { side, p1, p2 })
    }

    pub fn n(&self) -> u64 {
        self.p1.modulus()
    }

    pub fn union(&self) -> IndexSet {
        self.p1.union(&self.p2)
    }

    /// Checks that the parts cover exactly the set this side partitions.
    pub fn validate(&self, i: &IndexSet) -> Result<()> {
        let target = self.side.target(i);
        if self.union() != target {
            return Err(Error::NotAPartition(format!(
                "{} does not cover {target}",
                self.union()
            )));
        }
        Ok(())
    }

    /// The same partition with the parts exchanged.
    pub fn swapped(&self) -> PartitionSpec {
        PartitionSpec {
            side: self.side,
            p1: self.p2.clone(),
            p2: self.p1.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalvingIndexSets {
    pub partition: PartitionSpec,
    /// Subset of Z_2N.
    pub x: IndexSet,
    /// Subset of Z_4N.
    pub y: IndexSet,
}

impl HalvingIndexSets {
    pub fn side(&self) -> Side {
        self.partition.side
    }

    pub fn n(&self) -> u64 {
        self.partition.n()
    }
}

const J1: [u64; 2] = [0, 3];
const J2: [u64; 2] = [1, 2];

pub fn build_halving_sets(partition: &PartitionSpec) -> Result<HalvingIndexSets> {
    let n = partition.n();
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    if !partition.p1.is_disjoint(&partition.p2) {
        return Err(Error::NotAPartition("parts overlap".into()));
    }
    let inv4 = inv_mod(4 % n, n).unwrap_or(0);
    let s1 = partition.p1.scale(inv4);
    let s2 = partition.p2.scale(inv4);
    let x = IndexSet::new(
        2 * n,
        s1.iter().map(|s| 2 * s).chain(s2.iter().map(|s| 2 * s + n)),
    );
    let y = IndexSet::new(
        4 * n,
        J1.iter()
            .flat_map(|&i| s1.iter().map(move |j| n * i + 4 * j))
            .chain(J2.iter().flat_map(|&i| s2.iter().map(move |j| n * i + 4 * j))),
    );
    Ok(HalvingIndexSets {
        partition: partition.clone(),
        x,
        y,
    })
}

/// Recovers (P1, P2) from X = 2 P1'' cup (2 P2'' + N) mod 2N.
pub fn partition_from_x(x: &IndexSet, side: Side) -> Result<PartitionSpec> {
    let two_n = x.modulus();
    if !two_n.is_multiple_of(2) || (two_n / 2).is_multiple_of(2) {
        return Err(Error::EvenModulus(two_n / 2));
    }
    let n = two_n / 2;
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    for t in x.iter() {
        if t % 2 == 0 {
            p1.push(4 * (t / 2) % n);
        } else {
            p2.push(4 * (((t + n) % two_n) / 2) % n);
        }
    }
    let (a, b) = (IndexSet::new(n, p1.iter().copied()), IndexSet::new(n, p2.iter().copied()));
    if a.len() + b.len() != x.len() {
        return Err(Error::NotAPartition(format!("{x} repeats a class mod N")));
    }
    PartitionSpec::new(side, a, b)
}

/// The partition known to satisfy the halving condition for a family.
///
/// `f` is the exponent of q^m = p^f. Subfield families are handled by
/// [`conic_partition_m3`] and [`quadric_complement_partition`].
pub fn canonical_partition(
    family: FamilyTag,
    side: Side,
    p: u64,
    f: u32,
    i: &IndexSet,
) -> Result<PartitionSpec> {
    let n = i.modulus();
    let fail = |m: String| Err(Error::HypothesisFailed(m));
    let whole = |set: IndexSet| PartitionSpec::new(side, set, IndexSet::empty(n));
    match family {
        FamilyTag::SemiPrimitive { .. } => {
            let j = semiprimitive_exponent(p, n).unwrap_or(0);
            if j == 0 || !(f as u64).is_multiple_of(2 * j) || f as u64 / (2 * j) < 2 {
                return fail(format!("need p^f = p^(2js) with s >= 2 (p={p}, f={f}, j={j})"));
            }
            if i.residues() != [0] {
                return fail(format!("expected I = {{0}}, found {i}"));
            }
            whole(side.target(i))
        }
        FamilyTag::Sporadic { .. } => {
            if (p, f, n) == (7, 9, 37) {
                return match side {
                    Side::Subdiff => fail("no partition of I satisfies the condition for (7^9, 37)".into()),
                    Side::Complement => {
                        let t1 = i.scale(2);
                        let t2 = i.union(&t1).complement();
                        PartitionSpec::new(side, t1, t2)
                    }
                };
            }
            if !in_cyclic_subgroup(p % n, n - 2, n) {
                return fail(format!("-2 is not a power of {p} modulo {n}"));
            }
            whole(side.target(i))
        }
        FamilyTag::Subfield { .. } => {
            fail("subfield partitions come from the conic or quadric constructions".into())
        }
        FamilyTag::NotSrg | FamilyTag::UnclassifiedSrg => {
            fail("no canonical partition outside the known families".into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_sets_small() {
        let part = PartitionSpec::new(
            Side::Subdiff,
            IndexSet::new(5, [0]),
            IndexSet::empty(5),
        )
        .unwrap();
        let h = build_halving_sets(&part).unwrap();
        assert_eq!(h.x.residues(), &[0]);
        assert_eq!(h.y.residues(), &[0, 15]);
        assert_eq!(inv_mod(2, 11), Some(6));
        assert_eq!(inv_mod(4, 11), Some(3));
        let even = PartitionSpec::new(Side::Subdiff, IndexSet::new(4, [1]), IndexSet::empty(4)).unwrap();
        assert!(matches!(build_halving_sets(&even), Err(Error::EvenModulus(4))));
    }

    #[test]
    fn x_round_trips_and_swaps_by_n() {
        let n = 11;
        for mask in 0u32..(1 << 5) {
            let set = [0u64, 1, 3, 4, 9];
            let p1 = IndexSet::new(n, set.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &v)| v));
            let p2 = IndexSet::new(n, set.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 0).map(|(_, &v)| v));
            let part = PartitionSpec::new(Side::Subdiff, p1, p2).unwrap();
            let h = build_halving_sets(&part).unwrap();
            assert_eq!(partition_from_x(&h.x, Side::Subdiff).unwrap(), part);
            let swapped = build_halving_sets(&part.swapped()).unwrap();
            assert_eq!(swapped.x, h.x.translate(n as i64));
            assert_eq!(h.x.reduce(n), part.union().divide(2).unwrap());
            assert_eq!(h.y.len(), 2 * set.len());
        }
    }

    #[test]
    fn canonical_partitions() {
        let i = IndexSet::new(5, [0]);
        let fam = FamilyTag::SemiPrimitive { j: 2 };
        let part = canonical_partition(fam, Side::Subdiff, 3, 8, &i).unwrap();
        assert_eq!(part.p1.residues(), &[0]);
        assert!(canonical_partition(fam, Side::Subdiff, 3, 4, &i).is_err());
        let comp = canonical_partition(fam, Side::Complement, 3, 8, &i).unwrap();
        assert_eq!(comp.p1.residues(), &[1, 2, 3, 4]);
    }
}
