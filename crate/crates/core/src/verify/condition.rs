//! The halving condition on X and an exhaustive search over partitions.
//!
//! For U = I (subdiff side) or U = Z_N minus I (complement side) and
//! X = 2 P1'' cup (2 P2'' + N), let
//!
//! P_c = 2 psi(omega^c cup_{t in X} C_t^(2N)) - psi(omega^c cup_{t in 2^{-1}U} C_t^(N)).
//!
//! The condition asks for P_c = +-G(eta) when c mod N lies in 2^{-1}U and
//! P_c = 0 otherwise.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::inv_mod;
use crate::chars::{CycInt, PeriodTable};
use crate::constructions::{HalvingIndexSets, PartitionSpec, Side};
use crate::cyclotomy::IndexSet;
use crate::error::{Error, Result};
use crate::field::FieldCtx;

/// Periods of F_{q^m} modulo 2N and N, with G(eta) as an exact value.
#[derive(Clone, Debug)]
pub struct HalvingTable {
    pub n: u64,
    pub p: u64,
    pub fine: PeriodTable,
    pub coarse: PeriodTable,
    pub gauss: CycInt,
}

impl HalvingTable {
    pub fn build(ctx: &FieldCtx, n: u64) -> Result<HalvingTable> {
        if n.is_multiple_of(2) {
            return Err(Error::EvenModulus(n));
        }
        if ctx.p() == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let fine = PeriodTable::build(ctx, 2 * n)?;
        let coarse = fine.coarsen(n);
        let halves = fine.coarsen(2);
        let gauss = &halves.period(0) - &halves.period(1);
        Ok(HalvingTable {
            n,
            p: ctx.p(),
            fine,
            coarse,
            gauss,
        })
    }

    /// P_c for index data X (mod 2N) and 2^{-1}U (mod N).
    pub fn lambda(&self, c: u64, x: &IndexSet, half_u: &IndexSet) -> CycInt {
        let two = self.fine.twisted_sum(c % (2 * self.n), x.residues()).scale(2);
        &two - &self.coarse.twisted_sum(c % self.n, half_u.residues())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    PlusG,
    MinusG,
    Zero,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    /// Each c may carry its own sign.
    #[default]
    PerC,
    /// One sign for every c in 2^{-1}U (even representatives mod 2N).
    Global,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub c: u64,
    /// Whether c mod N lies in 2^{-1}U, so that +-G is required.
    pub expects_gauss: bool,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub side: Side,
    pub mode: SignMode,
    /// One entry per c in Z_2N.
    pub entries: Vec<ConditionEntry>,
    pub failures: Vec<u64>,
    pub pass: bool,
}

fn classify(value: &CycInt, g: &CycInt) -> Outcome {
    if value.is_zero() {
        Outcome::Zero
    } else if value == g {
        Outcome::PlusG
    } else if *value == -g {
        Outcome::MinusG
    } else {
        Outcome::Other
    }
}

/// Checks the condition for every c in Z_2N. Since P_{c+N} = -P_c, the global
/// sign mode compares signs at even representatives only.
pub fn condition_check(
    table: &HalvingTable,
    sets: &HalvingIndexSets,
    i: &IndexSet,
    mode: SignMode,
) -> Result<ConditionReport> {
    let n = table.n;
    if sets.n() != n || i.modulus() != n {
        return Err(Error::InconsistentIndexSets(format!(
            "table is for N = {n}, sets for N = {}",
            sets.n()
        )));
    }
    let u = sets.side().target(i);
    let half_u = u.divide(2).expect("N is odd");
    if sets.x.reduce(n) != half_u || sets.x.len() != u.len() {
        return Err(Error::InconsistentIndexSets(format!(
            "X = {} does not lie over 2^-1 U = {half_u}",
            sets.x
        )));
    }
    let entries: Vec<ConditionEntry> = (0..2 * n)
        .into_par_iter()
        .map(|c| {
            let value = table.lambda(c, &sets.x, &half_u);
            ConditionEntry {
                c,
                expects_gauss: half_u.contains(c % n),
                outcome: classify(&value, &table.gauss),
            }
        })
        .collect();
    let mut failures: Vec<u64> = entries
        .iter()
        .filter(|e| match e.outcome {
            Outcome::PlusG | Outcome::MinusG => !e.expects_gauss,
            Outcome::Zero => e.expects_gauss,
            Outcome::Other => true,
        })
        .map(|e| e.c)
        .collect();
    if mode == SignMode::Global && failures.is_empty() {
        let signs: Vec<&ConditionEntry> = entries.iter().filter(|e| e.c % 2 == 0 && e.expects_gauss).collect();
        if let Some(first) = signs.first() {
            failures.extend(signs.iter().filter(|e| e.outcome != first.outcome).map(|e| e.c));
        }
    }
    Ok(ConditionReport {
        n,
        side: sets.side(),
        mode,
        pass: failures.is_empty(),
        entries,
        failures,
    })
}

/// Largest |U| accepted by [`partition_search`].
pub const SEARCH_LIMIT: usize = 30;
/// Above this |U| the search switches to meet-in-the-middle.
const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Exhaustive,
    MeetInTheMiddle,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub side: Side,
    pub mode: SignMode,
    pub method: SearchMethod,
    /// Ordered partitions (P1, P2) of U, 2^|U|.
    pub candidates: u64,
    /// Ordered partitions passing the condition; closed under swapping parts.
    pub hits: Vec<PartitionSpec>,
}

/// Signed-sum form of the condition: P_c = sum_u sigma_u w_u(c) with
/// sigma_u = +1 on P1 and -1 on P2.
struct Contributions {
    /// Flattened (c, coefficient) vectors, coefficient 0..p-1 of each P_c.
    vectors: Vec<Vec<i64>>,
    zero_coords: Vec<usize>,
    gauss_cs: Vec<usize>,
    width: usize,
    gauss: Vec<i64>,
}

impl Contributions {
    fn new(table: &HalvingTable, u: &IndexSet) -> Contributions {
        let n = table.n;
        let width = (table.p - 1) as usize;
        let inv4 = inv_mod(4 % n, n).unwrap_or(0);
        let half_u = u.divide(2).expect("N is odd");
        let vectors = u
            .iter()
            .map(|uu| {
                let x = IndexSet::new(2 * n, [2 * (uu * inv4 % n)]);
                let h = IndexSet::new(n, [2 * (uu * inv4 % n) % n]);
                (0..n)
                    .flat_map(|c| {
                        let c_even = if c % 2 == 0 { c } else { c + n };
                        table.lambda(c_even, &x, &h).coeffs()[..width].to_vec()
                    })
                    .collect()
            })
            .collect();
        Contributions {
            vectors,
            zero_coords: (0..n as usize)
                .filter(|&c| !half_u.contains(c as u64))
                .flat_map(|c| c * width..(c + 1) * width)
                .collect(),
            gauss_cs: (0..n as usize).filter(|&c| half_u.contains(c as u64)).collect(),
            width,
            gauss: table.gauss.coeffs()[..width].to_vec(),
        }
    }

    fn sum(&self, signs: u64, members: &[usize]) -> Vec<i64> {
        let len = self.vectors.first().map_or(0, |v| v.len());
        let mut acc = vec![0i64; len];
        for (bit, &idx) in members.iter().enumerate() {
            let s = if signs >> bit & 1 == 1 { 1 } else { -1 };
            acc.iter_mut().zip(&self.vectors[idx]).for_each(|(a, v)| *a += s * v);
        }
        acc
    }

    fn passes(&self, total: &[i64], mode: SignMode) -> bool {
        if self.zero_coords.iter().any(|&i| total[i] != 0) {
            return false;
        }
        let mut sign = 0i64;
        for &c in &self.gauss_cs {
            let block = &total[c * self.width..(c + 1) * self.width];
            let s = if block == self.gauss.as_slice() {
                1
            } else if block.iter().zip(&self.gauss).all(|(a, g)| *a == -g) {
                -1
            } else {
                return false;
            };
            if mode == SignMode::Global {
                if sign != 0 && s != sign {
                    return false;
                }
                sign = s;
            }
        }
        true
    }
}

/// Every ordered partition (P1, P2) of U satisfying the condition.
pub fn partition_search(
    table: &HalvingTable,
    i: &IndexSet,
    side: Side,
    mode: SignMode,
) -> Result<SearchReport> {
    let u = side.target(i);
    let size = u.len();
    if size > SEARCH_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: SEARCH_LIMIT,
        });
    }
    let n = table.n;
    let elems: Vec<u64> = u.iter().collect();
    let contrib = Contributions::new(table, &u);
    let to_partition = |signs: &dyn Fn(usize) -> bool| {
        let p1 = IndexSet::new(n, (0..size).filter(|&k| signs(k)).map(|k| elems[k]));
        let p2 = IndexSet::new(n, (0..size).filter(|&k| !signs(k)).map(|k| elems[k]));
        PartitionSpec::new(side, p1, p2).expect("disjoint by construction")
    };
    let mut hits = Vec::new();
    let method;
    if size == 0 {
        method = SearchMethod::Exhaustive;
        let sets = crate::constructions::build_halving_sets(&to_partition(&|_| true))?;
        if condition_check(table, &sets, i, mode)?.pass {
            hits.push(sets.partition);
        }
    } else if size <= EXHAUSTIVE_LIMIT || contrib.zero_coords.is_empty() {
        method = SearchMethod::Exhaustive;
        // The first element is fixed in P1; mirrors are added afterwards.
        let rest: Vec<usize> = (1..size).collect();
        let base = &contrib.vectors[0];
        let found: Vec<u64> = (0..1u64 << (size - 1))
            .into_par_iter()
            .filter(|&mask| {
                let mut total = contrib.sum(mask, &rest);
                total.iter_mut().zip(base).for_each(|(a, b)| *a += b);
                contrib.passes(&total, mode)
            })
            .collect();
        for mask in found {
            hits.push(to_partition(&|k| k == 0 || mask >> (k - 1) & 1 == 1));
        }
    } else {
        method = SearchMethod::MeetInTheMiddle;
        let split = size / 2;
        let left: Vec<usize> = (1..split).collect();
        let right: Vec<usize> = (split..size).collect();
        let base = &contrib.vectors[0];
        let key = |v: &[i64], neg: bool| -> Vec<i64> {
            contrib
                .zero_coords
                .iter()
                .map(|&i| if neg { -v[i] } else { v[i] })
                .collect()
        };
        let left_sums: Vec<Vec<i64>> = (0..1u64 << left.len())
            .into_par_iter()
            .map(|mask| {
                let mut s = contrib.sum(mask, &left);
                s.iter_mut().zip(base).for_each(|(a, b)| *a += b);
                s
            })
            .collect();
        let mut index: HashMap<Vec<i64>, Vec<u64>> = HashMap::new();
        for (mask, s) in left_sums.iter().enumerate() {
            index.entry(key(s, false)).or_default().push(mask as u64);
        }
        let found: Vec<(u64, u64)> = (0..1u64 << right.len())
            .into_par_iter()
            .flat_map_iter(|rmask| {
                let r = contrib.sum(rmask, &right);
                let matches = index.get(&key(&r, true)).cloned().unwrap_or_default();
                matches
                    .into_iter()
                    .filter(|&lmask| {
                        let total: Vec<i64> = left_sums[lmask as usize]
                            .iter()
                            .zip(&r)
                            .map(|(a, b)| a + b)
                            .collect();
                        contrib.passes(&total, mode)
                    })
                    .map(|lmask| (lmask, rmask))
                    .collect::<Vec<_>>()
            })
            .collect();
        for (lmask, rmask) in found {
            hits.push(to_partition(&|k| {
                if k == 0 {
                    true
                } else if k < split {
                    lmask >> (k - 1) & 1 == 1
                } else {
                    rmask >> (k - split) & 1 == 1
                }
            }));
        }
    }
    let mirrors: Vec<PartitionSpec> = hits.iter().map(|h| h.swapped()).filter(|h| !hits.contains(h)).collect();
    hits.extend(mirrors);
    hits.sort_by(|a, b| (&a.p1, &a.p2).cmp(&(&b.p1, &b.p2)));
    Ok(SearchReport {
        n,
        side,
        mode,
        method,
        candidates: 1u64 << size,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_halving_sets, conic_partition_m3};
    use crate::cyclotomy::singer_set;
    use crate::field::build_field;

    #[test]
    fn conic_partition_passes_and_search_finds_it() {
        let ctx = build_field(3, 3, None).unwrap();
        let i = singer_set(&ctx, 3).unwrap();
        let table = HalvingTable::build(&ctx, 13).unwrap();
        let conic = conic_partition_m3(&ctx, 3).unwrap();
        let report = condition_check(&table, &conic.halving, &i, SignMode::PerC).unwrap();
        assert!(report.pass, "{:?}", report.failures);
        let search = partition_search(&table, &i, Side::Subdiff, SignMode::PerC).unwrap();
        assert_eq!(search.candidates, 16);
        assert!(search.hits.contains(&conic.halving.partition));
        for hit in &search.hits {
            let sets = build_halving_sets(hit).unwrap();
            assert!(condition_check(&table, &sets, &i, SignMode::PerC).unwrap().pass);
        }
    }

    #[test]
    fn antisymmetry_under_n_shift() {
        let ctx = build_field(3, 3, None).unwrap();
        let table = HalvingTable::build(&ctx, 13).unwrap();
        let x = IndexSet::new(26, [0, 3, 7]);
        let h = x.reduce(13);
        for c in 0..13 {
            assert_eq!(table.lambda(c + 13, &x, &h), -table.lambda(c, &x, &h));
        }
    }

    #[test]
    fn mismatched_sets_rejected() {
        let ctx = build_field(3, 3, None).unwrap();
        let table = HalvingTable::build(&ctx, 13).unwrap();
        let i = singer_set(&ctx, 3).unwrap();
        let part = PartitionSpec::new(Side::Subdiff, IndexSet::new(13, [5]), IndexSet::empty(13)).unwrap();
        let sets = build_halving_sets(&part).unwrap();
        assert!(matches!(
            condition_check(&table, &sets, &i, SignMode::PerC),
            Err(Error::InconsistentIndexSets(_))
        ));
    }
}
