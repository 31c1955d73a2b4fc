//! Exact spectra of Cayley graphs and strongly regular parameter checks.
//!
//! The eigenvalues of Cay(G, D) are the character sums psi(D) over the
//! characters of G. A symmetric D avoiding 0 gives a strongly regular graph
//! exactly when the nontrivial sums take two values.

pub mod condition;
pub mod lemmas;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chars::{CycInt, PeriodTable};
use crate::constructions::ConnectionSet;
use crate::error::{Error, Result};
use crate::field::{build_field_with, FieldCtx, FieldOptions};

pub use condition::*;
pub use lemmas::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
    /// Nontrivial eigenvalues, larger first.
    pub theta: [i64; 2],
    pub multiplicities: [u64; 2],
}

impl SrgParams {
    pub fn tuple(&self) -> (u64, u64, u64, u64) {
        (self.v, self.k, self.lambda, self.mu)
    }

    /// lambda = k + t1 t2 + t1 + t2 and mu = k + t1 t2.
    pub fn from_eigenvalues(v: u64, k: u64, theta: [i64; 2], multiplicities: [u64; 2]) -> Result<SrgParams> {
        let [t1, t2] = theta;
        let k_i = k as i128;
        let (t1w, t2w) = (t1 as i128, t2 as i128);
        let lambda = k_i + t1w * t2w + t1w + t2w;
        let mu = k_i + t1w * t2w;
        let [f, g] = multiplicities;
        let trace = k_i + f as i128 * t1w + g as i128 * t2w;
        if lambda < 0 || mu < 0 || trace != 0 || f + g + 1 != v {
            return Err(Error::HypothesisFailed(format!(
                "eigenvalues {t1}^{f}, {t2}^{g} with k = {k} on {v} vertices are infeasible"
            )));
        }
        Ok(SrgParams {
            v,
            k,
            lambda: lambda as u64,
            mu: mu as u64,
            theta,
            multiplicities,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumValue {
    pub value: i64,
    pub multiplicity: u64,
}

/// Distinct nontrivial character sums of a connection set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub v: u64,
    pub k: u64,
    /// Number of character classes evaluated.
    pub classes: u64,
    /// Descending by value.
    pub values: Vec<SpectrumValue>,
}

impl SpectrumReport {
    fn from_values(v: u64, k: u64, classes: u64, raw: Vec<(CycInt, u64)>) -> Result<SpectrumReport> {
        let mut acc: BTreeMap<i64, u64> = BTreeMap::new();
        for (val, mult) in raw {
            let int = val
                .as_integer()
                .ok_or_else(|| Error::IrrationalSpectrumValue(val.to_string()))?;
            *acc.entry(int).or_default() += mult;
        }
        Ok(SpectrumReport {
            v,
            k,
            classes,
            values: acc
                .into_iter()
                .rev()
                .map(|(value, multiplicity)| SpectrumValue { value, multiplicity })
                .collect(),
        })
    }

    pub fn distinct(&self) -> Vec<i64> {
        self.values.iter().map(|v| v.value).collect()
    }
}

/// The field a connection set lives in.
pub fn field_for(set: &ConnectionSet) -> Result<FieldCtx> {
    let spec = set.field();
    build_field_with(spec.p, spec.f, Some(&spec.modulus), FieldOptions::default())
}

fn vertex_count(set: &ConnectionSet) -> Result<u64> {
    u64::try_from(set.vertex_count()).map_err(|_| Error::TooLarge(u64::MAX))
}

/// Character sums, one per orbit of the multiplier group that fixes D.
///
/// Additive sets are unions of classes C_t^(M), so psi(omega^a D) depends
/// on a mod M only. Product sets are invariant under C_0^(K) x C_0^(K), so
/// psi_{a,b}(D) depends on (log a, log b) mod K, with separate orbits for the
/// two axes.
pub fn exact_spectrum(ctx: &FieldCtx, set: &ConnectionSet) -> Result<SpectrumReport> {
    if ctx.spec() != set.field() {
        return Err(Error::BadModulus("connection set belongs to a different field".into()));
    }
    let q1 = ctx.order();
    let v = vertex_count(set)?;
    let k = set.cardinality() as u64;
    match set {
        ConnectionSet::Additive { indices, .. } => {
            let m = indices.modulus();
            let table = PeriodTable::build(ctx, m)?;
            let raw = (0..m)
                .map(|a| (table.twisted_sum(a, indices.residues()), q1 / m))
                .collect();
            SpectrumReport::from_values(v, k, m, raw)
        }
        ConnectionSet::Product { include_axes, .. } => {
            let cells = set.cells().expect("product");
            let kk = cells.k;
            let table = PeriodTable::build(ctx, kk)?;
            let periods: Vec<CycInt> = (0..kk).map(|t| table.period(t)).collect();
            let w: Vec<CycInt> = (0..kk).map(|z| table.twisted_sum(z, cells.base.residues())).collect();
            let per = q1 / kk;
            let p = ctx.p();
            let axes = if *include_axes { CycInt::from_int(p, -2) } else { CycInt::zero(p) };
            let mut raw: Vec<(CycInt, u64)> = (0..kk * kk)
                .into_par_iter()
                .map(|idx| {
                    let (a, b) = (idx / kk, idx % kk);
                    let mut acc = axes.clone();
                    for alpha in 0..kk {
                        let pa = &periods[((alpha + a) % kk) as usize];
                        let wb = &w[((b + cells.tau[alpha as usize]) % kk) as usize];
                        acc = &acc + &(pa * wb);
                    }
                    (acc, per * per)
                })
                .collect();
            let row = cells.base.len() as i64 * per as i64;
            let axis_extra = if *include_axes { q1 as i64 - 1 } else { 0 };
            for a in 0..kk {
                // psi_{a,0}: every row has the same size, and the a-sum over F^* is -1.
                raw.push((CycInt::from_int(p, -row + axis_extra), per));
                let col = (0..kk)
                    .map(|alpha| w[((a + cells.tau[alpha as usize]) % kk) as usize].clone())
                    .fold(CycInt::zero(p), |x, y| &x + &y)
                    .scale(per as i64);
                raw.push((&col + &CycInt::from_int(p, axis_extra), per));
            }
            SpectrumReport::from_values(v, k, kk * kk + 2 * kk, raw)
        }
    }
}

/// psi(omega^k) exponents: table[k] = tr(omega^k) mod p.
pub fn trace_table(ctx: &FieldCtx) -> Vec<u32> {
    let q1 = ctx.order();
    ctx.sweep(
        q1,
        Vec::new,
        |acc: &mut Vec<u32>, _, c| acc.push(ctx.trace_coords(c) as u32),
        |mut a, b| {
            a.extend(b);
            a
        },
    )
}

/// Every character value of a connection set, by direct summation.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    q1: u64,
    product: bool,
    values: Vec<CycInt>,
}

impl CharacterTable {
    fn index(&self, a: Option<u64>, b: Option<u64>) -> usize {
        let ia = a.map_or(self.q1, |x| x % self.q1);
        if self.product {
            let ib = b.map_or(self.q1, |x| x % self.q1);
            (ia * (self.q1 + 1) + ib) as usize
        } else {
            ia as usize
        }
    }

    /// psi_a(D) (additive) or psi_{a,b}(D) (product), with characters given by
    /// exponents and `None` for 0.
    pub fn get(&self, a: Option<u64>, b: Option<u64>) -> &CycInt {
        &self.values[self.index(a, b)]
    }
}

/// Largest v * |D| handled by [`character_table`].
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 33;

pub fn character_table(ctx: &FieldCtx, set: &ConnectionSet) -> Result<CharacterTable> {
    let work = set.vertex_count() * set.cardinality();
    if work > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForFullSweep {
            what: "character table".into(),
            size: work,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let q1 = ctx.order();
    let p = ctx.p();
    let tr = trace_table(ctx);
    let mut elems = Vec::new();
    set.for_each_exp(|s, t| elems.push((s, t)));
    let term = |a: Option<u64>, x: Option<u64>| match (a, x) {
        (Some(a), Some(x)) => tr[((a + x) % q1) as usize] as u64,
        _ => 0,
    };
    let product = set.is_product();
    let count = if product { (q1 + 1) * (q1 + 1) } else { q1 + 1 };
    let values: Vec<CycInt> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = if product {
                (idx / (q1 + 1), idx % (q1 + 1))
            } else {
                (idx, q1)
            };
            let a = (a < q1).then_some(a);
            let b = (b < q1).then_some(b);
            let mut counts = vec![0u64; p as usize];
            for &(s, t) in &elems {
                counts[((term(a, s) + term(b, t)) % p) as usize] += 1;
            }
            CycInt::from_counts(p, &counts)
        })
        .collect();
    Ok(CharacterTable { q1, product, values })
}

/// Largest graph handled by [`dense_check`].
pub const DENSE_LIMIT: u64 = 4096;

/// Degree, lambda and mu read from the adjacency matrix, each `None` when not constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseCounts {
    pub degree: Option<u64>,
    pub lambda: Option<u64>,
    pub mu: Option<u64>,
}

fn constant(values: impl Iterator<Item = u64>) -> Option<u64> {
    let mut first = None;
    for v in values {
        match first {
            None => first = Some(v),
            Some(f) if f != v => return None,
            _ => {}
        }
    }
    first
}

/// Common-neighbour counts over all vertex pairs, from a bitset adjacency matrix.
pub fn dense_check(ctx: &FieldCtx, set: &ConnectionSet) -> Result<DenseCounts> {
    let v = vertex_count(set)?;
    if v > DENSE_LIMIT {
        return Err(Error::TooLargeForFullSweep {
            what: "dense adjacency check".into(),
            size: v as u128,
            limit: DENSE_LIMIT as u128,
        });
    }
    let mut d = Vec::new();
    set.for_each_element(ctx, |x| d.push(x))?;
    let width = ctx.order() + 1;
    let add = |x: u64, y: u64| {
        if set.is_product() {
            ctx.add_packed(x / width, y / width) * width + ctx.add_packed(x % width, y % width)
        } else {
            ctx.add_packed(x, y)
        }
    };
    let words = (v as usize).div_ceil(64);
    let rows: Vec<Vec<u64>> = (0..v)
        .into_par_iter()
        .map(|x| {
            let mut row = vec![0u64; words];
            for &y in &d {
                let z = add(x, y) as usize;
                row[z / 64] |= 1 << (z % 64);
            }
            row
        })
        .collect();
    let degree = constant(rows.iter().map(|r| r.iter().map(|w| w.count_ones() as u64).sum()));
    let pairs: Vec<(Option<u64>, Option<u64>, bool)> = (0..v as usize)
        .into_par_iter()
        .map(|x| {
            let (mut lam, mut mu): (Option<u64>, Option<u64>) = (None, None);
            let mut ok = true;
            for y in x + 1..v as usize {
                let c: u64 = rows[x]
                    .iter()
                    .zip(&rows[y])
                    .map(|(a, b)| (a & b).count_ones() as u64)
                    .sum();
                let slot = if rows[x][y / 64] >> (y % 64) & 1 == 1 { &mut lam } else { &mut mu };
                match *slot {
                    None => *slot = Some(c),
                    Some(prev) if prev != c => ok = false,
                    _ => {}
                }
            }
            (lam, mu, ok)
        })
        .collect();
    let all_ok = pairs.iter().all(|p| p.2);
    let merge = |sel: fn(&(Option<u64>, Option<u64>, bool)) -> Option<u64>| {
        if !all_ok {
            return None;
        }
        constant(pairs.iter().filter_map(sel))
    };
    Ok(DenseCounts {
        degree,
        lambda: merge(|p| p.0),
        mu: merge(|p| p.1),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verification {
    pub params: SrgParams,
    pub spectrum: SpectrumReport,
    /// Whether the adjacency-matrix count agrees, when the graph is small enough to build.
    pub dense_agrees: Option<bool>,
    pub content_hash: String,
}

/// Strongly regular parameters of Cay(G, D) from its exact spectrum, confirmed
/// on the adjacency matrix when v <= [`DENSE_LIMIT`].
pub fn srg_verify(ctx: &FieldCtx, set: &ConnectionSet) -> Result<Verification> {
    if !set.is_symmetric() {
        return Err(Error::NotSymmetric("D is not closed under negation".into()));
    }
    let spectrum = exact_spectrum(ctx, set)?;
    if spectrum.values.len() != 2 {
        return Err(Error::NotTwoValued(
            spectrum.values.iter().map(|v| v.value.to_string()).collect(),
        ));
    }
    let (a, b) = (&spectrum.values[0], &spectrum.values[1]);
    let params = SrgParams::from_eigenvalues(
        spectrum.v,
        spectrum.k,
        [a.value, b.value],
        [a.multiplicity, b.multiplicity],
    )?;
    let dense_agrees = if spectrum.v <= DENSE_LIMIT {
        let counts = dense_check(ctx, set)?;
        Some(
            counts.degree == Some(params.k)
                && counts.lambda == Some(params.lambda)
                && counts.mu == Some(params.mu),
        )
    } else {
        None
    };
    Ok(Verification {
        params,
        spectrum,
        dense_agrees,
        content_hash: set.content_hash(),
    })
}
