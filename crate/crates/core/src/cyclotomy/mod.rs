//! Cyclotomic classes, the Singer difference set and its subdifference sets.

mod index_set;

use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, divisors, exact_log, semiprimitive_exponent};
use crate::chars::{gauss_sum_direct, rel_deviation, MultChar, PeriodTable};
use crate::error::{Error, Result};
use crate::field::{build_field_with, FieldCtx, FieldElem, FieldOptions};

pub use index_set::IndexSet;

/// C_i^(N) = omega^i <omega^N>, streamed in exponent order.
pub fn cyclotomic_class(
    ctx: &FieldCtx,
    n: u64,
    i: u64,
) -> Result<impl Iterator<Item = FieldElem> + '_> {
    check_divisor(n, ctx.order())?;
    let i = i % n;
    Ok((0..ctx.order() / n).map(move |k| FieldElem::Exp(i + k * n)))
}

fn check_divisor(n: u64, order: u64) -> Result<()> {
    if n == 0 || !order.is_multiple_of(n) {
        return Err(Error::BadDivisor { n, order });
    }
    Ok(())
}

/// Degree e of F_q over F_p, with q = p^e a proper subfield of the context.
fn subfield_degree(ctx: &FieldCtx, q: u64) -> Result<u32> {
    let e = exact_log(q, ctx.p()).ok_or(Error::NotOddPrimePower(q)).and_then(|e| {
        if e == 0 {
            Err(Error::BadSubfield { sub: 0, f: ctx.f() })
        } else {
            Ok(e)
        }
    })?;
    if !ctx.f().is_multiple_of(e) {
        return Err(Error::BadSubfield { sub: e, f: ctx.f() });
    }
    Ok(e)
}

/// Rows L_i with L_i . coords(x) = tr(beta^i x) for an F_p-basis beta^i of F_q.
///
/// Tr_{q^m/q}(x) vanishes exactly when every row does.
pub fn relative_trace_rows(ctx: &FieldCtx, sub_degree: u32) -> Vec<Vec<u64>> {
    let beta = ctx.subfield_index(sub_degree);
    (0..sub_degree as u64)
        .map(|i| ctx.trace_functional(ctx.elem(beta * i)))
        .collect()
}

/// {i mod (q^m-1)/(q-1) : Tr_{q^m/q}(omega^i) = 0}.
pub fn singer_set(ctx: &FieldCtx, q: u64) -> Result<IndexSet> {
    let e = subfield_degree(ctx, q)?;
    let points = ctx.order() / (q - 1);
    let rows = relative_trace_rows(ctx, e);
    let hits = ctx.sweep(
        points,
        Vec::new,
        |acc: &mut Vec<u64>, k, c| {
            if rows.iter().all(|r| ctx.dot(r, c) == 0) {
                acc.push(k);
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    Ok(IndexSet::new(points, hits))
}

/// Two-valued intersection pattern of the Singer set with the cosets of C_0^(N)/F_q^*.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdiffResult {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "I")]
    pub i: Vec<u64>,
    pub delta: i64,
    /// Intersection size on I, then off I.
    pub sizes: [u64; 2],
    pub lambda: u64,
}

impl SubdiffResult {
    pub fn index_set(&self) -> IndexSet {
        IndexSet::new(self.n, self.i.iter().copied())
    }

    /// Largest relative deviation in delta * q * sum_{i in I} chi(omega^i) = G(chi)
    /// over the nontrivial characters chi of order dividing N.
    pub fn gauss_identity_deviation(&self, ctx: &FieldCtx) -> Result<f64> {
        let mut worst = 0f64;
        for j in 1..self.n {
            let chi = MultChar::new(ctx, self.n, j)?;
            let lhs: num_complex::Complex64 = self
                .i
                .iter()
                .map(|&k| chi.eval_exp(k))
                .sum::<num_complex::Complex64>()
                * (self.delta as f64 * self.q as f64);
            worst = worst.max(rel_deviation(lhs, gauss_sum_direct(ctx, &chi)));
        }
        Ok(worst)
    }
}

/// The subdifference set I in Z_N of the Singer difference set of F_{q^m}.
///
/// I is the smaller of the two level sets of i -> |H_0 cap omega^i C_0 / F_q^*|
/// (on a tie, the one avoiding 0), and delta is its level minus the other.
pub fn subdifference_set(ctx: &FieldCtx, q: u64, n: u64) -> Result<SubdiffResult> {
    let singer = singer_set(ctx, q)?;
    let points = singer.modulus();
    check_divisor(n, points)?;
    let mut counts = vec![0u64; n as usize];
    for k in singer.iter() {
        counts[(k % n) as usize] += 1;
    }
    let mut levels: Vec<u64> = counts.clone();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() != 2 {
        return Err(Error::NotTwoValued(
            levels.iter().map(|v| v.to_string()).collect(),
        ));
    }
    let size_of = |v: u64| counts.iter().filter(|&&c| c == v).count();
    let (a, b) = (levels[0], levels[1]);
    let on = match size_of(a).cmp(&size_of(b)) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal if counts[0] == a => b,
        std::cmp::Ordering::Equal => a,
    };
    let off = if on == a { b } else { a };
    let i: Vec<u64> = (0..n).filter(|&k| counts[k as usize] == on).collect();
    let delta = on as i64 - off as i64;
    if exact_log(delta.unsigned_abs(), ctx.p()).is_none() {
        return Err(Error::HypothesisFailed(format!(
            "delta = {delta} is not a power of {}",
            ctx.p()
        )));
    }
    let set = IndexSet::new(n, i.iter().copied());
    let lambda = if n > 1 {
        set.difference_set_lambda().ok_or_else(|| {
            Error::HypothesisFailed(format!("{set} is not a difference set"))
        })?
    } else {
        0
    };
    Ok(SubdiffResult {
        p: ctx.p(),
        f: ctx.f(),
        q,
        n,
        i,
        delta,
        sizes: [on, off],
        lambda,
    })
}

/// Table 1 of known sporadic cyclotomic strongly regular graphs, as (N, p, f).
pub const SPORADIC: [(u64, u64, u32); 11] = [
    (11, 3, 5),
    (19, 5, 9),
    (35, 3, 12),
    (37, 7, 9),
    (43, 11, 7),
    (67, 17, 33),
    (107, 3, 53),
    (133, 5, 18),
    (163, 41, 81),
    (323, 3, 144),
    (499, 5, 249),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyTag {
    /// C_0^(N) is the multiplicative group of the subfield of order p^d.
    Subfield { d: u32 },
    /// p^j = -1 mod N with j minimal.
    SemiPrimitive { j: u64 },
    /// Row of the sporadic table.
    Sporadic { row: usize },
    NotSrg,
    /// Two-valued by direct computation but outside every known family.
    UnclassifiedSrg,
}

/// Largest field on which classification also runs the exact spectrum test.
pub const GROUND_TRUTH_LIMIT: u64 = 1 << 20;

pub fn classify_cyclotomic(p: u64, f: u32, n: u64) -> Result<FamilyTag> {
    if let Some(row) = SPORADIC.iter().position(|&r| r == (n, p, f)) {
        return Ok(FamilyTag::Sporadic { row });
    }
    let order = checked_pow(p, f).ok_or(Error::FieldTooLarge { p, f })? - 1;
    check_divisor(n, order)?;
    for d in divisors(f as u64) {
        let d = d as u32;
        if d < f && order / (checked_pow(p, d).unwrap() - 1) == n {
            return Ok(FamilyTag::Subfield { d });
        }
    }
    if n > 1 {
        if let Some(j) = semiprimitive_exponent(p, n) {
            return Ok(FamilyTag::SemiPrimitive { j });
        }
    }
    if order < GROUND_TRUTH_LIMIT {
        let ctx = build_field_with(p, f, None, FieldOptions::default())?;
        if cyclotomic_is_srg(&ctx, n)? {
            log::warn!("Cay(F_{p}^{f}, C_0^({n})) is strongly regular but in no known family");
            return Ok(FamilyTag::UnclassifiedSrg);
        }
    }
    Ok(FamilyTag::NotSrg)
}

/// Whether psi(omega^a C_0^(N)) takes exactly two values over a in Z_N.
pub fn cyclotomic_is_srg(ctx: &FieldCtx, n: u64) -> Result<bool> {
    if n < 2 {
        return Ok(false);
    }
    // Cay(F, C_0) is undirected only when -1 lies in C_0.
    if ctx.p() != 2 && !(ctx.order() / 2).is_multiple_of(n) {
        return Ok(false);
    }
    let table = PeriodTable::build(ctx, n)?;
    let mut values: Vec<_> = (0..n).map(|a| table.period(a)).collect();
    values.sort();
    values.dedup();
    Ok(values.len() == 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn classes_partition_the_group() {
        let ctx = build_field(3, 4, None).unwrap();
        let mut seen = vec![false; ctx.order() as usize];
        for i in 0..5 {
            let class: Vec<_> = cyclotomic_class(&ctx, 5, i).unwrap().collect();
            assert_eq!(class.len(), 16);
            for x in class {
                let k = x.exp().unwrap() as usize;
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(cyclotomic_class(&ctx, 80, 7).unwrap().count(), 1);
        assert!(cyclotomic_class(&ctx, 7, 0).is_err());
    }

    #[test]
    fn singer_set_of_pg2_3() {
        let ctx = build_field(3, 3, None).unwrap();
        let h = singer_set(&ctx, 3).unwrap();
        assert_eq!(h.modulus(), 13);
        assert_eq!(h.len(), 4);
        assert_eq!(h.difference_set_lambda(), Some(1));
        // p is a multiplier: 3 H equals a translate of H.
        let scaled = h.scale(3);
        assert!((0..13).any(|t| h.translate(t) == scaled));
    }

    #[test]
    fn subfield_subdifference_set() {
        let ctx = build_field(3, 3, None).unwrap();
        let r = subdifference_set(&ctx, 3, 13).unwrap();
        assert_eq!(r.i.len(), 4);
        assert_eq!(r.delta.abs(), 1);
        assert!(r.gauss_identity_deviation(&ctx).unwrap() < 1e-9);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_cyclotomic(3, 5, 11).unwrap(), FamilyTag::Sporadic { row: 0 });
        assert_eq!(classify_cyclotomic(3, 8, 5).unwrap(), FamilyTag::SemiPrimitive { j: 2 });
        assert_eq!(classify_cyclotomic(3, 3, 13).unwrap(), FamilyTag::Subfield { d: 1 });
        assert_eq!(classify_cyclotomic(3, 4, 16).unwrap(), FamilyTag::NotSrg);
    }
}
