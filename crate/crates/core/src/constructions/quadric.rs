use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cyclotomy::{singer_set, IndexSet};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

use super::conic::relative_degree;
use super::{build_halving_sets, partition_from_x, HalvingIndexSets, Side};

/// Square class of an element of F_q inside F_{q^m}: None for 0, Some(0) for
/// squares, Some(1) for non-squares.
fn square_class(x: FieldElem, n: u64) -> Option<u8> {
    x.exp().map(|j| {
        debug_assert_eq!(j % n, 0, "not in the subfield");
        ((j / n) % 2) as u8
    })
}

/// Tangent elements a_1, ..., a_{(m-1)/2} of the parabolic quadric
/// A = {x : Tr(x^2) = 0} and the point b off A, chosen greedily in exponent order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricFrame {
    pub q: u64,
    pub m: u32,
    /// Exponents of a_1, ..., a_L.
    pub a: Vec<u64>,
    /// Exponent of b.
    pub b: u64,
}

/// Per-exponent trace data for x = omega^k, 0 <= k < q^m - 1.
#[derive(Clone, Debug)]
pub struct QuadricGeometry {
    pub frame: QuadricFrame,
    pub n: u64,
    /// Square class of Tr(x^2).
    pub quad: Vec<Option<u8>>,
    /// Square class of Tr(x a_l), one row per l.
    pub tangent: Vec<Vec<Option<u8>>>,
    /// Square class of Tr(x b).
    pub flat_b: Vec<Option<u8>>,
    /// Exponents in span(a_1..a_l) minus 0, for l = 0..=L.
    pub spans: Vec<HashSet<u64>>,
}

impl QuadricGeometry {
    pub fn new(ctx: &FieldCtx, q: u64) -> Result<QuadricGeometry> {
        let (e, m) = relative_degree(ctx, q)?;
        if m % 2 == 0 || m < 3 {
            return Err(Error::EvenParameters(format!("m = {m} must be odd and at least 3")));
        }
        let q1 = ctx.order();
        let n = q1 / (q - 1);
        let tr = |x: FieldElem| ctx.trace(e, x);
        let mut quad = Vec::with_capacity(q1 as usize);
        for k in 0..q1 {
            quad.push(square_class(tr(ctx.elem(2 * k))?, n));
        }
        let singular = quad.iter().filter(|c| c.is_none()).count() as u64;
        if singular != q.pow(m - 1) - 1 {
            return Err(Error::FrameSelectionFailed(format!("|A| = {singular}")));
        }
        let scalars: Vec<FieldElem> = std::iter::once(FieldElem::Zero)
            .chain((0..q - 1).map(|j| ctx.elem(j * n)))
            .collect();
        let levels = (m - 1) / 2;
        let mut a: Vec<u64> = Vec::new();
        let mut tangent: Vec<Vec<Option<u8>>> = Vec::new();
        let mut spans = vec![HashSet::new()];
        let on_flat = |tangent: &Vec<Vec<Option<u8>>>, k: u64| tangent.iter().all(|row| row[k as usize].is_none());
        for level in 1..=levels {
            let cone = (0..q1).filter(|&k| quad[k as usize].is_none() && on_flat(&tangent, k));
            let expected = q.pow(m - level) - 1;
            let cone: Vec<u64> = cone.collect();
            if cone.len() as u64 != expected {
                return Err(Error::FrameSelectionFailed(format!(
                    "cone at level {level} has {} points, expected {expected}",
                    cone.len()
                )));
            }
            let span = spans.last().unwrap();
            let pick = *cone
                .iter()
                .find(|&&k| !span.contains(&k))
                .ok_or_else(|| Error::FrameSelectionFailed(format!("no independent a_{level}")))?;
            let mut next = span.clone();
            for &s in span.iter().chain(std::iter::once(&u64::MAX)) {
                let base = if s == u64::MAX { FieldElem::Zero } else { ctx.elem(s) };
                for &c in &scalars[1..] {
                    if let FieldElem::Exp(k) = ctx.add(base, ctx.mul(c, ctx.elem(pick))) {
                        next.insert(k);
                    }
                }
            }
            let mut row = Vec::with_capacity(q1 as usize);
            for k in 0..q1 {
                row.push(square_class(tr(ctx.elem(k + pick))?, n));
            }
            a.push(pick);
            tangent.push(row);
            spans.push(next);
        }
        let span = spans.last().unwrap();
        let cone_top = (0..q1).filter(|&k| quad[k as usize].is_none() && on_flat(&tangent, k)).count();
        if cone_top != span.len() {
            return Err(Error::FrameSelectionFailed("top cone is not the span of the a_i".into()));
        }
        let b = (0..q1)
            .find(|&k| quad[k as usize].is_some() && on_flat(&tangent, k))
            .ok_or_else(|| Error::FrameSelectionFailed("no point b off the quadric".into()))?;
        let mut flat_b = Vec::with_capacity(q1 as usize);
        for k in 0..q1 {
            flat_b.push(square_class(tr(ctx.elem(k + b))?, n));
        }
        Ok(QuadricGeometry {
            frame: QuadricFrame { q, m, a, b },
            n,
            quad,
            tangent,
            flat_b,
            spans,
        })
    }

    pub fn levels(&self) -> usize {
        self.frame.a.len()
    }

    pub fn order(&self) -> u64 {
        self.quad.len() as u64
    }

    /// omega^k in H_1 cap ... cap H_l.
    pub fn on_hyperplanes(&self, l: usize, k: u64) -> bool {
        self.tangent[..l].iter().all(|row| row[k as usize].is_none())
    }

    /// omega^k in T_l (1-based l).
    pub fn in_t(&self, l: usize, k: u64) -> bool {
        let k_us = k as usize;
        if !self.on_hyperplanes(l - 1, k) {
            return false;
        }
        match (self.quad[k_us], self.tangent[l - 1][k_us]) {
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }

    /// omega^k in B = {sum a_i x_i + b y : y a nonzero square}.
    pub fn in_b(&self, k: u64) -> bool {
        let k_us = k as usize;
        self.quad[k_us].is_some()
            && self.on_hyperplanes(self.levels(), k)
            && self.flat_b[k_us] == self.quad[self.frame.b as usize]
    }

    pub fn in_d(&self, k: u64) -> bool {
        (1..=self.levels()).any(|l| self.in_t(l, k)) || self.in_b(k)
    }
}

#[derive(Clone, Debug)]
pub struct QuadricPartition {
    pub geometry: QuadricGeometry,
    pub halving: HalvingIndexSets,
}

/// The partition (T_1, T_2) of Z_N minus I read from D = T_1 cup ... cup T_L cup B.
pub fn quadric_complement_partition(ctx: &FieldCtx, q: u64) -> Result<QuadricPartition> {
    let geometry = QuadricGeometry::new(ctx, q)?;
    let q1 = geometry.order();
    let n = geometry.n;
    let in_d: Vec<bool> = (0..q1).map(|k| geometry.in_d(k)).collect();
    for k in 0..q1 {
        let shifted = in_d[((k + n) % q1) as usize];
        let off_quadric = geometry.quad[k as usize].is_some();
        if (in_d[k as usize] && shifted) || ((in_d[k as usize] || shifted) != off_quadric) {
            return Err(Error::FrameSelectionFailed(format!(
                "D and omega^N D do not split the complement of A at exponent {k}"
            )));
        }
    }
    let size = in_d.iter().filter(|&&b| b).count() as u64;
    let expected = q.pow(geometry.frame.m - 1) * (q - 1) / 2;
    if size != expected {
        return Err(Error::FrameSelectionFailed(format!("|D| = {size}, expected {expected}")));
    }
    let two_n = 2 * n;
    let mut x = Vec::new();
    for t in 0..two_n {
        let members = (t..q1).step_by(two_n as usize).filter(|&k| in_d[k as usize]).count() as u64;
        if members == q1 / two_n {
            x.push(t);
        } else if members != 0 {
            return Err(Error::InconsistentIndexSets(format!("D splits the class C_{t}^(2N)")));
        }
    }
    let x = IndexSet::new(two_n, x);
    let partition = partition_from_x(&x, Side::Complement)?;
    partition.validate(&singer_set(ctx, q)?)?;
    let halving = build_halving_sets(&partition)?;
    Ok(QuadricPartition { geometry, halving })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn quadric_over_f27() {
        let ctx = build_field(3, 3, None).unwrap();
        let qp = quadric_complement_partition(&ctx, 3).unwrap();
        let g = &qp.geometry;
        assert_eq!(g.levels(), 1);
        assert_eq!(qp.halving.x.len(), 9);
        assert_eq!(qp.halving.partition.union().len(), 9);
        assert!(g.spans[1].contains(&g.frame.a[0]));
        assert_eq!(g.spans[1].len(), 2);
    }

    #[test]
    fn quadric_over_f243_has_two_levels() {
        let ctx = build_field(3, 5, None).unwrap();
        let qp = quadric_complement_partition(&ctx, 3).unwrap();
        assert_eq!(qp.geometry.levels(), 2);
        assert_eq!(qp.geometry.spans[2].len(), 8);
        assert_eq!(qp.halving.x.len() as u64, 121 - 40);
    }

    #[test]
    fn even_degree_rejected() {
        let ctx = build_field(3, 4, None).unwrap();
        assert!(matches!(QuadricGeometry::new(&ctx, 3), Err(Error::EvenParameters(_))));
    }
}
