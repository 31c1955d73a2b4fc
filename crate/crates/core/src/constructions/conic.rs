use serde::{Deserialize, Serialize};

use crate::arith::exact_log;
use crate::cyclotomy::{singer_set, IndexSet};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

use super::{build_halving_sets, partition_from_x, HalvingIndexSets, Side};

/// Halving data read off the conic {x : Tr(x^2) = 0} of PG(2, q).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConicPartition {
    /// {i mod N : Tr_{q^3/q}(omega^{2i}) = 0}, which equals 2^{-1} I.
    pub conic: IndexSet,
    /// Base point exponent d_0.
    pub base: u64,
    pub halving: HalvingIndexSets,
}

pub(crate) fn relative_degree(ctx: &FieldCtx, q: u64) -> Result<(u32, u32)> {
    if ctx.p() == 2 {
        return Err(Error::NotOddPrimePower(q));
    }
    let e = exact_log(q, ctx.p()).filter(|&e| e > 0).ok_or(Error::NotOddPrimePower(q))?;
    if !ctx.f().is_multiple_of(e) {
        return Err(Error::BadSubfield { sub: e, f: ctx.f() });
    }
    Ok((e, ctx.f() / e))
}

/// Exponents i in [0, N) with Tr_{q^m/q}(omega^{2i}) = 0.
pub(crate) fn conic_points(ctx: &FieldCtx, e: u32, n: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for i in 0..n {
        if ctx.trace(e, ctx.elem(2 * i))?.is_zero() {
            out.push(i);
        }
    }
    Ok(out)
}

/// X = {log(omega^{d_i} Tr(omega^{d_0 + d_i})) : i >= 1} cup {log(2 omega^{d_0})} mod 2N,
/// where d_0 is the `base`-th smallest conic exponent.
pub fn conic_x(ctx: &FieldCtx, q: u64, base: usize) -> Result<IndexSet> {
    let (e, m) = relative_degree(ctx, q)?;
    if m != 3 {
        return Err(Error::HypothesisFailed(format!("conic construction needs m = 3, got {m}")));
    }
    let n = ctx.order() / (q - 1);
    let points = conic_points(ctx, e, n)?;
    let d0 = *points
        .get(base)
        .ok_or_else(|| Error::FrameSelectionFailed(format!("no conic point number {base}")))?;
    let mut logs = Vec::with_capacity(points.len());
    for &d in &points {
        let x = if d == d0 {
            ctx.mul(ctx.from_int(2), ctx.elem(d0))
        } else {
            let t = ctx.trace(e, ctx.elem(d0 + d))?;
            ctx.mul(ctx.elem(d), t)
        };
        match x {
            FieldElem::Zero => {
                return Err(Error::FrameSelectionFailed(format!("tangent at {d0} meets {d}")))
            }
            FieldElem::Exp(k) => logs.push(k % (2 * n)),
        }
    }
    let x = IndexSet::new(2 * n, logs);
    if x.len() != points.len() || x.reduce(n) != IndexSet::new(n, points.iter().copied()) {
        return Err(Error::InconsistentIndexSets(format!("{x} does not lie over the conic")));
    }
    Ok(x)
}

/// The partition (S_1, S_2) of I, for m = 3, read from the conic.
pub fn conic_partition_m3(ctx: &FieldCtx, q: u64) -> Result<ConicPartition> {
    let (e, _) = relative_degree(ctx, q)?;
    let x = conic_x(ctx, q, 0)?;
    let n = x.modulus() / 2;
    let conic = IndexSet::new(n, conic_points(ctx, e, n)?);
    let partition = partition_from_x(&x, Side::Subdiff)?;
    partition.validate(&singer_set(ctx, q)?)?;
    let halving = build_halving_sets(&partition)?;
    debug_assert_eq!(halving.x, x);
    Ok(ConicPartition {
        base: conic.residues()[0],
        conic,
        halving,
    })
}
