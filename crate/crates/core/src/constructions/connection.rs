use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{gcd, inv_mod};
use crate::cyclotomy::IndexSet;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldSpec};

use super::HalvingIndexSets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductKind {
    /// {(u, w) : uw in the union of C_i^(N), i in I}.
    Full,
    /// {(xy, x y^-1 z omega^l) : x in C_0^(N), y in C_0^(Q/N), z in C_0^(4N), l in Y}.
    Half,
}

/// A connection set, described by index data over a concrete field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConnectionSet {
    /// Union of the classes C_t^(M) of the field, t in `indices` (mod M).
    Additive { field: FieldSpec, indices: IndexSet },
    /// Subset of F x F. `indices` is I (mod N) for `Full` and Y (mod 4N) for `Half`.
    Product {
        field: FieldSpec,
        product: ProductKind,
        n: u64,
        indices: IndexSet,
        include_axes: bool,
    },
}

/// Cell description of a product set: (omega^s, omega^t) belongs exactly when
/// t - tau(s mod K) mod K lies in `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRule {
    pub k: u64,
    pub base: IndexSet,
    pub tau: Vec<u64>,
}

impl CellRule {
    pub fn contains(&self, s: u64, t: u64) -> bool {
        let k = self.k;
        let a = (s % k) as usize;
        self.base.contains((t % k + k - self.tau[a]) % k)
    }
}

fn order_of(spec: &FieldSpec) -> Result<u64> {
    crate::arith::checked_pow(spec.p, spec.f)
        .map(|q| q - 1)
        .ok_or(Error::FieldTooLarge { p: spec.p, f: spec.f })
}

impl ConnectionSet {
    pub fn field(&self) -> &FieldSpec {
        match self {
            ConnectionSet::Additive { field, .. } | ConnectionSet::Product { field, .. } => field,
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self, ConnectionSet::Product { .. })
    }

    fn order(&self) -> u64 {
        order_of(self.field()).expect("validated at construction")
    }

    /// Number of vertices of the Cayley graph.
    pub fn vertex_count(&self) -> u128 {
        let n = self.order() as u128 + 1;
        if self.is_product() {
            n * n
        } else {
            n
        }
    }

    pub fn cells(&self) -> Option<CellRule> {
        let ConnectionSet::Product { product, n, indices, .. } = self else {
            return None;
        };
        let q1 = self.order();
        Some(match product {
            ProductKind::Full => CellRule {
                k: *n,
                base: indices.clone(),
                tau: (0..*n).map(|a| (n - a) % n).collect(),
            },
            ProductKind::Half => {
                let k = 4 * n;
                let m = q1 / n;
                let minv = inv_mod(m % n, *n).expect("validated at construction");
                let tau = (0..k)
                    .map(|s| {
                        let beta = (s % n) * minv % n;
                        let shift = (2 * (m % k) % k) * beta % k;
                        (s + k - shift) % k
                    })
                    .collect();
                CellRule { k, base: indices.clone(), tau }
            }
        })
    }

    pub fn cardinality(&self) -> u128 {
        let q1 = self.order() as u128;
        match self {
            ConnectionSet::Additive { indices, .. } => {
                q1 / indices.modulus() as u128 * indices.len() as u128
            }
            ConnectionSet::Product { include_axes, .. } => {
                let cells = self.cells().expect("product");
                let per_row = cells.base.len() as u128 * (q1 / cells.k as u128);
                q1 * per_row + if *include_axes { 2 * q1 } else { 0 }
            }
        }
    }

    /// Whether D = -D, decided on the index data.
    pub fn is_symmetric(&self) -> bool {
        let q1 = self.order();
        if self.field().p == 2 {
            return true;
        }
        let half = q1 / 2;
        match self {
            ConnectionSet::Additive { indices, .. } => {
                indices.translate((half % indices.modulus()) as i64) == *indices
            }
            ConnectionSet::Product { .. } => {
                let c = self.cells().expect("product");
                let h = half % c.k;
                (0..c.k).all(|a| {
                    c.base.iter().all(|b| {
                        let t = b + c.tau[a as usize] + h;
                        c.contains(a + h, t)
                    })
                })
            }
        }
    }

    /// Membership of (omega^s or 0, omega^t or 0) in a product set, or of
    /// omega^s in an additive set (`t` ignored).
    pub fn contains_exp(&self, s: Option<u64>, t: Option<u64>) -> bool {
        match self {
            ConnectionSet::Additive { indices, .. } => {
                s.is_some_and(|s| indices.contains(s % indices.modulus()))
            }
            ConnectionSet::Product { include_axes, .. } => match (s, t) {
                (Some(s), Some(t)) => self.cells().expect("product").contains(s, t),
                (None, None) => false,
                _ => *include_axes,
            },
        }
    }

    /// Calls `visit` with every element as a pair of exponents, `None` standing
    /// for 0. Additive sets report `(Some(k), None)`.
    pub fn for_each_exp(&self, mut visit: impl FnMut(Option<u64>, Option<u64>)) {
        let q1 = self.order();
        match self {
            ConnectionSet::Additive { indices, .. } => {
                let m = indices.modulus();
                for t in indices.iter() {
                    for j in 0..q1 / m {
                        visit(Some(t + j * m), None);
                    }
                }
            }
            ConnectionSet::Product { include_axes, .. } => {
                let c = self.cells().expect("product");
                for s in 0..q1 {
                    let shift = c.tau[(s % c.k) as usize];
                    for b in c.base.iter() {
                        let mut t = (b + shift) % c.k;
                        while t < q1 {
                            visit(Some(s), Some(t));
                            t += c.k;
                        }
                    }
                }
                if *include_axes {
                    for x in 0..q1 {
                        visit(None, Some(x));
                        visit(Some(x), None);
                    }
                }
            }
        }
    }

    /// Calls `visit` with the vertex id of every element.
    ///
    /// Field elements are identified with their packed coordinates (the
    /// coefficient of x^i is the base-p digit of weight p^i); a pair (u, w)
    /// is u * p^f + w.
    pub fn for_each_element(&self, ctx: &FieldCtx, mut visit: impl FnMut(u64)) -> Result<()> {
        if ctx.spec() != self.field() {
            return Err(Error::BadModulus("connection set belongs to a different field".into()));
        }
        let width = ctx.order() + 1;
        let product = self.is_product();
        if product && width.checked_mul(width).is_none() {
            return Err(Error::TooLarge(u64::MAX));
        }
        let packed: Vec<u64> = (0..ctx.order()).map(|k| ctx.antilog_packed(k)).collect();
        let pk = |e: Option<u64>| e.map_or(0, |k| packed[k as usize]);
        self.for_each_exp(|s, t| {
            if product {
                visit(pk(s) * width + pk(t));
            } else {
                visit(pk(s));
            }
        });
        Ok(())
    }

    pub fn elements(&self, ctx: &FieldCtx) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(self.cardinality().min(1 << 28) as usize);
        self.for_each_element(ctx, |v| out.push(v))?;
        out.sort_unstable();
        Ok(out)
    }

    /// SHA-256 of the canonical JSON description.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("serializable");
        hex::encode(Sha256::digest(&json))
    }
}

/// Union of C_t^(M) over t in `indices`, M = indices.modulus().
pub fn additive_connection(ctx: &FieldCtx, indices: IndexSet) -> Result<ConnectionSet> {
    let m = indices.modulus();
    if !ctx.order().is_multiple_of(m) {
        return Err(Error::BadDivisor { n: m, order: ctx.order() });
    }
    Ok(ConnectionSet::Additive {
        field: ctx.spec().clone(),
        indices,
    })
}

fn half_order(big: &FieldCtx) -> Result<u64> {
    if !big.f().is_multiple_of(2) {
        return Err(Error::BadSubfield { sub: big.f() / 2, f: big.f() });
    }
    crate::arith::checked_pow(big.p(), big.f() / 2).ok_or(Error::FieldTooLarge {
        p: big.p(),
        f: big.f() / 2,
    })
}

/// E_1 (subdiff side) or E_2 (complement side) in F_{q^2m}: the union of
/// C_t^(4N) over t in Y. Requires q^m = 3 mod 4.
pub fn elliptic_halving(big: &FieldCtx, sets: &HalvingIndexSets) -> Result<ConnectionSet> {
    let qm = half_order(big)?;
    if qm % 4 != 3 {
        return Err(Error::BadModulusCongruence(format!("q^m = {qm} is not 3 mod 4")));
    }
    if (qm - 1) % sets.n() != 0 {
        return Err(Error::BadDivisor { n: sets.n(), order: qm - 1 });
    }
    additive_connection(big, sets.y.clone())
}

/// H (or its complement analog when given Z_N minus I) in F x F.
pub fn hyperbolic_lift(ctx: &FieldCtx, indices: IndexSet, include_axes: bool) -> Result<ConnectionSet> {
    let n = indices.modulus();
    if !ctx.order().is_multiple_of(n) {
        return Err(Error::BadDivisor { n, order: ctx.order() });
    }
    Ok(ConnectionSet::Product {
        field: ctx.spec().clone(),
        product: ProductKind::Full,
        n,
        indices,
        include_axes,
    })
}

/// H_1 (subdiff side) or H_2 (complement side) in F x F. Requires q^m = 1 mod 4,
/// N odd and gcd(N, (q^m-1)/N) = 1.
pub fn hyperbolic_halving(
    ctx: &FieldCtx,
    sets: &HalvingIndexSets,
    include_axes: bool,
) -> Result<ConnectionSet> {
    let q1 = ctx.order();
    let n = sets.n();
    if (q1 + 1) % 4 != 1 {
        return Err(Error::BadModulusCongruence(format!("q^m = {} is not 1 mod 4", q1 + 1)));
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    if !q1.is_multiple_of(n) {
        return Err(Error::BadDivisor { n, order: q1 });
    }
    let cofactor = q1 / n;
    if gcd(n, cofactor) != 1 {
        return Err(Error::GcdConditionViolated { n, cofactor });
    }
    Ok(ConnectionSet::Product {
        field: ctx.spec().clone(),
        product: ProductKind::Half,
        n,
        indices: sets.y.clone(),
        include_axes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_halving_sets, PartitionSpec, Side};
    use crate::field::build_field;
    use std::collections::HashSet;

    fn half_sets(n: u64, p1: &[u64]) -> HalvingIndexSets {
        let part = PartitionSpec::new(
            Side::Subdiff,
            IndexSet::new(n, p1.iter().copied()),
            IndexSet::empty(n),
        )
        .unwrap();
        build_halving_sets(&part).unwrap()
    }

    #[test]
    fn product_cells_match_generator_definition() {
        // q^m = 81, N = 5: H_1 from its defining parametrization.
        let ctx = build_field(3, 4, None).unwrap();
        let sets = half_sets(5, &[0]);
        let set = hyperbolic_halving(&ctx, &sets, false).unwrap();
        let q1 = ctx.order();
        let (n, m) = (5u64, q1 / 5);
        let mut direct = HashSet::new();
        for i in 0..m {
            for j in 0..n {
                for k in 0..q1 / (4 * n) {
                    for l in sets.y.iter() {
                        let s = (n * i + m * j) % q1;
                        let t = (n * i + q1 - m * j + 4 * n * k + l) % q1;
                        direct.insert((s, t));
                    }
                }
            }
        }
        assert_eq!(direct.len() as u128, set.cardinality());
        for s in 0..q1 {
            for t in 0..q1 {
                assert_eq!(set.contains_exp(Some(s), Some(t)), direct.contains(&(s, t)));
            }
        }
        let elems = set.elements(&ctx).unwrap();
        assert_eq!(elems.len() as u128, set.cardinality());
        assert!(set.is_symmetric());
    }

    #[test]
    fn guards() {
        let ctx = build_field(3, 4, None).unwrap();
        assert!(matches!(
            hyperbolic_halving(&build_field(3, 3, None).unwrap(), &half_sets(13, &[0]), false),
            Err(Error::BadModulusCongruence(_))
        ));
        let big = build_field(3, 6, None).unwrap();
        assert!(elliptic_halving(&big, &half_sets(13, &[0])).is_ok());
        assert!(matches!(
            elliptic_halving(&ctx, &half_sets(5, &[0])),
            Err(Error::BadModulusCongruence(_))
        ));
        // q^m = 5^3: N = 31 and (q^m - 1)/N = 4 are coprime; N = 2 would not be odd.
        let f125 = build_field(5, 3, None).unwrap();
        assert!(hyperbolic_halving(&f125, &half_sets(31, &[0]), true).is_ok());
    }

    #[test]
    fn full_lift_is_the_norm_condition() {
        let ctx = build_field(3, 3, None).unwrap();
        let i = IndexSet::new(13, [0, 1, 3, 9]);
        let set = hyperbolic_lift(&ctx, i.clone(), true).unwrap();
        assert_eq!(set.cardinality(), 26 * 8 + 52);
        for (s, t) in [(0, 0), (5, 9), (12, 14), (7, 7)] {
            assert_eq!(set.contains_exp(Some(s), Some(t)), i.contains((s + t) % 13));
        }
        assert!(set.contains_exp(None, Some(3)));
        assert_eq!(set.elements(&ctx).unwrap().len(), 260);
        assert_ne!(set.content_hash(), hyperbolic_lift(&ctx, i, false).unwrap().content_hash());
    }
}
