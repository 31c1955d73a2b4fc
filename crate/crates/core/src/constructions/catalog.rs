use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::{in_cyclic_subgroup, semiprimitive_exponent};
use crate::cyclotomy::SPORADIC;
use crate::error::{Error, Result};

use super::Side;

/// |I| for each row of the sporadic table, in the same order.
pub const SPORADIC_SUBDIFF_SIZES: [u64; 11] = [5, 9, 17, 9, 21, 33, 53, 33, 81, 161, 249];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// Subsets of F_{q^2m}; epsilon = -1.
    Elliptic,
    /// Subsets of F_{q^m} x F_{q^m}; epsilon = +1.
    Hyperbolic,
}

impl Geometry {
    pub fn epsilon(self) -> i64 {
        match self {
            Geometry::Elliptic => -1,
            Geometry::Hyperbolic => 1,
        }
    }
}

/// The full lift, or the halving of one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Halving {
    Full,
    Half(Side),
}

fn as_string<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Parameters (n^2, r(n - eps), eps n + r^2 - 3 eps r, r^2 - eps r) with n = q^m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogParams {
    pub epsilon: i64,
    #[serde(serialize_with = "as_string")]
    pub n: BigInt,
    #[serde(serialize_with = "as_string")]
    pub r: BigInt,
    #[serde(serialize_with = "as_string")]
    pub v: BigInt,
    #[serde(serialize_with = "as_string")]
    pub k: BigInt,
    #[serde(serialize_with = "as_string")]
    pub lambda: BigInt,
    #[serde(serialize_with = "as_string")]
    pub mu: BigInt,
}

impl CatalogParams {
    pub fn from_r(epsilon: i64, n: BigInt, r: BigInt) -> CatalogParams {
        let e = BigInt::from(epsilon);
        CatalogParams {
            v: &n * &n,
            k: &r * (&n - &e),
            lambda: &e * &n + &r * &r - BigInt::from(3) * &e * &r,
            mu: &r * &r - &e * &r,
            epsilon,
            n,
            r,
        }
    }

    pub fn as_u64(&self) -> Option<[u64; 4]> {
        let conv = |x: &BigInt| u64::try_from(x).ok();
        Some([conv(&self.v)?, conv(&self.k)?, conv(&self.lambda)?, conv(&self.mu)?])
    }
}

fn exact_div(a: &BigInt, b: &BigInt, what: &str) -> Result<BigInt> {
    if !(a % b).is_zero() {
        return Err(Error::HypothesisFailed(format!("{b} does not divide {what}")));
    }
    Ok(a / b)
}

/// Predicted parameters for a lift of Cay(F_{p^f}, C_0^(N)) with |I| = `i_size`.
pub fn catalog_params(
    geometry: Geometry,
    halving: Halving,
    p: u64,
    f: u32,
    n: u64,
    i_size: u64,
) -> Result<CatalogParams> {
    let qm = BigInt::from(p).pow(f);
    let q1 = &qm - BigInt::one();
    let nb = BigInt::from(n);
    exact_div(&q1, &nb, "q^m - 1")?;
    let r = match halving {
        Halving::Full => exact_div(&(&q1 * i_size), &nb, "(q^m - 1)|I|")?,
        Halving::Half(side) => {
            if n.is_multiple_of(2) {
                return Err(Error::EvenModulus(n));
            }
            let four = BigInt::from(4);
            let residue = (&qm % &four).to_string();
            match geometry {
                Geometry::Elliptic if residue != "3" => {
                    return Err(Error::BadModulusCongruence(format!("{p}^{f} is not 3 mod 4")))
                }
                Geometry::Hyperbolic => {
                    if residue != "1" {
                        return Err(Error::BadModulusCongruence(format!("{p}^{f} is not 1 mod 4")));
                    }
                    let cofactor = &q1 / &nb;
                    if !nb.gcd(&cofactor).is_one() {
                        return Err(Error::GcdConditionViolated {
                            n,
                            cofactor: u64::try_from(&cofactor % &nb).unwrap_or(0),
                        });
                    }
                }
                _ => {}
            }
            let size = match side {
                Side::Subdiff => i_size,
                Side::Complement => n - i_size,
            };
            exact_div(&(&q1 * size), &(BigInt::from(2) * &nb), "(q^m - 1)|P|")?
        }
    };
    Ok(CatalogParams::from_r(geometry.epsilon(), qm, r))
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub geometry: Geometry,
    pub halving: Halving,
    /// Source of I and of the partition.
    pub base: String,
    pub p: u64,
    pub f: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub subdiff_size: u64,
    pub params: CatalogParams,
}

fn entry(geometry: Geometry, halving: Halving, base: &str, p: u64, f: u32, n: u64, i_size: u64) -> Option<CatalogEntry> {
    catalog_params(geometry, halving, p, f, n, i_size)
        .ok()
        .map(|params| CatalogEntry {
            geometry,
            halving,
            base: base.to_string(),
            p,
            f,
            n,
            subdiff_size: i_size,
            params,
        })
}

const GEOMETRIES: [Geometry; 2] = [Geometry::Elliptic, Geometry::Hyperbolic];

/// Every family of the construction, with the sporadic rows in full and small
/// representatives of the parametric families.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for (row, &(n, p, f)) in SPORADIC.iter().enumerate() {
        let size = SPORADIC_SUBDIFF_SIZES[row];
        for g in GEOMETRIES {
            out.extend(entry(g, Halving::Full, "sporadic", p, f, n, size));
            let canonical = in_cyclic_subgroup(p % n, n - 2, n);
            let sides: &[Side] = if canonical {
                &[Side::Subdiff, Side::Complement]
            } else if (p, f, n) == (7, 9, 37) {
                &[Side::Complement]
            } else {
                &[]
            };
            for &side in sides {
                out.extend(entry(g, Halving::Half(side), "sporadic", p, f, n, size));
            }
        }
    }
    for (p, n, s) in [(3u64, 5u64, 2u32), (3, 5, 3), (2, 3, 2), (5, 13, 2), (7, 5, 2)] {
        let j = semiprimitive_exponent(p, n).expect("semi-primitive example");
        let f = 2 * j as u32 * s;
        for g in GEOMETRIES {
            out.extend(entry(g, Halving::Full, "semi-primitive", p, f, n, 1));
            if p != 2 {
                for side in [Side::Subdiff, Side::Complement] {
                    out.extend(entry(g, Halving::Half(side), "semi-primitive", p, f, n, 1));
                }
            }
        }
    }
    for (p, f, d) in [(2u64, 4u32, 2u32), (3, 3, 1), (3, 4, 2), (5, 3, 1), (2, 6, 3)] {
        let pd = p.pow(d);
        let n = (p.pow(f) - 1) / (pd - 1);
        let size = (p.pow(f - d) - 1) / (pd - 1);
        for g in GEOMETRIES {
            out.extend(entry(g, Halving::Full, "subfield", p, f, n, size));
        }
    }
    for q in [3u64, 5, 7, 9, 11, 17, 19, 23] {
        let (p, e) = crate::arith::prime_power(q).expect("prime power");
        let n = q * q + q + 1;
        for g in GEOMETRIES {
            out.extend(entry(g, Halving::Half(Side::Subdiff), "conic", p, 3 * e, n, q + 1));
        }
    }
    for (q, m) in [(3u64, 3u32), (3, 5), (7, 3), (5, 3), (9, 3), (11, 3)] {
        let (p, e) = crate::arith::prime_power(q).expect("prime power");
        let n = (q.pow(m) - 1) / (q - 1);
        let size = (q.pow(m - 1) - 1) / (q - 1);
        for g in GEOMETRIES {
            out.extend(entry(g, Halving::Half(Side::Complement), "quadric", p, m * e, n, size));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: Geometry, h: Halving, p: u64, f: u32, n: u64, i: u64) -> [u64; 4] {
        catalog_params(g, h, p, f, n, i).unwrap().as_u64().unwrap()
    }

    #[test]
    fn small_instances() {
        use Geometry::*;
        assert_eq!(params(Elliptic, Halving::Full, 3, 3, 13, 4), [729, 224, 61, 72]);
        assert_eq!(params(Hyperbolic, Halving::Full, 3, 3, 13, 4), [729, 208, 67, 56]);
        assert_eq!(params(Elliptic, Halving::Half(Side::Subdiff), 3, 3, 13, 4), [729, 112, 1, 20]);
        assert_eq!(params(Elliptic, Halving::Half(Side::Complement), 3, 3, 13, 4), [729, 252, 81, 90]);
        assert_eq!(
            params(Hyperbolic, Halving::Half(Side::Complement), 5, 3, 31, 6),
            [15625, 6200, 2475, 2450]
        );
        assert_eq!(
            params(Elliptic, Halving::Half(Side::Subdiff), 3, 5, 11, 5),
            [59049, 13420, 2947, 3080]
        );
        assert!(matches!(
            catalog_params(Hyperbolic, Halving::Half(Side::Subdiff), 3, 3, 13, 4),
            Err(Error::BadModulusCongruence(_))
        ));
    }

    #[test]
    fn sporadic_halvings_match_known_lists() {
        let cat = catalog();
        let rows = |g: Geometry, side: Side| -> Vec<(u64, u32, u64)> {
            cat.iter()
                .filter(|e| e.base == "sporadic" && e.geometry == g && e.halving == Halving::Half(side))
                .map(|e| (e.p, e.f, e.n))
                .collect()
        };
        assert_eq!(
            rows(Geometry::Elliptic, Side::Subdiff),
            vec![(3, 5, 11), (11, 7, 43), (3, 53, 107)]
        );
        assert_eq!(
            rows(Geometry::Elliptic, Side::Complement),
            vec![(3, 5, 11), (7, 9, 37), (11, 7, 43), (3, 53, 107)]
        );
        let mut hyp = rows(Geometry::Hyperbolic, Side::Subdiff);
        hyp.sort();
        let mut expected = vec![
            (3, 12, 35), (5, 9, 19), (17, 33, 67), (5, 18, 133), (41, 81, 163), (3, 144, 323), (5, 249, 499),
        ];
        expected.sort();
        assert_eq!(hyp, expected);
        let big = cat.iter().find(|e| e.p == 5 && e.f == 249).unwrap();
        let json = serde_json::to_value(&big.params).unwrap();
        assert!(json["v"].is_string());
    }
}
