//! Additive and multiplicative characters of a finite field.
//!
//! The canonical additive character is psi(x) = zeta_p^{tr(x)}. Exact sums of
//! additive characters are elements of Z[zeta_p] and are kept as [`CycInt`].

pub mod cycint;
pub mod gauss;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

pub use cycint::CycInt;
pub use gauss::*;

pub type ComplexVal = Complex64;

/// exp(2 pi i num / den), reducing the angle exactly before converting.
pub fn unit_root(num: u64, den: u64) -> Complex64 {
    let r = num % den;
    Complex64::from_polar(1.0, std::f64::consts::TAU * (r as f64 / den as f64))
}

/// Relative comparison |a - b| <= rel * max(1, |a|, |b|).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
}

impl Tolerance {
    pub fn new(rel: f64) -> Tolerance {
        Tolerance { rel }
    }

    /// Default for sums over F_q: 1e-9 * sqrt(q).
    pub fn for_field(q: u64) -> Tolerance {
        Tolerance {
            rel: 1e-9 * (q as f64).sqrt(),
        }
    }

    pub fn close(&self, a: Complex64, b: Complex64) -> bool {
        rel_deviation(a, b) <= self.rel
    }
}

pub fn rel_deviation(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn merge(mut self, other: CompensatedSum) -> CompensatedSum {
        self.add(other.sum);
        self.add(other.comp);
        self
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn two_sum(s: f64, x: f64, comp: &mut f64) -> f64 {
    let t = s + x;
    *comp += if s.abs() >= x.abs() {
        (s - t) + x
    } else {
        (x - t) + s
    };
    t
}

/// The multiplicative character chi(omega^k) = zeta_n^{jk}, for n dividing q - 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultChar {
    n: u64,
    j: u64,
    group: u64,
}

impl MultChar {
    pub fn new(ctx: &FieldCtx, n: u64, j: u64) -> Result<MultChar> {
        if n == 0 || !ctx.order().is_multiple_of(n) {
            return Err(Error::BadDivisor {
                n,
                order: ctx.order(),
            });
        }
        Ok(MultChar {
            n,
            j: j % n,
            group: ctx.order(),
        })
    }

    pub fn trivial(ctx: &FieldCtx) -> MultChar {
        MultChar {
            n: 1,
            j: 0,
            group: ctx.order(),
        }
    }

    /// The quadratic character eta.
    pub fn quadratic(ctx: &FieldCtx) -> Result<MultChar> {
        if ctx.p() == 2 {
            return Err(Error::EvenCharacteristic);
        }
        MultChar::new(ctx, 2, 1)
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn index(&self) -> u64 {
        self.j
    }

    /// Exact order n / gcd(j, n).
    pub fn order(&self) -> u64 {
        self.n / gcd(self.j, self.n)
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }

    /// The same character written as zeta_d^{e k} with d its exact order.
    pub fn reduced(&self) -> (u64, u64) {
        let g = gcd(self.j, self.n);
        (self.n / g, self.j / g)
    }

    /// chi(omega^k) = zeta_d^{result} with d = order().
    pub fn exponent(&self, k: u64) -> u64 {
        let (d, e) = self.reduced();
        ((e as u128 * (k % d) as u128) % d as u128) as u64
    }

    pub fn eval_exp(&self, k: u64) -> Complex64 {
        let (d, _) = self.reduced();
        unit_root(self.exponent(k), d)
    }

    pub fn eval(&self, x: FieldElem) -> Complex64 {
        match x {
            FieldElem::Zero => Complex64::new(0.0, 0.0),
            FieldElem::Exp(k) => self.eval_exp(k),
        }
    }

    fn widen(&self, n: u64) -> u64 {
        ((self.j as u128 * (n / self.n) as u128) % n as u128) as u64
    }

    pub fn mul(&self, other: &MultChar) -> MultChar {
        assert_eq!(self.group, other.group, "characters of different fields");
        let n = self.n / gcd(self.n, other.n) * other.n;
        MultChar {
            n,
            j: (self.widen(n) + other.widen(n)) % n,
            group: self.group,
        }
    }

    pub fn pow(&self, e: i64) -> MultChar {
        let j = ((self.j as i128 * e as i128).rem_euclid(self.n as i128)) as u64;
        MultChar { j, ..*self }
    }

    pub fn inverse(&self) -> MultChar {
        self.pow(-1)
    }
}

/// tr(a x) as a residue mod p, so that psi_a(x) = zeta_p^{result}.
pub fn additive_char_exponent(ctx: &FieldCtx, a: FieldElem, x: FieldElem) -> u64 {
    ctx.abs_trace(ctx.mul(a, x))
}

/// Exact sum of psi_a over the elements of `set`.
pub fn char_sum_exact<I>(ctx: &FieldCtx, a: FieldElem, set: I) -> CycInt
where
    I: IntoIterator<Item = FieldElem>,
{
    let p = ctx.p();
    let mut counts = vec![0u64; p as usize];
    if a.is_zero() {
        counts[0] = set.into_iter().count() as u64;
    } else {
        for x in set {
            counts[additive_char_exponent(ctx, a, x) as usize] += 1;
        }
    }
    CycInt::from_counts(p, &counts)
}

/// Trace distribution of every cyclotomic class C_t^(M), computed in one sweep.
///
/// Any additive character sum over a union of classes, twisted by omega^a,
/// is a sum of rows of this table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodTable {
    pub p: u64,
    pub modulus: u64,
    pub rows: Vec<Vec<u64>>,
}

impl PeriodTable {
    pub fn build(ctx: &FieldCtx, modulus: u64) -> Result<PeriodTable> {
        Ok(PeriodTable {
            p: ctx.p(),
            modulus,
            rows: ctx.class_trace_counts(modulus)?,
        })
    }

    /// psi(C_t^(M)) exactly.
    pub fn period(&self, t: u64) -> CycInt {
        CycInt::from_counts(self.p, &self.rows[(t % self.modulus) as usize])
    }

    /// psi(omega^a * union of C_t^(M) over t in `indices`).
    pub fn twisted_sum(&self, a: u64, indices: &[u64]) -> CycInt {
        let p = self.p as usize;
        let mut acc = vec![0u64; p];
        for &t in indices {
            let row = &self.rows[((t + a) % self.modulus) as usize];
            acc.iter_mut().zip(row).for_each(|(x, y)| *x += y);
        }
        CycInt::from_counts(self.p, &acc)
    }

    /// The same table for a divisor of the modulus, by merging rows.
    pub fn coarsen(&self, modulus: u64) -> PeriodTable {
        assert_eq!(self.modulus % modulus, 0, "{modulus} must divide {}", self.modulus);
        let mut rows = vec![vec![0u64; self.p as usize]; modulus as usize];
        for (t, row) in self.rows.iter().enumerate() {
            let dst = &mut rows[t % modulus as usize];
            dst.iter_mut().zip(row).for_each(|(x, y)| *x += y);
        }
        PeriodTable {
            p: self.p,
            modulus,
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn additive_exponent_in_f9() {
        let ctx = build_field(3, 2, None).unwrap();
        assert_eq!(additive_char_exponent(&ctx, ctx.one(), ctx.one()), 2);
        assert_eq!(additive_char_exponent(&ctx, FieldElem::Zero, ctx.omega()), 0);
    }

    #[test]
    fn exact_sums_over_simple_sets() {
        let ctx = build_field(3, 2, None).unwrap();
        let all = (0..ctx.order()).map(|k| ctx.elem(k));
        assert_eq!(char_sum_exact(&ctx, ctx.omega(), all).as_integer(), Some(-1));
        assert!(char_sum_exact(&ctx, ctx.one(), std::iter::empty()).is_zero());
        let squares = (0..4).map(|k| ctx.elem(2 * k));
        assert_eq!(char_sum_exact(&ctx, ctx.one(), squares).as_integer(), Some(1));
    }

    #[test]
    fn characters_are_multiplicative() {
        let ctx = build_field(5, 2, None).unwrap();
        let chi = MultChar::new(&ctx, 8, 3).unwrap();
        assert_eq!(chi.order(), 8);
        for (a, b) in [(1, 2), (5, 23), (17, 9)] {
            let lhs = chi.eval(ctx.mul(ctx.elem(a), ctx.elem(b)));
            let rhs = chi.eval(ctx.elem(a)) * chi.eval(ctx.elem(b));
            assert!((lhs - rhs).norm() < 1e-12);
        }
        let psi = MultChar::new(&ctx, 3, 1).unwrap();
        let prod = chi.mul(&psi);
        assert_eq!(prod.order(), 24);
        assert!((prod.eval_exp(7) - chi.eval_exp(7) * psi.eval_exp(7)).norm() < 1e-12);
        assert!(chi.pow(8).is_trivial());
        assert!(MultChar::new(&ctx, 7, 1).is_err());
    }

    #[test]
    fn compensated_sum_is_order_stable() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(Complex64::new(x, 0.0));
        }
        assert_eq!(s.value().re, 2.0);
    }

    #[test]
    fn coarsened_table_matches_direct() {
        let ctx = build_field(3, 4, None).unwrap();
        let fine = PeriodTable::build(&ctx, 16).unwrap();
        let coarse = PeriodTable::build(&ctx, 4).unwrap();
        assert_eq!(fine.coarsen(4).rows, coarse.rows);
        assert_eq!(
            fine.twisted_sum(1, &[0, 4, 8, 12]),
            coarse.twisted_sum(1, &[0])
        );
    }
}
