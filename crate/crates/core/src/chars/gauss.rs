//! Gauss sums, Gauss periods and the classical identities relating them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{unit_root, CompensatedSum, CycInt, MultChar, PeriodTable};
use crate::arith::{checked_pow, semiprimitive_exponent};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};

/// Above this many (character value, trace) buckets the direct sum is
/// accumulated in floating point instead of being counted exactly.
const COUNT_BUCKETS: u64 = 1 << 22;

/// G(chi) = sum over x != 0 of chi(x) psi(x), summed directly.
pub fn gauss_sum_direct(ctx: &FieldCtx, chi: &MultChar) -> Complex64 {
    let p = ctx.p();
    let (d, e) = chi.reduced();
    if d.saturating_mul(p) <= COUNT_BUCKETS {
        let pu = p as usize;
        let counts = ctx.sweep(
            ctx.order(),
            || vec![0u64; d as usize * pu],
            |acc, k, c| {
                let a = ((e as u128 * (k % d) as u128) % d as u128) as usize;
                acc[a * pu + ctx.trace_coords(c) as usize] += 1;
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
        let mut total = CompensatedSum::default();
        for (a, row) in counts.chunks(pu).enumerate() {
            let inner = CycInt::from_counts(p, row);
            if !inner.is_zero() {
                total.add(inner.to_complex() * unit_root(a as u64, d));
            }
        }
        total.value()
    } else {
        ctx.sweep(
            ctx.order(),
            CompensatedSum::default,
            |acc, k, c| {
                let a = (e as u128 * (k % d) as u128) % d as u128;
                acc.add(unit_root(a as u64, d) * unit_root(ctx.trace_coords(c), p));
            },
            CompensatedSum::merge,
        )
        .value()
    }
}

/// Families of Gauss sums with a known closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// The quadratic character of F_{p^s}, p odd.
    Quadratic { p: u64, s: u32 },
    /// A character of order n of F_{p^f}, where p^j = -1 mod n for some j.
    Semiprimitive { p: u64, n: u64, f: u32 },
}

pub fn gauss_sum_closed(kind: ClosedForm) -> Result<Complex64> {
    match kind {
        ClosedForm::Quadratic { p, s } => {
            if p == 2 {
                return Err(Error::EvenCharacteristic);
            }
            let root_q = (p as f64).powf(s as f64 / 2.0);
            let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
            let v = if p % 4 == 1 {
                Complex64::new(root_q, 0.0)
            } else {
                Complex64::i().powu(s) * root_q
            };
            Ok(v * sign)
        }
        ClosedForm::Semiprimitive { p, n, f } => {
            let fail = |reason: String| Error::NotSemiprimitive { p, n, reason };
            if n <= 2 {
                return Err(fail("n must exceed 2".into()));
            }
            let j = semiprimitive_exponent(p, n)
                .ok_or_else(|| fail("-1 is not a power of p modulo n".into()))?;
            if !(f as u64).is_multiple_of(2 * j) {
                return Err(fail(format!("2j = {} does not divide f = {f}", 2 * j)));
            }
            let s = f as u64 / (2 * j);
            let mut parity = s - 1;
            if p != 2 {
                let pj = checked_pow(p, j as u32).ok_or_else(|| fail("p^j overflows".into()))?;
                parity += ((pj as u128 + 1) * s as u128 / n as u128 % 2) as u64;
            }
            let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
            Ok(Complex64::new(sign * (p as f64).powf(f as f64 / 2.0), 0.0))
        }
    }
}

/// psi(C_i^(N)) for every i in Z_N, exactly.
pub fn gauss_periods(ctx: &FieldCtx, n: u64) -> Result<Vec<CycInt>> {
    let table = PeriodTable::build(ctx, n)?;
    Ok((0..n).map(|i| table.period(i)).collect())
}

pub fn gauss_period_exact(ctx: &FieldCtx, n: u64, i: u64) -> Result<CycInt> {
    Ok(PeriodTable::build(ctx, n)?.period(i))
}

/// G(eta) as an exact element of Z[zeta_p], namely psi(C_0^(2)) - psi(C_1^(2)).
pub fn quadratic_gauss_exact(ctx: &FieldCtx) -> Result<CycInt> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let periods = gauss_periods(ctx, 2)?;
    Ok(&periods[0] - &periods[1])
}

/// Both sides of a Gauss sum identity and their relative deviation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub deviation: f64,
}

impl IdentityCheck {
    fn new(lhs: Complex64, rhs: Complex64) -> IdentityCheck {
        IdentityCheck {
            lhs,
            rhs,
            deviation: super::rel_deviation(lhs, rhs),
        }
    }
}

/// G_{q^m}(chi') = (-1)^{m-1} G_q(chi)^m, where `big` is F_{q^m} and chi is
/// the character omega_q^k -> zeta_n^{jk} of the subfield F_q.
pub fn davenport_hasse_lift(big: &FieldCtx, m: u32, n: u64, j: u64) -> Result<IdentityCheck> {
    if m == 0 || !big.f().is_multiple_of(m) {
        return Err(Error::BadSubfield { sub: m, f: big.f() });
    }
    let sub_degree = big.f() / m;
    let sub = big.subfield(sub_degree)?;
    let chi = MultChar::new(&sub.ctx, n, j)?;
    if chi.is_trivial() {
        return Err(Error::DegenerateCharacter("the character to lift is trivial".into()));
    }
    // The norm sends omega to the subfield generator, so chi'(omega^k) = zeta_n^{jk}.
    if big.norm(sub_degree, big.omega())? != sub.lift(sub.ctx.omega()) {
        return Err(Error::InconsistentIndexSets(
            "norm of omega is not the subfield generator".into(),
        ));
    }
    let lifted = MultChar::new(big, n, j)?;
    let lhs = gauss_sum_direct(big, &lifted);
    let g = gauss_sum_direct(&sub.ctx, &chi);
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    Ok(IdentityCheck::new(lhs, g.powu(m) * sign))
}

/// G(chi) = G(chi^l) / chi^l(l) * prod_{i=1}^{l-1} G(eta^i) / G(chi eta^i)
/// with eta of order l.
pub fn davenport_hasse_product(ctx: &FieldCtx, chi: &MultChar, ell: u64) -> Result<IdentityCheck> {
    if chi.is_trivial() {
        return Err(Error::DegenerateCharacter("chi is trivial".into()));
    }
    if ell < 2 {
        return Err(Error::DegenerateCharacter("l must exceed 1".into()));
    }
    let eta = MultChar::new(ctx, ell, 1)?;
    let ell_elem = ctx.from_int(ell as i64);
    if ell_elem.is_zero() {
        return Err(Error::DegenerateCharacter("l vanishes in the field".into()));
    }
    let chi_l = chi.pow(ell as i64);
    let mut rhs = gauss_sum_direct(ctx, &chi_l) / chi_l.eval(ell_elem);
    for i in 1..ell {
        let eta_i = eta.pow(i as i64);
        rhs *= gauss_sum_direct(ctx, &eta_i) / gauss_sum_direct(ctx, &chi.mul(&eta_i));
    }
    Ok(IdentityCheck::new(gauss_sum_direct(ctx, chi), rhs))
}

/// sum over x in F_q of psi(a2 x^2 + a1 x + a0), exactly.
pub fn quadratic_completion_exact(
    ctx: &FieldCtx,
    a2: FieldElem,
    a1: FieldElem,
    a0: FieldElem,
) -> Result<CycInt> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if a2.is_zero() {
        return Err(Error::DegenerateCharacter("leading coefficient is zero".into()));
    }
    let p = ctx.p();
    let row2 = ctx.trace_functional(a2);
    let row1 = ctx.trace_functional(a1);
    let shift = ctx.abs_trace(a0);
    let mut counts = ctx.sweep(
        ctx.order(),
        || vec![0u64; p as usize],
        |acc, _, c| {
            let sq = ctx.mul_coords(c, c);
            let t = (ctx.dot(&row2, &sq) + ctx.dot(&row1, c) + shift) % p;
            acc[t as usize] += 1;
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    counts[shift as usize] += 1;
    Ok(CycInt::from_counts(p, &counts))
}

pub fn quadratic_completion_sum(
    ctx: &FieldCtx,
    a2: FieldElem,
    a1: FieldElem,
    a0: FieldElem,
) -> Result<Complex64> {
    Ok(quadratic_completion_exact(ctx, a2, a1, a0)?.to_complex())
}

/// psi(a0 - a1^2 / (4 a2)) eta(a2) G(eta), with G(eta) from its closed form.
pub fn quadratic_completion_closed(
    ctx: &FieldCtx,
    a2: FieldElem,
    a1: FieldElem,
    a0: FieldElem,
) -> Result<Complex64> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let four_a2 = ctx.mul(ctx.from_int(4), a2);
    let c = ctx.sub(a0, ctx.div(ctx.mul(a1, a1), four_a2)?);
    let eta = MultChar::quadratic(ctx)?;
    let g = gauss_sum_closed(ClosedForm::Quadratic {
        p: ctx.p(),
        s: ctx.f(),
    })?;
    Ok(unit_root(ctx.abs_trace(c), ctx.p()) * eta.eval(a2) * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        super::super::rel_deviation(a, b) <= tol
    }

    #[test]
    fn small_gauss_sums() {
        let f9 = build_field(3, 2, None).unwrap();
        let eta = MultChar::quadratic(&f9).unwrap();
        assert!(close(gauss_sum_direct(&f9, &eta), Complex64::new(3.0, 0.0), 1e-12));
        assert!(close(
            gauss_sum_direct(&f9, &MultChar::trivial(&f9)),
            Complex64::new(-1.0, 0.0),
            1e-12
        ));
        assert_eq!(quadratic_gauss_exact(&f9).unwrap().as_integer(), Some(3));
        let q = gauss_sum_closed(ClosedForm::Quadratic { p: 3, s: 1 }).unwrap();
        assert!(close(q, Complex64::new(0.0, 3f64.sqrt()), 1e-12));
        let q = gauss_sum_closed(ClosedForm::Quadratic { p: 5, s: 1 }).unwrap();
        assert!(close(q, Complex64::new(5f64.sqrt(), 0.0), 1e-12));
    }

    #[test]
    fn periods_of_f9() {
        let f9 = build_field(3, 2, None).unwrap();
        let periods = gauss_periods(&f9, 2).unwrap();
        let ints: Vec<_> = periods.iter().map(|c| c.as_integer().unwrap()).collect();
        assert_eq!(ints, vec![1, -2]);
        assert_eq!(gauss_period_exact(&f9, 1, 0).unwrap().as_integer(), Some(-1));
        assert!(gauss_period_exact(&f9, 3, 0).is_err());
    }

    #[test]
    fn semiprimitive_matches_direct() {
        let ctx = build_field(3, 4, None).unwrap();
        let closed = gauss_sum_closed(ClosedForm::Semiprimitive { p: 3, n: 5, f: 4 }).unwrap();
        for j in 1..5 {
            let chi = MultChar::new(&ctx, 5, j).unwrap();
            assert!(close(gauss_sum_direct(&ctx, &chi), closed, 1e-9));
        }
        assert!(gauss_sum_closed(ClosedForm::Semiprimitive { p: 3, n: 5, f: 2 }).is_err());
        assert!(gauss_sum_closed(ClosedForm::Semiprimitive { p: 2, n: 7, f: 6 }).is_err());
    }

    #[test]
    fn davenport_hasse_small() {
        let f25 = build_field(5, 2, None).unwrap();
        assert!(davenport_hasse_lift(&f25, 2, 4, 1).unwrap().deviation < 1e-9);
        let f13 = build_field(13, 1, None).unwrap();
        let chi = MultChar::new(&f13, 12, 1).unwrap();
        assert!(davenport_hasse_product(&f13, &chi, 3).unwrap().deviation < 1e-9);
        assert!(davenport_hasse_product(&f13, &MultChar::trivial(&f13), 3).is_err());
    }

    #[test]
    fn completion_on_f9() {
        let f9 = build_field(3, 2, None).unwrap();
        let one = f9.one();
        let v = quadratic_completion_exact(&f9, one, FieldElem::Zero, FieldElem::Zero).unwrap();
        assert_eq!(v.as_integer(), Some(3));
    }
}
