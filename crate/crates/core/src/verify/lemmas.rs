//! Closed-form character values of the halved connection sets and of the
//! quadric pieces, compared against direct computation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::inv_mod;
use crate::chars::{quadratic_gauss_exact, rel_deviation, CycInt, PeriodTable, Tolerance};
use crate::constructions::{
    elliptic_halving, hyperbolic_halving, HalvingIndexSets, QuadricGeometry, Side,
};
use crate::cyclotomy::IndexSet;
use crate::error::{Error, Result};
use crate::field::FieldCtx;

use super::{character_table, trace_table, HalvingTable};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaReport {
    pub name: String,
    pub instance: String,
    pub checked: u64,
    /// Largest relative deviation, compared against `tolerance`.
    pub max_deviation: f64,
    /// Largest absolute deviation |lhs - rhs|.
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    /// Number of characters falling in each case of the formula.
    pub cases: BTreeMap<String, u64>,
    pub pass: bool,
    /// Deviation of an alternative reading of the formula, when one is tested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternative_deviation: Option<f64>,
}

struct Tally {
    worst: f64,
    worst_abs: f64,
    alt: Option<f64>,
    checked: u64,
    cases: BTreeMap<String, u64>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            worst: 0.0,
            worst_abs: 0.0,
            alt: None,
            checked: 0,
            cases: BTreeMap::new(),
        }
    }

    fn record(&mut self, case: &str, lhs: Complex64, rhs: Complex64) {
        self.worst = self.worst.max(rel_deviation(lhs, rhs));
        self.worst_abs = self.worst_abs.max((lhs - rhs).norm());
        self.checked += 1;
        *self.cases.entry(case.to_string()).or_default() += 1;
    }

    fn record_alt(&mut self, lhs: Complex64, rhs: Complex64) {
        let d = rel_deviation(lhs, rhs);
        self.alt = Some(self.alt.map_or(d, |a: f64| a.max(d)));
    }

    fn finish(self, name: &str, instance: String, tol: Tolerance) -> LemmaReport {
        LemmaReport {
            name: name.to_string(),
            instance,
            checked: self.checked,
            max_deviation: self.worst,
            max_abs_deviation: self.worst_abs,
            tolerance: tol.rel,
            pass: self.worst <= tol.rel,
            cases: self.cases,
            alternative_deviation: self.alt,
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// +1 when r mod 4 is 0 or N mod 4, -1 when it is 2 or 3N mod 4.
fn delta(r: u64, n: u64) -> f64 {
    let r = r % 4;
    if r == 0 || r == n % 4 {
        1.0
    } else {
        -1.0
    }
}

/// psi(gamma^a E) for the elliptic halving E in F_{q^2m}, a in Z_4N, against
///
/// rho_p delta_a q^m / (2 G) P_c + (q^m - 1)|U| / (2N) - [c in 2^{-1}U] q^m / 2,
///
/// with c = 2 (4^{-1} a mod N) and P_c computed in F_{q^m} = <gamma^{q^m+1}>.
/// rho_p is 1 for p = 7 mod 8 and -1 for p = 3 mod 8. On the complement side
/// the constant printed as (q^m - 1)(N - |I|)/2 is also evaluated and reported
/// as the alternative reading.
pub fn elliptic_half_check(big: &FieldCtx, sets: &HalvingIndexSets, i: &IndexSet) -> Result<LemmaReport> {
    let set = elliptic_halving(big, sets)?;
    let sub = big.subfield(big.f() / 2)?;
    let small = &sub.ctx;
    let n = sets.n();
    let table = HalvingTable::build(small, n)?;
    let qm = small.order() + 1;
    let p = big.p();
    let rho = match p % 8 {
        7 => 1.0,
        3 => -1.0,
        _ => return Err(Error::BadModulusCongruence(format!("p = {p} is not 3 mod 4"))),
    };
    let u = sets.side().target(i);
    let half_u = u.divide(2).expect("N odd");
    let g = table.gauss.to_complex();
    let big_table = PeriodTable::build(big, 4 * n)?;
    let inv4 = inv_mod(4 % n, n).expect("N odd");
    let base = (qm - 1) as f64 * u.len() as f64 / (2 * n) as f64;
    let mut tally = Tally::new();
    let crate::constructions::ConnectionSet::Additive { indices, .. } = &set else {
        unreachable!("elliptic sets are additive");
    };
    for a in 0..4 * n {
        let lhs = big_table.twisted_sum(a, indices.residues()).to_complex();
        let c = 2 * (a % n * inv4 % n);
        let hit = half_u.contains(c % n);
        let lam = table.lambda(c, &sets.x, &half_u).to_complex();
        let main = lam * (rho * delta(a, n) * qm as f64) / (g * 2.0);
        let indicator = if hit { qm as f64 / 2.0 } else { 0.0 };
        let rhs = main + real(base - indicator);
        tally.record(if hit { "c in 2^-1 U" } else { "c outside 2^-1 U" }, lhs, rhs);
        if sets.side() == Side::Complement {
            let printed = (qm - 1) as f64 * (n as usize - i.len()) as f64 / 2.0;
            tally.record_alt(lhs, main + real(printed - indicator));
        }
    }
    let name = match sets.side() {
        Side::Subdiff => "elliptic-half",
        Side::Complement => "elliptic-complement",
    };
    let instance = format!("q^2m = {}^{}, N = {n}", p, big.f());
    Ok(tally.finish(name, instance, Tolerance::for_field(big.order() + 1)))
}

/// psi_{a,b}(H) for the hyperbolic halving H in F_{q^m} x F_{q^m}, by direct
/// summation over H, against
///
/// eta(2 omega^c) G delta_{a,b} / 2 P_c - (q^m - 1)|U| / (2N) + [c in 2^{-1}U] q^m / 2
///
/// for ab != 0, where omega^c = (ab)^{(N+1)/2} and delta_{a,b} is read from
/// log(b / a) mod 4, and against -(q^m - 1)|U| / (2N) on the axes.
pub fn hyperbolic_half_check(ctx: &FieldCtx, sets: &HalvingIndexSets, i: &IndexSet) -> Result<LemmaReport> {
    let set = hyperbolic_halving(ctx, sets, false)?;
    let n = sets.n();
    let table = HalvingTable::build(ctx, n)?;
    let q1 = ctx.order();
    let qm = (q1 + 1) as f64;
    let u = sets.side().target(i);
    let half_u = u.divide(2).expect("N odd");
    let g = table.gauss.to_complex();
    let chars = character_table(ctx, &set)?;
    let eta2 = if ctx.log(ctx.from_int(2))? % 2 == 0 { 1.0 } else { -1.0 };
    let base = q1 as f64 * u.len() as f64 / (2 * n) as f64;
    let mut tally = Tally::new();
    let lams: Vec<Complex64> = (0..2 * n)
        .map(|c| table.lambda(c, &sets.x, &half_u).to_complex())
        .collect();
    for a in (0..q1).map(Some).chain([None]) {
        for b in (0..q1).map(Some).chain([None]) {
            let lhs = chars.get(a, b).to_complex();
            match (a, b) {
                (None, None) => continue,
                (Some(a), Some(b)) => {
                    let c = ((a + b) as u128 * n.div_ceil(2) as u128 % q1 as u128) as u64;
                    let hit = half_u.contains(c % n);
                    let eta = eta2 * if c.is_multiple_of(2) { 1.0 } else { -1.0 };
                    let d = delta((b + q1 - a) % q1, n);
                    let indicator = if hit { qm / 2.0 } else { 0.0 };
                    let rhs = lams[(c % (2 * n)) as usize] * g * (eta * d / 2.0) + real(indicator - base);
                    tally.record(if hit { "c in 2^-1 U" } else { "c outside 2^-1 U" }, lhs, rhs);
                }
                _ => tally.record("axis", lhs, real(-base)),
            }
        }
    }
    let name = match sets.side() {
        Side::Subdiff => "hyperbolic-half",
        Side::Complement => "hyperbolic-complement",
    };
    let instance = format!("q^m = {}^{}, N = {n}", ctx.p(), ctx.f());
    Ok(tally.finish(name, instance, Tolerance::for_field(q1 + 1)))
}

struct QuadricConstants {
    q: u64,
    m: u32,
    g: Complex64,
    eps: u64,
    tau: u64,
    root: f64,
}

fn quadric_constants(ctx: &FieldCtx, geo: &QuadricGeometry) -> Result<QuadricConstants> {
    let q = geo.frame.q;
    let m = geo.frame.m;
    let e = ctx.f() / m;
    let g = quadratic_gauss_exact(&ctx.subfield(e)?.ctx)?.to_complex();
    let two = ctx.log(ctx.from_int(2))?;
    Ok(QuadricConstants {
        q,
        m,
        g,
        eps: if q % 4 == 1 { 0 } else { 1 },
        tau: (two / geo.n) % 2,
        root: (q as f64).powi(((m - 1) / 2) as i32),
    })
}

fn sign(e: u64) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn direct_sum(tr: &[u32], p: u64, a: u64, members: impl Iterator<Item = u64>) -> Complex64 {
    let q1 = tr.len() as u64;
    let mut counts = vec![0u64; p as usize];
    for k in members {
        counts[tr[((a + k) % q1) as usize] as usize] += 1;
    }
    CycInt::from_counts(p, &counts).to_complex()
}

/// psi(omega^a T_l) for every a and every level l, against its four-case formula.
pub fn quadric_tangent_check(ctx: &FieldCtx, geo: &QuadricGeometry) -> Result<LemmaReport> {
    let k = quadric_constants(ctx, geo)?;
    let q1 = geo.order();
    let tr = trace_table(ctx);
    let qf = k.q as f64;
    let mut tally = Tally::new();
    for l in 1..=geo.levels() {
        let members: Vec<u64> = (0..q1).filter(|&x| geo.in_t(l, x)).collect();
        let low = (k.m as i32) - (l as i32) - 1;
        for a in 0..q1 {
            let lhs = direct_sum(&tr, ctx.p(), a, members.iter().copied());
            let au = a as usize;
            let (case, rhs) = match (geo.on_hyperplanes(l - 1, a), geo.quad[au], geo.tangent[l - 1][au]) {
                (true, Some(i), Some(j)) => {
                    let s = sign(i as u64 + k.eps * ((k.m as u64 - 1) / 2));
                    let inner = real(-1.0) + k.g * sign(j as u64 + k.tau);
                    ("on A_i, H_l,j", inner * (s * k.root / 2.0))
                }
                _ if geo.spans[l].contains(&a) && !geo.spans[l - 1].contains(&a) => {
                    ("new span", real(-qf.powi(low) * (qf - 1.0) / 2.0))
                }
                _ if geo.spans[l - 1].contains(&a) => {
                    ("old span", real(qf.powi(low) * (qf - 1.0) * (qf - 1.0) / 2.0))
                }
                _ => ("other", real(0.0)),
            };
            tally.record(case, lhs, rhs);
        }
    }
    let instance = format!("q = {}, m = {}", k.q, k.m);
    Ok(tally.finish("quadric-tangent", instance, Tolerance::for_field(q1 + 1)))
}

/// psi(omega^a B) for every a, against its four-case formula.
pub fn quadric_flat_check(ctx: &FieldCtx, geo: &QuadricGeometry) -> Result<LemmaReport> {
    let k = quadric_constants(ctx, geo)?;
    let q1 = geo.order();
    let tr = trace_table(ctx);
    let members: Vec<u64> = (0..q1).filter(|&x| geo.in_b(x)).collect();
    let mut tally = Tally::new();
    for a in 0..q1 {
        let lhs = direct_sum(&tr, ctx.p(), a, members.iter().copied());
        let au = a as usize;
        let flat = geo.on_hyperplanes(geo.levels(), a);
        let (case, rhs) = match (flat, geo.quad[au], geo.flat_b[au]) {
            (true, Some(_), Some(0)) => ("flat, square", (real(-1.0) + k.g) * (k.root / 2.0)),
            (true, Some(_), _) => ("flat, non-square", (real(-1.0) - k.g) * (k.root / 2.0)),
            (true, None, _) => ("flat on A", real(k.root * (k.q as f64 - 1.0) / 2.0)),
            _ => ("other", real(0.0)),
        };
        tally.record(case, lhs, rhs);
    }
    let instance = format!("q = {}, m = {}", k.q, k.m);
    Ok(tally.finish("quadric-flat", instance, Tolerance::for_field(q1 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_halving_sets, conic_partition_m3, quadric_complement_partition, PartitionSpec};
    use crate::cyclotomy::singer_set;
    use crate::field::build_field;

    #[test]
    fn elliptic_halves_over_f729() {
        let big = build_field(3, 6, None).unwrap();
        let sub = big.subfield(3).unwrap();
        let conic = conic_partition_m3(&sub.ctx, 3).unwrap();
        let i = singer_set(&sub.ctx, 3).unwrap();
        let report = elliptic_half_check(&big, &conic.halving, &i).unwrap();
        assert!(report.pass, "{report:?}");
        let quad = quadric_complement_partition(&sub.ctx, 3).unwrap();
        let report = elliptic_half_check(&big, &quad.halving, &i).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.alternative_deviation.unwrap() > 1e-3);
    }

    #[test]
    fn hyperbolic_halves_over_f81() {
        let ctx = build_field(3, 4, None).unwrap();
        let i = crate::cyclotomy::subdifference_set(&ctx, 3, 5).unwrap().index_set();
        for side in [Side::Subdiff, Side::Complement] {
            let part = PartitionSpec::new(side, side.target(&i), IndexSet::empty(5)).unwrap();
            let sets = build_halving_sets(&part).unwrap();
            let report = hyperbolic_half_check(&ctx, &sets, &i).unwrap();
            assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn quadric_pieces_over_f243() {
        let ctx = build_field(3, 5, None).unwrap();
        let geo = QuadricGeometry::new(&ctx, 3).unwrap();
        let t = quadric_tangent_check(&ctx, &geo).unwrap();
        assert!(t.pass, "{t:?}");
        assert_eq!(t.cases.len(), 4, "{:?}", t.cases);
        let b = quadric_flat_check(&ctx, &geo).unwrap();
        assert!(b.pass, "{b:?}");
    }
}
