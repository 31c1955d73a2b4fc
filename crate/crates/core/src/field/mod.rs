//! Finite fields F_{p^f} with a fixed primitive element.
//!
//! Nonzero elements are kept in exponent form `Exp(k)`, meaning omega^k where
//! omega is the residue of x modulo the defining polynomial. Addition goes
//! through coordinate vectors over the power basis 1, x, ..., x^{f-1}.
//! A coordinate vector packs into a single integer by reading it as base-p
//! digits with the coefficient of x^i in digit i.

pub mod cache;
pub mod poly;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, is_prime, mul_mod, mult_order};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldElem {
    Zero,
    Exp(u64),
}

impl FieldElem {
    pub fn is_zero(self) -> bool {
        matches!(self, FieldElem::Zero)
    }

    pub fn exp(self) -> Option<u64> {
        match self {
            FieldElem::Zero => None,
            FieldElem::Exp(k) => Some(k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub f: u32,
    /// Monic modulus, `f + 1` coefficients with the constant term first.
    pub modulus: Vec<u64>,
}

#[derive(Clone, Debug, Default)]
pub enum CachePolicy {
    Disabled,
    /// `CAYLEY_CACHE_DIR`, else the platform cache directory.
    #[default]
    Auto,
    Dir(PathBuf),
}

#[derive(Clone, Debug)]
pub struct FieldOptions {
    /// Largest q for which full log/antilog tables are built.
    pub table_budget: u64,
    /// Permit q above the budget, using streamed powers and baby-step giant-step logs.
    pub allow_streaming: bool,
    pub cache: CachePolicy,
}

pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 27;
const CACHE_MIN_ORDER: u64 = 1 << 16;
const SWEEP_CHUNK: u64 = 1 << 18;

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            table_budget: DEFAULT_TABLE_BUDGET,
            allow_streaming: false,
            cache: CachePolicy::Auto,
        }
    }
}

impl FieldOptions {
    pub fn streaming() -> Self {
        FieldOptions {
            allow_streaming: true,
            ..Self::default()
        }
    }
}

struct Tables {
    antilog: Vec<u32>,
    log: Vec<u32>,
}

struct Bsgs {
    baby: HashMap<u64, u64>,
    step: u64,
    giant: Vec<u64>,
}

pub struct FieldCtx {
    spec: FieldSpec,
    q: u64,
    order: u64,
    /// x^f = sum red[i] x^i.
    red: Vec<u64>,
    pow_p: Vec<u64>,
    trace_row: Vec<u64>,
    x_coords: Vec<u64>,
    opts: FieldOptions,
    tables: OnceLock<Option<Tables>>,
    bsgs: OnceLock<Bsgs>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.spec.p)
            .field("f", &self.spec.f)
            .field("modulus", &self.spec.modulus)
            .finish()
    }
}

pub fn build_field(p: u64, f: u32, modulus: Option<&[u64]>) -> Result<FieldCtx> {
    build_field_with(p, f, modulus, FieldOptions::default())
}

pub fn build_field_with(
    p: u64,
    f: u32,
    modulus: Option<&[u64]>,
    opts: FieldOptions,
) -> Result<FieldCtx> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if f == 0 {
        return Err(Error::BadModulus("extension degree must be at least 1".into()));
    }
    let q = match checked_pow(p, f) {
        Some(q) if q < (1u64 << 63) => q,
        _ => return Err(Error::FieldTooLarge { p, f }),
    };
    let order = q - 1;
    let modulus = match modulus {
        Some(m) => {
            if m.len() != f as usize + 1 || m[f as usize] != 1 || m.iter().any(|&c| c >= p) {
                return Err(Error::BadModulus(format!(
                    "expected {} coefficients in [0, {p}) ending in 1, got {m:?}",
                    f + 1
                )));
            }
            if !poly::is_irreducible(m, p) {
                return Err(Error::NotIrreducible(m.to_vec()));
            }
            if !poly::is_primitive(m, p, order) {
                return Err(Error::NotPrimitive(m.to_vec()));
            }
            m.to_vec()
        }
        None => canonical_modulus(p, f, order),
    };
    if q > opts.table_budget && !opts.allow_streaming {
        return Err(Error::TableBudgetExceeded {
            q,
            budget: opts.table_budget,
        });
    }
    Ok(FieldCtx::assemble(FieldSpec { p, f, modulus }, q, opts))
}

/// Smallest primitive monic polynomial of degree f, comparing coefficient
/// tuples (c_0, ..., c_{f-1}) lexicographically.
fn canonical_modulus(p: u64, f: u32, order: u64) -> Vec<u64> {
    let f = f as usize;
    for c0 in 1..p {
        // The constant term is (-1)^f times the norm of x, which must generate F_p^*.
        let norm = if f.is_multiple_of(2) { c0 } else { p - c0 };
        if mult_order(norm, p) != Some(p - 1) {
            continue;
        }
        let mut m = vec![0u64; f + 1];
        m[0] = c0;
        m[f] = 1;
        loop {
            if (f == 1 || !has_root(&m, p))
                && poly::is_irreducible(&m, p)
                && poly::is_primitive(&m, p, order)
            {
                return m;
            }
            // Advance in counting order with c_{f-1} as the least significant digit.
            let mut i = f - 1;
            while i > 0 {
                m[i] += 1;
                if m[i] < p {
                    break;
                }
                m[i] = 0;
                i -= 1;
            }
            if i == 0 {
                break;
            }
        }
    }
    unreachable!("a primitive polynomial of every degree exists")
}

fn has_root(m: &[u64], p: u64) -> bool {
    if p > 64 {
        return false;
    }
    (0..p).any(|x| m.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0)
}

/// Power sums of the roots of a monic polynomial via Newton's identities:
/// entry i is tr(x^i) for i < f.
fn root_power_sums(modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let c = |i: usize| modulus[i];
    let mut s = vec![0u64; f];
    s[0] = f as u64 % p;
    for k in 1..f {
        let mut acc = mul_mod(k as u64 % p, c(f - k), p);
        for i in 1..k {
            acc = (acc + mul_mod(c(f - i), s[k - i], p)) % p;
        }
        s[k] = (p - acc) % p;
    }
    s
}

impl FieldCtx {
    fn assemble(spec: FieldSpec, q: u64, opts: FieldOptions) -> FieldCtx {
        let p = spec.p;
        let f = spec.f as usize;
        let red: Vec<u64> = spec.modulus[..f].iter().map(|&c| (p - c) % p).collect();
        let mut pow_p = vec![1u64; f + 1];
        for i in 1..=f {
            pow_p[i] = pow_p[i - 1].wrapping_mul(p);
        }
        let trace_row = root_power_sums(&spec.modulus, p);
        let x_coords = if f == 1 {
            vec![red[0]]
        } else {
            let mut v = vec![0u64; f];
            v[1] = 1;
            v
        };
        FieldCtx {
            spec,
            q,
            order: q - 1,
            red,
            pow_p,
            trace_row,
            x_coords,
            opts,
            tables: OnceLock::new(),
            bsgs: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn p(&self) -> u64 {
        self.spec.p
    }
    pub fn f(&self) -> u32 {
        self.spec.f
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Order of the multiplicative group, q - 1.
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn options(&self) -> &FieldOptions {
        &self.opts
    }

    pub fn omega(&self) -> FieldElem {
        self.elem(1)
    }
    pub fn one(&self) -> FieldElem {
        FieldElem::Exp(0)
    }
    pub fn elem(&self, k: u64) -> FieldElem {
        FieldElem::Exp(k % self.order)
    }
    pub fn elem_signed(&self, k: i128) -> FieldElem {
        FieldElem::Exp(k.rem_euclid(self.order as i128) as u64)
    }

    // ---- coordinate arithmetic -------------------------------------------

    #[inline]
    fn mm(&self, a: u64, b: u64) -> u64 {
        let p = self.spec.p;
        if p < (1 << 32) {
            a * b % p
        } else {
            mul_mod(a, b, p)
        }
    }

    /// Multiplies a coordinate vector by x in place.
    #[inline]
    pub fn mul_x(&self, c: &mut [u64]) {
        let f = c.len();
        let p = self.spec.p;
        let top = c[f - 1];
        for i in (1..f).rev() {
            c[i] = (c[i - 1] + self.mm(top, self.red[i])) % p;
        }
        c[0] = self.mm(top, self.red[0]);
    }

    pub fn mul_coords(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = self.spec.f as usize;
        let p = self.spec.p as u128;
        let mut prod = vec![0u128; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        for k in (f..2 * f - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            for i in 0..f {
                prod[k - f + i] = (prod[k - f + i] + top * self.red[i] as u128) % p;
            }
        }
        prod[..f].iter().map(|&c| c as u64).collect()
    }

    fn pow_coords(&self, base: &[u64], mut e: u64) -> Vec<u64> {
        let f = self.spec.f as usize;
        let mut acc = vec![0u64; f];
        acc[0] = 1;
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_coords(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul_coords(&b, &b);
            }
        }
        acc
    }

    /// Coordinates of omega^k computed without tables.
    pub fn power_coords(&self, k: u64) -> Vec<u64> {
        self.pow_coords(&self.x_coords, k % self.order)
    }

    pub fn pack(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0u64, |acc, &d| acc * self.spec.p + d)
    }

    pub fn unpack(&self, mut v: u64) -> Vec<u64> {
        let p = self.spec.p;
        (0..self.spec.f)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn add_packed(&self, a: u64, b: u64) -> u64 {
        let p = self.spec.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        for i in 0..self.spec.f as usize {
            let d = (a % p + b % p) % p;
            a /= p;
            b /= p;
            out += d * self.pow_p[i];
        }
        out
    }

    pub fn neg_packed(&self, a: u64) -> u64 {
        let p = self.spec.p;
        let mut a = a;
        let mut out = 0u64;
        for i in 0..self.spec.f as usize {
            let d = (p - a % p) % p;
            a /= p;
            out += d * self.pow_p[i];
        }
        out
    }

    // ---- tables -----------------------------------------------------------

    fn cache_dir(&self) -> Option<PathBuf> {
        match &self.opts.cache {
            CachePolicy::Disabled => None,
            CachePolicy::Auto => cache::default_dir(),
            CachePolicy::Dir(d) => Some(d.clone()),
        }
    }

    fn tables(&self) -> Option<&Tables> {
        self.tables
            .get_or_init(|| {
                let budget = self.opts.table_budget.min(u32::MAX as u64);
                (self.q <= budget).then(|| self.build_tables())
            })
            .as_ref()
    }

    fn build_tables(&self) -> Tables {
        let use_cache = self.order >= CACHE_MIN_ORDER;
        if use_cache {
            if let Some(dir) = self.cache_dir() {
                if let Some(raw) = cache::load(&dir, &self.spec, self.order) {
                    if let Some(t) = self.tables_from_antilog(raw) {
                        return t;
                    }
                    log::warn!("cache file for {:?} failed validation; rebuilding", self.spec);
                }
            }
        }
        let n = self.order as usize;
        let mut antilog = Vec::with_capacity(n);
        let mut c = vec![0u64; self.spec.f as usize];
        c[0] = 1;
        for _ in 0..n {
            antilog.push(self.pack(&c) as u32);
            self.mul_x(&mut c);
        }
        let mut log = vec![u32::MAX; self.q as usize];
        for (k, &v) in antilog.iter().enumerate() {
            log[v as usize] = k as u32;
        }
        if use_cache {
            if let Some(dir) = self.cache_dir() {
                if let Err(e) = cache::store(&dir, &self.spec, &antilog) {
                    log::debug!("could not write field cache: {e}");
                }
            }
        }
        Tables { antilog, log }
    }

    fn tables_from_antilog(&self, raw: Vec<u64>) -> Option<Tables> {
        if raw.first() != Some(&1) || (self.order > 1 && raw[1] != self.pack(&self.x_coords)) {
            return None;
        }
        let mut log = vec![u32::MAX; self.q as usize];
        for (k, &v) in raw.iter().enumerate() {
            if v == 0 || v >= self.q || log[v as usize] != u32::MAX {
                return None;
            }
            log[v as usize] = k as u32;
        }
        // Spot-check the multiplicative structure.
        let step = (self.order / 97).max(1);
        for k in (0..self.order).step_by(step as usize) {
            let expect = self.pack(&self.power_coords(k));
            if raw[k as usize] != expect {
                return None;
            }
        }
        Some(Tables {
            antilog: raw.into_iter().map(|v| v as u32).collect(),
            log,
        })
    }

    /// Whether full log/antilog tables are in use.
    pub fn has_tables(&self) -> bool {
        self.tables().is_some()
    }

    pub fn antilog_table(&self) -> Option<&[u32]> {
        self.tables().map(|t| t.antilog.as_slice())
    }

    fn bsgs(&self) -> &Bsgs {
        self.bsgs.get_or_init(|| {
            let step = ((self.order as f64).sqrt().ceil() as u64).clamp(1, 1 << 22);
            let mut baby = HashMap::with_capacity(step as usize);
            let mut c = vec![0u64; self.spec.f as usize];
            c[0] = 1;
            for j in 0..step {
                baby.entry(self.pack(&c)).or_insert(j);
                self.mul_x(&mut c);
            }
            let giant = self.power_coords(self.order - step % self.order);
            Bsgs { baby, step, giant }
        })
    }

    /// Discrete logarithm by baby-step giant-step, ignoring any tables.
    pub fn log_bsgs(&self, packed: u64) -> Result<u64> {
        if packed == 0 {
            return Err(Error::LogOfZero);
        }
        let b = self.bsgs();
        let mut y = self.unpack(packed);
        let rounds = self.order.div_ceil(b.step);
        for i in 0..=rounds {
            if let Some(&j) = b.baby.get(&self.pack(&y)) {
                return Ok((i * b.step + j) % self.order);
            }
            y = self.mul_coords(&y, &b.giant);
        }
        unreachable!("omega is primitive, so every nonzero element has a logarithm")
    }

    pub fn antilog_packed(&self, k: u64) -> u64 {
        let k = k % self.order;
        match self.tables() {
            Some(t) => t.antilog[k as usize] as u64,
            None => self.pack(&self.power_coords(k)),
        }
    }

    pub fn log_packed(&self, packed: u64) -> Result<u64> {
        if packed == 0 {
            return Err(Error::LogOfZero);
        }
        match self.tables() {
            Some(t) => Ok(t.log[packed as usize] as u64),
            None => self.log_bsgs(packed),
        }
    }

    // ---- element interface -------------------------------------------------

    pub fn to_packed(&self, x: FieldElem) -> u64 {
        match x {
            FieldElem::Zero => 0,
            FieldElem::Exp(k) => self.antilog_packed(k),
        }
    }

    pub fn from_packed(&self, v: u64) -> FieldElem {
        if v == 0 {
            FieldElem::Zero
        } else {
            FieldElem::Exp(self.log_packed(v).expect("nonzero"))
        }
    }

    pub fn to_coords(&self, x: FieldElem) -> Vec<u64> {
        self.unpack(self.to_packed(x))
    }

    pub fn from_coords(&self, c: &[u64]) -> FieldElem {
        self.from_packed(self.pack(c))
    }

    /// The image of the integer n in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        let v = n.rem_euclid(self.spec.p as i64) as u64;
        self.from_packed(v)
    }

    pub fn log(&self, x: FieldElem) -> Result<u64> {
        x.exp().ok_or(Error::LogOfZero)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Exp(i), FieldElem::Exp(j)) => {
                FieldElem::Exp(((i as u128 + j as u128) % self.order as u128) as u64)
            }
            _ => FieldElem::Zero,
        }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        match a {
            FieldElem::Zero => Err(Error::DivisionByZero),
            FieldElem::Exp(k) => Ok(FieldElem::Exp((self.order - k) % self.order)),
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        match a {
            FieldElem::Zero if e == 0 => self.one(),
            FieldElem::Zero => FieldElem::Zero,
            FieldElem::Exp(k) => {
                FieldElem::Exp(((k as u128 * e as u128) % self.order as u128) as u64)
            }
        }
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Zero, x) | (x, FieldElem::Zero) => x,
            _ => self.from_packed(self.add_packed(self.to_packed(a), self.to_packed(b))),
        }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        match a {
            FieldElem::Zero => FieldElem::Zero,
            FieldElem::Exp(k) if self.spec.p == 2 => FieldElem::Exp(k),
            FieldElem::Exp(k) => FieldElem::Exp((k + self.order / 2) % self.order),
        }
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    /// x^(p^times).
    pub fn frobenius(&self, x: FieldElem, times: u32) -> FieldElem {
        let mut y = x;
        for _ in 0..times {
            y = self.pow(y, self.spec.p);
        }
        y
    }

    // ---- traces and norms ---------------------------------------------------

    /// Absolute trace of a coordinate vector.
    #[inline]
    pub fn trace_coords(&self, c: &[u64]) -> u64 {
        let p = self.spec.p;
        if p < (1 << 20) && c.len() < 1 << 20 {
            c.iter().zip(&self.trace_row).map(|(&a, &b)| a * b).sum::<u64>() % p
        } else {
            c.iter()
                .zip(&self.trace_row)
                .fold(0u64, |acc, (&a, &b)| (acc + mul_mod(a, b, p)) % p)
        }
    }

    /// tr_{q/p}(x) as a residue mod p.
    pub fn abs_trace(&self, x: FieldElem) -> u64 {
        match x {
            FieldElem::Zero => 0,
            _ => self.trace_coords(&self.to_coords(x)),
        }
    }

    /// Row vector L with L . coords(y) = tr(a y).
    pub fn trace_functional(&self, a: FieldElem) -> Vec<u64> {
        let f = self.spec.f as usize;
        let mut c = self.to_coords(a);
        let mut row = Vec::with_capacity(f);
        for _ in 0..f {
            row.push(self.trace_coords(&c));
            self.mul_x(&mut c);
        }
        row
    }

    pub fn dot(&self, row: &[u64], c: &[u64]) -> u64 {
        let p = self.spec.p;
        row.iter()
            .zip(c)
            .fold(0u64, |acc, (&a, &b)| (acc + self.mm(a, b)) % p)
    }

    fn check_sub(&self, sub_degree: u32) -> Result<()> {
        if sub_degree == 0 || !self.spec.f.is_multiple_of(sub_degree) {
            return Err(Error::BadSubfield {
                sub: sub_degree,
                f: self.spec.f,
            });
        }
        Ok(())
    }

    /// Relative trace to the subfield of order p^sub_degree.
    pub fn trace(&self, sub_degree: u32, x: FieldElem) -> Result<FieldElem> {
        self.check_sub(sub_degree)?;
        let mut acc = FieldElem::Zero;
        let mut y = x;
        for _ in 0..self.spec.f / sub_degree {
            acc = self.add(acc, y);
            y = self.frobenius(y, sub_degree);
        }
        Ok(acc)
    }

    /// Relative norm x^((q-1)/(p^d-1)).
    pub fn norm(&self, sub_degree: u32, x: FieldElem) -> Result<FieldElem> {
        self.check_sub(sub_degree)?;
        Ok(self.pow(x, self.subfield_index(sub_degree)))
    }

    /// (q-1)/(p^d-1): omega raised to this generates the subfield of order p^d.
    pub fn subfield_index(&self, sub_degree: u32) -> u64 {
        self.order / (self.pow_p[sub_degree as usize] - 1)
    }

    /// The subfield of order p^d, realized with primitive element
    /// omega^((q-1)/(p^d-1)) so that exponents embed by scaling.
    pub fn subfield(&self, sub_degree: u32) -> Result<Subfield> {
        self.check_sub(sub_degree)?;
        let index = self.subfield_index(sub_degree);
        let d = sub_degree as usize;
        let p = self.spec.p;
        let f = self.spec.f as usize;
        // Product of (X - beta^(p^i)) with coefficients in this field.
        let mut coeffs: Vec<Vec<u64>> = vec![{
            let mut one = vec![0u64; f];
            one[0] = 1;
            one
        }];
        let mut e = index;
        for _ in 0..d {
            let root = self.power_coords(e);
            let neg_root: Vec<u64> = root.iter().map(|&c| (p - c) % p).collect();
            let mut next = vec![vec![0u64; f]; coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                let shifted = &mut next[i + 1];
                for t in 0..f {
                    shifted[t] = (shifted[t] + c[t]) % p;
                }
                let prod = self.mul_coords(c, &neg_root);
                for t in 0..f {
                    next[i][t] = (next[i][t] + prod[t]) % p;
                }
            }
            coeffs = next;
            e = ((e as u128 * p as u128) % self.order as u128) as u64;
        }
        let mut modulus = Vec::with_capacity(d + 1);
        for c in &coeffs {
            if c[1..].iter().any(|&v| v != 0) {
                return Err(Error::BadModulus(
                    "minimal polynomial has coefficients outside F_p".into(),
                ));
            }
            modulus.push(c[0]);
        }
        let opts = FieldOptions {
            allow_streaming: true,
            ..self.opts.clone()
        };
        let ctx = build_field_with(p, sub_degree, Some(&modulus), opts)?;
        Ok(Subfield { ctx, index })
    }

    // ---- sweeps --------------------------------------------------------------

    /// Folds over omega^k for k in [0, count), in parallel chunks.
    ///
    /// `fold` receives the exponent and the coordinate vector of omega^k.
    /// Chunk boundaries do not depend on the thread count.
    pub fn sweep<T, I, F, M>(&self, count: u64, identity: I, fold: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(&mut T, u64, &[u64]) + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        let count = count.min(self.order);
        let chunks = count.div_ceil(SWEEP_CHUNK).max(1);
        let parts: Vec<T> = (0..chunks)
            .into_par_iter()
            .map(|ci| {
                let start = ci * SWEEP_CHUNK;
                let end = (start + SWEEP_CHUNK).min(count);
                let mut acc = identity();
                if start >= end {
                    return acc;
                }
                let mut c = self.power_coords(start);
                for k in start..end {
                    fold(&mut acc, k, &c);
                    self.mul_x(&mut c);
                }
                acc
            })
            .collect();
        parts.into_iter().reduce(&merge).unwrap_or_else(identity)
    }

    /// counts[t][j] = #{x in C_t^(M) : tr(x) = j}, one pass over F_q^*.
    pub fn class_trace_counts(&self, modulus: u64) -> Result<Vec<Vec<u64>>> {
        if modulus == 0 || !self.order.is_multiple_of(modulus) {
            return Err(Error::BadDivisor {
                n: modulus,
                order: self.order,
            });
        }
        let p = self.spec.p as usize;
        let m = modulus as usize;
        let flat = self.sweep(
            self.order,
            || vec![0u64; m * p],
            |acc, k, c| {
                let t = (k % modulus) as usize;
                acc[t * p + self.trace_coords(c) as usize] += 1;
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
        Ok(flat.chunks(p).map(|r| r.to_vec()).collect())
    }
}

/// A subfield embedded through the exponent map Exp(k) -> Exp(k * index).
#[derive(Debug)]
pub struct Subfield {
    pub ctx: FieldCtx,
    pub index: u64,
}

impl Subfield {
    pub fn lift(&self, x: FieldElem) -> FieldElem {
        match x {
            FieldElem::Zero => FieldElem::Zero,
            FieldElem::Exp(k) => FieldElem::Exp(k * self.index),
        }
    }

    /// The subfield element equal to `x`, if `x` lies in the subfield.
    pub fn restrict(&self, x: FieldElem) -> Option<FieldElem> {
        match x {
            FieldElem::Zero => Some(FieldElem::Zero),
            FieldElem::Exp(k) if k % self.index == 0 => Some(FieldElem::Exp(k / self.index)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(p: u64, f: u32) -> FieldCtx {
        build_field_with(
            p,
            f,
            None,
            FieldOptions {
                cache: CachePolicy::Disabled,
                ..FieldOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn prime_field_generator() {
        let f3 = small(3, 1);
        assert_eq!(f3.q(), 3);
        assert_eq!(f3.to_packed(f3.omega()), 2);
        assert!(matches!(build_field(4, 1, None), Err(Error::NonPrime(4))));
    }

    #[test]
    fn canonical_modulus_is_first_primitive() {
        let f9 = small(3, 2);
        // Candidates in order: x^2+1 (not primitive), x^2+x+2 (primitive).
        assert_eq!(f9.spec().modulus, vec![2, 1, 1]);
        let f729 = small(3, 6);
        let mut seen = vec![false; 729];
        for k in 0..728 {
            let v = f729.antilog_packed(k) as usize;
            assert!(!seen[v] && v != 0);
            seen[v] = true;
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(
            build_field(3, 2, Some(&[2, 0, 1])),
            Err(Error::NotIrreducible(_))
        ));
        assert!(matches!(
            build_field(3, 2, Some(&[1, 0, 1])),
            Err(Error::NotPrimitive(_))
        ));
        assert!(matches!(
            build_field_with(
                3,
                20,
                None,
                FieldOptions {
                    table_budget: 1000,
                    allow_streaming: false,
                    cache: CachePolicy::Disabled
                }
            ),
            Err(Error::TableBudgetExceeded { .. })
        ));
    }

    #[test]
    fn power_sums_match_definition() {
        let f = small(5, 3);
        for i in 0..3u64 {
            let x = f.elem(i);
            let mut acc = FieldElem::Zero;
            let mut y = x;
            for _ in 0..3 {
                acc = f.add(acc, y);
                y = f.pow(y, 5);
            }
            assert_eq!(f.to_packed(acc), f.trace_row[i as usize]);
        }
    }

    #[test]
    fn trace_examples() {
        let f9 = small(3, 2);
        assert_eq!(f9.to_packed(f9.trace(1, f9.one()).unwrap()), 2);
        assert!(matches!(f9.trace(3, f9.one()), Err(Error::BadSubfield { .. })));
        let f27 = small(3, 3);
        let zeros = (0..26).filter(|&k| f27.abs_trace(f27.elem(k)) == 0).count();
        assert_eq!(zeros, 8);
    }

    #[test]
    fn bsgs_agrees_with_tables() {
        let f = small(3, 8);
        for k in (0..f.order()).step_by(37) {
            let v = f.antilog_packed(k);
            assert_eq!(f.log_bsgs(v).unwrap(), k);
            assert_eq!(f.log_packed(v).unwrap(), k);
        }
    }

    #[test]
    fn subfield_embedding_is_consistent() {
        let big = small(3, 6);
        let sub = big.subfield(3).unwrap();
        assert_eq!(sub.index, 28);
        for i in 0..26 {
            for j in 0..26 {
                let s = sub.ctx.add(sub.ctx.elem(i), sub.ctx.elem(j));
                let b = big.add(sub.lift(sub.ctx.elem(i)), sub.lift(sub.ctx.elem(j)));
                assert_eq!(sub.lift(s), b);
            }
        }
    }

    #[test]
    fn streaming_field_without_tables() {
        let f = build_field_with(
            3,
            8,
            None,
            FieldOptions {
                table_budget: 100,
                allow_streaming: true,
                cache: CachePolicy::Disabled,
            },
        )
        .unwrap();
        assert!(!f.has_tables());
        let x = f.elem(1234);
        let y = f.elem(4321);
        let s = f.add(x, y);
        assert_eq!(f.sub(s, y), x);
    }

    #[test]
    fn class_counts_cover_group() {
        let f = small(3, 4);
        let counts = f.class_trace_counts(5).unwrap();
        let total: u64 = counts.iter().flatten().sum();
        assert_eq!(total, 80);
        assert!(f.class_trace_counts(7).is_err());
    }
}
