//! Dense polynomials over F_p, coefficients stored constant term first.

use crate::arith::{factorize, inv_mod, mul_mod};

pub fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % pp;
        }
    }
    let mut out: Vec<u64> = out.into_iter().map(|c| c as u64).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `m`.
pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = degree(m).expect("zero modulus");
    let lead_inv = inv_mod(m[dm], p).expect("p prime");
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let coef = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dm;
        for (i, &c) in m.iter().enumerate().take(dm + 1) {
            r[shift + i] = (r[shift + i] + p - mul_mod(coef, c, p)) % p;
        }
        trim(&mut r);
    }
    r
}

pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// x^(p^k) mod m by repeated p-th powering.
fn frobenius_power_of_x(k: u32, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[0, 1], m, p);
    for _ in 0..k {
        acc = powmod(&acc, p as u128, m, p);
    }
    acc
}

/// Rabin's irreducibility test for a monic `m` of degree f >= 1.
pub fn is_irreducible(m: &[u64], p: u64) -> bool {
    let Some(f) = degree(m) else { return false };
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let x = vec![0, 1];
    if sub(&frobenius_power_of_x(f as u32, m, p), &x, p) != rem(&[], m, p) {
        return false;
    }
    for (r, _) in factorize(f as u64) {
        let h = sub(&frobenius_power_of_x((f as u64 / r) as u32, m, p), &x, p);
        let g = gcd(&h, m, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Assuming `m` irreducible of degree f, whether x generates (F_p[x]/m)^*.
pub fn is_primitive(m: &[u64], p: u64, order: u64) -> bool {
    let x = [0u64, 1];
    let one = rem(&[1], m, p);
    if powmod(&x, order as u128, m, p) != one {
        return false;
    }
    factorize(order)
        .into_iter()
        .all(|(r, _)| powmod(&x, (order / r) as u128, m, p) != one)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabin_matches_known_polys() {
        // x^2 + 1 is irreducible over F_3, x^2 + 2 = (x-1)(x+1) is not.
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(!is_irreducible(&[2, 0, 1], 3));
        // x^3 + 2x + 1 over F_3 is irreducible and primitive.
        assert!(is_irreducible(&[1, 2, 0, 1], 3));
        assert!(is_primitive(&[1, 2, 0, 1], 3, 26));
        // x^2 + 1 over F_3 has root of order 4, not 8.
        assert!(!is_primitive(&[1, 0, 1], 3, 8));
        // (x^2+x+1)^2 over F_2 is reducible with no linear factor.
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
    }

    #[test]
    fn gcd_and_rem() {
        let a = mul(&[1, 1], &[2, 1], 5);
        let b = mul(&[1, 1], &[3, 1], 5);
        let g = gcd(&a, &b, 5);
        assert_eq!(degree(&g), Some(1));
        assert_eq!(rem(&a, &[1, 1], 5), Vec::<u64>::new());
    }
}
