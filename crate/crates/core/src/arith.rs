//! Integer number theory on machine words: primality, factorization,
//! modular inverses and multiplicative orders.

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Exact integer power, `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization as sorted `(prime, exponent)` pairs.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut rest = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Multiplicative order of `a` modulo `m`; `None` unless gcd(a, m) = 1.
pub fn mult_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(a % m, m) != 1 {
        return None;
    }
    let phi = euler_phi(m);
    let mut ord = phi;
    for (p, _) in factorize(phi) {
        while ord.is_multiple_of(p) && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// If `n = base^k` for some k >= 0, returns k.
pub fn exact_log(n: u64, base: u64) -> Option<u32> {
    if n == 0 || base < 2 {
        return None;
    }
    let mut k = 0;
    let mut rest = n;
    while rest.is_multiple_of(base) {
        rest /= base;
        k += 1;
    }
    (rest == 1).then_some(k)
}

/// Splits a prime power `q = p^f` into `(p, f)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let fac = factorize(q);
    match fac.as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

/// Smallest `j >= 1` with `p^j = -1 (mod n)`, if any.
pub fn semiprimitive_exponent(p: u64, n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let ord = mult_order(p, n)?;
    let mut x = 1u64;
    for j in 1..=ord {
        x = mul_mod(x, p % n, n);
        if x == n - 1 {
            return Some(j);
        }
    }
    None
}

/// Whether `target` lies in the cyclic subgroup of (Z/nZ)^* generated by `g`.
pub fn in_cyclic_subgroup(g: u64, target: u64, n: u64) -> bool {
    let target = target % n;
    let Some(ord) = mult_order(g, n) else {
        return false;
    };
    let mut x = 1 % n;
    for _ in 0..ord {
        if x == target {
            return true;
        }
        x = mul_mod(x, g % n, n);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            small,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime(4));
    }

    #[test]
    fn factorization_roundtrip() {
        for n in [1u64, 2, 12, 728, 40353606, 6560, 3486784400, (1u64 << 62) - 57] {
            let f = factorize(n);
            let prod: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
        assert_eq!(factorize(728), vec![(2, 3), (7, 1), (13, 1)]);
    }

    #[test]
    fn inverses_and_orders() {
        assert_eq!(inv_mod(2, 11), Some(6));
        assert_eq!(inv_mod(4, 11), Some(3));
        assert_eq!(inv_mod(2, 10), None);
        assert_eq!(mult_order(3, 11), Some(5));
        assert_eq!(mult_order(7, 37), Some(9));
        assert_eq!(semiprimitive_exponent(3, 5), Some(2));
        assert_eq!(semiprimitive_exponent(7, 25), Some(2));
        assert_eq!(semiprimitive_exponent(3, 11), None);
        assert!(in_cyclic_subgroup(3, 9, 11));
        assert!(!in_cyclic_subgroup(7, 35, 37));
    }

    #[test]
    fn logs_and_powers() {
        assert_eq!(exact_log(81, 3), Some(4));
        assert_eq!(exact_log(1, 3), Some(0));
        assert_eq!(exact_log(12, 3), None);
        assert_eq!(prime_power(2401), Some((7, 4)));
        assert_eq!(prime_power(12), None);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
