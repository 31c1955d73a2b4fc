use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// An element of Z[zeta_p], stored as coefficients of 1, zeta, ..., zeta^{p-1}
/// normalized so the last coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycInt {
    p: u64,
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn zero(p: u64) -> CycInt {
        CycInt {
            p,
            coeffs: vec![0; p as usize],
        }
    }

    pub fn from_int(p: u64, n: i64) -> CycInt {
        let mut z = CycInt::zero(p);
        z.coeffs[0] = n;
        z
    }

    /// zeta^j.
    pub fn root(p: u64, j: u64) -> CycInt {
        let mut c = vec![0i64; p as usize];
        c[(j % p) as usize] = 1;
        CycInt::from_coeffs(p, c)
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<i64>) -> CycInt {
        assert_eq!(coeffs.len(), p as usize, "need exactly p coefficients");
        let mut z = CycInt { p, coeffs };
        z.canonicalize();
        z
    }

    /// Sum of zeta^j weighted by `counts[j]`.
    pub fn from_counts(p: u64, counts: &[u64]) -> CycInt {
        CycInt::from_coeffs(p, counts.iter().map(|&c| c as i64).collect())
    }

    fn canonicalize(&mut self) {
        let last = self.coeffs[self.p as usize - 1];
        if last != 0 {
            self.coeffs.iter_mut().for_each(|c| *c -= last);
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_rational_integer(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.is_rational_integer().then(|| self.coeffs[0])
    }

    pub fn to_complex(&self) -> Complex64 {
        let p = self.p as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| Complex64::from_polar(c as f64, 2.0 * std::f64::consts::PI * j as f64 / p))
            .sum()
    }

    pub fn scale(&self, k: i64) -> CycInt {
        CycInt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    /// Multiplication by zeta^s.
    pub fn rotate(&self, s: u64) -> CycInt {
        let p = self.p as usize;
        let s = (s % self.p) as usize;
        let mut c = vec![0i64; p];
        for (j, &v) in self.coeffs.iter().enumerate() {
            c[(j + s) % p] = v;
        }
        CycInt::from_coeffs(self.p, c)
    }

    fn zip(&self, other: &CycInt, op: impl Fn(i64, i64) -> i64) -> CycInt {
        assert_eq!(self.p, other.p, "mixed cyclotomic rings");
        CycInt::from_coeffs(
            self.p,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        )
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Add for CycInt {
    type Output = CycInt;
    fn add(self, rhs: CycInt) -> CycInt {
        &self + &rhs
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Sub for CycInt {
    type Output = CycInt;
    fn sub(self, rhs: CycInt) -> CycInt {
        &self - &rhs
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.scale(-1)
    }
}

impl Neg for CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.scale(-1)
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic rings");
        let p = self.p as usize;
        let mut acc = vec![0i128; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                acc[(i + j) % p] += a as i128 * b as i128;
            }
        }
        let last = acc[p - 1];
        CycInt {
            p: self.p,
            coeffs: acc
                .into_iter()
                .map(|c| i64::try_from(c - last).expect("cyclotomic coefficient overflow"))
                .collect(),
        }
    }
}

impl Mul for CycInt {
    type Output = CycInt;
    fn mul(self, rhs: CycInt) -> CycInt {
        &self * &rhs
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_integer() {
            return write!(f, "{n}");
        }
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match j {
                0 => write!(f, "{a}")?,
                _ if a == 1 => write!(f, "z^{j}")?,
                _ => write!(f, "{a}*z^{j}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_and_integers() {
        // zeta + zeta^2 over p = 3 is -1.
        let z = CycInt::from_coeffs(3, vec![0, 1, 1]);
        assert_eq!(z.as_integer(), Some(-1));
        assert_eq!(z.coeffs()[2], 0);
        let w = CycInt::from_coeffs(3, z.coeffs().to_vec());
        assert_eq!(w, z);
        assert_eq!(CycInt::from_coeffs(3, vec![0, 1, 0]).as_integer(), None);
    }

    #[test]
    fn ring_operations() {
        let p = 5;
        let z = CycInt::root(p, 1);
        let mut acc = CycInt::from_int(p, 1);
        for _ in 0..5 {
            acc = &acc * &z;
        }
        assert_eq!(acc.as_integer(), Some(1));
        let s = (0..5).map(|j| CycInt::root(p, j)).fold(CycInt::zero(p), |a, b| a + b);
        assert!(s.is_zero());
        let g = CycInt::from_coeffs(p, vec![0, 1, -1, -1, 1]);
        assert_eq!((&g * &g).as_integer(), Some(5));
        assert!((g.to_complex().re - 5f64.sqrt()).abs() < 1e-12);
    }
}
