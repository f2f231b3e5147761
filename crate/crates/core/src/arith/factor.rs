use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use super::factorize;
use crate::{Error, ExactRatio, Result};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInt {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::Domain("factored integers must be positive".into()));
        }
        Ok(Self {
            value,
            factors: factorize(value),
        })
    }

    /// Builds from `(prime, exponent)` pairs; primes must be strictly increasing.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value = 1u64;
        let mut last = 1u64;
        for &(p, e) in &factors {
            if p <= last || e == 0 || factorize(p) != [(p, 1)] {
                return Err(Error::Domain(format!("bad prime power {p}^{e}")));
            }
            last = p;
            for _ in 0..e {
                value = value
                    .checked_mul(p)
                    .ok_or_else(|| Error::Domain("factored value overflows u64".into()))?;
            }
        }
        Ok(Self { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// `P+(b)`, with `P+(1) = 1`.
    pub fn largest_prime(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    pub fn num_divisors(&self) -> usize {
        self.factors.iter().map(|&(_, e)| e as usize + 1).product()
    }

    /// All divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for j in 0..len {
                    divs.push(divs[j] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FromStr for FactoredInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("not a positive integer: {s:?}")))?;
        FactoredInt::new(v)
    }
}

impl TryFrom<u64> for FactoredInt {
    type Error = Error;

    fn try_from(v: u64) -> Result<Self> {
        FactoredInt::new(v)
    }
}

/// Density of integers `j` with `v_p(j) ≡ 0 (mod v_p(b) + 1)` for every `p`.
///
/// Multiplicative, with `α(p^i) = (p^{i+1} - p^i) / (p^{i+1} - 1)`.
pub fn alpha(b: &FactoredInt) -> ExactRatio {
    let mut acc = ExactRatio::one();
    for &(p, e) in b.factors() {
        let p = BigInt::from(p);
        let pi = num_traits::pow(p.clone(), e as usize);
        let pi1 = &pi * &p;
        acc *= ExactRatio::new(&pi1 - &pi, pi1 - 1);
    }
    acc
}

/// Smallest-prime-factor table for fast factorization below a fixed limit.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut m = i;
                while m <= n {
                    if spf[m] == 0 {
                        spf[m] = i as u32;
                    }
                    m += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1 && n <= self.limit(), "{n} outside sieve");
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            n /= p;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn largest_prime(&self, n: u64) -> u64 {
        self.factor(n).last().map_or(1, |&(p, _)| p)
    }

    /// Divisors of `n`, ascending.
    pub fn divisors(&self, n: u64) -> Vec<u64> {
        let mut divs = vec![1u64];
        for (p, e) in self.factor(n) {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for j in 0..len {
                    divs.push(divs[j] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}
