use std::sync::{Arc, OnceLock, RwLock};

use crate::{Error, Result};

/// Default ceiling for the totient sieve (the series truncation point).
pub const DEFAULT_SIEVE_CEILING: u64 = 10_000_000;

/// Prefix sums `Φ_k = Σ_{j≤k} φ(j)` for `k ≤ limit`, built by a linear sieve.
#[derive(Debug)]
pub struct TotientTable {
    prefix: Vec<u64>,
}

impl TotientTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut phi = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        if n >= 1 {
            phi[1] = 1;
        }
        for i in 2..=n {
            if phi[i] == 0 {
                phi[i] = (i - 1) as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let m = i * p as usize;
                if m > n {
                    break;
                }
                if i % p as usize == 0 {
                    phi[m] = phi[i] * p;
                    break;
                }
                phi[m] = phi[i] * (p - 1);
            }
        }
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = 0u64;
        for &v in &phi {
            acc += v as u64;
            prefix.push(acc);
        }
        Self { prefix }
    }

    pub fn limit(&self) -> u64 {
        (self.prefix.len() - 1) as u64
    }

    pub fn phi(&self, k: u64) -> u64 {
        let k = k as usize;
        self.prefix[k] - self.prefix[k - 1]
    }

    /// `Φ_k`, or `None` past the table.
    pub fn summatory(&self, k: u64) -> Option<u64> {
        self.prefix.get(k as usize).copied()
    }
}

/// A totient table that grows on demand up to a fixed ceiling.
///
/// Growth takes the write lock once; every other query is a shared read.
#[derive(Debug)]
pub struct TotientSieve {
    ceiling: u64,
    table: RwLock<Arc<TotientTable>>,
}

impl TotientSieve {
    pub fn new(ceiling: u64) -> Self {
        Self {
            ceiling,
            table: RwLock::new(Arc::new(TotientTable::new(0))),
        }
    }

    pub fn ceiling(&self) -> u64 {
        self.ceiling
    }

    /// A table covering at least `k`.
    pub fn table_upto(&self, k: u64) -> Result<Arc<TotientTable>> {
        if k > self.ceiling {
            return Err(Error::Capacity {
                what: "totient sieve limit",
                value: k,
                ceiling: self.ceiling,
            });
        }
        {
            let t = self.table.read().unwrap();
            if t.limit() >= k {
                return Ok(Arc::clone(&t));
            }
        }
        let mut t = self.table.write().unwrap();
        if t.limit() < k {
            let target = k.max(t.limit().saturating_mul(2)).min(self.ceiling);
            *t = Arc::new(TotientTable::new(target));
        }
        Ok(Arc::clone(&t))
    }

    pub fn summatory(&self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::Domain("Φ_k needs k ≥ 1".into()));
        }
        Ok(self.table_upto(k)?.summatory(k).unwrap())
    }
}

impl Default for TotientSieve {
    fn default() -> Self {
        Self::new(DEFAULT_SIEVE_CEILING)
    }
}

/// The process-wide sieve behind [`totient_summatory`].
pub fn shared_sieve() -> &'static TotientSieve {
    static SIEVE: OnceLock<TotientSieve> = OnceLock::new();
    SIEVE.get_or_init(TotientSieve::default)
}

/// `Φ_k` from the process-wide sieve (ceiling [`DEFAULT_SIEVE_CEILING`]).
pub fn totient_summatory(k: u64) -> Result<u64> {
    shared_sieve().summatory(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(totient_summatory(1).unwrap(), 1);
        assert_eq!(totient_summatory(2).unwrap(), 2);
        assert_eq!(totient_summatory(5).unwrap(), 10);
        assert_eq!(totient_summatory(10).unwrap(), 32);
        assert!(totient_summatory(0).is_err());
    }

    #[test]
    fn ceiling_is_enforced() {
        let s = TotientSieve::new(100);
        assert_eq!(s.summatory(100).unwrap(), 3044);
        assert!(matches!(s.summatory(101), Err(Error::Capacity { .. })));
    }

    #[test]
    fn growth_keeps_values() {
        let s = TotientSieve::new(1 << 16);
        let a = s.summatory(10).unwrap();
        let big = s.summatory(40_000).unwrap();
        assert_eq!(s.summatory(10).unwrap(), a);
        assert!(big > a);
        assert_eq!(s.table_upto(5).unwrap().phi(36), 12);
    }
}
