//! `M_i = lcm(1, ..., i)` handled through its exponent vector.
//!
//! `M_i` outgrows every machine word by `i ≈ 46`, while the refined lcm
//! bounds need `i` in the thousands, so nothing here materializes it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::{factorize, floor_log, primes_up_to};
use crate::{Error, ExactRatio, Result};

/// The exponent vector `v_p(M_i) = ⌊log_p i⌋` over primes `p ≤ i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcmRange {
    i: u64,
    exps: Vec<(u64, u32)>,
}

impl LcmRange {
    pub fn new(i: u64) -> Self {
        Self::from_primes(i, &primes_up_to(i))
    }

    /// Reuses a prime list; primes above `i` are ignored.
    pub fn from_primes(i: u64, primes: &[u64]) -> Self {
        let exps = primes
            .iter()
            .take_while(|&&p| p <= i)
            .map(|&p| (p, floor_log(p, i)))
            .collect();
        Self { i, exps }
    }

    pub fn index(&self) -> u64 {
        self.i
    }

    pub fn prime_exponents(&self) -> &[(u64, u32)] {
        &self.exps
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.exps
            .binary_search_by_key(&p, |&(q, _)| q)
            .map_or(0, |k| self.exps[k].1)
    }

    /// Whether `d | M_i`, i.e. every prime power exactly dividing `d` is `≤ i`.
    pub fn divides(&self, d: u64) -> bool {
        d >= 1 && factorize(d).into_iter().all(|(p, e)| e <= self.valuation(p))
    }

    /// `gcd(a, M_i)`.
    pub fn gcd_with(&self, a: u64) -> u64 {
        factorize(a)
            .into_iter()
            .map(|(p, e)| p.pow(e.min(self.valuation(p))))
            .product()
    }

    pub fn num_divisors(&self) -> u128 {
        self.exps.iter().map(|&(_, e)| e as u128 + 1).product()
    }

    /// `M_i` itself, as a big integer.
    pub fn value(&self) -> BigInt {
        self.exps.iter().fold(BigInt::one(), |acc, &(p, e)| {
            acc * num_traits::pow(BigInt::from(p), e as usize)
        })
    }

    /// Divisors of `M_i` not exceeding `cap`, ascending.
    pub fn divisors_up_to(&self, cap: u64) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.exps {
            let len = out.len();
            for j in 0..len {
                let mut v = out[j];
                for _ in 0..e {
                    match v.checked_mul(p) {
                        Some(w) if w <= cap => {
                            v = w;
                            out.push(v);
                        }
                        _ => break,
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn check_divides(i: u64, d_prime: u64) -> Result<LcmRange> {
    let m = LcmRange::new(i);
    if !m.divides(d_prime) {
        return Err(Error::Domain(format!("{d_prime} does not divide lcm(1..{i})")));
    }
    Ok(m)
}

/// `gcd(a, M_i)` without forming `M_i`.
pub fn gcd_with_mi(a: u64, i: u64) -> u64 {
    LcmRange::new(i).gcd_with(a)
}

/// Degree `T_{i,d'}` of `v_a` in the lcm graph `L_[a,n]` when `⌊n/a⌋ = i` and
/// `gcd(a, M_i) = d'`: the number of pairs `1 ≤ ℓ ≤ j ≤ i` with
/// `gcd(j, ℓ) = 1` and `ℓ | d'`.
pub fn lcm_degree_t(i: u64, d_prime: u64) -> Result<u64> {
    if i == 0 {
        return Err(Error::Domain("T_{i,d'} needs i ≥ 1".into()));
    }
    check_divides(i, d_prime)?;
    let mut total = 0;
    for ell in (1..=i.min(d_prime)).filter(|l| d_prime.is_multiple_of(*l)) {
        total += (ell..=i).filter(|&j| j.gcd(&ell) == 1).count() as u64;
    }
    Ok(total)
}

/// Density `φ(M_i / d') / M_i` of integers `a` with `gcd(a, M_i) = d'`.
pub fn mi_divisor_weight(i: u64, d_prime: u64) -> Result<ExactRatio> {
    let m = check_divides(i, d_prime)?;
    let mut w = ExactRatio::new(BigInt::one(), BigInt::from(d_prime));
    for &(p, e) in m.prime_exponents() {
        let v = factorize(d_prime)
            .into_iter()
            .find(|&(q, _)| q == p)
            .map_or(0, |(_, k)| k);
        if v < e {
            w *= ExactRatio::new(BigInt::from(p - 1), BigInt::from(p));
        }
    }
    Ok(w)
}

/// Floating-point [`mi_divisor_weight`] given `∏_{p≤i} (1 - 1/p)`.
pub fn mi_divisor_weight_f64(m: &LcmRange, d_prime: u64, euler_product: f64) -> f64 {
    let mut w = euler_product / d_prime as f64;
    for (p, e) in factorize(d_prime) {
        if e >= m.valuation(p) {
            w /= 1.0 - 1.0 / p as f64;
        }
    }
    w
}

/// Incremental table of `#{j ∈ [ℓ, i] : gcd(j, ℓ) = 1}` for every `ℓ ≤ i`.
///
/// `T_{i,d'}` is the sum of these counts over `ℓ | d'`, `ℓ ≤ i`.
#[derive(Debug, Clone, Default)]
pub struct DegreeTable {
    i: u64,
    counts: Vec<u64>,
}

impl DegreeTable {
    pub fn new() -> Self {
        Self { i: 0, counts: vec![0] }
    }

    pub fn index(&self) -> u64 {
        self.i
    }

    pub fn advance(&mut self) {
        self.i += 1;
        let i = self.i;
        for ell in 1..i {
            if i.gcd(&ell) == 1 {
                self.counts[ell as usize] += 1;
            }
        }
        self.counts.push(u64::from(i == 1));
    }

    pub fn advance_to(&mut self, i: u64) {
        assert!(i >= self.i, "degree table cannot rewind");
        while self.i < i {
            self.advance();
        }
    }

    /// `#{j ∈ [ℓ, i] : gcd(j, ℓ) = 1}`.
    pub fn coprime_count(&self, ell: u64) -> u64 {
        self.counts.get(ell as usize).copied().unwrap_or(0)
    }

    /// `T_{i,d'}` from the divisors `ℓ ≤ i` of `d'`.
    pub fn degree<I: IntoIterator<Item = u64>>(&self, small_divisors: I) -> u64 {
        small_divisors.into_iter().map(|ell| self.coprime_count(ell)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> ExactRatio {
        ExactRatio::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn lcm_degree_examples() {
        assert_eq!(lcm_degree_t(1, 1).unwrap(), 1);
        assert_eq!(lcm_degree_t(3, 1).unwrap(), 3);
        assert_eq!(lcm_degree_t(3, 6).unwrap(), 4);
        assert!(matches!(lcm_degree_t(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_with_mi(7, 2), 1);
        assert_eq!(gcd_with_mi(12, 2), 2);
        assert_eq!(gcd_with_mi(12, 4), 12);
        assert_eq!(gcd_with_mi(1, 1), 1);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(mi_divisor_weight(1, 1).unwrap(), q(1, 1));
        assert_eq!(mi_divisor_weight(2, 1).unwrap(), q(1, 2));
        assert_eq!(mi_divisor_weight(2, 2).unwrap(), q(1, 2));
        assert!(mi_divisor_weight(4, 8).is_err());
    }

    #[test]
    fn weight_matches_totient_quotient() {
        // φ(M_i / d') / M_i checked directly for i ≤ 10.
        for i in 1..=10u64 {
            let m = LcmRange::new(i);
            let mi = m.value();
            let mi_u: u64 = mi.clone().try_into().unwrap();
            for d in m.divisors_up_to(u64::MAX) {
                let quotient = mi_u / d;
                let phi = (1..=quotient).filter(|&j| j.gcd(&quotient) == 1).count() as i64;
                let expect = ExactRatio::new(BigInt::from(phi), mi.clone());
                assert_eq!(mi_divisor_weight(i, d).unwrap(), expect, "i={i} d'={d}");
            }
        }
    }

    #[test]
    fn float_weight_tracks_exact() {
        let m = LcmRange::new(12);
        let euler: f64 = m.prime_exponents().iter().map(|&(p, _)| 1.0 - 1.0 / p as f64).product();
        for d in m.divisors_up_to(u64::MAX) {
            let exact = crate::numeric::ratio_to_float::<f64>(&mi_divisor_weight(12, d).unwrap());
            let approx = mi_divisor_weight_f64(&m, d, euler);
            assert!((exact - approx).abs() <= 1e-14 * exact, "{d}");
        }
    }

    #[test]
    fn lcm_range_structure() {
        let m = LcmRange::new(10);
        assert_eq!(m.value(), BigInt::from(2520));
        assert_eq!(m.num_divisors(), 48);
        assert_eq!(m.divisors_up_to(u64::MAX).len(), 48);
        assert_eq!(m.divisors_up_to(10), vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert!(m.divides(2520) && !m.divides(16) && !m.divides(11));
        assert_eq!(m.gcd_with(5040), 2520);
        assert!(LcmRange::new(1).prime_exponents().is_empty());
        assert!(!LcmRange::new(60).value().is_zero());
    }

    #[test]
    fn degree_table_matches_direct_count() {
        let mut table = DegreeTable::new();
        for i in 1..=40u64 {
            table.advance_to(i);
            let m = LcmRange::new(i);
            for d in m.divisors_up_to(5000) {
                let small = (1..=i).filter(|l| d % l == 0);
                assert_eq!(table.degree(small), lcm_degree_t(i, d).unwrap(), "i={i} d'={d}");
            }
        }
    }
}
