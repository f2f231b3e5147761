//! Number-theoretic primitives shared by the graph, counting and bound layers.

mod factor;
mod lcm_range;
mod smooth;
mod totient;

pub use factor::{alpha, FactoredInt, SpfSieve};
pub use lcm_range::{gcd_with_mi, lcm_degree_t, mi_divisor_weight, mi_divisor_weight_f64, DegreeTable, LcmRange};
pub use smooth::{
    is_rough, is_smooth, largest_prime_factor, rough_integers, rough_part, smooth_multiples, smooth_numbers_up_to,
};
pub use totient::{shared_sieve, totient_summatory, TotientSieve, TotientTable, DEFAULT_SIEVE_CEILING};

/// All primes `p ≤ n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
    }
    primes
}

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `⌊log_p i⌋` for `p ≥ 2`, `i ≥ 1`.
pub fn floor_log(p: u64, i: u64) -> u32 {
    let mut e = 0;
    let mut pk = p;
    while pk <= i {
        e += 1;
        match pk.checked_mul(p) {
            Some(next) => pk = next,
            None => break,
        }
    }
    e
}
