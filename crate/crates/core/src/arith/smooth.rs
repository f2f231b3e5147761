use super::{factorize, primes_up_to};

/// `P+(n)`, the largest prime factor, with `P+(1) = 1`.
pub fn largest_prime_factor(n: u64) -> u64 {
    factorize(n).last().map_or(1, |&(p, _)| p)
}

/// Every prime factor of `n` is at most `s` (so 1 is always smooth).
pub fn is_smooth(n: u64, s: u64) -> bool {
    largest_prime_factor(n) <= s
}

/// No prime factor of `n` is at most `s` (so 1 is always rough).
pub fn is_rough(n: u64, s: u64) -> bool {
    n == 1 || factorize(n)[0].0 > s
}

/// `n` with every prime factor `≤ s` divided out.
pub fn rough_part(mut n: u64, s: u64) -> u64 {
    for p in primes_up_to(s) {
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    n
}

/// The `s`-rough integers in `[lo, hi]`, ascending.
pub fn rough_integers(s: u64, lo: u64, hi: u64) -> Vec<u64> {
    if lo > hi {
        return Vec::new();
    }
    let lo = lo.max(1);
    let mut keep = vec![true; (hi - lo + 1) as usize];
    for p in primes_up_to(s) {
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            keep[(m - lo) as usize] = false;
            m += p;
        }
    }
    (lo..=hi).filter(|&x| keep[(x - lo) as usize]).collect()
}

/// The `s`-smooth integers in `[1, x]`, ascending.
pub fn smooth_numbers_up_to(x: u64, s: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    if x == 0 {
        return Vec::new();
    }
    for p in primes_up_to(s) {
        let len = out.len();
        for j in 0..len {
            let mut v = out[j];
            while let Some(w) = v.checked_mul(p).filter(|&w| w <= x) {
                v = w;
                out.push(v);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `M_{r,n,s}`: the multiples `r·m ≤ n` with `m` `s`-smooth, ascending.
pub fn smooth_multiples(r: u64, n: u64, s: u64) -> Vec<u64> {
    if r == 0 || r > n {
        return Vec::new();
    }
    smooth_numbers_up_to(n / r, s).into_iter().map(|m| r * m).collect()
}
