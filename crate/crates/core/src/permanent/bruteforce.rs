use super::Matrix;
use crate::{BigCount, Error, Result};

/// Largest order the exhaustive enumeration accepts.
pub const BRUTEFORCE_LIMIT: usize = 12;

/// Permanent by walking all `n!` permutations (Heap's algorithm) and testing
/// each one. Independent of every other engine; used as the test oracle.
pub fn permanent_bruteforce(m: &Matrix) -> Result<BigCount> {
    let n = m.order();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::Size {
            engine: "bruteforce",
            vertices: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let mut count = 0u64;
    for_each_permutation(n, |p| {
        if p.iter().enumerate().all(|(i, &j)| m.get(i, j)) {
            count += 1;
        }
    });
    Ok(BigCount::from(count))
}

/// Calls `f` on every permutation of `0..n` (one call for `n = 0`).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&p);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
