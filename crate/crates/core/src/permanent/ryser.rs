//! Ryser's inclusion-exclusion formula swept in Gray-code order.
//!
//! `perm(A) = (-1)^n Σ_{S ⊆ cols} (-1)^{|S|} Π_i Σ_{j∈S} a_ij`. Consecutive
//! Gray codes differ in one column, so each step updates the row sums by one
//! column and recomputes a single product.

use num_bigint::BigInt;

use super::Matrix;
use crate::numeric::ExactAcc;
use crate::{BigCount, Error, Result};

/// Default order ceiling for the standalone Ryser engine.
pub const RYSER_LIMIT: usize = 34;

/// Ryser permanent of `m`, refusing orders above [`RYSER_LIMIT`].
pub fn permanent_ryser(m: &Matrix) -> Result<BigCount> {
    permanent_ryser_with_limit(m, RYSER_LIMIT)
}

pub fn permanent_ryser_with_limit(m: &Matrix, limit: usize) -> Result<BigCount> {
    let n = m.order();
    if n > limit.min(64) {
        return Err(Error::Size {
            engine: "ryser",
            vertices: n,
            limit: limit.min(64),
        });
    }
    let rows: Vec<u64> = m.rows().iter().map(|&r| r as u64).collect();
    Ok(ryser_compact(&rows))
}

/// Bits needed by the largest partial sum: `n + Σ log2(row weight)`.
fn magnitude_bits(rows: &[u64]) -> f64 {
    rows.len() as f64 + rows.iter().map(|r| (r.count_ones().max(1) as f64).log2()).sum::<f64>()
}

/// Ryser over rows given as column masks (order ≤ 64), choosing the
/// narrowest accumulator whose range provably holds every partial sum.
pub(crate) fn ryser_compact(rows: &[u64]) -> BigCount {
    let need = magnitude_bits(rows) + 1.0;
    let out = if need < i64::CAPACITY_BITS as f64 {
        ryser_sum::<i64>(rows).into_biguint()
    } else if need < i128::CAPACITY_BITS as f64 {
        ryser_sum::<i128>(rows).into_biguint()
    } else {
        ryser_sum::<BigInt>(rows).into_biguint()
    };
    out.expect("permanent of a 0/1 matrix is nonnegative")
}

/// The signed Ryser sum, already multiplied by `(-1)^n`.
pub fn ryser_sum<A: ExactAcc>(rows: &[u64]) -> A {
    let n = rows.len();
    if n == 0 {
        return A::one();
    }
    if rows.contains(&0) {
        return A::zero();
    }
    let mut columns = vec![Vec::new(); n];
    for (i, &r) in rows.iter().enumerate() {
        for (j, col) in columns.iter_mut().enumerate() {
            if r >> j & 1 == 1 {
                col.push(i);
            }
        }
    }
    let mut sums = vec![0i64; n];
    let mut zeros = n;
    let mut gray = 0u64;
    let mut total = A::zero();
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray >> j & 1 == 1 {
            for &i in &columns[j] {
                if sums[i] == 0 {
                    zeros -= 1;
                }
                sums[i] += 1;
            }
        } else {
            for &i in &columns[j] {
                sums[i] -= 1;
                if sums[i] == 0 {
                    zeros += 1;
                }
            }
        }
        if zeros > 0 {
            continue;
        }
        let mut prod = A::from_small(sums[0]);
        for &s in &sums[1..] {
            prod *= A::from_small(s);
        }
        // sign (-1)^{n - |S|}
        if (n as u32 - gray.count_ones()).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}
