//! Branching permanent for sparse 0/1 matrices.
//!
//! A state is a pair of row and column masks. Each step splits the bipartite
//! graph of the state into connected components and multiplies their counts;
//! a single component is either handed to Ryser (small enough) or expanded
//! along its sparsest row or column, deleting the matched pair. Component
//! results are memoized on their masks, which is what keeps divisor graphs
//! (many nearly isolated large labels) cheap.

use dashmap::DashMap;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::matrix::bits;
use super::ryser::ryser_compact;
use super::Matrix;
use crate::BigCount;

/// Components at or below this order go straight to Ryser.
pub const DEFAULT_LEAF_ORDER: usize = 22;

/// Recursion depth through which branches are evaluated concurrently.
pub const DEFAULT_PARALLEL_DEPTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseConfig {
    /// Components at or below this order are counted with Ryser.
    pub leaf_order: usize,
    /// Dense components (density at least `leaf_density`) up to this order also
    /// go to Ryser; branching is slower than the Gray sweep there.
    pub dense_leaf_order: usize,
    pub leaf_density: f64,
    /// Recursion levels whose branches may run on the rayon pool.
    pub parallel_depth: usize,
}

impl Default for SparseConfig {
    fn default() -> Self {
        Self {
            leaf_order: 10,
            dense_leaf_order: DEFAULT_LEAF_ORDER,
            leaf_density: 0.5,
            parallel_depth: 0,
        }
    }
}

impl SparseConfig {
    pub fn parallel() -> Self {
        Self {
            parallel_depth: DEFAULT_PARALLEL_DEPTH,
            ..Self::default()
        }
    }
}

struct Solver<'a> {
    rows: &'a [u128],
    cols: Vec<u128>,
    cfg: SparseConfig,
    memo: DashMap<(u128, u128), BigCount>,
}

/// Permanent by component splitting and min-degree expansion.
pub fn permanent_sparse(m: &Matrix, cfg: SparseConfig) -> BigCount {
    let n = m.order();
    if n == 0 {
        return BigCount::one();
    }
    if n <= cfg.leaf_order.min(64) {
        let rows: Vec<u64> = m.rows().iter().map(|&r| r as u64).collect();
        return ryser_compact(&rows);
    }
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let solver = Solver {
        rows: m.rows(),
        cols: m.columns(),
        cfg,
        memo: DashMap::new(),
    };
    solver.solve(full, full, 0)
}

impl Solver<'_> {
    fn solve(&self, r: u128, c: u128, depth: usize) -> BigCount {
        if r == 0 {
            return BigCount::one();
        }
        let Some(parts) = self.split(r, c) else {
            return BigCount::zero();
        };
        if parts.len() == 1 {
            return self.solve_connected(r, c, depth);
        }
        if depth < self.cfg.parallel_depth {
            let counts: Vec<BigCount> = parts
                .par_iter()
                .map(|&(pr, pc)| self.solve_connected(pr, pc, depth + 1))
                .collect();
            counts.into_iter().product()
        } else {
            let mut acc = BigCount::one();
            for (pr, pc) in parts {
                let v = self.solve_connected(pr, pc, depth);
                if v.is_zero() {
                    return v;
                }
                acc *= v;
            }
            acc
        }
    }

    /// Connected components of the bipartite graph on `(r, c)`; `None` when
    /// some component has unequal row and column counts (permanent zero).
    fn split(&self, r: u128, c: u128) -> Option<Vec<(u128, u128)>> {
        let mut out = Vec::new();
        let (mut rr, mut cc) = (r, c);
        while rr != 0 {
            let seed = rr & rr.wrapping_neg();
            let (mut comp_r, mut comp_c) = (seed, 0u128);
            let mut frontier = seed;
            while frontier != 0 {
                let mut nc = 0u128;
                for i in bits(frontier) {
                    nc |= self.rows[i];
                }
                nc &= cc & !comp_c;
                if nc == 0 {
                    break;
                }
                comp_c |= nc;
                let mut nr = 0u128;
                for j in bits(nc) {
                    nr |= self.cols[j];
                }
                nr &= rr & !comp_r;
                comp_r |= nr;
                frontier = nr;
            }
            if comp_r.count_ones() != comp_c.count_ones() {
                return None;
            }
            out.push((comp_r, comp_c));
            rr &= !comp_r;
            cc &= !comp_c;
        }
        if cc != 0 {
            return None;
        }
        Some(out)
    }

    fn solve_connected(&self, r: u128, c: u128, depth: usize) -> BigCount {
        let order = r.count_ones() as usize;
        if order == 1 {
            return BigCount::one();
        }
        if order <= self.cfg.leaf_order || (order <= self.cfg.dense_leaf_order && self.dense(r, c, order)) {
            return ryser_compact(&self.compact(r, c));
        }
        if let Some(v) = self.memo.get(&(r, c)) {
            return v.clone();
        }

        // sparsest line
        let mut best = (u32::MAX, false, 0usize);
        for i in bits(r) {
            let k = (self.rows[i] & c).count_ones();
            if k < best.0 {
                best = (k, true, i);
            }
        }
        for j in bits(c) {
            let k = (self.cols[j] & r).count_ones();
            if k < best.0 {
                best = (k, false, j);
            }
        }
        let (_, is_row, line) = best;
        let branches: Vec<(u128, u128)> = if is_row {
            bits(self.rows[line] & c)
                .map(|j| (r & !(1 << line), c & !(1 << j)))
                .collect()
        } else {
            bits(self.cols[line] & r)
                .map(|i| (r & !(1 << i), c & !(1 << line)))
                .collect()
        };

        let total: BigCount = if depth < self.cfg.parallel_depth && branches.len() > 1 {
            let parts: Vec<BigCount> = branches
                .par_iter()
                .map(|&(br, bc)| self.solve(br, bc, depth + 1))
                .collect();
            parts.into_iter().sum()
        } else {
            let mut acc = BigCount::zero();
            for (br, bc) in branches {
                acc += self.solve(br, bc, depth);
            }
            acc
        };
        self.memo.insert((r, c), total.clone());
        total
    }

    fn dense(&self, r: u128, c: u128, order: usize) -> bool {
        let nnz: u32 = bits(r).map(|i| (self.rows[i] & c).count_ones()).sum();
        nnz as f64 >= self.cfg.leaf_density * (order * order) as f64
    }

    /// Rows of the `(r, c)` submatrix with columns renumbered from zero.
    fn compact(&self, r: u128, c: u128) -> Vec<u64> {
        let col_list: Vec<usize> = bits(c).collect();
        bits(r)
            .map(|i| {
                let row = self.rows[i];
                col_list
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (k, &j)| acc | (((row >> j) & 1) as u64) << k)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permanent::ryser::permanent_ryser;

    #[test]
    fn disjoint_triangles_multiply() {
        let m = Matrix::from_fn(6, |i, j| i / 3 == j / 3).unwrap();
        assert_eq!(permanent_sparse(&m, SparseConfig::default()), BigCount::from(36u32));
    }

    #[test]
    fn leaf_choice_does_not_change_results() {
        // banded matrix, bandwidth 3
        let m = Matrix::from_fn(18, |i, j| i.abs_diff(j) <= 3 || (i * 7 + j * 3) % 11 == 0).unwrap();
        let reference = permanent_ryser(&m).unwrap();
        for leaf in [1, 4, 8, 18] {
            let cfg = SparseConfig {
                leaf_order: leaf,
                dense_leaf_order: leaf,
                ..SparseConfig::default()
            };
            assert_eq!(permanent_sparse(&m, cfg), reference, "leaf {leaf}");
        }
        assert_eq!(permanent_sparse(&m, SparseConfig::parallel()), reference);
    }

    #[test]
    fn structurally_singular_is_zero() {
        // two rows supported on one column
        let m = Matrix::from_fn(14, |i, j| if i < 2 { j == 0 } else { true }).unwrap();
        let cfg = SparseConfig {
            leaf_order: 1,
            dense_leaf_order: 1,
            ..SparseConfig::default()
        };
        assert_eq!(permanent_sparse(&m, cfg), BigCount::zero());
    }
}
