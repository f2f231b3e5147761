use crate::graph::LoopGraph;
use crate::{Error, Result};

/// Largest order a [`Matrix`] can hold (one `u128` mask per row).
pub const MAX_ORDER: usize = 128;

/// Square 0/1 matrix, each row a column bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    rows: Vec<u128>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::Size {
                engine: "matrix",
                vertices: n,
                limit: MAX_ORDER,
            });
        }
        Ok(Self { n, rows: vec![0; n] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    m.rows[i] |= 1 << j;
                }
            }
        }
        Ok(m)
    }

    /// Adjacency matrix of a loop graph (unit diagonal).
    pub fn from_graph(g: &LoopGraph) -> Result<Self> {
        let mut m = Self::zeros(g.len())?;
        for i in 0..g.len() {
            for j in g.neighbors(i) {
                m.rows[i] |= 1 << j;
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> u128 {
        self.rows[i]
    }

    pub fn set_row(&mut self, i: usize, mask: u128) {
        let full = if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        };
        self.rows[i] = mask & full;
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    /// Column masks: bit `i` of entry `j` is `a[i][j]`.
    pub fn columns(&self) -> Vec<u128> {
        let mut cols = vec![0u128; self.n];
        for (i, &r) in self.rows.iter().enumerate() {
            let mut x = r;
            while x != 0 {
                cols[x.trailing_zeros() as usize] |= 1 << i;
                x &= x - 1;
            }
        }
        cols
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Rows and columns relabelled simultaneously: new `i` is old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Matrix {
        assert_eq!(perm.len(), self.n);
        let mut m = Matrix::zeros(self.n).unwrap();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(perm[i], perm[j]) {
                    m.rows[i] |= 1 << j;
                }
            }
        }
        m
    }

    /// Deletes row `r` and column `c`.
    pub fn minor(&self, r: usize, c: usize) -> Matrix {
        let keep = |x: u128| {
            let low = x & ((1u128 << c) - 1);
            let high = if c + 1 >= 128 { 0 } else { (x >> (c + 1)) << c };
            low | high
        };
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != r)
            .map(|(_, &x)| keep(x))
            .collect();
        Matrix { n: self.n - 1, rows }
    }
}

/// Iterates the set bits of a mask, lowest first.
pub(crate) fn bits(mut x: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(b)
        }
    })
}
