//! Exact permanents of 0/1 matrices, i.e. cycle-cover counts of loop graphs.

mod bruteforce;
mod matrix;
mod ryser;
mod sparse;

use std::str::FromStr;

use num_traits::One;

pub use bruteforce::{for_each_permutation, permanent_bruteforce, BRUTEFORCE_LIMIT};
pub use matrix::{Matrix, MAX_ORDER};
pub use ryser::{permanent_ryser, permanent_ryser_with_limit, ryser_sum, RYSER_LIMIT};
pub use sparse::{permanent_sparse, SparseConfig, DEFAULT_LEAF_ORDER, DEFAULT_PARALLEL_DEPTH};

use crate::graph::LoopGraph;
use crate::{BigCount, Error, Result};

/// Which permanent engine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    BruteForce,
    Ryser,
    #[default]
    Sparse,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bruteforce" => Ok(Engine::BruteForce),
            "ryser" => Ok(Engine::Ryser),
            "sparse" | "sparse-auto" => Ok(Engine::Sparse),
            _ => Err(Error::Domain(format!("unknown engine {s:?}"))),
        }
    }
}

/// A permanent request: which engine, and how many workers it may use.
#[derive(Debug, Clone)]
pub struct PermanentJob<'g> {
    pub graph: &'g LoopGraph,
    pub engine: Engine,
    pub parallelism: usize,
}

impl PermanentJob<'_> {
    pub fn run(&self) -> Result<BigCount> {
        match self.engine {
            Engine::BruteForce => count_covers_bruteforce(self.graph),
            Engine::Ryser => count_covers_ryser(self.graph),
            Engine::Sparse => count_covers_sparse(self.graph, self.parallelism),
        }
    }
}

/// Exhaustive cycle-cover count; at most [`BRUTEFORCE_LIMIT`] vertices.
pub fn count_covers_bruteforce(g: &LoopGraph) -> Result<BigCount> {
    if g.len() > BRUTEFORCE_LIMIT {
        return Err(Error::Size {
            engine: "bruteforce",
            vertices: g.len(),
            limit: BRUTEFORCE_LIMIT,
        });
    }
    permanent_bruteforce(&Matrix::from_graph(g)?)
}

/// Ryser cycle-cover count; at most [`RYSER_LIMIT`] vertices.
pub fn count_covers_ryser(g: &LoopGraph) -> Result<BigCount> {
    if g.len() > RYSER_LIMIT {
        return Err(Error::Size {
            engine: "ryser",
            vertices: g.len(),
            limit: RYSER_LIMIT,
        });
    }
    permanent_ryser(&Matrix::from_graph(g)?)
}

/// Sparse-engine count with up to `parallelism` workers.
///
/// Graph components are counted separately; each must fit a [`Matrix`].
pub fn count_covers_sparse(g: &LoopGraph, parallelism: usize) -> Result<BigCount> {
    if parallelism <= 1 {
        return count_by_components(g, SparseConfig::default());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Domain(e.to_string()))?;
    pool.install(|| count_by_components(g, SparseConfig::parallel()))
}

/// Default engine, sequential. The empty graph has exactly one cover.
pub fn count_covers(g: &LoopGraph) -> Result<BigCount> {
    count_by_components(g, SparseConfig::default())
}

fn count_by_components(g: &LoopGraph, cfg: SparseConfig) -> Result<BigCount> {
    let mut total = BigCount::one();
    for comp in g.components() {
        if comp.len() == 1 {
            continue;
        }
        let m = Matrix::from_graph(&g.induced(&comp))?;
        total *= permanent_sparse(&m, cfg);
    }
    Ok(total)
}
