//! Invariant suites shared by `divperm verify` and the acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use divperm::counts::{count_sdiv, decompose_at, f_value, verify_theorem_bound};
use divperm::graph::LoopGraph;
use divperm::numeric::ln_big;
use divperm::permanent::{count_covers_bruteforce, count_covers_ryser, count_covers_sparse};
use divperm::{Error, Result, RuleKind};

/// Outcome of a suite: how many checks ran and the first few failures.
#[derive(Debug, Default, Clone)]
pub struct SuiteReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }

    fn merge(&mut self, o: SuiteReport) {
        self.checks += o.checks;
        for f in o.failures {
            self.fail(f);
        }
    }
}

/// Every loop graph on `m` labelled vertices, for `m ≤ max_order`.
pub fn exhaustive_graphs(max_order: usize) -> impl Iterator<Item = LoopGraph> {
    (1..=max_order).flat_map(|m| {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        (0u64..1 << pairs.len()).map(move |mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e);
            LoopGraph::from_edges((1..=m as u64).collect(), edges).expect("labels are increasing")
        })
    })
}

/// Random loop graph on `m` vertices with edge probability `p`.
pub fn random_graph(rng: &mut impl Rng, m: usize, p: f64) -> LoopGraph {
    let mut edges = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    LoopGraph::from_edges((1..=m as u64).collect(), edges).expect("labels are increasing")
}

/// `trials` random graphs, orders uniform in `[lo, hi]`, densities in `[0.1, 0.9]`.
pub fn random_corpus(seed: u64, trials: usize, lo: usize, hi: usize) -> Vec<LoopGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let m = rng.gen_range(lo..=hi);
            let p = rng.gen_range(0.1..=0.9);
            random_graph(&mut rng, m, p)
        })
        .collect()
}

fn describe(g: &LoopGraph) -> String {
    format!(
        "{} vertices, edges [{}]",
        g.len(),
        g.edge_list().trim().replace('\n', ", ")
    )
}

/// `R(G, v) ≤ 1 + (d² − d)/2` at every vertex of every graph.
pub fn theorem_suite<'a>(graphs: impl Iterator<Item = &'a LoopGraph>) -> Result<SuiteReport> {
    let mut r = SuiteReport::default();
    for g in graphs {
        for &v in g.labels() {
            r.checks += 1;
            if !verify_theorem_bound(g, v)? {
                r.fail(format!("bound fails at vertex {v}: {}", describe(g)));
            }
        }
    }
    Ok(r)
}

/// Decomposition identity and the two lemma inequalities at every vertex.
pub fn lemma_suite<'a>(graphs: impl Iterator<Item = &'a LoopGraph>) -> Result<SuiteReport> {
    let mut r = SuiteReport::default();
    for g in graphs {
        for &v in g.labels() {
            r.checks += 1;
            match decompose_at(g, v) {
                Ok(d) if d.lemma_holds() => {}
                Ok(_) => r.fail(format!("inequality fails at vertex {v}: {}", describe(g))),
                Err(Error::Invariant(msg)) => r.fail(format!("{msg}: {}", describe(g))),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(r)
}

/// Brute force, Ryser and the sparse engine agree exactly.
pub fn oracle_suite<'a>(graphs: impl Iterator<Item = &'a LoopGraph>, workers: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::default();
    for g in graphs {
        r.checks += 1;
        let a = count_covers_bruteforce(g)?;
        let b = count_covers_ryser(g)?;
        let c = count_covers_sparse(g, workers)?;
        if a != b || b != c {
            r.fail(format!("engines disagree ({a}, {b}, {c}): {}", describe(g)));
        }
    }
    Ok(r)
}

/// Relative gap between `exp(Σ_a f(a, n))` and `#S_div(n)`.
pub fn telescoping_gap(n: u64) -> Result<f64> {
    let sum: f64 = (1..=n).map(|a| f_value(RuleKind::Div, a, n)).sum::<Result<f64>>()?;
    let exact = ln_big::<f64>(&count_sdiv(n)?);
    Ok((sum - exact).exp_m1().abs())
}

pub fn telescoping_suite(max_n: u64, tol: f64) -> Result<SuiteReport> {
    let mut r = SuiteReport::default();
    for n in 1..=max_n {
        r.checks += 1;
        let gap = telescoping_gap(n)?;
        if gap > tol {
            r.fail(format!("n = {n}: relative gap {gap:e}"));
        }
    }
    Ok(r)
}

/// Convenience: runs `f` on the exhaustive corpus and `trials` random graphs.
pub fn on_corpus(
    max_order: usize,
    trials: usize,
    seed: u64,
    f: impl Fn(&[LoopGraph]) -> Result<SuiteReport>,
) -> Result<SuiteReport> {
    let exhaustive: Vec<LoopGraph> = exhaustive_graphs(max_order).collect();
    let mut r = f(&exhaustive)?;
    if trials > 0 {
        r.merge(f(&random_corpus(seed, trials, 7, 10))?);
    }
    Ok(r)
}
