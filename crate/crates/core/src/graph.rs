//! Loop-carrying divisor and lcm graphs.
//!
//! Every vertex has a self-loop and its degree counts that loop once. Vertex
//! labels are the integers themselves and survive every induced subgraph, so
//! callers can always recover the arithmetic behind a component.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::SpfSieve;
use crate::{Error, Result};

/// Which arithmetic relation joins two labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Div,
    Lcm,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Div => "div",
            RuleKind::Lcm => "lcm",
        }
    }

    /// The rule on a set of labels: for lcm the ceiling is the set maximum.
    pub fn for_set(self, elements: &[u64]) -> GraphRule {
        match self {
            RuleKind::Div => GraphRule::Divisor,
            RuleKind::Lcm => GraphRule::LcmBounded {
                bound: elements.iter().copied().max().unwrap_or(0),
            },
        }
    }

    /// The rule on the interval `[a, n]`: for lcm the ceiling is `n`.
    pub fn for_interval(self, n: u64) -> GraphRule {
        match self {
            RuleKind::Div => GraphRule::Divisor,
            RuleKind::Lcm => GraphRule::LcmBounded { bound: n },
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "div" | "divisor" => Ok(RuleKind::Div),
            "lcm" => Ok(RuleKind::Lcm),
            _ => Err(Error::Domain(format!("unknown rule {s:?}"))),
        }
    }
}

/// Edge rule: `i | j or j | i`, or `lcm(i, j) ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphRule {
    Divisor,
    LcmBounded { bound: u64 },
}

impl GraphRule {
    pub fn kind(&self) -> RuleKind {
        match self {
            GraphRule::Divisor => RuleKind::Div,
            GraphRule::LcmBounded { .. } => RuleKind::Lcm,
        }
    }

    pub fn adjacent(&self, i: u64, j: u64) -> bool {
        match *self {
            GraphRule::Divisor => i.is_multiple_of(j) || j.is_multiple_of(i),
            GraphRule::LcmBounded { bound } => {
                let g = i.gcd(&j);
                (i / g).checked_mul(j).is_some_and(|l| l <= bound)
            }
        }
    }
}

/// Graphs up to this many vertices keep a dense bit matrix.
const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Adjacency {
    Dense { words: usize, bits: Vec<u64> },
    Sparse(Vec<Vec<u32>>),
}

/// Undirected graph on ascending integer labels with a loop at every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopGraph {
    labels: Vec<u64>,
    adj: Adjacency,
}

impl LoopGraph {
    pub fn empty() -> Self {
        Self::from_lists(Vec::new(), Vec::new())
    }

    /// Builds from labels (strictly increasing) and index pairs; loops are added.
    pub fn from_edges<I>(labels: Vec<u64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if let Some(w) = labels.windows(2).find(|w| w[0] >= w[1]) {
            return Err(if w[0] == w[1] {
                Error::DuplicateElement(w[0])
            } else {
                Error::Domain("labels must be strictly increasing".into())
            });
        }
        let n = labels.len();
        let mut lists: Vec<Vec<u32>> = (0..n).map(|i| vec![i as u32]).collect();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Domain(format!("edge ({i}, {j}) out of range")));
            }
            if i != j {
                lists[i].push(j as u32);
                lists[j].push(i as u32);
            }
        }
        Ok(Self::from_lists(labels, lists))
    }

    fn from_lists(labels: Vec<u64>, mut lists: Vec<Vec<u32>>) -> Self {
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        let n = labels.len();
        let adj = if n <= DENSE_LIMIT {
            let words = n.div_ceil(64).max(1);
            let mut bits = vec![0u64; n * words];
            for (i, l) in lists.iter().enumerate() {
                for &j in l {
                    bits[i * words + j as usize / 64] |= 1 << (j % 64);
                }
            }
            Adjacency::Dense { words, bits }
        } else {
            Adjacency::Sparse(lists)
        };
        Self { labels, adj }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    fn require(&self, label: u64) -> Result<usize> {
        self.index_of(label).ok_or(Error::MissingVertex(label))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        match &self.adj {
            Adjacency::Dense { words, bits } => bits[i * words + j / 64] >> (j % 64) & 1 == 1,
            Adjacency::Sparse(lists) => lists[i].binary_search(&(j as u32)).is_ok(),
        }
    }

    /// Neighbor indices of `i`, ascending, including `i` itself.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        match &self.adj {
            Adjacency::Dense { words, bits } => {
                let row = &bits[i * words..(i + 1) * words];
                let mut out = Vec::new();
                for (w, &word) in row.iter().enumerate() {
                    let mut x = word;
                    while x != 0 {
                        out.push(w * 64 + x.trailing_zeros() as usize);
                        x &= x - 1;
                    }
                }
                out
            }
            Adjacency::Sparse(lists) => lists[i].iter().map(|&j| j as usize).collect(),
        }
    }

    pub fn degree_at(&self, i: usize) -> usize {
        match &self.adj {
            Adjacency::Dense { words, bits } => bits[i * words..(i + 1) * words]
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum(),
            Adjacency::Sparse(lists) => lists[i].len(),
        }
    }

    /// Degree of the vertex `label`, self-loop counted once.
    pub fn degree(&self, label: u64) -> Result<usize> {
        Ok(self.degree_at(self.require(label)?))
    }

    /// Number of edges between distinct vertices.
    pub fn edge_count(&self) -> usize {
        ((0..self.len()).map(|i| self.degree_at(i)).sum::<usize>() - self.len()) / 2
    }

    /// Induced subgraph on the given vertex indices, labels preserved.
    pub fn induced(&self, indices: &[usize]) -> LoopGraph {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut pos = vec![u32::MAX; self.len()];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k as u32;
        }
        let lists = idx
            .iter()
            .map(|&i| {
                self.neighbors(i)
                    .into_iter()
                    .filter_map(|j| (pos[j] != u32::MAX).then_some(pos[j]))
                    .collect()
            })
            .collect();
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        LoopGraph::from_lists(labels, lists)
    }

    pub fn without(&self, label: u64) -> Result<LoopGraph> {
        let v = self.require(label)?;
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != v).collect();
        Ok(self.induced(&keep))
    }

    /// Connected components as ascending index lists, ordered by smallest index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn component_indices(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        seen[v] = true;
        let mut comp = vec![v];
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp
    }

    /// Induced subgraph on the connected component containing `label`.
    pub fn component_of(&self, label: u64) -> Result<LoopGraph> {
        let v = self.require(label)?;
        Ok(self.induced(&self.component_indices(v)))
    }

    /// Debug export: one `"i j"` line per non-loop edge, by label, `i < j`.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for i in 0..self.len() {
            for j in self.neighbors(i).into_iter().filter(|&j| j > i) {
                s.push_str(&format!("{} {}\n", self.labels[i], self.labels[j]));
            }
        }
        s
    }
}

/// `D_[a,n]` or `L_[a,n]` (lcm ceiling `n`). `a = n + 1` gives the empty graph.
pub fn build_interval_graph(kind: RuleKind, a: u64, n: u64) -> Result<LoopGraph> {
    if a == 0 {
        return Err(Error::Domain("interval labels start at 1".into()));
    }
    if a > n + 1 {
        return Err(Error::Domain(format!("interval [{a}, {n}] is malformed")));
    }
    if a == n + 1 {
        return Ok(LoopGraph::empty());
    }
    let len = (n - a + 1) as usize;
    let labels: Vec<u64> = (a..=n).collect();
    let mut lists: Vec<Vec<u32>> = (0..len).map(|i| vec![i as u32]).collect();
    let mut link = |x: u64, y: u64| {
        let (i, j) = ((x - a) as usize, (y - a) as usize);
        lists[i].push(j as u32);
        lists[j].push(i as u32);
    };
    match kind {
        RuleKind::Div => {
            for x in a..=n {
                let mut y = 2 * x;
                while y <= n {
                    link(x, y);
                    y += x;
                }
            }
        }
        RuleKind::Lcm => {
            // y > x with lcm(x, y) = x·k ≤ n: write g = gcd(x, y), y = g·k with
            // gcd(x/g, k) = 1. Each y arises from exactly one (g, k).
            let sieve = SpfSieve::new(n);
            for x in a..=n {
                let kmax = n / x;
                if kmax < 2 {
                    continue;
                }
                for g in sieve.divisors(x) {
                    let cofactor = x / g;
                    for k in 2..=kmax {
                        let y = g * k;
                        if y > x && y <= n && cofactor.gcd(&k) == 1 {
                            link(x, y);
                        }
                    }
                }
            }
        }
    }
    Ok(LoopGraph::from_lists(labels, lists))
}

/// Labels of the component of `a` in `D_[a,n]` / `L_[a,n]`, ascending.
///
/// Grows the component by breadth-first search without building the whole
/// interval graph; returns `None` as soon as it exceeds `cap` vertices.
pub fn interval_component(kind: RuleKind, a: u64, n: u64, cap: usize) -> Result<Option<Vec<u64>>> {
    if a == 0 || a > n {
        return Err(Error::Domain(format!("label {a} is not in [1, {n}]")));
    }
    let mut seen = std::collections::BTreeSet::from([a]);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for y in interval_neighbors(kind, a, n, x) {
            if seen.insert(y) {
                if seen.len() > cap {
                    return Ok(None);
                }
                queue.push_back(y);
            }
        }
    }
    Ok(Some(seen.into_iter().collect()))
}

/// Neighbours of `x` other than itself in the rule graph on `[a, n]`.
fn interval_neighbors(kind: RuleKind, a: u64, n: u64, x: u64) -> Vec<u64> {
    let divisors = crate::arith::FactoredInt::new(x)
        .map(|f| f.divisors())
        .unwrap_or_default();
    let mut out = Vec::new();
    match kind {
        RuleKind::Div => {
            out.extend(divisors.iter().copied().filter(|&y| y >= a && y < x));
            out.extend((2..=n / x).map(|k| k * x));
        }
        RuleKind::Lcm => {
            let kmax = n / x;
            for &g in &divisors {
                let cofactor = x / g;
                for k in 1..=kmax {
                    let y = g * k;
                    if y >= a && y != x && cofactor.gcd(&k) == 1 {
                        out.push(y);
                    }
                }
            }
        }
    }
    out
}

/// Graph on an explicit label set; for lcm the ceiling is the set maximum.
pub fn build_set_graph(kind: RuleKind, elements: &[u64]) -> Result<LoopGraph> {
    if kind == RuleKind::Lcm && elements.is_empty() {
        return Err(Error::Domain("the lcm rule needs a nonempty set".into()));
    }
    build_set_graph_with(kind.for_set(elements), elements)
}

/// Graph on an explicit label set under an explicit rule.
pub fn build_set_graph_with(rule: GraphRule, elements: &[u64]) -> Result<LoopGraph> {
    let mut labels = elements.to_vec();
    labels.sort_unstable();
    if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateElement(w[0]));
    }
    if labels.first() == Some(&0) {
        return Err(Error::Domain("labels must be positive".into()));
    }
    let n = labels.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rule.adjacent(labels[i], labels[j]) {
                edges.push((i, j));
            }
        }
    }
    LoopGraph::from_edges(labels, edges)
}
