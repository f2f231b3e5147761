use std::collections::BTreeMap;

use crate::graph::LoopGraph;
use crate::permanent::{count_covers, permanent_sparse, Matrix, SparseConfig};
use crate::{BigCount, Error, Result};

/// Cycle covers of `G` split by the cycle through `v`.
///
/// `c_v`: `v` sits on its loop. `c_vw[w]`: `v` is on the 2-cycle with `w`.
/// `c_wvw[(wi, wj)]`: the cycle through `v` is longer and contains
/// `wi → v → wj`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDecomposition {
    pub vertex: u64,
    pub c_v: BigCount,
    pub c_vw: BTreeMap<u64, BigCount>,
    pub c_wvw: BTreeMap<(u64, u64), BigCount>,
}

impl VertexDecomposition {
    pub fn total(&self) -> BigCount {
        let mut t = self.c_v.clone();
        t += self.c_vw.values().sum::<BigCount>();
        t += self.c_wvw.values().sum::<BigCount>();
        t
    }

    /// `C_{vw} ≤ C_v` for every `w` and `4 C_{wvw}² ≤ C_v²` for every pair.
    pub fn lemma_holds(&self) -> bool {
        let cv2 = &self.c_v * &self.c_v;
        self.c_vw.values().all(|c| c <= &self.c_v) && self.c_wvw.values().all(|c| BigCount::from(4u32) * c * c <= cv2)
    }
}

/// Splits `C(G)` at `label` and checks the parts add back up.
///
/// Only the component of `v` is expanded; the other components contribute a
/// common factor to every term.
pub fn decompose_at(g: &LoopGraph, label: u64) -> Result<VertexDecomposition> {
    let v = g.index_of(label).ok_or(Error::MissingVertex(label))?;
    let comp_idx = g
        .components()
        .into_iter()
        .find(|c| c.contains(&v))
        .expect("every vertex lies in a component");
    let outside: Vec<usize> = (0..g.len()).filter(|i| !comp_idx.contains(i)).collect();
    let factor = count_covers(&g.induced(&outside))?;

    let comp = g.induced(&comp_idx);
    let rest = comp.without(label)?;
    let c_v = &factor * count_covers(&rest)?;

    let nbrs: Vec<u64> = {
        let vi = comp.index_of(label).expect("label is in its component");
        comp.neighbors(vi)
            .into_iter()
            .filter(|&j| j != vi)
            .map(|j| comp.labels()[j])
            .collect()
    };

    let mut c_vw = BTreeMap::new();
    for &w in &nbrs {
        c_vw.insert(w, &factor * count_covers(&rest.without(w)?)?);
    }

    // wi -> v -> wj contracts to wi -> wj in G - v: wi's row becomes the
    // single column of wj.
    let mut c_wvw = BTreeMap::new();
    if nbrs.len() >= 2 {
        let base = Matrix::from_graph(&rest)?;
        for &wi in &nbrs {
            for &wj in &nbrs {
                if wi == wj {
                    continue;
                }
                let (ri, cj) = (rest.index_of(wi).unwrap(), rest.index_of(wj).unwrap());
                let mut m = base.clone();
                m.set_row(ri, 1u128 << cj);
                let p = permanent_sparse(&m, SparseConfig::default());
                c_wvw.insert((wi, wj), &factor * p);
            }
        }
    }

    let d = VertexDecomposition {
        vertex: label,
        c_v,
        c_vw,
        c_wvw,
    };
    let whole = &factor * count_covers(&comp)?;
    if d.total() != whole {
        return Err(Error::Invariant(format!(
            "decomposition at {label} sums to {} but C(G) = {whole}",
            d.total()
        )));
    }
    Ok(d)
}
