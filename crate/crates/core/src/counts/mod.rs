//! Permutation counts, the vertex ratio `R(G, v)` and related exact identities.

mod decompose;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

pub use decompose::{decompose_at, VertexDecomposition};

use crate::graph::{build_interval_graph, build_set_graph, interval_component, LoopGraph, RuleKind};
use crate::numeric::{ln_big, ratio_to_float};
use crate::permanent::{count_covers, count_covers_sparse};
use crate::{BigCount, Error, ExactRatio, Result};

/// `#S_div(n)`.
pub fn count_sdiv(n: u64) -> Result<BigCount> {
    count_interval(RuleKind::Div, n, 1)
}

/// `#S_lcm(n)`.
pub fn count_slcm(n: u64) -> Result<BigCount> {
    count_interval(RuleKind::Lcm, n, 1)
}

/// Count over `[1, n]` under either rule, with a worker hint.
pub fn count_interval(kind: RuleKind, n: u64, workers: usize) -> Result<BigCount> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    count_covers_sparse(&build_interval_graph(kind, 1, n)?, workers)
}

/// Count over an explicit set; for lcm the ceiling is the set maximum.
pub fn count_set(kind: RuleKind, elements: &[u64]) -> Result<BigCount> {
    count_covers(&build_set_graph(kind, elements)?)
}

/// One row of the counts table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRecord {
    pub n: u64,
    pub rule: RuleKind,
    #[serde(serialize_with = "as_decimal")]
    pub count: BigCount,
    pub nth_root: f64,
}

fn as_decimal<S: serde::Serializer>(v: &BigCount, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CountRecord {
    pub fn new(n: u64, rule: RuleKind, count: BigCount) -> Self {
        let nth_root = (ln_big::<f64>(&count) / n as f64).exp();
        Self {
            n,
            rule,
            count,
            nth_root,
        }
    }

    pub fn compute(rule: RuleKind, n: u64, workers: usize) -> Result<Self> {
        Ok(Self::new(n, rule, count_interval(rule, n, workers)?))
    }
}

/// `C(G) / C(G − v)`, exact.
#[allow(non_snake_case)]
pub fn ratio_R(g: &LoopGraph, label: u64) -> Result<ExactRatio> {
    let (with, without) = ratio_counts(g, label)?;
    Ok(ExactRatio::new(BigInt::from(with), BigInt::from(without)))
}

/// Numerator and denominator of `R(G, v)` over the component of `v` only.
///
/// Other components contribute the same factor to both counts.
pub fn ratio_counts(g: &LoopGraph, label: u64) -> Result<(BigCount, BigCount)> {
    let comp = g.component_of(label)?;
    if comp.len() == 1 {
        return Ok((BigCount::one(), BigCount::one()));
    }
    Ok((count_covers(&comp)?, count_covers(&comp.without(label)?)?))
}

/// Exact counts behind `f(a, n)`: covers of the component of `v_a` in the
/// rule graph on `[a, n]`, with and without `v_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FCounts {
    pub component_size: usize,
    pub with: BigCount,
    pub without: BigCount,
}

impl FCounts {
    /// `log(with / without)`, from the correctly rounded quotient so that a
    /// ratio close to 1 keeps its relative accuracy.
    pub fn f(&self) -> f64 {
        f_from_counts(&self.with, &self.without)
    }
}

/// `log(with / without)` for `with ≥ without > 0`.
pub fn f_from_counts(with: &BigCount, without: &BigCount) -> f64 {
    let q: f64 = ratio_to_float(&ExactRatio::new(
        BigInt::from(with.clone()),
        BigInt::from(without.clone()),
    ));
    (q - 1.0).ln_1p()
}

/// [`FCounts`] for `(a, n)`, or `None` if the component has more than `cap`
/// vertices.
pub fn f_counts(kind: RuleKind, a: u64, n: u64, cap: usize) -> Result<Option<FCounts>> {
    let Some(labels) = interval_component(kind, a, n, cap)? else {
        return Ok(None);
    };
    if labels.len() == 1 {
        return Ok(Some(FCounts {
            component_size: 1,
            with: BigCount::one(),
            without: BigCount::one(),
        }));
    }
    let g = crate::graph::build_set_graph_with(kind.for_interval(n), &labels)?;
    let (with, without) = ratio_counts(&g, a)?;
    Ok(Some(FCounts {
        component_size: labels.len(),
        with,
        without,
    }))
}

/// `f(a, n) = log(#S([a, n]) / #S([a + 1, n]))` under the rule.
pub fn f_value(kind: RuleKind, a: u64, n: u64) -> Result<f64> {
    if a == 0 || a > n {
        return Err(Error::Domain(format!("f({a}, {n}) needs 1 ≤ a ≤ n")));
    }
    match f_counts(kind, a, n, crate::permanent::MAX_ORDER)? {
        Some(c) => Ok(c.f()),
        None => Err(Error::Size {
            engine: "sparse",
            vertices: crate::permanent::MAX_ORDER + 1,
            limit: crate::permanent::MAX_ORDER,
        }),
    }
}

/// `R(G, v) ≤ 1 + (d² − d)/2` with `d = deg(v)`, compared exactly.
pub fn verify_theorem_bound(g: &LoopGraph, label: u64) -> Result<bool> {
    let d = BigCount::from(g.degree(label)?);
    let (with, without) = ratio_counts(g, label)?;
    let two = BigCount::from(2u32);
    Ok(&two * with <= (&two + &d * &d - &d) * without)
}

/// `K_{d,k}` with loops. The `d` side is labelled `1..=d`, the `k` side
/// `d+1..=d+k`; the last label is the vertex removed by [`kbipartite_ratio`].
pub fn complete_bipartite(d: usize, k: usize) -> LoopGraph {
    let labels: Vec<u64> = (1..=(d + k) as u64).collect();
    let edges = (0..d).flat_map(|i| (d..d + k).map(move |j| (i, j)));
    LoopGraph::from_edges(labels, edges).expect("labels are increasing")
}

/// Closed form for `C(K_{d,k})`: `Σ_i C(k,i) d! (k−i)! / (d−k+i)!`.
pub fn kbipartite_covers(d: u64, k: u64) -> BigCount {
    let fact = |m: u64| -> BigCount { (1..=m).map(BigCount::from).product() };
    let binom = |n: u64, r: u64| -> BigCount { fact(n) / (fact(r) * fact(n - r)) };
    (0..=k)
        .filter(|&i| d + i >= k)
        .map(|i| binom(k, i) * fact(d) * fact(k - i) / fact(d - k + i))
        .sum()
}

/// `R(K_{d,k}, v) = C(K_{d,k}) / C(K_{d,k−1})` for a vertex on the `k` side.
pub fn kbipartite_ratio(d: u64, k: u64) -> Result<ExactRatio> {
    if !(d > k && k > 1) {
        return Err(Error::Domain(format!(
            "K_{{d,k}} ratio needs d > k > 1, got ({d}, {k})"
        )));
    }
    Ok(ExactRatio::new(
        BigInt::from(kbipartite_covers(d, k)),
        BigInt::from(kbipartite_covers(d, k - 1)),
    ))
}

/// Float view of an exact ratio, mostly for reporting.
pub fn ratio_f64(r: &ExactRatio) -> f64 {
    crate::numeric::ratio_to_float(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(a: i64, b: i64) -> ExactRatio {
        ExactRatio::new(BigInt::from(a), BigInt::from(b))
    }

    fn triangle() -> LoopGraph {
        LoopGraph::from_edges(vec![1, 2, 3], [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn table_counts() {
        assert_eq!(count_sdiv(1).unwrap(), 1u32.into());
        assert_eq!(count_sdiv(6).unwrap(), 36u32.into());
        assert_eq!(count_sdiv(12).unwrap(), 4010u32.into());
        assert_eq!(count_slcm(5).unwrap(), 10u32.into());
        assert_eq!(count_slcm(6).unwrap(), 56u32.into());
        assert_eq!(count_slcm(18).unwrap(), 2_338_368u32.into());
        assert!(count_sdiv(0).is_err());
    }

    #[test]
    fn set_counts() {
        // divisors of 6: 1 is adjacent to all, 2-6, 3-6
        let brute =
            crate::permanent::count_covers_bruteforce(&build_set_graph(RuleKind::Div, &[1, 2, 3, 6]).unwrap()).unwrap();
        assert_eq!(count_set(RuleKind::Div, &[1, 2, 3, 6]).unwrap(), brute);
        let divisors_24 = [1, 2, 3, 4, 6, 8, 12, 24];
        assert_eq!(count_set(RuleKind::Lcm, &divisors_24).unwrap(), 40320u32.into());
        assert_eq!(count_set(RuleKind::Div, &[2, 3, 5, 7]).unwrap(), 1u32.into());
        assert!(matches!(
            count_set(RuleKind::Div, &[2, 2]),
            Err(Error::DuplicateElement(2))
        ));
    }

    #[test]
    fn ratios() {
        assert_eq!(ratio_R(&triangle(), 2).unwrap(), q(3, 1));
        let k23 = complete_bipartite(3, 2);
        assert_eq!(k23.degree(5).unwrap(), 4);
        assert_eq!(ratio_R(&k23, 5).unwrap(), q(19, 4));
        let d6 = build_interval_graph(RuleKind::Div, 1, 6).unwrap();
        assert_eq!(ratio_R(&d6, 1).unwrap(), q(36, 5));
        assert!(matches!(ratio_R(&d6, 7), Err(Error::MissingVertex(7))));
    }

    #[test]
    fn f_values() {
        assert_eq!(f_value(RuleKind::Div, 9, 9).unwrap(), 0.0);
        assert!((f_value(RuleKind::Div, 1, 6).unwrap() - (36.0f64 / 5.0).ln()).abs() < 1e-14);
        assert_eq!(f_value(RuleKind::Div, 4, 6).unwrap(), 0.0);
        let c = f_counts(RuleKind::Lcm, 2, 12, 64).unwrap().unwrap();
        let whole = build_interval_graph(RuleKind::Lcm, 2, 12).unwrap();
        let (w, wo) = ratio_counts(&whole, 2).unwrap();
        assert_eq!((c.with, c.without), (w, wo));
        assert!(f_counts(RuleKind::Div, 1, 40, 10).unwrap().is_none());
        assert!(f_value(RuleKind::Div, 0, 3).is_err());
    }

    #[test]
    fn theorem_bound_examples() {
        assert!(verify_theorem_bound(&triangle(), 1).unwrap());
        let lone = LoopGraph::from_edges(vec![5], []).unwrap();
        assert!(verify_theorem_bound(&lone, 5).unwrap());
        assert!(verify_theorem_bound(&complete_bipartite(3, 2), 5).unwrap());
    }

    #[test]
    fn bipartite_closed_form() {
        assert_eq!(kbipartite_ratio(3, 2).unwrap(), q(19, 4));
        assert_eq!(kbipartite_ratio(4, 2).unwrap(), q(33, 5));
        let g = complete_bipartite(4, 2);
        assert_eq!(ratio_R(&g, 6).unwrap(), q(33, 5));
        assert!(kbipartite_ratio(2, 2).is_err());
        assert!(kbipartite_ratio(5, 1).is_err());
        // d = 2k: order k² (= d²/4)
        let r = ratio_f64(&kbipartite_ratio(8, 4).unwrap());
        assert!(r > 4.0 && r < 4.0 * 16.0, "{r}");
    }

    #[test]
    fn records() {
        let r = CountRecord::new(6, RuleKind::Div, 36u32.into());
        assert_eq!(format!("{:.6}", r.nth_root), "1.817121");
        let one = CountRecord::compute(RuleKind::Lcm, 1, 1).unwrap();
        assert_eq!(format!("{:.6}", one.nth_root), "1.000000");
    }
}
