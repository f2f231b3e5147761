use divperm::counts::{
    complete_bipartite, count_interval, count_sdiv, count_slcm, decompose_at, f_value, kbipartite_covers,
    kbipartite_ratio, ratio_R, verify_theorem_bound,
};
use divperm::graph::LoopGraph;
use divperm::permanent::count_covers_bruteforce;
use divperm::{BigCount, ExactRatio, RuleKind};
use num_bigint::BigInt;
use proptest::prelude::*;

fn graph_strategy(max_order: usize) -> impl Strategy<Value = LoopGraph> {
    (1..=max_order).prop_flat_map(|m| {
        prop::collection::vec(any::<bool>(), m * (m - 1) / 2).prop_map(move |bits| {
            let pairs = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j)));
            let edges = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e);
            LoopGraph::from_edges((1..=m as u64).collect(), edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn ratio_never_exceeds_degree_bound(g in graph_strategy(8), pick in any::<prop::sample::Index>()) {
        let v = g.labels()[pick.index(g.len())];
        prop_assert!(verify_theorem_bound(&g, v).unwrap());
    }

    #[test]
    fn decomposition_sums_to_total(g in graph_strategy(8), pick in any::<prop::sample::Index>()) {
        let v = g.labels()[pick.index(g.len())];
        let d = decompose_at(&g, v).unwrap();
        prop_assert_eq!(d.total(), count_covers_bruteforce(&g).unwrap());
        prop_assert!(d.lemma_holds());
    }
}

#[test]
fn lcm_graph_contains_divisor_graph() {
    // every divisor edge is an lcm edge, so S_div(n) ⊆ S_lcm(n)
    let mut prev = (BigCount::from(1u32), BigCount::from(1u32));
    for n in 1..=30 {
        let (d, l) = (count_sdiv(n).unwrap(), count_slcm(n).unwrap());
        assert!(d <= l, "n={n}");
        assert!(prev.0 <= d && prev.1 <= l, "counts are nondecreasing, n={n}");
        prev = (d, l);
    }
}

#[test]
fn workers_do_not_change_counts() {
    for kind in [RuleKind::Div, RuleKind::Lcm] {
        assert_eq!(
            count_interval(kind, 24, 1).unwrap(),
            count_interval(kind, 24, 3).unwrap()
        );
    }
}

#[test]
fn bipartite_closed_form_matches_permanent() {
    for d in 1..=7u64 {
        for k in 0..=d.min(5) {
            let g = complete_bipartite(d as usize, k as usize);
            assert_eq!(
                kbipartite_covers(d, k),
                count_covers_bruteforce(&g).unwrap(),
                "K_{d},{k}"
            );
        }
    }
    for (d, k) in [(3u64, 2u64), (5, 3), (7, 4)] {
        let g = complete_bipartite(d as usize, k as usize);
        let v = *g.labels().last().unwrap();
        assert_eq!(kbipartite_ratio(d, k).unwrap(), ratio_R(&g, v).unwrap());
    }
    assert_eq!(
        kbipartite_ratio(3, 2).unwrap(),
        ExactRatio::new(BigInt::from(19), BigInt::from(4))
    );
    assert!(kbipartite_ratio(2, 2).is_err());
}

#[test]
fn f_values_telescope() {
    for kind in [RuleKind::Div, RuleKind::Lcm] {
        for n in [12u64, 18] {
            let sum: f64 = (1..=n).map(|a| f_value(kind, a, n).unwrap()).sum();
            let exact = divperm::numeric::ln_big::<f64>(&count_interval(kind, n, 1).unwrap());
            assert!((sum - exact).abs() < 1e-10, "{kind} n={n}");
        }
    }
}
