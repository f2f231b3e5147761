use num_traits::One;
use rayon::prelude::*;

use super::series::refined_cl_series;
use super::{
    degree_cap, upper_cd_series, BoundReport, Direction, EulerProducts, FCache, Target, TAIL_NONE, TAIL_RIGOROUS,
};
use crate::arith::{gcd_with_mi, largest_prime_factor, lcm_degree_t, shared_sieve, SpfSieve};
use crate::counts::f_from_counts;
use crate::graph::RuleKind;
use crate::numeric::Rounding;
use crate::{BigCount, Error, RealSum, Result};

/// Cutoffs of the `c_l` baseline series used by [`refined_upper_exact_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LcmSeriesParams {
    pub imax: u64,
    pub dmax_full: u64,
    pub dprime_cap: u64,
    pub tail_kmax: u64,
}

impl Default for LcmSeriesParams {
    fn default() -> Self {
        Self {
            imax: 2000,
            dmax_full: 30,
            dprime_cap: 2000,
            tail_kmax: 10_000_000,
        }
    }
}

impl LcmSeriesParams {
    /// The degree the baseline series charged for `(i, d)`.
    fn baseline_degree(&self, i: u64, d: u64) -> Result<u64> {
        let d_prime = gcd_with_mi(d, i);
        let exact = i <= self.imax && (i <= self.dmax_full.min(46) || d_prime <= self.dprime_cap);
        if exact {
            lcm_degree_t(i, d_prime)
        } else {
            shared_sieve().summatory(i)
        }
    }
}

/// The exact part of the `C_f` sum over `(i, d, t)` with `id < id_cutoff` and
/// the component of `v_d` in the rule graph on `[d, t]` of at most
/// `max_verts` vertices.
#[derive(Debug, Clone)]
pub struct ExactSweep {
    /// `Σ w f`, rounded down.
    pub lower: f64,
    /// `Σ w (g − f)` where `g` is the baseline cap, rounded down.
    pub savings: f64,
    /// Number of distinct `f(d, t)` values used.
    pub evaluations: usize,
    /// Number of `(i, d, t)` triples covered.
    pub terms: usize,
}

#[derive(Clone)]
struct Partial {
    f_down: RealSum,
    f_up: RealSum,
    g_down: RealSum,
    evaluations: usize,
    terms: usize,
}

impl Partial {
    fn new() -> Self {
        Self {
            f_down: RealSum::new(Rounding::Down),
            f_up: RealSum::new(Rounding::Up),
            g_down: RealSum::new(Rounding::Down),
            evaluations: 0,
            terms: 0,
        }
    }

    fn merge(&mut self, o: &Partial) {
        self.f_down.merge(&o.f_down);
        self.f_up.merge(&o.f_up);
        self.g_down.merge(&o.g_down);
        self.evaluations += o.evaluations;
        self.terms += o.terms;
    }
}

/// Roundings in one `E_i f / (t(t+1))` term.
const TERM_ULPS: f64 = 10.0;

impl ExactSweep {
    pub fn run(
        kind: RuleKind,
        id_cutoff: u64,
        max_verts: usize,
        cache: &FCache,
        params: &LcmSeriesParams,
    ) -> Result<Self> {
        let i_top = (max_verts as u64).min(id_cutoff.saturating_sub(1) / 2);
        if i_top < 2 {
            return Ok(Self {
                lower: 0.0,
                savings: 0.0,
                evaluations: 0,
                terms: 0,
            });
        }
        let mut euler = EulerProducts::new();
        let e: Vec<f64> = (0..=i_top).map(|i| euler.at(i.max(1))).collect();
        let sieve = SpfSieve::new(2 * id_cutoff);
        let ds: Vec<u64> = (1..=(id_cutoff - 1) / 2).collect();
        let parts: Vec<Partial> = ds
            .par_iter()
            .map(|&d| sweep_d(kind, d, id_cutoff, max_verts, cache, params, &e, &sieve))
            .collect::<Result<_>>()?;
        let mut total = Partial::new();
        for p in &parts {
            total.merge(p);
        }
        let savings = RealSum::nudge(Rounding::Down, total.g_down.value() - total.f_up.value(), 2.0).max(0.0);
        Ok(Self {
            lower: total.f_down.value(),
            savings,
            evaluations: total.evaluations,
            terms: total.terms,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_d(
    kind: RuleKind,
    d: u64,
    id_cutoff: u64,
    max_verts: usize,
    cache: &FCache,
    params: &LcmSeriesParams,
    e: &[f64],
    sieve: &SpfSieve,
) -> Result<Partial> {
    let mut out = Partial::new();
    // the component holds d, 2d, ..., id, so i ≤ max_verts
    let i_lo = largest_prime_factor(d).max(2);
    let i_hi = (max_verts as u64).min((id_cutoff - 1) / d);
    if i_lo > i_hi {
        return Ok(out);
    }
    let t_end = (i_hi + 1) * d - 1;
    let len = (t_end - d + 1) as usize;
    let mut parent: Vec<u32> = (0..len as u32).collect();
    let mut size = vec![1u32; len];
    let mut last_size = 0u32;
    let mut f = (BigCount::one(), BigCount::one());
    let mut g = 0.0;
    let mut cur_i = 0;

    for t in d..=t_end {
        let ti = (t - d) as usize;
        for x in sieve.divisors(t) {
            if x >= d && x < t {
                union(&mut parent, &mut size, ti, (x - d) as usize);
            }
        }
        let i = t / d;
        if i < i_lo {
            continue;
        }
        let s = size[find(&mut parent, 0)];
        if s as usize > max_verts {
            break;
        }
        if i != cur_i {
            cur_i = i;
            let deg = match kind {
                RuleKind::Div => i,
                RuleKind::Lcm => params.baseline_degree(i, d)?,
            };
            g = degree_cap(deg);
        }
        if s != last_size {
            last_size = s;
            f = match cache.f_counts(kind, d, t, max_verts)? {
                Some(c) => (c.with, c.without),
                None => {
                    return Err(Error::Invariant(format!(
                        "component of {d} in [{d}, {t}] disagrees with the union-find size {s}"
                    )))
                }
            };
            check_theorem(kind, d, t, &f)?;
            out.evaluations += 1;
        }
        let fv = f_from_counts(&f.0, &f.1);
        let w = e[i as usize] / ((t as f64) * (t as f64 + 1.0));
        out.f_down.add_with_ulps(w * fv, TERM_ULPS);
        out.f_up.add_with_ulps(w * fv, TERM_ULPS);
        out.g_down.add_with_ulps(w * g, TERM_ULPS);
        out.terms += 1;
    }
    Ok(out)
}

/// `2 C(G) ≤ (2 + deg² − deg) C(G − v)` at `v_d` in the graph on `[d, t]`.
fn check_theorem(kind: RuleKind, d: u64, t: u64, f: &(BigCount, BigCount)) -> Result<()> {
    let i = t / d;
    let deg = match kind {
        RuleKind::Div => i,
        RuleKind::Lcm => lcm_degree_t(i, gcd_with_mi(d, i))?,
    };
    let deg = BigCount::from(deg);
    let two = BigCount::from(2u32);
    if &two * &f.0 > (&two + &deg * &deg - &deg) * &f.1 {
        return Err(Error::Invariant(format!(
            "f({d}, {t}) = log({}/{}) exceeds the degree-{deg} cap",
            f.0, f.1
        )));
    }
    Ok(())
}

fn find(parent: &mut [u32], mut x: usize) -> usize {
    while parent[x] as usize != x {
        let p = parent[x] as usize;
        parent[x] = parent[p];
        x = parent[x] as usize;
    }
    x
}

fn union(parent: &mut [u32], size: &mut [u32], a: usize, b: usize) {
    let (mut ra, mut rb) = (find(parent, a), find(parent, b));
    if ra == rb {
        return;
    }
    if size[ra] < size[rb] {
        std::mem::swap(&mut ra, &mut rb);
    }
    parent[rb] = ra as u32;
    size[ra] += size[rb];
}

/// Upper bound with exact `f(d, t)` where tractable, default `c_l` baseline.
pub fn refined_upper_exact(
    kind: RuleKind,
    id_cutoff: u64,
    max_verts: usize,
    tail_kmax: u64,
    cache: &FCache,
) -> Result<BoundReport> {
    let params = LcmSeriesParams {
        tail_kmax,
        ..LcmSeriesParams::default()
    };
    refined_upper_exact_with(kind, id_cutoff, max_verts, &params, cache)
}

/// As [`refined_upper_exact`] with explicit baseline cutoffs (the divisor
/// rule only reads `tail_kmax`).
pub fn refined_upper_exact_with(
    kind: RuleKind,
    id_cutoff: u64,
    max_verts: usize,
    params: &LcmSeriesParams,
    cache: &FCache,
) -> Result<BoundReport> {
    let baseline = match kind {
        RuleKind::Div => upper_cd_series(params.tail_kmax),
        RuleKind::Lcm => refined_cl_series(params.imax, params.dmax_full, params.dprime_cap, params.tail_kmax)?,
    };
    let sweep = ExactSweep::run(kind, id_cutoff, max_verts, cache, params)?;
    let log_value = RealSum::nudge(Rounding::Up, baseline.log_value - sweep.savings, 2.0);
    let mut report = BoundReport::new(Target::from(kind), Direction::Upper, log_value, TAIL_RIGOROUS)
        .with_cutoff("id_cutoff", id_cutoff as f64)
        .with_cutoff("max_verts", max_verts as f64)
        .with_cutoff("exact_values", sweep.evaluations as f64);
    for (k, v) in baseline.cutoffs {
        report = report.with_cutoff(&k, v);
    }
    Ok(report)
}

/// Partial sum of the `C_f` series over the exactly computed triples.
pub fn lower_cf_partial(kind: RuleKind, id_cutoff: u64, max_verts: usize, cache: &FCache) -> Result<BoundReport> {
    let sweep = ExactSweep::run(kind, id_cutoff, max_verts, cache, &LcmSeriesParams::default())?;
    Ok(
        BoundReport::new(Target::from(kind), Direction::Lower, sweep.lower, TAIL_NONE)
            .with_cutoff("id_cutoff", id_cutoff as f64)
            .with_cutoff("max_verts", max_verts as f64)
            .with_cutoff("exact_values", sweep.evaluations as f64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::f_counts;

    #[test]
    fn trivial_cutoffs() {
        let cache = FCache::new();
        let crude = upper_cd_series(10_000).log_value;
        let r = refined_upper_exact(RuleKind::Div, 1, 20, 10_000, &cache).unwrap();
        assert!((r.log_value - crude).abs() < 1e-14);
        let low = lower_cf_partial(RuleKind::Div, 1, 20, &cache).unwrap();
        assert_eq!(low.log_value, 0.0);
        assert_eq!(low.value, 1.0);
    }

    #[test]
    fn union_find_sizes_match_bfs() {
        // every cached size change corresponds to the BFS component
        let cache = FCache::new();
        let sweep = ExactSweep::run(RuleKind::Div, 200, 12, &cache, &LcmSeriesParams::default()).unwrap();
        assert!(sweep.evaluations > 0 && sweep.terms >= sweep.evaluations);
        for d in 1..20 {
            for t in 2 * d..(13 * d).min(200) {
                if let Some((w, wo)) = cache.get(RuleKind::Div, d, t) {
                    let c = f_counts(RuleKind::Div, d, t, 64).unwrap().unwrap();
                    assert_eq!((w, wo), (c.with, c.without));
                }
            }
        }
    }

    #[test]
    fn small_sweeps_are_sane() {
        let cache = FCache::new();
        for kind in [RuleKind::Div, RuleKind::Lcm] {
            let params = LcmSeriesParams {
                imax: 50,
                dmax_full: 12,
                dprime_cap: 100,
                tail_kmax: 10_000,
            };
            let a = ExactSweep::run(kind, 100, 10, &cache, &params).unwrap();
            let b = ExactSweep::run(kind, 300, 12, &cache, &params).unwrap();
            assert!(a.lower > 0.0 && a.lower <= b.lower);
            assert!(a.savings > 0.0 && a.savings <= b.savings);
        }
    }
}
