use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{BoundReport, Direction, EulerProducts, Target, TAIL_NONE};
use crate::arith::{alpha, is_rough, largest_prime_factor, smooth_numbers_up_to, FactoredInt};
use crate::counts::{count_set, f_from_counts};
use crate::graph::{build_set_graph_with, GraphRule, RuleKind};
use crate::numeric::{ln_big, ratio_to_float, Rounding};
use crate::permanent::count_covers;
use crate::{BigCount, Error, RealSum, Result};

/// Largest divisor-prefix permanent [`beta`] attempts by default.
///
/// 24 admits every `b ≤ 240`; `b = 720` (29-element prefix) already takes
/// minutes on one core.
pub const BETA_PREFIX_BUDGET: usize = 24;

/// `β(b)`: weighted log-counts over the prefixes of the divisor chain of `b`.
pub fn beta(kind: RuleKind, b: &FactoredInt) -> Result<f64> {
    beta_with_budget(kind, b, BETA_PREFIX_BUDGET)
}

pub fn beta_with_budget(kind: RuleKind, b: &FactoredInt, budget: usize) -> Result<f64> {
    let divs = b.divisors();
    let k = divs.len();
    if k.saturating_sub(1) > budget {
        return Err(Error::Tractability(format!(
            "b = {} has {k} divisors; prefixes above {budget} elements are over budget",
            b.value()
        )));
    }
    let ln_count = |set: &[u64]| -> Result<f64> { Ok(ln_big::<f64>(&count_set(kind, set)?)) };
    let top = match kind {
        RuleKind::Div => ln_count(&divs)?,
        // every pair has lcm ≤ b
        RuleKind::Lcm => (2..=k as u64).map(|j| (j as f64).ln()).sum(),
    };
    let mut acc = RealSum::new(Rounding::Nearest);
    acc.add(top / b.value() as f64);
    for i in 1..k {
        let weight = 1.0 / divs[i - 1] as f64 - 1.0 / divs[i] as f64;
        if i > 1 {
            acc.add(weight * ln_count(&divs[..i])?);
        }
    }
    Ok(acc.value())
}

/// Lower bound `β(b) α(b)` for `log c`.
pub fn lower_beta_alpha(kind: RuleKind, b: &FactoredInt) -> Result<BoundReport> {
    let a: f64 = ratio_to_float(&alpha(b));
    let v = beta(kind, b)? * a;
    Ok(BoundReport::new(
        Target::from(kind),
        Direction::Lower,
        v,
        "exact finite sum; o(n) term dropped",
    )
    .with_cutoff("b", b.value() as f64))
}

/// `β(b) α(b)` plus a smooth-ratio correction computed for smoothness `s`.
pub fn combined_lower(kind: RuleKind, b: &FactoredInt, s: u64, correction: &BoundReport) -> Result<BoundReport> {
    check_smooth(b, s)?;
    let base = lower_beta_alpha(kind, b)?;
    combined_lower_from(kind, b, base.log_value, s, correction)
}

/// Like [`combined_lower`], with `β(b) α(b)` supplied by the caller.
///
/// For `b` whose prefix permanents are over budget (e.g. 10368).
pub fn combined_lower_from(
    kind: RuleKind,
    b: &FactoredInt,
    beta_alpha: f64,
    s: u64,
    correction: &BoundReport,
) -> Result<BoundReport> {
    check_smooth(b, s)?;
    if !(beta_alpha.is_finite() && beta_alpha >= 0.0) {
        return Err(Error::Domain(format!(
            "β·α must be a finite nonnegative number, got {beta_alpha}"
        )));
    }
    let v = RealSum::nudge(Rounding::Down, beta_alpha + correction.log_value, 2.0);
    let mut r = BoundReport::new(Target::from(kind), Direction::Lower, v, TAIL_NONE)
        .with_cutoff("b", b.value() as f64)
        .with_cutoff("s", s as f64);
    for (k, x) in &correction.cutoffs {
        r = r.with_cutoff(k, *x);
    }
    Ok(r)
}

fn check_smooth(b: &FactoredInt, s: u64) -> Result<()> {
    let largest = b.largest_prime();
    if largest > s {
        return Err(Error::SmoothnessMismatch {
            b: b.value(),
            largest_prime: largest,
            s,
        });
    }
    Ok(())
}

struct SmoothWorld {
    kind: RuleKind,
    s: u64,
    smooth: Vec<u64>,
    max_union: usize,
    id_cutoff: u64,
    block_counts: HashMap<u64, BigCount>,
}

impl SmoothWorld {
    fn smooth_count(&self, x: u64) -> usize {
        self.smooth.partition_point(|&m| m <= x)
    }

    /// `#S(M_{r,t,s})`, which only depends on `⌊t/r⌋`.
    fn block_count(&mut self, q: u64) -> Result<BigCount> {
        if let Some(c) = self.block_counts.get(&q) {
            return Ok(c.clone());
        }
        let set: Vec<u64> = self.smooth[..self.smooth_count(q)].to_vec();
        let c = self.count(&set, q)?;
        self.block_counts.insert(q, c.clone());
        Ok(c)
    }

    fn count(&self, set: &[u64], bound: u64) -> Result<BigCount> {
        let rule = match self.kind {
            RuleKind::Div => GraphRule::Divisor,
            RuleKind::Lcm => GraphRule::LcmBounded { bound },
        };
        count_covers(&build_set_graph_with(rule, set)?)
    }

    /// `D_{x,t}`: the component of `x` among the `s`-rough labels in `[x, t]`
    /// under divisibility, or `None` once its smooth multiples exceed the
    /// union cap.
    fn rough_component(&self, x: u64, t: u64) -> Option<Vec<u64>> {
        let mut seen = BTreeSet::from([x]);
        let mut union = self.smooth_count(t / x);
        if union > self.max_union {
            return None;
        }
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            let divisors = FactoredInt::new(v).map(|f| f.divisors()).unwrap_or_default();
            let below = divisors.into_iter().filter(|&y| y >= x && y < v);
            let above = (2..=t / v).map(|k| k * v);
            for y in below.chain(above) {
                if is_rough(y, self.s) && seen.insert(y) {
                    union += self.smooth_count(t / y);
                    if union > self.max_union {
                        return None;
                    }
                    queue.push_back(y);
                }
            }
        }
        Some(seen.into_iter().collect())
    }

    fn union_of(&self, roots: impl Iterator<Item = u64>, t: u64) -> Vec<u64> {
        let mut u: Vec<u64> = roots
            .flat_map(|r| self.smooth[..self.smooth_count(t / r)].iter().map(move |m| r * m))
            .collect();
        u.sort_unstable();
        u
    }

    /// Some rough `b < d` already claims `d` in the instance `[1, t]`: `d` lies
    /// in `D_{b,t}`, whose union fits the cap, and `b` meets the `id` cutoff.
    fn claimed(&self, d: u64, t: u64) -> bool {
        (1..d).filter(|&b| is_rough(b, self.s)).any(|b| {
            let i_b = t / b;
            let d_b = largest_smooth_divisor(b, i_b);
            if i_b.saturating_mul(d_b) >= self.id_cutoff || self.smooth_count(i_b) > self.max_union {
                return false;
            }
            self.rough_component(b, t).is_some_and(|c| c.binary_search(&d).is_ok())
        })
    }
}

/// Largest divisor of `b` whose prime factors are all `≤ i`.
fn largest_smooth_divisor(b: u64, i: u64) -> u64 {
    crate::arith::factorize(b)
        .into_iter()
        .filter(|&(p, _)| p <= i)
        .map(|(p, e)| p.pow(e))
        .product()
}

/// Lower bound on the density of `log(#S(n) / #S(n, s))`.
///
/// Sums, over `(i, d, t)` with `d` `s`-rough, `P⁺(d) ≤ i`, `id < id_cutoff`
/// and `t ∈ [id, (i+1)d)`, the weighted log of
/// `#S(U) / (#S(U') #S(M_{d,t,s}))`, where `U` is the union of the smooth
/// multiple sets over `D_{d,t}` and `U'` the same union without `r = d`.
/// Terms whose union exceeds `max_union` or that an earlier label claims are
/// left out; all terms are nonnegative, so the truncation stays a lower bound.
pub fn smooth_ratio_correction(kind: RuleKind, s: u64, id_cutoff: u64, max_union: usize) -> Result<BoundReport> {
    if s < 2 {
        return Err(Error::Domain("smoothness bound must be at least 2".into()));
    }
    let mut world = SmoothWorld {
        kind,
        s,
        smooth: smooth_numbers_up_to(2 * id_cutoff.max(1), s),
        max_union,
        id_cutoff,
        block_counts: HashMap::new(),
    };
    let mut euler = EulerProducts::new();
    let euler_at: Vec<f64> = (0..id_cutoff.max(1)).map(|i| euler.at(i.max(1))).collect();
    let mut acc = RealSum::new(Rounding::Down);
    let mut used = 0usize;

    let ds = (1..id_cutoff).filter(|&d| {
        let p = largest_prime_factor(d);
        is_rough(d, s) && (d == 1 || crate::arith::factorize(d) == [(d, 1)]) && p.max(1) * d < id_cutoff
    });
    for d in ds.collect::<Vec<_>>() {
        let i_lo = largest_prime_factor(d).max(1);
        let i_hi = (id_cutoff - 1) / d;
        let mut last_union: Vec<u64> = Vec::new();
        let mut term = 0.0;
        for t in i_lo * d..(i_hi + 1) * d {
            let Some(comp) = world.rough_component(d, t) else {
                break;
            };
            let union = world.union_of(comp.iter().copied(), t);
            if union != last_union {
                let whole = world.count(&union, t)?;
                let rest_set = world.union_of(comp.iter().copied().filter(|&r| r > d), t);
                let rest = if rest_set.is_empty() {
                    BigCount::from(1u32)
                } else {
                    world.count(&rest_set, t)?
                };
                let den = rest * world.block_count(t / d)?;
                if whole < den {
                    return Err(Error::Invariant(format!(
                        "smooth ratio below 1 at d={d}, t={t}: {whole} < {den}"
                    )));
                }
                term = f_from_counts(&whole, &den);
                last_union = union;
            }
            if term == 0.0 || world.claimed(d, t) {
                continue;
            }
            let i = t / d;
            let w = euler_at[i as usize] / ((t as f64) * (t as f64 + 1.0));
            acc.add_with_ulps(w * term, 10.0);
            used += 1;
        }
    }
    Ok(
        BoundReport::new(Target::from(kind), Direction::Lower, acc.value(), TAIL_NONE)
            .with_cutoff("s", s as f64)
            .with_cutoff("id_cutoff", id_cutoff as f64)
            .with_cutoff("max_union", max_union as f64)
            .with_cutoff("terms", used as f64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> FactoredInt {
        FactoredInt::new(v).unwrap()
    }

    #[test]
    fn beta_of_one_is_zero() {
        assert_eq!(beta(RuleKind::Div, &b(1)).unwrap(), 0.0);
        assert_eq!(beta(RuleKind::Lcm, &b(1)).unwrap(), 0.0);
    }

    #[test]
    fn beta_alpha_small_rows() {
        let v = lower_beta_alpha(RuleKind::Div, &b(24)).unwrap().log_value;
        assert!((v - 0.542689).abs() < 5e-7, "{v}");
        let v = lower_beta_alpha(RuleKind::Lcm, &b(24)).unwrap().log_value;
        assert!((v - 0.602065).abs() < 5e-7, "{v}");
    }

    #[test]
    fn over_budget() {
        assert!(matches!(
            beta_with_budget(RuleKind::Div, &b(720), 10),
            Err(Error::Tractability(_))
        ));
    }

    #[test]
    fn smoothness_mismatch() {
        let zero = BoundReport::new(Target::Cd, Direction::Lower, 0.0, TAIL_NONE);
        let e = combined_lower(RuleKind::Div, &b(60), 3, &zero);
        assert!(matches!(e, Err(Error::SmoothnessMismatch { largest_prime: 5, .. })));
        let base = lower_beta_alpha(RuleKind::Div, &b(24)).unwrap();
        let c = combined_lower(RuleKind::Div, &b(24), 3, &zero).unwrap();
        assert!((c.log_value - base.log_value).abs() < 1e-15);
    }

    #[test]
    fn small_corrections_are_nonnegative() {
        for kind in [RuleKind::Div, RuleKind::Lcm] {
            let r = smooth_ratio_correction(kind, 2, 60, 10).unwrap();
            assert!(r.log_value >= 0.0);
        }
        assert_eq!(largest_smooth_divisor(2 * 9 * 7, 5), 18);
    }
}
