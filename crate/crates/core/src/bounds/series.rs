use std::sync::Arc;

use super::{degree_cap, BoundReport, Direction, EulerProducts, Target, TAIL_NONE, TAIL_RIGOROUS};
use crate::arith::{shared_sieve, DegreeTable, LcmRange, TotientTable};
use crate::numeric::Rounding;
use crate::{Error, Real, RealSum, Result};

/// `Σ_{k>K} log(1 + (k² − k)/2) / (k(k+1))`, bounded above.
///
/// Uses `log(1 + (k² − k)/2) ≤ 2 log k − log 2` for `k ≥ 2`, then
/// `Σ_{k>K} log k / (k(k+1)) ≤ ∫_K^∞ log x / x² dx = (log K + 1)/K` and
/// `Σ_{k>K} 1/(k(k+1)) = 1/(K+1)`.
pub fn cd_tail_majorant(kmax: u64) -> Real {
    let k = kmax.max(1) as f64;
    let t = 2.0 * (k.ln() + 1.0) / k - std::f64::consts::LN_2 / (k + 1.0);
    RealSum::nudge(Rounding::Up, t, 8.0)
}

/// Tail of the `Φ_k` series. `Φ_k ≤ 1 + k(k−1)/2 ≤ k²/2` for `k ≥ 2`, so
/// each term is at most `(4 log k − 3 log 2)/(k(k+1))`.
pub fn cl_tail_majorant(kmax: u64) -> Real {
    let k = kmax.max(1) as f64;
    let t = 4.0 * (k.ln() + 1.0) / k - 3.0 * std::f64::consts::LN_2 / (k + 1.0);
    RealSum::nudge(Rounding::Up, t, 8.0)
}

fn kk1(k: u64) -> f64 {
    (k as f64) * (k as f64 + 1.0)
}

fn cd_partial_sum(kmax: u64) -> RealSum {
    let mut acc = RealSum::new(Rounding::Up);
    for k in 2..=kmax {
        acc.add_with_ulps(degree_cap(k) / kk1(k), 6.0);
    }
    acc
}

fn totients(kmax: u64) -> Result<Arc<TotientTable>> {
    shared_sieve().table_upto(kmax.max(1))
}

/// Adds the crude `Φ_k` terms for `k ∈ [from, to]`.
fn add_cl_crude(acc: &mut RealSum, phi: &TotientTable, from: u64, to: u64) {
    for k in from.max(2)..=to {
        let big_phi = phi.summatory(k).expect("table covers the range");
        acc.add_with_ulps(degree_cap(big_phi) / kk1(k), 6.0);
    }
}

/// Crude `c_d` bound: all terms up to `kmax` plus the tail majorant.
pub fn upper_cd_series(kmax: u64) -> BoundReport {
    let mut acc = cd_partial_sum(kmax);
    acc.add_with_ulps(cd_tail_majorant(kmax), 0.0);
    BoundReport::new(Target::Cd, Direction::Upper, acc.value(), TAIL_RIGOROUS).with_cutoff("kmax", kmax as f64)
}

/// The same series truncated at `kmax` with no tail (not a bound).
pub fn upper_cd_partial(kmax: u64) -> BoundReport {
    BoundReport::new(Target::Cd, Direction::Upper, cd_partial_sum(kmax).value(), TAIL_NONE)
        .with_cutoff("kmax", kmax as f64)
}

fn cl_partial_sum(kmax: u64) -> Result<RealSum> {
    let phi = totients(kmax)?;
    let mut acc = RealSum::new(Rounding::Up);
    add_cl_crude(&mut acc, &phi, 2, kmax);
    Ok(acc)
}

/// Crude `c_l` bound from degrees at most `Φ_k`.
pub fn upper_cl_series(kmax: u64) -> Result<BoundReport> {
    let mut acc = cl_partial_sum(kmax)?;
    acc.add_with_ulps(cl_tail_majorant(kmax), 0.0);
    Ok(BoundReport::new(Target::Cl, Direction::Upper, acc.value(), TAIL_RIGOROUS).with_cutoff("kmax", kmax as f64))
}

pub fn upper_cl_partial(kmax: u64) -> Result<BoundReport> {
    Ok(
        BoundReport::new(Target::Cl, Direction::Upper, cl_partial_sum(kmax)?.value(), TAIL_NONE)
            .with_cutoff("kmax", kmax as f64),
    )
}

/// `c_l` bound with exact degrees `T_{i,d'}` for small `i`.
///
/// For `i ≤ dmax_full` every `d' | M_i` is visited; for `dmax_full < i ≤ imax`
/// only `d' ≤ dprime_cap`, and the remaining density is charged at `Φ_i`.
/// Beyond `imax` the crude terms run to `tail_kmax`, then the tail majorant.
pub fn refined_cl_series(imax: u64, dmax_full: u64, dprime_cap: u64, tail_kmax: u64) -> Result<BoundReport> {
    if imax == 0 || tail_kmax < imax {
        return Err(Error::Domain(format!(
            "refined series needs 1 ≤ imax ≤ tail_kmax, got imax={imax}, tail_kmax={tail_kmax}"
        )));
    }
    // M_i must fit in u64 for the full divisor walk: M_46 does, M_47 does not.
    let dmax_full = dmax_full.min(imax).min(46);
    let phi = totients(tail_kmax)?;
    let mut acc = RealSum::new(Rounding::Up);
    let mut euler = EulerProducts::new();
    let mut table = DegreeTable::new();
    let small_divisors = divisor_lists(dprime_cap);

    for i in 2..=imax {
        table.advance_to(i);
        let m = LcmRange::new(i);
        let e = euler.at(i);
        let scale = kk1(i);
        if i <= dmax_full {
            for (d_prime, w, ops) in full_divisor_weights(&m, e) {
                let t = table.degree((1..=i).filter(|l| d_prime % l == 0));
                acc.add_with_ulps(w * degree_cap(t) / scale, ops + 6.0);
            }
        } else {
            let mut covered = RealSum::new(Rounding::Down);
            for d_prime in m.divisors_up_to(dprime_cap) {
                let (w, ops) = weight(&m, d_prime, e);
                covered.add_with_ulps(w, ops);
                let ells = small_divisors[d_prime as usize].iter().copied().filter(|&l| l <= i);
                acc.add_with_ulps(w * degree_cap(table.degree(ells)) / scale, ops + 6.0);
            }
            let skipped = RealSum::nudge(Rounding::Up, (1.0 - covered.value()).max(0.0), 2.0);
            let big_phi = phi.summatory(i).expect("table covers imax");
            acc.add_with_ulps(skipped * degree_cap(big_phi) / scale, 8.0);
        }
    }
    add_cl_crude(&mut acc, &phi, imax + 1, tail_kmax);
    acc.add_with_ulps(cl_tail_majorant(tail_kmax), 0.0);
    Ok(
        BoundReport::new(Target::Cl, Direction::Upper, acc.value(), TAIL_RIGOROUS)
            .with_cutoff("imax", imax as f64)
            .with_cutoff("dmax_full", dmax_full as f64)
            .with_cutoff("dprime_cap", dprime_cap as f64)
            .with_cutoff("tail_kmax", tail_kmax as f64),
    )
}

/// `φ(M_i/d')/M_i` in floating point, with the number of roundings taken.
pub(crate) fn weight(m: &LcmRange, d_prime: u64, euler: f64) -> (f64, f64) {
    let mut w = euler / d_prime as f64;
    let mut ops = 2.0;
    for &(p, e) in m.prime_exponents() {
        if d_prime.is_multiple_of(p.pow(e)) {
            w *= p as f64 / (p - 1) as f64;
            ops += 2.0;
        }
    }
    (w, ops)
}

/// Every divisor of `M_i` with its weight; `M_i` fits in `u64`.
fn full_divisor_weights(m: &LcmRange, euler: f64) -> Vec<(u64, f64, f64)> {
    let mut divisors = vec![1u64];
    for &(p, e) in m.prime_exponents() {
        let len = divisors.len();
        for j in 0..len {
            let mut v = divisors[j];
            for _ in 0..e {
                v *= p;
                divisors.push(v);
            }
        }
    }
    divisors
        .into_iter()
        .map(|d| {
            let (w, ops) = weight(m, d, euler);
            (d, w, ops)
        })
        .collect()
}

/// Divisors of every `n ≤ cap`, ascending.
fn divisor_lists(cap: u64) -> Vec<Vec<u64>> {
    let cap = cap as usize;
    let mut lists = vec![Vec::new(); cap + 1];
    for d in 1..=cap {
        for m in (d..=cap).step_by(d) {
            lists[m].push(d as u64);
        }
    }
    lists
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_partial_sums() {
        assert_eq!(upper_cd_partial(1).value, 1.0);
        let v = upper_cd_partial(2).value;
        assert!((v - 2f64.powf(1.0 / 6.0)).abs() < 1e-14);
        assert_eq!(upper_cl_partial(1).unwrap().value, 1.0);
        let v = upper_cl_partial(2).unwrap().value;
        assert!((v - (2f64.ln() / 6.0).exp()).abs() < 1e-14);
    }

    #[test]
    fn tail_majorants_dominate() {
        // compare against a long stretch of the actual tail
        let k0 = 1000u64;
        let direct: f64 = (k0 + 1..=2_000_000).map(|k| degree_cap(k) / kk1(k)).sum();
        assert!(direct < cd_tail_majorant(k0));
        let phi = TotientTable::new(2_000_000);
        let direct: f64 = (k0 + 1..=2_000_000)
            .map(|k| degree_cap(phi.summatory(k).unwrap()) / kk1(k))
            .sum();
        assert!(direct < cl_tail_majorant(k0));
    }

    #[test]
    fn rigorous_sums_decrease_and_partials_increase() {
        let mut last_upper = f64::INFINITY;
        let mut last_partial = 0.0;
        for k in [10, 100, 1000, 10_000] {
            let u = upper_cd_series(k).log_value;
            let p = upper_cd_partial(k).log_value;
            assert!(u <= last_upper && p >= last_partial && p <= u);
            last_upper = u;
            last_partial = p;
        }
    }

    #[test]
    fn refined_reduces_to_crude() {
        let crude = upper_cl_series(100_000).unwrap().log_value;
        let degenerate = refined_cl_series(1, 1, 1, 100_000).unwrap().log_value;
        assert!((crude - degenerate).abs() < 1e-12);
        let refined = refined_cl_series(200, 20, 500, 100_000).unwrap().log_value;
        assert!(refined < crude);
    }

    #[test]
    fn full_divisor_weights_sum_to_one() {
        for i in [1u64, 5, 12, 20] {
            let m = LcmRange::new(i);
            let mut e = EulerProducts::new();
            let total: f64 = full_divisor_weights(&m, e.at(i)).iter().map(|x| x.1).sum();
            assert!((total - 1.0).abs() < 1e-12, "i={i}: {total}");
        }
        assert!(refined_cl_series(3, 1, 1, 2).is_err());
    }
}
