//! Upper and lower bounds for `c_d` and `c_l`.
//!
//! Every pipeline returns a [`BoundReport`]. Upper reports accumulate with
//! upward rounding and add an explicit majorant for the truncated tail; lower
//! reports are truncations of series with nonnegative terms and round down.

mod cache;
mod exact;
mod series;
mod smooth;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

pub use cache::FCache;
pub use exact::{lower_cf_partial, refined_upper_exact, refined_upper_exact_with, ExactSweep, LcmSeriesParams};
pub use series::{
    cd_tail_majorant, cl_tail_majorant, refined_cl_series, upper_cd_partial, upper_cd_series, upper_cl_partial,
    upper_cl_series,
};
pub use smooth::{
    beta, beta_with_budget, combined_lower, combined_lower_from, lower_beta_alpha, smooth_ratio_correction,
    BETA_PREFIX_BUDGET,
};

use crate::graph::RuleKind;
use crate::numeric::{ratio_to_float, Rounding};
use crate::{ExactRatio, Real, RealSum};

/// Which growth constant a report bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "c_d")]
    Cd,
    #[serde(rename = "c_l")]
    Cl,
}

impl From<RuleKind> for Target {
    fn from(k: RuleKind) -> Self {
        match k {
            RuleKind::Div => Target::Cd,
            RuleKind::Lcm => Target::Cl,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Cd => "c_d",
            Target::Cl => "c_l",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

impl Direction {
    fn rounding(self) -> Rounding {
        match self {
            Direction::Upper => Rounding::Up,
            Direction::Lower => Rounding::Down,
        }
    }
}

/// A bound on `log c` together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub target: Target,
    pub direction: Direction,
    pub log_value: Real,
    pub value: Real,
    pub cutoffs: BTreeMap<String, f64>,
    pub tail: String,
}

impl BoundReport {
    pub fn new(target: Target, direction: Direction, log_value: Real, tail: impl Into<String>) -> Self {
        // exp(0) is exact; elsewhere allow the libm error in the bound's direction
        let value = if log_value == 0.0 {
            1.0
        } else {
            RealSum::nudge(direction.rounding(), log_value.exp(), 2.0)
        };
        Self {
            target,
            direction,
            log_value,
            value,
            cutoffs: BTreeMap::new(),
            tail: tail.into(),
        }
    }

    pub fn with_cutoff(mut self, name: &str, v: impl Into<f64>) -> Self {
        self.cutoffs.insert(name.to_string(), v.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

pub(crate) const TAIL_RIGOROUS: &str = "bounded rigorously";
pub(crate) const TAIL_NONE: &str = "truncated, no tail";

/// `log(1 + (k² − k)/2)`, the Theorem-2.1 cap for a vertex of degree `k`.
pub(crate) fn degree_cap(k: u64) -> f64 {
    let k = k as u128;
    let v = 1 + (k * k - k) / 2;
    (v as f64).ln()
}

/// `∏_{p ≤ i} (1 − 1/p)` for increasing `i`, exact until the final rounding.
pub(crate) struct EulerProducts {
    i: u64,
    num: BigUint,
    den: BigUint,
}

impl EulerProducts {
    pub(crate) fn new() -> Self {
        Self {
            i: 1,
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    /// Value at `i`; calls must not go backwards.
    pub(crate) fn at(&mut self, i: u64) -> f64 {
        assert!(i >= self.i, "Euler products only move forward");
        while self.i < i {
            self.i += 1;
            if crate::arith::factorize(self.i) == [(self.i, 1)] {
                self.num *= self.i - 1;
                self.den *= self.i;
            }
        }
        let r = ExactRatio::new_raw(self.num.clone().into(), self.den.clone().into());
        ratio_to_float(&r)
    }
}
