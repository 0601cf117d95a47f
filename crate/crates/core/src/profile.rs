//! Named sets of numeric constants used by the strategies.
//!
//! `paper` carries the asymptotic constants verbatim and treats every
//! bookkeeping claim as a hard error. `scaled` shrinks the additive
//! thresholds so the same code runs on boards of a few dozen vertices; its
//! claim checks only log and count.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleConstants {
    /// Untouched-set size at which the path/cycle phases stop.
    pub untouched_threshold: usize,
    /// Stage V accepts cycles of length at least `n - min_cycle_deficit`.
    pub min_cycle_deficit: usize,
    /// Untouched vertices with `d_B(v, touched) >= n / heavy_divisor` are heavy.
    pub heavy_divisor: f64,
    /// Traversal stops at a cycle vertex with `d_B <= n / ext_degree_divisor`.
    pub ext_degree_divisor: f64,
    /// Extra Breaker degree allowed on the two outsiders.
    pub ext_outsider_slack: usize,
    /// Round budget of a single extension (strict upper bound).
    pub ext_round_budget: usize,
    /// Bound on the number of heavy steps and on `|V_t|`.
    pub heavy_cap: usize,
    /// Additive slack in the outsider bound checked on entering Stage V.
    pub outside_slack: usize,
    /// Rounds allowed for Stage V as a whole; `None` means `2n`.
    pub stage5_cap: Option<usize>,
    /// Smallest board accepted.
    pub min_n: usize,
    /// Path endpoint may close onto `v_0..=v_{close_window}`.
    pub close_window: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeConstants {
    /// Stage I root star has `ceil(n / (root_star_div * b))` leaves.
    pub root_star_div: f64,
    /// Later Stage I stars have `ceil(n / (leaf_star_div * b))` leaves.
    pub leaf_star_div: f64,
    /// Stage II ends once at most `stage2_exit * c2 * b` vertices are outside.
    pub stage2_exit: f64,
    /// Stage II center bound `d_B(z, V_i) <= stage2_degree * c2 * b`.
    pub stage2_degree: f64,
    /// Stage III ends once at most `final_loss * b` vertices are unvisited.
    pub final_loss: f64,
    /// Stage I center bound `d_B(v) <= center_degree_frac * n`.
    pub center_degree_frac: f64,
    /// Stage III entry center needs `d_F >= z0_free_frac * n`.
    pub z0_free_frac: f64,
    /// Stage III centers need `d_F >= zi_free_frac * n`.
    pub zi_free_frac: f64,
    /// Stage III centers need `d_B <= zi_breaker_mult * b`.
    pub zi_breaker_mult: f64,
    /// Total round budget `round_factor * n`.
    pub round_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomConstants {
    /// Upper bound on `f_II(v)` as a multiple of `epsilon * n * p`.
    pub f2_mult: f64,
    /// Lower bound on `d_H(v)` as a multiple of `n * p`.
    pub dh_frac: f64,
    /// Largest epsilon accepted.
    pub epsilon_max: f64,
    /// Enforce the bias bound `b <= eps / (30 (d + 1) p)`.
    pub enforce_bias_bound: bool,
    /// Hamilton composition keeps `N = n - (final_loss + vstar_slack / eps) b` vertices.
    pub vstar_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsProfile {
    pub name: String,
    /// Claim violations abort the strategy instead of being counted.
    pub strict: bool,
    pub cycle: CycleConstants,
    pub tree: TreeConstants,
    pub random: RandomConstants,
}

impl ConstantsProfile {
    pub fn paper() -> Self {
        Self {
            name: "paper".into(),
            strict: true,
            cycle: CycleConstants {
                untouched_threshold: 120,
                min_cycle_deficit: 125,
                heavy_divisor: 11.0,
                ext_degree_divisor: 10.0,
                ext_outsider_slack: 21,
                ext_round_budget: 25,
                heavy_cap: 11,
                outside_slack: 50,
                stage5_cap: Some(4000),
                min_n: 2000,
                close_window: 4,
            },
            tree: TreeConstants {
                root_star_div: 200.0,
                leaf_star_div: 100.0,
                stage2_exit: 50.0,
                stage2_degree: 20.0,
                final_loss: 400.0,
                center_degree_frac: 0.2,
                z0_free_frac: 10.0 / 11.0,
                zi_free_frac: 0.9,
                zi_breaker_mult: 100.0,
                round_factor: 6.0,
            },
            random: RandomConstants {
                f2_mult: 3.9,
                dh_frac: 0.99,
                epsilon_max: 1e-5,
                enforce_bias_bound: true,
                vstar_slack: 60.0,
            },
        }
    }

    pub fn scaled() -> Self {
        Self {
            name: "scaled".into(),
            strict: false,
            cycle: CycleConstants {
                untouched_threshold: 12,
                min_cycle_deficit: 17,
                heavy_divisor: 11.0,
                ext_degree_divisor: 10.0,
                ext_outsider_slack: 21,
                ext_round_budget: 25,
                heavy_cap: 11,
                outside_slack: 50,
                stage5_cap: None,
                min_n: 20,
                close_window: 4,
            },
            tree: TreeConstants {
                root_star_div: 4.0,
                leaf_star_div: 2.0,
                stage2_exit: 1.0,
                stage2_degree: 20.0,
                final_loss: 4.0,
                center_degree_frac: 0.5,
                z0_free_frac: 0.5,
                zi_free_frac: 0.4,
                zi_breaker_mult: 100.0,
                round_factor: 6.0,
            },
            random: RandomConstants {
                f2_mult: 3.9,
                dh_frac: 0.99,
                epsilon_max: 0.5,
                enforce_bias_bound: false,
                vstar_slack: 1.0,
            },
        }
    }

    pub fn named(name: &str) -> Option<Self> {
        match name {
            "paper" => Some(Self::paper()),
            "scaled" => Some(Self::scaled()),
            _ => None,
        }
    }

    pub fn names() -> &'static [&'static str] {
        &["paper", "scaled"]
    }
}

/// Counts claim violations; errors out under a strict profile.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimLog {
    pub violations: Vec<String>,
}

impl ClaimLog {
    /// Records a failed check. Returns `Err` with the message when `strict`.
    pub fn check(
        &mut self,
        strict: bool,
        ok: bool,
        what: impl FnOnce() -> String,
    ) -> Result<(), String> {
        if ok {
            return Ok(());
        }
        let msg = what();
        if strict {
            return Err(msg);
        }
        log::warn!("{msg}");
        self.violations.push(msg);
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.violations.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_name() {
        for name in ConstantsProfile::names() {
            assert_eq!(ConstantsProfile::named(name).unwrap().name, *name);
        }
        assert!(ConstantsProfile::named("huge").is_none());
    }

    #[test]
    fn strict_log_fails_fast() {
        let mut log = ClaimLog::default();
        assert!(log.check(true, false, || "boom".into()).is_err());
        assert!(log.check(false, false, || "soft".into()).is_ok());
        assert_eq!(log.count(), 1);
    }

    #[test]
    fn strict_profile_margins() {
        let p = ConstantsProfile::paper();
        let x = p.cycle.heavy_cap;
        assert!(3 * (3 * x + 6) < p.cycle.untouched_threshold);
        assert!(
            p.cycle.untouched_threshold + p.cycle.close_window + 1 <= p.cycle.min_cycle_deficit
        );
    }
}
