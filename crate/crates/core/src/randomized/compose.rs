//! Tree builder followed by exposure play on a low-degree vertex subset.

use serde::{Deserialize, Serialize};

use super::{run_randomized_strategy, select_vstar, RandConfig, RandError, RunReport};
use crate::diameter::{BuildFailure, BuilderParams, DiameterWalker, TreeReport};
use crate::engine::{
    BreakerStrategy, GameConfig, Match, MatchError, Player, Transcript, WalkerStrategy,
};
use crate::graph;
use crate::profile::ConstantsProfile;

/// Node budget of the Hamilton cycle search.
const HAMILTON_BUDGET: u64 = 20_000_000;
/// Largest `N` for which Hamiltonicity is decided.
const HAMILTON_MAX: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Config {
    pub n: usize,
    pub b: usize,
    pub seed: u64,
    pub epsilon: f64,
    /// Defaults to `ln n · ln ln ln n / n`.
    pub p: Option<f64>,
    pub first_mover: Player,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Config {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub gamma: f64,
    pub c: f64,
    /// Defaults to `gamma / (1000 C k) · n^((k-2)/(k-1))`, or 1 under a
    /// non-strict profile.
    pub b: Option<usize>,
    pub first_mover: Player,
}

#[derive(Debug)]
pub struct ComposeOutcome {
    pub report: RunReport,
    pub tree: TreeReport,
    pub vstar: Vec<usize>,
    /// Hamilton cycle or `C_k` found in `W \ W_0` on `V*`, as board vertices.
    pub cycle: Option<Vec<usize>>,
    pub transcript: Transcript,
}

struct Plan {
    target: usize,
    max_degree: usize,
    cfg: RandConfig,
}

fn compose(
    game: GameConfig,
    profile: &ConstantsProfile,
    breaker: &mut dyn BreakerStrategy,
    plan: impl FnOnce(&BuilderParams) -> Result<Plan, RandError>,
) -> Result<
    (
        Match,
        RunReport,
        TreeReport,
        Vec<usize>,
        super::RandomizedWalker,
    ),
    RandError,
> {
    let params = BuilderParams::new(game.n, game.b, &profile.tree, profile.strict)
        .map_err(BuildFailure::Builder)?;
    let plan = plan(&params)?;
    let mut builder = DiameterWalker::new(profile.clone());
    let mut m = Match::new(game, builder.name(), breaker.name()).map_err(MatchError::from)?;
    if let Err(e) = m.play(&mut builder, breaker, &crate::engine::never) {
        return Err(match builder.last_error() {
            Some(b) => BuildFailure::Builder(b.clone()),
            None => BuildFailure::Match(e),
        }
        .into());
    }
    let tree = builder.report(m.state()).expect("builder ran");
    let members = builder.tree().expect("builder ran").members();
    m.comment(&format!(
        "tree: {} vertices, diameter {}",
        tree.vertices, tree.diameter
    ));
    let vstar = select_vstar(m.state(), &members, plan.target, plan.max_degree)?;
    m.comment(&format!("exposure set: {} vertices", vstar.len()));
    let (report, walker) = run_randomized_strategy(&mut m, &vstar, plan.cfg, profile, breaker)?;
    Ok((m, report, tree, vstar, walker))
}

/// Almost-spanning tree, then exposure play with `N = n - (final_loss +
/// vstar_slack/eps) b` vertices of degree below `eps n / 2`. Decides
/// Hamiltonicity of `W \ W_0` on `V*` for `N <= 60`.
pub fn compose_theorem2(
    cfg: &Theorem2Config,
    profile: &ConstantsProfile,
    breaker: &mut dyn BreakerStrategy,
) -> Result<ComposeOutcome, RandError> {
    let n = cfg.n;
    let nf = n as f64;
    let p = match cfg.p {
        Some(p) => p,
        None => {
            let p = nf.ln() * nf.ln().ln().ln() / nf;
            if !(p > 0.0) {
                return Err(RandError::InvalidConfig(format!(
                    "ln ln ln n is not positive at n = {n}"
                )));
            }
            p
        }
    };
    let eps = cfg.epsilon;
    let k = &profile.random;
    let loss = ((profile.tree.final_loss + k.vstar_slack / eps) * cfg.b as f64).ceil() as usize;
    let game = GameConfig::new(n, cfg.b, cfg.first_mover)
        .with_seed(cfg.seed)
        .with_profile(&profile.name);
    let (m, mut report, tree, vstar, walker) = compose(game, profile, breaker, |params| {
        let target = n.checked_sub(loss).filter(|&t| t >= 3).ok_or_else(|| {
            RandError::InvalidConfig(format!(
                "n = {n} leaves no room after removing {loss} vertices"
            ))
        })?;
        let max_degree = (eps * nf / 2.0).ceil() as usize;
        Ok(Plan {
            target,
            max_degree,
            cfg: RandConfig {
                epsilon: eps,
                p,
                d: params.diameter_bound,
            },
        })
    })?;
    let mut cycle = None;
    if vstar.len() <= HAMILTON_MAX {
        let rows = walker.new_graph_rows(m.state());
        report.hamiltonian = graph::hamilton_cycle(&rows, HAMILTON_BUDGET).map(|c| {
            cycle = c.map(|c| c.into_iter().map(|i| vstar[i]).collect());
            cycle.is_some()
        });
    }
    let transcript = m.finish(None)?;
    Ok(ComposeOutcome {
        report,
        tree,
        vstar,
        cycle,
        transcript,
    })
}

/// Tree of diameter at most `d = 2k + 4`, then exposure play on `N = n/2`
/// vertices of degree below `24b` with `p = C N^(-(k-2)/(k-1))` and
/// `eps = gamma / 4`. Reports whether `W \ W_0` on `V*` has a `C_k`.
pub fn compose_theorem3(
    cfg: &Theorem3Config,
    profile: &ConstantsProfile,
    breaker: &mut dyn BreakerStrategy,
) -> Result<ComposeOutcome, RandError> {
    let (n, k) = (cfg.n, cfg.k);
    if k < 3 {
        return Err(RandError::InvalidConfig(format!(
            "cycle length {k} below 3"
        )));
    }
    let big_n = n / 2;
    let expo = (k as f64 - 2.0) / (k as f64 - 1.0);
    let p = cfg.c * (big_n as f64).powf(-expo);
    let eps = cfg.gamma / 4.0;
    let b = match cfg.b {
        Some(b) => b,
        None if profile.strict => {
            let b =
                (cfg.gamma / (1000.0 * cfg.c * k as f64) * (n as f64).powf(expo)).floor() as usize;
            if b == 0 {
                return Err(RandError::InvalidConfig(format!(
                    "bias gamma/(1000 C k) n^{expo:.3} rounds to 0"
                )));
            }
            b
        }
        None => 1,
    };
    let d = 2 * k + 4;
    let game = GameConfig::new(n, b, cfg.first_mover)
        .with_seed(cfg.seed)
        .with_profile(&profile.name);
    let strict = profile.strict;
    let (m, mut report, tree, vstar, walker) = compose(game, profile, breaker, |params| {
        if params.diameter_bound > d {
            let msg = format!(
                "tree diameter bound {} exceeds d = {d}",
                params.diameter_bound
            );
            if strict {
                return Err(RandError::InvalidConfig(msg));
            }
            log::warn!("{msg}");
        }
        Ok(Plan {
            target: big_n,
            max_degree: 24 * b,
            cfg: RandConfig { epsilon: eps, p, d },
        })
    })?;
    let rows = walker.new_graph_rows(m.state());
    let cycle =
        graph::find_k_cycle(&rows, k).map(|c| c.into_iter().map(|i| vstar[i]).collect::<Vec<_>>());
    report.has_ck = Some(cycle.is_some());
    let transcript = m.finish(None)?;
    Ok(ComposeOutcome {
        report,
        tree,
        vstar,
        cycle,
        transcript,
    })
}
