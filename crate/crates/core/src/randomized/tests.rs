use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::engine::{never, GameConfig, Player};
use crate::strategies::{IsolateMany, RandomBreaker};

/// Walks `0 -> 1 -> 0 -> 2 -> ...` until every vertex is a leaf of a star at 0.
struct StarWalker {
    next: usize,
}

impl WalkerStrategy for StarWalker {
    fn name(&self) -> &str {
        "star"
    }

    fn next_step(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        if state.position() != Some(0) {
            return Ok(WalkerAction::Step(0));
        }
        while self.next < state.n() && !state.is_free(0, self.next) {
            self.next += 1;
        }
        if self.next >= state.n() {
            return Ok(WalkerAction::Done);
        }
        self.next += 1;
        Ok(WalkerAction::Step(self.next - 1))
    }
}

fn star_match(n: usize, b: usize, seed: u64, breaker: &mut dyn BreakerStrategy) -> Match {
    let cfg = GameConfig::new(n, b, Player::Walker)
        .with_seed(seed)
        .with_profile("scaled");
    let mut m = Match::new(cfg, "star", breaker.name()).unwrap();
    m.play(&mut StarWalker { next: 1 }, breaker, &never)
        .unwrap();
    m
}

fn scaled() -> ConstantsProfile {
    ConstantsProfile::scaled()
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

#[test]
fn fresh_state_reds_vertex_zero() {
    let m = star_match(10, 0, 0, &mut RandomBreaker::new());
    let cfg = RandConfig {
        epsilon: 0.5,
        p: 0.3,
        d: 2,
    };
    let mut w = RandomizedWalker::new(m.state(), &all(10), cfg, &scaled()).unwrap();
    assert_eq!(w.select_exposure_vertex(0).unwrap(), Some(0));
    assert_eq!(w.red(), Some(0));
    assert_eq!(w.boxes().record(0).w_m, 1);
}

#[test]
fn inactive_boxes_end_stage_one() {
    let m = star_match(10, 0, 0, &mut RandomBreaker::new());
    let cfg = RandConfig {
        epsilon: 0.5,
        p: 0.3,
        d: 2,
    };
    let mut w = RandomizedWalker::new(m.state(), &all(10), cfg, &scaled()).unwrap();
    for v in 0..10 {
        w.boxes.maker_take(v, 12);
    }
    assert_eq!(w.select_exposure_vertex(0).unwrap(), None);
}

#[test]
fn type_one_grants_two_p_n_minus_one() {
    let m = star_match(50, 0, 0, &mut RandomBreaker::new());
    let cfg = RandConfig {
        epsilon: 0.5,
        p: 0.1,
        d: 2,
    };
    let mut w = RandomizedWalker::new(m.state(), &all(50), cfg, &scaled()).unwrap();
    assert_eq!(
        w.select_exposure_vertex(m.state().round()).unwrap(),
        Some(0)
    );
    // A seed whose first success lies past all 49 coins.
    let seed = (0..10_000u64)
        .find(|&s| geometric(0.1, &mut ChaCha8Rng::seed_from_u64(s)) >= 49)
        .unwrap();
    let action = w
        .expose_red(m.state(), &mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap();
    assert_eq!(action, WalkerAction::Step(1));
    assert_eq!(w.exposure().f_one()[0], 1);
    assert_eq!(w.boxes().record(0).w_m, 1 + 9);
    assert!(w.exposure().unexposed(0).is_empty());
    assert!((1..50).all(|u| !w.exposure().unexposed(u).contains(0)));
    assert_eq!(w.red(), None);
}

#[test]
fn success_on_a_free_edge_moves_walker() {
    let m = star_match(12, 0, 0, &mut RandomBreaker::new());
    let cfg = RandConfig {
        epsilon: 0.5,
        p: 0.3,
        d: 2,
    };
    let mut w = RandomizedWalker::new(m.state(), &all(12), cfg, &scaled()).unwrap();
    w.boxes.maker_take(0, 8);
    assert_eq!(w.select_exposure_vertex(0).unwrap(), Some(1));
    let seed = (0..1000u64)
        .find(|&s| geometric(0.3, &mut ChaCha8Rng::seed_from_u64(s)) == 2)
        .unwrap();
    let mut st = m.state().clone();
    st.walker_step(1).unwrap();
    let action = w
        .expose_red(&st, &mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap();
    // U_1 is 0, 2, 3, ...; the third coin is on 1-3.
    assert_eq!(action, WalkerAction::Step(3));
    assert_eq!(w.boxes().record(3).w_m, 1);
    assert_eq!(w.exposure().unexposed(1).count(), 11 - 3);
    assert_eq!(w.exposure().f_two(), &[0; 12]);
}

#[test]
fn success_on_a_w0_edge_is_type_two() {
    let m = star_match(12, 0, 0, &mut RandomBreaker::new());
    let cfg = RandConfig {
        epsilon: 0.5,
        p: 0.3,
        d: 2,
    };
    let mut w = RandomizedWalker::new(m.state(), &all(12), cfg, &scaled()).unwrap();
    w.boxes.maker_take(0, 8);
    assert_eq!(w.select_exposure_vertex(0).unwrap(), Some(1));
    let mut st = m.state().clone();
    st.walker_step(1).unwrap();
    let seed = (0..1000u64)
        .find(|&s| geometric(0.3, &mut ChaCha8Rng::seed_from_u64(s)) == 0)
        .unwrap();
    let action = w
        .expose_red(&st, &mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap();
    assert_eq!(action, WalkerAction::Step(0));
    assert_eq!(w.exposure().f_two()[0], 1);
    assert_eq!(w.exposure().f_two()[1], 1);
}

#[test]
fn expose_requires_red_at_position() {
    let m = star_match(8, 0, 0, &mut RandomBreaker::new());
    let cfg = RandConfig {
        epsilon: 0.5,
        p: 0.3,
        d: 2,
    };
    let mut w = RandomizedWalker::new(m.state(), &all(8), cfg, &scaled()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(w.expose_red(m.state(), &mut rng).is_err());
    w.boxes.maker_take(0, 8);
    w.select_exposure_vertex(0).unwrap();
    assert!(w.expose_red(m.state(), &mut rng).is_err());
}

#[test]
fn zero_bias_makes_the_identity_exact() {
    for seed in 0..5 {
        let mut breaker = RandomBreaker::new();
        let mut m = star_match(40, 0, seed, &mut breaker);
        let cfg = RandConfig {
            epsilon: 0.5,
            p: 0.2,
            d: 2,
        };
        let (r, w) =
            run_randomized_strategy(&mut m, &all(40), cfg, &scaled(), &mut breaker).unwrap();
        let v = &r.vertices;
        for i in 0..40 {
            assert_eq!(
                v.d_new[i] as i64,
                v.d_h[i] as i64 - v.f_ii[i] as i64,
                "vertex {i}"
            );
        }
        // Every type II failure is a star edge of W_0.
        let blocked = w
            .exposure()
            .h_edges()
            .iter()
            .filter(|&&(a, b)| w.is_w0_edge(a as usize, b as usize))
            .count();
        assert_eq!(v.f_ii.iter().sum::<u32>() as usize, 2 * blocked);
        assert!(r.identity_holds);
        assert_eq!(w.exposure().exposed_edges(), 40 * 39 / 2);
        assert!(r.claim_violations.is_empty(), "{:?}", r.claim_violations);
        assert!(r.max_clearance <= 3);
    }
}

#[test]
fn runs_against_breakers_keep_claims() {
    for seed in 0..4 {
        for breaker in [
            &mut RandomBreaker::new() as &mut dyn BreakerStrategy,
            &mut IsolateMany::new(),
        ] {
            let mut m = star_match(60, 1, seed, breaker);
            let leaves = m.state().visit_order().to_vec();
            let cfg = RandConfig {
                epsilon: 0.5,
                p: 0.3,
                d: 2,
            };
            let (r, w) = run_randomized_strategy(&mut m, &leaves, cfg, &scaled(), breaker).unwrap();
            assert!(r.identity_holds);
            // The bias here is far above eps/(30(d+1)p), so only the
            // degree claim may fail.
            assert!(
                r.claim_violations
                    .iter()
                    .all(|v| v.starts_with("active S_")),
                "{:?}",
                r.claim_violations
            );
            assert!(r.max_clearance <= 3);
            assert!(r.max_breaker_gap <= w.boxes().bias());
            assert!(r.max_w_b < leaves.len());
            let e = w.exposure();
            for u in 0..leaves.len() {
                for x in e.unexposed(u).iter() {
                    assert!(e.unexposed(x).contains(u));
                }
            }
            let t = m.finish(None).unwrap();
            assert!(t.records.len() > 60);
        }
    }
}

#[test]
fn strict_profile_rejects_large_bias() {
    let cfg = RandConfig {
        epsilon: 1e-6,
        p: 0.5,
        d: 2,
    };
    assert!(matches!(
        cfg.validate(100, 1, &ConstantsProfile::paper()),
        Err(RandError::BiasTooLarge { .. })
    ));
    let loose = RandConfig {
        epsilon: 0.5,
        p: 0.5,
        d: 2,
    };
    assert!(matches!(
        loose.validate(100, 1, &ConstantsProfile::paper()),
        Err(RandError::InvalidConfig(_))
    ));
    assert!(!loose.validate(100, 5, &scaled()).unwrap().is_empty());
}

#[test]
fn star_w0_passes_preconditions() {
    let m = star_match(30, 0, 0, &mut RandomBreaker::new());
    let cfg = RandConfig {
        epsilon: 0.5,
        p: 0.3,
        d: 2,
    };
    let rep = check_preconditions(m.state(), &all(30), &cfg);
    // Only the centre, whose edges all belong to W_0, lacks free degree.
    assert_eq!(
        rep.violations,
        vec!["d_F(0) = 0 < (1 - eps) N = 15.0".to_string()]
    );
    assert_eq!(rep.max_distance, Some(2));
    assert!(check_preconditions(m.state(), &all(30)[1..], &cfg)
        .violations
        .is_empty());
    let tight = RandConfig {
        epsilon: 0.01,
        ..cfg
    };
    let rep = check_preconditions(m.state(), &all(30), &tight);
    assert!(rep.violations.iter().any(|v| v.starts_with("d_F(1)")));
    let short = RandConfig { d: 1, ..cfg };
    assert!(!check_preconditions(m.state(), &all(30), &short)
        .violations
        .is_empty());
}

#[test]
fn edgeless_selection_keeps_the_first_vertices() {
    let st = GameState::new(GameConfig::new(20, 1, Player::Walker)).unwrap();
    assert_eq!(select_vstar(&st, &all(20), 7, 1).unwrap(), all(7));
    assert!(matches!(
        select_vstar(&st, &all(5), 7, 1),
        Err(RandError::SelectionFailed { .. })
    ));
}

#[test]
fn heavy_vertex_goes_first() {
    let mut st = GameState::new(GameConfig::new(20, 3, Player::Walker)).unwrap();
    let star: Vec<EdgeId> = (1..4).map(|v| EdgeId::new(0, v)).collect();
    st.breaker_claim(&star).unwrap();
    let kept = select_vstar(&st, &all(20), 19, 1).unwrap();
    assert!(!kept.contains(&0));
    assert_eq!(kept.len(), 19);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn selection_recount(seed in any::<u64>(), b in 1usize..4) {
        let n = 80;
        let mut st = GameState::new(GameConfig::new(n, b, Player::Walker)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..(2 * n) {
            let mut edges: Vec<EdgeId> = Vec::new();
            while edges.len() < b {
                let Some(e) = EdgeId::try_new(rng.gen_range(0..n), rng.gen_range(0..n)) else { continue };
                if st.is_free(e.u(), e.v()) && !edges.contains(&e) {
                    edges.push(e);
                }
            }
            st.breaker_claim(&edges).unwrap();
        }
        // At most 2bn edges, so at most n/2 vertices reach degree 8b.
        let target = n / 2;
        let kept = select_vstar(&st, &all(n), target, 8 * b).unwrap();
        prop_assert_eq!(kept.len(), target);
        let set = BitSet::from_members(n, kept.iter().copied());
        for &v in &kept {
            let deg = st.board().breaker_degree_into(v, &set) + st.board().walker_degree_into(v, &set);
            prop_assert!(deg < 8 * b);
        }
    }
}

#[test]
fn theorem2_smoke_at_sixty() {
    let profile = scaled();
    let mut done = 0;
    for seed in 0..6 {
        let cfg = Theorem2Config {
            n: 60,
            b: 1,
            seed,
            epsilon: 0.25,
            p: Some(0.3),
            first_mover: Player::Breaker,
        };
        let out = compose_theorem2(&cfg, &profile, &mut RandomBreaker::new()).unwrap();
        assert!(out.report.identity_holds);
        assert!(out.report.hamiltonian.is_some());
        assert_eq!(out.vstar.len(), 60 - 8);
        assert_eq!(out.report.hamiltonian, Some(out.cycle.is_some()));
        done += 1;
    }
    assert_eq!(done, 6);
}

#[test]
fn theorem3_finds_triangles() {
    let profile = scaled();
    let mut hits = 0;
    for seed in 0..10 {
        let cfg = Theorem3Config {
            n: 120,
            k: 3,
            seed,
            gamma: 1.0,
            c: 1.5,
            b: None,
            first_mover: Player::Breaker,
        };
        let out = compose_theorem3(&cfg, &profile, &mut RandomBreaker::new()).unwrap();
        assert!(out.report.identity_holds);
        if let Some(c) = &out.cycle {
            assert_eq!(c.len(), 3);
            hits += 1;
        }
    }
    assert!(hits >= 8, "{hits}");
}
