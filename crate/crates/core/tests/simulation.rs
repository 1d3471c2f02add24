use dpbw_core::sim::{settlement_transient, simulate, AwardBase, SimConfig};
use dpbw_core::{GameConfig, StrategyProfile, ValidatedGame};

fn gstar() -> ValidatedGame {
    GameConfig::new(18.0, vec![2.0, 3.0], vec![0.8, 0.8]).validate().unwrap()
}

#[test]
fn estimates_tighten_with_more_rounds() {
    let g = gstar();
    let x = StrategyProfile::two_pool(1.0, 0.0);
    let analytic = g.solve_rewards(&x).unwrap();
    let mut spreads = Vec::new();
    for (k, rounds) in [100_000u64, 1_000_000, 10_000_000].into_iter().enumerate() {
        let res = simulate(&g, &x, &SimConfig::new(rounds, 50, 5, 11 + k as u64)).unwrap();
        for i in 0..2 {
            let err = (res.empirical_r[i] - analytic.total[i]).abs();
            assert!(err <= 3.0 * res.std_err_r[i], "{rounds} rounds, pool {i}: {err} vs {}", res.std_err_r[i]);
        }
        spreads.push(res.std_err_r[0]);
    }
    assert!(spreads[0] > spreads[1] && spreads[1] > spreads[2], "{spreads:?}");
}

#[test]
fn carry_in_settles_within_thirty_epochs() {
    let g = gstar();
    for (x1, x2) in [(1.0, 0.0), (1.0, 1.0), (2.0, 3.0), (0.5, 2.5)] {
        let x = StrategyProfile::two_pool(x1, x2);
        let r = g.solve_rewards(&x).unwrap().total;
        let t = settlement_transient(&g, &x, 31, AwardBase::TotalRevenue).unwrap();
        let revenue: f64 = r.iter().sum();
        let gap: f64 = t[30].iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
        assert!(gap <= 1e-6 * revenue.max(f64::MIN_POSITIVE), "({x1}, {x2}): {gap}");
    }
}

#[test]
fn direct_only_award_is_labelled_non_canonical() {
    let g = gstar();
    let x = StrategyProfile::two_pool(1.0, 1.0);
    let cfg = SimConfig {
        award_base: AwardBase::DirectOnly,
        ..SimConfig::new(200_000, 20, 5, 5)
    };
    let res = simulate(&g, &x, &cfg).unwrap();
    assert!(!res.canonical());
    for l in &res.ledgers {
        assert!(l.conservation_gap() <= 1e-9);
    }
}
