//! Best responses, regret, equilibrium search and the verification campaigns.
//!
//! A player's utility is its total reward times a factor that depends
//! only on who infiltrates it, so for fixed opponents a best response
//! maximises the total reward. Two-pool games use the closed-form rewards and
//! a single 1-D search; larger games run coordinate ascent over the player's
//! infiltration row.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{StrategyProfile, ValidatedGame, FEASIBILITY_SLACK};
use crate::instances::{random_profile, sample_budget_simplex};
use crate::par;
use crate::scalar::{maximize, ScalarSearch};
use crate::two_pool::{CaseLabel, ClaimReport, CornerReport, Player, TwoPoolGame, CASE_TOL};

/// Regret below which a profile is certified as an equilibrium.
pub const CERT_EPS: f64 = 1e-8;
/// Best-response dynamics stop once successive profiles are this close.
pub const DYNAMICS_TOL: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 256;
/// Coordinate ascent stops when a sweep gains less than this.
pub const SWEEP_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 200;
/// Slack on the zero-profile reward and utility bounds.
pub const THEOREM1_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BestResponseMethod {
    GridRefine,
    CoordinateAscent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponseResult {
    pub player: usize,
    /// The player's infiltration row (zero on the diagonal).
    pub strategy: Vec<f64>,
    /// Utility at the best response.
    pub value: f64,
    pub method: BestResponseMethod,
    /// Objective evaluations (grid refine) or sweeps (coordinate ascent).
    pub iterations: usize,
}

fn check_player(game: &ValidatedGame, player: usize) -> Result<()> {
    if player >= game.n() {
        return Err(Error::Domain {
            what: "player index",
            value: player as f64,
            lo: 0.0,
            hi: (game.n() - 1) as f64,
        });
    }
    Ok(())
}

fn pair(p: Player, own: f64, other: f64) -> (f64, f64) {
    match p {
        Player::One => (own, other),
        Player::Two => (other, own),
    }
}

fn two_pool_coords(x: &StrategyProfile) -> (f64, f64) {
    (x.get(0, 1), x.get(1, 0))
}

/// Two-pool best response of `p` against the opponent's current strategy.
/// Returns `(x_p, utility, evaluations)`.
pub fn best_response_2pool(g: &TwoPoolGame, x1: f64, x2: f64, p: Player) -> (f64, f64, usize) {
    let (incumbent, xt) = pair(p, x1, x2);
    let own = g.power(p);
    let m = g.total_power();
    let hi = if own + xt < m { own } else { (m - xt) * (1.0 - 1e-12) };
    let reward = |t: f64| {
        let (a, b) = pair(p, t, xt);
        g.reward_unchecked(p, a, b)
    };
    let slope = |t: f64| {
        let (a, b) = pair(p, t, xt);
        g.reward_slope_unchecked(a, b, p)
    };
    let mut best = maximize(reward, Some(slope), 0.0, hi, ScalarSearch::default());
    let at_incumbent = reward(incumbent.min(hi));
    if at_incumbent > best.value {
        best.x = incumbent.min(hi);
        best.value = at_incumbent;
    }
    let coef = g.utility_coefficient(p, xt);
    (best.x, coef * best.value, best.evaluations + 1)
}

pub fn best_response(game: &ValidatedGame, x: &StrategyProfile, player: usize) -> Result<BestResponseResult> {
    game.check_strategy(x)?;
    check_player(game, player)?;
    if game.n() == 2 {
        let g = TwoPoolGame::from_game(game)?;
        let (x1, x2) = two_pool_coords(x);
        let p = Player::from_index(player).expect("two pools");
        let (xp, value, evaluations) = best_response_2pool(&g, x1, x2, p);
        let mut strategy = vec![0.0; 2];
        strategy[1 - player] = xp;
        return Ok(BestResponseResult {
            player,
            strategy,
            value,
            method: BestResponseMethod::GridRefine,
            iterations: evaluations,
        });
    }
    coordinate_ascent(game, x, player)
}

fn reward_of(game: &ValidatedGame, x: &StrategyProfile, i: usize) -> f64 {
    match game.rewards_unchecked(x) {
        Ok(r) => r[i],
        Err(_) => f64::NEG_INFINITY,
    }
}

/// One ascent run from `start`; returns `(row, reward, sweeps, converged)`.
fn ascend(game: &ValidatedGame, x: &StrategyProfile, i: usize, start: &[f64]) -> (Vec<f64>, f64, usize, bool) {
    let n = game.n();
    let m = game.total_power();
    let budget = game.pool_power(i);
    let others_total = x.total() - x.outgoing(i);
    let mut p = x.clone();
    p.set_row(i, start);
    let mut value = reward_of(game, &p, i);
    let search = ScalarSearch::default();
    let targets: Vec<usize> = (0..n).filter(|&j| j != i).collect();

    let line = |p: &mut StrategyProfile, value: &mut f64, dir: &[(usize, f64)], lo: f64, hi: f64| {
        if hi - lo <= 0.0 {
            return;
        }
        let base: Vec<(usize, f64)> = dir.iter().map(|&(j, _)| (j, p.get(i, j))).collect();
        let at = |t: f64| {
            let mut q = p.clone();
            for (&(j, s), &(_, b)) in dir.iter().zip(&base) {
                q.set(i, j, (b + s * t).max(0.0));
            }
            q
        };
        let f = |t: f64| reward_of(game, &at(t), i);
        let df = |t: f64| {
            let q = at(t);
            match game.reward_gradient_unchecked(&q, i, dir[0].0) {
                Ok(g0) => {
                    let mut d = dir[0].1 * g0[i];
                    for &(j, s) in &dir[1..] {
                        d += s * game.reward_gradient_unchecked(&q, i, j).map_or(0.0, |g| g[i]);
                    }
                    d
                }
                Err(_) => 0.0,
            }
        };
        let res = maximize(f, Some(df), lo, hi, search);
        if res.value > *value {
            *p = at(res.x);
            *value = res.value;
        }
    };

    for sweep in 1..=MAX_SWEEPS {
        let before = value;
        for &j in &targets {
            let current = p.get(i, j);
            let rest = p.outgoing(i) - current;
            let room = (m - others_total - rest) * (1.0 - 1e-9);
            let cap = (budget - rest).min(room).max(0.0);
            line(&mut p, &mut value, &[(j, 1.0)], -current, cap - current);
        }
        for (a, &j) in targets.iter().enumerate() {
            for &k in &targets[a + 1..] {
                // move power from k to j
                let (vj, vk) = (p.get(i, j), p.get(i, k));
                line(&mut p, &mut value, &[(j, 1.0), (k, -1.0)], -vj, vk);
            }
        }
        if value - before < SWEEP_TOL {
            return (p.row(i).to_vec(), value, sweep, true);
        }
    }
    (p.row(i).to_vec(), value, MAX_SWEEPS, false)
}

fn coordinate_ascent(game: &ValidatedGame, x: &StrategyProfile, i: usize) -> Result<BestResponseResult> {
    let coef = game.utility_coefficients(x)[i];
    let zero = vec![0.0; game.n()];
    let from_incumbent = ascend(game, x, i, x.row(i));
    let from_zero = ascend(game, x, i, &zero);
    let (row, value, sweeps, converged) = if from_zero.1 > from_incumbent.1 {
        from_zero
    } else {
        from_incumbent
    };
    if !converged {
        return Err(Error::NoConvergence {
            player: i,
            sweeps,
            best_value: coef * value,
            best_strategy: row,
        });
    }
    Ok(BestResponseResult {
        player: i,
        strategy: row,
        value: coef * value,
        method: BestResponseMethod::CoordinateAscent,
        iterations: sweeps,
    })
}

/// Utilities, through the closed forms for two pools.
fn utilities(game: &ValidatedGame, x: &StrategyProfile) -> Result<Vec<f64>> {
    if game.n() == 2 {
        let g = TwoPoolGame::from_game(game)?;
        let (x1, x2) = two_pool_coords(x);
        let (u1, u2) = g.utilities(x1, x2)?;
        return Ok(vec![u1, u2]);
    }
    Ok(game.solve_rewards(x)?.utility)
}

/// Per-player best-response improvement, clamped at zero.
pub fn regrets(game: &ValidatedGame, x: &StrategyProfile) -> Result<Vec<f64>> {
    game.check_strategy(x)?;
    let u = utilities(game, x)?;
    (0..game.n())
        .map(|i| Ok((best_response(game, x, i)?.value - u[i]).max(0.0)))
        .collect()
}

pub fn regret(game: &ValidatedGame, x: &StrategyProfile) -> Result<f64> {
    Ok(regrets(game, x)?.into_iter().fold(0.0, f64::max))
}

pub fn is_nash(game: &ValidatedGame, x: &StrategyProfile, eps: f64) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(regret(game, x)? <= eps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DynamicsOutcome {
    Converged {
        iterations: usize,
        profile: StrategyProfile,
        regret: f64,
        certified: bool,
    },
    NotConverged {
        iterations: usize,
        last_step: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    /// Every iterate, starting with `x0`.
    pub trajectory: Vec<StrategyProfile>,
    pub outcome: DynamicsOutcome,
}

impl Dynamics {
    pub fn converged(&self) -> Option<&StrategyProfile> {
        match &self.outcome {
            DynamicsOutcome::Converged { profile, .. } => Some(profile),
            DynamicsOutcome::NotConverged { .. } => None,
        }
    }
}

/// All players' best responses to `x`, assembled into one profile. A
/// coordinate-ascent run that hits the sweep cap contributes its best iterate.
fn joint_best_response(game: &ValidatedGame, x: &StrategyProfile) -> Result<StrategyProfile> {
    let mut next = StrategyProfile::zeros(game.n());
    for i in 0..game.n() {
        let row = match best_response(game, x, i) {
            Ok(br) => br.strategy,
            Err(Error::NoConvergence { best_strategy, .. }) => best_strategy,
            Err(e) => return Err(e),
        };
        next.set_row(i, &row);
    }
    Ok(next)
}

/// Damped simultaneous best-response iteration `x <- (1 - d) x + d BR(x)`.
///
/// On convergence the undamped response to the last iterate is also tried,
/// and whichever of the two has the lower regret is reported; this lands
/// boundary equilibria exactly on the boundary.
pub fn br_dynamics(
    game: &ValidatedGame,
    x0: &StrategyProfile,
    damping: f64,
    max_iter: usize,
    eps: f64,
) -> Result<Dynamics> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::Domain {
            what: "damping",
            value: damping,
            lo: 0.0,
            hi: 1.0,
        });
    }
    game.check_strategy(x0)?;
    let mut trajectory = vec![x0.clone()];
    let mut x = x0.clone();
    let mut last_step = f64::INFINITY;
    for iteration in 1..=max_iter {
        let br = joint_best_response(game, &x)?;
        let mut next = x.scaled(1.0 - damping);
        for (e, b) in next.entries_mut().iter_mut().zip(br.entries()) {
            *e += damping * b;
        }
        last_step = next.distance(&x);
        trajectory.push(next.clone());
        x = next;
        if last_step <= DYNAMICS_TOL {
            let mut profile = x.clone();
            let mut r = regret(game, &profile)?;
            let snapped = joint_best_response(game, &x)?;
            if game.check_strategy(&snapped).is_ok() {
                let rs = regret(game, &snapped)?;
                if rs <= r {
                    profile = snapped;
                    r = rs;
                }
            }
            return Ok(Dynamics {
                trajectory,
                outcome: DynamicsOutcome::Converged {
                    iterations: iteration,
                    profile,
                    regret: r,
                    certified: r <= eps,
                },
            });
        }
    }
    Ok(Dynamics {
        trajectory,
        outcome: DynamicsOutcome::NotConverged {
            iterations: max_iter,
            last_step,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCandidate {
    pub profile: StrategyProfile,
    pub regret: f64,
    pub utilities: Vec<f64>,
    pub welfare: f64,
    /// Per-player case labels (two pools only).
    pub case_labels: Vec<CaseLabel>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    /// Certified equilibria, sorted by profile coordinates.
    pub candidates: Vec<EquilibriumCandidate>,
    /// Converged but uncertified fixed points; excluded from PoA/PoS.
    pub approximate: Vec<EquilibriumCandidate>,
    pub poa: Option<f64>,
    pub pos: Option<f64>,
    pub optimum_welfare: f64,
    pub eps: f64,
    pub notes: Vec<String>,
}

impl EquilibriumReport {
    pub fn certified(&self) -> &[EquilibriumCandidate] {
        &self.candidates
    }

    /// Exactly one certified equilibrium, and it is the zero profile within `tol`.
    pub fn unique_zero(&self, tol: f64) -> bool {
        self.candidates.len() == 1 && self.candidates[0].profile.entries().iter().all(|v| v.abs() <= tol)
    }
}

/// `(PoA, PoS) = (m / worst welfare, m / best welfare)` over certified candidates.
pub fn poa_pos(total_power: f64, candidates: &[EquilibriumCandidate]) -> Result<(f64, f64)> {
    let certified: Vec<f64> = candidates
        .iter()
        .filter(|c| c.certified)
        .map(|c| total_power - c.profile.total())
        .collect();
    if certified.is_empty() {
        return Err(Error::NoCertifiedEquilibrium);
    }
    let worst = certified.iter().copied().fold(f64::INFINITY, f64::min);
    let best = certified.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((total_power / worst, total_power / best))
}

fn profile_order(a: &StrategyProfile, b: &StrategyProfile) -> std::cmp::Ordering {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Sorts and merges candidates closer than `tol`, keeping the lower regret.
fn merge(mut found: Vec<EquilibriumCandidate>, tol: f64) -> Vec<EquilibriumCandidate> {
    found.sort_by(|a, b| profile_order(&a.profile, &b.profile));
    let mut out: Vec<EquilibriumCandidate> = Vec::new();
    for c in found {
        match out.iter_mut().find(|o| o.profile.distance(&c.profile) <= tol) {
            Some(o) => {
                if c.regret < o.regret {
                    *o = c;
                }
            }
            None => out.push(c),
        }
    }
    out.sort_by(|a, b| profile_order(&a.profile, &b.profile));
    out
}

fn build_report(
    game: &ValidatedGame,
    found: Vec<EquilibriumCandidate>,
    merge_tol: f64,
    eps: f64,
    mut notes: Vec<String>,
) -> EquilibriumReport {
    let (certified, approximate): (Vec<_>, Vec<_>) = merge(found, merge_tol).into_iter().partition(|c| c.certified);
    let m = game.total_power();
    let (poa, pos) = match poa_pos(m, &certified) {
        Ok((a, s)) => (Some(a), Some(s)),
        Err(_) => {
            notes.push("no certified equilibrium found; PoA and PoS are undefined".into());
            (None, None)
        }
    };
    if !approximate.is_empty() {
        notes.push(format!(
            "{} converged profile(s) have regret above {eps:e} and are listed as approximate",
            approximate.len()
        ));
    }
    notes.push("welfare counts power outside the modelled pools".into());
    EquilibriumReport {
        candidates: certified,
        approximate,
        poa,
        pos,
        optimum_welfare: m,
        eps,
        notes,
    }
}

fn candidate(game: &ValidatedGame, profile: StrategyProfile, regret: f64, eps: f64) -> Result<EquilibriumCandidate> {
    let utilities = utilities(game, &profile)?;
    let case_labels = if game.n() == 2 {
        let g = TwoPoolGame::from_game(game)?;
        let (x1, x2) = two_pool_coords(&profile);
        Player::BOTH
            .iter()
            .map(|&p| g.classify_case(x1, x2, p, CASE_TOL))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(EquilibriumCandidate {
        welfare: game.total_power() - profile.total(),
        profile,
        regret,
        utilities,
        case_labels,
        certified: regret <= eps,
    })
}

/// Grid-seeded equilibrium enumeration for two pools.
///
/// Both players' best responses are computed on a `(grid_n + 1)^2` grid;
/// cells where both responses sit within one cell of the incumbent seed damped
/// best-response dynamics, whose limits are certified by regret.
pub fn enumerate_equilibria_2pool(g: &TwoPoolGame, grid_n: usize, eps: f64) -> Result<EquilibriumReport> {
    let grid_n = grid_n.max(1);
    let game = g.to_game();
    let (m1, m2) = (g.power(Player::One), g.power(Player::Two));
    let h1 = m1 / grid_n as f64;
    let h2 = m2 / grid_n as f64;
    let at = |k: usize, h: f64, cap: f64| if k == grid_n { cap } else { h * k as f64 };
    let idx: Vec<usize> = (0..=grid_n).collect();
    // player 1's response depends only on x2 and vice versa
    let br1 = par::map(&idx, |&l| best_response_2pool(g, 0.0, at(l, h2, m2), Player::One).0);
    let br2 = par::map(&idx, |&k| best_response_2pool(g, at(k, h1, m1), 0.0, Player::Two).0);

    let slack = 1.0 + 1e-9;
    let mut seeds = Vec::new();
    for l in 0..=grid_n {
        let x2 = at(l, h2, m2);
        for k in 0..=grid_n {
            let x1 = at(k, h1, m1);
            if (br1[l] - x1).abs() <= h1 * slack && (br2[k] - x2).abs() <= h2 * slack {
                seeds.push((x1, x2));
            }
        }
    }

    let runs = par::map(&seeds, |&(x1, x2)| {
        br_dynamics(&game, &StrategyProfile::two_pool(x1, x2), 0.5, 10_000, eps)
    });
    let mut found = Vec::new();
    let mut stalled = 0;
    for run in runs {
        match run?.outcome {
            DynamicsOutcome::Converged { profile, regret, .. } => found.push(candidate(&game, profile, regret, eps)?),
            DynamicsOutcome::NotConverged { .. } => stalled += 1,
        }
    }
    let mut notes = vec![format!("{} grid seed(s) refined", seeds.len())];
    if stalled > 0 {
        notes.push(format!("{stalled} seed(s) did not converge under damped dynamics"));
    }
    Ok(build_report(&game, found, 1e-6 * (m1 + m2), eps, notes))
}

/// Exploratory equilibrium search for any number of pools: damped dynamics
/// from the zero profile and `starts` random profiles. Nothing is claimed
/// about equilibria the starts miss.
pub fn explore_equilibria(
    game: &ValidatedGame,
    starts: usize,
    seed: u64,
    damping: f64,
    max_iter: usize,
    eps: f64,
) -> Result<EquilibriumReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inits = vec![StrategyProfile::zeros(game.n())];
    inits.extend((0..starts).map(|_| random_profile(&mut rng, game)));
    let runs = par::map(&inits, |x0| br_dynamics(game, x0, damping, max_iter, eps));
    let mut found = Vec::new();
    let mut stalled = 0;
    for run in runs {
        match run?.outcome {
            DynamicsOutcome::Converged { profile, regret, .. } => found.push(candidate(game, profile, regret, eps)?),
            DynamicsOutcome::NotConverged { .. } => stalled += 1,
        }
    }
    let mut notes = vec![format!("exploratory search from {} start(s); uniqueness is not certified", inits.len())];
    if stalled > 0 {
        notes.push(format!("{stalled} start(s) did not converge"));
    }
    let scale: f64 = game.pool_powers().iter().sum();
    Ok(build_report(game, found, 1e-6 * scale, eps, notes))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Theorem1Check {
    /// `r_i(x'_i, 0) <= m_i / m`.
    Reward,
    /// `U_i(x'_i, 0) <= m_i / m`.
    Utility,
    /// `(m_i - m)(m_j + x'_ij) + m m_j alpha_j <= 0` for the named target pool.
    InequalityTerm { target: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Violation {
    pub player: usize,
    pub deviation: Vec<f64>,
    pub check: Theorem1Check,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub n_pools: usize,
    pub seed: u64,
    pub deviations_checked: usize,
    pub inequality_terms_checked: usize,
    /// Largest `r_i - m_i/m` seen (negative when every deviation loses).
    pub max_reward_excess: f64,
    pub max_utility_excess: f64,
    pub violations: Vec<Theorem1Violation>,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Vertices of `{v >= 0, sum v <= budget}` and the midpoints of every pair.
fn simplex_landmarks(dims: usize, budget: f64) -> Vec<Vec<f64>> {
    let mut vertices = vec![vec![0.0; dims]];
    for j in 0..dims {
        let mut v = vec![0.0; dims];
        v[j] = budget;
        vertices.push(v);
    }
    let mut out = vertices.clone();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            out.push(vertices[a].iter().zip(&vertices[b]).map(|(p, q)| 0.5 * (p + q)).collect());
        }
    }
    out
}

/// Samples unilateral deviations from the zero profile and checks that none
/// beats honest mining, along with the per-pool inequality behind that bound.
///
/// Each player draws from its own ChaCha8 stream of `seed`, so the report is
/// identical whether players are checked serially or in parallel.
pub fn verify_theorem1(game: &ValidatedGame, n_samples: usize, seed: u64) -> Result<Theorem1Report> {
    if !game.preconditions().zero_profile_holds() {
        return Err(Error::PreconditionUnmet(format!(
            "alpha_i <= 1 - m_max/m = {} fails for some pool",
            game.zero_profile_alpha_bound()
        )));
    }
    let n = game.n();
    let m = game.total_power();
    let players: Vec<usize> = (0..n).collect();
    let per_player = par::map(&players, |&i| -> Result<_> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let budget = game.pool_power(i);
        let honest = budget / m;
        let mut deviations = simplex_landmarks(n - 1, budget);
        deviations.extend((0..n_samples).map(|_| sample_budget_simplex(&mut rng, n - 1, budget)));

        let mut violations = Vec::new();
        let (mut max_r, mut max_u) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut terms = 0;
        for dev in &deviations {
            let mut x = StrategyProfile::zeros(n);
            let mut row = vec![0.0; n];
            for (t, j) in (0..n).filter(|&j| j != i).enumerate() {
                row[j] = dev[t];
            }
            x.set_row(i, &row);
            let r = game.rewards_unchecked(&x)?[i];
            let u = game.utility_coefficients(&x)[i] * r;
            max_r = max_r.max(r - honest);
            max_u = max_u.max(u - honest);
            let bound = honest + THEOREM1_TOL;
            let witness = |check, value, bound| Theorem1Violation {
                player: i,
                deviation: row.clone(),
                check,
                value,
                bound,
            };
            if !(r <= bound) {
                violations.push(witness(Theorem1Check::Reward, r, bound));
            }
            if !(u <= bound) {
                violations.push(witness(Theorem1Check::Utility, u, bound));
            }
            for j in (0..n).filter(|&j| j != i) {
                let mj = game.pool_power(j);
                let term = (budget - m) * (mj + row[j]) + m * mj * game.alpha(j);
                let slack = 1e-12 * m * (mj + row[j]);
                terms += 1;
                if !(term <= slack) {
                    violations.push(witness(Theorem1Check::InequalityTerm { target: j }, term, slack));
                }
            }
        }
        Ok((deviations.len(), terms, max_r, max_u, violations))
    });

    let mut report = Theorem1Report {
        n_pools: n,
        seed,
        deviations_checked: 0,
        inequality_terms_checked: 0,
        max_reward_excess: f64::NEG_INFINITY,
        max_utility_excess: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for res in per_player {
        let (d, t, r, u, v) = res?;
        report.deviations_checked += d;
        report.inequality_terms_checked += t;
        report.max_reward_excess = report.max_reward_excess.max(r);
        report.max_utility_excess = report.max_utility_excess.max(u);
        report.violations.extend(v);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub equilibria: EquilibriumReport,
    pub corners: CornerReport,
    pub claims: ClaimReport,
    /// The only certified equilibrium is `(0, 0)` within `1e-6 (m1 + m2)`.
    pub unique_zero: bool,
}

impl Theorem2Report {
    pub fn passed(&self) -> bool {
        self.unique_zero
    }
}

/// Grid enumeration plus the corner and claim checks, for a game meeting the
/// two-pool uniqueness bounds.
pub fn verify_theorem2(g: &TwoPoolGame, grid_n: usize, eps: f64) -> Result<Theorem2Report> {
    if !g.conditions().holds() {
        return Err(Error::PreconditionUnmet(format!(
            "two-pool uniqueness bounds fail: {:?}",
            g.conditions()
        )));
    }
    let equilibria = enumerate_equilibria_2pool(g, grid_n, eps)?;
    let tol = 1e-6 * (g.power(Player::One) + g.power(Player::Two));
    Ok(Theorem2Report {
        unique_zero: equilibria.unique_zero(tol),
        corners: g.corner_case_check(),
        claims: g.claim_suite(1000)?,
        equilibria,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EyalReport {
    /// The classical game: both alphas set to 1.
    pub game: TwoPoolGame,
    pub zero_regret: f64,
    pub equilibria: EquilibriumReport,
    pub honest_utilities: [f64; 2],
    /// Every certified equilibrium leaves both pools strictly below `m_i / m`.
    pub all_below_honest: bool,
    /// Some certified equilibrium has both pools attacking.
    pub mutual_attack: bool,
}

impl EyalReport {
    pub fn passed(&self, min_zero_regret: f64) -> bool {
        self.zero_regret > min_zero_regret && !self.equilibria.candidates.is_empty() && self.all_below_honest
    }
}

/// Runs the same game with `alpha_1 = alpha_2 = 1`, where honest mining is
/// not an equilibrium.
pub fn eyal_contrast(g: &TwoPoolGame, grid_n: usize, eps: f64) -> Result<EyalReport> {
    let classical = g.with_alphas(1.0, 1.0)?;
    let game = classical.to_game();
    let zero_regret = regret(&game, &StrategyProfile::zeros(2))?;
    let equilibria = enumerate_equilibria_2pool(&classical, grid_n, eps)?;
    let m = g.total_power();
    let honest = [g.power(Player::One) / m, g.power(Player::Two) / m];
    let all_below_honest = equilibria
        .candidates
        .iter()
        .all(|c| c.utilities.iter().zip(&honest).all(|(u, h)| u < h));
    let mutual_attack = equilibria
        .candidates
        .iter()
        .any(|c| c.profile.get(0, 1) > FEASIBILITY_SLACK && c.profile.get(1, 0) > FEASIBILITY_SLACK);
    Ok(EyalReport {
        game: classical,
        zero_regret,
        equilibria,
        honest_utilities: honest,
        all_below_honest,
        mutual_attack,
    })
}

/// A seeded random feasible deviation row for `player`, used by dominance checks.
pub fn random_row<R: Rng + ?Sized>(rng: &mut R, game: &ValidatedGame, x: &StrategyProfile, player: usize) -> Vec<f64> {
    let n = game.n();
    let room = (game.total_power() - (x.total() - x.outgoing(player))) * (1.0 - 1e-9);
    let budget = game.pool_power(player).min(room);
    let v = sample_budget_simplex(rng, n - 1, budget);
    let mut row = vec![0.0; n];
    for (t, j) in (0..n).filter(|&j| j != player).enumerate() {
        row[j] = v[t];
    }
    row
}
