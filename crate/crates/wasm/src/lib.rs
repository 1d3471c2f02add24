//! Browser bindings for the two-pool game. Every export takes plain numbers
//! and returns a JSON string; failures come back as `{"error": "..."}`.

use dpbw_core::equilibrium::{best_response_2pool, enumerate_equilibria_2pool};
use dpbw_core::{Player, TwoPoolGame};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const DEMO_GRID: usize = 64;
const DEMO_EPS: f64 = 1e-8;

fn player(index: u32) -> Result<Player, String> {
    Player::from_index(index as usize).ok_or_else(|| format!("player must be 0 or 1, got {index}"))
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

#[derive(Serialize)]
pub struct Curve {
    pub x_own: Vec<f64>,
    pub reward: Vec<f64>,
    pub utility: Vec<f64>,
    /// Utility when both pools mine honestly.
    pub honest_utility: f64,
}

/// One pool's reward and utility as its infiltration sweeps `[0, m_p]` with
/// the rival fixed at `x_other`.
pub fn utility_curve(g: &TwoPoolGame, p: Player, x_other: f64, points: usize) -> Result<Curve, String> {
    let points = points.clamp(2, 2000);
    let own = g.power(p);
    let mut c = Curve {
        x_own: Vec::with_capacity(points),
        reward: Vec::with_capacity(points),
        utility: Vec::with_capacity(points),
        honest_utility: own / g.total_power(),
    };
    for k in 0..points {
        let t = own * k as f64 / (points - 1) as f64;
        let (x1, x2) = match p {
            Player::One => (t, x_other),
            Player::Two => (x_other, t),
        };
        let r = g.closed_form_rewards(x1, x2).map_err(|e| e.to_string())?;
        let u = g.utilities(x1, x2).map_err(|e| e.to_string())?;
        let i = p.index();
        c.x_own.push(t);
        c.reward.push([r.0, r.1][i]);
        c.utility.push([u.0, u.1][i]);
    }
    Ok(c)
}

#[derive(Serialize)]
pub struct ResponseMap {
    /// `x_1` values and pool 2's best response to each.
    pub x1: Vec<f64>,
    pub br2: Vec<f64>,
    /// `x_2` values and pool 1's best response to each.
    pub x2: Vec<f64>,
    pub br1: Vec<f64>,
    pub equilibria: Vec<[f64; 2]>,
    pub poa: Option<f64>,
}

/// Best-response curves of both pools plus the certified equilibria, where
/// the curves cross.
pub fn response_map(g: &TwoPoolGame, points: usize) -> Result<ResponseMap, String> {
    let points = points.clamp(2, 500);
    let grid = |m: f64| (0..points).map(move |k| m * k as f64 / (points - 1) as f64);
    let x1: Vec<f64> = grid(g.power(Player::One)).collect();
    let x2: Vec<f64> = grid(g.power(Player::Two)).collect();
    let br2 = x1.iter().map(|&a| best_response_2pool(g, a, 0.0, Player::Two).0).collect();
    let br1 = x2.iter().map(|&b| best_response_2pool(g, 0.0, b, Player::One).0).collect();
    let rep = enumerate_equilibria_2pool(g, DEMO_GRID, DEMO_EPS).map_err(|e| e.to_string())?;
    Ok(ResponseMap {
        x1,
        br2,
        x2,
        br1,
        equilibria: rep.candidates.iter().map(|c| [c.profile.get(0, 1), c.profile.get(1, 0)]).collect(),
        poa: rep.poa,
    })
}

#[derive(Serialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub equilibria: usize,
    pub poa: Option<f64>,
    /// Total infiltration at the worst equilibrium.
    pub withheld: Option<f64>,
    pub uniqueness_bounds_hold: bool,
}

/// Equilibria and PoA as both alphas move together over `[lo, hi]`.
pub fn alpha_sweep(m: f64, m1: f64, m2: f64, lo: f64, hi: f64, steps: usize) -> Result<Vec<SweepPoint>, String> {
    let steps = steps.clamp(2, 200);
    if !(lo <= hi) {
        return Err(format!("empty alpha range [{lo}, {hi}]"));
    }
    (0..steps)
        .map(|k| {
            let alpha = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
            let g = TwoPoolGame::new(m, m1, m2, alpha, alpha).map_err(|e| e.to_string())?;
            let rep = enumerate_equilibria_2pool(&g, DEMO_GRID, DEMO_EPS).map_err(|e| e.to_string())?;
            let worst = rep.candidates.iter().min_by(|a, b| a.welfare.total_cmp(&b.welfare));
            Ok(SweepPoint {
                alpha,
                equilibria: rep.candidates.len(),
                poa: rep.poa,
                withheld: worst.map(|c| c.profile.total()),
                uniqueness_bounds_hold: g.conditions().holds(),
            })
        })
        .collect()
}

fn game(m: f64, m1: f64, m2: f64, a1: f64, a2: f64) -> Result<TwoPoolGame, String> {
    TwoPoolGame::new(m, m1, m2, a1, a2).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = utilityCurve)]
#[allow(clippy::too_many_arguments)]
pub fn utility_curve_js(m: f64, m1: f64, m2: f64, a1: f64, a2: f64, pool: u32, x_other: f64, points: u32) -> String {
    to_json(game(m, m1, m2, a1, a2).and_then(|g| utility_curve(&g, player(pool)?, x_other, points as usize)))
}

#[wasm_bindgen(js_name = responseMap)]
pub fn response_map_js(m: f64, m1: f64, m2: f64, a1: f64, a2: f64, points: u32) -> String {
    to_json(game(m, m1, m2, a1, a2).and_then(|g| response_map(&g, points as usize)))
}

#[wasm_bindgen(js_name = alphaSweep)]
pub fn alpha_sweep_js(m: f64, m1: f64, m2: f64, lo: f64, hi: f64, steps: u32) -> String {
    to_json(alpha_sweep(m, m1, m2, lo, hi, steps as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gstar() -> TwoPoolGame {
        TwoPoolGame::new(18.0, 2.0, 3.0, 0.8, 0.8).unwrap()
    }

    #[test]
    fn honest_mining_tops_the_curve() {
        let c = utility_curve(&gstar(), Player::One, 0.0, 41).unwrap();
        assert_eq!(c.utility[0], c.honest_utility);
        assert!(c.utility[1..].iter().all(|&u| u < c.honest_utility));
    }

    #[test]
    fn response_curves_cross_at_zero() {
        let r = response_map(&gstar(), 11).unwrap();
        assert_eq!(r.br2[0], 0.0);
        assert_eq!(r.br1[0], 0.0);
        assert_eq!(r.equilibria, vec![[0.0, 0.0]]);
        assert_eq!(r.poa, Some(1.0));
    }

    #[test]
    fn sweep_shows_attacks_only_past_the_bound() {
        let pts = alpha_sweep(18.0, 2.0, 3.0, 0.5, 1.0, 6).unwrap();
        assert_eq!(pts.len(), 6);
        for p in &pts {
            if p.uniqueness_bounds_hold {
                assert_eq!(p.withheld, Some(0.0));
            }
        }
        assert!(pts.last().unwrap().withheld.unwrap() > 0.0);
    }

    #[test]
    fn errors_are_json() {
        let v: serde_json::Value = serde_json::from_str(&response_map_js(18.0, 2.0, 3.0, 1.5, 0.8, 5)).unwrap();
        assert!(v["error"].is_string());
        let v: serde_json::Value = serde_json::from_str(&utility_curve_js(18.0, 2.0, 3.0, 0.8, 0.8, 7, 0.0, 5)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("player"));
    }
}
