//! Parameter sweeps: one equilibrium search per parameter value.

use dpbw_core::equilibrium::{enumerate_equilibria_2pool, explore_equilibria, EquilibriumReport};
use dpbw_core::{GameConfig, TwoPoolGame, ValidatedGame};
use serde::Serialize;

use crate::report::{Cell, Csv};
use crate::CliError;

/// Columns before and after the flattened best-candidate profile. The
/// profile contributes `x_<i>_<j>` for every ordered pair `i != j`.
pub const SWEEP_FIXED_COLUMNS: (&[&str], &[&str]) = (
    &["param_value", "n_equilibria"],
    &[
        "regret",
        "welfare",
        "poa",
        "pos",
        "theorem1_bound_holds",
        "theorem2_precond_holds",
        "error",
    ],
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    /// Every pool's alpha at once.
    AlphaAll,
    Alpha(usize),
    TotalPower,
    PoolPower(usize),
}

impl SweepParam {
    pub fn parse(s: &str, n: usize) -> Result<Self, CliError> {
        let index = |rest: &str| -> Result<usize, CliError> {
            let k: usize = rest
                .parse()
                .map_err(|_| CliError::Usage(format!("bad pool index in --param {s}")))?;
            if k >= n {
                return Err(CliError::Usage(format!("--param {s}: pool index must be below {n}")));
            }
            Ok(k)
        };
        match s {
            "alpha" => Ok(Self::AlphaAll),
            "m" => Ok(Self::TotalPower),
            _ => {
                if let Some(rest) = s.strip_prefix("alpha_") {
                    Ok(Self::Alpha(index(rest)?))
                } else if let Some(rest) = s.strip_prefix("m_") {
                    Ok(Self::PoolPower(index(rest)?))
                } else {
                    Err(CliError::Usage(format!(
                        "unknown --param {s}; expected alpha, alpha_<k>, m or m_<k>"
                    )))
                }
            }
        }
    }

    fn apply(self, base: &GameConfig, v: f64) -> GameConfig {
        let mut c = base.clone();
        match self {
            Self::AlphaAll => c.alphas.iter_mut().for_each(|a| *a = v),
            Self::Alpha(k) => c.alphas[k] = v,
            Self::TotalPower => c.total_power = v,
            Self::PoolPower(k) => c.pool_powers[k] = v,
        }
        c
    }
}

/// Values of `start:stop:step`, stop inclusive up to rounding.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("invalid range {s:?}: {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if !(a.is_finite() && b.is_finite() && step.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if b < a {
        return Err(bad("stop is below start"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(bad("more than 100000 values"));
    }
    // snap away accumulated binary noise such as 0.6500000000000001
    let snap = |v: f64| (v * 1e12).round() / 1e12;
    Ok((0..count).map(|k| snap(a + step * k as f64)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param_value: f64,
    pub n_equilibria: usize,
    /// Best (highest-welfare) certified candidate, row-major off-diagonal entries.
    pub best_profile: Option<Vec<f64>>,
    pub regret: Option<f64>,
    pub welfare: Option<f64>,
    pub poa: Option<f64>,
    pub pos: Option<f64>,
    pub theorem1_bound_holds: Option<bool>,
    pub theorem2_precond_holds: Option<bool>,
    pub error: Option<String>,
}

pub struct SweepSettings {
    pub grid: usize,
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
}

fn search(game: &ValidatedGame, s: &SweepSettings) -> dpbw_core::Result<EquilibriumReport> {
    if game.n() == 2 {
        enumerate_equilibria_2pool(&TwoPoolGame::from_game(game)?, s.grid, s.tol)
    } else {
        explore_equilibria(game, s.starts, s.seed, 0.5, 10_000, s.tol)
    }
}

fn off_diagonal(x: &dpbw_core::StrategyProfile) -> Vec<f64> {
    let n = x.n();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| x.get(i, j))
        .collect()
}

pub fn run_sweep(base: &GameConfig, param: SweepParam, values: &[f64], s: &SweepSettings) -> Vec<SweepRow> {
    values
        .iter()
        .map(|&v| {
            let mut row = SweepRow {
                param_value: v,
                n_equilibria: 0,
                best_profile: None,
                regret: None,
                welfare: None,
                poa: None,
                pos: None,
                theorem1_bound_holds: None,
                theorem2_precond_holds: None,
                error: None,
            };
            let game = match param.apply(base, v).validate() {
                Ok(g) => g,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            row.theorem1_bound_holds = Some(game.preconditions().zero_profile_holds());
            row.theorem2_precond_holds = Some(game.preconditions().two_pool_holds());
            match search(&game, s) {
                Ok(rep) => {
                    row.n_equilibria = rep.candidates.len();
                    row.poa = rep.poa;
                    row.pos = rep.pos;
                    let best = rep
                        .candidates
                        .iter()
                        .fold(None::<&dpbw_core::equilibrium::EquilibriumCandidate>, |acc, c| match acc {
                            Some(b) if b.welfare >= c.welfare => Some(b),
                            _ => Some(c),
                        });
                    if let Some(b) = best {
                        row.best_profile = Some(off_diagonal(&b.profile));
                        row.regret = Some(b.regret);
                        row.welfare = Some(b.welfare);
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

pub fn header(n: usize) -> Vec<String> {
    let (front, back) = SWEEP_FIXED_COLUMNS;
    let mut cols: Vec<String> = front.iter().map(|s| s.to_string()).collect();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            cols.push(format!("x_{i}_{j}"));
        }
    }
    cols.extend(back.iter().map(|s| s.to_string()));
    cols
}

pub fn to_csv(n: usize, rows: &[SweepRow]) -> String {
    let cols = header(n);
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut csv = Csv::header(&refs);
    for r in rows {
        let mut cells: Vec<Cell> = vec![r.param_value.into(), r.n_equilibria.into()];
        match &r.best_profile {
            Some(p) => cells.extend(p.iter().map(|&v| Cell::from(v))),
            None => cells.extend((0..n * (n - 1)).map(|_| Cell::Empty)),
        }
        cells.push(r.regret.into());
        cells.push(r.welfare.into());
        cells.push(r.poa.into());
        cells.push(r.pos.into());
        for b in [r.theorem1_bound_holds, r.theorem2_precond_holds] {
            cells.push(b.map_or(Cell::Empty, Cell::Bool));
        }
        cells.push(r.error.as_deref().map_or(Cell::Empty, Cell::from));
        csv.row(cells);
    }
    csv.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let v = parse_range("0.50:0.85:0.05").unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v[3], 0.65);
        assert_eq!(*v.last().unwrap(), 0.85);
        assert_eq!(parse_range("1:1:1").unwrap(), vec![1.0]);
        for bad in ["0:1:0", "0:1:-1", "1:0:0.1", "0:1", "a:1:0.1", "0:inf:1"] {
            assert!(matches!(parse_range(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn params() {
        assert_eq!(SweepParam::parse("alpha", 2).unwrap(), SweepParam::AlphaAll);
        assert_eq!(SweepParam::parse("alpha_1", 2).unwrap(), SweepParam::Alpha(1));
        assert_eq!(SweepParam::parse("m_0", 2).unwrap(), SweepParam::PoolPower(0));
        assert!(SweepParam::parse("alpha_2", 2).is_err());
        assert!(SweepParam::parse("fee", 2).is_err());
    }

    #[test]
    fn two_pool_header() {
        assert_eq!(
            header(2).join(","),
            "param_value,n_equilibria,x_0_1,x_1_0,regret,welfare,poa,pos,\
             theorem1_bound_holds,theorem2_precond_holds,error"
        );
    }
}
