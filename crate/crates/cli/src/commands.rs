use std::fmt::Write as _;

use dpbw_core::equilibrium::{
    self, enumerate_equilibria_2pool, explore_equilibria, eyal_contrast, verify_theorem1, verify_theorem2,
    EquilibriumReport,
};
use dpbw_core::sim::{compare, simulate, AwardBase, SimConfig};
use dpbw_core::{StrategyProfile, TwoPoolGame, ValidatedGame};
use serde::Serialize;
use serde_json::json;

use crate::report::{fmt_num, Cell, Csv, RunReport};
use crate::scenario::{load_scenario, load_strategy, ScenarioFile, StrategyFile};
use crate::sweep::{self, SweepParam, SweepSettings};
use crate::{AwardBaseArg, Cli, CliError, Command, Format, Outcome, VerifyTarget};

const DEFAULT_SEED: u64 = 0;

struct Inputs {
    scenario: ScenarioFile,
    game: ValidatedGame,
    strategy: StrategyProfile,
    bytes: Vec<Vec<u8>>,
}

fn inputs(cli: &Cli) -> Result<Inputs, CliError> {
    let path = cli
        .common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let loaded = load_scenario(path)?;
    let game = loaded.value.game()?;
    let mut bytes = vec![loaded.bytes];
    let strategy = match &cli.common.strategy {
        Some(p) => {
            let s = load_strategy(p)?;
            bytes.push(s.bytes);
            s.value.profile(&game)?
        }
        None => match &loaded.value.strategy {
            Some(s) => s.profile(&game)?,
            None => StrategyProfile::zeros(game.n()),
        },
    };
    Ok(Inputs {
        scenario: loaded.value,
        game,
        strategy,
        bytes,
    })
}

struct Ctx<'a> {
    cli: &'a Cli,
    command: Vec<String>,
    inputs: Inputs,
}

impl Ctx<'_> {
    fn format(&self, default: Format) -> Format {
        self.cli.common.format.unwrap_or(default)
    }

    fn json_only(&self) -> Result<(), CliError> {
        if self.format(Format::Json) == Format::Csv {
            return Err(CliError::Usage("this command only writes json reports".into()));
        }
        Ok(())
    }

    fn seed(&self) -> u64 {
        self.cli.common.seed.unwrap_or(DEFAULT_SEED)
    }

    fn json<T: Serialize>(&self, seed: Option<u64>, results: T) -> Result<String, CliError> {
        let refs: Vec<&[u8]> = self.inputs.bytes.iter().map(Vec::as_slice).collect();
        RunReport::new(self.command.clone(), &refs, seed, results).to_json()
    }

    fn two_pool(&self) -> Result<TwoPoolGame, CliError> {
        TwoPoolGame::from_game(&self.inputs.game).map_err(|_| {
            CliError::Usage(format!(
                "this check needs a two-pool scenario, got {} pools",
                self.inputs.game.n()
            ))
        })
    }

    fn pool_name(&self, i: usize) -> String {
        self.inputs.scenario.pools[i].name.clone().unwrap_or_else(|| format!("pool {i}"))
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn dispatch(cli: &Cli, command: Vec<String>) -> Result<Outcome, CliError> {
    let ctx = Ctx {
        cli,
        command,
        inputs: inputs(cli)?,
    };
    match &cli.command {
        Command::Rewards => rewards(&ctx),
        Command::BestResponse { pool } => best_response(&ctx, *pool),
        Command::Equilibria { grid, tol, starts } => equilibria(&ctx, *grid, *tol, *starts),
        Command::Verify { target } => {
            ctx.json_only()?;
            match target {
                VerifyTarget::Theorem1 { samples } => theorem1(&ctx, *samples),
                VerifyTarget::Theorem2 { grid, tol, exploratory } => theorem2(&ctx, *grid, *tol, *exploratory),
                VerifyTarget::Claims { grid } => claims(&ctx, *grid),
                VerifyTarget::Corners => corners(&ctx),
                VerifyTarget::Eyal { grid, tol, min_regret } => eyal(&ctx, *grid, *tol, *min_regret),
            }
        }
        Command::Sweep {
            param,
            range,
            grid,
            tol,
            starts,
        } => sweep_cmd(&ctx, param, range, *grid, *tol, *starts),
        Command::Simulate {
            rounds,
            epochs,
            burn_in,
            award_base,
            k_sigma,
        } => simulate_cmd(&ctx, *rounds, *epochs, *burn_in, *award_base, *k_sigma),
    }
}

fn rewards(ctx: &Ctx) -> Result<Outcome, CliError> {
    let game = &ctx.inputs.game;
    let x = &ctx.inputs.strategy;
    let b = game.solve_rewards(x)?;
    let welfare = game.social_welfare(x)?;
    let mut summary = String::new();
    writeln!(summary, "{:<12} {:>12} {:>12} {:>12} {:>12}", "pool", "direct", "infiltration", "total", "utility").ok();
    for i in 0..game.n() {
        writeln!(
            summary,
            "{:<12} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            ctx.pool_name(i),
            b.direct[i],
            b.infiltration[i],
            b.total[i],
            b.utility[i]
        )
        .ok();
    }
    writeln!(summary, "social welfare {} (solver residual {:e})", fmt_num(welfare), b.solver_residual).ok();
    let report = match ctx.format(Format::Json) {
        Format::Json => ctx.json(
            None,
            json!({
                "strategy": StrategyFile::from_profile(x),
                "rewards": b,
                "social_welfare": welfare,
                "preconditions": game.preconditions(),
            }),
        )?,
        Format::Csv => {
            let mut csv = Csv::header(&["pool", "name", "direct", "infiltration", "total", "utility"]);
            for i in 0..game.n() {
                csv.row(vec![
                    i.into(),
                    ctx.pool_name(i).as_str().into(),
                    b.direct[i].into(),
                    b.infiltration[i].into(),
                    b.total[i].into(),
                    b.utility[i].into(),
                ]);
            }
            csv.finish()
        }
    };
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

fn best_response(ctx: &Ctx, pool: usize) -> Result<Outcome, CliError> {
    ctx.json_only()?;
    let game = &ctx.inputs.game;
    if pool >= game.n() {
        return Err(CliError::Usage(format!("--pool {pool}: the scenario has {} pools", game.n())));
    }
    let x = &ctx.inputs.strategy;
    let br = equilibrium::best_response(game, x, pool)?;
    let current = game.solve_rewards(x)?.utility[pool];
    let summary = format!(
        "best response of {}: row {:?}, utility {} (currently {}, gain {})\n",
        ctx.pool_name(pool),
        br.strategy,
        fmt_num(br.value),
        fmt_num(current),
        fmt_num((br.value - current).max(0.0)),
    );
    let report = ctx.json(None, json!({ "best_response": br, "current_utility": current }))?;
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

fn describe(rep: &EquilibriumReport) -> String {
    let mut s = String::new();
    writeln!(s, "{} certified equilibrium(s) at eps {:e}", rep.candidates.len(), rep.eps).ok();
    for c in &rep.candidates {
        writeln!(
            s,
            "  x = {:?}  regret {:e}  welfare {}  utilities {:?}",
            c.profile.rows(),
            c.regret,
            fmt_num(c.welfare),
            c.utilities
        )
        .ok();
    }
    if let (Some(poa), Some(pos)) = (rep.poa, rep.pos) {
        writeln!(s, "PoA {}  PoS {}", fmt_num(poa), fmt_num(pos)).ok();
    }
    for n in &rep.notes {
        writeln!(s, "note: {n}").ok();
    }
    s
}

fn equilibria(ctx: &Ctx, grid: usize, tol: f64, starts: usize) -> Result<Outcome, CliError> {
    let game = &ctx.inputs.game;
    let (rep, seed) = if game.n() == 2 {
        (enumerate_equilibria_2pool(&ctx.two_pool()?, grid, tol)?, None)
    } else {
        (explore_equilibria(game, starts, ctx.seed(), 0.5, 10_000, tol)?, Some(ctx.seed()))
    };
    let report = match ctx.format(Format::Json) {
        Format::Json => ctx.json(seed, &rep)?,
        Format::Csv => {
            let n = game.n();
            let mut cols = vec!["candidate".to_string(), "certified".into(), "regret".into(), "welfare".into()];
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    cols.push(format!("x_{i}_{j}"));
                }
            }
            cols.extend((0..n).map(|i| format!("u_{i}")));
            let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
            let mut csv = Csv::header(&refs);
            for (k, c) in rep.candidates.iter().chain(&rep.approximate).enumerate() {
                let mut cells: Vec<Cell> = vec![k.into(), c.certified.into(), c.regret.into(), c.welfare.into()];
                for i in 0..n {
                    for j in (0..n).filter(|&j| j != i) {
                        cells.push(c.profile.get(i, j).into());
                    }
                }
                cells.extend(c.utilities.iter().map(|&u| Cell::from(u)));
                csv.row(cells);
            }
            csv.finish()
        }
    };
    Ok(Outcome {
        summary: describe(&rep),
        report,
        passed: true,
    })
}

fn theorem1(ctx: &Ctx, samples: usize) -> Result<Outcome, CliError> {
    let seed = ctx.seed();
    let rep = verify_theorem1(&ctx.inputs.game, samples, seed)?;
    let summary = format!(
        "theorem1: {} ({} deviations, {} inequality terms, max reward excess {:e}, {} violation(s))\n",
        verdict(rep.passed()),
        rep.deviations_checked,
        rep.inequality_terms_checked,
        rep.max_reward_excess,
        rep.violations.len()
    );
    Ok(Outcome {
        summary,
        passed: rep.passed(),
        report: ctx.json(Some(seed), json!({ "passed": rep.passed(), "theorem1": rep }))?,
    })
}

fn theorem2(ctx: &Ctx, grid: usize, tol: f64, exploratory: bool) -> Result<Outcome, CliError> {
    let g = ctx.two_pool()?;
    if !g.conditions().holds() {
        if !exploratory {
            return Err(dpbw_core::Error::PreconditionUnmet(format!(
                "two-pool uniqueness bounds fail: {:?} (use --exploratory to run anyway)",
                g.conditions()
            ))
            .into());
        }
        let rep = enumerate_equilibria_2pool(&g, grid, tol)?;
        let corners = g.corner_case_check();
        let mut summary = format!("theorem2: preconditions fail ({:?}); exploratory run, not judged\n", g.conditions());
        summary.push_str(&describe(&rep));
        let report = ctx.json(
            None,
            json!({
                "exploratory": true,
                "conditions": g.conditions(),
                "equilibria": rep,
                "corners": corners,
            }),
        )?;
        return Ok(Outcome {
            summary,
            report,
            passed: true,
        });
    }
    let rep = verify_theorem2(&g, grid, tol)?;
    let mut summary = if rep.passed() {
        "theorem2: PASS - unique NE (0,0)\n".to_string()
    } else {
        "theorem2: FAIL - the zero profile is not the only certified equilibrium\n".to_string()
    };
    summary.push_str(&describe(&rep.equilibria));
    writeln!(
        summary,
        "corners non-equilibrium: {}; claim checks: {}",
        rep.corners.all_non_equilibrium,
        verdict(rep.claims.passed())
    )
    .ok();
    Ok(Outcome {
        summary,
        passed: rep.passed(),
        report: ctx.json(None, json!({ "passed": rep.passed(), "theorem2": rep }))?,
    })
}

fn claims(ctx: &Ctx, grid: usize) -> Result<Outcome, CliError> {
    let g = ctx.two_pool()?;
    let rep = g.claim_suite(grid)?;
    let mut summary = format!("claims: {} on a {}-point grid\n", verdict(rep.passed()), rep.grid_n + 1);
    for c in rep.checks() {
        writeln!(
            summary,
            "  {:<55} {:>8} checked, {} violation(s){}",
            c.statement,
            c.checked,
            c.violations.len(),
            if c.out_of_regime { " (out of regime)" } else { "" }
        )
        .ok();
    }
    writeln!(
        summary,
        "  interior-root bound: l = {} vs threshold {} -> {}",
        fmt_num(rep.lemma1.ell),
        fmt_num(rep.lemma1.threshold),
        rep.lemma1.contradiction_holds
    )
    .ok();
    // table-coefficient diagnostics at the zero profile, reported without judging
    let diagnostics: Vec<_> = dpbw_core::Player::BOTH
        .iter()
        .map(|&p| g.deviation_quadratic(0.0, 0.0, p))
        .collect::<Result<_, _>>()?;
    Ok(Outcome {
        summary,
        passed: rep.passed(),
        report: ctx.json(
            None,
            json!({ "passed": rep.passed(), "claims": rep, "quadratic_at_zero": diagnostics }),
        )?,
    })
}

fn corners(ctx: &Ctx) -> Result<Outcome, CliError> {
    let g = ctx.two_pool()?;
    let rep = g.corner_case_check();
    let mut summary = format!("corners: {}\n", verdict(rep.all_non_equilibrium));
    for c in &rep.corners {
        writeln!(
            summary,
            "  ({}, {}): utilities {:?}, profitable move {:?}",
            fmt_num(c.x1),
            fmt_num(c.x2),
            c.utilities,
            c.deviation.map(|d| (d.player, d.gain))
        )
        .ok();
    }
    Ok(Outcome {
        summary,
        passed: rep.all_non_equilibrium,
        report: ctx.json(None, json!({ "passed": rep.all_non_equilibrium, "corners": rep }))?,
    })
}

fn eyal(ctx: &Ctx, grid: usize, tol: f64, min_regret: f64) -> Result<Outcome, CliError> {
    let g = ctx.two_pool()?;
    let rep = eyal_contrast(&g, grid, tol)?;
    let passed = rep.passed(min_regret);
    let mut summary = format!(
        "eyal: {} - zero-profile regret {:e}, mutual attack {}, all equilibria below honest {}\n",
        verdict(passed),
        rep.zero_regret,
        rep.mutual_attack,
        rep.all_below_honest
    );
    summary.push_str(&describe(&rep.equilibria));
    Ok(Outcome {
        summary,
        passed,
        report: ctx.json(None, json!({ "passed": passed, "eyal": rep }))?,
    })
}

fn sweep_cmd(ctx: &Ctx, param: &str, range: &str, grid: usize, tol: f64, starts: usize) -> Result<Outcome, CliError> {
    let game = &ctx.inputs.game;
    let p = SweepParam::parse(param, game.n())?;
    let values = sweep::parse_range(range)?;
    let settings = SweepSettings {
        grid,
        tol,
        starts,
        seed: ctx.seed(),
    };
    let rows = sweep::run_sweep(game.config(), p, &values, &settings);
    let mut summary = format!("sweep over {param}: {} row(s)\n", rows.len());
    for r in &rows {
        match &r.error {
            Some(e) => writeln!(summary, "  {} -> error: {e}", fmt_num(r.param_value)),
            None => writeln!(
                summary,
                "  {} -> {} equilibrium(s), PoA {}, PoS {}",
                fmt_num(r.param_value),
                r.n_equilibria,
                r.poa.map_or("-".into(), fmt_num),
                r.pos.map_or("-".into(), fmt_num)
            ),
        }
        .ok();
    }
    let seed = (game.n() > 2).then(|| ctx.seed());
    let report = match ctx.format(Format::Csv) {
        Format::Csv => sweep::to_csv(game.n(), &rows),
        Format::Json => ctx.json(seed, json!({ "param": param, "rows": rows }))?,
    };
    Ok(Outcome {
        summary,
        report,
        passed: true,
    })
}

fn simulate_cmd(
    ctx: &Ctx,
    rounds: u64,
    epochs: usize,
    burn_in: usize,
    award_base: AwardBaseArg,
    k_sigma: f64,
) -> Result<Outcome, CliError> {
    let game = &ctx.inputs.game;
    let x = &ctx.inputs.strategy;
    let seed = ctx.seed();
    let cfg = SimConfig {
        award_base: match award_base {
            AwardBaseArg::Total => AwardBase::TotalRevenue,
            AwardBaseArg::Direct => AwardBase::DirectOnly,
        },
        ..SimConfig::new(rounds, epochs, burn_in, seed)
    };
    let res = simulate(game, x, &cfg)?;
    let analytic = game.solve_rewards(x)?;
    let cmp = compare(&res, &analytic, k_sigma)?;
    // the alternative award base is a sensitivity run, not an estimate of the analytic values
    let passed = !res.canonical() || cmp.passed;
    let mut summary = format!(
        "simulate: {} rounds measured of {}; comparison {}{}\n",
        res.rounds_measured,
        res.rounds_total,
        verdict(cmp.passed),
        if res.canonical() { "" } else { " (non-canonical award base, not judged)" }
    );
    for r in &cmp.rows {
        writeln!(
            summary,
            "  {:?} {:<10} empirical {:.6} analytic {:.6} (se {:.2e}) {}",
            r.quantity,
            ctx.pool_name(r.pool),
            r.empirical,
            r.analytic,
            r.std_err,
            verdict(r.passed)
        )
        .ok();
    }
    let report = match ctx.format(Format::Json) {
        Format::Json => ctx.json(
            Some(seed),
            json!({ "config": cfg, "canonical": res.canonical(), "comparison": cmp, "simulation": res }),
        )?,
        Format::Csv => {
            let mut csv = Csv::header(&["pool", "quantity", "empirical", "analytic", "std_err", "bound", "passed"]);
            for r in &cmp.rows {
                let q = match r.quantity {
                    dpbw_core::sim::Quantity::Reward => "r",
                    dpbw_core::sim::Quantity::Utility => "U",
                };
                csv.row(vec![
                    r.pool.into(),
                    q.into(),
                    r.empirical.into(),
                    r.analytic.into(),
                    r.std_err.into(),
                    r.bound.into(),
                    r.passed.into(),
                ]);
            }
            csv.finish()
        }
    };
    Ok(Outcome {
        summary,
        report,
        passed,
    })
}
