//! Closed-form machinery for the two-pool game.
//!
//! With two pools the strategy profile collapses to `(x1, x2)`: pool 1 sends
//! `x1` into pool 2 and pool 2 sends `x2` into pool 1. The reward system has
//! an explicit solution, which drives every equilibrium decision made here.
//! The deviation quadratic coefficients (`A`, `B`, `C`) and the cleared
//! polynomial `Q = a x^2 + b x + c` are also implemented as published, but
//! only as diagnostics: the printed `B` disagrees in sign with the exact
//! reward slope on ordinary instances, and those disagreements are reported
//! rather than corrected.
//!
//! All formulas are written from the point of view of one player (`own`) and
//! the opponent (`other`); player 2's versions are the mirrored player-1
//! expressions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameConfig, StrategyProfile, TwoPoolConditions, ValidatedGame, FEASIBILITY_SLACK};

/// Step of the one-sided difference quotients, relative to the player's power.
pub const SLOPE_STEP: f64 = 1e-6;
/// Slopes within this band count as zero when classifying cases.
pub const CASE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn other(self) -> Self {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Zero-based pool index.
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Player::One),
            1 => Some(Player::Two),
            _ => None,
        }
    }
}

/// One player's perspective on the game constants.
#[derive(Debug, Clone, Copy)]
struct View {
    m: f64,
    own: f64,
    other: f64,
    a_own: f64,
    a_other: f64,
}

impl View {
    /// Closed-form total reward of `own` when it sends `xo` and receives `xt`.
    fn reward(&self, xo: f64, xt: f64) -> f64 {
        let View {
            m,
            own,
            other,
            a_own,
            a_other,
        } = *self;
        let num = (own + xt) * ((own - xo) * (other + xo) + a_other * xo * (other - xt));
        let den = (m - xo - xt) * ((own + xt) * (other + xo) - a_own * a_other * xo * xt);
        num / den
    }

    /// `(own + xt)(other + xo) - a_own a_other xo xt`, positive on the domain.
    fn coupling(&self, xo: f64, xt: f64) -> f64 {
        (self.own + xt) * (self.other + xo) - self.a_own * self.a_other * xo * xt
    }

    fn mirrored(&self) -> Self {
        Self {
            m: self.m,
            own: self.other,
            other: self.own,
            a_own: self.a_other,
            a_other: self.a_own,
        }
    }

    /// Exact `d r_own / d xo` by implicit differentiation of the 2x2 system.
    fn reward_slope(&self, xo: f64, xt: f64) -> f64 {
        let View {
            m,
            own,
            other,
            a_own,
            a_other,
        } = *self;
        let honest = m - xo - xt;
        let dr_own = (own - xo) / honest;
        let dr_other = (other - xt) / honest;
        let r_other = self.mirrored().reward(xt, xo);
        let m_ot = a_other * xo / (other + xo);
        let m_to = a_own * xt / (own + xt);
        let rhs_own = (dr_own - 1.0) / honest + a_other * other / ((other + xo) * (other + xo)) * r_other;
        let rhs_other = dr_other / honest;
        (rhs_own + m_ot * rhs_other) / (1.0 - m_ot * m_to)
    }

    fn utility_coefficient(&self, xt: f64) -> f64 {
        if xt == 0.0 {
            return 1.0;
        }
        1.0 - self.a_own + self.own * self.a_own / (self.own + xt)
    }

    fn printed_a(&self, xo: f64, xt: f64) -> f64 {
        let r = self.reward(xo, xt);
        -(self.own + xt) + r * (self.own + xt - self.a_own * self.a_other * xt)
    }

    fn printed_b(&self, xo: f64, xt: f64) -> f64 {
        let View {
            m,
            own,
            other,
            a_own,
            a_other,
        } = *self;
        let t1 = (own + xt) * (own - other - 2.0 * xo + a_other * (other - xt));
        let t2 = (own + other) * ((own - xo) * (other + xo) + a_other * xo * (other - xt)) / (m - xo - xt);
        let t3 = (own + xt - a_own * a_other * xt)
            * (own + xt)
            * ((own - xo) * (other + xo) + a_other * xt * (other - xt))
            / self.coupling(xo, xt);
        t1 + t2 + t3
    }

    fn q_coefficients(&self, xt: f64) -> (f64, f64, f64, f64) {
        let View {
            m,
            own,
            other,
            a_own,
            a_other,
        } = *self;
        let aa = a_own * a_other;
        let a = (-a_own * a_other * a_other * other + aa * m - aa * own - a_other * own + aa * other
            + a_other * other
            - m
            + 2.0 * own)
            * xt
            + (a_own * a_other * a_other - aa - a_other + 1.0) * xt * xt
            + a_other * other * own
            + own * own
            - m * own;
        let b = -2.0 * m * own * other
            + 2.0 * own * own * other
            + (-2.0 * m * other + 4.0 * own * other - 2.0 * aa * own * other) * xt
            + 2.0 * other * xt * xt;
        let c_rest = a_other * other * xt.powi(3)
            + (-m * a_other * other + a_other * own * other - aa * own * other + other * other
                - a_other * other * other)
                * xt
                * xt
            + (-m * a_other * own * other + m * aa * own * other - m * other * other
                + m * a_other * other * other
                + 2.0 * own * other * other
                - a_other * own * other * other)
                * xt;
        let c_const = -m * own * other * other + m * a_other * own * other * other;
        let c = c_rest + c_const + own * own * other * other;
        let c_printed = c_rest + c_const + own * other * other;
        (a, b, c, c_printed)
    }

    /// `(Q(own, xt) contributions 1 + 3) / (a_other own (other - xt))`.
    fn qbar(&self, xt: f64) -> f64 {
        let View {
            m,
            own,
            other,
            a_own,
            a_other,
        } = *self;
        let aa = a_own * a_other;
        2.0 * own * own + xt * (-m + other + aa * (m - xt) + xt) + own * (-m + other + (3.0 - 2.0 * aa) * xt)
    }
}

/// Validated two-pool game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPoolGame {
    m: f64,
    m1: f64,
    m2: f64,
    alpha1: f64,
    alpha2: f64,
}

impl TwoPoolGame {
    pub fn new(m: f64, m1: f64, m2: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        GameConfig::new(m, vec![m1, m2], vec![alpha1, alpha2]).validate()?;
        Ok(Self {
            m,
            m1,
            m2,
            alpha1,
            alpha2,
        })
    }

    pub fn from_game(game: &ValidatedGame) -> Result<Self> {
        if game.n() != 2 {
            return Err(Error::DimensionMismatch {
                what: "pools in a two-pool game",
                expected: 2,
                got: game.n(),
            });
        }
        Ok(Self {
            m: game.total_power(),
            m1: game.pool_power(0),
            m2: game.pool_power(1),
            alpha1: game.alpha(0),
            alpha2: game.alpha(1),
        })
    }

    pub fn to_game(&self) -> ValidatedGame {
        GameConfig::new(self.m, vec![self.m1, self.m2], vec![self.alpha1, self.alpha2])
            .validate()
            .expect("two-pool game was validated on construction")
    }

    pub fn total_power(&self) -> f64 {
        self.m
    }

    pub fn power(&self, p: Player) -> f64 {
        match p {
            Player::One => self.m1,
            Player::Two => self.m2,
        }
    }

    pub fn alpha(&self, p: Player) -> f64 {
        match p {
            Player::One => self.alpha1,
            Player::Two => self.alpha2,
        }
    }

    /// `l` with `m = l (m1 + m2)`.
    pub fn ell(&self) -> f64 {
        self.m / (self.m1 + self.m2)
    }

    pub fn conditions(&self) -> TwoPoolConditions {
        TwoPoolConditions::evaluate(self.m, self.m1, self.m2, self.alpha1, self.alpha2)
    }

    pub fn with_alphas(&self, alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::new(self.m, self.m1, self.m2, alpha1, alpha2)
    }

    fn view(&self, p: Player) -> View {
        let v = View {
            m: self.m,
            own: self.m1,
            other: self.m2,
            a_own: self.alpha1,
            a_other: self.alpha2,
        };
        match p {
            Player::One => v,
            Player::Two => v.mirrored(),
        }
    }

    /// `(own, other)` coordinates of a profile.
    fn split(p: Player, x1: f64, x2: f64) -> (f64, f64) {
        match p {
            Player::One => (x1, x2),
            Player::Two => (x2, x1),
        }
    }

    fn join(p: Player, own: f64, other: f64) -> (f64, f64) {
        Self::split(p, own, other)
    }

    fn clamp_coordinate(what: &'static str, x: f64, cap: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 || x > cap * (1.0 + FEASIBILITY_SLACK) {
            return Err(Error::Domain {
                what,
                value: x,
                lo: 0.0,
                hi: cap,
            });
        }
        Ok(x.min(cap))
    }

    /// Validates `0 <= x1 <= m1`, `0 <= x2 <= m2`, `x1 + x2 < m`.
    pub fn check_profile(&self, x1: f64, x2: f64) -> Result<(f64, f64)> {
        let x1 = Self::clamp_coordinate("x1", x1, self.m1)?;
        let x2 = Self::clamp_coordinate("x2", x2, self.m2)?;
        if x1 + x2 >= self.m {
            return Err(Error::Domain {
                what: "x1 + x2",
                value: x1 + x2,
                lo: 0.0,
                hi: self.m,
            });
        }
        Ok((x1, x2))
    }

    /// Closed-form `(r1, r2)`.
    pub fn closed_form_rewards(&self, x1: f64, x2: f64) -> Result<(f64, f64)> {
        let (x1, x2) = self.check_profile(x1, x2)?;
        Ok(self.rewards_unchecked(x1, x2))
    }

    pub(crate) fn rewards_unchecked(&self, x1: f64, x2: f64) -> (f64, f64) {
        (
            self.view(Player::One).reward(x1, x2),
            self.view(Player::Two).reward(x2, x1),
        )
    }

    pub(crate) fn reward_unchecked(&self, p: Player, x1: f64, x2: f64) -> f64 {
        let (xo, xt) = Self::split(p, x1, x2);
        self.view(p).reward(xo, xt)
    }

    /// Utilities `(U1, U2)`.
    pub fn utilities(&self, x1: f64, x2: f64) -> Result<(f64, f64)> {
        let (x1, x2) = self.check_profile(x1, x2)?;
        let (r1, r2) = self.rewards_unchecked(x1, x2);
        Ok((
            self.view(Player::One).utility_coefficient(x2) * r1,
            self.view(Player::Two).utility_coefficient(x1) * r2,
        ))
    }

    /// The utility factor of player `p`; it depends on the opponent only.
    pub fn utility_coefficient(&self, p: Player, x_other: f64) -> f64 {
        self.view(p).utility_coefficient(x_other)
    }

    /// Exact `d r_p / d x_p` at `(x1, x2)`.
    pub fn reward_slope(&self, x1: f64, x2: f64, p: Player) -> Result<f64> {
        let (x1, x2) = self.check_profile(x1, x2)?;
        Ok(self.reward_slope_unchecked(x1, x2, p))
    }

    pub(crate) fn reward_slope_unchecked(&self, x1: f64, x2: f64, p: Player) -> f64 {
        let (xo, xt) = Self::split(p, x1, x2);
        self.view(p).reward_slope(xo, xt)
    }

    /// `f_p(delta) = r_p(x_p + delta, x_-p) - r_p(x)`, evaluated exactly.
    pub fn deviation_gain_exact(&self, x1: f64, x2: f64, p: Player, delta: f64) -> Result<f64> {
        let (x1, x2) = self.check_profile(x1, x2)?;
        let (xo, xt) = Self::split(p, x1, x2);
        let moved = xo + delta;
        let own = self.power(p);
        let moved = Self::clamp_coordinate("deviated strategy", moved, own)?;
        let (n1, n2) = Self::join(p, moved, xt);
        self.check_profile(n1, n2)?;
        let view = self.view(p);
        Ok(view.reward(moved, xt) - view.reward(xo, xt))
    }

    /// Published `A`, `B`, `C` for player `p`, with a sign-consistency
    /// diagnostic against the exact gain.
    pub fn deviation_quadratic(&self, x1: f64, x2: f64, p: Player) -> Result<DeviationQuadratic> {
        let (x1, x2) = self.check_profile(x1, x2)?;
        let (xo, xt) = Self::split(p, x1, x2);
        let view = self.view(p);
        let a = view.printed_a(xo, xt);
        let b = view.printed_b(xo, xt);
        let c = 0.0;
        let own = self.power(p);
        let exact_slope = view.reward_slope(xo, xt);

        const SAMPLES: usize = 32;
        let lo = -xo;
        let hi = own - xo;
        let mut mismatches = Vec::new();
        let mut compared = 0;
        for k in 0..=SAMPLES {
            let delta = lo + (hi - lo) * k as f64 / SAMPLES as f64;
            if delta.abs() <= 1e-12 * own {
                continue;
            }
            let Ok(exact) = self.deviation_gain_exact(x1, x2, p, delta) else {
                continue;
            };
            let quadratic = a * delta * delta + b * delta + c;
            compared += 1;
            if sign(quadratic, 1e-14) * sign(exact, 1e-14) < 0 {
                mismatches.push(DeltaSample {
                    delta,
                    quadratic,
                    exact,
                });
            }
        }
        Ok(DeviationQuadratic {
            a,
            b,
            c,
            player: p,
            x1,
            x2,
            diagnostic: QuadraticDiagnostic {
                exact_slope,
                slope_sign_consistent: sign(b, 0.0) == sign(exact_slope, 0.0),
                samples: compared,
                sign_mismatches: mismatches,
            },
        })
    }

    /// Coefficients of `Q_p` as a quadratic in the player's own infiltration.
    pub fn q_coefficients(&self, p: Player, x_other: f64) -> Result<QPolynomial> {
        let x_other = Self::clamp_coordinate("x_other", x_other, self.power(p.other()))?;
        let (a, b, c, c_as_printed) = self.view(p).q_coefficients(x_other);
        Ok(QPolynomial {
            a,
            b,
            c,
            c_as_printed,
            player: p,
            x_other,
        })
    }

    /// `Q_p` two ways: the expanded polynomial and the published `B` times
    /// the positive denominator-clearing factor.
    pub fn q_value(&self, x1: f64, x2: f64, p: Player) -> Result<QValue> {
        let (x1, x2) = self.check_profile(x1, x2)?;
        let (xo, xt) = Self::split(p, x1, x2);
        let view = self.view(p);
        let expanded = self.q_coefficients(p, xt)?.eval(xo);
        let b = view.printed_b(xo, xt);
        let honest = self.m - xo - xt;
        let aa = view.a_own * view.a_other;
        let cleared = b * honest * view.coupling(xo, xt) / (view.own + xt);
        let sum = view.own + view.other;
        let prose = b * honest * (sum * sum - aa * xo * xt) / (view.own + xt);
        Ok(QValue {
            expanded,
            cleared,
            cleared_prose_factor: prose,
            sign_consistent: cleared.abs() <= 1e-9 || sign(expanded, 0.0) == sign(cleared, 0.0),
        })
    }

    /// Published closed forms of `Q_p(m_p, 0)` and `Q_p(m_p, m_-p)`.
    pub fn printed_endpoint_forms(&self, p: Player) -> (f64, f64) {
        let View {
            m,
            own,
            other,
            a_own,
            a_other,
        } = self.view(p);
        let at_zero = a_other * own * own * other * (-m + 2.0 * own + other);
        let sum = own + other;
        let at_full = -sum * (m - sum) * (-a_own * a_other * own * other + sum * sum);
        (at_zero, at_full)
    }

    /// `Qbar_p(x_other)`, the positive-part bound used to rule out interior
    /// equilibria in which both players' `Q` vanish.
    pub fn qbar(&self, p: Player, x_other: f64) -> f64 {
        self.view(p).qbar(x_other)
    }

    /// Case label from one-sided difference quotients of the exact gain.
    pub fn classify_case(&self, x1: f64, x2: f64, p: Player, tol: f64) -> Result<CaseLabel> {
        let (x1, x2) = self.check_profile(x1, x2)?;
        let (xo, _) = Self::split(p, x1, x2);
        let own = self.power(p);
        let h = SLOPE_STEP * own;
        let gain = |d: f64| self.deviation_gain_exact(x1, x2, p, d);
        let (label, slope) = if xo <= FEASIBILITY_SLACK * own {
            let slope = gain(h)? / h;
            (if slope <= tol { Case::Case1 } else { Case::None }, slope)
        } else if xo >= own * (1.0 - FEASIBILITY_SLACK) {
            let slope = -gain(-h)? / h;
            (if slope >= -tol { Case::Case3 } else { Case::None }, slope)
        } else {
            let slope = if xo < h {
                gain(h)? / h
            } else if own - xo < h {
                -gain(-h)? / h
            } else {
                (gain(h)? - gain(-h)?) / (2.0 * h)
            };
            (if slope.abs() <= tol { Case::Case2 } else { Case::None }, slope)
        };
        Ok(CaseLabel {
            label,
            player: p,
            slope,
        })
    }

    /// Grid verification of the sign claims behind two-pool uniqueness.
    pub fn claim_suite(&self, grid_n: usize) -> Result<ClaimReport> {
        if !self.conditions().holds() {
            return Err(Error::PreconditionUnmet(format!(
                "two-pool uniqueness bounds fail: {:?}",
                self.conditions()
            )));
        }
        let grid_n = grid_n.max(2);
        let in_regime = self.alpha1 > 0.5 && self.alpha2 > 0.5 && self.m >= 2.0 * (self.m1 + self.m2);
        let mut claim1 = ClaimCheck::new("c(x_other) <= 0 on [0, m_other]");
        let mut claim2 = ClaimCheck::new("b(x_other) < 0 on [0, m_other]");
        let mut claim3 = ClaimCheck::new("a(x_other) <= 0 implies Q < 0 for interior x_own");
        claim1.out_of_regime = !in_regime;

        for p in Player::BOTH {
            let own = self.power(p);
            let other = self.power(p.other());
            for k in 0..=grid_n {
                let xt = other * k as f64 / grid_n as f64;
                let q = self.q_coefficients(p, xt)?;
                claim1.checked += 1;
                if q.c > 0.0 {
                    claim1.violations.push(ClaimViolation::new(p, xt, None, q.c));
                }
                claim2.checked += 1;
                if !(q.b < 0.0) {
                    claim2.violations.push(ClaimViolation::new(p, xt, None, q.b));
                }
                if k == 0 || k == grid_n || q.a > 0.0 {
                    continue;
                }
                for i in 1..grid_n {
                    let xo = own * i as f64 / grid_n as f64;
                    let v = q.eval(xo);
                    claim3.checked += 1;
                    if !(v < 0.0) {
                        claim3.violations.push(ClaimViolation::new(p, xt, Some(xo), v));
                    }
                }
            }
        }

        let mut lemma2 = ClaimCheck::new("Q(m_own, x_other) < 0 for x_other in {0, m_other}");
        let mut endpoints = Vec::new();
        for p in Player::BOTH {
            let own = self.power(p);
            let other = self.power(p.other());
            let (printed_zero, printed_full) = self.printed_endpoint_forms(p);
            for (xt, printed) in [(0.0, printed_zero), (other, printed_full)] {
                let q = self.q_coefficients(p, xt)?.eval(own);
                lemma2.checked += 1;
                if !(q < 0.0) {
                    lemma2.violations.push(ClaimViolation::new(p, xt, Some(own), q));
                }
                endpoints.push(EndpointValue {
                    player: p,
                    x_other: xt,
                    q_expanded: q,
                    printed_form: printed,
                });
            }
        }

        let aa = self.alpha1 * self.alpha2;
        let ell = self.ell();
        let qbar1 = self.qbar(Player::One, self.m2);
        let qbar2 = self.qbar(Player::Two, self.m1);
        let threshold = (4.0 - aa) / (2.0 - aa);
        let qbar_sum = qbar1 + qbar2;
        let lemma1 = Lemma1Check {
            qbar1_at_m2: qbar1,
            qbar2_at_m1: qbar2,
            qbar_sum,
            ell,
            threshold,
            contradiction_holds: ell >= threshold && qbar_sum <= 0.0,
        };

        let mut notes = vec![
            "the threshold on simultaneous interior roots is read as a bound on l = m / (m1 + m2)".to_string(),
            "c(x_other) uses the constant term m m_other^2 (alpha_other - 1) m_own + m_own^2 m_other^2; \
             the table's m_own m_other^2 variant is kept as c_as_printed"
                .to_string(),
        ];
        if !in_regime {
            notes.push("alpha <= 1/2: c <= 0 failures are out of regime, not claim failures".to_string());
        }
        Ok(ClaimReport {
            grid_n,
            in_regime,
            claim1,
            claim2,
            claim3,
            lemma2,
            endpoints,
            lemma1,
            notes,
        })
    }

    /// Evaluates the three all-or-nothing corner profiles and certifies each as
    /// a non-equilibrium by exhibiting a profitable move to zero.
    pub fn corner_case_check(&self) -> CornerReport {
        let honest = [self.m1 / self.m, self.m2 / self.m];
        let corners = [
            (0.0, self.m2, Some(Player::Two)),
            (self.m1, 0.0, Some(Player::One)),
            (self.m1, self.m2, None),
        ];
        let mut checks = Vec::new();
        for (x1, x2, lone_attacker) in corners {
            let utilities = match self.utilities(x1, x2) {
                Ok((u1, u2)) => [u1, u2],
                Err(_) => {
                    checks.push(CornerCheck::degenerate(x1, x2));
                    continue;
                }
            };
            let printed = lone_attacker.map(|p| {
                let v = self.view(p);
                (1.0 - v.a_other) * v.other * v.own / ((v.m - v.own) * (v.own + v.other))
            });
            let attacker_below_honest = match lone_attacker {
                Some(p) => utilities[p.index()] < honest[p.index()],
                None => utilities.iter().zip(&honest).all(|(u, h)| u < h),
            };
            let deviator = lone_attacker.unwrap_or(Player::One);
            let (d1, d2) = match deviator {
                Player::One => (0.0, x2),
                Player::Two => (x1, 0.0),
            };
            let deviation = self.utilities(d1, d2).ok().map(|(u1, u2)| {
                let after = [u1, u2][deviator.index()];
                CornerDeviation {
                    player: deviator,
                    to: 0.0,
                    gain: after - utilities[deviator.index()],
                }
            });
            let non_equilibrium = deviation.is_some_and(|d| d.gain > 0.0);
            checks.push(CornerCheck {
                x1,
                x2,
                utilities,
                honest_utilities: honest,
                lone_attacker,
                printed_attacker_utility: printed,
                attacker_below_honest,
                deviation,
                non_equilibrium,
            });
        }
        let all_non_equilibrium = checks.iter().all(|c| c.non_equilibrium);
        CornerReport {
            corners: checks,
            all_non_equilibrium,
        }
    }

    /// Two-pool profile as an infiltration matrix.
    pub fn profile(&self, x1: f64, x2: f64) -> StrategyProfile {
        StrategyProfile::two_pool(x1, x2)
    }
}

fn sign(v: f64, zero: f64) -> i8 {
    if v > zero {
        1
    } else if v < -zero {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSample {
    pub delta: f64,
    pub quadratic: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDiagnostic {
    /// Exact `d r / d x_own` at the profile.
    pub exact_slope: f64,
    /// Whether the printed `B` has the sign of the exact slope.
    pub slope_sign_consistent: bool,
    pub samples: usize,
    /// Deviations where `A d^2 + B d` and the exact gain disagree in sign.
    pub sign_mismatches: Vec<DeltaSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub player: Player,
    pub x1: f64,
    pub x2: f64,
    pub diagnostic: QuadraticDiagnostic,
}

impl DeviationQuadratic {
    pub fn is_consistent(&self) -> bool {
        self.diagnostic.slope_sign_consistent && self.diagnostic.sign_mismatches.is_empty()
    }
}

/// `Q_p(x_own) = a x_own^2 + b x_own + c` at a fixed opponent strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QPolynomial {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Constant term exactly as tabulated (with `m_own m_other^2`).
    pub c_as_printed: f64,
    pub player: Player,
    pub x_other: f64,
}

impl QPolynomial {
    pub fn eval(&self, x_own: f64) -> f64 {
        (self.a * x_own + self.b) * x_own + self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub expanded: f64,
    /// Printed `B` times `(m - x1 - x2)[(m_own + x_other)(m_other + x_own) - a1 a2 x1 x2] / (m_own + x_other)`.
    pub cleared: f64,
    /// Same with the `(m1 + m2)^2` factor as written in the prose.
    pub cleared_prose_factor: f64,
    pub sign_consistent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `x_own = 0`, reward non-increasing.
    Case1,
    /// Interior stationary point.
    Case2,
    /// `x_own = m_own`, reward non-decreasing.
    Case3,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub label: Case,
    pub player: Player,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimViolation {
    pub player: Player,
    pub x_other: f64,
    pub x_own: Option<f64>,
    pub value: f64,
}

impl ClaimViolation {
    fn new(player: Player, x_other: f64, x_own: Option<f64>, value: f64) -> Self {
        Self {
            player,
            x_other,
            x_own,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub statement: String,
    pub checked: usize,
    pub violations: Vec<ClaimViolation>,
    /// Set when the game is outside the regime the claim's argument needs.
    pub out_of_regime: bool,
}

impl ClaimCheck {
    fn new(statement: &str) -> Self {
        Self {
            statement: statement.to_string(),
            checked: 0,
            violations: Vec::new(),
            out_of_regime: false,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointValue {
    pub player: Player,
    pub x_other: f64,
    pub q_expanded: f64,
    pub printed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Check {
    pub qbar1_at_m2: f64,
    pub qbar2_at_m1: f64,
    pub qbar_sum: f64,
    pub ell: f64,
    /// `(4 - a1 a2) / (2 - a1 a2)`; simultaneous interior roots need `l` below it.
    pub threshold: f64,
    pub contradiction_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub grid_n: usize,
    pub in_regime: bool,
    pub claim1: ClaimCheck,
    pub claim2: ClaimCheck,
    pub claim3: ClaimCheck,
    pub lemma2: ClaimCheck,
    pub endpoints: Vec<EndpointValue>,
    pub lemma1: Lemma1Check,
    pub notes: Vec<String>,
}

impl ClaimReport {
    pub fn checks(&self) -> [&ClaimCheck; 4] {
        [&self.claim1, &self.claim2, &self.claim3, &self.lemma2]
    }

    /// Every in-regime check is clean and simultaneous interior roots are ruled out.
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.out_of_regime || c.passed()) && self.lemma1.contradiction_holds
    }

    pub fn violation_count(&self) -> usize {
        self.checks()
            .iter()
            .filter(|c| !c.out_of_regime)
            .map(|c| c.violations.len())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerDeviation {
    pub player: Player,
    pub to: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerCheck {
    pub x1: f64,
    pub x2: f64,
    pub utilities: [f64; 2],
    /// `m_i / m`, each pool's utility when nobody attacks.
    pub honest_utilities: [f64; 2],
    pub lone_attacker: Option<Player>,
    /// The published closed form for the lone attacker's utility.
    pub printed_attacker_utility: Option<f64>,
    pub attacker_below_honest: bool,
    pub deviation: Option<CornerDeviation>,
    pub non_equilibrium: bool,
}

impl CornerCheck {
    fn degenerate(x1: f64, x2: f64) -> Self {
        Self {
            x1,
            x2,
            utilities: [f64::NAN; 2],
            honest_utilities: [f64::NAN; 2],
            lone_attacker: None,
            printed_attacker_utility: None,
            attacker_below_honest: false,
            deviation: None,
            non_equilibrium: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    pub corners: Vec<CornerCheck>,
    pub all_non_equilibrium: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gstar() -> TwoPoolGame {
        TwoPoolGame::new(18.0, 2.0, 3.0, 0.8, 0.8).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn closed_form_examples() {
        let g = gstar();
        let (r1, r2) = g.closed_form_rewards(0.0, 0.0).unwrap();
        assert!(close(r1, 1.0 / 9.0, 1e-15) && close(r2, 1.0 / 6.0, 1e-15));
        let (r1, r2) = g.closed_form_rewards(1.0, 0.0).unwrap();
        assert!(close(r1, 1.6 / 17.0, 1e-15) && close(r2, 3.0 / 17.0, 1e-15));
        let (r1, r2) = g.closed_form_rewards(2.0, 3.0).unwrap();
        assert_eq!((r1, r2), (0.0, 0.0));
        assert!(g.closed_form_rewards(2.5, 0.0).is_err());
    }

    #[test]
    fn deviation_gain_examples() {
        let g = gstar();
        assert_eq!(g.deviation_gain_exact(0.7, 1.1, Player::Two, 0.0).unwrap(), 0.0);
        let gain = g.deviation_gain_exact(0.0, 0.0, Player::One, 1.0).unwrap();
        assert!(close(gain, 1.6 / 17.0 - 1.0 / 9.0, 1e-15));
        assert!(close(gain, -0.016993, 1e-6));
        assert!(g.deviation_gain_exact(0.0, 0.0, Player::One, 2.1).is_err());

        let eyal = g.with_alphas(1.0, 1.0).unwrap();
        let best = (1..=1000)
            .map(|k| eyal.deviation_gain_exact(0.0, 0.0, Player::One, 2.0 * k as f64 / 1000.0).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best > 0.0);
    }

    #[test]
    fn deviation_quadratic_examples() {
        let g = gstar();
        let q = g.deviation_quadratic(0.0, 0.0, Player::One).unwrap();
        assert_eq!(q.c, 0.0);
        assert!(close(q.a, -16.0 / 9.0, 1e-14));
        assert!(q.a <= 0.0);
        // printed B is positive at the origin while the reward is decreasing
        assert!(q.b > 0.0);
        assert!(q.diagnostic.exact_slope < 0.0);
        assert!(!q.diagnostic.slope_sign_consistent);
        assert!(!q.is_consistent());
    }

    #[test]
    fn q_coefficient_examples() {
        let g = gstar();
        let q = g.q_coefficients(Player::One, 0.0).unwrap();
        assert!(close(q.c, -28.8, 1e-12), "c = {}", q.c);
        assert!(close(q.b, -192.0, 1e-12));
        assert!(q.c <= 0.0 && q.b < 0.0);
        // tabulated constant m1 m2^2 instead of m1^2 m2^2
        assert!(close(q.c_as_printed, -46.8, 1e-12));
    }

    #[test]
    fn q_endpoints() {
        let g = gstar();
        // Q_1(m1, m2) = -(m1+m2)(m-m1-m2)((m1+m2)^2 - a1 a2 m1 m2) = -5 * 13 * 21.16
        let full = g.q_value(2.0, 3.0, Player::One).unwrap();
        assert!(close(full.expanded, -1375.4, 1e-9), "{}", full.expanded);
        assert!(close(full.cleared, -1375.4, 1e-9));
        let (printed_zero, printed_full) = g.printed_endpoint_forms(Player::One);
        assert!(close(printed_zero, -105.6, 1e-12));
        assert!(close(printed_full, -1375.4, 1e-9));
        // the published Q_1(m1, 0) form shares the sign of the polynomial, not its value
        let zero = g.q_value(2.0, 0.0, Player::One).unwrap();
        assert!(close(zero.expanded, -521.6, 1e-9), "{}", zero.expanded);
        assert!(zero.expanded < 0.0 && printed_zero < 0.0);
    }

    #[test]
    fn q_sign_disagreement_at_origin_is_flagged() {
        let g = gstar();
        let v = g.q_value(0.0, 0.0, Player::One).unwrap();
        assert!(v.expanded < 0.0 && v.cleared > 0.0);
        assert!(!v.sign_consistent);
    }

    #[test]
    fn q_times_positive_factor_is_exact_slope() {
        let g = TwoPoolGame::new(40.0, 3.0, 5.0, 0.7, 0.9).unwrap();
        for p in Player::BOTH {
            for &(x1, x2) in &[(0.0, 0.0), (1.0, 2.0), (2.9, 0.4), (0.3, 4.9)] {
                let (xo, xt) = TwoPoolGame::split(p, x1, x2);
                let v = g.view(p);
                let q = g.q_coefficients(p, xt).unwrap().eval(xo);
                let d = v.coupling(xo, xt);
                let h = g.total_power() - x1 - x2;
                let via_q = (v.own + xt) * q / (h * h * d * d);
                let slope = g.reward_slope(x1, x2, p).unwrap();
                assert!(close(via_q, slope, 1e-13 * slope.abs().max(1e-3)), "{p:?} {x1} {x2}");
            }
        }
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let g = TwoPoolGame::new(25.0, 2.0, 4.0, 0.6, 0.95).unwrap();
        for p in Player::BOTH {
            let (x1, x2) = (1.1, 2.3);
            let h = 1e-6;
            let fd = (g.deviation_gain_exact(x1, x2, p, h).unwrap()
                - g.deviation_gain_exact(x1, x2, p, -h).unwrap())
                / (2.0 * h);
            assert!(close(g.reward_slope(x1, x2, p).unwrap(), fd, 1e-9));
        }
    }

    #[test]
    fn classify_examples() {
        let g = gstar();
        let c = g.classify_case(0.0, 0.0, Player::One, 1e-8).unwrap();
        assert_eq!(c.label, Case::Case1);
        let c = g.classify_case(2.0, 0.0, Player::One, 1e-8).unwrap();
        assert_eq!(c.label, Case::None);
        assert!(c.slope < 0.0);

        // interior stationary point of the classical game
        let eyal = g.with_alphas(1.0, 1.0).unwrap();
        let root = {
            let (mut lo, mut hi) = (0.0, 2.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if eyal.reward_slope(mid, 0.0, Player::One).unwrap() > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        assert!(root > 0.0 && root < 2.0);
        let c = eyal.classify_case(root, 0.0, Player::One, 1e-8).unwrap();
        assert_eq!(c.label, Case::Case2);
    }

    #[test]
    fn claim_suite_on_gstar() {
        let report = gstar().claim_suite(1000).unwrap();
        assert!(report.in_regime);
        assert!(report.claim1.passed());
        assert!(report.claim2.passed());
        assert!(report.claim3.passed());
        assert!(report.lemma2.passed());
        assert!(report.lemma1.contradiction_holds);
        assert!(report.passed());
        assert_eq!(report.claim1.checked, 2 * 1001);
    }

    #[test]
    fn claim_suite_requires_preconditions() {
        let g = TwoPoolGame::new(12.5, 2.0, 3.0, 0.8, 0.8).unwrap();
        assert!(matches!(g.claim_suite(10), Err(Error::PreconditionUnmet(_))));
    }

    #[test]
    fn lemma1_threshold_near_boundary() {
        let g = TwoPoolGame::new(3.0001 * 5.0, 2.0, 3.0, 0.8, 0.8).unwrap();
        let r = g.claim_suite(50).unwrap();
        assert!(close(r.lemma1.threshold, (4.0 - 0.64) / 1.36, 1e-15));
        assert!(r.lemma1.threshold < r.lemma1.ell);
        assert!(r.lemma1.contradiction_holds);
    }

    #[test]
    fn corner_examples() {
        let g = gstar();
        let rep = g.corner_case_check();
        assert!(rep.all_non_equilibrium);
        let c = &rep.corners[0];
        assert_eq!((c.x1, c.x2), (0.0, 3.0));
        // pool 2's infiltrators collect alpha_1 of pool 1's revenue share
        assert!(close(c.utilities[1], 0.8 * 2.0 * 3.0 / (15.0 * 5.0), 1e-15));
        assert!(close(c.printed_attacker_utility.unwrap(), 0.016, 1e-15));
        assert!(c.utilities[1] < 3.0 / 18.0);
        let full = &rep.corners[2];
        assert_eq!(full.utilities, [0.0, 0.0]);
        let mirrored = &rep.corners[1];
        assert!(mirrored.utilities[0] < 2.0 / 18.0);
    }
}
