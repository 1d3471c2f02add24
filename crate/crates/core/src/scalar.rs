//! Bounded scalar maximisation: dense grid seed, golden-section refinement of
//! the bracketing cell, then an optional bisection on an exact derivative.

/// Golden ratio conjugate, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Settings for [`maximize`].
#[derive(Debug, Clone, Copy)]
pub struct ScalarSearch {
    /// Number of grid cells; `grid + 1` points are evaluated.
    pub grid: usize,
    /// Golden-section stops once the bracket is narrower than `rel_tol * (hi - lo)`.
    pub rel_tol: f64,
}

impl Default for ScalarSearch {
    fn default() -> Self {
        Self {
            grid: 1024,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximises `f` over `[lo, hi]`.
///
/// The grid argmax seeds a bracket `[x_{k-1}, x_{k+1}]` that golden-section
/// search narrows. When `df` is given and changes sign from positive to
/// negative across the bracket, the stationary point is also located by
/// bisection on `df`; that root is preferred whenever its value ties the best
/// candidate to rounding, which makes the maximiser a smooth function of the
/// problem data instead of jittering inside the flat top.
pub fn maximize<F, D>(f: F, df: Option<D>, lo: f64, hi: f64, search: ScalarSearch) -> ScalarMax
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    assert!(lo <= hi, "empty interval [{lo}, {hi}]");
    let mut evaluations = 0usize;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };
    if hi - lo <= 0.0 {
        let value = eval(lo);
        return ScalarMax {
            x: lo,
            value,
            evaluations,
        };
    }

    let cells = search.grid.max(2);
    let step = (hi - lo) / cells as f64;
    let point = |k: usize| if k == cells { hi } else { lo + step * k as f64 };
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..=cells {
        let v = eval(point(k));
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let mut candidates = vec![(point(best_k), best)];

    let mut a = point(best_k.saturating_sub(1));
    let mut b = point((best_k + 1).min(cells));
    let width = search.rel_tol * (hi - lo);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while b - a > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    let mid = 0.5 * (a + b);
    candidates.push((mid, eval(mid)));

    let mut root = None;
    if let Some(df) = df {
        let mut left = point(best_k.saturating_sub(1));
        let mut right = point((best_k + 1).min(cells));
        if df(left) > 0.0 && df(right) < 0.0 {
            for _ in 0..200 {
                let m = 0.5 * (left + right);
                if m <= left || m >= right {
                    break;
                }
                if df(m) > 0.0 {
                    left = m;
                } else {
                    right = m;
                }
            }
            let r = 0.5 * (left + right);
            let v = eval(r);
            candidates.push((r, v));
            root = Some((r, v));
        }
    }

    let (mut x, mut value) = candidates
        .iter()
        .copied()
        .fold((lo, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
    if let Some((r, v)) = root {
        if v >= value - 4.0 * f64::EPSILON * value.abs().max(1e-300) {
            x = r;
            value = v;
        }
    }
    ScalarMax {
        x,
        value,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type NoDerivative = fn(f64) -> f64;

    #[test]
    fn finds_interior_max_of_quadratic() {
        let res = maximize(
            |x| -(x - 0.3).powi(2),
            None::<NoDerivative>,
            0.0,
            1.0,
            ScalarSearch::default(),
        );
        assert!((res.x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn derivative_polish_is_exact() {
        let res = maximize(
            |x| -(x - 0.3).powi(2),
            Some(|x: f64| -2.0 * (x - 0.3)),
            0.0,
            1.0,
            ScalarSearch::default(),
        );
        assert!((res.x - 0.3).abs() < 1e-15);
    }

    #[test]
    fn boundary_max_is_exact_endpoint() {
        let res = maximize(|x| -x, None::<NoDerivative>, 0.0, 2.0, ScalarSearch::default());
        assert_eq!(res.x, 0.0);
        let res = maximize(|x| x, None::<NoDerivative>, 0.0, 2.0, ScalarSearch::default());
        assert_eq!(res.x, 2.0);
    }

    #[test]
    fn picks_global_of_bimodal() {
        let f = |x: f64| (-(x - 0.2).powi(2) * 200.0).exp() + 1.5 * (-(x - 0.8).powi(2) * 200.0).exp();
        let res = maximize(f, None::<NoDerivative>, 0.0, 1.0, ScalarSearch::default());
        assert!((res.x - 0.8).abs() < 1e-4);
    }

    #[test]
    fn degenerate_interval() {
        let res = maximize(|x| x, None::<NoDerivative>, 1.0, 1.0, ScalarSearch::default());
        assert_eq!(res.x, 1.0);
        assert_eq!(res.evaluations, 1);
    }
}
