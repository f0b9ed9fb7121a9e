//! Deterministic one-dimensional maximisation: a log-spaced scan followed by
//! golden-section refinement around the best scan point.

use crate::{Error, Result};

/// `n` points spaced evenly in `ln x` from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(Error::domain(
            "log_grid",
            format!("need 0 < lo <= hi and n >= 1 (lo = {lo}, hi = {hi}, n = {n})"),
        ));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    out[0] = lo;
    out[n - 1] = hi;
    Ok(out)
}

/// Settings for [`maximise_log`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSearch {
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
    /// Refinement stops once the bracket is narrower than `rel_tol` in `ln x`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl LogSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(Error::domain(
                "LogSearch",
                format!("invalid bracket [{}, {}]", self.lo, self.hi),
            ));
        }
        if self.grid_points < 3 || !(self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::domain(
                "LogSearch",
                format!(
                    "need grid_points >= 3, rel_tol > 0, max_iter >= 1 (got {}, {}, {})",
                    self.grid_points, self.rel_tol, self.max_iter
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    /// Best argument found, `None` when every evaluation was rejected.
    pub x: Option<f64>,
    pub value: Option<f64>,
    pub evaluations: usize,
    /// Final refinement bracket.
    pub bracket: (f64, f64),
}

/// Maximise `f` over `[search.lo, search.hi]`. `f` returns `None` for points
/// that should be ignored (infeasible or failed evaluations).
///
/// The result is never worse than the best scan point.
pub fn maximise_log<F>(search: &LogSearch, mut f: F) -> Result<Maximum>
where
    F: FnMut(f64) -> Option<f64>,
{
    search.validate()?;
    let grid = log_grid(search.lo, search.hi, search.grid_points)?;
    let mut evaluations = 0;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x).filter(|v| !v.is_nan()).unwrap_or(f64::NEG_INFINITY)
    };
    let values: Vec<f64> = grid.iter().map(|&x| eval(x)).collect();
    let (best_i, &best_v) = values
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &f64)>, (i, v)| match acc {
            Some((_, bv)) if *bv >= *v => acc,
            _ => Some((i, v)),
        })
        .expect("grid is non-empty");
    if best_v == f64::NEG_INFINITY {
        return Ok(Maximum {
            x: None,
            value: None,
            evaluations,
            bracket: (search.lo, search.hi),
        });
    }

    let lo_i = best_i.saturating_sub(1);
    let hi_i = (best_i + 1).min(grid.len() - 1);
    let (mut a, mut b) = (grid[lo_i].ln(), grid[hi_i].ln());
    let mut best = (grid[best_i], best_v);

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1.exp());
    let mut f2 = eval(x2.exp());
    for _ in 0..search.max_iter {
        if b - a <= search.rel_tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1.exp());
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2.exp());
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v > best.1 {
                best = (x.exp(), v);
            }
        }
    }
    Ok(Maximum {
        x: Some(best.0),
        value: Some(best.1),
        evaluations,
        bracket: (a.exp(), b.exp()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn search() -> LogSearch {
        LogSearch {
            lo: 1.001,
            hi: 1e3,
            grid_points: 48,
            rel_tol: 1e-9,
            max_iter: 200,
        }
    }

    #[test]
    fn grid_endpoints_and_spacing() {
        let g = log_grid(0.01, 0.9, 50).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!((g[0], g[49]), (0.01, 0.9));
        let r = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
        assert_eq!(log_grid(2.0, 3.0, 1).unwrap(), vec![2.0]);
        assert!(log_grid(0.0, 1.0, 5).is_err());
        assert!(log_grid(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn finds_smooth_peak() {
        let m = maximise_log(&search(), |x| Some(-(x.ln() - 3.0_f64.ln()).powi(2))).unwrap();
        assert!((m.x.unwrap() / 3.0 - 1.0).abs() < 1e-4);
        assert!(m.value.unwrap() <= 0.0 && m.value.unwrap() > -1e-8);
    }

    #[test]
    fn boundary_maximum() {
        let m = maximise_log(&search(), |x| Some(-x)).unwrap();
        assert!((m.x.unwrap() - 1.001).abs() < 1e-6);
    }

    #[test]
    fn rejected_points_are_skipped() {
        let m = maximise_log(&search(), |x| if x > 50.0 { Some(1.0 / x) } else { None }).unwrap();
        assert!(m.x.unwrap() > 50.0 && m.x.unwrap() < 60.0);
        let none = maximise_log(&search(), |_| None).unwrap();
        assert_eq!((none.x, none.value), (None, None));
        assert_eq!(none.evaluations, 48);
    }

    #[test]
    fn never_worse_than_scan() {
        // two separated peaks, the narrow one higher
        let f = |x: f64| Some((-(x - 7.0).powi(2)).exp() + 2.0 * (-((x - 300.0) / 0.5).powi(2)).exp());
        let s = search();
        let grid_best = log_grid(s.lo, s.hi, s.grid_points)
            .unwrap()
            .into_iter()
            .map(|x| f(x).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let m = maximise_log(&s, f).unwrap();
        assert!(m.value.unwrap() >= grid_best);
    }

    #[test]
    fn invalid_search_rejected() {
        let mut s = search();
        s.grid_points = 2;
        assert!(maximise_log(&s, |x| Some(x)).is_err());
        let mut s = search();
        s.hi = 0.5;
        assert!(maximise_log(&s, |x| Some(x)).is_err());
    }
}
