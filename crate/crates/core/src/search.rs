//! One-dimensional bracketing, golden-section refinement and bisection.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    /// True if `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Extremum::Max => a > b,
            Extremum::Min => a < b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Located {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for an extremum of a unimodal `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `tol` or after `max_evals`
/// evaluations. The best point seen is returned, including the interval ends.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, kind: Extremum, tol: f64, max_evals: usize) -> Located
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut evals = 0usize;
    let mut eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut best = Located {
        x: a,
        value: eval(a, &mut evals),
        evaluations: 0,
    };
    let fb = eval(b, &mut evals);
    if kind.better(fb, best.value) {
        best.x = b;
        best.value = fb;
    }

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evals);
    let mut fd = eval(d, &mut evals);

    while (b - a) > tol && evals < max_evals {
        if kind.better(fc, fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evals);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evals);
        }
    }

    for (x, v) in [(c, fc), (d, fd)] {
        if kind.better(v, best.value) {
            best.x = x;
            best.value = v;
        }
    }
    best.evaluations = evals;
    best
}

/// Root of `f` on `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect<F>(mut f: F, a: f64, b: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Evenly spaced grid including both ends.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        stop
                    } else {
                        start + (stop - start) * (i as f64 / last)
                    }
                })
                .collect()
        }
    }
}

/// Logarithmically spaced grid including both ends; both must be positive.
pub fn logspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let (la, lb) = (start.ln(), stop.ln());
    let mut v: Vec<f64> = linspace(la, lb, points).into_iter().map(f64::exp).collect();
    if let Some(first) = v.first_mut() {
        *first = start;
    }
    if let Some(last) = v.last_mut() {
        *last = stop;
    }
    v
}

/// Coarse scan plus golden-section refinement.
///
/// The coarse grid (`points` ≥ 201) must contain an interior extremum;
/// otherwise `NoBracket` is returned. The refined value is never worse than
/// the best coarse-grid value.
pub fn find_extremum<F>(mut f: F, lo: f64, hi: f64, points: usize, kind: Extremum, tol: f64) -> Result<Located>
where
    F: FnMut(f64) -> f64,
{
    let points = points.max(201);
    let grid = linspace(lo, hi, points);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if kind.better(v, values[best]) {
            best = i;
        }
    }
    if best == 0 || best == points - 1 {
        return Err(Error::NoBracket { lo, hi });
    }
    let refined = golden_section(&mut f, grid[best - 1], grid[best + 1], kind, tol, 10_000);
    let mut out = if kind.better(values[best], refined.value) {
        Located {
            x: grid[best],
            value: values[best],
            evaluations: 0,
        }
    } else {
        refined
    };
    out.evaluations = points + refined.evaluations;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let r = golden_section(|x| -(x - 0.3) * (x - 0.3), -1.0, 2.0, Extremum::Max, 1e-10, 1000);
        assert!((r.x - 0.3).abs() < 1e-8);
        // the flat vertex limits x to about sqrt(eps) relative to the offset
        let r = golden_section(|x| (x + 1.25).powi(2) + 2.0, -3.0, 0.0, Extremum::Min, 1e-10, 1000);
        assert!((r.x + 1.25).abs() < 1e-7);
        assert!((r.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_on_degenerate_interval() {
        let r = golden_section(|x| x * x, 0.5, 0.5, Extremum::Min, 1e-10, 100);
        assert_eq!(r.x, 0.5);
    }

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = linspace(-0.2, 0.2, 2001);
        assert_eq!(g[0], -0.2);
        assert_eq!(g[1000], 0.0);
        assert_eq!(g[2000], 0.2);
        let l = logspace(1e-4, 0.5, 200);
        assert_eq!(l[0], 1e-4);
        assert_eq!(l[199], 0.5);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn monotone_grid_has_no_bracket() {
        assert!(matches!(
            find_extremum(|x| x, 0.0, 1.0, 201, Extremum::Max, 1e-8),
            Err(Error::NoBracket { .. })
        ));
        assert!(matches!(
            find_extremum(|_| 0.0, 0.0, 1.0, 201, Extremum::Max, 1e-8),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn refined_beats_grid() {
        let f = |x: f64| (3.0 * x).sin();
        let r = find_extremum(f, 0.0, 1.0, 201, Extremum::Max, 1e-10).unwrap();
        let grid_best = linspace(0.0, 1.0, 201).into_iter().map(f).fold(f64::MIN, f64::max);
        assert!(r.value >= grid_best);
        assert!((r.x - std::f64::consts::FRAC_PI_6).abs() < 1e-7);
    }
}
