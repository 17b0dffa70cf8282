//! Operating-point search over δ and Ω.

use serde::{Deserialize, Serialize};

use crate::doppler::{self, DopplerConfig};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::search::{self, Extremum};
use crate::sensitivity::{self, PhysicalConstants};

pub const MAX_EVALUATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    MaxFisher,
    MaxFisherH,
    MinMultiphotonS { temperature: f64, power_in: f64 },
}

impl Objective {
    fn kind(self) -> Extremum {
        match self {
            Objective::MinMultiphotonS { .. } => Extremum::Min,
            _ => Extremum::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeVariable {
    Delta,
    Omega,
}

impl FreeVariable {
    fn apply(self, p: &ModelParams, x: f64) -> ModelParams {
        match self {
            FreeVariable::Delta => p.with_delta(x),
            FreeVariable::Omega => p.with_omega(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub objective: Objective,
    pub free: Vec<FreeVariable>,
    pub argopt: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

/// Objective value at `p`.
pub fn objective_value(objective: Objective, p: &ModelParams, doppler: Option<&DopplerConfig>, c: &PhysicalConstants) -> Result<f64> {
    match objective {
        Objective::MaxFisher => Ok(doppler::fisher_with(p, doppler, c.gamma_si)?.f_total),
        Objective::MaxFisherH => Ok(doppler::fisher_with(p, doppler, c.gamma_si)?.f_h),
        Objective::MinMultiphotonS { temperature, power_in } => {
            sensitivity::multiphoton_s_at(p, doppler, c, temperature, power_in)
        }
    }
}

struct Tracker<'a> {
    objective: Objective,
    base: &'a ModelParams,
    free: &'a [FreeVariable],
    doppler: Option<&'a DopplerConfig>,
    constants: &'a PhysicalConstants,
    trace: Vec<TracePoint>,
    best: Option<TracePoint>,
}

impl Tracker<'_> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let mut p = *self.base;
        for (v, &xi) in self.free.iter().zip(x) {
            p = v.apply(&p, xi);
        }
        let value = objective_value(self.objective, &p, self.doppler, self.constants).unwrap_or(f64::NAN);
        let point = TracePoint { x: x.to_vec(), value };
        let better = match &self.best {
            None => value.is_finite(),
            Some(b) => self.objective.kind().better(value, b.value),
        };
        if better {
            self.best = Some(point.clone());
        }
        self.trace.push(point);
        value
    }

    fn exhausted(&self) -> bool {
        self.trace.len() >= MAX_EVALUATIONS
    }
}

/// Coarse grid then golden section along one coordinate. Returns the best x.
fn line_search(t: &mut Tracker, x: &mut [f64], axis: usize, (lo, hi): (f64, f64), grid_points: usize) -> f64 {
    if lo == hi {
        x[axis] = lo;
        return t.eval(x);
    }
    let kind = t.objective.kind();
    let grid = search::linspace(lo, hi, grid_points);
    let mut best = (0usize, f64::NAN);
    for (i, &g) in grid.iter().enumerate() {
        x[axis] = g;
        let v = t.eval(x);
        if best.1.is_nan() || kind.better(v, best.1) {
            best = (i, v);
        }
        if t.exhausted() {
            break;
        }
    }
    let a = grid[best.0.saturating_sub(1)];
    let b = grid[(best.0 + 1).min(grid.len() - 1)];
    let budget = MAX_EVALUATIONS.saturating_sub(t.trace.len());
    let mut scratch = x.to_vec();
    let refined = search::golden_section(
        |v| {
            scratch[axis] = v;
            t.eval(&scratch)
        },
        a,
        b,
        kind,
        1e-9 * (hi - lo),
        budget.min(200),
    );
    if best.1.is_nan() || kind.better(refined.value, best.1) {
        x[axis] = refined.x;
        refined.value
    } else {
        x[axis] = grid[best.0];
        best.1
    }
}

/// Golden section for one free variable, coordinate descent with three
/// restarts for two.
pub fn optimize_operating_point(
    objective: Objective,
    free: &[FreeVariable],
    bounds: &[(f64, f64)],
    base: &ModelParams,
    doppler: Option<&DopplerConfig>,
    c: &PhysicalConstants,
) -> Result<OptimizeReport> {
    if free.is_empty() || free.len() > 2 || free.len() != bounds.len() {
        return Err(Error::Config("need one or two free variables with matching bounds".into()));
    }
    if free.len() == 2 && free[0] == free[1] {
        return Err(Error::Config("free variables must differ".into()));
    }
    for &(lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("bad bounds [{lo}, {hi}]")));
        }
    }
    base.validate()?;

    let mut t = Tracker {
        objective,
        base,
        free,
        doppler,
        constants: c,
        trace: Vec::new(),
        best: None,
    };

    let mut converged = true;
    if free.len() == 1 {
        let mut x = vec![bounds[0].0];
        line_search(&mut t, &mut x, 0, bounds[0], 201);
        if t.exhausted() {
            converged = false;
        }
    } else {
        let starts = [0.5, 0.25, 0.75];
        for s in starts {
            let mut x: Vec<f64> = bounds.iter().map(|&(lo, hi)| lo + s * (hi - lo)).collect();
            let mut current = t.eval(&x);
            let mut settled = false;
            for _cycle in 0..20 {
                let before = current;
                for (axis, &range) in bounds.iter().enumerate() {
                    current = line_search(&mut t, &mut x, axis, range, 21);
                    if t.exhausted() {
                        break;
                    }
                }
                if t.exhausted() {
                    break;
                }
                if (current - before).abs() <= 1e-10 * before.abs().max(1e-300) {
                    settled = true;
                    break;
                }
            }
            if !settled {
                converged = false;
            }
            if t.exhausted() {
                converged = false;
                break;
            }
        }
    }

    let best = t.best.clone().ok_or_else(|| Error::Degenerate("objective was never finite".into()))?;
    Ok(OptimizeReport {
        objective,
        free: free.to_vec(),
        argopt: best.x,
        value: best.value,
        evaluations: t.trace.len(),
        converged,
        trace: t.trace,
    })
}
