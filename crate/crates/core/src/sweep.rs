//! Deterministic one-axis parameter sweeps.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doppler::{self, DopplerConfig};
use crate::error::{Error, Result};
use crate::params::{ModelParams, VelocityClass};
use crate::response::response;
use crate::search::{self, Extremum, Located};
use crate::sensitivity::{zeeman_shift, PhysicalConstants};
use crate::stats::{self, OutcomeDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    G2n,
    Omega,
    Kappa,
    GammaPrime,
    DeltaP,
    DeltaD,
    DeltaC,
    Delta,
    /// Magnetic field in tesla, mapped to δ through the SI constants.
    B,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::G2n => "g2n",
            Axis::Omega => "omega",
            Axis::Kappa => "kappa",
            Axis::GammaPrime => "gamma_prime",
            Axis::DeltaP => "delta_p",
            Axis::DeltaD => "delta_d",
            Axis::DeltaC => "delta_c",
            Axis::Delta => "delta",
            Axis::B => "b",
        }
    }

    pub fn apply(self, base: &ModelParams, x: f64, c: &PhysicalConstants) -> ModelParams {
        let mut p = *base;
        match self {
            Axis::G2n => p.g2n = x,
            Axis::Omega => p.omega = x,
            Axis::Kappa => p.kappa = x,
            Axis::GammaPrime => p.gamma_prime = x,
            Axis::DeltaP => p.delta_p = x,
            Axis::DeltaD => p.delta_d = x,
            Axis::DeltaC => p.delta_c = x,
            Axis::Delta => p.delta = x,
            Axis::B => p.delta = zeeman_shift(x, c),
        }
        p
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown sweep axis `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "t2_plus")]
    T2Plus,
    #[serde(rename = "t2_minus")]
    T2Minus,
    #[serde(rename = "phi_plus")]
    PhiPlus,
    #[serde(rename = "phi_minus")]
    PhiMinus,
    #[serde(rename = "faraday")]
    Faraday,
    #[serde(rename = "p_h")]
    PH,
    #[serde(rename = "p_v")]
    PV,
    #[serde(rename = "p_0")]
    P0,
    #[serde(rename = "fisher")]
    Fisher,
    #[serde(rename = "fisher_h")]
    FisherH,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::T2Plus => "t2_plus",
            Observable::T2Minus => "t2_minus",
            Observable::PhiPlus => "phi_plus",
            Observable::PhiMinus => "phi_minus",
            Observable::Faraday => "faraday",
            Observable::PH => "p_h",
            Observable::PV => "p_v",
            Observable::P0 => "p_0",
            Observable::Fisher => "fisher",
            Observable::FisherH => "fisher_h",
        }
    }

    fn is_phase(self) -> bool {
        matches!(self, Observable::PhiPlus | Observable::PhiMinus | Observable::Faraday)
    }

    fn needs_response(self) -> bool {
        matches!(self, Observable::T2Plus | Observable::T2Minus) || self.is_phase()
    }

    fn needs_outcomes(self) -> bool {
        matches!(self, Observable::PH | Observable::PV | Observable::P0)
    }

    fn needs_fisher(self) -> bool {
        matches!(self, Observable::Fisher | Observable::FisherH)
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown observable `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub doppler: Option<DopplerConfig>,
    /// (g²N, γ′) pairs; when sweeping g2n, γ′ is interpolated linearly from them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_prime_table: Option<Vec<[f64; 2]>>,
}

impl SweepSpec {
    pub fn new(axis: Axis, start: f64, stop: f64, points: usize, observables: Vec<Observable>) -> Self {
        SweepSpec {
            axis,
            start,
            stop,
            points,
            scale: Scale::Linear,
            observables,
            doppler: None,
            gamma_prime_table: None,
        }
    }

    pub fn with_doppler(self, doppler: Option<DopplerConfig>) -> Self {
        SweepSpec { doppler, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidSweep("bounds must be finite".into()));
        }
        if !(self.start < self.stop) {
            return Err(Error::InvalidSweep(format!(
                "start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidSweep("need at least 2 points".into()));
        }
        if self.scale == Scale::Log && !(self.start > 0.0) {
            return Err(Error::InvalidSweep("log scale needs start > 0".into()));
        }
        if self.observables.is_empty() {
            return Err(Error::InvalidSweep("no observables requested".into()));
        }
        if let Some(d) = &self.doppler {
            d.validate()?;
        }
        if let Some(t) = &self.gamma_prime_table {
            if t.is_empty() || t.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                return Err(Error::InvalidSweep(
                    "gamma_prime_table needs strictly increasing g2n".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => search::linspace(self.start, self.stop, self.points),
            Scale::Log => search::logspace(self.start, self.stop, self.points),
        }
    }

    fn params_at(&self, base: &ModelParams, x: f64, c: &PhysicalConstants) -> ModelParams {
        let mut p = self.axis.apply(base, x, c);
        if let (Axis::G2n, Some(table)) = (self.axis, &self.gamma_prime_table) {
            p.gamma_prime = interpolate(table, x);
        }
        p
    }
}

fn interpolate(table: &[[f64; 2]], x: f64) -> f64 {
    let first = table[0];
    let last = table[table.len() - 1];
    if x <= first[0] {
        return first[1];
    }
    if x >= last[0] {
        return last[1];
    }
    let i = table.partition_point(|r| r[0] <= x);
    let (a, b) = (table[i - 1], table[i]);
    a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFlag {
    pub row: usize,
    pub column: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub columns: Vec<Column>,
    pub flags: Vec<CellFlag>,
    pub metadata: BTreeMap<String, String>,
}

impl SweepTable {
    pub fn rows(&self) -> usize {
        self.axis.len()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    /// Appends `suffix` to every column name (and flag reference).
    pub fn with_suffix(mut self, suffix: &str) -> Self {
        for c in &mut self.columns {
            c.name.push_str(suffix);
        }
        for f in &mut self.flags {
            f.column.push_str(suffix);
        }
        self
    }

    /// Adds the columns of `other`, which must share this table's axis.
    pub fn merge(mut self, other: SweepTable) -> Result<Self> {
        if self.axis != other.axis || self.axis_name != other.axis_name {
            return Err(Error::InvalidSweep("cannot merge tables over different axes".into()));
        }
        for c in &other.columns {
            if self.column(&c.name).is_some() {
                return Err(Error::InvalidSweep(format!("duplicate column `{}`", c.name)));
            }
        }
        let label = other.columns.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",");
        self.columns.extend(other.columns);
        self.flags.extend(other.flags);
        for (k, v) in other.metadata {
            match self.metadata.get(&k) {
                Some(existing) if *existing == v => {}
                Some(_) => {
                    let key = format!("{k}[{label}]");
                    self.metadata.insert(key, v);
                }
                None => {
                    self.metadata.insert(k, v);
                }
            }
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::InvalidSweep("table has no observable columns".into()));
        }
        for c in &self.columns {
            if c.values.len() != self.axis.len() {
                return Err(Error::InvalidSweep(format!("column `{}` is not rectangular", c.name)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
struct Row {
    values: Vec<f64>,
    phases: Option<(f64, f64)>,
    flags: Vec<(usize, String)>,
}

fn evaluate_row(spec: &SweepSpec, p: &ModelParams, c: &PhysicalConstants) -> Row {
    let obs = &spec.observables;
    let mut row = Row {
        values: vec![f64::NAN; obs.len()],
        ..Row::default()
    };
    let fail_all = |row: &mut Row, pred: fn(Observable) -> bool, msg: String| {
        for (i, o) in obs.iter().enumerate() {
            if pred(*o) {
                row.flags.push((i, msg.clone()));
            }
        }
    };

    if let Err(e) = p.validate() {
        fail_all(&mut row, |_| true, e.to_string());
        return row;
    }

    if obs.iter().any(|o| o.needs_response()) {
        match response(p) {
            Ok(r) => {
                row.phases = Some((r.phi_plus, r.phi_minus));
                for (i, o) in obs.iter().enumerate() {
                    match o {
                        Observable::T2Plus => row.values[i] = r.t_plus * r.t_plus,
                        Observable::T2Minus => row.values[i] = r.t_minus * r.t_minus,
                        Observable::PhiPlus => row.values[i] = r.phi_plus,
                        Observable::PhiMinus => row.values[i] = r.phi_minus,
                        Observable::Faraday => row.values[i] = r.faraday,
                        _ => {}
                    }
                }
            }
            Err(e) => fail_all(&mut row, Observable::needs_response, e.to_string()),
        }
    }

    if obs.iter().any(|o| o.needs_outcomes()) {
        let dist: Result<OutcomeDistribution> = match &spec.doppler {
            Some(cfg) => doppler::averaged_outcomes(p, cfg, c.gamma_si),
            None => stats::outcome_probabilities(p, VelocityClass::AT_REST),
        };
        match dist {
            Ok(d) => {
                for (i, o) in obs.iter().enumerate() {
                    match o {
                        Observable::PH => row.values[i] = d.p_h,
                        Observable::PV => row.values[i] = d.p_v,
                        Observable::P0 => row.values[i] = d.p_0,
                        _ => {}
                    }
                }
            }
            Err(e) => fail_all(&mut row, Observable::needs_outcomes, e.to_string()),
        }
    }

    if obs.iter().any(|o| o.needs_fisher()) {
        match doppler::fisher_with(p, spec.doppler.as_ref(), c.gamma_si) {
            Ok(f) => {
                for (i, o) in obs.iter().enumerate() {
                    match o {
                        Observable::Fisher => row.values[i] = f.f_total,
                        Observable::FisherH => row.values[i] = f.f_h,
                        _ => {}
                    }
                    if f.singular && o.needs_fisher() {
                        row.flags.push((i, format!("singular Fisher information capped at {:e}", stats::FISHER_CAP)));
                    }
                }
            }
            Err(e) => fail_all(&mut row, Observable::needs_fisher, e.to_string()),
        }
    }
    row
}

/// Removes 2π jumps between consecutive finite entries.
pub fn unwrap_phase(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &v in values {
        if !v.is_finite() {
            out.push(v);
            continue;
        }
        if let Some(last) = prev {
            let jump = v - last;
            offset -= 2.0 * PI * (jump / (2.0 * PI)).round();
        }
        prev = Some(v);
        out.push(v + offset);
    }
    out
}

pub fn run_sweep(spec: &SweepSpec, base: &ModelParams, c: &PhysicalConstants) -> Result<SweepTable> {
    spec.validate()?;
    let grid = spec.grid();
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&x| evaluate_row(spec, &spec.params_at(base, x, c), c))
        .collect();

    let mut columns: Vec<Column> = spec
        .observables
        .iter()
        .enumerate()
        .map(|(i, o)| Column {
            name: o.name().to_string(),
            values: rows.iter().map(|r| r.values[i]).collect(),
        })
        .collect();

    let unwrapped = spec.observables.iter().any(|o| o.is_phase());
    if unwrapped {
        let plus = unwrap_phase(&rows.iter().map(|r| r.phases.map_or(f64::NAN, |p| p.0)).collect::<Vec<_>>());
        let minus = unwrap_phase(&rows.iter().map(|r| r.phases.map_or(f64::NAN, |p| p.1)).collect::<Vec<_>>());
        for (col, o) in columns.iter_mut().zip(&spec.observables) {
            match o {
                Observable::PhiPlus => col.values.clone_from(&plus),
                Observable::PhiMinus => col.values.clone_from(&minus),
                Observable::Faraday => {
                    col.values = plus.iter().zip(&minus).map(|(a, b)| (b - a) / 2.0).collect();
                }
                _ => {}
            }
        }
    }

    let mut flags = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (i, msg) in &row.flags {
            flags.push(CellFlag {
                row: r,
                column: spec.observables[*i].name().to_string(),
                message: msg.clone(),
            });
        }
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("axis".into(), spec.axis.name().into());
    metadata.insert(
        "grid".into(),
        format!(
            "{:?} {} points on [{}, {}]",
            spec.scale, spec.points, spec.start, spec.stop
        )
        .to_lowercase(),
    );
    metadata.insert("columns".into(), spec.observables.iter().map(|o| o.name()).collect::<Vec<_>>().join(","));
    metadata.insert("model".into(), serde_json::to_string(base).unwrap_or_default());
    metadata.insert("sigma_mapping".into(), base.sigma_mapping.as_str().into());
    metadata.insert("phase_unwrapped".into(), unwrapped.to_string());
    match &spec.doppler {
        Some(d) => {
            metadata.insert("doppler".into(), serde_json::to_string(d).unwrap_or_default());
            metadata.insert("shift_mode".into(), d.shift_mode.as_str().into());
            metadata.insert("fisher_average".into(), d.fisher_average.as_str().into());
        }
        None => {
            metadata.insert("doppler".into(), "none".into());
        }
    }
    if spec.axis == Axis::B {
        metadata.insert("constants".into(), serde_json::to_string(c).unwrap_or_default());
    }
    if let Some(t) = &spec.gamma_prime_table {
        metadata.insert("gamma_prime_table".into(), serde_json::to_string(t).unwrap_or_default());
    }
    metadata.insert("units".into(), "rates and detunings in gamma; phases in rad".into());
    metadata.insert("version".into(), crate::VERSION.into());

    Ok(SweepTable {
        axis_name: spec.axis.name().to_string(),
        axis: grid,
        columns,
        flags,
        metadata,
    })
}

/// Value of a single observable at `p` (atoms at rest unless `doppler` is set).
pub fn observable_value(o: Observable, p: &ModelParams, doppler: Option<&DopplerConfig>, c: &PhysicalConstants) -> Result<f64> {
    let spec = SweepSpec {
        doppler: doppler.copied(),
        ..SweepSpec::new(Axis::Delta, 0.0, 1.0, 2, vec![o])
    };
    let row = evaluate_row(&spec, p, c);
    match row.flags.first() {
        Some((_, msg)) if !row.values[0].is_finite() => Err(Error::Degenerate(msg.clone())),
        _ => Ok(row.values[0]),
    }
}

/// Extremum of one observable along `axis` within `[lo, hi]`.
#[allow(clippy::too_many_arguments)]
pub fn observable_extremum(
    base: &ModelParams,
    axis: Axis,
    observable: Observable,
    lo: f64,
    hi: f64,
    kind: Extremum,
    doppler: Option<&DopplerConfig>,
    c: &PhysicalConstants,
) -> Result<Located> {
    search::find_extremum(
        |x| observable_value(observable, &axis.apply(base, x, c), doppler, c).unwrap_or(f64::NAN),
        lo,
        hi,
        401,
        kind,
        1e-6,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn rejects_bad_specs() {
        let ok = SweepSpec::new(Axis::Delta, -0.1, 0.1, 11, vec![Observable::PH]);
        assert!(ok.validate().is_ok());
        let bad = SweepSpec { start: 0.2, ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = SweepSpec { points: 1, ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = SweepSpec {
            scale: Scale::Log,
            ..ok.clone()
        };
        assert!(bad.validate().is_err());
        let bad = SweepSpec {
            observables: vec![],
            ..ok
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn names_parse_back() {
        for o in [
            Observable::T2Plus,
            Observable::T2Minus,
            Observable::PhiPlus,
            Observable::PhiMinus,
            Observable::Faraday,
            Observable::PH,
            Observable::PV,
            Observable::P0,
            Observable::Fisher,
            Observable::FisherH,
        ] {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
        assert_eq!("delta_p".parse::<Axis>().unwrap(), Axis::DeltaP);
        assert!("nope".parse::<Axis>().is_err());
    }

    #[test]
    fn fig2_twin_peaks() {
        let spec = SweepSpec::new(
            Axis::DeltaP,
            -0.2,
            0.2,
            2001,
            vec![Observable::T2Plus, Observable::T2Minus],
        );
        let t = run_sweep(&spec, &ModelParams::fig2(), &consts()).unwrap();
        assert_eq!(t.rows(), 2001);
        let argmax = |v: &[f64]| v.iter().enumerate().fold(0, |b, (i, x)| if *x > v[b] { i } else { b });
        let plus = t.column("t2_plus").unwrap();
        let minus = t.column("t2_minus").unwrap();
        assert!((t.axis[argmax(plus)] - 0.01).abs() < 1e-9);
        assert!((t.axis[argmax(minus)] + 0.01).abs() < 1e-9);
        assert!((plus[argmax(plus)] - 0.951_860_781_475_021_8).abs() < 1e-12);
        // the curves cross at Δ_p = 0
        assert_eq!(plus[1000], minus[1000]);
        assert!((plus[1000] - 0.894_493_767_445_792).abs() < 1e-12);
    }

    #[test]
    fn fig3_probabilities() {
        let spec = SweepSpec::new(Axis::Delta, -0.2, 0.2, 2001, vec![Observable::PH, Observable::PV, Observable::P0]);
        let t = run_sweep(&spec, &ModelParams::fig2(), &consts()).unwrap();
        let ph = t.column("p_h").unwrap();
        assert_eq!(ph[1000], 0.0);
        for i in 0..t.rows() {
            let s = ph[i] + t.column("p_v").unwrap()[i] + t.column("p_0").unwrap()[i];
            assert!((s - 1.0).abs() < 1e-15);
            assert!((ph[i] - ph[2000 - i]).abs() <= 1e-15);
        }
    }

    #[test]
    fn bare_cavity_fisher_column_is_zero() {
        let spec = SweepSpec::new(Axis::Delta, -0.2, 0.2, 101, vec![Observable::Fisher]);
        let t = run_sweep(&spec, &ModelParams::bare_cavity(), &consts()).unwrap();
        assert!(t.column("fisher").unwrap().iter().all(|&v| v == 0.0));
        assert!(t.flags.is_empty());
    }

    #[test]
    fn phases_are_unwrapped() {
        let raw = [3.0, -3.0, -2.9, 3.1];
        let u = unwrap_phase(&raw);
        assert!((u[1] - (-3.0 + 2.0 * PI)).abs() < 1e-15);
        assert!(u.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
        // a wide detuning scan passes through ±π
        let spec = SweepSpec::new(Axis::DeltaP, -30.0, 30.0, 3001, vec![Observable::PhiPlus, Observable::Faraday]);
        let t = run_sweep(&spec, &ModelParams::fig2(), &consts()).unwrap();
        let phi = t.column("phi_plus").unwrap();
        assert!(phi.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
        assert_eq!(t.metadata["phase_unwrapped"], "true");
    }

    #[test]
    fn invalid_points_are_flagged_not_fatal() {
        let spec = SweepSpec::new(Axis::Kappa, -1.0, 1.0, 5, vec![Observable::T2Plus]);
        let t = run_sweep(&spec, &ModelParams::fig2(), &consts()).unwrap();
        let col = t.column("t2_plus").unwrap();
        assert!(col[0].is_nan() && col[2].is_nan());
        assert!(col[4].is_finite());
        assert_eq!(t.flags.len(), 3);
    }

    #[test]
    fn field_axis_maps_to_delta() {
        let c = consts();
        let b = crate::sensitivity::field_for_shift(0.01, &c);
        let spec = SweepSpec::new(Axis::B, b / 2.0, b, 3, vec![Observable::Faraday]);
        let t = run_sweep(&spec, &ModelParams::fig2(), &c).unwrap();
        let direct = response(&ModelParams::fig2()).unwrap().faraday;
        assert!((t.column("faraday").unwrap()[2] - direct).abs() < 1e-12);
    }

    #[test]
    fn gamma_prime_table_hook() {
        let table = vec![[50.0, 1e-4], [150.0, 3e-4]];
        assert!((interpolate(&table, 100.0) - 2e-4).abs() < 1e-18);
        assert_eq!(interpolate(&table, 10.0), 1e-4);
        let spec = SweepSpec {
            gamma_prime_table: Some(table),
            ..SweepSpec::new(Axis::G2n, 50.0, 150.0, 3, vec![Observable::T2Plus])
        };
        let t = run_sweep(&spec, &ModelParams::fig2().with_delta_p(0.01), &consts()).unwrap();
        let p = ModelParams {
            g2n: 100.0,
            gamma_prime: 2e-4,
            ..ModelParams::fig2().with_delta_p(0.01)
        };
        let direct = response(&p).unwrap().t_plus.powi(2);
        assert!((t.column("t2_plus").unwrap()[1] - direct).abs() < 1e-15);
    }

    #[test]
    fn ph_extremum_matches_frozen_location() {
        let c = consts();
        let base = ModelParams::fig2();
        let r = observable_extremum(&base, Axis::Delta, Observable::PH, 0.0, 0.2, Extremum::Max, None, &c).unwrap();
        assert!((r.x - 0.039_397_225_721_48).abs() < 2e-6, "{}", r.x);
        assert!((r.value - 0.219_538_206_832_676).abs() < 1e-10);
        let l = observable_extremum(&base, Axis::Delta, Observable::PH, -0.2, 0.0, Extremum::Max, None, &c).unwrap();
        assert!((l.x + r.x).abs() < 2e-6);
        assert!((l.value - r.value).abs() < 1e-12);
        assert!(matches!(
            observable_extremum(&ModelParams::bare_cavity(), Axis::Delta, Observable::PH, 0.0, 0.2, Extremum::Max, None, &c),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn merge_requires_same_axis() {
        let c = consts();
        let a = run_sweep(&SweepSpec::new(Axis::Delta, 0.0, 0.1, 5, vec![Observable::Fisher]), &ModelParams::fig2(), &c).unwrap();
        let b = a.clone().with_suffix("_doppler");
        let m = a.clone().merge(b).unwrap();
        assert_eq!(m.columns.len(), 2);
        assert!(m.column("fisher_doppler").is_some());
        assert!(a.clone().merge(a.clone()).is_err());
        let other = run_sweep(&SweepSpec::new(Axis::Delta, 0.0, 0.2, 5, vec![Observable::PH]), &ModelParams::fig2(), &c).unwrap();
        assert!(a.merge(other).is_err());
    }
}
