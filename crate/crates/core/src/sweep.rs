//! Parameter sweeps and the features read off them.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::g2::{g2_from_overlaps, g2_from_single_j, G2Flags};
use crate::overlap::{compute_overlap_set, legacy_fig1a_kernel, Method};
use crate::quadrature::QuadratureSettings;
use crate::spectral::ScenarioSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Tau,
    Gamma,
    Taup,
    OmegaD,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Tau => "tau",
            Axis::Gamma => "gamma",
            Axis::Taup => "taup",
            Axis::OmegaD => "omega_d",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tau" => Ok(Axis::Tau),
            "gamma" => Ok(Axis::Gamma),
            "taup" => Ok(Axis::Taup),
            "omega_d" | "omegad" => Ok(Axis::OmegaD),
            other => Err(Error::Config(format!("unknown axis '{other}'"))),
        }
    }
}

/// What is evaluated at each grid point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// The six-overlap detector-mismatch formula.
    #[default]
    Full,
    /// The single-overlap formula applied to J1 of the scenario.
    SingleJ,
    /// The single-overlap formula applied to `e^{−(2π)²|τ|Δ}`, with Δ
    /// taken from the base scenario; only meaningful on the tau axis.
    LegacyKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub base: ScenarioSpec,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub method: Method,
    /// On a tau sweep, move the photon separation along with τ.
    #[serde(default)]
    pub locked_taup: bool,
    #[serde(default)]
    pub formula: Formula,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
}

impl SweepGrid {
    pub fn new(base: ScenarioSpec, axis: Axis, start: f64, stop: f64, points: usize) -> Self {
        SweepGrid {
            base,
            axis,
            start,
            stop,
            points,
            method: Method::ClosedForm,
            locked_taup: false,
            formula: Formula::Full,
            quadrature: QuadratureSettings::default(),
        }
    }

    /// A Γ sweep over `(0, stop]` that starts at `stop / points`.
    pub fn gamma_from_zero(base: ScenarioSpec, stop: f64, points: usize) -> Self {
        SweepGrid::new(base, Axis::Gamma, stop / points as f64, stop, points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::domain("a sweep needs at least 2 points"));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::domain(format!(
                "sweep needs finite start < stop, got {} .. {}",
                self.start, self.stop
            )));
        }
        if matches!(self.axis, Axis::Gamma | Axis::OmegaD) && !(self.start > 0.0) {
            return Err(Error::domain(format!("{} sweeps must stay positive", self.axis)));
        }
        if self.formula == Formula::LegacyKernel && self.axis != Axis::Tau {
            return Err(Error::domain("the legacy kernel is swept along tau only"));
        }
        self.quadrature.validate()?;
        let mut probe = self.base;
        probe.tau = 0.0;
        probe.taup = probe.taup.clamp(-1.0, 1.0);
        probe.validate()
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            return self.stop;
        }
        self.start + (self.stop - self.start) * (k as f64 / (self.points - 1) as f64)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.value(k)).collect()
    }

    pub fn scenario_at(&self, v: f64) -> ScenarioSpec {
        let mut s = self.base;
        match self.axis {
            Axis::Tau => {
                s.tau = v;
                if self.locked_taup {
                    s.taup = v;
                }
            }
            Axis::Gamma => s.gamma = v,
            Axis::Taup => s.taup = v,
            Axis::OmegaD => s.omegad = v,
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    pub axis: Axis,
    pub axis_value: f64,
    pub scenario: ScenarioSpec,
    pub g2: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// `|J1|..|J6|`, or just `|J1|` for single-overlap formulas.
    pub abs_j: Vec<f64>,
    pub flags: G2Flags,
    pub error: Option<String>,
}

impl SweepRecord {
    /// Points excluded from analysis: degenerate or failed.
    pub fn is_flagged(&self) -> bool {
        self.flags.any() || self.error.is_some() || !self.g2.is_finite()
    }

    pub fn flag_label(&self) -> String {
        match &self.error {
            Some(_) => "evaluation_failed".to_string(),
            None => self.flags.label(),
        }
    }
}

fn evaluate(grid: &SweepGrid, index: usize) -> SweepRecord {
    let axis_value = grid.value(index);
    let scenario = grid.scenario_at(axis_value);
    let mut record = SweepRecord {
        index,
        axis: grid.axis,
        axis_value,
        scenario,
        g2: f64::NAN,
        numerator: f64::NAN,
        denominator: f64::NAN,
        abs_j: Vec::new(),
        flags: G2Flags::default(),
        error: None,
    };
    let single = |record: &mut SweepRecord, j: Complex64| -> Result<()> {
        let m2 = j.norm_sqr();
        record.g2 = g2_from_single_j(j)?;
        record.numerator = 1.0 + m2;
        record.denominator = (1.0 + 3.0 * m2).powi(2) / (1.0 + m2).powi(2);
        record.abs_j = vec![j.norm()];
        Ok(())
    };
    let outcome = match grid.formula {
        Formula::LegacyKernel => legacy_fig1a_kernel(axis_value, scenario.delta)
            .and_then(|j| single(&mut record, Complex64::new(j, 0.0))),
        Formula::SingleJ => compute_overlap_set(&scenario, grid.method, &grid.quadrature)
            .and_then(|o| single(&mut record, o.j[0])),
        Formula::Full => compute_overlap_set(&scenario, grid.method, &grid.quadrature).and_then(|o| {
            let r = g2_from_overlaps(&o)?;
            record.g2 = r.value;
            record.numerator = r.numerator;
            record.denominator = r.denominator;
            record.abs_j = o.magnitudes().to_vec();
            record.flags = r.flags;
            Ok(())
        }),
    };
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
    }
    record
}

/// Evaluate every grid point. `workers = 0` uses the available
/// parallelism. Records come back in grid order whatever the worker count.
pub fn run_sweep(grid: &SweepGrid, workers: usize) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    if workers == 1 {
        return Ok((0..grid.points).map(|k| evaluate(grid, k)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..grid.points).into_par_iter().map(|k| evaluate(grid, k)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub axis_value: f64,
    pub g2: f64,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremaReport {
    pub extrema: Vec<Extremum>,
    pub oscillation_count: usize,
    pub max_g2: f64,
    pub bunching: bool,
}

/// Plateau tolerance of the three-point comparison, relative to
/// `max(1, |g²|)`.
pub const PLATEAU_TOLERANCE: f64 = 1e-9;
pub const BUNCHING_MARGIN: f64 = 1e-9;

/// Interior local extrema of the unflagged records by raw three-point
/// comparison. A point counts as a maximum (minimum) when it exceeds (falls
/// below) both neighbours by more than the plateau tolerance.
pub fn analyze_extrema(records: &[SweepRecord]) -> Result<ExtremaReport> {
    let kept: Vec<&SweepRecord> = records.iter().filter(|r| !r.is_flagged()).collect();
    if kept.is_empty() {
        return Err(Error::EmptyReport(format!(
            "all {} records are flagged",
            records.len()
        )));
    }
    if kept.len() < 5 {
        return Err(Error::domain(format!(
            "extrema analysis needs at least 5 unflagged points, got {}",
            kept.len()
        )));
    }
    let mut extrema = Vec::new();
    for w in kept.windows(3) {
        let (a, b, c) = (w[0].g2, w[1].g2, w[2].g2);
        let tol = PLATEAU_TOLERANCE * b.abs().max(1.0);
        let kind = if b > a + tol && b > c + tol {
            ExtremumKind::Max
        } else if b < a - tol && b < c - tol {
            ExtremumKind::Min
        } else {
            continue;
        };
        extrema.push(Extremum {
            axis_value: w[1].axis_value,
            g2: b,
            kind,
        });
    }
    let oscillation_count = extrema.iter().filter(|e| e.kind == ExtremumKind::Max).count();
    let (bunching, max_g2, _) = detect_bunching(records);
    Ok(ExtremaReport {
        extrema,
        oscillation_count,
        max_g2,
        bunching,
    })
}

/// `(bunching, max g², argmax)` over unflagged records; bunching means the
/// maximum exceeds `1 + 1e-9`. With no unflagged records the maximum and
/// its position are NaN.
pub fn detect_bunching(records: &[SweepRecord]) -> (bool, f64, f64) {
    let best = records
        .iter()
        .filter(|r| !r.is_flagged())
        .fold(None::<&SweepRecord>, |acc, r| match acc {
            Some(b) if b.g2 >= r.g2 => Some(b),
            _ => Some(r),
        });
    match best {
        Some(r) => (r.g2 > 1.0 + BUNCHING_MARGIN, r.g2, r.axis_value),
        None => (false, f64::NAN, f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Model;

    fn base(model: Model) -> ScenarioSpec {
        ScenarioSpec {
            photon_model: model,
            omega0: 5e14,
            delta: 1e12,
            taup: 0.0,
            omegad: 4.5e14,
            gamma: 1e12,
            tau: 0.0,
        }
    }

    fn synthetic(values: &[f64]) -> Vec<SweepRecord> {
        let s = base(Model::Gaussian);
        values
            .iter()
            .enumerate()
            .map(|(k, &g2)| SweepRecord {
                index: k,
                axis: Axis::Tau,
                axis_value: k as f64,
                scenario: s,
                g2,
                numerator: g2,
                denominator: 1.0,
                abs_j: vec![],
                flags: G2Flags::default(),
                error: None,
            })
            .collect()
    }

    #[test]
    fn zero_separation_is_half_everywhere() {
        let mut b = base(Model::Lorentzian);
        b.gamma = 0.37e12;
        let grid = SweepGrid::new(b, Axis::Tau, -20e-12, 20e-12, 101);
        for r in run_sweep(&grid, 0).unwrap() {
            assert!((r.g2 - 0.5).abs() < 1e-9, "{}: {}", r.axis_value, r.g2);
        }
    }

    #[test]
    fn matched_tau_sweep_rises_to_one() {
        let mut b = base(Model::Gaussian);
        b.omegad = b.omega0;
        let mut grid = SweepGrid::new(b, Axis::Tau, -5e-12, 5e-12, 101);
        grid.locked_taup = true;
        let records = run_sweep(&grid, 2).unwrap();
        assert!((records[50].g2 - 0.5).abs() < 1e-9);
        assert!((records[100].g2 - 1.0).abs() < 1e-3);
        assert!((records[0].g2 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn gamma_sweep_stays_finite() {
        let mut b = base(Model::Gaussian);
        b.taup = 5e-12;
        let grid = SweepGrid::gamma_from_zero(b, 5e12, 500);
        let records = run_sweep(&grid, 0).unwrap();
        assert_eq!(records.len(), 500);
        assert!((records[0].axis_value - 1e10).abs() < 1.0);
        assert_eq!(records[499].axis_value, 5e12);
        assert!(records.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut b = base(Model::Lorentzian);
        b.taup = 2.5e-12;
        let grid = SweepGrid::gamma_from_zero(b, 5e12, 200);
        let one = run_sweep(&grid, 1).unwrap();
        let many = run_sweep(&grid, 4).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn extrema_of_monotone_and_wavy_lists() {
        let r = analyze_extrema(&synthetic(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert_eq!(r.oscillation_count, 0);
        assert!(r.bunching);
        let r = analyze_extrema(&synthetic(&[0.1, 0.5, 0.2, 0.6, 0.3, 0.4])).unwrap();
        assert_eq!(r.oscillation_count, 2);
        let kinds: Vec<_> = r.extrema.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            [ExtremumKind::Max, ExtremumKind::Min, ExtremumKind::Max, ExtremumKind::Min]
        );
        assert!(!r.bunching);
        // Sub-tolerance wiggles are plateaus.
        let r = analyze_extrema(&synthetic(&[0.5, 0.5 + 1e-12, 0.5, 0.5 + 1e-12, 0.5])).unwrap();
        assert_eq!(r.oscillation_count, 0);
    }

    #[test]
    fn flagged_records_are_skipped() {
        let mut records = synthetic(&[0.1, 0.2, 9.0, 0.3, 0.4, 0.5]);
        records[2].flags.denominator_near_zero = true;
        let r = analyze_extrema(&records).unwrap();
        assert_eq!(r.oscillation_count, 0);
        assert_eq!(detect_bunching(&records).1, 0.5);
        for r in records.iter_mut() {
            r.error = Some("boom".into());
        }
        assert!(matches!(analyze_extrema(&records), Err(Error::EmptyReport(_))));
        assert!(detect_bunching(&records).1.is_nan());
    }

    #[test]
    fn invalid_grids_rejected() {
        let b = base(Model::Gaussian);
        assert!(SweepGrid::new(b, Axis::Tau, 1.0, 0.0, 10).validate().is_err());
        assert!(SweepGrid::new(b, Axis::Tau, 0.0, 1.0, 1).validate().is_err());
        assert!(SweepGrid::new(b, Axis::Gamma, 0.0, 1e12, 10).validate().is_err());
        let mut g = SweepGrid::new(b, Axis::Gamma, 1e10, 1e12, 10);
        g.formula = Formula::LegacyKernel;
        assert!(g.validate().is_err());
    }

    #[test]
    fn per_point_failures_are_recorded() {
        let mut b = base(Model::Gaussian);
        b.delta = 1.0;
        let mut g = SweepGrid::new(b, Axis::Tau, -0.1, 0.1, 11);
        g.formula = Formula::LegacyKernel;
        let records = run_sweep(&g, 1).unwrap();
        assert!(records.iter().all(|r| r.error.is_none()));
        assert!((records[5].g2 - 0.5).abs() < 1e-15);

        let mut q = SweepGrid::new(base(Model::Lorentzian), Axis::Tau, -1e-12, 1e-12, 3);
        q.method = Method::Quadrature;
        q.quadrature.max_domain_doublings = 1;
        let records = run_sweep(&q, 1).unwrap();
        assert!(records.iter().all(|r| r.error.is_some() && r.is_flagged()));
        assert_eq!(records[0].flag_label(), "evaluation_failed");
    }
}
