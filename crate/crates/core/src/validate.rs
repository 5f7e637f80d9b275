//! Cross-checks of the closed forms against quadrature and of the analytic
//! g² against the Fock oracle, on a fixed corpus plus seeded random draws.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::oracle_g2;
use crate::g2::g2_from_overlaps;
use crate::overlap::{compute_overlap_set, Method, OverlapSet};
use crate::quadrature::QuadratureSettings;
use crate::spectral::{Model, ScenarioSpec};

pub const CLOSED_FORM_TOLERANCE: f64 = 1e-8;
pub const ORACLE_TOLERANCE: f64 = 1e-2;
pub const GAUGE_TOLERANCE: f64 = 1e-12;
/// Overlaps smaller than this are compared absolutely: an integral that
/// small is pure cancellation, resolved by quadrature only to about
/// `ε ∫|α_a α_b|`.
pub const RELATIVE_FLOOR: f64 = 1e-7;
pub const MIN_ORACLE_MODES: usize = 64;

/// Componentwise deviation `|q − c| / max(|c|, RELATIVE_FLOOR)`.
pub fn overlap_deviation(closed: &OverlapSet, quad: &OverlapSet) -> f64 {
    closed
        .j
        .iter()
        .zip(&quad.j)
        .map(|(c, q)| (q - c).norm() / c.norm().max(RELATIVE_FLOOR))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct ValidationOptions {
    pub modes: usize,
    pub draws: usize,
    pub seed: u64,
    pub quadrature: QuadratureSettings,
    /// Negative control: perturb every closed-form J2 before comparing.
    pub corrupt_closed_form: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            modes: 512,
            draws: 10,
            seed: 0,
            quadrature: QuadratureSettings::default(),
            corrupt_closed_form: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub scenarios: usize,
    pub worst: Option<ScenarioSpec>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            tolerance,
            max_deviation: 0.0,
            scenarios: 0,
            worst: None,
        }
    }

    fn record(&mut self, deviation: f64, s: &ScenarioSpec) {
        self.scenarios += 1;
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        if self.worst.is_none() || deviation > self.max_deviation {
            self.max_deviation = deviation;
            self.worst = Some(*s);
        }
    }

    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub skipped_flagged: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn worst_failure(&self) -> Option<&Check> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .max_by(|a, b| (a.max_deviation / a.tolerance).total_cmp(&(b.max_deviation / b.tolerance)))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>10} {:>14} {:>10}  verdict", "check", "scenarios", "max deviation", "tolerance")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<28} {:>10} {:>14.3e} {:>10.1e}  {}",
                c.name,
                c.scenarios,
                c.max_deviation,
                c.tolerance,
                if c.passed() { "pass" } else { "FAIL" }
            )?;
        }
        if self.skipped_flagged > 0 {
            writeln!(f, "({} flagged scenarios excluded from the oracle check)", self.skipped_flagged)?;
        }
        write!(f, "verdict: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

/// The scenarios checked on every run, whatever the draw count.
pub fn fixed_corpus() -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for model in [Model::Gaussian, Model::Lorentzian] {
        out.push(ScenarioSpec {
            photon_model: model,
            omega0: 5e14,
            delta: 1e12,
            taup: 1.5e-12,
            omegad: 4.5e14,
            gamma: 0.77e12,
            tau: 0.0,
        });
        out.push(ScenarioSpec {
            photon_model: model,
            omega0: 5e14,
            delta: 1e12,
            taup: 0.0,
            omegad: 5e14,
            gamma: 1e12,
            tau: 0.0,
        });
    }
    out
}

/// `draws` seeded scenarios per model around ω₀ = 5e14.
pub fn random_corpus(draws: usize, seed: u64) -> Vec<ScenarioSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * draws);
    for model in [Model::Gaussian, Model::Lorentzian] {
        for _ in 0..draws {
            out.push(random_scenario(&mut rng, model));
        }
    }
    out
}

pub fn random_scenario(rng: &mut impl Rng, model: Model) -> ScenarioSpec {
    ScenarioSpec {
        photon_model: model,
        omega0: 5e14,
        delta: rng.random_range(0.5e12..2e12),
        taup: rng.random_range(-5e-12..5e-12),
        omegad: 5e14 + rng.random_range(-5e12..5e12),
        gamma: rng.random_range(0.5e12..2e12),
        tau: rng.random_range(-5e-12..5e-12),
    }
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    if opts.modes < MIN_ORACLE_MODES {
        return Err(Error::Config(format!(
            "the oracle needs at least {MIN_ORACLE_MODES} modes, got {}",
            opts.modes
        )));
    }
    opts.quadrature
        .validate()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut corpus = fixed_corpus();
    corpus.extend(random_corpus(opts.draws, opts.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);

    let mut closed_vs_quad = Check::new("closed form vs quadrature", CLOSED_FORM_TOLERANCE);
    let mut oracle = Check::new("analytic vs Fock oracle", ORACLE_TOLERANCE);
    let mut gauge = Check::new("gauge invariance", GAUGE_TOLERANCE);
    let mut skipped_flagged = 0;

    for s in &corpus {
        let mut closed = compute_overlap_set(s, Method::ClosedForm, &opts.quadrature)?;
        if opts.corrupt_closed_form {
            closed.j[1] *= Complex64::new(1.0 + 1e-3, 0.0);
        }
        let quad = compute_overlap_set(s, Method::Quadrature, &opts.quadrature)?;
        closed_vs_quad.record(overlap_deviation(&closed, &quad), s);

        let analytic = g2_from_overlaps(&closed)?;
        let phases: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU));
        let regauged = g2_from_overlaps(&closed.regauged(phases))?;
        gauge.record(
            (regauged.value - analytic.value).abs() / analytic.value.abs().max(1.0),
            s,
        );

        let brute = oracle_g2(s, opts.modes)?;
        if analytic.flags.any() || brute.flags.any() {
            skipped_flagged += 1;
            continue;
        }
        oracle.record(
            (brute.value - analytic.value).abs() / analytic.value.max(1e-6),
            s,
        );
    }
    Ok(ValidationReport {
        checks: vec![closed_vs_quad, oracle, gauge],
        skipped_flagged,
    })
}
