//! Pinned dataset families for the reference figures.

use std::fmt;
use std::str::FromStr;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::output::{Dataset, DisplayOffset};
use crate::spectral::{Model, ScenarioSpec};
use crate::sweep::{Axis, Formula, SweepGrid};

pub const TAUP_SET: [(f64, &str); 5] = [
    (0.0, "0ps"),
    (1.5e-12, "1.5ps"),
    (2.5e-12, "2.5ps"),
    (5e-12, "5ps"),
    (10e-12, "10ps"),
];
pub const GAMMA_SET: [(f64, &str); 2] = [(0.77e12, "0.77e12"), (1e12, "1e12")];
pub const OMEGAD_SET: [(f64, &str); 2] = [(4.5e14, "4.5e14"), (4.875e14, "4.875e14")];

pub const TAU_SPAN: f64 = 20e-12;
pub const TAU_POINTS: usize = 2001;
pub const GAMMA_STOP: f64 = 5e12;
pub const GAMMA_POINTS: usize = 500;
/// Display shift applied to the τᵖ = 1.5 ps curve of the Lorentzian family.
pub const LORENTZIAN_DISPLAY_OFFSET: f64 = 2e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Fig1a,
        Figure::Fig1b,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Figure::Fig1a => "1a",
            Figure::Fig1b => "1b",
            Figure::Fig2 => "2",
            Figure::Fig3 => "3",
            Figure::Fig4 => "4",
            Figure::Fig5 => "5",
            Figure::Fig6 => "6",
            Figure::Fig7 => "7",
        }
    }

    pub fn stem(&self) -> String {
        format!("fig{}", self.id())
    }

    pub fn sidecar(&self) -> String {
        format!("{}.meta.json", self.stem())
    }

    /// The datasets of this figure. Center frequency, Δ, method and
    /// quadrature settings come from `config`; everything else is pinned.
    pub fn datasets(&self, config: &RunConfig) -> Vec<Dataset> {
        let stem = self.stem();
        let base = |model: Model| ScenarioSpec {
            photon_model: model,
            omega0: config.omega0,
            delta: config.delta,
            taup: 0.0,
            omegad: config.omega0,
            gamma: config.delta,
            tau: 0.0,
        };
        let finish = |mut grid: SweepGrid| {
            grid.method = config.method;
            grid.quadrature = config.quadrature();
            grid
        };
        let tau_family = |model: Model| {
            let mut out = Vec::new();
            for (gamma, g_label) in GAMMA_SET {
                for (taup, t_label) in TAUP_SET {
                    let mut b = base(model);
                    b.omegad = OMEGAD_SET[0].0;
                    b.gamma = gamma;
                    b.taup = taup;
                    out.push(Dataset {
                        file: format!("{stem}_gamma{g_label}_taup{t_label}.csv"),
                        grid: finish(SweepGrid::new(b, Axis::Tau, -TAU_SPAN, TAU_SPAN, TAU_POINTS)),
                    });
                }
            }
            out
        };
        let gamma_family = |model: Model, omegads: &[(f64, &str)]| {
            let mut out = Vec::new();
            for &(omegad, o_label) in omegads {
                for (taup, t_label) in TAUP_SET {
                    let mut b = base(model);
                    b.omegad = omegad;
                    b.taup = taup;
                    out.push(Dataset {
                        file: format!("{stem}_omegad{o_label}_taup{t_label}.csv"),
                        grid: finish(SweepGrid::gamma_from_zero(b, GAMMA_STOP, GAMMA_POINTS)),
                    });
                }
            }
            out
        };
        match self {
            Figure::Fig1a => {
                let mut b = base(Model::Gaussian);
                b.delta = 1.0;
                b.gamma = 1.0;
                let mut grid = finish(SweepGrid::new(b, Axis::Tau, -0.1, 0.1, 401));
                grid.formula = Formula::LegacyKernel;
                vec![Dataset {
                    file: format!("{stem}.csv"),
                    grid,
                }]
            }
            Figure::Fig1b | Figure::Fig4 => {
                let model = if *self == Figure::Fig1b {
                    Model::Gaussian
                } else {
                    Model::Lorentzian
                };
                let (span, points) = if model == Model::Gaussian {
                    (5e-12, 1001)
                } else {
                    (TAU_SPAN, TAU_POINTS)
                };
                let mut grid = finish(SweepGrid::new(base(model), Axis::Tau, -span, span, points));
                if model == Model::Lorentzian {
                    grid.formula = Formula::SingleJ;
                }
                grid.locked_taup = true;
                vec![Dataset {
                    file: format!("{stem}.csv"),
                    grid,
                }]
            }
            Figure::Fig2 => tau_family(Model::Gaussian),
            Figure::Fig5 => tau_family(Model::Lorentzian),
            Figure::Fig3 => gamma_family(Model::Gaussian, &OMEGAD_SET),
            Figure::Fig6 => gamma_family(Model::Lorentzian, &OMEGAD_SET[..1]),
            Figure::Fig7 => gamma_family(Model::Lorentzian, &OMEGAD_SET[1..]),
        }
    }

    pub fn notes(&self, config: &RunConfig) -> Vec<String> {
        let mut notes = vec![format!(
            "photon bandwidth delta = {} s^-1 and center frequency omega0 = {} s^-1 are run settings, not fixed by the figure",
            config.delta, config.omega0
        )];
        match self {
            Figure::Fig1a => notes.push(
                "single-overlap formula on the kernel exp(-(2 pi)^2 |tau| delta) with delta = 1, tau dimensionless".into(),
            ),
            Figure::Fig1b => notes.push(
                "matched detectors; the photon separation follows tau (taup = tau); full formula".into(),
            ),
            Figure::Fig4 => notes.push(
                "matched detectors; the photon separation follows tau (taup = tau); single-overlap formula on J1 = exp(-delta |tau| / 2)".into(),
            ),
            Figure::Fig2 | Figure::Fig5 => notes.push(
                "one curve per (gamma, taup); detector center omegad = 4.5e14 s^-1".into(),
            ),
            Figure::Fig3 | Figure::Fig6 | Figure::Fig7 => notes.push(
                "gamma swept over (0, 5e12] s^-1 in 500 steps at tau = 0; one curve per (omegad, taup)".into(),
            ),
        }
        if *self == Figure::Fig5 {
            notes.push(format!(
                "the taup = 1.5 ps curves are displayed shifted by {LORENTZIAN_DISPLAY_OFFSET} s along tau; the CSV stores the unshifted tau"
            ));
        }
        notes
    }

    pub fn display_offsets(&self) -> Vec<DisplayOffset> {
        if *self != Figure::Fig5 {
            return Vec::new();
        }
        GAMMA_SET
            .iter()
            .map(|(_, g)| DisplayOffset {
                file: format!("{}_gamma{g}_taup1.5ps.csv", self.stem()),
                tau_offset: LORENTZIAN_DISPLAY_OFFSET,
            })
            .collect()
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix("fig").unwrap_or(&t);
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == t)
            .ok_or_else(|| Error::Config(format!("unknown figure '{s}' (expected 1a, 1b or 2..7)")))
    }
}
