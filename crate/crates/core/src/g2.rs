//! g² for the ideal Fock pair, the single-overlap formula and the full
//! detector-mismatch formula.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::overlap::{compute_overlap_set, Method, OverlapSet};
use crate::quadrature::QuadratureSettings;
use crate::spectral::ScenarioSpec;

/// A denominator below `EPS_DEN · max(|J2|²,|J3|²,|J4|²,|J5|²)²` is
/// flagged, as is one where all four overlaps vanish. The numerator uses
/// the same threshold.
pub const EPS_DEN: f64 = 1e-20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct G2Flags {
    pub denominator_near_zero: bool,
    pub numerator_near_zero: bool,
}

impl G2Flags {
    pub fn any(&self) -> bool {
        self.denominator_near_zero || self.numerator_near_zero
    }

    /// `|`-separated flag names, empty when nothing is set.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.denominator_near_zero {
            parts.push("denominator_near_zero");
        }
        if self.numerator_near_zero {
            parts.push("numerator_near_zero");
        }
        parts.join("|")
    }
}

/// `value = numerator / denominator` with the numerator and denominator
/// expressed in units of `scales[0]² · scales[1]²`, where `scales` are the
/// largest magnitudes in `{J2, J4}` and `{J3, J5}`. The quotient is
/// independent of these scales; without them strongly mismatched detectors
/// underflow both factors to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Result {
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub scales: [f64; 2],
    pub flags: G2Flags,
}

pub fn g2_fock_pair() -> f64 {
    0.5
}

/// `(1+|J|²)³ / (1+3|J|²)²`
pub fn g2_from_single_j(j: Complex64) -> Result<f64> {
    let m2 = j.norm_sqr();
    if !m2.is_finite() {
        return Err(Error::domain("overlap is not finite"));
    }
    if m2.sqrt() > 1.0 + 1e-9 {
        return Err(Error::domain(format!("|J| = {} exceeds 1", m2.sqrt())));
    }
    Ok((1.0 + m2).powi(3) / (1.0 + 3.0 * m2).powi(2))
}

/// `g² = (1+|J1|²) |J2 J5 + J3 J4|² / ((|J2|²+|J4|²+2Re[J1* J2 J4*]) (|J3|²+|J5|²+2Re[J1* J3 J5*]))`
pub fn g2_from_overlaps(o: &OverlapSet) -> Result<G2Result> {
    o.validate()?;
    let [j1, j2, j3, j4, j5, _] = o.j;
    let s1 = j2.norm().max(j4.norm());
    let s2 = j3.norm().max(j5.norm());
    let scale = |z: Complex64, s: f64| if s > 0.0 { z / s } else { z };
    let (j2, j4) = (scale(j2, s1), scale(j4, s1));
    let (j3, j5) = (scale(j3, s2), scale(j5, s2));

    let num = (j2 * j5 + j3 * j4).norm_sqr();
    let den1 = j2.norm_sqr() + j4.norm_sqr() + 2.0 * (j1.conj() * j2 * j4.conj()).re;
    let den2 = j3.norm_sqr() + j5.norm_sqr() + 2.0 * (j1.conj() * j3 * j5.conj()).re;
    let numerator = (1.0 + j1.norm_sqr()) * num;
    let denominator = den1 * den2;
    // Compare in logarithms so that the bare products may underflow.
    let ln_units = 2.0 * (s1.ln() + s2.ln());
    let ln_threshold = EPS_DEN.ln() + 4.0 * s1.max(s2).ln();
    let below = |x: f64| s1.max(s2) == 0.0 || !(x.ln() + ln_units >= ln_threshold);
    let flags = G2Flags {
        denominator_near_zero: below(denominator),
        numerator_near_zero: below(num),
    };
    Ok(G2Result {
        value: numerator / denominator,
        numerator,
        denominator,
        scales: [s1, s2],
        flags,
    })
}

/// `|g2_from_overlaps − g2_from_single_j(J1)|` for a matched scenario.
pub fn assert_reduction(
    s: &ScenarioSpec,
    method: Method,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if !s.is_matched() {
        return Err(Error::domain(
            "reduction needs delta == gamma, omega0 == omegad and tau == taup",
        ));
    }
    let o = compute_overlap_set(s, method, settings)?;
    let full = g2_from_overlaps(&o)?.value;
    let single = g2_from_single_j(o.j[0])?;
    Ok((full - single).abs())
}
