//! The six overlap parameters `J_ab = [â, b̂†] = ∫ α_a(ω) α_b*(ω) dω`.
//!
//! Ordering: J1 = (i, j), J2 = (i, d1), J3 = (i, d2), J4 = (j, d1),
//! J5 = (j, d2), J6 = (d1, d2), where i, j are the photons and d1, d2 the
//! detections.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real_line, integrate_real_line_oscillatory, QuadratureSettings};
use crate::spectral::{Model, ScenarioSpec, WavepacketSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "closed_form" | "closed" | "analytic" => Ok(Method::ClosedForm),
            "quadrature" | "quad" => Ok(Method::Quadrature),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Pairs `(a, b)` of wavepacket indices `[i, j, d1, d2]` for J1..J6.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapSet {
    /// `[J1, J2, J3, J4, J5, J6]`
    pub j: [Complex64; 6],
    pub method: Method,
    pub scenario: ScenarioSpec,
}

impl OverlapSet {
    pub fn magnitudes(&self) -> [f64; 6] {
        self.j.map(|z| z.norm())
    }

    /// Overlaps after multiplying each wavepacket amplitude by `e^{iφ}`,
    /// with phases ordered `[i, j, d1, d2]`.
    pub fn regauged(&self, phases: [f64; 4]) -> OverlapSet {
        let mut out = *self;
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            out.j[k] = self.j[k] * Complex64::from_polar(1.0, phases[a] - phases[b]);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (k, z) in self.j.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::domain(format!("J{} is not finite", k + 1)));
            }
        }
        Ok(())
    }
}

/// `∫ α_a(ω) α_b*(ω) dω` by adaptive quadrature over the full real line.
pub fn overlap_quadrature(
    a: &WavepacketSpec,
    b: &WavepacketSpec,
    settings: &QuadratureSettings,
) -> Result<Complex64> {
    a.validate()?;
    b.validate()?;
    let width = a.width.max(b.width);
    let centers = [a.center_frequency, b.center_frequency];
    let omega_ref = 0.5 * (a.center_frequency + b.center_frequency);
    let est = match a.product_kernel(b, omega_ref) {
        Some(kernel) => {
            // Carrier of the product: e^{+iωs} for Gaussians, e^{-iωs} for
            // the causal Lorentzian, with s = t_a - t_b.
            let s = a.time - b.time;
            let kappa = match a.model {
                Model::Gaussian => s,
                Model::Lorentzian => -s,
            };
            let offsets = centers.map(|c| c - omega_ref);
            integrate_real_line_oscillatory(kernel, kappa, &offsets, width, settings)?
        }
        None => {
            let (a, b) = (*a, *b);
            integrate_real_line(
                move |w| a.amplitude_unchecked(w) * b.amplitude_unchecked(w).conj(),
                &centers,
                width,
                settings,
            )?
        }
    };
    Ok(est.value)
}

/// Causal-Lorentzian cross overlap between amplitudes centered at `omega_a`,
/// `omega_b` with widths `delta_a`, `delta_b` and time offset `s = t_a - t_b`:
///
/// `√(Δa Δb) / ((Δa+Δb)/2 + i(ωa−ωb)) · [e^{−iωa s} θ(s) e^{−Δa s/2} + e^{−iωb s} θ(−s) e^{Δb s/2}]`
///
/// with `θ(0) = 1/2`.
pub fn lorentzian_cross_overlap(
    omega_a: f64,
    omega_b: f64,
    delta_a: f64,
    delta_b: f64,
    s: f64,
) -> Result<Complex64> {
    if ![omega_a, omega_b, delta_a, delta_b, s].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("non-finite argument to lorentzian_cross_overlap"));
    }
    if !(delta_a > 0.0 && delta_b > 0.0) {
        return Err(Error::domain("widths must be positive"));
    }
    let c = lorentzian_constant(omega_a, omega_b, delta_a, delta_b);
    let forward = Complex64::from_polar((-0.5 * delta_a * s).exp(), -omega_a * s);
    let backward = Complex64::from_polar((0.5 * delta_b * s).exp(), -omega_b * s);
    let bracket = if s > 0.0 {
        forward
    } else if s < 0.0 {
        backward
    } else {
        0.5 * (forward + backward)
    };
    Ok(c * bracket)
}

fn lorentzian_constant(omega_a: f64, omega_b: f64, delta_a: f64, delta_b: f64) -> Complex64 {
    (delta_a * delta_b).sqrt() / Complex64::new(0.5 * (delta_a + delta_b), omega_a - omega_b)
}

/// Gaussian cross overlap, `s = t_a - t_b`, `S = Δa² + Δb²`:
///
/// `√(2ΔaΔb/S) · exp(−(ωa−ωb)²/(4S) − s²Δa²Δb²/S) · exp(i(ωb−ωa)(t_aΔa² + t_bΔb²)/S)`
pub fn gaussian_cross_overlap(a: &WavepacketSpec, b: &WavepacketSpec) -> Complex64 {
    let (da2, db2) = (a.width * a.width, b.width * b.width);
    let sum = da2 + db2;
    let dw = a.center_frequency - b.center_frequency;
    let s = a.time - b.time;
    let magnitude = (2.0 * a.width * b.width / sum).sqrt()
        * (-dw * dw / (4.0 * sum) - s * s * da2 * db2 / sum).exp();
    let phase = -dw * (a.time * da2 + b.time * db2) / sum;
    Complex64::from_polar(magnitude, phase)
}

/// Closed-form overlap for two wavepackets of the same model.
pub fn cross_overlap_closed(a: &WavepacketSpec, b: &WavepacketSpec) -> Result<Complex64> {
    a.validate()?;
    b.validate()?;
    match (a.model, b.model) {
        (Model::Gaussian, Model::Gaussian) => Ok(gaussian_cross_overlap(a, b)),
        (Model::Lorentzian, Model::Lorentzian) => lorentzian_cross_overlap(
            a.center_frequency,
            b.center_frequency,
            a.width,
            b.width,
            a.time - b.time,
        ),
        (ma, mb) => Err(Error::UnsupportedMethod(format!("mixed {ma}/{mb} overlap"))),
    }
}

/// Lorentzian J1..J6 written out in terms of the photon/detector constant
/// `C = √(ΔΓ)/((Δ+Γ)/2 + i(ω₀−ω₀ᵈ))` and the causal decay factors.
pub fn lorentzian_overlap_set(s: &ScenarioSpec) -> Result<OverlapSet> {
    s.validate()?;
    if s.photon_model != Model::Lorentzian {
        return Err(Error::domain("lorentzian_overlap_set needs the Lorentzian model"));
    }
    let (w0, wd, d, g) = (s.omega0, s.omegad, s.delta, s.gamma);
    let c = lorentzian_constant(w0, wd, d, g);
    // u = t_photon - t_detection
    let step = |u: f64, wa: f64, wb: f64, xa: f64, xb: f64| -> Complex64 {
        let forward = Complex64::from_polar((-0.5 * xa * u).exp(), -wa * u);
        let backward = Complex64::from_polar((0.5 * xb * u).exp(), -wb * u);
        if u > 0.0 {
            forward
        } else if u < 0.0 {
            backward
        } else {
            0.5 * (forward + backward)
        }
    };
    let j1 = Complex64::from_polar((-0.5 * d * s.taup.abs()).exp(), w0 * s.taup);
    let j2 = c;
    let j3 = c * step(-s.tau, w0, wd, d, g);
    let j4 = c * step(s.taup, w0, wd, d, g);
    let j5 = c * step(s.taup - s.tau, w0, wd, d, g);
    let j6 = lorentzian_cross_overlap(wd, wd, g, g, -s.tau)?;
    Ok(OverlapSet {
        j: [j1, j2, j3, j4, j5, j6],
        method: Method::ClosedForm,
        scenario: *s,
    })
}

fn gaussian_overlap_set(s: &ScenarioSpec) -> Result<OverlapSet> {
    let w = s.wavepackets();
    let j = PAIRS.map(|(a, b)| gaussian_cross_overlap(&w[a], &w[b]));
    Ok(OverlapSet {
        j,
        method: Method::ClosedForm,
        scenario: *s,
    })
}

pub fn compute_overlap_set(
    s: &ScenarioSpec,
    method: Method,
    settings: &QuadratureSettings,
) -> Result<OverlapSet> {
    s.validate()?;
    match method {
        Method::ClosedForm => match s.photon_model {
            Model::Gaussian => gaussian_overlap_set(s),
            Model::Lorentzian => lorentzian_overlap_set(s),
        },
        Method::Quadrature => {
            let w = s.wavepackets();
            let mut j = [Complex64::new(0.0, 0.0); 6];
            for (k, &(a, b)) in PAIRS.iter().enumerate() {
                j[k] = overlap_quadrature(&w[a], &w[b], settings)?;
            }
            Ok(OverlapSet {
                j,
                method,
                scenario: *s,
            })
        }
    }
}

/// `e^{−(2π)²|τ|Δ}`, the kernel behind the first panel of the overview figure.
pub fn legacy_fig1a_kernel(tau: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !tau.is_finite() || !delta.is_finite() {
        return Err(Error::domain("legacy kernel needs finite tau and delta > 0"));
    }
    Ok((-(2.0 * PI).powi(2) * tau.abs() * delta).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(q: Complex64, c: Complex64) -> f64 {
        (q - c).norm() / c.norm().max(1e-6)
    }

    fn scenario(model: Model, wd: f64, g: f64, taup: f64, tau: f64) -> ScenarioSpec {
        ScenarioSpec {
            photon_model: model,
            omega0: 5e14,
            delta: 1e12,
            taup,
            omegad: wd,
            gamma: g,
            tau,
        }
    }

    #[test]
    fn self_overlap_is_one_by_quadrature() {
        let settings = QuadratureSettings::default();
        for model in [Model::Gaussian, Model::Lorentzian] {
            let a = WavepacketSpec::new(model, 5e14, 1e12, 2e-12).unwrap();
            let j = overlap_quadrature(&a, &a, &settings).unwrap();
            assert!((j - 1.0).norm() < 1e-10, "{model}: {j}");
        }
    }

    #[test]
    fn gaussian_j1_matches_fourier_transform() {
        let settings = QuadratureSettings::default();
        let s = scenario(Model::Gaussian, 5e14, 1e12, 1e-12, 0.0);
        let q = overlap_quadrature(&s.photon_i(), &s.photon_j(), &settings).unwrap();
        assert!((q.norm() - (-0.5f64).exp()).abs() < 1e-8);
        let c = gaussian_cross_overlap(&s.photon_i(), &s.photon_j());
        assert!(rel(q, c) < 1e-8);
    }

    #[test]
    fn all_ones_when_everything_coincides() {
        for model in [Model::Gaussian, Model::Lorentzian] {
            let s = scenario(model, 5e14, 1e12, 0.0, 0.0);
            let o = compute_overlap_set(&s, Method::ClosedForm, &Default::default()).unwrap();
            for z in o.j {
                assert!((z - 1.0).norm() < 1e-15, "{model}: {z}");
            }
        }
    }

    #[test]
    fn matched_detectors_give_unit_j2_j5() {
        for model in [Model::Gaussian, Model::Lorentzian] {
            let s = scenario(model, 5e14, 1e12, 1.3e-12, 1.3e-12);
            let o = compute_overlap_set(&s, Method::ClosedForm, &Default::default()).unwrap();
            let [j1, j2, j3, j4, j5, _] = o.j;
            assert!((j2 - 1.0).norm() < 1e-12);
            assert!((j5 - 1.0).norm() < 1e-12);
            assert!(((j1 * j3).norm() - j1.norm_sqr()).abs() < 1e-12);
            assert!(((j1 * j4).norm() - j1.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn lorentzian_closed_form_matches_quadrature() {
        let s = scenario(Model::Lorentzian, 4.5e14, 1e12, 1.5e-12, 1e-12);
        let closed = compute_overlap_set(&s, Method::ClosedForm, &Default::default()).unwrap();
        let quad = compute_overlap_set(&s, Method::Quadrature, &Default::default()).unwrap();
        for k in 0..6 {
            assert!(rel(quad.j[k], closed.j[k]) < 1e-8, "J{}: {} vs {}", k + 1, quad.j[k], closed.j[k]);
        }
    }

    #[test]
    fn gaussian_closed_form_matches_quadrature() {
        let s = scenario(Model::Gaussian, 4.97e14, 0.77e12, 2.5e-12, -1e-12);
        let closed = compute_overlap_set(&s, Method::ClosedForm, &Default::default()).unwrap();
        let quad = compute_overlap_set(&s, Method::Quadrature, &Default::default()).unwrap();
        for k in 0..6 {
            assert!(rel(quad.j[k], closed.j[k]) < 1e-8, "J{}: {} vs {}", k + 1, quad.j[k], closed.j[k]);
        }
    }

    #[test]
    fn lorentzian_constant_magnitude() {
        let s = scenario(Model::Lorentzian, 4.5e14, 1e12, 0.0, 0.0);
        let o = lorentzian_overlap_set(&s).unwrap();
        assert!((o.j[1].norm() - 1.0 / 2501f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lorentzian_j1_decay() {
        let s = scenario(Model::Lorentzian, 4.5e14, 1e12, 2e-12, 0.0);
        let o = lorentzian_overlap_set(&s).unwrap();
        assert!((o.j[0].norm() - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn identity_reduces_to_single_packet_form() {
        let (w, d, tau) = (5e14, 1e12, 0.7e-12);
        let z = lorentzian_cross_overlap(w, w, d, d, tau).unwrap();
        let expected = Complex64::from_polar((-0.5 * d * tau).exp(), -w * tau);
        assert!((z - expected).norm() < 1e-14);
    }

    #[test]
    fn heaviside_seam_is_continuous() {
        let s0 = scenario(Model::Lorentzian, 4.5e14, 0.8e12, 1e-12, 0.0);
        let c = lorentzian_overlap_set(&s0).unwrap().j[1];
        for eps in [1e-21, -1e-21] {
            let j3 = lorentzian_overlap_set(&ScenarioSpec { tau: eps, ..s0 }).unwrap().j[2];
            assert!((j3 - c).norm() < 1e-6 * c.norm());
            let j5 = lorentzian_overlap_set(&ScenarioSpec { tau: s0.taup + eps, ..s0 }).unwrap().j[4];
            assert!((j5 - c).norm() < 1e-6 * c.norm());
        }
        let at_seam = lorentzian_overlap_set(&ScenarioSpec { tau: 0.0, ..s0 }).unwrap().j[2];
        assert!((at_seam - c).norm() < 1e-15);
    }

    #[test]
    fn closed_forms_agree_with_identity_pairwise() {
        let s = scenario(Model::Lorentzian, 4.8e14, 1.7e12, -0.4e-12, 2.2e-12);
        let set = lorentzian_overlap_set(&s).unwrap();
        let w = s.wavepackets();
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            let z = cross_overlap_closed(&w[a], &w[b]).unwrap();
            assert!((z - set.j[k]).norm() < 1e-14, "J{}", k + 1);
        }
    }

    #[test]
    fn mixed_models_have_no_closed_form() {
        let a = WavepacketSpec::new(Model::Gaussian, 5e14, 1e12, 0.0).unwrap();
        let b = WavepacketSpec::new(Model::Lorentzian, 5e14, 1e12, 0.0).unwrap();
        assert!(matches!(cross_overlap_closed(&a, &b), Err(Error::UnsupportedMethod(_))));
    }

    #[test]
    fn legacy_kernel_values() {
        assert_eq!(legacy_fig1a_kernel(0.0, 1.0).unwrap(), 1.0);
        let t = 1.0 / (2.0 * PI).powi(2);
        assert!((legacy_fig1a_kernel(t, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let mut last = 1.0;
        for k in 1..50 {
            let v = legacy_fig1a_kernel(k as f64 * 0.01, 1.0).unwrap();
            assert!(v < last && v > 0.0);
            last = v;
        }
        assert!(legacy_fig1a_kernel(0.1, 0.0).is_err());
    }

    #[test]
    fn regauging_rotates_phases() {
        let s = scenario(Model::Gaussian, 4.5e14, 1e12, 1e-12, 2e-12);
        let o = compute_overlap_set(&s, Method::ClosedForm, &Default::default()).unwrap();
        let g = o.regauged([0.3, -1.1, 2.0, 0.5]);
        for (x, y) in g.magnitudes().iter().zip(o.magnitudes()) {
            assert!((x - y).abs() <= 1e-15 * y);
        }
        assert!((g.j[0] - o.j[0] * Complex64::from_polar(1.0, 1.4)).norm() < 1e-15);
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("closed-form".parse::<Method>().unwrap(), Method::ClosedForm);
        assert_eq!("quadrature".parse::<Method>().unwrap(), Method::Quadrature);
        assert!("simpson".parse::<Method>().is_err());
    }
}
