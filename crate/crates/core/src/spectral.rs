//! Photon and detector spectral amplitudes.
//!
//! Two models are supported:
//!
//! * Gaussian: `α(ω) = (2πΔ²)^(-1/4) exp[-i(ω₀-ω)t - (ω₀-ω)²/(4Δ²)]`
//! * causal Lorentzian: `α(ω) = i√(Δ/2π) exp(-iωt) / (ω - ω₀ + iΔ/2)`
//!
//! Both are square-normalized over the full real frequency line. Detector
//! responses use the same forms with the detector center, bandwidth and
//! detection time. Frequencies are plain angular values in s⁻¹ and times
//! are in seconds; no factors of 2π are inserted anywhere.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real_line, QuadratureSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Gaussian,
    #[serde(alias = "lorentzian_causal")]
    Lorentzian,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Gaussian => "gaussian",
            Model::Lorentzian => "lorentzian",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Model::Gaussian),
            "lorentzian" | "lorentzian_causal" | "causal" => Ok(Model::Lorentzian),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// One emitter or detector spectral amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub model: Model,
    /// Center angular frequency (s⁻¹).
    pub center_frequency: f64,
    /// Spectral width (s⁻¹).
    pub width: f64,
    /// Emission or detection time stamp (s).
    pub time: f64,
}

impl WavepacketSpec {
    pub fn new(model: Model, center_frequency: f64, width: f64, time: f64) -> Result<Self> {
        let spec = WavepacketSpec {
            model,
            center_frequency,
            width,
            time,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::domain(format!("width must be positive, got {}", self.width)));
        }
        if !(self.center_frequency > 0.0 && self.center_frequency.is_finite()) {
            return Err(Error::domain(format!(
                "center frequency must be positive, got {}",
                self.center_frequency
            )));
        }
        if !self.time.is_finite() {
            return Err(Error::domain("time stamp must be finite"));
        }
        Ok(())
    }

    /// Spectral amplitude at angular frequency `omega`.
    pub fn amplitude(&self, omega: f64) -> Result<Complex64> {
        if !omega.is_finite() {
            return Err(Error::domain("frequency must be finite"));
        }
        Ok(self.amplitude_unchecked(omega))
    }

    #[inline]
    pub(crate) fn amplitude_unchecked(&self, omega: f64) -> Complex64 {
        match self.model {
            Model::Gaussian => {
                let detuning = self.center_frequency - omega;
                let norm = (2.0 * PI * self.width * self.width).powf(-0.25);
                let envelope = (-detuning * detuning / (4.0 * self.width * self.width)).exp();
                Complex64::from_polar(norm * envelope, -detuning * self.time)
            }
            Model::Lorentzian => {
                let prefactor = Complex64::new(0.0, (self.width / (2.0 * PI)).sqrt());
                let carrier = Complex64::from_polar(1.0, -omega * self.time);
                let pole = Complex64::new(omega - self.center_frequency, 0.5 * self.width);
                prefactor * carrier / pole
            }
        }
    }

    /// `x ↦ α_self(ω_ref + x) · α_other(ω_ref + x)*` with the shared factors
    /// hoisted. Working in the offset `x` keeps the detunings exact: at
    /// ω ~ 1e15 the spacing of representable frequencies is already
    /// comparable to the resolution an overlap of 1e-9 needs. Both packets
    /// must share a model.
    pub(crate) fn product_kernel(
        &self,
        other: &WavepacketSpec,
        omega_ref: f64,
    ) -> Option<impl Fn(f64) -> Complex64 + Copy> {
        if self.model != other.model {
            return None;
        }
        let model = self.model;
        let (wa, wb) = (
            self.center_frequency - omega_ref,
            other.center_frequency - omega_ref,
        );
        let (da, db) = (self.width, other.width);
        let (ta, tb) = (self.time, other.time);
        let s = ta - tb;
        let (norm, ia, ib) = match model {
            Model::Gaussian => (
                Complex64::from(
                    (2.0 * PI * da * da).powf(-0.25) * (2.0 * PI * db * db).powf(-0.25),
                ),
                1.0 / (4.0 * da * da),
                1.0 / (4.0 * db * db),
            ),
            Model::Lorentzian => (
                Complex64::from_polar((da * db).sqrt() / (2.0 * PI), -omega_ref * s),
                0.0,
                0.0,
            ),
        };
        Some(move |x: f64| match model {
            Model::Gaussian => {
                let (xa, xb) = (wa - x, wb - x);
                let envelope = (-xa * xa * ia - xb * xb * ib).exp();
                norm * Complex64::from_polar(envelope, -xa * ta + xb * tb)
            }
            Model::Lorentzian => {
                let pa = Complex64::new(x - wa, 0.5 * da);
                let pb = Complex64::new(x - wb, -0.5 * db);
                norm * Complex64::from_polar(1.0, -x * s) / (pa * pb)
            }
        })
    }

    /// Time-domain amplitude of the same mode, `ψ(t) = (2π)^(-1/2) ∫ α(ω) e^{iωt} dω`,
    /// multiplied by the common frame rotation `e^{-i ω_ref t}`.
    ///
    /// The rotation is a single unitary applied to every mode, so overlaps
    /// between any two amplitudes evaluated with the same `omega_ref` equal
    /// the frequency-domain overlaps.
    ///
    /// * Gaussian: `(2Δ²/π)^(1/4) e^{i(ω₀-ω_ref)t} e^{-Δ²(t+t₀)²}`
    /// * Lorentzian: `√Δ e^{(Δ/2)(t-t₀)} e^{i(ω₀-ω_ref)(t-t₀) - iω_ref t₀}` for `t < t₀`, zero after.
    pub fn temporal_amplitude(&self, t: f64, omega_ref: f64) -> Complex64 {
        let w = self.width;
        match self.model {
            Model::Gaussian => {
                let u = t + self.time;
                let norm = (2.0 * w * w / PI).powf(0.25);
                Complex64::from_polar(
                    norm * (-w * w * u * u).exp(),
                    (self.center_frequency - omega_ref) * t,
                )
            }
            Model::Lorentzian => {
                let u = t - self.time;
                let envelope = if u < 0.0 {
                    w.sqrt() * (0.5 * w * u).exp()
                } else if u == 0.0 {
                    0.5 * w.sqrt()
                } else {
                    0.0
                };
                Complex64::from_polar(
                    envelope,
                    (self.center_frequency - omega_ref) * u - omega_ref * self.time,
                )
            }
        }
    }
}

/// Full experiment: two photons sharing ω₀ and Δ separated by `taup`, two
/// detections sharing ω₀ᵈ and Γ separated by `tau`. The first photon and the
/// first detection both sit at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub photon_model: Model,
    pub omega0: f64,
    pub delta: f64,
    pub taup: f64,
    pub omegad: f64,
    pub gamma: f64,
    pub tau: f64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega0", self.omega0),
            ("delta", self.delta),
            ("omegad", self.omegad),
            ("gamma", self.gamma),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.taup.is_finite() || !self.tau.is_finite() {
            return Err(Error::domain("taup and tau must be finite"));
        }
        Ok(())
    }

    /// The matched configuration: detectors identical to the photons and
    /// detection separation equal to the source separation.
    pub fn is_matched(&self) -> bool {
        self.delta == self.gamma && self.omega0 == self.omegad && self.tau == self.taup
    }

    pub fn photon_i(&self) -> WavepacketSpec {
        self.packet(self.omega0, self.delta, 0.0)
    }

    pub fn photon_j(&self) -> WavepacketSpec {
        self.packet(self.omega0, self.delta, self.taup)
    }

    pub fn detection_1(&self) -> WavepacketSpec {
        self.packet(self.omegad, self.gamma, 0.0)
    }

    pub fn detection_2(&self) -> WavepacketSpec {
        self.packet(self.omegad, self.gamma, self.tau)
    }

    /// `[photon_i, photon_j, detection_1, detection_2]`
    pub fn wavepackets(&self) -> [WavepacketSpec; 4] {
        [
            self.photon_i(),
            self.photon_j(),
            self.detection_1(),
            self.detection_2(),
        ]
    }

    fn packet(&self, center_frequency: f64, width: f64, time: f64) -> WavepacketSpec {
        WavepacketSpec {
            model: self.photon_model,
            center_frequency,
            width,
            time,
        }
    }
}

/// `|∫|α(ω)|² dω − 1|` under the reference quadrature.
pub fn check_normalization(spec: &WavepacketSpec, settings: &QuadratureSettings) -> Result<f64> {
    spec.validate()?;
    let s = *spec;
    let est = integrate_real_line(
        move |w| Complex64::new(s.amplitude_unchecked(w).norm_sqr(), 0.0),
        &[spec.center_frequency],
        spec.width,
        settings,
    )?;
    Ok((est.value.re - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(w0: f64, d: f64, t: f64) -> WavepacketSpec {
        WavepacketSpec::new(Model::Gaussian, w0, d, t).unwrap()
    }

    fn lorentzian(w0: f64, d: f64, t: f64) -> WavepacketSpec {
        WavepacketSpec::new(Model::Lorentzian, w0, d, t).unwrap()
    }

    #[test]
    fn gaussian_peak_is_real() {
        let d = 1e12;
        let a = gaussian(5e14, d, 0.0).amplitude(5e14).unwrap();
        let expected = (2.0 * PI * d * d).powf(-0.25);
        assert!((a.re - expected).abs() <= 1e-15 * expected);
        assert_eq!(a.im, 0.0);
    }

    #[test]
    fn lorentzian_pole_center_is_real() {
        let d = 1e12;
        let a = lorentzian(5e14, d, 0.0).amplitude(5e14).unwrap();
        let expected = (2.0 / (PI * d)).sqrt();
        assert!((a.re - expected).abs() <= 1e-14 * expected);
        assert!(a.im.abs() <= 1e-14 * expected);
    }

    #[test]
    fn gaussian_two_widths_off_center() {
        // (2π·10²⁴)^(-1/4)·e^(-1)
        let a = gaussian(5e14, 1e12, 0.0).amplitude(5e14 + 2e12).unwrap();
        let expected = (2.0 * PI * 1e24f64).powf(-0.25) * (-1.0f64).exp();
        assert!((a.norm() - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn non_finite_frequency_is_domain_error() {
        let g = gaussian(5e14, 1e12, 0.0);
        assert!(matches!(g.amplitude(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(g.amplitude(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(WavepacketSpec::new(Model::Gaussian, 5e14, 0.0, 0.0).is_err());
        assert!(WavepacketSpec::new(Model::Gaussian, -1.0, 1e12, 0.0).is_err());
        assert!(WavepacketSpec::new(Model::Lorentzian, 5e14, 1e12, f64::NAN).is_err());
    }

    #[test]
    fn normalization_both_models() {
        let settings = QuadratureSettings::default();
        for d in [1e11, 1e12, 1e13] {
            for t in [0.0, 2.5e-12] {
                let g = check_normalization(&gaussian(5e14, d, t), &settings).unwrap();
                assert!(g < 1e-8, "gaussian Δ={d}: {g}");
                let l = check_normalization(&lorentzian(5e14, d, t), &settings).unwrap();
                assert!(l < 1e-8, "lorentzian Δ={d}: {l}");
            }
        }
    }

    #[test]
    fn power_spectrum_is_even_about_center() {
        for spec in [gaussian(5e14, 1e12, 3e-12), lorentzian(5e14, 1e12, 3e-12)] {
            for x in [0.1e12, 0.7e12, 3e12, 40e12] {
                let above = spec.amplitude(5e14 + x).unwrap().norm_sqr();
                let below = spec.amplitude(5e14 - x).unwrap().norm_sqr();
                assert!((above - below).abs() <= 1e-12 * above);
            }
        }
    }

    #[test]
    fn product_kernel_matches_amplitude_product() {
        for model in [Model::Gaussian, Model::Lorentzian] {
            let a = WavepacketSpec::new(model, 5e14, 1.3e12, 2e-12).unwrap();
            let b = WavepacketSpec::new(model, 4.9e14, 0.7e12, -1e-12).unwrap();
            let k = a.product_kernel(&b, 4.9e14).unwrap();
            for w in [4.8e14, 4.9e14, 4.95e14, 5e14, 5.01e14, 7e14, -3e16] {
                let direct = a.amplitude(w).unwrap() * b.amplitude(w).unwrap().conj();
                let fused = k(w - 4.9e14);
                assert!((fused - direct).norm() <= 1e-11 * direct.norm().max(1e-300), "{model} {w}");
            }
        }
        let g = WavepacketSpec::new(Model::Gaussian, 5e14, 1e12, 0.0).unwrap();
        let l = WavepacketSpec::new(Model::Lorentzian, 5e14, 1e12, 0.0).unwrap();
        assert!(g.product_kernel(&l, 0.0).is_none());
    }

    #[test]
    fn model_names_round_trip() {
        for m in [Model::Gaussian, Model::Lorentzian] {
            assert_eq!(m.to_string().parse::<Model>().unwrap(), m);
        }
        assert!("cauchy".parse::<Model>().is_err());
    }

    #[test]
    fn matched_scenario_detection() {
        let s = ScenarioSpec {
            photon_model: Model::Gaussian,
            omega0: 5e14,
            delta: 1e12,
            taup: 1e-12,
            omegad: 5e14,
            gamma: 1e12,
            tau: 1e-12,
        };
        assert!(s.is_matched());
        assert_eq!(s.photon_i(), s.detection_1());
        assert_eq!(s.photon_j(), s.detection_2());
    }
}
