//! Brute-force two-photon Fock-space reference.
//!
//! The mode continuum is replaced by `N` discrete modes `a_k` with
//! quadrature weights `w_k`. Each wavepacket becomes a vector
//! `v_X[k] = α_X(x_k) √w_k`; the state `Â_i† Â_j† |0⟩` is built explicitly
//! in the occupation basis `{|1_k 1_l⟩ (k<l), |2_k⟩}` and the detection
//! expectation values are taken from explicit state vectors. No overlap
//! algebra is shared with [`crate::g2`].

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::g2::{G2Flags, G2Result, EPS_DEN};
use crate::quadrature::gauss_legendre;
use crate::spectral::{Model, ScenarioSpec, WavepacketSpec};

pub const MIN_MODES: usize = 64;
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Half-span of the Lorentzian frequency core and of the Gaussian outer
/// panels, in widths.
const SPAN_WIDTHS: f64 = 40.0;
/// Half-span of the dense Gaussian panel around the centers, in widths.
const DENSE_WIDTHS: f64 = 8.0;
/// How far before the earliest time stamp the time grid starts, in units
/// of `1/width` of the narrowest packet. Lost weight is `e^{-37}`.
const TIME_LEAD: f64 = 37.0;
const GL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeDomain {
    /// Nodes are angular frequencies and amplitudes are `α(ω)`.
    Frequency,
    /// Nodes are times and amplitudes are the rotating-frame transforms
    /// from [`WavepacketSpec::temporal_amplitude`].
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteModeGrid {
    pub domain: ModeDomain,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Frame frequency for [`ModeDomain::Time`] grids.
    pub omega_ref: f64,
}

impl DiscreteModeGrid {
    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    /// `v[k] = amplitude(x_k) · √w_k`, the annihilation-side mode vector.
    pub fn mode_vector(&self, spec: &WavepacketSpec) -> Vec<Complex64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| {
                let a = match self.domain {
                    ModeDomain::Frequency => spec.amplitude_unchecked(x),
                    ModeDomain::Time => spec.temporal_amplitude(x, self.omega_ref),
                };
                a * w.sqrt()
            })
            .collect()
    }

    /// `|Σ_k w_k |α(x_k)|² − 1|`
    pub fn normalization_error(&self, spec: &WavepacketSpec) -> f64 {
        let n: f64 = self.mode_vector(spec).iter().map(|z| z.norm_sqr()).sum();
        (n - 1.0).abs()
    }

    fn check(self, packets: &[WavepacketSpec]) -> Result<Self> {
        for p in packets {
            let e = self.normalization_error(p);
            if !(e <= NORM_TOLERANCE) {
                return Err(Error::numeric(format!(
                    "{} mode grid with N={} misses normalization by {e:e} for {p:?}; use more modes",
                    match self.domain {
                        ModeDomain::Frequency => "frequency",
                        ModeDomain::Time => "time",
                    },
                    self.count(),
                )));
            }
        }
        Ok(self)
    }
}

fn push_midpoints(nodes: &mut Vec<f64>, weights: &mut Vec<f64>, a: f64, b: f64, count: usize) {
    let h = (b - a) / count as f64;
    for k in 0..count {
        nodes.push(a + (k as f64 + 0.5) * h);
        weights.push(h);
    }
}

/// Frequency-domain grid covering every wavepacket of the scenario.
///
/// Gaussian: uniform panels `[lo−40w, lo−8w)`, `[lo−8w, hi+8w]`,
/// `(hi+8w, hi+40w]` holding 7.5 %, 85 % and 7.5 % of the nodes, with
/// `lo`/`hi` the smallest/largest center and `w = max(Δ, Γ)`.
///
/// Lorentzian: a uniform core `[lo−40w, hi+40w]` with 80 % of the nodes
/// and two mapped tails `ω = edge ± L(1/u − 1)`, `u ∈ (0, 1]`, `L = 40w`,
/// sampled at midpoints in `u`.
pub fn discretize(s: &ScenarioSpec, n: usize) -> Result<DiscreteModeGrid> {
    s.validate()?;
    if n < MIN_MODES {
        return Err(Error::domain(format!("need at least {MIN_MODES} modes, got {n}")));
    }
    let lo = s.omega0.min(s.omegad);
    let hi = s.omega0.max(s.omegad);
    let w = s.delta.max(s.gamma);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    match s.photon_model {
        Model::Gaussian => {
            let outer = ((n as f64) * 0.075).round() as usize;
            let dense = n - 2 * outer;
            push_midpoints(&mut nodes, &mut weights, lo - SPAN_WIDTHS * w, lo - DENSE_WIDTHS * w, outer);
            push_midpoints(&mut nodes, &mut weights, lo - DENSE_WIDTHS * w, hi + DENSE_WIDTHS * w, dense);
            push_midpoints(&mut nodes, &mut weights, hi + DENSE_WIDTHS * w, hi + SPAN_WIDTHS * w, outer);
        }
        Model::Lorentzian => {
            let tail = n / 10;
            let core = n - 2 * tail;
            let l = SPAN_WIDTHS * w;
            let (left, right) = (lo - l, hi + l);
            // Left tail, increasing ω: u runs from small to 1.
            for k in 0..tail {
                let u = (k as f64 + 0.5) / tail as f64;
                nodes.push(left - l * (1.0 / u - 1.0));
                weights.push(l / (tail as f64 * u * u));
            }
            push_midpoints(&mut nodes, &mut weights, left, right, core);
            for k in (0..tail).rev() {
                let u = (k as f64 + 0.5) / tail as f64;
                nodes.push(right + l * (1.0 / u - 1.0));
                weights.push(l / (tail as f64 * u * u));
            }
        }
    }
    DiscreteModeGrid {
        domain: ModeDomain::Frequency,
        nodes,
        weights,
        omega_ref: 0.5 * (s.omega0 + s.omegad),
    }
    .check(&s.wavepackets())
}

/// Time-domain Gauss–Legendre grid for the given wavepackets.
///
/// Breakpoints sit at every distinct time stamp, where the causal
/// amplitudes switch off, plus a lower end `TIME_LEAD / min width` before
/// the earliest one. `n / 8` panels of 8 nodes are shared among the
/// segments in proportion to their length, at least one per segment.
pub fn discretize_time(packets: &[WavepacketSpec], n: usize) -> Result<DiscreteModeGrid> {
    if n < MIN_MODES {
        return Err(Error::domain(format!("need at least {MIN_MODES} modes, got {n}")));
    }
    if packets.is_empty() {
        return Err(Error::domain("no wavepackets to discretize"));
    }
    for p in packets {
        p.validate()?;
        if p.model != Model::Lorentzian {
            return Err(Error::domain("time-domain grid supports the Lorentzian model only"));
        }
    }
    let min_width = packets.iter().map(|p| p.width).fold(f64::INFINITY, f64::min);
    let omega_ref =
        packets.iter().map(|p| p.center_frequency).sum::<f64>() / packets.len() as f64;
    let mut breaks: Vec<f64> = packets.iter().map(|p| p.time).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks.insert(0, breaks[0] - TIME_LEAD / min_width);

    let segments: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    let panels = n / GL_ORDER;
    if panels < segments.len() {
        return Err(Error::domain("too few modes for the number of time segments"));
    }
    let total: f64 = segments.iter().map(|(a, b)| b - a).sum();
    let spare = panels - segments.len();
    let mut alloc: Vec<usize> = segments
        .iter()
        .map(|(a, b)| 1 + ((b - a) / total * spare as f64).floor() as usize)
        .collect();
    // Hand leftover panels to the segments with the largest remainders.
    let mut order: Vec<usize> = (0..segments.len()).collect();
    let remainder = |k: usize| {
        let (a, b) = segments[k];
        let exact = (b - a) / total * spare as f64;
        exact - exact.floor()
    };
    order.sort_by(|&x, &y| remainder(y).total_cmp(&remainder(x)).then(x.cmp(&y)));
    let mut left = panels - alloc.iter().sum::<usize>();
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        alloc[k] += 1;
        left -= 1;
    }

    let (x, wgl) = gauss_legendre(GL_ORDER);
    let mut nodes = Vec::with_capacity(panels * GL_ORDER);
    let mut weights = Vec::with_capacity(panels * GL_ORDER);
    for (&(a, b), &count) in segments.iter().zip(&alloc) {
        let h = (b - a) / count as f64;
        for p in 0..count {
            let (pa, pb) = (a + p as f64 * h, a + (p + 1) as f64 * h);
            let (c, r) = (0.5 * (pa + pb), 0.5 * (pb - pa));
            for (xi, wi) in x.iter().zip(&wgl) {
                nodes.push(c + r * xi);
                weights.push(r * wi);
            }
        }
    }
    DiscreteModeGrid {
        domain: ModeDomain::Time,
        nodes,
        weights,
        omega_ref,
    }
    .check(packets)
}

/// The grid the oracle uses for a scenario: frequency nodes for Gaussian
/// packets, time nodes for Lorentzian ones. Frequency sampling of the
/// Lorentzian aliases its slowly decaying oscillatory tails and stalls at
/// percent-level g² errors.
pub fn oracle_grid(s: &ScenarioSpec, n: usize) -> Result<DiscreteModeGrid> {
    s.validate()?;
    match s.photon_model {
        Model::Gaussian => discretize(s, n),
        Model::Lorentzian => discretize_time(&s.wavepackets(), n),
    }
}

/// Unnormalized `Â_i† Â_j† |0⟩` in the occupation basis.
#[derive(Debug, Clone)]
pub struct TwoPhotonState {
    modes: usize,
    /// Packed upper triangle, row-major: `c[k][l]` for `k ≤ l`.
    /// Off-diagonal entries are coefficients of `|1_k 1_l⟩`, diagonal ones
    /// of `|2_k⟩` (carrying the bosonic `√2`).
    coefficients: Vec<Complex64>,
    /// `Σ |c|²`, the squared norm before normalization.
    pub norm_sqr: f64,
}

impl TwoPhotonState {
    /// Builds the state from the creation-side coefficients
    /// `Â_X† = Σ_k a_X[k] a_k†`.
    pub fn new(a_i: &[Complex64], a_j: &[Complex64]) -> Result<Self> {
        let modes = a_i.len();
        if modes == 0 || a_j.len() != modes {
            return Err(Error::domain("mode vectors must be non-empty and of equal length"));
        }
        let mut coefficients = Vec::with_capacity(modes * (modes + 1) / 2);
        let mut norm_sqr = 0.0;
        for k in 0..modes {
            let c = SQRT_2 * a_i[k] * a_j[k];
            norm_sqr += c.norm_sqr();
            coefficients.push(c);
            for l in k + 1..modes {
                let c = a_i[k] * a_j[l] + a_i[l] * a_j[k];
                norm_sqr += c.norm_sqr();
                coefficients.push(c);
            }
        }
        Ok(TwoPhotonState {
            modes,
            coefficients,
            norm_sqr,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    #[inline]
    fn row(&self, k: usize) -> &[Complex64] {
        let n = self.modes;
        let start = k * n - k * k.saturating_sub(1) / 2;
        &self.coefficients[start..start + (n - k)]
    }

    /// `⟨0| D̂_1 D̂_2 |ψ⟩` with `D̂_m = Σ_k d_m[k] a_k`.
    pub fn vacuum_amplitude(&self, d1: &[Complex64], d2: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..self.modes {
            let row = self.row(k);
            let mut acc = SQRT_2 * row[0] * d1[k] * d2[k];
            for (off, c) in row.iter().enumerate().skip(1) {
                let l = k + off;
                acc += c * (d1[k] * d2[l] + d1[l] * d2[k]);
            }
            total += acc;
        }
        total
    }

    /// The one-photon state `D̂ |ψ⟩` as coefficients of `|1_k⟩`.
    pub fn annihilate(&self, d: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.modes];
        for k in 0..self.modes {
            let row = self.row(k);
            out[k] += SQRT_2 * d[k] * row[0];
            for (off, c) in row.iter().enumerate().skip(1) {
                let l = k + off;
                out[k] += d[l] * c;
                out[l] += d[k] * c;
            }
        }
        out
    }
}

fn scaled_norm(v: &[Complex64]) -> f64 {
    let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|z| (z / m).norm_sqr()).sum::<f64>().sqrt()
}

/// g² from explicit photon creation vectors and detection vectors.
///
/// The two-photon amplitude is taken as `⟨0|D̂₁ (D̂₂|ψ⟩)⟩` against the
/// normalized one-photon state `D̂₂|ψ⟩ / ‖D̂₂|ψ⟩‖`, so the quotient never
/// forms products of two small detection probabilities. `scales` holds
/// `‖D̂_m|ψ̂⟩‖` for the normalized state `ψ̂`; `numerator` is the quotient
/// itself and `denominator` is 1. Underflowing one-photon norms are flagged.
pub fn oracle_g2_vectors(
    a_i: &[Complex64],
    a_j: &[Complex64],
    d1: &[Complex64],
    d2: &[Complex64],
) -> Result<G2Result> {
    let n = a_i.len();
    if [a_j.len(), d1.len(), d2.len()].iter().any(|&m| m != n) {
        return Err(Error::domain("mode vectors must share one length"));
    }
    let state = TwoPhotonState::new(a_i, a_j)?;
    let norm = state.norm_sqr;
    let phi1 = state.annihilate(d1);
    let phi2 = state.annihilate(d2);
    let (p1, p2) = (scaled_norm(&phi1), scaled_norm(&phi2));
    let scales = [p1 / norm.sqrt(), p2 / norm.sqrt()];
    let flags = G2Flags {
        denominator_near_zero: !(p1 > 0.0 && p2 > 0.0 && p1.is_finite() && p2.is_finite()),
        numerator_near_zero: false,
    };
    if flags.denominator_near_zero {
        return Ok(G2Result {
            value: f64::NAN,
            numerator: f64::NAN,
            denominator: 0.0,
            scales,
            flags: G2Flags {
                numerator_near_zero: true,
                ..flags
            },
        });
    }
    let amplitude: Complex64 = d1.iter().zip(&phi2).map(|(d, f)| d * (f / p2)).sum();
    let ratio = amplitude.norm() / p1;
    let value = norm * ratio * ratio;
    Ok(G2Result {
        value,
        numerator: value,
        denominator: 1.0,
        scales,
        flags: G2Flags {
            numerator_near_zero: !(value >= EPS_DEN),
            ..flags
        },
    })
}

/// g² for four explicit wavepackets `[i, j, d1, d2]` on a given grid.
pub fn oracle_g2_specs(packets: &[WavepacketSpec; 4], grid: &DiscreteModeGrid) -> Result<G2Result> {
    let v: Vec<Vec<Complex64>> = packets.iter().map(|p| grid.mode_vector(p)).collect();
    let a_i: Vec<Complex64> = v[0].iter().map(|z| z.conj()).collect();
    let a_j: Vec<Complex64> = v[1].iter().map(|z| z.conj()).collect();
    oracle_g2_vectors(&a_i, &a_j, &v[2], &v[3])
}

pub fn oracle_g2(s: &ScenarioSpec, n: usize) -> Result<G2Result> {
    let grid = oracle_grid(s, n)?;
    oracle_g2_specs(&s.wavepackets(), &grid)
}

/// `(⟨Â_j†Â_i†Â_iÂ_j⟩, ⟨Â_i†Â_i⟩⟨Â_j†Â_j⟩)` for the normalized state, with
/// the detectors taken to be the photon modes themselves.
pub fn oracle_moments(s: &ScenarioSpec, n: usize) -> Result<(f64, f64)> {
    if !s.is_matched() {
        return Err(Error::domain("moments need matched detectors"));
    }
    let grid = oracle_grid(s, n)?;
    let vi = grid.mode_vector(&s.photon_i());
    let vj = grid.mode_vector(&s.photon_j());
    let a_i: Vec<Complex64> = vi.iter().map(|z| z.conj()).collect();
    let a_j: Vec<Complex64> = vj.iter().map(|z| z.conj()).collect();
    let state = TwoPhotonState::new(&a_i, &a_j)?;
    let norm = state.norm_sqr;
    let amp = state.vacuum_amplitude(&vi, &vj).norm_sqr() / norm;
    let ni = state.annihilate(&vi).iter().map(|z| z.norm_sqr()).sum::<f64>() / norm;
    let nj = state.annihilate(&vj).iter().map(|z| z.norm_sqr()).sum::<f64>() / norm;
    Ok((amp, ni * nj))
}
