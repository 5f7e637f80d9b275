//! Adaptive Gauss–Kronrod quadrature for complex integrands, plus a
//! real-line driver that grows the domain by doubling.
//!
//! The real-line driver is what the overlap oracle uses: Lorentzian
//! amplitude products decay only like 1/ω², so the integral is accumulated
//! panel by panel until a freshly appended pair of panels stops
//! contributing at the requested relative tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule
// (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.000_000_000_000_000_0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Weight of the L1 norm in the convergence target. Integrals that are
/// small only through cancellation are resolved relative to
/// `L1_FRACTION * ∫|f|` instead of their own (roundoff-limited) magnitude.
const L1_FRACTION: f64 = 1e-4;

const MAX_INTERVALS: usize = 2_000_000;
/// Cap on the initial one-panel-per-width split of the core domain.
const MAX_CORE_PANELS: usize = 4096;

/// Settings for [`integrate_real_line`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSettings {
    pub relative_tolerance: f64,
    /// Initial half-width of the core domain beyond the outermost center,
    /// in units of the widest spectral width.
    pub initial_half_width_multiplier: f64,
    pub max_domain_doublings: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            relative_tolerance: 1e-10,
            initial_half_width_multiplier: 40.0,
            // 1/ω² tails of a non-oscillating product need roughly 30
            // doublings before the appended panels drop below 1e-10.
            max_domain_doublings: 64,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance.is_finite()) {
            return Err(Error::domain("relative_tolerance must be positive"));
        }
        if !(self.initial_half_width_multiplier >= 1.0
            && self.initial_half_width_multiplier.is_finite())
        {
            return Err(Error::domain("initial_half_width_multiplier must be >= 1"));
        }
        if self.max_domain_doublings < 1 {
            return Err(Error::domain("max_domain_doublings must be >= 1"));
        }
        Ok(())
    }
}

/// Integral estimate with its error bound and the integral of |f|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub l1: f64,
    pub evaluations: usize,
}

impl Estimate {
    fn zero() -> Self {
        Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            l1: 0.0,
            evaluations: 0,
        }
    }

    fn add(&mut self, other: &Estimate) {
        self.value += other.value;
        self.error += other.error;
        self.l1 += other.l1;
        self.evaluations += other.evaluations;
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    l1: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Segment
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut pairs = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.norm() * WGK[7];
    for (k, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let (f1, f2) = (f(center - dx), f(center + dx));
        pairs[k] = (f1, f2);
        kronrod += (f1 + f2) * WGK[k];
        l1 += (f1.norm() + f2.norm()) * WGK[k];
        if k % 2 == 1 {
            gauss += (f1 + f2) * WG[k / 2];
        }
    }
    // QUADPACK error scaling: |K - G| is measured against the integral of
    // |f - mean|, which is far less pessimistic once the rule has converged.
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[7];
    for (k, (f1, f2)) in pairs.iter().enumerate() {
        asc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[k];
    }
    let scale = half.abs();
    let (asc, l1) = (asc * scale, l1 * scale);
    let raw = ((kronrod - gauss) * half).norm();
    let mut error = raw;
    if asc > 0.0 && raw > 0.0 {
        error = asc * (200.0 * raw / asc).powf(1.5).min(1.0);
    }
    // Floor the estimate at the roundoff level of the rule.
    let error = error.max(2.0 * f64::EPSILON * l1);
    Segment {
        a,
        b,
        value: kronrod * half,
        error,
        l1,
    }
}

/// Global adaptive Gauss–Kronrod on `[a, b]`.
///
/// Converges when the summed error estimate drops below
/// `max(abs_tol, rel_tol * max(|I|, 1e-4 * ∫|f|))`.
pub fn adaptive<F>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    adaptive_panels(f, a, b, 1, rel_tol, abs_tol)
}

/// [`adaptive`] starting from `panels` equal subintervals, so that no
/// feature narrower than the initial rule spacing can slip between nodes.
pub fn adaptive_panels<F>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration bounds must be finite"));
    }
    if a == b {
        return Ok(Estimate::zero());
    }
    let panels = panels.max(1);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut l1 = 0.0;
    let mut heap = BinaryHeap::with_capacity(2 * panels);
    for k in 0..panels {
        let lo = if k == 0 { a } else { a + (b - a) * (k as f64 / panels as f64) };
        let hi = if k + 1 == panels { b } else { a + (b - a) * ((k + 1) as f64 / panels as f64) };
        let seg = gauss_kronrod(f, lo, hi);
        value += seg.value;
        error += seg.error;
        l1 += seg.l1;
        heap.push(seg);
    }
    let target =
        |value: Complex64, l1: f64| abs_tol.max(rel_tol * value.norm().max(L1_FRACTION * l1));

    while error > target(value, l1) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Numeric {
                message: format!(
                    "adaptive quadrature on [{a:e}, {b:e}] exceeded {MAX_INTERVALS} intervals"
                ),
                last: Some([value.re, value.im]),
                previous: None,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in f64; accept what we have.
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod(f, worst.a, mid);
        let right = gauss_kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::numeric("integrand produced non-finite values"));
        }
    }

    // Re-sum to shed the drift of the running updates.
    let (mut v, mut e, mut n) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    let count = heap.len();
    for s in heap {
        v += s.value;
        e += s.error;
        n += s.l1;
    }
    Ok(Estimate {
        value: v,
        error: e,
        l1: n,
        evaluations: count * 15,
    })
}

/// Integrate `f` over the whole real line.
///
/// The core domain spans `[min(centers) - m*width, max(centers) + m*width]`
/// with `m = settings.initial_half_width_multiplier`. Its half-width `H`
/// about the midpoint is then doubled repeatedly; each doubling appends
/// `[c-2H, c-H]` and `[c+H, c+2H]`. Integration stops once two consecutive
/// doublings each contribute less than the relative tolerance.
pub fn integrate_real_line<F>(
    f: F,
    centers: &[f64],
    width: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    integrate_real_line_oscillatory(f, 0.0, centers, width, settings)
}

/// [`integrate_real_line`] for integrands of the form `g(x) e^{iκx}` with
/// `g` smooth away from the centers. Appended panels spanning many periods
/// of the carrier are integrated with Levin collocation instead of being
/// resolved period by period; `kappa = 0` disables this.
pub fn integrate_real_line_oscillatory<F>(
    f: F,
    kappa: f64,
    centers: &[f64],
    width: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    settings.validate()?;
    if centers.is_empty() || centers.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("centers must be finite and non-empty"));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::domain("width must be positive"));
    }
    if !kappa.is_finite() {
        return Err(Error::domain("carrier frequency must be finite"));
    }
    let rel = settings.relative_tolerance;
    let lo = centers.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = centers.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = settings.initial_half_width_multiplier * width;
    let mid = 0.5 * (lo + hi);
    let mut half = 0.5 * (hi - lo) + pad;

    let panels = ((2.0 * half / width).ceil() as usize).min(MAX_CORE_PANELS);
    let mut total = adaptive_panels(&f, mid - half, mid + half, panels, rel * 0.25, 0.0)?;
    let mut previous_total = total.value;
    let mut quiet = 0;
    for _ in 0..settings.max_domain_doublings {
        let scale = total.value.norm().max(L1_FRACTION * total.l1);
        let abs_tol = 0.25 * rel * scale;
        let left = tail_panel(&f, kappa, mid - 2.0 * half, mid - half, abs_tol)?;
        let right = tail_panel(&f, kappa, mid + half, mid + 2.0 * half, abs_tol)?;
        let mut added = left;
        added.add(&right);
        previous_total = total.value;
        total.add(&added);
        half *= 2.0;

        let scale = total.value.norm().max(L1_FRACTION * total.l1);
        if added.value.norm() <= rel * scale {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        if !half.is_finite() {
            break;
        }
    }
    Err(Error::Numeric {
        message: format!(
            "real-line quadrature did not converge after {} domain doublings",
            settings.max_domain_doublings
        ),
        last: Some([total.value.re, total.value.im]),
        previous: Some([previous_total.re, previous_total.im]),
    })
}

/// Panels shorter than this many carrier radians go to Gauss–Kronrod.
const LEVIN_MIN_PHASE: f64 = 16.0 * std::f64::consts::PI;
const LEVIN_ORDER: usize = 16;
const LEVIN_MAX_DEPTH: u32 = 40;

fn tail_panel<F>(f: &F, kappa: f64, a: f64, b: f64, abs_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    if kappa.abs() * (b - a) < LEVIN_MIN_PHASE {
        return adaptive(f, a, b, 0.0, abs_tol);
    }
    levin_adaptive(f, kappa, a, b, abs_tol, 0)
}

fn levin_adaptive<F>(f: &F, kappa: f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    if kappa.abs() * (b - a) < LEVIN_MIN_PHASE {
        return adaptive(f, a, b, 0.0, tol);
    }
    let (coarse, _) = levin(f, kappa, a, b, LEVIN_ORDER)?;
    let (fine, l1) = levin(f, kappa, a, b, 2 * LEVIN_ORDER)?;
    let error = (fine - coarse).norm();
    if error <= tol || depth >= LEVIN_MAX_DEPTH {
        return Ok(Estimate {
            value: fine,
            error,
            l1,
            evaluations: 3 * LEVIN_ORDER + 2,
        });
    }
    let mid = 0.5 * (a + b);
    let mut left = levin_adaptive(f, kappa, a, mid, 0.5 * tol, depth + 1)?;
    let right = levin_adaptive(f, kappa, mid, b, 0.5 * tol, depth + 1)?;
    left.add(&right);
    Ok(left)
}

/// Levin collocation for `∫_a^b g(x) e^{iκx} dx` with `f = g e^{iκx}`.
///
/// Solves `p' + iκp = g` for a degree-`n` polynomial `p` at the
/// Chebyshev–Lobatto points; the integral is then
/// `p(b) e^{iκb} − p(a) e^{iκa}`. Returns the integral and a rough `∫|f|`.
fn levin<F>(f: &F, kappa: f64, a: f64, b: f64, n: usize) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    let t: Vec<f64> = (0..=n)
        .map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    let mut rhs = Vec::with_capacity(n + 1);
    let mut l1 = 0.0;
    for &tj in &t {
        let x = c + r * tj;
        let fx = f(x);
        l1 += fx.norm();
        rhs.push(fx * Complex64::from_polar(1.0, -kappa * x));
    }
    let l1 = l1 / (n + 1) as f64 * (b - a);

    // Chebyshev differentiation matrix, scaled to d/dx, plus iκ on the diagonal.
    let m = n + 1;
    let weight = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
    let mut matrix = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        let mut diag = 0.0;
        for j in 0..m {
            if i == j {
                continue;
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let d = weight(i) / weight(j) * sign / (t[i] - t[j]);
            matrix[i * m + j] = Complex64::new(d / r, 0.0);
            diag -= d;
        }
        matrix[i * m + i] = Complex64::new(diag / r, kappa);
    }
    let p = solve(&mut matrix, &mut rhs, m)
        .ok_or_else(|| Error::numeric("singular Levin collocation system"))?;
    let value = p[0] * Complex64::from_polar(1.0, kappa * b) - p[n] * Complex64::from_polar(1.0, kappa * a);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::numeric("integrand produced non-finite values"));
    }
    Ok((value, l1))
}

/// Dense complex solve by Gaussian elimination with partial pivoting.
fn solve(a: &mut [Complex64], b: &mut [Complex64], m: usize) -> Option<Vec<Complex64>> {
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| a[x * m + col].norm().total_cmp(&a[y * m + col].norm()))?;
        if a[pivot * m + col].norm() == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..m {
                a.swap(col * m + k, pivot * m + k);
            }
            b.swap(col, pivot);
        }
        let inv = a[col * m + col].inv();
        for row in col + 1..m {
            let factor = a[row * m + col] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..m {
                let v = a[col * m + k];
                a[row * m + k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    for row in (0..m).rev() {
        let mut acc = b[row];
        for k in row + 1..m {
            acc -= a[row * m + k] * x[k];
        }
        x[row] = acc / a[row * m + row];
    }
    Some(x)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
