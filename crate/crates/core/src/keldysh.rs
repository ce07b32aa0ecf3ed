//! Real-time Keldysh components of two-point correlators.
//!
//! A [`SpectralGrid`] holds one frequency-resolved component on a uniform
//! grid. From a real spectral function A(omega) the retarded and advanced
//! components follow by Hilbert transform,
//! C^{R/A}(omega) = int domega'/2pi A(omega') / (omega - omega' +- i eta),
//! the lesser/greater components follow from the fluctuation-dissipation
//! theorem, and causality is checked by transforming the retarded component
//! to the time domain, where it must vanish for t < 0.

use crate::error::{Error, Result};
use crate::physics::{bose_occupation, bose_occupation_bar, ThermalState};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::Write;

/// Requested frequency window and resolution.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.omega_min.is_finite() || !self.omega_max.is_finite() {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        if !(self.omega_max > self.omega_min) {
            return Err(Error::InvalidParameter(format!(
                "grid needs omega_max > omega_min, got [{}, {}]",
                self.omega_min, self.omega_max
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidParameter(
                "grid needs at least two points".into(),
            ));
        }
        Ok(())
    }
}

/// One correlator component sampled on a uniform frequency grid.
///
/// Spectral functions are stored with zero imaginary parts; retarded and
/// advanced components use both parts. `singular_part` carries the
/// frequency-independent delta contribution separately; it is added to
/// retarded/advanced components only (for the pair T-matrix this scalar is
/// the bare coupling term) and never enters occupation-weighted components.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub values: Vec<Complex64>,
    pub singular_part: Complex64,
}

impl SpectralGrid {
    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            omega_min: spec.omega_min,
            omega_max: spec.omega_max,
            values: vec![Complex64::new(0.0, 0.0); spec.n_points],
            singular_part: Complex64::new(0.0, 0.0),
        })
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn d_omega(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.n_points() - 1) as f64
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.omega_min + i as f64 * self.d_omega()
    }

    /// Trapezoidal integral of the stored values times domega / 2pi.
    pub fn integral_over_two_pi(&self) -> Complex64 {
        let n = self.n_points();
        let mut acc = 0.5 * (self.values[0] + self.values[n - 1]);
        for v in &self.values[1..n - 1] {
            acc += v;
        }
        acc * self.d_omega() / (2.0 * std::f64::consts::PI)
    }

    /// CSV serialization with columns omega, re, im.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "omega,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{},{}", self.omega(i), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Lorentzian-broadened delta spectral function
/// A(omega) = 2 eta / ((omega - epsilon)^2 + eta^2).
///
/// No renormalization is applied: the peak stays exactly 2/eta and the grid
/// carries whatever fraction of the unit mass it covers. The analytically
/// known off-grid mass is the coverage-error criterion.
pub fn lorentzian_spectral(epsilon: f64, eta: f64, spec: &GridSpec) -> Result<SpectralGrid> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "broadening must be positive, got {eta}"
        )));
    }
    spec.validate()?;
    let covered = ((spec.omega_max - epsilon).atan2(eta) - (spec.omega_min - epsilon).atan2(eta))
        / std::f64::consts::PI;
    let deficit = 1.0 - covered;
    if deficit > 0.01 {
        return Err(Error::GridCoverage {
            context: "Lorentzian mass off the grid".into(),
            missing: deficit,
        });
    }
    let mut grid = SpectralGrid::from_spec(spec)?;
    for i in 0..grid.n_points() {
        let d = grid.omega(i) - epsilon;
        grid.values[i] = Complex64::new(2.0 * eta / (d * d + eta * eta), 0.0);
    }
    Ok(grid)
}

/// Retarded component from a real spectral function.
///
/// `eta > 0` evaluates the trapezoidal sum of A(omega') / (omega - omega' + i eta).
/// `eta = 0` takes the principal value: the pole is removed by subtracting
/// A(omega), the subtracted kernel integrates to an analytic logarithm, the
/// off-grid tails are modeled as C/omega'^2 matched to the edge values, and
/// Im C^R = -A(omega)/2 exactly.
pub fn retarded_from_spectral(spectral: &SpectralGrid, eta: f64) -> Result<SpectralGrid> {
    hilbert_transform(spectral, eta, 1.0)
}

/// Advanced component: same construction with the opposite pole prescription,
/// so it is the complex conjugate of the retarded component for real inputs.
pub fn advanced_from_spectral(spectral: &SpectralGrid, eta: f64) -> Result<SpectralGrid> {
    hilbert_transform(spectral, eta, -1.0)
}

fn hilbert_transform(spectral: &SpectralGrid, eta: f64, branch: f64) -> Result<SpectralGrid> {
    if eta < 0.0 || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "eta must be non-negative, got {eta}"
        )));
    }
    let n = spectral.n_points();
    if n < 4 {
        return Err(Error::InvalidParameter(
            "Hilbert transform needs at least four grid points".into(),
        ));
    }
    for v in &spectral.values {
        if v.im != 0.0 {
            return Err(Error::InvalidParameter(
                "spectral input must be real-valued".into(),
            ));
        }
    }
    let dw = spectral.d_omega();
    let a: Vec<f64> = spectral.values.iter().map(|v| v.re).collect();
    let two_pi = 2.0 * std::f64::consts::PI;

    let mut out = spectral.clone();
    out.singular_part = Complex64::new(0.0, 0.0);

    if eta > 0.0 {
        for i in 0..n {
            let wi = spectral.omega(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let weight = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                acc += weight * a[j] / Complex64::new(wi - spectral.omega(j), branch * eta);
            }
            out.values[i] = acc * dw / two_pi + spectral.singular_part;
        }
        return Ok(out);
    }

    // Principal-value mode. Work in coordinates centered on the grid.
    let center = 0.5 * (spectral.omega_min + spectral.omega_max);
    let h = 0.5 * (spectral.omega_max - spectral.omega_min);
    // Off-grid tails A ~ C / u^2 matched at the two edges.
    let c_left = a[0] * h * h;
    let c_right = a[n - 1] * h * h;
    // d A / d omega on the grid, one-sided at the edges.
    let deriv = |i: usize| -> f64 {
        if i == 0 {
            (a[1] - a[0]) / dw
        } else if i == n - 1 {
            (a[n - 1] - a[n - 2]) / dw
        } else {
            (a[i + 1] - a[i - 1]) / (2.0 * dw)
        }
    };

    for i in 0..n {
        let wi = spectral.omega(i);
        let x = wi - center;
        // Regularized data integral: trapezoid of (A(w') - A(w)) / (w - w').
        let mut acc = 0.0;
        for j in 0..n {
            let weight = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            let term = if j == i {
                -deriv(i)
            } else {
                (a[j] - a[i]) / (wi - spectral.omega(j))
            };
            acc += weight * term;
        }
        let mut re = acc * dw;
        if i == 0 {
            // Joint limit of the log term and the left tail at the left edge.
            re += -a[0] * (1.0 + std::f64::consts::LN_2);
            re += c_right * tail_right(-h, h);
        } else if i == n - 1 {
            re += a[n - 1] * (1.0 + std::f64::consts::LN_2);
            re += c_left * tail_left(h, h);
        } else {
            re += a[i] * ((wi - spectral.omega_min) / (spectral.omega_max - wi)).ln();
            re += c_left * tail_left(x, h) + c_right * tail_right(x, h);
        }
        let value = Complex64::new(re / two_pi, -branch * 0.5 * a[i]);
        out.values[i] = value + spectral.singular_part;
    }
    Ok(out)
}

// int_h^inf du / (u^2 (x - u)), the right off-grid tail against the PV kernel.
fn tail_right(x: f64, h: f64) -> f64 {
    if x.abs() < 0.05 * h {
        // Series around x = 0 avoids the 1/x cancellation.
        -1.0 / (2.0 * h * h) - x / (3.0 * h * h * h) - x * x / (4.0 * h * h * h * h)
    } else {
        1.0 / (x * h) + ((h - x) / h).ln() / (x * x)
    }
}

// int_{-inf}^{-h} du / (u^2 (x - u)) = -tail_right(-x).
fn tail_left(x: f64, h: f64) -> f64 {
    -tail_right(-x, h)
}

/// Occupation factor selector: single-particle components weight with
/// f(omega - mu), pair quantities (such as the T-matrix) with f(omega - 2 mu).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuMultiplier {
    Single,
    Pair,
}

impl MuMultiplier {
    pub fn factor(self) -> f64 {
        match self {
            MuMultiplier::Single => 1.0,
            MuMultiplier::Pair => 2.0,
        }
    }
}

/// Lesser and greater components via the fluctuation-dissipation theorem:
/// C^< = -i f(omega - m mu) A, C^> = -i (1 + f(omega - m mu)) A.
pub fn fdt_components(
    spectral: &SpectralGrid,
    thermal: &ThermalState,
    mu_multiplier: MuMultiplier,
) -> Result<(SpectralGrid, SpectralGrid)> {
    let m = mu_multiplier.factor();
    let mut lesser = spectral.clone();
    let mut greater = spectral.clone();
    lesser.singular_part = Complex64::new(0.0, 0.0);
    greater.singular_part = Complex64::new(0.0, 0.0);
    let shifted = ThermalState::new(thermal.beta, m * thermal.mu)?;
    for i in 0..spectral.n_points() {
        let a = spectral.values[i];
        if a.im != 0.0 {
            return Err(Error::InvalidParameter(
                "spectral input must be real-valued".into(),
            ));
        }
        // f and 1 + f are each evaluated through their own stable expm1
        // form, so the detailed-balance ratio C^>/C^< = e^{beta (omega - m mu)}
        // holds elementwise to a couple of roundings across the whole grid.
        // The sum rule i (C^> - C^<) = A is then good to eps * (|f| + |1+f|);
        // keep grids clear of the omega = m mu pole when it matters.
        let f = bose_occupation(spectral.omega(i), &shifted)?;
        let f_bar = bose_occupation_bar(spectral.omega(i), &shifted)?;
        lesser.values[i] = Complex64::new(0.0, -1.0) * f * a;
        greater.values[i] = Complex64::new(0.0, -1.0) * f_bar * a;
    }
    Ok((lesser, greater))
}

/// Retarded correlator transformed to the time domain.
#[derive(Debug, Clone)]
pub struct RetardedTimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// max |C(t)| over t < 0 relative to the global maximum.
    pub negative_time_leak: f64,
}

impl RetardedTimeSeries {
    /// CSV serialization with columns t, re, im.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,re,im")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(out, "{},{},{}", t, v.re, v.im)?;
        }
        Ok(())
    }
}

/// Inverse Fourier transform of a retarded component and its causality
/// metric: the relative magnitude remaining at t < 0.
///
/// The slowly decaying 1/omega part is subtracted first as a one-pole
/// asymptote S / (omega - p) fitted to the two grid-edge values (exact for a
/// single resonance; in general it reproduces the total weight and centroid),
/// and its causal time signal -i S e^{-i p t} is added back exactly for
/// t >= 0. The residual vanishes at both edges and decays at least as
/// 1/omega^2, so it can be Tukey-tapered and sent through the FFT. The grid
/// must cover the spectral support: the raw retarded function itself always
/// decays too slowly for a truncated transform.
pub fn time_domain_retarded(retarded: &SpectralGrid) -> Result<RetardedTimeSeries> {
    let n = retarded.n_points();
    if n < 16 {
        return Err(Error::InvalidParameter(
            "time-domain transform needs at least 16 grid points".into(),
        ));
    }
    let dw = retarded.d_omega();
    let two_pi = 2.0 * std::f64::consts::PI;
    let dt = two_pi / (n as f64 * dw);
    let times: Vec<f64> = (0..n)
        .map(|k| {
            let k_signed = if k < n / 2 { k as isize } else { k as isize - n as isize };
            k_signed as f64 * dt
        })
        .collect();

    let peak_in = retarded.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak_in == 0.0 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        return Ok(RetardedTimeSeries {
            times: order.iter().map(|&k| times[k]).collect(),
            values: vec![Complex64::new(0.0, 0.0); n],
            negative_time_leak: 0.0,
        });
    }

    // The grid must cover the spectral support: the weight estimate
    // -2 Im C^R has to have decayed at the edges.
    let a_est: Vec<f64> = retarded.values.iter().map(|v| -2.0 * v.im).collect();
    let a_max = a_est.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    let k_edge = (n / 200).max(1);
    let mut a_edge = 0.0f64;
    for j in 0..k_edge {
        a_edge = a_edge.max(a_est[j].abs()).max(a_est[n - 1 - j].abs());
    }
    if a_max > 0.0 && a_edge > 1e-4 * a_max {
        return Err(Error::GridCoverage {
            context: "spectral weight not decayed at the grid edges".into(),
            missing: a_edge / a_max,
        });
    }

    let mass: f64 = a_est.iter().sum::<f64>() * dw;
    let half_span = 0.5 * (retarded.omega_max - retarded.omega_min);
    let center = 0.5 * (retarded.omega_min + retarded.omega_max);
    let centroid = if mass.abs() > 0.0 {
        a_est
            .iter()
            .enumerate()
            .map(|(i, a)| a * retarded.omega(i))
            .sum::<f64>()
            * dw
            / mass
    } else {
        center
    };

    // One-pole asymptote fitted to the edge values. When the fit is
    // degenerate or lands on an acausal pole, fall back to the weight and
    // centroid of the spectral estimate with a broad artificial width.
    let (w_a, w_b) = (retarded.omega_min, retarded.omega_max);
    let (c_a, c_b) = (retarded.values[0], retarded.values[n - 1]);
    let mut fit = None;
    let denom = c_b - c_a;
    if denom.norm() > 1e-12 * (c_a.norm() + c_b.norm()) {
        let p = (c_b * w_b - c_a * w_a) / denom;
        let amp = c_a * (Complex64::new(w_a, 0.0) - p);
        if -p.im > 0.0 && -p.im <= half_span && (p.re - center).abs() <= half_span
            && amp.norm().is_finite()
        {
            fit = Some((amp, p));
        }
    }
    let (s_fit, pole) = fit.unwrap_or((
        Complex64::new(mass / two_pi, 0.0),
        Complex64::new(centroid, -half_span / 256.0),
    ));

    let mut residual: Vec<Complex64> = (0..n)
        .map(|i| {
            let w = retarded.omega(i);
            retarded.values[i] - s_fit / (Complex64::new(w, 0.0) - pole)
        })
        .collect();

    // Tukey taper (alpha = 0.5) suppresses residual truncation ringing.
    let alpha = 0.5;
    for (j, r) in residual.iter_mut().enumerate() {
        let x = j as f64 / (n - 1) as f64;
        let w = if x < alpha / 2.0 {
            0.5 * (1.0 + (std::f64::consts::PI * (2.0 * x / alpha - 1.0)).cos())
        } else if x > 1.0 - alpha / 2.0 {
            0.5 * (1.0 + (std::f64::consts::PI * (2.0 * (1.0 - x) / alpha - 1.0)).cos())
        } else {
            1.0
        };
        *r *= w;
    }

    FftPlanner::new().plan_fft_forward(n).process(&mut residual);

    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let t = times[k];
        let phase = Complex64::new(0.0, -retarded.omega_min * t).exp();
        let mut v = residual[k] * phase * dw / two_pi;
        if t >= 0.0 {
            // Exact causal time signal of the subtracted asymptote.
            v += Complex64::new(0.0, -1.0) * s_fit * (Complex64::new(0.0, -1.0) * pole * t).exp();
        }
        values[k] = v;
    }

    let global_peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let neg_peak = values
        .iter()
        .zip(&times)
        .filter(|(_, &t)| t < 0.0)
        .map(|(v, _)| v.norm())
        .fold(0.0, f64::max);
    let leak = if global_peak > 0.0 { neg_peak / global_peak } else { 0.0 };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    Ok(RetardedTimeSeries {
        times: order.iter().map(|&k| times[k]).collect(),
        values: order.iter().map(|&k| values[k]).collect(),
        negative_time_leak: leak,
    })
}
