//! Retarded pair T-matrix for contact-interacting photons on a linear band.
//!
//! The attractive contact interaction resums into
//! T(zeta) = -v / (1 + g * J(zeta)) with g = v / (2 pi v_e), where J is the
//! thermally weighted pair propagator integrated over the band. The band is
//! kept symmetric around the chemical potential, |eps - mu| < Delta, and the
//! infrared divergence of coth at eps = mu is regularized by masking
//! |eps - mu| < (2 / beta) * x_min symmetrically, so the odd part of the
//! kernel cancels and the mask reduces to the dimensionless cutoff x_min.
//!
//! On the imaginary axis (zeta - 2 mu = i eta, eta -> 0) the denominator
//! reduces to 1 - g * I(x_min, Lambda) with I the coth integral and
//! Lambda = beta * Delta / 2; its zero in Lambda locates the pair binding
//! transition and hence the critical temperature.

use crate::error::{Error, Result};
use crate::physics::{coth, kelvin_from_beta, ThermalState, WaveguideParams};
use crate::quad::{integrate_with_breakpoints, QuadResult};
use num_complex::Complex64;

/// Thermal pair propagator Upsilon = coth(beta (eps - mu) / 2) / (zeta - 2 eps).
///
/// `epsilon` is the single-photon energy of the pair partners (rad/s); the
/// pair frequency `zeta` and the thermal state come from the query.
pub fn pair_propagator_upsilon(epsilon: f64, query: &TMatrixQuery) -> Result<Complex64> {
    let weight = crate::physics::coth_factor(epsilon, &query.thermal)?;
    let den = query.zeta - 2.0 * epsilon;
    if den.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "pair propagator evaluated at zeta = 2 epsilon with no imaginary part".into(),
        ));
    }
    Ok(weight / den)
}

/// Retarded two-photon correlator evaluated as a double spectral integral
/// with Lorentzian-broadened single-photon spectral functions.
///
/// This is the brute-force route: both pair partners carry the spectral
/// function 2 pi delta_b(omega - epsilon), the greater/greater minus
/// lesser/lesser thermal weights reduce to 1 + f(omega') + f(omega''), and
/// everything is integrated against 1 / (zeta - omega' - omega'').
/// As `broadening` -> 0 it converges (linearly in the broadening) to
/// [`pair_propagator_upsilon`]. Kept deliberately independent of the
/// band-integral code paths so the two can be cross-checked.
pub fn g2_retarded_numeric(
    epsilon: f64,
    zeta: Complex64,
    thermal: &ThermalState,
    broadening: f64,
) -> Result<Complex64> {
    if !(broadening > 0.0) || !broadening.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "broadening must be positive, got {broadening}"
        )));
    }
    let gap = (epsilon - thermal.mu).abs();
    if gap < 55.0 * broadening {
        return Err(Error::GridCoverage {
            context: "spectral window would reach the distribution pole at mu".into(),
            missing: 1.0 - gap / (55.0 * broadening),
        });
    }
    // Window wide enough for the Lorentzian tails, but clear of the Bose pole.
    let half_width = (8000.0 * broadening).min(0.9 * gap);
    let (lo, hi) = (epsilon - half_width, epsilon + half_width);
    // With zeta exactly real the kernel pole x + y = zeta is non-integrable
    // wherever the square window can reach it.
    if zeta.im == 0.0 && zeta.re >= 2.0 * lo && zeta.re <= 2.0 * hi {
        return Err(Error::InvalidParameter(
            "kernel pole crosses the integration window; give zeta an imaginary part".into(),
        ));
    }

    let beta = thermal.beta;
    let mu = thermal.mu;
    // The window stays clear of mu, so the occupation is finite throughout.
    let occ = move |x: f64| 1.0 / (beta * (x - mu)).exp_m1();
    let spectral = move |x: f64| {
        let d = x - epsilon;
        2.0 * broadening / (d * d + broadening * broadening)
    };

    // Nested adaptive quadrature. Both axes get breakpoints graded around the
    // spectral peak; the inner axis additionally anchors the kernel ridge
    // y = Re zeta - x so the bisection refines into it.
    let inner_error: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let outer = integrate_with_breakpoints(
        |x| {
            if inner_error.borrow().is_some() {
                return Complex64::new(0.0, 0.0);
            }
            let fx = occ(x);
            let breaks = graded_points(lo, hi, epsilon, broadening, Some(zeta.re - x));
            let inner = integrate_with_breakpoints(
                |y| spectral(y) * (1.0 + fx + occ(y)) / (zeta - x - y),
                &breaks,
                f64::MIN_POSITIVE,
                1e-9,
            );
            match inner {
                Ok(r) => spectral(x) * r.value,
                Err(e) => {
                    *inner_error.borrow_mut() = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &graded_points(lo, hi, epsilon, broadening, Some(zeta.re - epsilon)),
        f64::MIN_POSITIVE,
        1e-8,
    );
    if let Some(e) = inner_error.into_inner() {
        return Err(e);
    }
    let norm = (2.0 * std::f64::consts::PI).powi(2);
    Ok(outer?.value / norm)
}

// Panel edges for [lo, hi], graded geometrically away from `center` with the
// innermost step `scale`, plus an optional feature point. Interior points are
// kept clear of the endpoints so the list stays strictly increasing.
fn graded_points(lo: f64, hi: f64, center: f64, scale: f64, extra: Option<f64>) -> Vec<f64> {
    let span = hi - lo;
    let margin = 1e-9 * span;
    let mut pts = vec![lo, hi];
    let push = |p: f64, pts: &mut Vec<f64>| {
        if p > lo + margin && p < hi - margin {
            pts.push(p);
        }
    };
    push(center, &mut pts);
    let mut off = scale;
    while off < span {
        push(center - off, &mut pts);
        push(center + off, &mut pts);
        off *= 2.0;
    }
    if let Some(e) = extra {
        push(e, &mut pts);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= margin);
    pts
}

/// Regularized coth integral I(x_min, Lambda) = int coth(x)/x dx over
/// [x_min, Lambda].
///
/// Beyond x = 40 the integrand is 1/x to double precision and the tail is
/// added as a logarithm, so arbitrarily large Lambda stays cheap and exact.
/// `Lambda = x_min` is an empty interval and returns zero.
pub fn coth_integral(x_min: f64, lambda: f64, tol: f64) -> Result<f64> {
    if !(x_min > 0.0) || !x_min.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "x_min must be positive, got {x_min}"
        )));
    }
    if !(lambda >= x_min) {
        return Err(Error::InvalidParameter(format!(
            "Lambda must satisfy Lambda >= x_min, got Lambda = {lambda}, x_min = {x_min}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if lambda == x_min {
        return Ok(0.0);
    }
    const X_TAIL: f64 = 40.0;
    let upper = lambda.min(X_TAIL);
    let mut points = vec![x_min];
    // Split at the knee where coth turns from 1/x into 1.
    if x_min < 1.0 && upper > 1.0 {
        points.push(1.0);
    }
    points.push(upper);
    let r = integrate_with_breakpoints(
        |x| Complex64::new(coth(x) / x, 0.0),
        &points,
        tol,
        tol,
    )?;
    let mut value = r.value.re;
    if lambda > X_TAIL {
        value += (lambda / X_TAIL).ln();
    }
    Ok(value)
}

/// One retarded T-matrix evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TMatrixQuery {
    /// Complex pair frequency; Im(zeta) >= 0 for the retarded branch.
    pub zeta: Complex64,
    pub params: WaveguideParams,
    pub thermal: ThermalState,
    /// Dimensionless infrared cutoff of the coth kernel.
    pub x_min: f64,
    /// Absolute and relative quadrature tolerance.
    pub quad_tol: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TMatrixResult {
    pub value: Complex64,
    pub denominator: Complex64,
    /// Set when |denominator| < 1e-12: the evaluation sits on top of the pole.
    pub pole_proximity: bool,
}

/// Retarded pair T-matrix of the attractive 1D contact interaction.
///
/// The band integral runs over the masked symmetric band and is folded into
/// its even part,
/// J(z) = int_{eps_min}^{Delta} coth(beta eps / 2) * 4 eps / (z^2 - 4 eps^2),
/// with z = zeta - 2 mu, which keeps the pure imaginary-axis evaluation
/// exactly real. On the real axis (Im zeta = 0) the pole inside the band is
/// handled as a principal value by singularity subtraction.
pub fn tmatrix_retarded_1d(query: &TMatrixQuery) -> Result<TMatrixResult> {
    let p = &query.params;
    if !p.attractive {
        return Err(Error::InvalidParameter(
            "pair T-matrix is implemented for the attractive sign convention".into(),
        ));
    }
    if query.zeta.im < 0.0 {
        return Err(Error::InvalidParameter(
            "retarded evaluation requires Im(zeta) >= 0".into(),
        ));
    }
    let beta = query.thermal.beta;
    let delta = p.band_halfwidth;
    let lambda = 0.5 * beta * delta;
    if !(query.x_min > 0.0 && query.x_min < lambda) {
        return Err(Error::InvalidParameter(format!(
            "x_min must lie in (0, beta * Delta / 2 = {lambda:.6e}), got {}",
            query.x_min
        )));
    }
    if !(query.quad_tol > 0.0) {
        return Err(Error::InvalidParameter("quad_tol must be positive".into()));
    }
    let v = p.coupling;
    let g = p.dimensionless_coupling();
    if v == 0.0 {
        return Ok(TMatrixResult {
            value: Complex64::new(0.0, 0.0),
            denominator: Complex64::new(1.0, 0.0),
            pole_proximity: false,
        });
    }

    let eps_min = 2.0 * query.x_min / beta;
    let z = query.zeta - Complex64::new(2.0 * query.thermal.mu, 0.0);
    let j = folded_band_integral(z, beta, eps_min, delta, query.quad_tol)?;

    let denominator = 1.0 + g * j;
    let value = -v / denominator;
    Ok(TMatrixResult {
        value,
        denominator,
        pole_proximity: denominator.norm() < 1e-12,
    })
}

// J(z) = int_{eps_min}^{Delta} coth(beta eps / 2) * 4 eps / (z^2 - 4 eps^2) d eps.
fn folded_band_integral(
    z: Complex64,
    beta: f64,
    eps_min: f64,
    delta: f64,
    tol: f64,
) -> Result<Complex64> {
    let z2 = z * z;
    let knee = 2.0 / beta; // beta * eps / 2 = 1
    let mut points = vec![eps_min];
    if knee > eps_min * (1.0 + 1e-12) && knee < delta * (1.0 - 1e-12) {
        points.push(knee);
    }

    if z.im == 0.0 {
        let pole = 0.5 * z.re.abs();
        let interior = pole > eps_min && pole < delta;
        let near_edge = (pole - eps_min).abs() < 1e-9 * delta || (pole - delta).abs() < 1e-9 * delta;
        if near_edge {
            return Err(Error::InvalidParameter(
                "real-axis pole coincides with the mask or band edge".into(),
            ));
        }
        if interior {
            return principal_value_band(z.re, beta, eps_min, delta, knee, tol);
        }
        // Pole outside the masked band: the integrand is regular.
    } else {
        // Seed a breakpoint where the denominator magnitude dips.
        let peak = 0.5 * z.re.abs();
        if peak > eps_min * (1.0 + 1e-12) && peak < delta * (1.0 - 1e-12) {
            points.push(peak);
        }
    }
    points.push(delta);
    points.sort_by(f64::total_cmp);
    let r: QuadResult = integrate_with_breakpoints(
        |eps| {
            let w = coth(0.5 * beta * eps);
            4.0 * eps * w / (z2 - 4.0 * eps * eps)
        },
        &points,
        tol,
        tol,
    )?;
    Ok(r.value)
}

// Retarded limit of the folded band integral for real z with the pole
// eps_p = |z| / 2 inside (eps_min, Delta). With
// s(eps) = -coth(beta eps / 2) * eps / (eps + eps_p) the integrand is
// s(eps) / (eps - eps_p); subtracting s(eps_p) leaves a regular integrand,
// the subtracted pole integrates to the analytic logarithm, and the i 0+
// prescription contributes the Sokhotski term i sign(z) pi s(eps_p).
fn principal_value_band(
    z_re: f64,
    beta: f64,
    eps_min: f64,
    delta: f64,
    knee: f64,
    tol: f64,
) -> Result<Complex64> {
    let eps_p = 0.5 * z_re.abs();
    let s = |eps: f64| -coth(0.5 * beta * eps) * eps / (eps + eps_p);
    let s_p = s(eps_p);
    let h = 1e-6 * eps_p;
    let slope = (s(eps_p + h) - s(eps_p - h)) / (2.0 * h);
    let reg_width = 1e-9 * (delta - eps_min);

    let mut points = vec![eps_min];
    if knee > eps_min * (1.0 + 1e-12) && knee < delta * (1.0 - 1e-12) && (knee - eps_p).abs() > reg_width {
        points.push(knee);
    }
    points.push(eps_p);
    points.push(delta);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let r = integrate_with_breakpoints(
        |eps| {
            let d = eps - eps_p;
            let val = if d.abs() < reg_width {
                slope
            } else {
                (s(eps) - s_p) / d
            };
            Complex64::new(val, 0.0)
        },
        &points,
        tol,
        tol,
    )?;
    let log_term = s_p * ((delta - eps_p) / (eps_p - eps_min)).ln();
    let sokhotski = Complex64::new(0.0, z_re.signum() * std::f64::consts::PI * s_p);
    Ok(r.value + log_term + sokhotski)
}

/// One row of a denominator scan over temperature.
#[derive(Debug, Clone, Copy)]
pub struct DenominatorPoint {
    pub t_kelvin: f64,
    /// Lambda = beta * Delta / 2 at this temperature.
    pub lambda: f64,
    /// I(x_min, Lambda); zero once Lambda <= x_min (the mask covers the band).
    pub integral: f64,
    /// D = 1 - g * I.
    pub denominator: f64,
    /// Imaginary-axis T-matrix -v / D.
    pub tmatrix: Complex64,
    pub pole_proximity: bool,
}

/// Scan the imaginary-axis denominator D(T) = 1 - g * I(x_min, Lambda(T))
/// over an ascending list of temperatures.
pub fn denominator_scan(
    temps_kelvin: &[f64],
    params: &WaveguideParams,
    x_min: f64,
) -> Result<Vec<DenominatorPoint>> {
    if !params.attractive {
        return Err(Error::InvalidParameter(
            "denominator scan is defined for the attractive sign convention".into(),
        ));
    }
    if temps_kelvin.len() < 2 {
        return Err(Error::InvalidParameter(
            "temperature scan needs at least two points".into(),
        ));
    }
    for w in temps_kelvin.windows(2) {
        if !(w[0] > 0.0 && w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "temperatures must be positive and strictly increasing".into(),
            ));
        }
    }
    if !(x_min > 0.0) {
        return Err(Error::InvalidParameter("x_min must be positive".into()));
    }
    let g = params.dimensionless_coupling();
    let v = params.coupling;
    let mut rows = Vec::with_capacity(temps_kelvin.len());
    for &t in temps_kelvin {
        let beta = crate::physics::beta_from_kelvin(t)?;
        let lambda = 0.5 * beta * params.band_halfwidth;
        let integral = if lambda <= x_min {
            0.0
        } else {
            coth_integral(x_min, lambda, 1e-12)?
        };
        let denominator = 1.0 - g * integral;
        rows.push(DenominatorPoint {
            t_kelvin: t,
            lambda,
            integral,
            denominator,
            tmatrix: Complex64::new(-v / denominator, 0.0),
            pole_proximity: denominator.abs() < 1e-12,
        });
    }
    // D is monotone in T because Lambda shrinks and I only loses positive mass.
    debug_assert!(rows.windows(2).all(|w| w[1].denominator >= w[0].denominator));
    Ok(rows)
}

/// Logarithmically spaced grid, endpoints included.
pub fn log_spaced(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min) || n < 2 {
        return Err(Error::InvalidParameter(
            "log_spaced needs 0 < min < max and n >= 2".into(),
        ));
    }
    let (lo, hi) = (min.ln(), max.ln());
    Ok((0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// How the critical temperature is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcMethod {
    /// Weak-coupling closed form Lambda_c = exp(1 / g).
    Asymptotic,
    /// Root of 1 - g * I(x_min, Lambda) in Lambda.
    Numeric,
}

/// Critical point of the pair binding transition.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub t_c_kelvin: f64,
    pub lambda_c: f64,
    pub g: f64,
    pub x_min: f64,
    pub method: TcMethod,
}

/// Critical temperature where the imaginary-axis denominator crosses zero.
pub fn critical_temperature(
    params: &WaveguideParams,
    method: TcMethod,
    x_min: f64,
) -> Result<CriticalPoint> {
    if !params.attractive {
        return Err(Error::InvalidParameter(
            "critical temperature is defined for the attractive sign convention".into(),
        ));
    }
    let g = params.dimensionless_coupling();
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dimensionless coupling must be positive, got {g}"
        )));
    }
    if !(x_min > 0.0) {
        return Err(Error::InvalidParameter("x_min must be positive".into()));
    }
    let lambda_c = match method {
        TcMethod::Asymptotic => {
            if 1.0 / g > 700.0 {
                return Err(Error::InvalidParameter(format!(
                    "coupling too weak: exp(1/g) overflows at g = {g}"
                )));
            }
            (1.0 / g).exp()
        }
        TcMethod::Numeric => solve_lambda_c(g, x_min)?,
    };
    if lambda_c <= x_min {
        return Err(Error::InvalidParameter(format!(
            "critical point Lambda_c = {lambda_c:.6e} lies below the cutoff x_min = {x_min}"
        )));
    }
    let beta_c = 2.0 * lambda_c / params.band_halfwidth;
    Ok(CriticalPoint {
        t_c_kelvin: kelvin_from_beta(beta_c)?,
        lambda_c,
        g,
        x_min,
        method,
    })
}

// Solve 1 - g * I(x_min, exp(u)) = 0 for u by bracketed bisection with a
// secant polish. The left hand side is strictly decreasing in u.
fn solve_lambda_c(g: f64, x_min: f64) -> Result<f64> {
    const QUAD_TOL: f64 = 1e-12;
    const F_TOL: f64 = 1e-10;
    let f = |u: f64| -> Result<f64> {
        Ok(1.0 - g * coth_integral(x_min, u.exp(), QUAD_TOL)?)
    };
    let mut lo = x_min.ln();
    let f_lo = 1.0; // empty interval: I = 0
    let mut hi = (x_min.ln() + 1.0).max(1.0);
    let mut f_hi = f(hi)?;
    let mut guard = 0;
    while f_hi > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 700.0 {
            return Err(Error::NoBracket(format!(
                "denominator stays positive up to Lambda = exp(700) for g = {g}"
            )));
        }
        f_hi = f(hi)?;
        guard += 1;
        if guard > 64 {
            return Err(Error::NoBracket("bracket expansion did not terminate".into()));
        }
    }
    let mut f_lo = if lo == x_min.ln() { f_lo } else { f(lo)? };

    // Bisection to a narrow bracket.
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..50 {
        mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() < F_TOL {
            return Ok(mid.exp());
        }
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    // Secant refinement inside the bracket.
    let (mut u0, mut f0, mut u1, mut f1) = (lo, f_lo, hi, f_hi);
    for _ in 0..20 {
        if (f1 - f0).abs() < f64::MIN_POSITIVE {
            break;
        }
        let u2 = u1 - f1 * (u1 - u0) / (f1 - f0);
        if !(u2 > lo && u2 < hi) {
            break;
        }
        let f2 = f(u2)?;
        u0 = u1;
        f0 = f1;
        u1 = u2;
        f1 = f2;
        if f2.abs() < F_TOL {
            break;
        }
    }
    Ok(if f1.abs() < f0.abs() { u1.exp() } else { mid.exp() })
}
