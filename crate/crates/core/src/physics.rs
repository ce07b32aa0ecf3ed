//! Waveguide and thermal parameters, Bose factors, and unit conversions.
//!
//! Internally every energy is an angular frequency in rad/s (hbar = 1) and
//! the inverse temperature `beta` is in seconds (k_B = 1), so `beta * omega`
//! is dimensionless. Conversion to SI happens only through the helpers in
//! this module.

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Inverse temperature in seconds for a temperature in kelvin.
pub fn beta_from_kelvin(t_kelvin: f64) -> Result<f64> {
    if !(t_kelvin > 0.0) || !t_kelvin.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive and finite, got {t_kelvin} K"
        )));
    }
    Ok(HBAR / (K_B * t_kelvin))
}

/// Temperature in kelvin for an inverse temperature in seconds.
pub fn kelvin_from_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive and finite, got {beta} s"
        )));
    }
    Ok(HBAR / (K_B * beta))
}

/// Band half-width in rad/s from a value quoted in GHz.
///
/// `angular` treats the quoted number as an angular frequency (rad/s scaled
/// by 1e9); otherwise it is an ordinary frequency and picks up a factor 2 pi.
pub fn band_halfwidth_from_ghz(value_ghz: f64, angular: bool) -> f64 {
    if angular {
        value_ghz * 1e9
    } else {
        2.0 * std::f64::consts::PI * value_ghz * 1e9
    }
}

/// Propagation direction of the linear branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Right,
    Left,
}

/// Static waveguide parameters.
///
/// `coupling` is the magnitude of the contact interaction in rad/s * m, so
/// that `coupling / group_velocity` is dimensionless. The sign convention is
/// carried separately in `attractive`; all pair formulas in this crate use
/// the attractive branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideParams {
    /// Band reference frequency (rad/s).
    pub omega0: f64,
    /// Group velocity of the linear branch (m/s).
    pub group_velocity: f64,
    /// Contact interaction magnitude (rad/s * m).
    pub coupling: f64,
    /// Half-width of the energy band kept around the chemical potential (rad/s).
    pub band_halfwidth: f64,
    /// Chemical potential (rad/s).
    pub chemical_potential: f64,
    /// Sign convention of the contact interaction.
    pub attractive: bool,
}

impl WaveguideParams {
    pub fn new(
        omega0: f64,
        group_velocity: f64,
        coupling: f64,
        band_halfwidth: f64,
        chemical_potential: f64,
        attractive: bool,
    ) -> Result<Self> {
        if !(group_velocity > 0.0) || !group_velocity.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "group velocity must be positive, got {group_velocity} m/s"
            )));
        }
        if !(band_halfwidth > 0.0) || !band_halfwidth.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "band half-width must be positive, got {band_halfwidth} rad/s"
            )));
        }
        if !(coupling >= 0.0) || !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling magnitude must be non-negative, got {coupling}"
            )));
        }
        if !omega0.is_finite() || !chemical_potential.is_finite() {
            return Err(Error::InvalidParameter(
                "omega0 and chemical potential must be finite".into(),
            ));
        }
        Ok(Self {
            omega0,
            group_velocity,
            coupling,
            band_halfwidth,
            chemical_potential,
            attractive,
        })
    }

    /// Ratio coupling / group_velocity.
    pub fn coupling_ratio(&self) -> f64 {
        self.coupling / self.group_velocity
    }

    /// Dimensionless coupling g = coupling / (2 pi * group_velocity).
    pub fn dimensionless_coupling(&self) -> f64 {
        self.coupling / (2.0 * std::f64::consts::PI * self.group_velocity)
    }
}

/// Thermal state: inverse temperature in seconds and chemical potential in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    pub beta: f64,
    pub mu: f64,
}

impl ThermalState {
    pub fn new(beta: f64, mu: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive and finite, got {beta} s"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be finite".into()));
        }
        Ok(Self { beta, mu })
    }

    pub fn from_kelvin(t_kelvin: f64, mu: f64) -> Result<Self> {
        Self::new(beta_from_kelvin(t_kelvin)?, mu)
    }

    pub fn temperature_kelvin(&self) -> f64 {
        HBAR / (K_B * self.beta)
    }
}

/// Frequency of a plane-wave mode on the linear branch: omega0 +/- v_e * k.
pub fn dispersion(k: f64, branch: Branch, params: &WaveguideParams) -> f64 {
    match branch {
        Branch::Right => params.omega0 + params.group_velocity * k,
        Branch::Left => params.omega0 - params.group_velocity * k,
    }
}

/// coth(x) with a Laurent series below |x| = 1e-4.
///
/// The exponential form 1 + 2/expm1(2x) is stable for every other argument,
/// including large |x| where it saturates to +/-1 without overflow.
pub fn coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else {
        1.0 + 2.0 / f64::exp_m1(2.0 * x)
    }
}

/// Bose occupation f = 1 / (exp(beta * (omega - mu)) - 1).
///
/// The argument beta * (omega - mu) = 0 is a pole of the distribution and is
/// reported as an error; the caller decides how to regularize.
pub fn bose_occupation(omega: f64, thermal: &ThermalState) -> Result<f64> {
    let x = thermal.beta * (omega - thermal.mu);
    if x == 0.0 {
        return Err(Error::DistributionPole);
    }
    Ok(1.0 / f64::exp_m1(x))
}

/// 1 + f, the stimulated-emission weight paired with `bose_occupation`.
///
/// Computed as -1/expm1(-x) rather than 1 + f: the latter loses relative
/// accuracy once f approaches -1 (x below about -5), while this form stays
/// correct to a rounding over the whole representable range, so the ratio
/// (1 + f)/f = e^x holds elementwise in f64.
pub fn bose_occupation_bar(omega: f64, thermal: &ThermalState) -> Result<f64> {
    let x = thermal.beta * (omega - thermal.mu);
    if x == 0.0 {
        return Err(Error::DistributionPole);
    }
    Ok(-1.0 / f64::exp_m1(-x))
}

/// coth(beta * (epsilon - mu) / 2) = 1 + 2 f(epsilon).
pub fn coth_factor(epsilon: f64, thermal: &ThermalState) -> Result<f64> {
    let x = 0.5 * thermal.beta * (epsilon - thermal.mu);
    if x == 0.0 {
        return Err(Error::DistributionPole);
    }
    Ok(coth(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn params() -> WaveguideParams {
        WaveguideParams::new(0.0, 1e5, 4.0 * std::f64::consts::PI * 1e5, 40e9, 0.0, true).unwrap()
    }

    #[test]
    fn dispersion_at_zero_momentum_is_omega0() {
        let p = WaveguideParams::new(1.2e15, 1e5, 0.0, 40e9, 0.0, true).unwrap();
        assert_eq!(dispersion(0.0, Branch::Right, &p), 1.2e15);
        assert_eq!(dispersion(0.0, Branch::Left, &p), 1.2e15);
    }

    #[test]
    fn dispersion_linear_value() {
        let p = WaveguideParams::new(0.0, 1e5, 0.0, 40e9, 0.0, true).unwrap();
        assert_relative_eq!(dispersion(1e6, Branch::Right, &p), 1e11, max_relative = 1e-15);
    }

    #[test]
    fn dispersion_branches_mirror() {
        let p = params();
        for &k in &[-3e6, -1.0, 0.5, 2e4, 7.7e6] {
            assert_eq!(
                dispersion(k, Branch::Right, &p),
                dispersion(-k, Branch::Left, &p)
            );
        }
    }

    #[test]
    fn bose_at_log_two_is_one() {
        // beta * (omega - mu) = ln 2 makes exp(x) - 1 = 1.
        let th = ThermalState::new(1.0, 0.0).unwrap();
        let f = bose_occupation(std::f64::consts::LN_2, &th).unwrap();
        assert_relative_eq!(f, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn bose_high_frequency_limits() {
        let th = ThermalState::new(1.0, 0.0).unwrap();
        let f = bose_occupation(200.0, &th).unwrap();
        assert!(f < 1e-80);
        assert_relative_eq!(bose_occupation_bar(200.0, &th).unwrap(), 1.0);
    }

    #[test]
    fn bose_pole_is_an_error() {
        let th = ThermalState::new(2.0, 5.0).unwrap();
        assert!(matches!(
            bose_occupation(5.0, &th),
            Err(Error::DistributionPole)
        ));
        assert!(matches!(coth_factor(5.0, &th), Err(Error::DistributionPole)));
    }

    #[test]
    fn coth_factor_at_beta_gap_two() {
        // beta * (eps - mu) = 2 evaluates coth at 1.
        let th = ThermalState::new(2.0, 0.0).unwrap();
        let c = coth_factor(1.0, &th).unwrap();
        assert_relative_eq!(c, 1.313_035_285_499_331_3, max_relative = 1e-14);
    }

    #[test]
    fn coth_saturates_at_large_argument() {
        let th = ThermalState::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(coth_factor(80.0, &th).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(coth_factor(-80.0, &th).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn coth_series_branch_is_continuous() {
        // Straddle the branch switch by a few ulps; coth' ~ -1/x^2 is steep
        // here, so keep the straddle much narrower than the tolerance.
        for &x in &[1e-4, -1e-4] {
            let below = coth(x * (1.0 - 1e-15));
            let above = coth(x * (1.0 + 1e-15));
            assert_relative_eq!(below, above, max_relative = 1e-10);
        }
        // Series branch against the analytic value at a representative point.
        assert_relative_eq!(coth(1e-5), 1.0e5 + 1e-5 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn band_conversion_angular_vs_ordinary() {
        assert_eq!(band_halfwidth_from_ghz(40.0, true), 4e10);
        assert_relative_eq!(
            band_halfwidth_from_ghz(40.0, false),
            2.0 * std::f64::consts::PI * 4e10,
            max_relative = 1e-15
        );
    }

    #[test]
    fn kelvin_beta_round_trip() {
        let beta = beta_from_kelvin(0.1).unwrap();
        assert_relative_eq!(kelvin_from_beta(beta).unwrap(), 0.1, max_relative = 1e-14);
        assert!(beta_from_kelvin(-1.0).is_err());
        assert!(beta_from_kelvin(0.0).is_err());
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(WaveguideParams::new(0.0, 0.0, 1.0, 1.0, 0.0, true).is_err());
        assert!(WaveguideParams::new(0.0, 1.0, -1.0, 1.0, 0.0, true).is_err());
        assert!(WaveguideParams::new(0.0, 1.0, 1.0, 0.0, 0.0, true).is_err());
        assert!(ThermalState::new(0.0, 0.0).is_err());
    }

    proptest! {
        // 1 + 2 f(omega) and coth(beta (omega - mu) / 2) are two evaluations
        // of the same function and must agree over the whole thermal range.
        #[test]
        fn occupation_coth_identity(x in 1e-3f64..50.0) {
            let th = ThermalState::new(1.0, 0.0).unwrap();
            let f = bose_occupation(x, &th).unwrap();
            let c = coth_factor(x, &th).unwrap();
            prop_assert!(((1.0 + 2.0 * f) - c).abs() < 1e-12);
        }

        // Detailed balance: (1 + f) / f = exp(beta (omega - mu)).
        #[test]
        fn detailed_balance_ratio(x in 1e-3f64..500.0) {
            let th = ThermalState::new(1.0, 0.0).unwrap();
            let f = bose_occupation(x, &th).unwrap();
            let fbar = bose_occupation_bar(x, &th).unwrap();
            let ratio = fbar / f;
            prop_assert!((ratio / x.exp() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn dispersion_is_linear(k1 in -1e7f64..1e7, k2 in -1e7f64..1e7) {
            let p = WaveguideParams::new(0.0, 1e5, 0.0, 40e9, 0.0, true).unwrap();
            let lhs = dispersion(k1 + k2, Branch::Right, &p);
            let rhs = dispersion(k1, Branch::Right, &p) + dispersion(k2, Branch::Right, &p);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1.0));
        }
    }
}
