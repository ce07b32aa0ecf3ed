//! Run configuration: defaults, flat key = value config files, flag overrides.
//!
//! Every physical quantity carries its unit in the key name; dimensionless
//! knobs say so. The resolved configuration is echoed into every output
//! artifact so a result file is reproducible from its own header.

use anyhow::{bail, Context, Result};
use phomol::physics::{band_halfwidth_from_ghz, ThermalState, WaveguideParams};
use serde_json::{Map, Value};
use std::path::Path;

/// Output payload format for tabular data.
#[derive(Debug, Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Tables go to separate .csv files referenced from the JSON summary.
    Csv,
    /// Tables are embedded in the JSON summary.
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub omega0_rad_per_s: f64,
    pub group_velocity_m_per_s: f64,
    /// Interaction strength as the ratio v / v_e.
    pub v_over_ve: f64,
    /// Band half-width in GHz; `angular` picks its interpretation.
    pub omega_ghz: f64,
    /// true: omega_ghz is angular (rad/s x 1e9); false: ordinary (x 2 pi).
    pub angular: bool,
    pub attractive: bool,
    pub mu_rad_per_s: f64,
    pub temperature_kelvin: f64,
    /// Infrared cutoff of the coth kernel (dimensionless).
    pub x_min: f64,
    pub quad_tol: f64,
    pub scan_zeta_min_over_delta: f64,
    pub scan_zeta_max_over_delta: f64,
    pub scan_eta_over_delta: f64,
    pub scan_points: usize,
    pub phase_cells: usize,
    /// Delta-regularization width as a fraction of the grid span.
    pub phase_sigma_frac: f64,
    /// Explicit gate phase; defaults to the propagation value v / (4 v_e).
    pub gate_theta_rad: Option<f64>,
    pub molecule_kappa: f64,
    pub molecule_box_length: f64,
    pub molecule_points: usize,
    /// Center-of-mass momentum as an integer box mode: K = 2 pi mode / L.
    pub molecule_k_mode: i64,
    pub keldysh_beta: f64,
    pub keldysh_mu: f64,
    pub keldysh_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega0_rad_per_s: 0.0,
            group_velocity_m_per_s: 1e5,
            v_over_ve: 4.0 * std::f64::consts::PI,
            omega_ghz: 40.0,
            angular: true,
            attractive: true,
            mu_rad_per_s: 0.0,
            temperature_kelvin: 0.12,
            x_min: 1.0,
            quad_tol: 1e-10,
            scan_zeta_min_over_delta: -1.95,
            scan_zeta_max_over_delta: 1.95,
            scan_eta_over_delta: 0.0,
            scan_points: 201,
            phase_cells: 10_000,
            phase_sigma_frac: 1e-3,
            gate_theta_rad: None,
            molecule_kappa: 2.0,
            molecule_box_length: 10.0,
            molecule_points: 128,
            molecule_k_mode: 1,
            keldysh_beta: 2.0,
            keldysh_mu: 0.25,
            keldysh_points: 4001,
        }
    }
}

impl RunConfig {
    /// Merge a flat `key = value` config file over the current values.
    /// Unknown keys are rejected: a typo must not silently fall back to a
    /// default.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').with_context(|| {
                format!("config line {}: expected `key = value`, got {raw:?}", idx + 1)
            })?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("config line {}", idx + 1))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num(v: &str) -> Result<f64> {
            v.parse::<f64>().with_context(|| format!("not a number: {v:?}"))
        }
        fn count(v: &str) -> Result<usize> {
            v.parse::<usize>().with_context(|| format!("not a count: {v:?}"))
        }
        fn flag(v: &str) -> Result<bool> {
            v.parse::<bool>().with_context(|| format!("not true/false: {v:?}"))
        }
        match key {
            "omega0_rad_per_s" => self.omega0_rad_per_s = num(value)?,
            "group_velocity_m_per_s" => self.group_velocity_m_per_s = num(value)?,
            "v_over_ve" => self.v_over_ve = num(value)?,
            "omega_ghz" => self.omega_ghz = num(value)?,
            "angular" => self.angular = flag(value)?,
            "attractive" => self.attractive = flag(value)?,
            "mu_rad_per_s" => self.mu_rad_per_s = num(value)?,
            "temperature_kelvin" => self.temperature_kelvin = num(value)?,
            "x_min" => self.x_min = num(value)?,
            "quad_tol" => self.quad_tol = num(value)?,
            "scan_zeta_min_over_delta" => self.scan_zeta_min_over_delta = num(value)?,
            "scan_zeta_max_over_delta" => self.scan_zeta_max_over_delta = num(value)?,
            "scan_eta_over_delta" => self.scan_eta_over_delta = num(value)?,
            "scan_points" => self.scan_points = count(value)?,
            "phase_cells" => self.phase_cells = count(value)?,
            "phase_sigma_frac" => self.phase_sigma_frac = num(value)?,
            "gate_theta_rad" => self.gate_theta_rad = Some(num(value)?),
            "molecule_kappa" => self.molecule_kappa = num(value)?,
            "molecule_box_length" => self.molecule_box_length = num(value)?,
            "molecule_points" => self.molecule_points = count(value)?,
            "molecule_k_mode" => {
                self.molecule_k_mode = value
                    .parse::<i64>()
                    .with_context(|| format!("not an integer: {value:?}"))?
            }
            "keldysh_beta" => self.keldysh_beta = num(value)?,
            "keldysh_mu" => self.keldysh_mu = num(value)?,
            "keldysh_points" => self.keldysh_points = count(value)?,
            _ => bail!("unknown config key {key:?}"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.scan_points < 2 || self.scan_points > 100_000 {
            bail!("scan_points must be in [2, 100000], got {}", self.scan_points);
        }
        if !(self.scan_zeta_min_over_delta < self.scan_zeta_max_over_delta) {
            bail!("scan range must be increasing");
        }
        if self.phase_cells < 64 {
            bail!("phase_cells must be at least 64, got {}", self.phase_cells);
        }
        if !(self.keldysh_beta > 0.0 && self.keldysh_beta <= 30.0) {
            bail!(
                "keldysh_beta must be in (0, 30] so the balance factor stays finite, got {}",
                self.keldysh_beta
            );
        }
        if self.keldysh_points < 64 || self.keldysh_points > 1 << 22 {
            bail!("keldysh_points must be in [64, 4194304], got {}", self.keldysh_points);
        }
        Ok(())
    }

    pub fn band_halfwidth(&self) -> f64 {
        band_halfwidth_from_ghz(self.omega_ghz, self.angular)
    }

    pub fn coupling(&self) -> f64 {
        self.v_over_ve * self.group_velocity_m_per_s
    }

    pub fn params(&self) -> phomol::Result<WaveguideParams> {
        WaveguideParams::new(
            self.omega0_rad_per_s,
            self.group_velocity_m_per_s,
            self.coupling(),
            self.band_halfwidth(),
            self.mu_rad_per_s,
            self.attractive,
        )
    }

    pub fn thermal(&self) -> phomol::Result<ThermalState> {
        ThermalState::from_kelvin(self.temperature_kelvin, self.mu_rad_per_s)
    }

    /// The resolved configuration as a sorted JSON object, embedded verbatim
    /// in every artifact.
    pub fn echo(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("angular".into(), self.angular.into());
        m.insert("attractive".into(), self.attractive.into());
        m.insert(
            "gate_theta_rad".into(),
            match self.gate_theta_rad {
                Some(v) => v.into(),
                None => Value::Null,
            },
        );
        m.insert("group_velocity_m_per_s".into(), self.group_velocity_m_per_s.into());
        m.insert("keldysh_beta".into(), self.keldysh_beta.into());
        m.insert("keldysh_mu".into(), self.keldysh_mu.into());
        m.insert("keldysh_points".into(), self.keldysh_points.into());
        m.insert("molecule_box_length".into(), self.molecule_box_length.into());
        m.insert("molecule_k_mode".into(), self.molecule_k_mode.into());
        m.insert("molecule_kappa".into(), self.molecule_kappa.into());
        m.insert("molecule_points".into(), self.molecule_points.into());
        m.insert("mu_rad_per_s".into(), self.mu_rad_per_s.into());
        m.insert("omega0_rad_per_s".into(), self.omega0_rad_per_s.into());
        m.insert("omega_ghz".into(), self.omega_ghz.into());
        m.insert("phase_cells".into(), self.phase_cells.into());
        m.insert("phase_sigma_frac".into(), self.phase_sigma_frac.into());
        m.insert("quad_tol".into(), self.quad_tol.into());
        m.insert("scan_eta_over_delta".into(), self.scan_eta_over_delta.into());
        m.insert("scan_points".into(), self.scan_points.into());
        m.insert("scan_zeta_max_over_delta".into(), self.scan_zeta_max_over_delta.into());
        m.insert("scan_zeta_min_over_delta".into(), self.scan_zeta_min_over_delta.into());
        m.insert("temperature_kelvin".into(), self.temperature_kelvin.into());
        m.insert("v_over_ve".into(), self.v_over_ve.into());
        m.insert("x_min".into(), self.x_min.into());
        m
    }

    /// Config echo as `# key = value` comment lines for CSV headers.
    pub fn echo_comments(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.echo() {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s
    }
}
