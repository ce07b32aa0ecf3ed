//! Subcommand implementations. Each returns the JSON summary it also wants
//! printed; tabular payloads go to .csv files or inline arrays depending on
//! the selected format. All numeric serialization is round-trip exact, so
//! re-running a command with the same configuration reproduces the artifact
//! bytes.

use crate::config::{Format, RunConfig};
use anyhow::{Context, Result};
use num_complex::Complex64;
use phomol::boundstate::{
    chi_delta_bound, fourier_amplitudes, molecule_wavefunction,
    molecule_wavefunction_momentum_sum, nonlinear_phase, propagate_pair,
};
use phomol::gate::{apply, basis_state, cnot, compose, cz_from_phase, hadamard, tensor, GateMatrix, TWO_QUBIT_BASIS};
use phomol::keldysh::{
    fdt_components, lorentzian_spectral, retarded_from_spectral, time_domain_retarded, GridSpec,
    MuMultiplier, SpectralGrid,
};
use phomol::physics::ThermalState;
use phomol::tmatrix::{
    critical_temperature, denominator_scan, log_spaced, tmatrix_retarded_1d, CriticalPoint,
    TMatrixQuery, TcMethod,
};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;

fn write_artifact(out_dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let path = out_dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn critical_point_json(p: &CriticalPoint) -> Value {
    json!({
        "method": match p.method {
            TcMethod::Asymptotic => "asymptotic",
            TcMethod::Numeric => "numeric",
        },
        "t_c_kelvin": p.t_c_kelvin,
        "lambda_c": p.lambda_c,
        "g": p.g,
        "x_min": p.x_min,
    })
}

/// Critical temperature by both methods plus a denominator scan around the
/// numeric critical point.
pub fn cmd_tc(cfg: &RunConfig, out_dir: &Path, format: Format) -> Result<Value> {
    let params = cfg.params()?;
    let asymptotic = critical_temperature(&params, TcMethod::Asymptotic, cfg.x_min)?;
    let numeric = critical_temperature(&params, TcMethod::Numeric, cfg.x_min)?;

    let temps = log_spaced(numeric.t_c_kelvin / 10.0, numeric.t_c_kelvin * 10.0, 101)?;
    let scan = denominator_scan(&temps, &params, cfg.x_min)?;

    let mut summary = json!({
        "config": cfg.echo(),
        "asymptotic": critical_point_json(&asymptotic),
        "numeric": critical_point_json(&numeric),
        "t_c_ratio_numeric_over_asymptotic": numeric.t_c_kelvin / asymptotic.t_c_kelvin,
        "offset_ln_lambda_c_minus_inv_g": numeric.lambda_c.ln() - 1.0 / numeric.g,
    });

    match format {
        Format::Json => {
            let rows: Vec<Value> = scan
                .iter()
                .map(|p| {
                    json!({
                        "t_kelvin": p.t_kelvin,
                        "lambda": p.lambda,
                        "coth_integral": p.integral,
                        "denominator": p.denominator,
                        "tmatrix_re": p.tmatrix.re,
                        "tmatrix_im": p.tmatrix.im,
                        "pole_proximity": p.pole_proximity,
                    })
                })
                .collect();
            summary["scan"] = Value::Array(rows);
        }
        Format::Csv => {
            let mut body = cfg.echo_comments();
            body.push_str("t_kelvin,lambda,coth_integral,denominator,tmatrix_re,tmatrix_im,pole_proximity\n");
            for p in &scan {
                writeln!(
                    body,
                    "{},{},{},{},{},{},{}",
                    p.t_kelvin, p.lambda, p.integral, p.denominator, p.tmatrix.re, p.tmatrix.im, p.pole_proximity
                )
                .unwrap();
            }
            write_artifact(out_dir, "tc_denominator_scan.csv", &body)?;
            summary["scan_file"] = "tc_denominator_scan.csv".into();
            summary["scan_rows"] = scan.len().into();
        }
    }
    Ok(summary)
}

/// Retarded T-matrix over a frequency window at the configured temperature.
pub fn cmd_tmatrix_scan(cfg: &RunConfig, out_dir: &Path, format: Format) -> Result<Value> {
    let params = cfg.params()?;
    let thermal = cfg.thermal()?;
    let delta = params.band_halfwidth;
    let n = cfg.scan_points;
    let eta = cfg.scan_eta_over_delta * delta;

    struct Row {
        zeta_re: f64,
        value: Complex64,
        denominator: Complex64,
        pole: bool,
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let frac = i as f64 / (n - 1) as f64;
        let zeta_re = delta
            * (cfg.scan_zeta_min_over_delta
                + (cfg.scan_zeta_max_over_delta - cfg.scan_zeta_min_over_delta) * frac);
        let query = TMatrixQuery {
            zeta: Complex64::new(zeta_re, eta),
            params,
            thermal,
            x_min: cfg.x_min,
            quad_tol: cfg.quad_tol,
        };
        let r = tmatrix_retarded_1d(&query)?;
        rows.push(Row {
            zeta_re,
            value: r.value,
            denominator: r.denominator,
            pole: r.pole_proximity,
        });
    }
    let pole_count = rows.iter().filter(|r| r.pole).count();

    let mut summary = json!({
        "config": cfg.echo(),
        "temperature_kelvin": cfg.temperature_kelvin,
        "zeta_im_rad_per_s": eta,
        "points": n,
        "pole_rows": pole_count,
    });
    match format {
        Format::Json => {
            let data: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "zeta_re_rad_per_s": r.zeta_re,
                        "t_re": r.value.re,
                        "t_im": r.value.im,
                        "denominator_re": r.denominator.re,
                        "denominator_im": r.denominator.im,
                        "pole_proximity": r.pole,
                    })
                })
                .collect();
            summary["scan"] = Value::Array(data);
        }
        Format::Csv => {
            let mut body = cfg.echo_comments();
            body.push_str("zeta_re_rad_per_s,zeta_im_rad_per_s,t_re,t_im,denominator_re,denominator_im,pole_proximity\n");
            for r in &rows {
                writeln!(
                    body,
                    "{},{},{},{},{},{},{}",
                    r.zeta_re, eta, r.value.re, r.value.im, r.denominator.re, r.denominator.im, r.pole
                )
                .unwrap();
            }
            write_artifact(out_dir, "tmatrix_scan.csv", &body)?;
            summary["scan_file"] = "tmatrix_scan.csv".into();
            summary["scan_rows"] = rows.len().into();
        }
    }
    Ok(summary)
}

/// Nonlinear phase of one full pair crossing, by characteristics and by
/// explicit grid advection.
pub fn cmd_phase(cfg: &RunConfig, out_dir: &Path, format: Format) -> Result<Value> {
    let n = cfg.phase_cells;
    let x_grid: Vec<f64> = (0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .collect();
    let sigma = cfg.phase_sigma_frac * 2.0;
    let r = propagate_pair(
        cfg.coupling(),
        cfg.group_velocity_m_per_s,
        sigma,
        &x_grid,
        Complex64::new(1.0, 0.0),
    )?;

    let mut summary = json!({
        "config": cfg.echo(),
        "theta": r.theta,
        "theta_analytic": r.theta_analytic,
        "theta_grid": r.theta_grid,
        "theta_over_pi": r.theta / std::f64::consts::PI,
        "phase_sign": r.phase_sign,
        "sigma": r.sigma,
        "n_cells": r.n_cells,
        "amplitude_deviation": r.amplitude_deviation,
        "grid_amplitude_deviation": r.grid_amplitude_deviation,
        "phi_out": [r.phi_out.re, r.phi_out.im],
    });
    match format {
        Format::Json => {
            let profile: Vec<Value> = x_grid
                .iter()
                .zip(&r.phase_profile)
                .map(|(x, th)| json!([x, th]))
                .collect();
            summary["profile"] = Value::Array(profile);
        }
        Format::Csv => {
            let mut body = cfg.echo_comments();
            body.push_str("x,theta_accumulated\n");
            for (x, th) in x_grid.iter().zip(&r.phase_profile) {
                writeln!(body, "{},{}", x, th).unwrap();
            }
            write_artifact(out_dir, "phase_profile.csv", &body)?;
            summary["profile_file"] = "phase_profile.csv".into();
            summary["profile_rows"] = x_grid.len().into();
        }
    }
    Ok(summary)
}

fn matrix_pairs_json(m: &GateMatrix) -> Value {
    let pairs = m.to_pairs();
    Value::Array(
        pairs
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(|[re, im]| json!([re, im])).collect()))
            .collect(),
    )
}

/// Conditional-phase gate and its Hadamard-conjugated truth table.
pub fn cmd_gate(cfg: &RunConfig, _out_dir: &Path, _format: Format) -> Result<Value> {
    let theta = match cfg.gate_theta_rad {
        Some(t) => t,
        None => nonlinear_phase(cfg.coupling(), cfg.group_velocity_m_per_s)?,
    };
    let cz = cz_from_phase(theta);

    let mut truth_table = Vec::new();
    for idx in 0..4 {
        let input = basis_state(4, idx)?;
        let output = apply(&input, &cz)?;
        truth_table.push(json!({
            "input": TWO_QUBIT_BASIS[idx],
            "output": output.iter().map(|v| json!([v.re, v.im])).collect::<Vec<_>>(),
        }));
    }

    let ih = tensor(&GateMatrix::identity(2)?, &hadamard())?;
    let conjugated = compose(&[ih.clone(), cz.clone(), ih])?;
    let reference = cnot();
    let mut cnot_dev: f64 = 0.0;
    for row in 0..4 {
        for col in 0..4 {
            cnot_dev = cnot_dev.max((conjugated.get(row, col) - reference.get(row, col)).norm());
        }
    }

    Ok(json!({
        "config": cfg.echo(),
        "theta_rad": theta,
        "theta_over_pi": theta / std::f64::consts::PI,
        "matrix": matrix_pairs_json(&cz),
        "truth_table": truth_table,
        "unitarity_deviation": cz.unitarity_deviation(),
        "cnot_conjugation_max_deviation": cnot_dev,
    }))
}

/// Residual report for the correlator identities: detailed balance, sum
/// rule, Hilbert reconstruction, causality.
pub fn cmd_keldysh_check(cfg: &RunConfig, _out_dir: &Path, _format: Format) -> Result<Value> {
    let beta = cfg.keldysh_beta;
    let mu = cfg.keldysh_mu;
    let n = cfg.keldysh_points;
    let th = ThermalState::new(beta, mu)?;

    // Balance and sum rule on a band of half-width 20 around mu; the small
    // offset keeps every grid point away from the occupation pole.
    let offset = 0.0371;
    let spec = GridSpec {
        omega_min: mu - 20.0 + offset,
        omega_max: mu + 20.0 + offset,
        n_points: n,
    };
    let eta = 1e-3 * (spec.omega_max - spec.omega_min);
    let spectral = lorentzian_spectral(mu + offset, eta, &spec)?;
    let (lesser, greater) = fdt_components(&spectral, &th, MuMultiplier::Single)?;
    let mut balance_rel: f64 = 0.0;
    let mut sum_rule_rel: f64 = 0.0;
    for i in 0..spectral.n_points() {
        let x = beta * (spectral.omega(i) - mu);
        let ratio = greater.values[i] / lesser.values[i];
        balance_rel = balance_rel.max((ratio.re - x.exp()).abs() / x.exp());
        let recovered = Complex64::new(0.0, 1.0) * (greater.values[i] - lesser.values[i]);
        sum_rule_rel =
            sum_rule_rel.max((recovered - spectral.values[i]).norm() / spectral.values[i].norm());
    }

    // Hilbert reconstruction of the Lorentzian retarded function.
    let eps0 = 0.0;
    let eta_h = 0.01;
    let hspec = GridSpec {
        omega_min: eps0 - 300.0 * eta_h,
        omega_max: eps0 + 300.0 * eta_h,
        n_points: n,
    };
    let lorentz = lorentzian_spectral(eps0, eta_h, &hspec)?;
    let reconstructed = retarded_from_spectral(&lorentz, 0.0)?;
    let mut hilbert_rel: f64 = 0.0;
    for i in 0..reconstructed.n_points() {
        let w = reconstructed.omega(i);
        if (w - eps0).abs() <= 5.0 * eta_h {
            continue;
        }
        let analytic = 1.0 / Complex64::new(w - eps0, eta_h);
        hilbert_rel =
            hilbert_rel.max((reconstructed.values[i] - analytic).norm() / analytic.norm());
    }

    // Causality metric of the time-domain transform on an analytic retarded
    // input over the same band.
    let mut retarded = SpectralGrid::from_spec(&spec)?;
    for i in 0..retarded.n_points() {
        retarded.values[i] = 1.0 / Complex64::new(retarded.omega(i) - (mu + offset), eta);
    }
    let series = time_domain_retarded(&retarded)?;

    let tolerances = json!({
        "detailed_balance": 1e-12,
        "sum_rule": 1e-12,
        "hilbert_reconstruction": 1e-3,
        "causality_leak": 1e-4,
    });
    let all_within = balance_rel <= 1e-12
        && sum_rule_rel <= 1e-12
        && hilbert_rel <= 1e-3
        && series.negative_time_leak <= 1e-4;

    Ok(json!({
        "config": cfg.echo(),
        "detailed_balance_max_rel": balance_rel,
        "sum_rule_max_rel": sum_rule_rel,
        "hilbert_max_rel_outside_5eta": hilbert_rel,
        "causality_leak": series.negative_time_leak,
        "tolerances": tolerances,
        "all_within": all_within,
    }))
}

/// Bound-state pair amplitude, its momentum spectrum, and the two-photon
/// molecule field.
pub fn cmd_molecule(cfg: &RunConfig, out_dir: &Path, format: Format) -> Result<Value> {
    let l = cfg.molecule_box_length;
    let n = cfg.molecule_points;
    let chi = chi_delta_bound(cfg.molecule_kappa, l, n)?;
    let (momenta, amplitudes) = fourier_amplitudes(&chi)?;
    let parseval: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let norm = chi.norm_squared();

    let k_com = 2.0 * std::f64::consts::PI * cfg.molecule_k_mode as f64 / l;
    let field = molecule_wavefunction(&chi, k_com, &chi.x_grid, &chi.x_grid)?;

    // Cross-check against the momentum-sum construction when the O(n^3)
    // cost stays reasonable.
    let direct_vs_sum = if n <= 256 {
        let summed = molecule_wavefunction_momentum_sum(&chi, k_com, &chi.x_grid, &chi.x_grid)?;
        let dev = field
            .values
            .iter()
            .zip(&summed.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        Value::from(dev)
    } else {
        Value::Null
    };

    let mut summary = json!({
        "config": cfg.echo(),
        "kappa": cfg.molecule_kappa,
        "box_length": l,
        "points": n,
        "k_com_rad_per_m": k_com,
        "norm_squared": norm,
        "parseval_abs_error": (parseval - norm).abs(),
        "direct_vs_momentum_sum_max_dev": direct_vs_sum,
        "field_norm_squared": field.norm_squared(),
    });

    match format {
        Format::Json => {
            summary["chi"] = Value::Array(
                chi.x_grid
                    .iter()
                    .zip(&chi.values)
                    .map(|(x, v)| json!([x, v.re, v.im]))
                    .collect(),
            );
            summary["spectrum"] = Value::Array(
                momenta
                    .iter()
                    .zip(&amplitudes)
                    .map(|(k, a)| json!([k, a.re, a.im]))
                    .collect(),
            );
            summary["field"] = Value::Array(
                field
                    .x_a
                    .iter()
                    .enumerate()
                    .flat_map(|(i, xa)| {
                        let field = &field;
                        field.x_b.iter().enumerate().map(move |(j, xb)| {
                            let v = field.value(i, j);
                            json!([xa, xb, v.re, v.im])
                        })
                    })
                    .collect(),
            );
        }
        Format::Csv => {
            let mut body = cfg.echo_comments();
            let mut buf = Vec::new();
            chi.write_csv(&mut buf)?;
            body.push_str(&String::from_utf8(buf).expect("csv is utf-8"));
            write_artifact(out_dir, "molecule_chi.csv", &body)?;

            let mut body = cfg.echo_comments();
            body.push_str("k,re,im\n");
            for (k, a) in momenta.iter().zip(&amplitudes) {
                writeln!(body, "{},{},{}", k, a.re, a.im).unwrap();
            }
            write_artifact(out_dir, "molecule_spectrum.csv", &body)?;

            let mut body = cfg.echo_comments();
            let mut buf = Vec::new();
            field.write_csv(&mut buf)?;
            body.push_str(&String::from_utf8(buf).expect("csv is utf-8"));
            write_artifact(out_dir, "molecule_field.csv", &body)?;

            summary["chi_file"] = "molecule_chi.csv".into();
            summary["spectrum_file"] = "molecule_spectrum.csv".into();
            summary["field_file"] = "molecule_field.csv".into();
        }
    }
    Ok(summary)
}
