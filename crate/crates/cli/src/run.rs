//! Device dispatch: resolved configuration in, [`ResultTable`] out.

use optomech::modes::{classify_interaction, InteractionCategory, InteractionTerm, Ladder};
use optomech::nonreciprocity::{self, ConversionParams, CCW, CW};
use optomech::pairgen::{self, Engine, PairgenParams, SweepAxis};
use optomech::phonon_pt::{self, PTParams, PtRegime};
use optomech::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::citations;
use crate::config::{Device, ExperimentConfig, GridDefault};
use crate::error::{CliError, CliResult};
use crate::table::{ColumnData, Metadata, Parameter, ResultTable};

/// A finished run. `failure` is set when some sweep points failed; the
/// table is still complete and should be written before exiting.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: ResultTable,
    pub failure: Option<CliError>,
}

impl RunOutput {
    fn ok(table: ResultTable) -> Self {
        Self { table, failure: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesParams {
    /// Enumerate azimuthal numbers `|m| ≤ m_max`.
    pub m_max: i64,
    /// Keep only terms that survive the selection rule.
    pub allowed_only: bool,
}

impl Default for ModesParams {
    fn default() -> Self {
        Self {
            m_max: 3,
            allowed_only: true,
        }
    }
}

pub fn run(device: Device, cfg: &ExperimentConfig, command: &str) -> CliResult<RunOutput> {
    let engine = parse_engine(device, cfg.engine.as_deref())?;
    match device {
        Device::Pairgen => run_pairgen(cfg, engine, command),
        Device::Convert => run_convert(cfg, command),
        Device::Ptsym => run_ptsym(cfg, command),
        Device::Modes => run_modes(cfg, command),
    }
}

pub fn parse_engine(device: Device, engine: Option<&str>) -> CliResult<Engine> {
    match engine {
        None => Ok(Engine::Gaussian),
        Some(e) => {
            let parsed: Engine = e.parse().map_err(CliError::from)?;
            if device != Device::Pairgen && parsed != Engine::Gaussian {
                return Err(CliError::Validation(format!("--engine {e} applies to pairgen only")));
            }
            Ok(parsed)
        }
    }
}

/// Resolved parameters with citations; user-changed values are flagged.
pub fn parameter_list<T: Serialize + Default>(device: Device, resolved: &T) -> Vec<Parameter> {
    let value = serde_json::to_value(resolved).expect("parameter structs serialize");
    let defaults = serde_json::to_value(T::default()).expect("parameter structs serialize");
    let Value::Object(map) = value else {
        return Vec::new();
    };
    citations::order(device)
        .iter()
        .filter_map(|&name| map.get(name).map(|v| (name, v.clone())))
        .map(|(name, v)| {
            let base = citations::cite(device, name);
            let citation = if defaults.get(name) == Some(&v) {
                base.to_string()
            } else {
                format!("set by user (default: {base})")
            };
            Parameter {
                name: name.to_string(),
                value: v,
                citation,
            }
        })
        .collect()
}

fn extra_parameter(device: Device, name: &str, value: f64, default: f64) -> Parameter {
    let base = citations::cite(device, name);
    Parameter {
        name: name.to_string(),
        value: serde_json::json!(value),
        citation: if value == default {
            base.to_string()
        } else {
            format!("set by user (default: {base})")
        },
    }
}

fn grid_note(meta: &mut Metadata, axis: &str, grid: &[f64]) {
    let desc = match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => format!("{axis}: {} points from {a} to {b}", grid.len()),
        _ => format!("{axis}: empty"),
    };
    meta.note("sweep", desc);
}

// ---------------------------------------------------------------- pairgen

fn pairgen_axis(name: &str) -> CliResult<SweepAxis> {
    match name {
        "delta_k" => Ok(SweepAxis::DeltaK),
        "g_k" => Ok(SweepAxis::GK),
        "n_th" => Ok(SweepAxis::NTh),
        other => Err(CliError::Validation(format!(
            "pairgen sweep axis `{other}` (delta_k|g_k|n_th)"
        ))),
    }
}

pub fn pairgen_default_grid(axis: SweepAxis) -> GridDefault {
    match axis {
        SweepAxis::DeltaK => GridDefault {
            start: -0.2,
            stop: 0.2,
            points: 81,
            endpoint: true,
        },
        SweepAxis::GK => GridDefault {
            start: 0.1,
            stop: 5.0,
            points: 50,
            endpoint: true,
        },
        SweepAxis::NTh => GridDefault {
            start: 0.0,
            stop: 1.0,
            points: 21,
            endpoint: true,
        },
    }
}

/// One I-curve: values (NaN where undefined), status strings, and the
/// first failure worth a nonzero exit.
pub struct PairgenSeries {
    pub values: Vec<f64>,
    pub status: Vec<String>,
    pub failure: Option<CliError>,
}

pub fn pairgen_series(p: &PairgenParams, axis: SweepAxis, grid: &[f64], engine: Engine) -> PairgenSeries {
    let points = pairgen::sweep_nonclassicality(p, axis, grid, engine);
    let mut out = PairgenSeries {
        values: Vec::with_capacity(points.len()),
        status: Vec::with_capacity(points.len()),
        failure: None,
    };
    for pt in points {
        match pt.result {
            Ok(i) => {
                out.values.push(i);
                out.status.push("ok".into());
            }
            Err(e) => {
                out.values.push(f64::NAN);
                out.status.push(e.to_string());
                // a vacuum CCW mode is a legitimate input, not a failure
                if !matches!(e, optomech::Error::UndefinedWitness(_)) && out.failure.is_none() {
                    out.failure = Some(CliError::from(e).at(&format!("{} = {}", axis.name(), pt.value)));
                }
            }
        }
    }
    out
}

fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Gaussian => "gaussian (Lyapunov moments + Wick factorization)",
        Engine::Fock => "fock (sparse Liouvillian steady state, truncated)",
    }
}

fn run_pairgen(cfg: &ExperimentConfig, engine: Engine, command: &str) -> CliResult<RunOutput> {
    let p: PairgenParams = crate::config::resolve_params(&cfg.params)?;
    p.validate()?;
    let axis = pairgen_axis(cfg.sweep.axis.as_deref().unwrap_or("delta_k"))?;
    let grid = cfg.sweep.grid(pairgen_default_grid(axis))?;
    // every grid point must pass the same validation as the base point
    for &v in &grid {
        axis.apply(&p, v)
            .validate()
            .map_err(|e| CliError::from(e).at(&format!("{} = {v}", axis.name())))?;
    }

    let mut meta = Metadata::new(command, engine_name(engine));
    meta.parameters = parameter_list(Device::Pairgen, &p);
    grid_note(&mut meta, axis.name(), &grid);

    let series = pairgen_series(&p, axis, &grid, engine);
    let spots = cfg.sweep.spot_checks.unwrap_or(0);
    if spots > 0 && engine == Engine::Gaussian {
        match pairgen::spot_check(&p, axis, &grid, spots) {
            Ok(checks) => {
                for (i, c) in checks.iter().enumerate() {
                    meta.note(
                        format!("fock_spot_check_{i}"),
                        format!(
                            "{} = {}: gaussian {}, fock {} at dims {:?}, |ΔI| = {:e}",
                            axis.name(),
                            c.value,
                            c.gaussian,
                            c.fock,
                            c.fock_dims,
                            c.abs_diff()
                        ),
                    );
                }
            }
            Err(e) => meta.note("fock_spot_check", format!("failed: {e}")),
        }
    }

    let mut table = ResultTable::new(meta);
    table.push(axis.name(), ColumnData::Real(grid))?;
    table.push("I", ColumnData::Real(series.values))?;
    table.push("status", ColumnData::Text(series.status))?;
    Ok(RunOutput {
        table,
        failure: series.failure,
    })
}

// ---------------------------------------------------------------- convert

pub fn convert_default_grid(axis: &str) -> GridDefault {
    match axis {
        "theta" => GridDefault {
            start: 0.0,
            stop: std::f64::consts::TAU,
            points: 360,
            endpoint: false,
        },
        _ => GridDefault {
            start: -0.02,
            stop: 0.02,
            points: 801,
            endpoint: true,
        },
    }
}

/// Scattering rows over `(ω, θ)` pairs.
pub struct ConversionRows {
    pub omega: Vec<f64>,
    pub theta: Vec<f64>,
    pub r_k_mk: Vec<Complex64>,
    pub r_mk_k: Vec<Complex64>,
    pub eff_k_mk: Vec<f64>,
    pub eff_mk_k: Vec<f64>,
    pub eta: Vec<f64>,
}

pub fn conversion_rows(p: &ConversionParams, points: &[(f64, f64)]) -> CliResult<ConversionRows> {
    let mut rows = ConversionRows {
        omega: Vec::new(),
        theta: Vec::new(),
        r_k_mk: Vec::new(),
        r_mk_k: Vec::new(),
        eff_k_mk: Vec::new(),
        eff_mk_k: Vec::new(),
        eta: Vec::new(),
    };
    for &(omega, theta) in points {
        let q = p.with_theta(theta);
        let at = || format!("omega = {omega}, theta = {theta}");
        let s = nonreciprocity::conversion_scattering(&q, omega).map_err(|e| CliError::from(e).at(&at()))?;
        let eta = nonreciprocity::nonreciprocity_ratio(&q, omega).map_err(|e| CliError::from(e).at(&at()))?;
        rows.omega.push(omega);
        rows.theta.push(theta);
        rows.r_k_mk.push(s.r[(CW, CCW)]);
        rows.r_mk_k.push(s.r[(CCW, CW)]);
        rows.eff_k_mk.push(s.efficiency(CW, CCW));
        rows.eff_mk_k.push(s.efficiency(CCW, CW));
        rows.eta.push(eta.eta);
    }
    Ok(rows)
}

fn run_convert(cfg: &ExperimentConfig, command: &str) -> CliResult<RunOutput> {
    let mut user = cfg.params.clone();
    let defaults = ConversionParams::default();
    let omega_default = -defaults.gamma_m2;
    let omega = crate::config::take_f64(&mut user, "omega", omega_default)?;
    let p: ConversionParams = crate::config::resolve_params(&user)?;
    p.validate()?;
    if !omega.is_finite() {
        return Err(CliError::Validation("params.omega must be finite".into()));
    }
    let axis = cfg.sweep.axis.clone().unwrap_or_else(|| "omega".into());
    if axis != "omega" && axis != "theta" {
        return Err(CliError::Validation(format!(
            "convert sweep axis `{axis}` (omega|theta)"
        )));
    }
    let grid = cfg.sweep.grid(convert_default_grid(&axis))?;
    let points: Vec<(f64, f64)> = if axis == "omega" {
        grid.iter().map(|&w| (w, p.theta)).collect()
    } else {
        grid.iter().map(|&t| (omega, t)).collect()
    };

    let mut meta = Metadata::new(command, "input-output scattering R = κ(U − iω)⁻¹ − I");
    meta.parameters = parameter_list(Device::Convert, &p);
    if axis == "theta" {
        meta.parameters
            .push(extra_parameter(Device::Convert, "omega", omega, omega_default));
    }
    grid_note(&mut meta, &axis, &grid);
    let rows = conversion_rows(&p, &points)?;
    Ok(RunOutput::ok(conversion_table(meta, rows)))
}

fn conversion_table(meta: Metadata, rows: ConversionRows) -> ResultTable {
    let mut t = ResultTable::new(meta);
    let push = |t: &mut ResultTable, n: &str, d| t.push(n, d).expect("conversion columns share a length");
    push(&mut t, "omega", ColumnData::Real(rows.omega));
    push(&mut t, "theta", ColumnData::Real(rows.theta));
    push(&mut t, "r_k_mk", ColumnData::Complex(rows.r_k_mk));
    push(&mut t, "r_mk_k", ColumnData::Complex(rows.r_mk_k));
    push(&mut t, "eff_k_mk", ColumnData::Real(rows.eff_k_mk));
    push(&mut t, "eff_mk_k", ColumnData::Real(rows.eff_mk_k));
    push(&mut t, "eta", ColumnData::Real(rows.eta));
    t
}

// ---------------------------------------------------------------- ptsym

pub const PT_EPS_P: f64 = 0.1;

pub fn ptsym_default_grid(axis: &str) -> GridDefault {
    match axis {
        "g_l" => GridDefault {
            start: 0.0,
            stop: 0.3,
            points: 301,
            endpoint: true,
        },
        _ => GridDefault {
            start: -0.08,
            stop: 0.08,
            points: 1601,
            endpoint: true,
        },
    }
}

fn regime_name(r: PtRegime) -> &'static str {
    match r {
        PtRegime::Unbroken => "unbroken",
        PtRegime::Exceptional => "exceptional",
        PtRegime::Broken => "broken",
    }
}

/// Supermode and threshold notes for one parameter set.
pub fn pt_notes(meta: &mut Metadata, p: &PTParams, suffix: &str) -> CliResult<()> {
    let r = phonon_pt::adiabatic_effective_rates(p)?;
    let s = phonon_pt::supermode_eigenfrequencies(&r, p.gamma_m, p.j);
    let t = phonon_pt::pt_threshold(&r, p.gamma_m);
    meta.note(format!("gamma_l{suffix}"), r.gamma_l.to_string());
    meta.note(format!("gamma_ml{suffix}"), r.gamma_ml.to_string());
    meta.note(format!("j_pt{suffix}"), t.j_pt.to_string());
    meta.note(format!("regime{suffix}"), regime_name(s.regime));
    meta.note(
        format!("omega_plus{suffix}"),
        format!("{} {:+}i", s.omega_plus.re, s.omega_plus.im),
    );
    meta.note(
        format!("omega_minus{suffix}"),
        format!("{} {:+}i", s.omega_minus.re, s.omega_minus.im),
    );
    if r.weak_separation() {
        meta.note(
            format!("warning{suffix}"),
            format!("κ/γ_m = {:.1}: adiabatic elimination is unreliable", r.separation_ratio),
        );
    }
    Ok(())
}

fn run_ptsym(cfg: &ExperimentConfig, command: &str) -> CliResult<RunOutput> {
    let mut user = cfg.params.clone();
    let eps_p = crate::config::take_f64(&mut user, "eps_p", PT_EPS_P)?;
    let p: PTParams = crate::config::resolve_params(&user)?;
    p.validate()?;
    let axis = cfg.sweep.axis.clone().unwrap_or_else(|| "delta".into());
    let grid = match axis.as_str() {
        "delta" | "g_l" => cfg.sweep.grid(ptsym_default_grid(&axis))?,
        other => return Err(CliError::Validation(format!("ptsym sweep axis `{other}` (delta|g_l)"))),
    };

    let mut meta = Metadata::new(command, "");
    meta.parameters = parameter_list(Device::Ptsym, &p);
    meta.note("kappa_in_resolved", p.kappa_in().to_string());
    if axis == "g_l" {
        meta.engine = "adiabatic elimination, closed-form supermodes".into();
        grid_note(&mut meta, &axis, &grid);
        if let Some(g) = phonon_pt::balanced_g_l(&p) {
            meta.note("balanced_g_l", format!("{g} (derived: γ_l = −γ_{{−l}} − 2γ_m)"));
        }
        return Ok(RunOutput::ok(threshold_table(meta, &p, &grid)?));
    }

    meta.engine = "closed-form steady state, checked against direct 4×4 solve".into();
    meta.parameters
        .push(extra_parameter(Device::Ptsym, "eps_p", eps_p, PT_EPS_P));
    pt_notes(&mut meta, &p, "")?;
    let s = phonon_pt::pt_spectrum(&p, &grid, eps_p)?;
    grid_note(&mut meta, &axis, &s.delta);
    if s.extended {
        meta.note("grid_extended", "requested grid did not span the supermode splitting");
    }
    let fmt_peaks = |v: Vec<f64>| {
        format!(
            "{} at [{}]",
            v.len(),
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        )
    };
    meta.note("peaks_a_mj", fmt_peaks(s.peaks_a_mj()));
    meta.note("peaks_a_k", fmt_peaks(s.peaks_a_k()));
    meta.note("max_closed_form_mismatch", format!("{:e}", s.max_mismatch));

    let fields: Vec<_> = s
        .delta
        .iter()
        .map(|&d| phonon_pt::pt_fields_closed_form(&p, d, eps_p))
        .collect();
    let mut t = ResultTable::new(meta);
    t.push("delta", ColumnData::Real(s.delta.clone()))?;
    t.push("a_k", ColumnData::Complex(fields.iter().map(|f| f.a_k).collect()))?;
    t.push(
        "a_mj_dag",
        ColumnData::Complex(fields.iter().map(|f| f.a_mj_dag).collect()),
    )?;
    t.push("b_l", ColumnData::Complex(fields.iter().map(|f| f.b_l).collect()))?;
    t.push("b_ml", ColumnData::Complex(fields.iter().map(|f| f.b_ml).collect()))?;
    t.push("a_k_sq", ColumnData::Real(s.a_k))?;
    t.push("a_mj_sq", ColumnData::Real(s.a_mj))?;
    t.push("b_l_sq", ColumnData::Real(s.b_l))?;
    t.push("b_ml_sq", ColumnData::Real(s.b_ml))?;
    Ok(RunOutput::ok(t))
}

pub fn threshold_table(meta: Metadata, p: &PTParams, grid: &[f64]) -> CliResult<ResultTable> {
    let mut gamma_l = Vec::new();
    let mut gamma_ml = Vec::new();
    let mut j_pt = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut regime = Vec::new();
    for &g in grid {
        let q = PTParams { g_l: g, ..*p };
        let r = phonon_pt::adiabatic_effective_rates(&q).map_err(|e| CliError::from(e).at(&format!("g_l = {g}")))?;
        let s = phonon_pt::supermode_eigenfrequencies(&r, q.gamma_m, q.j);
        gamma_l.push(r.gamma_l);
        gamma_ml.push(r.gamma_ml);
        j_pt.push(phonon_pt::pt_threshold(&r, q.gamma_m).j_pt);
        plus.push(s.omega_plus);
        minus.push(s.omega_minus);
        regime.push(regime_name(s.regime).to_string());
    }
    let mut t = ResultTable::new(meta);
    t.push("g_l", ColumnData::Real(grid.to_vec()))?;
    t.push("gamma_l", ColumnData::Real(gamma_l))?;
    t.push("gamma_ml", ColumnData::Real(gamma_ml))?;
    t.push("j_pt", ColumnData::Real(j_pt))?;
    t.push("j", ColumnData::Real(vec![p.j; grid.len()]))?;
    t.push("omega_plus", ColumnData::Complex(plus))?;
    t.push("omega_minus", ColumnData::Complex(minus))?;
    t.push("regime", ColumnData::Text(regime))?;
    Ok(t)
}

// ---------------------------------------------------------------- modes

fn category_name(c: InteractionCategory) -> &'static str {
    match c {
        InteractionCategory::Dispersive => "dispersive",
        InteractionCategory::TripleResonant => "triple_resonant",
        InteractionCategory::Forbidden => "forbidden",
    }
}

fn run_modes(cfg: &ExperimentConfig, command: &str) -> CliResult<RunOutput> {
    let p: ModesParams = crate::config::resolve_params(&cfg.params)?;
    if !(0..=200).contains(&p.m_max) {
        return Err(CliError::Validation(format!(
            "params.m_max = {} outside 0..=200",
            p.m_max
        )));
    }
    if cfg.sweep != Default::default() {
        return Err(CliError::Validation("modes takes no sweep".into()));
    }
    let m = p.m_max;
    let (mut out_m, mut in_m, mut ph_m) = (Vec::new(), Vec::new(), Vec::new());
    let (mut ph_op, mut cat) = (Vec::new(), Vec::new());
    // photon created on `out`, destroyed on `inp`, phonon absorbed or emitted
    for out in -m..=m {
        for inp in -m..=m {
            for l in -m..=m {
                for emitted in [false, true] {
                    let phonon = if emitted {
                        Ladder::raise(l as i32)
                    } else {
                        Ladder::lower(l as i32)
                    };
                    let term = InteractionTerm::new(Ladder::raise(out as i32), Ladder::lower(inp as i32), phonon, None);
                    let c = classify_interaction(&term);
                    if p.allowed_only && c == InteractionCategory::Forbidden {
                        continue;
                    }
                    out_m.push(out);
                    in_m.push(inp);
                    ph_m.push(l);
                    ph_op.push(if emitted { "emitted" } else { "absorbed" }.to_string());
                    cat.push(category_name(c).to_string());
                }
            }
        }
    }
    let mut meta = Metadata::new(command, "azimuthal selection rule");
    meta.parameters = parameter_list(Device::Modes, &p);
    meta.note(
        "convention",
        "annihilator on mode m contributes +m, creator −m; allowed iff the sum vanishes",
    );
    meta.note("terms", out_m.len().to_string());
    let mut t = ResultTable::new(meta);
    t.push("photon_out_m", ColumnData::Integer(out_m))?;
    t.push("photon_in_m", ColumnData::Integer(in_m))?;
    t.push("phonon_m", ColumnData::Integer(ph_m))?;
    t.push("phonon", ColumnData::Text(ph_op))?;
    t.push("category", ColumnData::Text(cat))?;
    Ok(RunOutput::ok(t))
}
