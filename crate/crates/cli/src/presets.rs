//! Figure presets. Each runs the caption parameter set; `--set` overrides
//! still apply and are flagged in the metadata.

use std::f64::consts::PI;

use optomech::nonreciprocity::ConversionParams;
use optomech::pairgen::{PairgenParams, SweepAxis};
use optomech::phonon_pt::{self, PTParams};

use crate::config::{resolve_params, take_f64, Device, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::run::{self, RunOutput};
use crate::table::{ColumnData, Metadata, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureId {
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig4bcd,
    Fig5,
}

impl FigureId {
    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
            FigureId::Fig2d => "fig2d",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig3d => "fig3d",
            FigureId::Fig4bcd => "fig4bcd",
            FigureId::Fig5 => "fig5",
        }
    }

    pub fn device(&self) -> Device {
        match self {
            FigureId::Fig2b | FigureId::Fig2c | FigureId::Fig2d => Device::Pairgen,
            FigureId::Fig3b | FigureId::Fig3c | FigureId::Fig3d => Device::Convert,
            FigureId::Fig4bcd | FigureId::Fig5 => Device::Ptsym,
        }
    }

    pub fn all() -> [FigureId; 8] {
        use FigureId::*;
        [Fig2b, Fig2c, Fig2d, Fig3b, Fig3c, Fig3d, Fig4bcd, Fig5]
    }
}

pub fn replicate_figure(id: FigureId, cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    if cfg.sweep.axis.is_some() {
        return Err(CliError::Validation(
            "presets fix their sweep axis; only the grid can be changed".into(),
        ));
    }
    let command = format!("replicate {}", id.name());
    match id {
        FigureId::Fig2b | FigureId::Fig2c | FigureId::Fig2d => pairgen_figure(id, cfg, &command),
        FigureId::Fig3b | FigureId::Fig3c | FigureId::Fig3d => convert_figure(id, cfg, &command),
        FigureId::Fig4bcd | FigureId::Fig5 => pt_figure(id, cfg, &command),
    }
}

fn series_label(x: f64) -> String {
    format!("{x}")
}

fn pairgen_figure(id: FigureId, cfg: &ExperimentConfig, command: &str) -> CliResult<RunOutput> {
    let engine = run::parse_engine(Device::Pairgen, cfg.engine.as_deref())?;
    let mut base: PairgenParams = resolve_params(&cfg.params)?;
    // (sweep axis, series axis, series values, fixed overrides)
    let (axis, series): (SweepAxis, Option<(SweepAxis, Vec<f64>)>) = match id {
        FigureId::Fig2b => (SweepAxis::DeltaK, Some((SweepAxis::NTh, vec![0.0, 0.1, 0.2]))),
        FigureId::Fig2c => {
            base.n_th = n_th_or(cfg, 0.2)?;
            (SweepAxis::DeltaK, Some((SweepAxis::GK, vec![0.3, 0.4, 0.5])))
        }
        _ => {
            base.n_th = n_th_or(cfg, 0.2)?;
            base.delta_k = cfg_f64(cfg, "delta_k", 0.0)?;
            (SweepAxis::GK, None)
        }
    };
    base.validate()?;
    let grid = cfg.sweep.grid(run::pairgen_default_grid(axis))?;

    let mut meta = Metadata::new(command, format!("{:?}", engine).to_lowercase());
    meta.parameters = run::parameter_list(Device::Pairgen, &base);
    let fixed: &[(&str, &str)] = match id {
        FigureId::Fig2b => &[("n_th", "series, see note"), ("delta_k", "sweep axis")],
        FigureId::Fig2c => &[
            ("n_th", "Fig. 2(c) caption: n_th = 0.2"),
            ("g_k", "series, see note"),
            ("delta_k", "sweep axis"),
        ],
        _ => &[
            ("n_th", "Fig. 2(d) caption: n_th = 0.2"),
            ("delta_k", "Fig. 2(d) caption: δ_k = 0"),
            ("g_k", "sweep axis"),
        ],
    };
    for prm in meta.parameters.iter_mut() {
        if cfg.params.contains_key(&prm.name) {
            continue;
        }
        prm.citation = fixed.iter().find(|(n, _)| *n == prm.name).map_or_else(
            || crate::citations::cite(Device::Pairgen, &prm.name).to_string(),
            |(_, c)| c.to_string(),
        );
    }
    meta.note("sweep", format!("{}: {} points", axis.name(), grid.len()));

    let mut table = ResultTable::new(Metadata::new("", ""));
    table.push(axis.name(), ColumnData::Real(grid.clone()))?;
    let mut failure = None;
    let mut status = vec![String::from("ok"); grid.len()];
    let runs: Vec<(String, PairgenParams)> = match &series {
        Some((s_axis, values)) => {
            meta.note("series", format!("{} ∈ {values:?}", s_axis.name()));
            values
                .iter()
                .map(|&v| {
                    (
                        format!("I_{}_{}", s_axis.name(), series_label(v)),
                        s_axis.apply(&base, v),
                    )
                })
                .collect()
        }
        None => vec![("I".to_string(), base)],
    };
    for (name, p) in runs {
        p.validate()?;
        let s = run::pairgen_series(&p, axis, &grid, engine);
        for (st, new) in status.iter_mut().zip(&s.status) {
            if new != "ok" {
                *st = if st == "ok" {
                    format!("{name}: {new}")
                } else {
                    format!("{st}; {name}: {new}")
                };
            }
        }
        if failure.is_none() {
            failure = s.failure;
        }
        table.push(name, ColumnData::Real(s.values))?;
    }
    table.push("status", ColumnData::Text(status))?;
    table.metadata = meta;
    Ok(RunOutput { table, failure })
}

fn n_th_or(cfg: &ExperimentConfig, default: f64) -> CliResult<f64> {
    cfg_f64(cfg, "n_th", default)
}

fn cfg_f64(cfg: &ExperimentConfig, key: &str, default: f64) -> CliResult<f64> {
    let mut t = cfg.params.clone();
    take_f64(&mut t, key, default)
}

fn convert_figure(id: FigureId, cfg: &ExperimentConfig, command: &str) -> CliResult<RunOutput> {
    run::parse_engine(Device::Convert, cfg.engine.as_deref())?;
    let mut user = cfg.params.clone();
    let defaults = ConversionParams::default();
    let omega = take_f64(&mut user, "omega", -defaults.gamma_m2)?;
    let p: ConversionParams = resolve_params(&user)?;
    p.validate()?;

    let mut meta = Metadata::new(command, "input-output scattering R = κ(U − iω)⁻¹ − I");
    meta.parameters = run::parameter_list(Device::Convert, &p);
    let mut t = ResultTable::new(Metadata::new("", ""));

    if id == FigureId::Fig3b {
        let grid = cfg.sweep.grid(run::convert_default_grid("omega"))?;
        let at = |theta: f64| -> CliResult<run::ConversionRows> {
            run::conversion_rows(&p, &grid.iter().map(|&w| (w, theta)).collect::<Vec<_>>())
        };
        let recip = at(p.theta)?;
        let nonrecip = at(3.0 * PI / 4.0)?;
        let asym = recip
            .eff_k_mk
            .iter()
            .zip(&recip.eff_mk_k)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        meta.note("series", "theta = 0 (reciprocal) and theta = 3π/4 (forward, backward)");
        meta.note("reciprocal_max_asymmetry", format!("{asym:e}"));
        t.push("omega", ColumnData::Real(grid))?;
        t.push("eff_theta_0", ColumnData::Real(recip.eff_k_mk))?;
        t.push("eff_k_mk_theta_3pi4", ColumnData::Real(nonrecip.eff_k_mk))?;
        t.push("eff_mk_k_theta_3pi4", ColumnData::Real(nonrecip.eff_mk_k))?;
    } else {
        meta.parameters.push(crate::table::Parameter {
            name: "omega".into(),
            value: serde_json::json!(omega),
            citation: crate::citations::cite(Device::Convert, "omega").into(),
        });
        let grid = cfg.sweep.grid(run::convert_default_grid("theta"))?;
        let rows = run::conversion_rows(&p, &grid.iter().map(|&th| (omega, th)).collect::<Vec<_>>())?;
        t.push("theta", ColumnData::Real(grid))?;
        if id == FigureId::Fig3c {
            t.push("eff_k_mk", ColumnData::Real(rows.eff_k_mk))?;
            t.push("eff_mk_k", ColumnData::Real(rows.eff_mk_k))?;
        } else {
            if let Some((i, eta)) = rows
                .eta
                .iter()
                .enumerate()
                .filter(|(_, e)| e.is_finite())
                .max_by(|a, b| a.1.total_cmp(b.1))
            {
                let theta = match t.column("theta") {
                    Some(ColumnData::Real(v)) => v[i],
                    _ => f64::NAN,
                };
                meta.note("max_eta", format!("{eta} at theta = {theta}"));
            }
            t.push("eta", ColumnData::Real(rows.eta))?;
        }
    }
    t.metadata = meta;
    Ok(RunOutput {
        table: t,
        failure: None,
    })
}

fn pt_figure(id: FigureId, cfg: &ExperimentConfig, command: &str) -> CliResult<RunOutput> {
    run::parse_engine(Device::Ptsym, cfg.engine.as_deref())?;
    let mut user = cfg.params.clone();
    let eps_p = take_f64(&mut user, "eps_p", run::PT_EPS_P)?;
    let p: PTParams = resolve_params(&user)?;
    p.validate()?;

    let mut meta = Metadata::new(command, "");
    meta.parameters = run::parameter_list(Device::Ptsym, &p);
    meta.note("kappa_in_resolved", p.kappa_in().to_string());

    if id == FigureId::Fig4bcd {
        meta.engine = "adiabatic elimination, closed-form supermodes".into();
        let grid = cfg.sweep.grid(run::ptsym_default_grid("g_l"))?;
        meta.note("sweep", format!("g_l: {} points", grid.len()));
        if let Some(g) = phonon_pt::balanced_g_l(&p) {
            meta.note("balanced_g_l", format!("{g} (derived: γ_l = −γ_{{−l}} − 2γ_m)"));
        }
        let mut t = run::threshold_table(meta, &p, &grid)?;
        t.metadata.command = command.to_string();
        return Ok(RunOutput {
            table: t,
            failure: None,
        });
    }

    meta.engine = "closed-form steady state, checked against direct 4×4 solve".into();
    let requested = cfg.sweep.grid(run::ptsym_default_grid("delta"))?;
    let series: Vec<PTParams> = [0.14, 0.2].iter().map(|&g_l| PTParams { g_l, ..p }).collect();
    let mut span: f64 = 0.0;
    for q in &series {
        span = span.max(phonon_pt::supermode_span(q)?);
    }
    let (grid, extended) = phonon_pt::covering_grid(span, &requested);
    if extended {
        meta.note("grid_extended", "requested grid did not span the supermode splitting");
    }
    let mut t = ResultTable::new(Metadata::new("", ""));
    t.push("delta", ColumnData::Real(grid.clone()))?;
    for q in &series {
        let suffix = format!("_gl_{}", q.g_l);
        run::pt_notes(&mut meta, q, &suffix)?;
        let s =
            phonon_pt::pt_spectrum(q, &grid, eps_p).map_err(|e| CliError::from(e).at(&format!("g_l = {}", q.g_l)))?;
        let peaks = s.peaks_a_mj();
        meta.note(
            format!("peaks_a_mj{suffix}"),
            format!(
                "{} at [{}]",
                peaks.len(),
                peaks.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
            ),
        );
        t.push(format!("a_mj_sq{suffix}"), ColumnData::Real(s.a_mj))?;
        t.push(format!("a_k_sq{suffix}"), ColumnData::Real(s.a_k))?;
    }
    meta.note("series", "g_l ∈ {0.14, 0.2}");
    t.metadata = meta;
    Ok(RunOutput {
        table: t,
        failure: None,
    })
}
