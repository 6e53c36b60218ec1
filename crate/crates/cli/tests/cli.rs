use std::process::{Command, Output};

use optomech_cli::table::{ColumnData, ResultTable};

const BANNER: &str = "all rates are ν = ω/2π in MHz";

fn optomech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optomech"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn banner_is_printed_on_success_and_failure() {
    for args in [&["modes"][..], &["convert", "--set", "kappa=-1"], &["nonsense"]] {
        let o = optomech(args);
        assert!(stderr(&o).contains(BANNER), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(optomech(&["modes"]).status.code(), Some(0));
    assert_eq!(optomech(&["convert", "--set", "kappa=-1"]).status.code(), Some(2));
    assert_eq!(
        optomech(&["pairgen", "--set", "no_such_param=1"]).status.code(),
        Some(2)
    );
    assert_eq!(optomech(&["pairgen", "--engine", "quantum"]).status.code(), Some(2));
    assert_eq!(optomech(&["ptsym", "--set", "g_ml=5"]).status.code(), Some(3));
    assert_eq!(
        optomech(&["modes", "--output", "/nonexistent/dir/x.csv"]).status.code(),
        Some(4)
    );
    assert_eq!(
        optomech(&["modes", "--config", "/nonexistent/cfg.toml"]).status.code(),
        Some(4)
    );
}

#[test]
fn empty_grid_gives_header_only() {
    let o = optomech(&["pairgen", "--set", "sweep.points=0"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(data_lines(&csv), vec!["delta_k,I,status"]);
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        &["convert", "--set", "sweep.points=37"][..],
        &["replicate", "fig2d"],
        &["ptsym", "--set", "sweep.points=101"],
    ] {
        let a = optomech(args);
        let b = optomech(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_uses_dot_decimal_and_complex_pairs() {
    let o = optomech(&["convert", "--set", "sweep.points=4"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    let rows = data_lines(&csv);
    assert_eq!(
        rows[0],
        "omega,theta,r_k_mk_re,r_k_mk_im,r_mk_k_re,r_mk_k_im,eff_k_mk,eff_mk_k,eta"
    );
    for r in &rows[1..] {
        assert_eq!(r.split(',').count(), 9);
        for field in r.split(',') {
            field.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn json_round_trips_and_carries_metadata() {
    let dir = tempfile::tempdir().unwrap();
    for (axis, column) in [("delta", "a_k"), ("g_l", "omega_plus")] {
        let out = dir.path().join(format!("{axis}.json"));
        let o = optomech(&[
            "ptsym",
            "--set",
            &format!("sweep.axis=\"{axis}\""),
            "--set",
            "sweep.points=11",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        let t = ResultTable::from_json(&text).unwrap();
        assert_eq!(t.to_json(), text, "{axis}");
        assert_eq!(t.n_rows(), 11);
        assert!(t.metadata.units.contains("MHz"));
        assert!(t.metadata.engine_version.starts_with("optomech "));
        let g_l = t.metadata.parameters.iter().find(|p| p.name == "g_l").unwrap();
        assert!(!g_l.citation.is_empty());
        assert!(matches!(t.column(column), Some(ColumnData::Complex(_))), "{axis}");
        assert!(t.metadata.notes.iter().any(|(k, _)| k == "kappa_in_resolved"));
    }
}

#[test]
fn config_file_and_overrides_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "device = \"pairgen\"\n[params]\ng_k = 0.4\n[sweep]\nvalues = [0.0]\n[output]\nformat = \"json\"\n",
    )
    .unwrap();
    let o = optomech(&["pairgen", "--config", cfg.to_str().unwrap(), "--set", "n_th=0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = ResultTable::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let value = |n: &str| {
        t.metadata
            .parameters
            .iter()
            .find(|p| p.name == n)
            .unwrap()
            .value
            .as_f64()
            .unwrap()
    };
    assert_eq!(value("g_k"), 0.4);
    assert_eq!(value("n_th"), 0.1);

    let wrong = optomech(&["convert", "--config", cfg.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn modes_lists_only_allowed_terms() {
    let o = optomech(&["modes", "--set", "m_max=1"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    let rows = data_lines(&csv);
    assert!(rows.len() > 1);
    assert!(rows[1..].iter().all(|r| !r.ends_with("forbidden")));
}

#[test]
fn every_gaussian_figure_preset_runs() {
    for fig in ["fig2b", "fig2c", "fig2d", "fig3b", "fig3c", "fig3d", "fig4bcd", "fig5"] {
        let o = optomech(&["replicate", fig, "--set", "sweep.points=21"]);
        assert_eq!(o.status.code(), Some(0), "{fig}: {}", stderr(&o));
        let csv = String::from_utf8(o.stdout).unwrap();
        assert!(csv.contains(&format!("# command: replicate {fig}")), "{fig}");
        assert!(data_lines(&csv).len() >= 22, "{fig}");
    }
}

#[test]
fn fig5_reports_two_peaks_then_one() {
    let o = optomech(&["replicate", "fig5"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.contains("# note peaks_a_mj_gl_0.14 = 2 at"));
    assert!(csv.contains("# note peaks_a_mj_gl_0.2 = 1 at"));
}

#[test]
fn presets_reject_a_different_sweep_axis() {
    let o = optomech(&["replicate", "fig2b", "--set", "sweep.axis=\"g_k\""]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fock_engine_agrees_with_gaussian_at_one_point() {
    let witness = |engine: &str| -> f64 {
        let o = optomech(&["pairgen", "--engine", engine, "--set", "sweep.values=[0.0]"]);
        assert_eq!(o.status.code(), Some(0), "{engine}: {}", stderr(&o));
        let csv = String::from_utf8(o.stdout).unwrap();
        assert!(csv.contains(&format!("# engine: {engine}")));
        data_lines(&csv)[1].split(',').nth(1).unwrap().parse().unwrap()
    };
    let (g, f) = (witness("gaussian"), witness("fock"));
    assert!((g - f).abs() < 1e-3, "gaussian {g} fock {f}");
}
