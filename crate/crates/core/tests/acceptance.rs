//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs with `cargo test --test acceptance` (custom harness, always prints).

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use optomech::fock_model;
use optomech::gaussian;
use optomech::linalg;
use optomech::modes::{classify_interaction, InteractionCategory, InteractionTerm, Ladder};
use optomech::nonreciprocity::{
    conversion_efficiencies, conversion_scattering, nonreciprocity_ratio, ConversionParams, CCW, CW,
};
use optomech::pairgen::{self, Engine, PairgenParams, SweepAxis};
use optomech::phonon_pt::{self, PTParams, PtRegime};
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn stability_closed_form() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_240_601);
    let (mut stable, mut unstable, mut banded, mut disagree) = (0, 0, 0, 0);
    for _ in 0..1000 {
        let kappa = rng.random_range(1.0..30.0);
        let p = PairgenParams {
            kappa,
            kappa_in: kappa / 2.0,
            gamma_m: rng.random_range(1e-3..0.1),
            g_k: rng.random_range(0.0..0.6),
            g_mk: rng.random_range(0.0..0.9),
            delta_k: rng.random_range(-1.0..1.0),
            ..Default::default()
        };
        let margin = p.g_k * p.g_k - p.g_mk * p.g_mk + p.kappa * p.gamma_m / 4.0;
        if margin.abs() <= 1e-9 {
            banded += 1;
            continue;
        }
        let closed = gaussian::routh_hurwitz_pairgen(p.g_k, p.g_mk, p.kappa, p.gamma_m).map_err(|e| e.to_string())?;
        let drift = gaussian::build_drift(&pairgen::build_pairgen_model_unchecked(&p).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let eigs = linalg::eigenvalues(&drift.matrix).map_err(|e| e.to_string())?;
        // dO/dt = −U O: growth rates are −Re λ(U)
        let growth = eigs.iter().map(|z| -z.re).fold(f64::NEG_INFINITY, f64::max);
        let numeric = growth < 0.0;
        if closed != numeric {
            disagree += 1;
        }
        if closed {
            stable += 1;
        } else {
            unstable += 1;
        }
    }
    check(stable >= 100 && unstable >= 100, || {
        format!("draws do not span both regimes ({stable} stable, {unstable} unstable)")
    })?;
    check(disagree == 0, || format!("{disagree} disagreements"))?;
    Ok(format!(
        "0 disagreements; {stable} stable, {unstable} unstable, {banded} in boundary band"
    ))
}

fn i_curve(p: &PairgenParams, axis: SweepAxis, grid: &[f64]) -> Result<Vec<f64>, String> {
    pairgen::sweep_nonclassicality(p, axis, grid, Engine::Gaussian)
        .into_iter()
        .map(|pt| pt.result.map_err(|e| format!("{} = {}: {e}", axis.name(), pt.value)))
        .collect()
}

fn nonclassicality_structure() -> Outcome {
    let grid = linspace(-0.2, 0.2, 81);
    let step = grid[1] - grid[0];
    let mut at_zero = Vec::new();
    let mut lowest = f64::INFINITY;
    for n_th in [0.0, 0.1, 0.2] {
        let p = PairgenParams {
            n_th,
            ..Default::default()
        };
        let curve = i_curve(&p, SweepAxis::DeltaK, &grid)?;
        lowest = curve.iter().copied().fold(lowest, f64::min);
        check(curve.iter().all(|&i| i < 0.0), || {
            format!("I ≥ 0 somewhere at n_th = {n_th}")
        })?;
        let (imin, _) = curve
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        check(grid[imin].abs() <= step + 1e-12, || {
            format!("minimum at δ_k = {} for n_th = {n_th}", grid[imin])
        })?;
        at_zero.push(pairgen::evaluate_i(&p, Engine::Gaussian).map_err(|e| e.to_string())?);
    }
    check(at_zero[0] < at_zero[1] && at_zero[1] < at_zero[2], || {
        format!("n_th ordering violated: {at_zero:?}")
    })?;

    let hot = PairgenParams {
        n_th: 0.2,
        ..Default::default()
    };
    let by_g = i_curve(&hot, SweepAxis::GK, &[0.3, 0.4, 0.5])?;
    check(by_g[0] > by_g[1] && by_g[1] > by_g[2], || {
        format!("I not decreasing in G_k: {by_g:?}")
    })?;
    let strong = i_curve(&hot, SweepAxis::GK, &linspace(0.3, 5.0, 48))?;
    lowest = strong.iter().chain(&by_g).copied().fold(lowest, f64::min);
    check(lowest >= -1.0, || format!("I below −1: {lowest}"))?;

    let spots =
        pairgen::spot_check(&PairgenParams::default(), SweepAxis::DeltaK, &grid, 3).map_err(|e| e.to_string())?;
    let worst = spots.iter().map(|s| s.abs_diff()).fold(0.0, f64::max);
    check(worst <= 1e-3, || format!("Gaussian vs Fock differ by {worst:e}"))?;
    Ok(format!(
        "I(δ=0) = {:.4} / {:.4} / {:.4} for n_th = 0 / 0.1 / 0.2; G_k trend {:.4} > {:.4} > {:.4}; min I {:.4}; Fock spot max |ΔI| = {worst:.1e} at dims {:?}",
        at_zero[0], at_zero[1], at_zero[2], by_g[0], by_g[1], by_g[2], lowest, spots[0].fock_dims
    ))
}

fn reciprocity_identities() -> Outcome {
    let p = ConversionParams::default();
    let mut worst_sym: f64 = 0.0;
    for omega in linspace(-0.1, 0.1, 2001) {
        let (fwd, bwd) = conversion_efficiencies(&p, omega).map_err(|e| e.to_string())?;
        worst_sym = worst_sym.max((fwd - bwd).abs());
    }
    check(worst_sym <= 1e-12, || format!("θ = 0 asymmetry {worst_sym:e}"))?;

    let mut rng = rand::rngs::StdRng::seed_from_u64(4);
    let mut worst_t: f64 = 0.0;
    for _ in 0..1000 {
        let omega = rng.random_range(-0.1..0.1);
        let theta = rng.random_range(-PI..PI);
        let r = conversion_scattering(&p.with_theta(theta), omega).map_err(|e| e.to_string())?;
        let r_neg = conversion_scattering(&p.with_theta(-theta), omega).map_err(|e| e.to_string())?;
        worst_t = worst_t.max((r.r[(CCW, CW)].norm() - r_neg.r[(CW, CCW)].norm()).abs());
    }
    check(worst_t <= 1e-12, || format!("transpose identity off by {worst_t:e}"))?;
    Ok(format!(
        "θ = 0 symmetry {worst_sym:.1e}; transpose identity {worst_t:.1e}"
    ))
}

fn nonreciprocal_ratio() -> Outcome {
    let p = ConversionParams::default();
    let w = p.gamma_m2;
    let thetas = linspace(0.0, 2.0 * PI, 3601);
    let mut best = (0.0, 0.0);
    let mut worst_swap: f64 = 0.0;
    for &theta in &thetas {
        let q = p.with_theta(theta);
        let eta = nonreciprocity_ratio(&q, -w).map_err(|e| e.to_string())?;
        if eta.eta > best.0 {
            best = (eta.eta, theta);
        }
        let (f_minus, b_minus) = conversion_efficiencies(&q, -w).map_err(|e| e.to_string())?;
        let (f_plus, b_plus) = conversion_efficiencies(&q, w).map_err(|e| e.to_string())?;
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
        worst_swap = worst_swap.max(rel(f_minus, b_plus)).max(rel(b_minus, f_plus));
    }
    check(best.0 >= 100.0, || format!("max η = {:.2} < 100", best.0))?;
    check(worst_swap <= 0.01, || {
        format!("role swap off by {:.3}%", 100.0 * worst_swap)
    })?;
    Ok(format!(
        "max η = {:.1} at θ = {:.4} rad; role swap exact to {worst_swap:.1e} relative",
        best.0, best.1
    ))
}

fn pt_threshold() -> Outcome {
    let mut notes = Vec::new();
    for (g_l, expect_khz, tol_khz, regime) in [
        (0.14, 11.2, 1e-9, PtRegime::Unbroken),
        (0.2, 17.03, 0.01, PtRegime::Broken),
    ] {
        let p = PTParams {
            g_l,
            ..Default::default()
        };
        let r = phonon_pt::adiabatic_effective_rates(&p).map_err(|e| e.to_string())?;
        let t = phonon_pt::pt_threshold(&r, p.gamma_m);
        let khz = t.j_pt * 1e3;
        check((khz - expect_khz).abs() <= tol_khz, || {
            format!("J_PT({g_l}) = {khz} kHz, expected {expect_khz}")
        })?;
        let s = phonon_pt::supermode_eigenfrequencies(&r, p.gamma_m, p.j);
        check(s.regime == regime, || {
            format!("G_l = {g_l}: regime {:?}, expected {regime:?}", s.regime)
        })?;
        let mut num = phonon_pt::effective_eigenfrequencies(&r, p.gamma_m, p.j).map_err(|e| e.to_string())?;
        let mut closed = vec![s.omega_plus, s.omega_minus];
        let key = |z: &Complex64| (z.re, z.im);
        num.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        closed.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        let err = num.iter().zip(&closed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        check(err <= 1e-12, || {
            format!("closed-form vs eigensolve differ by {err:e} at G_l = {g_l}")
        })?;
        notes.push(format!("J_PT({g_l}) = {khz:.3} kHz {:?} (eig err {err:.0e})", s.regime));
    }
    Ok(notes.join("; "))
}

fn pt_peaks() -> Outcome {
    let grid = linspace(-0.08, 0.08, 1601);
    let mut notes = Vec::new();
    for (g_l, expected) in [(0.14, 2usize), (0.2, 1)] {
        let p = PTParams {
            g_l,
            ..Default::default()
        };
        let s = phonon_pt::pt_spectrum(&p, &grid, 0.1).map_err(|e| e.to_string())?;
        let peaks = s.peaks_a_mj();
        check(peaks.len() == expected, || {
            format!("G_l = {g_l}: {} peaks at {peaks:?}", peaks.len())
        })?;
        check(s.max_mismatch <= 1e-10, || {
            format!("closed form vs direct {:e}", s.max_mismatch)
        })?;
        let khz: Vec<String> = peaks.iter().map(|d| format!("{:.2}", d * 1e3)).collect();
        notes.push(format!(
            "G_l = {g_l}: {} peak(s) at δ = [{}] kHz, mismatch {:.0e}",
            peaks.len(),
            khz.join(", "),
            s.max_mismatch
        ));
    }
    Ok(notes.join("; "))
}

fn fock_oracle() -> Outcome {
    let p = PairgenParams::default();
    let gauss = fock_model::moment_vector(&pairgen::gaussian_moments(&p).map_err(|e| e.to_string())?);
    let ladder = [[3, 5, 3], [3, 6, 3], [3, 7, 3], [3, 8, 3], [4, 8, 4]];
    let mut errors = Vec::new();
    for dims in ladder {
        let (_, m, _) = pairgen::fock_state(&p, dims).map_err(|e| e.to_string())?;
        let v = fock_model::moment_vector(&m);
        let err = v
            .iter()
            .zip(gauss.iter())
            .map(|(a, b)| (a - b).norm() / b.norm().max(1e-300))
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let last = *errors.last().unwrap();
    let listing: Vec<String> = ladder
        .iter()
        .zip(&errors)
        .map(|(d, e)| format!("{d:?}:{e:.1e}"))
        .collect();
    check(monotone, || format!("not monotone: {}", listing.join(" ")))?;
    check(last <= 1e-3, || format!("final relative error {last:e}"))?;
    Ok(format!("max relative moment error {}", listing.join(" → ")))
}

fn selection_rule() -> Outcome {
    const M: i32 = 20;
    let mut counts = [0usize; 3];
    for j in -M..=M {
        for k in -M..=M {
            for l in -M..=M {
                for mask in 0..8u8 {
                    let lad = |m: i32, bit: u8| {
                        if mask & bit != 0 {
                            Ladder::raise(m)
                        } else {
                            Ladder::lower(m)
                        }
                    };
                    let (a, b, c) = (lad(j, 1), lad(k, 2), lad(l, 4));
                    let t = InteractionTerm::new(a, b, c, None);
                    let cat = classify_interaction(&t);

                    // one photon created, one destroyed; the phonon is absorbed (+l) or emitted (−l)
                    let expected = if a.dagger == b.dagger {
                        InteractionCategory::Forbidden
                    } else {
                        let (out, inp) = if a.dagger { (j, k) } else { (k, j) };
                        let transfer = if c.dagger { -l } else { l };
                        if out - inp != transfer {
                            InteractionCategory::Forbidden
                        } else if out == inp {
                            InteractionCategory::Dispersive
                        } else {
                            InteractionCategory::TripleResonant
                        }
                    };
                    check(cat == expected, || format!("{t:?}: got {cat:?}, expected {expected:?}"))?;
                    if cat == InteractionCategory::Dispersive {
                        check(l == 0 && j == k, || {
                            format!("dispersive term with l = {l}, j = {j}, k = {k}")
                        })?;
                    }
                    let mirrored = InteractionTerm::new(a.mirrored(), b.mirrored(), c.mirrored(), None);
                    check(mirrored.category == cat, || format!("mirror breaks {t:?}"))?;
                    check(t.adjoint().category == cat, || format!("adjoint breaks {t:?}"))?;
                    counts[match cat {
                        InteractionCategory::Dispersive => 0,
                        InteractionCategory::TripleResonant => 1,
                        InteractionCategory::Forbidden => 2,
                    }] += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} terms: {} dispersive, {} triple-resonant, {} forbidden",
        counts.iter().sum::<usize>(),
        counts[0],
        counts[1],
        counts[2]
    ))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "stability closed form",
            budget: Duration::from_secs(10),
            run: stability_closed_form,
        },
        Criterion {
            id: 2,
            name: "nonclassicality structure",
            budget: Duration::from_secs(120),
            run: nonclassicality_structure,
        },
        Criterion {
            id: 3,
            name: "reciprocity identities",
            budget: Duration::from_secs(5),
            run: reciprocity_identities,
        },
        Criterion {
            id: 4,
            name: "non-reciprocal ratio",
            budget: Duration::from_secs(10),
            run: nonreciprocal_ratio,
        },
        Criterion {
            id: 5,
            name: "PT threshold arithmetic",
            budget: Duration::from_secs(1),
            run: pt_threshold,
        },
        Criterion {
            id: 6,
            name: "spectral peak counts",
            budget: Duration::from_secs(10),
            run: pt_peaks,
        },
        Criterion {
            id: 7,
            name: "Fock/Gaussian oracle",
            budget: Duration::from_secs(120),
            run: fock_oracle,
        },
        Criterion {
            id: 8,
            name: "selection rule",
            budget: Duration::from_secs(1),
            run: selection_rule,
        },
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => {
                Err(format!("{detail}; over budget ({:.2?} > {:.0?})", elapsed, c.budget))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  criterion {} ({}) [{:.2?}]: {detail}", c.id, c.name, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {} ({}) [{:.2?}]: {why}", c.id, c.name, elapsed);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
