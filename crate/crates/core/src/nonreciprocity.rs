//! Phase-controlled CW↔CCW conversion through two mechanical modes.
//!
//! Both optical modes couple to two breathing modes by beamsplitter terms;
//! the conversion `a_k ⇄ b_j ⇄ a_{−k}` has two paths whose relative phase
//! `θ` (carried by `G_{k2}`) sets the direction of the conversion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::gaussian::{self, Coupling, CouplingKind, DriftMatrix, LinearModel, ModeSpec};
use crate::linalg::{self, CMatrix, I};

pub const PORT_LABELS: [&str; 4] = ["a_k", "a_-k", "b_1", "b_2"];
pub const CW: usize = 0;
pub const CCW: usize = 1;

/// Reciprocal condition number below which `U − iωI` counts as singular.
const MIN_RCOND: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConversionParams {
    pub kappa: f64,
    pub gamma_m1: f64,
    pub gamma_m2: f64,
    pub c_k1: f64,
    pub c_mk1: f64,
    pub c_k2: f64,
    pub c_mk2: f64,
    /// Phase of `G_{k2}` in radians.
    pub theta: f64,
    /// External coupling of the optical ports. `None` uses the scalar-κ
    /// scattering formula; `Some(κ_in)` uses per-port couplings
    /// `(κ_in, κ_in, 0, 0)`.
    #[serde(default)]
    pub kappa_in: Option<f64>,
}

impl Default for ConversionParams {
    /// Parameters of the phase-controlled conversion figure at `θ = 0`.
    fn default() -> Self {
        Self {
            kappa: 15.0,
            gamma_m1: 22e-3,
            gamma_m2: 22e-4,
            c_k1: 1.0,
            c_mk1: 1.0,
            c_k2: 2.5,
            c_mk2: 2.5,
            theta: 0.0,
            kappa_in: None,
        }
    }
}

impl ConversionParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("kappa", self.kappa)?;
        require_positive("gamma_m1", self.gamma_m1)?;
        require_positive("gamma_m2", self.gamma_m2)?;
        for (name, c) in [
            ("c_k1", self.c_k1),
            ("c_mk1", self.c_mk1),
            ("c_k2", self.c_k2),
            ("c_mk2", self.c_mk2),
        ] {
            require_non_negative(name, c)?;
        }
        if !self.theta.is_finite() {
            return Err(Error::param("theta", "must be finite"));
        }
        if let Some(k_in) = self.kappa_in {
            require_positive("kappa_in", k_in)?;
            if k_in > self.kappa {
                return Err(Error::param("kappa_in", format!("{k_in} exceeds kappa {}", self.kappa)));
            }
        }
        Ok(())
    }

    /// `θ` wrapped into `[0, 2π)` for reporting.
    pub fn theta_wrapped(&self) -> f64 {
        self.theta.rem_euclid(std::f64::consts::TAU)
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// `|G| = √(Cκγ/4)`.
    pub fn coupling_magnitude(cooperativity: f64, kappa: f64, gamma: f64) -> f64 {
        (cooperativity * kappa * gamma / 4.0).sqrt()
    }

    /// `(G_{k1}, G_{−k1}, G_{k2}, G_{−k2})` with only `G_{k2}` complex.
    pub fn couplings(&self) -> [Complex64; 4] {
        let g = |c: f64, gamma: f64| Self::coupling_magnitude(c, self.kappa, gamma);
        [
            linalg::re(g(self.c_k1, self.gamma_m1)),
            linalg::re(g(self.c_mk1, self.gamma_m1)),
            Complex64::from_polar(g(self.c_k2, self.gamma_m2), self.theta),
            linalg::re(g(self.c_mk2, self.gamma_m2)),
        ]
    }
}

/// Four-mode network with arbitrary complex couplings
/// `(G_{k1}, G_{−k1}, G_{k2}, G_{−k2})`.
pub fn conversion_model(kappa: f64, gamma_m1: f64, gamma_m2: f64, g: [Complex64; 4]) -> LinearModel {
    let mode = |label: &str, damping: f64| ModeSpec {
        label: label.into(),
        detuning: 0.0,
        damping,
        external_coupling: 0.0,
        n_th: 0.0,
    };
    let bs = |a: usize, b: usize, strength: Complex64| Coupling {
        mode_a: a,
        mode_b: b,
        kind: CouplingKind::Beamsplitter,
        strength,
    };
    LinearModel {
        modes: vec![
            mode(PORT_LABELS[0], kappa),
            mode(PORT_LABELS[1], kappa),
            mode(PORT_LABELS[2], gamma_m1),
            mode(PORT_LABELS[3], gamma_m2),
        ],
        couplings: vec![bs(0, 2, g[0]), bs(1, 2, g[1]), bs(0, 3, g[2]), bs(1, 3, g[3])],
        drives: vec![],
    }
}

pub fn build_conversion_drift(p: &ConversionParams) -> Result<DriftMatrix> {
    p.validate()?;
    gaussian::build_drift(&conversion_model(p.kappa, p.gamma_m1, p.gamma_m2, p.couplings()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    /// Signal frequency relative to the cavity, MHz.
    pub omega: f64,
    pub r: CMatrix,
    pub port_labels: Vec<String>,
}

impl ScatteringMatrix {
    /// `|R_{out,in}|²`.
    pub fn efficiency(&self, out: usize, input: usize) -> f64 {
        self.r[(out, input)].norm_sqr()
    }
}

fn resolvent(u: &DriftMatrix, omega: f64) -> Result<CMatrix> {
    let n = u.dim();
    let shifted = &u.matrix - CMatrix::identity(n, n) * (I * omega);
    linalg::inverse(&shifted, MIN_RCOND).ok_or(Error::Singular { omega })
}

/// `R = κ(U − iωI)^{−1} − I` with one scalar `κ` for every port.
pub fn scattering_matrix(u: &DriftMatrix, kappa: f64, omega: f64) -> Result<ScatteringMatrix> {
    let n = u.dim();
    let r = resolvent(u, omega)? * linalg::re(kappa) - CMatrix::identity(n, n);
    Ok(ScatteringMatrix {
        omega,
        r,
        port_labels: u.labels.clone(),
    })
}

/// `R = √K (U − iωI)^{−1} √K − I` with per-port external couplings `K`.
pub fn scattering_matrix_ports(u: &DriftMatrix, external: &[f64], omega: f64) -> Result<ScatteringMatrix> {
    let n = u.dim();
    if external.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: external.len(),
        });
    }
    for &k in external {
        require_non_negative("external coupling", k)?;
    }
    let sqrt_k = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        external.iter().map(|k| linalg::re(k.sqrt())),
    ));
    let r = &sqrt_k * resolvent(u, omega)? * &sqrt_k - CMatrix::identity(n, n);
    Ok(ScatteringMatrix {
        omega,
        r,
        port_labels: u.labels.clone(),
    })
}

/// Scattering matrix of the conversion network, honouring `kappa_in`.
pub fn conversion_scattering(p: &ConversionParams, omega: f64) -> Result<ScatteringMatrix> {
    let u = build_conversion_drift(p)?;
    u.ensure_stable()?;
    match p.kappa_in {
        None => scattering_matrix(&u, p.kappa, omega),
        Some(k_in) => scattering_matrix_ports(&u, &[k_in, k_in, 0.0, 0.0], omega),
    }
}

/// `(|R_{k,−k}|², |R_{−k,k}|²)`: CCW→CW ("forward") and CW→CCW ("backward").
pub fn conversion_efficiencies(p: &ConversionParams, omega: f64) -> Result<(f64, f64)> {
    let s = conversion_scattering(p, omega)?;
    Ok((s.efficiency(CW, CCW), s.efficiency(CCW, CW)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonreciprocityRatio {
    /// `η = |R_{k,−k}|² / |R_{−k,k}|²`; `+∞` when flagged.
    pub eta: f64,
    /// Set when the backward efficiency is below `1e−300`.
    pub infinite: bool,
}

pub fn nonreciprocity_ratio(p: &ConversionParams, omega: f64) -> Result<NonreciprocityRatio> {
    let (forward, backward) = conversion_efficiencies(p, omega)?;
    if backward <= 1e-300 {
        return Ok(NonreciprocityRatio {
            eta: f64::INFINITY,
            infinite: true,
        });
    }
    Ok(NonreciprocityRatio {
        eta: forward / backward,
        infinite: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// The coefficient matrix written out entry by entry.
    #[rustfmt::skip]
    fn literal_u(kappa: f64, g1: f64, g2: f64, g: [Complex64; 4]) -> CMatrix {
        let z = linalg::re(0.0);
        let [gk1, gmk1, gk2, gmk2] = g;
        CMatrix::from_row_slice(
            4,
            4,
            &[
                linalg::re(kappa / 2.0), z, I * gk1, I * gk2,
                z, linalg::re(kappa / 2.0), I * gmk1, I * gmk2,
                I * gk1.conj(), I * gmk1.conj(), linalg::re(g1 / 2.0), z,
                I * gk2.conj(), I * gmk2.conj(), z, linalg::re(g2 / 2.0),
            ],
        )
    }

    #[test]
    fn drift_matches_written_coefficient_matrix() {
        let p = ConversionParams::default().with_theta(0.9);
        let u = build_conversion_drift(&p).unwrap();
        assert!(!u.basis_doubled);
        let expect = literal_u(p.kappa, p.gamma_m1, p.gamma_m2, p.couplings());
        assert!(linalg::max_abs(&(&u.matrix - expect)) < 1e-15);
    }

    #[test]
    fn figure_coupling_magnitudes() {
        let g = ConversionParams::default().couplings();
        assert_relative_eq!(g[0].norm(), (15.0f64 * 0.022 / 4.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(g[0].norm(), 0.2872281, epsilon = 1e-6);
        assert_relative_eq!(g[2].norm(), 0.1436141, epsilon = 1e-6);
    }

    #[test]
    fn zero_phase_and_zero_coupling_structure() {
        let u = build_conversion_drift(&ConversionParams::default()).unwrap();
        // θ = 0: all couplings real, so U is complex symmetric
        assert!(linalg::max_abs(&(&u.matrix - u.matrix.transpose())) < 1e-15);
        let p = ConversionParams {
            c_k1: 0.0,
            c_mk1: 0.0,
            c_k2: 0.0,
            c_mk2: 0.0,
            ..Default::default()
        };
        let u0 = build_conversion_drift(&p).unwrap();
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| u0.matrix[(i, j)].norm())
            .sum();
        assert_eq!(off, 0.0);
        let s = conversion_scattering(&p, 0.001).unwrap();
        assert_eq!(s.efficiency(CW, CCW), 0.0);
    }

    #[test]
    fn lossy_cavity_reflection_and_far_detuned_limit() {
        let p = ConversionParams {
            c_k1: 0.0,
            c_mk1: 0.0,
            c_k2: 0.0,
            c_mk2: 0.0,
            ..Default::default()
        };
        let u = build_conversion_drift(&p).unwrap();
        let s = scattering_matrix(&u, p.kappa, 0.0).unwrap();
        assert_relative_eq!(s.r[(0, 0)].re, 1.0, epsilon = 1e-14);
        let far = scattering_matrix(&u, p.kappa, 1e12).unwrap();
        assert!(linalg::max_abs(&(far.r + CMatrix::identity(4, 4))) < 1e-9);
    }

    #[test]
    fn directional_conversion_at_three_quarter_pi() {
        let p = ConversionParams::default().with_theta(3.0 * PI / 4.0);
        let (fwd, bwd) = conversion_efficiencies(&p, -p.gamma_m2).unwrap();
        assert!(bwd < 0.05 * fwd);
        let (fwd2, bwd2) = conversion_efficiencies(&p, p.gamma_m2).unwrap();
        assert_relative_eq!(fwd2, bwd, max_relative = 1e-9);
        assert_relative_eq!(bwd2, fwd, max_relative = 1e-9);
        let eta = nonreciprocity_ratio(&p.with_theta(0.0), -p.gamma_m2).unwrap();
        assert_relative_eq!(eta.eta, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kappa_in_switch_rescales_conversion_only() {
        let p = ConversionParams::default().with_theta(1.0);
        let q = ConversionParams {
            kappa_in: Some(p.kappa / 2.0),
            ..p
        };
        let (f, b) = conversion_efficiencies(&p, 0.001).unwrap();
        let (fq, bq) = conversion_efficiencies(&q, 0.001).unwrap();
        assert_relative_eq!(fq, f / 4.0, max_relative = 1e-12);
        assert_relative_eq!(bq, b / 4.0, max_relative = 1e-12);
        assert!(ConversionParams {
            kappa_in: Some(100.0),
            ..p
        }
        .validate()
        .is_err());
    }

    #[test]
    fn singular_resolvent_reports_frequency() {
        // a lossless isolated mode has a pole on the real axis
        let u = DriftMatrix {
            matrix: CMatrix::from_element(1, 1, I * 2.0),
            basis_doubled: false,
            labels: vec!["a".into()],
        };
        assert_eq!(scattering_matrix(&u, 1.0, 2.0), Err(Error::Singular { omega: 2.0 }));
    }
}
