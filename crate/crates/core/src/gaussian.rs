//! Exact Gaussian-state engine for quadratic bosonic networks.
//!
//! A [`LinearModel`] obeys the quantum Langevin equations
//! `dO/dt = −U O + drive + noise`. Steady-state first moments solve
//! `U⟨O⟩ = drive`; centered second moments solve the Lyapunov equation
//! `U V + V U† = D` with `V_ij = ⟨δX_i δX_j†⟩` over the doubled vector
//! `X = (a_1 … a_N, a_1† … a_N†)`. Higher moments follow from Wick
//! factorization.
//!
//! All matrices are kept in ν units (MHz). Every steady-state quantity is
//! invariant under the common 2π rescaling, so nothing here needs angular
//! units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::linalg::{self, CMatrix, CVector, I};

/// Eigenvalues of `−U` must have real part below `-STABILITY_MARGIN` (MHz).
pub const STABILITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub label: String,
    /// Coefficient of `a†a` in the rotating-frame Hamiltonian.
    pub detuning: f64,
    /// Total energy damping rate.
    pub damping: f64,
    pub external_coupling: f64,
    pub n_th: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// `G a†b + G* a b†`
    Beamsplitter,
    /// `G a†b† + G* a b`
    TwoModeSqueeze,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub mode_a: usize,
    pub mode_b: usize,
    pub kind: CouplingKind,
    pub strength: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub mode: usize,
    /// Coherent forcing of `d⟨a⟩/dt`, in MHz.
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearModel {
    pub modes: Vec<ModeSpec>,
    pub couplings: Vec<Coupling>,
    pub drives: Vec<Drive>,
}

impl LinearModel {
    pub fn validate(&self) -> Result<()> {
        let n = self.modes.len();
        for m in &self.modes {
            require_non_negative(&format!("{}.damping", m.label), m.damping)?;
            require_non_negative(&format!("{}.external_coupling", m.label), m.external_coupling)?;
            require_non_negative(&format!("{}.n_th", m.label), m.n_th)?;
            if !m.detuning.is_finite() {
                return Err(Error::param(format!("{}.detuning", m.label), "must be finite"));
            }
            if m.external_coupling > m.damping {
                return Err(Error::param(
                    format!("{}.external_coupling", m.label),
                    format!("{} exceeds total damping {}", m.external_coupling, m.damping),
                ));
            }
        }
        for c in &self.couplings {
            for idx in [c.mode_a, c.mode_b] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, len: n });
                }
            }
            if c.mode_a == c.mode_b {
                return Err(Error::param("couplings", format!("self-coupling on mode {}", c.mode_a)));
            }
        }
        for d in &self.drives {
            if d.mode >= n {
                return Err(Error::IndexOutOfRange { index: d.mode, len: n });
            }
        }
        Ok(())
    }

    pub fn has_squeezing(&self) -> bool {
        self.couplings.iter().any(|c| c.kind == CouplingKind::TwoModeSqueeze)
    }

    /// Per-mode `(damping, n_th)` noise inputs.
    pub fn noise_inputs(&self) -> Vec<(f64, f64)> {
        self.modes.iter().map(|m| (m.damping, m.n_th)).collect()
    }
}

/// The Langevin coefficient matrix `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub matrix: CMatrix,
    /// Basis is `(a_1 … a_N, a_1† … a_N†)` when true, `(a_1 … a_N)` otherwise.
    pub basis_doubled: bool,
    pub labels: Vec<String>,
}

impl DriftMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of physical modes.
    pub fn n_modes(&self) -> usize {
        if self.basis_doubled {
            self.dim() / 2
        } else {
            self.dim()
        }
    }

    /// Same dynamics in the doubled basis: `diag(U, U*)` for a plain matrix.
    pub fn doubled(&self) -> DriftMatrix {
        if self.basis_doubled {
            return self.clone();
        }
        let n = self.dim();
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        m.view_mut((n, n), (n, n)).copy_from(&self.matrix.map(|z| z.conj()));
        let mut labels = self.labels.clone();
        labels.extend(self.labels.iter().map(|l| format!("{l}†")));
        DriftMatrix {
            matrix: m,
            basis_doubled: true,
            labels,
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        linalg::eigenvalues(&self.matrix)
    }

    /// Errors with the most unstable eigenvalue of `−U` unless all decay.
    pub fn ensure_stable(&self) -> Result<()> {
        let eigs = self.eigenvalues()?;
        match eigs.iter().map(|z| -z).max_by(|a, b| a.re.total_cmp(&b.re)) {
            Some(worst) if worst.re >= -STABILITY_MARGIN => Err(Error::Unstable {
                eigenvalue: worst,
                growth: worst.re,
            }),
            _ => Ok(()),
        }
    }
}

pub fn build_drift(model: &LinearModel) -> Result<DriftMatrix> {
    model.validate()?;
    let n = model.modes.len();
    let doubled = model.has_squeezing();
    let dim = if doubled { 2 * n } else { n };
    let mut u = CMatrix::zeros(dim, dim);
    for (i, m) in model.modes.iter().enumerate() {
        u[(i, i)] = I * m.detuning + m.damping / 2.0;
        if doubled {
            u[(n + i, n + i)] = -I * m.detuning + m.damping / 2.0;
        }
    }
    for c in &model.couplings {
        let (a, b, g) = (c.mode_a, c.mode_b, c.strength);
        match c.kind {
            CouplingKind::Beamsplitter => {
                // da/dt ∋ −iG b, db/dt ∋ −iG* a
                u[(a, b)] += I * g;
                u[(b, a)] += I * g.conj();
                if doubled {
                    u[(n + a, n + b)] += -I * g.conj();
                    u[(n + b, n + a)] += -I * g;
                }
            }
            CouplingKind::TwoModeSqueeze => {
                // da/dt ∋ −iG b†, db/dt ∋ −iG a†
                u[(a, n + b)] += I * g;
                u[(b, n + a)] += I * g;
                u[(n + a, b)] += -I * g.conj();
                u[(n + b, a)] += -I * g.conj();
            }
        }
    }
    let mut labels: Vec<String> = model.modes.iter().map(|m| m.label.clone()).collect();
    if doubled {
        labels.extend(model.modes.iter().map(|m| format!("{}†", m.label)));
    }
    Ok(DriftMatrix {
        matrix: u,
        basis_doubled: doubled,
        labels,
    })
}

/// Coherent drive vector in the basis of `build_drift(model)`.
pub fn drive_vector(model: &LinearModel) -> CVector {
    let n = model.modes.len();
    let doubled = model.has_squeezing();
    let mut v = CVector::zeros(if doubled { 2 * n } else { n });
    for d in &model.drives {
        v[d.mode] += d.amplitude;
        if doubled {
            v[n + d.mode] += d.amplitude.conj();
        }
    }
    v
}

/// True iff every eigenvalue of `−U` has real part `< −1e−12`.
pub fn stability_check(drift: &DriftMatrix) -> bool {
    drift.ensure_stable().is_ok()
}

/// Closed-form stability of the pair-generation model: `G_k² − G_{−k}² > −κγ/4`.
pub fn routh_hurwitz_pairgen(g_k: f64, g_mk: f64, kappa: f64, gamma: f64) -> Result<bool> {
    require_positive("kappa", kappa)?;
    require_positive("gamma", gamma)?;
    Ok(g_k * g_k - g_mk * g_mk > -kappa * gamma / 4.0)
}

pub fn first_moments_steady(drift: &DriftMatrix, drive: &CVector) -> Result<CVector> {
    if drive.len() != drift.dim() {
        return Err(Error::DimensionMismatch {
            expected: drift.dim(),
            found: drive.len(),
        });
    }
    drift.ensure_stable()?;
    linalg::solve(&drift.matrix, drive, 1e-14).ok_or(Error::Singular { omega: 0.0 })
}

/// Centered steady-state covariance `V_ij = ⟨δX_i δX_j†⟩` in the doubled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    pub v: CMatrix,
    pub n_modes: usize,
}

/// Diffusion matrix: `damping·(n_th+1)` on the annihilation block,
/// `damping·n_th` on the creation block.
pub fn diffusion_matrix(noise_inputs: &[(f64, f64)]) -> CMatrix {
    let n = noise_inputs.len();
    let mut d = CMatrix::zeros(2 * n, 2 * n);
    for (i, &(gamma, n_th)) in noise_inputs.iter().enumerate() {
        d[(i, i)] = linalg::re(gamma * (n_th + 1.0));
        d[(n + i, n + i)] = linalg::re(gamma * n_th);
    }
    d
}

pub fn second_moments_steady(drift: &DriftMatrix, noise_inputs: &[(f64, f64)]) -> Result<Covariance> {
    let n = drift.n_modes();
    if noise_inputs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: noise_inputs.len(),
        });
    }
    for &(g, th) in noise_inputs {
        require_non_negative("damping", g)?;
        require_non_negative("n_th", th)?;
    }
    drift.ensure_stable()?;
    let u = drift.doubled();
    let d = diffusion_matrix(noise_inputs);
    let v = linalg::lyapunov(&u.matrix, &d)?;
    Ok(Covariance { v, n_modes: n })
}

/// Steady-state first and second moments of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    /// `⟨a_i⟩`
    pub mean: Vec<Complex64>,
    /// `⟨a_i† a_j⟩` (full, including the mean part)
    pub normal: CMatrix,
    /// `⟨a_i a_j⟩`
    pub anomalous: CMatrix,
}

/// One factor in an ordered operator product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Op {
    pub mode: usize,
    pub dagger: bool,
}

impl Op {
    pub const fn a(mode: usize) -> Self {
        Self { mode, dagger: false }
    }

    pub const fn ad(mode: usize) -> Self {
        Self { mode, dagger: true }
    }
}

impl MomentSet {
    /// Combines first moments (length `N`, or `2N` doubled) with a covariance.
    pub fn from_parts(first: &CVector, cov: &Covariance) -> Result<Self> {
        let n = cov.n_modes;
        if first.len() != n && first.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: first.len(),
            });
        }
        let mean: Vec<Complex64> = (0..n).map(|i| first[i]).collect();
        let normal = CMatrix::from_fn(n, n, |i, j| cov.v[(n + i, n + j)] + mean[i].conj() * mean[j]);
        let anomalous = CMatrix::from_fn(n, n, |i, j| cov.v[(i, n + j)] + mean[i] * mean[j]);
        Ok(Self {
            mean,
            normal,
            anomalous,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len()
    }

    pub fn occupation(&self, mode: usize) -> f64 {
        self.normal[(mode, mode)].re
    }

    fn mean_of(&self, op: Op) -> Complex64 {
        let m = self.mean[op.mode];
        if op.dagger {
            m.conj()
        } else {
            m
        }
    }

    /// Ordered centered two-point function `⟨δx δy⟩`.
    fn centered_pair(&self, x: Op, y: Op) -> Complex64 {
        let (i, j) = (x.mode, y.mode);
        let cn = |p: usize, q: usize| self.normal[(p, q)] - self.mean[p].conj() * self.mean[q];
        let cm = |p: usize, q: usize| self.anomalous[(p, q)] - self.mean[p] * self.mean[q];
        match (x.dagger, y.dagger) {
            (false, false) => cm(i, j),
            (true, true) => cm(j, i).conj(),
            (true, false) => cn(i, j),
            (false, true) => cn(j, i) + if i == j { 1.0 } else { 0.0 },
        }
    }

    /// `⟨x_1 x_2 … x_n⟩` for a Gaussian state: sum over all order-preserving
    /// decompositions into means and centered pairs.
    pub fn ordered_moment(&self, ops: &[Op]) -> Result<Complex64> {
        if let Some(op) = ops.iter().find(|o| o.mode >= self.n_modes()) {
            return Err(Error::IndexOutOfRange {
                index: op.mode,
                len: self.n_modes(),
            });
        }
        Ok(self.wick(ops))
    }

    fn wick(&self, ops: &[Op]) -> Complex64 {
        let Some((&first, rest)) = ops.split_first() else {
            return Complex64::new(1.0, 0.0);
        };
        let mut acc = self.mean_of(first) * self.wick(rest);
        for k in 0..rest.len() {
            let mut remaining = rest.to_vec();
            let partner = remaining.remove(k);
            acc += self.centered_pair(first, partner) * self.wick(&remaining);
        }
        acc
    }
}

/// Wick/Isserlis evaluation of an ordered operator product.
pub fn gaussian_fourth_moment(moments: &MomentSet, ops: &[Op]) -> Result<Complex64> {
    moments.ordered_moment(ops)
}

/// Convenience: full steady state of a stable model.
pub fn steady_moments(model: &LinearModel) -> Result<MomentSet> {
    let drift = build_drift(model)?;
    let first = first_moments_steady(&drift, &drive_vector(model))?;
    let cov = second_moments_steady(&drift, &model.noise_inputs())?;
    MomentSet::from_parts(&first, &cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mode(label: &str, detuning: f64, damping: f64, n_th: f64) -> ModeSpec {
        ModeSpec {
            label: label.into(),
            detuning,
            damping,
            external_coupling: 0.0,
            n_th,
        }
    }

    #[test]
    fn uncoupled_drift_is_diagonal() {
        let model = LinearModel {
            modes: vec![mode("a", 0.3, 15.0, 0.0), mode("b", -1.0, 0.02, 0.0)],
            ..Default::default()
        };
        let u = build_drift(&model).unwrap();
        assert!(!u.basis_doubled);
        assert_eq!(u.matrix[(0, 0)], Complex64::new(7.5, 0.3));
        assert_eq!(u.matrix[(1, 1)], Complex64::new(0.01, -1.0));
        assert_eq!(u.matrix[(0, 1)], Complex64::new(0.0, 0.0));
        assert!(stability_check(&u));
    }

    #[test]
    fn squeezing_drift_has_bogoliubov_structure() {
        let model = LinearModel {
            modes: vec![mode("a", 0.1, 15.0, 0.0), mode("b", -0.2, 0.022, 0.2)],
            couplings: vec![Coupling {
                mode_a: 0,
                mode_b: 1,
                kind: CouplingKind::TwoModeSqueeze,
                strength: Complex64::new(0.05, 0.03),
            }],
            drives: vec![],
        };
        let u = build_drift(&model).unwrap();
        assert!(u.basis_doubled);
        let n = 2;
        let sigma = CMatrix::from_fn(4, 4, |i, j| {
            if (i + n) % 4 == j {
                linalg::re(1.0)
            } else {
                linalg::re(0.0)
            }
        });
        let mirrored = &sigma * u.matrix.map(|z| z.conj()) * &sigma;
        assert!(linalg::max_abs(&(mirrored - &u.matrix)) < 1e-15);
    }

    #[test]
    fn model_validation() {
        let mut model = LinearModel {
            modes: vec![mode("a", 0.0, 1.0, 0.0)],
            couplings: vec![Coupling {
                mode_a: 0,
                mode_b: 0,
                kind: CouplingKind::Beamsplitter,
                strength: linalg::re(1.0),
            }],
            drives: vec![],
        };
        assert!(build_drift(&model).is_err());
        model.couplings.clear();
        model.modes[0].external_coupling = 2.0;
        assert!(build_drift(&model).is_err());
    }

    #[test]
    fn driven_cavity_mean_field() {
        let (kappa, kappa_in, eps) = (15.0, 7.5, 0.1);
        let model = LinearModel {
            modes: vec![ModeSpec {
                label: "a".into(),
                detuning: 0.0,
                damping: kappa,
                external_coupling: kappa_in,
                n_th: 0.0,
            }],
            couplings: vec![],
            drives: vec![Drive {
                mode: 0,
                amplitude: linalg::re(kappa_in.sqrt() * eps),
            }],
        };
        let u = build_drift(&model).unwrap();
        let m = first_moments_steady(&u, &drive_vector(&model)).unwrap();
        assert_relative_eq!(m[0].re, kappa_in.sqrt() * eps / (kappa / 2.0), max_relative = 1e-14);
        let zero = first_moments_steady(&u, &CVector::zeros(1)).unwrap();
        assert_eq!(zero[0].norm(), 0.0);
        // undriven vacuum cavity: every centered moment vanishes
        let cov = second_moments_steady(&u, &[(kappa, 0.0)]).unwrap();
        let moments = MomentSet::from_parts(&CVector::zeros(1), &cov).unwrap();
        assert!(moments.normal[(0, 0)].norm() < 1e-15);
        assert!(moments.anomalous[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn thermal_phonon_fixed_point() {
        let model = LinearModel {
            modes: vec![mode("b", 42.3, 0.022, 0.2)],
            ..Default::default()
        };
        let m = steady_moments(&model).unwrap();
        assert_relative_eq!(m.occupation(0), 0.2, max_relative = 1e-12);
        // thermal Wick pairing: ⟨b†²b²⟩ = 2n²
        let g2 = gaussian_fourth_moment(&m, &[Op::ad(0), Op::ad(0), Op::a(0), Op::a(0)]).unwrap();
        assert_relative_eq!(g2.re, 2.0 * 0.04, max_relative = 1e-12);
    }

    #[test]
    fn coherent_state_factorizes() {
        let alpha = Complex64::new(0.7, -0.4);
        let m = MomentSet {
            mean: vec![alpha],
            normal: CMatrix::from_element(1, 1, linalg::re(alpha.norm_sqr())),
            anomalous: CMatrix::from_element(1, 1, alpha * alpha),
        };
        let g2 = gaussian_fourth_moment(&m, &[Op::ad(0), Op::ad(0), Op::a(0), Op::a(0)]).unwrap();
        assert_relative_eq!(g2.re, alpha.norm_sqr().powi(2), max_relative = 1e-14);
        // anti-normal order picks up the commutator: ⟨a a†⟩ = |α|² + 1
        let anti = m.ordered_moment(&[Op::a(0), Op::ad(0)]).unwrap();
        assert_relative_eq!(anti.re, alpha.norm_sqr() + 1.0, max_relative = 1e-14);
        assert!(m.ordered_moment(&[Op::a(3)]).is_err());
    }

    #[test]
    fn squeeze_instability_is_an_error() {
        let model = LinearModel {
            modes: vec![mode("a", 0.0, 1.0, 0.0), mode("b", 0.0, 1.0, 0.0)],
            couplings: vec![Coupling {
                mode_a: 0,
                mode_b: 1,
                kind: CouplingKind::TwoModeSqueeze,
                strength: linalg::re(0.8),
            }],
            drives: vec![],
        };
        let u = build_drift(&model).unwrap();
        assert!(!stability_check(&u));
        assert!(matches!(steady_moments(&model), Err(Error::Unstable { .. })));
    }

    #[test]
    fn routh_hurwitz_examples() {
        assert!(routh_hurwitz_pairgen(0.3, 0.1, 15.0, 0.022).unwrap());
        assert!(routh_hurwitz_pairgen(0.0, 0.0, 1.0, 1.0).unwrap());
        assert!(!routh_hurwitz_pairgen(0.0, 0.3, 15.0, 0.022).unwrap());
        assert!(routh_hurwitz_pairgen(0.0, 0.3, 0.0, 0.022).is_err());
    }
}
