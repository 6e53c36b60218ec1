//! Parity-time symmetry of backscattering-coupled CW/CCW acoustic modes.
//!
//! A slightly deformed resonator couples the acoustic modes `b_l` and
//! `b_{−l}` with strength `J`. A pump on `a_j` (anti-Stokes side) turns
//! `a_k ↔ b_l` into a beamsplitter (optically induced loss on `b_l`), a pump
//! on `a_{−k}` turns `a_{−j} b_{−l}` into a squeezing pair (optically
//! induced gain on `b_{−l}`), and a probe drives `a_{−j}`.
//!
//! Mode labels: pump-CW `a_j`, scattered-CW `a_k`, pump-CCW `a_{−k}`,
//! scattered-CCW `a_{−j}`. The Langevin vector is `(a_k, a_{−j}†, b_l, b_{−l})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::gaussian::DriftMatrix;
use crate::linalg::{self, CMatrix, CVector, I};
use crate::peaks;
use crate::units::TWO_PI;

pub const LABELS: [&str; 4] = ["a_k", "a_-j†", "b_l", "b_-l"];

/// Relative agreement required between the closed-form fields and the
/// direct linear solve.
pub const CROSS_CHECK_TOL: f64 = 1e-10;
/// Peaks must rise at least this fraction of the curve maximum.
pub const PEAK_PROMINENCE: f64 = 0.05;
/// Minimum `κ/γ_m` for which adiabatic elimination is considered safe.
pub const ADIABATIC_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PTParams {
    pub omega_ml: f64,
    pub gamma_m: f64,
    pub g_l: f64,
    pub g_ml: f64,
    pub j: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Probe external coupling; `None` means `κ_1/2`.
    #[serde(default)]
    pub kappa_in: Option<f64>,
}

impl Default for PTParams {
    /// Acoustic PT figure parameters in the unbroken regime (`G_l = 0.14`).
    fn default() -> Self {
        Self {
            omega_ml: 42.3,
            gamma_m: 0.004,
            g_l: 0.14,
            g_ml: 0.14,
            j: 0.016,
            kappa1: 3.5,
            kappa2: 3.5,
            kappa_in: None,
        }
    }
}

impl PTParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("omega_ml", self.omega_ml)?;
        require_positive("gamma_m", self.gamma_m)?;
        require_positive("kappa1", self.kappa1)?;
        require_positive("kappa2", self.kappa2)?;
        require_non_negative("g_l", self.g_l)?;
        require_non_negative("g_ml", self.g_ml)?;
        require_non_negative("j", self.j)?;
        if let Some(k) = self.kappa_in {
            require_positive("kappa_in", k)?;
            if k > self.kappa1 {
                return Err(Error::param("kappa_in", format!("{k} exceeds kappa1 {}", self.kappa1)));
            }
        }
        Ok(())
    }

    pub fn kappa_in(&self) -> f64 {
        self.kappa_in.unwrap_or(self.kappa1 / 2.0)
    }

    /// `√κ_in ε_p` in ν units (the angular forcing is `√(2π κ_in) ε_p`).
    pub fn probe_forcing(&self, eps_p: f64) -> f64 {
        (self.kappa_in() / TWO_PI).sqrt() * eps_p
    }
}

/// Diagonal detunings `(δ_k, δ_{−j}, δ_l, δ_{−l})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtDetunings {
    pub delta_k: f64,
    pub delta_mj: f64,
    pub delta_l: f64,
    pub delta_ml: f64,
}

impl PtDetunings {
    /// Resonant pumping probed at `δ = ω_p − ω_{c,j}`.
    pub fn probe(delta: f64) -> Self {
        Self {
            delta_k: delta,
            delta_mj: -delta,
            delta_l: delta,
            delta_ml: delta,
        }
    }

    /// Detunings from absolute frequencies: cavity modes `ω_{c,k}`, `ω_{c,j}`,
    /// phonon `ω_{ml}`, probe `ω_p`, pumps `ω_{j,l}` (on `a_j`) and
    /// `ω_{−k,l}` (on `a_{−k}`).
    pub fn from_frequencies(
        omega_ck: f64,
        omega_cj: f64,
        omega_ml: f64,
        omega_p: f64,
        pump_j: f64,
        pump_mk: f64,
    ) -> Self {
        let delta_cap_k = omega_ck - pump_j;
        let delta_l = omega_ml + omega_p - pump_mk;
        Self {
            delta_k: delta_cap_k + omega_p - pump_mk,
            delta_mj: omega_cj - omega_p,
            delta_l,
            delta_ml: delta_l,
        }
    }
}

pub fn build_pt_drift(p: &PTParams, d: &PtDetunings) -> Result<DriftMatrix> {
    p.validate()?;
    let z = linalg::re(0.0);
    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(
        4,
        4,
        &[
            I * d.delta_k + p.kappa2 / 2.0, z, I * p.g_l, z,
            z, -I * d.delta_mj + p.kappa1 / 2.0, z, -I * p.g_ml,
            I * p.g_l, z, I * d.delta_l + p.gamma_m / 2.0, I * p.j,
            z, I * p.g_ml, I * p.j, I * d.delta_ml + p.gamma_m / 2.0,
        ],
    );
    Ok(DriftMatrix {
        matrix: m,
        basis_doubled: false,
        labels: LABELS.iter().map(|s| s.to_string()).collect(),
    })
}

/// Optically induced acoustic damping after eliminating the optical modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRates {
    /// Loss on `b_l`: `4G_l²/κ_2`.
    pub gamma_l: f64,
    /// Gain on `b_{−l}`: `−4G_{−l}²/κ_1` (negative).
    pub gamma_ml: f64,
    pub omega0: f64,
    /// `min(κ_1, κ_2)/γ_m`; elimination is trustworthy above [`ADIABATIC_RATIO`].
    pub separation_ratio: f64,
}

impl EffectiveRates {
    pub fn weak_separation(&self) -> bool {
        self.separation_ratio < ADIABATIC_RATIO
    }
}

pub fn adiabatic_effective_rates(p: &PTParams) -> Result<EffectiveRates> {
    p.validate()?;
    Ok(EffectiveRates {
        gamma_l: 4.0 * p.g_l * p.g_l / p.kappa2,
        gamma_ml: -4.0 * p.g_ml * p.g_ml / p.kappa1,
        omega0: 0.0,
        separation_ratio: p.kappa1.min(p.kappa2) / p.gamma_m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PtRegime {
    Unbroken,
    Exceptional,
    Broken,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupermodePair {
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    pub regime: PtRegime,
}

/// `16J² − (γ_{−l} − γ_l)²` and the scale used to call it zero.
fn discriminant(r: &EffectiveRates, j: f64) -> (f64, f64) {
    let a = 16.0 * j * j;
    let b = (r.gamma_ml - r.gamma_l).powi(2);
    (a - b, a.max(b))
}

/// `ω_± = ω_0 − (i/4)(2γ_m + γ_{−l} + γ_l) ± (1/4)√(16J² − (γ_{−l} − γ_l)²)`.
pub fn supermode_eigenfrequencies(r: &EffectiveRates, gamma_m: f64, j: f64) -> SupermodePair {
    let (disc, scale) = discriminant(r, j);
    let center = linalg::re(r.omega0) - I * (2.0 * gamma_m + r.gamma_ml + r.gamma_l) / 4.0;
    let root = Complex64::new(disc, 0.0).sqrt() / 4.0;
    let regime = if disc.abs() <= 1e-12 * scale || scale == 0.0 {
        PtRegime::Exceptional
    } else if disc > 0.0 {
        PtRegime::Unbroken
    } else {
        PtRegime::Broken
    };
    SupermodePair {
        omega_plus: center + root,
        omega_minus: center - root,
        regime,
    }
}

/// Effective `2×2` generator `M` of `d(b_l, b_{−l})/dt = −M (b_l, b_{−l})`
/// at zero optical detuning.
#[rustfmt::skip]
pub fn effective_generator(r: &EffectiveRates, gamma_m: f64, j: f64) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            I * r.omega0 + (gamma_m + r.gamma_l) / 2.0, I * j,
            I * j, I * r.omega0 + (gamma_m + r.gamma_ml) / 2.0,
        ],
    )
}

/// Eigenfrequencies `ω = −iλ` of the effective generator, for checking the
/// closed form.
pub fn effective_eigenfrequencies(r: &EffectiveRates, gamma_m: f64, j: f64) -> Result<Vec<Complex64>> {
    Ok(linalg::eigenvalues(&effective_generator(r, gamma_m, j))?
        .into_iter()
        .map(|l| -I * l)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtThreshold {
    /// `|γ_{−l} − γ_l|/4`
    pub j_pt: f64,
    /// `(γ_l + γ_m)/2`, present when gain and loss balance.
    pub ideal: Option<f64>,
}

pub fn pt_threshold(r: &EffectiveRates, gamma_m: f64) -> PtThreshold {
    let j_pt = (r.gamma_ml - r.gamma_l).abs() / 4.0;
    let imbalance = (r.gamma_ml + gamma_m) + (r.gamma_l + gamma_m);
    let scale = r.gamma_l.abs() + r.gamma_ml.abs() + gamma_m;
    let ideal = (imbalance.abs() <= 1e-9 * scale).then(|| (r.gamma_l + gamma_m) / 2.0);
    PtThreshold { j_pt, ideal }
}

/// `G_l` at which gain and loss balance: `γ_l = −γ_{−l} − 2γ_m`.
pub fn balanced_g_l(p: &PTParams) -> Option<f64> {
    let r = adiabatic_effective_rates(p).ok()?;
    let gamma_l = -r.gamma_ml - 2.0 * p.gamma_m;
    (gamma_l >= 0.0).then(|| (gamma_l * p.kappa2 / 4.0).sqrt())
}

/// Steady intracavity amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtFields {
    pub a_k: Complex64,
    pub a_mj_dag: Complex64,
    pub b_l: Complex64,
    pub b_ml: Complex64,
}

impl PtFields {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.a_k, self.a_mj_dag, self.b_l, self.b_ml]
    }
}

/// Closed-form steady state at probe detuning `δ`.
pub fn pt_fields_closed_form(p: &PTParams, delta: f64, eps_p: f64) -> PtFields {
    let f = p.probe_forcing(eps_p);
    let opt1 = I * delta + p.kappa1 / 2.0;
    let opt2 = I * delta + p.kappa2 / 2.0;
    let f1 = -I * delta - p.gamma_m / 2.0 + p.g_ml * p.g_ml / opt1;
    let f2 = -I * delta - p.gamma_m / 2.0 - p.g_l * p.g_l / opt2;
    let b_ml = (I * p.g_ml * f / opt1) / (f1 + p.j * p.j / f2);
    let b_l = I * p.j * b_ml / f2;
    PtFields {
        a_k: -I * p.g_l * b_l / opt2,
        a_mj_dag: (I * p.g_ml * b_ml + f) / opt1,
        b_l,
        b_ml,
    }
}

/// Steady state from `U O = √κ_in O_in` by a direct solve.
pub fn pt_fields_direct(p: &PTParams, delta: f64, eps_p: f64) -> Result<PtFields> {
    let u = build_pt_drift(p, &PtDetunings::probe(delta))?;
    let rhs = CVector::from_vec(vec![
        linalg::re(0.0),
        linalg::re(p.probe_forcing(eps_p)),
        linalg::re(0.0),
        linalg::re(0.0),
    ]);
    let x = linalg::solve(&u.matrix, &rhs, 1e-14).ok_or(Error::Singular { omega: delta })?;
    Ok(PtFields {
        a_k: x[0],
        a_mj_dag: x[1],
        b_l: x[2],
        b_ml: x[3],
    })
}

/// Largest relative component mismatch between two field sets.
pub fn field_mismatch(a: &PtFields, b: &PtFields) -> f64 {
    let scale = b.as_array().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return a.as_array().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    a.as_array()
        .iter()
        .zip(b.as_array())
        .map(|(x, y)| (x - y).norm() / scale)
        .fold(0.0, f64::max)
}

/// Errors unless every eigenvalue of `−U` decays.
pub fn ensure_pt_stable(p: &PTParams) -> Result<()> {
    build_pt_drift(p, &PtDetunings::probe(0.0))?.ensure_stable()
}

/// Closed-form steady fields, verified against the direct solve.
pub fn pt_steady_fields(p: &PTParams, delta: f64, eps_p: f64) -> Result<PtFields> {
    ensure_pt_stable(p)?;
    let closed = pt_fields_closed_form(p, delta, eps_p);
    let direct = pt_fields_direct(p, delta, eps_p)?;
    let mismatch = field_mismatch(&closed, &direct);
    if mismatch > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "closed-form and direct fields differ by {mismatch:e} at δ = {delta}"
        )));
    }
    Ok(closed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtSpectrum {
    pub delta: Vec<f64>,
    pub a_k: Vec<f64>,
    pub a_mj: Vec<f64>,
    pub b_l: Vec<f64>,
    pub b_ml: Vec<f64>,
    /// True when the requested grid was widened to cover the supermodes.
    pub extended: bool,
    /// Largest closed-form vs. direct mismatch over the grid.
    pub max_mismatch: f64,
}

impl PtSpectrum {
    pub fn peaks_a_mj(&self) -> Vec<f64> {
        peak_positions(&self.delta, &self.a_mj)
    }

    pub fn peaks_a_k(&self) -> Vec<f64> {
        peak_positions(&self.delta, &self.a_k)
    }
}

pub fn peak_positions(x: &[f64], y: &[f64]) -> Vec<f64> {
    peaks::prominent_peaks(y, PEAK_PROMINENCE)
        .into_iter()
        .map(|p| x[p.index])
        .collect()
}

pub fn peak_count(y: &[f64]) -> usize {
    peaks::prominent_peaks(y, PEAK_PROMINENCE).len()
}

/// Half-width of the detuning window that contains both supermode lines.
pub fn supermode_span(p: &PTParams) -> Result<f64> {
    let r = adiabatic_effective_rates(p)?;
    let s = supermode_eigenfrequencies(&r, p.gamma_m, p.j);
    let half_split = (s.omega_plus.re - s.omega_minus.re).abs() / 2.0;
    let width = s.omega_plus.im.abs().max(s.omega_minus.im.abs()).max(p.gamma_m);
    Ok(half_split + 4.0 * width)
}

/// `grid` unchanged if it spans `[−span, span]`, else a uniform grid of at
/// least 801 points that does. The flag reports whether it was widened.
pub fn covering_grid(span: f64, grid: &[f64]) -> (Vec<f64>, bool) {
    if grid.is_empty() {
        return (Vec::new(), false);
    }
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo <= -span && hi >= span {
        return (grid.to_vec(), false);
    }
    let (lo, hi) = (lo.min(-span), hi.max(span));
    let n = grid.len().max(801);
    let step = (hi - lo) / (n - 1) as f64;
    ((0..n).map(|i| lo + step * i as f64).collect(), true)
}

/// `|a_k|², |a_{−j}|², |b_{±l}|²` over the probe detuning.
pub fn pt_spectrum(p: &PTParams, grid: &[f64], eps_p: f64) -> Result<PtSpectrum> {
    ensure_pt_stable(p)?;
    let (delta, extended) = covering_grid(supermode_span(p)?, grid);
    let mut s = PtSpectrum {
        a_k: Vec::with_capacity(delta.len()),
        a_mj: Vec::with_capacity(delta.len()),
        b_l: Vec::with_capacity(delta.len()),
        b_ml: Vec::with_capacity(delta.len()),
        delta: Vec::new(),
        extended,
        max_mismatch: 0.0,
    };
    for &d in &delta {
        let closed = pt_fields_closed_form(p, d, eps_p);
        let direct = pt_fields_direct(p, d, eps_p)?;
        let mismatch = field_mismatch(&closed, &direct);
        if mismatch > CROSS_CHECK_TOL {
            return Err(Error::CrossCheck(format!(
                "closed-form and direct fields differ by {mismatch:e} at δ = {d}"
            )));
        }
        s.max_mismatch = s.max_mismatch.max(mismatch);
        s.a_k.push(closed.a_k.norm_sqr());
        s.a_mj.push(closed.a_mj_dag.norm_sqr());
        s.b_l.push(closed.b_l.norm_sqr());
        s.b_ml.push(closed.b_ml.norm_sqr());
    }
    s.delta = delta;
    Ok(s)
}

/// `|a_{−j}|²` from the eliminated model with frequency-independent
/// optical response.
pub fn pt_spectrum_adiabatic(p: &PTParams, grid: &[f64], eps_p: f64) -> Result<Vec<f64>> {
    let r = adiabatic_effective_rates(p)?;
    let f = p.probe_forcing(eps_p);
    let half1 = p.kappa1 / 2.0;
    grid.iter()
        .map(|&d| {
            let mut m = effective_generator(&r, p.gamma_m, p.j);
            m[(0, 0)] += I * d;
            m[(1, 1)] += I * d;
            let src = CVector::from_vec(vec![linalg::re(0.0), -I * p.g_ml * f / half1]);
            let b = linalg::solve(&m, &src, 1e-14).ok_or(Error::Singular { omega: d })?;
            Ok(((I * p.g_ml * b[1] + f) / half1).norm_sqr())
        })
        .collect()
}
