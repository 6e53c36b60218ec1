//! Counter-propagating photon-pair generation.
//!
//! Two degenerate traveling modes `a_k` (CW) and `a_{−k}` (CCW) couple to a
//! breathing phonon `b_0`. A red-detuned pump on the CW mode gives a
//! beamsplitter coupling `G_k`, a blue-detuned pump on the CCW mode a
//! two-mode-squeezing coupling `G_{−k}`, and a weak signal `ε_s` probes the
//! CW mode at detuning `δ_k`.
//!
//! In the frame rotating with `(a_k†a_k − a_{−k}†a_{−k} + b†b)` at the
//! signal offset, the model is time independent with detunings
//! `(−δ_k, −δ_k, +δ_k)` on `(a_k, b_0, a_{−k})`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::fock_model::{self, FockMoments};
use crate::gaussian::{self, Coupling, CouplingKind, Drive, LinearModel, ModeSpec, MomentSet, Op};
use crate::hilbert::DensityMatrix;
use crate::linalg;

pub const CW: usize = 0;
pub const PHONON: usize = 1;
pub const CCW: usize = 2;

/// Tolerance on the `I ≥ −1` bound before it is reported as a violation.
const WITNESS_BOUND_TOL: f64 = 1e-9;
pub const MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairgenParams {
    pub kappa: f64,
    pub kappa_in: f64,
    pub gamma_m: f64,
    pub n_th: f64,
    pub g_k: f64,
    pub g_mk: f64,
    /// Signal amplitude; the Langevin forcing is `√(2π κ_in) ε_s` in rad/μs.
    pub eps_s: f64,
    /// `δ_k = ω_s − ω_{c,k}`.
    pub delta_k: f64,
}

impl Default for PairgenParams {
    /// Parameters of the CW/CCW pair-generation figure (δ_k = 0, n_th = 0).
    fn default() -> Self {
        Self {
            kappa: 15.0,
            kappa_in: 7.5,
            gamma_m: 0.022,
            n_th: 0.0,
            g_k: 0.3,
            g_mk: 0.1,
            eps_s: 0.1,
            delta_k: 0.0,
        }
    }
}

impl PairgenParams {
    /// Checks signs and `κ_in ≤ κ`, but not the gain bound on `G_{−k}`.
    pub fn validate_physical(&self) -> Result<()> {
        require_positive("kappa", self.kappa)?;
        require_positive("kappa_in", self.kappa_in)?;
        require_positive("gamma_m", self.gamma_m)?;
        require_non_negative("n_th", self.n_th)?;
        require_non_negative("g_k", self.g_k)?;
        require_non_negative("g_mk", self.g_mk)?;
        require_non_negative("eps_s", self.eps_s)?;
        if !self.delta_k.is_finite() {
            return Err(Error::param("delta_k", "must be finite"));
        }
        if self.kappa_in > self.kappa {
            return Err(Error::param(
                "kappa_in",
                format!("{} exceeds kappa {}", self.kappa_in, self.kappa),
            ));
        }
        Ok(())
    }

    /// Full invariant set, including `G_{−k}² < κγ_m/4`.
    pub fn validate(&self) -> Result<()> {
        self.validate_physical()?;
        let bound = self.kappa * self.gamma_m / 4.0;
        if self.g_mk * self.g_mk >= bound {
            return Err(Error::param(
                "g_mk",
                format!("G_mk² = {:e} must stay below κγ_m/4 = {bound:e}", self.g_mk * self.g_mk),
            ));
        }
        Ok(())
    }

    /// Drive amplitude in the ν-unit Langevin equation.
    pub fn drive_amplitude(&self) -> f64 {
        (self.kappa_in / crate::units::TWO_PI).sqrt() * self.eps_s
    }
}

pub fn build_pairgen_model(p: &PairgenParams) -> Result<LinearModel> {
    p.validate()?;
    Ok(model_of(p))
}

/// Builds the model without the `G_{−k}` gain bound, for stability studies.
pub fn build_pairgen_model_unchecked(p: &PairgenParams) -> Result<LinearModel> {
    p.validate_physical()?;
    Ok(model_of(p))
}

fn model_of(p: &PairgenParams) -> LinearModel {
    let optical = |label: &str, detuning: f64| ModeSpec {
        label: label.into(),
        detuning,
        damping: p.kappa,
        external_coupling: p.kappa_in,
        n_th: 0.0,
    };
    LinearModel {
        modes: vec![
            optical("a_k", -p.delta_k),
            ModeSpec {
                label: "b_0".into(),
                detuning: -p.delta_k,
                damping: p.gamma_m,
                external_coupling: 0.0,
                n_th: p.n_th,
            },
            optical("a_-k", p.delta_k),
        ],
        couplings: vec![
            Coupling {
                mode_a: CW,
                mode_b: PHONON,
                kind: CouplingKind::Beamsplitter,
                strength: linalg::re(p.g_k),
            },
            Coupling {
                mode_a: CCW,
                mode_b: PHONON,
                kind: CouplingKind::TwoModeSqueeze,
                strength: linalg::re(p.g_mk),
            },
        ],
        drives: vec![Drive {
            mode: CW,
            amplitude: linalg::re(p.drive_amplitude()),
        }],
    }
}

/// The three moments entering the witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMoments {
    /// `⟨a_k†² a_k²⟩`
    pub cw_g2: f64,
    /// `⟨a_{−k}†² a_{−k}²⟩`
    pub ccw_g2: f64,
    /// `⟨a_k†a_k a_{−k}†a_{−k}⟩`
    pub cross: f64,
}

const CW_G2: [Op; 4] = [Op::ad(CW), Op::ad(CW), Op::a(CW), Op::a(CW)];
const CCW_G2: [Op; 4] = [Op::ad(CCW), Op::ad(CCW), Op::a(CCW), Op::a(CCW)];
const CROSS: [Op; 4] = [Op::ad(CW), Op::a(CW), Op::ad(CCW), Op::a(CCW)];

impl PairMoments {
    pub fn from_gaussian(m: &MomentSet) -> Result<Self> {
        Ok(Self {
            cw_g2: gaussian::gaussian_fourth_moment(m, &CW_G2)?.re,
            ccw_g2: gaussian::gaussian_fourth_moment(m, &CCW_G2)?.re,
            cross: gaussian::gaussian_fourth_moment(m, &CROSS)?.re,
        })
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let f = FockMoments::new(rho)?;
        Ok(Self {
            cw_g2: f.ordered_moment(&CW_G2)?.re,
            ccw_g2: f.ordered_moment(&CCW_G2)?.re,
            cross: f.ordered_moment(&CROSS)?.re,
        })
    }

    fn as_array(&self) -> [f64; 3] {
        [self.cw_g2, self.ccw_g2, self.cross]
    }
}

/// `I = √(⟨a_k†²a_k²⟩⟨a_{−k}†²a_{−k}²⟩) / ⟨a_k†a_k a_{−k}†a_{−k}⟩ − 1`.
///
/// Zero for coherent product states, negative for nonclassical CW/CCW
/// correlations, never below −1.
pub fn nonclassicality_i(m: &PairMoments) -> Result<f64> {
    if m.cross.is_nan() || m.cross <= MIN_DENOMINATOR {
        return Err(Error::UndefinedWitness(m.cross));
    }
    let value = (m.cw_g2.max(0.0) * m.ccw_g2.max(0.0)).sqrt() / m.cross - 1.0;
    if value < -1.0 - WITNESS_BOUND_TOL {
        return Err(Error::WitnessBound(value));
    }
    Ok(value)
}

/// Rejects parameters outside the closed-form stability region.
pub fn stability_gate(p: &PairgenParams) -> Result<()> {
    if gaussian::routh_hurwitz_pairgen(p.g_k, p.g_mk, p.kappa, p.gamma_m)? {
        return Ok(());
    }
    let drift = gaussian::build_drift(&build_pairgen_model_unchecked(p)?)?;
    // name the growing eigenvalue; on the boundary itself it may read as marginal
    Err(drift.ensure_stable().err().unwrap_or(Error::Unstable {
        eigenvalue: linalg::re(0.0),
        growth: 0.0,
    }))
}

pub fn gaussian_moments(p: &PairgenParams) -> Result<MomentSet> {
    let model = build_pairgen_model(p)?;
    stability_gate(p)?;
    gaussian::steady_moments(&model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Gaussian,
    Fock,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Engine::Gaussian),
            "fock" => Ok(Engine::Fock),
            other => Err(Error::param(
                "engine",
                format!("unknown engine `{other}` (gaussian|fock)"),
            )),
        }
    }
}

/// Truncation control for the Fock engine.
///
/// The optical modes hold ~1e-4 quanta, so a fixed ladder of four levels
/// (two-photon terms plus one buffer level) suffices. Only the phonon ladder,
/// which carries the thermal and coherent population, is escalated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockOptions {
    pub optical_dim: usize,
    /// Starting phonon dimension.
    pub phonon_dim: usize,
    pub max_phonon_dim: usize,
    /// Accepted relative change of every reported moment when the phonon
    /// ladder grows by one level.
    pub rel_tol: f64,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            optical_dim: 4,
            phonon_dim: 7,
            max_phonon_dim: 12,
            rel_tol: 1e-3,
        }
    }
}

impl FockOptions {
    fn dims(&self, phonon: usize) -> [usize; 3] {
        let mut d = [self.optical_dim; 3];
        d[PHONON] = phonon;
        d
    }
}

#[derive(Debug, Clone)]
pub struct FockSolution {
    pub dims: [usize; 3],
    pub rho: DensityMatrix,
    pub moments: MomentSet,
    pub pair: PairMoments,
    /// Largest relative moment change against the next larger truncation.
    pub rel_change: f64,
}

/// Fock-engine steady state at fixed truncation.
pub fn fock_state(p: &PairgenParams, dims: [usize; 3]) -> Result<(DensityMatrix, MomentSet, PairMoments)> {
    let model = build_pairgen_model(p)?;
    stability_gate(p)?;
    let rho = fock_model::steady_state(&model, &dims)?;
    let moments = FockMoments::new(&rho)?.moment_set()?;
    let pair = PairMoments::from_density(&rho)?;
    Ok((rho, moments, pair))
}

fn reported(m: &MomentSet, pair: &PairMoments) -> Vec<f64> {
    let mut v: Vec<f64> = fock_model::moment_vector(m).iter().map(|z| z.norm()).collect();
    v.extend(pair.as_array());
    v
}

fn rel_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale < 1e-14 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Grows the phonon ladder until one more level changes each reported
/// second and fourth moment by at most `rel_tol`.
pub fn fock_converged(p: &PairgenParams, opts: &FockOptions) -> Result<FockSolution> {
    if opts.optical_dim < 3 || opts.phonon_dim < 2 {
        return Err(Error::param(
            "fock dims",
            "optical ladders need at least 3 levels for two-photon moments",
        ));
    }
    let mut phonon = opts.phonon_dim;
    let (_, mut moments, mut pair) = fock_state(p, opts.dims(phonon))?;
    loop {
        if phonon + 1 > opts.max_phonon_dim {
            return Err(Error::NotConverged(format!(
                "phonon ladder of {phonon} levels still changing by more than {}",
                opts.rel_tol
            )));
        }
        let dims = opts.dims(phonon + 1);
        let (rho2, moments2, pair2) = fock_state(p, dims)?;
        let change = rel_change(&reported(&moments, &pair), &reported(&moments2, &pair2));
        if change <= opts.rel_tol {
            return Ok(FockSolution {
                dims,
                rho: rho2,
                moments: moments2,
                pair: pair2,
                rel_change: change,
            });
        }
        phonon += 1;
        moments = moments2;
        pair = pair2;
    }
}

pub fn pair_moments(p: &PairgenParams, engine: Engine) -> Result<PairMoments> {
    match engine {
        Engine::Gaussian => PairMoments::from_gaussian(&gaussian_moments(p)?),
        Engine::Fock => Ok(fock_converged(p, &FockOptions::default())?.pair),
    }
}

pub fn evaluate_i(p: &PairgenParams, engine: Engine) -> Result<f64> {
    nonclassicality_i(&pair_moments(p, engine)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    DeltaK,
    GK,
    NTh,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::DeltaK => "delta_k",
            SweepAxis::GK => "g_k",
            SweepAxis::NTh => "n_th",
        }
    }

    pub fn apply(&self, p: &PairgenParams, value: f64) -> PairgenParams {
        let mut q = *p;
        match self {
            SweepAxis::DeltaK => q.delta_k = value,
            SweepAxis::GK => q.g_k = value,
            SweepAxis::NTh => q.n_th = value,
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub result: Result<f64>,
}

/// Evaluates `I` at each grid point in parallel. Failing points keep their
/// error and the sweep continues.
pub fn sweep_nonclassicality(p: &PairgenParams, axis: SweepAxis, grid: &[f64], engine: Engine) -> Vec<SweepPoint> {
    grid.par_iter()
        .map(|&value| SweepPoint {
            value,
            result: evaluate_i(&axis.apply(p, value), engine),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpotCheck {
    pub value: f64,
    pub gaussian: f64,
    pub fock: f64,
    pub fock_dims: [usize; 3],
}

impl SpotCheck {
    pub fn abs_diff(&self) -> f64 {
        (self.gaussian - self.fock).abs()
    }
}

/// Re-evaluates `count` evenly spaced grid points with the Fock engine.
pub fn spot_check(p: &PairgenParams, axis: SweepAxis, grid: &[f64], count: usize) -> Result<Vec<SpotCheck>> {
    if grid.is_empty() || count == 0 {
        return Ok(Vec::new());
    }
    let count = count.min(grid.len());
    let picks: Vec<f64> = if count == 1 {
        vec![grid[grid.len() / 2]]
    } else {
        (0..count).map(|i| grid[i * (grid.len() - 1) / (count - 1)]).collect()
    };
    picks
        .par_iter()
        .map(|&value| {
            let q = axis.apply(p, value);
            let gaussian = evaluate_i(&q, Engine::Gaussian)?;
            let sol = fock_converged(&q, &FockOptions::default())?;
            Ok(SpotCheck {
                value,
                gaussian,
                fock: nonclassicality_i(&sol.pair)?,
                fock_dims: sol.dims,
            })
        })
        .collect()
}
