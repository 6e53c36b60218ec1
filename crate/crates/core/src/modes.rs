//! Traveling-wave mode bookkeeping and the azimuthal selection rule.
//!
//! A mode field of a rotationally symmetric resonator varies as `e^{-imφ}`.
//! An annihilation operator on mode `m` carries that factor and contributes
//! `+m` to the azimuthal balance of a product; a creation operator
//! contributes `-m`. A three-operator interaction survives the `φ` integral
//! only when the balance vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Optical,
    Mechanical,
}

/// An optical or mechanical whispering-gallery mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AzimuthalMode {
    pub kind: ModeKind,
    /// Azimuthal quantum number (`k` for optical, `l` for mechanical).
    pub m: i32,
    /// Resonance frequency in MHz.
    pub nu: f64,
    /// Linewidth in MHz.
    pub damping_nu: f64,
    /// Thermal occupancy; always zero for optical modes.
    pub n_th: f64,
}

impl AzimuthalMode {
    pub fn optical(m: i32, nu: f64, damping_nu: f64) -> Result<Self> {
        Self::new(ModeKind::Optical, m, nu, damping_nu, 0.0)
    }

    pub fn mechanical(m: i32, nu: f64, damping_nu: f64, n_th: f64) -> Result<Self> {
        Self::new(ModeKind::Mechanical, m, nu, damping_nu, n_th)
    }

    pub fn new(kind: ModeKind, m: i32, nu: f64, damping_nu: f64, n_th: f64) -> Result<Self> {
        require_positive("nu", nu)?;
        require_positive("damping_nu", damping_nu)?;
        require_non_negative("n_th", n_th)?;
        if kind == ModeKind::Optical && n_th != 0.0 {
            return Err(Error::param("n_th", "optical modes carry no thermal occupancy"));
        }
        Ok(Self {
            kind,
            m,
            nu,
            damping_nu,
            n_th,
        })
    }

    /// The counter-propagating degenerate partner (`m → -m`, same frequency and width).
    pub fn partner(&self) -> Self {
        Self { m: -self.m, ..*self }
    }
}

/// A ladder operator on the mode with azimuthal number `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ladder {
    pub m: i32,
    pub dagger: bool,
}

impl Ladder {
    pub const fn lower(m: i32) -> Self {
        Self { m, dagger: false }
    }

    pub const fn raise(m: i32) -> Self {
        Self { m, dagger: true }
    }

    /// Contribution to the azimuthal balance.
    pub fn charge(&self) -> i64 {
        let m = i64::from(self.m);
        if self.dagger {
            -m
        } else {
            m
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m,
            dagger: !self.dagger,
        }
    }

    pub fn mirrored(&self) -> Self {
        Self {
            m: -self.m,
            dagger: self.dagger,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionCategory {
    Dispersive,
    TripleResonant,
    Forbidden,
}

/// One photon-photon-phonon product `o_a o_b m` and its coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionTerm {
    pub optical_a: Ladder,
    pub optical_b: Ladder,
    pub mech: Ladder,
    pub category: InteractionCategory,
    /// Single-photon coupling in MHz, when known. Overlap integrals are not
    /// computed here.
    pub g: Option<f64>,
}

impl InteractionTerm {
    pub fn new(optical_a: Ladder, optical_b: Ladder, mech: Ladder, g: Option<f64>) -> Self {
        Self {
            optical_a,
            optical_b,
            mech,
            category: classify(optical_a, optical_b, mech),
            g,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.optical_a.adjoint(),
            self.optical_b.adjoint(),
            self.mech.adjoint(),
            self.g,
        )
    }
}

pub fn is_term_allowed(a: Ladder, b: Ladder, c: Ladder) -> bool {
    a.charge() + b.charge() + c.charge() == 0
}

pub fn classify_interaction(term: &InteractionTerm) -> InteractionCategory {
    classify(term.optical_a, term.optical_b, term.mech)
}

fn classify(a: Ladder, b: Ladder, mech: Ladder) -> InteractionCategory {
    if !is_term_allowed(a, b, mech) {
        return InteractionCategory::Forbidden;
    }
    // Both resonant forms move one photon: exactly one optical creation operator.
    // Pair creation/annihilation of photons is energy non-conserving.
    if a.dagger == b.dagger {
        return InteractionCategory::Forbidden;
    }
    if a.m == b.m {
        // balance forces mech.m == 0 here
        InteractionCategory::Dispersive
    } else {
        InteractionCategory::TripleResonant
    }
}

/// All Brillouin triples `a_j† a_k b_{j-k}` whose energy mismatch
/// `|(ν_j − ν_k) − ν_{j−k}|` is within tolerance.
///
/// `freq_tol = None` uses the linewidth of each candidate phonon mode.
pub fn enumerate_brillouin_triples(
    optical: &[AzimuthalMode],
    mechanical: &[AzimuthalMode],
    freq_tol: Option<f64>,
) -> Result<Vec<InteractionTerm>> {
    if let Some(tol) = freq_tol {
        require_positive("freq_tol", tol)?;
    }
    if let Some(bad) = optical.iter().find(|m| m.kind != ModeKind::Optical) {
        return Err(Error::param("optical", format!("mode m={} is not optical", bad.m)));
    }
    if let Some(bad) = mechanical.iter().find(|m| m.kind != ModeKind::Mechanical) {
        return Err(Error::param(
            "mechanical",
            format!("mode m={} is not mechanical", bad.m),
        ));
    }

    let mut out = Vec::new();
    for pump in optical {
        for signal in optical {
            if pump.m == signal.m {
                continue;
            }
            let l = i64::from(pump.m) - i64::from(signal.m);
            for phonon in mechanical.iter().filter(|b| i64::from(b.m) == l) {
                let tol = freq_tol.unwrap_or(phonon.damping_nu);
                let mismatch = (pump.nu - signal.nu) - phonon.nu;
                if mismatch.abs() <= tol {
                    out.push(InteractionTerm::new(
                        Ladder::raise(pump.m),
                        Ladder::lower(signal.m),
                        Ladder::lower(phonon.m),
                        None,
                    ));
                }
            }
        }
    }
    Ok(out)
}
