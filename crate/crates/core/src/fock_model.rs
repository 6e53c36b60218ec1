//! Truncated Fock-space realization of a [`LinearModel`].
//!
//! Builds the Hamiltonian and Lindblad channels term by term from the model,
//! so the master-equation steady state is computed without touching the
//! drift matrix or any Gaussian formula.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{CouplingKind, LinearModel, MomentSet, Op};
use crate::hilbert::{self, CollapseChannel, DensityMatrix, FockSpace, Superoperator};
use crate::linalg::{self, CMatrix, I};

/// Hamiltonian (ν units) of `model` on `space`.
///
/// A drive amplitude `f` on mode `a` enters as `i(f a† − f* a)`, which
/// reproduces `d⟨a⟩/dt ∋ f` in the Langevin picture.
pub fn hamiltonian(model: &LinearModel, space: &FockSpace) -> Result<CMatrix> {
    model.validate()?;
    if space.n_modes() != model.modes.len() {
        return Err(Error::DimensionMismatch {
            expected: model.modes.len(),
            found: space.n_modes(),
        });
    }
    let lowering: Vec<CMatrix> = (0..space.n_modes()).map(|i| space.lowering(i)).collect::<Result<_>>()?;
    let n = space.total_dim();
    let mut h = CMatrix::zeros(n, n);
    for (a, m) in lowering.iter().zip(&model.modes) {
        if m.detuning != 0.0 {
            h += a.adjoint() * a * linalg::re(m.detuning);
        }
    }
    for c in &model.couplings {
        let (a, b, g) = (&lowering[c.mode_a], &lowering[c.mode_b], c.strength);
        let term = match c.kind {
            CouplingKind::Beamsplitter => a.adjoint() * b * g,
            CouplingKind::TwoModeSqueeze => a.adjoint() * b.adjoint() * g,
        };
        h += &term + term.adjoint();
    }
    for d in &model.drives {
        let a = &lowering[d.mode];
        let term = a.adjoint() * (I * d.amplitude);
        h += &term + term.adjoint();
    }
    Ok(h)
}

/// Damping channels: `(n_th+1)γ𝓛(a) + n_th γ𝓛(a†)` per mode.
pub fn channels(model: &LinearModel, space: &FockSpace) -> Result<Vec<CollapseChannel>> {
    let mut out = Vec::new();
    for (i, m) in model.modes.iter().enumerate() {
        if m.damping > 0.0 {
            out.extend(CollapseChannel::thermal(space, i, m.damping, m.n_th)?);
        }
    }
    Ok(out)
}

pub fn liouvillian(model: &LinearModel, space: &FockSpace) -> Result<Superoperator> {
    let h = hamiltonian(model, space)?;
    let ch = channels(model, space)?;
    hilbert::build_liouvillian(space, &h, &ch)
}

pub fn space_for(model: &LinearModel, dims: &[usize]) -> Result<FockSpace> {
    FockSpace::new(dims.to_vec(), model.modes.iter().map(|m| m.label.clone()).collect())
}

pub fn steady_state(model: &LinearModel, dims: &[usize]) -> Result<DensityMatrix> {
    let space = space_for(model, dims)?;
    hilbert::steady_state_density(&liouvillian(model, &space)?)
}

/// Evaluates ordered operator products on a density matrix.
pub struct FockMoments<'a> {
    rho: &'a DensityMatrix,
    lowering: Vec<CMatrix>,
}

impl<'a> FockMoments<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Result<Self> {
        let space = rho.space();
        let lowering = (0..space.n_modes()).map(|i| space.lowering(i)).collect::<Result<_>>()?;
        Ok(Self { rho, lowering })
    }

    /// `Tr(x_1 x_2 … x_n ρ)`, applied right to left.
    pub fn ordered_moment(&self, ops: &[Op]) -> Result<Complex64> {
        let mut acc = self.rho.data().clone();
        for op in ops.iter().rev() {
            let a = self.lowering.get(op.mode).ok_or(Error::IndexOutOfRange {
                index: op.mode,
                len: self.lowering.len(),
            })?;
            acc = if op.dagger { a.adjoint() * acc } else { a * acc };
        }
        Ok(acc.trace())
    }

    /// First and second moments in the same layout as the Gaussian engine.
    pub fn moment_set(&self) -> Result<MomentSet> {
        let n = self.lowering.len();
        let mean: Vec<Complex64> = (0..n)
            .map(|i| hilbert::expectation(self.rho, &self.lowering[i]))
            .collect::<Result<_>>()?;
        let mut normal = CMatrix::zeros(n, n);
        let mut anomalous = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                normal[(i, j)] = self.ordered_moment(&[Op::ad(i), Op::a(j)])?;
                anomalous[(i, j)] = self.ordered_moment(&[Op::a(i), Op::a(j)])?;
            }
        }
        Ok(MomentSet {
            mean,
            normal,
            anomalous,
        })
    }
}

/// Flattened first and second moments, used for convergence comparisons.
pub fn moment_vector(m: &MomentSet) -> DVector<Complex64> {
    let mut v: Vec<Complex64> = m.mean.clone();
    v.extend(m.normal.iter().copied());
    v.extend(m.anomalous.iter().copied());
    DVector::from_vec(v)
}
