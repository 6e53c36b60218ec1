//! Truncated Fock-space master-equation engine.
//!
//! Operators are dense matrices on the tensor product of per-mode Fock
//! spaces (mode 0 is the most significant tensor factor). The Liouvillian
//! is assembled sparse in the column-stacking convention
//! `vec(ρ)[i + n j] = ρ_ij`, and its steady state is found by a direct
//! sparse solve with one equation replaced by the trace condition.

use std::f64::consts::TAU;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{require_non_negative, Error, Result};
use crate::linalg::{self, CMatrix, I};

/// Hermiticity tolerance for Hamiltonians and density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Relative residual bound `‖L[ρ]‖ ≤ tol · ‖L‖` accepted for a steady state.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Below this many superoperator rows the kernel and spectrum are also
/// checked by a dense eigensolve.
const DENSE_CHECK_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl FockSpace {
    pub fn new(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(d));
        }
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                found: labels.len(),
            });
        }
        Ok(Self { dims, labels })
    }

    /// Space with labels `mode0`, `mode1`, ...
    pub fn unlabeled(dims: Vec<usize>) -> Result<Self> {
        let labels = (0..dims.len()).map(|i| format!("mode{i}")).collect();
        Self::new(dims, labels)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Annihilation operator of `mode`, embedded in the full space.
    pub fn lowering(&self, mode: usize) -> Result<CMatrix> {
        let d = *self.dims.get(mode).ok_or(Error::IndexOutOfRange {
            index: mode,
            len: self.dims.len(),
        })?;
        embed_operator(self, mode, &annihilation_op(d)?)
    }

    pub fn identity(&self) -> CMatrix {
        let n = self.total_dim();
        CMatrix::identity(n, n)
    }
}

/// `dim × dim` truncated annihilation operator, `√n` at `(n−1, n)`.
pub fn annihilation_op(dim: usize) -> Result<CMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = linalg::re((n as f64).sqrt());
    }
    Ok(a)
}

/// `I ⊗ … ⊗ local_op ⊗ … ⊗ I` with `local_op` on factor `mode_index`.
pub fn embed_operator(space: &FockSpace, mode_index: usize, local_op: &CMatrix) -> Result<CMatrix> {
    let d = *space.dims.get(mode_index).ok_or(Error::IndexOutOfRange {
        index: mode_index,
        len: space.dims.len(),
    })?;
    if local_op.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: local_op.nrows(),
        });
    }
    let before: usize = space.dims[..mode_index].iter().product();
    let after: usize = space.dims[mode_index + 1..].iter().product();
    let left = linalg::kron(&CMatrix::identity(before, before), local_op);
    Ok(linalg::kron(&left, &CMatrix::identity(after, after)))
}

/// A dissipator `rate · 𝓛(A)` with `𝓛(A)ρ = AρA† − {A†A, ρ}/2`.
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    pub operator: CMatrix,
    /// ν-rate in MHz.
    pub rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: CMatrix, rate: f64) -> Result<Self> {
        require_non_negative("rate", rate)?;
        Ok(Self { operator, rate })
    }

    /// `rate · 𝓛(a_mode)`.
    pub fn lowering(space: &FockSpace, mode: usize, rate: f64) -> Result<Self> {
        Self::new(space.lowering(mode)?, rate)
    }

    /// `rate · 𝓛(a_mode†)`.
    pub fn raising(space: &FockSpace, mode: usize, rate: f64) -> Result<Self> {
        Self::new(space.lowering(mode)?.adjoint(), rate)
    }

    /// Thermal bath pair `(n_th+1)γ𝓛(a) + n_th γ𝓛(a†)`.
    pub fn thermal(space: &FockSpace, mode: usize, gamma: f64, n_th: f64) -> Result<Vec<Self>> {
        require_non_negative("n_th", n_th)?;
        let mut out = vec![Self::lowering(space, mode, (n_th + 1.0) * gamma)?];
        if n_th > 0.0 {
            out.push(Self::raising(space, mode, n_th * gamma)?);
        }
        Ok(out)
    }
}

/// Sparse Lindblad superoperator in angular units (rad/μs).
#[derive(Debug, Clone)]
pub struct Superoperator {
    space: FockSpace,
    /// `(row, col, value)`, sorted by column then row, no duplicates.
    entries: Vec<(usize, usize, Complex64)>,
    norm_inf: f64,
}

impl Superoperator {
    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    /// Number of rows (`n²` for an `n`-dimensional Hilbert space).
    pub fn dim(&self) -> usize {
        let n = self.space.total_dim();
        n * n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Max absolute row sum.
    pub fn norm(&self) -> f64 {
        self.norm_inf
    }

    pub fn apply_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// `L[ρ]` for a Hilbert-space operator `ρ`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = self.space.total_dim();
        let y = self.apply_vec(rho.as_slice());
        CMatrix::from_column_slice(n, n, &y)
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != Complex64::new(0.0, 0.0) {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Builds `L[ρ] = −i[H,ρ] + Σ_c rate_c 𝓛(A_c)ρ`.
///
/// `H` and all rates are ν-values in MHz; the result is scaled by 2π so the
/// superoperator generates evolution in μs.
pub fn build_liouvillian(space: &FockSpace, h: &CMatrix, channels: &[CollapseChannel]) -> Result<Superoperator> {
    let n = space.total_dim();
    if h.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.nrows(),
        });
    }
    let herm_dev = linalg::max_abs(&(h - h.adjoint()));
    if herm_dev > HERMITIAN_TOL * linalg::max_abs(h).max(1.0) {
        return Err(Error::NotHermitian(herm_dev));
    }

    // L ρ = K ρ + ρ K† + Σ γ A ρ A†  with  K = −iH − ½ Σ γ A†A
    let mut k = h.map(|z| -I * z * TAU);
    let mut jumps = Vec::with_capacity(channels.len());
    for ch in channels {
        if ch.operator.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ch.operator.nrows(),
            });
        }
        require_non_negative("rate", ch.rate)?;
        if ch.rate == 0.0 {
            continue;
        }
        let gamma = TAU * ch.rate;
        k -= (ch.operator.adjoint() * &ch.operator) * linalg::re(0.5 * gamma);
        jumps.push((gamma, nonzeros(&ch.operator)));
    }

    let k_nz = nonzeros(&k);
    let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
    // I ⊗ K
    for a in 0..n {
        for &(b, d, v) in &k_nz {
            entries.push((a * n + b, a * n + d, v));
        }
    }
    // conj(K) ⊗ I
    for &(a, cc, v) in &k_nz {
        for b in 0..n {
            entries.push((a * n + b, cc * n + b, v.conj()));
        }
    }
    // γ conj(A) ⊗ A
    for (gamma, nz) in &jumps {
        for &(a, cc, x) in nz {
            for &(b, d, y) in nz {
                entries.push((a * n + b, cc * n + d, x.conj() * y * *gamma));
            }
        }
    }

    entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
    let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(entries.len());
    for (r, c, v) in entries {
        match merged.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => merged.push((r, c, v)),
        }
    }
    merged.retain(|e| e.2.norm() > 0.0);

    let mut row_sums = vec![0.0; n * n];
    for &(r, _, v) in &merged {
        row_sums[r] += v.norm();
    }
    let norm_inf = row_sums.into_iter().fold(0.0, f64::max);
    Ok(Superoperator {
        space: space.clone(),
        entries: merged,
        norm_inf,
    })
}

/// A validated density matrix on a Fock space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: FockSpace,
    data: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(space: FockSpace, data: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if data.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.nrows(),
            });
        }
        let herm = linalg::max_abs(&(&data - data.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = data.trace();
        if (tr - linalg::re(1.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_eig = SymmetricEigen::new(data.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { space, data })
    }

    /// Thermal state of a single mode truncated to `dim`, renormalized.
    pub fn thermal(dim: usize, n_th: f64) -> Result<Self> {
        require_non_negative("n_th", n_th)?;
        let space = FockSpace::unlabeled(vec![dim])?;
        let ratio = n_th / (1.0 + n_th);
        let w: Vec<f64> = (0..dim).map(|k| ratio.powi(k as i32)).collect();
        let z: f64 = w.iter().sum();
        let data = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            w.iter().map(|p| linalg::re(p / z)),
        ));
        Self::new(space, data)
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }
}

/// Finds the unique fixed point of `L` with unit trace.
pub fn steady_state_density(l: &Superoperator) -> Result<DensityMatrix> {
    let n = l.space.total_dim();
    let d = n * n;
    let norm = l.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateSteadyState("Liouvillian is identically zero".into()));
    }

    if d <= DENSE_CHECK_LIMIT {
        check_spectrum_dense(l)?;
    }

    // Replace the ρ_00 equation (row 0) by the scaled trace condition.
    let scale = norm;
    let mut triplets: Vec<Triplet<usize, usize, Complex64>> = l
        .entries
        .iter()
        .filter(|e| e.0 != 0)
        .map(|&(r, c, v)| Triplet::new(r, c, v))
        .collect();
    for i in 0..n {
        triplets.push(Triplet::new(0, i * (n + 1), linalg::re(scale)));
    }
    let a = SparseColMat::<usize, Complex64>::try_new_from_triplets(d, d, &triplets)
        .map_err(|e| Error::Numerical(format!("sparse assembly: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::DegenerateSteadyState(format!("sparse LU failed: {e:?}")))?;
    let mut rhs = Mat::<Complex64>::zeros(d, 1);
    rhs[(0, 0)] = linalg::re(scale);
    let x = lu.solve(&rhs);
    let v: Vec<Complex64> = (0..d).map(|i| x[(i, 0)]).collect();

    if v.iter().any(|z| !z.is_finite()) {
        return Err(Error::DegenerateSteadyState(
            "kernel solve produced non-finite values".into(),
        ));
    }
    // A unit-trace positive matrix has |ρ_ij| ≤ 1; a blown-up solution means
    // the trace-augmented system was singular, i.e. a multi-dimensional kernel.
    let vmax = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if vmax > 1.0 + 1e-6 {
        return Err(Error::DegenerateSteadyState(format!(
            "kernel solve is ill-conditioned (max |ρ_ij| = {vmax:e})"
        )));
    }
    let resid = l.apply_vec(&v).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if resid > RESIDUAL_TOL * norm {
        return Err(Error::DegenerateSteadyState(format!(
            "residual {resid:e} exceeds {:e}",
            RESIDUAL_TOL * norm
        )));
    }

    let rho = CMatrix::from_column_slice(n, n, &v);
    let mut rho = (&rho + rho.adjoint()) * linalg::re(0.5);
    let tr = rho.trace();
    rho /= tr;
    DensityMatrix::new(l.space.clone(), rho)
}

fn check_spectrum_dense(l: &Superoperator) -> Result<()> {
    let eigs = linalg::eigenvalues(&l.to_dense())?;
    let tol = 1e-8 * l.norm();
    if let Some(worst) = linalg::max_real(&eigs) {
        if worst.re > tol {
            return Err(Error::Unstable {
                eigenvalue: worst / TAU,
                growth: worst.re / TAU,
            });
        }
    }
    let zero_modes = eigs.iter().filter(|z| z.norm() <= tol).count();
    match zero_modes {
        1 => Ok(()),
        0 => Err(Error::DegenerateSteadyState(
            "no eigenvalue within tolerance of zero".into(),
        )),
        k => Err(Error::DegenerateSteadyState(format!("{k}-dimensional kernel"))),
    }
}

/// `Tr(op · ρ)`.
pub fn expectation(rho: &DensityMatrix, op: &CMatrix) -> Result<Complex64> {
    let n = rho.data.nrows();
    if op.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: op.nrows(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * rho.data[(j, i)];
        }
    }
    Ok(acc)
}
