//! Python bindings: parameter classes for the three devices plus the
//! azimuthal selection rule. Rates are ν = ω/2π in MHz.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use optomech::modes::{self, InteractionCategory, Ladder};
use optomech::nonreciprocity as nr;
use optomech::pairgen::{self as pg, Engine, SweepAxis};
use optomech::phonon_pt::{self as pt, PtRegime};

create_exception!(pyoptomech, ValidationError, PyValueError);
create_exception!(pyoptomech, SolverError, PyRuntimeError);

fn to_py(e: optomech::Error) -> PyErr {
    use optomech::Error as E;
    match e {
        _ if e.is_instability() => SolverError::new_err(e.to_string()),
        E::NotConverged(_) | E::CrossCheck(_) | E::Numerical(_) | E::WitnessBound(_) => {
            SolverError::new_err(e.to_string())
        }
        _ => ValidationError::new_err(e.to_string()),
    }
}

fn engine(name: &str) -> PyResult<Engine> {
    name.parse().map_err(to_py)
}

fn axis(name: &str) -> PyResult<SweepAxis> {
    match name {
        "delta_k" => Ok(SweepAxis::DeltaK),
        "g_k" => Ok(SweepAxis::GK),
        "n_th" => Ok(SweepAxis::NTh),
        other => Err(ValidationError::new_err(format!(
            "unknown sweep axis `{other}` (delta_k|g_k|n_th)"
        ))),
    }
}

fn regime_name(r: PtRegime) -> &'static str {
    match r {
        PtRegime::Unbroken => "unbroken",
        PtRegime::Exceptional => "exceptional",
        PtRegime::Broken => "broken",
    }
}

/// Pair generation in a CW/CCW cavity pair coupled through one phonon.
#[pyclass(name = "PairgenParams", from_py_object)]
#[derive(Clone)]
pub struct PyPairgenParams {
    #[pyo3(get, set)]
    kappa: f64,
    #[pyo3(get, set)]
    kappa_in: f64,
    #[pyo3(get, set)]
    gamma_m: f64,
    #[pyo3(get, set)]
    n_th: f64,
    #[pyo3(get, set)]
    g_k: f64,
    #[pyo3(get, set)]
    g_mk: f64,
    #[pyo3(get, set)]
    eps_s: f64,
    #[pyo3(get, set)]
    delta_k: f64,
}

impl PyPairgenParams {
    fn core(&self) -> pg::PairgenParams {
        pg::PairgenParams {
            kappa: self.kappa,
            kappa_in: self.kappa_in,
            gamma_m: self.gamma_m,
            n_th: self.n_th,
            g_k: self.g_k,
            g_mk: self.g_mk,
            eps_s: self.eps_s,
            delta_k: self.delta_k,
        }
    }
}

#[pymethods]
impl PyPairgenParams {
    #[new]
    #[pyo3(signature = (kappa=15.0, kappa_in=7.5, gamma_m=0.022, n_th=0.0, g_k=0.3, g_mk=0.1, eps_s=0.1, delta_k=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(kappa: f64, kappa_in: f64, gamma_m: f64, n_th: f64, g_k: f64, g_mk: f64, eps_s: f64, delta_k: f64) -> Self {
        Self {
            kappa,
            kappa_in,
            gamma_m,
            n_th,
            g_k,
            g_mk,
            eps_s,
            delta_k,
        }
    }

    fn validate(&self) -> PyResult<()> {
        self.core().validate().map_err(to_py)
    }

    /// Witness `I = ⟨:ΔN_k ΔN_{−k}:⟩ / √(⟨:ΔN_k²:⟩⟨:ΔN_{−k}²:⟩)`.
    #[pyo3(signature = (engine="gaussian"))]
    fn nonclassicality(&self, py: Python<'_>, engine: &str) -> PyResult<f64> {
        let (p, e) = (self.core(), self::engine(engine)?);
        py.detach(|| pg::evaluate_i(&p, e)).map_err(to_py)
    }

    /// `I` over a grid; failed points are `None`.
    #[pyo3(signature = (axis, grid, engine="gaussian"))]
    fn sweep(&self, py: Python<'_>, axis: &str, grid: Vec<f64>, engine: &str) -> PyResult<Vec<Option<f64>>> {
        let (p, a, e) = (self.core(), self::axis(axis)?, self::engine(engine)?);
        let points = py.detach(|| pg::sweep_nonclassicality(&p, a, &grid, e));
        Ok(points.into_iter().map(|pt| pt.result.ok()).collect())
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.core())
    }
}

/// Optical-phonon-optical conversion through two phonon paths.
#[pyclass(name = "ConversionParams", from_py_object)]
#[derive(Clone)]
pub struct PyConversionParams {
    #[pyo3(get, set)]
    kappa: f64,
    #[pyo3(get, set)]
    gamma_m1: f64,
    #[pyo3(get, set)]
    gamma_m2: f64,
    #[pyo3(get, set)]
    c_k1: f64,
    #[pyo3(get, set)]
    c_mk1: f64,
    #[pyo3(get, set)]
    c_k2: f64,
    #[pyo3(get, set)]
    c_mk2: f64,
    #[pyo3(get, set)]
    theta: f64,
    #[pyo3(get, set)]
    kappa_in: Option<f64>,
}

impl PyConversionParams {
    fn core(&self) -> nr::ConversionParams {
        nr::ConversionParams {
            kappa: self.kappa,
            gamma_m1: self.gamma_m1,
            gamma_m2: self.gamma_m2,
            c_k1: self.c_k1,
            c_mk1: self.c_mk1,
            c_k2: self.c_k2,
            c_mk2: self.c_mk2,
            theta: self.theta,
            kappa_in: self.kappa_in,
        }
    }
}

#[pymethods]
impl PyConversionParams {
    #[new]
    #[pyo3(signature = (kappa=15.0, gamma_m1=22e-3, gamma_m2=22e-4, c_k1=1.0, c_mk1=1.0, c_k2=2.5, c_mk2=2.5, theta=0.0, kappa_in=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        kappa: f64,
        gamma_m1: f64,
        gamma_m2: f64,
        c_k1: f64,
        c_mk1: f64,
        c_k2: f64,
        c_mk2: f64,
        theta: f64,
        kappa_in: Option<f64>,
    ) -> Self {
        Self {
            kappa,
            gamma_m1,
            gamma_m2,
            c_k1,
            c_mk1,
            c_k2,
            c_mk2,
            theta,
            kappa_in,
        }
    }

    fn validate(&self) -> PyResult<()> {
        self.core().validate().map_err(to_py)
    }

    /// `(|R_{k,−k}|², |R_{−k,k}|²)` at probe offset `omega`.
    fn efficiencies(&self, omega: f64) -> PyResult<(f64, f64)> {
        nr::conversion_efficiencies(&self.core(), omega).map_err(to_py)
    }

    /// Forward over backward efficiency; `inf` when backward vanishes.
    fn eta(&self, omega: f64) -> PyResult<f64> {
        Ok(nr::nonreciprocity_ratio(&self.core(), omega).map_err(to_py)?.eta)
    }

    /// Full 4×4 scattering matrix, rows are outputs.
    fn scattering(&self, omega: f64) -> PyResult<Vec<Vec<Complex64>>> {
        let s = nr::conversion_scattering(&self.core(), omega).map_err(to_py)?;
        let m = &s.r;
        Ok((0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.core())
    }
}

/// Two cavities and two phonons with one lossy and one amplifying path.
#[pyclass(name = "PTParams", from_py_object)]
#[derive(Clone)]
pub struct PyPTParams {
    #[pyo3(get, set)]
    omega_ml: f64,
    #[pyo3(get, set)]
    gamma_m: f64,
    #[pyo3(get, set)]
    g_l: f64,
    #[pyo3(get, set)]
    g_ml: f64,
    #[pyo3(get, set)]
    j: f64,
    #[pyo3(get, set)]
    kappa1: f64,
    #[pyo3(get, set)]
    kappa2: f64,
    #[pyo3(get, set)]
    kappa_in: Option<f64>,
}

impl PyPTParams {
    fn core(&self) -> pt::PTParams {
        pt::PTParams {
            omega_ml: self.omega_ml,
            gamma_m: self.gamma_m,
            g_l: self.g_l,
            g_ml: self.g_ml,
            j: self.j,
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            kappa_in: self.kappa_in,
        }
    }
}

#[pymethods]
impl PyPTParams {
    #[new]
    #[pyo3(signature = (omega_ml=42.3, gamma_m=0.004, g_l=0.14, g_ml=0.14, j=0.016, kappa1=3.5, kappa2=3.5, kappa_in=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        omega_ml: f64,
        gamma_m: f64,
        g_l: f64,
        g_ml: f64,
        j: f64,
        kappa1: f64,
        kappa2: f64,
        kappa_in: Option<f64>,
    ) -> Self {
        Self {
            omega_ml,
            gamma_m,
            g_l,
            g_ml,
            j,
            kappa1,
            kappa2,
            kappa_in,
        }
    }

    fn validate(&self) -> PyResult<()> {
        self.core().validate().map_err(to_py)
    }

    /// Effective rates, supermode frequencies and the PT threshold.
    fn threshold<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = self.core();
        let r = pt::adiabatic_effective_rates(&p).map_err(to_py)?;
        let s = pt::supermode_eigenfrequencies(&r, p.gamma_m, p.j);
        let t = pt::pt_threshold(&r, p.gamma_m);
        let d = PyDict::new(py);
        d.set_item("gamma_l", r.gamma_l)?;
        d.set_item("gamma_ml", r.gamma_ml)?;
        d.set_item("j_pt", t.j_pt)?;
        d.set_item("ideal", t.ideal)?;
        d.set_item("omega_plus", s.omega_plus)?;
        d.set_item("omega_minus", s.omega_minus)?;
        d.set_item("regime", regime_name(s.regime))?;
        Ok(d)
    }

    /// `G_l` that balances gain and loss, if one exists.
    fn balanced_g_l(&self) -> Option<f64> {
        pt::balanced_g_l(&self.core())
    }

    /// Steady-state probe response `(a_k, a_{−j}†, b_l, b_{−l})` at detuning `delta`.
    #[pyo3(signature = (delta, eps_p=0.1))]
    fn steady_fields(&self, delta: f64, eps_p: f64) -> PyResult<[Complex64; 4]> {
        Ok(pt::pt_steady_fields(&self.core(), delta, eps_p)
            .map_err(to_py)?
            .as_array())
    }

    /// Intensities over a detuning grid, widened if it misses a supermode.
    #[pyo3(signature = (grid, eps_p=0.1))]
    fn spectrum<'py>(&self, py: Python<'py>, grid: Vec<f64>, eps_p: f64) -> PyResult<Bound<'py, PyDict>> {
        let s = pt::pt_spectrum(&self.core(), &grid, eps_p).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("peaks_a_mj", s.peaks_a_mj())?;
        d.set_item("peaks_a_k", s.peaks_a_k())?;
        d.set_item("delta", s.delta)?;
        d.set_item("a_k", s.a_k)?;
        d.set_item("a_mj", s.a_mj)?;
        d.set_item("b_l", s.b_l)?;
        d.set_item("b_ml", s.b_ml)?;
        d.set_item("extended", s.extended)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.core())
    }
}

/// Classify `o_a o_b m` given `(m, dagger)` pairs for each operator.
#[pyfunction]
fn classify_term(a: (i32, bool), b: (i32, bool), mech: (i32, bool)) -> &'static str {
    let l = |(m, dagger): (i32, bool)| Ladder { m, dagger };
    let term = modes::InteractionTerm::new(l(a), l(b), l(mech), None);
    match term.category {
        InteractionCategory::Dispersive => "dispersive",
        InteractionCategory::TripleResonant => "triple_resonant",
        InteractionCategory::Forbidden => "forbidden",
    }
}

#[pymodule]
fn pyoptomech(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPairgenParams>()?;
    m.add_class::<PyConversionParams>()?;
    m.add_class::<PyPTParams>()?;
    m.add_function(wrap_pyfunction!(classify_term, m)?)?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add("UNITS", "all rates are ν = ω/2π in MHz")?;
    Ok(())
}
