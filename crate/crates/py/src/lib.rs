//! Python bindings. Exposes the classification, the closed-form catalog,
//! the frame-level Ricci computation and the integrator to Python, keeping
//! the same parameter strings the command line uses.
//!
//! Usage from Python:
//!
//!     import cohom1_py as m
//!     traj = m.integrate("1,0,0,0,-1,2", 1.0, 1.0, -5.0)
//!     side, t0, bracket = traj.detect_singularity()

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cohom1::catalog::ClosedForm;
use cohom1::dynamics::{self, Component, State};
use cohom1::family::{classify as classify_families, symbolic_ricci, ParamSet};
use cohom1::frame::{ricci_from_jet, JetPoint};
use cohom1::Error as CoreError;

/// Validation problems become ValueError; a numerical outcome that the
/// caller asked about but did not get (no singularity, tail too short)
/// becomes RuntimeError.
fn to_py(err: CoreError) -> PyErr {
    match err {
        CoreError::NotSingular
        | CoreError::TailTooShort { .. }
        | CoreError::InsufficientWindow { .. }
        | CoreError::StepUnderflow(_) => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn parse_params(s: &str) -> PyResult<ParamSet> {
    ParamSet::parse_list(s).map_err(to_py)
}

fn parse_component(name: &str) -> PyResult<Component> {
    match name.to_lowercase().as_str() {
        "a1" => Ok(Component::A1),
        "a2" => Ok(Component::A2),
        other => Err(PyValueError::new_err(format!(
            "component must be \"a1\" or \"a2\", not {other:?}"
        ))),
    }
}

/// One closed-form metric from the catalog.
#[pyclass]
struct Form {
    inner: ClosedForm,
}

#[pymethods]
impl Form {
    /// Args:
    ///     name: taub-nut, eguchi-hanson, fubini-study,
    ///         fubini-study-hyperbolic, case3 or flat-cone.
    ///     param: scale parameter; flat-cone takes none.
    #[new]
    #[pyo3(signature = (name, param=None))]
    fn new(name: &str, param: Option<f64>) -> PyResult<Self> {
        Ok(Form { inner: ClosedForm::from_name(name, param).map_err(to_py)? })
    }

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    /// Open interval of the native coordinate; the upper end may be inf.
    fn domain(&self) -> PyResult<(f64, f64)> {
        self.inner.domain().map_err(to_py)
    }

    fn einstein_constant(&self) -> f64 {
        self.inner.einstein_constant()
    }

    /// The first-order family this form solves, as exact rational strings.
    fn matching_params(&self) -> Vec<String> {
        self.inner.matching_params().as_strings().to_vec()
    }

    /// Full native jet at one coordinate, as a dict.
    fn evaluate<'py>(&self, py: Python<'py>, coord: f64) -> PyResult<Bound<'py, PyDict>> {
        let j = self.inner.evaluate(coord).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("coord", j.coord)?;
        d.set_item("a1", j.a1)?;
        d.set_item("da1", j.da1)?;
        d.set_item("d2a1", j.d2a1)?;
        d.set_item("a2", j.a2)?;
        d.set_item("da2", j.da2)?;
        d.set_item("d2a2", j.d2a2)?;
        d.set_item("dt_ds", j.dt_ds)?;
        d.set_item("d_dt_ds", j.d_dt_ds)?;
        Ok(d)
    }

    /// (A1, A1', A1'', A2, A2', A2'') with primes in arclength t.
    fn arclength_jet(&self, coord: f64) -> PyResult<(f64, f64, f64, f64, f64, f64)> {
        let j = self.inner.arclength_jet(coord).map_err(to_py)?;
        Ok((j.a1(), j.a1p(), j.a1pp(), j.a2(), j.a2p(), j.a2pp()))
    }

    /// First-order residuals (A1' - p(x), A2' - q(x)) against a family.
    fn ode_residual(&self, params: &str, coord: f64) -> PyResult<(f64, f64)> {
        self.inner.ode_residual(&parse_params(params)?, coord).map_err(to_py)
    }

    /// Arclength of the curve between two native coordinates.
    fn arclength_between(&self, s0: f64, s1: f64) -> PyResult<f64> {
        self.inner.arclength_between(s0, s1).map_err(to_py)
    }

    /// Well-conditioned sample coordinates spanning the domain.
    fn sample_coords(&self, n: usize) -> PyResult<Vec<f64>> {
        self.inner.sample_coords(n).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Form({})", self.inner.name())
    }
}

/// One integration run, with dense output and the asymptotic fits.
#[pyclass]
struct Trajectory {
    inner: dynamics::Trajectory,
}

#[pymethods]
impl Trajectory {
    /// reached-t-end, singular, blow-up, step-underflow or step-limit.
    fn termination(&self) -> &'static str {
        self.inner.termination().as_str()
    }

    /// (side, t0_estimate, bracket) of the terminal event, if any.
    fn event(&self) -> Option<(String, f64, (f64, f64))> {
        self.inner.event().map(|e| {
            (e.side.as_str().to_string(), e.t0_estimate, e.bracket)
        })
    }

    /// Accepted steps as (t, A1, A2) triples.
    fn samples(&self) -> Vec<(f64, f64, f64)> {
        self.inner.samples().iter().map(|s| (s.t, s.a1, s.a2)).collect()
    }

    /// Dense-output interpolation; None outside the covered range.
    fn sample_at(&self, t: f64) -> Option<(f64, f64)> {
        self.inner.sample_at(t).map(|s| (s.a1, s.a2))
    }

    fn t_range(&self) -> (f64, f64) {
        self.inner.t_range()
    }

    fn accepted_steps(&self) -> u64 {
        self.inner.accepted_steps()
    }

    fn rejected_steps(&self) -> u64 {
        self.inner.rejected_steps()
    }

    /// (t, ric00, ric11, ric22, scalar) at every accepted step.
    fn ricci(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        self.inner
            .samples()
            .iter()
            .zip(dynamics::ricci_along(&self.inner))
            .map(|(s, r)| (s.t, r.ric00, r.ric11, r.ric22, r.scalar))
            .collect()
    }

    /// (side, t0_estimate, bracket); RuntimeError when the run is regular.
    fn detect_singularity(&self) -> PyResult<(String, f64, (f64, f64))> {
        let e = dynamics::detect_singularity(&self.inner).map_err(to_py)?;
        Ok((e.side.as_str().to_string(), e.t0_estimate, e.bracket))
    }

    /// Power-law fit of one component against |t - t0|.
    ///
    /// Returns:
    ///     (exponent, coefficient, goodness)
    #[pyo3(signature = (component, t0, min_decades=2.0))]
    fn fit_power_law(&self, component: &str, t0: f64, min_decades: f64) -> PyResult<(f64, f64, f64)> {
        let fit = dynamics::fit_power_law(&self.inner, parse_component(component)?, t0, min_decades)
            .map_err(to_py)?;
        Ok((fit.exponent, fit.coefficient, fit.goodness))
    }

    /// Fit of the logarithmic infinity model to the tail.
    ///
    /// Returns:
    ///     (alpha, beta, a1_tail_mean)
    fn fit_infinity(&self) -> PyResult<(f64, f64, f64)> {
        let fit = dynamics::fit_infinity_model(&self.inner).map_err(to_py)?;
        Ok((fit.alpha, fit.beta, fit.a1_tail_mean))
    }

    /// Tail slopes of (A1, A2) and the class they imply: ale, alc or
    /// alc-collapsed.
    fn alc_slope(&self) -> PyResult<(f64, f64, String)> {
        let (s1, s2, class) = dynamics::alc_slope(&self.inner).map_err(to_py)?;
        Ok((s1, s2, class.as_str().to_string()))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.t_range();
        format!(
            "Trajectory(termination={}, samples={}, t_range=({lo}, {hi}))",
            self.inner.termination().as_str(),
            self.inner.samples().len()
        )
    }
}

/// Integrate a family from (A1, A2) at t = 0 toward t_end.
#[pyfunction]
#[pyo3(signature = (params, a1, a2, t_end, tol=1e-10))]
fn integrate(params: &str, a1: f64, a2: f64, t_end: f64, tol: f64) -> PyResult<Trajectory> {
    let ps = parse_params(params)?;
    let init = State::new(0.0, a1, a2).map_err(to_py)?;
    let inner = dynamics::integrate(&ps, init, t_end, tol).map_err(to_py)?;
    Ok(Trajectory { inner })
}

/// Exact classification of the quadratic families, as a JSON string.
#[pyfunction]
fn classify(bound: i64) -> PyResult<String> {
    Ok(classify_families(bound).map_err(to_py)?.to_json().to_string())
}

/// Diagonal Ricci of a second-order jet.
///
/// Returns:
///     (ric00, ric11, ric22, scalar); ric33 equals ric22.
#[pyfunction]
fn ricci(a1: f64, a1p: f64, a1pp: f64, a2: f64, a2p: f64, a2pp: f64) -> PyResult<(f64, f64, f64, f64)> {
    let jet = JetPoint::new(a1, a1p, a1pp, a2, a2p, a2pp).map_err(to_py)?;
    let r = ricci_from_jet(&jet);
    Ok((r.ric00, r.ric11, r.ric22, r.scalar))
}

/// Ricci diagonal on a family's trajectories through (A1, A2), from the
/// reduced rational form rather than the frame computation.
#[pyfunction]
fn family_ricci(params: &str, a1: f64, a2: f64) -> PyResult<(f64, f64, f64)> {
    symbolic_ricci(&parse_params(params)?).eval(a1, a2).map_err(to_py)
}

/// First-order right-hand side (A1', A2') of a family at (A1, A2).
#[pyfunction]
fn family_rhs(params: &str, a1: f64, a2: f64) -> PyResult<(f64, f64)> {
    Ok(parse_params(params)?.rhs(a1, a2))
}

/// Residual of the logarithmic infinity model at time t.
#[pyfunction]
fn model_b_residual(alpha: f64, beta: f64, t: f64) -> f64 {
    dynamics::model_b_residual(alpha, beta, t)
}

/// (C1, C2) of the near-singularity model at time t.
#[pyfunction]
fn model_c_profile(gamma: f64, t0: f64, t: f64) -> (f64, f64) {
    dynamics::model_c_profile(gamma, t0, t)
}

/// The model's defect in the first-order system: exactly -8/25.
#[pyfunction]
fn model_c_residual(gamma: f64, t0: f64, t: f64) -> f64 {
    dynamics::model_c_residual(gamma, t0, t)
}

/// Same defect measured by central differences, as a cross-check.
#[pyfunction]
fn model_c_residual_fd(gamma: f64, t0: f64, t: f64, step: f64) -> f64 {
    dynamics::model_c_residual_fd(gamma, t0, t, step)
}

#[pymodule]
fn cohom1_py(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Form>()?;
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(ricci, m)?)?;
    m.add_function(wrap_pyfunction!(family_ricci, m)?)?;
    m.add_function(wrap_pyfunction!(family_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(model_b_residual, m)?)?;
    m.add_function(wrap_pyfunction!(model_c_profile, m)?)?;
    m.add_function(wrap_pyfunction!(model_c_residual, m)?)?;
    m.add_function(wrap_pyfunction!(model_c_residual_fd, m)?)?;
    Ok(())
}
