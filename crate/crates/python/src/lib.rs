//! Python module `bellmean`. The shared library is built as
//! `libbellmean_py` and must be installed as `bellmean.<ext>`.

use ::bellmean as core;
use ::bellmean::chsh::ChshConfig;
use ::bellmean::{CompositeModel, Frame, Level, Sign, UnitAxis};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Axis", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyAxis(UnitAxis);

#[pymethods]
impl PyAxis {
    #[new]
    fn new(x: f64, y: f64, z: f64) -> PyResult<Self> {
        UnitAxis::new(x, y, z).map(PyAxis).map_err(value_error)
    }

    #[staticmethod]
    fn from_angles(theta: f64, phi: f64) -> PyResult<Self> {
        core::make_axis(theta, phi).map(PyAxis).map_err(value_error)
    }

    #[getter]
    fn x(&self) -> f64 {
        self.0.x()
    }

    #[getter]
    fn y(&self) -> f64 {
        self.0.y()
    }

    #[getter]
    fn z(&self) -> f64 {
        self.0.z()
    }

    #[pyo3(name = "to_list")]
    fn as_list(&self) -> [f64; 3] {
        self.0.to_array()
    }

    fn angle_to(&self, other: &PyAxis) -> f64 {
        core::angle_between(&self.0, &other.0)
    }

    fn __repr__(&self) -> String {
        format!("Axis({}, {}, {})", self.0.x(), self.0.y(), self.0.z())
    }
}

fn sign(label: i64) -> PyResult<Sign> {
    Sign::try_from(label).map_err(value_error)
}

#[pyclass(name = "ElementaryState", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyElementaryState(core::ElementaryState);

#[pymethods]
impl PyElementaryState {
    #[new]
    #[pyo3(signature = (axis, sign_label=1, a=1.0))]
    fn new(axis: PyAxis, sign_label: i64, a: f64) -> PyResult<Self> {
        core::ElementaryState::new(axis.0, sign(sign_label)?, a)
            .map(Self)
            .map_err(value_error)
    }

    #[getter]
    fn axis(&self) -> PyAxis {
        PyAxis(self.0.axis())
    }

    #[getter]
    fn sign(&self) -> i64 {
        self.0.sign().value() as i64
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }
}

#[pyclass(name = "CompositeState", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyCompositeState(core::CompositeState);

#[pymethods]
impl PyCompositeState {
    #[new]
    #[pyo3(signature = (axis, level, a=1.0))]
    fn new(axis: PyAxis, level: i64, a: f64) -> PyResult<Self> {
        let level = Level::try_from(level).map_err(value_error)?;
        core::CompositeState::new(axis.0, level, a)
            .map(Self)
            .map_err(value_error)
    }

    #[getter]
    fn axis(&self) -> PyAxis {
        PyAxis(self.0.axis())
    }

    #[getter]
    fn level(&self) -> i64 {
        self.0.level().label()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }
}

fn frame(axes: Option<(PyAxis, PyAxis, PyAxis)>) -> PyResult<Frame> {
    match axes {
        None => Ok(Frame::CANONICAL),
        Some((e1, e2, e3)) => Frame::new(e1.0, e2.0, e3.0).map_err(value_error),
    }
}

fn composite_model(name: &str) -> PyResult<CompositeModel> {
    name.parse().map_err(value_error)
}

#[pyfunction]
fn make_axis(theta: f64, phi: f64) -> PyResult<PyAxis> {
    PyAxis::from_angles(theta, phi)
}

#[pyfunction]
fn complete_frame(e3: PyAxis) -> (PyAxis, PyAxis, PyAxis) {
    let f = core::complete_frame(&e3.0);
    (PyAxis(f.e1), PyAxis(f.e2), PyAxis(f.e3))
}

/// `(p_plus, p_minus)`.
#[pyfunction]
fn transition_probability(state: PyElementaryState, axis: PyAxis) -> (f64, f64) {
    let d = core::transition_probability(&state.0, &axis.0);
    (d.p_plus, d.p_minus)
}

#[pyfunction]
fn expectation(state: PyElementaryState, axis: PyAxis) -> f64 {
    core::expectation(&state.0, &axis.0)
}

#[pyfunction]
fn second_moment(state: PyElementaryState, axis: PyAxis) -> f64 {
    core::second_moment(&state.0, &axis.0)
}

#[pyfunction]
#[pyo3(signature = (state, frame_axes=None))]
fn j_squared(
    state: PyElementaryState,
    frame_axes: Option<(PyAxis, PyAxis, PyAxis)>,
) -> PyResult<f64> {
    Ok(core::j_squared(&state.0, &frame(frame_axes)?))
}

/// One measurement with a generator seeded from `seed`.
#[pyfunction]
fn measure(state: PyElementaryState, axis: PyAxis, seed: u64) -> (f64, PyElementaryState) {
    let mut rng = core::sampling::rng_from_seed(seed);
    let (outcome, post) = core::measure(&state.0, &axis.0, &mut rng);
    (outcome, PyElementaryState(post))
}

#[pyfunction]
fn stokes_experiment<'py>(
    py: Python<'py>,
    prep: PyAxis,
    meas: PyAxis,
    n_events: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let rec = core::stokes_experiment(&prep.0, &meas.0, n_events, seed).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("seed", rec.seed)?;
    d.set_item("n_events", rec.n_events())?;
    d.set_item("plus", rec.n_plus)?;
    d.set_item("minus", rec.n_minus)?;
    d.set_item("estimate", rec.estimate)?;
    d.set_item("stderr", rec.stderr)?;
    Ok(d)
}

fn table_dict<'py>(py: Python<'py>, t: core::TernaryDistribution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for level in Level::ALL {
        d.set_item(level.label(), t.get(level))?;
    }
    Ok(d)
}

/// `{2: p, 0: p, -2: p}` for the given model.
#[pyfunction]
#[pyo3(signature = (state, axis, model="principled"))]
fn transition_table<'py>(
    py: Python<'py>,
    state: PyCompositeState,
    axis: PyAxis,
    model: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let t = match composite_model(model)? {
        CompositeModel::Principled => core::transition_table(&state.0, &axis.0),
        CompositeModel::Mixture => {
            core::mixture_transition_table(&state.0, &axis.0).map_err(value_error)?
        }
    };
    table_dict(py, t)
}

#[pyfunction]
fn tensor_for_state(state: PyCompositeState) -> [[f64; 3]; 3] {
    let t = core::tensor_for_state(&state.0);
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| t.get(i, j)))
}

#[pyfunction]
fn rotated_m33(state: PyCompositeState, theta: f64) -> PyResult<f64> {
    core::rotated_m33(&state.0, theta).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (state, model="principled", frame_axes=None))]
fn j_squared_composite(
    state: PyCompositeState,
    model: &str,
    frame_axes: Option<(PyAxis, PyAxis, PyAxis)>,
) -> PyResult<f64> {
    core::j_squared_composite(&state.0, &frame(frame_axes)?, composite_model(model)?)
        .map_err(value_error)
}

#[pyfunction]
fn singlet_statistics(axis: PyAxis) -> (f64, f64) {
    core::singlet_statistics(&axis.0)
}

#[pyfunction]
fn quantum_correlator(n: PyAxis, m: PyAxis) -> f64 {
    core::quantum_correlator(&n.0, &m.0)
}

#[pyfunction]
fn lhv_sign_correlator(n: PyAxis, m: PyAxis) -> f64 {
    core::lhv_sign_correlator(&n.0, &m.0)
}

fn chsh_model(name: &str) -> PyResult<core::CorrelatorModel> {
    match name {
        "quantum" => Ok(core::CorrelatorModel::QuantumSinglet),
        "lhv-sign" => Ok(core::CorrelatorModel::LhvSign),
        other => Err(PyValueError::new_err(format!(
            "unknown correlator model `{other}`"
        ))),
    }
}

fn chsh_config(axes: Option<(PyAxis, PyAxis, PyAxis, PyAxis)>) -> ChshConfig {
    match axes {
        None => ChshConfig::canonical(),
        Some((n, n_prime, m, m_prime)) => ChshConfig {
            n: n.0,
            n_prime: n_prime.0,
            m: m.0,
            m_prime: m_prime.0,
        },
    }
}

/// CHSH value; `axes` is `(n, n', m, m')`, canonical if omitted.
#[pyfunction]
#[pyo3(signature = (model="quantum", axes=None))]
fn chsh_value<'py>(
    py: Python<'py>,
    model: &str,
    axes: Option<(PyAxis, PyAxis, PyAxis, PyAxis)>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = core::chsh_value(&chsh_config(axes), &chsh_model(model)?);
    let d = PyDict::new(py);
    d.set_item("b_value", r.b_value)?;
    d.set_item("violates", r.violates)?;
    d.set_item("correlations", r.correlations)?;
    Ok(d)
}

type StrategyRow = (i8, i8, i8, i8, f64);

/// `(max_abs_b, [(v1n, v1np, v2m, v2mp, b), ...])`.
#[pyfunction]
fn lhv_deterministic_scan() -> (f64, Vec<StrategyRow>) {
    let scan = core::lhv_deterministic_scan();
    let rows = scan
        .rows
        .iter()
        .map(|(s, b)| {
            let [a, b2, c, d] = s.values();
            (a, b2, c, d, *b)
        })
        .collect();
    (scan.max_abs_b, rows)
}

#[pyfunction]
#[pyo3(signature = (trials_per_pair, seed, model="quantum", axes=None))]
fn monte_carlo_chsh<'py>(
    py: Python<'py>,
    trials_per_pair: u64,
    seed: u64,
    model: &str,
    axes: Option<(PyAxis, PyAxis, PyAxis, PyAxis)>,
) -> PyResult<Bound<'py, PyDict>> {
    let config = chsh_config(axes);
    let model = chsh_model(model)?;
    let mc = py
        .detach(|| core::monte_carlo_chsh(&config, &model, trials_per_pair, seed))
        .map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("estimate", mc.estimate)?;
    d.set_item("stderr", mc.stderr)?;
    d.set_item("correlations", mc.correlations)?;
    d.set_item("b_value", mc.analytic.b_value)?;
    d.set_item("violates", mc.analytic.violates)?;
    d.set_item("seed", mc.seed)?;
    Ok(d)
}

#[pyfunction]
fn spin_half_probability(
    prep_axis: PyAxis,
    prep_sign: i64,
    meas_axis: PyAxis,
    meas_sign: i64,
) -> PyResult<f64> {
    Ok(core::oracle::spin_half_probability(
        &prep_axis.0,
        sign(prep_sign)?,
        &meas_axis.0,
        sign(meas_sign)?,
    ))
}

#[pyfunction]
fn spin_one_probability(prep_level: i64, meas_level: i64, theta: f64) -> PyResult<f64> {
    core::oracle::spin_one_probability(prep_level, meas_level, theta).map_err(value_error)
}

#[pyfunction]
fn singlet_projection_check(axis: PyAxis) -> f64 {
    core::oracle::singlet_projection_check(&axis.0)
}

/// `(passed, [(check, max_deviation, passed), ...])`.
#[pyfunction]
#[pyo3(signature = (tolerance=core::verify::DEFAULT_TOLERANCE))]
fn verify(py: Python<'_>, tolerance: f64) -> (bool, Vec<(String, f64, bool)>) {
    let report = py.detach(|| core::verify::run(tolerance));
    let checks = report
        .checks
        .iter()
        .map(|c| (c.name.to_string(), c.max_deviation, c.passed))
        .collect();
    (report.passed, checks)
}

#[pymodule]
#[pyo3(name = "bellmean")]
fn bellmean_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAxis>()?;
    m.add_class::<PyElementaryState>()?;
    m.add_class::<PyCompositeState>()?;
    m.add_function(wrap_pyfunction!(make_axis, m)?)?;
    m.add_function(wrap_pyfunction!(complete_frame, m)?)?;
    m.add_function(wrap_pyfunction!(transition_probability, m)?)?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(second_moment, m)?)?;
    m.add_function(wrap_pyfunction!(j_squared, m)?)?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    m.add_function(wrap_pyfunction!(stokes_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(transition_table, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_for_state, m)?)?;
    m.add_function(wrap_pyfunction!(rotated_m33, m)?)?;
    m.add_function(wrap_pyfunction!(j_squared_composite, m)?)?;
    m.add_function(wrap_pyfunction!(singlet_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_correlator, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_sign_correlator, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_value, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_deterministic_scan, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_chsh, m)?)?;
    m.add_function(wrap_pyfunction!(spin_half_probability, m)?)?;
    m.add_function(wrap_pyfunction!(spin_one_probability, m)?)?;
    m.add_function(wrap_pyfunction!(singlet_projection_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
