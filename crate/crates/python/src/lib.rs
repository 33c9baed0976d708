//! Python bindings: rule files, decision procedures, the multiplication
//! automata, Wang tiles and the speed experiment.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::rcalab as core;
use core::analysis::{self, Certificate, DecisionResult, Direction};
use core::reduction::{build_fullshift_f, build_sofic_f, speed_dichotomy_experiment};
use core::tiles::{self, TileSet};
use core::{CellularAutomaton, Configuration, SpaceTimeDiagram};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn direction(dir: &str) -> PyResult<Direction> {
    match dir {
        "left" => Ok(Direction::Left),
        "right" => Ok(Direction::Right),
        _ => Err(PyValueError::new_err(format!("direction must be 'left' or 'right', got {dir:?}"))),
    }
}

/// A cellular automaton over a named alphabet.
#[pyclass(name = "Automaton", frozen)]
struct PyAutomaton {
    ca: CellularAutomaton,
}

impl PyAutomaton {
    fn config(&self, text: &str) -> PyResult<Configuration> {
        Configuration::parse(self.ca.alphabet_ref(), text).map_err(err)
    }

    fn verdict(&self, r: DecisionResult) -> (String, Option<String>) {
        let a = self.ca.alphabet_ref();
        let cert = r.certificate.map(|c| match c {
            Certificate::Collision { x, y } => format!("collision x={} y={}", x.format(a), y.format(a)),
            Certificate::Orphan(w) => format!("orphan {}", a.format_word(&w)),
            Certificate::Note(s) => s,
        });
        let v = match r.verdict {
            analysis::Verdict::Yes => "yes".to_string(),
            analysis::Verdict::No => "no".to_string(),
            analysis::Verdict::Undecided(why) => format!("undecided: {why}"),
        };
        (v, cert)
    }
}

#[pymethods]
impl PyAutomaton {
    /// Parses a rule file.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { ca: core::format::parse_rule_file(text).map_err(err)? })
    }

    fn to_text(&self) -> PyResult<String> {
        core::format::write_rule_file(&self.ca).map_err(err)
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.ca.alphabet_ref().names().to_vec()
    }

    #[getter]
    fn memory(&self) -> i64 {
        self.ca.memory()
    }

    #[getter]
    fn anticipation(&self) -> i64 {
        self.ca.anticipation()
    }

    /// Applies the local rule to a window of symbol names.
    fn local(&self, window: Vec<String>) -> PyResult<String> {
        let a = self.ca.alphabet_ref();
        let syms = window
            .iter()
            .map(|s| a.sym(s))
            .collect::<core::Result<Vec<_>>>()
            .map_err(err)?;
        Ok(a.name(self.ca.local(&syms).map_err(err)?).to_string())
    }

    /// Iterates a configuration given as `L|C|R@start`.
    #[pyo3(signature = (config, steps = 1))]
    fn step(&self, config: &str, steps: usize) -> PyResult<String> {
        let y = self.ca.iterate(&self.config(config)?, steps).map_err(err)?;
        Ok(y.format(self.ca.alphabet_ref()))
    }

    fn diagram(&self, config: &str, steps: usize, lo: i64, hi: i64) -> PyResult<String> {
        let d = SpaceTimeDiagram::compute(&self.ca, &self.config(config)?, steps).map_err(err)?;
        Ok(d.render(self.ca.alphabet_ref(), lo, hi))
    }

    /// Returns `(verdict, certificate)`.
    fn is_injective(&self) -> PyResult<(String, Option<String>)> {
        Ok(self.verdict(analysis::is_injective(&self.ca, None).map_err(err)?))
    }

    #[pyo3(signature = (orphan_cap = 12))]
    fn is_surjective(&self, orphan_cap: usize) -> PyResult<(String, Option<String>)> {
        Ok(self.verdict(analysis::is_surjective(&self.ca, orphan_cap).map_err(err)?))
    }

    /// Exact finite-time exponent at one configuration.
    #[pyo3(signature = (config, n, dir = "left"))]
    fn lyapunov(&self, config: &str, n: usize, dir: &str) -> PyResult<u64> {
        analysis::lambda_finite(&self.ca, &self.config(config)?, n, direction(dir)?).map_err(err)
    }

    /// Largest finite-time exponent and a configuration attaining it.
    #[pyo3(signature = (n, dir = "left", cap = analysis::DEFAULT_CAP))]
    fn max_lyapunov(&self, n: usize, dir: &str, cap: u64) -> PyResult<(u64, String)> {
        let (v, x) = analysis::max_lambda_finite(&self.ca, n, direction(dir)?, cap).map_err(err)?;
        Ok((v, x.format(self.ca.alphabet_ref())))
    }

    fn __repr__(&self) -> String {
        format!(
            "Automaton(states={}, memory={}, anticipation={})",
            self.ca.alphabet_ref().len(),
            self.ca.memory(),
            self.ca.anticipation()
        )
    }
}

/// Multiplication by `p` in base `p*q`.
#[pyfunction]
fn mult_automaton(p: u64, n: u64) -> PyResult<PyAutomaton> {
    Ok(PyAutomaton { ca: core::mult::make_mult_ca(p, n).map_err(err)? })
}

/// Average finite-time exponent as `(fraction, value)`.
#[pyfunction]
fn average_exponent(p: u64, q: u64, n: usize) -> PyResult<(String, f64)> {
    let b = core::mult::avg_exponent_closed(p, q, n).map_err(err)?;
    let i = b.i_n;
    Ok((i.to_string(), core::mult::rational_to_f64(&i)))
}

/// Whether the explicit witness pair keeps diverging for `n` steps.
#[pyfunction]
fn witness_diverges(p: u64, q: u64, n: usize) -> PyResult<bool> {
    Ok(core::mult::witness_pair(p, q, n).map_err(err)?.diverges())
}

/// Completes a 2-way deterministic tile set, returned in tile-file form.
#[pyfunction]
fn complete_tiles(text: &str) -> PyResult<String> {
    let ts = TileSet::parse(text).map_err(err)?;
    Ok(tiles::complete(&ts).map_err(err)?.write())
}

#[pyfunction]
fn tiles_automaton(text: &str) -> PyResult<PyAutomaton> {
    let ts = TileSet::parse(text).map_err(err)?;
    Ok(PyAutomaton { ca: tiles::ca_from_tileset(&ts).map_err(err)? })
}

/// Runs the front-speed experiment and returns `(slope, class, positions)`.
#[pyfunction]
#[pyo3(signature = (inner, b, n, target = "sofic"))]
fn speed_experiment(
    inner: &PyAutomaton,
    b: Vec<String>,
    n: usize,
    target: &str,
) -> PyResult<(f64, String, Vec<Option<i64>>)> {
    let a = inner.ca.alphabet_ref();
    let mut marked = vec![false; a.len()];
    for s in &b {
        let i = a.sym(s).map_err(err)?;
        marked[i as usize] = true;
    }
    let bundle = match target {
        "sofic" => build_sofic_f(&inner.ca, &marked),
        "fullshift" => build_fullshift_f(&inner.ca, &marked),
        _ => return Err(PyValueError::new_err("target must be 'sofic' or 'fullshift'")),
    }
    .map_err(err)?;
    let r = speed_dichotomy_experiment(&bundle, n).map_err(err)?;
    Ok((r.slope, r.class.name().to_string(), r.trace.positions))
}

#[pymodule]
fn rcalab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAutomaton>()?;
    m.add_function(wrap_pyfunction!(mult_automaton, m)?)?;
    m.add_function(wrap_pyfunction!(average_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(witness_diverges, m)?)?;
    m.add_function(wrap_pyfunction!(complete_tiles, m)?)?;
    m.add_function(wrap_pyfunction!(tiles_automaton, m)?)?;
    m.add_function(wrap_pyfunction!(speed_experiment, m)?)?;
    Ok(())
}
