//! Python bindings for `boolseq`.
//!
//! Bit strings cross the boundary as `'0'`/`'1'` strings, LSB first.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use boolseq::exec::{self, ExecutionOutcome, InputMode};
use boolseq::gadgets::GadgetKind;
use boolseq::harness::{self, GadgetProbe};
use boolseq::{indexed, lmul, text, BitWord, LmulVariant};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn bits(s: &str) -> PyResult<BitWord> {
    s.parse().map_err(value_err)
}

fn variant(v: u8) -> PyResult<LmulVariant> {
    LmulVariant::from_number(v).ok_or_else(|| value_err(format!("unknown variant {v}")))
}

fn mode(samples: Option<u64>, seed: u64) -> InputMode {
    match samples {
        None => InputMode::Exhaustive,
        Some(cases) => InputMode::Sampled { cases, seed },
    }
}

/// An immutable instruction sequence.
#[pyclass(name = "InstructionSequence", module = "pyboolseq", frozen)]
struct PySequence {
    inner: boolseq::InstructionSequence,
}

#[pymethods]
impl PySequence {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: text::parse(text).map_err(value_err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("InstructionSequence(len={})", self.inner.len())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn concat(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.concat(&other.inner),
        }
    }

    #[getter]
    fn feature_level(&self) -> &'static str {
        self.inner.feature_level().name()
    }

    /// `(max_in, max_out, max_aux)`.
    fn required_registers(&self) -> (u64, u64, u64) {
        let r = self.inner.required_registers();
        (r.max_in, r.max_out, r.max_aux)
    }

    /// Runs the sequence and returns `(outcome, steps, outputs)`, where
    /// `outputs` holds `out:1..out:m`.
    #[pyo3(signature = (inputs, m, budget = 1_000_000))]
    fn run(
        &self,
        py: Python<'_>,
        inputs: &str,
        m: usize,
        budget: u64,
    ) -> PyResult<(String, u64, String)> {
        let inputs = bits(inputs)?;
        let outcome = py
            .detach(|| exec::run(&self.inner, &inputs, budget))
            .map_err(value_err)?;
        let name = match &outcome {
            ExecutionOutcome::Terminated { .. } => "terminated",
            ExecutionOutcome::Inaction { .. } => "inaction",
            ExecutionOutcome::BudgetExceeded { .. } => "budget-exceeded",
        };
        Ok((
            name.to_string(),
            outcome.steps(),
            outcome.registers().outputs(m).to_string(),
        ))
    }

    /// Decides halting on `inputs`; returns `(halts, steps_or_none, bound)`.
    #[pyo3(signature = (inputs = ""))]
    fn decide_halts(&self, inputs: &str) -> PyResult<(bool, Option<u64>, u64)> {
        let r = exec::decide_halts(&self.inner, &bits(inputs)?).map_err(value_err)?;
        let steps = match r.verdict {
            exec::HaltVerdict::Halts { steps } => Some(steps),
            exec::HaltVerdict::NeverHalts(_) => None,
        };
        Ok((r.halts(), steps, r.bound))
    }
}

/// Generates the multiplication sequence `variant` (1 to 4) for width `n`.
#[pyfunction]
fn gen_lmul(variant_number: u8, n: u64) -> PyResult<PySequence> {
    let inner = variant(variant_number)?.generate(n).map_err(value_err)?;
    Ok(PySequence { inner })
}

/// The gadget probe program used by the verifier.
#[pyfunction]
#[pyo3(signature = (kind, n, m = None, in_place = false, value = None))]
fn gen_gadget_probe(
    kind: &str,
    n: u64,
    m: Option<u64>,
    in_place: bool,
    value: Option<&str>,
) -> PyResult<PySequence> {
    let kind =
        GadgetKind::from_name(kind).ok_or_else(|| value_err(format!("unknown gadget {kind}")))?;
    let mut probe = GadgetProbe::new(kind, n).in_place(in_place);
    probe.amount = m;
    let input = match value {
        Some(v) => bits(v)?,
        None => BitWord::repeat(false, probe.input_bits()),
    };
    Ok(PySequence {
        inner: probe.program(&input).map_err(value_err)?,
    })
}

#[pyfunction]
fn lmul_length(variant_number: u8, n: u64) -> PyResult<u64> {
    lmul::LengthTable::new()
        .len(variant(variant_number)?, n)
        .map_err(value_err)
}

/// `(a, b, c)` with `len(LMUL4 n) = a*floor(log2 n) + b*floor(log2(2n-1)) + c`.
#[pyfunction]
fn lmul4_constants() -> PyResult<(i64, i64, i64)> {
    let k = indexed::lmul4_length_constants().map_err(value_err)?;
    Ok((k.a, k.b, k.c))
}

/// Multiplies two equal-width bit strings with the given variant.
#[pyfunction]
fn multiply(py: Python<'_>, variant_number: u8, a: &str, b: &str) -> PyResult<String> {
    let (v, a, b) = (variant(variant_number)?, bits(a)?, bits(b)?);
    py.detach(|| lmul::multiply(v, &a, &b))
        .map(|p| p.to_string())
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Compares two sequences; returns `None` if equivalent, else the witness
/// `(input, left, right)`.
#[pyfunction]
#[pyo3(signature = (x, y, n, m, budget = 1_000_000, samples = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn io_equivalent(
    py: Python<'_>,
    x: &PySequence,
    y: &PySequence,
    n: usize,
    m: usize,
    budget: u64,
    samples: Option<u64>,
    seed: u64,
) -> PyResult<Option<(String, String, String)>> {
    let r = py
        .detach(|| exec::io_equivalent(&x.inner, &y.inner, n, m, budget, mode(samples, seed)))
        .map_err(value_err)?;
    Ok(match r {
        exec::Equivalence::Equivalent { .. } => None,
        exec::Equivalence::Witness { input, left, right } => {
            Some((input.to_string(), left.to_string(), right.to_string()))
        }
    })
}

/// Verifies a multiplication variant against native multiplication; returns
/// `(cases, counterexample_input_or_none)`.
#[pyfunction]
#[pyo3(signature = (variant_number, n, samples = None, seed = 0, jobs = 0))]
fn verify_lmul(
    py: Python<'_>,
    variant_number: u8,
    n: u64,
    samples: Option<u64>,
    seed: u64,
    jobs: usize,
) -> PyResult<(u64, Option<String>)> {
    let v = variant(variant_number)?;
    let r = py
        .detach(|| harness::verify_lmul(v, n, mode(samples, seed), jobs))
        .map_err(value_err)?;
    Ok((r.cases, r.counterexample.map(|c| c.input.to_string())))
}

#[pymodule]
fn pyboolseq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySequence>()?;
    m.add_function(wrap_pyfunction!(gen_lmul, m)?)?;
    m.add_function(wrap_pyfunction!(gen_gadget_probe, m)?)?;
    m.add_function(wrap_pyfunction!(lmul_length, m)?)?;
    m.add_function(wrap_pyfunction!(lmul4_constants, m)?)?;
    m.add_function(wrap_pyfunction!(multiply, m)?)?;
    m.add_function(wrap_pyfunction!(io_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lmul, m)?)?;
    Ok(())
}
