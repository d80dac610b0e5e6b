//! Python bindings: load a knowledge base, rank its consequences anytime
//! or exactly, and inspect the grounding.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tcpel::classes::ClassEnumerator;
use tcpel::el::InconsistencyPolicy;
use tcpel::io::{load_kb, report, serialize_kb, KbDocument};
use tcpel::mln::{GroundMln, MlnError, World, DEFAULT_GROUNDING_CAP};
use tcpel::oracle::{exact_rank_ground, ExactRanking, DEFAULT_ORACLE_CAP};
use tcpel::rank::{RankConfig, Ranker, RankingResult, StopCondition};

fn policy(name: &str) -> PyResult<InconsistencyPolicy> {
    name.parse().map_err(PyValueError::new_err)
}

fn grounding_error(e: MlnError) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn world(g: &GroundMln, truths: Vec<bool>) -> PyResult<World> {
    if truths.len() != g.n() {
        return Err(PyValueError::new_err(format!(
            "world has {} values, expected {}",
            truths.len(),
            g.n()
        )));
    }
    Ok(World(truths))
}

/// A parsed, validated and grounded knowledge base.
#[pyclass(module = "tcpel")]
pub struct KnowledgeBase {
    doc: KbDocument,
    ground: GroundMln,
}

#[pymethods]
impl KnowledgeBase {
    /// Parses `.tcpkb` text. Raises `ValueError` listing every located problem.
    #[staticmethod]
    #[pyo3(signature = (text, grounding_cap = DEFAULT_GROUNDING_CAP))]
    fn from_text(text: &str, grounding_cap: u128) -> PyResult<Self> {
        let doc = load_kb(text).map_err(|ds| {
            PyValueError::new_err(
                ds.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("\n"),
            )
        })?;
        let ground = GroundMln::from_kb(&doc.kb, grounding_cap).map_err(grounding_error)?;
        Ok(Self { doc, ground })
    }

    #[staticmethod]
    #[pyo3(signature = (path, grounding_cap = DEFAULT_GROUNDING_CAP))]
    fn from_file(path: std::path::PathBuf, grounding_cap: u128) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| PyValueError::new_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text, grounding_cap)
    }

    #[getter]
    fn n_atoms(&self) -> usize {
        self.ground.n()
    }

    #[getter]
    fn n_formulas(&self) -> usize {
        self.ground.formulas().len()
    }

    #[getter]
    fn n_axioms(&self) -> usize {
        self.doc.kb.axioms.len()
    }

    /// Ground MLN atoms in world-bit order.
    fn ground_atoms(&self) -> Vec<String> {
        self.ground
            .atoms()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    /// `(weight, [atoms])` for every ground formula.
    fn ground_formulas(&self) -> Vec<(f64, Vec<String>)> {
        self.ground
            .formulas()
            .iter()
            .map(|f| {
                (
                    f.weight,
                    f.atoms
                        .iter()
                        .map(|&a| self.ground.atom(a).to_string())
                        .collect(),
                )
            })
            .collect()
    }

    /// Unnormalized log score of a world given as one bool per ground atom.
    fn world_log_score(&self, truths: Vec<bool>) -> PyResult<f64> {
        let w = world(&self.ground, truths)?;
        self.ground.world_log_score(&w).map_err(grounding_error)
    }

    /// `(sign, log ratio)` of the probabilities of two worlds.
    fn compare_worlds(&self, first: Vec<bool>, second: Vec<bool>) -> PyResult<(i8, f64)> {
        let (a, b) = (world(&self.ground, first)?, world(&self.ground, second)?);
        let (ord, ratio) = self
            .ground
            .compare_worlds(&a, &b)
            .map_err(grounding_error)?;
        Ok((ord as i8, ratio))
    }

    /// The first `limit` classes, best first, as `(mask, log_score, is_empty)`.
    #[pyo3(signature = (limit = 16))]
    fn classes(&self, limit: usize) -> Vec<(String, f64, bool)> {
        ClassEnumerator::new(&self.ground)
            .take(limit)
            .map(|c| (c.mask_string(), c.log_score, c.is_empty()))
            .collect()
    }

    /// Anytime ranking; with no limits it runs to completion.
    #[pyo3(signature = (
        max_classes = None,
        max_worlds = None,
        max_seconds = None,
        target_bound = None,
        inconsistency = "explode",
        tight_bound = false,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn rank(
        &self,
        py: Python<'_>,
        max_classes: Option<u128>,
        max_worlds: Option<u128>,
        max_seconds: Option<f64>,
        target_bound: Option<f64>,
        inconsistency: &str,
        tight_bound: bool,
    ) -> PyResult<Ranking> {
        let stop = StopCondition {
            max_classes,
            max_worlds,
            max_seconds,
            target_bound,
        };
        let config = RankConfig {
            policy: policy(inconsistency)?,
            tight_bound,
            grounding_cap: DEFAULT_GROUNDING_CAP,
        };
        let result =
            py.detach(|| Ranker::new(&self.doc.kb, &self.ground, config.clone()).run(&stop));
        Ok(Ranking {
            result,
            stop,
            config,
        })
    }

    /// Exact probabilities by enumerating every world.
    #[pyo3(signature = (cap = DEFAULT_ORACLE_CAP, inconsistency = "explode"))]
    fn exact(&self, py: Python<'_>, cap: usize, inconsistency: &str) -> PyResult<Exact> {
        let policy = policy(inconsistency)?;
        let result = py
            .detach(|| exact_rank_ground(&self.doc.kb, &self.ground, policy, cap))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(Exact { result })
    }

    /// The knowledge base in `.tcpkb` syntax.
    fn to_text(&self) -> PyResult<String> {
        serialize_kb(&self.doc.kb).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "KnowledgeBase(axioms={}, atoms={}, formulas={})",
            self.doc.kb.axioms.len(),
            self.ground.n(),
            self.ground.formulas().len()
        )
    }
}

/// Result of an anytime run.
#[pyclass(module = "tcpel")]
pub struct Ranking {
    result: RankingResult,
    stop: StopCondition,
    config: RankConfig,
}

#[pymethods]
impl Ranking {
    /// `(atom, score, log_score)` by descending score.
    #[getter]
    fn scores(&self) -> Vec<(String, f64, f64)> {
        self.result
            .scores
            .iter()
            .map(|s| (s.atom.to_string(), s.score, s.log_score))
            .collect()
    }

    #[getter]
    fn order(&self) -> Vec<String> {
        self.result.order().map(ToString::to_string).collect()
    }

    fn score(&self, atom: &str) -> f64 {
        self.result
            .scores
            .iter()
            .find(|s| s.atom.to_string() == atom)
            .map_or(0.0, |s| s.score)
    }

    #[getter]
    fn worlds_analyzed(&self) -> u128 {
        self.result.worlds_analyzed
    }

    #[getter]
    fn classes_analyzed(&self) -> u128 {
        self.result.classes_analyzed
    }

    #[getter]
    fn unassigned_bound(&self) -> f64 {
        self.result.unassigned_bound
    }

    #[getter]
    fn log_unassigned_bound(&self) -> f64 {
        self.result.log_unassigned_bound
    }

    #[getter]
    fn bottom_mass(&self) -> f64 {
        self.result.bottom_mass
    }

    #[getter]
    fn complete(&self) -> bool {
        self.result.complete
    }

    /// Certified pairs `(higher, lower, strict)`.
    #[getter]
    fn provable_pairs(&self) -> Vec<(String, String, bool)> {
        self.result
            .provable_pairs
            .iter()
            .map(|p| (p.higher.to_string(), p.lower.to_string(), p.strict))
            .collect()
    }

    fn to_json(&self) -> String {
        report::ranking_json(&self.result, &self.stop, &self.config)
    }

    fn to_tsv(&self) -> String {
        report::ranking_tsv(&self.result)
    }

    fn __repr__(&self) -> String {
        format!(
            "Ranking(atoms={}, s={}, t={}, U={}, complete={})",
            self.result.scores.len(),
            self.result.worlds_analyzed,
            self.result.classes_analyzed,
            self.result.unassigned_bound,
            self.result.complete
        )
    }
}

/// Exact probabilities of every consequence.
#[pyclass(module = "tcpel")]
pub struct Exact {
    result: ExactRanking,
}

#[pymethods]
impl Exact {
    /// `(atom, probability)` by descending probability.
    #[getter]
    fn probabilities(&self) -> Vec<(String, f64)> {
        self.result
            .atoms
            .iter()
            .map(|a| (a.atom.to_string(), a.probability))
            .collect()
    }

    fn probability(&self, atom: &str) -> f64 {
        self.result
            .atoms
            .iter()
            .find(|a| a.atom.to_string() == atom)
            .map_or(0.0, |a| a.probability)
    }

    #[getter]
    fn log_z(&self) -> f64 {
        self.result.log_z
    }

    #[getter]
    fn bottom_probability(&self) -> f64 {
        self.result.bottom_probability
    }

    fn to_json(&self) -> String {
        report::exact_json(&self.result)
    }
}

/// Pairs certified by the bound `u`: `(higher, lower, strict)` whenever
/// `score(lower) + u <= score(higher)`.
#[pyfunction]
fn provable_partial_order(scores: Vec<(String, f64)>, u: f64) -> Vec<(String, String, bool)> {
    tcpel::rank::provable_partial_order(&scores, u)
        .into_iter()
        .map(|p| (p.higher, p.lower, p.strict))
        .collect()
}

#[pymodule]
#[pyo3(name = "tcpel")]
fn tcpel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<KnowledgeBase>()?;
    m.add_class::<Ranking>()?;
    m.add_class::<Exact>()?;
    m.add_function(wrap_pyfunction!(provable_partial_order, m)?)?;
    Ok(())
}
