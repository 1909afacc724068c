//! Python extension module exposing the tracker's main types and operations:
//! box metrics, appearance helpers, tracker configuration, in-memory and
//! file-based tracking, evaluation and scenario generation.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use clustrack::appearance::{self, Embedding};
use clustrack::association::{track_sequence, Detection};
use clustrack::config::Preset;
use clustrack::geometry::{self, Modulation};
use clustrack::metrics::evaluate_sequence;
use clustrack::mot_io;
use clustrack::runner;
use clustrack::synthgen;
use clustrack::TrackerConfig;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Axis-aligned box `(left, top, width, height)` in pixels.
#[pyclass(name = "BBox", skip_from_py_object)]
#[derive(Clone)]
struct PyBBox {
    inner: geometry::BBox,
}

#[pymethods]
impl PyBBox {
    #[new]
    fn new(left: f64, top: f64, width: f64, height: f64) -> PyResult<Self> {
        if width < 0.0 || height < 0.0 {
            return Err(PyValueError::new_err("box sizes must be non-negative"));
        }
        Ok(Self {
            inner: geometry::BBox::new(left, top, width, height),
        })
    }

    #[getter]
    fn left(&self) -> f64 {
        self.inner.left
    }

    #[getter]
    fn top(&self) -> f64 {
        self.inner.top
    }

    #[getter]
    fn width(&self) -> f64 {
        self.inner.width
    }

    #[getter]
    fn height(&self) -> f64 {
        self.inner.height
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn diagonal(&self) -> f64 {
        self.inner.diagonal()
    }

    fn center(&self) -> (f64, f64) {
        self.inner.center()
    }

    fn __repr__(&self) -> String {
        format!(
            "BBox({}, {}, {}, {})",
            self.inner.left, self.inner.top, self.inner.width, self.inner.height
        )
    }
}

fn parse_modulation(mode: &str) -> PyResult<Modulation> {
    match mode.to_ascii_lowercase().as_str() {
        "diag" | "diagonal" => Ok(Modulation::Diagonal),
        "width" => Ok(Modulation::Width),
        "height" => Ok(Modulation::Height),
        "none" => Ok(Modulation::None),
        other => Err(PyValueError::new_err(format!(
            "unknown modulation '{other}' (expected diag, width, height or none)"
        ))),
    }
}

/// Intersection over union of two boxes.
#[pyfunction]
fn iou(a: &PyBBox, b: &PyBBox) -> f64 {
    geometry::iou(&a.inner, &b.inner)
}

/// Generalized IoU of two boxes.
#[pyfunction]
fn giou(a: &PyBBox, b: &PyBBox) -> f64 {
    geometry::giou(&a.inner, &b.inner)
}

/// Length-ratio modulated GIoU distance; mode is diag, width, height or none.
#[pyfunction]
fn modulated_giou(a: &PyBBox, b: &PyBBox, mode: &str) -> PyResult<f64> {
    Ok(geometry::modulated_giou(
        &a.inner,
        &b.inner,
        parse_modulation(mode)?,
    ))
}

/// Spatio-temporal modulation factor `min(1, d/2 + off)`.
#[pyfunction]
fn spatial_modulation(d: f64, off: f64) -> f64 {
    geometry::spatial_modulation(d, off)
}

/// Cosine distance between two embedding vectors (normalized internally).
#[pyfunction]
fn cosine_distance(a: Vec<f32>, b: Vec<f32>) -> PyResult<f64> {
    if a.len() != b.len() {
        return Err(PyValueError::new_err("embedding dimensions differ"));
    }
    let a = Embedding::unit(a).map_err(err)?;
    let b = Embedding::unit(b).map_err(err)?;
    Ok(appearance::cosine_distance(&a, &b))
}

/// Confidence-adaptive EMA weight.
#[pyfunction]
fn adaptive_beta(s_det: f64, sigma: f64, beta_f: f64) -> PyResult<f64> {
    if sigma >= 1.0 {
        return Err(PyValueError::new_err("sigma must be below 1"));
    }
    Ok(appearance::adaptive_beta(s_det, sigma, beta_f))
}

/// Tracker hyperparameters; construct with defaults, a preset name or the
/// compatibility baseline.
#[pyclass(name = "TrackerConfig", skip_from_py_object)]
#[derive(Clone)]
struct PyTrackerConfig {
    inner: TrackerConfig,
}

#[pymethods]
impl PyTrackerConfig {
    #[new]
    fn new() -> Self {
        Self {
            inner: TrackerConfig::default(),
        }
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let preset: Preset = name.parse().map_err(PyValueError::new_err)?;
        Ok(Self {
            inner: TrackerConfig::preset(preset),
        })
    }

    #[staticmethod]
    fn baseline() -> Self {
        Self {
            inner: TrackerConfig::baseline_compat(),
        }
    }

    #[getter]
    fn get_beta_f(&self) -> f64 {
        self.inner.beta_f
    }

    #[setter]
    fn set_beta_f(&mut self, v: f64) {
        self.inner.beta_f = v;
    }

    #[getter]
    fn get_off(&self) -> f64 {
        self.inner.off
    }

    #[setter]
    fn set_off(&mut self, v: f64) {
        self.inner.off = v;
    }

    #[getter]
    fn get_sigma(&self) -> f64 {
        self.inner.det_threshold
    }

    #[setter]
    fn set_sigma(&mut self, v: f64) {
        self.inner.det_threshold = v;
    }

    #[getter]
    fn get_n(&self) -> u32 {
        self.inner.velocity_window
    }

    #[setter]
    fn set_n(&mut self, v: u32) {
        self.inner.velocity_window = v;
    }

    #[getter]
    fn get_window(&self) -> u32 {
        self.inner.window_len
    }

    #[setter]
    fn set_window(&mut self, v: u32) {
        self.inner.window_len = v;
    }

    #[getter]
    fn get_appearance(&self) -> String {
        self.inner.appearance_mode.to_string()
    }

    #[setter]
    fn set_appearance(&mut self, v: &str) -> PyResult<()> {
        self.inner.appearance_mode = v.parse().map_err(PyValueError::new_err)?;
        Ok(())
    }

    #[getter]
    fn get_spatial(&self) -> String {
        self.inner.spatial_metric.to_string()
    }

    #[setter]
    fn set_spatial(&mut self, v: &str) -> PyResult<()> {
        self.inner.spatial_metric = v.parse().map_err(PyValueError::new_err)?;
        Ok(())
    }

    #[getter]
    fn get_merge_cutoff(&self) -> f64 {
        self.inner.merge_cutoff
    }

    #[setter]
    fn set_merge_cutoff(&mut self, v: f64) {
        self.inner.merge_cutoff = v;
    }

    #[getter]
    fn get_stage1_gate(&self) -> f64 {
        self.inner.stage1_gate
    }

    #[setter]
    fn set_stage1_gate(&mut self, v: f64) {
        self.inner.stage1_gate = v;
    }

    #[getter]
    fn get_freeze_size(&self) -> bool {
        self.inner.freeze_size
    }

    #[setter]
    fn set_freeze_size(&mut self, v: bool) {
        self.inner.freeze_size = v;
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

type DetectionTuple = (u32, (f64, f64, f64, f64), f64, Vec<f32>);
type ResultRow = (u32, u64, f64, f64, f64, f64, f64);

/// Tracks in-memory detections.
///
/// Each detection is `(frame, (left, top, width, height), confidence,
/// embedding)`. Detections below the config threshold are dropped, matching
/// file ingest. Returns `(frame, track_id, left, top, width, height,
/// confidence)` rows sorted by frame and id.
#[pyfunction]
fn track(detections: Vec<DetectionTuple>, config: &PyTrackerConfig) -> PyResult<Vec<ResultRow>> {
    let config = &config.inner;
    config.validate().map_err(err)?;
    let mut rank: HashMap<u32, u32> = HashMap::new();
    let mut dets = Vec::new();
    for (frame, (left, top, width, height), confidence, values) in detections {
        let slot = rank.entry(frame).or_insert(0);
        let source_index = *slot;
        *slot += 1;
        if confidence < config.det_threshold {
            continue;
        }
        if width < 0.0 || height < 0.0 {
            return Err(PyValueError::new_err("box sizes must be non-negative"));
        }
        let embedding = Embedding::unit(values).map_err(err)?;
        dets.push(Detection {
            frame,
            bbox: geometry::BBox::new(left, top, width, height),
            confidence,
            embedding,
            source_index,
        });
    }
    let tracks = track_sequence(dets, config).map_err(err)?;
    Ok(mot_io::tracklets_to_rows(&tracks)
        .into_iter()
        .map(|r| (r.frame, r.id as u64, r.left, r.top, r.width, r.height, r.conf))
        .collect())
}

/// Tracks a detection file plus embedding sidecar into a MOT result file.
/// Returns the number of trajectories.
#[pyfunction]
fn track_files(
    det_path: PathBuf,
    emb_path: PathBuf,
    out_path: PathBuf,
    config: &PyTrackerConfig,
) -> PyResult<usize> {
    let summary =
        runner::run_track(&det_path, &emb_path, &out_path, &config.inner).map_err(err)?;
    Ok(summary.trajectories)
}

fn eval_to_dict(eval: &clustrack::metrics::SequenceEval) -> HashMap<String, f64> {
    HashMap::from([
        ("mota".into(), eval.mota()),
        ("idf1".into(), eval.idf1()),
        ("idp".into(), eval.idp()),
        ("idr".into(), eval.idr()),
        ("recall".into(), eval.recall()),
        ("precision".into(), eval.precision()),
        ("fp".into(), eval.clear.false_positives as f64),
        ("fn".into(), eval.clear.misses as f64),
        ("idsw".into(), eval.clear.id_switches as f64),
        ("gt".into(), eval.clear.gt_count as f64),
        ("matches".into(), eval.clear.matches as f64),
    ])
}

/// Evaluates a result file against ground truth; returns the CLEAR and
/// identity metrics as a dict.
#[pyfunction]
#[pyo3(signature = (gt_path, res_path, iou_threshold = 0.5))]
fn evaluate_files(
    gt_path: PathBuf,
    res_path: PathBuf,
    iou_threshold: f64,
) -> PyResult<HashMap<String, f64>> {
    let gt = mot_io::read_ground_truth(&gt_path).map_err(err)?;
    let res = mot_io::read_results(&res_path).map_err(err)?;
    Ok(eval_to_dict(&evaluate_sequence("seq", &gt, &res, iou_threshold)))
}

/// Generates a synthetic scenario from a TOML description into a directory;
/// returns the (gt, det, emb) paths.
#[pyfunction]
#[pyo3(signature = (scenario_path, out_dir, seed = None))]
fn generate_scenario(
    scenario_path: PathBuf,
    out_dir: PathBuf,
    seed: Option<u64>,
) -> PyResult<(String, String, String)> {
    let mut scenario = synthgen::Scenario::from_toml_file(Path::new(&scenario_path)).map_err(err)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let data = synthgen::generate(&scenario).map_err(err)?;
    let paths = data.write_to_dir(&out_dir).map_err(err)?;
    Ok((
        paths.gt.display().to_string(),
        paths.det.display().to_string(),
        paths.emb.display().to_string(),
    ))
}

#[pymodule]
fn _clustrack(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBBox>()?;
    m.add_class::<PyTrackerConfig>()?;
    m.add_function(wrap_pyfunction!(iou, m)?)?;
    m.add_function(wrap_pyfunction!(giou, m)?)?;
    m.add_function(wrap_pyfunction!(modulated_giou, m)?)?;
    m.add_function(wrap_pyfunction!(spatial_modulation, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_distance, m)?)?;
    m.add_function(wrap_pyfunction!(adaptive_beta, m)?)?;
    m.add_function(wrap_pyfunction!(track, m)?)?;
    m.add_function(wrap_pyfunction!(track_files, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_files, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    Ok(())
}
