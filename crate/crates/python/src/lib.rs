//! Python bindings for the line segment detector.
//!
//! The native module is `_poev2`; it exposes the main types
//! (`EdgeStrengthMap`, `DetectionParams`, `LineSegment`) and the operations
//! needed to run and score detections from Python.

use std::str::FromStr;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use poev2::edgemap::io::{load_edge_map, save_pgm, save_png, Normalize};
use poev2::edgemap::{fallback_edges, nms_thin};
use poev2::eval;
use poev2::growing::{DetectionParams, Mode};
use poev2::orientation::{estimate_orientation, WindowBank};
use poev2::pipeline;
use poev2::segments;
use poev2::synth::{SceneSpec, SyntheticScene};
use poev2::validation;

fn to_py_err(e: poev2::Error) -> PyErr {
    match e {
        poev2::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Edge strength map: row-major probabilities in [0, 1].
#[pyclass(name = "EdgeStrengthMap", from_py_object)]
#[derive(Clone)]
struct PyEdgeMap {
    inner: poev2::EdgeStrengthMap,
}

#[pymethods]
impl PyEdgeMap {
    #[new]
    fn new(width: usize, height: usize, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: poev2::EdgeStrengthMap::new(width, height, values).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn zeros(width: usize, height: usize) -> PyResult<Self> {
        if width == 0 || height == 0 {
            return Err(PyValueError::new_err("dimensions must be >= 1"));
        }
        Ok(Self {
            inner: poev2::EdgeStrengthMap::zeros(width, height),
        })
    }

    /// Load a PGM or PNG file; `normalize` is "auto", "fixed-255", or "none".
    #[staticmethod]
    #[pyo3(signature = (path, normalize = "auto"))]
    fn load(path: &str, normalize: &str) -> PyResult<Self> {
        let mode = Normalize::from_str(normalize).map_err(to_py_err)?;
        Ok(Self {
            inner: load_edge_map(path, mode).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn get(&self, x: usize, y: usize) -> PyResult<f64> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyValueError::new_err("coordinates out of range"));
        }
        Ok(self.inner.get(x, y))
    }

    fn set(&mut self, x: usize, y: usize, value: f64) -> PyResult<()> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyValueError::new_err("coordinates out of range"));
        }
        self.inner.set(x, y, value);
        Ok(())
    }

    /// Row-major values as a flat list.
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn binarize(&self, lambda: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.binarize(lambda).map_err(to_py_err)?,
        })
    }

    /// Non-maxima thinning using orientations estimated at (window, angles).
    #[pyo3(signature = (window = 7, angles = 16))]
    fn thin(&self, window: u32, angles: u32) -> PyResult<Self> {
        let bank = WindowBank::new(window, angles).map_err(to_py_err)?;
        let orient = estimate_orientation(&self.inner, &bank);
        Ok(Self {
            inner: nms_thin(&self.inner, &orient).map_err(to_py_err)?,
        })
    }

    fn save_pgm(&self, path: &str) -> PyResult<()> {
        save_pgm(&self.inner, path).map_err(to_py_err)
    }

    fn save_png(&self, path: &str) -> PyResult<()> {
        save_png(&self.inner, path).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "EdgeStrengthMap({}x{})",
            self.inner.width(),
            self.inner.height()
        )
    }
}

/// Detector tunables; see `DetectionParams.generic()` and `.wireframe()`.
#[pyclass(name = "DetectionParams", from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: DetectionParams,
}

#[pymethods]
impl PyParams {
    // `lambda` is a Python keyword, so the binding exposes `lambda_`.
    #[new]
    #[pyo3(signature = (
        lambda_ = 0.1, search = 5, mode = "poev2", window = 7, angles = 16,
        tau_div = 16.0, lw = 3.0, epsilon = 1.0
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        lambda_: f64,
        search: u32,
        mode: &str,
        window: u32,
        angles: u32,
        tau_div: f64,
        lw: f64,
        epsilon: f64,
    ) -> PyResult<Self> {
        let params = DetectionParams {
            lambda: lambda_,
            search,
            mode: Mode::from_str(mode).map_err(to_py_err)?,
            half_width: window,
            directions: angles,
            tau: std::f64::consts::PI / tau_div,
            line_width: lw,
            epsilon,
        };
        params.validate().map_err(to_py_err)?;
        Ok(Self { inner: params })
    }

    #[staticmethod]
    fn generic() -> Self {
        Self {
            inner: DetectionParams::generic(),
        }
    }

    #[staticmethod]
    fn wireframe() -> Self {
        Self {
            inner: DetectionParams::wireframe(),
        }
    }

    #[getter]
    fn lambda(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn search(&self) -> u32 {
        self.inner.search
    }

    #[getter]
    fn mode(&self) -> String {
        match self.inner.mode {
            Mode::Poe => "poe".into(),
            Mode::Poev2 => "poev2".into(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "DetectionParams(lambda={}, search={}, mode='{}', window={}, angles={})",
            self.inner.lambda,
            self.inner.search,
            self.mode(),
            self.inner.half_width,
            self.inner.directions
        )
    }
}

/// Sub-pixel line segment with a support score.
#[pyclass(name = "LineSegment", from_py_object)]
#[derive(Clone)]
struct PyLineSegment {
    inner: segments::LineSegment,
}

#[pymethods]
impl PyLineSegment {
    #[new]
    #[pyo3(signature = (x1, y1, x2, y2, score = 1.0))]
    fn new(x1: f64, y1: f64, x2: f64, y2: f64, score: f64) -> Self {
        Self {
            inner: segments::LineSegment::new(x1, y1, x2, y2, score),
        }
    }

    #[getter]
    fn x1(&self) -> f64 {
        self.inner.x1
    }

    #[getter]
    fn y1(&self) -> f64 {
        self.inner.y1
    }

    #[getter]
    fn x2(&self) -> f64 {
        self.inner.x2
    }

    #[getter]
    fn y2(&self) -> f64 {
        self.inner.y2
    }

    #[getter]
    fn score(&self) -> f64 {
        self.inner.score
    }

    fn length(&self) -> f64 {
        self.inner.length()
    }

    /// Direction in [0, pi).
    fn angle(&self) -> f64 {
        self.inner.angle()
    }

    fn __repr__(&self) -> String {
        format!(
            "LineSegment(({:.2}, {:.2}) -> ({:.2}, {:.2}), score={:.2})",
            self.inner.x1, self.inner.y1, self.inner.x2, self.inner.y2, self.inner.score
        )
    }
}

fn unwrap_segments(segs: Vec<PyLineSegment>) -> Vec<segments::LineSegment> {
    segs.into_iter().map(|s| s.inner).collect()
}

/// Run the detector on an edge strength map.
#[pyfunction]
#[pyo3(signature = (map, params = None))]
fn detect(map: &PyEdgeMap, params: Option<PyParams>) -> PyResult<Vec<PyLineSegment>> {
    let params = params.map(|p| p.inner).unwrap_or_default();
    let out = pipeline::detect(&map.inner, &params).map_err(to_py_err)?;
    Ok(out
        .segments
        .into_iter()
        .map(|inner| PyLineSegment { inner })
        .collect())
}

/// Gradient-magnitude edge map from raw grayscale values.
#[pyfunction]
#[pyo3(name = "fallback_edges")]
fn py_fallback_edges(width: usize, height: usize, luma: Vec<f64>) -> PyResult<PyEdgeMap> {
    Ok(PyEdgeMap {
        inner: fallback_edges(width, height, &luma).map_err(to_py_err)?,
    })
}

/// Generate a random synthetic scene; returns (map, ground_truth).
#[pyfunction]
#[pyo3(signature = (
    width = 512, height = 512, min_segments = 5, max_segments = 15,
    min_length = 40.0, max_length = 180.0, noise = 0.02, antialias = true,
    seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn generate_scene(
    width: usize,
    height: usize,
    min_segments: usize,
    max_segments: usize,
    min_length: f64,
    max_length: f64,
    noise: f64,
    antialias: bool,
    seed: u64,
) -> PyResult<(PyEdgeMap, Vec<PyLineSegment>)> {
    let spec = SceneSpec {
        width,
        height,
        min_segments,
        max_segments,
        min_length,
        max_length,
        noise,
        antialias,
        seed,
        ..Default::default()
    };
    let scene = SyntheticScene::random(&spec).map_err(to_py_err)?;
    let (map, gt) = scene.generate();
    Ok((
        PyEdgeMap { inner: map },
        gt.into_iter().map(|inner| PyLineSegment { inner }).collect(),
    ))
}

/// Pixel-level (precision, recall, F) between rasterized segment sets.
#[pyfunction]
#[pyo3(signature = (pred, gt, width, height, d_match = 0.0075))]
fn heatmap_scores(
    pred: Vec<PyLineSegment>,
    gt: Vec<PyLineSegment>,
    width: usize,
    height: usize,
    d_match: f64,
) -> PyResult<(f64, f64, f64)> {
    let pred_map = eval::rasterize(&unwrap_segments(pred), width, height);
    let gt_map = eval::rasterize(&unwrap_segments(gt), width, height);
    let s = eval::heatmap_scores(&pred_map, &gt_map, d_match).map_err(to_py_err)?;
    Ok((s.precision, s.recall, s.f_h))
}

/// Structural AP at squared-distance threshold `d_t` (128x128 frame).
#[pyfunction]
#[pyo3(signature = (pred, gt, width, height, d_t = 5.0))]
fn structural_ap(
    pred: Vec<PyLineSegment>,
    gt: Vec<PyLineSegment>,
    width: usize,
    height: usize,
    d_t: f64,
) -> f64 {
    let mut ds = eval::Dataset::default();
    ds.push(unwrap_segments(pred), unwrap_segments(gt), (width, height));
    eval::structural_ap(&ds, d_t).sap
}

/// Minimal meaningful region size for an image.
#[pyfunction]
#[pyo3(signature = (width, height, epsilon = 1.0, p = 3.0 / 16.0))]
fn l_min(width: usize, height: usize, epsilon: f64, p: f64) -> PyResult<f64> {
    validation::compute_l_min(width, height, epsilon, p).map_err(to_py_err)
}

/// Write segments in the canonical text form.
#[pyfunction]
fn write_segments(path: &str, segs: Vec<PyLineSegment>) -> PyResult<()> {
    let bytes = segments::serialize(&unwrap_segments(segs), segments::SegmentFormat::Text, (0, 0))
        .map_err(to_py_err)?;
    std::fs::write(path, bytes).map_err(|e| PyIOError::new_err(e.to_string()))
}

/// Read segments from a text or JSON file (including wireframe annotations).
#[pyfunction]
fn read_segments(path: &str) -> PyResult<Vec<PyLineSegment>> {
    Ok(eval::load_ground_truth(path)
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| PyLineSegment { inner })
        .collect())
}

#[pymodule]
fn _poev2(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEdgeMap>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyLineSegment>()?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(py_fallback_edges, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scene, m)?)?;
    m.add_function(wrap_pyfunction!(heatmap_scores, m)?)?;
    m.add_function(wrap_pyfunction!(structural_ap, m)?)?;
    m.add_function(wrap_pyfunction!(l_min, m)?)?;
    m.add_function(wrap_pyfunction!(write_segments, m)?)?;
    m.add_function(wrap_pyfunction!(read_segments, m)?)?;
    Ok(())
}
