//! Python module `pylmdp`.
//!
//! Images cross the boundary as lists of rows of floats; nothing here needs
//! numpy.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use lmdp::dataset::{self, SynthSpec};
use lmdp::descriptor::Method;
use lmdp::evaluation::{self, MatchTrial};
use lmdp::filter_bank;
use lmdp::image::GrayImage;
use lmdp::pattern;
use lmdp::pipeline;
use lmdp::response;

fn py_err(e: lmdp::Error) -> PyErr {
    match e {
        lmdp::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_image(rows: Vec<Vec<f64>>) -> PyResult<GrayImage> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(PyValueError::new_err("image rows must all have the same length"));
    }
    GrayImage::new(width, height, rows.concat()).map_err(py_err)
}

fn to_rows<T: Copy>(width: usize, data: &[T]) -> Vec<Vec<T>> {
    data.chunks(width.max(1)).map(<[T]>::to_vec).collect()
}

#[pyclass(name = "GaborParams", from_py_object)]
#[derive(Clone)]
struct PyGaborParams {
    inner: filter_bank::GaborParams,
}

#[pymethods]
impl PyGaborParams {
    #[new]
    #[pyo3(signature = (mu=0.11, sigma=5.6179, kernel_size=35, n_orientations=12, zero_mean=true))]
    fn new(mu: f64, sigma: f64, kernel_size: usize, n_orientations: usize, zero_mean: bool) -> PyResult<Self> {
        let inner = filter_bank::GaborParams {
            mu,
            sigma,
            kernel_size,
            n_orientations,
            zero_mean,
        };
        inner.validate().map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn kernel_size(&self) -> usize {
        self.inner.kernel_size
    }

    #[getter]
    fn n_orientations(&self) -> usize {
        self.inner.n_orientations
    }

    #[getter]
    fn zero_mean(&self) -> bool {
        self.inner.zero_mean
    }

    /// Angle of the 1-based orientation `index`, in radians.
    fn theta(&self, index: usize) -> f64 {
        self.inner.theta(index)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "GaborParams(mu={}, sigma={}, kernel_size={}, n_orientations={}, zero_mean={})",
            p.mu,
            p.sigma,
            p.kernel_size,
            p.n_orientations,
            if p.zero_mean { "True" } else { "False" }
        )
    }
}

#[pyclass(name = "FilterBank")]
struct PyFilterBank {
    inner: filter_bank::FilterBank,
}

#[pymethods]
impl PyFilterBank {
    #[new]
    #[pyo3(signature = (params=None))]
    fn new(params: Option<PyGaborParams>) -> PyResult<Self> {
        let p = params.map(|p| p.inner).unwrap_or_default();
        Ok(Self {
            inner: filter_bank::build_bank(p).map_err(py_err)?,
        })
    }

    #[getter]
    fn n_orientations(&self) -> usize {
        self.inner.n_orientations()
    }

    #[getter]
    fn kernel_size(&self) -> usize {
        self.inner.kernel_size()
    }

    fn thetas(&self) -> Vec<f64> {
        self.inner.filters().iter().map(|f| f.theta).collect()
    }

    /// Kernel of the 1-based orientation `index` as rows.
    fn kernel(&self, index: usize) -> PyResult<Vec<Vec<f64>>> {
        let n = self.inner.n_orientations();
        if !(1..=n).contains(&index) {
            return Err(PyValueError::new_err(format!("orientation index must be in 1..={n}")));
        }
        let k = &self.inner.filters()[index - 1].kernel;
        Ok(to_rows(k.size(), k.data()))
    }

    /// Response planes, one per orientation, each as rows.
    fn responses(&self, image: Vec<Vec<f64>>) -> PyResult<Vec<Vec<Vec<f64>>>> {
        let img = to_image(image)?;
        let stack = response::convolve_responses(&img, &self.inner).map_err(py_err)?;
        Ok((1..=stack.n_orientations())
            .map(|j| to_rows(stack.width(), stack.plane(j)))
            .collect())
    }

    /// 1-based dominant orientation per pixel.
    fn dominant_directions(&self, image: Vec<Vec<f64>>) -> PyResult<Vec<Vec<usize>>> {
        let img = to_image(image)?;
        let stack = response::convolve_responses(&img, &self.inner).map_err(py_err)?;
        (0..stack.height())
            .map(|y| {
                (0..stack.width())
                    .map(|x| response::dominant_direction(&stack, x, y).map_err(py_err))
                    .collect()
            })
            .collect()
    }
}

#[pyclass(name = "DirectionAnalysis", skip_from_py_object)]
#[derive(Clone)]
struct PyDirectionAnalysis {
    #[pyo3(get)]
    bits: Vec<u8>,
    #[pyo3(get)]
    dpn: usize,
    /// 1-based dominant directions, most confident first.
    #[pyo3(get)]
    dpis: Vec<usize>,
    #[pyo3(get)]
    dpls: Vec<usize>,
    #[pyo3(get)]
    label: u16,
}

#[pymethods]
impl PyDirectionAnalysis {
    fn __repr__(&self) -> String {
        format!(
            "DirectionAnalysis(dpn={}, dpis={:?}, dpls={:?}, label={})",
            self.dpn, self.dpis, self.dpls, self.label
        )
    }
}

/// Bit pattern `b_1..b_No` of a response vector.
#[pyfunction]
fn encode_bits(responses: Vec<f64>) -> PyResult<Vec<u8>> {
    Ok(pattern::encode_bits(&responses).map_err(py_err)?.bits())
}

#[pyfunction]
fn analyze_point(responses: Vec<f64>) -> PyResult<PyDirectionAnalysis> {
    let a = pattern::analyze_point(&responses).map_err(py_err)?;
    Ok(PyDirectionAnalysis {
        bits: a.bits.bits(),
        dpn: a.dpn,
        dpis: a.dps.iter().map(|d| d.dpi).collect(),
        dpls: a.dps.iter().map(|d| d.dpl).collect(),
        label: a.label,
    })
}

#[pyclass(name = "Descriptor", skip_from_py_object)]
#[derive(Clone)]
struct PyDescriptor {
    inner: lmdp::descriptor::Descriptor,
}

#[pymethods]
impl PyDescriptor {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method().name()
    }

    #[getter]
    fn block_size(&self) -> usize {
        self.inner.block_size()
    }

    #[getter]
    fn n_blocks(&self) -> usize {
        self.inner.n_blocks()
    }

    #[getter]
    fn bins_per_block(&self) -> usize {
        self.inner.bins_per_block()
    }

    #[getter]
    fn counts(&self) -> Vec<u32> {
        self.inner.counts().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Descriptor(method={}, n_blocks={}, bins_per_block={})",
            self.inner.method(),
            self.inner.n_blocks(),
            self.inner.bins_per_block()
        )
    }
}

#[pyclass(name = "Extractor")]
struct PyExtractor {
    inner: pipeline::Extractor,
}

#[pymethods]
impl PyExtractor {
    #[new]
    #[pyo3(signature = (method="lmdp", block_size=16, params=None, ldp_k=3))]
    fn new(method: &str, block_size: usize, params: Option<PyGaborParams>, ldp_k: usize) -> PyResult<Self> {
        let method: Method = method.parse().map_err(py_err)?;
        let inner = pipeline::Extractor::new(pipeline::ExtractorConfig {
            method,
            gabor: params.map(|p| p.inner).unwrap_or_default(),
            block_size,
            ldp_k,
        })
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_labels(&self) -> usize {
        let c = self.inner.config();
        match c.method {
            Method::Lmdp | Method::Lldp => pattern::label_count(c.gabor.n_orientations),
            Method::Lbp => lmdp::baselines::LBP_BINS,
            Method::Ldp => lmdp::baselines::LDP_BINS,
            Method::Eldp => lmdp::baselines::ELDP_BINS,
            Method::Ldn => lmdp::baselines::LDN_BINS,
        }
    }

    fn label_map(&self, py: Python<'_>, image: Vec<Vec<f64>>) -> PyResult<Vec<Vec<u16>>> {
        let img = to_image(image)?;
        let map = py.detach(|| self.inner.label_map(&img)).map_err(py_err)?;
        Ok(to_rows(map.width(), map.labels()))
    }

    fn describe(&self, py: Python<'_>, image: Vec<Vec<f64>>) -> PyResult<PyDescriptor> {
        let img = to_image(image)?;
        let inner = py.detach(|| self.inner.describe(&img)).map_err(py_err)?;
        Ok(PyDescriptor { inner })
    }
}

#[pyfunction]
fn chi_square(a: PyRef<'_, PyDescriptor>, b: PyRef<'_, PyDescriptor>) -> PyResult<f64> {
    lmdp::descriptor::chi_square(&a.inner, &b.inner).map_err(py_err)
}

/// `(threshold, far, frr)`
type RocRow = (f64, f64, f64);

/// Returns `(eer, [(threshold, far, frr), ...])` for distance scores.
#[pyfunction]
fn compute_eer(genuine: Vec<f64>, impostor: Vec<f64>) -> PyResult<(f64, Vec<RocRow>)> {
    let trials: Vec<MatchTrial> = genuine
        .iter()
        .map(|&score| MatchTrial { score, genuine: true })
        .chain(impostor.iter().map(|&score| MatchTrial { score, genuine: false }))
        .collect();
    let (eer, roc) = evaluation::compute_eer(&trials).map_err(py_err)?;
    Ok((eer, roc.points.iter().map(|p| (p.threshold, p.far, p.frr)).collect()))
}

/// Image of dark lines at the given angles (degrees) crossing the center.
#[pyfunction]
#[pyo3(signature = (angles, size=128, width=8.0, depth=80.0, background=180.0, noise=0.0, seed=0))]
fn render_synthetic(
    angles: Vec<f64>,
    size: usize,
    width: f64,
    depth: f64,
    background: f64,
    noise: f64,
    seed: u64,
) -> PyResult<Vec<Vec<f64>>> {
    let spec = SynthSpec {
        size,
        angles: angles.iter().map(|d| d.rem_euclid(180.0).to_radians()).collect(),
        width,
        depth,
        background,
        noise,
        offset: (0.0, 0.0),
    };
    let img = dataset::render_synthetic(&spec, seed).map_err(py_err)?.image;
    Ok(to_rows(img.width(), img.pixels()))
}

#[pyfunction]
fn load_pgm(path: &str) -> PyResult<Vec<Vec<f64>>> {
    let img = dataset::load_pgm(path).map_err(py_err)?;
    Ok(to_rows(img.width(), img.pixels()))
}

/// Writes an 8-bit binary PGM; values are rounded and clamped to 0..=255.
#[pyfunction]
fn write_pgm(path: &str, image: Vec<Vec<f64>>) -> PyResult<()> {
    dataset::write_pgm(path, &to_image(image)?).map_err(py_err)
}

/// `[(identity, Descriptor), ...]` from a descriptor file.
#[pyfunction]
fn read_descriptors(path: &str) -> PyResult<Vec<(String, PyDescriptor)>> {
    Ok(dataset::read_records(path)
        .map_err(py_err)?
        .into_iter()
        .map(|r| (r.identity, PyDescriptor { inner: r.descriptor }))
        .collect())
}

#[pyfunction]
fn write_descriptors(path: &str, records: Vec<(String, PyRef<'_, PyDescriptor>)>) -> PyResult<()> {
    let records: Vec<_> = records
        .into_iter()
        .map(|(id, d)| dataset::DescriptorRecord::new(id, d.inner.clone()))
        .collect();
    dataset::write_records(path, &records).map_err(py_err)
}

#[pymodule]
fn pylmdp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGaborParams>()?;
    m.add_class::<PyFilterBank>()?;
    m.add_class::<PyDirectionAnalysis>()?;
    m.add_class::<PyDescriptor>()?;
    m.add_class::<PyExtractor>()?;
    m.add_function(wrap_pyfunction!(encode_bits, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_point, m)?)?;
    m.add_function(wrap_pyfunction!(chi_square, m)?)?;
    m.add_function(wrap_pyfunction!(compute_eer, m)?)?;
    m.add_function(wrap_pyfunction!(render_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(load_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(write_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(read_descriptors, m)?)?;
    m.add_function(wrap_pyfunction!(write_descriptors, m)?)?;
    Ok(())
}
