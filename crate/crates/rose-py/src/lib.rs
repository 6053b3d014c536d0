//! Python bindings for the rose-core spectral library.
//!
//! The module mirrors the Rust API with plain lists and floats so it can be
//! driven from scripts without any wrapper classes: sampling of bond lengths
//! and spin angles, eigenvalue enumeration for the three graph kinds,
//! unfolding and pair-correlation/form-factor estimation, and the analytic
//! prediction curves.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rose_core::config::BondLengths;
use rose_core::predictions::{self, Family};
use rose_core::secular;
use rose_core::stats::{self, UnfoldedSpectrum};
use rose_core::{RngStream, StreamPurpose};

fn to_py_err(error: rose_core::Error) -> PyErr {
    PyValueError::new_err(error.to_string())
}

fn bond_lengths(lengths: Vec<f64>) -> PyResult<BondLengths> {
    if lengths.is_empty() {
        return Err(PyValueError::new_err("at least one bond length required"));
    }
    if let Some(bad) = lengths.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(PyValueError::new_err(format!(
            "bond lengths must be positive and finite, got {bad}"
        )));
    }
    Ok(BondLengths::new_unchecked(lengths))
}

fn parse_family(name: &str) -> PyResult<Family> {
    match name {
        "rose" => Ok(Family::Rose),
        "star" => Ok(Family::Star),
        other => Err(PyValueError::new_err(format!(
            "unknown family {other:?}; expected \"rose\" or \"star\""
        ))),
    }
}

/// Bond lengths drawn from [1 − 1/(2B), 1 + 1/(2B)], reproducible from
/// (seed, stream).
#[pyfunction]
#[pyo3(signature = (bonds, seed, stream=0))]
fn sample_lengths(bonds: usize, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
    rose_core::sample_bond_lengths(bonds, RngStream::new(seed, stream, StreamPurpose::BondLengths))
        .map(|l| l.as_slice().to_vec())
        .map_err(to_py_err)
}

/// Trace angles θ_b of Haar-random SU(2) vertex matrices.
#[pyfunction]
#[pyo3(signature = (bonds, seed, stream=0))]
fn sample_angles(bonds: usize, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
    rose_core::sample_spin_configuration(
        bonds,
        RngStream::new(seed, stream, StreamPurpose::SpinMatrices),
    )
    .map(|c| c.angles().to_vec())
    .map_err(to_py_err)
}

/// Z(k) and Z'(k) of the Dirac-rose secular function.
#[pyfunction]
fn secular_eval(k: f64, lengths: Vec<f64>, angles: Vec<f64>) -> PyResult<(f64, f64)> {
    secular::secular_eval(k, &bond_lengths(lengths)?, &angles).map_err(to_py_err)
}

/// Wavenumber below which near-equal bond lengths keep the spectrum bunched
/// in unmerged pole clusters.
#[pyfunction]
fn cluster_mixing_threshold(lengths: Vec<f64>) -> PyResult<f64> {
    Ok(secular::cluster_mixing_threshold(&bond_lengths(lengths)?))
}

/// First `n` distinct Dirac-rose eigenvalues at or above `k_min`.
#[pyfunction]
#[pyo3(signature = (lengths, angles, n, k_min=0.0))]
fn dirac_rose_spectrum(
    lengths: Vec<f64>,
    angles: Vec<f64>,
    n: usize,
    k_min: f64,
) -> PyResult<Vec<f64>> {
    secular::dirac_rose_spectrum_from(&bond_lengths(lengths)?, &angles, n, k_min)
        .map(|s| s.roots)
        .map_err(to_py_err)
}

/// First `n` Neumann-star eigenvalues at or above `k_min`.
#[pyfunction]
#[pyo3(signature = (lengths, n, k_min=0.0))]
fn neumann_star_spectrum(lengths: Vec<f64>, n: usize, k_min: f64) -> PyResult<Vec<f64>> {
    secular::neumann_star_spectrum_from(&bond_lengths(lengths)?, n, k_min)
        .map(|s| s.roots)
        .map_err(to_py_err)
}

/// First `n` Neumann-rose eigenvalues at or above `k_min`, with a parallel
/// list of origins ("secular" or "single-bond").
#[pyfunction]
#[pyo3(signature = (lengths, n, k_min=0.0))]
fn neumann_rose_spectrum(
    lengths: Vec<f64>,
    n: usize,
    k_min: f64,
) -> PyResult<(Vec<f64>, Vec<&'static str>)> {
    let spectrum = secular::neumann_rose_spectrum_from(&bond_lengths(lengths)?, n, k_min)
        .map_err(to_py_err)?;
    let origins = spectrum
        .origins
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|o| match o {
            secular::RootOrigin::Secular => "secular",
            secular::RootOrigin::SingleBond => "single-bond",
        })
        .collect();
    Ok((spectrum.roots, origins))
}

/// Rescales roots to mean spacing 1 using the density Σ L_b/π.
#[pyfunction]
fn unfold(roots: Vec<f64>, total_length: f64) -> PyResult<Vec<f64>> {
    if !(total_length > 0.0) {
        return Err(PyValueError::new_err("total_length must be positive"));
    }
    let constant = total_length / std::f64::consts::PI;
    Ok(roots.into_iter().map(|k| k * constant).collect())
}

/// Pair-correlation histogram over an ensemble of unfolded spectra;
/// returns (bin_centres, values).
#[pyfunction]
fn pair_correlation(
    ensemble: Vec<Vec<f64>>,
    bin_width: f64,
    x_max: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let unfolded: Vec<UnfoldedSpectrum> = ensemble
        .into_iter()
        .map(UnfoldedSpectrum::from_points)
        .collect();
    let histogram = stats::pair_correlation(&unfolded, bin_width, x_max).map_err(to_py_err)?;
    Ok((histogram.bin_centres().collect(), histogram.values))
}

/// Windowed empirical form factor of unfolded spectra on a τ grid.
#[pyfunction]
#[pyo3(signature = (ensemble, tau_grid, half_width=64.0))]
fn empirical_form_factor(
    ensemble: Vec<Vec<f64>>,
    tau_grid: Vec<f64>,
    half_width: f64,
) -> PyResult<Vec<f64>> {
    let unfolded: Vec<UnfoldedSpectrum> = ensemble
        .into_iter()
        .map(UnfoldedSpectrum::from_points)
        .collect();
    stats::empirical_form_factor(&unfolded, &tau_grid, half_width)
        .map(|curve| curve.values)
        .map_err(to_py_err)
}

/// Small-x pair-correlation slope constant c by adaptive quadrature.
#[pyfunction]
#[pyo3(signature = (tolerance=1e-10))]
fn slope_constant(tolerance: f64) -> PyResult<f64> {
    predictions::small_x_constant_quadrature(tolerance).map_err(to_py_err)
}

/// Monte-Carlo estimate of the slope constant: (mean, standard_error).
#[pyfunction]
#[pyo3(signature = (samples, seed=1))]
fn slope_constant_montecarlo(samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    predictions::small_x_constant_montecarlo(
        samples,
        RngStream::new(seed, 0, StreamPurpose::Amplitudes),
    )
    .map_err(to_py_err)
}

/// Small-x linear prediction of R₂ for family "rose" or "star".
#[pyfunction]
fn predict_r2_small(x: f64, family: &str) -> PyResult<f64> {
    predictions::predict_r2_small(x, parse_family(family)?).map_err(to_py_err)
}

/// Large-x tail prediction of R₂ for family "rose" or "star".
#[pyfunction]
fn predict_r2_large(x: f64, family: &str) -> PyResult<f64> {
    predictions::predict_r2_large(x, parse_family(family)?).map_err(to_py_err)
}

/// Resummed form-factor prediction (1 − τ − 4τ²)e^{−4τ} + τe^{τ}.
#[pyfunction]
fn form_factor_prediction(tau: f64) -> PyResult<f64> {
    predictions::form_factor_prediction(tau).map_err(to_py_err)
}

/// Maclaurin coefficients of the form factor transformed into the
/// coefficients of the large-x tail of R₂.
#[pyfunction]
fn form_factor_to_r2_tail(maclaurin: Vec<f64>, order: usize) -> PyResult<Vec<f64>> {
    predictions::form_factor_to_r2_tail(&maclaurin, order).map_err(to_py_err)
}

#[pymodule]
fn rose_py(module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_function(wrap_pyfunction!(sample_lengths, module)?)?;
    module.add_function(wrap_pyfunction!(sample_angles, module)?)?;
    module.add_function(wrap_pyfunction!(secular_eval, module)?)?;
    module.add_function(wrap_pyfunction!(cluster_mixing_threshold, module)?)?;
    module.add_function(wrap_pyfunction!(dirac_rose_spectrum, module)?)?;
    module.add_function(wrap_pyfunction!(neumann_star_spectrum, module)?)?;
    module.add_function(wrap_pyfunction!(neumann_rose_spectrum, module)?)?;
    module.add_function(wrap_pyfunction!(unfold, module)?)?;
    module.add_function(wrap_pyfunction!(pair_correlation, module)?)?;
    module.add_function(wrap_pyfunction!(empirical_form_factor, module)?)?;
    module.add_function(wrap_pyfunction!(slope_constant, module)?)?;
    module.add_function(wrap_pyfunction!(slope_constant_montecarlo, module)?)?;
    module.add_function(wrap_pyfunction!(predict_r2_small, module)?)?;
    module.add_function(wrap_pyfunction!(predict_r2_large, module)?)?;
    module.add_function(wrap_pyfunction!(form_factor_prediction, module)?)?;
    module.add_function(wrap_pyfunction!(form_factor_to_r2_tail, module)?)?;
    Ok(())
}
