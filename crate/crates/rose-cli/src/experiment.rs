//! Experiment configuration and ensemble execution.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use rose_core::config::BondLengths;
use rose_core::error::{Error, Result};
use rose_core::secular::{
    cluster_mixing_threshold, dirac_rose_spectrum_from, neumann_rose_spectrum_from,
    neumann_star_spectrum_from, GraphKind, SeedProvenance, Spectrum,
};
use rose_core::stats::{unfold, UnfoldedSpectrum};
use rose_core::{RngStream, StreamPurpose};

/// Fully merged run parameters: CLI flags over config-file keys over
/// defaults.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub graph: GraphKind,
    pub bonds: usize,
    pub eigenvalues: usize,
    pub realisations: usize,
    pub seed: u64,
    pub resample_lengths: bool,
    /// Spectra for statistics start above `transient_cutoff` times the
    /// cluster-mixing threshold of the realisation's bond lengths; 0 keeps
    /// the full low-k transient.
    pub transient_cutoff: f64,
    pub bin_width: f64,
    pub x_max: f64,
    pub out: String,
    pub threads: usize,
    /// Debug override: exact bond lengths, bypassing sampling.
    pub fixed_lengths: Option<Vec<f64>>,
    /// Debug override: exact spin angles θ_b, bypassing Haar sampling.
    pub fixed_angles: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bonds == 0 || self.eigenvalues == 0 || self.realisations == 0 {
            return Err(Error::invalid_argument(
                "bonds, eigenvalues and realisations must all be positive",
            ));
        }
        if !(self.transient_cutoff >= 0.0 && self.transient_cutoff.is_finite()) {
            return Err(Error::invalid_argument(
                "transient cutoff must be finite and non-negative",
            ));
        }
        if !(self.bin_width > 0.0 && self.bin_width <= 1.0) {
            return Err(Error::invalid_argument("bin width must be in (0, 1]"));
        }
        if self.x_max < 1.0 {
            return Err(Error::invalid_argument("x-max must be at least 1"));
        }
        if let Some(lengths) = &self.fixed_lengths {
            if lengths.len() != self.bonds {
                return Err(Error::invalid_argument(format!(
                    "{} fixed lengths for {} bonds",
                    lengths.len(),
                    self.bonds
                )));
            }
        }
        if let Some(angles) = &self.fixed_angles {
            if angles.len() != self.bonds {
                return Err(Error::invalid_argument(format!(
                    "{} fixed angles for {} bonds",
                    angles.len(),
                    self.bonds
                )));
            }
        }
        Ok(())
    }

    /// Header entries shared by every emitted file.
    pub fn header_entries(&self) -> Vec<(String, String)> {
        vec![
            ("generator".into(), format!("rose {}", env!("CARGO_PKG_VERSION"))),
            ("graph".into(), self.graph.as_str().into()),
            ("bonds".into(), self.bonds.to_string()),
            ("eigenvalues".into(), self.eigenvalues.to_string()),
            ("realisations".into(), self.realisations.to_string()),
            ("seed".into(), self.seed.to_string()),
            (
                "resample-lengths".into(),
                self.effective_resample().to_string(),
            ),
            (
                "transient-cutoff".into(),
                format!("{}", self.transient_cutoff),
            ),
        ]
    }

    /// Star and Neumann-rose spectra carry no spin randomness, so their
    /// ensembles always draw fresh lengths; the rose keeps lengths fixed
    /// unless asked otherwise.
    pub fn effective_resample(&self) -> bool {
        self.resample_lengths || self.graph != GraphKind::DiracRose
    }

    fn lengths_for(&self, realisation: u64) -> Result<BondLengths> {
        if let Some(fixed) = &self.fixed_lengths {
            return Ok(BondLengths::new_unchecked(fixed.clone()));
        }
        let index = if self.effective_resample() {
            realisation
        } else {
            0
        };
        rose_core::sample_bond_lengths(
            self.bonds,
            RngStream::new(self.seed, index, StreamPurpose::BondLengths),
        )
    }

    fn angles_for(&self, realisation: u64) -> Result<Vec<f64>> {
        if let Some(fixed) = &self.fixed_angles {
            return Ok(fixed.clone());
        }
        let cfg = rose_core::sample_spin_configuration(
            self.bonds,
            RngStream::new(self.seed, realisation, StreamPurpose::SpinMatrices),
        )?;
        Ok(cfg.angles().to_vec())
    }

    /// Computes realisation `i` of the ensemble.
    pub fn spectrum(&self, realisation: u64) -> Result<Spectrum> {
        let lengths = self.lengths_for(realisation)?;
        let k_min = self.transient_cutoff * cluster_mixing_threshold(&lengths);
        let mut spectrum = match self.graph {
            GraphKind::DiracRose => {
                let angles = self.angles_for(realisation)?;
                dirac_rose_spectrum_from(&lengths, &angles, self.eigenvalues, k_min)?
            }
            GraphKind::NeumannStar => {
                neumann_star_spectrum_from(&lengths, self.eigenvalues, k_min)?
            }
            GraphKind::NeumannRose => {
                neumann_rose_spectrum_from(&lengths, self.eigenvalues, k_min)?
            }
        };
        spectrum.seed = Some(SeedProvenance {
            master_seed: self.seed,
            stream_index: realisation,
        });
        Ok(spectrum)
    }

    /// All realisations, fanned out over the worker pool; the collected
    /// vector is in realisation order regardless of thread count.
    pub fn spectra(&self) -> Result<Vec<Spectrum>> {
        run_pool(self.threads, || {
            (0..self.realisations as u64)
                .into_par_iter()
                .map(|i| self.spectrum(i))
                .collect()
        })
    }

    pub fn unfolded_ensemble(&self) -> Result<Vec<UnfoldedSpectrum>> {
        self.spectra()?.iter().map(unfold).collect()
    }
}

/// Runs `work` on a dedicated rayon pool of `threads` workers (0 picks the
/// rayon default).
pub fn run_pool<T: Send>(threads: usize, work: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return work();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("worker pool construction cannot fail for positive counts")
        .install(work)
}

/// Flat `key = value` (or `key=value`) config-file parser; `#` lines are
/// comments.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}
