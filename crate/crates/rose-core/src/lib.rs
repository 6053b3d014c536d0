//! Numerical spectra and spectral statistics of rose-shaped quantum graphs.
//!
//! The library computes eigenvalue spectra of Dirac rose graphs (and their
//! Neumann star/rose relatives) from the secular equation
//!
//! ```text
//!     Z(k) = Σ_b (cos θ_b − cos k L_b) / sin k L_b = 0,
//! ```
//!
//! estimates the spectral pair-correlation function R₂(x) and the form
//! factor over random ensembles, and evaluates the analytic small-x and
//! large-x predictions so the two routes can be cross-validated.
//!
//! Modules:
//! - [`config`]: reproducible random bond lengths and Haar SU(2) spin data
//! - [`secular`]: secular-function evaluation and root enumeration
//! - [`stats`]: unfolding, pair correlation, empirical form factor
//! - [`predictions`]: closed-form asymptotics and the slope constant c
//! - [`special`]: Gamma, confluent hypergeometric ₁F₁, adaptive quadrature
//! - [`datafile`]: two-column ASCII data files with `# key = value` headers

pub mod config;
pub mod datafile;
pub mod error;
pub mod predictions;
pub mod rng;
pub mod secular;
pub mod special;
pub mod stats;

pub use config::{sample_bond_lengths, sample_spin_configuration, BondLengths, SpinConfiguration};
pub use error::{Error, Result};
pub use rng::{RngStream, StreamPurpose};
pub use secular::{
    cluster_mixing_threshold, dirac_rose_spectrum, dirac_rose_spectrum_from,
    neumann_rose_spectrum, neumann_rose_spectrum_from, neumann_star_spectrum,
    neumann_star_spectrum_from, pole_stream, secular_eval, z_eval, GraphKind, Pole, RootOrigin,
    Spectrum,
};
pub use stats::{empirical_form_factor, pair_correlation, unfold, Histogram, UnfoldedSpectrum};
