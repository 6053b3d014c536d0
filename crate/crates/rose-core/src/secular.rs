//! Secular functions of rose and star graphs and their root enumeration.
//!
//! The Dirac rose secular function
//!
//! ```text
//!     Z(k) = Σ_b (cos θ_b − cos k L_b) / sin k L_b
//! ```
//!
//! has poles at k = mπ/L_b and satisfies Z'(k) ≥ 0, so Z increases from −∞
//! to +∞ on every open interval between consecutive poles and holds exactly
//! one root there. The Neumann tan-sum secular function shares the same
//! structure with poles at (2m+1)π/L_b. Root enumeration walks the merged
//! pole sequence and refines one root per interval: bisection down to a
//! 1e−6 bracket, then Newton steps rejected whenever they leave the
//! bracket, until the bracket is narrower than 1e−12.

use std::f64::consts::PI;

use crate::config::BondLengths;
use crate::error::{Error, Result};

/// Relative distance from a pole below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-13;

/// Inter-pole intervals narrower than this fraction of k are skipped and
/// counted in the spectrum diagnostics; the bond lengths were then
/// effectively rationally dependent at this k. The threshold is relative
/// because exactly coincident poles land a few ulps apart after rounding,
/// whatever the magnitude of k.
pub const DEGENERATE_INTERVAL: f64 = 1e-13;

const BISECTION_WIDTH: f64 = 1e-6;
const FINAL_WIDTH: f64 = 1e-12;

/// A pole k = mπ/L_b of the secular function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub position: f64,
    pub bond_index: usize,
    pub integer_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    DiracRose,
    NeumannStar,
    NeumannRose,
}

impl GraphKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphKind::DiracRose => "dirac-rose",
            GraphKind::NeumannStar => "neumann-star",
            GraphKind::NeumannRose => "neumann-rose",
        }
    }
}

/// For Neumann rose spectra: whether a point solves the tan-sum equation
/// (type a) or is a single-bond eigenvalue 2mπ/L_b (type b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootOrigin {
    Secular,
    SingleBond,
}

/// Seed provenance carried by sampled configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedProvenance {
    pub master_seed: u64,
    pub stream_index: u64,
}

/// Strictly increasing distinct eigenvalues k_n with provenance. For the
/// Dirac rose the Kramers partner of each root is not duplicated.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub roots: Vec<f64>,
    pub kind: GraphKind,
    pub bond_count: usize,
    /// Σ_b L_b of the stored graph's lengths.
    pub total_half_length: f64,
    pub seed: Option<SeedProvenance>,
    /// Roots below this threshold were not collected.
    pub k_min: f64,
    /// Largest k examined while enumerating roots.
    pub k_max: f64,
    /// Present for Neumann rose spectra only.
    pub origins: Option<Vec<RootOrigin>>,
    /// Near-degenerate pole intervals skipped during enumeration.
    pub skipped_intervals: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Single-bond secular term z(x, θ) = (cos θ − cos x)/sin x.
pub fn z_eval(x: f64, theta: f64) -> Result<f64> {
    let nearest = (x / PI).round() * PI;
    let distance = (x - nearest).abs();
    if distance < POLE_GUARD {
        return Err(Error::PoleProximity { k: x, distance });
    }
    Ok((theta.cos() - x.cos()) / x.sin())
}

/// Z(k) and Z'(k) for the Dirac rose secular function.
pub fn secular_eval(k: f64, lengths: &BondLengths, angles: &[f64]) -> Result<(f64, f64)> {
    for &l in lengths.as_slice() {
        let u = k * l / PI;
        let distance = (u - u.round()).abs();
        if distance < POLE_GUARD {
            return Err(Error::PoleProximity {
                k,
                distance: distance * PI / l,
            });
        }
    }
    Ok(secular_eval_unchecked(k, lengths.as_slice(), angles))
}

/// Solver-internal evaluation without the pole guard; brackets keep k away
/// from poles, and the sign is correct arbitrarily close to one anyway.
fn secular_eval_unchecked(k: f64, lengths: &[f64], angles: &[f64]) -> (f64, f64) {
    let mut value = 0.0;
    let mut derivative = 0.0;
    for (&l, &theta) in lengths.iter().zip(angles) {
        let (sin_kl, cos_kl) = (k * l).sin_cos();
        let cos_theta = theta.cos();
        value += (cos_theta - cos_kl) / sin_kl;
        derivative += l * (1.0 - cos_kl * cos_theta) / (sin_kl * sin_kl);
    }
    (value, derivative)
}

/// Σ_b tan(k l_b) and its derivative.
fn tan_sum_eval(k: f64, lengths: &[f64]) -> (f64, f64) {
    let mut value = 0.0;
    let mut derivative = 0.0;
    for &l in lengths {
        let t = (k * l).tan();
        value += t;
        derivative += l * (1.0 + t * t);
    }
    (value, derivative)
}

/// Wavenumber below which the spectrum of near-equal bond lengths is still
/// dominated by unmerged pole clusters.
///
/// The poles mπ/L_b bunch around mπ/L̄ in clusters of width
/// mπ(1/L_min − 1/L_max); consecutive clusters sit π/L̄ apart. Below the k
/// where those widths reach the cluster separation, the interlaced roots
/// inherit the bunching and nearest-neighbour spacings are wildly
/// non-uniform, so spectral statistics over that range reflect the cluster
/// geometry rather than the correlations of the homogeneous regime. For B
/// lengths drawn from [1 − 1/(2B), 1 + 1/(2B)] the returned threshold is
/// about Bπ. Equal lengths (zero spread) give 0: such spectra are periodic
/// at every scale and have no crossover.
pub fn cluster_mixing_threshold(lengths: &BondLengths) -> f64 {
    let slice = lengths.as_slice();
    let min = slice.iter().copied().fold(f64::INFINITY, f64::min);
    let max = slice.iter().copied().fold(0.0f64, f64::max);
    let mean = lengths.total() / slice.len() as f64;
    let spread = 1.0 / min - 1.0 / max;
    if spread <= 0.0 {
        return 0.0;
    }
    PI / (mean * mean * spread)
}

/// All poles mπ/L_b in (0, k_max], merged across bonds and sorted.
pub fn pole_stream(lengths: &BondLengths, k_max: f64) -> Result<Vec<Pole>> {
    if k_max <= 0.0 {
        return Err(Error::invalid_argument("k_max must be positive"));
    }
    Ok(merged_poles(lengths.as_slice(), k_max, |m, l| m as f64 * PI / l))
}

/// Merged sorted poles position(m, L_b) ≤ k_max for m = 1, 2, ...
fn merged_poles(lengths: &[f64], k_max: f64, position: impl Fn(u64, f64) -> f64) -> Vec<Pole> {
    let mut poles = Vec::new();
    for (bond_index, &l) in lengths.iter().enumerate() {
        let mut m = 1u64;
        loop {
            let p = position(m, l);
            if p > k_max {
                break;
            }
            poles.push(Pole {
                position: p,
                bond_index,
                integer_index: m,
            });
            m += 1;
        }
    }
    poles.sort_by(|a, b| a.position.total_cmp(&b.position));
    poles
}

/// One safeguarded root per inter-pole interval of a function increasing
/// from −∞ to +∞ on each interval.
struct IntervalSolver<F> {
    f: F,
}

impl<F: Fn(f64) -> (f64, f64)> IntervalSolver<F> {
    /// Refines the unique root inside (lo, hi). Returns None when no sign
    /// change is seen even after shrinking the pole offsets, which only
    /// happens for intervals squeezed by rounding.
    fn solve(&self, lo: f64, hi: f64) -> Option<f64> {
        let width = hi - lo;
        // Offsets below a few ulps of the endpoints cannot move them.
        let offset_floor = 4.0 * f64::EPSILON * hi.max(1.0);
        let mut offset = (1e-10 * width).max(offset_floor);
        if lo + offset >= hi - offset {
            // Too narrow to probe between the poles; the root is pinned.
            return Some(0.5 * (lo + hi));
        }
        let (mut a, mut b);
        let (mut fa, mut fb);
        // The root almost never hugs a pole closer than 1e-10 of the
        // interval, but shrink the offset a few times if it does.
        let mut tries = 0;
        loop {
            a = lo + offset;
            b = hi - offset;
            fa = (self.f)(a).0;
            fb = (self.f)(b).0;
            if fa < 0.0 && fb > 0.0 {
                break;
            }
            tries += 1;
            if tries > 4 || offset <= offset_floor {
                // Interval too distorted by rounding to bracket.
                if fa >= 0.0 && fb >= 0.0 {
                    return Some(a);
                } else if fa <= 0.0 && fb <= 0.0 {
                    return Some(b);
                }
                return None;
            }
            offset = (offset * 1e-3).max(offset_floor);
        }

        // Plain bisection to a comfortable bracket.
        while b - a > BISECTION_WIDTH {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = (self.f)(mid).0;
            if fm < 0.0 {
                a = mid;
                fa = fm;
            } else {
                b = mid;
                fb = fm;
            }
        }
        let _ = (fa, fb);

        // Newton with bisection fallback; a step leaving the bracket is
        // rejected.
        let mut x = 0.5 * (a + b);
        while b - a > FINAL_WIDTH {
            let (fx, dfx) = (self.f)(x);
            if fx < 0.0 {
                a = x;
            } else {
                b = x;
            }
            let newton = x - fx / dfx;
            x = if dfx.is_finite() && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if x <= a || x >= b {
                // No representable point strictly inside; done.
                break;
            }
        }
        Some(0.5 * (a + b))
    }
}

/// Walks intervals between consecutive poles (optionally starting with the
/// interval (0, first pole)) and collects the first `n_roots` roots at or
/// above `k_min`. Intervals entirely below `k_min` are passed over without
/// solving.
fn roots_between_poles<F: Fn(f64) -> (f64, f64)>(
    f: F,
    lengths: &[f64],
    pole_position: impl Fn(u64, f64) -> f64,
    include_leading: bool,
    n_roots: usize,
    k_min: f64,
) -> (Vec<f64>, usize, f64) {
    let solver = IntervalSolver { f };
    let total: f64 = lengths.iter().sum();
    let mut roots = Vec::with_capacity(n_roots);
    let mut skipped;
    // Pole density is Σ L_b/π per unit k; pad the estimate and extend if
    // the pad was not enough.
    let mut k_max = k_min + (n_roots + lengths.len() + 8) as f64 * PI / total;
    loop {
        let poles = merged_poles(lengths, k_max, &pole_position);
        roots.clear();
        skipped = 0;
        let mut prev = 0.0f64;
        let mut first = true;
        for pole in &poles {
            let lo = prev;
            let hi = pole.position;
            prev = hi;
            let leading = std::mem::replace(&mut first, false);
            if leading && !include_leading {
                continue;
            }
            if hi <= k_min {
                continue;
            }
            if hi - lo < DEGENERATE_INTERVAL * hi.max(1.0) {
                skipped += 1;
                continue;
            }
            if let Some(root) = solver.solve(lo, hi) {
                if root < k_min {
                    continue;
                }
                roots.push(root);
                if roots.len() == n_roots {
                    return (roots, skipped, hi);
                }
            } else {
                skipped += 1;
            }
        }
        k_max *= 1.3;
    }
}

/// First `n_roots` distinct eigenvalues of the Dirac rose graph.
pub fn dirac_rose_spectrum(
    lengths: &BondLengths,
    angles: &[f64],
    n_roots: usize,
) -> Result<Spectrum> {
    dirac_rose_spectrum_from(lengths, angles, n_roots, 0.0)
}

/// First `n_roots` distinct Dirac-rose eigenvalues at or above `k_min`.
pub fn dirac_rose_spectrum_from(
    lengths: &BondLengths,
    angles: &[f64],
    n_roots: usize,
    k_min: f64,
) -> Result<Spectrum> {
    if n_roots == 0 {
        return Err(Error::invalid_argument("n_roots must be at least 1"));
    }
    if !(k_min >= 0.0 && k_min.is_finite()) {
        return Err(Error::invalid_argument("k_min must be finite and non-negative"));
    }
    if angles.len() != lengths.count() {
        return Err(Error::invalid_argument(format!(
            "{} angles for {} bonds",
            angles.len(),
            lengths.count()
        )));
    }
    for (b, &theta) in angles.iter().enumerate() {
        if theta.abs() < 1e-9 || (theta - PI).abs() < 1e-9 {
            return Err(Error::InvalidConfiguration(format!(
                "θ_{b} = {theta} corresponds to w = ±id; the secular equation degenerates"
            )));
        }
    }
    let ls = lengths.as_slice().to_vec();
    let th = angles.to_vec();
    let (roots, skipped, k_max) = roots_between_poles(
        move |k| secular_eval_unchecked(k, &ls, &th),
        lengths.as_slice(),
        |m, l| m as f64 * PI / l,
        true,
        n_roots,
        k_min,
    );
    Ok(Spectrum {
        roots,
        kind: GraphKind::DiracRose,
        bond_count: lengths.count(),
        total_half_length: lengths.total(),
        seed: None,
        k_min,
        k_max,
        origins: None,
        skipped_intervals: skipped,
    })
}

/// First `n_roots` positive solutions of Σ_b tan(k l_b) = 0 for a Neumann
/// star graph with the given bond lengths.
pub fn neumann_star_spectrum(lengths: &BondLengths, n_roots: usize) -> Result<Spectrum> {
    neumann_star_spectrum_from(lengths, n_roots, 0.0)
}

/// First `n_roots` Neumann-star eigenvalues at or above `k_min`.
pub fn neumann_star_spectrum_from(
    lengths: &BondLengths,
    n_roots: usize,
    k_min: f64,
) -> Result<Spectrum> {
    if n_roots == 0 {
        return Err(Error::invalid_argument("n_roots must be at least 1"));
    }
    if !(k_min >= 0.0 && k_min.is_finite()) {
        return Err(Error::invalid_argument("k_min must be finite and non-negative"));
    }
    let ls = lengths.as_slice().to_vec();
    // tan(k l) has poles at (m − 1/2)π/l; k = 0 itself is not an eigenvalue
    // and the function rises from 0 on the leading interval, so that
    // interval holds no root.
    let (roots, skipped, k_max) = roots_between_poles(
        move |k| tan_sum_eval(k, &ls),
        lengths.as_slice(),
        |m, l| (m as f64 - 0.5) * PI / l,
        false,
        n_roots,
        k_min,
    );
    Ok(Spectrum {
        roots,
        kind: GraphKind::NeumannStar,
        bond_count: lengths.count(),
        total_half_length: lengths.total(),
        seed: None,
        k_min,
        k_max,
        origins: None,
        skipped_intervals: skipped,
    })
}

/// First `n_roots` eigenvalues of the Neumann rose graph: the tan-sum roots
/// of the half-length star merged with the single-bond points 2mπ/L_b,
/// each tagged by origin.
pub fn neumann_rose_spectrum(lengths: &BondLengths, n_roots: usize) -> Result<Spectrum> {
    neumann_rose_spectrum_from(lengths, n_roots, 0.0)
}

/// First `n_roots` Neumann-rose eigenvalues at or above `k_min`.
pub fn neumann_rose_spectrum_from(
    lengths: &BondLengths,
    n_roots: usize,
    k_min: f64,
) -> Result<Spectrum> {
    if n_roots == 0 {
        return Err(Error::invalid_argument("n_roots must be at least 1"));
    }
    let star = neumann_star_spectrum_from(&lengths.halved(), n_roots, k_min)?;
    // Single-bond eigenvalues below the star's reach, with headroom.
    let k_max = star.roots.last().copied().unwrap_or(0.0) * 1.01 + 1.0;
    let mut merged: Vec<(f64, RootOrigin)> = star
        .roots
        .iter()
        .map(|&k| (k, RootOrigin::Secular))
        .collect();
    for &l in lengths.as_slice() {
        let mut m = 1u64;
        loop {
            let p = 2.0 * m as f64 * PI / l;
            if p > k_max {
                break;
            }
            if p >= k_min {
                merged.push((p, RootOrigin::SingleBond));
            }
            m += 1;
        }
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    // For B = 1 every tan-sum root coincides with a single-bond point;
    // keep one copy, tagged as single-bond.
    let mut roots = Vec::with_capacity(n_roots);
    let mut origins = Vec::with_capacity(n_roots);
    for (k, origin) in merged {
        if let (Some(&last), Some(last_origin)) = (roots.last(), origins.last_mut()) {
            if k - last < 1e-9 {
                if origin == RootOrigin::SingleBond {
                    *last_origin = RootOrigin::SingleBond;
                }
                continue;
            }
        }
        roots.push(k);
        origins.push(origin);
        if roots.len() == n_roots {
            break;
        }
    }
    let k_covered = roots.last().copied().unwrap_or(0.0);
    Ok(Spectrum {
        roots,
        kind: GraphKind::NeumannRose,
        bond_count: lengths.count(),
        total_half_length: lengths.total(),
        seed: None,
        k_min,
        k_max: k_covered,
        origins: Some(origins),
        skipped_intervals: star.skipped_intervals,
    })
}
