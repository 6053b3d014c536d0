//! Random graph configurations: bond lengths and Haar SU(2) spin data.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Minimum pairwise separation of bond lengths; stands in for rational
/// independence, which has no floating-point meaning.
pub const MIN_LENGTH_SEPARATION: f64 = 1e-9;

/// Spin matrices with |Tr w| this close to 2 are rejected (w ≈ ±id).
pub const TRACE_REJECT_MARGIN: f64 = 1e-9;

/// B positive bond lengths, each in [1 − 1/(2B), 1 + 1/(2B)], pairwise
/// distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct BondLengths {
    lengths: Vec<f64>,
}

impl BondLengths {
    /// Validates the interval and distinctness invariants.
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        let b = lengths.len();
        if b == 0 {
            return Err(Error::invalid_argument("bond count must be at least 1"));
        }
        let half_width = 1.0 / (2.0 * b as f64);
        for (i, &l) in lengths.iter().enumerate() {
            if !(l >= 1.0 - half_width && l <= 1.0 + half_width) {
                return Err(Error::invalid_argument(format!(
                    "length {i} = {l} outside [{}, {}]",
                    1.0 - half_width,
                    1.0 + half_width
                )));
            }
            for &m in &lengths[..i] {
                if (l - m).abs() < MIN_LENGTH_SEPARATION {
                    return Err(Error::invalid_argument(format!(
                        "lengths {l} and {m} closer than {MIN_LENGTH_SEPARATION:e}"
                    )));
                }
            }
        }
        Ok(BondLengths { lengths })
    }

    /// Skips the interval and distinctness checks; used for debug overrides
    /// such as the single-bond analytic cases.
    pub fn new_unchecked(lengths: Vec<f64>) -> Self {
        BondLengths { lengths }
    }

    pub fn count(&self) -> usize {
        self.lengths.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lengths
    }

    pub fn total(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Lengths of the Neumann star graph that shares the rose's non-trivial
    /// spectrum: every length halved.
    pub fn halved(&self) -> BondLengths {
        BondLengths {
            lengths: self.lengths.iter().map(|l| l / 2.0).collect(),
        }
    }
}

/// Per-bond SU(2) matrices w_b together with the angles θ_b defined by
/// Tr w_b = 2 cos θ_b.
#[derive(Debug, Clone)]
pub struct SpinConfiguration {
    matrices: Vec<[[Complex64; 2]; 2]>,
    angles: Vec<f64>,
}

impl SpinConfiguration {
    pub fn matrices(&self) -> &[[[Complex64; 2]; 2]] {
        &self.matrices
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn count(&self) -> usize {
        self.angles.len()
    }
}

/// Angle map θ = arccos(Re Tr w / 2), clamped against rounding at ±id.
pub fn trace_angle(matrix: &[[Complex64; 2]; 2]) -> f64 {
    let half_trace = 0.5 * (matrix[0][0].re + matrix[1][1].re);
    half_trace.clamp(-1.0, 1.0).acos()
}

/// Draws B lengths uniformly on [1 − 1/(2B), 1 + 1/(2B)], redrawing any
/// length that lands within 1e−9 of an earlier one.
pub fn sample_bond_lengths(b: usize, stream: RngStream) -> Result<BondLengths> {
    if b == 0 {
        return Err(Error::invalid_argument("bond count must be at least 1"));
    }
    let mut rng = stream.rng();
    let half_width = 1.0 / (2.0 * b as f64);
    let lo = 1.0 - half_width;
    let hi = 1.0 + half_width;
    let mut lengths: Vec<f64> = Vec::with_capacity(b);
    while lengths.len() < b {
        let candidate = rng.gen_range(lo..hi);
        if lengths
            .iter()
            .all(|&l| (l - candidate).abs() >= MIN_LENGTH_SEPARATION)
        {
            lengths.push(candidate);
        }
    }
    Ok(BondLengths { lengths })
}

/// Draws B Haar-distributed SU(2) matrices via four standard normals
/// normalised to the unit 3-sphere, rejecting any draw with |Tr w| within
/// 1e−9 of 2.
pub fn sample_spin_configuration(b: usize, stream: RngStream) -> Result<SpinConfiguration> {
    if b == 0 {
        return Err(Error::invalid_argument("bond count must be at least 1"));
    }
    let mut rng = stream.rng();
    let mut matrices = Vec::with_capacity(b);
    let mut angles = Vec::with_capacity(b);
    for _ in 0..b {
        let q = loop {
            let q = random_unit_quaternion(&mut rng);
            if (2.0 * q[0].abs() - 2.0).abs() >= TRACE_REJECT_MARGIN {
                break q;
            }
        };
        let w = quaternion_to_su2(q);
        angles.push(trace_angle(&w));
        matrices.push(w);
    }
    Ok(SpinConfiguration { matrices, angles })
}

fn random_unit_quaternion<R: Rng>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if norm > 1e-100 {
            return [q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm];
        }
    }
}

/// w = q0·id + i(q1 σx + q2 σy + q3 σz); unit quaternions map exactly onto
/// SU(2) with Tr w = 2 q0.
fn quaternion_to_su2(q: [f64; 4]) -> [[Complex64; 2]; 2] {
    let [q0, q1, q2, q3] = q;
    [
        [Complex64::new(q0, q3), Complex64::new(q2, q1)],
        [Complex64::new(-q2, q1), Complex64::new(q0, -q3)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamPurpose;
    use approx::assert_abs_diff_eq;

    fn stream(seed: u64, idx: u64) -> RngStream {
        RngStream::new(seed, idx, StreamPurpose::BondLengths)
    }

    #[test]
    fn rejects_zero_bonds() {
        assert!(sample_bond_lengths(0, stream(1, 0)).is_err());
        assert!(sample_spin_configuration(0, stream(1, 0)).is_err());
    }

    #[test]
    fn single_bond_length_in_wide_interval() {
        let l = sample_bond_lengths(1, stream(3, 0)).unwrap();
        assert!(l.as_slice()[0] >= 0.5 && l.as_slice()[0] <= 1.5);
    }

    #[test]
    fn ten_bond_lengths_in_narrow_interval() {
        let l = sample_bond_lengths(10, stream(3, 0)).unwrap();
        for &v in l.as_slice() {
            assert!((0.95..=1.05).contains(&v));
        }
    }

    #[test]
    fn bond_lengths_deterministic() {
        let a = sample_bond_lengths(17, stream(99, 4)).unwrap();
        let b = sample_bond_lengths(17, stream(99, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spin_matrices_are_special_unitary() {
        let cfg = sample_spin_configuration(50, stream(11, 0)).unwrap();
        for (w, &theta) in cfg.matrices().iter().zip(cfg.angles()) {
            let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
            assert_abs_diff_eq!(det.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(det.im, 0.0, epsilon = 1e-12);
            // unitarity: rows orthonormal
            let r0 = w[0][0].norm_sqr() + w[0][1].norm_sqr();
            let r1 = w[1][0].norm_sqr() + w[1][1].norm_sqr();
            let cross = w[0][0] * w[1][0].conj() + w[0][1] * w[1][1].conj();
            assert_abs_diff_eq!(r0, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r1, 1.0, epsilon = 1e-12);
            assert!(cross.norm() < 1e-12);
            // trace/angle relation
            let trace = w[0][0] + w[1][1];
            assert_abs_diff_eq!(trace.im, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(2.0 * theta.cos(), trace.re, epsilon = 1e-12);
            assert!((trace.re.abs() - 2.0).abs() >= TRACE_REJECT_MARGIN);
        }
    }

    #[test]
    fn angle_map_fixed_points() {
        let id = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        assert_abs_diff_eq!(trace_angle(&id), 0.0, epsilon = 1e-15);
        let diag_i = [
            [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        ];
        assert_abs_diff_eq!(trace_angle(&diag_i), std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn mean_squared_trace_is_one() {
        // E (Tr w)² = 1 for Haar SU(2)
        let n = 100_000usize;
        let cfg = sample_spin_configuration(n, stream(7, 0)).unwrap();
        let mean: f64 = cfg
            .matrices()
            .iter()
            .map(|w| {
                let t = (w[0][0] + w[1][1]).re;
                t * t
            })
            .sum::<f64>()
            / n as f64;
        // Var((Tr w)²) = E t⁴ − 1 = 2 − 1 = 1, so SE = 1/√n
        let se = 1.0 / (n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean} vs 1 ± {se}");
    }

    #[test]
    fn invalid_lengths_rejected() {
        assert!(BondLengths::new(vec![]).is_err());
        assert!(BondLengths::new(vec![0.7, 1.0]).is_err()); // outside [0.75, 1.25]
        assert!(BondLengths::new(vec![1.0, 1.0]).is_err()); // not distinct
        assert!(BondLengths::new(vec![0.9, 1.1]).is_ok());
    }
}
