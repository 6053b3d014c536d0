//! Closed-form predictions: the small-x slope constant c, small/large-x
//! asymptotics of R₂ for rose and star graphs, the diagonal form factor,
//! and the form-factor-to-tail coefficient transform.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::{gamma_fn, hyp1f1, integrate_adaptive};

/// Which graph's prediction to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Rose,
    Star,
}

/// CDF of the sine-squared angle law, (2/π)∫₀^x sin²φ dφ.
pub fn sine_squared_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= PI {
        1.0
    } else {
        (x - x.sin() * x.cos()) / PI
    }
}

/// CDF of the semicircle trace law on [−2, 2].
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        (x * (4.0 - x * x).sqrt() / 2.0 + 2.0 * (x / 2.0).asin() + PI) / (2.0 * PI)
    }
}

/// I_ν(x) = E{A^ν e^{−A x²}} for A with the semicircle amplitude density:
/// (2^{ν+2}/√π)·(Γ(ν+3/2)/Γ(ν+3))·₁F₁(ν+3/2; ν+3; −2x²).
pub fn i_nu(nu: f64, x: f64) -> Result<f64> {
    if nu < -0.5 {
        return Err(Error::invalid_argument(format!(
            "I_ν diverges for ν = {nu} < −1/2"
        )));
    }
    let prefactor =
        2.0f64.powf(nu + 2.0) / PI.sqrt() * gamma_fn(nu + 1.5)? / gamma_fn(nu + 3.0)?;
    Ok(prefactor * hyp1f1(nu + 1.5, nu + 3.0, -2.0 * x * x)?)
}

/// Integrand of the slope-constant integral, even in x and O(x⁻¹⁰) at
/// infinity.
pub fn slope_integrand(x: f64) -> Result<f64> {
    let i_m = i_nu(-0.5, x)?;
    let i_p = i_nu(0.5, x)?;
    let i_3 = i_nu(1.5, x)?;
    Ok(i_3 * i_m * i_m + 2.0 * i_p * i_p * i_m)
}

/// The constant c = E{(A₁+A₂+A₃)^{3/2}/√(A₁A₂A₃)} ≈ 6.781 by quadrature:
/// (3/√π)·∫_{−∞}^{∞} [I_{3/2}I_{−1/2}² + 2 I_{1/2}² I_{−1/2}] dx, folded
/// to 2·∫₀^X by symmetry and truncated where the x⁻¹⁰ tail is below the
/// tolerance.
pub fn small_x_constant_quadrature(tolerance: f64) -> Result<f64> {
    if !(tolerance >= 1e-10) {
        return Err(Error::invalid_argument("tolerance must be at least 1e-10"));
    }
    let cutoff = 20.0f64.max(tolerance.recip().powf(1.0 / 9.0));
    let result = integrate_adaptive(
        |x| slope_integrand(x).unwrap_or(f64::NAN),
        0.0,
        cutoff,
        tolerance / 2.0,
    )?;
    if !result.converged || !result.value.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "slope-constant quadrature did not converge: estimate {:e} after {} evaluations",
            result.error_estimate, result.evaluations
        )));
    }
    Ok(6.0 / PI.sqrt() * result.value)
}

/// Cached c at tolerance 1e−10; recomputed on first use, never hard-coded.
pub fn small_x_constant() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        small_x_constant_quadrature(1e-10).expect("slope-constant quadrature failed")
    })
}

/// Draws an angle from the sine-squared law by Newton inversion of the CDF
/// with a bisection safeguard.
pub fn sample_sine_squared_angle<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(0.0..1.0);
    let mut lo = 0.0f64;
    let mut hi = PI;
    let mut theta = PI * u;
    for _ in 0..100 {
        let f = sine_squared_cdf(theta) - u;
        if f > 0.0 {
            hi = theta;
        } else {
            lo = theta;
        }
        let density = 2.0 / PI * theta.sin() * theta.sin();
        let newton = theta - f / density;
        theta = if density > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-12 {
            break;
        }
    }
    theta
}

/// A triple of amplitudes A_j = 1 − cos θ_j, each in (0, 2] with the
/// semicircle density.
pub fn sample_amplitude_triple<R: Rng>(rng: &mut R) -> [f64; 3] {
    [
        1.0 - sample_sine_squared_angle(rng).cos(),
        1.0 - sample_sine_squared_angle(rng).cos(),
        1.0 - sample_sine_squared_angle(rng).cos(),
    ]
}

/// The Monte-Carlo statistic (A₁+A₂+A₃)^{3/2}/√(A₁A₂A₃).
pub fn amplitude_statistic(a: [f64; 3]) -> f64 {
    (a[0] + a[1] + a[2]).powf(1.5) / (a[0] * a[1] * a[2]).sqrt()
}

/// Monte-Carlo estimate of c: sample mean and standard error over
/// `n_samples` i.i.d. amplitude triples.
pub fn small_x_constant_montecarlo(n_samples: usize, stream: RngStream) -> Result<(f64, f64)> {
    if n_samples < 1_000 {
        return Err(Error::invalid_argument(
            "at least 1000 Monte-Carlo samples required",
        ));
    }
    let mut rng = stream.rng();
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..n_samples {
        let s = amplitude_statistic(sample_amplitude_triple(&mut rng));
        sum += s;
        sum_sq += s * s;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    Ok((mean, (variance / n).sqrt()))
}

/// Small-x linear law: (πc/6)x for the Dirac rose, (π√3/2)x for the
/// Neumann star.
pub fn predict_r2_small(x: f64, family: Family) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::invalid_argument("x must be non-negative"));
    }
    let slope = match family {
        Family::Rose => PI * small_x_constant() / 6.0,
        Family::Star => PI * 3.0f64.sqrt() / 2.0,
    };
    Ok(slope * x)
}

/// Large-x tail series; valid only for x > 1/2.
pub fn predict_r2_large(x: f64, family: Family) -> Result<f64> {
    if x <= 0.5 {
        return Err(Error::invalid_argument(format!(
            "large-x asymptotic invalid at x = {x} ≤ 0.5"
        )));
    }
    let u = 1.0 / (PI * PI * x * x);
    Ok(match family {
        Family::Rose => 1.0 + 2.0 * u - 13.0 / 8.0 * u * u,
        Family::Star => {
            1.0 + u * (2.0 + u * (76.0 + u * (-1088.0 + u * (9280.0 - u * 64000.0))))
        }
    })
}

/// Diagonal-approximation form factor (1 − τ − 4τ²)e^{−4τ} + τe^{τ}.
pub fn form_factor_prediction(tau: f64) -> Result<f64> {
    if tau < 0.0 {
        return Err(Error::invalid_argument("τ must be non-negative"));
    }
    Ok((1.0 - tau - 4.0 * tau * tau) * (-4.0 * tau).exp() + tau * tau.exp())
}

/// Per-j diagonal contribution: (1+τ²)e^{−4τ} for j = 1 and
/// τ^{j+1}e^{−4τ}5^j/j! for j ≥ 2.
pub fn form_factor_term(j: u32, tau: f64) -> Result<f64> {
    if j < 1 {
        return Err(Error::invalid_argument("j must be at least 1"));
    }
    if tau < 0.0 {
        return Err(Error::invalid_argument("τ must be non-negative"));
    }
    if j == 1 {
        return Ok((1.0 + tau * tau) * (-4.0 * tau).exp());
    }
    // 5^j/j! built iteratively to dodge overflow for large j
    let mut factor = 1.0f64;
    for i in 1..=j {
        factor *= 5.0 / i as f64;
    }
    Ok(tau.powi(j as i32 + 1) * (-4.0 * tau).exp() * factor)
}

/// Maps Maclaurin coefficients a_k (k = 1, 2, …) of an even form factor to
/// the tail coefficients of x^{−(k+1)}: 2·Re[(−i/2π)^{k+1}]·a_k·k!. Odd
/// powers of (−i) are purely imaginary and contribute exactly zero.
pub fn form_factor_to_r2_tail(maclaurin: &[f64], order: usize) -> Result<Vec<f64>> {
    if order > maclaurin.len() {
        return Err(Error::invalid_argument(format!(
            "order {order} exceeds {} supplied coefficients",
            maclaurin.len()
        )));
    }
    let mut tail = Vec::with_capacity(order);
    let mut factorial = 1.0f64;
    for (index, &a_k) in maclaurin.iter().take(order).enumerate() {
        let k = index + 1;
        factorial *= k as f64;
        // Re[(−i)^{k+1}] cycles 1, 0, −1, 0
        let real_part = match (k + 1) % 4 {
            0 => 1.0,
            2 => -1.0,
            _ => 0.0,
        };
        if real_part == 0.0 {
            tail.push(0.0);
        } else {
            tail.push(2.0 * real_part * a_k * factorial / (2.0 * PI).powi(k as i32 + 1));
        }
    }
    Ok(tail)
}
