//! Exact reference values used as limits and checks.
//!
//! * `r0 → 0`: the model becomes a free particle in the unit disk, with
//!   energies `j_{ν,n+1}² / 2` where `j_{ν,k}` is the k-th zero of `J_ν`.
//! * `r0 → ∞`: the free two-dimensional hydrogen atom, `-2 / (2n + 2ν + 1)²`.
//! * `β = 3/4` without field: the ground state is known in closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Radial and angular quantum numbers `(n, ν = |m|)` of a field-free level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiskLevel {
    pub n: usize,
    pub nu: usize,
}

impl DiskLevel {
    pub fn new(n: usize, nu: usize) -> Self {
        Self { n, nu }
    }
}

const SERIES_LIMIT: f64 = 12.0;

fn bessel_series(nu: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = 1.0;
    for k in 1..=nu {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= -q / (k as f64 * (k + nu) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k as f64 > half {
            break;
        }
        if k > 500 {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence, normalized with `J_0 + 2 Σ J_2k = 1`.
fn bessel_backward(nu: usize, x: f64) -> f64 {
    let top = (nu as f64).max(x);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut even_sum = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * cur - next; // J_{k-1}
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            even_sum *= 1e-250;
            wanted *= 1e-250;
        }
        if k - 1 == nu {
            wanted = cur;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            even_sum += cur;
        }
    }
    // cur is now J_0.
    wanted / (cur + 2.0 * even_sum)
}

/// Bessel function of the first kind of integer order, for `x >= 0`.
pub fn bessel_j(nu: usize, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "bessel_j needs finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(if nu == 0 { 1.0 } else { 0.0 });
    }
    Ok(if x <= SERIES_LIMIT {
        bessel_series(nu, x)
    } else {
        bessel_backward(nu, x)
    })
}

fn bessel_j_signed(order: isize, x: f64) -> f64 {
    let value = bessel_j(order.unsigned_abs(), x).unwrap_or(f64::NAN);
    if order < 0 && order % 2 != 0 {
        -value
    } else {
        value
    }
}

/// `J_ν'(x) = (J_{ν-1}(x) - J_{ν+1}(x)) / 2`, with `J_{-1} = -J_1`.
pub fn bessel_j_derivative(nu: usize, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "bessel_j_derivative needs finite x >= 0, got {x}"
        )));
    }
    let nu = nu as isize;
    Ok(0.5 * (bessel_j_signed(nu - 1, x) - bessel_j_signed(nu + 1, x)))
}

/// McMahon's large-zero expansion.
fn mcmahon(nu: usize, k: usize) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let b = (k as f64 + 0.5 * nu as f64 - 0.25) * PI;
    let b8 = 8.0 * b;
    b - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

/// Number of sign changes of `J_ν` on `(ν, x)`. `J_ν` has no zero below ν.
fn zeros_below(nu: usize, x: f64) -> usize {
    const STEP: f64 = 0.05;
    let mut count = 0;
    let mut a = nu as f64;
    let mut fa = bessel_j(nu, a.max(1e-3)).unwrap_or(0.0);
    while a < x {
        let b = (a + STEP).min(x);
        let fb = bessel_j(nu, b).unwrap_or(0.0);
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            count += 1;
        }
        if fb != 0.0 {
            fa = fb;
        }
        a = b;
    }
    count
}

fn newton(nu: usize, mut x: f64, lo: f64, hi: f64) -> Result<f64> {
    for iter in 0..60 {
        let f = bessel_j(nu, x)?;
        let df = bessel_j_derivative(nu, x)?;
        if df == 0.0 {
            return Err(Error::Numerical(format!(
                "zero derivative of J_{nu} at x = {x} (iteration {iter})"
            )));
        }
        let step = f / df;
        x -= step;
        if !(x > lo && x < hi) {
            return Err(Error::Numerical(format!(
                "Newton iterate {x} for a zero of J_{nu} left the bracket ({lo}, {hi}) at iteration {iter}"
            )));
        }
        if step.abs() <= 1e-13 * x {
            // One more step settles the last bits.
            let f = bessel_j(nu, x)?;
            let df = bessel_j_derivative(nu, x)?;
            return Ok(if df != 0.0 { x - f / df } else { x });
        }
    }
    Err(Error::Numerical(format!(
        "Newton for a zero of J_{nu} did not converge near {x}"
    )))
}

/// The k-th positive zero `j_{ν,k}` of `J_ν` (k counts from 1).
///
/// McMahon's expansion seeds Newton's method. When the seed is poor (small k,
/// large ν) and Newton lands on a neighbouring zero, the k-th zero is
/// bracketed by scanning for sign changes and Newton restarts from the
/// bracket midpoint.
pub fn bessel_zero(nu: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("zeros are counted from k = 1".into()));
    }
    let guess = mcmahon(nu, k);
    let lo = nu as f64;
    let hi = guess + PI * (k as f64 + nu as f64);
    if let Ok(x) = newton(nu, guess.max(lo + 1e-3), lo, hi) {
        if zeros_below(nu, x - 1e-6) == k - 1 {
            return Ok(x);
        }
    }
    // Scan for the k-th sign change.
    const STEP: f64 = 0.05;
    let mut a = lo.max(1e-3);
    let mut fa = bessel_j(nu, a)?;
    let mut seen = 0;
    while a < hi {
        let b = a + STEP;
        let fb = bessel_j(nu, b)?;
        if (fa < 0.0) != (fb < 0.0) && fa != 0.0 {
            seen += 1;
            if seen == k {
                let x = newton(nu, 0.5 * (a + b), a - STEP, b + STEP)?;
                return Ok(x);
            }
        }
        a = b;
        fa = fb;
    }
    Err(Error::Numerical(format!(
        "could not bracket zero {k} of J_{nu} below {hi}"
    )))
}

/// Dirichlet eigenvalue of `-1/2 ∇²` on the unit disk: `j_{ν,n+1}² / 2`.
pub fn particle_in_box_energy(level: DiskLevel) -> Result<f64> {
    let j = bessel_zero(level.nu, level.n + 1)?;
    Ok(0.5 * j * j)
}

/// Free two-dimensional hydrogen atom: `-2 / (2n + 2ν + 1)²`.
pub fn free_atom_energy(level: DiskLevel) -> f64 {
    let d = (2 * level.n + 2 * level.nu + 1) as f64;
    -2.0 / (d * d)
}

pub const BETA_EXACT: f64 = 0.75;
pub const BETA_EXACT_GROUND_ENERGY: f64 = -0.125;

/// Normalized ground state `(1 - r) e^((1-r)/2) / √(3e - 8)` of
/// `-1/2 ∇² - (3/4)/r` on the unit disk, and its energy `-1/8`.
///
/// The normalization is per unit angle: `∫ R² r dr = 1`. Multiply by
/// `1/√(2π)` for a wavefunction normalized on the disk.
pub fn exact_beta34_ground(r: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1]")));
    }
    let norm = (3.0 * std::f64::consts::E - 8.0).sqrt();
    Ok((
        (1.0 - r) * (0.5 * (1.0 - r)).exp() / norm,
        BETA_EXACT_GROUND_ENERGY,
    ))
}
