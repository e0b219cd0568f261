//! Integer-order Bessel functions of the first kind and the two-argument
//! generalized Bessel function
//!
//!   A_n(a,b) = Σ_k J_{n-2k}(a) J_k(b),
//!
//! the Fourier coefficients of exp(i[a sin φ + b sin 2φ]):
//!
//!   exp(i[a sin φ + b sin 2φ]) = Σ_n A_n(a,b) e^{inφ}.
//!
//! The mode ladder of the plane-wave solution reads its two phase arguments
//! directly off the oscillatory exponent, so the arguments stay small
//! (|a|, |b| of order A/ω); the power series is accurate to near machine
//! precision in that regime and is guarded against the large-argument domain
//! where it would lose digits.

use crate::{Error, Result};

/// Largest |x| accepted by the power series before cancellation erodes the
/// result below ~1e-12 relative accuracy.
pub const SERIES_DOMAIN: f64 = 12.0;

/// Bessel function of the first kind of integer order, J_n(x), by the
/// alternating power series with term recurrence. J_{-n}(x) = (-1)^n J_n(x).
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    if x.abs() > SERIES_DOMAIN {
        return Err(Error::Numerical(format!(
            "Bessel series argument |{x}| exceeds the accurate domain {SERIES_DOMAIN}"
        )));
    }
    if n < 0 {
        let v = bessel_j(-n, x)?;
        return Ok(if n % 2 == 0 { v } else { -v });
    }
    let n = n as u32;
    let half = 0.5 * x;
    // leading term (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
        if term == 0.0 {
            return Ok(0.0);
        }
    }
    let mut sum = term;
    let x2 = half * half;
    for m in 1..200u32 {
        term *= -x2 / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    Ok(sum)
}

/// Generalized Bessel function A_n(a,b) = Σ_k J_{n-2k}(a) J_k(b).
///
/// The k-sum is truncated where both factors are negligible; the tail is
/// checked and reported if it fails to fall below the requested tolerance.
pub fn generalized_bessel(n: i32, a: f64, b: f64) -> Result<f64> {
    // J_k(b) dies superexponentially for |k| beyond |b|; J_{n-2k}(a) confines
    // k to a window around n/2 of half-width ~(|a| + margin)/2.
    let margin = 28;
    let kb = margin + b.abs().ceil() as i32;
    let half_window = (margin as f64 + a.abs()).ceil() as i32 / 2 + 1;
    let k_lo = (-kb).min(n / 2 - half_window);
    let k_hi = kb.max(n / 2 + half_window);
    let mut sum = 0.0;
    for k in k_lo..=k_hi {
        sum += bessel_j(n - 2 * k, a)? * bessel_j(k, b)?;
    }
    // tail check at both ends
    let tail = bessel_j(n - 2 * (k_lo - 1), a)?.abs() * bessel_j(k_lo - 1, b)?.abs()
        + bessel_j(n - 2 * (k_hi + 1), a)?.abs() * bessel_j(k_hi + 1, b)?.abs();
    if tail > 1e-16 {
        return Err(Error::Numerical(format!(
            "generalized Bessel k-sum tail {tail} above tolerance for n={n}, a={a}, b={b}"
        )));
    }
    Ok(sum)
}
