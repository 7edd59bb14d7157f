//! Gauss hypergeometric function `2F1(a, b; c; z)` for real arguments on
//! `z <= 1`.
//!
//! The gain-averaging closed form only ever needs `a = 1/2`, `b = -2/eta`,
//! `c = 1`, but nothing here hard-codes that; the evaluator covers any real
//! parameters for which its three routes are valid:
//!
//! * `|z|` small enough (`-1/2 <= z < 1`): the defining power series, summed
//!   with compensated addition.
//! * `z < -1/2`: the Pfaff transformation `w = z/(z-1)` maps the argument
//!   into `(1/3, 1)` where the series converges; the variant that shifts the
//!   larger of `a`, `b` out of the series is chosen so the transformed terms
//!   decay fastest.
//! * `z = 1`: Gauss's summation `Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b))`, valid for
//!   `c - a - b > 0`.
//!
//! Arguments `z > 1` (off the principal branch) and parameter combinations
//! outside the routes above produce a domain error rather than a guess.

use crate::error::{Error, Result};

use super::gamma::gamma_fn;

/// Unit-relative tail threshold for series termination: once the bounded
/// geometric tail falls below this fraction of the accumulated sum, another
/// term cannot move the result at f64 resolution.
const SERIES_EPS: f64 = 5e-17;

/// Hard iteration cap. The series routes converge within a few thousand
/// terms except when the (transformed) argument is within about 1e-5 of 1,
/// where the caller receives a non-convergence error instead of a stall.
const MAX_TERMS: usize = 20_000_000;

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z <= 1`.
///
/// # Errors
///
/// * [`Error::Domain`] if `z > 1`, if `c` is zero or a negative integer
///   (the series coefficients hit a pole), or if `z == 1` with
///   `c - a - b <= 0` (the series diverges there).
/// * [`Error::NonConvergent`] if the series needs more than the iteration
///   cap, which happens only for arguments within roughly 1e-5 of 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::Domain {
            what: "hypergeometric function requires finite arguments".to_string(),
        });
    }
    if c <= 0.0 && c == c.floor() {
        return Err(Error::Domain {
            what: format!("hypergeometric function has a pole at c = {c}"),
        });
    }
    if z > 1.0 {
        return Err(Error::Domain {
            what: format!("hypergeometric argument z = {z} is beyond the principal branch z <= 1"),
        });
    }
    if z == 1.0 {
        return gauss_summation(a, b, c);
    }
    if z < -0.5 {
        // Pfaff: 2F1(a, b; c; z) = (1-z)^{-b} 2F1(c-a, b; c; w) with
        // w = z/(z-1) in (1/3, 1). The mirrored form swaps the roles of a
        // and b. Keeping the smaller parameter inside the series makes the
        // transformed terms decay like k^{min(a,b)-max(a,b)-1}, which is
        // what guarantees convergence as w approaches 1 for z -> -inf.
        let w = z / (z - 1.0);
        return if a >= b {
            Ok((1.0 - z).powf(-b) * series(c - a, b, c, w)?)
        } else {
            Ok((1.0 - z).powf(-a) * series(a, c - b, c, w)?)
        };
    }
    series(a, b, c, z)
}

/// `2F1(a, b; c; 1)` via Gauss's summation theorem.
fn gauss_summation(a: f64, b: f64, c: f64) -> Result<f64> {
    if c - a - b <= 0.0 {
        return Err(Error::Domain {
            what: format!(
                "hypergeometric series diverges at z = 1 for c - a - b = {} <= 0",
                c - a - b
            ),
        });
    }
    if c - a <= 0.0 || c - b <= 0.0 {
        return Err(Error::Domain {
            what: "Gauss summation at z = 1 needs c - a > 0 and c - b > 0".to_string(),
        });
    }
    Ok(gamma_fn(c)? * gamma_fn(c - a - b)? / (gamma_fn(c - a)? * gamma_fn(c - b)?))
}

/// Defining power series, valid for `|z| < 1`.
///
/// Terms follow the ratio recurrence
/// `t_{k+1} = t_k (a+k)(b+k) / ((c+k)(k+1)) z`, accumulated with Kahan
/// compensation. Termination uses the geometric tail bound
/// `|t| |z| / (1 - |z|)`, sound here because the term ratio magnitude
/// approaches `|z|` from below once `k` exceeds the parameters.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut sum = 1.0f64;
    let mut compensation = 0.0f64;
    let mut term = 1.0f64;
    let tail_factor = z.abs() / (1.0 - z.abs());
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        if term == 0.0 {
            // A non-positive-integer a or b terminates the series exactly.
            break;
        }
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        // Small k can precede the asymptotic ratio regime; do not trust the
        // tail bound until a few terms are in.
        if k >= 4 && term.abs() * tail_factor <= SERIES_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    let tail = term.abs() * tail_factor;
    if tail <= SERIES_EPS * sum.abs() {
        return Ok(sum);
    }
    Err(Error::NonConvergent {
        what: format!("hypergeometric series at z = {z}"),
        achieved: tail / sum.abs().max(f64::MIN_POSITIVE),
        requested: SERIES_EPS,
    })
}
