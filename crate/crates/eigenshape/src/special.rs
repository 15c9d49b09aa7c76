//! Bessel functions of the first kind, their first positive zeros, and
//! unit-ball volumes.
//!
//! Everything downstream reduces to two families of constants:
//!
//! * `j_{nu,1}`, the first positive zero of `J_nu` with `nu = n/2 - 1`,
//!   which gives the first Dirichlet eigenvalue of a ball of radius `r`
//!   as `j^2 / r^2`;
//! * `omega_n = pi^{n/2} / Gamma(n/2 + 1)`, the measure of the unit ball.
//!
//! `J_nu` is evaluated by the ascending power series
//!
//! ```text
//! J_nu(x) = sum_{m >= 0} (-1)^m / (m! Gamma(m + nu + 1)) (x/2)^{2m + nu}
//! ```
//!
//! with the term recurrence `t_{m+1} = t_m * (-(x/2)^2) / ((m+1)(m+1+nu))`
//! and compensated summation. The series is exact in spirit but cancels
//! badly for large arguments: terms peak near `e^x / (pi x)`, so in f64 the
//! absolute error floor grows exponentially with x (measured on the
//! `J_{1/2}` closed form: 5e-13 at x = 12, ~5e-10 by 20, ~1e-5 by 30).
//! The accepted domain is therefore `0 <= x <= 12`, where absolute error
//! stays below 1e-12. All first-zero brackets used here end at 7, well
//! inside that domain; larger arguments are rejected rather than returned
//! at silently degraded accuracy.

use crate::error::{Error, Result};

/// Largest argument accepted by [`bessel_j`].
pub const BESSEL_SERIES_MAX_X: f64 = 12.0;

/// Largest order accepted by [`first_bessel_zero`]; the bracket
/// `[nu+1, nu+4]` stops containing the first zero near nu = 7, and
/// dimensions 2..=8 only need nu <= 3.
pub const MAX_ZERO_ORDER: f64 = 3.0;

/// Order of a Bessel function of the first kind.
///
/// Only integer and half-integer orders are representable: these are the
/// orders `n/2 - 1` that dimension constants need, and they are the only
/// ones for which the exact Gamma recursion below applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    /// 2*nu, kept integral so the order is exact.
    twice_nu: u32,
}

impl BesselOrder {
    /// Order `nu >= 0` with `2*nu` an integer.
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain(format!(
                "Bessel order must be >= 0, got {nu}"
            )));
        }
        let twice = 2.0 * nu;
        if twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::Domain(format!(
                "Bessel order must be an integer or half-integer, got {nu}"
            )));
        }
        Ok(BesselOrder {
            twice_nu: twice as u32,
        })
    }

    /// The order `n/2 - 1` attached to dimension `n >= 2`.
    pub fn for_dimension(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
        }
        Ok(BesselOrder { twice_nu: n - 2 })
    }

    pub fn nu(self) -> f64 {
        self.twice_nu as f64 / 2.0
    }
}

/// Gamma at a positive integer or half-integer argument, exactly by the
/// recursion Gamma(x+1) = x Gamma(x) from Gamma(1) = 1 and
/// Gamma(1/2) = sqrt(pi). `twice_x` is 2x.
fn gamma_half(twice_x: u32) -> f64 {
    debug_assert!(twice_x >= 1);
    let even = twice_x.is_multiple_of(2);
    let mut val = if even {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let start = if even { 2u32 } else { 1u32 };
    let mut t = start;
    while t < twice_x {
        val *= t as f64 / 2.0;
        t += 2;
    }
    val
}

/// J_nu(x) by the ascending series. See the module doc for the accuracy
/// domain. Errors if `x < 0` or `x > 30`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("bessel_j requires x >= 0, got {x}")));
    }
    if x > BESSEL_SERIES_MAX_X {
        return Err(Error::Domain(format!(
            "bessel_j series is only reliable for x <= {BESSEL_SERIES_MAX_X}, got {x}"
        )));
    }
    let nu = order.nu();
    if x == 0.0 {
        return Ok(if order.twice_nu == 0 { 1.0 } else { 0.0 });
    }

    let half = 0.5 * x;
    // Leading term (x/2)^nu / Gamma(nu + 1).
    let mut term = half.powf(nu) / gamma_half(order.twice_nu + 2);
    let z = -half * half;

    // Kahan-compensated sum; terms alternate and can exceed the result by
    // many orders of magnitude before decaying.
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for m in 1..=400u32 {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        let mf = m as f64;
        term *= z / (mf * (mf + nu));
        // Terms grow until m ~ x/2; only test the tail once decay has set in.
        if mf > half && term.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(sum)
}

/// First positive zero `j_{nu,1}` of `J_nu`, for `0 <= nu <= 3`.
///
/// Bisection on the bracket `[nu+1, nu+4]`: `J_nu > 0` left of its first
/// zero and the second zero lies beyond `nu+4` on this order range, so the
/// endpoint signs are (+, -). The bracket is narrowed to width 1e-12.
pub fn first_bessel_zero(order: BesselOrder) -> Result<f64> {
    let nu = order.nu();
    if nu > MAX_ZERO_ORDER {
        return Err(Error::Domain(format!(
            "first_bessel_zero bracket is only valid for nu <= {MAX_ZERO_ORDER}, got {nu}"
        )));
    }
    let mut lo = nu + 1.0;
    let mut hi = nu + 4.0;
    let f_lo = bessel_j(order, lo)?;
    let f_hi = bessel_j(order, hi)?;
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::Domain(format!(
            "zero bracket [{lo}, {hi}] does not straddle a sign change for nu = {nu}"
        )));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if bessel_j(order, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Measure of the unit ball in R^n: `omega_n = pi^{n/2} / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(format!(
            "unit_ball_volume requires n >= 1, got {n}"
        )));
    }
    let pi = std::f64::consts::PI;
    Ok(pi.powf(n as f64 / 2.0) / gamma_half(n + 2))
}

/// The constants of one ambient dimension, computed once.
#[derive(Debug, Clone, Copy)]
pub struct DimensionConstants {
    pub n: u32,
    /// Measure of the unit ball.
    pub omega_n: f64,
    /// First zero of J_{n/2 - 1}.
    pub j_first: f64,
}

impl DimensionConstants {
    /// Supported for 2 <= n <= 8 (the zero bracket's validity range).
    pub fn new(n: u32) -> Result<Self> {
        let order = BesselOrder::for_dimension(n)?;
        Ok(DimensionConstants {
            n,
            omega_n: unit_ball_volume(n)?,
            j_first: first_bessel_zero(order)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    // Frozen reference value for j_{0,1}; located independently by
    // bisection of the series on (2, 3) before the implementation below
    // existed, and matching the classical tables.
    const J01: f64 = 2.404825557695773;

    fn order(nu: f64) -> BesselOrder {
        BesselOrder::new(nu).unwrap()
    }

    #[test]
    fn gamma_recursion_hits_known_values() {
        assert_relative_eq!(gamma_half(1), PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half(2), 1.0, max_relative = 1e-15);
        assert_relative_eq!(gamma_half(4), 1.0, max_relative = 1e-15); // Gamma(2) = 1
        assert_relative_eq!(gamma_half(6), 2.0, max_relative = 1e-15); // Gamma(3) = 2
        assert_relative_eq!(gamma_half(5), 0.75 * PI.sqrt(), max_relative = 1e-15); // Gamma(5/2)
        assert_relative_eq!(gamma_half(7), 15.0 / 8.0 * PI.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j(order(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(order(1.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_argument_rejected() {
        assert!(bessel_j(order(0.0), -1.0).is_err());
        assert!(bessel_j(order(0.0), 31.0).is_err());
        assert!(BesselOrder::new(-0.5).is_err());
        assert!(BesselOrder::new(0.3).is_err());
    }

    #[test]
    fn half_order_series_matches_closed_form() {
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x, an exact identity that exercises
        // the series at a half-integer order across the whole domain.
        let nu = order(0.5);
        let mut x = 0.25;
        while x <= 12.0 {
            let exact = (2.0 / (PI * x)).sqrt() * x.sin();
            assert_abs_diff_eq!(bessel_j(nu, x).unwrap(), exact, epsilon = 1e-12);
            x += 0.25;
        }
        // Past the domain cap the series floor degrades fast; out of range.
        assert!(bessel_j(nu, 12.5).is_err());
    }

    #[test]
    fn j_half_vanishes_at_pi() {
        assert_abs_diff_eq!(bessel_j(order(0.5), PI).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn first_zero_of_j0() {
        let z = first_bessel_zero(order(0.0)).unwrap();
        assert_relative_eq!(z, J01, max_relative = 1e-10);
        assert_abs_diff_eq!(bessel_j(order(0.0), z).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_j(order(0.0), J01).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn first_zero_of_j_half_is_pi() {
        let z = first_bessel_zero(order(0.5)).unwrap();
        assert_abs_diff_eq!(z, PI, epsilon = 1e-12);
    }

    #[test]
    fn first_zero_of_j1_bracket_and_derivative_identity() {
        let z = first_bessel_zero(order(1.0)).unwrap();
        assert!(z > 3.8 && z < 3.9, "j_{{1,1}} = {z} out of (3.8, 3.9)");
        assert_abs_diff_eq!(bessel_j(order(1.0), z).unwrap(), 0.0, epsilon = 1e-10);

        // J_1 = -J_0' ; central difference of the series for J_0.
        let d = 1e-6;
        for &x in &[0.5, 1.0, 2.0, z, 5.0, 8.0] {
            let fd = -(bessel_j(order(0.0), x + d).unwrap() - bessel_j(order(0.0), x - d).unwrap())
                / (2.0 * d);
            assert_abs_diff_eq!(bessel_j(order(1.0), x).unwrap(), fd, epsilon = 5e-9);
        }
    }

    #[test]
    fn zero_residuals_across_dimensions() {
        for n in 2..=8u32 {
            let c = DimensionConstants::new(n).unwrap();
            let r = bessel_j(BesselOrder::for_dimension(n).unwrap(), c.j_first).unwrap();
            assert!(r.abs() <= 1e-10, "n = {n}: |J(j)| = {:.2e}", r.abs());
        }
    }

    #[test]
    fn first_zero_increases_with_order() {
        let orders = [0.0, 0.5, 1.0, 1.5, 2.0];
        let zeros: Vec<f64> = orders
            .iter()
            .map(|&nu| first_bessel_zero(order(nu)).unwrap())
            .collect();
        for w in zeros.windows(2) {
            assert!(w[0] < w[1], "zeros not increasing: {zeros:?}");
        }
    }

    #[test]
    fn zero_order_cap_enforced() {
        assert!(first_bessel_zero(order(3.0)).is_ok());
        assert!(first_bessel_zero(order(3.5)).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(2).unwrap(), PI, max_relative = 1e-14);
        assert_relative_eq!(
            unit_ball_volume(3).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            unit_ball_volume(4).unwrap(),
            PI * PI / 2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(unit_ball_volume(1).unwrap(), 2.0, max_relative = 1e-14);
        assert!(unit_ball_volume(0).is_err());
    }

    #[test]
    fn ball_volume_recursion() {
        // omega_n = omega_{n-2} * 2 pi / n
        for n in 3..=8u32 {
            let lhs = unit_ball_volume(n).unwrap();
            let rhs = unit_ball_volume(n - 2).unwrap() * 2.0 * PI / n as f64;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }
}
