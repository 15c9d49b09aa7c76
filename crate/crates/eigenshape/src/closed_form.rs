//! Exact spectral values on balls and unions of two disjoint balls, the
//! threshold `alpha_c`, the lower-bound envelope, and the scaling law.
//! Nothing here touches a grid.
//!
//! Notation: `j` is the first zero of `J_{n/2-1}`, `omega` the unit-ball
//! measure in dimension `n`. The first Dirichlet eigenvalue of a ball of
//! radius `r` is `j^2 / r^2`; among all shapes of a given measure the ball
//! minimizes it, with minimum `omega^{2/n} j^2 / measure^{2/n}`.
//!
//! The mass-penalized eigenvalue of a ball union is piecewise in `alpha`:
//! it rises with slope one from the plain eigenvalue until it hits the
//! twisted value `lambda_T`, and is flat afterwards. `lambda_T` of a single
//! ball or of an unequal union has no closed form and must be supplied by a
//! grid solver; the equal union is the exception, where
//! `lambda_T = lambda_Delta` and the curve is flat from `alpha = 0` on.

use crate::error::{Error, Result};
use crate::special::{first_bessel_zero, unit_ball_volume, BesselOrder};

/// Which side of the envelope's kink a value sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeBranch {
    /// `faber_krahn_value + alpha`, attained by the single ball.
    OneBallLinear,
    /// The alpha-independent value of two equal balls.
    TwoEqualBallsFlat,
}

impl std::fmt::Display for EnvelopeBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvelopeBranch::OneBallLinear => write!(f, "one-ball-linear"),
            EnvelopeBranch::TwoEqualBallsFlat => write!(f, "two-equal-balls-flat"),
        }
    }
}

/// A point on the lower-bound envelope.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeValue {
    pub alpha: f64,
    pub value: f64,
    pub branch: EnvelopeBranch,
}

/// A ball (`r2 = 0`) or a union of two disjoint balls, `r1 >= r2`.
#[derive(Debug, Clone, Copy)]
pub struct BallUnionSpec {
    n: u32,
    r1: f64,
    r2: f64,
}

impl BallUnionSpec {
    /// Dimension 2..=8 (the range the zero bracket covers), radii
    /// `r1 >= r2 >= 0` with `r1 > 0`.
    pub fn new(n: u32, r1: f64, r2: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(r1 > 0.0) || !(r2 >= 0.0) || r1 < r2 {
            return Err(Error::Domain(format!(
                "ball union requires r1 >= r2 >= 0 and r1 > 0, got r1 = {r1}, r2 = {r2}"
            )));
        }
        Ok(BallUnionSpec { n, r1, r2 })
    }

    /// The single ball holding the whole measure.
    pub fn single(n: u32, measure: f64) -> Result<Self> {
        Self::new(n, radius_for_measure(n, measure)?, 0.0)
    }

    /// Two equal balls holding the measure together.
    pub fn equal_split(n: u32, measure: f64) -> Result<Self> {
        let r = radius_for_measure(n, measure / 2.0)?;
        Self::new(n, r, r)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn is_single(&self) -> bool {
        self.r2 == 0.0
    }

    pub fn is_equal(&self) -> bool {
        self.r1 == self.r2
    }

    /// `omega_n (r1^n + r2^n)`.
    pub fn measure(&self) -> f64 {
        let omega = unit_ball_volume(self.n).expect("validated dimension");
        omega * (self.r1.powi(self.n as i32) + self.r2.powi(self.n as i32))
    }

    /// The union scaled by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("scale factor must be > 0, got {t}")));
        }
        Self::new(self.n, self.r1 * t, self.r2 * t)
    }
}

fn check_dimension(n: u32) -> Result<()> {
    if !(2..=8).contains(&n) {
        return Err(Error::Domain(format!(
            "closed forms are supported for dimensions 2..=8, got {n}"
        )));
    }
    Ok(())
}

/// First zero of `J_{n/2-1}`, the order tied to dimension `n`.
pub fn j_first(n: u32) -> Result<f64> {
    check_dimension(n)?;
    first_bessel_zero(BesselOrder::for_dimension(n)?)
}

/// Radius of the ball of the given measure.
pub fn radius_for_measure(n: u32, measure: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(measure > 0.0) {
        return Err(Error::Domain(format!("measure must be > 0, got {measure}")));
    }
    Ok((measure / unit_ball_volume(n)?).powf(1.0 / n as f64))
}

/// First Dirichlet eigenvalue of a ball of radius `r`: `j^2 / r^2`.
pub fn lambda_ball(n: u32, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("ball radius must be > 0, got {r}")));
    }
    let j = j_first(n)?;
    Ok(j * j / (r * r))
}

/// The minimum of the first eigenvalue over shapes of the given measure,
/// attained by the ball: `omega^{2/n} j^2 / measure^{2/n}`.
pub fn faber_krahn_value(n: u32, measure: f64) -> Result<f64> {
    if !(measure > 0.0) {
        return Err(Error::Domain(format!("measure must be > 0, got {measure}")));
    }
    lambda_ball(n, radius_for_measure(n, measure)?)
}

/// First eigenvalue of a two-ball union: that of the larger ball.
pub fn lambda_dirichlet_two_balls(spec: &BallUnionSpec) -> Result<f64> {
    lambda_ball(spec.n, spec.r1)
}

/// Threshold `alpha_c = j^2 omega^{2/n} (2^{2/n} - 1)`.
///
/// `alpha * measure^{2/n}` crossing this value is where the envelope's
/// optimal shape switches from one ball to two equal balls; equivalently it
/// is the gap, at measure one, between the two-equal-ball value and the
/// one-ball value.
pub fn alpha_critical(n: u32) -> Result<f64> {
    let j = j_first(n)?;
    let omega = unit_ball_volume(n)?;
    let two_n = 2.0 / n as f64;
    Ok(j * j * omega.powf(two_n) * (2.0_f64.powf(two_n) - 1.0))
}

/// Mass-penalized eigenvalue of a single ball. `lambda_t_ball` is the
/// ball's twisted value, supplied externally (no closed form exists);
/// it must dominate the plain eigenvalue.
pub fn mu_single_ball(n: u32, r: f64, alpha: f64, lambda_t_ball: f64) -> Result<f64> {
    let lambda = lambda_ball(n, r)?;
    if lambda_t_ball < lambda {
        return Err(Error::Domain(format!(
            "lambda_T = {lambda_t_ball} below the ball eigenvalue {lambda}"
        )));
    }
    // Rising branch covers all alpha <= lambda_T - lambda, including every
    // negative alpha.
    if alpha <= lambda_t_ball - lambda {
        Ok(lambda + alpha)
    } else {
        Ok(lambda_t_ball)
    }
}

/// Mass-penalized eigenvalue of a two-ball union. For equal radii and
/// `alpha >= 0` the value is flat at the union's plain eigenvalue (the
/// twisted and plain values coincide there) and the `lambda_t_union` input
/// is not consulted beyond validation.
pub fn mu_two_balls(spec: &BallUnionSpec, alpha: f64, lambda_t_union: f64) -> Result<f64> {
    let lambda = lambda_dirichlet_two_balls(spec)?;
    if lambda_t_union < lambda {
        return Err(Error::Domain(format!(
            "lambda_T = {lambda_t_union} below the union eigenvalue {lambda}"
        )));
    }
    if spec.is_equal() && alpha >= 0.0 {
        return Ok(lambda);
    }
    if alpha <= lambda_t_union - lambda {
        Ok(lambda + alpha)
    } else {
        Ok(lambda_t_union)
    }
}

/// The two-equal-ball value at the given measure, the envelope's flat level.
pub fn equal_split_value(n: u32, measure: f64) -> Result<f64> {
    lambda_dirichlet_two_balls(&BallUnionSpec::equal_split(n, measure)?)
}

/// Lower-bound envelope: the best value over ball unions of the measure.
///
/// * `alpha * measure^{2/n} <= alpha_c` (and all `alpha < 0`): the single
///   ball wins, `value = faber_krahn_value + alpha`;
/// * beyond the threshold: two equal balls win, flat value
///   `2^{2/n} omega^{2/n} j^2 / measure^{2/n}`.
///
/// Continuous and nondecreasing in alpha; the tie carries the linear tag.
pub fn theorem_envelope(n: u32, measure: f64, alpha: f64) -> Result<EnvelopeValue> {
    let fk = faber_krahn_value(n, measure)?;
    let scaled_alpha = alpha * measure.powf(2.0 / n as f64);
    if alpha < 0.0 || scaled_alpha <= alpha_critical(n)? {
        Ok(EnvelopeValue {
            alpha,
            value: fk + alpha,
            branch: EnvelopeBranch::OneBallLinear,
        })
    } else {
        Ok(EnvelopeValue {
            alpha,
            value: equal_split_value(n, measure)?,
            branch: EnvelopeBranch::TwoEqualBallsFlat,
        })
    }
}

/// Value side of the scaling law `mu(t Omega; alpha) = t^{-2} mu(Omega; t^2 alpha)`.
pub fn scaling_transport(mu_value: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "scaling factor must be > 0, got {t}"
        )));
    }
    Ok(mu_value / (t * t))
}

/// Penalty side of the scaling law.
pub fn alpha_transport(alpha: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "scaling factor must be > 0, got {t}"
        )));
    }
    Ok(alpha * t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    // Frozen square of the first J_0 zero.
    const J01_SQ: f64 = 5.783185962946785;

    #[test]
    fn ball_eigenvalue() {
        assert_relative_eq!(lambda_ball(2, 1.0).unwrap(), J01_SQ, max_relative = 1e-12);
        assert_relative_eq!(lambda_ball(3, 1.0).unwrap(), PI * PI, max_relative = 1e-12);
        assert_relative_eq!(
            lambda_ball(2, 2.0).unwrap(),
            J01_SQ / 4.0,
            max_relative = 1e-12
        );
        assert!(lambda_ball(2, 0.0).is_err());
    }

    #[test]
    fn faber_krahn_examples() {
        assert_relative_eq!(
            faber_krahn_value(2, PI).unwrap(),
            J01_SQ,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            faber_krahn_value(2, 1.0).unwrap(),
            PI * J01_SQ,
            max_relative = 1e-12
        );
        // Printed reference magnitude.
        assert_abs_diff_eq!(faber_krahn_value(2, 1.0).unwrap(), 18.168, epsilon = 5e-4);
        assert_relative_eq!(
            faber_krahn_value(3, 4.0 * PI / 3.0).unwrap(),
            PI * PI,
            max_relative = 1e-12
        );
        // Coincides with lambda_ball at the matching radius.
        let r = radius_for_measure(2, 2.7).unwrap();
        assert_relative_eq!(
            faber_krahn_value(2, 2.7).unwrap(),
            lambda_ball(2, r).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn union_eigenvalue_is_larger_ball() {
        let equal = BallUnionSpec::new(2, 1.0, 1.0).unwrap();
        let nested = BallUnionSpec::new(2, 1.0, 0.5).unwrap();
        let scaled = BallUnionSpec::new(2, 2.0, 1.0).unwrap();
        assert_relative_eq!(
            lambda_dirichlet_two_balls(&equal).unwrap(),
            J01_SQ,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda_dirichlet_two_balls(&nested).unwrap(),
            J01_SQ,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda_dirichlet_two_balls(&scaled).unwrap(),
            J01_SQ / 4.0,
            max_relative = 1e-12
        );

        let single = BallUnionSpec::new(2, 1.0, 0.0).unwrap();
        assert_relative_eq!(
            lambda_dirichlet_two_balls(&single).unwrap(),
            lambda_ball(2, 1.0).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn spec_validation() {
        assert!(BallUnionSpec::new(2, 1.0, 2.0).is_err());
        assert!(BallUnionSpec::new(2, 0.0, 0.0).is_err());
        assert!(BallUnionSpec::new(1, 1.0, 0.0).is_err());
        assert!(BallUnionSpec::new(9, 1.0, 0.0).is_err());
        let s = BallUnionSpec::new(3, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.measure(), 8.0 * PI / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn threshold_value() {
        // n = 2: alpha_c = pi j^2, since 2^{2/2} - 1 = 1 and omega_2 = pi.
        assert_relative_eq!(
            alpha_critical(2).unwrap(),
            PI * J01_SQ,
            max_relative = 1e-12
        );
        // Full-precision product, frozen: pi * 2.404825557695773^2.
        assert_abs_diff_eq!(
            alpha_critical(2).unwrap(),
            18.16841453553337,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(alpha_critical(2).unwrap(), 18.168, epsilon = 1e-3);
        // n = 3 by direct substitution, j_{1/2,1} = pi.
        let expected =
            PI * PI * (4.0 * PI / 3.0_f64).powf(2.0 / 3.0) * (2.0_f64.powf(2.0 / 3.0) - 1.0);
        assert_relative_eq!(alpha_critical(3).unwrap(), expected, max_relative = 1e-12);
        for n in 2..=8 {
            assert!(alpha_critical(n).unwrap() > 0.0);
        }
    }

    #[test]
    fn threshold_is_gap_between_branches_at_measure_one() {
        for n in 2..=8 {
            let gap = equal_split_value(n, 1.0).unwrap() - faber_krahn_value(n, 1.0).unwrap();
            assert_relative_eq!(alpha_critical(n).unwrap(), gap, max_relative = 1e-12);
        }
    }

    #[test]
    fn single_ball_piecewise() {
        let lt = 3.0 * J01_SQ; // any admissible stand-in
        assert_relative_eq!(
            mu_single_ball(2, 1.0, 0.0, lt).unwrap(),
            J01_SQ,
            max_relative = 1e-12
        );
        // Cancellation of two ~5.8 values: a few ulps of slack.
        assert_abs_diff_eq!(
            mu_single_ball(2, 1.0, -J01_SQ, lt).unwrap(),
            0.0,
            epsilon = 1e-11
        );
        assert_relative_eq!(
            mu_single_ball(2, 1.0, 10.0 * lt, lt).unwrap(),
            lt,
            max_relative = 1e-15
        );
        assert!(mu_single_ball(2, 1.0, 0.0, J01_SQ * 0.9).is_err());
    }

    #[test]
    fn equal_balls_are_flat() {
        let spec = BallUnionSpec::new(2, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            mu_two_balls(&spec, 7.0, J01_SQ).unwrap(),
            J01_SQ,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mu_two_balls(&spec, 0.0, J01_SQ).unwrap(),
            J01_SQ,
            max_relative = 1e-12
        );

        // Equal split of measure 1: flat level 2 pi j^2.
        let unit = BallUnionSpec::equal_split(2, 1.0).unwrap();
        assert_relative_eq!(unit.measure(), 1.0, max_relative = 1e-12);
        let lam = lambda_dirichlet_two_balls(&unit).unwrap();
        assert_relative_eq!(
            mu_two_balls(&unit, 123.0, lam).unwrap(),
            2.0 * PI * J01_SQ,
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(
            mu_two_balls(&unit, 123.0, lam).unwrap(),
            36.3368,
            epsilon = 5e-4
        );
    }

    #[test]
    fn unequal_balls_linear_at_zero() {
        let spec = BallUnionSpec::new(2, 1.0, 0.5).unwrap();
        let lt = 2.0 * J01_SQ;
        assert_relative_eq!(
            mu_two_balls(&spec, 0.0, lt).unwrap(),
            J01_SQ,
            max_relative = 1e-12
        );
        // Negative alpha stays on the rising branch.
        assert_relative_eq!(
            mu_two_balls(&spec, -1.0, lt).unwrap(),
            J01_SQ - 1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn envelope_branches_and_continuity() {
        let at0 = theorem_envelope(2, 1.0, 0.0).unwrap();
        assert_eq!(at0.branch, EnvelopeBranch::OneBallLinear);
        assert_relative_eq!(at0.value, PI * J01_SQ, max_relative = 1e-12);

        let big = theorem_envelope(2, 1.0, 100.0).unwrap();
        assert_eq!(big.branch, EnvelopeBranch::TwoEqualBallsFlat);
        assert_relative_eq!(big.value, 2.0 * PI * J01_SQ, max_relative = 1e-12);

        // Continuity across the kink, any dimension and measure.
        for n in 2..=8 {
            for &measure in &[0.3f64, 1.0, 7.5] {
                let ac = alpha_critical(n).unwrap() / measure.powf(2.0 / n as f64);
                let eps = ac * 1e-13;
                let left = theorem_envelope(n, measure, ac - eps).unwrap();
                let right = theorem_envelope(n, measure, ac + eps).unwrap();
                assert_eq!(left.branch, EnvelopeBranch::OneBallLinear);
                assert_eq!(right.branch, EnvelopeBranch::TwoEqualBallsFlat);
                assert_relative_eq!(left.value, right.value, max_relative = 1e-12);
                // At the exact tie the convention is the linear tag. Only
                // checkable where the measure rescaling is roundoff-free.
                if measure == 1.0 {
                    assert_eq!(
                        theorem_envelope(n, measure, ac).unwrap().branch,
                        EnvelopeBranch::OneBallLinear
                    );
                }
            }
        }
    }

    #[test]
    fn envelope_monotone_and_consistent_with_two_balls() {
        let mut prev = f64::NEG_INFINITY;
        for k in 0..200 {
            let alpha = -5.0 + k as f64 * 0.25;
            let v = theorem_envelope(2, 1.0, alpha).unwrap().value;
            assert!(v >= prev - 1e-13);
            prev = v;
        }
        // Flat branch equals the equal-split union value.
        let flat = theorem_envelope(2, 1.0, 1e9).unwrap().value;
        let spec = BallUnionSpec::equal_split(2, 1.0).unwrap();
        assert_relative_eq!(
            flat,
            lambda_dirichlet_two_balls(&spec).unwrap(),
            max_relative = 1e-12
        );
        // Negative extension crosses zero exactly at -faber_krahn_value.
        let fk = faber_krahn_value(2, 1.0).unwrap();
        assert_abs_diff_eq!(
            theorem_envelope(2, 1.0, -fk).unwrap().value,
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn scaling_round_trip() {
        assert_relative_eq!(
            scaling_transport(J01_SQ, 2.0).unwrap(),
            J01_SQ / 4.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            alpha_transport(3.0, 2.0).unwrap(),
            12.0,
            max_relative = 1e-15
        );
        let mu = 7.31;
        let t = 1.7;
        let back = scaling_transport(scaling_transport(mu, t).unwrap(), 1.0 / t).unwrap();
        assert_relative_eq!(back, mu, max_relative = 1e-14);
        assert!(scaling_transport(1.0, 0.0).is_err());
        assert!(alpha_transport(1.0, -1.0).is_err());
    }

    #[test]
    fn scaling_coherence_on_equal_unions() {
        // mu(t A, alpha) = t^{-2} mu(A, t^2 alpha) for equal-ball unions.
        let spec = BallUnionSpec::equal_split(2, 1.0).unwrap();
        let lam = lambda_dirichlet_two_balls(&spec).unwrap();
        let t = 1.9;
        let scaled = spec.scaled(t).unwrap();
        let lam_scaled = lambda_dirichlet_two_balls(&scaled).unwrap();
        for &alpha in &[0.0, 1.0, 17.0, 400.0] {
            let lhs = mu_two_balls(&scaled, alpha, lam_scaled).unwrap();
            let rhs = scaling_transport(
                mu_two_balls(&spec, alpha_transport(alpha, t).unwrap(), lam).unwrap(),
                t,
            )
            .unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }
}
