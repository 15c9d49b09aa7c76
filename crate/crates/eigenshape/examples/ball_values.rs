//! Closed-form ball quantities: the building blocks of the two-ball bound.
//!
//! Run with: `cargo run --example ball_values`

use eigenshape::closed_form::{
    alpha_critical, equal_split_value, faber_krahn_value, lambda_ball, radius_for_measure,
    theorem_envelope,
};
use eigenshape::special::{first_bessel_zero, BesselOrder};

fn main() -> eigenshape::Result<()> {
    // The planar story is driven by one constant: the first zero of J_0.
    let j = first_bessel_zero(BesselOrder::new(0.0)?)?;
    println!("first zero of J_0                 {j:.15}");

    let measure = 1.0;
    let r = radius_for_measure(2, measure)?;
    println!("disk of measure 1: radius         {r:.15}");
    println!(
        "lambda of that disk (j^2 / r^2)   {:.12}",
        lambda_ball(2, r)?
    );
    println!(
        "minimum lambda at measure 1       {:.12}",
        faber_krahn_value(2, measure)?
    );

    // The penalized minimum over ALL shapes of measure 1 follows a
    // two-branch envelope in alpha: a unit-slope line from the one-ball
    // value, then a flat level where two equal balls take over.
    let ac = alpha_critical(2)?;
    println!("branch-switch threshold alpha_c   {ac:.12}");
    println!(
        "flat level (two equal balls)      {:.12}",
        equal_split_value(2, measure)?
    );

    println!("\n  alpha      envelope      branch");
    for k in 0..=8 {
        let alpha = 2.0 * ac * k as f64 / 8.0;
        let env = theorem_envelope(2, measure, alpha)?;
        println!("  {alpha:7.3}    {:10.6}    {}", env.value, env.branch);
    }

    // Everything scales: measure m divides both the values and the
    // threshold (in the plane, |Omega|^{2/n} = |Omega|).
    let m = 0.25;
    println!(
        "\nat measure {m}: min lambda {:.6}, kink at alpha = {:.6}",
        faber_krahn_value(2, m)?,
        ac / m
    );
    Ok(())
}
