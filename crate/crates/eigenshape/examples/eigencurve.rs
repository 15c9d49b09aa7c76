//! Sweep the penalized eigenvalue over the penalty strength and watch the
//! curve: linear with slope one, then a kink, then a plateau.
//!
//! Run with: `cargo run --example eigencurve`

use std::sync::Arc;

use eigenshape::eigensolver::{lambda_dirichlet, SolveOptions};
use eigenshape::grid::{make_disk, make_rectangle};
use eigenshape::variational::lambda_twisted;

fn main() -> eigenshape::Result<()> {
    let h = 1.0 / 24.0;
    let tol = 1e-9;

    // A unit-measure disk and square, rasterized on the same grid spacing.
    let disk = Arc::new(make_disk(0.5641895835477563, h)?);
    let square = Arc::new(make_rectangle(1.0, 1.0, h)?);

    for (name, mask) in [("disk", &disk), ("square", &square)] {
        // The two alpha-independent numbers that determine the whole curve:
        let ld = lambda_dirichlet(mask, SolveOptions::with_tol(tol))?.value;
        let lt = lambda_twisted(mask, tol, 4)?.value;
        println!("{name}: {} cells", mask.cell_count());
        println!("  plain eigenvalue    lambda_D = {ld:.6}");
        println!("  constrained minimum lambda_T = {lt:.6}");
        println!(
            "  predicted kink at alpha = lambda_T - lambda_D = {:.6}",
            lt - ld
        );

        // mu(alpha) = min(lambda_D + alpha, lambda_T): rises, then saturates.
        println!("   alpha        mu    branch");
        for k in 0..=8 {
            let alpha = 1.5 * (lt - ld) * k as f64 / 8.0;
            let (mu, branch) = if ld + alpha <= lt {
                (ld + alpha, "linear")
            } else {
                (lt, "twisted")
            };
            println!("  {alpha:7.3}  {mu:8.4}    {branch}");
        }
        println!();
    }
    Ok(())
}
