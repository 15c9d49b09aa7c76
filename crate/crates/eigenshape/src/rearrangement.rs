//! Discrete Schwarz rearrangement and the symmetrization bound chain.
//!
//! The rearrangement is sort-and-assign: the target is the discrete ball
//! with exactly the same active-cell count (cells ranked by squared
//! distance to the grid center, ties broken by row then column), and the
//! absolute values of the input, sorted descending, are written into that
//! ranking. This preserves the multiset of |values| exactly, hence every
//! L^p norm, and is deterministic and idempotent.
//!
//! Energy is a different story: sort-based rearrangement on a five-point
//! stencil is not exactly energy-decreasing, only up to O(h) boundary
//! effects, so the classical energy inequality is checked with a
//! multiplicative slack ([`PS_SLACK`]) and the slack's adequacy is
//! established by the refinement trend in the acceptance suite, not
//! assumed.

use std::sync::Arc;

use crate::closed_form::theorem_envelope;
use crate::error::{Error, Result};
use crate::grid::{DomainMask, GridFunction};

/// Multiplicative slack for the discrete energy comparison.
pub const PS_SLACK: f64 = 5e-2;

/// A function together with its rearrangement onto the discrete ball.
#[derive(Debug, Clone)]
pub struct SymmetrizedPair {
    pub original: GridFunction,
    /// |original| values, sorted descending, on the ball mask.
    pub symmetrized: GridFunction,
    /// Original slot -> symmetrized slot. The k-th largest |value| moves
    /// to the k-th cell in the target's distance ranking.
    pub cell_permutation: Vec<usize>,
}

/// Cells of a fresh square grid ranked by squared distance to its center,
/// ties by (row, col); returns the grid side and the ranked cell list.
fn ranked_ball_cells(count: usize) -> (usize, Vec<(usize, usize)>) {
    let rad = ((count as f64) / std::f64::consts::PI).sqrt().ceil() as usize + 2;
    let side = 2 * rad + 1;
    let mut order: Vec<(u64, usize, usize)> = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let dr = r as i64 - rad as i64;
            let dc = c as i64 - rad as i64;
            order.push(((dr * dr + dc * dc) as u64, r, c));
        }
    }
    order.sort_unstable();
    debug_assert!(order.len() >= count);
    (
        side,
        order
            .into_iter()
            .take(count)
            .map(|(_, r, c)| (r, c))
            .collect(),
    )
}

/// The discrete ball mask of `count` cells at spacing `h`, plus the slot
/// order of its cells along the distance ranking.
fn ball_target(count: usize, h: f64, id: &str) -> (Arc<DomainMask>, Vec<usize>) {
    let (side, ranked) = ranked_ball_cells(count);
    let mut active = vec![false; side * side];
    for &(r, c) in &ranked {
        active[r * side + c] = true;
    }
    let mask = Arc::new(DomainMask::from_active(side, side, h, active, id));
    let slots = ranked
        .iter()
        .map(|&(r, c)| mask.slot(r, c).expect("ranked cell is active"))
        .collect();
    (mask, slots)
}

/// Input slots ordered by descending |value|, ties by slot index.
fn descending_abs_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    idx
}

/// Rearrange |u| onto the discrete ball of equal cell count.
pub fn schwarz_rearrange(u: &GridFunction) -> Result<SymmetrizedPair> {
    let n = u.mask().cell_count();
    if n == 0 {
        return Err(Error::Domain("cannot rearrange on an empty mask".into()));
    }
    let (target, ranked_slots) = ball_target(n, u.mask().h(), "ball-rearranged");
    let by_size = descending_abs_order(u.values());
    let mut values = vec![0.0; n];
    let mut cell_permutation = vec![0usize; n];
    for (rank, &orig_slot) in by_size.iter().enumerate() {
        let dst = ranked_slots[rank];
        values[dst] = u.values()[orig_slot].abs();
        cell_permutation[orig_slot] = dst;
    }
    Ok(SymmetrizedPair {
        original: u.clone(),
        symmetrized: GridFunction::from_values(target, values),
        cell_permutation,
    })
}

/// Energy comparison of a nonnegative function with its rearrangement.
#[derive(Debug, Clone, Copy)]
pub struct PsReport {
    pub energy_before: f64,
    pub energy_after: f64,
    /// `energy_after / energy_before`.
    pub ratio: f64,
    /// True when the ratio exceeds `1 + PS_SLACK`.
    pub violates_slack: bool,
}

/// Compare the Dirichlet energy of `|u|` against its rearrangement's.
pub fn polya_szego_check(u: &GridFunction) -> Result<PsReport> {
    let pair = schwarz_rearrange(u)?;
    let abs = GridFunction::from_values(
        u.mask().clone(),
        u.values().iter().map(|v| v.abs()).collect(),
    );
    let energy_before = abs.dirichlet_energy();
    let energy_after = pair.symmetrized.dirichlet_energy();
    if energy_before == 0.0 {
        return Err(Error::Domain(
            "zero-energy input to the energy check".into(),
        ));
    }
    let ratio = energy_after / energy_before;
    Ok(PsReport {
        energy_before,
        energy_after,
        ratio,
        violates_slack: ratio > 1.0 + PS_SLACK,
    })
}

/// Outcome of pushing a function through the symmetrization chain down to
/// the closed-form envelope.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub quotient_before: f64,
    pub quotient_after: f64,
    /// Closed-form envelope at the original mask's measure.
    pub envelope_value: f64,
    /// `quotient_after <= quotient_before * (1 + PS_SLACK)`.
    pub rearrange_step_holds: bool,
    /// `envelope_value <= quotient_after * (1 + PS_SLACK)`.
    pub envelope_step_holds: bool,
    /// The rearranged competitor (one ball, or a two-ball union for a
    /// sign-changing input at positive alpha).
    pub candidate: GridFunction,
}

/// The two-ball union mask holding `count_plus` + `count_minus` cells,
/// with slot rankings for each ball.
fn two_ball_target(
    count_plus: usize,
    count_minus: usize,
    h: f64,
) -> (Arc<DomainMask>, Vec<usize>, Vec<usize>) {
    let (side_p, ranked_p) = ranked_ball_cells(count_plus);
    let (side_m, ranked_m) = ranked_ball_cells(count_minus);
    let gap = 4;
    let width = side_p + gap + side_m;
    let height = side_p.max(side_m);
    let off_p = (height - side_p) / 2;
    let off_m = (height - side_m) / 2;
    let mut active = vec![false; width * height];
    for &(r, c) in &ranked_p {
        active[(r + off_p) * width + c] = true;
    }
    for &(r, c) in &ranked_m {
        active[(r + off_m) * width + (c + side_p + gap)] = true;
    }
    let mask = Arc::new(DomainMask::from_active(
        width,
        height,
        h,
        active,
        "two-ball-rearranged",
    ));
    let slots_p = ranked_p
        .iter()
        .map(|&(r, c)| mask.slot(r + off_p, c).expect("plus cell active"))
        .collect();
    let slots_m = ranked_m
        .iter()
        .map(|&(r, c)| {
            mask.slot(r + off_m, c + side_p + gap)
                .expect("minus cell active")
        })
        .collect();
    (mask, slots_p, slots_m)
}

/// Evaluate the symmetrization chain for `u` at the given `alpha`.
///
/// For `alpha <= 0`, or when `u` has a single sign, the competitor is the
/// one-ball rearrangement of |u|. Otherwise the positive and negative
/// parts are rearranged separately onto a disjoint two-ball union, which
/// preserves the signed integral exactly and each part's masses.
pub fn symmetrize_and_bound(u: &GridFunction, alpha: f64) -> Result<ChainReport> {
    let quotient_before = u.quotient(alpha)?;
    let measure = u.mask().measure();
    let envelope_value = theorem_envelope(2, measure, alpha)?.value;

    let plus: Vec<f64> = u.values().iter().copied().filter(|&v| v > 0.0).collect();
    let minus: Vec<f64> = u.values().iter().copied().filter(|&v| v < 0.0).collect();
    let candidate = if alpha <= 0.0 || plus.is_empty() || minus.is_empty() {
        schwarz_rearrange(u)?.symmetrized
    } else {
        let rest = u.mask().cell_count() - plus.len() - minus.len();
        // Zero cells ride along with the larger part so the candidate
        // keeps the full cell budget (they do not move any mass).
        let (np, nm) = if plus.len() >= minus.len() {
            (plus.len() + rest, minus.len())
        } else {
            (plus.len(), minus.len() + rest)
        };
        let (mask, slots_p, slots_m) = two_ball_target(np, nm, u.mask().h());
        let mut values = vec![0.0; mask.cell_count()];
        let mut sorted_p = plus;
        sorted_p.sort_by(|a, b| b.total_cmp(a));
        for (rank, &v) in sorted_p.iter().enumerate() {
            values[slots_p[rank]] = v;
        }
        let mut sorted_m = minus;
        sorted_m.sort_by(|a, b| a.total_cmp(b)); // most negative first
        for (rank, &v) in sorted_m.iter().enumerate() {
            values[slots_m[rank]] = v;
        }
        GridFunction::from_values(mask, values)
    };

    let quotient_after = candidate.quotient(alpha)?;
    Ok(ChainReport {
        quotient_before,
        quotient_after,
        envelope_value,
        rearrange_step_holds: quotient_after <= quotient_before * (1.0 + PS_SLACK),
        envelope_step_holds: envelope_value <= quotient_after * (1.0 + PS_SLACK),
        candidate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::{lambda_dirichlet, SolveOptions};
    use crate::grid::{make_disk, make_l_shape, make_rectangle, make_two_disks};
    use crate::variational::lambda_twisted;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn arc(m: DomainMask) -> Arc<DomainMask> {
        Arc::new(m)
    }

    fn sorted_abs(values: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    #[test]
    fn indicator_becomes_ball_indicator() {
        let mask = arc(make_l_shape(0.5, 1.0 / 16.0).unwrap());
        let u = GridFunction::from_fn(mask.clone(), |_, _| 1.0);
        let pair = schwarz_rearrange(&u).unwrap();
        assert_eq!(pair.symmetrized.mask().cell_count(), mask.cell_count());
        assert!(pair.symmetrized.values().iter().all(|&v| v == 1.0));
        assert_eq!(pair.symmetrized.mask().connected_components(), 1);
    }

    #[test]
    fn multiset_and_norms_preserved() {
        let mask = arc(make_rectangle(0.6, 0.4, 1.0 / 24.0).unwrap());
        let u = GridFunction::from_fn(mask, |r, c| ((r * 31 + c * 17) % 13) as f64 - 6.0);
        let pair = schwarz_rearrange(&u).unwrap();
        assert_eq!(
            sorted_abs(u.values()),
            sorted_abs(pair.symmetrized.values())
        );
        assert_relative_eq!(
            u.l2_norm_sq(),
            pair.symmetrized.l2_norm_sq(),
            max_relative = 1e-13
        );
        let linf = |v: &[f64]| v.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
        assert_eq!(linf(u.values()), linf(pair.symmetrized.values()));
        // Permutation is a bijection.
        let mut seen = vec![false; u.values().len()];
        for &dst in &pair.cell_permutation {
            assert!(!seen[dst]);
            seen[dst] = true;
        }
    }

    #[test]
    fn output_nonincreasing_along_distance_ranking() {
        let mask = arc(make_l_shape(1.0, 1.0 / 16.0).unwrap());
        let u = GridFunction::from_fn(mask, |r, c| ((r * 7 + c * 5) % 11) as f64);
        let pair = schwarz_rearrange(&u).unwrap();
        let n = pair.symmetrized.mask().cell_count();
        let (_, ranked) = ranked_ball_cells(n);
        let m = pair.symmetrized.mask();
        let mut prev = f64::INFINITY;
        for (r, c) in ranked {
            let slot = m.slot(r, c).unwrap();
            let v = pair.symmetrized.values()[slot];
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn idempotent_cell_by_cell() {
        let mask = arc(make_rectangle(0.5, 0.3, 1.0 / 20.0).unwrap());
        let u = GridFunction::from_fn(mask, |r, c| (r as f64 - 2.0) * (c as f64 + 1.0));
        let once = schwarz_rearrange(&u).unwrap();
        let twice = schwarz_rearrange(&once.symmetrized).unwrap();
        assert_eq!(once.symmetrized.mask(), twice.symmetrized.mask());
        assert_eq!(once.symmetrized.values(), twice.symmetrized.values());
    }

    #[test]
    fn depends_only_on_values_and_count() {
        // Same multiset on two different masks with equal cell count.
        let a = arc(DomainMask::from_pattern(&["1111", "1111"], 0.25).unwrap());
        let b = arc(DomainMask::from_pattern(&["11", "11", "11", "11"], 0.25).unwrap());
        let vals: Vec<f64> = (0..8).map(|k| (k as f64 * 1.3 - 4.0).sin()).collect();
        let ua = GridFunction::from_values(a, vals.clone());
        let ub = GridFunction::from_values(b, vals);
        let pa = schwarz_rearrange(&ua).unwrap();
        let pb = schwarz_rearrange(&ub).unwrap();
        assert_eq!(pa.symmetrized.mask(), pb.symmetrized.mask());
        assert_eq!(pa.symmetrized.values(), pb.symmetrized.values());
    }

    #[test]
    fn radial_decreasing_input_is_fixed_point() {
        // A strictly decreasing function of the squared distance on a
        // centered disk mask: the rearrangement reproduces it exactly,
        // because the active set already is the discrete ball and equal
        // distances carry equal values.
        let h = 1.0 / 32.0;
        let mask = arc(make_disk(0.5, h).unwrap());
        let center = ((mask.height() - 1) / 2, (mask.width() - 1) / 2);
        let u = GridFunction::from_fn(mask.clone(), |r, c| {
            let dr = r as f64 - center.0 as f64;
            let dc = c as f64 - center.1 as f64;
            (-(dr * dr + dc * dc) / 100.0).exp()
        });
        let report = polya_szego_check(&u).unwrap();
        assert_relative_eq!(report.ratio, 1.0, max_relative = 1e-12);
        assert!(!report.violates_slack);
    }

    #[test]
    fn ground_state_energy_does_not_grow_beyond_slack() {
        let mask = arc(make_rectangle(1.0, 1.0, 1.0 / 32.0).unwrap());
        let ground = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
        let report = polya_szego_check(&ground.eigenfunction).unwrap();
        assert!(!report.violates_slack, "ratio {} above slack", report.ratio);
    }

    #[test]
    fn chain_on_lshape_ground_at_alpha_zero() {
        let mask = arc(make_l_shape(1.0, 1.0 / 32.0).unwrap());
        let ground = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
        let report = symmetrize_and_bound(&ground.eigenfunction, 0.0).unwrap();
        assert!(report.rearrange_step_holds);
        assert!(report.envelope_step_holds);
        // At alpha = 0 the envelope is the one-ball value and the chain
        // compresses to the classical isoperimetric comparison.
        assert!(report.quotient_after <= report.quotient_before * (1.0 + PS_SLACK));
        assert!(report.envelope_value <= report.quotient_before * (1.0 + PS_SLACK));
    }

    #[test]
    fn chain_on_sign_changing_function_positive_alpha() {
        let mask = arc(make_rectangle(1.0, 1.0, 1.0 / 24.0).unwrap());
        let w = mask.width() as f64;
        let u = GridFunction::from_fn(mask, |r, c| {
            let x = (c as f64 + 1.0) / (w + 1.0);
            let y = (r as f64 + 1.0) / (w + 1.0);
            (2.0 * std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin()
        });
        let report = symmetrize_and_bound(&u, 3.0).unwrap();
        assert!(report.rearrange_step_holds, "{report:?}");
        assert!(report.envelope_step_holds, "{report:?}");
        assert_eq!(report.candidate.mask().connected_components(), 2);
        // Signed integral is preserved exactly by per-part rearrangement.
        assert_relative_eq!(
            report.candidate.signed_square_integral(),
            u.signed_square_integral(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn chain_tight_on_equal_disk_twisted_minimizer() {
        let h = 1.0 / 32.0;
        let mask = arc(make_two_disks(0.4, 0.4, h).unwrap());
        let res = lambda_twisted(&mask, 1e-8, 4).unwrap();
        let report = symmetrize_and_bound(&res.minimizer, 2.0).unwrap();
        // Both sides sit near the twisted value of the equal-ball union.
        assert!(report.rearrange_step_holds);
        assert!(
            (report.quotient_after - report.quotient_before).abs() <= 0.03 * report.quotient_before,
            "chain not tight: {report:?}"
        );
    }

    #[test]
    fn single_signed_input_under_positive_alpha_uses_one_ball() {
        let mask = arc(make_disk(0.4, 1.0 / 16.0).unwrap());
        let u = GridFunction::from_fn(mask, |_, _| 2.0);
        let report = symmetrize_and_bound(&u, 1.5).unwrap();
        assert_eq!(report.candidate.mask().connected_components(), 1);
    }

    proptest! {
        #[test]
        fn rearrangement_preserves_multiset(values in proptest::collection::vec(-100.0f64..100.0, 24)) {
            let mask = arc(DomainMask::from_pattern(
                &["111111", "111111", "111111", "111111"], 0.125).unwrap());
            let u = GridFunction::from_values(mask, values);
            let pair = schwarz_rearrange(&u).unwrap();
            prop_assert_eq!(sorted_abs(u.values()), sorted_abs(pair.symmetrized.values()));
            // Nonincreasing along the ranking.
            let (_, ranked) = ranked_ball_cells(24);
            let m = pair.symmetrized.mask();
            let mut prev = f64::INFINITY;
            for (r, c) in ranked {
                let v = pair.symmetrized.values()[m.slot(r, c).unwrap()];
                prop_assert!(v <= prev);
                prev = v;
            }
        }
    }
}
