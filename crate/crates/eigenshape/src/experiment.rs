//! Experiment runners behind the command-line interface.
//!
//! Everything here is deterministic: the same config and seed produce
//! byte-identical CSV and SVG output. Solver failures never abort a sweep;
//! they are recorded in the affected rows' `status` column and the run
//! continues.

use std::sync::Arc;

use serde::Serialize;

use crate::closed_form::{
    alpha_critical, equal_split_value, faber_krahn_value, lambda_ball, radius_for_measure,
    theorem_envelope,
};
use crate::config::{ExperimentConfig, ShapeKind, ShapeSpec};
use crate::eigensolver::{lambda_dirichlet, lambda_dirichlet_dense, SolveOptions, DENSE_CAP};
use crate::error::{Error, Result};
use crate::grid::{
    make_annulus, make_disk, make_l_shape, make_rectangle, make_two_disks, DomainMask,
};
use crate::rearrangement::{polya_szego_check, symmetrize_and_bound, PS_SLACK};
use crate::svg::{line_chart, Series, PALETTE};
use crate::variational::{lambda_twisted_seeded, mu_characterization, mu_direct};

/// Allowed relative gap between the dense and iterative eigensolvers.
pub const DENSE_ITER_TOL: f64 = 1e-6;
/// Allowed relative gap between the two routes to the penalized eigenvalue.
pub const ROUTE_TOL_REL: f64 = 1e-3;
/// Absolute floor for the route comparison, for values near zero.
pub const ROUTE_TOL_ABS: f64 = 1e-6;
/// Number of radius samples in the two-ball scan.
pub const TWO_BALL_SCAN_POINTS: usize = 33;

/// Formats a number with 12 significant digits, locale-free, so that CSV
/// output is byte-identical across runs and platforms.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

fn csv_safe(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

/// Rasterizes a configured shape at its target measure.
pub fn build_mask(spec: &ShapeSpec, h: f64) -> Result<Arc<DomainMask>> {
    let m = spec.measure;
    let mask = match spec.kind {
        ShapeKind::Disk => make_disk(radius_for_measure(2, m)?, h)?,
        ShapeKind::Square => {
            let side = m.sqrt();
            make_rectangle(side, side, h)?
        }
        ShapeKind::Rectangle { aspect } => {
            let short = (m / aspect).sqrt();
            make_rectangle(aspect * short, short, h)?
        }
        ShapeKind::Annulus { inner_fraction } => {
            let outer =
                (m / (std::f64::consts::PI * (1.0 - inner_fraction * inner_fraction))).sqrt();
            make_annulus(outer, inner_fraction * outer, h)?
        }
        ShapeKind::LShape => make_l_shape((m / 0.75).sqrt(), h)?,
        ShapeKind::TwoDisks { radius_ratio } => {
            let r1 = (m / (std::f64::consts::PI * (1.0 + radius_ratio * radius_ratio))).sqrt();
            make_two_disks(r1, radius_ratio * r1, h)?
        }
    };
    Ok(Arc::new(mask.with_id(&spec.id)))
}

/// One row of the eigenvalue-curve CSV.
#[derive(Debug, Clone, Serialize)]
pub struct EigencurveSample {
    pub domain_id: String,
    pub alpha: f64,
    pub mu: f64,
    pub branch: String,
    #[serde(rename = "lambda_D")]
    pub lambda_d: f64,
    #[serde(rename = "lambda_T")]
    pub lambda_t: f64,
    pub status: String,
}

/// Cached per-shape solves plus the assembled per-alpha samples.
#[derive(Debug, Clone)]
pub struct SweepShape {
    pub spec: ShapeSpec,
    pub cells: usize,
    pub lambda_d: std::result::Result<f64, String>,
    pub lambda_t: std::result::Result<f64, String>,
    pub samples: Vec<EigencurveSample>,
}

/// Solves each configured shape once (plain and constrained eigenvalues are
/// alpha-independent) and assembles one sample per (shape, alpha).
///
/// A failed solve poisons only the rows that need it: a negative alpha row
/// needs just the plain eigenvalue, a nonnegative one needs both.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepShape>> {
    if cfg.shapes.is_empty() {
        return Err(Error::Usage("config defines no [shape] blocks".to_string()));
    }
    let alphas = cfg.alpha_values();
    let mut out = Vec::with_capacity(cfg.shapes.len());
    for spec in &cfg.shapes {
        let (cells, lambda_d, lambda_t) = match build_mask(spec, cfg.h) {
            Ok(mask) => {
                let ld = lambda_dirichlet(&mask, SolveOptions::with_tol(cfg.tol))
                    .map(|r| r.value)
                    .map_err(|e| e.to_string());
                let lt = lambda_twisted_seeded(&mask, cfg.tol, cfg.restarts, cfg.seed)
                    .map(|r| r.value)
                    .map_err(|e| e.to_string());
                (mask.cell_count(), ld, lt)
            }
            Err(e) => (0, Err(e.to_string()), Err(e.to_string())),
        };
        let samples = alphas
            .iter()
            .map(|&alpha| assemble_sample(spec, alpha, &lambda_d, &lambda_t))
            .collect();
        out.push(SweepShape {
            spec: spec.clone(),
            cells,
            lambda_d,
            lambda_t,
            samples,
        });
    }
    Ok(out)
}

fn assemble_sample(
    spec: &ShapeSpec,
    alpha: f64,
    lambda_d: &std::result::Result<f64, String>,
    lambda_t: &std::result::Result<f64, String>,
) -> EigencurveSample {
    let (mu, branch, status) = match (alpha < 0.0, lambda_d, lambda_t) {
        (true, Ok(d), _) => (d + alpha, "linear".to_string(), "ok".to_string()),
        (false, Ok(d), Ok(t)) => {
            if d + alpha <= *t {
                (d + alpha, "linear".to_string(), "ok".to_string())
            } else {
                (*t, "twisted".to_string(), "ok".to_string())
            }
        }
        (_, Err(e), _) | (false, _, Err(e)) => (f64::NAN, String::new(), e.clone()),
    };
    EigencurveSample {
        domain_id: spec.id.clone(),
        alpha,
        mu,
        branch,
        lambda_d: lambda_d.as_ref().copied().unwrap_or(f64::NAN),
        lambda_t: lambda_t.as_ref().copied().unwrap_or(f64::NAN),
        status,
    }
}

/// Flattens sweep results into rows, shape-major, alpha-minor.
pub fn all_samples(shapes: &[SweepShape]) -> Vec<EigencurveSample> {
    shapes
        .iter()
        .flat_map(|s| s.samples.iter().cloned())
        .collect()
}

/// Serializes samples with the fixed header
/// `domain_id,alpha,mu,branch,lambda_D,lambda_T,status`.
pub fn samples_to_csv(samples: &[EigencurveSample]) -> String {
    let mut out = String::from("domain_id,alpha,mu,branch,lambda_D,lambda_T,status\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_safe(&s.domain_id),
            fmt_sig(s.alpha),
            fmt_sig(s.mu),
            s.branch,
            fmt_sig(s.lambda_d),
            fmt_sig(s.lambda_t),
            csv_safe(&s.status)
        ));
    }
    out
}

/// Chart of every shape's curve against the two-ball lower bound.
pub fn eigencurve_svg(cfg: &ExperimentConfig, shapes: &[SweepShape]) -> String {
    let measure = shapes.first().map_or(1.0, |s| s.spec.measure);
    let alphas = cfg.alpha_values();
    let (a_min, a_max) = (
        alphas.iter().copied().fold(f64::INFINITY, f64::min),
        alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut series = Vec::new();

    // Envelope on a dense grid, with the exact kink inserted so the corner
    // renders sharply rather than being chamfered between grid points.
    let mut env_alphas: Vec<f64> = (0..=160)
        .map(|k| a_min + (a_max - a_min) * k as f64 / 160.0)
        .collect();
    if let Ok(ac) = alpha_critical(2) {
        let kink = ac / measure;
        if kink > a_min && kink < a_max {
            env_alphas.push(kink);
            env_alphas.sort_by(|a, b| a.partial_cmp(b).expect("finite alphas"));
        }
    }
    let env_points: Vec<(f64, f64)> = env_alphas
        .iter()
        .filter_map(|&a| theorem_envelope(2, measure, a).ok().map(|e| (a, e.value)))
        .collect();
    series.push(Series::new("two-ball bound", env_points, "#000000").with_width(2.6));

    for (i, shape) in shapes.iter().enumerate() {
        let pts: Vec<(f64, f64)> = shape
            .samples
            .iter()
            .filter(|s| s.status == "ok" && s.mu.is_finite())
            .map(|s| (s.alpha, s.mu))
            .collect();
        let color = PALETTE[i % PALETTE.len()];
        series.push(Series::new(&shape.spec.id, pts, color));
    }
    line_chart(
        "penalized eigenvalue vs two-ball lower bound",
        "alpha",
        "mu",
        &series,
    )
}

/// Best value over two-ball unions of the given total measure: a scan of
/// radius splits for the rising branch plus the equal split for the flat
/// one. The scan runs from the half-measure ball to the full-measure ball.
pub fn best_two_ball_value(measure: f64, alpha: f64) -> Result<f64> {
    let r_full = radius_for_measure(2, measure)?;
    let r_half = radius_for_measure(2, measure / 2.0)?;
    let flat = equal_split_value(2, measure)?;
    let mut best = f64::INFINITY;
    let last = TWO_BALL_SCAN_POINTS - 1;
    for k in 0..TWO_BALL_SCAN_POINTS {
        let r1 = if k == last {
            r_full
        } else {
            r_half + (r_full - r_half) * k as f64 / last as f64
        };
        best = best.min(lambda_ball(2, r1)? + alpha);
    }
    Ok(best.min(flat))
}

/// One row of the margin report: a computed value against the bound.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyRow {
    pub domain_id: String,
    pub alpha: f64,
    pub mu: f64,
    pub branch: String,
    pub envelope: f64,
    pub envelope_branch: String,
    /// `(mu - envelope) / envelope`; negative means below the bound.
    pub margin: f64,
    pub two_ball_best: f64,
    pub margin_two_ball: f64,
    pub pass: bool,
    pub status: String,
}

/// Margins of every sample against the closed-form bound at the shape's
/// target measure. A row passes when both margins are at least `-slack`.
pub fn verify_margins(cfg: &ExperimentConfig, shapes: &[SweepShape]) -> Result<Vec<VerifyRow>> {
    cfg.require_equal_measures()?;
    let mut rows = Vec::new();
    for shape in shapes {
        for s in &shape.samples {
            let env = theorem_envelope(2, shape.spec.measure, s.alpha)?;
            let best = best_two_ball_value(shape.spec.measure, s.alpha)?;
            let (margin, margin_two_ball, pass) = if s.status == "ok" {
                let m1 = (s.mu - env.value) / env.value;
                let m2 = (s.mu - best) / best;
                (m1, m2, m1 >= -cfg.slack && m2 >= -cfg.slack)
            } else {
                (f64::NAN, f64::NAN, false)
            };
            rows.push(VerifyRow {
                domain_id: s.domain_id.clone(),
                alpha: s.alpha,
                mu: s.mu,
                branch: s.branch.clone(),
                envelope: env.value,
                envelope_branch: env.branch.to_string(),
                margin,
                two_ball_best: best,
                margin_two_ball,
                pass,
                status: s.status.clone(),
            });
        }
    }
    Ok(rows)
}

/// Serializes margin rows; schema
/// `domain_id,alpha,mu,branch,envelope,envelope_branch,margin,two_ball_best,margin_two_ball,pass,status`.
pub fn margins_to_csv(rows: &[VerifyRow]) -> String {
    let mut out = String::from(
        "domain_id,alpha,mu,branch,envelope,envelope_branch,margin,two_ball_best,margin_two_ball,pass,status\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            csv_safe(&r.domain_id),
            fmt_sig(r.alpha),
            fmt_sig(r.mu),
            r.branch,
            fmt_sig(r.envelope),
            r.envelope_branch,
            fmt_sig(r.margin),
            fmt_sig(r.two_ball_best),
            fmt_sig(r.margin_two_ball),
            r.pass,
            csv_safe(&r.status)
        ));
    }
    out
}

/// Dense-versus-iterative comparison for one shape.
#[derive(Debug, Clone, Serialize)]
pub struct EigenCheckRow {
    pub domain_id: String,
    pub cells: usize,
    pub iterative: f64,
    /// Absent when the mask exceeds the dense cap (skipped, not failed).
    pub dense: Option<f64>,
    pub rel_gap: Option<f64>,
    pub pass: bool,
    pub note: String,
}

/// Two-route comparison for one (shape, alpha) pair.
#[derive(Debug, Clone, Serialize)]
pub struct RouteCheckRow {
    pub domain_id: String,
    pub alpha: f64,
    pub mu_characterization: f64,
    /// Absent for negative alpha, where only the linear identity applies.
    pub mu_direct: Option<f64>,
    pub gap: Option<f64>,
    pub allowed: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub eigen: Vec<EigenCheckRow>,
    pub routes: Vec<RouteCheckRow>,
    pub pass: bool,
}

/// Cross-validates the independent solver routes on every configured shape:
/// dense versus iterative plain eigenvalues, and the minimum-of-two-values
/// assembly versus direct constrained descent for each alpha.
pub fn run_crosscheck(cfg: &ExperimentConfig) -> Result<CrosscheckReport> {
    if cfg.shapes.is_empty() {
        return Err(Error::Usage("config defines no [shape] blocks".to_string()));
    }
    let mut eigen = Vec::new();
    let mut routes = Vec::new();
    let mut pass = true;

    for spec in &cfg.shapes {
        let mask = build_mask(spec, cfg.h)?;
        let cells = mask.cell_count();

        let iterative = lambda_dirichlet(&mask, SolveOptions::with_tol(cfg.tol));
        match &iterative {
            Ok(it) => {
                if cells <= DENSE_CAP {
                    match lambda_dirichlet_dense(&mask) {
                        Ok(d) => {
                            let rel = (it.value - d.value).abs() / d.value;
                            let ok = rel <= DENSE_ITER_TOL;
                            pass &= ok;
                            eigen.push(EigenCheckRow {
                                domain_id: spec.id.clone(),
                                cells,
                                iterative: it.value,
                                dense: Some(d.value),
                                rel_gap: Some(rel),
                                pass: ok,
                                note: String::new(),
                            });
                        }
                        Err(e) => {
                            pass = false;
                            eigen.push(EigenCheckRow {
                                domain_id: spec.id.clone(),
                                cells,
                                iterative: it.value,
                                dense: None,
                                rel_gap: None,
                                pass: false,
                                note: e.to_string(),
                            });
                        }
                    }
                } else {
                    eigen.push(EigenCheckRow {
                        domain_id: spec.id.clone(),
                        cells,
                        iterative: it.value,
                        dense: None,
                        rel_gap: None,
                        pass: true,
                        note: format!("dense skipped: {cells} cells exceed cap {DENSE_CAP}"),
                    });
                }
            }
            Err(e) => {
                pass = false;
                eigen.push(EigenCheckRow {
                    domain_id: spec.id.clone(),
                    cells,
                    iterative: f64::NAN,
                    dense: None,
                    rel_gap: None,
                    pass: false,
                    note: e.to_string(),
                });
            }
        }

        for &alpha in &cfg.alpha_values() {
            let ch = match mu_characterization(&mask, alpha, cfg.tol) {
                Ok(r) => r,
                Err(e) => {
                    pass = false;
                    routes.push(RouteCheckRow {
                        domain_id: spec.id.clone(),
                        alpha,
                        mu_characterization: f64::NAN,
                        mu_direct: None,
                        gap: None,
                        allowed: ROUTE_TOL_ABS,
                        pass: false,
                        note: e.to_string(),
                    });
                    continue;
                }
            };
            let allowed = ROUTE_TOL_ABS.max(ROUTE_TOL_REL * ch.value.abs());
            if alpha < 0.0 {
                // Direct descent is defined for nonnegative penalties only;
                // check the linear identity instead.
                let (gap, note, ok) = match &iterative {
                    Ok(it) => {
                        let g = (ch.value - (it.value + alpha)).abs();
                        (Some(g), "linear identity".to_string(), g <= allowed)
                    }
                    Err(e) => (None, e.to_string(), false),
                };
                pass &= ok;
                routes.push(RouteCheckRow {
                    domain_id: spec.id.clone(),
                    alpha,
                    mu_characterization: ch.value,
                    mu_direct: None,
                    gap,
                    allowed,
                    pass: ok,
                    note,
                });
                continue;
            }
            match mu_direct(&mask, alpha, cfg.tol) {
                Ok(d) => {
                    let gap = (ch.value - d.value).abs();
                    let ok = gap <= allowed;
                    pass &= ok;
                    routes.push(RouteCheckRow {
                        domain_id: spec.id.clone(),
                        alpha,
                        mu_characterization: ch.value,
                        mu_direct: Some(d.value),
                        gap: Some(gap),
                        allowed,
                        pass: ok,
                        note: String::new(),
                    });
                }
                Err(e) => {
                    pass = false;
                    routes.push(RouteCheckRow {
                        domain_id: spec.id.clone(),
                        alpha,
                        mu_characterization: ch.value,
                        mu_direct: None,
                        gap: None,
                        allowed,
                        pass: false,
                        note: e.to_string(),
                    });
                }
            }
        }
    }
    Ok(CrosscheckReport {
        eigen,
        routes,
        pass,
    })
}

/// Closed-form ball quantities, optionally checked against a grid solve.
#[derive(Debug, Clone, Serialize)]
pub struct BallValuesReport {
    pub n: u32,
    pub radius: f64,
    pub measure: f64,
    pub alpha: f64,
    /// First eigenvalue of the ball, `j^2 / r^2`.
    pub lambda_ball: f64,
    /// Minimum eigenvalue over all shapes of this measure (the ball's).
    pub faber_krahn: f64,
    /// Dimensional threshold for the envelope's branch switch.
    pub alpha_critical: f64,
    /// The threshold translated to this measure: the envelope kinks here.
    pub kink_alpha: f64,
    /// Flat envelope level: the two-equal-ball value at this measure.
    pub flat_value: f64,
    pub envelope_value: f64,
    pub envelope_branch: String,
    pub grid: Option<GridBallValues>,
}

/// Numerical check of the ball values on a rasterized disk (n = 2 only).
#[derive(Debug, Clone, Serialize)]
pub struct GridBallValues {
    pub h: f64,
    pub cells: usize,
    pub lambda_d: f64,
    pub lambda_d_rel_gap: f64,
    pub lambda_t: f64,
    pub mu: f64,
    pub mu_branch: String,
}

/// Computes closed-form ball quantities at a given measure or radius; with
/// `grid_h` set (n = 2 only), also solves the rasterized disk numerically.
pub fn run_ball_values(
    n: u32,
    radius: Option<f64>,
    measure: Option<f64>,
    alpha: f64,
    grid_h: Option<f64>,
    tol: f64,
) -> Result<BallValuesReport> {
    let (radius, measure) = match (radius, measure) {
        (Some(_), Some(_)) => {
            return Err(Error::Usage(
                "give either --radius or --measure, not both".to_string(),
            ));
        }
        (Some(r), None) => {
            if !(r > 0.0) {
                return Err(Error::Usage(format!("radius must be positive, got {r}")));
            }
            // measure = omega * r^n, with omega recovered from the unit-measure radius
            let unit_r = radius_for_measure(n, 1.0)?;
            (r, (r / unit_r).powi(n as i32))
        }
        (None, m) => {
            let m = m.unwrap_or(1.0);
            (radius_for_measure(n, m)?, m)
        }
    };

    let lam = lambda_ball(n, radius)?;
    let fk = faber_krahn_value(n, measure)?;
    let ac = alpha_critical(n)?;
    let env = theorem_envelope(n, measure, alpha)?;
    let grid = match grid_h {
        None => None,
        Some(h) => {
            if n != 2 {
                return Err(Error::Usage(format!(
                    "--grid-h requires n = 2 (planar rasterization), got n = {n}"
                )));
            }
            let mask = Arc::new(make_disk(radius, h)?);
            let ld = lambda_dirichlet(&mask, SolveOptions::with_tol(tol))?;
            let lt = lambda_twisted_seeded(&mask, tol, crate::variational::DEFAULT_RESTARTS, 0)?;
            let (mu, mu_branch) = if alpha < 0.0 || ld.value + alpha <= lt.value {
                (ld.value + alpha, "linear")
            } else {
                (lt.value, "twisted")
            };
            Some(GridBallValues {
                h,
                cells: mask.cell_count(),
                lambda_d: ld.value,
                lambda_d_rel_gap: (ld.value - lam).abs() / lam,
                lambda_t: lt.value,
                mu,
                mu_branch: mu_branch.to_string(),
            })
        }
    };
    Ok(BallValuesReport {
        n,
        radius,
        measure,
        alpha,
        lambda_ball: lam,
        faber_krahn: fk,
        alpha_critical: ac,
        kink_alpha: ac / measure.powf(2.0 / n as f64),
        flat_value: equal_split_value(n, measure)?,
        envelope_value: env.value,
        envelope_branch: env.branch.to_string(),
        grid,
    })
}

/// Rearrangement run on one mask: symmetrization of the ground state and
/// the two-step comparison against the closed-form bound.
#[derive(Debug, Clone, Serialize)]
pub struct RearrangeReport {
    pub domain_id: String,
    pub cells: usize,
    pub measure: f64,
    pub alpha: f64,
    pub lambda_d: f64,
    /// Energy after / energy before symmetrization; at most `1 + ps_slack`.
    pub ps_ratio: f64,
    pub ps_slack: f64,
    pub ps_holds: bool,
    pub quotient_before: f64,
    pub quotient_after: f64,
    pub envelope_value: f64,
    pub rearrange_step_holds: bool,
    pub envelope_step_holds: bool,
    pub pass: bool,
}

/// Runs the rearrangement chain on a mask's ground state. Returns the
/// report and the symmetrized candidate's mask in text format.
pub fn run_rearrange(mask_text: &str, alpha: f64, tol: f64) -> Result<(RearrangeReport, String)> {
    let mask = Arc::new(DomainMask::from_text(mask_text)?);
    let ground = lambda_dirichlet(&mask, SolveOptions::with_tol(tol))?;
    let ps = polya_szego_check(&ground.eigenfunction)?;
    let chain = symmetrize_and_bound(&ground.eigenfunction, alpha)?;
    let pass = !ps.violates_slack && chain.rearrange_step_holds && chain.envelope_step_holds;
    let report = RearrangeReport {
        domain_id: mask.id().to_string(),
        cells: mask.cell_count(),
        measure: mask.measure(),
        alpha,
        lambda_d: ground.value,
        ps_ratio: ps.ratio,
        ps_slack: PS_SLACK,
        ps_holds: !ps.violates_slack,
        quotient_before: chain.quotient_before,
        quotient_after: chain.quotient_after,
        envelope_value: chain.envelope_value,
        rearrange_step_holds: chain.rearrange_step_holds,
        envelope_step_holds: chain.envelope_step_holds,
        pass,
    };
    let candidate_text = chain.candidate.mask().to_text();
    Ok((report, candidate_text))
}

// ---------------------------------------------------------------------------
// Plain-text rendering for the CLI.
// ---------------------------------------------------------------------------

fn fmt6(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.6}")
    }
}

pub fn render_sweep_summary(shapes: &[SweepShape]) -> String {
    let mut out = String::new();
    for s in shapes {
        let ld = s
            .lambda_d
            .as_ref()
            .map(|v| fmt6(*v))
            .unwrap_or_else(|e| format!("error: {e}"));
        let lt = s
            .lambda_t
            .as_ref()
            .map(|v| fmt6(*v))
            .unwrap_or_else(|e| format!("error: {e}"));
        let kink = match (&s.lambda_d, &s.lambda_t) {
            (Ok(d), Ok(t)) => fmt6(t - d),
            _ => "n/a".to_string(),
        };
        out.push_str(&format!(
            "{:<16} cells {:>7}  lambda_D {:>12}  lambda_T {:>12}  kink alpha {:>12}\n",
            s.spec.id, s.cells, ld, lt, kink
        ));
    }
    out
}

pub fn render_verify(rows: &[VerifyRow], slack: f64) -> String {
    let mut out = String::new();
    let mut worst = f64::INFINITY;
    let mut worst_id = String::new();
    let (mut passed, mut failed) = (0usize, 0usize);
    for r in rows {
        if r.pass {
            passed += 1;
        } else {
            failed += 1;
        }
        if r.margin.is_finite() && r.margin < worst {
            worst = r.margin;
            worst_id = format!("{} at alpha = {}", r.domain_id, fmt6(r.alpha));
        }
    }
    out.push_str(&format!(
        "margin check: {passed} rows passed, {failed} failed (slack {slack})\n"
    ));
    if worst.is_finite() {
        out.push_str(&format!("worst margin {} ({worst_id})\n", fmt6(worst)));
    }
    out
}

pub fn render_crosscheck(report: &CrosscheckReport) -> String {
    let mut out = String::new();
    out.push_str("dense vs iterative (plain eigenvalue)\n");
    for r in &report.eigen {
        let dense = r.dense.map(fmt6).unwrap_or_else(|| "-".to_string());
        let gap = r
            .rel_gap
            .map(|g| format!("{g:.3e}"))
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "  {:<16} cells {:>7}  iterative {:>12}  dense {:>12}  rel gap {:>10}  {}{}\n",
            r.domain_id,
            r.cells,
            fmt6(r.iterative),
            dense,
            gap,
            if r.pass { "pass" } else { "FAIL" },
            if r.note.is_empty() {
                String::new()
            } else {
                format!("  ({})", r.note)
            }
        ));
    }
    out.push_str("characterization vs direct descent\n");
    for r in &report.routes {
        let direct = r.mu_direct.map(fmt6).unwrap_or_else(|| "-".to_string());
        let gap = r
            .gap
            .map(|g| format!("{g:.3e}"))
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "  {:<16} alpha {:>10}  char {:>12}  direct {:>12}  gap {:>10}  {}{}\n",
            r.domain_id,
            fmt6(r.alpha),
            fmt6(r.mu_characterization),
            direct,
            gap,
            if r.pass { "pass" } else { "FAIL" },
            if r.note.is_empty() {
                String::new()
            } else {
                format!("  ({})", r.note)
            }
        ));
    }
    out.push_str(if report.pass {
        "crosscheck: pass\n"
    } else {
        "crosscheck: FAIL\n"
    });
    out
}

pub fn render_ball_values(r: &BallValuesReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("ball values (n = {})\n", r.n));
    out.push_str(&format!("  radius          {}\n", fmt6(r.radius)));
    out.push_str(&format!("  measure         {}\n", fmt6(r.measure)));
    out.push_str(&format!("  lambda(ball)    {}\n", fmt6(r.lambda_ball)));
    out.push_str(&format!(
        "  min lambda      {}  (ball of this measure)\n",
        fmt6(r.faber_krahn)
    ));
    out.push_str(&format!(
        "  alpha_critical  {}  (dimensional constant)\n",
        fmt6(r.alpha_critical)
    ));
    out.push_str(&format!(
        "  kink alpha      {}  (at this measure)\n",
        fmt6(r.kink_alpha)
    ));
    out.push_str(&format!(
        "  flat value      {}  (two equal balls)\n",
        fmt6(r.flat_value)
    ));
    out.push_str(&format!(
        "  envelope        {}  at alpha = {}  [{}]\n",
        fmt6(r.envelope_value),
        fmt6(r.alpha),
        r.envelope_branch
    ));
    if let Some(g) = &r.grid {
        out.push_str(&format!("  grid h = {} ({} cells)\n", g.h, g.cells));
        out.push_str(&format!(
            "    lambda_D {}  (rel gap to closed form {:.3e})\n",
            fmt6(g.lambda_d),
            g.lambda_d_rel_gap
        ));
        out.push_str(&format!("    lambda_T {}\n", fmt6(g.lambda_t)));
        out.push_str(&format!("    mu       {}  [{}]\n", fmt6(g.mu), g.mu_branch));
    }
    out
}

pub fn render_rearrange(r: &RearrangeReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "rearrangement on `{}` ({} cells, measure {})\n",
        r.domain_id,
        r.cells,
        fmt6(r.measure)
    ));
    out.push_str(&format!("  lambda_D               {}\n", fmt6(r.lambda_d)));
    out.push_str(&format!(
        "  energy ratio           {}  (allowed up to {})  {}\n",
        fmt6(r.ps_ratio),
        1.0 + r.ps_slack,
        if r.ps_holds { "pass" } else { "FAIL" }
    ));
    out.push_str(&format!(
        "  quotient before/after  {} / {}  {}\n",
        fmt6(r.quotient_before),
        fmt6(r.quotient_after),
        if r.rearrange_step_holds {
            "pass"
        } else {
            "FAIL"
        }
    ));
    out.push_str(&format!(
        "  envelope at measure    {}  {}\n",
        fmt6(r.envelope_value),
        if r.envelope_step_holds {
            "pass"
        } else {
            "FAIL"
        }
    ));
    out.push_str(if r.pass {
        "rearrange: pass\n"
    } else {
        "rearrange: FAIL\n"
    });
    out
}
