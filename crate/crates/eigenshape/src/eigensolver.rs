//! Smallest Dirichlet eigenvalue on a mask.
//!
//! Two routes that cross-check each other:
//!
//! * inverse power iteration with a conjugate-gradient inner solve on the
//!   stencil (matrix-free, any size);
//! * a dense symmetric eigendecomposition of the assembled matrix, capped
//!   at [`DENSE_CAP`] cells, used as ground truth on small masks.
//!
//! The stencil is positive definite, so CG needs no shift. Convergence
//! demands both a stagnating eigenvalue (change below `tol * value`) and a
//! small eigen-residual (below `sqrt(tol) * value`): values converge
//! quadratically in the vector error, and downstream consumers (nodal
//! diagnostics, twisted initializers) need the vector too.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{DomainMask, GridFunction, StiffnessOperator};

/// Largest active-cell count accepted by the dense path.
pub const DENSE_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    InverseIteration,
    DenseOracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::InverseIteration => write!(f, "inverse-iteration"),
            Method::DenseOracle => write!(f, "dense-oracle"),
        }
    }
}

/// A converged eigenpair (or constrained minimum downstream).
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub value: f64,
    /// Normalized so the h^2-weighted squared norm is 1.
    pub eigenfunction: GridFunction,
    /// `||A u - value u|| / ||u||`, weight-independent.
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Relative stagnation tolerance on the eigenvalue.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions {
            tol,
            ..Default::default()
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Normalize to unit h^2-weighted norm; returns false on the zero vector.
fn normalize(h: f64, v: &mut [f64]) -> bool {
    let s = h * norm(v);
    if s == 0.0 {
        return false;
    }
    let inv = 1.0 / s;
    for x in v.iter_mut() {
        *x *= inv;
    }
    true
}

/// Conjugate gradients for `A x = b`, starting from `x` in place.
/// Stops when the residual drops below `rel_tol * ||b||`. Returns the
/// iteration count.
fn cg_solve(
    op: &StiffnessOperator,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> usize {
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    op.apply_slice(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let b_norm = norm(b).max(f64::MIN_POSITIVE);
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let mut iters = 0;
    while rs.sqrt() > rel_tol * b_norm && iters < max_iter {
        op.apply_slice(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break; // numerically lost positive definiteness; bail with x as is
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        iters += 1;
    }
    iters
}

struct IterationOutcome {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
    iterations: usize,
}

/// Inverse power iteration from `start`, optionally deflating against a
/// fixed unit vector (h^2-normalized) after every solve.
fn inverse_iteration(
    op: &StiffnessOperator,
    start: Vec<f64>,
    deflate: Option<&[f64]>,
    opts: SolveOptions,
) -> Result<IterationOutcome> {
    let n = op.len();
    let h = op.mask().h();
    let h2 = h * h;
    let mut u = start;
    let project = |v: &mut Vec<f64>| {
        if let Some(d) = deflate {
            let c = h2 * dot(v, d);
            for i in 0..n {
                v[i] -= c * d[i];
            }
        }
    };
    project(&mut u);
    if !normalize(h, &mut u) {
        return Err(Error::Domain(
            "start vector vanished under deflation".into(),
        ));
    }

    let mut au = vec![0.0; n];
    op.apply_slice(&u, &mut au);
    let mut value = h2 * dot(&u, &au);
    let mut y = vec![0.0; n];
    let cg_cap = (8 * n).max(2000);

    for outer in 1..=opts.max_iter {
        // Warm start from the expected solution scale u / value.
        for i in 0..n {
            y[i] = u[i] / value.max(f64::MIN_POSITIVE);
        }
        cg_solve(op, &u, &mut y, (opts.tol * 1e-2).max(1e-13), cg_cap);
        project(&mut y);
        if !normalize(h, &mut y) {
            return Err(Error::NonConvergence {
                what: "inverse iteration".into(),
                iterations: outer,
                residual: f64::NAN,
            });
        }
        op.apply_slice(&y, &mut au);
        let new_value = h2 * dot(&y, &au);
        let mut res = 0.0;
        for i in 0..n {
            let d = au[i] - new_value * y[i];
            res += d * d;
        }
        let residual = res.sqrt() * h; // ||.|| in the h^2-weighted norm, ||y|| = 1
        let stagnated = (new_value - value).abs() <= opts.tol * new_value.abs();
        value = new_value;
        std::mem::swap(&mut u, &mut y);
        if stagnated && residual <= opts.tol.sqrt() * value {
            return Ok(IterationOutcome {
                value,
                vector: u,
                residual,
                iterations: outer,
            });
        }
    }
    let mut res = 0.0;
    op.apply_slice(&u, &mut au);
    for i in 0..n {
        let d = au[i] - value * u[i];
        res += d * d;
    }
    Err(Error::NonConvergence {
        what: "inverse iteration".into(),
        iterations: opts.max_iter,
        residual: res.sqrt() * h,
    })
}

fn check_nonempty(mask: &Arc<DomainMask>) -> Result<()> {
    if mask.cell_count() == 0 {
        return Err(Error::Domain(format!(
            "mask '{}' has no active cells",
            mask.id()
        )));
    }
    Ok(())
}

/// Smallest eigenvalue and nonnegative ground state by inverse iteration.
/// On multi-component masks this is the minimum over components; for a
/// degenerate smallest eigenvalue any eigenspace vector may be returned.
pub fn lambda_dirichlet(mask: &Arc<DomainMask>, opts: SolveOptions) -> Result<SpectralResult> {
    check_nonempty(mask)?;
    let op = StiffnessOperator::new(mask.clone());
    // All-ones start: strictly positive overlap with the ground state.
    let out = inverse_iteration(&op, vec![1.0; op.len()], None, opts)?;
    let mut vector = out.vector;
    if vector.iter().sum::<f64>() < 0.0 {
        for v in vector.iter_mut() {
            *v = -*v;
        }
    }
    Ok(SpectralResult {
        value: out.value,
        eigenfunction: GridFunction::from_values(mask.clone(), vector),
        residual: out.residual,
        iterations: out.iterations,
        method: Method::InverseIteration,
    })
}

/// Second-smallest eigenpair, via inverse iteration deflated against the
/// ground state. Needed only as an initializer for the constrained solver.
pub fn lambda_dirichlet_second(
    mask: &Arc<DomainMask>,
    ground: &SpectralResult,
    opts: SolveOptions,
) -> Result<SpectralResult> {
    check_nonempty(mask)?;
    if mask.cell_count() < 2 {
        return Err(Error::Infeasible(
            "no second eigenvector on a single cell".into(),
        ));
    }
    let op = StiffnessOperator::new(mask.clone());
    let g = ground.eigenfunction.values();
    // A start with sign structure: linear ramp across the columns, which is
    // far from the one-signed ground state on every test shape.
    let w = mask.width() as f64;
    let start: Vec<f64> = mask
        .cells()
        .iter()
        .map(|&cell| {
            let (_, c) = mask.cell_row_col(cell);
            c as f64 - 0.5 * (w - 1.0)
        })
        .collect();
    let out = inverse_iteration(&op, start, Some(g), opts)?;
    Ok(SpectralResult {
        value: out.value,
        eigenfunction: GridFunction::from_values(mask.clone(), out.vector),
        residual: out.residual,
        iterations: out.iterations,
        method: Method::InverseIteration,
    })
}

/// Assemble the stencil matrix densely (for the oracle paths).
fn assemble_dense(mask: &Arc<DomainMask>) -> nalgebra::DMatrix<f64> {
    let n = mask.cell_count();
    let inv_h2 = 1.0 / (mask.h() * mask.h());
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (slot, &cell) in mask.cells().iter().enumerate() {
        m[(slot, slot)] = 4.0 * inv_h2;
        let (r, c) = mask.cell_row_col(cell);
        for (dr, dc) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
            if mask.is_active(nr, nc) {
                let ns = mask.slot(nr as usize, nc as usize).unwrap();
                m[(slot, ns)] = -inv_h2;
            }
        }
    }
    m
}

/// The `k` lowest eigenpairs from a full dense decomposition, ascending.
/// Ground truth for small masks; errors above [`DENSE_CAP`] cells.
pub fn dense_lowest(mask: &Arc<DomainMask>, k: usize) -> Result<Vec<(f64, GridFunction)>> {
    check_nonempty(mask)?;
    let n = mask.cell_count();
    if n > DENSE_CAP {
        return Err(Error::SizeExceeded {
            cells: n,
            cap: DENSE_CAP,
        });
    }
    let eig = nalgebra::SymmetricEigen::new(assemble_dense(mask));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let h = mask.h();
    let mut out = Vec::new();
    for &idx in order.iter().take(k.min(n)) {
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        if v.iter().sum::<f64>() < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        normalize(h, &mut v);
        out.push((
            eig.eigenvalues[idx],
            GridFunction::from_values(mask.clone(), v),
        ));
    }
    Ok(out)
}

/// Smallest eigenpair from the dense decomposition.
pub fn lambda_dirichlet_dense(mask: &Arc<DomainMask>) -> Result<SpectralResult> {
    let (value, eigenfunction) = dense_lowest(mask, 1)?.pop().expect("nonempty mask");
    let op = StiffnessOperator::new(mask.clone());
    let au = op.apply(&eigenfunction);
    let h = mask.h();
    let mut res = 0.0;
    for (a, u) in au.values().iter().zip(eigenfunction.values()) {
        let d = a - value * u;
        res += d * d;
    }
    Ok(SpectralResult {
        value,
        residual: res.sqrt() * h,
        eigenfunction,
        iterations: 0,
        method: Method::DenseOracle,
    })
}

/// Exact smallest stencil eigenvalue of an m-by-m full block with spacing h:
/// `(8/h^2) sin^2(pi h_eff / 2)` with `h_eff = 1/(m+1)` in block units.
/// Exposed for tests and oracles.
pub fn square_block_eigenvalue(m: usize, h: f64) -> f64 {
    let s = (std::f64::consts::PI / (2.0 * (m as f64 + 1.0))).sin();
    8.0 / (h * h) * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{faber_krahn_value, lambda_ball};
    use crate::grid::{make_annulus, make_disk, make_l_shape, make_rectangle, make_two_disks};
    use approx::assert_relative_eq;

    fn arc(m: DomainMask) -> Arc<DomainMask> {
        Arc::new(m)
    }

    #[test]
    fn unit_square_matches_exact_discrete_value() {
        for m in [15usize, 31] {
            let h = 1.0 / (m as f64 + 1.0);
            let mask = arc(make_rectangle(1.0, 1.0, h).unwrap());
            assert_eq!(mask.cell_count(), m * m);
            let exact = square_block_eigenvalue(m, h);
            let iter = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
            assert_relative_eq!(iter.value, exact, max_relative = 1e-8);
            let dense = lambda_dirichlet_dense(&mask).unwrap();
            assert_relative_eq!(dense.value, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn single_cell_value() {
        let h = 0.25;
        let mask = arc(DomainMask::from_pattern(&["1"], h).unwrap());
        let dense = lambda_dirichlet_dense(&mask).unwrap();
        assert_relative_eq!(dense.value, 4.0 / (h * h), max_relative = 1e-12);
        let iter = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
        assert_relative_eq!(iter.value, 4.0 / (h * h), max_relative = 1e-12);
    }

    #[test]
    fn two_isolated_cells_degenerate() {
        let h = 0.5;
        let mask = arc(DomainMask::from_pattern(&["101"], h).unwrap());
        let pairs = dense_lowest(&mask, 2).unwrap();
        assert_relative_eq!(pairs[0].0, 4.0 / (h * h), max_relative = 1e-12);
        assert_relative_eq!(pairs[1].0, 4.0 / (h * h), max_relative = 1e-12);
        let iter = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
        assert_relative_eq!(iter.value, 4.0 / (h * h), max_relative = 1e-10);
    }

    #[test]
    fn dense_iterative_agreement_on_small_masks() {
        let masks = [
            arc(make_disk(0.3, 1.0 / 64.0).unwrap()),
            arc(make_rectangle(0.55, 0.35, 1.0 / 64.0).unwrap()),
            arc(make_annulus(0.35, 0.15, 1.0 / 48.0).unwrap()),
            arc(make_l_shape(0.5, 1.0 / 64.0).unwrap()),
            arc(make_two_disks(0.2, 0.15, 1.0 / 48.0).unwrap()),
        ];
        for mask in masks {
            assert!(
                mask.cell_count() <= DENSE_CAP,
                "test mask too big: {}",
                mask.cell_count()
            );
            let dense = lambda_dirichlet_dense(&mask).unwrap();
            let iter = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
            assert_relative_eq!(iter.value, dense.value, max_relative = 1e-8);
            assert!(iter.residual <= 1e-5 * iter.value * 1.01);
        }
    }

    #[test]
    fn ground_state_nonnegative_on_connected_mask() {
        let mask = arc(make_disk(0.4, 1.0 / 48.0).unwrap());
        let res = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
        let min = res
            .eigenfunction
            .values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let max = res
            .eigenfunction
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            min > -1e-8 * max,
            "ground state changes sign: min {min}, max {max}"
        );
        assert_relative_eq!(res.eigenfunction.l2_norm_sq(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn domain_monotonicity() {
        let h = 1.0 / 32.0;
        let big = arc(make_rectangle(1.0, 0.8, h).unwrap());
        let small = arc(make_rectangle(0.7, 0.5, h).unwrap());
        let lb = lambda_dirichlet(&big, SolveOptions::default())
            .unwrap()
            .value;
        let ls = lambda_dirichlet(&small, SolveOptions::default())
            .unwrap()
            .value;
        assert!(lb < ls);
    }

    #[test]
    fn union_rule_matches_min_of_components() {
        let h = 1.0 / 32.0;
        let (r1, r2) = (0.5, 0.35);
        let union = arc(make_two_disks(r1, r2, h).unwrap());
        let a = arc(make_disk(r1, h).unwrap());
        let b = arc(make_disk(r2, h).unwrap());
        let lu = lambda_dirichlet(&union, SolveOptions::default())
            .unwrap()
            .value;
        let la = lambda_dirichlet(&a, SolveOptions::default()).unwrap().value;
        let lb = lambda_dirichlet(&b, SolveOptions::default()).unwrap().value;
        assert_relative_eq!(lu, la.min(lb), max_relative = 1e-8);
    }

    #[test]
    fn disk_value_converges_to_bessel_constant() {
        let exact = lambda_ball(2, 1.0).unwrap();
        let mut errs = Vec::new();
        for &denom in &[16.0, 32.0, 64.0] {
            let mask = arc(make_disk(1.0, 1.0 / denom).unwrap());
            let val = lambda_dirichlet(&mask, SolveOptions::with_tol(1e-9))
                .unwrap()
                .value;
            errs.push((val - exact).abs() / exact);
        }
        assert!(
            errs[0] > errs[1] && errs[1] > errs[2],
            "errors not decreasing: {errs:?}"
        );
        assert!(errs[2] < 0.04, "h = 1/64 error too large: {errs:?}");
    }

    #[test]
    fn discrete_faber_krahn_holds_with_slack() {
        let h = 1.0 / 64.0;
        for mask in [
            arc(make_rectangle(1.0, 1.0, h).unwrap()),
            arc(make_l_shape(1.0, h).unwrap()),
            arc(make_annulus(0.62, 0.3, h).unwrap()),
        ] {
            let lam = lambda_dirichlet(&mask, SolveOptions::default())
                .unwrap()
                .value;
            let fk = faber_krahn_value(2, mask.measure()).unwrap();
            assert!(lam >= fk * 0.98, "{}: {lam} < {fk}", mask.id());
        }
    }

    #[test]
    fn second_eigenpair_of_square_block() {
        // 15x15 block: second discrete eigenvalue is
        // (4/h^2)(sin^2(pi/(2(m+1))) + sin^2(pi/(m+1))).
        let m = 15usize;
        let h = 1.0 / (m as f64 + 1.0);
        let mask = arc(make_rectangle(1.0, 1.0, h).unwrap());
        let ground = lambda_dirichlet(&mask, SolveOptions::default()).unwrap();
        let second = lambda_dirichlet_second(&mask, &ground, SolveOptions::default()).unwrap();
        let s1 = (std::f64::consts::PI / (2.0 * (m as f64 + 1.0))).sin();
        let s2 = (std::f64::consts::PI / (m as f64 + 1.0)).sin();
        let exact = 4.0 / (h * h) * (s1 * s1 + s2 * s2);
        assert_relative_eq!(second.value, exact, max_relative = 1e-7);
        // It changes sign.
        let min = second
            .eigenfunction
            .values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let max = second
            .eigenfunction
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(min < 0.0 && max > 0.0);
    }

    #[test]
    fn dense_cap_enforced() {
        let mask = arc(make_rectangle(1.0, 1.0, 1.0 / 64.0).unwrap());
        assert!(mask.cell_count() > DENSE_CAP);
        assert!(matches!(
            lambda_dirichlet_dense(&mask),
            Err(Error::SizeExceeded { .. })
        ));
    }
}
