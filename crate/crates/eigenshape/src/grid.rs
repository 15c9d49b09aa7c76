//! Rasterized planar open sets, grid functions on them, and the five-point
//! Dirichlet Laplacian.
//!
//! A mask is a boolean occupancy grid with cell side `h`. Cell centers sit
//! on the integer lattice `(col*h, row*h)` and a cell is active iff its
//! center lies strictly inside the ideal shape, so shape boundaries fall on
//! centers of inactive cells. Under this convention the discrete eigenvalue
//! of an m-cell-wide square block is exactly `(8/h^2) sin^2(pi h / 2)` with
//! `h = 1/(m+1)`: the Dirichlet zeros live one cell beyond the block, on
//! the ideal boundary.
//!
//! Everything off the mask (inactive cells, cells outside the grid) is
//! identically zero; grid functions are the discrete stand-in for trace-zero
//! Sobolev functions.
//!
//! The quadratic form of the stencil and `dirichlet_energy` agree exactly:
//! with the `h^2`-weighted inner product, `<A u, u>` telescopes to the sum
//! of squared differences across cell sides (sides facing inactive cells
//! contribute the cell value itself). Eigensolver and quotient therefore
//! share one energy, and the solver paths are comparable to round-off.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Smallest number of cells across any shape dimension.
const MIN_CELLS_ACROSS: f64 = 3.0;

/// A rasterized bounded open set.
#[derive(Debug, Clone)]
pub struct DomainMask {
    width: usize,
    height: usize,
    h: f64,
    active: Vec<bool>,
    /// cell index -> slot in the active enumeration, -1 if inactive.
    slots: Vec<i32>,
    /// slot -> cell index; the canonical ordering of degrees of freedom.
    cells: Vec<u32>,
    id: String,
}

/// Equality is geometric (grid, cell size, active set); the id label is a
/// tag, not part of the value.
impl PartialEq for DomainMask {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.h == other.h
            && self.active == other.active
    }
}

impl DomainMask {
    pub(crate) fn from_active(
        width: usize,
        height: usize,
        h: f64,
        active: Vec<bool>,
        id: &str,
    ) -> Self {
        debug_assert_eq!(active.len(), width * height);
        debug_assert!(width * height <= i32::MAX as usize);
        let mut slots = vec![-1i32; active.len()];
        let mut cells = Vec::new();
        for (cell, &on) in active.iter().enumerate() {
            if on {
                slots[cell] = cells.len() as i32;
                cells.push(cell as u32);
            }
        }
        DomainMask {
            width,
            height,
            h,
            active,
            slots,
            cells,
            id: id.to_string(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Cell side.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.id = id.to_string();
        self
    }

    /// Number of active cells.
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// `h^2` times the active cell count.
    pub fn measure(&self) -> f64 {
        self.h * self.h * self.cells.len() as f64
    }

    /// Active-cell indices in slot order.
    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn cell_row_col(&self, cell: u32) -> (usize, usize) {
        (cell as usize / self.width, cell as usize % self.width)
    }

    /// Slot of the cell at (row, col), if active.
    pub fn slot(&self, row: usize, col: usize) -> Option<usize> {
        if row >= self.height || col >= self.width {
            return None;
        }
        let s = self.slots[row * self.width + col];
        (s >= 0).then_some(s as usize)
    }

    pub fn is_active(&self, row: i64, col: i64) -> bool {
        if row < 0 || col < 0 || row >= self.height as i64 || col >= self.width as i64 {
            return false;
        }
        self.active[row as usize * self.width + col as usize]
    }

    /// Mask with the same grid but only the active cells `keep` selects
    /// (indexed by slot). May be empty; intended for nodal parts.
    pub fn sub_mask(&self, keep: impl Fn(usize) -> bool, id: &str) -> DomainMask {
        let mut active = vec![false; self.width * self.height];
        for (slot, &cell) in self.cells.iter().enumerate() {
            if keep(slot) {
                active[cell as usize] = true;
            }
        }
        DomainMask::from_active(self.width, self.height, self.h, active, id)
    }

    /// Number of 4-connected components of the active set.
    pub fn connected_components(&self) -> usize {
        self.component_labels().1
    }

    /// Per-slot component label plus the component count.
    pub fn component_labels(&self) -> (Vec<u32>, usize) {
        let mut label = vec![u32::MAX; self.cells.len()];
        let mut count = 0usize;
        let mut stack = Vec::new();
        for start in 0..self.cells.len() {
            if label[start] != u32::MAX {
                continue;
            }
            label[start] = count as u32;
            stack.push(start);
            while let Some(slot) = stack.pop() {
                let (r, c) = self.cell_row_col(self.cells[slot]);
                for (dr, dc) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if self.is_active(nr, nc) {
                        let ns = self.slot(nr as usize, nc as usize).unwrap();
                        if label[ns] == u32::MAX {
                            label[ns] = count as u32;
                            stack.push(ns);
                        }
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Portable text form: `mask <width> <height> <h>` then one 0/1 row per
    /// line. Round-trips bit-exactly (`h` is printed in shortest
    /// round-trip form).
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.width * self.height + self.height + 32);
        writeln!(out, "mask {} {} {}", self.width, self.height, self.h).unwrap();
        for row in 0..self.height {
            for col in 0..self.width {
                out.push(if self.active[row * self.width + col] {
                    '1'
                } else {
                    '0'
                });
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<DomainMask> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MaskFormat("empty input".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("mask") {
            return Err(Error::MaskFormat("header must start with 'mask'".into()));
        }
        let width: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MaskFormat("bad width".into()))?;
        let height: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MaskFormat("bad height".into()))?;
        let h: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MaskFormat("bad cell size".into()))?;
        if parts.next().is_some() {
            return Err(Error::MaskFormat("trailing tokens in header".into()));
        }
        if width == 0 || height == 0 || !(h > 0.0) {
            return Err(Error::MaskFormat("degenerate dimensions".into()));
        }
        let mut active = Vec::with_capacity(width * height);
        for row in 0..height {
            let line = lines
                .next()
                .ok_or_else(|| Error::MaskFormat(format!("missing row {row}")))?;
            if line.len() != width {
                return Err(Error::MaskFormat(format!(
                    "row {row} has {} cells, expected {width}",
                    line.len()
                )));
            }
            for ch in line.chars() {
                match ch {
                    '0' => active.push(false),
                    '1' => active.push(true),
                    _ => return Err(Error::MaskFormat(format!("bad cell character {ch:?}"))),
                }
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::MaskFormat("trailing rows".into()));
        }
        Ok(DomainMask::from_active(width, height, h, active, "mask"))
    }

    /// Build from literal 0/1 rows; convenient in tests and examples.
    pub fn from_pattern(rows: &[&str], h: f64) -> Result<DomainMask> {
        if rows.is_empty() {
            return Err(Error::MaskFormat("no rows".into()));
        }
        let mut text = format!("mask {} {} {}\n", rows[0].len(), rows.len(), h);
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        DomainMask::from_text(&text)
    }
}

fn check_resolution(extent: f64, h: f64, what: &str) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("cell size must be > 0, got {h}")));
    }
    if extent < MIN_CELLS_ACROSS * h {
        return Err(Error::Resolution(format!(
            "{what} spans {extent} which is below {MIN_CELLS_ACROSS} cells at h = {h}"
        )));
    }
    Ok(())
}

/// Cells strictly inside a disk of the given radius. The disk center sits
/// on a cell center.
pub fn make_disk(radius: f64, h: f64) -> Result<DomainMask> {
    check_resolution(2.0 * radius, h, "disk diameter")?;
    let e = (radius / h).ceil() as usize - 1; // farthest active offset
    let side = 2 * e + 1;
    let r2 = (radius / h) * (radius / h);
    let c = e as i64;
    let mut active = vec![false; side * side];
    for row in 0..side {
        for col in 0..side {
            let (dy, dx) = (row as i64 - c, col as i64 - c);
            if ((dy * dy + dx * dx) as f64) < r2 {
                active[row * side + col] = true;
            }
        }
    }
    Ok(DomainMask::from_active(side, side, h, active, "disk"))
}

/// Two disjoint disks on a horizontal axis, separated by a fixed 4-cell
/// gap (component spectra do not depend on the gap).
pub fn make_two_disks(r1: f64, r2: f64, h: f64) -> Result<DomainMask> {
    check_resolution(2.0 * r1, h, "first disk diameter")?;
    check_resolution(2.0 * r2, h, "second disk diameter")?;
    let e1 = (r1 / h).ceil() as i64 - 1;
    let e2 = (r2 / h).ceil() as i64 - 1;
    let gap = 4i64;
    let c1 = e1;
    let c2 = c1 + e1 + gap + 1 + e2;
    let width = (c2 + e2 + 1) as usize;
    let erow = e1.max(e2);
    let height = (2 * erow + 1) as usize;
    let (q1, q2) = ((r1 / h) * (r1 / h), (r2 / h) * (r2 / h));
    let mut active = vec![false; width * height];
    for row in 0..height {
        for col in 0..width {
            let dy = row as i64 - erow;
            let da = col as i64 - c1;
            let db = col as i64 - c2;
            let in1 = ((dy * dy + da * da) as f64) < q1;
            let in2 = ((dy * dy + db * db) as f64) < q2;
            if in1 || in2 {
                active[row * width + col] = true;
            }
        }
    }
    let mask = DomainMask::from_active(width, height, h, active, "two-disks");
    debug_assert_eq!(mask.connected_components(), 2);
    Ok(mask)
}

/// Axis-aligned open rectangle (0,a) x (0,b).
pub fn make_rectangle(a: f64, b: f64, h: f64) -> Result<DomainMask> {
    check_resolution(a, h, "rectangle width")?;
    check_resolution(b, h, "rectangle height")?;
    // Centers at i*h with 0 < i*h < a: i in 1..=ceil(a/h)-1.
    let nx = (a / h).ceil() as usize - 1;
    let ny = (b / h).ceil() as usize - 1;
    Ok(DomainMask::from_active(
        nx,
        ny,
        h,
        vec![true; nx * ny],
        "rectangle",
    ))
}

/// Open annulus r_in < |x| < r_out, centered on a cell center.
pub fn make_annulus(r_out: f64, r_in: f64, h: f64) -> Result<DomainMask> {
    if !(r_in >= 0.0) || r_in >= r_out {
        return Err(Error::Domain(format!(
            "annulus requires 0 <= r_in < r_out, got r_in = {r_in}, r_out = {r_out}"
        )));
    }
    check_resolution(r_out - r_in, h, "annulus width")?;
    let e = (r_out / h).ceil() as usize - 1;
    let side = 2 * e + 1;
    let c = e as i64;
    let (qo, qi) = ((r_out / h) * (r_out / h), (r_in / h) * (r_in / h));
    let mut active = vec![false; side * side];
    for row in 0..side {
        for col in 0..side {
            let (dy, dx) = (row as i64 - c, col as i64 - c);
            let d2 = (dy * dy + dx * dx) as f64;
            if d2 < qo && d2 > qi {
                active[row * side + col] = true;
            }
        }
    }
    Ok(DomainMask::from_active(side, side, h, active, "annulus"))
}

/// L-shaped set: the open square (0,size)^2 minus its closed upper-right
/// quadrant.
pub fn make_l_shape(size: f64, h: f64) -> Result<DomainMask> {
    // Each leg must itself resolve.
    check_resolution(size / 2.0, h, "L-shape leg width")?;
    let n = (size / h).ceil() as usize - 1;
    let half = size / 2.0;
    let mut active = vec![false; n * n];
    for row in 0..n {
        for col in 0..n {
            let x = (col + 1) as f64 * h;
            let y = (row + 1) as f64 * h;
            if !(x >= half && y >= half) {
                active[row * n + col] = true;
            }
        }
    }
    Ok(DomainMask::from_active(n, n, h, active, "l-shape"))
}

/// Real values on the active cells of a mask; zero elsewhere.
#[derive(Debug, Clone)]
pub struct GridFunction {
    mask: Arc<DomainMask>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(mask: Arc<DomainMask>) -> Self {
        let n = mask.cell_count();
        GridFunction {
            mask,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(mask: Arc<DomainMask>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mask.cell_count(), "one value per active cell");
        GridFunction { mask, values }
    }

    /// Evaluate `f(row, col)` on every active cell.
    pub fn from_fn(mask: Arc<DomainMask>, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = mask
            .cells()
            .iter()
            .map(|&cell| {
                let (r, c) = mask.cell_row_col(cell);
                f(r, c)
            })
            .collect();
        GridFunction { mask, values }
    }

    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `h^2 sum v^2`, the discrete squared L2 norm.
    pub fn l2_norm_sq(&self) -> f64 {
        let h2 = self.mask.h * self.mask.h;
        h2 * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// `h^2 sum |v| v`, the midpoint rule for the signed-square mass.
    pub fn signed_square_integral(&self) -> f64 {
        let h2 = self.mask.h * self.mask.h;
        h2 * self.values.iter().map(|v| v.abs() * v).sum::<f64>()
    }

    /// Sum of squared differences across cell sides; sides facing inactive
    /// cells see the implicit zero. Equals `<A u, u>` of the stencil in
    /// the `h^2`-weighted inner product, exactly.
    pub fn dirichlet_energy(&self) -> f64 {
        let mask = &self.mask;
        let mut energy = 0.0;
        for (slot, &cell) in mask.cells.iter().enumerate() {
            let v = self.values[slot];
            let (r, c) = mask.cell_row_col(cell);
            // Right and down edges are counted here once per edge; left and
            // up sides only contribute when the neighbor is off-mask.
            for (dr, dc, owns_edge) in [
                (0i64, 1i64, true),
                (1, 0, true),
                (0, -1, false),
                (-1, 0, false),
            ] {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if mask.is_active(nr, nc) {
                    if owns_edge {
                        let w = self.values[mask.slot(nr as usize, nc as usize).unwrap()];
                        energy += (v - w) * (v - w);
                    }
                } else {
                    energy += v * v;
                }
            }
        }
        energy
    }

    /// The penalized Rayleigh quotient
    /// `(energy + alpha |h^2 sum |v| v|) / (h^2 sum v^2)`.
    pub fn quotient(&self, alpha: f64) -> Result<f64> {
        let den = self.l2_norm_sq();
        if den == 0.0 {
            return Err(Error::Domain("quotient of the zero function".into()));
        }
        Ok((self.dirichlet_energy() + alpha * self.signed_square_integral().abs()) / den)
    }

    /// Split into nonnegative parts `u = u_plus - u_minus` together with
    /// their strict positivity sets.
    pub fn sign_split(&self) -> (GridFunction, GridFunction, DomainMask, DomainMask) {
        let plus: Vec<f64> = self.values.iter().map(|&v| v.max(0.0)).collect();
        let minus: Vec<f64> = self.values.iter().map(|&v| (-v).max(0.0)).collect();
        let omega_plus = self.mask.sub_mask(|s| self.values[s] > 0.0, "part+");
        let omega_minus = self.mask.sub_mask(|s| self.values[s] < 0.0, "part-");
        (
            GridFunction::from_values(self.mask.clone(), plus),
            GridFunction::from_values(self.mask.clone(), minus),
            omega_plus,
            omega_minus,
        )
    }

    /// Restriction to a sub-mask of the same grid (values off the sub-mask
    /// are dropped).
    pub fn restrict_to(&self, sub: &Arc<DomainMask>) -> GridFunction {
        assert_eq!(sub.width, self.mask.width);
        assert_eq!(sub.height, self.mask.height);
        let values = sub
            .cells()
            .iter()
            .map(|&cell| {
                let (r, c) = sub.cell_row_col(cell);
                self.mask.slot(r, c).map_or(0.0, |s| self.values[s])
            })
            .collect();
        GridFunction {
            mask: sub.clone(),
            values,
        }
    }
}

/// The five-point Dirichlet Laplacian on a mask, applied matrix-free.
/// `(A u)_i = (4 u_i - sum of active neighbors) / h^2`.
pub struct StiffnessOperator {
    mask: Arc<DomainMask>,
    /// Per slot, the four neighbor slots (-1 where off-mask).
    neighbors: Vec<[i32; 4]>,
    inv_h2: f64,
}

impl StiffnessOperator {
    pub fn new(mask: Arc<DomainMask>) -> Self {
        let mut neighbors = Vec::with_capacity(mask.cell_count());
        for &cell in mask.cells.iter() {
            let (r, c) = mask.cell_row_col(cell);
            let mut nb = [-1i32; 4];
            for (k, (dr, dc)) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)].iter().enumerate() {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if mask.is_active(nr, nc) {
                    nb[k] = mask.slots[nr as usize * mask.width + nc as usize];
                }
            }
            neighbors.push(nb);
        }
        let inv_h2 = 1.0 / (mask.h * mask.h);
        StiffnessOperator {
            mask,
            neighbors,
            inv_h2,
        }
    }

    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn apply_slice(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.neighbors.len());
        debug_assert_eq!(out.len(), self.neighbors.len());
        for (i, nb) in self.neighbors.iter().enumerate() {
            let mut acc = 4.0 * u[i];
            for &s in nb {
                if s >= 0 {
                    acc -= u[s as usize];
                }
            }
            out[i] = acc * self.inv_h2;
        }
    }

    pub fn apply(&self, u: &GridFunction) -> GridFunction {
        assert!(
            Arc::ptr_eq(u.mask(), &self.mask),
            "operator and function masks differ"
        );
        let mut out = vec![0.0; u.values.len()];
        self.apply_slice(&u.values, &mut out);
        GridFunction {
            mask: self.mask.clone(),
            values: out,
        }
    }
}
