//! Experiment configuration files.
//!
//! The format is line-oriented text: `key = value` pairs, `#` comments, and
//! `[shape]` section blocks. Keys appearing before the first `[shape]` block
//! configure the run; each `[shape]` block describes one domain. Unknown
//! keys, unknown section names, and malformed values are rejected with the
//! offending line number.
//!
//! ```text
//! # global run parameters
//! h           = 0.0078125
//! alpha_min   = 0
//! alpha_max   = 36.34
//! alpha_steps = 21
//! tol         = 1e-8
//! slack       = 0.02
//! seed        = 7
//! output_dir  = out
//!
//! [shape]
//! kind    = disk
//! measure = 1
//!
//! [shape]
//! kind    = rectangle
//! aspect  = 2
//! measure = 1
//! ```
//!
//! Global keys: `h`, `alpha_min`, `alpha_max`, `alpha_steps`, `alpha_list`
//! (comma-separated, overrides the three grid keys), `tol`, `slack`, `seed`,
//! `restarts`, `output_dir`. Shape keys: `kind`, `measure`, `id`, plus the
//! kind-specific parameter (`aspect` for rectangles, `inner_fraction` for
//! annuli, `radius_ratio` for two-disk unions). Every key has a default
//! except `kind`.

use std::path::PathBuf;

use crate::closed_form::alpha_critical;
use crate::error::{Error, Result};
use crate::variational::DEFAULT_RESTARTS;

/// Geometry family of one configured domain, with its shape parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeKind {
    Disk,
    Square,
    /// Rectangle with side ratio `aspect` (long side / short side).
    Rectangle {
        aspect: f64,
    },
    /// Annulus with `inner_fraction` = inner radius / outer radius.
    Annulus {
        inner_fraction: f64,
    },
    /// Square minus its upper-right quadrant.
    LShape,
    /// Two disjoint disks with `radius_ratio` = smaller radius / larger.
    TwoDisks {
        radius_ratio: f64,
    },
}

impl ShapeKind {
    /// Canonical kind name as written in config files.
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Disk => "disk",
            ShapeKind::Square => "square",
            ShapeKind::Rectangle { .. } => "rectangle",
            ShapeKind::Annulus { .. } => "annulus",
            ShapeKind::LShape => "l-shape",
            ShapeKind::TwoDisks { .. } => "two-disks",
        }
    }
}

/// One domain to run: a geometry family realized at a target measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    /// Target planar measure of the ideal (continuum) shape.
    pub measure: f64,
    /// Identifier used in CSV rows and chart legends.
    pub id: String,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind, measure: f64) -> Self {
        let id = derived_id(&kind);
        ShapeSpec { kind, measure, id }
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.id = id.to_string();
        self
    }
}

fn derived_id(kind: &ShapeKind) -> String {
    match kind {
        ShapeKind::Disk => "disk".to_string(),
        ShapeKind::Square => "square".to_string(),
        ShapeKind::Rectangle { aspect } => format!("rect-{aspect}"),
        ShapeKind::Annulus { inner_fraction } => format!("annulus-{inner_fraction}"),
        ShapeKind::LShape => "l-shape".to_string(),
        ShapeKind::TwoDisks { radius_ratio } => format!("two-disks-{radius_ratio}"),
    }
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Grid spacing for rasterization.
    pub h: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Number of evenly spaced alpha samples (endpoints included).
    pub alpha_steps: usize,
    /// Explicit alpha values; when set, replaces the uniform grid.
    pub alpha_list: Option<Vec<f64>>,
    /// Solver tolerance (eigenvalue and descent convergence).
    pub tol: f64,
    /// Relative slack for verification margins.
    pub slack: f64,
    /// Seed for randomized solver restarts.
    pub seed: u64,
    /// Restart count for the constrained minimization.
    pub restarts: usize,
    pub output_dir: PathBuf,
    pub shapes: Vec<ShapeSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        // alpha_critical(2) only fails for n = 0, so the expect is static.
        let ac = alpha_critical(2).expect("alpha_critical(2) is defined");
        ExperimentConfig {
            h: 1.0 / 64.0,
            alpha_min: 0.0,
            alpha_max: 2.0 * ac,
            alpha_steps: 21,
            alpha_list: None,
            tol: 1e-8,
            slack: 0.02,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            output_dir: PathBuf::from("out"),
            shapes: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    /// The alpha samples for this run: either the explicit list or
    /// `alpha_steps` evenly spaced values with exact endpoints.
    pub fn alpha_values(&self) -> Vec<f64> {
        if let Some(list) = &self.alpha_list {
            return list.clone();
        }
        let span = self.alpha_max - self.alpha_min;
        let last = self.alpha_steps - 1;
        (0..self.alpha_steps)
            .map(|k| {
                if k == last {
                    self.alpha_max
                } else {
                    self.alpha_min + span * k as f64 / last as f64
                }
            })
            .collect()
    }

    /// Errors unless every shape has the same target measure. Envelope
    /// comparisons are only meaningful across shapes of equal measure.
    pub fn require_equal_measures(&self) -> Result<()> {
        if let Some(first) = self.shapes.first() {
            for s in &self.shapes {
                if s.measure != first.measure {
                    return Err(Error::Config {
                        line: 0,
                        message: format!(
                            "envelope runs need equal measures across shapes; \
                             `{}` has measure {} but `{}` has {}",
                            first.id, first.measure, s.id, s.measure
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(Error::Config { line: 0, message });
        if !(self.h > 0.0 && self.h < 0.5) {
            return bad(format!("h must lie in (0, 0.5), got {}", self.h));
        }
        if !(self.alpha_min <= self.alpha_max) {
            return bad(format!(
                "alpha_min must not exceed alpha_max, got {} > {}",
                self.alpha_min, self.alpha_max
            ));
        }
        if self.alpha_steps < 2 {
            return bad(format!(
                "alpha_steps must be at least 2, got {}",
                self.alpha_steps
            ));
        }
        if let Some(list) = &self.alpha_list {
            if list.is_empty() {
                return bad("alpha_list must not be empty".to_string());
            }
            if list.iter().any(|a| !a.is_finite()) {
                return bad("alpha_list entries must be finite".to_string());
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return bad("alpha_list must be strictly increasing".to_string());
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.slack > 0.0 && self.slack.is_finite()) {
            return bad(format!("slack must be positive, got {}", self.slack));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".to_string());
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.shapes {
            if !(s.measure > 0.0 && s.measure.is_finite()) {
                return bad(format!(
                    "shape `{}` needs a positive measure, got {}",
                    s.id, s.measure
                ));
            }
            if !seen.insert(s.id.clone()) {
                return bad(format!(
                    "duplicate shape id `{}`; set distinct `id` keys",
                    s.id
                ));
            }
        }
        Ok(())
    }
}

/// Raw key/value with its source line, collected per scope.
struct RawEntry {
    line: usize,
    key: String,
    value: String,
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_f64(e: &RawEntry) -> Result<f64> {
    e.value.parse::<f64>().map_err(|_| {
        config_err(
            e.line,
            format!("key `{}` expects a number, got `{}`", e.key, e.value),
        )
    })
}

fn parse_usize(e: &RawEntry) -> Result<usize> {
    e.value.parse::<usize>().map_err(|_| {
        config_err(
            e.line,
            format!(
                "key `{}` expects a nonnegative integer, got `{}`",
                e.key, e.value
            ),
        )
    })
}

fn parse_u64(e: &RawEntry) -> Result<u64> {
    e.value.parse::<u64>().map_err(|_| {
        config_err(
            e.line,
            format!(
                "key `{}` expects a nonnegative integer, got `{}`",
                e.key, e.value
            ),
        )
    })
}

fn parse_f64_list(e: &RawEntry) -> Result<Vec<f64>> {
    e.value
        .split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                config_err(
                    e.line,
                    format!(
                        "key `{}` expects comma-separated numbers, got `{}`",
                        e.key,
                        part.trim()
                    ),
                )
            })
        })
        .collect()
}

/// Builds one `ShapeSpec` from a `[shape]` block's raw entries.
fn finalize_shape(header_line: usize, entries: &[RawEntry]) -> Result<ShapeSpec> {
    let mut kind_entry: Option<&RawEntry> = None;
    let mut measure = 1.0;
    let mut id: Option<String> = None;
    let mut aspect: Option<&RawEntry> = None;
    let mut inner_fraction: Option<&RawEntry> = None;
    let mut radius_ratio: Option<&RawEntry> = None;

    for e in entries {
        match e.key.as_str() {
            "kind" => kind_entry = Some(e),
            "measure" => measure = parse_f64(e)?,
            "id" => id = Some(e.value.clone()),
            "aspect" => aspect = Some(e),
            "inner_fraction" => inner_fraction = Some(e),
            "radius_ratio" => radius_ratio = Some(e),
            other => {
                return Err(config_err(e.line, format!("unknown shape key `{other}`")));
            }
        }
    }

    let kind_entry =
        kind_entry.ok_or_else(|| config_err(header_line, "[shape] block is missing `kind`"))?;
    let kind_name = kind_entry.value.replace('_', "-");

    // Reject parameters that do not apply to the chosen kind, so a typo
    // cannot silently configure a different shape than intended.
    let reject_unless = |param: Option<&RawEntry>, allowed: &str| -> Result<()> {
        if let Some(e) = param {
            if kind_name != allowed {
                return Err(config_err(
                    e.line,
                    format!("key `{}` is only valid for kind `{}`", e.key, allowed),
                ));
            }
        }
        Ok(())
    };
    reject_unless(aspect, "rectangle")?;
    reject_unless(inner_fraction, "annulus")?;
    reject_unless(radius_ratio, "two-disks")?;

    let kind = match kind_name.as_str() {
        "disk" => ShapeKind::Disk,
        "square" => ShapeKind::Square,
        "rectangle" => {
            let a = aspect.map(parse_f64).transpose()?.unwrap_or(2.0);
            if !(a >= 1.0 && a.is_finite()) {
                return Err(config_err(
                    aspect.map_or(header_line, |e| e.line),
                    format!("aspect must be at least 1, got {a}"),
                ));
            }
            ShapeKind::Rectangle { aspect: a }
        }
        "annulus" => {
            let f = inner_fraction.map(parse_f64).transpose()?.unwrap_or(0.5);
            if !(f > 0.0 && f < 1.0) {
                return Err(config_err(
                    inner_fraction.map_or(header_line, |e| e.line),
                    format!("inner_fraction must lie in (0, 1), got {f}"),
                ));
            }
            ShapeKind::Annulus { inner_fraction: f }
        }
        "l-shape" => ShapeKind::LShape,
        "two-disks" => {
            let q = radius_ratio.map(parse_f64).transpose()?.unwrap_or(0.7);
            if !(q > 0.0 && q <= 1.0) {
                return Err(config_err(
                    radius_ratio.map_or(header_line, |e| e.line),
                    format!("radius_ratio must lie in (0, 1], got {q}"),
                ));
            }
            ShapeKind::TwoDisks { radius_ratio: q }
        }
        other => {
            return Err(config_err(
                kind_entry.line,
                format!(
                    "unknown shape kind `{other}` (expected disk, square, rectangle, \
                     annulus, l-shape, or two-disks)"
                ),
            ));
        }
    };

    let mut spec = ShapeSpec::new(kind, measure);
    if let Some(id) = id {
        spec.id = id;
    }
    Ok(spec)
}

/// Parses a config from text. See the module docs for the format.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut shape_blocks: Vec<(usize, Vec<RawEntry>)> = Vec::new();
    let mut in_shape = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(section) = line.strip_prefix('[') {
            let name = section
                .strip_suffix(']')
                .ok_or_else(|| config_err(line_no, format!("unterminated section `{line}`")))?
                .trim();
            if name != "shape" {
                return Err(config_err(line_no, format!("unknown section `[{name}]`")));
            }
            shape_blocks.push((line_no, Vec::new()));
            in_shape = true;
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(line_no, format!("expected `key = value`, got `{line}`")))?;
        let entry = RawEntry {
            line: line_no,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        };
        if entry.key.is_empty() {
            return Err(config_err(line_no, "missing key before `=`"));
        }
        if entry.value.is_empty() {
            return Err(config_err(
                line_no,
                format!("key `{}` has an empty value", entry.key),
            ));
        }
        if in_shape {
            shape_blocks
                .last_mut()
                .expect("in_shape implies a block")
                .1
                .push(entry);
            continue;
        }
        match entry.key.as_str() {
            "h" => cfg.h = parse_f64(&entry)?,
            "alpha_min" => cfg.alpha_min = parse_f64(&entry)?,
            "alpha_max" => cfg.alpha_max = parse_f64(&entry)?,
            "alpha_steps" => cfg.alpha_steps = parse_usize(&entry)?,
            "alpha_list" => cfg.alpha_list = Some(parse_f64_list(&entry)?),
            "tol" => cfg.tol = parse_f64(&entry)?,
            "slack" => cfg.slack = parse_f64(&entry)?,
            "seed" => cfg.seed = parse_u64(&entry)?,
            "restarts" => cfg.restarts = parse_usize(&entry)?,
            "output_dir" => cfg.output_dir = PathBuf::from(&entry.value),
            other => {
                return Err(config_err(line_no, format!("unknown key `{other}`")));
            }
        }
    }

    for (header_line, entries) in &shape_blocks {
        cfg.shapes.push(finalize_shape(*header_line, entries)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a config file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read config `{}`: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "\
        # a run over two shapes\n\
        h = 0.03125\n\
        alpha_min = 0\n\
        alpha_max = 10\n\
        alpha_steps = 5\n\
        tol = 1e-9\n\
        slack = 0.05\n\
        seed = 11\n\
        restarts = 3\n\
        output_dir = results\n\
        \n\
        [shape]\n\
        kind = disk\n\
        measure = 1\n\
        \n\
        [shape]\n\
        kind = rectangle\n\
        aspect = 2\n\
        measure = 1\n\
        id = tall\n";

    #[test]
    fn full_example_parses() {
        let cfg = parse_config(FULL).unwrap();
        assert_eq!(cfg.h, 0.03125);
        assert_eq!(cfg.alpha_steps, 5);
        assert_eq!(cfg.tol, 1e-9);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.restarts, 3);
        assert_eq!(cfg.output_dir, PathBuf::from("results"));
        assert_eq!(cfg.shapes.len(), 2);
        assert_eq!(cfg.shapes[0].kind, ShapeKind::Disk);
        assert_eq!(cfg.shapes[0].id, "disk");
        assert_eq!(cfg.shapes[1].kind, ShapeKind::Rectangle { aspect: 2.0 });
        assert_eq!(cfg.shapes[1].id, "tall");
        cfg.require_equal_measures().unwrap();
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let cfg = parse_config("[shape]\nkind = square\n").unwrap();
        assert_eq!(cfg.h, 1.0 / 64.0);
        assert_eq!(cfg.alpha_steps, 21);
        assert_eq!(cfg.alpha_min, 0.0);
        assert!(cfg.alpha_max > 36.0 && cfg.alpha_max < 37.0);
        assert_eq!(cfg.shapes[0].measure, 1.0);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn alpha_grid_hits_endpoints_exactly() {
        let cfg = parse_config("alpha_min = 0.1\nalpha_max = 0.7\nalpha_steps = 7\n").unwrap();
        let grid = cfg.alpha_values();
        assert_eq!(grid.len(), 7);
        assert_eq!(grid[0], 0.1);
        assert_eq!(grid[6], 0.7);
        for w in grid.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn alpha_list_overrides_grid() {
        let cfg = parse_config("alpha_list = 0, 1, 5, 50\n").unwrap();
        assert_eq!(cfg.alpha_values(), vec![0.0, 1.0, 5.0, 50.0]);
    }

    #[test]
    fn unknown_global_key_is_an_error_with_line() {
        let err = parse_config("h = 0.1\nfoo = 3\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("foo"), "{message}");
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_shape_key_is_an_error() {
        let err = parse_config("[shape]\nkind = disk\nwobble = 2\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("wobble"), "{message}");
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_section_is_an_error() {
        let err = parse_config("[plot]\nfoo = 1\n").unwrap_err();
        match err {
            Error::Config { line, .. } => assert_eq!(line, 1),
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn parameter_for_wrong_kind_is_an_error() {
        let err = parse_config("[shape]\nkind = disk\naspect = 2\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("rectangle"), "{message}");
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn missing_kind_is_an_error() {
        let err = parse_config("[shape]\nmeasure = 1\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("kind"), "{message}");
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn bad_number_reports_its_line() {
        let err = parse_config("h = 0.1\nalpha_max = lots\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("alpha_max"), "{message}");
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn grid_invariants_are_enforced() {
        assert!(parse_config("alpha_min = 2\nalpha_max = 1\n").is_err());
        assert!(parse_config("alpha_steps = 1\n").is_err());
        assert!(parse_config("h = 0\n").is_err());
        assert!(parse_config("tol = -1e-8\n").is_err());
        assert!(parse_config("restarts = 0\n").is_err());
        assert!(parse_config("alpha_list = 3, 2\n").is_err());
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = "[shape]\nkind = disk\n[shape]\nkind = disk\n";
        let err = parse_config(text).unwrap_err();
        match err {
            Error::Config { message, .. } => assert!(message.contains("duplicate"), "{message}"),
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn unequal_measures_fail_the_envelope_check() {
        let text = "[shape]\nkind = disk\nmeasure = 1\n[shape]\nkind = square\nmeasure = 2\n";
        let cfg = parse_config(text).unwrap();
        assert!(cfg.require_equal_measures().is_err());
    }

    #[test]
    fn underscore_kind_spelling_is_accepted() {
        let cfg = parse_config("[shape]\nkind = l_shape\n[shape]\nkind = two_disks\n").unwrap();
        assert_eq!(cfg.shapes[0].kind, ShapeKind::LShape);
        assert_eq!(cfg.shapes[0].id, "l-shape");
        assert_eq!(
            cfg.shapes[1].kind,
            ShapeKind::TwoDisks { radius_ratio: 0.7 }
        );
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = parse_config("# hi\n\n  h = 0.25 # trailing\n").unwrap();
        assert_eq!(cfg.h, 0.25);
    }

    #[test]
    fn derived_ids_are_stable() {
        assert_eq!(
            ShapeSpec::new(ShapeKind::Rectangle { aspect: 2.0 }, 1.0).id,
            "rect-2"
        );
        assert_eq!(
            ShapeSpec::new(ShapeKind::TwoDisks { radius_ratio: 0.7 }, 1.0).id,
            "two-disks-0.7"
        );
    }
}
