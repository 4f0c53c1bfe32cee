//! Binary operations on `[0,1]`.
//!
//! [`ScalarOp`] covers the usual t-norm and t-conorm families, ordinal sums,
//! nearest-lookup tables and conjugates under the standard negation
//! `N(x) = 1 - x`. Besides plain evaluation every operator can report one-sided
//! limits ([`ScalarOp::directional_limit`]); the convolution code needs these
//! because a supremum over a continuum is frequently approached without being
//! attained.
//!
//! Operators are written in a small text format shared by the command line and
//! the JSON documents:
//!
//! ```text
//! minimum | maximum | product | probabilistic-sum | lukasiewicz
//! lukasiewicz-conorm | drastic | nilpotent-minimum | os-drastic
//! ordinal-sum[(0,0.5,drastic),(0.6,0.9,product)]
//! dual(<op>)
//! tabulated[path/to/table.csv]
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Side from which a one-sided limit is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    /// The arguments increase towards the limit point.
    Below,
    /// The argument is held at the limit point.
    Exact,
    /// The arguments decrease towards the limit point.
    Above,
}

impl Approach {
    pub fn flip(self) -> Self {
        match self {
            Approach::Below => Approach::Above,
            Approach::Exact => Approach::Exact,
            Approach::Above => Approach::Below,
        }
    }

    /// Sign of the perturbation this approach corresponds to.
    pub fn sign(self) -> f64 {
        match self {
            Approach::Below => -1.0,
            Approach::Exact => 0.0,
            Approach::Above => 1.0,
        }
    }
}

/// One block `(lo, hi, inner)` of an ordinal sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Summand {
    pub lo: f64,
    pub hi: f64,
    pub inner: ScalarOp,
}

/// Square table on the uniform grid `i / (n - 1)`, evaluated by nearest lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    n: usize,
    values: Vec<f64>,
    source: Option<String>,
    class: TableClass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TableClass {
    tnorm: bool,
    tconorm: bool,
    continuity: Continuity,
}

/// Continuity flags of an operator.
///
/// For t-conorms the flags describe the conjugate t-norm, so `left_continuous`
/// of a t-conorm means right continuity of the conorm itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Continuity {
    pub continuous: bool,
    pub left_continuous: bool,
    pub border_continuous: bool,
}

impl Continuity {
    const ALL: Continuity = Continuity {
        continuous: true,
        left_continuous: true,
        border_continuous: true,
    };
    const NONE: Continuity = Continuity {
        continuous: false,
        left_continuous: false,
        border_continuous: false,
    };
}

/// A binary operation on `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarOp {
    Minimum,
    Maximum,
    Product,
    ProbabilisticSum,
    Lukasiewicz,
    LukasiewiczConorm,
    Drastic,
    NilpotentMinimum,
    OrdinalSum(Vec<Summand>),
    Tabulated(Arc<Table>),
    /// `N(op(N(x), N(y)))` for an operator without a named conjugate.
    Dual(Box<ScalarOp>),
}

/// Band around `x + y = 1` treated as the nilpotent-minimum edge when limits are taken.
const NM_EDGE: f64 = 1e-12;

/// Index of the grid point `i / (n - 1)` nearest to `x`, ties toward the lower index.
pub fn snap_index(x: f64, n: usize) -> usize {
    let t = x.clamp(0.0, 1.0) * (n - 1) as f64;
    let lower = t.floor();
    let idx = if t - lower > 0.5 { lower + 1.0 } else { lower };
    (idx as usize).min(n - 1)
}

/// The `i`-th point of the uniform grid with `n` points on `[0,1]`.
#[inline]
pub fn grid_point(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64
}

fn in_block(x: f64, dir: Approach, lo: f64, hi: f64) -> bool {
    let above_lo = x > lo || (x == lo && dir != Approach::Below);
    let below_hi = x < hi || (x == hi && dir != Approach::Above);
    above_lo && below_hi
}

/// Rescales an inner value back to the block, keeping exact arguments exact.
fn unscale(v: f64, rx: f64, ry: f64, x: f64, y: f64, lo: f64, hi: f64) -> f64 {
    if v == rx {
        x
    } else if v == ry {
        y
    } else if v == 0.0 {
        lo
    } else if v == 1.0 {
        hi
    } else {
        (lo + (hi - lo) * v).clamp(lo, hi)
    }
}

impl ScalarOp {
    /// The ordinal sum of the drastic t-norm on `[0, 0.5]`: border continuous
    /// but not left-continuous.
    pub fn os_drastic() -> ScalarOp {
        ScalarOp::OrdinalSum(vec![Summand {
            lo: 0.0,
            hi: 0.5,
            inner: ScalarOp::Drastic,
        }])
    }

    /// Evaluates the operator. Arguments are clamped into `[0,1]`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let y = y.clamp(0.0, 1.0);
        let v = match self {
            ScalarOp::Minimum => x.min(y),
            ScalarOp::Maximum => x.max(y),
            ScalarOp::Product => x * y,
            ScalarOp::ProbabilisticSum => {
                if x == 0.0 {
                    y
                } else if y == 0.0 {
                    x
                } else {
                    x + y - x * y
                }
            }
            ScalarOp::Lukasiewicz => {
                if x == 1.0 {
                    y
                } else if y == 1.0 {
                    x
                } else {
                    (x + y - 1.0).max(0.0)
                }
            }
            ScalarOp::LukasiewiczConorm => {
                if x == 0.0 {
                    y
                } else if y == 0.0 {
                    x
                } else {
                    (x + y).min(1.0)
                }
            }
            ScalarOp::Drastic => {
                if x == 1.0 {
                    y
                } else if y == 1.0 {
                    x
                } else {
                    0.0
                }
            }
            ScalarOp::NilpotentMinimum => {
                if x + y > 1.0 {
                    x.min(y)
                } else {
                    0.0
                }
            }
            ScalarOp::OrdinalSum(summands) => {
                match summands
                    .iter()
                    .find(|s| x >= s.lo && x <= s.hi && y >= s.lo && y <= s.hi)
                {
                    Some(s) => {
                        let w = s.hi - s.lo;
                        let rx = ((x - s.lo) / w).clamp(0.0, 1.0);
                        let ry = ((y - s.lo) / w).clamp(0.0, 1.0);
                        let v = s.inner.eval(rx, ry);
                        unscale(v, rx, ry, x, y, s.lo, s.hi)
                    }
                    None => x.min(y),
                }
            }
            ScalarOp::Tabulated(table) => table.lookup(x, y),
            ScalarOp::Dual(inner) => 1.0 - inner.eval(1.0 - x, 1.0 - y),
        };
        v.clamp(0.0, 1.0)
    }

    /// Checked evaluation: rejects arguments outside `[0,1]`.
    pub fn try_eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Input(format!(
                "arguments ({x}, {y}) are outside the unit square"
            )));
        }
        Ok(self.eval(x, y))
    }

    /// Limit of `op(x_k, y_k)` where `x_k -> x` from side `dx` and `y_k -> y`
    /// from side `dy`.
    ///
    /// Closed forms are used for every named family and for ordinal sums, so
    /// the result is exact (a limit of `0.5` from below through the minimum is
    /// `0.5`, not `0.5 - eps`). Tables are piecewise constant and are probed
    /// just beside the point.
    pub fn directional_limit(&self, x: f64, dx: Approach, y: f64, dy: Approach) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let y = y.clamp(0.0, 1.0);
        // Approaching 0 from below or 1 from above is meaningless on [0,1].
        let dx = normalise_dir(x, dx);
        let dy = normalise_dir(y, dy);
        match self {
            ScalarOp::Minimum
            | ScalarOp::Maximum
            | ScalarOp::Product
            | ScalarOp::ProbabilisticSum
            | ScalarOp::Lukasiewicz
            | ScalarOp::LukasiewiczConorm => self.eval(x, y),
            ScalarOp::Drastic => {
                let x_one = x == 1.0 && dx == Approach::Exact;
                let y_one = y == 1.0 && dy == Approach::Exact;
                if x_one {
                    y
                } else if y_one {
                    x
                } else {
                    0.0
                }
            }
            ScalarOp::NilpotentMinimum => {
                let s = x + y - 1.0;
                if s > NM_EDGE {
                    x.min(y)
                } else if s < -NM_EDGE {
                    0.0
                } else {
                    let rising = dx == Approach::Above || dy == Approach::Above;
                    let falling = dx == Approach::Below || dy == Approach::Below;
                    // Opposite approaches leave the sign of x + y - 1 undecided;
                    // take the smaller branch.
                    if rising && !falling {
                        x.min(y)
                    } else {
                        0.0
                    }
                }
            }
            ScalarOp::OrdinalSum(summands) => {
                match summands
                    .iter()
                    .find(|s| in_block(x, dx, s.lo, s.hi) && in_block(y, dy, s.lo, s.hi))
                {
                    Some(s) => {
                        let w = s.hi - s.lo;
                        let rx = ((x - s.lo) / w).clamp(0.0, 1.0);
                        let ry = ((y - s.lo) / w).clamp(0.0, 1.0);
                        let v = s.inner.directional_limit(rx, dx, ry, dy);
                        unscale(v, rx, ry, x, y, s.lo, s.hi)
                    }
                    None => x.min(y),
                }
            }
            ScalarOp::Tabulated(table) => {
                const PROBE: f64 = 1e-12;
                table.lookup(x + dx.sign() * PROBE, y + dy.sign() * PROBE)
            }
            ScalarOp::Dual(inner) => {
                1.0 - inner.directional_limit(1.0 - x, dx.flip(), 1.0 - y, dy.flip())
            }
        }
    }

    /// `a ∗ b⁻ = sup { a ∗ t | t < b }`, with `a ∗ 0⁻ = 0`.
    ///
    /// Named families and ordinal sums use closed forms; tables fall back to
    /// [`ScalarOp::sampled_left_limit`].
    pub fn left_limit(&self, a: f64, b: f64) -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        if self.has_table() {
            return self.sampled_left_limit(a, b);
        }
        self.directional_limit(a, Approach::Exact, b, Approach::Below)
    }

    /// `inf { a ∗ t | t > b }`, with `a ∗ 1⁺ = a ∗ 1`.
    pub fn right_limit(&self, a: f64, b: f64) -> f64 {
        if b >= 1.0 {
            return self.eval(a, 1.0);
        }
        if self.has_table() {
            return self.sampled_right_limit(a, b);
        }
        self.directional_limit(a, Approach::Exact, b, Approach::Above)
    }

    /// Supremum of `op(a, t)` over a geometric sequence `t ↑ b` whose final gap
    /// is at most `1e-6`.
    pub fn sampled_left_limit(&self, a: f64, b: f64) -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        let mut gap = b / 2.0;
        let mut best = 0.0_f64;
        loop {
            best = best.max(self.eval(a, b - gap));
            if gap <= 1e-6 {
                break;
            }
            gap /= 2.0;
        }
        best
    }

    /// Infimum of `op(a, t)` over a geometric sequence `t ↓ b` (final gap ≤ 1e-6).
    pub fn sampled_right_limit(&self, a: f64, b: f64) -> f64 {
        if b >= 1.0 {
            return self.eval(a, 1.0);
        }
        let mut gap = (1.0 - b) / 2.0;
        let mut best = 1.0_f64;
        loop {
            best = best.min(self.eval(a, b + gap));
            if gap <= 1e-6 {
                break;
            }
            gap /= 2.0;
        }
        best
    }

    fn has_table(&self) -> bool {
        match self {
            ScalarOp::Tabulated(_) => true,
            ScalarOp::OrdinalSum(s) => s.iter().any(|s| s.inner.has_table()),
            ScalarOp::Dual(inner) => inner.has_table(),
            _ => false,
        }
    }

    /// Whether the operator is a t-norm (from metadata; tables are checked by
    /// sampling when they are loaded).
    pub fn is_tnorm(&self) -> bool {
        match self {
            ScalarOp::Minimum
            | ScalarOp::Product
            | ScalarOp::Lukasiewicz
            | ScalarOp::Drastic
            | ScalarOp::NilpotentMinimum => true,
            ScalarOp::Maximum | ScalarOp::ProbabilisticSum | ScalarOp::LukasiewiczConorm => false,
            ScalarOp::OrdinalSum(s) => s.iter().all(|s| s.inner.is_tnorm()),
            ScalarOp::Tabulated(t) => t.class.tnorm,
            ScalarOp::Dual(inner) => inner.is_tconorm(),
        }
    }

    pub fn is_tconorm(&self) -> bool {
        match self {
            ScalarOp::Maximum | ScalarOp::ProbabilisticSum | ScalarOp::LukasiewiczConorm => true,
            ScalarOp::Tabulated(t) => t.class.tconorm,
            ScalarOp::Dual(inner) => inner.is_tnorm(),
            _ => false,
        }
    }

    /// Whether the operator is increasing in each place.
    pub fn is_monotone(&self) -> bool {
        self.is_tnorm() || self.is_tconorm() || sampled_monotone(self, 33)
    }

    /// Continuity flags known in closed form. For t-conorms the flags refer to
    /// the conjugate t-norm.
    pub fn continuity(&self) -> Continuity {
        match self {
            ScalarOp::Minimum
            | ScalarOp::Maximum
            | ScalarOp::Product
            | ScalarOp::ProbabilisticSum
            | ScalarOp::Lukasiewicz
            | ScalarOp::LukasiewiczConorm => Continuity::ALL,
            ScalarOp::Drastic => Continuity::NONE,
            ScalarOp::NilpotentMinimum => Continuity {
                continuous: false,
                left_continuous: true,
                border_continuous: true,
            },
            ScalarOp::OrdinalSum(summands) => {
                let inner: Vec<Continuity> = summands.iter().map(|s| s.inner.continuity()).collect();
                let continuous = inner.iter().all(|c| c.continuous);
                let left_continuous = inner.iter().all(|c| c.left_continuous);
                // Only a block reaching 1 can break continuity along y = 1.
                let border_continuous = summands
                    .iter()
                    .zip(&inner)
                    .filter(|(s, _)| s.hi == 1.0)
                    .all(|(_, c)| c.border_continuous);
                Continuity {
                    continuous,
                    left_continuous: left_continuous && border_continuous,
                    border_continuous,
                }
            }
            ScalarOp::Tabulated(t) => t.class.continuity,
            ScalarOp::Dual(inner) => inner.continuity(),
        }
    }

    /// Whether the operator coincides with the minimum.
    pub fn is_minimum(&self) -> bool {
        match self {
            ScalarOp::Minimum => true,
            ScalarOp::OrdinalSum(s) => s.is_empty(),
            ScalarOp::Dual(inner) => inner.is_maximum(),
            ScalarOp::Tabulated(t) => t.agrees_with(&ScalarOp::Minimum),
            _ => false,
        }
    }

    pub fn is_maximum(&self) -> bool {
        match self {
            ScalarOp::Maximum => true,
            ScalarOp::Dual(inner) => inner.is_minimum(),
            ScalarOp::Tabulated(t) => t.agrees_with(&ScalarOp::Maximum),
            _ => false,
        }
    }

    /// Whether the family has a hand-derived continuity classification.
    pub fn is_named(&self) -> bool {
        !self.has_table()
    }

    /// Loads a square table from CSV text (one row per line, comma separated).
    pub fn tabulated_from_csv(text: &str, source: Option<String>) -> Result<ScalarOp> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("table line {}: {:?}: {e}", lineno + 1, cell.trim()))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Table::from_rows(rows, source).map(|t| ScalarOp::Tabulated(Arc::new(t)))
    }

    /// Loads a table from a CSV file.
    pub fn tabulated_from_path(path: &Path) -> Result<ScalarOp> {
        let text = std::fs::read_to_string(path)?;
        Self::tabulated_from_csv(&text, Some(path.display().to_string()))
    }
}

fn normalise_dir(v: f64, dir: Approach) -> Approach {
    match dir {
        Approach::Below if v <= 0.0 => Approach::Exact,
        Approach::Above if v >= 1.0 => Approach::Exact,
        d => d,
    }
}

fn sampled_monotone(op: &ScalarOp, resolution: usize) -> bool {
    let pts: Vec<f64> = (0..resolution).map(|i| grid_point(i, resolution)).collect();
    for &x in &pts {
        for w in pts.windows(2) {
            if op.eval(x, w[0]) > op.eval(x, w[1]) + 1e-12
                || op.eval(w[0], x) > op.eval(w[1], x) + 1e-12
            {
                return false;
            }
        }
    }
    true
}

impl Table {
    fn from_rows(rows: Vec<Vec<f64>>, source: Option<String>) -> Result<Table> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::Input(format!("table needs at least 2 rows, got {n}")));
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "table row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Input(format!("table value {v} in row {i} is outside [0,1]")));
            }
            values.extend(row);
        }
        let mut table = Table {
            n,
            values,
            source,
            class: TableClass {
                tnorm: false,
                tconorm: false,
                continuity: Continuity::NONE,
            },
        };
        table.class = table.sampled_class();
        Ok(table)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn lookup(&self, x: f64, y: f64) -> f64 {
        self.values[snap_index(x, self.n) * self.n + snap_index(y, self.n)]
    }

    fn agrees_with(&self, op: &ScalarOp) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let (x, y) = (grid_point(i, self.n), grid_point(j, self.n));
                (self.values[i * self.n + j] - op.eval(x, y)).abs() <= 1e-12
            })
        })
    }

    fn sampled_class(&self) -> TableClass {
        let op = ScalarOp::Tabulated(Arc::new(Table {
            n: self.n,
            values: self.values.clone(),
            source: None,
            class: TableClass {
                tnorm: false,
                tconorm: false,
                continuity: Continuity::NONE,
            },
        }));
        // Sampling between table nodes exposes the jumps of the nearest lookup.
        let resolution = (2 * self.n - 1).max(17);
        // Axioms are checked on table nodes: off-node arguments snap, so the
        // unit law can only hold there.
        let stride = self.n.div_ceil(65).max(1);
        let nodes: Vec<f64> = (0..self.n)
            .step_by(stride)
            .chain(std::iter::once(self.n - 1))
            .map(|i| grid_point(i, self.n))
            .collect();
        let axioms = sample_axioms_at(&op, &nodes);
        let report = if axioms.tnorm {
            sample_continuity(&op, resolution)
        } else if axioms.tconorm {
            sample_continuity(&dual(&op), resolution)
        } else {
            ContinuityReport::default()
        };
        TableClass {
            tnorm: axioms.tnorm,
            tconorm: axioms.tconorm,
            continuity: Continuity {
                continuous: report.continuous,
                left_continuous: report.left_continuous,
                border_continuous: report.border_continuous,
            },
        }
    }
}

/// Sampled view of an operator produced by [`classify_continuity`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub is_tnorm_sampled: bool,
    pub is_tconorm_sampled: bool,
    pub continuous: bool,
    pub left_continuous: bool,
    pub border_continuous: bool,
    /// Point at which the first failed continuity property was detected.
    pub witness: Option<(f64, f64)>,
}

struct SampledAxioms {
    tnorm: bool,
    tconorm: bool,
}

fn sample_axioms(op: &ScalarOp, resolution: usize) -> SampledAxioms {
    let pts: Vec<f64> = (0..resolution).map(|i| grid_point(i, resolution)).collect();
    sample_axioms_at(op, &pts)
}

fn sample_axioms_at(op: &ScalarOp, pts: &[f64]) -> SampledAxioms {
    const TOL: f64 = 1e-12;
    let mut pts = pts.to_vec();
    pts.dedup();
    let resolution = pts.len();
    let mut commutative = true;
    let mut monotone = true;
    let mut associative = true;
    let mut unit_one = true;
    let mut unit_zero = true;
    for (i, &x) in pts.iter().enumerate() {
        unit_one &= (op.eval(x, 1.0) - x).abs() <= TOL && (op.eval(1.0, x) - x).abs() <= TOL;
        unit_zero &= (op.eval(x, 0.0) - x).abs() <= TOL && (op.eval(0.0, x) - x).abs() <= TOL;
        for (j, &y) in pts.iter().enumerate() {
            let v = op.eval(x, y);
            commutative &= (v - op.eval(y, x)).abs() <= TOL;
            if i + 1 < resolution {
                monotone &= v <= op.eval(pts[i + 1], y) + TOL;
            }
            if j + 1 < resolution {
                monotone &= v <= op.eval(x, pts[j + 1]) + TOL;
            }
            if !associative {
                continue;
            }
            for &z in pts.iter() {
                let left = op.eval(v, z);
                let right = op.eval(x, op.eval(y, z));
                if (left - right).abs() > TOL {
                    associative = false;
                    break;
                }
            }
        }
    }
    let semigroup = commutative && monotone && associative;
    SampledAxioms {
        tnorm: semigroup && unit_one,
        tconorm: semigroup && unit_zero,
    }
}

/// Samples the continuity notions of a t-norm on a `resolution × resolution` grid.
fn sample_continuity(op: &ScalarOp, resolution: usize) -> ContinuityReport {
    const TOL: f64 = 1e-9;
    let pts: Vec<f64> = (0..resolution).map(|i| grid_point(i, resolution)).collect();
    let mut witness = None;

    let mut border = true;
    for &a in &pts {
        if (op.eval(a, 1.0) - op.left_limit(a, 1.0)).abs() > TOL {
            border = false;
            witness.get_or_insert((a, 1.0));
            break;
        }
    }

    let mut left = border;
    'left: for &x in &pts {
        for &y in &pts[1..] {
            if (op.eval(x, y) - op.left_limit(x, y)).abs() > TOL
                || (op.eval(y, x) - op.directional_limit(y, Approach::Below, x, Approach::Exact)).abs()
                    > TOL
            {
                left = false;
                witness.get_or_insert((x, y));
                break 'left;
            }
        }
    }

    let mut continuous = left;
    'cont: for &x in &pts {
        for &y in &pts[..resolution - 1] {
            if (op.eval(x, y) - op.right_limit(x, y)).abs() > TOL
                || (op.eval(y, x) - op.directional_limit(y, Approach::Above, x, Approach::Exact)).abs()
                    > TOL
            {
                continuous = false;
                witness.get_or_insert((x, y));
                break 'cont;
            }
        }
    }

    ContinuityReport {
        is_tnorm_sampled: false,
        is_tconorm_sampled: false,
        continuous,
        left_continuous: left,
        border_continuous: border,
        witness,
    }
}

/// Classifies `op` by sampling the unit square at `resolution` points per side.
///
/// The t-norm axioms and the continuity notions are checked on the sample.
/// Named families report their analytic continuity flags; the sampled checks
/// only contribute witnesses, since sampling can expose a discontinuity but
/// cannot certify continuity. For a t-conorm the continuity notions are those
/// of its conjugate and the witness is reported in the conorm's coordinates.
pub fn classify_continuity(op: &ScalarOp, resolution: usize) -> Result<ContinuityReport> {
    if resolution < 17 {
        return Err(Error::Input(format!(
            "continuity resolution must be at least 17, got {resolution}"
        )));
    }
    let axioms = sample_axioms(op, resolution);
    let conorm = !axioms.tnorm && (axioms.tconorm || op.is_tconorm());
    let mut report = if conorm {
        let mut r = sample_continuity(&dual(op), resolution);
        r.witness = r.witness.map(|(a, b)| (1.0 - a, 1.0 - b));
        r
    } else {
        sample_continuity(op, resolution)
    };
    report.is_tnorm_sampled = axioms.tnorm;
    report.is_tconorm_sampled = axioms.tconorm;
    if op.is_named() {
        let c = op.continuity();
        report.continuous = c.continuous;
        report.left_continuous = c.left_continuous;
        report.border_continuous = c.border_continuous;
    }
    // continuous ⇒ left-continuous ⇒ border continuous
    report.left_continuous &= report.border_continuous;
    report.continuous &= report.left_continuous;
    if report.continuous {
        report.witness = None;
    }
    Ok(report)
}

/// The conjugate `(x, y) ↦ 1 - op(1 - x, 1 - y)`.
pub fn dual(op: &ScalarOp) -> ScalarOp {
    match op {
        ScalarOp::Minimum => ScalarOp::Maximum,
        ScalarOp::Maximum => ScalarOp::Minimum,
        ScalarOp::Product => ScalarOp::ProbabilisticSum,
        ScalarOp::ProbabilisticSum => ScalarOp::Product,
        ScalarOp::Lukasiewicz => ScalarOp::LukasiewiczConorm,
        ScalarOp::LukasiewiczConorm => ScalarOp::Lukasiewicz,
        ScalarOp::Dual(inner) => (**inner).clone(),
        other => ScalarOp::Dual(Box::new(other.clone())),
    }
}

/// Assembles an ordinal sum from `(lo, hi, inner)` blocks.
///
/// Blocks must satisfy `0 ≤ lo < hi ≤ 1`, have pairwise disjoint interiors and
/// carry t-norms. An empty list yields the minimum and a single block spanning
/// `[0,1]` yields its inner operator.
pub fn ordinal_sum(summands: Vec<(f64, f64, ScalarOp)>) -> Result<ScalarOp> {
    let mut blocks: Vec<Summand> = Vec::with_capacity(summands.len());
    for (lo, hi, inner) in summands {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::Construction(format!(
                "ordinal-sum block ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1"
            )));
        }
        if !inner.is_tnorm() {
            return Err(Error::Construction(format!(
                "ordinal-sum block ({lo}, {hi}) carries {inner}, which is not a t-norm"
            )));
        }
        blocks.push(Summand { lo, hi, inner });
    }
    blocks.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    for w in blocks.windows(2) {
        if w[1].lo < w[0].hi {
            return Err(Error::Construction(format!(
                "ordinal-sum blocks ({}, {}) and ({}, {}) overlap",
                w[0].lo, w[0].hi, w[1].lo, w[1].hi
            )));
        }
    }
    match blocks.len() {
        0 => Ok(ScalarOp::Minimum),
        1 if blocks[0].lo == 0.0 && blocks[0].hi == 1.0 => Ok(blocks.pop().unwrap().inner),
        _ => Ok(ScalarOp::OrdinalSum(blocks)),
    }
}

impl fmt::Display for ScalarOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarOp::Minimum => f.write_str("minimum"),
            ScalarOp::Maximum => f.write_str("maximum"),
            ScalarOp::Product => f.write_str("product"),
            ScalarOp::ProbabilisticSum => f.write_str("probabilistic-sum"),
            ScalarOp::Lukasiewicz => f.write_str("lukasiewicz"),
            ScalarOp::LukasiewiczConorm => f.write_str("lukasiewicz-conorm"),
            ScalarOp::Drastic => f.write_str("drastic"),
            ScalarOp::NilpotentMinimum => f.write_str("nilpotent-minimum"),
            ScalarOp::OrdinalSum(blocks) => {
                f.write_str("ordinal-sum[")?;
                for (i, b) in blocks.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "({},{},{})", b.lo, b.hi, b.inner)?;
                }
                f.write_str("]")
            }
            ScalarOp::Tabulated(t) => match &t.source {
                Some(path) => write!(f, "tabulated[{path}]"),
                None => write!(f, "tabulated[<inline {}x{}>]", t.n, t.n),
            },
            ScalarOp::Dual(inner) => write!(f, "dual({inner})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {token:?}")))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '-' | '+')))
            .unwrap_or(rest.len());
        let text = &rest[..len];
        let value = text
            .parse::<f64>()
            .map_err(|_| self.error(&format!("invalid number {text:?}")))?;
        self.pos += len;
        Ok(value)
    }

    fn op(&mut self) -> Result<ScalarOp> {
        let name = self.ident();
        match name {
            "minimum" | "min" => Ok(ScalarOp::Minimum),
            "maximum" | "max" => Ok(ScalarOp::Maximum),
            "product" | "prod" => Ok(ScalarOp::Product),
            "probabilistic-sum" | "probsum" => Ok(ScalarOp::ProbabilisticSum),
            "lukasiewicz" | "luk" => Ok(ScalarOp::Lukasiewicz),
            "lukasiewicz-conorm" => Ok(ScalarOp::LukasiewiczConorm),
            "drastic" => Ok(ScalarOp::Drastic),
            "nilpotent-minimum" | "nm" => Ok(ScalarOp::NilpotentMinimum),
            "os-drastic" => Ok(ScalarOp::os_drastic()),
            "dual" => {
                self.expect("(")?;
                let inner = self.op()?;
                self.expect(")")?;
                Ok(dual(&inner))
            }
            "ordinal-sum" => {
                self.expect("[")?;
                let mut blocks = Vec::new();
                if !self.eat("]") {
                    loop {
                        self.expect("(")?;
                        let lo = self.number()?;
                        self.expect(",")?;
                        let hi = self.number()?;
                        self.expect(",")?;
                        let inner = self.op()?;
                        self.expect(")")?;
                        blocks.push((lo, hi, inner));
                        if self.eat("]") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                ordinal_sum(blocks)
            }
            "tabulated" => {
                self.expect("[")?;
                let rest = self.rest();
                let end = rest.find(']').ok_or_else(|| self.error("unterminated table path"))?;
                let path = rest[..end].trim().to_string();
                self.pos += end + 1;
                ScalarOp::tabulated_from_path(Path::new(&path))
            }
            "" => Err(self.error("expected an operator name")),
            other => Err(self.error(&format!("unknown operator {other:?}"))),
        }
    }
}

impl FromStr for ScalarOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser { src: s, pos: 0 };
        let op = parser.op()?;
        parser.skip_ws();
        if !parser.rest().is_empty() {
            return Err(parser.error("trailing input"));
        }
        Ok(op)
    }
}

impl Serialize for ScalarOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScalarOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
