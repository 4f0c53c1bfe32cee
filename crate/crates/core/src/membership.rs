//! Membership functions `[0,1] → [0,1]` and the elements of L.
//!
//! A [`MembershipFunction`] is either an exact piecewise description or a
//! uniform grid of samples. Piecewise functions carry a value at every
//! breakpoint and, separately, the one-sided limits at both ends of every
//! segment, so jumps such as `g(x) = x` on `[0,1)` with `g(1) = 0` are
//! represented exactly. A grid stands for its linear interpolant.
//!
//! [`NormalConvexFunction`] wraps a function that is convex (every α-cut is an
//! interval) and normal (supremum 1), and caches its monotone envelopes and
//! the endpoints of its cuts at a uniform set of levels.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar_ops::{grid_point, Approach};

/// Domain samples used when a grid is built without an explicit size.
pub const DEFAULT_GRID: usize = 1025;
/// Number of α-levels cached by [`NormalConvexFunction`].
pub const DEFAULT_LEVELS: usize = 257;
/// Value tolerance for comparisons between piecewise functions.
pub const PIECEWISE_TOL: f64 = 1e-9;

/// Behaviour of a piecewise function strictly between two breakpoints: linear
/// from `start` (the right limit at the left breakpoint) to `end` (the left
/// limit at the right breakpoint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
}

impl Segment {
    pub fn linear(start: f64, end: f64) -> Self {
        Segment { start, end }
    }

    pub fn constant(v: f64) -> Self {
        Segment { start: v, end: v }
    }

    fn at(&self, t: f64) -> f64 {
        self.start + (self.end - self.start) * t
    }

    fn max(&self) -> f64 {
        self.start.max(self.end)
    }
}

/// Piecewise-linear function with explicit values at its breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    xs: Vec<f64>,
    vs: Vec<f64>,
    segs: Vec<Segment>,
}

/// Uniform samples `values[i] = f(i / (n - 1))`, read as a linear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    values: Vec<f64>,
}

/// An element of `M = [0,1]^[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MembershipDoc", into = "MembershipDoc")]
pub enum MembershipFunction {
    Piecewise(Piecewise),
    Grid(Grid),
}

/// A subinterval of `[0,1]`, possibly empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl Cut {
    pub fn new(lo: f64, hi: f64) -> Self {
        Cut { lo, hi, empty: false }
    }

    pub fn empty() -> Self {
        Cut {
            lo: f64::NAN,
            hi: f64::NAN,
            empty: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        !self.empty && self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Loc {
    Point(usize),
    Inside(usize, f64),
}

fn check_unit(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Input(format!("{what} {v} is outside [0,1]")))
    }
}

fn slope_approach_left(seg: &Segment) -> Approach {
    match seg.end.partial_cmp(&seg.start) {
        Some(Ordering::Greater) => Approach::Below,
        Some(Ordering::Less) => Approach::Above,
        _ => Approach::Exact,
    }
}

fn slope_approach_right(seg: &Segment) -> Approach {
    match seg.end.partial_cmp(&seg.start) {
        Some(Ordering::Greater) => Approach::Above,
        Some(Ordering::Less) => Approach::Below,
        _ => Approach::Exact,
    }
}

impl Piecewise {
    /// Builds a piecewise function; `xs` must run strictly from 0 to 1 and
    /// `segs` must have one entry per gap.
    pub fn new(xs: Vec<f64>, vs: Vec<f64>, segs: Vec<Segment>) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::Input("a piecewise function needs at least two breakpoints".into()));
        }
        if xs.len() != vs.len() || segs.len() + 1 != xs.len() {
            return Err(Error::Input(format!(
                "{} breakpoints, {} values and {} segments do not fit together",
                xs.len(),
                vs.len(),
                segs.len()
            )));
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(Error::Input("breakpoints must start at 0 and end at 1".into()));
        }
        for w in xs.windows(2) {
            if w[0].is_nan() || w[1].is_nan() || w[0] >= w[1] {
                return Err(Error::Input(format!(
                    "breakpoints must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        for &v in &vs {
            check_unit(v, "value")?;
        }
        for s in &segs {
            check_unit(s.start, "segment value")?;
            check_unit(s.end, "segment value")?;
        }
        Ok(Piecewise { xs, vs, segs })
    }

    /// Continuous piecewise-linear function through `points`.
    pub fn linear(points: &[(f64, f64)]) -> Result<Self> {
        let xs = points.iter().map(|p| p.0).collect();
        let vs: Vec<f64> = points.iter().map(|p| p.1).collect();
        let segs = vs.windows(2).map(|w| Segment::linear(w[0], w[1])).collect();
        Piecewise::new(xs, vs, segs)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.vs
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segs
    }

    fn locate(&self, x: f64) -> Loc {
        let x = x.clamp(0.0, 1.0);
        let idx = self.xs.partition_point(|&b| b <= x);
        let i = idx - 1;
        if self.xs[i] == x {
            Loc::Point(i)
        } else {
            Loc::Inside(i, (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]))
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            Loc::Point(i) => self.vs[i],
            Loc::Inside(i, t) => self.segs[i].at(t),
        }
    }

    /// `f(x⁻)` and the side from which the values approach it. At 0 this is `f(0)`.
    pub fn left_limit(&self, x: f64) -> (f64, Approach) {
        match self.locate(x) {
            Loc::Point(0) => (self.vs[0], Approach::Exact),
            Loc::Point(i) => (self.segs[i - 1].end, slope_approach_left(&self.segs[i - 1])),
            Loc::Inside(i, t) => (self.segs[i].at(t), slope_approach_left(&self.segs[i])),
        }
    }

    /// `f(x⁺)` and its approach side. At 1 this is `f(1)`.
    pub fn right_limit(&self, x: f64) -> (f64, Approach) {
        match self.locate(x) {
            Loc::Point(i) if i + 1 == self.xs.len() => (self.vs[i], Approach::Exact),
            Loc::Point(i) => (self.segs[i].start, slope_approach_right(&self.segs[i])),
            Loc::Inside(i, t) => (self.segs[i].at(t), slope_approach_right(&self.segs[i])),
        }
    }

    /// Supremum, including values that are only approached.
    pub fn sup(&self) -> f64 {
        let points = self.vs.iter().copied().fold(0.0, f64::max);
        self.segs.iter().map(Segment::max).fold(points, f64::max)
    }

    /// `x ↦ f(1 - x)`.
    pub fn reflect(&self) -> Piecewise {
        let m = self.xs.len();
        let mut xs: Vec<f64> = self.xs.iter().rev().map(|x| 1.0 - x).collect();
        xs[0] = 0.0;
        xs[m - 1] = 1.0;
        Piecewise {
            xs,
            vs: self.vs.iter().rev().copied().collect(),
            segs: self
                .segs
                .iter()
                .rev()
                .map(|s| Segment::linear(s.end, s.start))
                .collect(),
        }
    }

    /// `x ↦ sup { f(t) | t ≤ x }`, exact.
    pub fn left_envelope(&self) -> Piecewise {
        let mut xs = Vec::with_capacity(self.xs.len() + 4);
        let mut vs = Vec::with_capacity(self.xs.len() + 4);
        let mut segs = Vec::with_capacity(self.xs.len() + 4);
        let mut running = 0.0_f64;
        for i in 0..self.xs.len() {
            running = running.max(self.vs[i]);
            xs.push(self.xs[i]);
            vs.push(running);
            let Some(seg) = self.segs.get(i) else { break };
            let floor = running.max(seg.start);
            if seg.end <= floor {
                segs.push(Segment::constant(floor));
            } else if seg.start >= floor {
                segs.push(Segment::linear(seg.start, seg.end));
            } else {
                let t = (floor - seg.start) / (seg.end - seg.start);
                let cross = self.xs[i] + t * (self.xs[i + 1] - self.xs[i]);
                if cross > self.xs[i] && cross < self.xs[i + 1] {
                    segs.push(Segment::constant(floor));
                    xs.push(cross);
                    vs.push(floor);
                    segs.push(Segment::linear(floor, seg.end));
                } else {
                    segs.push(Segment::linear(floor, seg.end.max(floor)));
                }
            }
            running = floor.max(seg.end);
        }
        Piecewise { xs, vs, segs }
    }

    /// `x ↦ sup { f(t) | t ≥ x }`, exact.
    pub fn right_envelope(&self) -> Piecewise {
        // Built right to left, then reversed.
        let mut xs = Vec::with_capacity(self.xs.len() + 4);
        let mut vs = Vec::with_capacity(self.xs.len() + 4);
        let mut segs = Vec::with_capacity(self.xs.len() + 4);
        let mut running = 0.0_f64;
        for i in (0..self.xs.len()).rev() {
            running = running.max(self.vs[i]);
            xs.push(self.xs[i]);
            vs.push(running);
            if i == 0 {
                break;
            }
            let seg = self.segs[i - 1];
            let floor = running.max(seg.end);
            if seg.start <= floor {
                segs.push(Segment::constant(floor));
            } else if seg.end >= floor {
                segs.push(Segment::linear(seg.start, seg.end));
            } else {
                let t = (floor - seg.start) / (seg.end - seg.start);
                let cross = self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1]);
                if cross > self.xs[i - 1] && cross < self.xs[i] {
                    segs.push(Segment::constant(floor));
                    xs.push(cross);
                    vs.push(floor);
                    segs.push(Segment::linear(seg.start, floor));
                } else {
                    segs.push(Segment::linear(seg.start.max(floor), floor));
                }
            }
            running = floor.max(seg.start);
        }
        xs.reverse();
        vs.reverse();
        segs.reverse();
        Piecewise { xs, vs, segs }
    }

    /// Merges collinear neighbours and drops breakpoints that carry no information.
    pub fn simplify(&self) -> Piecewise {
        let mut xs = vec![self.xs[0]];
        let mut vs = vec![self.vs[0]];
        let mut segs: Vec<Segment> = Vec::new();
        for i in 0..self.segs.len() {
            let seg = self.segs[i];
            let x_next = self.xs[i + 1];
            let v_next = self.vs[i + 1];
            if let Some(prev) = segs.last_mut() {
                let x_mid = *xs.last().unwrap();
                let v_mid = *vs.last().unwrap();
                let x_left = xs[xs.len() - 2];
                let continuous = prev.end == v_mid && seg.start == v_mid;
                let w_prev = x_mid - x_left;
                let w_next = x_next - x_mid;
                let slope_prev = (prev.end - prev.start) / w_prev;
                let slope_next = (seg.end - seg.start) / w_next;
                if continuous && (slope_prev - slope_next).abs() <= 1e-12 {
                    prev.end = seg.end;
                    *xs.last_mut().unwrap() = x_next;
                    *vs.last_mut().unwrap() = v_next;
                    continue;
                }
            }
            segs.push(seg);
            xs.push(x_next);
            vs.push(v_next);
        }
        Piecewise { xs, vs, segs }
    }

    /// Whether the function is the indicator of a closed interval; returns it.
    pub fn as_interval(&self) -> Option<(f64, f64)> {
        let is01 = |v: f64| v == 0.0 || v == 1.0;
        if !self.vs.iter().all(|&v| is01(v))
            || !self.segs.iter().all(|s| is01(s.start) && s.start == s.end)
        {
            return None;
        }
        let first = self.vs.iter().position(|&v| v == 1.0)?;
        let last = self.vs.iter().rposition(|&v| v == 1.0)?;
        let inside_ok = (first..=last).all(|i| self.vs[i] == 1.0)
            && (first..last).all(|i| self.segs[i].start == 1.0);
        let outside_ok = (0..first).all(|i| self.segs[i].start == 0.0)
            && (last..self.segs.len()).all(|i| self.segs[i].start == 0.0);
        (inside_ok && outside_ok).then(|| (self.xs[first], self.xs[last]))
    }

    /// First `x` with `f(x) ≥ α` or `f(x⁺) ≥ α`, for a nondecreasing function.
    fn first_reaching(&self, alpha: f64) -> Option<f64> {
        let i = self.vs.partition_point(|&v| v < alpha);
        if i > 0 {
            let seg = &self.segs[i - 1];
            if seg.start >= alpha {
                return Some(self.xs[i - 1]);
            }
            if seg.end >= alpha && seg.end > seg.start {
                let t = (alpha - seg.start) / (seg.end - seg.start);
                let x = self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1]);
                return Some(x.clamp(self.xs[i - 1], self.xs[i]));
            }
        }
        (i < self.xs.len()).then(|| self.xs[i])
    }

    /// Last `x` with `f(x) ≥ α` or `f(x⁻) ≥ α`, for a nonincreasing function.
    fn last_reaching(&self, alpha: f64) -> Option<f64> {
        let count = self.vs.partition_point(|&v| v >= alpha);
        if count == 0 {
            let seg = &self.segs[0];
            return (seg.start >= alpha).then(|| {
                let t = if seg.start > seg.end {
                    ((seg.start - alpha) / (seg.start - seg.end)).min(1.0)
                } else {
                    1.0
                };
                self.xs[0] + t * (self.xs[1] - self.xs[0])
            });
        }
        let i = count - 1;
        let Some(seg) = self.segs.get(i) else {
            return Some(self.xs[i]);
        };
        if seg.end >= alpha {
            return Some(self.xs[i + 1]);
        }
        if seg.start >= alpha && seg.start > seg.end {
            let t = (seg.start - alpha) / (seg.start - seg.end);
            let x = self.xs[i] + t * (self.xs[i + 1] - self.xs[i]);
            return Some(x.clamp(self.xs[i], self.xs[i + 1]));
        }
        Some(self.xs[i])
    }

    /// Closure of `{x | f(x) ≥ α}` (or `> α` when `strict`), assuming it is an interval.
    fn level_set_hull(&self, alpha: f64, strict: bool) -> Cut {
        let passes = |v: f64| if strict { v > alpha } else { v >= alpha };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut take = |a: f64, b: f64| {
            lo = lo.min(a);
            hi = hi.max(b);
        };
        for (i, &v) in self.vs.iter().enumerate() {
            if passes(v) {
                take(self.xs[i], self.xs[i]);
            }
        }
        for (i, seg) in self.segs.iter().enumerate() {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            let (s, e) = (seg.start, seg.end);
            let nonempty = if strict {
                s.max(e) > alpha
            } else if s == e {
                s >= alpha
            } else {
                s.max(e) > alpha
            };
            if !nonempty {
                continue;
            }
            let cross = |target: f64| x0 + (target - s) / (e - s) * (x1 - x0);
            let a = if passes(s) || s >= alpha && s == e { x0 } else { cross(alpha).clamp(x0, x1) };
            let b = if passes(e) || e >= alpha && s == e { x1 } else { cross(alpha).clamp(x0, x1) };
            take(a, b);
        }
        if lo <= hi {
            Cut::new(lo, hi)
        } else {
            Cut::empty()
        }
    }
}

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::Input(format!(
                "a grid needs at least 3 samples, got {}",
                values.len()
            )));
        }
        for &v in &values {
            check_unit(v, "grid value")?;
        }
        Ok(Grid { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let t = x.clamp(0.0, 1.0) * (n - 1) as f64;
        let i = (t.floor() as usize).min(n - 2);
        let frac = t - i as f64;
        if frac == 0.0 {
            self.values[i]
        } else if frac == 1.0 {
            self.values[i + 1]
        } else {
            self.values[i] + (self.values[i + 1] - self.values[i]) * frac
        }
    }

    pub fn to_piecewise(&self) -> Piecewise {
        let n = self.values.len();
        Piecewise {
            xs: (0..n).map(|i| grid_point(i, n)).collect(),
            vs: self.values.clone(),
            segs: self
                .values
                .windows(2)
                .map(|w| Segment::linear(w[0], w[1]))
                .collect(),
        }
    }
}

impl MembershipFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            MembershipFunction::Piecewise(p) => p.eval(x),
            MembershipFunction::Grid(g) => g.eval(x),
        }
    }

    pub fn left_limit(&self, x: f64) -> (f64, Approach) {
        match self {
            MembershipFunction::Piecewise(p) => p.left_limit(x),
            MembershipFunction::Grid(g) => g.to_piecewise().left_limit(x),
        }
    }

    pub fn right_limit(&self, x: f64) -> (f64, Approach) {
        match self {
            MembershipFunction::Piecewise(p) => p.right_limit(x),
            MembershipFunction::Grid(g) => g.to_piecewise().right_limit(x),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            MembershipFunction::Piecewise(p) => p.sup(),
            MembershipFunction::Grid(g) => g.values.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Value tolerance appropriate to the representation.
    pub fn tolerance(&self) -> f64 {
        match self {
            MembershipFunction::Piecewise(_) => PIECEWISE_TOL,
            MembershipFunction::Grid(g) => 2.0 / (g.n() - 1) as f64,
        }
    }

    pub fn to_piecewise(&self) -> Piecewise {
        match self {
            MembershipFunction::Piecewise(p) => p.clone(),
            MembershipFunction::Grid(g) => g.to_piecewise(),
        }
    }

    /// Samples on `n` uniform points. Breakpoint values that fall between
    /// samples are kept at their nearest sample, so point masses survive.
    pub fn to_grid(&self, n: usize) -> Result<Grid> {
        if n < 3 {
            return Err(Error::Input(format!("grid size must be at least 3, got {n}")));
        }
        let mut values: Vec<f64> = (0..n).map(|i| self.eval(grid_point(i, n))).collect();
        if let MembershipFunction::Piecewise(p) = self {
            for (x, v) in p.xs.iter().zip(&p.vs) {
                let k = crate::scalar_ops::snap_index(*x, n);
                values[k] = values[k].max(*v);
            }
        }
        Grid::new(values)
    }

    /// Breakpoints of the piecewise form (the sample points for a grid).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.to_piecewise().xs
    }

    /// `x ↦ sup { f(t) | t ≤ x }`.
    pub fn left_envelope(&self) -> MembershipFunction {
        MembershipFunction::Piecewise(self.to_piecewise().left_envelope())
    }

    /// `x ↦ sup { f(t) | t ≥ x }`.
    pub fn right_envelope(&self) -> MembershipFunction {
        MembershipFunction::Piecewise(self.to_piecewise().right_envelope())
    }

    /// `x ↦ f(1 - x)`.
    pub fn negate(&self) -> MembershipFunction {
        match self {
            MembershipFunction::Piecewise(p) => MembershipFunction::Piecewise(p.reflect()),
            MembershipFunction::Grid(g) => MembershipFunction::Grid(Grid {
                values: g.values.iter().rev().copied().collect(),
            }),
        }
    }

    /// Whether `f = f^L ∧ f^R` within the representation tolerance.
    pub fn is_convex(&self) -> bool {
        let f = self.to_piecewise();
        let l = f.left_envelope();
        let r = f.right_envelope();
        let tol = self.tolerance();
        let xs = union_breakpoints(&[&f, &l, &r]);
        let ok = |fv: f64, lv: f64, rv: f64| fv >= lv.min(rv) - tol;
        for (k, &x) in xs.iter().enumerate() {
            if !ok(f.eval(x), l.eval(x), r.eval(x)) {
                return false;
            }
            let Some(&x1) = xs.get(k + 1) else { break };
            let (f0, l0, r0) = (f.right_limit(x).0, l.right_limit(x).0, r.right_limit(x).0);
            let (f1, l1, r1) = (f.left_limit(x1).0, l.left_limit(x1).0, r.left_limit(x1).0);
            if !ok(f0, l0, r0) || !ok(f1, l1, r1) {
                return false;
            }
            // f - min(L, R) is convex on the gap; its minimum sits where L = R.
            let d0 = l0 - r0;
            let d1 = l1 - r1;
            if d0 < 0.0 && d1 > 0.0 || d0 > 0.0 && d1 < 0.0 {
                let t = d0 / (d0 - d1);
                let fv = f0 + (f1 - f0) * t;
                let lv = l0 + (l1 - l0) * t;
                if fv < lv - tol {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `sup f = 1` within the representation tolerance.
    pub fn is_normal(&self) -> bool {
        self.sup() >= 1.0 - self.tolerance()
    }

    /// Whether every weak α-cut is closed. Grids are continuous and always pass.
    pub fn is_upper_semicontinuous(&self) -> bool {
        match self {
            MembershipFunction::Grid(_) => true,
            MembershipFunction::Piecewise(p) => (0..p.xs.len()).all(|i| {
                let left = if i > 0 { p.segs[i - 1].end } else { 0.0 };
                let right = p.segs.get(i).map_or(0.0, |s| s.start);
                p.vs[i] >= left.max(right)
            }),
        }
    }

    fn require_convex(&self) -> Result<()> {
        if self.is_convex() {
            Ok(())
        } else {
            Err(Error::Shape("cuts are only defined here for convex functions".into()))
        }
    }

    /// `{x | f(x) ≥ α}`, reported as its closure.
    pub fn alpha_cut(&self, alpha: f64) -> Result<Cut> {
        check_unit(alpha, "level")?;
        self.require_convex()?;
        if alpha <= 0.0 {
            return Ok(Cut::new(0.0, 1.0));
        }
        Ok(self.to_piecewise().level_set_hull(alpha, false))
    }

    /// `{x | f(x) > α}`, reported as its closure.
    pub fn strong_alpha_cut(&self, alpha: f64) -> Result<Cut> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Input(format!("strong cut level {alpha} is outside [0,1)")));
        }
        self.require_convex()?;
        Ok(self.to_piecewise().level_set_hull(alpha, true))
    }
}

/// Sorted union of the breakpoints of several functions.
pub(crate) fn union_breakpoints(fs: &[&Piecewise]) -> Vec<f64> {
    let mut xs: Vec<f64> = fs.iter().flat_map(|f| f.xs.iter().copied()).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// An element of L: a normal convex membership function with cached
/// envelopes and cut endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "MembershipFunction")]
pub struct NormalConvexFunction {
    base: MembershipFunction,
    pw: Piecewise,
    left_env: Piecewise,
    right_env: Piecewise,
    sup: f64,
    tol: f64,
    cut_lo: Vec<f64>,
    cut_hi: Vec<f64>,
}

impl From<NormalConvexFunction> for MembershipFunction {
    fn from(f: NormalConvexFunction) -> Self {
        f.base
    }
}

impl<'de> Deserialize<'de> for NormalConvexFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let base = MembershipFunction::deserialize(d)?;
        NormalConvexFunction::new(base).map_err(serde::de::Error::custom)
    }
}

impl NormalConvexFunction {
    pub fn new(base: MembershipFunction) -> Result<Self> {
        Self::with_levels(base, DEFAULT_LEVELS)
    }

    pub fn with_levels(base: MembershipFunction, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::Input(format!("need at least 2 levels, got {levels}")));
        }
        if !base.is_normal() {
            return Err(Error::Shape(format!(
                "function is not normal (sup = {})",
                base.sup()
            )));
        }
        if !base.is_convex() {
            return Err(Error::Shape("function is not convex".into()));
        }
        let pw = base.to_piecewise();
        let left_env = pw.left_envelope();
        let right_env = pw.right_envelope();
        let mut f = NormalConvexFunction {
            sup: pw.sup(),
            tol: base.tolerance(),
            base,
            pw,
            left_env,
            right_env,
            cut_lo: Vec::new(),
            cut_hi: Vec::new(),
        };
        for k in 0..levels {
            let alpha = grid_point(k, levels);
            f.cut_lo.push(f.hull_lo(alpha));
            f.cut_hi.push(f.hull_hi(alpha));
        }
        Ok(f)
    }

    pub fn base(&self) -> &MembershipFunction {
        &self.base
    }

    pub fn piecewise(&self) -> &Piecewise {
        &self.pw
    }

    pub fn left_env(&self) -> &Piecewise {
        &self.left_env
    }

    pub fn right_env(&self) -> &Piecewise {
        &self.right_env
    }

    pub fn levels(&self) -> usize {
        self.cut_lo.len()
    }

    /// Lower cut endpoints `l(α_k)` at `α_k = k / (K - 1)`.
    pub fn cut_lo(&self) -> &[f64] {
        &self.cut_lo
    }

    /// Upper cut endpoints `r(α_k)`.
    pub fn cut_hi(&self) -> &[f64] {
        &self.cut_hi
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pw.eval(x)
    }

    /// Lower endpoint of the closed α-cut of the upper semicontinuous hull.
    /// Levels above the supremum are clamped to it, so the cut is never empty.
    pub fn hull_lo(&self, alpha: f64) -> f64 {
        if alpha <= 0.0 {
            return 0.0;
        }
        self.left_env
            .first_reaching(alpha.min(self.sup))
            .unwrap_or(1.0)
    }

    /// Upper endpoint of the closed α-cut of the upper semicontinuous hull.
    pub fn hull_hi(&self, alpha: f64) -> f64 {
        if alpha <= 0.0 {
            return 1.0;
        }
        self.right_env
            .last_reaching(alpha.min(self.sup))
            .unwrap_or(0.0)
    }

    /// `x ∈ f⁺`, decided as `f^R(x) = 1` (up to the representation tolerance
    /// below the supremum).
    pub fn increasing_prefix_contains(&self, x: f64) -> bool {
        self.right_env.eval(x) >= self.sup - PIECEWISE_TOL
    }

    /// `sup f⁺`, the right end of the initial segment on which `f` increases.
    pub fn prefix_end(&self) -> f64 {
        self.right_env
            .last_reaching(self.sup)
            .or_else(|| self.right_env.last_reaching(self.sup - PIECEWISE_TOL))
            .unwrap_or(0.0)
    }

    /// The indicator interval when `f` is a characteristic function.
    pub fn as_interval(&self) -> Option<(f64, f64)> {
        match &self.base {
            MembershipFunction::Piecewise(p) => p.as_interval(),
            MembershipFunction::Grid(_) => None,
        }
    }

    pub fn negate(&self) -> Result<NormalConvexFunction> {
        NormalConvexFunction::with_levels(self.base.negate(), self.levels())
    }

    pub fn alpha_cut(&self, alpha: f64) -> Result<Cut> {
        self.base.alpha_cut(alpha)
    }

    pub fn strong_alpha_cut(&self, alpha: f64) -> Result<Cut> {
        self.base.strong_alpha_cut(alpha)
    }
}

/// Indicator of `[lo, hi]`; a singleton when `lo == hi`.
pub fn characteristic(lo: f64, hi: f64) -> Result<NormalConvexFunction> {
    check_unit(lo, "interval endpoint")?;
    check_unit(hi, "interval endpoint")?;
    if lo > hi {
        return Err(Error::Input(format!("interval [{lo}, {hi}] has lo > hi")));
    }
    let mut xs = vec![0.0, lo, hi, 1.0];
    xs.dedup();
    if xs.len() == 1 {
        xs = vec![0.0, 1.0];
    }
    let vs = xs.iter().map(|&x| if x >= lo && x <= hi { 1.0 } else { 0.0 }).collect();
    let segs = xs
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            Segment::constant(if mid > lo && mid < hi { 1.0 } else { 0.0 })
        })
        .collect();
    NormalConvexFunction::new(MembershipFunction::Piecewise(Piecewise::new(xs, vs, segs)?))
}

/// Trapezoid with support `[a, d]` and core `[b, c]`. Vertical sides are
/// allowed (`a == b` or `c == d`); the core is closed.
pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<NormalConvexFunction> {
    for v in [a, b, c, d] {
        check_unit(v, "trapezoid corner")?;
    }
    if !(a <= b && b <= c && c <= d) {
        return Err(Error::Input(format!(
            "trapezoid corners must satisfy a <= b <= c <= d, got ({a}, {b}, {c}, {d})"
        )));
    }
    let mut xs = vec![0.0, a, b, c, d, 1.0];
    xs.dedup();
    let value = |x: f64| -> f64 {
        if x >= b && x <= c {
            1.0
        } else if x <= a || x >= d {
            0.0
        } else if x < b {
            (x - a) / (b - a)
        } else {
            (d - x) / (d - c)
        }
    };
    let vs: Vec<f64> = xs.iter().map(|&x| value(x)).collect();
    let segs = xs
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            if mid > b && mid < c {
                Segment::constant(1.0)
            } else if mid < a || mid > d {
                Segment::constant(0.0)
            } else if mid < b {
                Segment::linear((w[0] - a) / (b - a), (w[1] - a) / (b - a))
            } else {
                Segment::linear((d - w[0]) / (d - c), (d - w[1]) / (d - c))
            }
        })
        .collect();
    NormalConvexFunction::new(MembershipFunction::Piecewise(Piecewise::new(xs, vs, segs)?))
}

/// Triangle with support `[a, b]` and apex at `p`.
pub fn triangle(a: f64, p: f64, b: f64) -> Result<NormalConvexFunction> {
    trapezoid(a, p, p, b)
}

/// The constant function `c` (normal only when `c = 1`).
pub fn constant(c: f64) -> Result<MembershipFunction> {
    Ok(MembershipFunction::Piecewise(Piecewise::linear(&[(0.0, c), (1.0, c)])?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SegmentDoc {
    Named(String),
    Explicit { linear: [f64; 2] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "lowercase")]
enum MembershipDoc {
    Piecewise {
        #[serde(default = "format_version")]
        format_version: u32,
        points: Vec<[f64; 2]>,
        segments: Vec<SegmentDoc>,
    },
    Grid {
        #[serde(default = "format_version")]
        format_version: u32,
        n: usize,
        values: Vec<f64>,
    },
}

fn format_version() -> u32 {
    1
}

impl TryFrom<MembershipDoc> for MembershipFunction {
    type Error = Error;

    fn try_from(doc: MembershipDoc) -> Result<Self> {
        match doc {
            MembershipDoc::Piecewise {
                format_version,
                points,
                segments,
            } => {
                check_version(format_version)?;
                if segments.len() + 1 != points.len() {
                    return Err(Error::Input(format!(
                        "{} points need {} segments, got {}",
                        points.len(),
                        points.len().saturating_sub(1),
                        segments.len()
                    )));
                }
                let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
                let vs: Vec<f64> = points.iter().map(|p| p[1]).collect();
                let segs = segments
                    .iter()
                    .enumerate()
                    .map(|(i, s)| match s {
                        SegmentDoc::Named(name) => match name.as_str() {
                            "linear" => Ok(Segment::linear(vs[i], vs[i + 1])),
                            "constant-left" => Ok(Segment::constant(vs[i])),
                            "constant-right" => Ok(Segment::constant(vs[i + 1])),
                            other => Err(Error::Input(format!("unknown segment kind {other:?}"))),
                        },
                        SegmentDoc::Explicit { linear } => Ok(Segment::linear(linear[0], linear[1])),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(MembershipFunction::Piecewise(Piecewise::new(xs, vs, segs)?))
            }
            MembershipDoc::Grid {
                format_version,
                n,
                values,
            } => {
                check_version(format_version)?;
                if n != values.len() {
                    return Err(Error::Input(format!(
                        "grid declares n = {n} but has {} values",
                        values.len()
                    )));
                }
                Ok(MembershipFunction::Grid(Grid::new(values)?))
            }
        }
    }
}

fn check_version(v: u32) -> Result<()> {
    if v == 1 {
        Ok(())
    } else {
        Err(Error::Input(format!("unsupported format_version {v}")))
    }
}

impl From<MembershipFunction> for MembershipDoc {
    fn from(f: MembershipFunction) -> Self {
        match f {
            MembershipFunction::Piecewise(p) => MembershipDoc::Piecewise {
                format_version: 1,
                points: p.xs.iter().zip(&p.vs).map(|(&x, &v)| [x, v]).collect(),
                segments: p
                    .segs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let (a, b) = (p.vs[i], p.vs[i + 1]);
                        if s.start == a && s.end == b {
                            SegmentDoc::Named("linear".into())
                        } else if s.start == a && s.end == a {
                            SegmentDoc::Named("constant-left".into())
                        } else if s.start == b && s.end == b {
                            SegmentDoc::Named("constant-right".into())
                        } else {
                            SegmentDoc::Explicit {
                                linear: [s.start, s.end],
                            }
                        }
                    })
                    .collect(),
            },
            MembershipFunction::Grid(g) => MembershipDoc::Grid {
                format_version: 1,
                n: g.n(),
                values: g.values,
            },
        }
    }
}
