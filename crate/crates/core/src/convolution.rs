//! The convolution `(f ∗△ g)(x) = sup { f(y) △ g(z) | y ∗ z = x }`, with `sup ∅ = 0`.
//!
//! Three evaluators are provided:
//!
//! * [`convolve_grid`] scans every pair of grid points. It accepts arbitrary
//!   membership functions and serves as the reference.
//! * [`convolve_cuts`] works level by level on the cut endpoints of two
//!   elements of L.
//! * [`meet_convolve`] and [`join_convolve`] evaluate the closed form that
//!   holds when `∗` is the minimum (maximum) and `△` is a border-continuous
//!   t-norm. Their output is exact piecewise data.
//!
//! [`classify`] decides, from operator metadata alone, whether `∗△` is a
//! t-norm or t-conorm on (L, ⊑).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::membership::{
    characteristic, Grid, MembershipFunction, NormalConvexFunction, Piecewise, Segment,
};
use crate::scalar_ops::{classify_continuity, grid_point, snap_index, Approach, ContinuityReport, ScalarOp};

/// Smallest grid accepted by [`convolve_grid`].
pub const MIN_GRID: usize = 65;

/// Which evaluator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Grid,
    Cuts,
    Fast,
}

/// Value of a function at a grid point, with its one-sided limits.
#[derive(Debug, Clone, Copy)]
struct Sample {
    value: f64,
    left: Option<(f64, Approach)>,
    right: Option<(f64, Approach)>,
}

impl Sample {
    /// The exact value and the one-sided limits that can change the result:
    /// `(value, approach, direction)`. Under a continuous operator only the
    /// limit values matter, so limits equal to the value are dropped.
    fn variants(&self, continuous: bool) -> impl Iterator<Item = (f64, Approach, i8)> + '_ {
        let useful = move |(v, a): (f64, Approach)| {
            v != self.value || !continuous && a != Approach::Exact
        };
        std::iter::once((self.value, Approach::Exact, 0))
            .chain(self.left.filter(|&l| useful(l)).map(|(v, a)| (v, a, -1)))
            .chain(self.right.filter(|&r| useful(r)).map(|(v, a)| (v, a, 1)))
    }
}

/// Samples `f` on `n` points. Breakpoints within `1e-9` of a grid point lend it
/// their exact value and limits; other breakpoint values snap to their nearest
/// grid point so point masses are not lost.
fn sample(f: &MembershipFunction, n: usize) -> Vec<Sample> {
    if let MembershipFunction::Grid(g) = f {
        if g.n() == n {
            let v = g.values();
            return (0..n)
                .map(|i| Sample {
                    value: v[i],
                    left: (i > 0).then(|| (v[i], side(v[i - 1], v[i], true))),
                    right: (i + 1 < n).then(|| (v[i], side(v[i], v[i + 1], false))),
                })
                .collect();
        }
    }
    let p = f.to_piecewise();
    let xs = p.breakpoints();
    let mut out: Vec<Sample> = (0..n)
        .map(|i| {
            let x = grid_point(i, n);
            let k = xs.partition_point(|&b| b < x - 1e-9);
            let at = match xs.get(k) {
                Some(&b) if (b - x).abs() <= 1e-9 => b,
                _ => x,
            };
            Sample {
                value: p.eval(at),
                left: (i > 0).then(|| p.left_limit(at)),
                right: (i + 1 < n).then(|| p.right_limit(at)),
            }
        })
        .collect();
    for (x, v) in xs.iter().zip(p.values()) {
        let k = snap_index(*x, n);
        out[k].value = out[k].value.max(*v);
    }
    out
}

fn side(a: f64, b: f64, from_left: bool) -> Approach {
    use std::cmp::Ordering::*;
    match (b.partial_cmp(&a), from_left) {
        (Some(Greater), true) | (Some(Less), false) => Approach::Below,
        (Some(Less), true) | (Some(Greater), false) => Approach::Above,
        _ => Approach::Exact,
    }
}

/// Whether `(y, z)` can be approached from the given sides while staying on
/// the level set of `star` through it.
fn feasible(star: &ScalarOp, y: f64, z: f64, s: f64, dy: i8, dz: i8) -> bool {
    const STEP: f64 = 1e-7;
    const FLAT: f64 = 1e-12;
    let moved_y = || star.eval(y + dy as f64 * STEP, z) - s;
    let moved_z = || star.eval(y, z + dz as f64 * STEP) - s;
    match (dy, dz) {
        (0, 0) => true,
        (_, 0) => moved_y().abs() <= FLAT,
        (0, _) => moved_z().abs() <= FLAT,
        _ => {
            let a = moved_y();
            let b = moved_z();
            if a.abs() <= FLAT && b.abs() <= FLAT || a > FLAT && b < -FLAT || a < -FLAT && b > FLAT {
                return true;
            }
            (star.eval(y + dy as f64 * STEP, z + dz as f64 * STEP) - s).abs() <= FLAT
        }
    }
}

/// Brute-force convolution on `n` grid points.
///
/// Every pair of grid points `(y_i, z_j)` contributes `f(y_i) △ g(z_j)` to the
/// grid point nearest `y_i ∗ z_j` (ties toward the lower index). Where `f` or
/// `g` jumps, or `△` is discontinuous, the supremum may only be approached;
/// such pairs also contribute the limit of `△` along every direction in which
/// `(y_i, z_j)` can be approached without leaving the level set of `∗`.
/// Grid points that receive nothing are 0.
pub fn convolve_grid(
    star: &ScalarOp,
    tri: &ScalarOp,
    f: &MembershipFunction,
    g: &MembershipFunction,
    n: usize,
) -> Result<Grid> {
    if n < MIN_GRID {
        return Err(Error::Input(format!("grid convolution needs n >= {MIN_GRID}, got {n}")));
    }
    let fs = sample(f, n);
    let gs = sample(g, n);
    let continuous = tri.continuity().continuous;
    type Variants = Vec<(f64, Approach, i8)>;
    let fv: Vec<Variants> = fs.iter().map(|s| s.variants(continuous).collect()).collect();
    let gv: Vec<Variants> = gs.iter().map(|s| s.variants(continuous).collect()).collect();
    let values = (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0_f64; n],
            |mut acc, i| {
                let y = grid_point(i, n);
                for (j, gj) in gv.iter().enumerate() {
                    let z = grid_point(j, n);
                    let s = star.eval(y, z);
                    let k = snap_index(s, n);
                    let mut best = acc[k];
                    for &(a, fa, dy) in &fv[i] {
                        for &(b, gb, dz) in gj {
                            let v = if dy == 0 && dz == 0 {
                                tri.eval(a, b)
                            } else {
                                tri.directional_limit(a, fa, b, gb)
                            };
                            if v > best && (dy == 0 && dz == 0 || feasible(star, y, z, s, dy, dz)) {
                                best = v;
                            }
                        }
                    }
                    acc[k] = best;
                }
                acc
            },
        )
        .reduce(
            || vec![0.0_f64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        );
    Grid::new(values)
}

/// Convolution of two elements of L through their cut endpoints.
///
/// For each output level `γ` (midpoints of the level grid) the strong cut is
/// `[min ∗(l_f(α), l_g(β)), max ∗(r_f(α), r_g(β))]` over level pairs with
/// `α △ β > γ`. A grid point receives the level just above the highest `γ`
/// whose cut, with endpoints rounded to the nearest grid point, contains it.
pub fn convolve_cuts(
    star: &ScalarOp,
    tri: &ScalarOp,
    f: &NormalConvexFunction,
    g: &NormalConvexFunction,
    n: usize,
) -> Result<NormalConvexFunction> {
    if n < 3 {
        return Err(Error::Input(format!("output grid needs at least 3 points, got {n}")));
    }
    if !star.is_monotone() {
        return Err(Error::UnsupportedOperator(format!(
            "{star} is not increasing in each place; cut-based convolution needs a monotone ∗"
        )));
    }
    if !tri.is_monotone() {
        return Err(Error::UnsupportedOperator(format!(
            "{tri} is not increasing in each place; cut-based convolution needs a monotone △"
        )));
    }
    let (kf, kg) = (f.levels(), g.levels());
    let k_out = kf.max(kg);
    let table: Vec<Vec<f64>> = (0..kf)
        .map(|i| (0..kg).map(|j| tri.eval(grid_point(i, kf), grid_point(j, kg))).collect())
        .collect();
    let (lf, rf, lg, rg) = (f.cut_lo(), f.cut_hi(), g.cut_lo(), g.cut_hi());

    // For each row, the first column with α △ β > γ. Since △ is increasing in
    // β that column starts the qualifying run, and it only moves right as γ
    // grows. Along that run l_g increases and r_g decreases, so the first
    // qualifying column also gives the extreme endpoints.
    let mut first = vec![0usize; kf];
    let mut values = vec![0.0_f64; n];
    for k in 0..k_out - 1 {
        let gamma = 0.5 * (grid_point(k, k_out) + grid_point(k + 1, k_out));
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..kf {
            while first[i] < kg && table[i][first[i]] <= gamma {
                first[i] += 1;
            }
            let j = first[i];
            if j == kg {
                continue;
            }
            lo = lo.min(star.eval(lf[i], lg[j]));
            hi = hi.max(star.eval(rf[i], rg[j]));
        }
        if lo > hi {
            break;
        }
        let level = grid_point(k + 1, k_out);
        for v in &mut values[snap_index(lo, n)..=snap_index(hi, n)] {
            *v = level;
        }
    }
    NormalConvexFunction::with_levels(MembershipFunction::Grid(Grid::new(values)?), k_out)
}

/// Exact convolution of characteristic functions of intervals:
/// `⟮[a,b]⟯ ∗△ ⟮[c,d]⟯ = ⟮[a∗c, b∗d]⟯` for a continuous t-norm or t-conorm `∗`
/// and a t-norm `△`.
pub fn convolve_characteristic(
    star: &ScalarOp,
    tri: &ScalarOp,
    f: &NormalConvexFunction,
    g: &NormalConvexFunction,
) -> Result<NormalConvexFunction> {
    let (Some((a, b)), Some((c, d))) = (f.as_interval(), g.as_interval()) else {
        return Err(Error::Input("both arguments must be characteristic functions of intervals".into()));
    };
    if !(star.is_tnorm() || star.is_tconorm()) || !star.continuity().continuous {
        return Err(Error::UnsupportedOperator(format!(
            "{star} is not a continuous t-norm or t-conorm; interval images need not be intervals"
        )));
    }
    if !tri.is_tnorm() {
        return Err(Error::UnsupportedOperator(format!("{tri} is not a t-norm")));
    }
    characteristic(star.eval(a, c), star.eval(b, d))
}

fn subdivisions(tri: &ScalarOp, width: f64, sf: f64, sg: f64) -> usize {
    match tri {
        ScalarOp::Minimum | ScalarOp::Lukasiewicz | ScalarOp::NilpotentMinimum => 1,
        ScalarOp::Product => {
            let pieces = width * ((sf * sg).abs() / 4e-6).sqrt();
            (pieces.ceil() as usize).clamp(1, 4096)
        }
        _ => 32,
    }
}

#[derive(Clone, Copy)]
enum Region {
    Both,
    OnlyF,
    OnlyG,
    Neither,
}

fn region(f: &NormalConvexFunction, g: &NormalConvexFunction, x: f64) -> Region {
    match (f.increasing_prefix_contains(x), g.increasing_prefix_contains(x)) {
        (true, true) => Region::Both,
        (true, false) => Region::OnlyF,
        (false, true) => Region::OnlyG,
        (false, false) => Region::Neither,
    }
}

fn combine(tri: &ScalarOp, r: Region, fv: (f64, Approach), gv: (f64, Approach)) -> f64 {
    match r {
        Region::Both => fv.0.max(gv.0),
        Region::OnlyG => fv.0,
        Region::OnlyF => gv.0,
        Region::Neither => tri.directional_limit(fv.0, fv.1, gv.0, gv.1),
    }
}

fn require_border_continuous(tri: &ScalarOp) -> Result<()> {
    if tri.is_tnorm() && tri.continuity().border_continuous {
        Ok(())
    } else {
        Err(Error::Classification(format!(
            "{tri} is not a border-continuous t-norm; the closed-form meet does not apply"
        )))
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// The ∧△-convolution by its closed form:
/// `max(f, g)` on `f⁺ ∩ g⁺`, `f` on `g⁺ \ f⁺`, `g` on `f⁺ \ g⁺` and `f △ g`
/// elsewhere. Exact for △ ∈ {minimum, Łukasiewicz, nilpotent minimum};
/// other t-norms are linearised on a fine subdivision.
pub fn meet_convolve(
    tri: &ScalarOp,
    f: &NormalConvexFunction,
    g: &NormalConvexFunction,
) -> Result<NormalConvexFunction> {
    require_border_continuous(tri)?;
    let fp = f.piecewise();
    let gp = g.piecewise();
    let mut cuts: Vec<f64> = fp
        .breakpoints()
        .iter()
        .chain(gp.breakpoints())
        .copied()
        .chain([f.prefix_end(), g.prefix_end()])
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut xs: Vec<f64> = Vec::with_capacity(cuts.len() * 2);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        xs.push(a);
        let (f0, f1) = (fp.right_limit(a).0, fp.left_limit(b).0);
        let (g0, g1) = (gp.right_limit(a).0, gp.left_limit(b).0);
        let mut inner: Vec<f64> = Vec::new();
        for (d0, d1) in [(f0 - g0, f1 - g1), (f0 + g0 - 1.0, f1 + g1 - 1.0)] {
            if sign(d0) * sign(d1) < 0 {
                let x = a + d0 / (d0 - d1) * (b - a);
                if x > a && x < b {
                    inner.push(x);
                }
            }
        }
        if let Region::Neither = region(f, g, 0.5 * (a + b)) {
            let pieces = subdivisions(tri, b - a, (f1 - f0) / (b - a), (g1 - g0) / (b - a));
            inner.extend((1..pieces).map(|p| a + (b - a) * p as f64 / pieces as f64));
        }
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        xs.extend(inner.into_iter().filter(|&x| x > a && x < b));
    }
    xs.push(1.0);
    xs.dedup();

    let vs: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let exact = |v: f64| (v, Approach::Exact);
            combine(tri, region(f, g, x), exact(fp.eval(x)), exact(gp.eval(x)))
        })
        .collect();
    let segs: Vec<Segment> = xs
        .windows(2)
        .map(|w| {
            let r = region(f, g, 0.5 * (w[0] + w[1]));
            Segment::linear(
                combine(tri, r, fp.right_limit(w[0]), gp.right_limit(w[0])),
                combine(tri, r, fp.left_limit(w[1]), gp.left_limit(w[1])),
            )
        })
        .collect();
    let out = Piecewise::new(xs, vs, segs)?.simplify();
    NormalConvexFunction::with_levels(
        MembershipFunction::Piecewise(out),
        f.levels().max(g.levels()),
    )
}

/// The ∨△-convolution, computed as `¬(¬f ∧△ ¬g)`.
pub fn join_convolve(
    tri: &ScalarOp,
    f: &NormalConvexFunction,
    g: &NormalConvexFunction,
) -> Result<NormalConvexFunction> {
    require_border_continuous(tri)?;
    meet_convolve(tri, &f.negate()?, &g.negate()?)?.negate()
}

/// Convolution of two elements of L by the best available evaluator:
/// exact interval arithmetic for characteristic functions, the closed form for
/// `(minimum | maximum, border-continuous t-norm)`, cut scanning otherwise.
pub fn convolve(
    star: &ScalarOp,
    tri: &ScalarOp,
    f: &NormalConvexFunction,
    g: &NormalConvexFunction,
    n: usize,
) -> Result<NormalConvexFunction> {
    if f.as_interval().is_some() && g.as_interval().is_some() {
        if let Ok(h) = convolve_characteristic(star, tri, f, g) {
            return Ok(h);
        }
    }
    let fast = tri.is_tnorm() && tri.continuity().border_continuous;
    if fast && star.is_minimum() {
        return meet_convolve(tri, f, g);
    }
    if fast && star.is_maximum() {
        return join_convolve(tri, f, g);
    }
    convolve_cuts(star, tri, f, g, n)
}

/// Whether a pair `(∗, △)` induces a t-norm or t-conorm on L, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    #[serde(rename = "is_tnorm_on_L")]
    pub is_tnorm_on_l: bool,
    #[serde(rename = "is_tr_norm_on_L")]
    pub is_tr_norm_on_l: bool,
    #[serde(rename = "is_tconorm_on_L")]
    pub is_tconorm_on_l: bool,
    pub star_class: ContinuityReport,
    pub tri_class: ContinuityReport,
    pub reason: String,
}

/// Decides whether `∗△` is a t-norm (and a t_r-norm) or a t-conorm on (L, ⊑).
///
/// `∗△` is a t-norm iff `∗` is a continuous t-norm and `△` is a t-norm that is
/// border continuous when `∗` is the minimum and left-continuous otherwise.
/// The t-conorm case is the same with `∗` a continuous t-conorm and the
/// maximum in place of the minimum.
pub fn classify(star: &ScalarOp, tri: &ScalarOp) -> Result<ClassificationReport> {
    let star_class = classify_continuity(star, 33)?;
    let tri_class = classify_continuity(tri, 33)?;
    let sc = star.continuity();
    let tc = tri.continuity();

    let (kind, extreme, is_extreme) = if star.is_tnorm() {
        ("t-norm", "minimum", star.is_minimum())
    } else if star.is_tconorm() {
        ("t-conorm", "maximum", star.is_maximum())
    } else {
        ("", "", false)
    };

    let (verdict, reason) = if kind.is_empty() {
        (false, format!("star {star} is neither a t-norm nor a t-conorm"))
    } else if !sc.continuous {
        (false, format!("star {star} is a {kind} but not continuous"))
    } else if !tri.is_tnorm() {
        (false, format!("tri {tri} is not a t-norm"))
    } else if is_extreme {
        if tc.border_continuous {
            (true, format!("star is the {extreme} and tri {tri} is a border-continuous t-norm"))
        } else {
            (false, format!("star is the {extreme} and tri {tri} is not border continuous"))
        }
    } else if tc.left_continuous {
        (true, format!("star {star} is a continuous {kind} other than the {extreme} and tri {tri} is a left-continuous t-norm"))
    } else {
        (false, format!("star {star} is a continuous {kind} other than the {extreme} and tri {tri} is not left-continuous"))
    };
    let is_tnorm = verdict && kind == "t-norm";
    Ok(ClassificationReport {
        is_tnorm_on_l: is_tnorm,
        is_tr_norm_on_l: is_tnorm,
        is_tconorm_on_l: verdict && kind == "t-conorm",
        star_class,
        tri_class,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership::{trapezoid, triangle};

    fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn nodes(f: &NormalConvexFunction, n: usize) -> Vec<f64> {
        (0..n).map(|i| f.eval(grid_point(i, n))).collect()
    }

    fn spec_pair() -> (NormalConvexFunction, NormalConvexFunction) {
        let f = triangle(0.0, 0.5, 1.0).unwrap();
        let g = MembershipFunction::Piecewise(
            Piecewise::linear(&[(0.0, 0.0), (0.2, 0.0), (0.3, 1.0), (0.9, 0.0), (1.0, 0.0)]).unwrap(),
        );
        (f, NormalConvexFunction::new(g).unwrap())
    }

    #[test]
    fn grid_singletons() {
        let x = characteristic(0.5, 0.5).unwrap();
        let y = characteristic(0.4, 0.4).unwrap();
        let out = convolve_grid(&ScalarOp::Product, &ScalarOp::Minimum, x.base(), y.base(), 257).unwrap();
        let k = snap_index(0.2, 257);
        for (i, &v) in out.values().iter().enumerate() {
            assert_eq!(v, if i == k { 1.0 } else { 0.0 }, "at {i}");
        }
    }

    #[test]
    fn grid_unit() {
        let one = characteristic(1.0, 1.0).unwrap();
        let f = triangle(0.1, 0.35, 0.8).unwrap();
        let fg = f.base().to_grid(257).unwrap();
        for tri in [ScalarOp::Minimum, ScalarOp::Product, ScalarOp::Lukasiewicz] {
            let out = convolve_grid(&ScalarOp::Product, &tri, one.base(), &MembershipFunction::Grid(fg.clone()), 257)
                .unwrap();
            assert_eq!(out.values(), fg.values(), "{tri}");
        }
    }

    #[test]
    fn grid_product_of_triangles_reaches_one_at_quarter() {
        let f = triangle(0.0, 0.5, 1.0).unwrap();
        let out = convolve_grid(&ScalarOp::Product, &ScalarOp::Product, f.base(), f.base(), 257).unwrap();
        assert_eq!(out.values()[64], 1.0);
    }

    #[test]
    fn grid_is_commutative() {
        let f = triangle(0.1, 0.2, 0.7).unwrap();
        let g = trapezoid(0.3, 0.4, 0.5, 0.9).unwrap();
        for (star, tri) in [
            (ScalarOp::Product, ScalarOp::Product),
            (ScalarOp::Lukasiewicz, ScalarOp::NilpotentMinimum),
            (ScalarOp::Minimum, ScalarOp::Drastic),
        ] {
            let a = convolve_grid(&star, &tri, f.base(), g.base(), 129).unwrap();
            let b = convolve_grid(&star, &tri, g.base(), f.base(), 129).unwrap();
            assert_eq!(a.values(), b.values());
        }
    }

    #[test]
    fn grid_rejects_small_n() {
        let f = triangle(0.1, 0.2, 0.7).unwrap();
        assert!(convolve_grid(&ScalarOp::Minimum, &ScalarOp::Minimum, f.base(), f.base(), 64).is_err());
    }

    #[test]
    fn meet_formula_examples() {
        let (f, g) = spec_pair();
        let m = meet_convolve(&ScalarOp::Product, &f, &g).unwrap();
        assert!((m.eval(0.2) - 0.4).abs() < 1e-12);
        assert!((m.eval(0.4) - 0.8 - 1.0 / 30.0).abs() < 1e-12);
        assert!((m.eval(0.7) - 0.2).abs() < 1e-6);

        let oracle = convolve_grid(&ScalarOp::Minimum, &ScalarOp::Product, f.base(), g.base(), 1025).unwrap();
        for x in [0.2, 0.4, 0.7] {
            let k = snap_index(x, 1025);
            assert!((oracle.values()[k] - m.eval(x)).abs() < 2e-3, "at {x}");
        }
    }

    #[test]
    fn meet_matches_grid() {
        let f = triangle(0.1, 0.45, 0.8).unwrap();
        let g = trapezoid(0.2, 0.3, 0.6, 0.95).unwrap();
        for tri in [ScalarOp::Minimum, ScalarOp::Product, ScalarOp::Lukasiewicz, ScalarOp::NilpotentMinimum] {
            let m = meet_convolve(&tri, &f, &g).unwrap();
            let grid = convolve_grid(&ScalarOp::Minimum, &tri, f.base(), g.base(), 257).unwrap();
            assert!(sup_dist(&nodes(&m, 257), grid.values()) <= 0.02, "{tri}");
        }
    }

    #[test]
    fn join_matches_grid() {
        let f = triangle(0.1, 0.45, 0.8).unwrap();
        let g = trapezoid(0.2, 0.3, 0.6, 0.95).unwrap();
        for tri in [ScalarOp::Minimum, ScalarOp::Product] {
            let j = join_convolve(&tri, &f, &g).unwrap();
            let grid = convolve_grid(&ScalarOp::Maximum, &tri, f.base(), g.base(), 257).unwrap();
            assert!(sup_dist(&nodes(&j, 257), grid.values()) <= 0.02, "{tri}");
        }
    }

    #[test]
    fn fast_paths_reject_drastic() {
        let f = triangle(0.1, 0.45, 0.8).unwrap();
        assert!(matches!(meet_convolve(&ScalarOp::Drastic, &f, &f), Err(Error::Classification(_))));
        assert!(matches!(join_convolve(&ScalarOp::Drastic, &f, &f), Err(Error::Classification(_))));
        assert!(meet_convolve(&ScalarOp::os_drastic(), &f, &f).is_ok());
    }

    #[test]
    fn join_of_singletons_and_top() {
        let x = characteristic(0.3, 0.3).unwrap();
        let y = characteristic(0.8, 0.8).unwrap();
        assert_eq!(join_convolve(&ScalarOp::Minimum, &x, &y).unwrap().as_interval(), Some((0.8, 0.8)));
        let one = characteristic(1.0, 1.0).unwrap();
        let t = triangle(0.2, 0.3, 0.9).unwrap();
        assert_eq!(join_convolve(&ScalarOp::Minimum, &t, &one).unwrap().as_interval(), Some((1.0, 1.0)));
    }

    #[test]
    fn cuts_examples() {
        let full = characteristic(0.0, 1.0).unwrap();
        let ab = characteristic(0.2, 0.7).unwrap();
        for star in [ScalarOp::Product, ScalarOp::Lukasiewicz, ScalarOp::Minimum] {
            let out = convolve_cuts(&star, &ScalarOp::Minimum, &full, &ab, 1025).unwrap();
            for i in 0..1025 {
                let x = grid_point(i, 1025);
                let expect = if x <= 0.7 + 1e-3 { 1.0 } else { 0.0 };
                assert_eq!(out.eval(x), expect, "{star} at {x}");
            }
        }
        let f = triangle(0.3, 0.5, 0.7).unwrap();
        let g = triangle(0.4, 0.6, 0.8).unwrap();
        let cut = convolve_cuts(&ScalarOp::Lukasiewicz, &ScalarOp::Minimum, &f, &g, 257).unwrap();
        let grid = convolve_grid(&ScalarOp::Lukasiewicz, &ScalarOp::Minimum, f.base(), g.base(), 257).unwrap();
        assert!(sup_dist(&nodes(&cut, 257), grid.values()) <= 0.02);
        let one = characteristic(1.0, 1.0).unwrap();
        let unit = convolve_cuts(&ScalarOp::Product, &ScalarOp::Product, &one, &f, 257).unwrap();
        let fg = f.base().to_grid(257).unwrap();
        assert!(sup_dist(&nodes(&unit, 257), fg.values()) <= 0.01);
    }

    #[test]
    fn cuts_reject_non_monotone() {
        let csv = "0,1,0\n1,0,1\n0,1,1\n";
        let weird = ScalarOp::tabulated_from_csv(csv, None).unwrap();
        let f = triangle(0.3, 0.5, 0.7).unwrap();
        assert!(matches!(
            convolve_cuts(&weird, &ScalarOp::Minimum, &f, &f, 257),
            Err(Error::UnsupportedOperator(_))
        ));
    }

    #[test]
    fn characteristic_identities() {
        let x = characteristic(0.5, 0.5).unwrap();
        let y = characteristic(0.4, 0.4).unwrap();
        let out = convolve_characteristic(&ScalarOp::Product, &ScalarOp::Minimum, &x, &y).unwrap();
        assert_eq!(out.as_interval(), Some((0.2, 0.2)));
        let full = characteristic(0.0, 1.0).unwrap();
        let ab = characteristic(0.2, 0.7).unwrap();
        let out = convolve_characteristic(&ScalarOp::Lukasiewicz, &ScalarOp::Product, &full, &ab).unwrap();
        assert_eq!(out.as_interval(), Some((0.0, 0.7)));
    }

    #[test]
    fn classification_table() {
        let cases = [
            (ScalarOp::Minimum, ScalarOp::Lukasiewicz, true, false),
            (ScalarOp::Product, ScalarOp::Drastic, false, false),
            (ScalarOp::Minimum, ScalarOp::Drastic, false, false),
            (ScalarOp::Product, ScalarOp::NilpotentMinimum, true, false),
            (ScalarOp::Maximum, ScalarOp::Product, false, true),
            (ScalarOp::Product, ScalarOp::os_drastic(), false, false),
            (ScalarOp::Minimum, ScalarOp::os_drastic(), true, false),
            (ScalarOp::ProbabilisticSum, ScalarOp::os_drastic(), false, false),
            (ScalarOp::ProbabilisticSum, ScalarOp::NilpotentMinimum, false, true),
            (ScalarOp::Drastic, ScalarOp::Minimum, false, false),
        ];
        for (star, tri, tnorm, tconorm) in cases {
            let r = classify(&star, &tri).unwrap();
            assert_eq!(r.is_tnorm_on_l, tnorm, "{star} {tri}: {}", r.reason);
            assert_eq!(r.is_tconorm_on_l, tconorm, "{star} {tri}: {}", r.reason);
            assert_eq!(r.is_tr_norm_on_l, r.is_tnorm_on_l);
        }
        let r = classify(&ScalarOp::Product, &ScalarOp::Drastic).unwrap();
        assert!(r.reason.contains("left-continuous"));
        let r = classify(&ScalarOp::Minimum, &ScalarOp::Drastic).unwrap();
        assert!(r.reason.contains("border continuous"));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["is_tnorm_on_L"], false);
    }
}
