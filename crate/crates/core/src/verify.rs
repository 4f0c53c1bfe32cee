//! Sampled checks of the t-norm axioms for `∗△` on L, and the triples that
//! break associativity when `△` is not border continuous (for `∗ = ∧`) or not
//! left-continuous (for Archimedean `∗`).
//!
//! Everything here is evaluated through [`convolve_grid`], never the closed
//! form, because the witnesses are built to violate the closed form's
//! precondition.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{convolve_grid, MIN_GRID};
use crate::error::{Error, Result};
use crate::membership::{
    characteristic, trapezoid, triangle, MembershipFunction, NormalConvexFunction, Piecewise,
    Segment,
};
use crate::order::meet;
use crate::scalar_ops::{grid_point, snap_index, ScalarOp};

/// Default resolution of the axiom suite.
pub const VERIFY_GRID: usize = 257;
/// Resolution for witness evaluation. It puts 0.5, 0.729, 0.81 and 0.9 on nodes.
pub const WITNESS_GRID: usize = 1001;
pub const DEFAULT_TOLERANCE: f64 = 0.02;

/// Where an axiom failed: the functions involved and the point compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub axiom: String,
    pub functions: Vec<String>,
    pub x: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub commutative: bool,
    pub unit_ok: bool,
    pub monotone_ok: bool,
    pub associative_ok: bool,
    #[serde(rename = "closed_on_L")]
    pub closed_on_l: bool,
    #[serde(rename = "closed_on_J")]
    pub closed_on_j: bool,
    #[serde(rename = "closed_on_J2")]
    pub closed_on_j2: bool,
    pub max_assoc_gap: f64,
    pub tolerance: f64,
    pub resolution: usize,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.commutative
            && self.unit_ok
            && self.monotone_ok
            && self.associative_ok
            && self.closed_on_l
            && self.closed_on_j
            && self.closed_on_j2
    }

    /// Folds in an associativity gap measured outside the suite, e.g. by
    /// [`association_gap`] at a witness point.
    pub fn absorb_gap(&mut self, gap: &AssociationGap, functions: [&str; 3]) {
        if gap.gap > self.max_assoc_gap {
            self.max_assoc_gap = gap.gap;
        }
        self.associative_ok = self.max_assoc_gap <= self.tolerance;
        if gap.gap > self.tolerance {
            self.witness = Some(Witness {
                axiom: "associativity".into(),
                functions: functions.iter().map(|s| s.to_string()).collect(),
                x: gap.x,
                gap: gap.gap,
            });
        }
    }
}

fn conv(
    star: &ScalarOp,
    tri: &ScalarOp,
    f: &MembershipFunction,
    g: &MembershipFunction,
    n: usize,
) -> Result<MembershipFunction> {
    Ok(MembershipFunction::Grid(convolve_grid(star, tri, f, g, n)?))
}

fn values(f: &MembershipFunction, n: usize) -> Result<Vec<f64>> {
    match f {
        MembershipFunction::Grid(g) if g.n() == n => Ok(g.values().to_vec()),
        _ => Ok(f.to_grid(n)?.values().to_vec()),
    }
}

/// Plain sup-norm distance and the node where it is attained.
fn sup_gap(a: &[f64], b: &[f64]) -> (f64, usize) {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| ((x - y).abs(), k))
        .fold((0.0, 0), |m, c| if c.0 > m.0 { c } else { m })
}

/// Distance between the values two grids take within one node of each
/// point. Each association of a nested convolution snaps twice, so a steep
/// rise or a jump can land a node apart in the two results without either
/// being wrong.
fn slack_gap(a: &[f64], b: &[f64]) -> (f64, usize) {
    let n = a.len();
    let range = |v: &[f64], k: usize| {
        let near = &v[k.saturating_sub(1)..=(k + 1).min(n - 1)];
        let lo = near.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = near.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    (0..n)
        .map(|k| {
            let ((alo, ahi), (blo, bhi)) = (range(a, k), range(b, k));
            ((alo - bhi).max(blo - ahi).max(0.0), k)
        })
        .fold((0.0, 0), |m, c| if c.0 > m.0 { c } else { m })
}

fn running_max(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut best = 0.0_f64;
    v.map(|x| {
        best = best.max(x);
        best
    })
    .collect()
}

/// Node at which the envelope test for `a ⊑ b` fails on grids, with one node
/// of slack in `x`.
fn grid_leq(a: &[f64], b: &[f64], tol: f64) -> Option<usize> {
    let n = a.len();
    let (al, bl) = (running_max(a.iter().copied()), running_max(b.iter().copied()));
    let mut ar = running_max(a.iter().rev().copied());
    let mut br = running_max(b.iter().rev().copied());
    ar.reverse();
    br.reverse();
    (0..n).find(|&k| {
        bl[k] > al[(k + 1).min(n - 1)] + tol || ar[k] > br[k.saturating_sub(1)] + tol
    })
}

fn in_l(f: &MembershipFunction) -> bool {
    f.is_convex() && f.is_normal()
}

fn name(i: usize) -> String {
    format!("sample[{i}]")
}

/// Checks commutativity, the unit, ⊑-monotonicity, associativity and closure
/// on every pair and triple of `sample`, at the default resolution.
pub fn run_axiom_suite(
    star: &ScalarOp,
    tri: &ScalarOp,
    sample: &[MembershipFunction],
    tolerance: f64,
) -> Result<AxiomReport> {
    run_axiom_suite_at(star, tri, sample, tolerance, VERIFY_GRID)
}

pub fn run_axiom_suite_at(
    star: &ScalarOp,
    tri: &ScalarOp,
    sample: &[MembershipFunction],
    tolerance: f64,
    n: usize,
) -> Result<AxiomReport> {
    if sample.is_empty() {
        return Err(Error::Input("the axiom suite needs a non-empty sample".into()));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Input(format!("tolerance must be positive, got {tolerance}")));
    }
    if n < MIN_GRID {
        return Err(Error::Input(format!("verification needs n >= {MIN_GRID}, got {n}")));
    }
    for (i, f) in sample.iter().enumerate() {
        if !f.is_normal() {
            return Err(Error::Input(format!("{} is not normal (sup = {})", name(i), f.sup())));
        }
        if !f.is_convex() {
            return Err(Error::Input(format!("{} is not convex", name(i))));
        }
    }
    let m = sample.len();
    let mut witness: Option<Witness> = None;
    let mut note = |w: Witness| {
        if witness.is_none() {
            witness = Some(w);
        }
    };

    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let products: Vec<MembershipFunction> = pairs
        .par_iter()
        .map(|&(i, j)| conv(star, tri, &sample[i], &sample[j], n))
        .collect::<Result<_>>()?;
    let product = |i: usize, j: usize| &products[i * m + j];
    let grids: Vec<Vec<f64>> = products.iter().map(|p| values(p, n)).collect::<Result<_>>()?;
    let grid = |i: usize, j: usize| &grids[i * m + j];

    // Associativity first; its witness is the most informative one.
    let triples: Vec<(usize, usize, usize)> = pairs
        .iter()
        .flat_map(|&(i, j)| (0..m).map(move |k| (i, j, k)))
        .collect();
    let assoc: Vec<(f64, usize, bool)> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let lhs = conv(star, tri, product(i, j), &sample[k], n)?;
            let rhs = conv(star, tri, &sample[i], product(j, k), n)?;
            let (gap, at) = slack_gap(&values(&lhs, n)?, &values(&rhs, n)?);
            Ok((gap, at, in_l(&lhs) && in_l(&rhs)))
        })
        .collect::<Result<_>>()?;
    let (worst, &(max_assoc_gap, at, _)) = assoc
        .iter()
        .enumerate()
        .fold((0, &assoc[0]), |m, c| if c.1 .0 > m.1 .0 { c } else { m });
    let associative_ok = max_assoc_gap <= tolerance;
    if !associative_ok {
        let (i, j, k) = triples[worst];
        note(Witness {
            axiom: "associativity".into(),
            functions: vec![name(i), name(j), name(k)],
            x: grid_point(at, n),
            gap: max_assoc_gap,
        });
    }

    let mut commutative = true;
    for &(i, j) in pairs.iter().filter(|(i, j)| i < j) {
        let (gap, at) = sup_gap(grid(i, j), grid(j, i));
        if gap > tolerance {
            commutative = false;
            note(Witness {
                axiom: "commutativity".into(),
                functions: vec![name(i), name(j)],
                x: grid_point(at, n),
                gap,
            });
            break;
        }
    }

    let unit = if star.is_tconorm() && !star.is_tnorm() {
        characteristic(0.0, 0.0)?
    } else {
        characteristic(1.0, 1.0)?
    };
    let unit_gaps: Vec<(f64, usize)> = sample
        .par_iter()
        .map(|f| {
            let own = values(f, n)?;
            let a = values(&conv(star, tri, unit.base(), f, n)?, n)?;
            let b = values(&conv(star, tri, f, unit.base(), n)?, n)?;
            let (ga, ka) = slack_gap(&a, &own);
            let (gb, kb) = slack_gap(&b, &own);
            Ok(if ga >= gb { (ga, ka) } else { (gb, kb) })
        })
        .collect::<Result<_>>()?;
    let mut unit_ok = true;
    if let Some((i, &(gap, at))) = unit_gaps.iter().enumerate().find(|(_, g)| g.0 > tolerance) {
        unit_ok = false;
        note(Witness {
            axiom: "unit".into(),
            functions: vec!["unit".into(), name(i)],
            x: grid_point(at, n),
            gap,
        });
    }

    // f₁ ⊑ f₂ is produced by taking f₁ = f₂ ∧∧ g, the lattice meet.
    let elements: Vec<NormalConvexFunction> = sample
        .iter()
        .map(|f| NormalConvexFunction::new(f.clone()))
        .collect::<Result<_>>()?;
    let mono_cases: Vec<(usize, usize, usize)> = pairs
        .iter()
        .filter(|(i, j)| i != j)
        .flat_map(|&(i, j)| (0..m).map(move |k| (i, j, k)))
        .collect();
    let mono: Vec<Option<(usize, usize, usize, usize)>> = mono_cases
        .par_iter()
        .map(|&(i, j, k)| {
            let lower = meet(&elements[i], &elements[j])?;
            let left = values(&conv(star, tri, lower.base(), &sample[k], n)?, n)?;
            let right = values(&conv(star, tri, &sample[k], lower.base(), n)?, n)?;
            let bad = grid_leq(&left, grid(i, k), tolerance)
                .or_else(|| grid_leq(&right, grid(k, i), tolerance));
            Ok(bad.map(|at| (i, j, k, at)))
        })
        .collect::<Result<_>>()?;
    let mut monotone_ok = true;
    if let Some(&(i, j, k, at)) = mono.iter().flatten().next() {
        monotone_ok = false;
        note(Witness {
            axiom: "monotonicity".into(),
            functions: vec![format!("{} ∧∧ {}", name(i), name(j)), name(i), name(k)],
            x: grid_point(at, n),
            gap: f64::NAN,
        });
    }

    let mut closed_on_l = assoc.iter().all(|a| a.2);
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| !in_l(product(i, j))) {
        closed_on_l = false;
        note(Witness {
            axiom: "closure on L".into(),
            functions: vec![name(i), name(j)],
            x: f64::NAN,
            gap: f64::NAN,
        });
    }

    let points = [0.0, 0.25, 0.5, 0.75, 1.0];
    let singletons: Vec<(f64, f64)> = points
        .iter()
        .flat_map(|&x| points.iter().map(move |&y| (x, y)))
        .collect();
    let closed_on_j = check_intervals(star, tri, &singletons_as_intervals(&singletons), n, tolerance)?;
    if let Some((a, b, at)) = closed_on_j {
        note(interval_witness("closure on J", a, b, at, n));
    }
    let intervals = [(0.0, 1.0), (0.25, 0.75), (0.5, 0.5), (0.0, 0.5), (0.5, 1.0), (0.25, 0.25)];
    let interval_pairs: Vec<((f64, f64), (f64, f64))> = intervals
        .iter()
        .flat_map(|&a| intervals.iter().map(move |&b| (a, b)))
        .collect();
    let closed_on_j2 = check_intervals(star, tri, &interval_pairs, n, tolerance)?;
    if let Some((a, b, at)) = closed_on_j2 {
        note(interval_witness("closure on J2", a, b, at, n));
    }

    Ok(AxiomReport {
        commutative,
        unit_ok,
        monotone_ok,
        associative_ok,
        closed_on_l,
        closed_on_j: closed_on_j.is_none(),
        closed_on_j2: closed_on_j2.is_none(),
        max_assoc_gap,
        tolerance,
        resolution: n,
        witness,
    })
}

fn singletons_as_intervals(points: &[(f64, f64)]) -> Vec<((f64, f64), (f64, f64))> {
    points.iter().map(|&(x, y)| ((x, x), (y, y))).collect()
}

fn interval_witness(axiom: &str, a: (f64, f64), b: (f64, f64), at: usize, n: usize) -> Witness {
    Witness {
        axiom: axiom.into(),
        functions: vec![format!("[{}, {}]", a.0, a.1), format!("[{}, {}]", b.0, b.1)],
        x: grid_point(at, n),
        gap: f64::NAN,
    }
}

/// First pair whose grid convolution is not the indicator of
/// `[a.lo ∗ b.lo, a.hi ∗ b.hi]`, with the offending node.
#[allow(clippy::type_complexity)]
fn check_intervals(
    star: &ScalarOp,
    tri: &ScalarOp,
    cases: &[((f64, f64), (f64, f64))],
    n: usize,
    tol: f64,
) -> Result<Option<((f64, f64), (f64, f64), usize)>> {
    let bad: Vec<Option<usize>> = cases
        .par_iter()
        .map(|&(a, b)| {
            let fa = characteristic(a.0, a.1)?;
            let fb = characteristic(b.0, b.1)?;
            let out = values(&conv(star, tri, fa.base(), fb.base(), n)?, n)?;
            let lo = snap_index(star.eval(a.0, b.0), n);
            let hi = snap_index(star.eval(a.1, b.1), n);
            Ok(out.iter().enumerate().position(|(k, &v)| {
                let expect = if (lo..=hi).contains(&k) { 1.0 } else { 0.0 };
                (v - expect).abs() > tol
            }))
        })
        .collect::<Result<_>>()?;
    Ok(cases.iter().zip(bad).find_map(|(&(a, b), at)| at.map(|k| (a, b, k))))
}

/// The two associations of `(f, g, h)` compared at the grid point nearest `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationGap {
    pub x: f64,
    pub left_first: f64,
    pub right_first: f64,
    pub gap: f64,
    pub resolution: usize,
}

/// `((f ∗△ g) ∗△ h)(x)` against `(f ∗△ (g ∗△ h))(x)` on `n` grid points.
pub fn association_gap(
    star: &ScalarOp,
    tri: &ScalarOp,
    (f, g, h): (&MembershipFunction, &MembershipFunction, &MembershipFunction),
    x: f64,
    n: usize,
) -> Result<AssociationGap> {
    let fg = conv(star, tri, f, g, n)?;
    let gh = conv(star, tri, g, h, n)?;
    let lhs = values(&conv(star, tri, &fg, h, n)?, n)?;
    let rhs = values(&conv(star, tri, f, &gh, n)?, n)?;
    let k = snap_index(x, n);
    Ok(AssociationGap {
        x: grid_point(k, n),
        left_first: lhs[k],
        right_first: rhs[k],
        gap: (lhs[k] - rhs[k]).abs(),
        resolution: n,
    })
}

pub type Triple = (MembershipFunction, MembershipFunction, MembershipFunction);

fn open_unit(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("{what} must lie in (0,1), got {v}")))
    }
}

/// `f ≡ 1`; `g(x) = x` on `[0,1)` with `g(1) = 0`; `h(0) = 1` with `h = a`
/// on `(0,1]`. Under `∗ = ∧` the two associations differ by `a − a △ 1⁻`
/// on all of `(0,1)`.
pub fn border_witness(a: f64) -> Result<Triple> {
    open_unit(a, "border witness level a")?;
    let f = Piecewise::linear(&[(0.0, 1.0), (1.0, 1.0)])?;
    let g = Piecewise::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![Segment::linear(0.0, 1.0)])?;
    let h = Piecewise::new(vec![0.0, 1.0], vec![1.0, a], vec![Segment::constant(a)])?;
    Ok(triple(f, g, h))
}

fn triple(f: Piecewise, g: Piecewise, h: Piecewise) -> Triple {
    (
        MembershipFunction::Piecewise(f),
        MembershipFunction::Piecewise(g),
        MembershipFunction::Piecewise(h),
    )
}

/// The triple whose associations differ at `λ∗λ∗λ` by `u △ v − u △ v⁻`:
///
/// * `f = max(0, x − λ + v)` on `(λ∗λ, λ)`, `f(λ) = 1`, 0 elsewhere;
/// * `g = λ + 1 − x` on `(λ, 1]`, 0 elsewhere;
/// * `h = u` on `[λ, 1)`, `h(1) = 1`, 0 elsewhere.
///
/// `(α, β)` is an interval on which `∗` is Archimedean; `λ`, `λ∗λ` and
/// `λ∗λ∗λ` must all lie inside it.
pub fn left_witness(
    star: &ScalarOp,
    lambda: f64,
    u: f64,
    v: f64,
    alpha: f64,
    beta: f64,
) -> Result<Triple> {
    open_unit(u, "left witness u")?;
    open_unit(v, "left witness v")?;
    if !star.is_tnorm() {
        return Err(Error::Input(format!("{star} is not a t-norm")));
    }
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) || alpha >= beta {
        return Err(Error::Input(format!("({alpha}, {beta}) is not a subinterval of [0,1]")));
    }
    let l2 = star.eval(lambda, lambda);
    let l3 = star.eval(l2, lambda);
    for (what, x) in [("λ", lambda), ("λ∗λ", l2), ("λ∗λ∗λ", l3)] {
        if !(x > alpha && x < beta) {
            return Err(Error::Input(format!(
                "{what} = {x} must lie in the Archimedean block ({alpha}, {beta})"
            )));
        }
    }
    if !(l3 < l2 && l2 < lambda) {
        return Err(Error::Input(format!(
            "{star} is idempotent at λ = {lambda}; the witness needs a strictly decreasing λ, λ∗λ, λ∗λ∗λ"
        )));
    }

    // The ramp x − λ + v may start below zero inside (λ∗λ, λ).
    let knee = lambda - v;
    let mut xs = vec![0.0, l2];
    let mut segs = vec![Segment::constant(0.0)];
    if knee > l2 {
        xs.push(knee);
        segs.push(Segment::constant(0.0));
        segs.push(Segment::linear(0.0, v));
    } else {
        segs.push(Segment::linear(l2 - lambda + v, v));
    }
    xs.extend([lambda, 1.0]);
    segs.push(Segment::constant(0.0));
    let mut vs = vec![0.0; xs.len()];
    vs[xs.len() - 2] = 1.0;
    let f = Piecewise::new(xs, vs, segs)?;

    let g = Piecewise::new(
        vec![0.0, lambda, 1.0],
        vec![0.0, 0.0, lambda],
        vec![Segment::constant(0.0), Segment::linear(1.0, lambda)],
    )?;
    let h = Piecewise::new(
        vec![0.0, lambda, 1.0],
        vec![0.0, u, 1.0],
        vec![Segment::constant(0.0), Segment::constant(u)],
    )?;
    Ok(triple(f, g, h))
}

/// Triangle with left foot in `[0, 0.4]` and legs of width 0.15 to 0.3.
pub fn random_triangle<R: RngExt + ?Sized>(rng: &mut R) -> NormalConvexFunction {
    let a: f64 = rng.random_range(0.0..0.4);
    let p = a + rng.random_range(0.15..0.3);
    let b = (p + rng.random_range(0.15..0.3_f64)).min(1.0);
    triangle(a, p, b).expect("corners are ordered and inside [0,1]")
}

/// A piecewise-linear element of L with a kink in each leg and, half of the
/// time, a plateau. Slopes stay below 8.
pub fn random_l_element<R: RngExt + ?Sized>(rng: &mut R) -> NormalConvexFunction {
    let mut wl = rng.random_range(0.25..0.4);
    let mut wr = rng.random_range(0.25..0.4);
    let mut plateau = if rng.random::<bool>() { rng.random_range(0.0..0.2) } else { 0.0 };
    let total = wl + wr + plateau;
    if total > 1.0 {
        let s = 0.98 / total;
        wl *= s;
        wr *= s;
        plateau *= s;
    }
    let a = rng.random_range(0.0..=(1.0 - wl - wr - plateau));
    let mut leg = |w: f64| {
        let t: f64 = rng.random_range(0.4..0.6);
        let v = (t + rng.random_range(-0.15..0.15)).clamp(0.05, 0.95);
        (t * w, v)
    };
    let (tl, vl) = leg(wl);
    let (tr, vr) = leg(wr);
    let b = a + wl;
    let c = b + plateau;
    let d = (c + wr).min(1.0);
    let mut points = vec![(0.0, 0.0), (a, 0.0), (a + tl, vl), (b, 1.0), (c, 1.0), (d - tr, vr), (d, 0.0), (1.0, 0.0)];
    points.dedup_by(|p, q| p.0 <= q.0);
    let pw = Piecewise::linear(&points).expect("points are increasing");
    NormalConvexFunction::new(MembershipFunction::Piecewise(pw)).expect("generated element lies in L")
}

/// `k` seeded random triangles.
pub fn triangle_sample(k: usize, seed: u64) -> Vec<NormalConvexFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_triangle(&mut rng)).collect()
}

/// `k` seeded random piecewise-linear elements of L.
pub fn l_sample(k: usize, seed: u64) -> Vec<NormalConvexFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_l_element(&mut rng)).collect()
}

/// A trapezoid whose corners are the sorted draws of four uniforms, widened
/// so the support is never a point.
pub fn random_trapezoid<R: RngExt + ?Sized>(rng: &mut R) -> NormalConvexFunction {
    let mut c: [f64; 4] = [rng.random(), rng.random(), rng.random(), rng.random()];
    c.sort_by(f64::total_cmp);
    trapezoid(c[0], c[1], c[2], c[3]).expect("sorted corners in [0,1]")
}
