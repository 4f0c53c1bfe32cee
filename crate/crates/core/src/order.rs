//! The convolution order ⊑ on L.
//!
//! `f ⊑ g` is decided two ways: by comparing monotone envelopes
//! (`g^L ≤ f^L` and `f^R ≤ g^R`) and by comparing α-cuts in the interval
//! order. The envelope test is the one used elsewhere in the crate; the cut
//! test exists so the two can be checked against each other.

use serde::{Deserialize, Serialize};

use crate::convolution::{join_convolve, meet_convolve};
use crate::error::{Error, Result};
use crate::membership::{union_breakpoints, Cut, NormalConvexFunction, Piecewise};
use crate::scalar_ops::{grid_point, ScalarOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderMethod {
    Envelopes,
    Cuts,
}

/// Outcome of an order test. `witness` is the point `x` (envelopes) or the
/// level `α` (cuts) where the comparison failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub holds: bool,
    pub method: OrderMethod,
    pub witness: Option<f64>,
}

impl OrderVerdict {
    fn pass(method: OrderMethod) -> Self {
        OrderVerdict {
            holds: true,
            method,
            witness: None,
        }
    }

    fn fail(method: OrderMethod, at: f64) -> Self {
        OrderVerdict {
            holds: false,
            method,
            witness: Some(at),
        }
    }
}

/// `A ≼ B` for closed intervals: `A.lo ≤ B.lo` and `A.hi ≤ B.hi`.
pub fn interval_leq(a: &Cut, b: &Cut) -> Result<bool> {
    if a.empty || b.empty {
        return Err(Error::Input("the interval order is defined on non-empty intervals".into()));
    }
    Ok(a.lo <= b.lo && a.hi <= b.hi)
}

fn tolerance(f: &NormalConvexFunction, g: &NormalConvexFunction) -> f64 {
    f.tolerance().max(g.tolerance())
}

/// First breakpoint (or limit) at which `lower ≤ upper + tol` fails.
fn dominated(lower: &Piecewise, upper: &Piecewise, tol: f64) -> Option<f64> {
    union_breakpoints(&[lower, upper]).into_iter().find(|&x| {
        lower.left_limit(x).0 > upper.left_limit(x).0 + tol
            || lower.right_limit(x).0 > upper.right_limit(x).0 + tol
    })
}

/// `f ⊑ g` via `g^L ≤ f^L` and `f^R ≤ g^R`.
pub fn leq_envelopes(f: &NormalConvexFunction, g: &NormalConvexFunction) -> OrderVerdict {
    let tol = tolerance(f, g);
    let failure = dominated(g.left_env(), f.left_env(), tol)
        .or_else(|| dominated(f.right_env(), g.right_env(), tol));
    match failure {
        Some(x) => OrderVerdict::fail(OrderMethod::Envelopes, x),
        None => OrderVerdict::pass(OrderMethod::Envelopes),
    }
}

fn lo_at(f: &NormalConvexFunction, alpha: f64) -> Option<f64> {
    (alpha <= f.sup()).then(|| f.hull_lo(alpha))
}

fn hi_at(f: &NormalConvexFunction, alpha: f64) -> Option<f64> {
    (alpha <= f.sup()).then(|| f.hull_hi(alpha))
}

fn push_levels(levels: &mut Vec<f64>, env: &Piecewise) {
    for &x in env.breakpoints() {
        levels.push(env.eval(x));
        levels.push(env.left_limit(x).0);
        levels.push(env.right_limit(x).0);
    }
}

/// `f ⊑ g` via `f^α ≼ g^α` on sampled levels.
///
/// The levels are a uniform grid together with every value the four
/// envelopes take at their breakpoints (shifted by the tolerance as well),
/// and the midpoints between consecutive levels. Comparisons allow the same
/// value tolerance as [`leq_envelopes`], applied on the level axis.
pub fn leq_cuts(f: &NormalConvexFunction, g: &NormalConvexFunction) -> OrderVerdict {
    let tol = tolerance(f, g);
    let mut levels: Vec<f64> = Vec::new();
    let k = f.levels().max(g.levels());
    levels.extend((1..k).map(|i| grid_point(i, k)));
    for env in [f.left_env(), g.left_env(), f.right_env(), g.right_env()] {
        push_levels(&mut levels, env);
    }
    let shifted: Vec<f64> = levels.iter().map(|a| a + tol).collect();
    levels.extend(shifted);
    levels.retain(|&a| a > 0.0 && a <= 1.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mids: Vec<f64> = levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    levels.extend(mids);
    levels.sort_by(f64::total_cmp);

    for &alpha in &levels {
        // Lower endpoints: g^L ≥ α somewhere forces f^L ≥ α - tol no later.
        if let Some(lg) = lo_at(g, alpha) {
            match lo_at(f, alpha - tol) {
                Some(lf) if lf <= lg => {}
                _ => return OrderVerdict::fail(OrderMethod::Cuts, alpha),
            }
        }
        // Upper endpoints: f^R ≥ α somewhere forces g^R ≥ α - tol no earlier.
        if let Some(rf) = hi_at(f, alpha) {
            match hi_at(g, alpha - tol) {
                Some(rg) if rf <= rg => {}
                _ => return OrderVerdict::fail(OrderMethod::Cuts, alpha),
            }
        }
    }
    OrderVerdict::pass(OrderMethod::Cuts)
}

/// Lattice meet in (L, ⊑): the ∧∧-convolution.
pub fn meet(f: &NormalConvexFunction, g: &NormalConvexFunction) -> Result<NormalConvexFunction> {
    meet_convolve(&ScalarOp::Minimum, f, g)
}

/// Lattice join in (L, ⊑): the ∨∧-convolution.
pub fn join(f: &NormalConvexFunction, g: &NormalConvexFunction) -> Result<NormalConvexFunction> {
    join_convolve(&ScalarOp::Minimum, f, g)
}

/// Whether two elements are mutually ⊑ within tolerance.
pub fn equivalent(f: &NormalConvexFunction, g: &NormalConvexFunction) -> bool {
    leq_envelopes(f, g).holds && leq_envelopes(g, f).holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership::{characteristic, triangle};

    #[test]
    fn interval_order() {
        let a = Cut::new(0.1, 0.4);
        let b = Cut::new(0.2, 0.6);
        assert!(interval_leq(&a, &b).unwrap());
        assert!(!interval_leq(&Cut::new(0.1, 0.7), &b).unwrap());
        assert!(interval_leq(&a, &a).unwrap());
        assert!(interval_leq(&Cut::empty(), &a).is_err());
    }

    #[test]
    fn envelope_and_cut_verdicts() {
        let f = characteristic(0.2, 0.3).unwrap();
        let g = characteristic(0.5, 0.9).unwrap();
        let one = characteristic(1.0, 1.0).unwrap();
        let zero = characteristic(0.0, 0.0).unwrap();
        let t = triangle(0.1, 0.4, 0.7).unwrap();
        let cases = [
            (&f, &g, true),
            (&g, &f, false),
            (&t, &one, true),
            (&one, &t, false),
            (&zero, &t, true),
            (&t, &t, true),
        ];
        for (a, b, expect) in cases {
            let e = leq_envelopes(a, b);
            let c = leq_cuts(a, b);
            assert_eq!(e.holds, expect);
            assert_eq!(c.holds, expect);
            assert_eq!(e.witness.is_some(), !e.holds);
            assert_eq!(c.witness.is_some(), !c.holds);
        }
    }

    #[test]
    fn shifted_triangles() {
        let a = triangle(0.0, 0.3, 0.6).unwrap();
        let b = triangle(0.2, 0.5, 0.8).unwrap();
        assert!(leq_cuts(&a, &b).holds);
        assert!(leq_envelopes(&a, &b).holds);
        assert!(!leq_envelopes(&b, &a).holds);
    }

    #[test]
    fn meets_and_joins() {
        let x = characteristic(0.5, 0.5).unwrap();
        let y = characteristic(0.4, 0.4).unwrap();
        assert_eq!(meet(&x, &y).unwrap().as_interval(), Some((0.4, 0.4)));
        assert_eq!(join(&x, &y).unwrap().as_interval(), Some((0.5, 0.5)));

        let t = triangle(0.1, 0.4, 0.7).unwrap();
        let one = characteristic(1.0, 1.0).unwrap();
        assert_eq!(join(&t, &one).unwrap().as_interval(), Some((1.0, 1.0)));

        let a = characteristic(0.2, 0.7).unwrap();
        let b = characteristic(0.4, 0.9).unwrap();
        assert_eq!(meet(&a, &b).unwrap().as_interval(), Some((0.2, 0.7)));
        assert_eq!(join(&a, &b).unwrap().as_interval(), Some((0.4, 0.9)));
    }

    #[test]
    fn meet_is_a_lower_bound() {
        let a = triangle(0.1, 0.3, 0.9).unwrap();
        let b = triangle(0.0, 0.6, 0.8).unwrap();
        let m = meet(&a, &b).unwrap();
        assert!(leq_envelopes(&m, &a).holds && leq_envelopes(&m, &b).holds);
        let j = join(&a, &b).unwrap();
        assert!(leq_envelopes(&a, &j).holds && leq_envelopes(&b, &j).holds);
        assert!(equivalent(&meet(&a, &j).unwrap(), &a));
        assert!(equivalent(&join(&a, &m).unwrap(), &a));
    }
}
