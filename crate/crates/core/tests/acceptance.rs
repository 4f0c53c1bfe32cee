use std::time::Instant;

use convlattice::convolution::{
    classify, convolve_characteristic, convolve_cuts, convolve_grid, meet_convolve,
};
use convlattice::inference::{defuzzify, infer, type1_rule, RuleBase, T2FuzzySet, Universe};
use convlattice::membership::{characteristic, MembershipFunction, NormalConvexFunction};
use convlattice::order::{join, leq_cuts, leq_envelopes, meet};
use convlattice::scalar_ops::{dual, grid_point, ScalarOp};
use convlattice::verify::{
    association_gap, border_witness, left_witness, random_l_element, run_axiom_suite,
    triangle_sample, DEFAULT_TOLERANCE, WITNESS_GRID,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn nodes(f: &NormalConvexFunction, n: usize) -> Vec<f64> {
    (0..n).map(|i| f.eval(grid_point(i, n))).collect()
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn pairs(count: usize, seed: u64) -> Vec<(NormalConvexFunction, NormalConvexFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (random_l_element(&mut rng), random_l_element(&mut rng)))
        .collect()
}

fn fast_path() -> Outcome {
    let start = Instant::now();
    let n = 257;
    let mut worst: f64 = 0.0;
    for tri in [ScalarOp::Minimum, ScalarOp::Product, ScalarOp::Lukasiewicz] {
        for (f, g) in pairs(50, 101) {
            let fast = meet_convolve(&tri, &f, &g).unwrap();
            let grid = convolve_grid(&ScalarOp::Minimum, &tri, f.base(), g.base(), n).unwrap();
            worst = worst.max(sup_dist(&nodes(&fast, n), grid.values()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 0.02 && secs < 30.0,
        format!("max sup-norm {worst:.4} over 150 pairs, {secs:.1} s"),
    )
}

fn cut_based() -> Outcome {
    let n = 257;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (star, tri) in [
        (ScalarOp::Product, ScalarOp::Product),
        (ScalarOp::Lukasiewicz, ScalarOp::Minimum),
        (ScalarOp::Minimum, ScalarOp::NilpotentMinimum),
    ] {
        let mut local: f64 = 0.0;
        let mut off = 0;
        for (f, g) in pairs(20, 202) {
            let cuts = nodes(&convolve_cuts(&star, &tri, &f, &g, n).unwrap(), n);
            let grid = convolve_grid(&star, &tri, f.base(), g.base(), n).unwrap();
            local = local.max(sup_dist(&cuts, grid.values()));
            off += cuts.iter().zip(grid.values()).filter(|(a, b)| (*a - *b).abs() > 0.02).count();
        }
        parts.push(format!("({star}, {tri}) {local:.4} ({off} of {} nodes over)", 20 * n));
        worst = worst.max(local);
    }
    outcome(worst <= 0.02, format!("max sup-norm {}", parts.join(", ")))
}

fn positive_direction() -> Outcome {
    let sample: Vec<MembershipFunction> =
        triangle_sample(8, 42).iter().map(|f| f.base().clone()).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (star, tri) in [
        (ScalarOp::Minimum, ScalarOp::Lukasiewicz),
        (ScalarOp::Product, ScalarOp::NilpotentMinimum),
    ] {
        let r = run_axiom_suite(&star, &tri, &sample, DEFAULT_TOLERANCE).unwrap();
        pass &= r.all_hold() && r.max_assoc_gap <= 0.02;
        parts.push(format!(
            "({star}, {tri}) all axioms {} gap {:.4}",
            if r.all_hold() { "hold" } else { "do not hold" },
            r.max_assoc_gap
        ));
    }
    outcome(pass, parts.join("; "))
}

fn border_counterexample() -> Outcome {
    let (f, g, h) = border_witness(0.3).unwrap();
    let gap =
        association_gap(&ScalarOp::Minimum, &ScalarOp::Drastic, (&f, &g, &h), 0.5, WITNESS_GRID)
            .unwrap();
    outcome(
        gap.gap >= 0.28,
        format!(
            "((f*g)*h)(0.5) = {:.4}, (f*(g*h))(0.5) = {:.4}, gap {:.4}",
            gap.left_first, gap.right_first, gap.gap
        ),
    )
}

fn left_counterexample() -> Outcome {
    let (f, g, h) = left_witness(&ScalarOp::Product, 0.9, 0.3, 0.5, 0.0, 1.0).unwrap();
    let gap = association_gap(
        &ScalarOp::Product,
        &ScalarOp::os_drastic(),
        (&f, &g, &h),
        0.729,
        WITNESS_GRID,
    )
    .unwrap();
    outcome(
        gap.gap >= 0.28,
        format!(
            "at x0 = {:.3}: {:.4} vs {:.4}, gap {:.4}",
            gap.x, gap.left_first, gap.right_first, gap.gap
        ),
    )
}

/// Random pairs, pairs ordered by construction, equal pairs and shifted copies.
fn order_pairs() -> Vec<(NormalConvexFunction, NormalConvexFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut out = Vec::new();
    for k in 0..200 {
        let f = random_l_element(&mut rng);
        let g = random_l_element(&mut rng);
        let pair = match k % 5 {
            0 | 1 => (f, g),
            2 => (meet(&f, &g).unwrap(), f),
            3 => (f.clone(), join(&f, &g).unwrap()),
            _ => {
                let a: f64 = rng.random_range(0.0..0.6);
                let b = a + rng.random_range(0.0..0.4);
                let c = characteristic(a, b).unwrap();
                if rng.random::<bool>() { (c, f) } else { (f, c) }
            }
        };
        out.push(pair);
    }
    out
}

fn order_equivalence() -> Outcome {
    let cases = order_pairs();
    let mut disagreements = 0;
    let mut holds = 0;
    for (f, g) in &cases {
        let e = leq_envelopes(f, g).holds;
        let c = leq_cuts(f, g).holds;
        disagreements += usize::from(e != c);
        holds += usize::from(e);
    }
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements on {} pairs ({holds} ordered)", cases.len()),
    )
}

fn duality() -> Outcome {
    let n = 257;
    let star = ScalarOp::Product;
    let tri = ScalarOp::Product;
    let co = dual(&star);
    let mut worst: f64 = 0.0;
    for (f, g) in pairs(50, 707) {
        let lhs = convolve_grid(&star, &tri, f.base(), g.base(), n).unwrap();
        let lhs: Vec<f64> = lhs.values().iter().rev().copied().collect();
        let rhs = convolve_grid(&co, &tri, &f.base().negate(), &g.base().negate(), n).unwrap();
        worst = worst.max(sup_dist(&lhs, rhs.values()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(708);
    let ops = [
        ScalarOp::Minimum,
        ScalarOp::Product,
        ScalarOp::Lukasiewicz,
        ScalarOp::NilpotentMinimum,
        ScalarOp::Drastic,
        ScalarOp::os_drastic(),
    ];
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (x, y): (f64, f64) = (rng.random(), rng.random());
        for op in &ops {
            let back = dual(&dual(op));
            mismatches += usize::from(back != *op || back.eval(x, y) != op.eval(x, y));
        }
    }
    outcome(
        worst <= 0.02 && mismatches == 0,
        format!("negation sup-norm {worst:.4}; dual(dual(op)) mismatches {mismatches}"),
    )
}

fn characteristic_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let stars = [ScalarOp::Minimum, ScalarOp::Product, ScalarOp::Lukasiewicz];
    let tri = ScalarOp::Product;
    let mut failures = 0;
    for _ in 0..100 {
        let (x, y): (f64, f64) = (rng.random(), rng.random());
        for star in &stars {
            let h = convolve_characteristic(
                star,
                &tri,
                &characteristic(x, x).unwrap(),
                &characteristic(y, y).unwrap(),
            )
            .unwrap();
            let s = star.eval(x, y);
            failures += usize::from(h.as_interval() != Some((s, s)));
        }
    }
    let whole = characteristic(0.0, 1.0).unwrap();
    for _ in 0..20 {
        let a: f64 = rng.random();
        let b = a + (1.0 - a) * rng.random::<f64>();
        for star in &stars {
            let h = convolve_characteristic(star, &tri, &whole, &characteristic(a, b).unwrap()).unwrap();
            failures += usize::from(h.as_interval() != Some((0.0, b)));
        }
    }
    outcome(failures == 0, format!("{failures} inexact results out of 360"))
}

fn classification() -> Outcome {
    let cases = [
        (ScalarOp::Minimum, ScalarOp::Lukasiewicz, Some(true), None),
        (ScalarOp::Product, ScalarOp::Drastic, Some(false), None),
        (ScalarOp::Minimum, ScalarOp::Drastic, Some(false), None),
        (ScalarOp::Product, ScalarOp::NilpotentMinimum, Some(true), None),
        (ScalarOp::Maximum, ScalarOp::Product, None, Some(true)),
    ];
    let mut wrong = Vec::new();
    for (star, tri, tnorm, tconorm) in cases {
        let r = classify(&star, &tri).unwrap();
        let ok = tnorm.is_none_or(|t| r.is_tnorm_on_l == t)
            && tconorm.is_none_or(|t| r.is_tconorm_on_l == t)
            && r.is_tr_norm_on_l == r.is_tnorm_on_l;
        if !ok {
            wrong.push(format!("({star}, {tri})"));
        }
    }
    outcome(wrong.is_empty(), format!("5 pairs, wrong: [{}]", wrong.join(", ")))
}

fn tri_mf(a: f64, p: f64, b: f64) -> impl Fn(f64) -> f64 + Copy {
    move |x| {
        if x == p {
            1.0
        } else if x <= a || x >= b {
            0.0
        } else if x < p {
            (x - a) / (p - a)
        } else {
            (b - x) / (b - p)
        }
    }
}

fn inference_consistency() -> Outcome {
    let u = Universe::new(0.0, 1.0, 101).unwrap();
    let shapes = [
        (tri_mf(-0.01, 0.0, 0.5), tri_mf(0.5, 1.0, 1.01)),
        (tri_mf(0.0, 0.5, 1.0), tri_mf(0.25, 0.5, 0.75)),
        (tri_mf(0.5, 1.0, 1.01), tri_mf(-0.01, 0.0, 0.5)),
    ];
    let rules = shapes
        .iter()
        .map(|&(a, b)| type1_rule(&u, &u, a, b).unwrap())
        .collect();
    let rb = RuleBase::new(u, u, rules, ScalarOp::Minimum, ScalarOp::Minimum).unwrap();
    let ys: Vec<f64> = u.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let crisp: f64 = rng.random();
        let input: Vec<f64> = u.iter().map(|x| (-((x - crisp) / 0.1).powi(2)).exp()).collect();
        let set = T2FuzzySet::from_type1(u, &input).unwrap();
        let got = defuzzify(&infer(&rb, &set).unwrap()).unwrap();

        // Scalar Mamdani with min inference and max aggregation.
        let out: Vec<f64> = ys
            .iter()
            .map(|&y| {
                shapes
                    .iter()
                    .map(|(a, b)| {
                        let fire = u.iter().zip(&input).map(|(x, m)| m.min(a(x))).fold(0.0, f64::max);
                        fire.min(b(y))
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let expect = ys.iter().zip(&out).map(|(y, m)| y * m).sum::<f64>() / out.iter().sum::<f64>();
        worst = worst.max((got - expect).abs());
    }
    outcome(worst <= 0.01, format!("max |centroid difference| {worst:.2e} on 10 inputs (bound 0.01)"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("fast-path equivalence", fast_path),
        ("cut-based equivalence", cut_based),
        ("sufficient conditions hold", positive_direction),
        ("border-continuity counterexample", border_counterexample),
        ("left-continuity counterexample", left_counterexample),
        ("order characterization equivalence", order_equivalence),
        ("duality", duality),
        ("characteristic-function identities", characteristic_identities),
        ("classification truth table", classification),
        ("inference consistency", inference_consistency),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {:<36} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
