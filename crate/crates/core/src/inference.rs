//! Single-input single-output rule bases whose membership grades are elements
//! of L, evaluated with the compositional rule of inference
//! `B'(y) = ⋁ₓ A'(x) ∗△ A(x) ∗△ B(y)`, the join taken in (L, ⊑).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{classify, convolve};
use crate::error::{Error, Result};
use crate::membership::{characteristic, triangle, NormalConvexFunction};
use crate::order::{join, leq_envelopes};
use crate::scalar_ops::ScalarOp;

pub const DEFAULT_UNIVERSE_POINTS: usize = 101;
/// Resolution handed to the cut-based evaluator when the closed form does not apply.
pub const DEFAULT_INFERENCE_GRID: usize = 257;
/// Half-width of the triangular grades produced by [`fuzzify`].
pub const FUZZIFY_HALF_WIDTH: f64 = 0.1;

/// `points` equally spaced values from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Universe {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Input(format!("universe [{lo}, {hi}] is empty or unbounded")));
        }
        if points < 2 {
            return Err(Error::Input(format!("a universe needs at least 2 points, got {points}")));
        }
        Ok(Universe { lo, hi, points })
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.point(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    fn validate(&self) -> Result<()> {
        Universe::new(self.lo, self.hi, self.points).map(|_| ())
    }
}

/// A type-2 fuzzy set on a finite universe: one grade in L per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetDoc", into = "SetDoc")]
pub struct T2FuzzySet {
    universe: Universe,
    grades: Vec<NormalConvexFunction>,
}

#[derive(Serialize, Deserialize)]
struct SetDoc {
    #[serde(default = "one")]
    format_version: u32,
    universe: Universe,
    grades: Vec<NormalConvexFunction>,
}

fn one() -> u32 {
    1
}

fn check_version(v: u32) -> Result<()> {
    if v == 1 {
        Ok(())
    } else {
        Err(Error::Input(format!("unsupported format_version {v}")))
    }
}

impl TryFrom<SetDoc> for T2FuzzySet {
    type Error = Error;

    fn try_from(doc: SetDoc) -> Result<Self> {
        check_version(doc.format_version)?;
        T2FuzzySet::new(doc.universe, doc.grades)
    }
}

impl From<T2FuzzySet> for SetDoc {
    fn from(s: T2FuzzySet) -> Self {
        SetDoc {
            format_version: 1,
            universe: s.universe,
            grades: s.grades,
        }
    }
}

impl T2FuzzySet {
    pub fn new(universe: Universe, grades: Vec<NormalConvexFunction>) -> Result<Self> {
        universe.validate()?;
        if grades.len() != universe.points {
            return Err(Error::Input(format!(
                "universe has {} points but {} grades were given",
                universe.points,
                grades.len()
            )));
        }
        Ok(T2FuzzySet { universe, grades })
    }

    /// Embeds a type-1 set: the grade at each point is the singleton at its membership.
    pub fn from_type1(universe: Universe, memberships: &[f64]) -> Result<Self> {
        let grades = memberships
            .iter()
            .map(|&m| characteristic(m, m))
            .collect::<Result<Vec<_>>>()?;
        T2FuzzySet::new(universe, grades)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn grades(&self) -> &[NormalConvexFunction] {
        &self.grades
    }

    /// The type-1 memberships when every grade is a singleton.
    pub fn as_type1(&self) -> Option<Vec<f64>> {
        self.grades
            .iter()
            .map(|g| g.as_interval().filter(|(a, b)| a == b).map(|(a, _)| a))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub antecedent: T2FuzzySet,
    pub consequent: T2FuzzySet,
}

/// Rules over fixed input and output universes, with a convolution `∗△`
/// that is a t-norm on (L, ⊑). Immutable once built.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RuleBaseDoc", into = "RuleBaseDoc")]
pub struct RuleBase {
    input: Universe,
    output: Universe,
    rules: Vec<Rule>,
    star: ScalarOp,
    tri: ScalarOp,
    resolution: usize,
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    antecedent: Vec<NormalConvexFunction>,
    consequent: Vec<NormalConvexFunction>,
}

#[derive(Serialize, Deserialize)]
struct RuleBaseDoc {
    #[serde(default = "one")]
    format_version: u32,
    star: ScalarOp,
    tri: ScalarOp,
    input_universe: Universe,
    output_universe: Universe,
    #[serde(default = "default_resolution")]
    resolution: usize,
    rules: Vec<RuleDoc>,
}

fn default_resolution() -> usize {
    DEFAULT_INFERENCE_GRID
}

impl TryFrom<RuleBaseDoc> for RuleBase {
    type Error = Error;

    fn try_from(doc: RuleBaseDoc) -> Result<Self> {
        check_version(doc.format_version)?;
        let rules = doc
            .rules
            .into_iter()
            .map(|r| {
                Ok(Rule {
                    antecedent: T2FuzzySet::new(doc.input_universe, r.antecedent)?,
                    consequent: T2FuzzySet::new(doc.output_universe, r.consequent)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RuleBase::new(doc.input_universe, doc.output_universe, rules, doc.star, doc.tri)?
            .with_resolution(doc.resolution)
    }
}

impl From<RuleBase> for RuleBaseDoc {
    fn from(rb: RuleBase) -> Self {
        RuleBaseDoc {
            format_version: 1,
            star: rb.star,
            tri: rb.tri,
            input_universe: rb.input,
            output_universe: rb.output,
            resolution: rb.resolution,
            rules: rb
                .rules
                .into_iter()
                .map(|r| RuleDoc {
                    antecedent: r.antecedent.grades,
                    consequent: r.consequent.grades,
                })
                .collect(),
        }
    }
}

impl RuleBase {
    /// Fails with a classification error unless `∗△` is a t-norm on (L, ⊑).
    pub fn new(
        input: Universe,
        output: Universe,
        rules: Vec<Rule>,
        star: ScalarOp,
        tri: ScalarOp,
    ) -> Result<Self> {
        let report = classify(&star, &tri)?;
        if !report.is_tnorm_on_l {
            return Err(Error::Classification(format!(
                "({star}, {tri}) is not a t-norm on L: {}",
                report.reason
            )));
        }
        for (i, r) in rules.iter().enumerate() {
            if r.antecedent.universe != input {
                return Err(Error::Input(format!("rule {i}: antecedent universe does not match")));
            }
            if r.consequent.universe != output {
                return Err(Error::Input(format!("rule {i}: consequent universe does not match")));
            }
        }
        Ok(RuleBase {
            input,
            output,
            rules,
            star,
            tri,
            resolution: DEFAULT_INFERENCE_GRID,
        })
    }

    pub fn with_resolution(mut self, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Input(format!("resolution must be at least 3, got {n}")));
        }
        self.resolution = n;
        Ok(self)
    }

    pub fn input(&self) -> &Universe {
        &self.input
    }

    pub fn output(&self) -> &Universe {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn star(&self) -> &ScalarOp {
        &self.star
    }

    pub fn tri(&self) -> &ScalarOp {
        &self.tri
    }

    fn conv(&self, f: &NormalConvexFunction, g: &NormalConvexFunction) -> Result<NormalConvexFunction> {
        convolve(&self.star, &self.tri, f, g, self.resolution)
    }
}

/// Keeps one representative of each ⊑-maximal element. By monotonicity of
/// `∗△` and of the join, the others cannot change the result.
fn maximal(items: Vec<NormalConvexFunction>) -> Vec<NormalConvexFunction> {
    let mut kept: Vec<NormalConvexFunction> = Vec::new();
    for f in items {
        if kept.iter().any(|k| leq_envelopes(&f, k).holds) {
            continue;
        }
        kept.retain(|k| !leq_envelopes(k, &f).holds);
        kept.push(f);
    }
    kept
}

fn join_all(items: impl IntoIterator<Item = NormalConvexFunction>) -> Result<Option<NormalConvexFunction>> {
    let mut acc: Option<NormalConvexFunction> = None;
    for f in items {
        acc = Some(match acc {
            None => f,
            Some(a) => join(&a, &f)?,
        });
    }
    Ok(acc)
}

/// `B'(y) = ⋁ over rules and x of A'(x) ∗△ A(x) ∗△ B(y)`.
pub fn infer(rb: &RuleBase, input: &T2FuzzySet) -> Result<T2FuzzySet> {
    if input.universe != rb.input {
        return Err(Error::Input(format!(
            "input universe {:?} does not match the rule base's {:?}",
            input.universe, rb.input
        )));
    }
    if rb.rules.is_empty() {
        return Err(Error::Input("the rule base has no rules".into()));
    }
    let firing: Vec<Vec<NormalConvexFunction>> = rb
        .rules
        .par_iter()
        .map(|rule| {
            let strengths = input
                .grades
                .iter()
                .zip(&rule.antecedent.grades)
                .map(|(a, b)| rb.conv(a, b))
                .collect::<Result<Vec<_>>>()?;
            Ok(maximal(strengths))
        })
        .collect::<Result<_>>()?;

    let grades = (0..rb.output.points)
        .into_par_iter()
        .map(|j| {
            let mut parts = Vec::new();
            for (rule, fire) in rb.rules.iter().zip(&firing) {
                for w in fire {
                    parts.push(rb.conv(w, &rule.consequent.grades[j])?);
                }
            }
            join_all(maximal(parts))?.ok_or_else(|| Error::Input("no rule fired".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    T2FuzzySet::new(rb.output, grades)
}

/// Grade at `x` is a triangle of half-width 0.1 whose apex sits at the
/// primary membership `exp(-((x - crisp) / spread)²)`.
pub fn fuzzify(universe: &Universe, crisp: f64, spread: f64) -> Result<T2FuzzySet> {
    if spread.is_nan() || spread <= 0.0 {
        return Err(Error::Input(format!("spread must be positive, got {spread}")));
    }
    if !universe.contains(crisp) {
        return Err(Error::Input(format!(
            "crisp value {crisp} is outside [{}, {}]",
            universe.lo, universe.hi
        )));
    }
    let grades = universe
        .iter()
        .map(|x| {
            let p = (-((x - crisp) / spread).powi(2)).exp().clamp(0.0, 1.0);
            triangle(
                (p - FUZZIFY_HALF_WIDTH).max(0.0),
                p,
                (p + FUZZIFY_HALF_WIDTH).min(1.0),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    T2FuzzySet::new(*universe, grades)
}

/// Centroid of a grade on [0,1]. A grade with no area (a spike) reduces to
/// the mean of the breakpoints where it attains its supremum.
pub fn grade_centroid(f: &NormalConvexFunction) -> f64 {
    let p = f.piecewise();
    let xs = p.breakpoints();
    let mut area = 0.0;
    let mut moment = 0.0;
    for (w, s) in xs.windows(2).zip(p.segments()) {
        let (x0, x1) = (w[0], w[1]);
        let h = x1 - x0;
        area += h * (s.start + s.end) / 2.0;
        moment += h * (s.start * (2.0 * x0 + x1) + s.end * (x0 + 2.0 * x1)) / 6.0;
    }
    if area > 1e-12 {
        return moment / area;
    }
    let top = p.values().iter().copied().fold(0.0, f64::max);
    let at: Vec<f64> = xs
        .iter()
        .zip(p.values())
        .filter(|(_, &v)| v == top)
        .map(|(&x, _)| x)
        .collect();
    at.iter().sum::<f64>() / at.len() as f64
}

/// Centroid of the output universe weighted by the grade centroids.
pub fn defuzzify(set: &T2FuzzySet) -> Result<f64> {
    let weights: Vec<f64> = set.grades.iter().map(grade_centroid).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateOutput("every grade reduces to weight 0".into()));
    }
    Ok(set.universe.iter().zip(&weights).map(|(y, w)| y * w).sum::<f64>() / total)
}

/// Inference result together with its defuzzified value, as written by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InferenceOutput {
    pub format_version: u32,
    pub output: T2FuzzySet,
    pub defuzzified: f64,
}

impl InferenceOutput {
    pub fn new(output: T2FuzzySet) -> Result<Self> {
        let defuzzified = defuzzify(&output)?;
        Ok(InferenceOutput {
            format_version: 1,
            output,
            defuzzified,
        })
    }
}

/// Builds a rule from type-1 memberships sampled on the two universes.
pub fn type1_rule(
    input: &Universe,
    output: &Universe,
    antecedent: impl Fn(f64) -> f64,
    consequent: impl Fn(f64) -> f64,
) -> Result<Rule> {
    let a: Vec<f64> = input.iter().map(&antecedent).collect();
    let b: Vec<f64> = output.iter().map(&consequent).collect();
    Ok(Rule {
        antecedent: T2FuzzySet::from_type1(*input, &a)?,
        consequent: T2FuzzySet::from_type1(*output, &b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Universe {
        Universe::new(0.0, 1.0, 11).unwrap()
    }

    fn tri_mf(a: f64, p: f64, b: f64) -> impl Fn(f64) -> f64 {
        move |x| {
            if x <= a || x >= b {
                if x == p { 1.0 } else { 0.0 }
            } else if x <= p {
                (x - a) / (p - a)
            } else {
                (b - x) / (b - p)
            }
        }
    }

    #[test]
    fn constructor_rejects_non_t_norm() {
        let u = unit();
        let err = RuleBase::new(u, u, vec![], ScalarOp::Product, ScalarOp::Drastic).unwrap_err();
        assert!(matches!(err, Error::Classification(_)));
    }

    #[test]
    fn universe_mismatch() {
        let u = unit();
        let v = Universe::new(0.0, 2.0, 11).unwrap();
        let rule = type1_rule(&u, &u, tri_mf(0.0, 0.5, 1.0), tri_mf(0.0, 0.5, 1.0)).unwrap();
        assert!(RuleBase::new(v, u, vec![rule.clone()], ScalarOp::Minimum, ScalarOp::Minimum).is_err());
        let rb = RuleBase::new(u, u, vec![rule], ScalarOp::Minimum, ScalarOp::Minimum).unwrap();
        let input = fuzzify(&v, 1.0, 0.2).unwrap();
        assert!(infer(&rb, &input).is_err());
    }

    #[test]
    fn type1_embedding_matches_mamdani() {
        let u = unit();
        let a = tri_mf(0.0, 0.3, 0.7);
        let b = tri_mf(0.2, 0.5, 0.9);
        let rule = type1_rule(&u, &u, &a, &b).unwrap();
        let rb = RuleBase::new(u, u, vec![rule], ScalarOp::Minimum, ScalarOp::Minimum).unwrap();
        let input: Vec<f64> = u.iter().map(|x| (-((x - 0.4) / 0.2f64).powi(2)).exp()).collect();
        let out = infer(&rb, &T2FuzzySet::from_type1(u, &input).unwrap()).unwrap();
        let fire = u.iter().zip(&input).map(|(x, m)| m.min(a(x))).fold(0.0, f64::max);
        let expect: Vec<f64> = u.iter().map(|y| fire.min(b(y))).collect();
        let got = out.as_type1().unwrap();
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() <= 1e-12, "{got:?} vs {expect:?}");
        }
    }

    #[test]
    fn unit_input_dominates_consequent() {
        let u = unit();
        let rule = type1_rule(&u, &u, tri_mf(0.0, 0.5, 1.0), tri_mf(0.1, 0.4, 0.8)).unwrap();
        let rb = RuleBase::new(u, u, vec![rule.clone()], ScalarOp::Minimum, ScalarOp::Product).unwrap();
        let out = infer(&rb, &rule.antecedent).unwrap();
        for (got, b) in out.grades().iter().zip(rule.consequent.grades()) {
            assert!(leq_envelopes(b, got).holds);
        }
    }

    #[test]
    fn fuzzify_shapes() {
        let u = Universe::new(0.0, 10.0, 101).unwrap();
        let s = fuzzify(&u, 5.0, 1.0).unwrap();
        assert_eq!(s.grades()[50].as_interval(), None);
        assert_eq!(s.grades()[50].eval(1.0), 1.0);
        for w in s.grades()[50..].windows(2) {
            assert!(leq_envelopes(&w[1], &w[0]).holds);
        }
        for w in s.grades()[..=50].windows(2) {
            assert!(leq_envelopes(&w[0], &w[1]).holds);
        }
        assert!(fuzzify(&u, 5.0, 0.0).is_err());
        assert!(fuzzify(&u, 11.0, 1.0).is_err());
    }

    #[test]
    fn defuzzify_cases() {
        let u = unit();
        let symmetric: Vec<f64> = u.iter().map(tri_mf(0.2, 0.5, 0.8)).collect();
        let s = T2FuzzySet::from_type1(u, &symmetric).unwrap();
        assert!((defuzzify(&s).unwrap() - 0.5).abs() < 1e-12);

        let spike: Vec<f64> = u.iter().map(|y| if (y - 0.3).abs() < 1e-9 { 0.8 } else { 0.0 }).collect();
        let s = T2FuzzySet::from_type1(u, &spike).unwrap();
        assert!((defuzzify(&s).unwrap() - 0.3).abs() < 1e-12);

        let s = T2FuzzySet::from_type1(u, &[0.0; 11]).unwrap();
        assert!(matches!(defuzzify(&s), Err(Error::DegenerateOutput(_))));
    }

    #[test]
    fn rulebase_round_trips_through_json() {
        let u = unit();
        let rule = type1_rule(&u, &u, tri_mf(0.0, 0.5, 1.0), tri_mf(0.1, 0.4, 0.8)).unwrap();
        let rb = RuleBase::new(u, u, vec![rule], ScalarOp::Minimum, ScalarOp::Lukasiewicz).unwrap();
        let text = serde_json::to_string(&rb).unwrap();
        assert!(text.contains("\"format_version\":1"));
        let back: RuleBase = serde_json::from_str(&text).unwrap();
        assert_eq!(back.rules(), rb.rules());
        assert_eq!(back.tri(), rb.tri());
    }
}
