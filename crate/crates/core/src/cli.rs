//! Command-line frontend.
//!
//! Exit codes: 0 success, 1 negative verdict (classification, order or
//! verification), 2 invalid input or usage, 3 unmet operator precondition,
//! 4 I/O failure, 5 parse failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::convolution::{
    classify, convolve, convolve_cuts, convolve_grid, join_convolve, meet_convolve, MIN_GRID,
};
use crate::error::{Error, Result};
use crate::inference::{fuzzify, infer, InferenceOutput, RuleBase, T2FuzzySet};
use crate::membership::{MembershipFunction, NormalConvexFunction, DEFAULT_GRID};
use crate::order::{leq_cuts, leq_envelopes};
use crate::scalar_ops::{grid_point, ScalarOp};
use crate::verify::{
    association_gap, border_witness, left_witness, run_axiom_suite_at, triangle_sample,
    AssociationGap, AxiomReport, DEFAULT_TOLERANCE, VERIFY_GRID, WITNESS_GRID,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_PARSE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "convlattice", version, about = "Convolution t-norms on normal convex membership functions")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvMethod {
    /// Exact for characteristic functions, closed form when it applies, cuts otherwise.
    Auto,
    Grid,
    Cuts,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderMethodArg {
    Envelopes,
    Cuts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    Border,
    Left,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether (star, tri) induces a t-norm or t-conorm on L.
    Classify {
        #[arg(long)]
        star: String,
        #[arg(long)]
        tri: String,
        /// Exit 0 iff the pair is a t-conorm rather than a t-norm.
        #[arg(long)]
        conorm: bool,
    },
    /// Convolve two membership functions.
    Conv {
        #[arg(long)]
        star: String,
        #[arg(long)]
        tri: String,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, value_enum, default_value_t = ConvMethod::Auto)]
        method: ConvMethod,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test f ⊑ g.
    Order {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderMethodArg::Envelopes)]
        method: OrderMethodArg,
    },
    /// Run the axiom suite on seeded random triangles.
    Verify {
        #[arg(long)]
        star: String,
        #[arg(long)]
        tri: String,
        #[arg(long, default_value_t = 8)]
        sample: usize,
        #[arg(long, value_enum)]
        witness: Option<WitnessKind>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = VERIFY_GRID)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Level `a` of the border witness.
        #[arg(long, default_value_t = 0.3)]
        level: f64,
        #[arg(long, default_value_t = 0.9)]
        lambda: f64,
        #[arg(long, default_value_t = 0.3)]
        u: f64,
        #[arg(long, default_value_t = 0.5)]
        v: f64,
        /// Archimedean block of star used by the left witness.
        #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"], default_values_t = [0.0, 1.0])]
        block: Vec<f64>,
    },
    /// Run a rule base on an input set, or on a fuzzified crisp value.
    Infer {
        #[arg(long)]
        rulebase: PathBuf,
        #[arg(long, conflicts_with = "crisp", required_unless_present = "crisp")]
        input: Option<PathBuf>,
        #[arg(long, requires = "spread")]
        crisp: Option<f64>,
        #[arg(long)]
        spread: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit (x, f(x)) samples for plotting.
    Plot {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        n: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Shape(_) | Error::Construction(_) => EXIT_INPUT,
        Error::UnsupportedOperator(_) | Error::Classification(_) | Error::DegenerateOutput(_) => {
            EXIT_PRECONDITION
        }
        Error::Io(_) => EXIT_IO,
        Error::Parse(_) | Error::Json(_) => EXIT_PARSE,
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `stdout` and the one-line diagnostic to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match execute(&config.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.to_string().replace('\n', " "));
            exit_code(&e)
        }
    }
}

fn op(desc: &str) -> Result<ScalarOp> {
    desc.parse()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load_function(path: &Path) -> Result<MembershipFunction> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn load_element(path: &Path) -> Result<NormalConvexFunction> {
    NormalConvexFunction::new(load_function(path)?).map_err(|e| match e {
        Error::Shape(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

#[derive(Serialize)]
struct Provenance {
    star: String,
    tri: String,
    method: String,
    resolution: Option<usize>,
}

#[derive(Serialize)]
struct ConvOutput {
    provenance: Provenance,
    #[serde(flatten)]
    result: MembershipFunction,
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    format_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Serialize)]
struct OrderOutput {
    format_version: u32,
    holds: bool,
    method: crate::order::OrderMethod,
    witness: Option<f64>,
}

#[derive(Serialize)]
struct VerifyOutput {
    format_version: u32,
    star: String,
    tri: String,
    seed: u64,
    sample_size: usize,
    report: AxiomReport,
    witness_gap: Option<AssociationGap>,
}

fn execute(command: &Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Classify { star, tri, conorm } => {
            let report = classify(&op(star)?, &op(tri)?)?;
            emit(&Tagged { format_version: 1, body: &report }, None, stdout)?;
            let yes = if *conorm { report.is_tconorm_on_l } else { report.is_tnorm_on_l };
            Ok(if yes { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Conv { star, tri, f, g, method, n, out } => {
            let (star, tri) = (op(star)?, op(tri)?);
            if *n < MIN_GRID && matches!(method, ConvMethod::Grid | ConvMethod::Cuts | ConvMethod::Auto) {
                return Err(Error::Input(format!("--n must be at least {MIN_GRID}, got {n}")));
            }
            let (result, resolution, used) = match method {
                ConvMethod::Grid => {
                    let h = convolve_grid(&star, &tri, &load_function(f)?, &load_function(g)?, *n)?;
                    (MembershipFunction::Grid(h), Some(*n), "grid")
                }
                ConvMethod::Cuts => {
                    let h = convolve_cuts(&star, &tri, &load_element(f)?, &load_element(g)?, *n)?;
                    (h.base().clone(), Some(*n), "cuts")
                }
                ConvMethod::Fast => {
                    let (f, g) = (load_element(f)?, load_element(g)?);
                    let h = if star.is_minimum() {
                        meet_convolve(&tri, &f, &g)?
                    } else if star.is_maximum() {
                        join_convolve(&tri, &f, &g)?
                    } else {
                        return Err(Error::Classification(format!(
                            "the closed form needs star = minimum or maximum, got {star}"
                        )));
                    };
                    (h.base().clone(), None, "fast")
                }
                ConvMethod::Auto => {
                    let h = convolve(&star, &tri, &load_element(f)?, &load_element(g)?, *n)?;
                    let grid = matches!(h.base(), MembershipFunction::Grid(_));
                    (h.base().clone(), grid.then_some(*n), "auto")
                }
            };
            let doc = ConvOutput {
                provenance: Provenance {
                    star: star.to_string(),
                    tri: tri.to_string(),
                    method: used.into(),
                    resolution,
                },
                result,
            };
            emit(&doc, out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Order { f, g, method } => {
            let (f, g) = (load_element(f)?, load_element(g)?);
            let verdict = match method {
                OrderMethodArg::Envelopes => leq_envelopes(&f, &g),
                OrderMethodArg::Cuts => leq_cuts(&f, &g),
            };
            let doc = OrderOutput {
                format_version: 1,
                holds: verdict.holds,
                method: verdict.method,
                witness: verdict.witness,
            };
            emit(&doc, None, stdout)?;
            Ok(if verdict.holds { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Verify {
            star,
            tri,
            sample,
            witness,
            seed,
            n,
            tolerance,
            level,
            lambda,
            u,
            v,
            block,
        } => {
            let (star_op, tri_op) = (op(star)?, op(tri)?);
            if *sample == 0 {
                return Err(Error::Input("--sample must be at least 1".into()));
            }
            let members: Vec<MembershipFunction> = triangle_sample(*sample, *seed)
                .into_iter()
                .map(|f| f.base().clone())
                .collect();
            let mut report = run_axiom_suite_at(&star_op, &tri_op, &members, *tolerance, *n)?;
            let witness_gap = match witness {
                None => None,
                Some(kind) => {
                    let (triple, x0) = match kind {
                        WitnessKind::Border => (border_witness(*level)?, 0.5),
                        WitnessKind::Left => {
                            let t = left_witness(&star_op, *lambda, *u, *v, block[0], block[1])?;
                            let l2 = star_op.eval(*lambda, *lambda);
                            (t, star_op.eval(l2, *lambda))
                        }
                    };
                    let (f, g, h) = &triple;
                    let gap = association_gap(&star_op, &tri_op, (f, g, h), x0, WITNESS_GRID)?;
                    report.absorb_gap(&gap, ["witness f", "witness g", "witness h"]);
                    Some(gap)
                }
            };
            let ok = report.all_hold();
            let doc = VerifyOutput {
                format_version: 1,
                star: star_op.to_string(),
                tri: tri_op.to_string(),
                seed: *seed,
                sample_size: *sample,
                report,
                witness_gap,
            };
            emit(&doc, None, stdout)?;
            Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Infer { rulebase, input, crisp, spread, out } => {
            let rb: RuleBase = serde_json::from_str(&read(rulebase)?)?;
            let set = match (input, crisp, spread) {
                (Some(path), _, _) => serde_json::from_str::<T2FuzzySet>(&read(path)?)?,
                (None, Some(c), Some(s)) => fuzzify(rb.input(), *c, *s)?,
                _ => return Err(Error::Input("give --input or --crisp with --spread".into())),
            };
            let doc = InferenceOutput::new(infer(&rb, &set)?)?;
            emit(&doc, out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Plot { f, n, csv } => {
            let f = load_function(f)?;
            let points: Vec<(f64, f64)> = match &f {
                MembershipFunction::Grid(g) => {
                    (0..g.n()).map(|i| (grid_point(i, g.n()), g.values()[i])).collect()
                }
                MembershipFunction::Piecewise(_) => {
                    let grid = f.to_grid(*n)?;
                    (0..*n).map(|i| (grid_point(i, *n), grid.values()[i])).collect()
                }
            };
            let mut text = String::from("x,value\n");
            for (x, v) in points {
                text.push_str(&format!("{x},{v}\n"));
            }
            match csv {
                Some(path) => fs::write(path, text)?,
                None => stdout.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}
