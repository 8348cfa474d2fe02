//! Command-line surface. Every run is reproducible from its argument vector:
//! randomized subcommands take explicit `--seed`, stdout is byte-deterministic,
//! and timing goes to stderr only.
//!
//! Exit codes: 0 success/confirmed, 1 refuted (or a failed certificate),
//! 2 usage error, 3 budget exceeded.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::compress::{
    compress_family_ij, compress_family_uv, compress_family_uvf, layerize, left_compress, UvfSpec,
};
use crate::count::{prob_intersecting, profile};
use crate::family::{format_family, parse_family, ElemSet, Family, GroundSet};
use crate::inject::{verify_injection_ij, verify_injection_uvf, InjectionReport};
use crate::verify::{
    check_corollary_next, check_layer_optimality, check_left_compressed_optimum,
    check_nested_chain, check_question1, check_sandwich, search_question2, ExperimentReport,
};
use crate::{Error, Result};

// ============================================================================
// grammar
// ============================================================================

#[derive(Parser)]
#[command(
    name = "probint",
    about = "Compressions, recount certificates, and profile experiments for set families",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a single compression operator
    Compress {
        #[command(subcommand)]
        op: CompressOp,
    },
    /// Iterate (i,j)-compressions to the left-compressed fixed point
    Leftcompress(FamilyInput),
    /// Drive a family onto consecutive layers with (U,v,f)-compressions
    Layerize(FamilyInput),
    /// Print the intersecting subfamily counts N_0..N_m
    Profile(FamilyInput),
    /// Probability that the p-random subfamily is intersecting
    Prob {
        /// Retention probability, strictly between 0 and 1
        #[arg(long, value_name = "REAL")]
        p: String,
        #[command(flatten)]
        input: FamilyInput,
    },
    /// Recount certificates for single compressions
    Inject {
        #[command(subcommand)]
        op: InjectOp,
    },
    /// Exhaustive and randomized experiments
    Verify {
        #[command(subcommand)]
        op: VerifyOp,
    },
}

#[derive(Subcommand)]
enum CompressOp {
    /// (i,j): replace j by i wherever the image is free
    Ij {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        input: FamilyInput,
    },
    /// (U,V): swap V out for U in members containing V and avoiding U
    Uv {
        /// Elements of U, comma-separated ("-" for none)
        #[arg(long, value_name = "ELEMS")]
        u: String,
        /// Elements of V, comma-separated ("-" for none)
        #[arg(long, value_name = "ELEMS")]
        v: String,
        #[command(flatten)]
        input: FamilyInput,
    },
    /// (U,v,f): fold members missing the pivot v through the involution f
    Uvf {
        /// Spec in the form "U=2,3; v=1; f=2-3"
        #[arg(long, value_name = "SPEC")]
        spec: String,
        #[command(flatten)]
        input: FamilyInput,
    },
}

#[derive(Subcommand)]
enum InjectOp {
    /// Check one compression's recount certificate subfamily by subfamily
    Verify {
        #[command(subcommand)]
        case: InjectCase,
    },
}

#[derive(Subcommand)]
enum InjectCase {
    /// Certificate for the (i,j)-compression
    Ij {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        input: FamilyInput,
    },
    /// Certificate for the (U,v,f)-compression
    Uvf {
        /// Spec in the form "U=2,3; v=1; f=2-3"
        #[arg(long, value_name = "SPEC")]
        spec: String,
        #[command(flatten)]
        input: FamilyInput,
    },
}

#[derive(Subcommand)]
enum VerifyOp {
    /// The up-set layer dominates every family of its order
    Layer {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Some undominated family of the given order is sandwiched
    Sandwich {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        size: u32,
    },
    /// The prescribed family at layer size -2..+2 dominates its order
    Next {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        /// One of -2, -1, +1, +2
        #[arg(long, allow_hyphen_values = true)]
        offset: i32,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Some undominated family within one layer is left-compressed
    Uniform {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        size: u32,
    },
    /// Does one family attain every per-order maximum at once?
    Q1 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        size: u32,
    },
    /// Randomized search for a (U,V)-compression that loses counts
    Q2 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Assert the expected outcome: exit 0 only if no counterexample
        /// turned up (inconclusive); a refutation still exits 1
        #[arg(long)]
        expect_no_counterexample: bool,
    },
    /// Chain of undominated families, one per order above half the cube
    Chain {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Args)]
struct SampleArgs {
    /// Check this many seeded random families instead of sweeping
    #[arg(long, requires = "seed")]
    trials: Option<u64>,
    /// RNG seed for --trials
    #[arg(long, requires = "trials")]
    seed: Option<u64>,
}

impl SampleArgs {
    fn get(&self) -> Option<(u64, u64)> {
        self.trials.zip(self.seed)
    }
}

#[derive(Args)]
struct FamilyInput {
    /// Read the family from this file
    #[arg(long = "in", value_name = "PATH", conflicts_with = "family")]
    path: Option<PathBuf>,
    /// Inline family text; semicolons separate lines, e.g. "n=4; 1 3; 2 3"
    #[arg(long, value_name = "TEXT")]
    family: Option<String>,
}

impl FamilyInput {
    fn load(&self) -> Result<Family> {
        let text = match (&self.path, &self.family) {
            (Some(path), None) => std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidArgument(format!("--in {}: {e}", path.display()))
            })?,
            (None, Some(inline)) => inline.replace(';', "\n"),
            _ => {
                return Err(Error::InvalidArgument(
                    "exactly one of --in or --family is required".into(),
                ))
            }
        };
        parse_family(&text)
    }
}

fn parse_elems(text: &str, ground: GroundSet) -> Result<ElemSet> {
    let trimmed = text.trim();
    if trimmed == "-" {
        return Ok(ElemSet::empty(ground));
    }
    let mut elems = Vec::new();
    for part in trimmed.split(',') {
        let e: u32 = part.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("bad element \"{part}\" in \"{text}\""))
        })?;
        elems.push(e);
    }
    ElemSet::from_elements(ground, &elems)
}

// ============================================================================
// execution
// ============================================================================

/// Parse and run; output goes to the supplied streams so golden tests can run
/// in-process. Returns the process exit code.
pub fn run<I, O, E>(argv: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator,
    I::Item: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BudgetExceeded(_) => 3,
                _ => 2,
            }
        }
    }
}

fn print_injection<O: Write>(out: &mut O, report: &InjectionReport) -> i32 {
    let _ = writeln!(out, "{report}");
    if let Some((label, b)) = &report.counterexample {
        let _ = write!(out, "# witness: {label}\n{}# end witness\n", format_family(b));
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn print_experiment<O: Write, E: Write>(
    out: &mut O,
    err: &mut E,
    report: &ExperimentReport,
) -> i32 {
    let _ = writeln!(out, "{report}");
    let _ = writeln!(err, "# wall_time_ms={}", report.wall_time.as_millis());
    if report.verdict.is_refuted() {
        1
    } else {
        0
    }
}

fn dispatch<O: Write, E: Write>(cli: Cli, out: &mut O, err: &mut E) -> Result<i32> {
    match cli.command {
        Command::Compress { op } => {
            let result = match op {
                CompressOp::Ij { i, j, input } => compress_family_ij(&input.load()?, i, j)?,
                CompressOp::Uv { u, v, input } => {
                    let family = input.load()?;
                    let ground = family.ground();
                    compress_family_uv(&family, parse_elems(&u, ground)?, parse_elems(&v, ground)?)?
                }
                CompressOp::Uvf { spec, input } => {
                    let family = input.load()?;
                    let spec = UvfSpec::parse(&spec, family.ground())?;
                    compress_family_uvf(&family, &spec)
                }
            };
            let _ = write!(out, "{}", format_family(&result));
            Ok(0)
        }
        Command::Leftcompress(input) => {
            let (result, trace) = left_compress(&input.load()?);
            for (i, j) in trace {
                let _ = writeln!(out, "# step i={i} j={j}");
            }
            let _ = write!(out, "{}", format_family(&result));
            Ok(0)
        }
        Command::Layerize(input) => {
            let (result, trace) = layerize(&input.load()?);
            for spec in trace {
                let _ = writeln!(out, "# step {spec}");
            }
            let _ = write!(out, "{}", format_family(&result));
            Ok(0)
        }
        Command::Profile(input) => {
            let _ = writeln!(out, "{}", profile(&input.load()?)?.to_text());
            Ok(0)
        }
        Command::Prob { p, input } => {
            let family = input.load()?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("--p expects a real, got \"{p}\"")))?;
            let _ = writeln!(out, "prob={}", prob_intersecting(&family, p)?);
            Ok(0)
        }
        Command::Inject { op } => {
            let InjectOp::Verify { case } = op;
            let report = match case {
                InjectCase::Ij { i, j, input } => verify_injection_ij(&input.load()?, i, j)?,
                InjectCase::Uvf { spec, input } => {
                    let family = input.load()?;
                    let spec = UvfSpec::parse(&spec, family.ground())?;
                    verify_injection_uvf(&family, &spec)?
                }
            };
            Ok(print_injection(out, &report))
        }
        Command::Verify { op } => {
            let report = match op {
                VerifyOp::Layer { n, r, sample } => check_layer_optimality(n, r, sample.get())?,
                VerifyOp::Sandwich { n, size } => check_sandwich(n, size)?,
                VerifyOp::Next { n, r, offset, sample } => {
                    check_corollary_next(n, r, offset, sample.get())?
                }
                VerifyOp::Uniform { n, r, size } => check_left_compressed_optimum(n, r, size)?,
                VerifyOp::Q1 { n, size } => check_question1(n, size)?,
                VerifyOp::Q2 { n, trials, seed, expect_no_counterexample: _ } => {
                    search_question2(n, trials, seed)?
                }
                VerifyOp::Chain { n } => check_nested_chain(n)?,
            };
            Ok(print_experiment(out, err, &report))
        }
    }
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["probint"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn compress_ij_prints_the_compressed_family() {
        let (code, out, _) =
            run_cli(&["compress", "ij", "--i", "1", "--j", "2", "--family", "n=4; 1 3; 2 3; 2 4"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n=4\n1 3\n2 3\n1 4\n");
    }

    #[test]
    fn compress_uv_and_uvf_round_trip_their_specs() {
        let (code, out, _) = run_cli(&[
            "compress", "uv", "--u", "1,2", "--v", "3", "--family", "n=3; 3; 1 3; 2 3; 1 2 3",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "n=3\n1 2\n1 3\n2 3\n1 2 3\n");

        let (code, out, _) = run_cli(&[
            "compress", "uvf", "--spec", "U=2,3; v=1; f=2-3", "--family", "n=3; 2; 2 3",
        ]);
        assert_eq!(code, 0);
        // both members miss the pivot: {2} folds to {1,3}, {2,3} to {1,2,3}
        assert_eq!(out, "n=3\n1 3\n1 2 3\n");
    }

    #[test]
    fn leftcompress_traces_every_productive_step() {
        let (code, out, _) =
            run_cli(&["leftcompress", "--family", "n=4; 1 3; 2 3; 2 4"]);
        assert_eq!(code, 0);
        assert_eq!(out, "# step i=1 j=2\n# step i=1 j=3\nn=4\n1 2\n1 3\n1 4\n");
    }

    #[test]
    fn layerize_trace_steps_reparse() {
        let (code, out, _) = run_cli(&["layerize", "--family", "n=2; -"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("n=2\n1 2\n"));
        let steps: Vec<&str> = out.lines().filter(|l| l.starts_with("# step ")).collect();
        assert_eq!(steps.len(), 2);
        let ground = GroundSet::new(2).unwrap();
        for step in steps {
            UvfSpec::parse(step.trim_start_matches("# step "), ground).unwrap();
        }
    }

    #[test]
    fn profile_prints_the_count_vector() {
        let (code, out, _) = run_cli(&["profile", "--family", "n=4; 1 3; 2 3; 2 4"]);
        assert_eq!(code, 0);
        assert_eq!(out, "m=3; N=1,3,2,0\n");
    }

    #[test]
    fn prob_evaluates_an_exact_case() {
        // {1},{2} over [2]: only the full pair is non-intersecting
        let (code, out, _) = run_cli(&["prob", "--p", "0.5", "--family", "n=2; 1; 2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "prob=0.75\n");
    }

    #[test]
    fn prob_rejects_out_of_range_p() {
        let (code, _, err) = run_cli(&["prob", "--p", "1.0", "--family", "n=2; 1"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error: "));
        let (code, _, err) = run_cli(&["prob", "--p", "x", "--family", "n=2; 1"]);
        assert_eq!(code, 2);
        assert!(err.contains("--p"));
    }

    #[test]
    fn inject_verify_passes_on_the_worked_example() {
        let (code, out, _) = run_cli(&[
            "inject", "verify", "ij", "--i", "1", "--j", "2", "--family", "n=4; 1 3; 2 3; 2 4",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("intersecting_subfamilies=6\n"));
        assert!(out.contains("injective=pass\n"));
        assert!(out.trim_end().ends_with("profile_dominates=pass"));
    }

    #[test]
    fn verify_layer_confirms_and_exits_zero() {
        let (code, out, err) = run_cli(&["verify", "layer", "--n", "3", "--r", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("verdict=confirmed\n"));
        assert!(err.starts_with("# wall_time_ms="));
    }

    #[test]
    fn verify_trials_require_a_seed() {
        let (code, _, err) = run_cli(&["verify", "layer", "--n", "5", "--r", "2", "--trials", "9"]);
        assert_eq!(code, 2);
        assert!(err.contains("--seed"));
    }

    #[test]
    fn verify_q2_requires_explicit_seed() {
        let (code, _, err) = run_cli(&["verify", "q2", "--n", "4", "--trials", "50"]);
        assert_eq!(code, 2);
        assert!(err.contains("--seed"));
    }

    #[test]
    fn budget_errors_exit_three() {
        let (code, _, err) = run_cli(&["verify", "chain", "--n", "5"]);
        assert_eq!(code, 3);
        assert!(err.starts_with("error: "));
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let (code, _, err) = run_cli(&["compress", "ij", "--i", "x", "--j", "2", "--family", "n=2; 1"]);
        assert_eq!(code, 2);
        assert!(err.contains("--i"));

        let (code, _, err) = run_cli(&["profile"]);
        assert_eq!(code, 2);
        assert!(err.contains("--in") || err.contains("--family"));
    }

    #[test]
    fn in_and_family_are_mutually_exclusive() {
        let (code, _, err) = run_cli(&[
            "profile", "--in", "/tmp/x", "--family", "n=2; 1",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--family") || err.contains("--in"));
    }

    #[test]
    fn identical_argv_gives_identical_bytes() {
        let args = ["verify", "q2", "--n", "4", "--trials", "80", "--seed", "17"];
        let (c1, o1, _) = run_cli(&args);
        let (c2, o2, _) = run_cli(&args);
        assert_eq!(c1, 0);
        assert_eq!(c1, c2);
        assert_eq!(o1, o2);
        assert!(o1.contains("verdict=inconclusive\n"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_cli(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("probint"));
    }

    #[test]
    fn refuted_reports_map_to_exit_one() {
        // no honest desk-scale run refutes, so exercise the mapping directly
        let report = crate::verify::ExperimentReport {
            experiment: "synthetic".into(),
            params: vec![],
            verdict: crate::verify::Verdict::Refuted,
            stats: vec![],
            witnesses: vec![],
            wall_time: std::time::Duration::ZERO,
        };
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(print_experiment(&mut out, &mut err, &report), 1);

        let mut report = verify_injection_ij(
            &parse_family("n=4\n1 3\n2 3\n2 4").unwrap(),
            1,
            2,
        )
        .unwrap();
        report.injective = false;
        let mut out = Vec::new();
        assert_eq!(print_injection(&mut out, &report), 1);
        assert!(String::from_utf8(out).unwrap().contains("injective=FAIL"));
    }
}
