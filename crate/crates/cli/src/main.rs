//! `csweights`: check weight hypotheses and exactness on Clemens-Schmid
//! instances, compute monodromy filtrations, and produce test instances.

mod report;

use std::io::{self, Read, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csweights_core::cs::{
    check_instance_hypotheses, Claim, CsInstance, DegreeRange, Hypothesis, Profile, Proposition, VerdictReport,
};
use csweights_core::degenerations::{curve_cs_instance, DualGraph};
use csweights_core::gen::{gen_adversarial, gen_cs_instance, GenProfile};
use csweights_core::monodromy::{
    jordan_type, ker_coker_weight_bounds, monodromy_filtration, monodromy_filtration_recursive,
    monodromy_filtration_recursive_with, verify_centered_axioms, BoundsVerdict, NilpotentOp, SectionChoice,
};
use report::{exit, MonodromyResult, Report, Timing};

#[derive(Parser, Debug)]
#[command(name = "csweights", version, about)]
struct Cli {
    /// Record wall-clock timings in reports. Reports are otherwise byte-for-byte reproducible.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the hypotheses of an instance, then the requested exactness claims.
    Verify(VerifyArgs),
    /// Compute the monodromy filtration of a nilpotent operator.
    Monodromy(MonodromyArgs),
    /// Emit a random instance, clean or with one hypothesis broken.
    Generate(GenerateArgs),
    /// Emit instances built from combinatorial data.
    #[command(subcommand)]
    Fixture(FixtureCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PropArg {
    #[value(name = "P1")]
    P1,
    #[value(name = "P2")]
    P2,
    #[value(name = "P3")]
    P3,
    #[value(name = "P4")]
    P4,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Instance JSON, or `-` for stdin.
    input: String,
    /// Proposition to check. Defaults to all of them when no theorem is requested.
    #[arg(long, value_enum)]
    prop: Option<PropArg>,
    /// Theorem to check.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    thm: Option<u8>,
    /// Restrict to one degree.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct MonodromyArgs {
    /// Nilpotent operator JSON, or `-` for stdin.
    input: String,
    #[arg(long, allow_negative_numbers = true)]
    center: i64,
    /// Also run the recursive construction, canonically and with a random section.
    #[arg(long)]
    cross_check: bool,
    /// Seed for the random section used by `--cross-check`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Profile JSON; explicit flags override its fields.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_dim: Option<usize>,
    /// Degree range `lo:hi`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    range: Option<DegreeRange>,
    /// Largest Jordan block length minus one.
    #[arg(long)]
    spread: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    purity: Option<i64>,
    /// Hypothesis to violate, e.g. `A_bound`.
    #[arg(long = "break")]
    broken: Option<Hypothesis>,
    /// Output file, or `-` for stdout.
    #[arg(long, short, default_value = "-")]
    output: String,
}

#[derive(Subcommand, Debug)]
enum FixtureCommand {
    /// Instance of a totally degenerate curve fiber with the given dual graph.
    Curve {
        /// Graph JSON, or `-` for stdin.
        #[arg(long)]
        graph: String,
        #[arg(long, short, default_value = "-")]
        output: String,
    },
}

fn parse_range(s: &str) -> Result<DegreeRange, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected `lo:hi`")?;
    let lo = lo.trim().parse::<i64>().map_err(|e| format!("bad lower end: {e}"))?;
    let hi = hi.trim().parse::<i64>().map_err(|e| format!("bad upper end: {e}"))?;
    DegreeRange::new(lo, hi).map_err(|e| e.to_string())
}

fn read_input(path: &str) -> io::Result<Vec<u8>> {
    if path == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path)
    }
}

fn write_output(path: &str, contents: &str) -> io::Result<()> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(contents.as_bytes())?;
        out.flush()
    } else {
        std::fs::write(path, contents)
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// A failure before any report exists: message on stderr plus an exit code.
struct Abort(i32, String);

fn emit(report: &Report, format: Format) -> Result<i32, Abort> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serialises") + "\n",
        Format::Text => report.to_text(),
    };
    write_output("-", &body).map_err(|e| Abort(exit::MALFORMED, format!("cannot write report: {e}")))?;
    Ok(report.exit_status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(Abort(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    };
    ExitCode::from(code as u8)
}

fn run(cli: Cli) -> Result<i32, Abort> {
    match cli.command {
        Command::Verify(args) => {
            let format = args.format;
            let report = verify(&args, cli.timing)?;
            emit(&report, format)
        }
        Command::Monodromy(args) => {
            let format = args.format;
            let report = monodromy(&args, cli.timing);
            emit(&report, format)
        }
        Command::Generate(args) => generate(&args),
        Command::Fixture(FixtureCommand::Curve { graph, output }) => fixture_curve(&graph, &output),
    }
}

/// One requested exactness check.
#[derive(Clone, Copy, Debug)]
enum Task {
    Prop(Proposition, i64, Claim),
    InvariantCycles(i64),
}

/// Expands the flags into an ordered task list. Degrees outside the range
/// are a usage error rather than a verdict.
fn plan(args: &VerifyArgs, inst: &CsInstance) -> Result<Vec<Task>, Abort> {
    let usage = |msg: String| Abort(exit::USAGE, msg);
    let range = inst.range();
    let mut tasks = Vec::new();
    let props: Vec<Proposition> = match (args.prop, args.thm) {
        (None, Some(_)) => Vec::new(),
        (None | Some(PropArg::All), _) => Proposition::ALL.to_vec(),
        (Some(PropArg::P1), _) => vec![Proposition::P1],
        (Some(PropArg::P2), _) => vec![Proposition::P2],
        (Some(PropArg::P3), _) => vec![Proposition::P3],
        (Some(PropArg::P4), _) => vec![Proposition::P4],
    };
    for &p in &props {
        let degrees = p.valid_degrees(inst);
        match args.k {
            Some(k) if degrees.contains(&k) => tasks.push(Task::Prop(p, k, p.into())),
            // With several propositions, `--k` picks those that have a node there.
            Some(_) if props.len() > 1 => {}
            Some(k) => return Err(usage(format!("{p} has no node at degree {k} in range {range}"))),
            None => tasks.extend(degrees.map(|k| Task::Prop(p, k, p.into()))),
        }
    }
    if let Some(k) = args.k {
        if props.len() > 1 && tasks.is_empty() {
            return Err(usage(format!("no proposition has a node at degree {k} in range {range}")));
        }
        if args.thm.is_some() && !range.contains(k) {
            return Err(usage(format!("degree {k} is outside range {range}")));
        }
    }
    match args.thm {
        None => {}
        Some(2) => match args.k {
            Some(k) => tasks.push(Task::InvariantCycles(k)),
            None => tasks.extend(range.iter().map(Task::InvariantCycles)),
        },
        Some(t) => {
            let claim = if t == 1 { Claim::T1 } else { Claim::T3 };
            let degrees: Vec<i64> = match args.k {
                Some(k) => vec![k],
                None => {
                    let (even, odd): (Vec<i64>, Vec<i64>) = range.iter().partition(|k| (k - range.lo) % 2 == 0);
                    even.into_iter().chain(odd).collect()
                }
            };
            for k in degrees {
                for (p, d) in [(Proposition::P3, k - 2), (Proposition::P4, k), (Proposition::P1, k), (Proposition::P2, k)] {
                    if p.valid_degrees(inst).contains(&d) {
                        tasks.push(Task::Prop(p, d, claim));
                    }
                }
            }
        }
    }
    Ok(tasks)
}

fn verify(args: &VerifyArgs, timing: bool) -> Result<Report, Abort> {
    let start = Instant::now();
    let bytes = read_input(&args.input).map_err(|e| Abort(exit::MALFORMED, format!("cannot read {}: {e}", args.input)))?;
    let mut report = Report::new("verify", &bytes);
    let parsed = std::str::from_utf8(&bytes)
        .map_err(|e| e.to_string())
        .and_then(|s| CsInstance::from_json(s).map_err(|e| e.to_string()));
    let inst = match parsed {
        Ok(inst) => inst,
        Err(e) => return Ok(report.malformed(format!("invalid instance: {e}"))),
    };
    let parse_ms = ms(start);
    let tasks = plan(args, &inst)?;

    let check = Instant::now();
    let hypotheses = check_instance_hypotheses(&inst);
    let clean = inst.clean().ok();
    report.hypotheses = Some(hypotheses);
    if args.thm == Some(3) && inst.profile() != Profile::Geometric {
        report.error = Some("--thm 3 needs an instance with profile \"geometric\"".into());
    } else if let Some(clean) = clean {
        report.verdicts = tasks
            .iter()
            .map(|&t| match t {
                Task::Prop(p, k, claim) => {
                    let v = clean.proposition(p, k).expect("planned degrees are valid");
                    VerdictReport { claim, ..v }
                }
                Task::InvariantCycles(k) => clean.invariant_cycles(k).expect("planned degrees are valid"),
            })
            .collect();
    }
    if timing {
        report.timing = Some(Timing {
            parse_ms,
            check_ms: ms(check),
            total_ms: ms(start),
        });
    }
    report.exit_status = report.derived_status();
    Ok(report)
}

fn monodromy(args: &MonodromyArgs, timing: bool) -> Report {
    let start = Instant::now();
    let bytes = match read_input(&args.input) {
        Ok(b) => b,
        Err(e) => {
            let mut r = Report::new("monodromy", &[]).malformed(format!("cannot read {}: {e}", args.input));
            r.input_digest = None;
            return r;
        }
    };
    let mut report = Report::new("monodromy", &bytes);
    let n: NilpotentOp = match serde_json::from_slice(&bytes) {
        Ok(n) => n,
        Err(e) => return report.malformed(format!("invalid nilpotent operator: {e}")),
    };
    let parse_ms = ms(start);
    let check = Instant::now();
    let k = args.center;
    let filtration = monodromy_filtration(&n, k);
    let input_is_centered = filtration.filtration == *n.space();
    let weight_bounds_hold = input_is_centered.then(|| matches!(ker_coker_weight_bounds(&n, k), Ok(BoundsVerdict::Holds)));
    let (recursive_agrees, randomized_agrees) = if args.cross_check {
        (
            Some(monodromy_filtration_recursive(&n, k) == filtration),
            Some(monodromy_filtration_recursive_with(&n, k, SectionChoice::Randomized(args.seed)) == filtration),
        )
    } else {
        (None, None)
    };
    report.monodromy = Some(MonodromyResult {
        jordan_type: jordan_type(n.matrix()),
        axioms_hold: verify_centered_axioms(&filtration, &n).holds(),
        filtration,
        input_is_centered,
        weight_bounds_hold,
        recursive_agrees,
        randomized_agrees,
    });
    if timing {
        report.timing = Some(Timing {
            parse_ms,
            check_ms: ms(check),
            total_ms: ms(start),
        });
    }
    report.exit_status = report.derived_status();
    report
}

fn generate(args: &GenerateArgs) -> Result<i32, Abort> {
    let malformed = |msg: String| Abort(exit::MALFORMED, msg);
    let mut profile = match &args.profile {
        Some(path) => {
            let bytes = read_input(path).map_err(|e| malformed(format!("cannot read {path}: {e}")))?;
            serde_json::from_slice::<GenProfile>(&bytes).map_err(|e| malformed(format!("invalid profile: {e}")))?
        }
        None => {
            let seed = args
                .seed
                .ok_or_else(|| Abort(exit::USAGE, "either --seed or --profile is required".into()))?;
            GenProfile::new(seed)
        }
    };
    if let Some(s) = args.seed {
        profile.seed = s;
    }
    if let Some(d) = args.max_dim {
        profile.max_dim_per_node = d;
    }
    if let Some(r) = args.range {
        profile.degree_range = r;
    }
    if let Some(s) = args.spread {
        profile.weight_spread = s;
    }
    if let Some(w) = args.purity {
        profile.purity = w;
    }
    if args.broken.is_some() {
        profile.broken_hypothesis = args.broken;
    }
    let inst = if profile.broken_hypothesis.is_some() {
        gen_adversarial(&profile).map(|a| a.instance)
    } else {
        gen_cs_instance(&profile)
    }
    .map_err(|e| malformed(e.to_string()))?;
    write_output(&args.output, &(inst.to_json_pretty() + "\n")).map_err(|e| malformed(format!("cannot write: {e}")))?;
    Ok(exit::OK)
}

fn fixture_curve(graph: &str, output: &str) -> Result<i32, Abort> {
    let malformed = |msg: String| Abort(exit::MALFORMED, msg);
    let bytes = read_input(graph).map_err(|e| malformed(format!("cannot read {graph}: {e}")))?;
    let g: DualGraph = serde_json::from_slice(&bytes).map_err(|e| malformed(format!("invalid graph: {e}")))?;
    let inst = curve_cs_instance(&g).map_err(|e| malformed(e.to_string()))?;
    write_output(output, &(inst.to_json_pretty() + "\n")).map_err(|e| malformed(format!("cannot write: {e}")))?;
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges_parse_with_negative_ends() {
        assert_eq!(parse_range("-1:2").unwrap(), DegreeRange::new(-1, 2).unwrap());
        assert!(parse_range("3:1").is_err());
        assert!(parse_range("3").is_err());
    }

    #[test]
    fn report_status_follows_content() {
        let inst = CsInstance::zero(DegreeRange::new(0, 2).unwrap());
        let mut r = Report::new("verify", b"{}");
        r.hypotheses = Some(check_instance_hypotheses(&inst));
        r.verdicts = inst.clean().unwrap().all_propositions();
        assert_eq!(r.derived_status(), exit::OK);
        r.verdicts[0].exact = false;
        assert_eq!(r.derived_status(), exit::NOT_EXACT);
        let back: Report = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(Report::new("verify", b"").malformed("x").derived_status(), exit::MALFORMED);
    }
}
