use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use vpamin::format::{parse, serialize};
use vpamin::oracle::{bounded_equiv, check_local_max, check_raq, Equivalence};
use vpamin::prepare::{make_live, LiveMode};
use vpamin::sweep::{density_range, run_sweep, SweepSpec};
use vpamin::{
    accepts, compute_tops, generate, minimize, MinimizeOptions, MinimizeReport, RandomSpec,
    StatePartition, Vpa,
};

/// Exit status for a negative verdict (not equivalent, violation, mismatch).
const EXIT_VERDICT: u8 = 3;
const EXIT_LIMIT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "vpamin",
    version,
    about = "State reduction for visibly pushdown automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an automaton by quotienting.
    Minimize(MinimizeArgs),
    /// Draw a random automaton.
    Generate(GenerateArgs),
    /// Test whether an automaton accepts a word.
    Accepts {
        file: PathBuf,
        /// Symbols of the word; none for the empty word.
        word: Vec<String>,
    },
    /// Compare two languages on all words up to a length.
    EquivBounded {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 8)]
        len: usize,
    },
    /// Check a partition against the quotienting constraints.
    CheckRaq {
        file: PathBuf,
        /// Comma-separated states to put in one block; repeatable.
        #[arg(long = "merge", value_name = "STATES")]
        merges: Vec<String>,
        /// Also check that no two blocks can be merged further.
        #[arg(long)]
        local_max: bool,
    },
    /// Mean sizes after trimming and after minimization over random automata.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct MinimizeArgs {
    input: PathBuf,
    /// Output file; stdout if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Append a report row to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Emit transitivity clauses instead of using the equality theory.
    #[arg(long)]
    no_theory: bool,
    /// Refuse inputs with more states (exit status 2).
    #[arg(long, default_value_t = 10_000)]
    max_states: usize,
    /// Compare input and output on words up to this length; exit status 3
    /// on a difference.
    #[arg(long, value_name = "LEN")]
    verify: Option<usize>,
    /// Print the solver trace to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, default_value_t = 10)]
    states: usize,
    #[arg(long, default_value_t = 1)]
    internal: usize,
    #[arg(long, default_value_t = 1)]
    call: usize,
    #[arg(long = "return", default_value_t = 1)]
    ret: usize,
    #[arg(long, default_value_t = 0.5)]
    accept_density: f64,
    #[arg(long, default_value_t = 0.5)]
    stack_density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SpecArgs {
    fn spec(&self, trans_density: f64) -> RandomSpec {
        RandomSpec {
            n_states: self.states,
            n_internal: self.internal,
            n_call: self.call,
            n_return: self.ret,
            accept_density: self.accept_density,
            trans_density,
            stack_density: self.stack_density,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 1.0)]
    trans_density: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0.02)]
    from: f64,
    #[arg(long, default_value_t = 2.0)]
    to: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long)]
    no_theory: bool,
    /// Output CSV; stdout if absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Appends one report row, writing the header first if the file is new or
/// empty.
fn append_report(path: &Path, row: &MinimizeReport) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    w.serialize(row)?;
    w.flush()?;
    Ok(())
}

fn read_vpa(path: &Path) -> Result<Vpa> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(Into::into),
    }
}

fn cmd_minimize(args: &MinimizeArgs) -> Result<u8> {
    let vpa = read_vpa(&args.input)?;
    if vpa.num_states() > args.max_states {
        eprintln!(
            "{} has {} states, more than --max-states {}",
            args.input.display(),
            vpa.num_states(),
            args.max_states
        );
        return Ok(EXIT_LIMIT);
    }
    let mut m = minimize(
        &vpa,
        MinimizeOptions {
            use_theory: !args.no_theory,
            live_mode: LiveMode::ReturnsOnly,
            trace: args.trace,
        },
    )?;
    for line in &m.trace {
        eprintln!("{line}");
    }
    if let Some(len) = args.verify {
        let again = parse(&serialize(&m.vpa)).context("re-reading the output")?;
        if let Equivalence::Counterexample(w) = bounded_equiv(&vpa, &again, len)? {
            eprintln!(
                "verification failed: languages differ on `{}`",
                vpa.alphabet().display_word(&w)
            );
            return Ok(EXIT_VERDICT);
        }
    }
    write_out(args.output.as_deref(), &serialize(&m.vpa))?;
    if let Some(csv) = &args.csv {
        m.report.name = args
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        append_report(csv, &m.report)?;
    }
    eprintln!(
        "{} -> {} states ({} vars, {} clauses)",
        m.report.states_in, m.report.states_out, m.report.vars, m.report.clauses
    );
    Ok(0)
}

fn cmd_check_raq(file: &Path, merges: &[String], local_max: bool) -> Result<u8> {
    let vpa = read_vpa(file)?;
    let live = make_live(&vpa, LiveMode::ReturnsOnly).vpa;
    let tops = compute_tops(&live);
    let mut groups = Vec::new();
    for m in merges {
        let group = m
            .split(',')
            .map(|n| {
                live.lookup_state(n.trim())
                    .with_context(|| format!("unknown state `{}`", n.trim()))
            })
            .collect::<Result<Vec<_>>>()?;
        groups.push(group);
    }
    let part = StatePartition::with_groups(live.num_states(), &groups);
    if let Some(v) = check_raq(&live, &tops, &part)? {
        println!("violation: {}", v.describe(&live));
        return Ok(EXIT_VERDICT);
    }
    if local_max {
        if let Some((p, q)) = check_local_max(&live, &tops, &part)? {
            println!(
                "ok, but not locally maximal: blocks of {} and {} can merge",
                live.state_name(p),
                live.state_name(q)
            );
            return Ok(EXIT_VERDICT);
        }
    }
    println!("ok");
    Ok(0)
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8> {
    if args.step <= 0.0 || args.to < args.from {
        bail!("density range must satisfy from <= to and step > 0");
    }
    let spec = SweepSpec {
        base: args.spec.spec(0.0),
        densities: density_range(args.from, args.to, args.step),
        samples: args.samples,
        options: MinimizeOptions {
            use_theory: !args.no_theory,
            ..MinimizeOptions::default()
        },
    };
    let rows = run_sweep(&spec)?;
    let out: Box<dyn Write> = match &args.csv {
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(io::stdout()),
    };
    let mut w = csv::Writer::from_writer(out);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Minimize(args) => cmd_minimize(&args),
        Command::Generate(args) => {
            let v = generate(&args.spec.spec(args.trans_density))?;
            write_out(args.output.as_deref(), &serialize(&v))?;
            Ok(0)
        }
        Command::Accepts { file, word } => {
            let v = read_vpa(&file)?;
            let w = v.alphabet().parse_word(&word.join(" "))?;
            println!("{}", accepts(&v, &w)?);
            Ok(0)
        }
        Command::EquivBounded { a, b, len } => {
            let (va, vb) = (read_vpa(&a)?, read_vpa(&b)?);
            match bounded_equiv(&va, &vb, len)? {
                Equivalence::Equivalent => {
                    println!("equivalent up to length {len}");
                    Ok(0)
                }
                Equivalence::Counterexample(w) => {
                    println!("counterexample: {}", va.alphabet().display_word(&w));
                    Ok(EXIT_VERDICT)
                }
            }
        }
        Command::CheckRaq {
            file,
            merges,
            local_max,
        } => cmd_check_raq(&file, &merges, local_max),
        Command::Sweep(args) => cmd_sweep(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
