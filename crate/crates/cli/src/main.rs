use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrecover::divergences::AlphaParameter;
use qrecover::io::{self, Document};
use qrecover::measures::{self, ChannelTriple, MinMax, TripartiteState};
use qrecover::objects::{random_density_with, seeded_rng, validate_density};
use qrecover::structured::{self, random_markov_spec, random_sufficiency_spec};
use qrecover::verify::{self, Suite, SuiteConfig, MARKOV_SHAPES, SUFFICIENCY_SHAPES};
use qrecover::Error;

/// Renyi conditional mutual information, relative-entropy differences and Petz recovery.
#[derive(Parser)]
#[command(name = "qrecover", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on a state or a (rho, sigma, channel) triple.
    Compute(ComputeArgs),
    /// Write random or structured instances to JSON files.
    Generate(GenerateArgs),
    /// Run the randomized property suites.
    Verify(VerifyArgs),
    /// Evaluate a measure over an alpha grid and write CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Measure {
    Cmi,
    RenyiCmi,
    SandCmi,
    Imax,
    Imin,
    Red,
    Delta,
    DeltaTilde,
    DeltaMin,
    DeltaMax,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    None,
    Petz,
    Sandwiched,
}

impl Measure {
    fn family(self) -> Family {
        match self {
            Measure::RenyiCmi | Measure::Delta => Family::Petz,
            Measure::SandCmi | Measure::DeltaTilde => Family::Sandwiched,
            _ => Family::None,
        }
    }

    fn needs_tripartite(self) -> bool {
        matches!(
            self,
            Measure::Cmi | Measure::RenyiCmi | Measure::SandCmi | Measure::Imax | Measure::Imin
        )
    }
}

#[derive(Args)]
struct InputArgs {
    /// Tripartite state file (triple measures use rho_ABC, rho_AC ⊗ I_B, Tr_A).
    #[arg(long, conflicts_with_all = ["rho", "sigma", "channel"])]
    state: Option<PathBuf>,
    #[arg(long, requires_all = ["sigma", "channel"])]
    rho: Option<PathBuf>,
    #[arg(long, requires_all = ["rho", "channel"])]
    sigma: Option<PathBuf>,
    #[arg(long, requires_all = ["rho", "sigma"])]
    channel: Option<PathBuf>,
    /// Override the factor dimensions of the state file, e.g. 2,2,2.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long, value_enum)]
    measure: Measure,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    alpha: Option<f64>,
    /// Accept alpha outside the range where the measure is certified.
    #[arg(long)]
    allow_uncertified: bool,
    /// Report in nats instead of bits.
    #[arg(long)]
    nats: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    RandomState,
    Markov,
    Sufficiency,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Block spec file; random blocks are drawn from the seed when absent.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Factor dimensions (random-state: any list; markov: d_A,d_B).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rank of random states (default: full rank).
    #[arg(long)]
    rank: Option<usize>,
    /// Output file, or output directory for sufficiency triples.
    #[arg(long)]
    out: PathBuf,
    /// Also write the block spec that was used.
    #[arg(long)]
    emit_spec: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Trace,
    Characterization,
    Limits,
    Inequalities,
    Classical,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
    dims: Vec<usize>,
    /// Input and output dimension of random channels.
    #[arg(long, value_delimiter = ',', default_value = "4,3")]
    channel_dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also check a user-supplied tripartite state.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    measure: Measure,
    #[command(flatten)]
    input: InputArgs,
    /// start:stop:step
    #[arg(long)]
    alpha_grid: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    allow_uncertified: bool,
    #[arg(long)]
    nats: bool,
}

enum Failure {
    Checks,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

enum Loaded {
    State(TripartiteState),
    Triple(ChannelTriple),
}

fn load(input: &InputArgs) -> CliResult<Loaded> {
    if let Some(path) = &input.state {
        let mut rho = io::read_state(path)?;
        if let Some(dims) = &input.dims {
            rho = validate_density(rho.matrix(), dims, io::INPUT_TOL)?;
        }
        return Ok(Loaded::State(TripartiteState::new(rho)?));
    }
    match (&input.rho, &input.sigma, &input.channel) {
        (Some(r), Some(s), Some(c)) => Ok(Loaded::Triple(ChannelTriple::new(
            io::read_state(r)?,
            io::read_positive(s)?,
            io::read_channel(c)?,
        )?)),
        _ => Err(input_err("give --state FILE or all of --rho, --sigma, --channel")),
    }
}

fn check_alpha(measure: Measure, alpha: f64, allow: bool) -> CliResult<AlphaParameter> {
    let a = AlphaParameter::new(alpha)?;
    let certified = match measure.family() {
        Family::Petz => a.in_petz_range(),
        Family::Sandwiched => a.in_sandwiched_range(),
        Family::None => true,
    };
    if !certified && !allow {
        return Err(input_err(format!(
            "alpha = {alpha} is outside the certified range of this measure (use --allow-uncertified)"
        )));
    }
    Ok(a)
}

fn evaluate(measure: Measure, loaded: &Loaded, alpha: Option<AlphaParameter>) -> CliResult<f64> {
    let need_alpha = || alpha.ok_or_else(|| input_err("this measure needs --alpha"));
    if measure.family() == Family::None && alpha.is_some() {
        return Err(input_err("this measure takes no --alpha"));
    }
    let value = match loaded {
        Loaded::State(s) => match measure {
            Measure::Cmi => measures::von_neumann_cmi(s)?,
            Measure::RenyiCmi => measures::renyi_cmi(s, need_alpha()?)?,
            Measure::SandCmi => measures::sandwiched_cmi(s, need_alpha()?)?,
            Measure::Imax => measures::minmax_cmi(s, MinMax::Max)?,
            Measure::Imin => measures::minmax_cmi(s, MinMax::Min)?,
            _ => evaluate(measure, &Loaded::Triple(ChannelTriple::from_tripartite(s)?), alpha)?,
        },
        Loaded::Triple(t) => match measure {
            Measure::Red => measures::rel_ent_diff(t)?,
            Measure::Delta => measures::delta_alpha(t, need_alpha()?)?,
            Measure::DeltaTilde => measures::delta_tilde_alpha(t, need_alpha()?)?,
            Measure::DeltaMin => measures::minmax_delta(t, MinMax::Min)?,
            Measure::DeltaMax => measures::minmax_delta(t, MinMax::Max)?,
            _ => return Err(input_err("this measure needs a tripartite --state")),
        },
    };
    Ok(value)
}

fn format_value(bits: f64, nats: bool) -> String {
    let v = if nats { bits * std::f64::consts::LN_2 } else { bits };
    let s = format!("{v:.12}");
    // no "-0.000000000000"
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn compute(args: &ComputeArgs) -> CliResult<()> {
    let loaded = load(&args.input)?;
    if args.measure.needs_tripartite() && matches!(loaded, Loaded::Triple(_)) {
        return Err(input_err("this measure needs a tripartite --state"));
    }
    let alpha = args
        .alpha
        .map(|a| check_alpha(args.measure, a, args.allow_uncertified))
        .transpose()?;
    let v = evaluate(args.measure, &loaded, alpha)?;
    println!("{}", format_value(v, args.nats));
    Ok(())
}

fn write_doc(doc: &Document, path: &Path) -> CliResult<()> {
    Ok(doc.write(path)?)
}

fn generate(args: &GenerateArgs) -> CliResult<()> {
    let mut rng = seeded_rng(args.seed);
    match args.kind {
        Kind::RandomState => {
            let dims = args.dims.clone().unwrap_or_else(|| vec![2, 2, 2]);
            let d: usize = dims.iter().product();
            let rho = random_density_with(&dims, args.rank.unwrap_or(d), &mut rng)?;
            write_doc(&Document::from_state(&rho), &args.out)
        }
        Kind::Markov => {
            let spec = match &args.spec {
                Some(p) => Document::read(p)?.into_markov_spec()?,
                None => {
                    let dims = args.dims.clone().unwrap_or_else(|| vec![2, 2]);
                    if dims.len() != 2 || dims.contains(&0) {
                        return Err(input_err("markov --dims takes d_A,d_B"));
                    }
                    random_markov_spec(dims[0], dims[1], &MARKOV_SHAPES, &mut rng)?
                }
            };
            if let Some(p) = &args.emit_spec {
                write_doc(&Document::from_markov_spec(&spec), p)?;
            }
            let s = structured::build_markov_chain(&spec)?;
            write_doc(&Document::from_state(s.state()), &args.out)
        }
        Kind::Sufficiency => {
            let spec = match &args.spec {
                Some(p) => Document::read(p)?.into_sufficiency_spec()?,
                None => random_sufficiency_spec(&SUFFICIENCY_SHAPES, &mut rng)?,
            };
            if let Some(p) = &args.emit_spec {
                write_doc(&Document::from_sufficiency_spec(&spec), p)?;
            }
            let t = structured::build_sufficiency_triple(&spec)?;
            fs::create_dir_all(&args.out).map_err(|e| input_err(format!("{}: {e}", args.out.display())))?;
            write_doc(&Document::from_state(t.rho()), &args.out.join("rho.json"))?;
            write_doc(&Document::from_positive(t.sigma()), &args.out.join("sigma.json"))?;
            write_doc(&Document::from_channel(t.channel()), &args.out.join("channel.json"))
        }
    }
}

fn verify_cmd(args: &VerifyArgs) -> CliResult<()> {
    if args.channel_dims.len() != 2 {
        return Err(input_err("--channel-dims takes d_in,d_out"));
    }
    let cfg = SuiteConfig {
        trials: args.trials,
        dims: args.dims.clone(),
        channel_dims: (args.channel_dims[0], args.channel_dims[1]),
        seed: args.seed,
        tol: args.tol,
        ..SuiteConfig::default()
    };
    cfg.validate()?;
    let state = match &args.state {
        Some(p) => Some(TripartiteState::new(io::read_state(p)?)?),
        None => None,
    };
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::Trace => vec![Suite::Trace],
        SuiteArg::Characterization => vec![Suite::Characterization],
        SuiteArg::Limits => vec![Suite::Limits],
        SuiteArg::Inequalities => vec![Suite::Inequalities],
        SuiteArg::Classical => vec![Suite::Classical],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut reports = verify::run_suites(&suites, &cfg)?;
    if let Some(s) = &state {
        reports.push(verify::state_suite(s, &cfg));
    }
    let mut out = String::new();
    for r in &reports {
        let _ = writeln!(out, "{}", r.to_text());
    }
    let all_pass = reports.iter().all(|r| r.all_pass);
    let _ = writeln!(out, "overall: {}", if all_pass { "PASS" } else { "FAIL" });
    print!("{out}");
    if let Some(p) = &args.json {
        let doc = verify::reports_to_json(&cfg, &reports);
        fs::write(p, doc).map_err(|e| input_err(format!("{}: {e}", p.display())))?;
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

/// Grid points `start + k·step` up to `stop` inclusive.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| input_err(format!("--alpha-grid {spec}: {e}")))?;
    let [start, stop, step] = parts[..] else {
        return Err(input_err(format!("--alpha-grid {spec}: expected start:stop:step")));
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(input_err(format!("--alpha-grid {spec}: empty grid")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| start + k as f64 * step).collect())
}

fn format_alpha(a: f64) -> String {
    let s = format!("{a:.10}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

fn sweep(args: &SweepArgs) -> CliResult<()> {
    if args.measure.family() == Family::None {
        return Err(input_err("sweep needs an alpha-dependent measure"));
    }
    let grid = parse_grid(&args.alpha_grid)?;
    let loaded = load(&args.input)?;
    if args.measure.needs_tripartite() && matches!(loaded, Loaded::Triple(_)) {
        return Err(input_err("this measure needs a tripartite --state"));
    }
    let unit = if args.nats { "nats" } else { "bits" };
    let mut csv = format!("alpha,value_{unit}\n");
    for a in grid {
        let (label, v) = if (a - 1.0).abs() < 1e-12 {
            let vn = match args.measure {
                Measure::RenyiCmi | Measure::SandCmi => Measure::Cmi,
                _ => Measure::Red,
            };
            ("1.0".to_string(), evaluate(vn, &loaded, None)?)
        } else {
            let p = check_alpha(args.measure, a, args.allow_uncertified)?;
            (format_alpha(a), evaluate(args.measure, &loaded, Some(p))?)
        };
        let _ = writeln!(csv, "{label},{}", format_value(v, args.nats));
    }
    fs::write(&args.out, csv).map_err(|e| input_err(format!("{}: {e}", args.out.display())))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
