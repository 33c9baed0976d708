use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::SeedableRng;

use rcalab::analysis::{
    avg_lambda_bruteforce, avg_lambda_sample, is_injective, is_surjective, lambda_finite_with, max_lambda_finite,
    Certificate, DecisionResult, Direction, LambdaMethod, Verdict, DEFAULT_CAP,
};
use rcalab::format::{parse_rule_file, write_rule_file};
use rcalab::mult::{
    avg_exponent_closed, check_digit_lemmas, format_rational, make_mult_ca, partition_sizes_bruteforce, rational_to_f64,
    witness_pair, AvgBreakdown, MultParams, LEMMA_CAP,
};
use rcalab::reduction::{build_fullshift_f, build_immortality_ca, build_sofic_f, speed_dichotomy_experiment, ReductionBundle, Target};
use rcalab::tiles::{ca_from_tileset, check_determinism, complete, is_complete, random_two_way, TileSet};
use rcalab::{CellularAutomaton, Configuration, Error, SpaceTimeDiagram};

#[derive(Parser)]
#[command(name = "rcalab", version, about = "Reversible cellular automata: decisions, Lyapunov exponents, tiles and reductions")]
struct Cli {
    /// Worker threads for the exhaustive enumerations.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide injectivity and surjectivity of a rule file.
    Check(CheckArgs),
    /// Finite-time Lyapunov exponents, one CSV row per horizon.
    Lyap(LyapArgs),
    /// Multiplication automata.
    #[command(subcommand)]
    Mult(MultCommand),
    /// Wang tile sets.
    #[command(subcommand)]
    Tiles(TilesCommand),
    /// Reduction constructions.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// ASCII space-time diagram.
    Diagram(DiagramArgs),
}

#[derive(Args)]
struct CheckArgs {
    rule: PathBuf,
    /// Emit `property,verdict,certificate` CSV instead of text.
    #[arg(long)]
    csv: bool,
    /// Longest orphan word searched for as a certificate.
    #[arg(long, default_value_t = 12)]
    orphan_cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Left,
    Right,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Left => Direction::Left,
            Dir::Right => Direction::Right,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Closed,
    Sample,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["max", "point", "avg"])))]
struct LyapArgs {
    /// Rule file; not needed for `--avg` with `-p` and `-q`.
    rule: Option<PathBuf>,
    /// Largest horizon.
    #[arg(short = 'n', long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Dir::Left)]
    dir: Dir,
    /// Maximum over all configurations.
    #[arg(long)]
    max: bool,
    /// Value at one configuration, given with `--config`.
    #[arg(long)]
    point: bool,
    /// Average under the uniform measure.
    #[arg(long)]
    avg: bool,
    /// Configuration as `LEFT|CENTER|RIGHT[@START]`.
    #[arg(long)]
    config: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Brute)]
    method: Method,
    /// Multiplication parameters: the automaton multiplies by p in base pq.
    #[arg(short = 'p', requires = "q")]
    p: Option<u64>,
    #[arg(short = 'q', requires = "p")]
    q: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
}

#[derive(Subcommand)]
enum MultCommand {
    /// Write the rule file of multiplication by P in base N.
    Gen { p: u64, n: u64 },
    /// Exhaustively check the digit lemmas on words of length K.
    Lemmas {
        p: u64,
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = LEMMA_CAP)]
        cap: u64,
    },
    /// The pair q^n - 1, q^n whose orbits differ at -i for every i <= n.
    Witness {
        p: u64,
        q: u64,
        n: usize,
        /// Print the cells compared at each step as CSV.
        #[arg(long)]
        trace: bool,
    },
    /// Exact average exponent and its partition data.
    Avg {
        p: u64,
        q: u64,
        n: usize,
        #[arg(long, value_enum, default_value_t = AvgMethod::Closed)]
        method: AvgMethod,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AvgMethod {
    Brute,
    Closed,
}

#[derive(Subcommand)]
enum TilesCommand {
    /// Report determinism and completeness with conflicting tiles.
    Check { file: PathBuf },
    /// Write the canonical completion.
    Complete { file: PathBuf },
    /// Write the rule file of the induced radius-1/2 automaton.
    Toca {
        file: PathBuf,
        /// Complete the set first.
        #[arg(long)]
        complete: bool,
    },
    /// Write a random 2-way deterministic tile set.
    Random {
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 3)]
        tiles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Sofic,
    Fullshift,
}

#[derive(Args)]
struct InnerArgs {
    /// Rule file of the inner radius-1/2 reversible automaton.
    inner: PathBuf,
    /// Subset B: `all`, `none`, or comma-separated symbol names.
    #[arg(long = "b")]
    b: String,
    #[arg(long, value_enum, default_value_t = TargetArg::Sofic)]
    target: TargetArg,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Build the reduction and report the checks behind its reversibility.
    Build(InnerArgs),
    /// Front of a single fast particle: CSV trace, slope and class.
    Speed {
        #[command(flatten)]
        inner: InnerArgs,
        #[arg(short = 'n', long, default_value_t = 60)]
        n: usize,
    },
    /// Write the immortality automaton of a 2-way deterministic tile set.
    Immortality { file: PathBuf },
}

#[derive(Args)]
struct DiagramArgs {
    rule: PathBuf,
    #[arg(long)]
    config: String,
    #[arg(short = 't', long, default_value_t = 16)]
    steps: usize,
    #[arg(long, default_value_t = -16, allow_hyphen_values = true)]
    lo: i64,
    #[arg(long, default_value_t = 16, allow_hyphen_values = true)]
    hi: i64,
}

/// How a command ends: exit code 1 means a checked property is false,
/// 2 that a cap was hit, 3 bad input.
enum Failure {
    Input(String),
    Undecided(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Undecided(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

const FALSE: u8 = 1;
const UNDECIDED: u8 = 2;

fn read_text(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_rule(path: &Path) -> Result<CellularAutomaton, Failure> {
    parse_rule_file(&read_text(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_tiles(path: &Path) -> Result<TileSet, Failure> {
    TileSet::parse(&read_text(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn decimal(r: &BigRational) -> String {
    format!("{:.6}", rational_to_f64(r))
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Undecided(_) => "undecided",
    }
}

fn certificate_text(ca: &CellularAutomaton, c: &Certificate) -> String {
    let a = ca.alphabet_ref();
    match c {
        Certificate::Collision { x, y } => format!("collision x={} y={}", x.format(a), y.format(a)),
        Certificate::Orphan(w) => format!("orphan {}", a.format_word(w)),
        Certificate::Note(s) => s.clone(),
    }
}

fn cmd_check(args: &CheckArgs) -> Outcome {
    let ca = read_rule(&args.rule)?;
    let inj = is_injective(&ca, None)?;
    let sur = is_surjective(&ca, args.orphan_cap)?;
    let reversible = match (&inj.verdict, &sur.verdict) {
        (Verdict::Yes, _) => Verdict::Yes,
        (Verdict::No, _) => Verdict::No,
        (Verdict::Undecided(why), _) => Verdict::Undecided(why.clone()),
    };
    let rows: [(&str, &Verdict, Option<&Certificate>); 3] = [
        ("injective", &inj.verdict, inj.certificate.as_ref()),
        ("surjective", &sur.verdict, sur.certificate.as_ref()),
        ("reversible", &reversible, None),
    ];
    let mut out = String::new();
    if args.csv {
        out.push_str("property,verdict,certificate\n");
    }
    for (name, v, cert) in rows {
        let mut detail = cert.map(|c| certificate_text(&ca, c)).unwrap_or_default();
        if let Verdict::Undecided(why) = v {
            detail = why.clone();
        }
        if args.csv {
            writeln!(out, "{name},{},{}", verdict_word(v), detail.replace(',', ";")).unwrap();
        } else if detail.is_empty() {
            writeln!(out, "{name}: {}", verdict_word(v)).unwrap();
        } else {
            writeln!(out, "{name}: {} ({detail})", verdict_word(v)).unwrap();
        }
    }
    print!("{out}");
    Ok(summary_code(&[&inj, &sur]))
}

fn summary_code(results: &[&DecisionResult]) -> u8 {
    if results.iter().any(|r| r.verdict.is_no()) {
        FALSE
    } else if results.iter().any(|r| matches!(r.verdict, Verdict::Undecided(_))) {
        UNDECIDED
    } else {
        0
    }
}

/// One row of the exponent table: the exact value (when known), its
/// decimal form and the standard error for sampled averages.
enum Value {
    Exact(BigRational),
    Estimate(f64, f64),
    Undecided,
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn cmd_lyap(args: &LyapArgs, jobs: usize) -> Outcome {
    let dir: Direction = args.dir.into();
    let mult = args.p.zip(args.q);
    if let Some((p, q)) = mult {
        MultParams::new(p, q)?;
    }
    let ca = match (&args.rule, mult) {
        (Some(path), _) => Some(read_rule(path)?),
        (None, Some((p, q))) => Some(make_mult_ca(p, p * q)?),
        (None, None) => return Err(Failure::Input("a rule file or -p/-q is required".into())),
    };
    if args.method == Method::Closed {
        if !args.avg || mult.is_none() {
            return Err(Failure::Input("--method closed needs --avg with -p and -q".into()));
        }
        if matches!(args.dir, Dir::Right) {
            return Err(Failure::Input("the closed form is for the left exponent".into()));
        }
    }
    let x = match (&args.config, args.point) {
        (Some(spec), true) => Some(Configuration::parse(ca.as_ref().unwrap().alphabet_ref(), spec)?),
        (None, true) => return Err(Failure::Input("--point needs --config".into())),
        _ => None,
    };
    let ca = ca.unwrap();
    let mut rng = StdRng::seed_from_u64(args.seed);
    let mut out = String::from("n,lambda,lambda_decimal,lambda_over_n,stderr\n");
    let mut code = 0;
    for n in 1..=args.n {
        let value = if args.max {
            capped(max_lambda_finite(&ca, n, dir, args.cap).map(|(v, _)| Value::Exact(int(v))))?
        } else if args.point {
            let method = if args.method == Method::Sample { LambdaMethod::Propagate } else { LambdaMethod::Enumerate };
            capped(lambda_finite_with(&ca, x.as_ref().unwrap(), n, dir, method, args.cap).map(|v| Value::Exact(int(v))))?
        } else {
            match (args.method, mult) {
                (Method::Closed, Some((p, q))) => Value::Exact(avg_exponent_closed(p, q, n)?.i_n),
                (Method::Brute, Some((p, q))) if dir == Direction::Left => {
                    capped(partition_sizes_bruteforce(p, q, n, args.cap, jobs).map(|b| Value::Exact(b.i_n)))?
                }
                (Method::Brute, _) => capped(avg_lambda_bruteforce(&ca, n, dir, args.cap).map(Value::Exact))?,
                (Method::Sample, _) => {
                    let (mean, se) = avg_lambda_sample(&ca, n, dir, args.samples, &mut rng)?;
                    Value::Estimate(mean, se)
                }
                (Method::Closed, None) => unreachable!(),
            }
        };
        match value {
            Value::Exact(r) => {
                let over = &r / int(n as u64);
                writeln!(out, "{n},{},{},{},", r, decimal(&r), decimal(&over)).unwrap();
            }
            Value::Estimate(mean, se) => {
                writeln!(out, "{n},{mean:.6},{mean:.6},{:.6},{se:.6}", mean / n as f64).unwrap();
            }
            Value::Undecided => {
                writeln!(out, "{n},undecided,,,").unwrap();
                code = UNDECIDED;
            }
        }
    }
    print!("{out}");
    Ok(code)
}

fn capped(r: rcalab::Result<Value>) -> Result<Value, Failure> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::CapExceeded { .. }) => Ok(Value::Undecided),
        Err(e) => Err(e.into()),
    }
}

fn breakdown_report(b: &AvgBreakdown) -> String {
    let mut out = String::new();
    writeln!(out, "p: {}\nq: {}\nn: {}\nkappa: {}", b.p, b.q, b.n, b.kappa).unwrap();
    writeln!(out, "I_n: {}", format_rational(&b.i_n)).unwrap();
    writeln!(out, "I_n/n: {:.6}", b.normalized()).unwrap();
    writeln!(out, "log_pq(p): {:.6}", b.log_pq_p()).unwrap();
    out.push_str("\ni,P_n,p_n,d_n\n");
    for i in 0..=b.n {
        writeln!(out, "{i},{},{},{}", b.big_p[i], b.small_p[i], b.d[i]).unwrap();
    }
    out
}

fn cmd_mult(cmd: &MultCommand, jobs: usize) -> Outcome {
    match cmd {
        MultCommand::Gen { p, n } => {
            print!("{}", write_rule_file(&make_mult_ca(*p, *n)?)?);
            Ok(0)
        }
        MultCommand::Lemmas { p, q, k, t, cap } => {
            let rep = check_digit_lemmas(*p, *q, *k, *t, *cap)?;
            println!("words checked: {}", rep.words_checked);
            println!("odometer verified: {}", rep.odometer_verified);
            println!("counterexamples: {}", rep.counterexamples.len());
            for c in &rep.counterexamples {
                println!("  {c}");
            }
            Ok(if rep.counterexamples.is_empty() { 0 } else { FALSE })
        }
        MultCommand::Witness { p, q, n, trace } => {
            let w = witness_pair(*p, *q, *n)?;
            let ca = make_mult_ca(*p, p * q)?;
            let a = ca.alphabet_ref();
            println!("x: {}", w.x.format(a));
            println!("y: {}", w.y.format(a));
            if *trace {
                println!("i,x,y");
                for (i, (u, v)) in w.trace.iter().enumerate() {
                    println!("{i},{},{}", a.name(*u), a.name(*v));
                }
            }
            let ok = w.diverges();
            println!("diverges at steps 0..{n}: {}", if ok { "yes" } else { "no" });
            Ok(if ok { 0 } else { FALSE })
        }
        MultCommand::Avg { p, q, n, method, cap } => {
            let b = match method {
                AvgMethod::Closed => avg_exponent_closed(*p, *q, *n)?,
                AvgMethod::Brute => partition_sizes_bruteforce(*p, *q, *n, *cap, jobs)?,
            };
            print!("{}", breakdown_report(&b));
            Ok(0)
        }
    }
}

fn cmd_tiles(cmd: &TilesCommand) -> Outcome {
    match cmd {
        TilesCommand::Check { file } => {
            let ts = read_tiles(file)?;
            let rep = check_determinism(&ts);
            let yn = |b: bool| if b { "yes" } else { "no" };
            println!("tiles: {}", ts.len());
            println!("colors: {}", ts.colors().len());
            match &rep.ne_conflict {
                Some((a, b)) => println!("NE-deterministic: no ({a} and {b} share north and east)"),
                None => println!("NE-deterministic: yes"),
            }
            match &rep.sw_conflict {
                Some((a, b)) => println!("SW-deterministic: no ({a} and {b} share south and west)"),
                None => println!("SW-deterministic: yes"),
            }
            println!("2-way deterministic: {}", yn(rep.two_way));
            println!("complete: {}", yn(is_complete(&ts)));
            Ok(if rep.two_way { 0 } else { FALSE })
        }
        TilesCommand::Complete { file } => {
            print!("{}", complete(&read_tiles(file)?)?.write());
            Ok(0)
        }
        TilesCommand::Toca { file, complete: fill } => {
            let mut ts = read_tiles(file)?;
            if *fill {
                ts = complete(&ts)?;
            }
            print!("{}", write_rule_file(&ca_from_tileset(&ts)?)?);
            Ok(0)
        }
        TilesCommand::Random { colors, tiles, seed } => {
            if *colors == 0 {
                return Err(Failure::Input("need at least one color".into()));
            }
            let mut rng = StdRng::seed_from_u64(*seed);
            print!("{}", random_two_way(&mut rng, *colors, *tiles).write());
            Ok(0)
        }
    }
}

fn parse_subset(ca: &CellularAutomaton, spec: &str) -> Result<Vec<bool>, Failure> {
    let k = ca.alphabet_ref().len();
    match spec.trim() {
        "all" => return Ok(vec![true; k]),
        "none" | "" => return Ok(vec![false; k]),
        _ => {}
    }
    let mut b = vec![false; k];
    for name in spec.split(',').map(str::trim) {
        b[ca.alphabet_ref().sym(name)? as usize] = true;
    }
    Ok(b)
}

fn build_bundle(args: &InnerArgs) -> Result<ReductionBundle, Failure> {
    let g = read_rule(&args.inner)?;
    let b = parse_subset(&g, &args.b)?;
    Ok(match args.target {
        TargetArg::Sofic => build_sofic_f(&g, &b)?,
        TargetArg::Fullshift => build_fullshift_f(&g, &b)?,
    })
}

fn cmd_reduce(cmd: &ReduceCommand) -> Outcome {
    match cmd {
        ReduceCommand::Build(args) => {
            let bundle = build_bundle(args)?;
            let c = &bundle.checks;
            let yn = |b: bool| if b { "yes" } else { "no" };
            let target = match bundle.target() {
                Target::Sofic => "sofic",
                Target::FullShift => "fullshift",
            };
            println!("target: {target}");
            println!("alphabet size: {}", rcalab::GlobalMap::alphabet(&bundle).len());
            println!("inner injective: {}", verdict_word(&c.inner_injective));
            println!("particle injective on one-particle configurations: {}", verdict_word(&c.particle_injective));
            println!("particle inverse by conjugation: {}", yn(c.particle_inverse));
            println!("exchange involution: {}", yn(c.swap_involution));
            if let Some(b) = c.belt_bijective {
                println!("belt step bijective: {}", yn(b));
            }
            let inj = bundle.is_injective();
            println!("reversible: {}", verdict_word(&inj.verdict));
            Ok(summary_code(&[&inj]))
        }
        ReduceCommand::Speed { inner, n } => {
            let bundle = build_bundle(inner)?;
            let rep = speed_dichotomy_experiment(&bundle, *n)?;
            let mut out = String::from("t,position\n");
            for (t, pos) in rep.trace.positions.iter().enumerate() {
                match pos {
                    Some(p) => writeln!(out, "{t},{p}").unwrap(),
                    None => writeln!(out, "{t},").unwrap(),
                }
            }
            writeln!(out, "\nslope: {:.6}", rep.slope).unwrap();
            writeln!(out, "class: {}", rep.class.name()).unwrap();
            writeln!(out, "witness found: {}", if rep.witness_found { "yes" } else { "no" }).unwrap();
            if let Some(c) = rep.smallest_empty_c {
                writeln!(out, "smallest N with C(2N) empty: {c}").unwrap();
            }
            print!("{out}");
            Ok(0)
        }
        ReduceCommand::Immortality { file } => {
            let red = build_immortality_ca(&read_tiles(file)?)?;
            let a = red.alphabet();
            let members: Vec<&str> = a.symbols().filter(|&s| red.b[s as usize]).map(|s| a.name(s)).collect();
            println!("# B: {}", members.join(" "));
            print!("{}", write_rule_file(&red.f)?);
            Ok(0)
        }
    }
}

fn cmd_diagram(args: &DiagramArgs) -> Outcome {
    let ca = read_rule(&args.rule)?;
    let x = Configuration::parse(ca.alphabet_ref(), &args.config)?;
    if args.lo > args.hi {
        return Err(Failure::Input("--lo must not exceed --hi".into()));
    }
    let d = SpaceTimeDiagram::compute(&ca, &x, args.steps)?;
    print!("{}", d.render(ca.alphabet_ref(), args.lo, args.hi));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as bad input; help and version are not errors.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let jobs = cli.jobs.max(1);
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Lyap(a) => cmd_lyap(a, jobs),
        Command::Mult(c) => cmd_mult(c, jobs),
        Command::Tiles(c) => cmd_tiles(c),
        Command::Reduce(c) => cmd_reduce(c),
        Command::Diagram(a) => cmd_diagram(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Undecided(msg)) => {
            eprintln!("undecided: {msg}");
            ExitCode::from(UNDECIDED)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
