//! Argument parsing and dispatch for the `latticelab` binary.
//!
//! Every verb is validated against a fixed table of schemes and the flags
//! that are meaningful for that pairing. Anything else is a usage error
//! (exit 2). Failures of the underlying operation exit 1.

mod commands;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use latticelab::rng::Seed;

pub use commands::run;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Lwe,
    Plwe,
    Glyph,
    Bgv,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().unwrap().get_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Oracle,
    Uniform,
}

#[derive(Debug, Parser)]
#[command(name = "latticelab", version, about = "Lattice cryptography laboratory")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// 256-bit seed as 64 hex characters. Without it a fresh seed is drawn and printed.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output file (a path prefix for keygen).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    scheme: Option<Scheme>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Defining polynomial as CSV coefficients, lowest degree first.
    #[arg(long, global = true)]
    f: Option<String>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Verb {
    /// Generate a key pair, written to <out>.sk and <out>.pk.
    Keygen(KeygenArgs),
    /// Encrypt the bytes of --in (a coefficient CSV for bgv).
    Encrypt(IoArgs),
    Decrypt(IoArgs),
    Sign(IoArgs),
    Verify(VerifyArgs),
    /// Report the weakness conditions of (f, q).
    Scan(ScanArgs),
    /// Label a batch of PLWE samples with an evaluation attack.
    Attack(AttackArgs),
    /// Monte-Carlo estimate of how much of F_q the small errors reach.
    Smear(SmearArgs),
    /// Evaluate a circuit over BGV ciphertexts.
    BgvEval(BgvEvalArgs),
    /// Draw PLWE samples, or discrete Gaussian integers when no scheme is given.
    Sample(SampleArgs),
    /// Time LWE and PLWE and compare their public key sizes.
    Bench(BenchArgs),
}

#[derive(Clone, Debug, Args)]
pub struct KeygenArgs {
    /// BGV cyclotomic index.
    #[arg(long)]
    pub m: Option<u64>,
    /// BGV plaintext prime.
    #[arg(long)]
    pub p: Option<u64>,
    /// BGV plaintext exponent.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub growth: Option<f64>,
    /// GLYPH mask bound.
    #[arg(long)]
    pub b: Option<u64>,
    /// GLYPH challenge weight.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub secret_bound: Option<u64>,
}

#[derive(Clone, Debug, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub sig: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = latticelab::attacks::DEFAULT_R_MAX)]
    pub r_max: u64,
}

#[derive(Clone, Debug, Args)]
pub struct AttackArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub alg: u8,
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub samples: PathBuf,
    /// Root of f used by algorithm 2.
    #[arg(long)]
    pub alpha: Option<u64>,
    #[arg(long, default_value_t = latticelab::attacks::DEFAULT_T)]
    pub t: f64,
    #[arg(long, default_value_t = latticelab::attacks::DEFAULT_R_MAX)]
    pub r_max: u64,
}

#[derive(Clone, Debug, Args)]
pub struct SmearArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub alpha: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = latticelab::attacks::DEFAULT_T)]
    pub t: f64,
}

#[derive(Clone, Debug, Args)]
pub struct BgvEvalArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// `name=path` binding of an input wire to a ciphertext file; repeatable.
    #[arg(long = "wire", value_parser = parse_wire)]
    pub wires: Vec<(String, PathBuf)>,
}

#[derive(Clone, Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = SampleKind::Oracle)]
    pub kind: SampleKind,
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// PLWE secret key whose `s` drives oracle samples.
    #[arg(long)]
    pub key: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {}

fn parse_wire(s: &str) -> std::result::Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or("expected name=path")?;
    if name.is_empty() || path.is_empty() {
        return Err("expected name=path".into());
    }
    Ok((name.to_string(), PathBuf::from(path)))
}

/// A validated invocation.
#[derive(Clone, Debug)]
pub struct Command {
    pub verb: Verb,
    pub scheme: Option<Scheme>,
    pub seed: Option<Seed>,
    pub out: Option<PathBuf>,
    pub n: Option<usize>,
    pub q: Option<u64>,
    pub f: Option<String>,
    pub sigma: Option<f64>,
}

impl Command {
    pub fn verb_name(&self) -> &'static str {
        verb_name(&self.verb)
    }
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::Keygen(_) => "keygen",
        Verb::Encrypt(_) => "encrypt",
        Verb::Decrypt(_) => "decrypt",
        Verb::Sign(_) => "sign",
        Verb::Verify(_) => "verify",
        Verb::Scan(_) => "scan",
        Verb::Attack(_) => "attack",
        Verb::Smear(_) => "smear",
        Verb::BgvEval(_) => "bgv-eval",
        Verb::Sample(_) => "sample",
        Verb::Bench(_) => "bench",
    }
}

/// A rejected command line, with the exit code it maps to (0 for --help and --version).
#[derive(Debug)]
pub struct UsageError {
    pub message: String,
    pub code: i32,
}

impl UsageError {
    fn new(message: impl Into<String>) -> Self {
        UsageError {
            message: message.into(),
            code: 2,
        }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message.trim_end())
    }
}

/// Accepted schemes per verb: (allowed, default when --scheme is absent).
/// A `None` default with a non-empty list makes --scheme mandatory, except
/// for verbs that also run without a scheme.
fn scheme_table(verb: &str) -> (&'static [Scheme], Option<Scheme>, bool) {
    use Scheme::*;
    match verb {
        "keygen" => (&[Lwe, Plwe, Glyph, Bgv], None, false),
        "encrypt" | "decrypt" => (&[Lwe, Plwe, Bgv], None, false),
        "sign" | "verify" => (&[Glyph], Some(Glyph), false),
        "scan" | "attack" | "smear" => (&[Plwe], Some(Plwe), false),
        "bgv-eval" => (&[Bgv], Some(Bgv), false),
        "sample" => (&[Plwe], None, true),
        "bench" => (&[Lwe, Plwe], None, true),
        _ => unreachable!(),
    }
}

/// Flags meaningful for a verb/scheme pair, beyond --seed, --out and --scheme.
fn allowed_flags(verb: &str, scheme: Option<Scheme>) -> &'static [&'static str] {
    use Scheme::*;
    match (verb, scheme) {
        ("keygen", Some(Lwe)) => &["n"],
        ("keygen", Some(Plwe)) => &["n", "q", "f", "sigma"],
        ("keygen", Some(Glyph)) => &["n", "q", "b", "k", "secret_bound"],
        ("keygen", Some(Bgv)) => &["m", "p", "r", "levels", "growth", "sigma"],
        ("encrypt" | "decrypt" | "sign", _) => &["key", "input"],
        ("verify", _) => &["key", "input", "sig"],
        ("scan", _) => &["f", "q", "r_max"],
        ("attack", _) => &["alg", "params", "samples", "alpha", "t", "r_max"],
        ("smear", _) => &["params", "n", "q", "f", "sigma", "alpha", "trials", "t"],
        ("bgv-eval", _) => &["circuit", "wires"],
        ("sample", None) => &["sigma", "count"],
        ("sample", Some(_)) => &["params", "key", "n", "q", "f", "sigma", "count", "kind"],
        ("bench", _) => &["n"],
        _ => &[],
    }
}

const ALWAYS: &[&str] = &["seed", "out", "scheme"];

/// Ids of flags given on the command line. The derive also registers one
/// group per argument struct, named after the struct; those are skipped.
fn explicit_flags(m: &ArgMatches) -> Vec<String> {
    m.ids()
        .filter(|id| !id.as_str().starts_with(char::is_uppercase))
        .filter(|id| m.value_source(id.as_str()) == Some(ValueSource::CommandLine))
        .map(|id| id.as_str().to_string())
        .collect()
}

fn parse_seed(hex_seed: &str) -> Result<Seed, UsageError> {
    let bytes = hex::decode(hex_seed).map_err(|_| UsageError::new("--seed must be 64 hex characters"))?;
    bytes
        .try_into()
        .map_err(|_| UsageError::new("--seed must be 64 hex characters"))
}

/// Parses and validates `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<Command, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = Cli::command().try_get_matches_from(argv).map_err(|e| UsageError {
        message: e.render().to_string(),
        code: e.exit_code(),
    })?;
    let cli = Cli::from_arg_matches(&matches).map_err(|e| UsageError::new(e.to_string()))?;
    let verb = verb_name(&cli.verb);
    let (_, sub) = matches.subcommand().expect("subcommand is required");

    let (schemes, default, optional) = scheme_table(verb);
    let scheme = match cli.scheme.or(default) {
        Some(s) if !schemes.contains(&s) => {
            return Err(UsageError::new(format!("{verb} does not support --scheme {s}")));
        }
        None if !optional => {
            let names: Vec<String> = schemes.iter().map(Scheme::to_string).collect();
            return Err(UsageError::new(format!("{verb} needs --scheme ({})", names.join("|"))));
        }
        s => s,
    };

    let allowed = allowed_flags(verb, scheme);
    for flag in explicit_flags(sub) {
        if !ALWAYS.contains(&flag.as_str()) && !allowed.contains(&flag.as_str()) {
            let shown = flag.replace('_', "-");
            let shown = if shown == "input" { "in".into() } else { shown };
            let what = scheme.map_or(verb.to_string(), |s| format!("{verb} --scheme {s}"));
            return Err(UsageError::new(format!("--{shown} is not meaningful for {what}")));
        }
    }

    match &cli.verb {
        Verb::Scan(_) if cli.f.is_none() || cli.q.is_none() => {
            return Err(UsageError::new("scan needs --f and --q"));
        }
        Verb::Attack(a) if a.alg == 2 && a.alpha.is_none() => {
            return Err(UsageError::new("attack --alg 2 needs --alpha"));
        }
        Verb::Attack(a) if a.alg == 1 && a.alpha.is_some() => {
            return Err(UsageError::new("attack --alg 1 always evaluates at 1; drop --alpha"));
        }
        Verb::Keygen(_) if cli.out.is_none() => {
            return Err(UsageError::new("keygen needs --out <prefix>"));
        }
        Verb::BgvEval(b) if b.wires.is_empty() => {
            return Err(UsageError::new("bgv-eval needs at least one --wire name=path"));
        }
        Verb::Sample(s) if s.params.is_some() && s.key.is_some() => {
            return Err(UsageError::new("sample takes --params or --key, not both"));
        }
        _ => {}
    }
    if cli.f.is_some() && cli.q.is_none() {
        return Err(UsageError::new("--f needs an explicit --q"));
    }

    let seed = cli.seed.as_deref().map(parse_seed).transpose()?;
    Ok(Command {
        verb: cli.verb,
        scheme,
        seed,
        out: cli.out,
        n: cli.n,
        q: cli.q,
        f: cli.f,
        sigma: cli.sigma,
    })
}
