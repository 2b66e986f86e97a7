//! `bike`: command-line front end for the KEM and its profiling harness.
//!
//! Exit codes: 0 on success (including implicit rejection, which is
//! indistinguishable from success by design), 1 on usage errors, 2 on
//! format, I/O or crypto errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use bike_kem::bench::{render_report, run_profile, ReportFormat};
use bike_kem::kem::{decaps, encaps, keygen, Ciphertext, PrivateKey, PublicKey};
use bike_kem::oracles::Message;
use bike_kem::sampling::Seed;
use bike_kem::{parameter_set, selftest, Level};

#[derive(Parser)]
#[command(name = "bike", version, about = "BIKE QC-MDPC key encapsulation mechanism")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair from a seed (fresh OS entropy when omitted).
    Keygen(KeygenArgs),
    /// Encapsulate a shared secret under a public key.
    Encaps(EncapsArgs),
    /// Decapsulate a ciphertext with a private key.
    Decaps(DecapsArgs),
    /// Run the regression-vector and round-trip suite.
    Selftest(SelftestArgs),
    /// Profile the KEM primitives and print a per-operation breakdown.
    Bench(BenchArgs),
}

#[derive(Args)]
struct KeygenArgs {
    /// Security level: sl1, sl3, sl5 or toy.
    #[arg(long, default_value = "sl1")]
    level: String,
    /// 64-hex-character seed; omit for fresh OS entropy.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_name = "FILE")]
    out_pk: PathBuf,
    #[arg(long, value_name = "FILE")]
    out_sk: PathBuf,
}

#[derive(Args)]
struct EncapsArgs {
    /// Public key file.
    #[arg(long, value_name = "FILE")]
    pk: PathBuf,
    #[arg(long, value_name = "FILE")]
    out_ct: PathBuf,
    /// Write the shared secret to this file.
    #[arg(long, value_name = "FILE")]
    out_ss: Option<PathBuf>,
    /// Derive the message deterministically from this 64-hex-char seed.
    #[arg(long)]
    seed: Option<String>,
    /// Print the shared secret as hex on stdout.
    #[arg(long)]
    hex: bool,
}

#[derive(Args)]
struct DecapsArgs {
    /// Private key file.
    #[arg(long, value_name = "FILE")]
    sk: PathBuf,
    /// Ciphertext file.
    #[arg(long, value_name = "FILE")]
    ct: PathBuf,
    #[arg(long, value_name = "FILE")]
    out_ss: Option<PathBuf>,
    /// Print the shared secret as hex on stdout.
    #[arg(long)]
    hex: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Restrict the round-trip checks to one level.
    #[arg(long)]
    level: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "sl1")]
    level: String,
    #[arg(long, default_value_t = 100)]
    iters: u32,
    /// Output format: csv or markdown.
    #[arg(long, default_value = "markdown")]
    format: String,
}

/// Failures carrying the process exit code.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<bike_kem::Error> for Failure {
    fn from(e: bike_kem::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Keygen(args) => cmd_keygen(args),
        Command::Encaps(args) => cmd_encaps(args),
        Command::Decaps(args) => cmd_decaps(args),
        Command::Selftest(args) => cmd_selftest(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_level(s: &str) -> Result<Level, Failure> {
    Level::from_str(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_seed(s: &str) -> Result<Seed, Failure> {
    Seed::from_hex(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn read_file(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn cmd_keygen(args: KeygenArgs) -> CmdResult {
    let level = parse_level(&args.level)?;
    let seed = match &args.seed {
        Some(hex) => parse_seed(hex)?,
        None => Seed::fresh(),
    };
    let (sk, pk) = keygen(&seed, parameter_set(level))?;
    write_file(&args.out_pk, &pk.to_bytes())?;
    write_file(&args.out_sk, &sk.to_bytes())?;
    eprintln!(
        "wrote {} ({} bytes) and {} ({} bytes)",
        args.out_pk.display(),
        pk.to_bytes().len(),
        args.out_sk.display(),
        sk.to_bytes().len()
    );
    Ok(())
}

fn cmd_encaps(args: EncapsArgs) -> CmdResult {
    let pk = PublicKey::from_bytes(&read_file(&args.pk)?)?;
    let m = match &args.seed {
        Some(hex) => Message::from_seed(&parse_seed(hex)?),
        None => Message::from_seed(&Seed::fresh()),
    };
    let (secret, ct) = encaps(&pk, &m)?;
    write_file(&args.out_ct, &ct.to_bytes())?;
    if let Some(path) = &args.out_ss {
        write_file(path, secret.as_bytes())?;
    }
    if args.hex {
        println!("{}", hex::encode(secret.as_bytes()));
    }
    Ok(())
}

fn cmd_decaps(args: DecapsArgs) -> CmdResult {
    let sk = PrivateKey::from_bytes(&read_file(&args.sk)?)?;
    let ct = Ciphertext::from_bytes(&read_file(&args.ct)?)?;
    let secret = decaps(&sk, &ct)?;
    if let Some(path) = &args.out_ss {
        write_file(path, secret.as_bytes())?;
    }
    if args.hex {
        println!("{}", hex::encode(secret.as_bytes()));
    }
    Ok(())
}

fn cmd_selftest(args: SelftestArgs) -> CmdResult {
    let levels: Vec<Level> = match &args.level {
        Some(s) => vec![parse_level(s)?],
        // sl5 adds several seconds for little extra coverage; keep the
        // default suite snappy and let --level sl5 opt in.
        None => vec![Level::Toy, Level::Sl1, Level::Sl3],
    };
    let results = selftest::run(&levels);
    let mut failed = 0;
    for r in &results {
        if r.passed {
            println!("ok   {}", r.name);
        } else {
            println!("FAIL {}: {}", r.name, r.detail);
            failed += 1;
        }
    }
    if failed == 0 {
        println!("selftest: {} checks passed", results.len());
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{failed} selftest check(s) failed")))
    }
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    if args.iters == 0 {
        return Err(Failure::Usage("--iters must be at least 1".into()));
    }
    let level = parse_level(&args.level)?;
    let format = ReportFormat::from_str(&args.format).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = run_profile(level, args.iters)?;
    print!("{}", render_report(&report, format));
    Ok(())
}
