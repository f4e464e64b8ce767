use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use frcrypt_core::chaos::{gen_chaotic_map, MaskFamily, MaskKind, MaskSpec, DEFAULT_BURN_IN};
use frcrypt_core::container::{
    export_preview, is_container, load_container, load_image, read_key, save_container, save_image, write_key,
};
use frcrypt_core::format::{g17, parse_order_range};
use frcrypt_core::frft::PlanSource;
use frcrypt_core::metrics::{mse_channels, speedup_report, sweep_orders, write_sweep_csv, write_timing_csv, SweepMode};
use frcrypt_core::pipeline::{decrypt, encrypt, Algorithm, EncryptedImage, EncryptionKey, Orders, PipelineOptions};
use frcrypt_core::{selftest, CMatrix, Error, Execution, RMatrix};

#[derive(Parser)]
#[command(name = "frcrypt", version, about = "Fractional Fourier transform image encryption")]
struct Cli {
    /// Worker threads for channel- and sweep-level parallelism (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a key file.
    Keygen(KeygenArgs),
    /// Encrypt an image into a container.
    Encrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write an 8-bit magnitude preview of the ciphertext.
        #[arg(long)]
        preview: Option<PathBuf>,
    },
    /// Decrypt a container.
    Decrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the complex result as a container instead of a rounded image.
        #[arg(long)]
        raw: bool,
    },
    /// Per-channel MSE between two images or containers of equal size.
    Mse { a: PathBuf, b: PathBuf },
    /// MSE of the restoration as every order of the key is swept.
    Sweep {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        /// Inclusive range `start:step:end`, or a single order.
        #[arg(long, default_value = "0:0.1:1")]
        orders: String,
        #[arg(long, value_enum, default_value_t = Mode::DecryptOrder)]
        mode: Mode,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time a baseline algorithm against its DWT counterpart.
    Bench(BenchArgs),
    /// Write a mask's driving matrix and phase as CSV.
    MaskDump(MaskDumpArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(clap::Args)]
struct KeygenArgs {
    #[arg(long)]
    algorithm: Algorithm,
    /// alpha,beta,gamma,delta
    #[arg(long, default_value = "0.5,0.5,0.5,0.5")]
    orders: String,
    /// Mask 1 seed: an integer for uniform masks, `x0` for logistic and tent,
    /// `x0,y0` for Kaplan-Yorke.
    #[arg(long)]
    seed1: Option<String>,
    #[arg(long)]
    seed2: Option<String>,
    /// Map parameters shared by both masks: `p` (logistic), `a` (tent) or
    /// `a,b` (Kaplan-Yorke).
    #[arg(long)]
    map_params: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Baseline and DWT algorithm, e.g. `A31:A41`.
    #[arg(long)]
    pair: String,
    /// Masks to use; the demo masks of the pair's family when omitted.
    #[arg(long)]
    key: Option<PathBuf>,
    #[arg(long, default_value = "0:0.1:1")]
    orders: String,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    repeats: u32,
    /// Reuse transform plans across runs (`on`) or rebuild them every run (`off`).
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    cache: Switch,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct MaskDumpArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Same syntax as `keygen --seed1`.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    map_params: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    s_out: Option<PathBuf>,
    #[arg(long)]
    phase_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    DecryptOrder,
    BothOrders,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Logistic,
    Tent,
    KaplanYorke,
}

impl From<Kind> for MaskFamily {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Uniform => MaskFamily::Uniform,
            Kind::Logistic => MaskFamily::Logistic,
            Kind::Tent => MaskFamily::Tent,
            Kind::KaplanYorke => MaskFamily::KaplanYorke,
        }
    }
}

enum Failure {
    /// Bad flags that clap cannot see: malformed lists, mismatched pairs.
    Usage(String),
    Core(Error),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        set_threads(n.into());
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::FlatSequence(_) | Error::NonFinite => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
        Err(Failure::Selftest) => ExitCode::from(3),
    }
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) {
    // Only fails if the global pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_: usize) {}

fn run(command: Command) -> Outcome {
    let opts = PipelineOptions::new(PlanSource::Cached, Execution::Parallel);
    match command {
        Command::Keygen(args) => keygen(args),
        Command::Encrypt {
            input,
            key,
            out,
            preview,
        } => {
            let key = read_key(key)?;
            let enc = encrypt(&load_image(input)?, &key, opts)?;
            save_container(&enc, out)?;
            if let Some(p) = preview {
                export_preview(&enc, p)?;
            }
            Ok(())
        }
        Command::Decrypt { input, key, out, raw } => {
            let key = read_key(key)?;
            let enc = load_container(input)?;
            if enc.algorithm() != key.algorithm {
                eprintln!(
                    "warning: container was written by {} but the key names {}",
                    enc.algorithm(),
                    key.algorithm
                );
            }
            let dec = decrypt(&enc, &key, opts)?;
            if raw {
                save_container(&EncryptedImage::new(key.algorithm, dec.channels)?, out)?;
            } else {
                save_image(&dec.to_plain(), out)?;
            }
            Ok(())
        }
        Command::Mse { a, b } => {
            let m = mse_channels(&load_channels(&a)?, &load_channels(&b)?)?;
            println!("mse_r,mse_g,mse_b");
            println!("{},{},{}", g17(m.r), g17(m.g), g17(m.b));
            Ok(())
        }
        Command::Sweep {
            input,
            key,
            orders,
            mode,
            out,
        } => {
            let orders = parse_order_range(&orders).map_err(|e| Failure::Usage(e.to_string()))?;
            let mode = match mode {
                Mode::DecryptOrder => SweepMode::DecryptOrder,
                Mode::BothOrders => SweepMode::BothOrders,
            };
            let rows = sweep_orders(&load_image(input)?, &read_key(key)?, &orders, mode, opts)?;
            with_output(out.as_deref(), |w| write_sweep_csv(&rows, w))
        }
        Command::Bench(args) => bench(args),
        Command::MaskDump(args) => mask_dump(args),
        Command::Selftest => {
            let results = selftest::run(&selftest::DEFAULT_SIZES);
            let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
            for r in &results {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                println!("{:<width$}  {verdict}  {}", r.name, r.detail);
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} groups, {failed} failed", results.len());
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Selftest)
            }
        }
    }
}

fn load_channels(path: &Path) -> Result<[CMatrix; 3], Error> {
    if is_container(path)? {
        Ok(load_container(path)?.channels().clone())
    } else {
        Ok(load_image(path)?.to_complex())
    }
}

/// Runs `f` on a buffered file, or on standard output when `path` is `None`.
fn with_output<F>(path: Option<&Path>, f: F) -> Outcome
where
    F: FnOnce(&mut dyn Write) -> Result<(), Error>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => f(&mut io::stdout().lock())?,
    }
    Ok(())
}

fn numbers(flag: &str, text: &str, want: &[usize]) -> Result<Vec<f64>, Failure> {
    let vals = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("--{flag}: {text:?} is not a comma-separated list of numbers")))?;
    if !want.contains(&vals.len()) {
        let n = want.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" or ");
        return Err(Failure::Usage(format!("--{flag}: expected {n} values, got {}", vals.len())));
    }
    Ok(vals)
}

/// Builds a mask generator from the `--seed` and `--map-params` strings,
/// falling back to fixed demo values for anything omitted.
fn mask_kind(family: MaskFamily, seed: Option<&str>, params: Option<&str>, slot: usize) -> Result<MaskKind, Failure> {
    let param_vals = |default: &[f64], want: &[usize]| match params {
        Some(p) => numbers("map-params", p, want),
        None => Ok(default.to_vec()),
    };
    let seed_vals = |default: &[f64], want: usize| match seed {
        Some(s) => numbers(&format!("seed{slot}"), s, &[want]),
        None => Ok(default.to_vec()),
    };
    Ok(match family {
        MaskFamily::Uniform => {
            if params.is_some() {
                return Err(Failure::Usage("uniform masks take no --map-params".into()));
            }
            let seed = match seed {
                Some(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("--seed{slot}: {s:?} is not an unsigned integer")))?,
                None => slot as u64,
            };
            MaskKind::Uniform { seed }
        }
        MaskFamily::Logistic => MaskKind::Logistic {
            p: param_vals(&[3.99], &[1])?[0],
            x0: seed_vals(&[[0.31, 0.62][slot - 1]], 1)?[0],
        },
        MaskFamily::Tent => MaskKind::Tent {
            a: param_vals(&[1.99], &[1])?[0],
            x0: seed_vals(&[[0.31, 0.62][slot - 1]], 1)?[0],
        },
        MaskFamily::KaplanYorke => {
            let ab = param_vals(&[1.97, 0.3], &[2])?;
            let xy = seed_vals(&[[0.21, 0.1], [0.43, 0.2]][slot - 1], 2)?;
            MaskKind::KaplanYorke {
                a: ab[0],
                b: ab[1],
                x0: xy[0],
                y0: xy[1],
            }
        }
    })
}

fn keygen(args: KeygenArgs) -> Outcome {
    let o = numbers("orders", &args.orders, &[4])?;
    let family = args.algorithm.mask_family();
    let params = args.map_params.as_deref();
    let spec = |seed: &Option<String>, slot| -> Result<MaskSpec, Failure> {
        Ok(MaskSpec::new(mask_kind(family, seed.as_deref(), params, slot)?).with_burn_in(args.burn_in))
    };
    let key = EncryptionKey::new(
        args.algorithm,
        Orders::new(o[0], o[1], o[2], o[3]),
        spec(&args.seed1, 1)?,
        spec(&args.seed2, 2)?,
    )?;
    write_key(&key, &args.out)?;
    Ok(())
}

fn bench(args: BenchArgs) -> Outcome {
    let (b, p) = args
        .pair
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("--pair {:?}: expected BASELINE:DWT", args.pair)))?;
    let parse = |s: &str| {
        s.parse::<Algorithm>()
            .map_err(|_| Failure::Usage(format!("--pair: unknown algorithm {s:?}")))
    };
    let (baseline, proposed) = (parse(b)?, parse(p)?);
    if baseline.uses_dwt() || baseline.counterpart() != proposed {
        return Err(Failure::Usage(format!(
            "--pair {baseline}:{proposed}: need a full-image algorithm and its DWT counterpart with the same masks (e.g. {}:{})",
            Algorithm::A31,
            Algorithm::A41
        )));
    }
    let orders = parse_order_range(&args.orders).map_err(|e| Failure::Usage(e.to_string()))?;
    let key = match &args.key {
        Some(path) => {
            let key = read_key(path)?;
            if key.algorithm.mask_family() != baseline.mask_family() {
                return Err(Failure::Core(Error::InvalidKey(format!(
                    "key uses {} masks but {baseline} needs {}",
                    key.algorithm.mask_family().name(),
                    baseline.mask_family().name()
                ))));
            }
            key
        }
        None => {
            let family = baseline.mask_family();
            let spec = |slot| -> Result<MaskSpec, Failure> { Ok(MaskSpec::new(mask_kind(family, None, None, slot)?)) };
            EncryptionKey::new(baseline, Orders::default(), spec(1)?, spec(2)?)?
        }
    };
    let plans = match args.cache {
        Switch::On => PlanSource::Cached,
        Switch::Off => PlanSource::Fresh,
    };
    let rows = speedup_report(
        &load_image(&args.input)?,
        &key.with_algorithm(baseline),
        &key.with_algorithm(proposed),
        &orders,
        args.repeats as usize,
        plans,
    )?;
    with_output(args.out.as_deref(), |w| write_timing_csv(&rows, w))
}

fn write_matrix(m: &RMatrix, path: &Path) -> Outcome {
    let mut w = BufWriter::new(File::create(path)?);
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&v| g17(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn mask_dump(args: MaskDumpArgs) -> Outcome {
    if args.s_out.is_none() && args.phase_out.is_none() {
        return Err(Failure::Usage("nothing to write: give --s-out and/or --phase-out".into()));
    }
    let kind = mask_kind(args.kind.into(), args.seed.as_deref(), args.map_params.as_deref(), 1)?;
    let spec = MaskSpec::new(kind).with_burn_in(args.burn_in);
    if let Some(p) = &args.s_out {
        write_matrix(&gen_chaotic_map(&spec, args.rows, args.cols)?, p)?;
    }
    if let Some(p) = &args.phase_out {
        write_matrix(&spec.mask(args.rows, args.cols)?.phase(), p)?;
    }
    Ok(())
}
