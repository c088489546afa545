use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use qidlab_core::model::{parse_number, parse_spec};
use qidlab_core::triplet::{nu_density, write_triplet};
use qidlab_core::{
    eval_cf, extract_triplet, moment_equivalence_report, qid_check, reconstruct_cf, Error, MixedDistribution, MomentReport,
    Settings, Verdict, WeightFunction,
};

/// Quasi-infinite divisibility checks, triplet extraction and H-moments.
#[derive(Parser)]
#[command(name = "qidlab", version)]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// Scan window for incommensurable atoms (default max(1e4, 100 * 2pi / gap)).
    #[arg(long, global = true)]
    window: Option<f64>,
    #[arg(long, global = true, default_value_t = Settings::default().tol_zero)]
    tol_zero: f64,
    #[arg(long, global = true, default_value_t = Settings::default().tol_qid)]
    tol_qid: f64,
    /// Lattice step q for the atoms (decimal, a/b or sqrt(a)); overrides the spec file.
    #[arg(long, global = true, value_parser = step)]
    lattice: Option<f64>,
    /// Tail horizon for moment decisions.
    #[arg(long, global = true, default_value_t = Settings::default().horizon)]
    horizon: f64,
}

fn step(s: &str) -> std::result::Result<f64, String> {
    parse_number(s)
        .filter(|v| *v > 0.0)
        .ok_or_else(|| format!("`{s}` is not a positive number"))
}

impl Flags {
    fn settings(&self) -> Settings {
        Settings {
            tol_zero: self.tol_zero,
            tol_qid: self.tol_qid,
            window: self.window,
            horizon: self.horizon,
            lattice: self.lattice,
            ..Settings::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the distribution is quasi-infinitely divisible.
    Check { spec: PathBuf },
    /// Extract the quasi-Lévy triplet and report the round-trip error.
    Triplet {
        spec: PathBuf,
        /// Triplet file to write; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Half-width of the round-trip check interval.
        #[arg(long, default_value_t = 20.0)]
        zmax: f64,
    },
    /// Compare H-moments of the distribution and of nu.
    Moments {
        spec: PathBuf,
        /// Weight: one, poly:S, subexp:C or exp:C.
        weight: String,
        /// Print the CSV header and row instead of the text report.
        #[arg(long)]
        csv: bool,
    },
    /// CSV samples of F and of the nu density.
    PlotData {
        spec: PathBuf,
        #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 801)]
        points: usize,
        /// Half-width of the nu density samples; 0 skips them.
        #[arg(long, default_value_t = 10.0)]
        nu_range: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Qid => 0,
        Verdict::NotQid => 1,
        Verdict::Undecided => 2,
    }
}

/// Exit code of a failed command: the verdict when the failure is a verdict,
/// 3 for everything else.
fn error_code(e: &anyhow::Error) -> u8 {
    let mut inner = e.downcast_ref::<Error>();
    while let Some(Error::Stage { source, .. }) = inner {
        inner = Some(source);
    }
    match inner {
        Some(Error::Uncertified(v)) => verdict_code(v.verdict),
        Some(Error::NotQid(_)) => 1,
        _ => 3,
    }
}

fn load(path: &Path) -> Result<MixedDistribution> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("in {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |j| if j == n - 1 { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 })
}

fn run(cli: &Cli) -> Result<u8> {
    let settings = cli.flags.settings();
    match &cli.command {
        Command::Check { spec } => {
            let d = load(spec)?;
            let v = qid_check(&d, &settings)?;
            print!("{}", v.summary());
            Ok(verdict_code(v.verdict))
        }
        Command::Triplet { spec, output, zmax } => {
            let d = load(spec)?;
            let t = extract_triplet(&d, &settings)?;
            emit(output.as_deref(), &write_triplet(&t))?;
            let mut worst: f64 = 0.0;
            for z in linspace(-zmax, *zmax, 2001) {
                worst = worst.max((reconstruct_cf(&t, z) - eval_cf(&d, z)?).norm());
            }
            let mut report = format!("round trip: sup |F - F_rec| on [-{zmax}, {zmax}] = {worst:.3e}\n");
            for w in &t.diagnostics.warnings {
                let _ = writeln!(report, "warning: {w}");
            }
            // Keep stdout clean when the triplet itself goes there.
            if output.is_some() {
                print!("{report}");
            } else {
                eprint!("{report}");
            }
            Ok(0)
        }
        Command::Moments { spec, weight, csv } => {
            let d = load(spec)?;
            let h = WeightFunction::parse(weight)?;
            let r = moment_equivalence_report(&d, &h, &settings)?;
            if *csv {
                println!("{}\n{}", MomentReport::CSV_HEADER, r.to_csv_row());
            } else {
                print!("{}", r.to_text());
            }
            Ok(if r.consistent { 0 } else { 1 })
        }
        Command::PlotData {
            spec,
            from,
            to,
            points,
            nu_range,
            output,
        } => {
            let d = load(spec)?;
            let mut csv = String::from("series,x,re,im,modulus\n");
            for z in linspace(*from, *to, *points) {
                let f = eval_cf(&d, z)?;
                let _ = writeln!(csv, "cf,{z},{},{},{}", f.re, f.im, f.norm());
            }
            if *nu_range > 0.0 {
                // Only QID lattice inputs have a triplet; the cf samples stand alone otherwise.
                match extract_triplet(&d, &settings) {
                    Ok(t) => {
                        for x in linspace(-nu_range, *nu_range, *points).filter(|x| *x != 0.0) {
                            let v = nu_density(&t, x);
                            let _ = writeln!(csv, "nu,{x},{v},0,{}", v.abs());
                        }
                        for (y, c) in t.atoms.iter().filter(|(y, _)| y.abs() <= *nu_range) {
                            let _ = writeln!(csv, "nu_atom,{y},{c},0,{}", c.abs());
                        }
                    }
                    Err(e) => eprintln!("note: no nu samples ({e})"),
                }
            }
            emit(output.as_deref(), &csv)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Some(n) = std::env::var("QIDLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            // Library errors already quote their sources; print each message once.
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(error_code(&e))
        }
    }
}
