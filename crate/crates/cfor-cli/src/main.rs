mod policy;
mod reference;
mod tables;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use cfor_core::benchmarks::{run_case, CaseConfig, CaseKind, RunOutput};
use cfor_core::kernels::{halfgrid_stencil, stencil, KernelFamily, KernelSpec, DEFAULT_HALF_WIDTH, DEFAULT_HERMITE_ORDER};
use cfor_core::spectral::{effective_band, frequency_response, response_at, BAND_TIERS};
use cfor_core::CforError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cfor", version, about = "CFOR/DSC flow benchmarks and filter analyzer")]
struct Cli {
    /// Directory for CSVs, logs and manifests.
    #[arg(short, long, global = true, env = "CFOR_OUTPUT_DIR", default_value = "cfor-output")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the benchmark cases, or print the default config of one.
    List {
        /// Print the default config text for this case.
        #[arg(long)]
        config: Option<String>,
    },
    /// Run a case from a `key = value` config file.
    Run { config: PathBuf },
    /// Frequency response and effective-band report of a stencil.
    Analyze(AnalyzeArgs),
    /// Print stencil weights as an `offset weight` table.
    Stencil(KernelArgs),
    /// Rerun the cases behind a results table and compare with the reference values.
    ReproduceTable {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=7))]
        table: u8,
        /// Largest vortex grid for tables 4 and 5.
        #[arg(long, default_value_t = 80)]
        max_n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hermite,
    Rsk,
}

#[derive(Args, Clone)]
struct KernelArgs {
    #[arg(long, value_enum, default_value = "hermite")]
    kernel: Family,
    /// sigma/spacing ratio; defaults to 3.05 (Hermite) or 7.5 (RSK).
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_HERMITE_ORDER)]
    order: usize,
    #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
    half_width: usize,
    /// Derivative order 0, 1 or 2.
    #[arg(long, default_value_t = 1)]
    q: u32,
    /// Half-grid interpolation stencil instead of a derivative.
    #[arg(long)]
    halfgrid: bool,
}

impl KernelArgs {
    fn spec(&self) -> KernelSpec {
        let (family, r) = match self.kernel {
            Family::Hermite => (KernelFamily::Hermite, self.r.unwrap_or(cfor_core::kernels::DEFAULT_R_HIGHPASS)),
            Family::Rsk => (KernelFamily::Rsk, self.r.unwrap_or(cfor_core::benchmarks::DEFAULT_R_RSK)),
        };
        KernelSpec::new(family, r).with_order(self.order).with_half_width(self.half_width)
    }

    fn label(&self) -> String {
        let s = self.spec();
        let fam = match self.kernel {
            Family::Hermite => "hermite",
            Family::Rsk => "rsk",
        };
        format!("{fam}_r{}_w{}_q{}", s.r, s.half_width, self.q)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Response samples on [0, pi].
    #[arg(long, default_value_t = 1025)]
    samples: usize,
    /// Band-edge tolerances (comma separated); defaults to 1e-10 .. 1e-3.
    #[arg(long, value_delimiter = ',')]
    tol: Vec<f64>,
    /// Also emit the conjugate low-pass response with this restoration ratio.
    #[arg(long)]
    r_lp: Option<f64>,
    /// Compare band edges against the other kernel family at the given r.
    #[arg(long)]
    compare_r: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &CforError) -> u8 {
    match e.root() {
        CforError::Config { .. } => 2,
        CforError::Io(_) => 4,
        _ => 3,
    }
}

fn dispatch(cli: &Cli) -> cfor_core::Result<()> {
    match &cli.command {
        Command::List { config } => list(config.as_deref()),
        Command::Run { config } => run(config, &cli.output_dir),
        Command::Analyze(a) => analyze(a, &cli.output_dir),
        Command::Stencil(k) => {
            let w = if k.halfgrid { halfgrid_stencil(&k.spec())? } else { stencil(&k.spec(), k.q)? };
            print!("{}", w.to_table());
            Ok(())
        }
        Command::ReproduceTable { table, max_n } => tables::reproduce(*table, *max_n, &cli.output_dir),
    }
}

/// Canonical grid of each case.
pub(crate) fn default_n(case: CaseKind) -> usize {
    match case {
        CaseKind::Taylor | CaseKind::ShearLayer => 64,
        CaseKind::Wavepacket => 200,
        CaseKind::IsentropicVortex => 80,
        CaseKind::ShockEntropy => 400,
    }
}

fn list(config: Option<&str>) -> cfor_core::Result<()> {
    match config {
        Some(name) => {
            let case = CaseKind::from_str(name).map_err(|e| CforError::Config {
                line: 0,
                message: e.to_string(),
            })?;
            print!("{}", CaseConfig::defaults(case, default_n(case)).to_text());
        }
        None => {
            for case in CaseKind::ALL {
                println!("{:<11} {}", case.name(), case.describe());
            }
        }
    }
    Ok(())
}

fn config_error(e: CforError) -> CforError {
    match e {
        e @ CforError::Config { .. } => e,
        other => CforError::Config {
            line: 0,
            message: other.to_string(),
        },
    }
}

fn run(path: &Path, out_dir: &Path) -> cfor_core::Result<()> {
    let text = fs::read_to_string(path)?;
    let cfg = CaseConfig::parse(&text).map_err(config_error)?;
    cfg.validate().map_err(config_error)?;
    fs::create_dir_all(out_dir)?;
    let started = std::time::Instant::now();
    let out = run_case(&cfg)?;
    log::info!("{} finished: {} steps in {:.1?}", cfg.case, out.steps, started.elapsed());
    write_outputs(&out, out_dir, cfg.case.name())?;
    for line in &out.log {
        println!("{line}");
    }
    Ok(())
}

pub(crate) fn write_outputs(out: &RunOutput, dir: &Path, stem: &str) -> cfor_core::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{stem}_errors.csv")), out.errors_csv())?;
    fs::write(dir.join(format!("{stem}_scalars.csv")), out.scalars_csv())?;
    fs::write(dir.join(format!("{stem}.log")), out.log.join("\n") + "\n")?;
    fs::write(dir.join(format!("{stem}_manifest.txt")), manifest(&out.config))?;
    for s in &out.snapshots {
        let f = fs::File::create(dir.join(format!("{stem}_{}_t{:.4}.csv", s.name, s.t)))?;
        s.field.write_csv(std::io::BufWriter::new(f))?;
    }
    Ok(())
}

fn manifest(cfg: &CaseConfig) -> String {
    let k = &cfg.kernel;
    let mut s = String::new();
    let _ = writeln!(s, "# cfor {} manifest; rerun with `cfor run` on the config block below", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# kernel family={:?} half_width={} r={} order={} r_lp={}",
        k.family, k.half_width, k.r, k.order, cfg.r_lp
    );
    s.push_str(&cfg.to_text());
    s
}

fn analyze(a: &AnalyzeArgs, out_dir: &Path) -> cfor_core::Result<()> {
    let spec = a.kernel.spec();
    let w = stencil(&spec, a.kernel.q)?;
    let resp = frequency_response(&w, a.samples)?;
    let tiers: Vec<f64> = if a.tol.is_empty() { BAND_TIERS.to_vec() } else { a.tol.clone() };
    fs::create_dir_all(out_dir)?;
    let label = a.kernel.label();
    fs::write(out_dir.join(format!("response_{label}.csv")), resp.to_csv())?;

    let mut report = String::from("tolerance,band_edge,band_edge_over_pi\n");
    println!("{label}: effective band edges (omega * dx)");
    let other = a.compare_r.map(|r| {
        let fam = match a.kernel.kernel {
            Family::Hermite => KernelFamily::Rsk,
            Family::Rsk => KernelFamily::Hermite,
        };
        KernelSpec {
            family: fam,
            r,
            ..spec
        }
    });
    let other_resp = match &other {
        Some(o) => Some(frequency_response(&stencil(o, a.kernel.q)?, 2)?),
        None => None,
    };
    for &tol in &tiers {
        let e = effective_band(&resp, tol);
        let _ = writeln!(report, "{tol:e},{:.12},{:.12}", e.omega, e.omega / std::f64::consts::PI);
        let mut line = format!("  tol {tol:>8.1e}: {:.6}{}", e.omega, if e.bracketed { "" } else { " (fails at 0)" });
        if let (Some(o), Some(or)) = (&other, &other_resp) {
            let eo = effective_band(or, tol);
            let wider = if eo.omega > e.omega { "wider" } else { "not wider" };
            let _ = write!(line, "   {:?} r={}: {:.6} ({wider})", o.family, o.r, eo.omega);
        }
        println!("{line}");
    }
    fs::write(out_dir.join(format!("bands_{label}.csv")), report)?;

    if let Some(r_lp) = a.r_lp {
        let bank = cfor_core::filters::ConjugateFilterBank::new(&spec, r_lp)?;
        let mut csv = String::from("omega,lowpass\n");
        for k in 0..a.samples {
            let om = std::f64::consts::PI * k as f64 / (a.samples - 1) as f64;
            // Predict to midpoints, restore back to the grid.
            let g = response_at(&bank.predict, om) * response_at(&bank.restore, om);
            let _ = writeln!(csv, "{om:.16e},{:.16e}", g.norm());
        }
        fs::write(out_dir.join(format!("lowpass_{label}_rlp{r_lp}.csv")), csv)?;
    }
    println!("wrote response and band CSVs to {}", out_dir.display());
    Ok(())
}
