use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nonmarkov::basis::HermitianBasis;
use nonmarkov::channels::{affine_from_transfer, choi_from_transfer, is_cp, is_unital};
use nonmarkov::distances::Distance;
use nonmarkov::gadc::{gadc_process, GadcProcessParams};
use nonmarkov::io::{load_channel, load_process};
use nonmarkov::measures::{
    blp_measure, central_difference, distance_trace_at_tau, nonunital_nm_measure, nonunitality_measure, purity_trace,
    Maximizer, MeasureReport,
};
use nonmarkov::optimize::OptimizerConfig;
use nonmarkov::policy::POLICY;
use nonmarkov::processes::{rhp_g_trace, rhp_measure, QuantumProcess, TimeGrid};
use nonmarkov::states::BlochState;
use nonmarkov::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_IO: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "nonmarkov", version, about = "Non-Markovianity and non-unitality diagnostics for quantum processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the selected measures on a process and write measures.json and traces.
    Analyze {
        #[command(subcommand)]
        process: ProcessSpec,
    },
    /// Print the affine form, unitality and CP status of a tabulated channel.
    Channel { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ProcessSpec {
    /// GADC process with p_t = cos²(ωt), η_t = e^{-t}.
    Gadc {
        #[arg(long, default_value_t = 5.0)]
        omega: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Process read from a JSON file {dim, times, transfers}.
    Tabulated {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// End of the time grid [default: 20 for gadc, last sample time for tabulated].
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 4001)]
    n: usize,
    /// Finite-difference step for g(t).
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    /// Comma-separated subset of blp, rhp, nonunitality, nonunital-nm.
    #[arg(long, value_delimiter = ',', default_value = "blp,rhp,nonunitality,nonunital-nm")]
    measures: Vec<Measure>,
    /// Distance for the non-unital non-Markovianity measure.
    #[arg(long, default_value = "bures")]
    distance: String,
    /// Trajectory time for the traces [default: the maximizing τ of nonunital-nm].
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Format of the traces file.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Measure {
    Blp,
    Rhp,
    Nonunitality,
    NonunitalNm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::InvalidGrid(_) | Error::OutOfRange(_) => EXIT_CONFIG,
            Error::NonInvertibleProcess { .. } | Error::SingularDistance { .. } => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct GridInfo {
    t_max: f64,
    n: usize,
}

#[derive(Serialize)]
struct RunOutput<'a> {
    process: &'a str,
    grid: GridInfo,
    eps: f64,
    distance: String,
    seed: u64,
    tau: f64,
    measures: &'a [MeasureReport],
}

#[derive(Serialize)]
struct Traces {
    tau: f64,
    t: Vec<f64>,
    d_tr: Vec<f64>,
    d_b: Vec<f64>,
    g: Vec<f64>,
    sigma_nu: Vec<f64>,
    purity: Vec<f64>,
}

const TRACE_HEADER: [&str; 6] = ["t", "D_tr", "D_B", "g", "sigma_nu", "purity"];

impl Traces {
    fn to_csv(&self) -> String {
        let mut out = TRACE_HEADER.join(",");
        out.push('\n');
        for i in 0..self.t.len() {
            let row = [self.t[i], self.d_tr[i], self.d_b[i], self.g[i], self.sigma_nu[i], self.purity[i]];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn analyze(process: QuantumProcess, default_t_max: f64, args: RunArgs) -> Result<(), Failure> {
    let t_max = args.t_max.unwrap_or(default_t_max);
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Failure::config(format!("--t-max must be positive, got {t_max}")));
    }
    if args.n < 2 {
        return Err(Failure::config(format!("--n must be at least 2, got {}", args.n)));
    }
    if !(args.eps > 0.0) {
        return Err(Failure::config(format!("--eps must be positive, got {}", args.eps)));
    }
    if let Some(end) = process.t_end() {
        if t_max > end {
            return Err(Failure::config(format!("--t-max {t_max} exceeds the last sample time {end}")));
        }
    }
    let distance: Distance = args.distance.parse().map_err(|_| {
        let names: Vec<&str> = Distance::USER_CHOICES.iter().map(|d| d.name()).collect();
        Failure::config(format!("unknown distance '{}', expected one of {}", args.distance, names.join(", ")))
    })?;
    if let Some(tau) = args.tau {
        if !(0.0..=t_max).contains(&tau) {
            return Err(Failure::config(format!("--tau must lie in [0, {t_max}], got {tau}")));
        }
    }
    let mut selected: Vec<Measure> = Vec::new();
    for m in &args.measures {
        if !selected.contains(m) {
            selected.push(*m);
        }
    }

    let grid = TimeGrid::new(t_max, args.n)?;
    let basis = HermitianBasis::new(process.dim())?;
    let opt = OptimizerConfig::with_seed(args.seed);

    let mut reports = Vec::new();
    let mut nnm: Option<MeasureReport> = None;
    let mut g: Option<Vec<f64>> = None;
    for m in &selected {
        let report = match m {
            Measure::Blp => blp_measure(&process, &grid, &opt, &basis)?,
            Measure::Rhp => {
                let r = rhp_measure(&process, &grid, args.eps, &basis)?;
                g = r.series("g").map(<[f64]>::to_vec);
                r
            }
            Measure::Nonunitality => nonunitality_measure(&process, &grid, &opt, &basis)?,
            Measure::NonunitalNm => {
                let r = nonunital_nm_measure(&process, &grid, distance, &basis)?;
                nnm = Some(r.clone());
                r
            }
        };
        reports.push(report);
    }

    let tau = match (args.tau, &nnm) {
        (Some(tau), _) => tau,
        (None, Some(r)) => maximizing_tau(r),
        (None, None) => maximizing_tau(&nonunital_nm_measure(&process, &grid, distance, &basis)?),
    };
    let g = match g {
        Some(g) => g,
        None => rhp_g_trace(&process, &grid, args.eps, &basis)?,
    };
    let times = grid.points();
    let d_sel = distance_trace_at_tau(&process, &grid, tau, distance, &basis)?;
    let traces = Traces {
        tau,
        d_tr: distance_trace_at_tau(&process, &grid, tau, Distance::Trace, &basis)?,
        d_b: distance_trace_at_tau(&process, &grid, tau, Distance::Bures, &basis)?,
        g,
        sigma_nu: central_difference(&times, &d_sel),
        purity: purity_trace(&process, &grid, &BlochState::maximally_mixed(process.dim()))?,
        t: times,
    };

    let output = RunOutput {
        process: process.label(),
        grid: GridInfo { t_max, n: args.n },
        eps: args.eps,
        distance: distance.name().into(),
        seed: args.seed,
        tau,
        measures: &reports,
    };
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot create {}: {e}", args.out_dir.display()),
    })?;
    let json = serde_json::to_string_pretty(&output).expect("reports serialize");
    write_file(&args.out_dir.join("measures.json"), &json)?;
    match args.format {
        Format::Csv => write_file(&args.out_dir.join("traces.csv"), &traces.to_csv())?,
        Format::Json => write_file(
            &args.out_dir.join("traces.json"),
            &serde_json::to_string_pretty(&traces).expect("traces serialize"),
        )?,
    }
    for r in &reports {
        println!("{:<14} {:.10e}", r.measure, r.value);
    }
    println!("tau* = {tau}");
    Ok(())
}

fn maximizing_tau(r: &MeasureReport) -> f64 {
    match r.maximizer {
        Maximizer::TrajectoryTime { tau } => tau,
        _ => 0.0,
    }
}

#[derive(Serialize)]
struct ChannelSummary {
    dim: usize,
    unital: bool,
    completely_positive: bool,
    min_choi_eigenvalue: f64,
    m: Vec<Vec<f64>>,
    c: Vec<f64>,
}

fn channel(file: &Path) -> Result<(), Failure> {
    let t = load_channel(file)?;
    let basis = HermitianBasis::new(t.dim())?;
    let affine = affine_from_transfer(&t)?;
    let choi = choi_from_transfer(&t, &basis)?;
    let summary = ChannelSummary {
        dim: t.dim(),
        unital: is_unital(&affine, POLICY.structural),
        completely_positive: is_cp(&choi, POLICY.psd_slack),
        min_choi_eigenvalue: choi.min_eigenvalue(),
        m: (0..affine.m.nrows()).map(|i| affine.m.row(i).iter().copied().collect()).collect(),
        c: affine.c.iter().copied().collect(),
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { process } => match process {
            ProcessSpec::Gadc { omega, run } => {
                let gp = GadcProcessParams::new(omega).map_err(Failure::from)?;
                analyze(gadc_process(gp), 20.0, run)
            }
            ProcessSpec::Tabulated { file, run } => {
                let p = load_process(&file)?;
                let end = p.t_end().unwrap_or(20.0);
                analyze(p, end, run)
            }
        },
        Command::Channel { file } => channel(&file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
