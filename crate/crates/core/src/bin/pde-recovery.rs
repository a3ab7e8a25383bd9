use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pde_recovery::bench::{
    convergence_orders, error_map, read_reports, run_benchmark, write_map_csv, write_orders_csv, BenchmarkConfig, Case,
    CaseInfo, MapGrid, MapOptions,
};
use pde_recovery::{Method, Result};

#[derive(Parser)]
#[command(version, about = "Worst-case error constants of linear solvers for the Poisson problem on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write node and element files for one case.
    Mesh {
        #[arg(long, default_value = "C1")]
        case: Case,
        /// Output directory for `<case>.nodes` and `<case>.elements`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the benchmark sweep and write the tables.
    Run {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Directory for the CSV tables; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add the finest case C4.
        #[arg(long)]
        with_c4: bool,
    },
    /// Convergence orders from a `reports.csv` written by `run`.
    Orders {
        reports: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pointwise error over a polar grid for one method and case.
    Map {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "C1")]
        case: Case,
        #[arg(long, default_value_t = 5)]
        order: u32,
        #[arg(long)]
        radial: Option<usize>,
        #[arg(long)]
        angular: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Overrides applied on top of the config file (or the defaults).
#[derive(Args)]
struct SweepArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    cases: Option<Vec<Case>>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    #[arg(long)]
    construction_order: Option<u32>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    point: Option<Vec<f64>>,
    #[arg(long)]
    threads: Option<usize>,
}

impl SweepArgs {
    fn config(&self) -> Result<BenchmarkConfig> {
        let mut cfg = match &self.config {
            Some(path) => BenchmarkConfig::from_file(path)?,
            None => BenchmarkConfig::default(),
        };
        if let Some(v) = &self.cases {
            cfg.cases = v.clone();
        }
        if let Some(v) = &self.methods {
            cfg.methods = v.clone();
        }
        if let Some(v) = &self.orders {
            cfg.eval_orders = v.clone();
        }
        if let Some(v) = self.construction_order {
            cfg.construction_order = v;
        }
        if let Some(v) = self.scale {
            cfg.scale = v;
        }
        if let Some(p) = &self.point {
            cfg.eval_point = [p[0], p[1]];
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mesh { case, out } => {
            std::fs::create_dir_all(&out)?;
            let mesh = case.mesh();
            mesh.write_nodes(BufWriter::new(File::create(out.join(format!("{case}.nodes")))?))?;
            mesh.write_elements(BufWriter::new(File::create(out.join(format!("{case}.elements")))?))?;
            let info = CaseInfo::new(case, &mesh, 400);
            println!("{}", CaseInfo::CSV_HEADER);
            println!("{}", info.csv_line());
        }
        Command::Run { sweep, out, with_c4 } => {
            let mut cfg = sweep.config()?;
            if with_c4 && !cfg.cases.contains(&Case(4)) {
                cfg.cases.push(Case(4));
            }
            if out.is_some() {
                cfg.output_dir = out;
            }
            let result = run_benchmark(&cfg)?;
            match &cfg.output_dir {
                Some(dir) => eprintln!("tables written to {}", dir.display()),
                None => {
                    let mut stdout = io::stdout().lock();
                    for &m in &result.eval_orders {
                        writeln!(stdout, "# order {m}")?;
                        result.write_table(m, &mut stdout)?;
                    }
                }
            }
            let failed = result.reports.iter().filter(|r| !r.is_computed()).count();
            if failed > 0 {
                eprintln!("{failed} of {} cells not computed (see reason column)", result.reports.len());
            }
        }
        Command::Orders { reports, out } => {
            let reports = read_reports(&std::fs::read_to_string(reports)?)?;
            write_orders_csv(&convergence_orders(&reports), output(out.as_ref())?)?;
        }
        Command::Map { sweep, method, case, order, radial, angular, out } => {
            let cfg = sweep.config()?;
            let opts = MapOptions { radial: radial.unwrap_or(cfg.map.radial), angular: angular.unwrap_or(cfg.map.angular) };
            let map = error_map(&cfg, method, case, order, &MapGrid::polar(opts))?;
            write_map_csv(&map, output(out.as_ref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
