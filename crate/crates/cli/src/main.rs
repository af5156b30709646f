use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use spin_transfer::analytic::find_secular_roots;
use spin_transfer::config::{ChainScheme, ExperimentConfig};
use spin_transfer::dynamics::{find_peaks, peaks_to_csv, scan_probability, TimeStep};
use spin_transfer::experiments::compute_tables;
use spin_transfer::output::fmt_sig;
use spin_transfer::search::{
    optimize_parameter, perfect_transfer_solutions_n4, Objective, ParamGrid, Scheme, SearchSettings,
};
use spin_transfer::{ExcitationBlock, Interaction, Matrix, Model};

/// Single-excitation state transfer along spin-1/2 chains.
#[derive(Parser, Debug)]
#[command(name = "spin-transfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan P(τ) for one chain and list its qualifying peaks.
    Simulate(Common),
    /// Recompute the transfer-time comparison tables of the ten-node experiments.
    Tables(Common),
    /// Roots of the secular equations of the nearest-neighbour XY chain.
    Secular(Common),
    /// Exact perfect-transfer points of the four-node chain.
    Perfect4 {
        #[command(flatten)]
        common: Common,
        /// Largest integer in the enumerated tuples.
        #[arg(long, default_value_t = 5)]
        max_n: u32,
    },
    /// Grid search over δ (webm) or ω (elfm) for the earliest qualifying peak.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Parameter grid as LO:HI:STEP.
        #[arg(long)]
        grid: Option<String>,
        /// min_time or max_probability.
        #[arg(long)]
        objective: Option<Objective>,
    },
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// xy or xxz.
    #[arg(long)]
    model: Option<Model>,
    /// webm, elfm or custom.
    #[arg(long)]
    scheme: Option<ChainScheme>,
    /// nn or all.
    #[arg(long)]
    range: Option<Interaction>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Time step, or "auto".
    #[arg(long)]
    dtau: Option<TimeStep>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Directory for the output files; without it the main table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            model: self.model,
            scheme: self.scheme,
            range: self.range,
            n: self.n,
            delta: self.delta,
            omega: self.omega,
            tau_max: self.tau_max,
            dtau: self.dtau,
            threshold: self.threshold,
            out: self.out.clone(),
            ..Default::default()
        };
        Ok(file.overridden_by(flags))
    }
}

/// Writes `files` into `out`, or prints the first one when there is no
/// output directory. `summary` lines go to stdout only alongside files.
fn emit(out: Option<&Path>, files: &[(&str, String)], summary: &[String]) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, body) in files {
                let path = dir.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
            for line in summary {
                println!("{line}");
            }
        }
        None => {
            if let Some((_, body)) = files.first() {
                print!("{body}");
            }
        }
    }
    Ok(())
}

fn block_csv(matrix: &Matrix) -> String {
    let n = matrix.dim();
    let header: Vec<String> = (1..=n).map(|j| format!("m{j}")).collect();
    let mut out = header.join(",") + "\n";
    for i in 0..n {
        let row: Vec<String> = matrix.row(i).iter().map(|&x| fmt_sig(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn simulate(common: &Common) -> Result<()> {
    let exp = common.resolve()?.experiment()?;
    let block = ExcitationBlock::build(&exp.chain, exp.model, exp.range);
    let trace = scan_probability(&block, exp.tau_max, exp.step)?;
    let peaks = find_peaks(&trace, exp.threshold);
    let summary = vec![
        block.describe(),
        format!("samples: {} at dtau = {}", trace.len(), fmt_sig(trace.step())),
        match peaks.first() {
            Some(p) => format!(
                "first peak with P >= {}: T = {}, P = {}",
                fmt_sig(exp.threshold),
                fmt_sig(p.time),
                fmt_sig(p.probability)
            ),
            None => format!(
                "no peak with P >= {} up to tau = {}",
                fmt_sig(exp.threshold),
                fmt_sig(exp.tau_max)
            ),
        },
    ];
    emit(
        exp.out.as_deref(),
        &[
            ("peaks.csv", peaks_to_csv(&peaks)),
            ("trace.csv", trace.to_csv()),
            ("block.csv", block_csv(block.matrix())),
        ],
        &summary,
    )
}

fn tables(common: &Common) -> Result<()> {
    let config = common.resolve()?;
    let tables = compute_tables()?;
    let summary: Vec<String> = tables
        .reproductions
        .iter()
        .map(|r| {
            format!(
                "{}: peak T = {}, P = {}",
                r.spec.id,
                fmt_sig(r.nearest_peak.time),
                fmt_sig(r.nearest_peak.probability)
            )
        })
        .collect();
    emit(
        config.out.as_deref(),
        &[("tables.csv", tables.to_csv()), ("tables.json", tables.to_json())],
        &summary,
    )
}

fn secular(common: &Common) -> Result<()> {
    let config = common.resolve()?;
    let n = config.n.context("secular needs --n")?;
    let delta = config.delta.unwrap_or(1.0);
    let omega = config.omega.unwrap_or(0.0);
    let roots = find_secular_roots(n, delta, omega)?;
    let mut csv = String::from("lambda,re_p,im_p,parity,A\n");
    for r in &roots {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig(r.eigenvalue()),
            fmt_sig(r.p().re),
            fmt_sig(r.p().im),
            r.parity(),
            fmt_sig(r.normalization())
        ));
    }
    let summary = vec![format!(
        "{} roots for N = {n}, delta = {}, omega = {}",
        roots.len(),
        fmt_sig(delta),
        fmt_sig(omega)
    )];
    emit(config.out.as_deref(), &[("roots.csv", csv)], &summary)
}

fn perfect4(common: &Common, max_n: u32) -> Result<()> {
    let config = common.resolve()?;
    let report = perfect_transfer_solutions_n4(max_n)?;
    let summary = vec![format!(
        "{} solutions, {} tuples skipped",
        report.solutions.len(),
        report.skipped.len()
    )];
    emit(config.out.as_deref(), &[("perfect4.csv", report.to_csv())], &summary)
}

fn parse_grid(text: &str) -> Result<ParamGrid> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("--grid expects LO:HI:STEP, got '{text}'");
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number '{s}' in --grid"))
    };
    Ok(ParamGrid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)?)
}

fn optimize(common: &Common, grid: Option<&str>, objective: Option<Objective>) -> Result<()> {
    let config = common.resolve()?;
    let scheme = config.search_scheme()?;
    let grid = match grid {
        Some(text) => parse_grid(text)?,
        None => match (config.grid, scheme) {
            (Some(g), _) => ParamGrid::new(g.lo, g.hi, g.step)?,
            (None, Scheme::ElfmOmega) => ParamGrid::new(0.0, 5.0, 1e-3)?,
            (None, Scheme::WebmDelta) => ParamGrid::new(1.0, 10.0, 1e-2)?,
        },
    };
    let settings = SearchSettings {
        model: config.model.unwrap_or(Model::Xy),
        range: config.range.unwrap_or(Interaction::AllNode),
        n_nodes: config.n.unwrap_or(10),
        tau_max: config.tau_max()?,
        step: config.step()?,
        threshold: config.threshold()?,
        objective: objective.or(config.objective).unwrap_or_default(),
    };
    let result = optimize_parameter(scheme, grid, &settings)?;
    let name = match scheme {
        Scheme::WebmDelta => "delta",
        Scheme::ElfmOmega => "omega",
    };
    let summary = vec![match result.best.and_then(|b| b.peak.map(|p| (b.param, p))) {
        Some((param, p)) => format!(
            "best {name} = {}: T = {}, P = {}",
            fmt_sig(param),
            fmt_sig(p.time),
            fmt_sig(p.probability)
        ),
        None => format!("no grid value reaches P >= {}", fmt_sig(settings.threshold)),
    }];
    emit(config.out.as_deref(), &[("optimize.csv", result.to_csv())], &summary)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(common) => simulate(common),
        Command::Tables(common) => tables(common),
        Command::Secular(common) => secular(common),
        Command::Perfect4 { common, max_n } => perfect4(common, *max_n),
        Command::Optimize {
            common,
            grid,
            objective,
        } => optimize(common, grid.as_deref(), *objective),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
