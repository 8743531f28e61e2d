use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use infodyn::experiments::{self, Metadata};
use infodyn::oracle::default_schedule;
use infodyn::spectral::DEFAULT_GRID_N;
use infodyn::{Execution, ModelFile, Process, SpectrumGrid, Units};

#[derive(Parser, Debug)]
#[command(name = "infodyn", version, about = "Information dynamics of Gaussian AR and MA processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Model file: {"type": "ar"|"ma", "coeffs": [...], "sigma2": ...}
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Frequency grid size for spectral integrals (power of two)
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_N)]
    grid_n: usize,

    /// Longest segment used by the Toeplitz oracle
    #[arg(long, global = true, default_value_t = 512)]
    ell_max: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, default_value_t = Units::Nats)]
    units: Units,

    /// Output file (stdout if omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Run sweeps on one thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All four rates from the closed-form, spectral and oracle routes (JSON)
    Measures,
    /// Unit-variance AR(1) sweep over psi1 (CSV)
    SweepAr1 {
        #[arg(long, default_value_t = 1999)]
        count: usize,
        /// Sweep the MA(1) family instead
        #[arg(long)]
        dual: bool,
    },
    /// AR(2) stability region on a density x density grid (CSV)
    SweepAr2 {
        #[arg(long, default_value_t = 400)]
        density: usize,
        /// Also write the per-rho-bin envelope of b
        #[arg(long)]
        envelope_out: Option<PathBuf>,
    },
    /// Random stable AR(order) models from sampled poles (CSV)
    ScatterPoles {
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, default_value_t = 5000)]
        count: usize,
        /// 1 is uniform in the disk; larger values push poles outward
        #[arg(long, default_value_t = 1.0)]
        radial_bias: f64,
    },
    /// Oracle convergence over ell = 32, 64, .. up to --ell-max (CSV)
    Oracle,
    /// PIR/MIR exchange under spectrum inversion (JSON)
    Duality,
}

fn load_model(path: Option<&Path>) -> Result<Process> {
    let path = path.context("--model FILE is required for this command")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ModelFile::parse(&text)?.to_process()?)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn main() -> Result<()> {
    match run(Cli::parse()) {
        // `infodyn ... | head` closing the pipe early is not an error
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<io::Error>()
                    .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            }) =>
        {
            Ok(())
        }
        other => other,
    }
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let bits = Units::Bits.per_nat();
    let meta = |command: &str| {
        Metadata::new(command)
            .with("seed", cli.seed)
            .with("grid_n", cli.grid_n)
            .with("units", cli.units)
    };
    let mut out = output(cli.out.as_deref())?;

    match &cli.command {
        Command::Measures => {
            let p = load_model(cli.model.as_deref())?;
            let report = experiments::measures(&p, cli.grid_n, cli.ell_max)?;
            write_json(&mut out, &report.to_json(cli.units))?;
        }
        Command::SweepAr1 { count, dual } => {
            let (records, name, param) = if *dual {
                (experiments::sweep_ma1(*count)?, "sweep-ma1", "b1")
            } else {
                (experiments::sweep_ar1(*count)?, "sweep-ar1", "psi1")
            };
            let meta = meta(name)
                .with("count", count)
                .with("margin", experiments::SWEEP_MARGIN)
                .with("asymptote_b", experiments::format_value(0.5 * 2f64.ln() * cli.units.per_nat()));
            experiments::write_records(&mut out, &meta, &[param], &records, cli.units)?;
        }
        Command::SweepAr2 { density, envelope_out } => {
            let sweep = experiments::sweep_ar2(*density, exec)?;
            let max_b = sweep.max_b_bits();
            let edge = sweep.lower_edge_at_top_bits().unwrap_or(f64::NAN);
            let meta = meta("sweep-ar2")
                .with("density", density)
                .with("rejected", sweep.rejected)
                .with("max_b_bits", experiments::format_value(max_b))
                .with("asymptote_max_b_bits", experiments::format_value(0.5 * 6f64.log2()))
                .with("lower_edge_bits", experiments::format_value(edge))
                .with("asymptote_lower_edge_bits", experiments::format_value(0.5 * 1.5f64.log2()));
            experiments::write_records(&mut out, &meta, &["psi1", "psi2"], &sweep.records, cli.units)?;
            if let Some(path) = envelope_out {
                let mut env = output(Some(path))?;
                sweep.write_envelope(&mut env, &meta.clone().with("table", "envelope"))?;
                env.flush()?;
            }
            eprintln!("max b = {max_b:.4} bits, lower edge at top rho bin = {edge:.4} bits");
        }
        Command::ScatterPoles { order, count, radial_bias } => {
            if !(radial_bias.is_finite() && *radial_bias > 0.0) {
                bail!("--radial-bias must be positive");
            }
            let scatter = experiments::scatter_poles(*order, *count, *radial_bias, cli.seed, exec)?;
            let meta = meta("scatter-poles")
                .with("order", order)
                .with("count", count)
                .with("radial_bias", radial_bias)
                .with("probe_pole", experiments::PROBE_POLE)
                .with("probe_b_bits", experiments::format_value(scatter.probe_b * bits));
            experiments::write_records(&mut out, &meta, &["max_pole_modulus"], &scatter.records, cli.units)?;
        }
        Command::Oracle => {
            let p = load_model(cli.model.as_deref())?;
            let mut ells = default_schedule(cli.ell_max);
            if ells.is_empty() {
                ells.push(cli.ell_max.max(1));
            }
            let study = experiments::oracle_study(&p, &ells, cli.grid_n, exec)?;
            study.write_csv(&mut out, &meta("oracle").with("ell_max", cli.ell_max), cli.units)?;
        }
        Command::Duality => {
            let p = load_model(cli.model.as_deref())?;
            let s = SpectrumGrid::from_process(&p, cli.grid_n)?;
            write_json(&mut out, &experiments::duality(&s).to_json(cli.units, cli.grid_n))?;
        }
    }
    out.flush()?;
    Ok(())
}
