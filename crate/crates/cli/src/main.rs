use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rmp_core::harness::{
    fn_pipeline_check, run_be_experiment, run_estimate, run_ld_experiment, run_llt_experiment, run_spectrum,
    write_report, Estimates, ExperimentConfig,
};
use rmp_core::measure::check_assumptions;
use rmp_core::Error;

#[derive(Parser)]
#[command(name = "rmp", version, about = "Experiments on products of i.i.d. random matrices")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (`key = value` lines); defaults to the benchmark.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "rmp-out")]
    out: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Enumerate the exact law whenever it is small enough.
    #[arg(long, global = true)]
    exact: bool,
    /// Exit with status 2 when an assumption check fails.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Heuristic checks of proximality, strong irreducibility and moments.
    CheckModel,
    /// Estimate γ and ϱ² and cache them in the output directory.
    Estimate,
    /// Leading eigenvalue curve of the perturbed transfer operator.
    Spectrum,
    /// Berry–Esseen sweep (needs `estimate`).
    Be,
    /// Local limit sweep (needs `estimate`).
    Llt,
    /// Large-deviation frequencies (needs `estimate`).
    Ld,
    /// Exact cross-checks of the smoothed-distribution pipeline.
    PipelineCheck,
    /// Merge all outputs into report.txt.
    Report,
}

enum Outcome {
    Done,
    AssumptionFailure,
}

fn load_config(c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(w) = c.workers {
        cfg.workers = w.max(1);
    }
    cfg.exact |= c.exact;
    Ok(cfg)
}

fn assumptions(cfg: &ExperimentConfig, out: &Path, print_all: bool) -> Result<bool, Error> {
    let report = check_assumptions(&cfg.measure, 6, 2000, cfg.seed);
    let text = format!("{report}\n");
    if print_all {
        print!("{text}");
        std::fs::create_dir_all(out)?;
        std::fs::write(out.join("check_model.txt"), &text)?;
    } else if report.hard_failure() {
        eprint!("warning: assumption check failed\n{text}");
    }
    Ok(report.hard_failure())
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let c = &cli.common;
    let cfg = load_config(c)?;
    let out = &c.out;
    let gate = |print_all: bool| -> Result<bool, Error> { Ok(assumptions(&cfg, out, print_all)? && c.strict) };
    match cli.command {
        Command::CheckModel => {
            if gate(true)? {
                return Ok(Outcome::AssumptionFailure);
            }
        }
        Command::Estimate => {
            if gate(false)? {
                return Ok(Outcome::AssumptionFailure);
            }
            let est = run_estimate(&cfg)?;
            est.save(out)?;
            println!("gamma  = {:.9} ± {:.2e}", est.gamma, est.gamma_se);
            println!("rho^2  = {:.9} ± {:.2e}", est.rho_sq, est.rho_sq_se);
        }
        Command::Spectrum => {
            if gate(false)? {
                return Ok(Outcome::AssumptionFailure);
            }
            let r = run_spectrum(&cfg)?;
            r.write_csv(&out.join("lambda_curve.csv"))?;
            let s = r.summary();
            std::fs::write(out.join("spectrum.txt"), &s)?;
            print!("{s}");
        }
        Command::Be => {
            let est = Estimates::load(out)?;
            if gate(false)? {
                return Ok(Outcome::AssumptionFailure);
            }
            let r = run_be_experiment(&cfg, &est)?;
            r.write_csv(&out.join("be_gaps.csv"))?;
            for row in &r.rows {
                println!("n = {:<6} gap = {:.6}  trunc_frac = {:.3e}", row.n, row.gap, row.trunc_frac);
            }
            if let Some(f) = r.fit {
                println!("fitted slope {:.4} ± {:.4}", f.slope, f.slope_se);
            }
        }
        Command::Llt => {
            let est = Estimates::load(out)?;
            if gate(false)? {
                return Ok(Outcome::AssumptionFailure);
            }
            let r = run_llt_experiment(&cfg, &est)?;
            r.write_csv(&out.join("llt.csv"))?;
            for (n, d) in &r.sup_dev {
                println!("n = {n:<6} sup_t deviation = {d:.6}");
            }
            println!("tolerance 0.1·(b−a)/(√(2π)ϱ̂) = {:.6}", r.tolerance);
        }
        Command::Ld => {
            let est = Estimates::load(out)?;
            if gate(false)? {
                return Ok(Outcome::AssumptionFailure);
            }
            let r = run_ld_experiment(&cfg, &est)?;
            r.write_csv(&out.join("ld_rates.csv"))?;
            let mut s = format!("epsilon = {}\n", r.epsilon);
            for ev in [&r.sigma, &r.distance] {
                match ev.fit {
                    Some(f) => s.push_str(&format!(
                        "{}: slope {:.5} (95% upper {:.5}) {}\n",
                        ev.name,
                        f.slope,
                        f.slope_upper95(),
                        if ev.pass() { "decaying" } else { "decay not established" }
                    )),
                    None => s.push_str(&format!("{}: {}\n", ev.name, ev.note)),
                }
            }
            std::fs::write(out.join("ld.txt"), &s)?;
            print!("{s}");
        }
        Command::PipelineCheck => {
            let gamma = match Estimates::load(out) {
                Ok(e) => e.gamma,
                Err(Error::MissingEstimates(_)) => run_estimate(&cfg)?.gamma,
                Err(e) => return Err(e),
            };
            let r = fn_pipeline_check(&cfg, gamma, cfg.pipeline_n)?;
            let s = format!(
                "n = {}\ncharacteristic function: max error {:.3e} at xi = {:.4} ({} frequencies)\n\
                 sandwich constant C = {:.4e} (worst b = {:.4})\n\
                 Fourier identity: max error {:.3e} at t = {}, termwise {:.3e}\n{}\n",
                r.n,
                r.cf_max_error,
                r.cf_worst_xi,
                r.cf_frequencies,
                r.sandwich_constant,
                r.sandwich_worst_b,
                r.fourier_max_error,
                r.fourier_worst_t,
                r.fourier_term_max_error,
                if r.pass() { "PASS" } else { "FAIL" }
            );
            std::fs::create_dir_all(out)?;
            std::fs::write(out.join("pipeline.txt"), &s)?;
            print!("{s}");
            if !r.pass() {
                return Err(Error::Fit(format!("pipeline tolerance {:e} exceeded", r.tolerance)));
            }
        }
        Command::Report => {
            print!("{}", write_report(out)?);
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::AssumptionFailure) => {
            eprintln!("error: assumption check failed (--strict)");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
