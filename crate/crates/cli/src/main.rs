//! `sim` — command-line front end for the mempix pixel-circuit simulator.
//!
//! Exit codes: 0 success, 1 user/input error (parse errors carry
//! line/column), 2 numerical failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mempix::analysis;
use mempix::engine::{dc_operating_point, transient, SimOptions};

use mempix_cli::manifest::Emitter;
use mempix_cli::runs::{
    assemble_checked, default_fit_node, exposure_reset, format_operating_point, load_circuit,
    solve_sweep_points, sweep_csv, transient_csv, CliError, PointMode,
};
use mempix_cli::svg::Plot;
use mempix_cli::{demos, report};

#[derive(Parser)]
#[command(
    name = "sim",
    about = "Analog simulator for memristive CMOS pixel circuits",
    after_help = "The SIM_SEED environment variable is reserved for future randomized \
                  features and is currently a documented no-op."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Netlist file (.cir).
    netlist: Option<PathBuf>,
    /// Use a built-in circuit instead of a netlist file.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Transient or operating-point analysis of a netlist or builtin.
    Run {
        #[command(flatten)]
        input: InputArgs,
        /// Transient: time step hint and stop time (engineering suffixes ok).
        #[arg(long, num_args = 2, value_names = ["DT", "TSTOP"])]
        tran: Option<Vec<String>>,
        /// DC operating point only.
        #[arg(long)]
        op: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Log-spaced photocurrent sweep with response fits.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// Swept source: a current source or photodiode name.
        #[arg(long)]
        source: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Points per decade.
        #[arg(long, default_value_t = 10)]
        ppd: usize,
        /// Node for the response fits (defaults to the sense node).
        #[arg(long)]
        node: Option<String>,
        /// Exposure-sampled sweep: one reset/integrate transient per point.
        #[arg(long)]
        exposure: bool,
        /// Sample instant for --exposure (seconds, suffixes ok).
        #[arg(long)]
        sample_at: Option<String>,
        /// Reset pulse period installed on VRST for --exposure.
        #[arg(long)]
        reset_period: Option<String>,
        /// Reset pulse amplitude for --exposure.
        #[arg(long, default_value = "1.9")]
        reset_amp: String,
        /// Worker threads for sweep points.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reproduce a reference figure (fig3, fig6, fig7, fig8, fig9).
    Demo {
        figure: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Comparison reports.
    Report {
        /// Report name (currently: table1).
        which: String,
        /// Area calibration config (flat key=value, see docs/config.md).
        #[arg(long)]
        area_config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Write a builtin circuit as a netlist file.
    Export {
        #[arg(long)]
        builtin: String,
        path: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.exit_code)
        }
    }
}

fn parse_quantity(text: &str, what: &str) -> Result<f64, CliError> {
    mempix::units::parse_value(text)
        .ok_or_else(|| CliError::user(format!("invalid {what} `{text}`")))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { input, tran, op, out_dir } => {
            let (circuit, name) = load_circuit(input.netlist.as_deref(), input.builtin.as_deref())?;
            let tran_params = circuit.params.clone();
            let sys = assemble_checked(circuit)?;
            let opts = SimOptions::default();

            if op {
                let sol = dc_operating_point(&sys, &opts).map_err(CliError::from)?;
                print!("{}", format_operating_point(&sys, &sol));
                return Ok(());
            }

            let (dt, tstop) = match &tran {
                Some(args) => (
                    parse_quantity(&args[0], "time step")?,
                    parse_quantity(&args[1], "stop time")?,
                ),
                None => match tran_directive_params(&tran_params) {
                    Some(pair) => pair,
                    None => {
                        return Err(CliError::user(
                            "no analysis requested: pass --tran <dt> <tstop>, --op, or add a .tran directive",
                        ))
                    }
                },
            };
            if dt <= 0.0 || tstop <= 0.0 {
                return Err(CliError::user("--tran times must be positive"));
            }
            let run_opts = SimOptions { dt_initial: dt, dt_max: Some((tstop / 50.0).max(dt)), ..opts };

            let mut emitter = Emitter::new("run", &name, &out_dir)?;
            emitter.option("tran_dt", dt);
            emitter.option("tran_tstop", tstop);
            let tr = transient(&sys, tstop, &run_opts).map_err(CliError::from)?;
            emitter.emit(&format!("{name}_tran.csv"), &transient_csv(&sys, &tr))?;
            let mut plot = Plot::new(&format!("{name}: transient"), "time (s)", "V", false);
            for idx in 1..sys.circuit.node_count() {
                let label = sys.circuit.node_label(idx).to_string();
                let trace = tr.node_trace(&label).unwrap();
                plot.series(&format!("v({label})"), tr.time.iter().copied().zip(trace).collect());
            }
            emitter.emit(&format!("{name}_tran.svg"), &plot.render())?;
            emitter.finish()?;
            println!("{name}: {} time points to {name}_tran.csv", tr.len());
            Ok(())
        }

        Command::Sweep {
            input,
            source,
            from,
            to,
            ppd,
            node,
            exposure,
            sample_at,
            reset_period,
            reset_amp,
            jobs,
            out_dir,
        } => {
            let (mut circuit, name) = load_circuit(input.netlist.as_deref(), input.builtin.as_deref())?;
            let from = parse_quantity(&from, "--from value")?;
            let to = parse_quantity(&to, "--to value")?;
            if !(from > 0.0 && to > from) {
                return Err(CliError::user("sweep needs 0 < --from < --to"));
            }
            if ppd == 0 {
                return Err(CliError::user("--ppd must be at least 1"));
            }

            let mode = if exposure {
                let sample_at = match sample_at {
                    Some(s) => parse_quantity(&s, "--sample-at")?,
                    None => return Err(CliError::user("--exposure requires --sample-at <t>")),
                };
                if let Some(period) = reset_period {
                    let period = parse_quantity(&period, "--reset-period")?;
                    let amp = parse_quantity(&reset_amp, "--reset-amp")?;
                    if !circuit.set_vsource_waveform("VRST", exposure_reset(amp, period)) {
                        return Err(CliError::user(
                            "--reset-period needs a voltage source named VRST in the circuit",
                        ));
                    }
                }
                PointMode::Exposure { sample_at }
            } else {
                PointMode::Dc
            };

            let fit_node = node.unwrap_or_else(|| default_fit_node(&circuit));
            if circuit.node_index(&fit_node).is_none() {
                return Err(CliError::user(format!("unknown node `{fit_node}`")));
            }
            let sys = assemble_checked(circuit)?;
            let values = mempix::engine::log_space(from, to, ppd);
            let opts = SimOptions::default();
            let sweep = solve_sweep_points(&sys, &source, &values, &mode, &opts, jobs)?;

            let mut summary = String::new();
            let _ = writeln!(
                summary,
                "{name}: {} points over {from:.3e}..{to:.3e} A on node {fit_node}",
                values.len()
            );
            match analysis::fit_log_slope(&sweep, &sys, &fit_node, (from, to)) {
                Ok(fit) => {
                    let _ = writeln!(
                        summary,
                        "log fit: slope {:.2} mV/dec, r2 {:.5} over {} points",
                        fit.log_slope_mv_per_decade, fit.r_squared, fit.points_used
                    );
                }
                Err(e) => {
                    let _ = writeln!(summary, "log fit: {e}");
                }
            }
            match analysis::detect_knee(&sweep, &sys, &fit_node) {
                Ok(knee) => {
                    let _ = writeln!(
                        summary,
                        "knee: {:.3e} A (linear r2 {:.4}, log r2 {:.4})",
                        knee.knee_current, knee.linear_r2, knee.log_r2
                    );
                }
                Err(e) => {
                    let _ = writeln!(summary, "knee: {e}");
                }
            }
            match analysis::dynamic_range_db(&sweep, &sys, &fit_node, 0.010) {
                Ok(dr) => {
                    let _ = writeln!(summary, "dynamic range (10 mV/dec floor): {dr:.1} dB");
                }
                Err(e) => {
                    let _ = writeln!(summary, "dynamic range: {e}");
                }
            }

            let mut emitter = Emitter::new("sweep", &name, &out_dir)?;
            emitter.option("source", &source);
            emitter.option("from", from);
            emitter.option("to", to);
            emitter.option("ppd", ppd);
            emitter.option("jobs", jobs);
            emitter.option("mode", if exposure { "exposure" } else { "dc" });
            emitter.emit(&format!("{name}_sweep.csv"), &sweep_csv(&sys, &sweep, Some(&summary)))?;
            let mut plot = Plot::new(
                &format!("{name}: response vs photocurrent"),
                "photocurrent (A)",
                "V",
                true,
            );
            plot.series(&format!("v({fit_node})"), sweep.converged_points(&sys, &fit_node));
            if fit_node != "out" && sys.circuit.node_index("out").is_some() {
                plot.series("v(out)", sweep.converged_points(&sys, "out"));
            }
            emitter.emit(&format!("{name}_sweep.svg"), &plot.render())?;
            emitter.finish()?;
            print!("{summary}");
            Ok(())
        }

        Command::Demo { figure, jobs, out_dir } => {
            let mut emitter = Emitter::new("demo", &figure, &out_dir)?;
            emitter.option("jobs", jobs);
            let summary = demos::run_demo(&figure, &mut emitter, jobs)?;
            emitter.finish()?;
            print!("{summary}");
            Ok(())
        }

        Command::Report { which, area_config, out_dir } => {
            if which != "table1" {
                return Err(CliError::user(format!("unknown report `{which}`; available: table1")));
            }
            let mut emitter = Emitter::new("report", &which, &out_dir)?;
            if let Some(path) = &area_config {
                emitter.option("area_config", path.display());
            }
            let text = report::run_table1(area_config.as_deref(), &mut emitter)?;
            emitter.finish()?;
            print!("{text}");
            Ok(())
        }

        Command::Export { builtin, path } => {
            let which = mempix::netlist::Builtin::from_name(&builtin).ok_or_else(|| {
                CliError::user(format!(
                    "unknown builtin `{builtin}`; valid names: {}",
                    mempix::netlist::Builtin::ALL.map(|b| b.name()).join(", ")
                ))
            })?;
            std::fs::write(&path, which.source())
                .map_err(|e| CliError::user(format!("cannot write `{}`: {e}", path.display())))?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn tran_directive_params(params: &std::collections::BTreeMap<String, f64>) -> Option<(f64, f64)> {
    match (params.get("tran.dt"), params.get("tran.tstop")) {
        (Some(&dt), Some(&tstop)) => Some((dt, tstop)),
        _ => None,
    }
}
