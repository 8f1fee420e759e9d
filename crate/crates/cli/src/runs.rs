//! Shared command plumbing: circuit loading, per-point sweep solving
//! (serial or parallel), and trace/sweep serialization.

use std::path::Path;

use mempix::devices::Waveform;
use mempix::engine::{
    assemble, transient_with_override, EngineError, MnaSystem, SimOptions, Solution, SweepResult,
    TransientResult,
};
use mempix::netlist::{parse, validate, Builtin, Circuit};

use crate::csv::{num, Csv};

/// CLI failure with its process exit code: 1 for user/input errors, 2 for
/// numerical failures.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: u8,
    pub message: String,
}

impl CliError {
    pub fn user(message: impl Into<String>) -> Self {
        Self { exit_code: 1, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { exit_code: 2, message: message.into() }
    }
}

impl From<EngineError> for CliError {
    fn from(err: EngineError) -> Self {
        match err {
            // Bad circuits and bad sweep requests are user errors.
            EngineError::Invalid(_)
            | EngineError::UnknownSource { .. }
            | EngineError::NotASweepableSource(_)
            | EngineError::NonIncreasingSweep => CliError::user(err.to_string()),
            other => CliError::numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::user(err.to_string())
    }
}

/// Load a circuit from a netlist file or a builtin name, reporting parse
/// errors with file, line and column.
pub fn load_circuit(path: Option<&Path>, builtin: Option<&str>) -> Result<(Circuit, String), CliError> {
    match (path, builtin) {
        (Some(_), Some(_)) => Err(CliError::user("give either a netlist file or --builtin, not both")),
        (None, None) => Err(CliError::user("missing input: provide a netlist file or --builtin <name>")),
        (None, Some(name)) => {
            let builtin = Builtin::from_name(name).ok_or_else(|| {
                CliError::user(format!(
                    "unknown builtin `{name}`; valid names: {}",
                    Builtin::ALL.map(|b| b.name()).join(", ")
                ))
            })?;
            Ok((builtin.circuit(), builtin.name().to_string()))
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::user(format!("cannot read `{}`: {e}", path.display())))?;
            let circuit = parse(&text).map_err(|e| {
                let (line, column) = e.position();
                CliError::user(format!("{}:{line}:{column}: {e}", path.display()))
            })?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "netlist".to_string());
            Ok((circuit, stem))
        }
    }
}

pub fn assemble_checked(circuit: Circuit) -> Result<MnaSystem, CliError> {
    let diags = validate(&circuit);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| format!("  - {d}")).collect();
        return Err(CliError::user(format!("circuit is not simulable:\n{}", lines.join("\n"))));
    }
    Ok(assemble(circuit)?)
}

/// Column headers for the unknown vector: node voltages, branch currents.
pub fn unknown_headers(sys: &MnaSystem) -> Vec<String> {
    let mut headers = Vec::new();
    for idx in 1..sys.circuit.node_count() {
        headers.push(format!("v_{}", sys.circuit.node_label(idx)));
    }
    for name in sys.vsource_names() {
        headers.push(format!("i_{name}"));
    }
    headers
}

/// Serialize a transient to CSV: time, unknowns, memristor states.
pub fn transient_csv(sys: &MnaSystem, tr: &TransientResult) -> String {
    let mut header: Vec<String> = vec!["time_s".to_string()];
    header.extend(unknown_headers(sys));
    header.extend(tr.mem_names.iter().map(|n| format!("x_{n}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = Csv::new(&header_refs);
    for k in 0..tr.len() {
        let mut row = Vec::with_capacity(header.len());
        row.push(tr.time[k]);
        for trace in &tr.unknowns {
            row.push(trace[k]);
        }
        for trace in &tr.mem_states {
            row.push(trace[k]);
        }
        csv.num_row(&row);
    }
    csv.into_string()
}

/// Serialize a sweep to CSV: iph, unknowns, memristor states, converged.
pub fn sweep_csv(sys: &MnaSystem, sweep: &SweepResult, comment_block: Option<&str>) -> String {
    let mut header: Vec<String> = vec!["iph_A".to_string()];
    header.extend(unknown_headers(sys));
    header.extend(sys.memristor_names().iter().map(|n| format!("x_{n}")));
    header.push("converged".to_string());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = Csv::new(&header_refs);
    for (k, &value) in sweep.values.iter().enumerate() {
        let sol = &sweep.solutions[k];
        let mut cells: Vec<String> = Vec::with_capacity(header.len());
        cells.push(num(value));
        for &v in &sol.values {
            cells.push(num(v));
        }
        for &x in &sol.mem_states {
            cells.push(num(x));
        }
        cells.push(if sweep.converged[k] { "1".into() } else { "0".into() });
        csv.row(&cells);
    }
    if let Some(block) = comment_block {
        csv.append_comment_block(block);
    }
    csv.into_string()
}

/// How each sweep point is solved.
#[derive(Clone)]
pub enum PointMode {
    /// DC operating point per value.
    Dc,
    /// Reset-and-integrate transient sampled at `sample_at`.
    Exposure { sample_at: f64 },
}

/// Solve sweep points independently (every point cold-started), optionally
/// across a worker pool. Results are byte-identical for any worker count
/// because no state crosses points; all writes happen on the caller's
/// thread.
pub fn solve_sweep_points(
    sys: &MnaSystem,
    source: &str,
    values: &[f64],
    mode: &PointMode,
    opts: &SimOptions,
    jobs: usize,
) -> Result<SweepResult, CliError> {
    let device = mempix::engine::sweep_source_index(sys, source)?;
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EngineError::NonIncreasingSweep.into());
    }
    let jobs = jobs.max(1).min(values.len().max(1));

    let solve_one = |value: f64| -> (Solution, bool) {
        let outcome = match mode {
            PointMode::Dc => mempix::engine::dc_point_with_override(sys, opts, Some((device, value))),
            PointMode::Exposure { sample_at } => {
                transient_with_override(sys, *sample_at, opts, Some((device, value)))
                    .map(|tr| tr.solution_at(tr.len() - 1))
            }
        };
        match outcome {
            Ok(mut sol) => {
                sol.time = value;
                (sol, true)
            }
            Err(_) => (
                Solution { time: value, values: vec![0.0; sys.size()], mem_states: sys.initial_mem_states() },
                false,
            ),
        }
    };

    let mut results: Vec<Option<(Solution, bool)>> = vec![None; values.len()];
    if jobs == 1 {
        for (k, &v) in values.iter().enumerate() {
            results[k] = Some(solve_one(v));
        }
    } else {
        let chunks: Vec<Vec<usize>> = (0..jobs)
            .map(|j| (j..values.len()).step_by(jobs).collect())
            .collect();
        let outputs = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    scope.spawn(|| {
                        chunk
                            .iter()
                            .map(|&k| (k, solve_one(values[k])))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker")).collect::<Vec<_>>()
        });
        for worker in outputs {
            for (k, result) in worker {
                results[k] = Some(result);
            }
        }
    }

    let mut solutions = Vec::with_capacity(values.len());
    let mut converged = Vec::with_capacity(values.len());
    for entry in results {
        let (sol, ok) = entry.expect("all points solved");
        solutions.push(sol);
        converged.push(ok);
    }
    Ok(SweepResult { source: source.to_string(), values: values.to_vec(), solutions, converged })
}

/// Standard exposure reset drive for lin-log measurements.
pub fn exposure_reset(amp: f64, period: f64) -> Waveform {
    Waveform::Pulse {
        v1: 0.0,
        v2: amp,
        delay: 1e-6,
        rise: 10e-9,
        fall: 10e-9,
        width: 5e-6,
        period,
    }
}

/// First node label to use for response fits: `pd` when present.
pub fn default_fit_node(circuit: &Circuit) -> String {
    if circuit.node_index("pd").is_some() {
        return "pd".to_string();
    }
    circuit
        .node_labels()
        .iter()
        .skip(1)
        .next()
        .cloned()
        .unwrap_or_else(|| "0".to_string())
}

/// Pretty-print an operating point.
pub fn format_operating_point(sys: &MnaSystem, sol: &Solution) -> String {
    let mut out = String::new();
    for idx in 1..sys.circuit.node_count() {
        let label = sys.circuit.node_label(idx);
        out.push_str(&format!("v({label}) = {}\n", num(sol.values[idx - 1])));
    }
    for (k, name) in sys.vsource_names().iter().enumerate() {
        let slot = sys.circuit.node_count() - 1 + k;
        out.push_str(&format!("i({name}) = {}\n", num(sol.values[slot])));
    }
    for (k, name) in sys.memristor_names().iter().enumerate() {
        out.push_str(&format!("x({name}) = {}\n", num(sol.mem_states[k])));
    }
    out
}

/// Deselect-aware sampling windows for the select-pulsed pixels: the tail
/// of each select-high interval, skipping listed cycles.
pub fn select_tail_windows(delay: f64, width: f64, period: f64, cycles: usize, skip: &[usize]) -> Vec<(f64, f64)> {
    (0..cycles)
        .filter(|k| !skip.contains(k))
        .map(|k| {
            let base = delay + period * k as f64;
            (base + 0.6 * width, base + 0.96 * width)
        })
        .collect()
}

/// True when a circuit's pulse source exists (used to pick demo windows).
pub fn pulse_params(circuit: &Circuit, name: &str) -> Option<(f64, f64, f64, f64)> {
    match &circuit.find_device(name)?.card {
        mempix::devices::DeviceCard::VSource { wave: Waveform::Pulse { v2, delay, width, period, .. } } => {
            Some((*v2, *delay, *width, *period))
        }
        _ => None,
    }
}
