//! MNA assembly and the nonlinear solvers.
//!
//! Unknown layout: node voltages for node indices 1..N (ground eliminated)
//! followed by one branch current per voltage source, in declaration order.
//! Everything is deterministic — fixed iteration orders, no parallelism
//! inside one analysis — so repeated runs are bit-identical.

mod sweep;
mod transient;

pub use sweep::{dc_sweep, exposure_sweep, log_space, ExposureSettings, SweepResult};
pub use transient::{transient, transient_from, transient_with_override, TransientResult};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::devices::{
    self, Analysis, Companion, DeviceCard, Integrator, StampContext,
};
use crate::netlist::{validate, Circuit, DeviceKind, Diagnostic};
use crate::numeric::{lu_factor, lu_solve, DenseMatrix, NumericError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("circuit failed validation: {}", format_diags(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("singular MNA matrix near {hint} — check for a floating node or zero-conductance loop")]
    Singular { hint: String },
    #[error("Newton failed to converge{} (gmin {gmin:.1e}): worst residual {residual:.3e} at {node}", fmt_time(.time))]
    NonConvergence { time: Option<f64>, gmin: f64, node: String, residual: f64 },
    #[error("time step underflow at t={t:.6e} s (dt={dt:.3e} s)")]
    StepUnderflow { t: f64, dt: f64 },
    #[error("unknown source `{name}`; sweepable sources: {valid}")]
    UnknownSource { name: String, valid: String },
    #[error("`{0}` is not a current source or photodiode")]
    NotASweepableSource(String),
    #[error("sweep values must be strictly increasing")]
    NonIncreasingSweep,
    #[error("numeric failure: {0}")]
    Numeric(#[from] NumericError),
}

fn format_diags(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

fn fmt_time(t: &Option<f64>) -> String {
    match t {
        Some(t) => format!(" at t={t:.6e} s"),
        None => String::new(),
    }
}

/// Solver options. Defaults are tuned for the nanoamp-scale pixel circuits.
#[derive(Debug, Clone)]
pub struct SimOptions {
    /// Absolute KCL residual tolerance (A).
    pub abstol: f64,
    /// Newton update tolerance (V).
    pub vtol: f64,
    /// Relative residual tolerance against the stamped-current scale.
    pub reltol: f64,
    pub max_newton_iters: usize,
    /// Permanent leak conductance from every node to ground (S).
    pub gmin: f64,
    /// First gmin value of the stepping ladder.
    pub gmin_stepping_start: f64,
    pub dt_initial: f64,
    pub dt_min: f64,
    /// Defaults to tstop/50 when unset.
    pub dt_max: Option<f64>,
    /// Fixed time step; disables adaptive control (integrator order tests).
    pub fixed_dt: Option<f64>,
    pub integrator: Integrator,
    /// Local truncation error target per step (V), via step doubling.
    pub lte_tol: f64,
    /// Per-unknown Newton update clamp (V).
    pub max_step_voltage: f64,
    /// Carry memristor state across sweep points instead of resetting to x0.
    pub carry_memristor_state: bool,
    pub pivot_tol: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            abstol: 1e-12,
            vtol: 1e-6,
            reltol: 1e-4,
            max_newton_iters: 200,
            gmin: 1e-12,
            gmin_stepping_start: 1e-3,
            dt_initial: 1e-9,
            dt_min: 1e-15,
            dt_max: None,
            fixed_dt: None,
            integrator: Integrator::Trapezoidal,
            lte_tol: 1e-4,
            max_step_voltage: 0.5,
            carry_memristor_state: false,
            pivot_tol: 1e-13,
        }
    }
}

/// One converged operating point: the unknown vector plus per-memristor
/// states, tagged with its time (transient) or sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub time: f64,
    pub values: Vec<f64>,
    /// Memristor states aligned with [`MnaSystem::memristor_names`].
    pub mem_states: Vec<f64>,
}

/// Assembled system: the circuit plus its unknown layout.
#[derive(Debug, Clone)]
pub struct MnaSystem {
    pub circuit: Circuit,
    /// Device indices of voltage sources, in branch order.
    vsources: Vec<usize>,
    /// Device indices of memristors.
    memristors: Vec<usize>,
    /// Device indices with companion memory (capacitors, photodiodes).
    reactives: Vec<usize>,
}

impl MnaSystem {
    /// Number of unknowns: (nodes − ground) + voltage-source branches.
    pub fn size(&self) -> usize {
        self.circuit.node_count() - 1 + self.vsources.len()
    }

    /// True when Newton damping is needed at all: exponential devices can
    /// overshoot, linear circuits solve exactly in one step.
    pub fn has_nonlinear(&self) -> bool {
        self.circuit.devices.iter().any(|d| match &d.card {
            DeviceCard::Mosfet(_) => true,
            DeviceCard::Photodiode(card) => card.clamp_enabled,
            _ => false,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.circuit.node_count()
    }

    fn node_slot(&self, node: usize) -> Option<usize> {
        (node > 0).then(|| node - 1)
    }

    fn branch_slot(&self, branch_idx: usize) -> usize {
        self.circuit.node_count() - 1 + branch_idx
    }

    /// Human-readable name of an unknown slot.
    pub fn unknown_name(&self, slot: usize) -> String {
        let n = self.circuit.node_count() - 1;
        if slot < n {
            format!("v({})", self.circuit.node_label(slot + 1))
        } else {
            format!("i({})", self.circuit.devices[self.vsources[slot - n]].name)
        }
    }

    /// Column labels of all unknowns, node voltages then branch currents.
    pub fn unknown_names(&self) -> Vec<String> {
        (0..self.size()).map(|s| self.unknown_name(s)).collect()
    }

    pub fn memristor_names(&self) -> Vec<String> {
        self.memristors.iter().map(|&i| self.circuit.devices[i].name.clone()).collect()
    }

    pub fn vsource_names(&self) -> Vec<String> {
        self.vsources.iter().map(|&i| self.circuit.devices[i].name.clone()).collect()
    }

    /// Voltage of a node label in a solution (ground reads 0).
    pub fn voltage(&self, sol: &Solution, label: &str) -> Option<f64> {
        let node = self.circuit.node_index(label)?;
        Some(match self.node_slot(node) {
            Some(slot) => sol.values[slot],
            None => 0.0,
        })
    }

    /// Branch current of a voltage source (A, flowing into its + terminal).
    pub fn branch_current(&self, sol: &Solution, source: &str) -> Option<f64> {
        let pos = self.vsources.iter().position(|&i| {
            self.circuit.devices[i].name.eq_ignore_ascii_case(source)
        })?;
        Some(sol.values[self.branch_slot(pos)])
    }

    /// Initial memristor states from the cards.
    pub fn initial_mem_states(&self) -> Vec<f64> {
        self.memristors
            .iter()
            .map(|&i| match &self.circuit.devices[i].card {
                DeviceCard::Memristor(m) => m.x0,
                _ => unreachable!(),
            })
            .collect()
    }

    pub(crate) fn memristor_devices(&self) -> &[usize] {
        &self.memristors
    }

    pub(crate) fn reactive_devices(&self) -> &[usize] {
        &self.reactives
    }

    pub(crate) fn vsource_devices(&self) -> &[usize] {
        &self.vsources
    }

    /// Branch voltage (terminal0 − terminal1) of a device in an unknown vector.
    pub(crate) fn device_branch_voltage(&self, device: usize, x: &[f64]) -> f64 {
        let d = &self.circuit.devices[device];
        let va = self.node_slot(d.terminals[0]).map_or(0.0, |s| x[s]);
        let vb = self.node_slot(d.terminals[1]).map_or(0.0, |s| x[s]);
        va - vb
    }
}

/// Assemble a validated circuit into an MNA system.
pub fn assemble(circuit: Circuit) -> Result<MnaSystem, EngineError> {
    let diags = validate(&circuit);
    if !diags.is_empty() {
        return Err(EngineError::Invalid(diags));
    }
    let mut vsources = Vec::new();
    let mut memristors = Vec::new();
    let mut reactives = Vec::new();
    for (i, dev) in circuit.devices.iter().enumerate() {
        match dev.kind {
            DeviceKind::VSource => vsources.push(i),
            DeviceKind::Memristor => memristors.push(i),
            DeviceKind::Capacitor | DeviceKind::Photodiode => reactives.push(i),
            _ => {}
        }
    }
    Ok(MnaSystem { circuit, vsources, memristors, reactives })
}

/// Context for one linearization pass.
#[derive(Debug, Clone)]
pub(crate) struct EvalContext<'a> {
    pub analysis: Analysis,
    pub time: f64,
    /// Sweep override: (device index, forced source value).
    pub source_override: Option<(usize, f64)>,
    /// Frozen memristor states, aligned with `MnaSystem::memristors`.
    pub mem_x: &'a [f64],
    /// Companion memories, aligned with `MnaSystem::reactives`.
    pub companions: &'a [Companion],
}

pub(crate) struct Linearized {
    pub jacobian: DenseMatrix,
    /// KCL residual per unknown row.
    pub residual: Vec<f64>,
    /// Sum of absolute stamped currents per row (residual scale).
    pub scale: Vec<f64>,
}

pub(crate) fn linearize(
    sys: &MnaSystem,
    x: &[f64],
    gmin: f64,
    ctx: &EvalContext,
) -> Linearized {
    let n = sys.size();
    let mut jacobian = DenseMatrix::zeros(n);
    let mut residual = vec![0.0; n];
    let mut scale = vec![0.0; n];

    for (dev_idx, dev) in sys.circuit.devices.iter().enumerate() {
        let unknowns: Vec<Option<usize>> =
            dev.terminals.iter().map(|&t| sys.node_slot(t)).collect();
        let volts: Vec<f64> =
            unknowns.iter().map(|u| u.map_or(0.0, |slot| x[slot])).collect();

        let mut stamp_ctx = StampContext {
            analysis: ctx.analysis,
            time: ctx.time,
            mem_x: 0.0,
            companion: Companion::default(),
            source_override: None,
            branch: None,
            branch_current: 0.0,
        };
        if let Some((ov_dev, value)) = ctx.source_override {
            if ov_dev == dev_idx {
                stamp_ctx.source_override = Some(value);
            }
        }
        if dev.kind == DeviceKind::Memristor {
            let pos = sys.memristors.iter().position(|&i| i == dev_idx).unwrap();
            stamp_ctx.mem_x = ctx.mem_x[pos];
        }
        if matches!(dev.kind, DeviceKind::Capacitor | DeviceKind::Photodiode) {
            let pos = sys.reactives.iter().position(|&i| i == dev_idx).unwrap();
            stamp_ctx.companion = ctx.companions[pos];
        }
        if dev.kind == DeviceKind::VSource {
            let pos = sys.vsources.iter().position(|&i| i == dev_idx).unwrap();
            let slot = sys.branch_slot(pos);
            stamp_ctx.branch = Some(slot);
            stamp_ctx.branch_current = x[slot];
        }

        let stamp = devices::stamp(&dev.card, &unknowns, &volts, &stamp_ctx);
        for (r, c, g) in stamp.conductances {
            jacobian[(r, c)] += g;
        }
        for (r, i) in stamp.currents {
            residual[r] += i;
            scale[r] += i.abs();
        }
    }

    // gmin leak on every node row.
    let nodes = sys.circuit.node_count() - 1;
    for slot in 0..nodes {
        jacobian[(slot, slot)] += gmin;
        residual[slot] += gmin * x[slot];
        scale[slot] += (gmin * x[slot]).abs();
    }

    Linearized { jacobian, residual, scale }
}

/// Independent KCL residual recheck of a solution (used by tests and the
/// convergence guarantee): re-stamps at the given values and returns the
/// per-row residual.
pub fn kcl_residual(sys: &MnaSystem, sol: &Solution, opts: &SimOptions, time: f64) -> Vec<f64> {
    let companions: Vec<Companion> = sys.reactives.iter().map(|_| Companion::default()).collect();
    let ctx = EvalContext {
        analysis: Analysis::Dc,
        time,
        source_override: None,
        mem_x: &sol.mem_states,
        companions: &companions,
    };
    linearize(sys, &sol.values, opts.gmin, &ctx).residual
}

pub(crate) struct NewtonOutcome {
    pub x: Vec<f64>,
    /// LU solves performed; 0 when the initial point already satisfied the
    /// tolerances (read by convergence tests).
    #[allow(dead_code)]
    pub iterations: usize,
}

/// Damped Newton iteration at one (time, gmin) point.
///
/// Convergence requires the KCL residual within `abstol + reltol·scale`
/// on every row *and* the last update within `vtol` — or a residual below
/// the bare absolute floor, which a linear circuit reaches after a single
/// solve.
pub(crate) fn newton_solve(
    sys: &MnaSystem,
    initial: &[f64],
    gmin: f64,
    ctx: &EvalContext,
    opts: &SimOptions,
) -> Result<NewtonOutcome, EngineError> {
    let n = sys.size();
    let node_rows = sys.circuit.node_count() - 1;
    // Damping tames exponential-device overshoot; a linear system must be
    // allowed its one exact full step.
    let step_clamp = if sys.has_nonlinear() { opts.max_step_voltage } else { f64::INFINITY };
    let mut x = initial.to_vec();
    let mut last_delta = f64::INFINITY;
    let mut iterations = 0usize;
    let mut worst;

    loop {
        let lin = linearize(sys, &x, gmin, ctx);
        let mut hard_ok = true;
        let mut soft_ok = true;
        worst = (0, 0.0);
        for r in 0..n {
            let floor = if r < node_rows { opts.abstol } else { opts.vtol };
            let res = lin.residual[r].abs();
            if res > floor {
                hard_ok = false;
            }
            if res > floor + opts.reltol * lin.scale[r] {
                soft_ok = false;
            }
            if res > worst.1 {
                worst = (r, res);
            }
        }
        if hard_ok || (soft_ok && last_delta <= opts.vtol) {
            return Ok(NewtonOutcome { x, iterations });
        }
        if iterations >= opts.max_newton_iters {
            break;
        }

        // rhs = J·x − f(x)
        let jx = lin.jacobian.mul_vec(&x);
        let rhs: Vec<f64> = jx.iter().zip(&lin.residual).map(|(a, b)| a - b).collect();
        let factors = lu_factor(&lin.jacobian, opts.pivot_tol).map_err(|e| match e {
            NumericError::Singular { step, .. } => {
                EngineError::Singular { hint: sys.unknown_name(step.min(n - 1)) }
            }
            other => EngineError::Numeric(other),
        })?;
        let x_new = lu_solve(&factors, &rhs)?;

        let mut delta_norm = 0.0f64;
        for i in 0..n {
            let delta = (x_new[i] - x[i]).clamp(-step_clamp, step_clamp);
            x[i] += delta;
            delta_norm = delta_norm.max(delta.abs());
        }
        last_delta = delta_norm;
        iterations += 1;
    }

    Err(EngineError::NonConvergence {
        time: match ctx.analysis {
            Analysis::Dc => None,
            Analysis::Transient { .. } => Some(ctx.time),
        },
        gmin,
        node: sys.unknown_name(worst.0),
        residual: worst.1,
    })
}

/// Newton with the gmin-stepping fallback ladder.
pub(crate) fn newton_with_gmin_fallback(
    sys: &MnaSystem,
    initial: &[f64],
    ctx: &EvalContext,
    opts: &SimOptions,
) -> Result<NewtonOutcome, EngineError> {
    match newton_solve(sys, initial, opts.gmin, ctx, opts) {
        Ok(out) => Ok(out),
        Err(first_err) => {
            // Retry from scratch, stepping gmin down a decade at a time and
            // warm-starting each solve from the previous one.
            let mut x = vec![0.0; sys.size()];
            let mut g = opts.gmin_stepping_start;
            loop {
                match newton_solve(sys, &x, g, ctx, opts) {
                    Ok(out) => x = out.x,
                    Err(_) => return Err(first_err),
                }
                if g <= opts.gmin {
                    return Ok(NewtonOutcome { x, iterations: 0 });
                }
                g = (g / 10.0).max(opts.gmin);
            }
        }
    }
}

/// DC operating point: capacitors open, memristors frozen at their card x0,
/// sources evaluated at t = 0.
pub fn dc_operating_point(sys: &MnaSystem, opts: &SimOptions) -> Result<Solution, EngineError> {
    dc_operating_point_from(sys, opts, None, None)
}

pub(crate) fn dc_operating_point_from(
    sys: &MnaSystem,
    opts: &SimOptions,
    initial: Option<&[f64]>,
    source_override: Option<(usize, f64)>,
) -> Result<Solution, EngineError> {
    let mem_x = sys.initial_mem_states();
    let companions: Vec<Companion> = sys.reactives.iter().map(|_| Companion::default()).collect();
    let ctx = EvalContext {
        analysis: Analysis::Dc,
        time: 0.0,
        source_override,
        mem_x: &mem_x,
        companions: &companions,
    };
    let zeros;
    let start: &[f64] = match initial {
        Some(x) => x,
        None => {
            zeros = vec![0.0; sys.size()];
            &zeros
        }
    };
    let out = newton_with_gmin_fallback(sys, start, &ctx, opts)?;
    Ok(Solution { time: 0.0, values: out.x, mem_states: mem_x })
}

/// DC operating point with one source forced to a value (device index from
/// [`sweep_source_index`]). Cold-started; front ends use this for
/// order-independent per-point sweeps.
pub fn dc_point_with_override(
    sys: &MnaSystem,
    opts: &SimOptions,
    source_override: Option<(usize, f64)>,
) -> Result<Solution, EngineError> {
    dc_operating_point_from(sys, opts, None, source_override)
}

/// Resolve a sweepable source (current source or photodiode) to its device
/// index.
pub fn sweep_source_index(sys: &MnaSystem, name: &str) -> Result<usize, EngineError> {
    resolve_sweep_source(sys, name)
}

/// Named parameters captured from netlist directives (`.tran`), exposed so
/// front ends can use them as defaults.
pub fn tran_directive(circuit: &Circuit) -> Option<(f64, f64)> {
    match (circuit.params.get("tran.dt"), circuit.params.get("tran.tstop")) {
        (Some(&dt), Some(&tstop)) => Some((dt, tstop)),
        _ => None,
    }
}

/// Sweepable-source lookup shared by the sweep entry points.
pub(crate) fn resolve_sweep_source(
    sys: &MnaSystem,
    name: &str,
) -> Result<usize, EngineError> {
    let valid: Vec<&str> = sys
        .circuit
        .devices
        .iter()
        .filter(|d| matches!(d.kind, DeviceKind::ISource | DeviceKind::Photodiode))
        .map(|d| d.name.as_str())
        .collect();
    match sys.circuit.find_device_idx(name) {
        None => Err(EngineError::UnknownSource {
            name: name.to_string(),
            valid: if valid.is_empty() { "(none)".into() } else { valid.join(", ") },
        }),
        Some(idx) => {
            let dev = &sys.circuit.devices[idx];
            if matches!(dev.kind, DeviceKind::ISource | DeviceKind::Photodiode) {
                Ok(idx)
            } else {
                Err(EngineError::NotASweepableSource(name.to_string()))
            }
        }
    }
}

/// All waveform breakpoints of the circuit's sources within (0, tstop).
pub(crate) fn source_breakpoints(circuit: &Circuit, tstop: f64) -> Vec<f64> {
    let mut bps: Vec<f64> = Vec::new();
    for dev in &circuit.devices {
        let wave = match &dev.card {
            DeviceCard::VSource { wave } | DeviceCard::ISource { wave } => wave,
            DeviceCard::Photodiode(p) => &p.iph,
            _ => continue,
        };
        bps.extend(wave.breakpoints(tstop));
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * a.abs().max(1.0));
    bps
}

/// Map of node label → unknown slot (analysis helpers).
pub fn node_slots(sys: &MnaSystem) -> BTreeMap<String, usize> {
    let mut map = BTreeMap::new();
    for idx in 1..sys.circuit.node_count() {
        map.insert(sys.circuit.node_label(idx).to_string(), idx - 1);
    }
    map
}
