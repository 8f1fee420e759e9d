//! Transient analysis: implicit integration with Newton at every step,
//! step-doubling local-truncation-error control, and explicit-in-state
//! memristor co-integration.

use crate::devices::{
    companion_current, memristor_dxdt, Analysis, Companion, DeviceCard, Integrator,
};
use crate::netlist::DeviceKind;
use crate::numeric::norm_inf;

use super::{
    dc_operating_point_from, newton_solve, source_breakpoints, EngineError, EvalContext,
    MnaSystem, SimOptions, Solution,
};

/// Time-indexed traces of every unknown, memristor state and source current.
#[derive(Debug, Clone)]
pub struct TransientResult {
    pub time: Vec<f64>,
    /// `unknowns[k][j]` = unknown k at time point j.
    pub unknowns: Vec<Vec<f64>>,
    pub unknown_names: Vec<String>,
    /// `mem_states[k][j]` aligned with `mem_names`.
    pub mem_states: Vec<Vec<f64>>,
    pub mem_names: Vec<String>,
    /// Independent-source currents (A): voltage sources report their branch
    /// current (into the + terminal), current sources their set value.
    pub source_currents: Vec<Vec<f64>>,
    pub source_names: Vec<String>,
    node_slot_of: std::collections::BTreeMap<String, usize>,
}

impl TransientResult {
    /// Voltage trace of a node label; ground reads as a zero trace.
    pub fn node_trace(&self, label: &str) -> Option<Vec<f64>> {
        let norm = label.to_ascii_lowercase();
        if norm == "0" {
            return Some(vec![0.0; self.time.len()]);
        }
        self.node_slot_of.get(&norm).map(|&slot| self.unknowns[slot].clone())
    }

    pub fn source_current(&self, name: &str) -> Option<&[f64]> {
        self.source_names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
            .map(|i| self.source_currents[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Solution snapshot at a recorded index.
    pub fn solution_at(&self, idx: usize) -> Solution {
        Solution {
            time: self.time[idx],
            values: self.unknowns.iter().map(|trace| trace[idx]).collect(),
            mem_states: self.mem_states.iter().map(|trace| trace[idx]).collect(),
        }
    }

    /// Linear interpolation of a node trace at an arbitrary time.
    pub fn node_value_at(&self, label: &str, t: f64) -> Option<f64> {
        let trace = self.node_trace(label)?;
        if self.time.is_empty() {
            return None;
        }
        if t <= self.time[0] {
            return Some(trace[0]);
        }
        if t >= *self.time.last().unwrap() {
            return Some(*trace.last().unwrap());
        }
        let idx = self.time.partition_point(|&x| x < t);
        let (t0, t1) = (self.time[idx - 1], self.time[idx]);
        let frac = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        Some(trace[idx - 1] + (trace[idx] - trace[idx - 1]) * frac)
    }
}

/// Working state at one accepted time point.
#[derive(Debug, Clone)]
struct StepState {
    t: f64,
    x: Vec<f64>,
    mem: Vec<f64>,
    comp: Vec<Companion>,
}

pub fn transient(sys: &MnaSystem, tstop: f64, opts: &SimOptions) -> Result<TransientResult, EngineError> {
    transient_with_override(sys, tstop, opts, None)
}

/// Transient with an optional forced source value (exposure sweeps) applied
/// through the whole run, including the DC point at t = 0.
pub fn transient_with_override(
    sys: &MnaSystem,
    tstop: f64,
    opts: &SimOptions,
    source_override: Option<(usize, f64)>,
) -> Result<TransientResult, EngineError> {
    transient_from(sys, tstop, opts, source_override, None)
}

/// Full-control entry point: optional initial unknown vector (skips the DC
/// solve; charge-sharing benchmarks) and source override.
pub fn transient_from(
    sys: &MnaSystem,
    tstop: f64,
    opts: &SimOptions,
    source_override: Option<(usize, f64)>,
    initial: Option<Solution>,
) -> Result<TransientResult, EngineError> {
    let method = opts.integrator;
    let order = method.order();
    let lte_divisor = (2f64.powi(order as i32) - 1.0).max(1.0);

    // Starting point: DC operating point unless caller supplied a state.
    let start = match initial {
        Some(sol) => sol,
        None => dc_operating_point_from(sys, opts, None, source_override)?,
    };
    let mut state = StepState {
        t: 0.0,
        x: start.values.clone(),
        mem: start.mem_states.clone(),
        comp: sys
            .reactive_devices()
            .iter()
            .map(|&i| Companion { v_prev: sys.device_branch_voltage(i, &start.values), i_prev: 0.0 })
            .collect(),
    };

    let mut result = new_result(sys);
    record(sys, &mut result, &state, source_override);

    let breakpoints = source_breakpoints(&sys.circuit, tstop);
    let mut bp_cursor = 0usize;

    let dt_max = opts.fixed_dt.unwrap_or_else(|| opts.dt_max.unwrap_or(tstop / 50.0));
    let mut dt = opts.fixed_dt.unwrap_or(opts.dt_initial).min(dt_max);

    let t_eps = |t: f64| 1e-12 * t.abs().max(1e-9);

    while state.t < tstop - t_eps(tstop) {
        // Land exactly on the next breakpoint or tstop.
        while bp_cursor < breakpoints.len() && breakpoints[bp_cursor] <= state.t + t_eps(state.t) {
            bp_cursor += 1;
        }
        let ceiling = breakpoints.get(bp_cursor).copied().unwrap_or(tstop).min(tstop);

        let mut dt_eff = dt.min(dt_max);
        if opts.fixed_dt.is_none() {
            // Keep memristor state advance below 1% of its range per step.
            for (pos, &dev_idx) in sys.memristor_devices().iter().enumerate() {
                if let DeviceCard::Memristor(card) = &sys.circuit.devices[dev_idx].card {
                    let v = sys.device_branch_voltage(dev_idx, &state.x);
                    let m = crate::devices::memristance(state.mem[pos], card)
                        .expect("state clamped to [0,1]");
                    let rate = card.drift_gain() * (v / m).abs();
                    if rate > 0.0 {
                        dt_eff = dt_eff.min(0.01 / rate);
                    }
                }
            }
            dt_eff = dt_eff.max(opts.dt_min);
        }
        let target = (state.t + dt_eff).min(ceiling);
        let dt_actual = target - state.t;

        if opts.fixed_dt.is_some() {
            // Fixed-grid mode: single solve per step, no error control.
            let next = step(sys, &state, target, method, opts, source_override)?;
            state = next;
            record(sys, &mut result, &state, source_override);
            continue;
        }

        // Step doubling: one full step vs two halves.
        let attempt = (|| -> Result<(StepState, StepState), EngineError> {
            let full = step(sys, &state, target, method, opts, source_override)?;
            let mid = 0.5 * (state.t + target);
            let half1 = step(sys, &state, mid, method, opts, source_override)?;
            let half2 = step(sys, &half1, target, method, opts, source_override)?;
            Ok((full, half2))
        })();

        match attempt {
            Err(_) if dt_actual > opts.dt_min * 2.0 => {
                dt = (dt_actual / 2.0).max(opts.dt_min);
                continue;
            }
            Err(e) => {
                return Err(match e {
                    EngineError::NonConvergence { .. } => {
                        EngineError::StepUnderflow { t: state.t, dt: dt_actual }
                    }
                    other => other,
                })
            }
            Ok((full, half2)) => {
                let diff: Vec<f64> =
                    full.x.iter().zip(&half2.x).map(|(a, b)| a - b).collect();
                let lte = norm_inf(&diff) / lte_divisor;
                if lte > opts.lte_tol && dt_actual > opts.dt_min * 2.0 {
                    let shrink = 0.9 * (opts.lte_tol / lte).powf(1.0 / (order as f64 + 1.0));
                    dt = (dt_actual * shrink.clamp(0.2, 0.9)).max(opts.dt_min);
                    continue;
                }
                state = half2;
                record(sys, &mut result, &state, source_override);
                let grow = if lte > 0.0 {
                    0.9 * (opts.lte_tol / lte).powf(1.0 / (order as f64 + 1.0))
                } else {
                    2.0
                };
                dt = (dt_actual * grow.clamp(0.5, 2.0)).clamp(opts.dt_min, dt_max);
            }
        }
    }

    Ok(result)
}

/// One implicit step from `state` to absolute time `target`.
fn step(
    sys: &MnaSystem,
    state: &StepState,
    target: f64,
    method: Integrator,
    opts: &SimOptions,
    source_override: Option<(usize, f64)>,
) -> Result<StepState, EngineError> {
    let dt = target - state.t;
    debug_assert!(dt > 0.0);
    let ctx = EvalContext {
        analysis: Analysis::Transient { dt, method },
        time: target,
        source_override,
        mem_x: &state.mem,
        companions: &state.comp,
    };
    let out = newton_solve(sys, &state.x, opts.gmin, &ctx, opts)?;
    let x_new = out.x;

    // Companion updates.
    let comp: Vec<Companion> = sys
        .reactive_devices()
        .iter()
        .zip(&state.comp)
        .map(|(&dev_idx, prev)| {
            let farads = match &sys.circuit.devices[dev_idx].card {
                DeviceCard::Capacitor { farads } => *farads,
                DeviceCard::Photodiode(card) => card.c_pd,
                _ => unreachable!(),
            };
            let v_new = sys.device_branch_voltage(dev_idx, &x_new);
            let i_new = if farads > 0.0 {
                companion_current(farads, v_new, prev, dt, method)
            } else {
                0.0
            };
            Companion { v_prev: v_new, i_prev: i_new }
        })
        .collect();

    // Memristor state advance, explicit in state with the same order as the
    // voltage integrator: forward step for backward Euler, Heun for
    // trapezoidal. Currents are evaluated at the accepted solutions with the
    // state frozen at its start-of-step value, then x is hard-clamped.
    let mem: Vec<f64> = sys
        .memristor_devices()
        .iter()
        .enumerate()
        .map(|(pos, &dev_idx)| {
            let card = match &sys.circuit.devices[dev_idx].card {
                DeviceCard::Memristor(card) => card,
                _ => unreachable!(),
            };
            let x0 = state.mem[pos];
            let m0 = crate::devices::memristance(x0, card).expect("clamped");
            let i_start = sys.device_branch_voltage(dev_idx, &state.x) / m0;
            let i_end = sys.device_branch_voltage(dev_idx, &x_new) / m0;
            let next = match method {
                Integrator::BackwardEuler => x0 + dt * memristor_dxdt(x0, i_end, card),
                Integrator::Trapezoidal => {
                    let k1 = memristor_dxdt(x0, i_start, card);
                    let predictor = (x0 + dt * k1).clamp(0.0, 1.0);
                    let k2 = memristor_dxdt(predictor, i_end, card);
                    x0 + 0.5 * dt * (k1 + k2)
                }
            };
            next.clamp(0.0, 1.0)
        })
        .collect();

    Ok(StepState { t: target, x: x_new, mem, comp })
}

fn new_result(sys: &MnaSystem) -> TransientResult {
    let names = sys.unknown_names();
    let mem_names = sys.memristor_names();
    let source_names: Vec<String> = sys
        .circuit
        .devices
        .iter()
        .filter(|d| matches!(d.kind, DeviceKind::VSource | DeviceKind::ISource))
        .map(|d| d.name.clone())
        .collect();
    TransientResult {
        time: Vec::new(),
        unknowns: vec![Vec::new(); names.len()],
        unknown_names: names,
        mem_states: vec![Vec::new(); mem_names.len()],
        mem_names,
        source_currents: vec![Vec::new(); source_names.len()],
        source_names,
        node_slot_of: super::node_slots(sys),
    }
}

fn record(
    sys: &MnaSystem,
    result: &mut TransientResult,
    state: &StepState,
    source_override: Option<(usize, f64)>,
) {
    result.time.push(state.t);
    for (k, trace) in result.unknowns.iter_mut().enumerate() {
        trace.push(state.x[k]);
    }
    for (k, trace) in result.mem_states.iter_mut().enumerate() {
        trace.push(state.mem[k]);
    }
    let mut src = 0usize;
    for (dev_idx, dev) in sys.circuit.devices.iter().enumerate() {
        match &dev.card {
            DeviceCard::VSource { .. } => {
                let pos = sys.vsource_devices().iter().position(|&i| i == dev_idx).unwrap();
                let slot = sys.circuit.node_count() - 1 + pos;
                result.source_currents[src].push(state.x[slot]);
                src += 1;
            }
            DeviceCard::ISource { wave } => {
                let value = match source_override {
                    Some((ov, v)) if ov == dev_idx => v,
                    _ => wave.eval(state.t),
                };
                result.source_currents[src].push(value);
                src += 1;
            }
            _ => {}
        }
    }
}
