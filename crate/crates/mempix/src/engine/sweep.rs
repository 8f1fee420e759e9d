//! DC photocurrent sweeps and exposure-sampled sweeps.

use crate::devices::Waveform;

use super::{
    dc_operating_point_from, resolve_sweep_source, transient_from, EngineError, MnaSystem,
    SimOptions, Solution,
};

/// Per-point solutions over a swept source value.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub source: String,
    pub values: Vec<f64>,
    pub solutions: Vec<Solution>,
    pub converged: Vec<bool>,
}

impl SweepResult {
    /// Voltage trace of one node across the sweep.
    pub fn node_curve(&self, sys: &MnaSystem, label: &str) -> Option<Vec<f64>> {
        self.solutions.iter().map(|s| sys.voltage(s, label)).collect()
    }

    /// (value, voltage) pairs restricted to converged points.
    pub fn converged_points(&self, sys: &MnaSystem, label: &str) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .zip(&self.solutions)
            .zip(&self.converged)
            .filter(|(_, &ok)| ok)
            .filter_map(|((v, sol), _)| sys.voltage(sol, label).map(|volt| (*v, volt)))
            .collect()
    }
}

/// Log-spaced sweep values, `points_per_decade` per decade, inclusive ends.
pub fn log_space(from: f64, to: f64, points_per_decade: usize) -> Vec<f64> {
    assert!(from > 0.0 && to > from, "log spacing requires 0 < from < to");
    let decades = (to / from).log10();
    let n = (decades * points_per_decade as f64).round() as usize;
    (0..=n).map(|k| from * 10f64.powf(k as f64 / points_per_decade as f64)).collect()
}

/// DC sweep of a current source or photodiode photocurrent, warm-starting
/// every point from the previous solution. Memristors stay frozen at x0;
/// per-point failures are recorded and the sweep continues.
pub fn dc_sweep(
    sys: &MnaSystem,
    source_name: &str,
    values: &[f64],
    opts: &SimOptions,
) -> Result<SweepResult, EngineError> {
    let device = resolve_sweep_source(sys, source_name)?;
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EngineError::NonIncreasingSweep);
    }

    let mut solutions = Vec::with_capacity(values.len());
    let mut converged = Vec::with_capacity(values.len());
    let mut warm: Option<Vec<f64>> = None;

    for &value in values {
        match dc_operating_point_from(sys, opts, warm.as_deref(), Some((device, value))) {
            Ok(mut sol) => {
                warm = Some(sol.values.clone());
                sol.time = value;
                solutions.push(sol);
                converged.push(true);
            }
            Err(_) => {
                // Keep the sweep going; mark the point and reuse the last
                // good warm start.
                let placeholder = Solution {
                    time: value,
                    values: warm.clone().unwrap_or_else(|| vec![0.0; sys.size()]),
                    mem_states: sys.initial_mem_states(),
                };
                solutions.push(placeholder);
                converged.push(false);
            }
        }
    }

    Ok(SweepResult {
        source: source_name.to_string(),
        values: values.to_vec(),
        solutions,
        converged,
    })
}

/// Reset/integrate/sample schedule of an exposure-sampled sweep.
#[derive(Debug, Clone)]
pub struct ExposureSettings {
    /// Reset drive to install on this voltage source (None keeps the
    /// circuit's own waveform).
    pub reset_source: Option<(String, Waveform)>,
    /// Absolute sample time; the transient runs exactly this long.
    pub sample_at: f64,
}

/// Exposure-sampled sweep: for each photocurrent value, run one
/// reset-and-integrate transient and record the solution at the sample
/// instant. This is how the lin-log pixels' response curves are measured —
/// their series capacitor blocks DC, so a plain DC sweep cannot see the
/// integrating branch.
pub fn exposure_sweep(
    sys: &MnaSystem,
    source_name: &str,
    values: &[f64],
    settings: &ExposureSettings,
    opts: &SimOptions,
) -> Result<SweepResult, EngineError> {
    let device = resolve_sweep_source(sys, source_name)?;
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EngineError::NonIncreasingSweep);
    }

    // Install the exposure reset schedule if requested.
    let mut local: MnaSystem;
    let sys = if let Some((name, wave)) = &settings.reset_source {
        local = sys.clone();
        if !local.circuit.set_vsource_waveform(name, wave.clone()) {
            return Err(EngineError::UnknownSource {
                name: name.clone(),
                valid: local
                    .circuit
                    .devices
                    .iter()
                    .filter(|d| d.kind == crate::netlist::DeviceKind::VSource)
                    .map(|d| d.name.clone())
                    .collect::<Vec<_>>()
                    .join(", "),
            });
        }
        &local
    } else {
        local = sys.clone();
        &local
    };

    let mut solutions = Vec::with_capacity(values.len());
    let mut converged = Vec::with_capacity(values.len());
    let mut carried_mem: Option<Vec<f64>> = None;

    for &value in values {
        let initial = carried_mem.as_ref().map(|mem| Solution {
            time: 0.0,
            values: Vec::new(), // filled below: only used when carrying state
            mem_states: mem.clone(),
        });
        // Fresh transient per point. When carrying memristor state we still
        // recompute the DC start; only the state is inherited.
        let run = if let Some(init) = initial {
            let dc = dc_operating_point_from(sys, opts, None, Some((device, value)));
            match dc {
                Ok(mut sol) => {
                    sol.mem_states = init.mem_states;
                    transient_from(sys, settings.sample_at, opts, Some((device, value)), Some(sol))
                }
                Err(e) => Err(e),
            }
        } else {
            transient_from(sys, settings.sample_at, opts, Some((device, value)), None)
        };

        match run {
            Ok(tr) => {
                let mut sol = tr.solution_at(tr.len() - 1);
                if opts.carry_memristor_state {
                    carried_mem = Some(sol.mem_states.clone());
                }
                sol.time = value;
                solutions.push(sol);
                converged.push(true);
            }
            Err(_) => {
                solutions.push(Solution {
                    time: value,
                    values: vec![0.0; sys.size()],
                    mem_states: sys.initial_mem_states(),
                });
                converged.push(false);
            }
        }
    }

    Ok(SweepResult {
        source: source_name.to_string(),
        values: values.to_vec(),
        solutions,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{assemble, SimOptions};
    use crate::netlist::parse;

    #[test]
    fn log_space_point_count() {
        let v = log_space(1e-10, 1e-5, 13);
        assert_eq!(v.len(), 66); // 5 decades · 13 + 1
        assert!((v[0] - 1e-10).abs() < 1e-24);
        assert!((v[65] - 1e-5).abs() < 1e-18);
        for w in v.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn linear_circuit_sweep_is_superposition() {
        // I into 1 kΩ ∥ 1 kΩ: v = I·500.
        let sys = assemble(parse("I1 0 a DC 1m\nR1 a 0 1k\nR2 a 0 1k\n.end").unwrap()).unwrap();
        let opts = SimOptions::default();
        let values = [1e-3, 2e-3, 3e-3];
        let sweep = dc_sweep(&sys, "I1", &values, &opts).unwrap();
        for (k, &i) in values.iter().enumerate() {
            let v = sys.voltage(&sweep.solutions[k], "a").unwrap();
            assert!((v - i * 500.0).abs() < 1e-9, "{v} vs {}", i * 500.0);
            assert!(sweep.converged[k]);
        }
    }

    #[test]
    fn unknown_source_is_reported_with_valid_names() {
        let sys = assemble(parse("I1 0 a DC 1m\nR1 a 0 1k\n.end").unwrap()).unwrap();
        let err = dc_sweep(&sys, "IX", &[1e-3, 2e-3], &SimOptions::default()).unwrap_err();
        match err {
            super::EngineError::UnknownSource { valid, .. } => assert!(valid.contains("I1")),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn non_source_rejected() {
        let sys = assemble(parse("I1 0 a DC 1m\nR1 a 0 1k\n.end").unwrap()).unwrap();
        let err = dc_sweep(&sys, "R1", &[1e-3, 2e-3], &SimOptions::default()).unwrap_err();
        assert!(matches!(err, super::EngineError::NotASweepableSource(_)));
    }

    #[test]
    fn decreasing_values_rejected() {
        let sys = assemble(parse("I1 0 a DC 1m\nR1 a 0 1k\n.end").unwrap()).unwrap();
        let err = dc_sweep(&sys, "I1", &[2e-3, 1e-3], &SimOptions::default()).unwrap_err();
        assert!(matches!(err, super::EngineError::NonIncreasingSweep));
    }

    #[test]
    fn pixel_3t_log_sweep_monotone() {
        let sys = assemble(crate::netlist::Builtin::Pixel3tLog.circuit()).unwrap();
        let opts = SimOptions::default();
        let values = log_space(1e-10, 1e-5, 13);
        let sweep = dc_sweep(&sys, "pd1", &values, &opts).unwrap();
        assert!(sweep.converged.iter().all(|&c| c));
        let pd = sweep.node_curve(&sys, "pd").unwrap();
        for w in pd.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "PD must fall as photocurrent rises: {w:?}");
        }
    }

    #[test]
    fn warm_equals_cold_start() {
        let sys = assemble(crate::netlist::Builtin::Pixel3tLog.circuit()).unwrap();
        // Converged points agree only to solver resolution: the node-voltage
        // error floor is abstol/gm, which at nanoamp bias (gm ~ 1e-7 S) is
        // microvolts per 1e-12 A of residual slack. Path independence at
        // 10·vtol therefore needs the residual knobs tightened with vtol.
        let opts = SimOptions {
            abstol: 1e-16,
            vtol: 1e-8,
            reltol: 1e-9,
            ..SimOptions::default()
        };
        let values = log_space(1e-9, 1e-6, 5);
        let warm = dc_sweep(&sys, "pd1", &values, &opts).unwrap();
        // Cold: every point solved from scratch.
        let mut cold = Vec::new();
        let device = crate::engine::resolve_sweep_source(&sys, "pd1").unwrap();
        for &v in &values {
            let sol =
                crate::engine::dc_operating_point_from(&sys, &opts, None, Some((device, v))).unwrap();
            cold.push(sol);
        }
        for (k, sol) in warm.solutions.iter().enumerate() {
            for (a, b) in sol.values.iter().zip(&cold[k].values) {
                assert!((a - b).abs() <= 10.0 * opts.vtol, "point {k}: {a} vs {b}");
            }
        }
    }
}
