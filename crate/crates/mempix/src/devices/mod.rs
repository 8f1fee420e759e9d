//! Compact models for every device kind in the pixel circuits, each
//! exposing current, analytic conductances and (for the memristor) state
//! dynamics for MNA stamping.

pub mod memristor;
pub mod mosfet;
pub mod photodiode;
pub mod sources;

pub use memristor::{memristance, memristor_dxdt, window_fn, MemristorCard, MemristorError, WindowKind};
pub use mosfet::{mosfet_conductances, mosfet_ids, MosfetCard, Polarity};
pub use photodiode::{diode_conductance, diode_current, PhotodiodeCard};
pub use sources::Waveform;

/// Thermal voltage used by the photodiode clamp junction (300 K).
pub const THERMAL_VT: f64 = 25.85e-3;

/// exp() with its argument clamped to ±80: Newton iterates can transiently
/// overshoot far beyond any physical bias.
pub fn exp_clamped(x: f64) -> f64 {
    x.clamp(-80.0, 80.0).exp()
}

/// Kind-specific parameter record of a device instance.
#[derive(Debug, Clone, PartialEq)]
pub enum DeviceCard {
    Mosfet(MosfetCard),
    Memristor(MemristorCard),
    Resistor { ohms: f64 },
    Capacitor { farads: f64 },
    VSource { wave: Waveform },
    ISource { wave: Waveform },
    Photodiode(PhotodiodeCard),
}

/// Implicit integration method for reactive companions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    BackwardEuler,
    Trapezoidal,
}

impl Integrator {
    /// Local truncation error order of the method.
    pub fn order(self) -> u32 {
        match self {
            Integrator::BackwardEuler => 1,
            Integrator::Trapezoidal => 2,
        }
    }
}

/// Companion memory of one reactive device: branch voltage and branch
/// current at the previous accepted time point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Companion {
    pub v_prev: f64,
    pub i_prev: f64,
}

/// What kind of solve the stamp feeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analysis {
    /// Capacitors open, memristors frozen, waveforms evaluated at `time`.
    Dc,
    /// One implicit step of size `dt` ending at `time`.
    Transient { dt: f64, method: Integrator },
}

/// Everything a device needs to linearize itself at one Newton candidate.
#[derive(Debug, Clone, Copy)]
pub struct StampContext {
    pub analysis: Analysis,
    /// Time the solve targets (sweep/DC solves use 0).
    pub time: f64,
    /// Frozen memristor state for this solve.
    pub mem_x: f64,
    /// Reactive companion memory (capacitor / photodiode junction cap).
    pub companion: Companion,
    /// Overrides the photodiode/ISource waveform value (DC sweeps).
    pub source_override: Option<f64>,
    /// Branch-current unknown of a voltage source.
    pub branch: Option<usize>,
    /// Candidate branch current of a voltage source (A).
    pub branch_current: f64,
}

impl StampContext {
    pub fn dc() -> Self {
        Self {
            analysis: Analysis::Dc,
            time: 0.0,
            mem_x: 0.0,
            companion: Companion::default(),
            source_override: None,
            branch: None,
            branch_current: 0.0,
        }
    }
}

/// Linearized MNA contributions of one device at one candidate solution.
///
/// `conductances` holds Jacobian entries over unknown indices (siemens on
/// conductance rows, dimensionless on source-branch rows). `currents`
/// holds the device's KCL residual contributions — current leaving each
/// unknown's node at the candidate (volts-minus-setpoint on branch rows).
/// Ground-referenced terms are dropped by construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stamp {
    pub conductances: Vec<(usize, usize, f64)>,
    pub currents: Vec<(usize, f64)>,
}

impl Stamp {
    fn add_g(&mut self, a: Option<usize>, b: Option<usize>, g: f64) {
        if let Some(a) = a {
            self.conductances.push((a, a, g));
        }
        if let Some(b) = b {
            self.conductances.push((b, b, g));
        }
        if let (Some(a), Some(b)) = (a, b) {
            self.conductances.push((a, b, -g));
            self.conductances.push((b, a, -g));
        }
    }

    /// Current `i` flowing from terminal a to terminal b through the device.
    fn add_i(&mut self, a: Option<usize>, b: Option<usize>, i: f64) {
        if let Some(a) = a {
            self.currents.push((a, i));
        }
        if let Some(b) = b {
            self.currents.push((b, -i));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.conductances.is_empty() && self.currents.is_empty()
    }
}

/// Linearize one device at the candidate terminal voltages.
///
/// `unknowns[k]` is the unknown-vector slot of terminal k (`None` for
/// ground); `volts[k]` the candidate voltage at that terminal. All
/// contributions are finite for finite inputs.
pub fn stamp(
    card: &DeviceCard,
    unknowns: &[Option<usize>],
    volts: &[f64],
    ctx: &StampContext,
) -> Stamp {
    let mut s = Stamp::default();
    match card {
        DeviceCard::Resistor { ohms } => {
            let g = 1.0 / ohms;
            s.add_g(unknowns[0], unknowns[1], g);
            s.add_i(unknowns[0], unknowns[1], g * (volts[0] - volts[1]));
        }
        DeviceCard::Memristor(m) => {
            // Frozen state within one Newton solve: a plain resistor.
            let g = 1.0 / memristance(ctx.mem_x, m).expect("engine keeps x in [0,1]");
            s.add_g(unknowns[0], unknowns[1], g);
            s.add_i(unknowns[0], unknowns[1], g * (volts[0] - volts[1]));
        }
        DeviceCard::Capacitor { farads } => {
            stamp_companion_cap(&mut s, *farads, unknowns[0], unknowns[1], volts, ctx);
        }
        DeviceCard::Mosfet(card) => {
            // Terminal order d, g, s, b; bulk accepted but ignored.
            let (vd, vg, vs) = (volts[0], volts[1], volts[2]);
            let (ids, gm, gds, gms) = mosfet::mosfet_ids_and_conductances(vg, vd, vs, card);
            let (d, g, src) = (unknowns[0], unknowns[1], unknowns[2]);
            for (row, sign) in [(d, 1.0), (src, -1.0)] {
                if let Some(r) = row {
                    if let Some(c) = g {
                        s.conductances.push((r, c, sign * gm));
                    }
                    if let Some(c) = d {
                        s.conductances.push((r, c, sign * gds));
                    }
                    if let Some(c) = src {
                        s.conductances.push((r, c, sign * gms));
                    }
                    s.currents.push((r, sign * ids));
                }
            }
        }
        DeviceCard::ISource { wave } => {
            let i = ctx.source_override.unwrap_or_else(|| wave.eval(ctx.time));
            s.add_i(unknowns[0], unknowns[1], i);
        }
        DeviceCard::VSource { wave } => {
            let br = ctx.branch.expect("voltage source stamped without branch index");
            let e = ctx.source_override.unwrap_or_else(|| wave.eval(ctx.time));
            // Branch current flows from terminal 0 through the source to
            // terminal 1; the branch row enforces v0 − v1 = E(t).
            if let Some(a) = unknowns[0] {
                s.conductances.push((a, br, 1.0));
                s.conductances.push((br, a, 1.0));
                s.currents.push((a, ctx.branch_current));
            }
            if let Some(b) = unknowns[1] {
                s.conductances.push((b, br, -1.0));
                s.conductances.push((br, b, -1.0));
                s.currents.push((b, -ctx.branch_current));
            }
            s.currents.push((br, volts[0] - volts[1] - e));
        }
        DeviceCard::Photodiode(card) => {
            let iph = ctx.source_override.unwrap_or_else(|| card.iph.eval(ctx.time));
            // Photocurrent leaves the n+ terminal (discharges the sense node).
            s.add_i(unknowns[0], unknowns[1], iph);
            stamp_companion_cap(&mut s, card.c_pd, unknowns[0], unknowns[1], volts, ctx);
            if card.clamp_enabled {
                // Junction forward direction: anode = n−, cathode = n+.
                let v_ak = volts[1] - volts[0];
                let id = diode_current(v_ak, card.i_s, THERMAL_VT);
                let gd = diode_conductance(v_ak, card.i_s, THERMAL_VT);
                s.add_g(unknowns[0], unknowns[1], gd);
                s.add_i(unknowns[1], unknowns[0], id);
            }
        }
    }
    s
}

fn stamp_companion_cap(
    s: &mut Stamp,
    farads: f64,
    a: Option<usize>,
    b: Option<usize>,
    volts: &[f64],
    ctx: &StampContext,
) {
    if farads == 0.0 {
        return;
    }
    let Analysis::Transient { dt, method } = ctx.analysis else {
        return; // open at DC
    };
    let v = volts[0] - volts[1];
    let (geq, hist) = match method {
        Integrator::BackwardEuler => {
            let g = farads / dt;
            (g, g * ctx.companion.v_prev)
        }
        Integrator::Trapezoidal => {
            let g = 2.0 * farads / dt;
            (g, g * ctx.companion.v_prev + ctx.companion.i_prev)
        }
    };
    s.add_g(a, b, geq);
    s.add_i(a, b, geq * v - hist);
}

/// Discretized capacitor branch current after a solved step, used to update
/// the companion memory.
pub fn companion_current(farads: f64, v_new: f64, comp: &Companion, dt: f64, method: Integrator) -> f64 {
    match method {
        Integrator::BackwardEuler => farads / dt * (v_new - comp.v_prev),
        Integrator::Trapezoidal => 2.0 * farads / dt * (v_new - comp.v_prev) - comp.i_prev,
    }
}
