//! Netlist serializer. `parse(serialize(c))` is structurally equal to `c`;
//! numbers are emitted in scientific notation that round-trips exactly.

use super::{Circuit, DeviceInstance};
use crate::devices::{DeviceCard, Polarity, Waveform, WindowKind};
use crate::units::format_value as fv;

pub fn serialize(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("* {}\n", c.name));
    for dev in &c.devices {
        out.push_str(&device_line(c, dev));
        out.push('\n');
    }
    for (key, value) in &c.params {
        if key.starts_with("tran.") || key.starts_with("dc.") {
            continue;
        }
        out.push_str(&format!(".param {key}={}\n", fv(*value)));
    }
    if let (Some(dt), Some(tstop)) = (c.params.get("tran.dt"), c.params.get("tran.tstop")) {
        out.push_str(&format!(".tran {} {}\n", fv(*dt), fv(*tstop)));
    }
    if let Some(src) = &c.dc_sweep_source {
        let start = c.params.get("dc.start").copied().unwrap_or(0.0);
        let stop = c.params.get("dc.stop").copied().unwrap_or(0.0);
        let points = c.params.get("dc.points").copied().unwrap_or(0.0);
        let dec = c.params.get("dc.dec").copied().unwrap_or(0.0) != 0.0;
        out.push_str(&format!(
            ".dc {src} {} {} {}{}\n",
            fv(start),
            fv(stop),
            fv(points),
            if dec { " dec" } else { "" }
        ));
    }
    out.push_str(".end\n");
    out
}

fn wave_text(wave: &Waveform) -> String {
    match wave {
        Waveform::Dc(v) => format!("DC {}", fv(*v)),
        Waveform::Pulse { v1, v2, delay, rise, fall, width, period } => format!(
            "PULSE({} {} {} {} {} {} {})",
            fv(*v1),
            fv(*v2),
            fv(*delay),
            fv(*rise),
            fv(*fall),
            fv(*width),
            fv(*period)
        ),
        Waveform::Pwl(points) => {
            let body: Vec<String> = points.iter().map(|(t, v)| format!("{} {}", fv(*t), fv(*v))).collect();
            format!("PWL({})", body.join(" "))
        }
    }
}

/// Waveform text without the `DC ` keyword form, for key=value positions.
fn wave_value_text(wave: &Waveform) -> String {
    match wave {
        Waveform::Dc(v) => fv(*v),
        other => wave_text(other),
    }
}

fn device_line(c: &Circuit, dev: &DeviceInstance) -> String {
    let node = |i: usize| c.node_label(dev.terminals[i]);
    match &dev.card {
        DeviceCard::Resistor { ohms } => format!("{} {} {} {}", dev.name, node(0), node(1), fv(*ohms)),
        DeviceCard::Capacitor { farads } => {
            format!("{} {} {} {}", dev.name, node(0), node(1), fv(*farads))
        }
        DeviceCard::VSource { wave } | DeviceCard::ISource { wave } => {
            format!("{} {} {} {}", dev.name, node(0), node(1), wave_text(wave))
        }
        DeviceCard::Mosfet(m) => format!(
            "{} {} {} {} {} TYPE={} W={} L={} VTH={} KP={} NS={} LAMBDA={} VT={}",
            dev.name,
            node(0),
            node(1),
            node(2),
            node(3),
            match m.polarity {
                Polarity::N => "N",
                Polarity::P => "P",
            },
            fv(m.w),
            fv(m.l),
            fv(m.vth),
            fv(m.kp),
            fv(m.n_slope),
            fv(m.lambda),
            fv(m.temp_vt),
        ),
        DeviceCard::Memristor(m) => {
            let (window, p) = match m.window {
                WindowKind::Joglekar { p } => ("JOGLEKAR", p),
                WindowKind::Biolek { p } => ("BIOLEK", p),
                WindowKind::None => ("NONE", 2),
            };
            format!(
                "YMEM {} {} {} RON={} ROFF={} D={} MU={} X0={} P={p} WINDOW={window} WIDTH={} HEIGHT={}",
                dev.name,
                node(0),
                node(1),
                fv(m.r_on),
                fv(m.r_off),
                fv(m.d),
                fv(m.mu_v),
                fv(m.x0),
                fv(m.width),
                fv(m.height),
            )
        }
        DeviceCard::Photodiode(p) => format!(
            "YPD {} {} {} IPH={} CPD={} IS={} CLAMP={}",
            dev.name,
            node(0),
            node(1),
            wave_value_text(&p.iph),
            fv(p.c_pd),
            fv(p.i_s),
            if p.clamp_enabled { 1 } else { 0 },
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn empty_circuit_is_end_only() {
        let c = Circuit::new("empty");
        let text = serialize(&c);
        assert_eq!(text, "* empty\n.end\n");
    }

    #[test]
    fn pulse_roundtrip() {
        let src = "* t\nV1 a 0 PULSE(0 1.2 1e-6 1e-8 1e-8 5e-6 2e-5)\n.end\n";
        let c = parse(src).unwrap();
        let text = serialize(&c);
        let c2 = parse(&text).unwrap();
        assert!(c.structurally_equal(&c2), "{text}");
    }

    #[test]
    fn directive_roundtrip() {
        let src = "* t\nR1 a 0 1k\n.param vdd=1.2\n.tran 1n 40u\n.dc i1 1e-10 1e-5 13 dec\n.end\n";
        let c = parse(src).unwrap();
        let c2 = parse(&serialize(&c)).unwrap();
        assert!(c.structurally_equal(&c2));
    }
}
