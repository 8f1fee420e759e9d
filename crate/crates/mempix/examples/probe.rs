//! Scratch calibration probe (dev tool): prints the headline numbers the
//! acceptance suite will assert, so topology constants can be tuned.

use mempix::analysis;
use mempix::devices::Waveform;
use mempix::engine::{
    self, assemble, dc_sweep, exposure_sweep, log_space, transient, ExposureSettings, SimOptions,
};
use mempix::netlist::Builtin;

fn main() {
    let opts = SimOptions::default();

    // --- criterion 4: 3T log slope at pd ---
    let sys = assemble(Builtin::Pixel3tLog.circuit()).unwrap();
    let values = log_space(1e-9, 1e-6, 13);
    let sweep = dc_sweep(&sys, "pd1", &values, &opts).unwrap();
    let fit = analysis::fit_log_slope(&sweep, &sys, "pd", (1e-9, 1e-6)).unwrap();
    println!(
        "3T log slope: {:.2} mV/dec (target 77.4 +-15% => [65.8, 89.0]), r2 = {:.5}",
        fit.log_slope_mv_per_decade, fit.r_squared
    );

    // --- criterion 6: swing ratio ---
    // Iph steps 1 nA -> 1 uA at 100 us; select pulses every 20 us.
    let step_wave = Waveform::Pwl(vec![(0.0, 1e-9), (100e-6, 1e-9), (100.1e-6, 1e-6)]);
    let swing_opts = SimOptions { dt_max: Some(0.25e-6), ..SimOptions::default() };
    let mut swings = Vec::new();
    for b in [Builtin::Pixel2tm, Builtin::Pixel3tLog] {
        let mut c = b.circuit();
        c.set_photocurrent("pd1", step_wave.clone());
        let sys = assemble(c).unwrap();
        let tr = transient(&sys, 200e-6, &swing_opts).unwrap();
        // Select-high tails: pulse high during [1+20k, 6+20k] us; sample final 2 us.
        let windows: Vec<(f64, f64)> = (0..10)
            .map(|k| {
                let base = 1e-6 + 20e-6 * k as f64;
                (base + 3.0e-6, base + 5.0e-6)
            })
            .collect();
        // Skip the settling cycle right after the step (cycle 5).
        let keep: Vec<(f64, f64)> = windows
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != 5)
            .map(|(_, w)| *w)
            .collect();
        let swing = analysis::output_swing(&tr, "out", &keep).unwrap();
        println!(
            "{} swing(out) = {:.4} V  (pd swing {:.4}); out@95u {:.4} out@185u {:.4} pd@95u {:.4} pd@185u {:.4}",
            b.name(),
            swing,
            analysis::output_swing(&tr, "pd", &keep).unwrap(),
            tr.node_value_at("out", 95e-6).unwrap(),
            tr.node_value_at("out", 185e-6).unwrap(),
            tr.node_value_at("pd", 95e-6).unwrap(),
            tr.node_value_at("pd", 185e-6).unwrap(),
        );
        swings.push(swing);
    }
    println!("swing ratio 2TM/3T = {:.3} (floor 1.5, target 2.0 +-25%)", swings[0] / swings[1]);

    // RCOL sensitivity for centering the ratio.
    for rcol in ["8k"] {
        let text = mempix::netlist::Builtin::Pixel3tLog.source().replace("RCOL out 0 8k", &format!("RCOL out 0 {rcol}"));
        let mut c = mempix::netlist::parse(&text).unwrap();
        c.set_photocurrent("pd1", step_wave.clone());
        let sys = assemble(c).unwrap();
        let tr = transient(&sys, 200e-6, &swing_opts).unwrap();
        let keep: Vec<(f64, f64)> = (0..10)
            .filter(|k| *k != 5)
            .map(|k| {
                let base = 1e-6 + 20e-6 * k as f64;
                (base + 3.0e-6, base + 5.0e-6)
            })
            .collect();
        let swing = analysis::output_swing(&tr, "out", &keep).unwrap();
        println!("  RCOL={rcol}: 3T swing {:.4} ratio {:.3}", swing, swings[0] / swing);
    }

    // --- criterion 5: exposure sweeps ---
    let grid = log_space(1e-11, 1e-6, 10);
    // 4T: 20 us period, sample at 16 us.
    let sys4 = assemble(Builtin::Pixel4tLinlog.circuit()).unwrap();
    let exp4 = ExposureSettings { reset_source: None, sample_at: 16e-6 };
    let sw4 = exposure_sweep(&sys4, "pd1", &grid, &exp4, &opts).unwrap();
    let conv4 = sw4.converged.iter().filter(|&&c| c).count();
    println!("4T exposure sweep: {}/{} converged", conv4, grid.len());
    match analysis::detect_knee(&sw4, &sys4, "pd") {
        Ok(k) => println!(
            "4T knee = {:.3e} A (need [1e-10,1e-7]), lin r2 {:.4}, log r2 {:.4}, improv {:.3}",
            k.knee_current, k.linear_r2, k.log_r2, k.improvement
        ),
        Err(e) => println!("4T knee: ERROR {e}"),
    }
    let dr4 = analysis::dynamic_range_db(&sw4, &sys4, "pd", 0.010);
    println!("4T DR = {:?}", dr4);

    // 3TM: long exposure, reset period 2.5 ms, sample at 2.006 ms.
    let sys3 = assemble(Builtin::Pixel3tm.circuit()).unwrap();
    let reset = Waveform::Pulse {
        v1: 0.0,
        v2: 1.9,
        delay: 1e-6,
        rise: 10e-9,
        fall: 10e-9,
        width: 5e-6,
        period: 2.5e-3,
    };
    let exp3 = ExposureSettings {
        reset_source: Some(("VRST".into(), reset)),
        sample_at: 2.006e-3,
    };
    let sw3 = exposure_sweep(&sys3, "pd1", &grid, &exp3, &opts).unwrap();
    let conv3 = sw3.converged.iter().filter(|&&c| c).count();
    println!("3TM exposure sweep: {}/{} converged", conv3, grid.len());
    match analysis::detect_knee(&sw3, &sys3, "pd") {
        Ok(k) => println!(
            "3TM knee = {:.3e} A, lin r2 {:.4}, log r2 {:.4}, improv {:.3}",
            k.knee_current, k.linear_r2, k.log_r2, k.improvement
        ),
        Err(e) => println!("3TM knee: ERROR {e}"),
    }
    let dr3 = analysis::dynamic_range_db(&sw3, &sys3, "pd", 0.010);
    println!("3TM DR = {:?} (need >= DR4 - 6)", dr3);

    // --- criterion 8: cycle shape (fig7 3TM / fig9 4T) ---
    for (b, iph) in [(Builtin::Pixel3tm, 100e-9), (Builtin::Pixel4tLinlog, 10e-9)] {
        let mut c = b.circuit();
        c.set_photocurrent("pd1", Waveform::Dc(iph));
        let sys = assemble(c).unwrap();
        let tr = transient(&sys, 60e-6, &opts).unwrap();
        let out = tr.node_trace("out").unwrap();
        // Reset-high interval of cycle 2: [21.01, 26.0] us.
        let (mut rh_min, mut rh_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut cyc_max = f64::NEG_INFINITY;
        for (k, &t) in tr.time.iter().enumerate() {
            if t >= 21.02e-6 && t <= 26.0e-6 {
                rh_min = rh_min.min(out[k]);
                rh_max = rh_max.max(out[k]);
            }
            if t >= 21.02e-6 && t <= 41.0e-6 {
                cyc_max = cyc_max.max(out[k]);
            }
        }
        println!(
            "{}: reset-high out in [{:.4},{:.4}], cycle max {:.4} (need reset-high within 50 mV of max)",
            b.name(),
            rh_min,
            rh_max,
            cyc_max
        );
    }

    // --- criterion 7: power ordering over first cycle ---
    let mut powers = Vec::new();
    for b in [Builtin::Pixel3tm, Builtin::Pixel4tLinlog] {
        let sys = assemble(b.circuit()).unwrap();
        let tr = transient(&sys, 20e-6, &opts).unwrap();
        let p = analysis::average_power(&tr, &sys.circuit);
        println!("{} avg power over first cycle = {:.4e} W", b.name(), p);
        // Per-source breakdown.
        for dev in &sys.circuit.devices {
            use mempix::netlist::DeviceKind;
            if !matches!(dev.kind, DeviceKind::VSource | DeviceKind::ISource) {
                continue;
            }
            let i = tr.source_current(&dev.name).unwrap();
            let va = tr.node_trace(sys.circuit.node_label(dev.terminals[0])).unwrap();
            let vb = tr.node_trace(sys.circuit.node_label(dev.terminals[1])).unwrap();
            let n = tr.time.len();
            let mut energy = 0.0;
            for k in 1..n {
                let p0 = -(va[k - 1] - vb[k - 1]) * i[k - 1];
                let p1 = -(va[k] - vb[k]) * i[k];
                energy += 0.5 * (p0 + p1) * (tr.time[k] - tr.time[k - 1]);
            }
            println!(
                "   {}: avg delivered {:.4e} W (i[0]={:.3e}, i[end]={:.3e})",
                dev.name,
                energy / (tr.time[n - 1] - tr.time[0]),
                i[0],
                i[n - 1]
            );
        }
        let out = tr.node_trace("out").unwrap();
        println!(
            "   out[0]={:.3} out@10u={:.3} pd[0]={:.3} pd@10u={:.3}",
            out[0],
            tr.node_value_at("out", 10e-6).unwrap(),
            tr.node_trace("pd").unwrap()[0],
            tr.node_value_at("pd", 10e-6).unwrap()
        );
        powers.push(p);
    }
    println!("power ordering 3TM > 4T: {}", powers[0] > powers[1]);

    // --- criterion 3: memristor fingerprint ---
    for freq in [50.0, 500.0] {
        let period = 1.0 / freq;
        let n = 256;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|k| {
                let t = k as f64 / n as f64 * period;
                (t, 1.0 * (2.0 * std::f64::consts::PI * freq * t).sin())
            })
            .collect();
        let mut text = String::from("* fingerprint\nV1 a 0 PWL(");
        for (t, v) in &pts {
            text.push_str(&format!("{t:e} {v:e} "));
        }
        text.push_str(")\nYMEM m1 a 0 RON=100 ROFF=16k MU=1e-13\n.end");
        let c = mempix::netlist::parse(&text).unwrap();
        let sys = assemble(c).unwrap();
        let tr = transient(&sys, period, &opts).unwrap();
        let v = tr.node_trace("a").unwrap();
        let x = &tr.mem_states[0];
        // Loop area via shoelace over (v, i).
        let card = mempix::devices::MemristorCard { mu_v: 1e-13, ..Default::default() };
        let i: Vec<f64> = v
            .iter()
            .zip(x)
            .map(|(&vv, &xx)| vv / mempix::devices::memristance(xx, &card).unwrap())
            .collect();
        let mut area = 0.0;
        for k in 1..v.len() {
            area += 0.5 * (v[k - 1] * i[k] - v[k] * i[k - 1]);
        }
        let pinch = v
            .iter()
            .zip(&i)
            .filter(|(&vv, _)| vv.abs() <= 1e-9)
            .map(|(_, &ii)| ii.abs())
            .fold(0.0f64, f64::max);
        println!(
            "fingerprint f={freq} Hz: |area| = {:.4e}, worst |i| at pinch = {:.3e} (need <=1e-12), x range [{:.3},{:.3}]",
            area.abs(),
            pinch,
            x.iter().cloned().fold(f64::INFINITY, f64::min),
            x.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
    }
}
