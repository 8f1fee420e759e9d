//! Netlist round-trip: parse ∘ serialize is the identity on circuit
//! structure, for the builtins and for randomized valid netlists.

use mempix::devices::{
    DeviceCard, MemristorCard, MosfetCard, PhotodiodeCard, Polarity, Waveform, WindowKind,
};
use mempix::netlist::{parse, serialize, validate, Builtin, Circuit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_waveform(rng: &mut ChaCha8Rng) -> Waveform {
    match rng.gen_range(0..3) {
        0 => Waveform::Dc(rng.gen_range(-5.0..5.0)),
        1 => {
            let rise = rng.gen_range(1e-9..1e-7);
            let fall = rng.gen_range(1e-9..1e-7);
            let width = rng.gen_range(1e-7..1e-5);
            Waveform::Pulse {
                v1: rng.gen_range(-1.0..1.0),
                v2: rng.gen_range(-1.0..2.0),
                delay: rng.gen_range(0.0..1e-5),
                rise,
                fall,
                width,
                period: width + rise + fall + rng.gen_range(1e-7..1e-4),
            }
        }
        _ => {
            let n = rng.gen_range(2..6);
            let mut t = 0.0;
            let points: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    t += rng.gen_range(1e-8..1e-5);
                    (t, rng.gen_range(-2.0..2.0))
                })
                .collect();
            Waveform::Pwl(points)
        }
    }
}

fn random_circuit(seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new(format!("random_{seed}"));
    let nodes = ["0", "a", "b", "c", "d", "vdd", "pd", "out"];
    let mut pick_node = |rng: &mut ChaCha8Rng| nodes[rng.gen_range(0..nodes.len())];

    let devices = rng.gen_range(1..=10);
    for k in 0..devices {
        let n1 = pick_node(&mut rng);
        let mut n2 = pick_node(&mut rng);
        if n2 == n1 {
            n2 = "0";
        }
        if n1 == n2 {
            continue; // both ground: skip
        }
        let choice = rng.gen_range(0..7);
        let result = match choice {
            0 => circuit.add_device(
                format!("R{k}"),
                &[n1, n2],
                DeviceCard::Resistor { ohms: 10f64.powf(rng.gen_range(0.0..6.0)) },
            ),
            1 => circuit.add_device(
                format!("C{k}"),
                &[n1, n2],
                DeviceCard::Capacitor { farads: 10f64.powf(rng.gen_range(-15.0..-9.0)) },
            ),
            2 => circuit.add_device(
                format!("V{k}"),
                &[n1, n2],
                DeviceCard::VSource { wave: random_waveform(&mut rng) },
            ),
            3 => circuit.add_device(
                format!("I{k}"),
                &[n1, n2],
                DeviceCard::ISource { wave: random_waveform(&mut rng) },
            ),
            4 => {
                let mut card =
                    if rng.gen_bool(0.5) { MosfetCard::nmos() } else { MosfetCard::pmos() };
                card.w = rng.gen_range(100e-9..2e-6);
                card.l = rng.gen_range(60e-9..1e-6);
                card.vth = rng.gen_range(-0.6..0.6);
                card.lambda = rng.gen_range(0.0..0.3);
                let n3 = pick_node(&mut rng);
                let n4 = pick_node(&mut rng);
                circuit.add_device(format!("M{k}"), &[n1, n2, n3, n4], DeviceCard::Mosfet(card))
            }
            5 => {
                let r_on = rng.gen_range(50.0..500.0);
                let card = MemristorCard {
                    r_on,
                    r_off: r_on * rng.gen_range(2.0..200.0),
                    d: rng.gen_range(1e-9..50e-9),
                    mu_v: 10f64.powf(rng.gen_range(-15.0..-12.0)),
                    x0: rng.gen_range(0.0..=1.0),
                    window: match rng.gen_range(0..3) {
                        0 => WindowKind::Joglekar { p: rng.gen_range(1..5) },
                        1 => WindowKind::Biolek { p: rng.gen_range(1..5) },
                        _ => WindowKind::None,
                    },
                    width: rng.gen_range(10e-9..100e-9),
                    height: rng.gen_range(10e-9..200e-9),
                };
                circuit.add_device(format!("XM{k}"), &[n1, n2], DeviceCard::Memristor(card))
            }
            _ => {
                let card = PhotodiodeCard {
                    iph: random_waveform(&mut rng),
                    c_pd: rng.gen_range(1e-15..1e-12),
                    i_s: 10f64.powf(rng.gen_range(-16.0..-12.0)),
                    clamp_enabled: rng.gen_bool(0.5),
                };
                circuit.add_device(format!("XP{k}"), &[n1, n2], DeviceCard::Photodiode(card))
            }
        };
        result.expect("generator produces valid devices");
    }
    if rng.gen_bool(0.5) {
        circuit.params.insert("tran.dt".into(), 1e-9);
        circuit.params.insert("tran.tstop".into(), rng.gen_range(1e-6..1e-3));
    }
    if rng.gen_bool(0.3) {
        circuit.params.insert(format!("p{seed}"), rng.gen_range(-10.0..10.0));
    }
    circuit
}

#[test]
fn builtins_roundtrip() {
    for b in Builtin::ALL {
        let c = b.circuit();
        let text = serialize(&c);
        let c2 = parse(&text).unwrap();
        assert!(c.structurally_equal(&c2), "{} failed round trip:\n{text}", b.name());
    }
}

#[test]
fn builtins_validate_clean() {
    for b in Builtin::ALL {
        assert!(validate(&b.circuit()).is_empty(), "{}", b.name());
    }
}

#[test]
fn hundred_random_netlists_roundtrip() {
    for seed in 0..100 {
        let c = random_circuit(seed);
        let text = serialize(&c);
        let c2 = parse(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        assert!(c.structurally_equal(&c2), "seed {seed} differs:\n{text}");
        // Idempotence: serializing the reparse gives identical text.
        assert_eq!(text, serialize(&c2), "seed {seed} not idempotent");
    }
}

#[test]
fn unknown_prefixes_rejected_with_position() {
    for (k, prefix) in ["Q", "Z", "D", "L", "?"].iter().enumerate() {
        let text = format!("R1 a 0 1k\n{prefix}dev a 0 1\n.end");
        match parse(&text) {
            Err(e) => {
                let (line, col) = e.position();
                assert_eq!((line, col), (2, 1), "case {k}");
            }
            Ok(_) => panic!("case {k}: `{prefix}` accepted"),
        }
    }
}
