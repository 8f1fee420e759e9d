//! Built-in pixel circuits.
//!
//! The source figures are images, so the exact wiring is an interpretation;
//! each topology lives in one constant below so alternatives are one-line
//! changes. Shared conventions:
//!
//! - VDD = 1.2 V (90 nm-class supply).
//! - `vrst` pulse: delay 1 µs, width 5 µs, period 20 µs. In the 3T/2T-M
//!   pixels it drives the row-select gate (the only free gate); in the
//!   4T/3T-M pixels it drives the reset gate, boosted to 1.9 V so the sense
//!   node resets hard to VDD instead of an illumination-dependent soft
//!   level.
//! - The source-follower pixels load the output with the column bias: an
//!   NMOS current-source transistor `MCOL` (gate at VBIAS = 0.5 V, ~10 µA
//!   in saturation). A transistor sink, unlike an ideal current source,
//!   throttles in triode when the column sits low and dissipates rather
//!   than delivers power, which keeps supply-power comparisons honest.
//!   The 3T additionally carries a column-line resistance `RCOL`, the
//!   shipped calibration for the output-amplitude comparison against the
//!   buffer-less 2T-M. The 2T-M column is a 60 fF sample hold — a DC sink
//!   there would pull microamps through the memristor and bury the
//!   nanoamp photocurrent signal.
//! - The 3T/2T-M log load M1 is drawn wide (1.44 µm) to keep the
//!   conversion slope near its weak-inversion value across the full
//!   photocurrent range.

use super::{parse, Circuit};

/// The four reference pixel circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Pixel3tLog,
    Pixel2tm,
    Pixel4tLinlog,
    Pixel3tm,
}

pub const PIXEL_3T_LOG: &str = "\
* pixel_3t_log
VDD vdd 0 DC 1.2
VRST rst 0 PULSE(0 1.2 1u 10n 10n 5u 20u)
VBIAS vbias 0 DC 0.5
M1 vdd vdd pd 0 W=1.44u L=90n
M2 vdd pd sf 0 W=360n L=90n
M3 sf rst out 0 W=360n L=90n
MCOL out vbias 0 0 W=400n L=90n
RCOL out 0 8k
YPD pd1 pd 0 IPH=10n CPD=10f
.tran 10n 100u
.end
";

pub const PIXEL_2TM: &str = "\
* pixel_2tm
VDD vdd 0 DC 1.2
VRST rst 0 PULSE(0 1.2 1u 10n 10n 5u 20u)
M1 vdd vdd pd 0 W=1.44u L=90n
YMEM mem1 pd ns RON=100 ROFF=16k D=10n MU=1e-14 X0=0.5 P=2 WINDOW=JOGLEKAR
C1 pd ns 1p
M3 ns rst out 0 W=360n L=90n
YPD pd1 pd 0 IPH=10n CPD=10f
CCOL out 0 60f
.tran 10n 100u
.end
";

pub const PIXEL_4T_LINLOG: &str = "\
* pixel_4t_linlog
VDD vdd 0 DC 1.2
VRST rst 0 PULSE(0 1.9 1u 10n 10n 5u 20u)
VB vb 0 DC 0.7
VBIAS vbias 0 DC 0.5
M1 vdd rst pd 0 W=360n L=90n
M2 vdd vb pd 0 W=360n L=90n
M3 vdd pd sf 0 W=360n L=90n
M4 sf vdd out 0 W=360n L=90n
MCOL out vbias 0 0 W=400n L=90n
YPD pd1 pd 0 IPH=10n CPD=10f
.tran 10n 100u
.end
";

pub const PIXEL_3TM: &str = "\
* pixel_3tm
VDD vdd 0 DC 1.2
VRST rst 0 PULSE(0 1.9 1u 10n 10n 5u 20u)
VBIAS vbias 0 DC 0.5
M1 vdd rst pd 0 W=360n L=90n
YMEM mem1 vdd nm RON=100 ROFF=16k D=10n MU=1e-14 X0=0.5 P=2 WINDOW=JOGLEKAR
C1 nm pd 1p
M2 vdd pd sf 0 W=360n L=90n
M3 sf vdd out 0 W=360n L=90n
MCOL out vbias 0 0 W=400n L=90n
YPD pd1 pd 0 IPH=10n CPD=10f
.tran 10n 100u
.end
";

impl Builtin {
    pub const ALL: [Builtin; 4] =
        [Builtin::Pixel3tLog, Builtin::Pixel2tm, Builtin::Pixel4tLinlog, Builtin::Pixel3tm];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Pixel3tLog => "pixel_3t_log",
            Builtin::Pixel2tm => "pixel_2tm",
            Builtin::Pixel4tLinlog => "pixel_4t_linlog",
            Builtin::Pixel3tm => "pixel_3tm",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name.to_ascii_lowercase())
    }

    /// Netlist source text of the builtin.
    pub fn source(self) -> &'static str {
        match self {
            Builtin::Pixel3tLog => PIXEL_3T_LOG,
            Builtin::Pixel2tm => PIXEL_2TM,
            Builtin::Pixel4tLinlog => PIXEL_4T_LINLOG,
            Builtin::Pixel3tm => PIXEL_3TM,
        }
    }

    pub fn circuit(self) -> Circuit {
        parse(self.source()).expect("builtin netlists always parse")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{validate, DeviceKind};
    use super::*;
    use crate::devices::DeviceCard;

    #[test]
    fn all_builtins_validate_clean() {
        for b in Builtin::ALL {
            let c = b.circuit();
            let diags = validate(&c);
            assert!(diags.is_empty(), "{}: {diags:?}", b.name());
        }
    }

    /// In-pixel transistors: M-prefixed devices excluding the column load.
    fn pixel_transistors(c: &super::super::Circuit) -> usize {
        c.devices
            .iter()
            .filter(|d| d.kind == DeviceKind::Mosfet && !d.name.eq_ignore_ascii_case("MCOL"))
            .count()
    }

    #[test]
    fn pixel_3t_log_inventory() {
        let c = Builtin::Pixel3tLog.circuit();
        let photodiodes = c.devices.iter().filter(|d| d.kind == DeviceKind::Photodiode).count();
        assert_eq!(pixel_transistors(&c), 3);
        assert_eq!(photodiodes, 1);
        // Supplies: VDD, the select/reset drive, and the column bias.
        assert!(c.find_device("VDD").is_some());
        assert!(c.find_device("VRST").is_some());
        assert!(c.find_device("MCOL").is_some());
    }

    #[test]
    fn pixel_3tm_has_series_mem_cap() {
        let c = Builtin::Pixel3tm.circuit();
        let mems: Vec<_> = c.devices.iter().filter(|d| d.kind == DeviceKind::Memristor).collect();
        assert_eq!(mems.len(), 1);
        let caps: Vec<_> = c
            .devices
            .iter()
            .filter(|d| matches!(d.card, DeviceCard::Capacitor { farads } if farads == 1e-12))
            .collect();
        assert_eq!(caps.len(), 1);
        // Series connection: they share exactly one internal node.
        let shared: Vec<usize> = mems[0]
            .terminals
            .iter()
            .filter(|t| caps[0].terminals.contains(t))
            .copied()
            .collect();
        assert_eq!(shared.len(), 1);
        let internal = shared[0];
        // The internal node touches only these two devices.
        let touching = c
            .devices
            .iter()
            .filter(|d| d.terminals.contains(&internal))
            .count();
        assert_eq!(touching, 2);
        assert_eq!(pixel_transistors(&c), 3, "3T-M keeps three pixel transistors");
    }

    #[test]
    fn pixel_2tm_replaces_follower_with_parallel_pair() {
        let c = Builtin::Pixel2tm.circuit();
        let mem = c.devices.iter().find(|d| d.kind == DeviceKind::Memristor).expect("memristor");
        let cap = c
            .devices
            .iter()
            .find(|d| matches!(d.card, DeviceCard::Capacitor { farads } if farads == 1e-12))
            .expect("coupling cap");
        // Parallel: same node pair.
        let mut m = mem.terminals.clone();
        let mut k = cap.terminals.clone();
        m.sort_unstable();
        k.sort_unstable();
        assert_eq!(m, k);
        // The pair couples the sense node to the select branch.
        assert!(mem.terminals.contains(&c.node_index("pd").unwrap()));
        // Two transistors remain.
        assert_eq!(pixel_transistors(&c), 2);
    }

    #[test]
    fn pixel_4t_inventory() {
        let c = Builtin::Pixel4tLinlog.circuit();
        assert_eq!(pixel_transistors(&c), 4);
        assert_eq!(c.devices.iter().filter(|d| d.kind == DeviceKind::VSource).count(), 4);
    }

    #[test]
    fn builtins_roundtrip_through_serializer() {
        for b in Builtin::ALL {
            let c = b.circuit();
            let text = super::super::serialize(&c);
            let c2 = parse(&text).unwrap();
            assert!(c.structurally_equal(&c2), "{}", b.name());
        }
    }

    #[test]
    fn names_resolve() {
        assert_eq!(Builtin::from_name("pixel_3tm"), Some(Builtin::Pixel3tm));
        assert_eq!(Builtin::from_name("PIXEL_2TM"), Some(Builtin::Pixel2tm));
        assert_eq!(Builtin::from_name("nope"), None);
    }
}
