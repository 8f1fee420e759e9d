//! SPICE-subset netlist: grammar, serializer, validation and the built-in
//! pixel circuits.

mod builtins;
mod parser;
mod serialize;
mod validate;

pub use builtins::Builtin;
pub use parser::{parse, ParseError};
pub use serialize::serialize;
pub use validate::{validate, Diagnostic};

use std::collections::BTreeMap;

use crate::devices::{DeviceCard, Waveform};

/// Device kind tag, derived from the card.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceKind {
    Mosfet,
    Memristor,
    Resistor,
    Capacitor,
    VSource,
    ISource,
    Photodiode,
}

impl DeviceKind {
    pub fn of(card: &DeviceCard) -> Self {
        match card {
            DeviceCard::Mosfet(_) => DeviceKind::Mosfet,
            DeviceCard::Memristor(_) => DeviceKind::Memristor,
            DeviceCard::Resistor { .. } => DeviceKind::Resistor,
            DeviceCard::Capacitor { .. } => DeviceKind::Capacitor,
            DeviceCard::VSource { .. } => DeviceKind::VSource,
            DeviceCard::ISource { .. } => DeviceKind::ISource,
            DeviceCard::Photodiode(_) => DeviceKind::Photodiode,
        }
    }

    /// Number of terminals the kind requires.
    pub fn arity(self) -> usize {
        match self {
            DeviceKind::Mosfet => 4,
            _ => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DeviceKind::Mosfet => "mosfet",
            DeviceKind::Memristor => "memristor",
            DeviceKind::Resistor => "resistor",
            DeviceKind::Capacitor => "capacitor",
            DeviceKind::VSource => "vsource",
            DeviceKind::ISource => "isource",
            DeviceKind::Photodiode => "photodiode",
        }
    }
}

/// One device instance: name, terminals (node indices) and its card.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceInstance {
    pub name: String,
    pub kind: DeviceKind,
    pub terminals: Vec<usize>,
    pub card: DeviceCard,
}

/// A circuit: interned node table plus an ordered device list.
///
/// Node index 0 is always ground ("0"). Node labels are case-insensitive
/// and stored lowercase; indices are dense in first-use order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub name: String,
    nodes: Vec<String>,
    pub devices: Vec<DeviceInstance>,
    /// Captured directive numbers (`.param`, `.tran`, `.dc`).
    pub params: BTreeMap<String, f64>,
    /// Source named by a `.dc` directive, if any.
    pub dc_sweep_source: Option<String>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CircuitError {
    #[error("duplicate device name `{0}`")]
    DuplicateName(String),
    #[error("{kind} `{name}` needs {expected} terminals, got {got}")]
    TerminalCount { kind: &'static str, name: String, expected: usize, got: usize },
    #[error("invalid {kind} `{name}`: {reason}")]
    BadCard { kind: &'static str, name: String, reason: String },
}

impl Circuit {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            nodes: vec!["0".to_string()],
            devices: Vec::new(),
            params: BTreeMap::new(),
            dc_sweep_source: None,
        }
    }

    /// Intern a node label (case-insensitive), returning its index.
    pub fn node(&mut self, label: &str) -> usize {
        let norm = label.to_ascii_lowercase();
        if let Some(idx) = self.nodes.iter().position(|n| *n == norm) {
            idx
        } else {
            self.nodes.push(norm);
            self.nodes.len() - 1
        }
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        let norm = label.to_ascii_lowercase();
        self.nodes.iter().position(|n| *n == norm)
    }

    pub fn node_label(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_labels(&self) -> &[String] {
        &self.nodes
    }

    /// Add a device built from interned node labels.
    pub fn add_device(
        &mut self,
        name: impl Into<String>,
        terminals: &[&str],
        card: DeviceCard,
    ) -> Result<(), CircuitError> {
        let ids: Vec<usize> = terminals.iter().map(|t| self.node(t)).collect();
        self.add_device_indices(name, ids, card)
    }

    pub fn add_device_indices(
        &mut self,
        name: impl Into<String>,
        terminals: Vec<usize>,
        card: DeviceCard,
    ) -> Result<(), CircuitError> {
        let name = name.into();
        let kind = DeviceKind::of(&card);
        if self.find_device(&name).is_some() {
            return Err(CircuitError::DuplicateName(name));
        }
        if terminals.len() != kind.arity() {
            return Err(CircuitError::TerminalCount {
                kind: kind.label(),
                name,
                expected: kind.arity(),
                got: terminals.len(),
            });
        }
        let card_check = match &card {
            DeviceCard::Mosfet(c) => c.validate(),
            DeviceCard::Memristor(c) => c.validate(),
            DeviceCard::Photodiode(c) => c.validate(),
            DeviceCard::VSource { wave } | DeviceCard::ISource { wave } => wave.validate(),
            DeviceCard::Resistor { ohms } => {
                if *ohms > 0.0 { Ok(()) } else { Err("resistance must be positive".into()) }
            }
            DeviceCard::Capacitor { farads } => {
                if *farads >= 0.0 { Ok(()) } else { Err("capacitance must be nonnegative".into()) }
            }
        };
        if let Err(reason) = card_check {
            return Err(CircuitError::BadCard { kind: kind.label(), name, reason });
        }
        self.devices.push(DeviceInstance { name, kind, terminals, card });
        Ok(())
    }

    /// Case-insensitive device lookup.
    pub fn find_device(&self, name: &str) -> Option<&DeviceInstance> {
        self.devices.iter().find(|d| d.name.eq_ignore_ascii_case(name))
    }

    pub fn find_device_idx(&self, name: &str) -> Option<usize> {
        self.devices.iter().position(|d| d.name.eq_ignore_ascii_case(name))
    }

    /// Replace a voltage-source waveform (reset-timing overrides).
    pub fn set_vsource_waveform(&mut self, name: &str, wave: Waveform) -> bool {
        if let Some(idx) = self.find_device_idx(name) {
            if let DeviceCard::VSource { wave: w } = &mut self.devices[idx].card {
                *w = wave;
                return true;
            }
        }
        false
    }

    /// Replace a photodiode's illumination waveform.
    pub fn set_photocurrent(&mut self, name: &str, wave: Waveform) -> bool {
        if let Some(idx) = self.find_device_idx(name) {
            if let DeviceCard::Photodiode(card) = &mut self.devices[idx].card {
                card.iph = wave;
                return true;
            }
        }
        false
    }

    /// Structural equality: same devices (names case-folded), same
    /// node labels per terminal, same cards, same params. Node *indices*
    /// are allowed to differ; labels are what matters.
    pub fn structurally_equal(&self, other: &Circuit) -> bool {
        if self.name != other.name
            || self.devices.len() != other.devices.len()
            || self.params != other.params
            || self.dc_sweep_source != other.dc_sweep_source
        {
            return false;
        }
        self.devices.iter().zip(&other.devices).all(|(a, b)| {
            a.name.eq_ignore_ascii_case(&b.name)
                && a.kind == b.kind
                && a.card == b.card
                && a.terminals.len() == b.terminals.len()
                && a.terminals
                    .iter()
                    .zip(&b.terminals)
                    .all(|(&ta, &tb)| self.nodes[ta] == other.nodes[tb])
        })
    }
}
