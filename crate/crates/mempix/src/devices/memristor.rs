//! HP linear-ion-drift memristor model.
//!
//! The device interpolates between two resistive states through a
//! normalized doped-region width x ∈ [0, 1]:
//!
//! ```text
//! M(x)  = Ron·x + Roff·(1 − x)
//! dx/dt = (µv·Ron/D²) · i · f(x)
//! ```
//!
//! with a Joglekar or Biolek window f(x) pinning drift at the boundaries.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MemristorError {
    #[error("memristor state {x} outside [0, 1]")]
    StateOutOfRange { x: f64 },
}

/// Window function selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind {
    /// f(x) = 1 − (2x − 1)^(2p); zero at both boundaries.
    Joglekar { p: u32 },
    /// f(x) = 1 − (x − stp(−i))^(2p); zero only at the boundary the drift
    /// pushes toward, so the device can leave a boundary it was driven into.
    Biolek { p: u32 },
    /// No window (unbounded drift; the engine still clamps x to [0, 1]).
    None,
}

/// Memristor model card. Defaults are the canonical HP TiO₂ values with a
/// 40 nm × 90 nm layout footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct MemristorCard {
    /// Fully-doped (low) resistance (Ω).
    pub r_on: f64,
    /// Undoped (high) resistance (Ω).
    pub r_off: f64,
    /// Oxide thickness (m).
    pub d: f64,
    /// Dopant mobility (m²·V⁻¹·s⁻¹).
    pub mu_v: f64,
    /// Initial normalized state.
    pub x0: f64,
    pub window: WindowKind,
    /// Layout width (m).
    pub width: f64,
    /// Layout height (m).
    pub height: f64,
}

impl Default for MemristorCard {
    fn default() -> Self {
        Self {
            r_on: 100.0,
            r_off: 16e3,
            d: 10e-9,
            mu_v: 1e-14,
            x0: 0.5,
            window: WindowKind::Joglekar { p: 2 },
            width: 40e-9,
            height: 90e-9,
        }
    }
}

impl MemristorCard {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.r_on > 0.0 && self.r_on < self.r_off) {
            return Err("memristor requires 0 < Ron < Roff".into());
        }
        if !(0.0..=1.0).contains(&self.x0) {
            return Err("memristor x0 must be in [0, 1]".into());
        }
        if self.d <= 0.0 || self.mu_v <= 0.0 {
            return Err("memristor D and mobility must be positive".into());
        }
        if let WindowKind::Joglekar { p } | WindowKind::Biolek { p } = self.window {
            if p < 1 {
                return Err("window exponent p must be >= 1".into());
            }
        }
        Ok(())
    }

    /// Drift gain µv·Ron/D² (1/(A·s) per unit window).
    pub fn drift_gain(&self) -> f64 {
        self.mu_v * self.r_on / (self.d * self.d)
    }
}

/// Memristance M(x) in ohms. Strictly decreasing in x.
pub fn memristance(x: f64, card: &MemristorCard) -> Result<f64, MemristorError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(MemristorError::StateOutOfRange { x });
    }
    Ok(card.r_on * x + card.r_off * (1.0 - x))
}

/// Window factor f(x) for a drift driven by current of the given sign.
pub fn window_fn(x: f64, card: &MemristorCard, i_sign: f64) -> f64 {
    match card.window {
        WindowKind::Joglekar { p } => 1.0 - (2.0 * x - 1.0).powi(2 * p as i32),
        WindowKind::Biolek { p } => {
            let stp = if -i_sign >= 0.0 { 1.0 } else { 0.0 };
            1.0 - (x - stp).powi(2 * p as i32)
        }
        WindowKind::None => 1.0,
    }
}

/// State velocity dx/dt (1/s) under current i (A, positive toward the
/// doped region growing).
pub fn memristor_dxdt(x: f64, i: f64, card: &MemristorCard) -> f64 {
    card.drift_gain() * i * window_fn(x, card, i.signum())
}
