//! Photodiode composite: photocurrent sink ∥ junction capacitance ∥
//! optional clamp diode.
//!
//! The pixel circuits treat the photodiode as a photocurrent source with an
//! integrating node; the clamp diode is the junction itself, which conducts
//! forward (photovoltaic mode) once integration drives the node below
//! ground and turns the otherwise-linear discharge into a logarithmic
//! settle.

use super::exp_clamped;
use super::sources::Waveform;

#[derive(Debug, Clone, PartialEq)]
pub struct PhotodiodeCard {
    /// Photocurrent waveform (A); flows out of the n+ terminal.
    pub iph: Waveform,
    /// Junction capacitance (F).
    pub c_pd: f64,
    /// Reverse saturation current of the clamp diode (A).
    pub i_s: f64,
    pub clamp_enabled: bool,
}

impl Default for PhotodiodeCard {
    fn default() -> Self {
        Self { iph: Waveform::Dc(10e-9), c_pd: 10e-15, i_s: 1e-15, clamp_enabled: true }
    }
}

impl PhotodiodeCard {
    pub fn validate(&self) -> Result<(), String> {
        if self.c_pd < 0.0 {
            return Err("photodiode capacitance must be nonnegative".into());
        }
        if self.i_s < 0.0 {
            return Err("photodiode saturation current must be nonnegative".into());
        }
        self.iph.validate()
    }
}

/// Shockley diode current i_s·(exp(vd/vt) − 1), exponent guarded.
pub fn diode_current(vd: f64, i_s: f64, vt: f64) -> f64 {
    i_s * (exp_clamped(vd / vt) - 1.0)
}

/// Diode small-signal conductance d(i)/d(vd).
pub fn diode_conductance(vd: f64, i_s: f64, vt: f64) -> f64 {
    i_s / vt * exp_clamped(vd / vt)
}
