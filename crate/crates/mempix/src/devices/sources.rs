//! Independent-source waveforms.

/// Time-dependent value for V/I sources and photodiode illumination.
#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    Dc(f64),
    Pulse {
        v1: f64,
        v2: f64,
        delay: f64,
        rise: f64,
        fall: f64,
        width: f64,
        period: f64,
    },
    /// Piecewise-linear (t, value) points with strictly increasing times.
    /// Holds the first value before the first point and the last after.
    Pwl(Vec<(f64, f64)>),
}

impl Waveform {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Waveform::Dc(v) => {
                if !v.is_finite() {
                    return Err("DC value must be finite".into());
                }
            }
            Waveform::Pulse { rise, fall, width, period, .. } => {
                if *rise <= 0.0 || *fall <= 0.0 {
                    return Err("PULSE rise and fall must be positive".into());
                }
                if *width < 0.0 {
                    return Err("PULSE width must be nonnegative".into());
                }
                if *period < width + rise + fall {
                    return Err("PULSE period must cover rise + width + fall".into());
                }
            }
            Waveform::Pwl(points) => {
                if points.is_empty() {
                    return Err("PWL needs at least one point".into());
                }
                for pair in points.windows(2) {
                    if pair[1].0 <= pair[0].0 {
                        return Err("PWL time points must be strictly increasing".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Value at time t (t >= 0).
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Waveform::Dc(v) => *v,
            Waveform::Pulse { v1, v2, delay, rise, fall, width, period } => {
                if t < *delay {
                    return *v1;
                }
                let tc = (t - delay) % period;
                if tc < *rise {
                    v1 + (v2 - v1) * tc / rise
                } else if tc < rise + width {
                    *v2
                } else if tc < rise + width + fall {
                    v2 + (v1 - v2) * (tc - rise - width) / fall
                } else {
                    *v1
                }
            }
            Waveform::Pwl(points) => {
                if t <= points[0].0 {
                    return points[0].1;
                }
                for pair in points.windows(2) {
                    let (t0, v0) = pair[0];
                    let (t1, v1) = pair[1];
                    if t <= t1 {
                        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                    }
                }
                points.last().unwrap().1
            }
        }
    }

    /// Times in (0, tstop) where the waveform has slope discontinuities.
    /// The transient engine lands on these exactly so adaptive stepping
    /// never integrates across a corner.
    pub fn breakpoints(&self, tstop: f64) -> Vec<f64> {
        let mut out = Vec::new();
        match self {
            Waveform::Dc(_) => {}
            Waveform::Pulse { delay, rise, fall, width, period, .. } => {
                let mut cycle_start = *delay;
                while cycle_start < tstop {
                    for edge in [
                        cycle_start,
                        cycle_start + rise,
                        cycle_start + rise + width,
                        cycle_start + rise + width + fall,
                    ] {
                        if edge > 0.0 && edge < tstop {
                            out.push(edge);
                        }
                    }
                    cycle_start += period;
                }
            }
            Waveform::Pwl(points) => {
                out.extend(points.iter().map(|&(t, _)| t).filter(|&t| t > 0.0 && t < tstop));
            }
        }
        out
    }

    /// True when the value never changes.
    pub fn is_dc(&self) -> bool {
        matches!(self, Waveform::Dc(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reset_pulse() -> Waveform {
        Waveform::Pulse {
            v1: 0.0,
            v2: 1.2,
            delay: 1e-6,
            rise: 10e-9,
            fall: 10e-9,
            width: 5e-6,
            period: 20e-6,
        }
    }

    #[test]
    fn dc_constant() {
        assert_eq!(Waveform::Dc(1.2).eval(5e-6), 1.2);
        assert_eq!(Waveform::Dc(1.2).eval(0.0), 1.2);
    }

    #[test]
    fn pulse_timeline_walk() {
        let p = reset_pulse();
        assert_eq!(p.eval(0.0), 0.0); // before delay
        assert_eq!(p.eval(0.999e-6), 0.0);
        assert_eq!(p.eval(2e-6), 1.2); // inside width
        // Mid-rise is halfway.
        let mid = p.eval(1e-6 + 5e-9);
        assert!((mid - 0.6).abs() < 1e-12);
        // After fall, back at v1.
        assert_eq!(p.eval(8e-6), 0.0);
        // Periodic: next cycle high again.
        assert_eq!(p.eval(22e-6), 1.2);
    }

    #[test]
    fn pwl_midpoint() {
        let w = Waveform::Pwl(vec![(0.0, 0.0), (1e-6, 1.0)]);
        assert_eq!(w.eval(0.5e-6), 0.5);
        assert_eq!(w.eval(2e-6), 1.0); // holds last
        assert_eq!(w.eval(0.0), 0.0);
    }

    #[test]
    fn pulse_validation() {
        let mut p = reset_pulse();
        assert!(p.validate().is_ok());
        if let Waveform::Pulse { period, .. } = &mut p {
            *period = 1e-6; // shorter than rise+width+fall
        }
        assert!(p.validate().is_err());
    }

    #[test]
    fn pwl_validation() {
        assert!(Waveform::Pwl(vec![(0.0, 1.0), (0.0, 2.0)]).validate().is_err());
        assert!(Waveform::Pwl(vec![]).validate().is_err());
        assert!(Waveform::Pwl(vec![(0.0, 1.0), (1.0, 2.0)]).validate().is_ok());
    }

    #[test]
    fn pulse_breakpoints_cover_edges() {
        let p = reset_pulse();
        let bps = p.breakpoints(25e-6);
        let has = |t0: f64| bps.iter().any(|&t| (t - t0).abs() < 1e-12);
        // First cycle: 1µ, 1.01µ, 6.01µ, 6.02µ; second cycle starts at 21µ.
        assert!(has(1e-6), "{bps:?}");
        assert!(has(6.01e-6), "{bps:?}");
        assert!(has(21e-6), "{bps:?}");
        assert!(bps.iter().all(|&t| t > 0.0 && t < 25e-6));
    }
}
