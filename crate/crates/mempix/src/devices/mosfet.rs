//! EKV-style MOSFET compact model, continuous across weak and strong
//! inversion.
//!
//! The 4T lin-log pixel hinges on smooth weak-inversion behavior, and
//! piecewise level-1 seams break Newton convergence near the lin-log knee,
//! so the drain current is a single interpolation expression:
//!
//! ```text
//! Ids = Ispec · [ i_f·(1 + λ·Vds) − i_r·(1 − λ·Vds) ]
//! i_f = ln²(1 + exp((Vg − Vth − Vs) / (2·n·VT)))
//! i_r = ln²(1 + exp((Vg − Vth − Vd) / (2·n·VT)))
//! Ispec = 2·n·β·VT²,  β = kp·W/L
//! ```
//!
//! Terminal voltages are source-referenced with a constant threshold (no
//! body effect; the bulk pin is accepted and ignored). In weak inversion
//! this reduces to Ispec·exp((Vg−Vth−Vs)/(n·VT)) so a diode-connected load
//! yields the classic n·VT·ln10 volts-per-decade logarithmic conversion;
//! in strong inversion it approaches (β/2n)·(Vg−Vth−Vs)².

use super::exp_clamped;

/// MOSFET channel polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    N,
    P,
}

/// MOSFET model card.
///
/// Defaults are representative 90 nm-class values; the fab model card the
/// original circuits used is proprietary, so these are documented,
/// user-overridable stand-ins.
#[derive(Debug, Clone, PartialEq)]
pub struct MosfetCard {
    pub polarity: Polarity,
    /// Threshold voltage (V). Negative for P devices.
    pub vth: f64,
    /// Transconductance parameter kp = µ·Cox (A/V²).
    pub kp: f64,
    /// Gate width (m).
    pub w: f64,
    /// Gate length (m).
    pub l: f64,
    /// Subthreshold slope factor (dimensionless, ≥ 1).
    pub n_slope: f64,
    /// Channel-length modulation (1/V).
    pub lambda: f64,
    /// Thermal voltage kT/q (V).
    pub temp_vt: f64,
}

impl MosfetCard {
    pub fn nmos() -> Self {
        Self {
            polarity: Polarity::N,
            vth: 0.35,
            kp: 300e-6,
            w: 360e-9,
            l: 90e-9,
            n_slope: 1.3,
            lambda: 0.1,
            temp_vt: 25.85e-3,
        }
    }

    pub fn pmos() -> Self {
        Self {
            polarity: Polarity::P,
            vth: -0.35,
            kp: 120e-6,
            w: 360e-9,
            l: 90e-9,
            n_slope: 1.4,
            lambda: 0.1,
            temp_vt: 25.85e-3,
        }
    }

    /// β = kp·W/L (A/V²).
    pub fn beta(&self) -> f64 {
        self.kp * self.w / self.l
    }

    /// Specific current Ispec = 2·n·β·VT² (A).
    pub fn ispec(&self) -> f64 {
        2.0 * self.n_slope * self.beta() * self.temp_vt * self.temp_vt
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.w <= 0.0 || self.l <= 0.0 {
            return Err("MOSFET W and L must be positive".into());
        }
        if self.kp <= 0.0 {
            return Err("MOSFET kp must be positive".into());
        }
        if self.n_slope < 1.0 {
            return Err("MOSFET slope factor must be >= 1".into());
        }
        if self.temp_vt <= 0.0 {
            return Err("MOSFET thermal voltage must be positive".into());
        }
        Ok(())
    }
}

/// Numerically stable ln(1 + e^x) with the exponent guarded at ±80.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + exp_clamped(-x).ln_1p()
    } else {
        exp_clamped(x).ln_1p()
    }
}

/// d/dx ln(1 + e^x) = 1/(1 + e^-x), stable at both tails.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp_clamped(-x))
    } else {
        let e = exp_clamped(x);
        e / (1.0 + e)
    }
}

/// Drain current and its three terminal partial derivatives for an
/// N-polarity card (the P wrapper flips signs around this core).
fn ids_and_partials_n(vg: f64, vd: f64, vs: f64, card: &MosfetCard) -> (f64, f64, f64, f64) {
    let half_swing = 2.0 * card.n_slope * card.temp_vt;
    let ispec = card.ispec();
    let vds = vd - vs;

    let xf = (vg - card.vth - vs) / half_swing;
    let xr = (vg - card.vth - vd) / half_swing;
    let sp_f = softplus(xf);
    let sp_r = softplus(xr);
    let i_f = sp_f * sp_f;
    let i_r = sp_r * sp_r;
    // d(i)/d(x)
    let dif = 2.0 * sp_f * sigmoid(xf);
    let dir = 2.0 * sp_r * sigmoid(xr);

    let kf = 1.0 + card.lambda * vds;
    let kr = 1.0 - card.lambda * vds;

    let ids = ispec * (i_f * kf - i_r * kr);
    let gm = ispec * (dif * kf - dir * kr) / half_swing;
    let gds = ispec * (dir * kr / half_swing + card.lambda * (i_f + i_r));
    let gs = ispec * (-dif * kf / half_swing - card.lambda * (i_f + i_r));
    (ids, gm, gds, gs)
}

/// Drain current Ids (A), positive from drain to source for N devices.
pub fn mosfet_ids(vg: f64, vd: f64, vs: f64, card: &MosfetCard) -> f64 {
    mosfet_ids_and_conductances(vg, vd, vs, card).0
}

/// (gm, gds, gms): partial derivatives of Ids with respect to gate, drain
/// and source voltage. `gms` is the raw signed partial ∂Ids/∂Vs (negative
/// for an N device conducting forward). The three always sum to zero.
pub fn mosfet_conductances(vg: f64, vd: f64, vs: f64, card: &MosfetCard) -> (f64, f64, f64) {
    let (_, gm, gds, gms) = mosfet_ids_and_conductances(vg, vd, vs, card);
    (gm, gds, gms)
}

/// Current and conductances in one evaluation (what the stamper uses).
pub fn mosfet_ids_and_conductances(
    vg: f64,
    vd: f64,
    vs: f64,
    card: &MosfetCard,
) -> (f64, f64, f64, f64) {
    match card.polarity {
        Polarity::N => ids_and_partials_n(vg, vd, vs, card),
        Polarity::P => {
            // Mirror through the origin: a P device with card Vth < 0 behaves
            // like an N device with Vth' = -Vth under negated voltages.
            let flipped = MosfetCard { polarity: Polarity::N, vth: -card.vth, ..card.clone() };
            let (i, gm, gds, gs) = ids_and_partials_n(-vg, -vd, -vs, &flipped);
            (-i, gm, gds, gs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn card_no_lambda() -> MosfetCard {
        MosfetCard { lambda: 0.0, ..MosfetCard::nmos() }
    }

    #[test]
    fn zero_current_at_vd_eq_vs() {
        let card = MosfetCard::nmos();
        for vg in [0.0, 0.3, 0.6, 1.2] {
            for v in [0.0, 0.2, 0.5] {
                assert_eq!(mosfet_ids(vg, v, v, &card), 0.0, "vg={vg} v={v}");
            }
        }
    }

    #[test]
    fn sign_follows_vds() {
        let card = MosfetCard::nmos();
        for vg in [0.2, 0.5, 1.0] {
            assert!(mosfet_ids(vg, 0.5, 0.0, &card) > 0.0);
            assert!(mosfet_ids(vg, 0.0, 0.5, &card) < 0.0);
        }
    }

    #[test]
    fn monotone_in_vg_forward() {
        let card = MosfetCard::nmos();
        let mut prev = f64::NEG_INFINITY;
        let mut vg = -0.5;
        while vg <= 2.0 {
            let i = mosfet_ids(vg, 0.8, 0.1, &card);
            assert!(i >= prev, "vg={vg}");
            prev = i;
            vg += 0.01;
        }
    }

    #[test]
    fn weak_inversion_asymptote() {
        // Deep subthreshold at Vs = 0: Ids -> Ispec·exp((VP−VS)/VT),
        // VP = (Vg−Vth)/n. λ zeroed to isolate the interpolation core.
        let card = card_no_lambda();
        let vt = card.temp_vt;
        let vp = -10.0 * vt;
        let vg = card.vth + card.n_slope * vp;
        let ids = mosfet_ids(vg, 1.0, 0.0, &card);
        let asymptote = card.ispec() * (vp / vt).exp();
        let rel = (ids - asymptote).abs() / asymptote;
        assert!(rel < 0.01, "rel err {rel:.4}");
    }

    #[test]
    fn strong_inversion_asymptote() {
        // VP − VS = +20·VT at Vs = 0, drain in saturation:
        // Ids -> (β/2n)·(Vg−Vth−n·Vs)².
        let card = card_no_lambda();
        let vt = card.temp_vt;
        let vg = card.vth + card.n_slope * 20.0 * vt;
        let ids = mosfet_ids(vg, 5.0, 0.0, &card);
        let quad = card.beta() / (2.0 * card.n_slope) * (vg - card.vth).powi(2);
        let rel = (ids - quad).abs() / quad;
        assert!(rel < 0.05, "rel err {rel:.4}");
    }

    #[test]
    fn subthreshold_gm_over_id() {
        let card = card_no_lambda();
        let vt = card.temp_vt;
        let vg = card.vth - card.n_slope * 8.0 * vt;
        let ids = mosfet_ids(vg, 1.0, 0.0, &card);
        let (gm, _, _) = mosfet_conductances(vg, 1.0, 0.0, &card);
        let expect = 1.0 / (card.n_slope * vt);
        let rel = (gm / ids - expect).abs() / expect;
        assert!(rel < 0.02, "gm/Id rel err {rel:.4}");
    }

    fn fd_partials(vg: f64, vd: f64, vs: f64, card: &MosfetCard) -> (f64, f64, f64) {
        let h = 1e-6;
        let dg = (mosfet_ids(vg + h, vd, vs, card) - mosfet_ids(vg - h, vd, vs, card)) / (2.0 * h);
        let dd = (mosfet_ids(vg, vd + h, vs, card) - mosfet_ids(vg, vd - h, vs, card)) / (2.0 * h);
        let ds = (mosfet_ids(vg, vd, vs + h, card) - mosfet_ids(vg, vd, vs - h, card)) / (2.0 * h);
        (dg, dd, ds)
    }

    fn check_fd(vg: f64, vd: f64, vs: f64, card: &MosfetCard) {
        let (gm, gds, gms) = mosfet_conductances(vg, vd, vs, card);
        let (fg, fd, fs) = fd_partials(vg, vd, vs, card);
        for (a, f, name) in [(gm, fg, "gm"), (gds, fd, "gds"), (gms, fs, "gms")] {
            let tol = (1e-6 * f.abs()).max(1e-15);
            assert!(
                (a - f).abs() <= tol,
                "{name} at ({vg},{vd},{vs}): analytic {a:.6e} vs fd {f:.6e}"
            );
        }
    }

    #[test]
    fn conductances_match_finite_differences() {
        let card = MosfetCard::nmos();
        // Deterministic grid over [-1.5, 1.5].
        let grid = [-1.5, -0.9, -0.3, 0.0, 0.15, 0.35, 0.55, 0.9, 1.5];
        for &vg in &grid {
            for &vd in &grid {
                for &vs in &grid {
                    check_fd(vg, vd, vs, &card);
                }
            }
        }
    }

    #[test]
    fn gds_at_origin_matches_fd() {
        let card = MosfetCard::nmos();
        let (_, gds, _) = mosfet_conductances(0.6, 0.0, 0.0, &card);
        let h = 1e-6;
        let fd = (mosfet_ids(0.6, h, 0.0, &card) - mosfet_ids(0.6, -h, 0.0, &card)) / (2.0 * h);
        assert!((gds - fd).abs() <= (1e-6 * fd.abs()).max(1e-15));
    }

    #[test]
    fn deep_cutoff_conductances_tiny() {
        let card = MosfetCard::nmos();
        let vt = card.temp_vt;
        // VP − VS = −30·VT at Vs = 0.
        let vg = card.vth - card.n_slope * 30.0 * vt;
        let (gm, gds, gms) = mosfet_conductances(vg, 0.8, 0.0, &card);
        assert!(gm >= 0.0 && gm <= 1e-12);
        assert!(gds >= 0.0 && gds <= 1e-12);
        assert!(gms.abs() <= 1e-12);
    }

    #[test]
    fn continuity_across_inversion_boundary() {
        // Sweep Vg through the threshold region; no jump may exceed the
        // local slope times the step.
        let card = MosfetCard::nmos();
        let step = 1e-4;
        let mut vg = 0.0;
        let mut prev = mosfet_ids(vg, 0.6, 0.0, &card);
        let mut prev_g = mosfet_conductances(vg, 0.6, 0.0, &card);
        while vg < 0.8 {
            vg += step;
            let i = mosfet_ids(vg, 0.6, 0.0, &card);
            let g = mosfet_conductances(vg, 0.6, 0.0, &card);
            let slope_bound = (prev_g.0.abs().max(g.0.abs()) * step) * 1.5 + 1e-15;
            assert!((i - prev).abs() <= slope_bound, "Ids jump at vg={vg}");
            // Conductances continuous too: relative change per 100 µV step is small.
            for (a, b) in [(g.0, prev_g.0), (g.1, prev_g.1), (g.2, prev_g.2)] {
                assert!((a - b).abs() <= 0.02 * a.abs().max(b.abs()) + 1e-15);
            }
            prev = i;
            prev_g = g;
        }
    }

    #[test]
    fn partials_sum_to_zero() {
        let card = MosfetCard::nmos();
        let (gm, gds, gms) = mosfet_conductances(0.7, 0.9, 0.2, &card);
        assert!((gm + gds + gms).abs() < f64::max(1e-18, 1e-12 * gm.abs()));
    }

    #[test]
    fn pmos_mirrors_nmos() {
        let n = MosfetCard::nmos();
        let mut p = MosfetCard::pmos();
        p.kp = n.kp;
        p.n_slope = n.n_slope;
        let i_n = mosfet_ids(0.8, 0.6, 0.0, &n);
        let i_p = mosfet_ids(-0.8, -0.6, 0.0, &p);
        assert!((i_n + i_p).abs() < 1e-18 + 1e-12 * i_n.abs());
        // P source follower conducts with gate below source.
        assert!(mosfet_ids(0.0, 0.0, 1.2, &MosfetCard::pmos()) < 0.0);
    }

    #[test]
    fn overshoot_voltages_stay_finite() {
        let card = MosfetCard::nmos();
        for v in [-10.0, 10.0] {
            let i = mosfet_ids(v, 10.0, -10.0, &card);
            assert!(i.is_finite());
            let (gm, gds, gms) = mosfet_conductances(v, 10.0, -10.0, &card);
            assert!(gm.is_finite() && gds.is_finite() && gms.is_finite());
        }
    }
}
