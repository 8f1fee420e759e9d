//! Post-processing: turns raw traces into the figures of merit the pixel
//! comparison needs — output swing, log-slope fit, lin-log knee, dynamic
//! range, average power, and area totals.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::devices::DeviceCard;
use crate::engine::{MnaSystem, SweepResult, TransientResult};
use crate::netlist::{Circuit, DeviceKind};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("measurement window contains no trace points")]
    EmptyWindow,
    #[error("{context}: need at least {needed} points, got {got}")]
    InsufficientPoints { context: &'static str, needed: usize, got: usize },
    #[error("no knee: two-segment fit improves on a single model by less than 5%")]
    NoKnee,
    #[error("no region with sensitivity above the floor")]
    NoSensitiveRegion,
    #[error("area config is missing an entry for device kind `{0}`")]
    MissingGeometry(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
}

/// One square micrometre in m².
const UM2: f64 = 1e-12;

// ---------------------------------------------------------------------------
// output swing
// ---------------------------------------------------------------------------

/// Max − min of a node trace over a set of time windows. Windows let the
/// caller exclude reset-high intervals (or keep only select-active tails).
pub fn output_swing(
    tr: &TransientResult,
    node: &str,
    windows: &[(f64, f64)],
) -> Result<f64, AnalysisError> {
    let trace = tr.node_trace(node).ok_or_else(|| AnalysisError::UnknownNode(node.into()))?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut seen = false;
    for (k, &t) in tr.time.iter().enumerate() {
        if windows.iter().any(|&(a, b)| t >= a && t <= b) {
            seen = true;
            lo = lo.min(trace[k]);
            hi = hi.max(trace[k]);
        }
    }
    if !seen {
        return Err(AnalysisError::EmptyWindow);
    }
    Ok(hi - lo)
}

// ---------------------------------------------------------------------------
// log-slope fit
// ---------------------------------------------------------------------------

/// Least-squares fit of V against log10(I).
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseFit {
    /// Slope in millivolts per decade, sign preserved.
    pub log_slope_mv_per_decade: f64,
    /// Fitted voltage at I = 1 A (the fit's intercept).
    pub log_intercept_v: f64,
    pub r_squared: f64,
    pub fit_range: (f64, f64),
    pub points_used: usize,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    (slope, intercept, r2)
}

/// Fit a node's sweep response against log10(photocurrent) inside `range`.
pub fn fit_log_slope(
    sweep: &SweepResult,
    sys: &MnaSystem,
    node: &str,
    range: (f64, f64),
) -> Result<ResponseFit, AnalysisError> {
    let pts: Vec<(f64, f64)> = sweep
        .converged_points(sys, node)
        .into_iter()
        .filter(|&(i, _)| i >= range.0 && i <= range.1)
        .collect();
    fit_log_slope_points(&pts, range)
}

/// Core fit over raw (photocurrent, volts) pairs.
pub fn fit_log_slope_points(
    points: &[(f64, f64)],
    range: (f64, f64),
) -> Result<ResponseFit, AnalysisError> {
    if points.len() < 4 {
        return Err(AnalysisError::InsufficientPoints {
            context: "log-slope fit",
            needed: 4,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|&(i, _)| i.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(ResponseFit {
        log_slope_mv_per_decade: slope * 1e3,
        log_intercept_v: intercept,
        r_squared: r2,
        fit_range: range,
        points_used: points.len(),
    })
}

// ---------------------------------------------------------------------------
// knee detection
// ---------------------------------------------------------------------------

/// Two-segment lin-log fit report.
#[derive(Debug, Clone, PartialEq)]
pub struct KneeReport {
    pub knee_current: f64,
    pub linear_r2: f64,
    pub log_r2: f64,
    pub linear_range: (f64, f64),
    pub log_range: (f64, f64),
    /// Fractional residual improvement of the split fit over the best
    /// single-model fit.
    pub improvement: f64,
}

fn sse_linear_in_i(points: &[(f64, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|&(i, _)| i).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
    (sse, r2)
}

fn sse_linear_in_logi(points: &[(f64, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|&(i, _)| i.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
    (sse, r2)
}

/// Detect the linear-to-logarithmic transition of a lin-log response by
/// exhaustive split-point search: V linear in I below the split, linear in
/// log10(I) above it.
pub fn detect_knee(
    sweep: &SweepResult,
    sys: &MnaSystem,
    node: &str,
) -> Result<KneeReport, AnalysisError> {
    let pts = sweep.converged_points(sys, node);
    detect_knee_points(&pts)
}

pub fn detect_knee_points(points: &[(f64, f64)]) -> Result<KneeReport, AnalysisError> {
    let n = points.len();
    if n < 8 {
        return Err(AnalysisError::InsufficientPoints { context: "knee detection", needed: 8, got: n });
    }
    let decades = (points[n - 1].0 / points[0].0).log10();
    let needed = (3.0f64.min(decades) * 8.0) as usize;
    if decades < 3.0 || n < needed {
        return Err(AnalysisError::InsufficientPoints {
            context: "knee detection (needs >= 3 decades at >= 8 points/decade)",
            needed: 24,
            got: n,
        });
    }

    let single = sse_linear_in_i(points).0.min(sse_linear_in_logi(points).0);

    let mut best: Option<(f64, usize, f64, f64)> = None; // (sse, split, r2lin, r2log)
    for split in 3..=(n - 3) {
        let (low, high) = points.split_at(split);
        let (sse_low, r2_low) = sse_linear_in_i(low);
        let (sse_high, r2_high) = sse_linear_in_logi(high);
        let sse = sse_low + sse_high;
        if best.map_or(true, |(b, ..)| sse < b) {
            best = Some((sse, split, r2_low, r2_high));
        }
    }
    let (sse2, split, linear_r2, log_r2) = best.expect("n >= 8 guarantees candidates");

    if single <= f64::EPSILON || 1.0 - sse2 / single < 0.05 {
        return Err(AnalysisError::NoKnee);
    }

    let knee_current = (points[split - 1].0 * points[split].0).sqrt();
    Ok(KneeReport {
        knee_current,
        linear_r2,
        log_r2,
        linear_range: (points[0].0, points[split - 1].0),
        log_range: (points[split].0, points[n - 1].0),
        improvement: 1.0 - sse2 / single,
    })
}

// ---------------------------------------------------------------------------
// dynamic range
// ---------------------------------------------------------------------------

/// Dynamic range in dB (20·log10) over the maximal contiguous photocurrent
/// range whose sensitivity |dV/dlog10 I| stays at or above the floor
/// (central differences; one-sided at the sweep ends).
pub fn dynamic_range_db(
    sweep: &SweepResult,
    sys: &MnaSystem,
    node: &str,
    sensitivity_floor_v_per_decade: f64,
) -> Result<f64, AnalysisError> {
    let pts = sweep.converged_points(sys, node);
    dynamic_range_db_points(&pts, sensitivity_floor_v_per_decade)
}

pub fn dynamic_range_db_points(
    points: &[(f64, f64)],
    floor: f64,
) -> Result<f64, AnalysisError> {
    let n = points.len();
    if n < 3 {
        return Err(AnalysisError::InsufficientPoints { context: "dynamic range", needed: 3, got: n });
    }
    let lx: Vec<f64> = points.iter().map(|&(i, _)| i.log10()).collect();
    let v: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let slope_at = |k: usize| -> f64 {
        if k == 0 {
            (v[1] - v[0]) / (lx[1] - lx[0])
        } else if k == n - 1 {
            (v[n - 1] - v[n - 2]) / (lx[n - 1] - lx[n - 2])
        } else {
            (v[k + 1] - v[k - 1]) / (lx[k + 1] - lx[k - 1])
        }
    };

    let sensitive: Vec<bool> = (0..n).map(|k| slope_at(k).abs() >= floor).collect();
    let mut best: Option<(usize, usize)> = None;
    let mut run_start: Option<usize> = None;
    for k in 0..=n {
        let on = k < n && sensitive[k];
        match (on, run_start) {
            (true, None) => run_start = Some(k),
            (false, Some(s)) => {
                let e = k - 1;
                if best.map_or(true, |(bs, be)| lx[e] - lx[s] > lx[be] - lx[bs]) {
                    best = Some((s, e));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    match best {
        Some((s, e)) if e > s => Ok(20.0 * (points[e].0 / points[s].0).log10()),
        _ => Err(AnalysisError::NoSensitiveRegion),
    }
}

// ---------------------------------------------------------------------------
// average power
// ---------------------------------------------------------------------------

/// Time-weighted mean of the total power delivered by all independent
/// sources, via trapezoidal quadrature over the trace.
pub fn average_power(tr: &TransientResult, circuit: &Circuit) -> f64 {
    let n = tr.time.len();
    if n < 2 {
        return 0.0;
    }
    // Instantaneous delivered power: p(t) = Σ −v_ab(t)·i(t); the recorded
    // current flows into each source's + terminal.
    let mut p = vec![0.0; n];
    for dev in &circuit.devices {
        if !matches!(dev.kind, DeviceKind::VSource | DeviceKind::ISource) {
            continue;
        }
        let Some(i_trace) = tr.source_current(&dev.name) else { continue };
        let va = tr.node_trace(circuit.node_label(dev.terminals[0])).unwrap_or_default();
        let vb = tr.node_trace(circuit.node_label(dev.terminals[1])).unwrap_or_default();
        for k in 0..n {
            p[k] -= (va[k] - vb[k]) * i_trace[k];
        }
    }
    let mut energy = 0.0;
    for k in 1..n {
        energy += 0.5 * (p[k] + p[k - 1]) * (tr.time[k] - tr.time[k - 1]);
    }
    energy / (tr.time[n - 1] - tr.time[0])
}

// ---------------------------------------------------------------------------
// area report
// ---------------------------------------------------------------------------

/// Per-kind area rules. `None` entries make [`area_report`] fail with
/// `MissingGeometry` for circuits that contain that kind — a loaded
/// calibration file must cover every kind it is applied to, while the
/// built-in defaults cover everything (flagged as non-calibrated).
#[derive(Debug, Clone)]
pub struct AreaConfig {
    /// Layout overhead multiplier on W·L.
    pub mosfet_overhead: Option<f64>,
    /// Capacitor area = C / density (F/m²).
    pub cap_density_f_per_m2: Option<f64>,
    /// Fixed footprints (m²).
    pub vsource_area_m2: Option<f64>,
    pub isource_area_m2: Option<f64>,
    pub photodiode_area_m2: Option<f64>,
    /// Calibrated totals per circuit name (µm²): per-device rows are scaled
    /// proportionally so the total lands on the configured value.
    pub calibrated_totals: BTreeMap<String, f64>,
    /// True when loaded from a calibration file.
    pub calibrated: bool,
}

impl Default for AreaConfig {
    fn default() -> Self {
        Self {
            mosfet_overhead: Some(25.0),
            cap_density_f_per_m2: Some(5e-3), // 5 fF/µm²
            vsource_area_m2: Some(0.0),
            isource_area_m2: Some(0.0),
            photodiode_area_m2: Some(10.0 * UM2),
            calibrated_totals: BTreeMap::new(),
            calibrated: false,
        }
    }
}

impl AreaConfig {
    /// Empty config for file loading: every kind must be supplied.
    pub fn empty() -> Self {
        Self {
            mosfet_overhead: None,
            cap_density_f_per_m2: None,
            vsource_area_m2: None,
            isource_area_m2: None,
            photodiode_area_m2: None,
            calibrated_totals: BTreeMap::new(),
            calibrated: true,
        }
    }
}

/// Per-device areas and their total, in µm².
#[derive(Debug, Clone, PartialEq)]
pub struct AreaReport {
    pub circuit: String,
    /// (device name, kind label, area µm²), in device order.
    pub rows: Vec<(String, &'static str, f64)>,
    pub total_um2: f64,
    pub calibrated: bool,
    /// Proportional factor applied to hit a calibrated total.
    pub scale_applied: Option<f64>,
}

pub fn area_report(circuit: &Circuit, cfg: &AreaConfig) -> Result<AreaReport, AnalysisError> {
    let need = |field: Option<f64>, kind: &str| -> Result<f64, AnalysisError> {
        field.ok_or_else(|| AnalysisError::MissingGeometry(kind.to_string()))
    };
    let mut rows = Vec::new();
    for dev in &circuit.devices {
        let area_m2 = match &dev.card {
            DeviceCard::Mosfet(m) => m.w * m.l * need(cfg.mosfet_overhead, "mosfet")?,
            DeviceCard::Memristor(m) => m.width * m.height,
            DeviceCard::Capacitor { farads } => farads / need(cfg.cap_density_f_per_m2, "capacitor")?,
            DeviceCard::VSource { .. } => need(cfg.vsource_area_m2, "vsource")?,
            DeviceCard::ISource { .. } => need(cfg.isource_area_m2, "isource")?,
            DeviceCard::Photodiode(_) => need(cfg.photodiode_area_m2, "photodiode")?,
            DeviceCard::Resistor { .. } => 0.0,
        };
        rows.push((dev.name.clone(), dev.kind.label(), area_m2 / UM2));
    }
    let raw_total: f64 = rows.iter().map(|r| r.2).sum();
    let mut scale_applied = None;
    if let Some(&target) = cfg.calibrated_totals.get(&circuit.name) {
        if raw_total > 0.0 {
            let scale = target / raw_total;
            for row in &mut rows {
                row.2 *= scale;
            }
            scale_applied = Some(scale);
        }
    }
    let total_um2 = rows.iter().map(|r| r.2).sum();
    Ok(AreaReport { circuit: circuit.name.clone(), rows, total_um2, calibrated: cfg.calibrated, scale_applied })
}

// ---------------------------------------------------------------------------
// pixel comparison
// ---------------------------------------------------------------------------

/// Collected figures of merit for one pixel.
#[derive(Debug, Clone, Default)]
pub struct PixelReport {
    pub name: String,
    pub swing_v: Option<f64>,
    pub dynamic_range_db: Option<f64>,
    pub avg_power_w: Option<f64>,
    pub total_area_um2: Option<f64>,
}

/// Side-by-side comparison with ratios of the first report against each of
/// the others.
#[derive(Debug, Clone)]
pub struct PixelComparison {
    pub reports: Vec<PixelReport>,
    /// (other name, area ratio, power ratio, swing ratio, DR difference dB)
    pub ratios: Vec<(String, Option<f64>, Option<f64>, Option<f64>, Option<f64>)>,
}

pub fn compare_pixels(reports: &[PixelReport]) -> Result<PixelComparison, AnalysisError> {
    if reports.len() < 2 {
        return Err(AnalysisError::InsufficientPoints {
            context: "pixel comparison",
            needed: 2,
            got: reports.len(),
        });
    }
    let first = &reports[0];
    let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(x), Some(y)) if y != 0.0 => Some(x / y),
        _ => None,
    };
    let diff = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(x), Some(y)) => Some(x - y),
        _ => None,
    };
    let ratios = reports[1..]
        .iter()
        .map(|other| {
            (
                other.name.clone(),
                ratio(first.total_area_um2, other.total_area_um2),
                ratio(first.avg_power_w, other.avg_power_w),
                ratio(first.swing_v, other.swing_v),
                diff(first.dynamic_range_db, other.dynamic_range_db),
            )
        })
        .collect();
    Ok(PixelComparison { reports: reports.to_vec(), ratios })
}

impl std::fmt::Display for PixelComparison {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fmt_opt = |v: Option<f64>, unit: &str| match v {
            Some(x) => format!("{x:.4} {unit}"),
            None => "-".to_string(),
        };
        writeln!(f, "{:<18} {:>14} {:>14} {:>14} {:>12}", "pixel", "area (um^2)", "power (W)", "swing (V)", "DR (dB)")?;
        for r in &self.reports {
            writeln!(
                f,
                "{:<18} {:>14} {:>14} {:>14} {:>12}",
                r.name,
                match r.total_area_um2 {
                    Some(a) => format!("{a:.2}"),
                    None => "-".into(),
                },
                fmt_opt(r.avg_power_w, ""),
                fmt_opt(r.swing_v, ""),
                match r.dynamic_range_db {
                    Some(d) => format!("{d:.1}"),
                    None => "-".into(),
                },
            )?;
        }
        for (name, area, power, swing, dr) in &self.ratios {
            writeln!(
                f,
                "{} vs {}: area ratio {}, power ratio {}, swing ratio {}, DR diff {}",
                self.reports[0].name,
                name,
                fmt_opt(*area, ""),
                fmt_opt(*power, ""),
                fmt_opt(*swing, ""),
                fmt_opt(*dr, "dB"),
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(from: f64, to: f64, per_decade: usize) -> Vec<f64> {
        crate::engine::log_space(from, to, per_decade)
    }

    #[test]
    fn fit_recovers_exact_line() {
        // V = 1 − 0.077·log10(I/1e-9): slope −77 mV/dec.
        let pts: Vec<(f64, f64)> = log_grid(1e-9, 1e-6, 13)
            .into_iter()
            .map(|i| (i, 1.0 - 0.077 * (i / 1e-9).log10()))
            .collect();
        let fit = fit_log_slope_points(&pts, (1e-9, 1e-6)).unwrap();
        assert!((fit.log_slope_mv_per_decade + 77.0).abs() < 1e-9, "{}", fit.log_slope_mv_per_decade);
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fit_needs_four_points() {
        let pts = vec![(1e-9, 1.0), (1e-8, 0.9), (1e-7, 0.8)];
        assert!(matches!(
            fit_log_slope_points(&pts, (1e-9, 1e-7)),
            Err(AnalysisError::InsufficientPoints { .. })
        ));
    }

    /// Synthetic lin-log curve used by the knee tests.
    fn lin_log_curve(knee: f64, grid: &[f64]) -> Vec<(f64, f64)> {
        // Linear below the knee, log above, continuous at the knee.
        let r = 0.1 / knee; // V per A in the linear part
        grid.iter()
            .map(|&i| {
                let v = if i <= knee {
                    1.0 - r * i
                } else {
                    (1.0 - r * knee) - 0.06 * (i / knee).log10()
                };
                (i, v)
            })
            .collect()
    }

    #[test]
    fn knee_recovered_within_grid_resolution() {
        let grid = log_grid(1e-10, 1e-6, 10);
        for knee in [1e-8, 3e-9, 1e-7] {
            let pts = lin_log_curve(knee, &grid);
            let report = detect_knee_points(&pts).unwrap();
            let err = (report.knee_current / knee).log10().abs();
            assert!(err <= 0.31, "planted {knee:e}, found {:e}", report.knee_current);
            assert!(report.linear_r2 > 0.9);
            assert!(report.log_r2 > 0.9);
        }
    }

    #[test]
    fn pure_log_has_no_knee() {
        let grid = log_grid(1e-10, 1e-6, 10);
        let pts: Vec<(f64, f64)> = grid.iter().map(|&i| (i, 1.0 - 0.06 * i.log10())).collect();
        assert_eq!(detect_knee_points(&pts), Err(AnalysisError::NoKnee));
    }

    #[test]
    fn knee_randomized_recovery() {
        // 50 planted knees across 1e-10..1e-6 on a half-decade-resolution grid.
        let grid = log_grid(1e-11, 1e-5, 8);
        for k in 0..50 {
            let exponent = -10.0 + 4.0 * (k as f64 / 49.0);
            let knee = 10f64.powf(exponent) * 1.3;
            let pts = lin_log_curve(knee, &grid);
            let report = detect_knee_points(&pts).unwrap();
            let err = (report.knee_current / knee).log10().abs();
            assert!(err <= 0.5, "planted {knee:e}, found {:e}", report.knee_current);
        }
    }

    #[test]
    fn dynamic_range_pure_log() {
        let grid = log_grid(1e-10, 1e-5, 8);
        let pts: Vec<(f64, f64)> = grid.iter().map(|&i| (i, 1.0 - 0.06 * i.log10())).collect();
        let dr = dynamic_range_db_points(&pts, 0.01).unwrap();
        assert!((dr - 100.0).abs() < 1e-9, "{dr}");
    }

    #[test]
    fn dynamic_range_flat_is_error() {
        let grid = log_grid(1e-10, 1e-6, 8);
        let pts: Vec<(f64, f64)> = grid.iter().map(|&i| (i, 0.5)).collect();
        assert_eq!(dynamic_range_db_points(&pts, 0.01), Err(AnalysisError::NoSensitiveRegion));
    }

    #[test]
    fn dynamic_range_respacing_invariance() {
        // Smooth lin-log response sampled on two different grids.
        let f = |i: f64| {
            let knee = 1e-8;
            if i <= knee { 1.0 - 0.05 * i / knee } else { 0.95 - 0.06 * (i / knee).log10() }
        };
        let a: Vec<(f64, f64)> = log_grid(1e-11, 1e-5, 8).into_iter().map(|i| (i, f(i))).collect();
        let b: Vec<(f64, f64)> = log_grid(1e-11, 1e-5, 13).into_iter().map(|i| (i, f(i))).collect();
        let dra = dynamic_range_db_points(&a, 0.01).unwrap();
        let drb = dynamic_range_db_points(&b, 0.01).unwrap();
        // Tolerance: one grid cell of the coarser spacing = 20/8 dB.
        assert!((dra - drb).abs() <= 20.0 / 8.0 + 1e-9, "{dra} vs {drb}");
    }

    #[test]
    fn area_defaults() {
        // Single default MOSFET: 0.36 µm × 0.09 µm × 25 = 0.81 µm².
        let c = crate::netlist::parse("M1 d g s 0 W=360n L=90n\n.end").unwrap();
        let report = area_report(&c, &AreaConfig::default()).unwrap();
        assert!((report.rows[0].2 - 0.81).abs() < 1e-12);
        // Memristor 40 nm × 90 nm = 3.6e-3 µm².
        let c = crate::netlist::parse("YMEM m1 a 0\n.end").unwrap();
        let report = area_report(&c, &AreaConfig::default()).unwrap();
        assert!((report.rows[0].2 - 3.6e-3).abs() < 1e-15);
    }

    #[test]
    fn area_total_equals_row_sum() {
        let c = crate::netlist::Builtin::Pixel3tm.circuit();
        let mut cfg = AreaConfig::default();
        cfg.calibrated_totals.insert("pixel_3tm".into(), 26.83);
        let report = area_report(&c, &cfg).unwrap();
        let sum: f64 = report.rows.iter().map(|r| r.2).sum();
        assert_eq!(report.total_um2, sum);
        assert!((report.total_um2 - 26.83).abs() < 1e-9);
    }

    #[test]
    fn missing_kind_is_reported() {
        let c = crate::netlist::parse("C1 a 0 1p\nR1 a 0 1k\n.end").unwrap();
        let cfg = AreaConfig { cap_density_f_per_m2: None, ..AreaConfig::default() };
        assert_eq!(area_report(&c, &cfg), Err(AnalysisError::MissingGeometry("capacitor".into())));
    }

    #[test]
    fn comparison_ratios() {
        let a = PixelReport {
            name: "pixel_3tm".into(),
            total_area_um2: Some(26.83),
            avg_power_w: Some(3.76e-6),
            swing_v: Some(0.4),
            dynamic_range_db: Some(100.0),
        };
        let b = PixelReport {
            name: "pixel_4t_linlog".into(),
            total_area_um2: Some(100.0),
            avg_power_w: Some(0.605e-6),
            swing_v: Some(0.2),
            dynamic_range_db: Some(102.0),
        };
        let cmp = compare_pixels(&[a.clone(), b]).unwrap();
        let (_, area, power, swing, dr) = &cmp.ratios[0];
        assert!((area.unwrap() - 0.2683).abs() < 1e-9);
        assert!(power.unwrap() > 1.0);
        assert!((swing.unwrap() - 2.0).abs() < 1e-12);
        assert!((dr.unwrap() + 2.0).abs() < 1e-12);
        // Identical reports: all ratios 1.
        let cmp = compare_pixels(&[a.clone(), a]).unwrap();
        let (_, area, power, swing, dr) = &cmp.ratios[0];
        assert_eq!(area.unwrap(), 1.0);
        assert_eq!(power.unwrap(), 1.0);
        assert_eq!(swing.unwrap(), 1.0);
        assert_eq!(dr.unwrap(), 0.0);
    }

    #[test]
    fn swing_of_synthetic_traces() {
        use crate::engine::assemble;
        // Constant trace has zero swing; sine spans 2·amplitude.
        let sys = assemble(crate::netlist::parse("V1 a 0 DC 1\nR1 a 0 1k\n.end").unwrap()).unwrap();
        let tr = crate::engine::transient(&sys, 1e-5, &crate::engine::SimOptions::default()).unwrap();
        let swing = output_swing(&tr, "a", &[(0.0, 1e-5)]).unwrap();
        assert!(swing.abs() < 1e-9);
        assert_eq!(
            output_swing(&tr, "a", &[(1.0, 2.0)]),
            Err(AnalysisError::EmptyWindow)
        );
    }
}
