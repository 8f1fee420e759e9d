//! Flat key-value config files (area calibration). Lines are
//! `section.key = value`, `#` starts a comment; see docs/config.md.

use mempix::analysis::AreaConfig;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parse flat `key = value` text into (key, numeric value) pairs.
pub fn parse_flat(text: &str) -> Result<Vec<(String, f64)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.split_once('#') {
            Some((head, _)) => head.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let number = mempix::units::parse_value(value).ok_or_else(|| ConfigError {
            line: line_no,
            message: format!("invalid numeric value `{value}` for `{key}`"),
        })?;
        out.push((key, number));
    }
    Ok(out)
}

/// Build an area calibration from config text. Every key must be known;
/// kinds not covered stay unset and are reported by the area report if a
/// circuit needs them.
pub fn area_config_from_text(text: &str) -> Result<AreaConfig, ConfigError> {
    let mut cfg = AreaConfig::empty();
    for (i, (key, value)) in parse_flat(text)?.into_iter().enumerate() {
        let um2 = value * 1e-12;
        match key.as_str() {
            "mosfet.overhead" => cfg.mosfet_overhead = Some(value),
            // fF/µm² to F/m²: 1 fF/µm² = 1e-3 F/m².
            "capacitor.density_ff_per_um2" => cfg.cap_density_f_per_m2 = Some(value * 1e-3),
            "vsource.area_um2" => cfg.vsource_area_m2 = Some(um2),
            "isource.area_um2" => cfg.isource_area_m2 = Some(um2),
            "photodiode.area_um2" => cfg.photodiode_area_m2 = Some(um2),
            other => {
                if let Some(circuit) = other.strip_prefix("total.") {
                    cfg.calibrated_totals.insert(circuit.to_string(), value);
                } else {
                    return Err(ConfigError {
                        line: i + 1,
                        message: format!("unknown config key `{other}`"),
                    });
                }
            }
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_calibration() {
        let text = "\
# calibration
mosfet.overhead = 25
capacitor.density_ff_per_um2 = 5
vsource.area_um2 = 0
isource.area_um2 = 0
photodiode.area_um2 = 10
total.pixel_3tm = 26.83
total.pixel_4t_linlog = 100.00
";
        let cfg = area_config_from_text(text).unwrap();
        assert_eq!(cfg.mosfet_overhead, Some(25.0));
        assert_eq!(cfg.cap_density_f_per_m2, Some(5e-3));
        assert_eq!(cfg.calibrated_totals["pixel_3tm"], 26.83);
        assert!(cfg.calibrated);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(area_config_from_text("bogus.key = 1\n").is_err());
    }

    #[test]
    fn bad_number_rejected() {
        let err = area_config_from_text("mosfet.overhead = abc\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let pairs = parse_flat("\n# c\nmosfet.overhead = 25 # inline\n").unwrap();
        assert_eq!(pairs, vec![("mosfet.overhead".to_string(), 25.0)]);
    }
}
