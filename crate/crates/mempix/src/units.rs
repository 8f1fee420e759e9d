//! Engineering-notation numbers as used in netlists: `1k`, `10n`, `4.7meg`.

/// Parse a number with an optional engineering suffix.
///
/// Accepted suffixes (case-insensitive): f, p, n, u, m, k, meg, g.
/// Plain decimal and scientific notation pass through unchanged.
pub fn parse_value(token: &str) -> Option<f64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let lower = t.to_ascii_lowercase();
    // `meg` must be tried before `m`.
    let suffixes: [(&str, i32); 8] = [
        ("meg", 6),
        ("f", -15),
        ("p", -12),
        ("n", -9),
        ("u", -6),
        ("m", -3),
        ("k", 3),
        ("g", 9),
    ];
    for (suffix, exp) in suffixes {
        if let Some(stem) = lower.strip_suffix(suffix) {
            if stem.is_empty() || stem.parse::<f64>().is_err() {
                continue;
            }
            // Splice the exponent into the literal so the value is rounded
            // once; `12f` must read back exactly as `1.2e-14`.
            let spliced = if let Some((mantissa, e)) = stem.split_once('e') {
                let shifted: i32 = match e.parse::<i32>() {
                    Ok(v) => v + exp,
                    Err(_) => continue,
                };
                format!("{mantissa}e{shifted}")
            } else {
                format!("{stem}e{exp}")
            };
            if let Ok(v) = spliced.parse::<f64>() {
                if v.is_finite() {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Format a value in scientific notation that re-parses exactly.
///
/// Rust's `{:e}` prints the shortest representation that round-trips, which
/// is what the serializer's structural-equality contract needs.
pub fn format_value(v: f64) -> String {
    format!("{v:e}")
}
