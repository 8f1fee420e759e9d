//! CSV emission. CSV files are the ground-truth artifacts: RFC-4180-style,
//! `.` decimal separator, scientific notation with 9 significant digits,
//! byte-identical across runs.

use std::fmt::Write as _;

/// One numeric cell: 9 significant digits, scientific.
pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self { buf, columns: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn num_row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
        self.row(&cells);
    }

    /// Append a commented text block after the table (fit reports).
    pub fn append_comment_block(&mut self, text: &str) {
        for line in text.lines() {
            let _ = writeln!(self.buf, "# {line}");
        }
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(1.0 / 3.0), "3.33333333e-1");
        assert_eq!(num(0.0), "0.00000000e0");
        assert_eq!(num(-1.2e-9), "-1.20000000e-9");
    }

    #[test]
    fn layout() {
        let mut csv = Csv::new(&["time_s", "v_out"]);
        csv.num_row(&[0.0, 1.2]);
        csv.append_comment_block("slope: x");
        let text = csv.into_string();
        assert_eq!(text, "time_s,v_out\n0.00000000e0,1.20000000e0\n# slope: x\n");
    }
}
