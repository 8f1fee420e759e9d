//! Line-oriented SPICE-subset parser.
//!
//! Grammar (case-insensitive, `*` comment lines, `+` continuation lines):
//!
//! ```text
//! M<name> d g s b [W= L= VTH= KP= NS= LAMBDA= VT= TYPE=N|P]
//! R<name> n1 n2 <value>
//! C<name> n1 n2 <value>
//! V<name> n+ n- DC <v> | <v> | PULSE(v1 v2 delay rise fall width period) | PWL(t1 v1 ...)
//! I<name> n+ n- DC <v> | <v> | PULSE(...) | PWL(...)
//! YMEM <name> n+ n- [RON= ROFF= D= MU= X0= P= WINDOW=JOGLEKAR|BIOLEK|NONE WIDTH= HEIGHT=]
//! YPD <name> n+ n- IPH=<v|PULSE(...)|PWL(...)> [CPD= IS= CLAMP=0|1]
//! .param <name>=<value>
//! .tran <dt> <tstop>
//! .dc <source> <start> <stop> <points> [dec]
//! .end
//! ```
//!
//! Values accept engineering suffixes f, p, n, u, m, k, meg, g. A leading
//! comment line names the circuit. Node labels are free-form; `0` is ground.

use super::{Circuit, CircuitError};
use crate::devices::{
    DeviceCard, MemristorCard, MosfetCard, PhotodiodeCard, Polarity, Waveform, WindowKind,
};
use crate::units::parse_value;

/// Parse failure with its source position (1-based line and column).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown device prefix `{prefix}`")]
    UnknownDevicePrefix { line: usize, column: usize, prefix: String },
    #[error("line {line}, column {column}: duplicate device name `{name}`")]
    DuplicateName { line: usize, column: usize, name: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UnknownDevicePrefix { line, column, .. }
            | ParseError::DuplicateName { line, column, .. } => (*line, *column),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, column, message: message.into() }
}

/// Split one physical line into tokens; parenthesized groups stay attached
/// to the token that opens them, so `PULSE(0 1.2 1u ...)` is one token.
fn tokenize_line(text: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start_col = 0usize;
    let mut depth = 0usize;
    for (i, ch) in text.chars().enumerate() {
        let col = i + 1;
        match ch {
            '(' => {
                depth += 1;
                if current.is_empty() {
                    start_col = col;
                }
                current.push(ch);
            }
            ')' => {
                if depth == 0 {
                    return Err(syntax(line_no, col, "unmatched `)`"));
                }
                depth -= 1;
                current.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !current.is_empty() {
                    tokens.push(Token { text: std::mem::take(&mut current), line: line_no, column: start_col });
                }
            }
            c => {
                if current.is_empty() {
                    start_col = col;
                }
                current.push(c);
            }
        }
    }
    if depth != 0 {
        return Err(syntax(line_no, text.chars().count().max(1), "unclosed `(`"));
    }
    if !current.is_empty() {
        tokens.push(Token { text: current, line: line_no, column: start_col });
    }
    Ok(tokens)
}

/// A logical statement: tokens of one line plus its continuations.
struct Statement {
    tokens: Vec<Token>,
}

impl Statement {
    fn first(&self) -> &Token {
        &self.tokens[0]
    }

    fn get(&self, idx: usize) -> Option<&Token> {
        self.tokens.get(idx)
    }

    /// Token at `idx` or a syntax error anchored at the end of the statement.
    fn require(&self, idx: usize, what: &str) -> Result<&Token, ParseError> {
        self.tokens.get(idx).ok_or_else(|| {
            let last = self.tokens.last().unwrap();
            syntax(last.line, last.column + last.text.chars().count(), format!("expected {what}"))
        })
    }
}

fn number(tok: &Token, what: &str) -> Result<f64, ParseError> {
    parse_value(&tok.text)
        .ok_or_else(|| syntax(tok.line, tok.column, format!("invalid {what} `{}`", tok.text)))
}

/// Parse netlist text into a [`Circuit`].
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit = Circuit::new("netlist");
    let mut named = false;
    let mut statements: Vec<Statement> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('*') {
            // A leading comment names the circuit.
            if !named && statements.is_empty() {
                let title = comment.trim();
                if !title.is_empty() {
                    circuit.name = title.to_string();
                    named = true;
                }
            }
            continue;
        }
        if trimmed.starts_with('+') {
            let body = &raw[raw.find('+').unwrap() + 1..];
            let mut toks = tokenize_line(body, line_no)?;
            // Columns computed relative to the continuation body; shift past `+`.
            let shift = raw.find('+').unwrap() + 1;
            for t in &mut toks {
                t.column += shift;
            }
            match statements.last_mut() {
                Some(stmt) => stmt.tokens.extend(toks),
                None => return Err(syntax(line_no, raw.find('+').unwrap() + 1, "continuation with no preceding statement")),
            }
            continue;
        }
        let tokens = tokenize_line(raw, line_no)?;
        if !tokens.is_empty() {
            statements.push(Statement { tokens });
        }
    }

    let mut ended = false;
    for stmt in &statements {
        if ended {
            break;
        }
        let head = stmt.first();
        let upper = head.text.to_ascii_uppercase();
        if upper == ".END" {
            ended = true;
            continue;
        }
        match upper.chars().next().unwrap() {
            'R' => parse_rc(stmt, &mut circuit, true)?,
            'C' => parse_rc(stmt, &mut circuit, false)?,
            'V' => parse_source(stmt, &mut circuit, true)?,
            'I' => parse_source(stmt, &mut circuit, false)?,
            'M' => parse_mosfet(stmt, &mut circuit)?,
            'Y' => parse_y_device(stmt, &mut circuit, &upper)?,
            '.' => parse_directive(stmt, &mut circuit, &upper)?,
            _ => {
                return Err(ParseError::UnknownDevicePrefix {
                    line: head.line,
                    column: head.column,
                    prefix: head.text.chars().take(4).collect(),
                })
            }
        }
    }

    Ok(circuit)
}

/// Map circuit-construction failures back to a source position.
fn lift(err: CircuitError, tok: &Token) -> ParseError {
    match err {
        CircuitError::DuplicateName(name) => {
            ParseError::DuplicateName { line: tok.line, column: tok.column, name }
        }
        other => syntax(tok.line, tok.column, other.to_string()),
    }
}

fn parse_rc(stmt: &Statement, circuit: &mut Circuit, is_resistor: bool) -> Result<(), ParseError> {
    let head = stmt.first();
    let n1 = stmt.require(1, "first terminal node")?;
    let n2 = stmt.require(2, "second terminal node")?;
    let val_tok = stmt.require(3, "value")?;
    if let Some(extra) = stmt.get(4) {
        return Err(syntax(extra.line, extra.column, format!("unexpected token `{}`", extra.text)));
    }
    let value = number(val_tok, if is_resistor { "resistance" } else { "capacitance" })?;
    let card = if is_resistor {
        DeviceCard::Resistor { ohms: value }
    } else {
        DeviceCard::Capacitor { farads: value }
    };
    circuit
        .add_device(head.text.clone(), &[&n1.text, &n2.text], card)
        .map_err(|e| lift(e, head))
}

/// Parse `PULSE(...)` / `PWL(...)` / `DC <v>` / bare value source specs.
fn parse_waveform_tokens(
    stmt: &Statement,
    mut idx: usize,
    kind_word: &str,
) -> Result<(Waveform, usize), ParseError> {
    let tok = stmt.require(idx, &format!("{kind_word} value or waveform"))?;
    let upper = tok.text.to_ascii_uppercase();
    if upper == "DC" {
        idx += 1;
        let v = number(stmt.require(idx, "DC value")?, "DC value")?;
        return Ok((Waveform::Dc(v), idx + 1));
    }
    if let Some(wave) = parse_functional_waveform(tok)? {
        return Ok((wave, idx + 1));
    }
    let v = number(tok, &format!("{kind_word} value"))?;
    Ok((Waveform::Dc(v), idx + 1))
}

/// Parse a `PULSE(...)`/`PWL(...)` token, if it is one.
fn parse_functional_waveform(tok: &Token) -> Result<Option<Waveform>, ParseError> {
    let upper = tok.text.to_ascii_uppercase();
    let parse_args = |inner: &str| -> Result<Vec<f64>, ParseError> {
        inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                parse_value(s)
                    .ok_or_else(|| syntax(tok.line, tok.column, format!("invalid number `{s}` in waveform")))
            })
            .collect()
    };
    if upper.starts_with("PULSE(") {
        if !upper.ends_with(')') {
            return Err(syntax(tok.line, tok.column, "malformed PULSE(...)"));
        }
        let args = parse_args(&tok.text[6..tok.text.len() - 1])?;
        if args.len() != 7 {
            return Err(syntax(
                tok.line,
                tok.column,
                format!("PULSE takes 7 arguments (v1 v2 delay rise fall width period), got {}", args.len()),
            ));
        }
        let wave = Waveform::Pulse {
            v1: args[0],
            v2: args[1],
            delay: args[2],
            rise: args[3],
            fall: args[4],
            width: args[5],
            period: args[6],
        };
        wave.validate().map_err(|m| syntax(tok.line, tok.column, m))?;
        return Ok(Some(wave));
    }
    if upper.starts_with("PWL(") {
        if !upper.ends_with(')') {
            return Err(syntax(tok.line, tok.column, "malformed PWL(...)"));
        }
        let args = parse_args(&tok.text[4..tok.text.len() - 1])?;
        if args.is_empty() || args.len() % 2 != 0 {
            return Err(syntax(tok.line, tok.column, "PWL takes time/value pairs"));
        }
        let points: Vec<(f64, f64)> = args.chunks(2).map(|c| (c[0], c[1])).collect();
        let wave = Waveform::Pwl(points);
        wave.validate().map_err(|m| syntax(tok.line, tok.column, m))?;
        return Ok(Some(wave));
    }
    Ok(None)
}

fn parse_source(stmt: &Statement, circuit: &mut Circuit, is_voltage: bool) -> Result<(), ParseError> {
    let head = stmt.first();
    let n1 = stmt.require(1, "positive terminal node")?;
    let n2 = stmt.require(2, "negative terminal node")?;
    let (wave, next) = parse_waveform_tokens(stmt, 3, if is_voltage { "voltage" } else { "current" })?;
    if let Some(extra) = stmt.get(next) {
        return Err(syntax(extra.line, extra.column, format!("unexpected token `{}`", extra.text)));
    }
    let card = if is_voltage { DeviceCard::VSource { wave } } else { DeviceCard::ISource { wave } };
    circuit
        .add_device(head.text.clone(), &[&n1.text, &n2.text], card)
        .map_err(|e| lift(e, head))
}

/// `key=value` split; returns (KEY uppercased, value text).
fn key_value(tok: &Token) -> Result<(String, &str), ParseError> {
    match tok.text.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_ascii_uppercase(), v)),
        _ => Err(syntax(tok.line, tok.column, format!("expected key=value, got `{}`", tok.text))),
    }
}

fn parse_mosfet(stmt: &Statement, circuit: &mut Circuit) -> Result<(), ParseError> {
    let head = stmt.first();
    // Terminal-count mismatch is the canonical arity error here: require
    // exactly four node tokens before any key=value.
    let mut nodes = Vec::new();
    let mut idx = 1;
    while idx < stmt.tokens.len() && !stmt.tokens[idx].text.contains('=') {
        nodes.push(&stmt.tokens[idx]);
        idx += 1;
    }
    if nodes.len() != 4 {
        return Err(syntax(
            head.line,
            head.column,
            format!("mosfet `{}` needs 4 terminals (d g s b), got {}", head.text, nodes.len()),
        ));
    }

    // Polarity first so its default card seeds the other fields.
    let mut polarity = Polarity::N;
    for t in &stmt.tokens[idx..] {
        let (key, value) = key_value(t)?;
        if key == "TYPE" {
            polarity = match value.to_ascii_uppercase().as_str() {
                "N" => Polarity::N,
                "P" => Polarity::P,
                other => return Err(syntax(t.line, t.column, format!("TYPE must be N or P, got `{other}`"))),
            };
        }
    }
    let mut card = match polarity {
        Polarity::N => MosfetCard::nmos(),
        Polarity::P => MosfetCard::pmos(),
    };
    for t in &stmt.tokens[idx..] {
        let (key, value) = key_value(t)?;
        let num = || {
            parse_value(value)
                .ok_or_else(|| syntax(t.line, t.column, format!("invalid value `{value}` for {key}")))
        };
        match key.as_str() {
            "TYPE" => {}
            "W" => card.w = num()?,
            "L" => card.l = num()?,
            "VTH" => card.vth = num()?,
            "KP" => card.kp = num()?,
            "NS" | "N" => card.n_slope = num()?,
            "LAMBDA" => card.lambda = num()?,
            "VT" => card.temp_vt = num()?,
            other => return Err(syntax(t.line, t.column, format!("unknown mosfet parameter `{other}`"))),
        }
    }
    let labels: Vec<&str> = nodes.iter().map(|t| t.text.as_str()).collect();
    circuit
        .add_device(head.text.clone(), &labels, DeviceCard::Mosfet(card))
        .map_err(|e| lift(e, head))
}

fn parse_y_device(stmt: &Statement, circuit: &mut Circuit, upper: &str) -> Result<(), ParseError> {
    let head = stmt.first();
    match upper {
        "YMEM" => parse_memristor(stmt, circuit),
        "YPD" => parse_photodiode(stmt, circuit),
        _ => Err(ParseError::UnknownDevicePrefix {
            line: head.line,
            column: head.column,
            prefix: head.text.chars().take(8).collect(),
        }),
    }
}

fn parse_memristor(stmt: &Statement, circuit: &mut Circuit) -> Result<(), ParseError> {
    let name = stmt.require(1, "memristor name")?.clone();
    let n1 = stmt.require(2, "positive terminal node")?;
    let n2 = stmt.require(3, "negative terminal node")?;
    let mut card = MemristorCard::default();
    let mut window_p: Option<u32> = None;
    let mut window_kind: Option<&str> = None;
    for t in &stmt.tokens[4..] {
        let (key, value) = key_value(t)?;
        let num = || {
            parse_value(value)
                .ok_or_else(|| syntax(t.line, t.column, format!("invalid value `{value}` for {key}")))
        };
        match key.as_str() {
            "RON" => card.r_on = num()?,
            "ROFF" => card.r_off = num()?,
            "D" => card.d = num()?,
            "MU" => card.mu_v = num()?,
            "X0" => card.x0 = num()?,
            "WIDTH" => card.width = num()?,
            "HEIGHT" => card.height = num()?,
            "P" => {
                let v = num()?;
                if v < 1.0 || v.fract() != 0.0 || v > 32.0 {
                    return Err(syntax(t.line, t.column, "window exponent P must be an integer in 1..=32"));
                }
                window_p = Some(v as u32);
            }
            "WINDOW" => {
                window_kind = Some(match value.to_ascii_uppercase().as_str() {
                    "JOGLEKAR" => "joglekar",
                    "BIOLEK" => "biolek",
                    "NONE" => "none",
                    other => {
                        return Err(syntax(
                            t.line,
                            t.column,
                            format!("WINDOW must be JOGLEKAR, BIOLEK or NONE, got `{other}`"),
                        ))
                    }
                });
            }
            other => return Err(syntax(t.line, t.column, format!("unknown memristor parameter `{other}`"))),
        }
    }
    let p = window_p.unwrap_or(match card.window {
        WindowKind::Joglekar { p } | WindowKind::Biolek { p } => p,
        WindowKind::None => 2,
    });
    card.window = match window_kind.unwrap_or("joglekar") {
        "joglekar" => WindowKind::Joglekar { p },
        "biolek" => WindowKind::Biolek { p },
        _ => WindowKind::None,
    };
    circuit
        .add_device(name.text.clone(), &[&n1.text, &n2.text], DeviceCard::Memristor(card))
        .map_err(|e| lift(e, &name))
}

fn parse_photodiode(stmt: &Statement, circuit: &mut Circuit) -> Result<(), ParseError> {
    let name = stmt.require(1, "photodiode name")?.clone();
    let n1 = stmt.require(2, "positive terminal node")?;
    let n2 = stmt.require(3, "negative terminal node")?;
    let mut card = PhotodiodeCard::default();
    let mut have_iph = false;
    for t in &stmt.tokens[4..] {
        let (key, value) = key_value(t)?;
        match key.as_str() {
            "IPH" => {
                have_iph = true;
                let synth = Token { text: value.to_string(), line: t.line, column: t.column };
                card.iph = match parse_functional_waveform(&synth)? {
                    Some(wave) => wave,
                    None => Waveform::Dc(number(&synth, "photocurrent")?),
                };
            }
            "CPD" => {
                card.c_pd = parse_value(value)
                    .ok_or_else(|| syntax(t.line, t.column, format!("invalid value `{value}` for CPD")))?;
            }
            "IS" => {
                card.i_s = parse_value(value)
                    .ok_or_else(|| syntax(t.line, t.column, format!("invalid value `{value}` for IS")))?;
            }
            "CLAMP" => {
                card.clamp_enabled = match value {
                    "0" => false,
                    "1" => true,
                    other => return Err(syntax(t.line, t.column, format!("CLAMP must be 0 or 1, got `{other}`"))),
                };
            }
            other => return Err(syntax(t.line, t.column, format!("unknown photodiode parameter `{other}`"))),
        }
    }
    if !have_iph {
        return Err(syntax(name.line, name.column, "photodiode requires IPH=<waveform>"));
    }
    circuit
        .add_device(name.text.clone(), &[&n1.text, &n2.text], DeviceCard::Photodiode(card))
        .map_err(|e| lift(e, &name))
}

fn parse_directive(stmt: &Statement, circuit: &mut Circuit, upper: &str) -> Result<(), ParseError> {
    let head = stmt.first();
    match upper {
        ".PARAM" => {
            let kv = stmt.require(1, "name=value")?;
            let (key, value) = key_value(kv)?;
            let v = parse_value(value)
                .ok_or_else(|| syntax(kv.line, kv.column, format!("invalid value `{value}`")))?;
            circuit.params.insert(key.to_ascii_lowercase(), v);
            Ok(())
        }
        ".TRAN" => {
            let dt = number(stmt.require(1, "time step")?, "time step")?;
            let tstop = number(stmt.require(2, "stop time")?, "stop time")?;
            if dt <= 0.0 || tstop <= 0.0 {
                return Err(syntax(head.line, head.column, ".tran times must be positive"));
            }
            circuit.params.insert("tran.dt".into(), dt);
            circuit.params.insert("tran.tstop".into(), tstop);
            Ok(())
        }
        ".DC" => {
            let src = stmt.require(1, "source name")?;
            let start = number(stmt.require(2, "start value")?, "start value")?;
            let stop = number(stmt.require(3, "stop value")?, "stop value")?;
            let points = number(stmt.require(4, "point count")?, "point count")?;
            let dec = match stmt.get(5) {
                None => false,
                Some(t) if t.text.eq_ignore_ascii_case("dec") => true,
                Some(t) => return Err(syntax(t.line, t.column, format!("unexpected token `{}`", t.text))),
            };
            circuit.params.insert("dc.start".into(), start);
            circuit.params.insert("dc.stop".into(), stop);
            circuit.params.insert("dc.points".into(), points);
            circuit.params.insert("dc.dec".into(), if dec { 1.0 } else { 0.0 });
            circuit.dc_sweep_source = Some(src.text.to_ascii_lowercase());
            Ok(())
        }
        other => Err(syntax(head.line, head.column, format!("unknown directive `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices::DeviceCard;

    #[test]
    fn resistor_with_suffix() {
        let c = parse("R1 a 0 1k\n.end").unwrap();
        assert_eq!(c.devices.len(), 1);
        match &c.devices[0].card {
            DeviceCard::Resistor { ohms } => assert_eq!(*ohms, 1000.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn memristor_card_values() {
        let c = parse("YMEM m1 a 0 RON=100 ROFF=16k").unwrap();
        match &c.devices[0].card {
            DeviceCard::Memristor(m) => {
                assert_eq!(m.r_on, 100.0);
                assert_eq!(m.r_off, 16000.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mosfet_arity_error() {
        let err = parse("Mx d g s\n.end").unwrap_err();
        match &err {
            ParseError::Syntax { line, message, .. } => {
                assert_eq!(*line, 1);
                assert!(message.contains("4 terminals"), "{message}");
                assert!(message.contains("got 3"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_prefix_with_position() {
        let err = parse("R1 a 0 1k\nQ1 a b c\n.end").unwrap_err();
        match err {
            ParseError::UnknownDevicePrefix { line, column, prefix } => {
                assert_eq!((line, column), (2, 1));
                assert_eq!(prefix, "Q1");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_name_case_insensitive() {
        let err = parse("R1 a 0 1k\nr1 b 0 2k\n.end").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateName { line: 2, .. }));
    }

    #[test]
    fn pulse_source_and_continuation() {
        let c = parse("V1 in 0\n+ PULSE(0 1.2 1u 10n 10n 5u 20u)\n.end").unwrap();
        match &c.devices[0].card {
            DeviceCard::VSource { wave: Waveform::Pulse { v2, period, .. } } => {
                assert_eq!(*v2, 1.2);
                assert_eq!(*period, 20e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pwl_source_with_commas() {
        let c = parse("I1 a 0 PWL(0,0 1u,1m)\n.end").unwrap();
        match &c.devices[0].card {
            DeviceCard::ISource { wave: Waveform::Pwl(pts) } => {
                assert_eq!(pts.len(), 2);
                assert_eq!(pts[1], (1e-6, 1e-3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn photodiode_needs_iph() {
        let err = parse("YPD pd1 a 0 CPD=10f\n.end").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let c = parse("YPD pd1 a 0 IPH=10n CPD=12f IS=1f\n.end").unwrap();
        match &c.devices[0].card {
            DeviceCard::Photodiode(p) => {
                assert_eq!(p.iph, Waveform::Dc(1e-8));
                assert_eq!(p.c_pd, 1.2e-14);
                assert_eq!(p.i_s, 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn directives_captured() {
        let c = parse("R1 a 0 1k\n.param vdd=1.2\n.tran 1n 40u\n.dc I1 1e-10 1e-5 13 dec\n.end").unwrap();
        assert_eq!(c.params["vdd"], 1.2);
        assert_eq!(c.params["tran.dt"], 1e-9);
        assert_eq!(c.params["tran.tstop"], 4e-5);
        assert_eq!(c.params["dc.points"], 13.0);
        assert_eq!(c.params["dc.dec"], 1.0);
        assert_eq!(c.dc_sweep_source.as_deref(), Some("i1"));
    }

    #[test]
    fn leading_comment_names_circuit() {
        let c = parse("* my pixel\nR1 a 0 1k\n.end").unwrap();
        assert_eq!(c.name, "my pixel");
    }

    #[test]
    fn content_after_end_ignored() {
        let c = parse("R1 a 0 1k\n.end\ngarbage that would not parse").unwrap();
        assert_eq!(c.devices.len(), 1);
    }

    #[test]
    fn mosfet_overrides() {
        let c = parse("M1 d g s 0 W=720n L=90n VTH=0.4 TYPE=N LAMBDA=0\n.end").unwrap();
        match &c.devices[0].card {
            DeviceCard::Mosfet(m) => {
                assert_eq!(m.w, 720e-9);
                assert_eq!(m.vth, 0.4);
                assert_eq!(m.lambda, 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_values_have_positions() {
        for (text, line) in [
            ("R1 a 0 1x\n.end", 1),
            ("R1 a 0\n.end", 1),
            ("V1 a 0 PULSE(1 2 3)\n.end", 1),
            ("R1 a 0 1k\nYMEM m1 a 0 RON=abc\n.end", 2),
            ("YFOO x a 0\n.end", 1),
            ("R1 a 0 1k extra\n.end", 1),
            (".tran 1n\n.end", 1),
            ("C1 a 0 (\n.end", 1),
            ("R1 a 0 1k)\n.end", 1),
        ] {
            let err = parse(text).unwrap_err();
            assert_eq!(err.position().0, line, "{text:?} -> {err}");
            assert!(err.position().1 >= 1);
        }
    }

    #[test]
    fn ground_always_present() {
        let c = parse("R1 a b 1k\n.end").unwrap();
        assert_eq!(c.node_label(0), "0");
        assert_eq!(c.node_count(), 3);
    }
}
