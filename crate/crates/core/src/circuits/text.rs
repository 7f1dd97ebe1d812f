//! Line-oriented gate list format: `KIND target [qubit:value ...] [angle]`.
//!
//! The kind token names the gate together with its control count, e.g.
//! `RX`, `CNOT`, `CPHASE`, `MCRX`. Angles use Rust's shortest round-trip
//! float formatting so a parsed list reproduces the original bit for bit.

use crate::error::{Error, Result};
use crate::statevec::{Control, Gate, GateKind};

fn kind_token(gate: &Gate) -> String {
    let base = match gate.kind {
        GateKind::X => "X",
        GateKind::Y => "Y",
        GateKind::Z => "Z",
        GateKind::H => "H",
        GateKind::Rx(_) => "RX",
        GateKind::Ry(_) => "RY",
        GateKind::Rz(_) => "RZ",
        GateKind::Phase(_) => "PHASE",
    };
    match (gate.kind, gate.controls.len()) {
        (_, 0) => base.to_string(),
        (GateKind::X, 1) => "CNOT".to_string(),
        (GateKind::Phase(_), 1) => "CPHASE".to_string(),
        _ => format!("MC{base}"),
    }
}

pub fn format_gate(gate: &Gate) -> String {
    let mut line = format!("{} {}", kind_token(gate), gate.target);
    for c in &gate.controls {
        line.push_str(&format!(" {}:{}", c.qubit, u8::from(c.value)));
    }
    if let Some(angle) = gate.kind.angle() {
        line.push_str(&format!(" {angle:?}"));
    }
    line
}

pub fn to_text(gates: &[Gate]) -> String {
    let mut s = String::new();
    for g in gates {
        s.push_str(&format_gate(g));
        s.push('\n');
    }
    s
}

pub fn parse_gate(line: &str) -> Result<Gate> {
    let err = |msg: &str| Error::Parse(format!("{msg}: {line:?}"));
    let mut tokens = line.split_whitespace();
    let token = tokens.next().ok_or_else(|| err("empty gate line"))?;
    let target: usize = tokens
        .next()
        .ok_or_else(|| err("missing target"))?
        .parse()
        .map_err(|_| err("bad target"))?;

    let base = match token {
        "CNOT" => "X",
        "CPHASE" => "PHASE",
        t => t.strip_prefix("MC").unwrap_or(t),
    };
    let mut controls = Vec::new();
    let mut angle = None;
    for tok in tokens {
        if let Some((q, v)) = tok.split_once(':') {
            let qubit = q.parse().map_err(|_| err("bad control qubit"))?;
            let value = match v {
                "0" => false,
                "1" => true,
                _ => return Err(err("control value must be 0 or 1")),
            };
            controls.push(Control { qubit, value });
        } else if angle.is_none() {
            angle = Some(tok.parse::<f64>().map_err(|_| err("bad angle"))?);
        } else {
            return Err(err("trailing tokens"));
        }
    }
    let need_angle = || angle.ok_or_else(|| err("missing angle"));
    let kind = match base {
        "X" => GateKind::X,
        "Y" => GateKind::Y,
        "Z" => GateKind::Z,
        "H" => GateKind::H,
        "RX" => GateKind::Rx(need_angle()?),
        "RY" => GateKind::Ry(need_angle()?),
        "RZ" => GateKind::Rz(need_angle()?),
        "PHASE" => GateKind::Phase(need_angle()?),
        _ => return Err(err("unknown gate kind")),
    };
    if kind.angle().is_none() && angle.is_some() {
        return Err(err("unexpected angle"));
    }
    let expected_controls = match token {
        "CNOT" | "CPHASE" => Some(1),
        t if t.starts_with("MC") => None,
        _ => Some(0),
    };
    match expected_controls {
        Some(k) if k != controls.len() => return Err(err("control count does not match kind")),
        None if controls.is_empty() => return Err(err("multi-controlled gate without controls")),
        _ => {}
    }
    Ok(Gate {
        kind,
        target,
        controls,
    })
}

pub fn parse_text(text: &str) -> Result<Vec<Gate>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_gate)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_known_kinds() {
        assert_eq!(format_gate(&Gate::cnot(3, 1)), "CNOT 1 3:1");
        assert_eq!(format_gate(&Gate::cphase(0, 2, 0.5)), "CPHASE 2 0:1 0.5");
        assert_eq!(
            format_gate(&Gate::mcrx(&[Control::on(4), Control::off(0)], 8, -1.25)),
            "MCRX 8 4:1 0:0 -1.25"
        );
        assert_eq!(format_gate(&Gate::h(0)), "H 0");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_gate("FOO 1").is_err());
        assert!(parse_gate("RX 1").is_err());
        assert!(parse_gate("CNOT 1").is_err());
        assert!(parse_gate("H 0 0.3").is_err());
        assert!(parse_gate("X 0 1:2").is_err());
    }
}
