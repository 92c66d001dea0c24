//! Line-oriented text format.
//!
//! ```text
//! # comments and blank lines are ignored
//! <left_ray_slope> <period|none> <increment|none> <beta> <delta>
//! <left> <right> <a> <b> <c>
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces every coefficient bit for bit.

use std::fmt::Write as _;

use super::{Bounds, PiecewiseInstance, QuadPiece, Tail};
use crate::error::InstanceError;

pub fn write_instance(f: &PiecewiseInstance) -> String {
    let mut out = String::new();
    out.push_str("# left_ray_slope period increment beta delta\n");
    let (period, increment) = match f.tail() {
        Some(t) => (t.period.to_string(), t.increment.to_string()),
        None => ("none".to_owned(), "none".to_owned()),
    };
    let b = f.bounds();
    let _ = writeln!(
        out,
        "{} {} {} {} {}",
        f.left_ray_slope(),
        period,
        increment,
        b.beta,
        b.delta
    );
    out.push_str("# left right a b c\n");
    for p in f.pieces() {
        let _ = writeln!(out, "{} {} {} {} {}", p.left, p.right, p.a, p.b, p.c);
    }
    out
}

fn parse_field(tok: &str, line: usize) -> Result<f64, InstanceError> {
    tok.parse::<f64>().map_err(|_| InstanceError::Parse {
        line,
        message: format!("not a number: `{tok}`"),
    })
}

fn fields(text: &str, line: usize) -> Result<[&str; 5], InstanceError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    toks.try_into().map_err(|t: Vec<&str>| InstanceError::Parse {
        line,
        message: format!("expected 5 fields, found {}", t.len()),
    })
}

pub fn read_instance(text: &str) -> Result<PiecewiseInstance, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(InstanceError::Parse {
        line: 0,
        message: "missing header".into(),
    })?;
    let [slope, period, increment, beta, delta] = fields(header, hline)?;
    let left_ray_slope = parse_field(slope, hline)?;
    let tail = match (period, increment) {
        ("none", "none") => None,
        ("none", _) | (_, "none") => {
            return Err(InstanceError::Parse {
                line: hline,
                message: "period and increment must both be `none` or both be numbers".into(),
            })
        }
        (p, i) => Some(Tail {
            period: parse_field(p, hline)?,
            increment: parse_field(i, hline)?,
        }),
    };
    let bounds = Bounds {
        beta: parse_field(beta, hline)?,
        delta: parse_field(delta, hline)?,
    };

    let mut pieces = Vec::new();
    for (line, text) in lines {
        let [l, r, a, b, c] = fields(text, line)?;
        let piece = QuadPiece {
            left: parse_field(l, line)?,
            right: parse_field(r, line)?,
            a: parse_field(a, line)?,
            b: parse_field(b, line)?,
            c: parse_field(c, line)?,
        };
        pieces.push(piece);
    }
    PiecewiseInstance::new(left_ray_slope, pieces, tail, bounds)
}
