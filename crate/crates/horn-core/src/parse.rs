//! Text syntax for angles, angle pairs and class triples.
//!
//! Angles are either decimals in radians (`1.25`, `-0.5e-1`) or rational multiples
//! of π (`pi`, `2pi/3`, `-11*pi/6`, `pi/4`), which stay exact.

use thiserror::Error;

use crate::angle::Angle;
use crate::isometry::{AnglePair, ClassTriple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at position {position} in {input:?}")]
pub struct ParseError {
    pub input: String,
    /// Byte offset of the offending character.
    pub position: usize,
    pub message: String,
}

fn err(input: &str, position: usize, message: impl Into<String>) -> ParseError {
    ParseError { input: input.to_string(), position, message: message.into() }
}

fn digits_end(s: &str, from: usize) -> usize {
    s[from..].find(|c: char| !c.is_ascii_digit()).map_or(s.len(), |k| from + k)
}

pub fn parse_angle(text: &str) -> Result<Angle, ParseError> {
    parse_angle_at(text, text, 0)
}

/// Parses `field`, reporting positions relative to `whole` shifted by `offset`.
fn parse_angle_at(whole: &str, field: &str, offset: usize) -> Result<Angle, ParseError> {
    let lead = field.len() - field.trim_start().len();
    let s = field.trim();
    let at = |k: usize| offset + lead + k;
    if s.is_empty() {
        return Err(err(whole, at(0), "empty angle"));
    }
    let Some(pi) = s.find("pi").or_else(|| s.find('π')) else {
        return s.parse::<f64>().map(Angle::radians).map_err(|_| {
            let bad = s.find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c))).unwrap_or(0);
            err(whole, at(bad), "invalid number")
        });
    };
    let pi_len = if s[pi..].starts_with("pi") { 2 } else { 'π'.len_utf8() };

    let head = &s[..pi];
    let (sign, digits) = match head.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, head.strip_prefix('+').unwrap_or(head)),
    };
    let digits = digits.strip_suffix('*').unwrap_or(digits).trim_end();
    let num: i64 = if digits.is_empty() {
        1
    } else {
        let skip = head.len() - head.trim_start_matches(['+', '-']).len();
        if digits_end(digits, 0) != digits.len() {
            return Err(err(whole, at(skip + digits_end(digits, 0)), "expected integer coefficient before pi"));
        }
        digits.parse().map_err(|_| err(whole, at(skip), "coefficient out of range"))?
    };

    let tail_start = pi + pi_len;
    let tail = &s[tail_start..];
    let den: i64 = if tail.is_empty() {
        1
    } else if let Some(d) = tail.strip_prefix('/') {
        let d_at = tail_start + 1;
        if d.is_empty() || digits_end(d, 0) != d.len() {
            return Err(err(whole, at(d_at + digits_end(d, 0)), "expected integer denominator"));
        }
        let v: i64 = d.parse().map_err(|_| err(whole, at(d_at), "denominator out of range"))?;
        if v == 0 {
            return Err(err(whole, at(d_at), "zero denominator"));
        }
        v
    } else {
        return Err(err(whole, at(tail_start), "expected '/' after pi"));
    };
    Ok(Angle::pi_frac(sign * num, den))
}

/// `"a1,a2"`; the larger angle becomes the first coordinate.
pub fn parse_pair(text: &str) -> Result<AnglePair, ParseError> {
    parse_pair_at(text, text, 0)
}

fn parse_pair_at(whole: &str, field: &str, offset: usize) -> Result<AnglePair, ParseError> {
    let Some(comma) = field.find(',') else {
        return Err(err(whole, offset + field.len(), "expected ',' between the two angles"));
    };
    let rest = &field[comma + 1..];
    if let Some(extra) = rest.find(',') {
        return Err(err(whole, offset + comma + 1 + extra, "too many angles in pair"));
    }
    let x = parse_angle_at(whole, &field[..comma], offset)?;
    let y = parse_angle_at(whole, rest, offset + comma + 1)?;
    Ok(AnglePair::new(x, y))
}

/// `"a1,a2;b1,b2;c1,c2"`.
pub fn parse_tau(text: &str) -> Result<ClassTriple, ParseError> {
    let mut pairs = Vec::with_capacity(3);
    let mut offset = 0;
    for (k, field) in text.split(';').enumerate() {
        if k == 3 {
            return Err(err(text, offset - 1, "expected exactly three pairs"));
        }
        pairs.push(parse_pair_at(text, field, offset)?);
        offset += field.len() + 1;
    }
    if pairs.len() != 3 {
        return Err(err(text, text.len(), "expected exactly three pairs separated by ';'"));
    }
    Ok(ClassTriple::new(pairs[0], pairs[1], pairs[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_forms() {
        assert_eq!(parse_angle("2pi/3").unwrap(), Angle::pi_frac(2, 3));
        assert_eq!(parse_angle("11pi/6").unwrap(), Angle::pi_frac(11, 6));
        assert_eq!(parse_angle("pi").unwrap(), Angle::pi_frac(1, 1));
        assert_eq!(parse_angle(" -3*pi/4 ").unwrap(), Angle::pi_frac(-3, 4));
        assert_eq!(parse_angle("π/2").unwrap(), Angle::pi_frac(1, 2));
    }

    #[test]
    fn decimals() {
        assert_eq!(parse_angle("0").unwrap().to_radians(), 0.0);
        assert!(!parse_angle("0.5").unwrap().is_exact());
        assert!((parse_angle("1.25").unwrap().to_radians() - 1.25).abs() < 1e-15);
        assert!((parse_angle("1e-1").unwrap().to_radians() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_angle("2pi/x").unwrap_err().position, 4);
        assert_eq!(parse_angle("2pi/0").unwrap_err().position, 4);
        assert_eq!(parse_angle("2xpi").unwrap_err().position, 1);
        assert_eq!(parse_angle("").unwrap_err().position, 0);
        assert_eq!(parse_angle("1.2.3").unwrap_err().message, "invalid number");
        let e = parse_tau("pi,0;pi,0;pi,q").unwrap_err();
        assert_eq!(e.position, 13);
        assert!(parse_tau("pi,0;pi,0").is_err());
        assert!(parse_tau("pi,0;pi,0;pi,0;pi,0").is_err());
    }

    #[test]
    fn triples() {
        let t = parse_tau("7pi/4,3pi/4;7pi/4,3pi/4;7pi/4,3pi/4").unwrap();
        assert_eq!(t, ClassTriple::uniform(AnglePair::pi_frac(7, 4, 3, 4)));
        let t = parse_tau("0.5,1.5;pi,0;pi/2,pi/3").unwrap();
        assert!((t.alpha.radians().0 - 1.5).abs() < 1e-15);
        assert!((t.gamma.radians().1 - PI / 3.0).abs() < 1e-15);
    }
}
