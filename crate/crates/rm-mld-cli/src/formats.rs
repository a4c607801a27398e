//! Text formats: position sets, flats, families, matrices and words.
//!
//! All round-trips are exact. A family file looks like
//!
//! ```text
//! rm 2 5 power:25
//! J: {0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15}
//! {0,1,8,12}
//! ...
//! usage:
//! 0: 0 1 9 10 11 12
//! ...
//! ```
//!
//! The header carries `r`, `m` and the ordering kind (`lex` or
//! `power:<hex modulus>`, bit `i` of the modulus being the coefficient of
//! `x^i`). Flat lines list the sorted position indices of the flat's
//! points under that ordering. Usage lines map a position to the indices
//! of its used flats in file order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use rm_mld_core::code::CodeSpec;
use rm_mld_core::families::{AdmissibleFamily, Scope};
use rm_mld_core::geometry::Flat;
use rm_mld_core::gf2::{lex_ordering, power_ordering, BitMatrix, OrderingKind, Point, Word};

/// Renders a position set as `{a,b,c}`.
pub fn format_positions(positions: &[u16]) -> String {
    let mut out = String::from("{");
    for (i, p) in positions.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{p}");
    }
    out.push('}');
    out
}

/// Parses `{a,b,c}` (whitespace tolerated) into sorted positions.
pub fn parse_positions(s: &str) -> Result<Vec<u16>> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|rest| rest.strip_suffix('}'))
        .ok_or_else(|| anyhow!("expected a {{...}} position set, got {s:?}"))?;
    let mut out = Vec::new();
    for tok in inner.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(tok.parse::<u16>().with_context(|| format!("bad position {tok:?}"))?);
    }
    out.sort_unstable();
    Ok(out)
}

/// One flat as its sorted position indices under the given spec.
pub fn format_flat(spec: &CodeSpec, flat: &Flat) -> String {
    format_positions(&flat.positions(spec.ordering()))
}

/// Rebuilds a flat from a position line.
pub fn parse_flat(spec: &CodeSpec, line: &str) -> Result<Flat> {
    let positions = parse_positions(line)?;
    let points: Vec<Point> = positions
        .iter()
        .map(|&p| {
            if (p as usize) < spec.n() {
                Ok(spec.ordering().point(p as usize))
            } else {
                Err(anyhow!("position {p} out of range for length {}", spec.n()))
            }
        })
        .collect::<Result<_>>()?;
    Ok(Flat::from_points(spec.m(), &points)?)
}

fn ordering_tag(spec: &CodeSpec) -> String {
    match spec.ordering().kind() {
        OrderingKind::Lexicographic => "lex".to_string(),
        OrderingKind::Power { modulus } => format!("power:{modulus:x}"),
    }
}

/// Builds the spec named by a family-file header ordering tag.
pub fn spec_from_header(r: u32, m: u32, tag: &str) -> Result<CodeSpec> {
    let ordering = if tag == "lex" {
        lex_ordering(m)?
    } else if let Some(hex) = tag.strip_prefix("power:") {
        let modulus = u32::from_str_radix(hex, 16).context("bad power-ordering modulus")?;
        power_ordering(m, modulus)?
    } else {
        bail!("unknown ordering kind {tag:?} (expected lex or power:<hex>)");
    };
    Ok(CodeSpec::new(r, m, ordering)?)
}

/// Serialises a family; exact round-trip with [`family_from_str`].
pub fn family_to_string(fam: &AdmissibleFamily) -> String {
    let spec = fam.spec();
    let mut out = String::new();
    let _ = writeln!(out, "rm {} {} {}", spec.r(), spec.m(), ordering_tag(spec));
    let scope_positions = match fam.scope() {
        Scope::AllPositions => (0..spec.n() as u16).collect::<Vec<_>>(),
        Scope::Info(j) => j.positions().to_vec(),
    };
    let _ = writeln!(out, "J: {}", format_positions(&scope_positions));
    for flat in fam.flats() {
        let _ = writeln!(out, "{}", format_flat(spec, flat));
    }
    let _ = writeln!(out, "usage:");
    for (j, used) in fam.usage() {
        let indices: Vec<String> = used.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{j}: {}", indices.join(" "));
    }
    out
}

/// Parses a family file. The scope is taken to be all positions exactly
/// when the `J:` line lists every position; otherwise it must be a valid
/// information set.
pub fn family_from_str(text: &str) -> Result<AdmissibleFamily> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| anyhow!("empty family file"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "rm" {
        bail!("bad header {header:?} (expected `rm <r> <m> <ordering>`)");
    }
    let r: u32 = parts[1].parse().context("bad r")?;
    let m: u32 = parts[2].parse().context("bad m")?;
    let spec = spec_from_header(r, m, parts[3])?;

    let (_, j_line) = lines.next().ok_or_else(|| anyhow!("missing J line"))?;
    let j_spec = j_line
        .strip_prefix("J:")
        .ok_or_else(|| anyhow!("expected `J: {{...}}`, got {j_line:?}"))?;
    let j_positions = parse_positions(j_spec)?;

    let mut flats = Vec::new();
    let mut usage: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
    let mut in_usage = false;
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "usage:" {
            in_usage = true;
            continue;
        }
        if !in_usage {
            flats.push(
                parse_flat(&spec, line).with_context(|| format!("flat at line {}", lineno + 1))?,
            );
        } else {
            let (pos, rest) = line
                .split_once(':')
                .ok_or_else(|| anyhow!("bad usage line {line:?}"))?;
            let j: u16 = pos.trim().parse().context("bad usage position")?;
            let mut used = Vec::new();
            for tok in rest.split_whitespace() {
                let idx: usize = tok.parse().context("bad usage index")?;
                if idx >= flats.len() {
                    bail!("usage index {idx} out of range at line {}", lineno + 1);
                }
                used.push(idx);
            }
            usage.insert(j, used);
        }
    }

    let scope = if j_positions.len() == spec.n() {
        Scope::AllPositions
    } else {
        Scope::Info(spec.information_set(&j_positions)?)
    };
    Ok(AdmissibleFamily::from_parts(spec, scope, flats, usage))
}

/// Generator matrix as `0`/`1` rows, one per line, columns in position
/// order.
pub fn matrix_to_string(matrix: &BitMatrix) -> String {
    let mut out = String::new();
    for row in matrix.rows() {
        let _ = writeln!(out, "{row}");
    }
    out
}

/// Parses a `0`/`1` matrix; all rows must have equal length.
pub fn matrix_from_str(text: &str) -> Result<BitMatrix> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows.push(Word::parse_bits(line)?);
    }
    Ok(BitMatrix::from_rows(rows)?)
}

/// Parses a bit-string word of exactly `len` bits.
pub fn word_from_str(text: &str, len: usize) -> Result<Word> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.len() != len {
        bail!("expected {len} bits, got {}", cleaned.len());
    }
    Ok(Word::parse_bits(&cleaned)?)
}
