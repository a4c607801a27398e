//! Shipped reference fixtures and their integrity checks.
//!
//! Fixtures are embedded at build time from `fixtures/`; a SHA-256
//! manifest pins every file, and all loaders verify the checksum before
//! parsing. `cargo run --example regen_fixtures` rebuilds the derived
//! files and the manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

use crate::formats::family_from_str;
use rm_mld_core::families::AdmissibleFamily;

pub const BOUNDS_SMALL: &str = include_str!("../fixtures/bounds_small.txt");
pub const ORBIT_INVARIANTS: &str = include_str!("../fixtures/orbit_invariants.txt");
pub const CLIQUE_CENSUS: &str = include_str!("../fixtures/clique_census.txt");
pub const GATE_COSTS: &str = include_str!("../fixtures/gate_costs.txt");
pub const RM25_GENERATOR_TYPE1: &str = include_str!("../fixtures/rm25_generator_type1.txt");
pub const RM25_TYPE1_30_FAM: &str = include_str!("../fixtures/rm25_type1_30.fam");
pub const RM24_7_FAM: &str = include_str!("../fixtures/rm24_7.fam");
pub const RM24_6_FAM: &str = include_str!("../fixtures/rm24_6.fam");
pub const CHECKSUMS: &str = include_str!("../fixtures/checksums.txt");

/// Every embedded fixture with its manifest name.
pub fn all_fixtures() -> Vec<(&'static str, &'static str)> {
    vec![
        ("bounds_small.txt", BOUNDS_SMALL),
        ("orbit_invariants.txt", ORBIT_INVARIANTS),
        ("clique_census.txt", CLIQUE_CENSUS),
        ("gate_costs.txt", GATE_COSTS),
        ("rm25_generator_type1.txt", RM25_GENERATOR_TYPE1),
        ("rm25_type1_30.fam", RM25_TYPE1_30_FAM),
        ("rm24_7.fam", RM24_7_FAM),
        ("rm24_6.fam", RM24_6_FAM),
    ]
}

pub fn sha256_hex(data: &[u8]) -> String {
    let digest = Sha256::digest(data);
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

/// Checks one fixture against the manifest.
pub fn verify_fixture(name: &str, content: &str) -> Result<()> {
    let expected = CHECKSUMS
        .lines()
        .find_map(|line| {
            let (hash, file) = line.split_once("  ")?;
            (file == name).then(|| hash.to_string())
        })
        .ok_or_else(|| anyhow!("fixture {name} missing from the checksum manifest"))?;
    let found = sha256_hex(content.as_bytes());
    if found != expected {
        bail!("fixture {name} corrupt: checksum {found}, manifest says {expected}");
    }
    Ok(())
}

/// Checks every fixture against the manifest.
pub fn verify_all_fixtures() -> Result<()> {
    for (name, content) in all_fixtures() {
        verify_fixture(name, content)?;
    }
    Ok(())
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// One row of the reference-bounds fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsRow {
    pub r: u32,
    pub m: u32,
    pub lower: u64,
    pub lower_source: String,
    pub upper: u64,
    pub upper_source: String,
}

pub fn bounds_fixture() -> Result<Vec<BoundsRow>> {
    verify_fixture("bounds_small.txt", BOUNDS_SMALL)?;
    data_lines(BOUNDS_SMALL)
        .map(|line| {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                bail!("bad bounds row {line:?}");
            }
            Ok(BoundsRow {
                r: f[0].parse()?,
                m: f[1].parse()?,
                lower: f[2].parse()?,
                lower_source: f[3].to_string(),
                upper: f[4].parse()?,
                upper_source: f[5].to_string(),
            })
        })
        .collect()
}

/// One row of the orbit-invariants fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantsRow {
    pub orbit_type: usize,
    pub orbit_length: u64,
    pub independent: u64,
    pub meeting: [u64; 5],
    pub max_clique: usize,
    pub max_clique_count: u64,
}

pub fn invariants_fixture() -> Result<Vec<InvariantsRow>> {
    verify_fixture("orbit_invariants.txt", ORBIT_INVARIANTS)?;
    data_lines(ORBIT_INVARIANTS)
        .map(|line| {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 10 {
                bail!("bad invariants row {line:?}");
            }
            Ok(InvariantsRow {
                orbit_type: f[0].parse()?,
                orbit_length: f[1].parse()?,
                independent: f[2].parse()?,
                meeting: [
                    f[3].parse()?,
                    f[4].parse()?,
                    f[5].parse()?,
                    f[6].parse()?,
                    f[7].parse()?,
                ],
                max_clique: f[8].parse()?,
                max_clique_count: f[9].parse()?,
            })
        })
        .collect()
}

/// Census counts keyed by `(orbit type, clique size)`, sizes 9..=15.
pub fn census_fixture() -> Result<BTreeMap<(usize, usize), u64>> {
    verify_fixture("clique_census.txt", CLIQUE_CENSUS)?;
    let mut out = BTreeMap::new();
    for line in data_lines(CLIQUE_CENSUS) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 8 {
            bail!("bad census row {line:?}");
        }
        let ty: usize = f[0].parse()?;
        for (i, tok) in f[1..].iter().enumerate() {
            out.insert((ty, 9 + i), tok.parse()?);
        }
    }
    Ok(out)
}

/// Verification status of a shipped gate-cost cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    /// Recomputed exactly.
    Formula,
    /// A certified-minimal family backs the value.
    Exact,
    /// A closed-form bound backs the value.
    Bound,
    /// Shipped for reference; recomputation disagrees and the cell is
    /// rendered with a marker instead of being checked.
    Unverified,
}

impl CellStatus {
    fn parse(s: &str) -> Result<CellStatus> {
        Ok(match s {
            "formula" => CellStatus::Formula,
            "exact" => CellStatus::Exact,
            "bound" => CellStatus::Bound,
            "unverified" => CellStatus::Unverified,
            other => bail!("unknown cell status {other:?}"),
        })
    }

    pub fn is_verified(self) -> bool {
        !matches!(self, CellStatus::Unverified)
    }
}

/// One row of the gate-cost fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateCostRow {
    pub r: u32,
    pub m: u32,
    pub full: u64,
    pub full_status: CellStatus,
    pub improved: u64,
    pub improved_status: CellStatus,
}

pub fn gate_costs_fixture() -> Result<Vec<GateCostRow>> {
    verify_fixture("gate_costs.txt", GATE_COSTS)?;
    data_lines(GATE_COSTS)
        .map(|line| {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                bail!("bad gate-cost row {line:?}");
            }
            Ok(GateCostRow {
                r: f[0].parse()?,
                m: f[1].parse()?,
                full: f[2].parse()?,
                full_status: CellStatus::parse(f[3])?,
                improved: f[4].parse()?,
                improved_status: CellStatus::parse(f[5])?,
            })
        })
        .collect()
}

/// The generator fixture as its 16 row strings.
pub fn generator_fixture() -> Result<Vec<String>> {
    verify_fixture("rm25_generator_type1.txt", RM25_GENERATOR_TYPE1)?;
    Ok(data_lines(RM25_GENERATOR_TYPE1)
        .map(str::to_string)
        .collect())
}

/// The witness family files, parsed. Cross-checked in the tests against
/// the structured witnesses embedded in the core crate.
pub fn witness_fixture(name: &str) -> Result<AdmissibleFamily> {
    let (file, content) = match name {
        "rm25-type1-30" => ("rm25_type1_30.fam", RM25_TYPE1_30_FAM),
        "rm24-7" => ("rm24_7.fam", RM24_7_FAM),
        "rm24-6" => ("rm24_6.fam", RM24_6_FAM),
        other => bail!("unknown witness {other:?}"),
    };
    verify_fixture(file, content)?;
    family_from_str(content).with_context(|| format!("parsing witness {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rm_mld_core::families::{
        load_witnesses, WITNESS_RM24_6, WITNESS_RM24_7, WITNESS_RM25_TYPE1_30,
    };

    #[test]
    fn checksums_hold() {
        verify_all_fixtures().unwrap();
    }

    #[test]
    fn corruption_is_detected() {
        let mut tampered = RM24_7_FAM.to_string();
        tampered.push('\n');
        let err = verify_fixture("rm24_7.fam", &tampered).unwrap_err();
        assert!(err.to_string().contains("corrupt"));
        assert!(verify_fixture("nonexistent.txt", "").is_err());
    }

    #[test]
    fn fixture_files_match_embedded_witnesses() {
        let witnesses = load_witnesses().unwrap();
        for name in [WITNESS_RM25_TYPE1_30, WITNESS_RM24_7, WITNESS_RM24_6] {
            let from_file = witness_fixture(name).unwrap();
            let embedded = &witnesses[name];
            assert_eq!(from_file.flats(), embedded.flats(), "{name}");
            assert_eq!(from_file.usage(), embedded.usage(), "{name}");
            from_file.validate().unwrap();
        }
    }

    #[test]
    fn tables_parse() {
        assert_eq!(bounds_fixture().unwrap().len(), 11);
        assert_eq!(invariants_fixture().unwrap().len(), 7);
        assert_eq!(census_fixture().unwrap().len(), 49);
        let gates = gate_costs_fixture().unwrap();
        assert_eq!(gates.len(), 12);
        assert_eq!(
            gates
                .iter()
                .filter(|g| !g.improved_status.is_verified())
                .count(),
            4
        );
        assert_eq!(
            gates
                .iter()
                .filter(|g| !g.full_status.is_verified())
                .count(),
            1
        );
        assert_eq!(generator_fixture().unwrap().len(), 16);
    }
}
